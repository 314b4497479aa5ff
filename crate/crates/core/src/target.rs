//! Potentials `Φ` defining targets `μ(dx) ∝ e^{-Φ(x)} γ(dx)`.
//!
//! Only differences of `Φ` enter the Metropolis-Hastings acceptance, so the
//! normalising constant of `μ` is never formed.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::kernel::KernelParams;
use crate::measure::{norm, sample_in_ball};
use crate::rng::RngStream;

/// Declared regularity of `Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiProfile {
    Zero,
    /// `|Φ(x) − Φ(y)| ≤ L ‖x − y‖`.
    GlobalLipschitz { l: f64 },
    /// Local Lipschitz constant on `B_r(0)` at most `M_κ e^{κ r}`.
    LocalLipschitz { m_kappa: f64, kappa: f64 },
}

impl PhiProfile {
    /// Declared bound on the local Lipschitz constant `φ(r)`.
    pub fn lipschitz_envelope(&self, r: f64) -> f64 {
        match *self {
            PhiProfile::Zero => 0.0,
            PhiProfile::GlobalLipschitz { l } => l,
            PhiProfile::LocalLipschitz { m_kappa, kappa } => m_kappa * (kappa * r).exp(),
        }
    }
}

/// Built-in potentials; the names are the config keys.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum BuiltinTarget {
    /// `Φ ≡ 0`: the target is the reference measure itself.
    Zero,
    /// `Φ(x) = L‖x‖`.
    NormTilt {
        #[serde(rename = "L")]
        l: f64,
    },
    /// `Φ(x) = a‖x‖^{3/2}`.
    PowerTilt { a: f64 },
}

pub type PotentialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Potential {
    Builtin(BuiltinTarget),
    Custom(PotentialFn),
}

#[derive(Clone)]
pub struct TargetDensity {
    potential: Potential,
    name: String,
    profile: PhiProfile,
}

impl fmt::Debug for TargetDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetDensity")
            .field("name", &self.name)
            .field("profile", &self.profile)
            .finish()
    }
}

impl TargetDensity {
    pub fn zero() -> Self {
        Self::builtin(BuiltinTarget::Zero).expect("zero target is always valid")
    }

    pub fn norm_tilt(l: f64) -> Result<Self> {
        Self::builtin(BuiltinTarget::NormTilt { l })
    }

    pub fn power_tilt(a: f64) -> Result<Self> {
        Self::builtin(BuiltinTarget::PowerTilt { a })
    }

    pub fn builtin(b: BuiltinTarget) -> Result<Self> {
        let (name, profile) = match b {
            BuiltinTarget::Zero => ("zero", PhiProfile::Zero),
            BuiltinTarget::NormTilt { l } => {
                if !(l.is_finite() && l >= 0.0) {
                    return Err(out_of_range("L", format!("{l} must be finite and nonnegative")));
                }
                ("norm_tilt", PhiProfile::GlobalLipschitz { l })
            }
            BuiltinTarget::PowerTilt { a } => {
                if !(a.is_finite() && a > 0.0) {
                    return Err(out_of_range("a", format!("{a} must be finite and positive")));
                }
                // φ(r) = (3/2) a √r and sup_r √r e^{-r} = (2e)^{-1/2}, so κ = 1
                // with M_κ = 1.5 a / √(2e) is a valid envelope.
                let kappa = 1.0;
                let m_kappa = 1.5 * a / (2.0 * std::f64::consts::E * kappa).sqrt();
                ("power_tilt", PhiProfile::LocalLipschitz { m_kappa, kappa })
            }
        };
        Ok(Self {
            potential: Potential::Builtin(b),
            name: name.to_string(),
            profile,
        })
    }

    /// A user-supplied potential. The profile is taken on trust.
    pub fn custom(
        name: impl Into<String>,
        profile: PhiProfile,
        phi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            potential: Potential::Custom(Arc::new(phi)),
            name: name.into(),
            profile,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn profile(&self) -> PhiProfile {
        self.profile
    }

    pub fn builtin_kind(&self) -> Option<BuiltinTarget> {
        match self.potential {
            Potential::Builtin(b) => Some(b),
            Potential::Custom(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.potential, Potential::Builtin(BuiltinTarget::Zero))
    }

    #[inline]
    pub fn phi(&self, x: &[f64]) -> f64 {
        match &self.potential {
            Potential::Builtin(BuiltinTarget::Zero) => 0.0,
            Potential::Builtin(BuiltinTarget::NormTilt { l }) => l * norm(x),
            Potential::Builtin(BuiltinTarget::PowerTilt { a }) => {
                let n = norm(x);
                a * n * n.sqrt()
            }
            Potential::Custom(f) => f(x),
        }
    }

    /// Largest difference quotient `|Φ(x) − Φ(y)| / ‖x − y‖` over `probes`
    /// sampled pairs in `B_r(0)`; a lower estimate of the local Lipschitz
    /// constant `φ(r)`.
    ///
    /// Half of the pairs are independent uniform points of the ball; the other
    /// half are radial pairs `(x, t x)` with `t` uniform in `[0, 1)`, along
    /// which norm-based potentials change fastest.
    pub fn local_lipschitz_estimate(&self, m: usize, r: f64, probes: usize, rng: &mut RngStream) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Precondition(format!("radius {r} must be positive")));
        }
        if probes < 2 {
            return Err(Error::Precondition("need at least two probes".into()));
        }
        let origin = vec![0.0; m];
        let mut best: f64 = 0.0;
        for k in 0..probes {
            let x = sample_in_ball(&origin, r, rng);
            let y = if k % 2 == 0 {
                sample_in_ball(&origin, r, rng)
            } else {
                let t = rng.uniform();
                x.iter().map(|v| t * v).collect()
            };
            let dist = crate::measure::distance(&x, &y);
            if dist > 0.0 {
                let q = (self.phi(&x) - self.phi(&y)).abs() / dist;
                if q.is_finite() {
                    best = best.max(q);
                }
            }
        }
        Ok(best)
    }

    /// Monte Carlo estimate of `inf_z e^{Φ(x) − Φ(z)}` over the ball
    /// `B_{r(‖x‖)}((1 − ρ) x)`, i.e. the worst pCN acceptance probability for
    /// proposals landing near the proposal mean. `probes` points are drawn
    /// uniformly from the ball (the first probe is the centre when
    /// `probes > 1`). The ball radius is `min(r(‖x‖), ρ‖x‖/2)`.
    pub fn acceptance_floor_probe(
        &self,
        profile: &AssumptionProfile,
        params: &KernelParams,
        x: &[f64],
        probes: usize,
        rng: &mut RngStream,
    ) -> Result<f64> {
        let s = norm(x);
        if s < profile.r_big {
            return Err(Error::Precondition(format!("‖x‖ = {s} is inside B_R with R = {}", profile.r_big)));
        }
        if probes == 0 {
            return Err(Error::Precondition("need at least one probe".into()));
        }
        let rho = params.rho();
        let radius = profile.ball_radius(s, rho);
        let centre: Vec<f64> = x.iter().map(|v| (1.0 - rho) * v).collect();
        let phi_x = self.phi(x);
        let mut floor = f64::INFINITY;
        for k in 0..probes {
            let z = if k == 0 && probes > 1 {
                centre.clone()
            } else {
                sample_in_ball(&centre, radius, rng)
            };
            floor = floor.min((phi_x - self.phi(&z)).exp());
        }
        Ok(floor)
    }
}

/// Radius rule `r(s)` of the acceptance-floor ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RadiusRule {
    Constant { r: f64 },
    /// `r(s) = r s^a`, `a ∈ (1/2, 1)`.
    Power { r: f64, a: f64 },
}

/// Constants `(R, α_l, r(·))` of the acceptance-floor condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionProfile {
    #[serde(rename = "R")]
    pub r_big: f64,
    pub alpha_l: f64,
    pub r_rule: RadiusRule,
}

impl AssumptionProfile {
    pub fn new(r_big: f64, alpha_l: f64, r_rule: RadiusRule) -> Result<Self> {
        if !(r_big > 0.0 && r_big.is_finite()) {
            return Err(out_of_range("R", format!("{r_big} must be positive")));
        }
        match r_rule {
            RadiusRule::Constant { r } if !(r >= 0.0 && r.is_finite()) => {
                return Err(out_of_range("r", format!("{r} must be finite and nonnegative")))
            }
            RadiusRule::Power { r, a } if !(r >= 0.0 && a > 0.5 && a < 1.0) => {
                return Err(out_of_range("a", format!("need r ≥ 0 and a in (1/2, 1), got r = {r}, a = {a}")))
            }
            _ => {}
        }
        Ok(Self { r_big, alpha_l, r_rule })
    }

    pub fn r_of(&self, s: f64) -> f64 {
        match self.r_rule {
            RadiusRule::Constant { r } => r,
            RadiusRule::Power { r, a } => r * s.powf(a),
        }
    }

    /// `r(s) ∧ ρ s / 2`.
    pub fn ball_radius(&self, s: f64, rho: f64) -> f64 {
        self.r_of(s).min(0.5 * rho * s)
    }
}
