//! Basic coupling and Monte Carlo witnesses for the weak Harris premises.
//!
//! Two copies of a chain are driven by the same reference draw `ξ` and the
//! same acceptance uniform `u`. Under this coupling the expected distance after
//! one or `n` steps upper-bounds the Wasserstein distance between the step
//! laws, which is what the contraction and smallness estimators report.
//!
//! Distances:
//!
//! * global: `d(x, y) = 1 ∧ ‖x − y‖/ε`;
//! * local: the path-integral distance `1 ∧ inf_ψ ε⁻¹∫ exp(η‖ψ‖)`, which is
//!   never computed. [`d_local_bounds`] gives closed-form two-sided bounds and
//!   the estimators work with the upper bound, so local contraction figures
//!   are conservative.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, out_of_range, Error, Result};
use crate::kernel::MhKernel;
use crate::measure::{distance, norm, random_direction, Estimate, StateVector};
use crate::rng::{RngStream, Streams};

/// Lyapunov function family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VSpec {
    /// `V(x) = ‖x‖^i`.
    PowerNorm { i: u32 },
    /// `V(x) = exp(v‖x‖)`.
    ExpNorm { v: f64 },
}

impl VSpec {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = norm(x);
        match *self {
            VSpec::PowerNorm { i } => n.powi(i as i32),
            VSpec::ExpNorm { v } => (v * n).exp(),
        }
    }

    /// Radius of the sublevel set `{V ≤ level}` (a centred ball).
    pub fn sublevel_radius(&self, level: f64) -> f64 {
        match *self {
            VSpec::PowerNorm { i } => level.max(0.0).powf(1.0 / i as f64),
            VSpec::ExpNorm { v } => (level.max(1.0)).ln() / v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceParams {
    pub epsilon: f64,
    pub eta: f64,
    pub v_spec: VSpec,
}

impl DistanceParams {
    pub fn new(epsilon: f64, eta: f64, v_spec: VSpec) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(out_of_range("epsilon", format!("{epsilon} must be positive")));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(out_of_range("eta", format!("{eta} must be nonnegative")));
        }
        match v_spec {
            VSpec::PowerNorm { i: 0 } => return Err(out_of_range("i", "power must be positive")),
            VSpec::ExpNorm { v } if !(v > 0.0) => return Err(out_of_range("v", format!("{v} must be positive"))),
            _ => {}
        }
        Ok(Self { epsilon, eta, v_spec })
    }

    /// Global distance with `V = ‖x‖²`.
    pub fn global(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0, VSpec::PowerNorm { i: 2 })
    }
}

pub fn v_eval(params: &DistanceParams, x: &[f64]) -> f64 {
    params.v_spec.eval(x)
}

/// `1 ∧ ‖x − y‖/ε`.
pub fn d_global(x: &[f64], y: &[f64], params: &DistanceParams) -> f64 {
    (distance(x, y) / params.epsilon).min(1.0)
}

/// Closed-form bounds on the local path distance (without the `1 ∧`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBounds {
    pub lower: f64,
    pub upper: f64,
    /// `upper < 1`, the regime in which `lower` is a valid bound.
    pub valid_regime: bool,
}

/// With `s = ‖x‖ ∨ ‖y‖` and `J = ε exp(−η((s − ε) ∨ 0))`:
/// upper `= ‖x−y‖/ε · e^{ηs}`, lower `= ‖x−y‖/ε · e^{η((s − J) ∨ 0)}`.
pub fn d_local_bounds(x: &[f64], y: &[f64], params: &DistanceParams) -> LocalBounds {
    let gap = distance(x, y) / params.epsilon;
    let s = norm(x).max(norm(y));
    let eta = params.eta;
    let j = params.epsilon * (-eta * (s - params.epsilon).max(0.0)).exp();
    let upper = gap * (eta * s).exp();
    let lower = gap * (eta * (s - j).max(0.0)).exp();
    LocalBounds {
        lower: lower.min(upper),
        upper,
        valid_regime: upper < 1.0,
    }
}

/// `√(d (1 + V(x) + V(y)))`.
pub fn d_tilde(d_value: f64, x: &[f64], y: &[f64], params: &DistanceParams) -> Result<f64> {
    d_tilde_with(d_value, x, y, |z| params.v_spec.eval(z))
}

pub fn d_tilde_with(d_value: f64, x: &[f64], y: &[f64], v: impl Fn(&[f64]) -> f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d_value) {
        return Err(out_of_range("d", format!("{d_value} not in [0, 1]")));
    }
    Ok((d_value * (1.0 + v(x) + v(y))).sqrt())
}

/// Which distance the estimators use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    Global,
    /// `1 ∧` the upper bound of [`d_local_bounds`].
    LocalUpper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub kind: DistanceKind,
    pub params: DistanceParams,
}

impl Distance {
    pub fn global(params: DistanceParams) -> Self {
        Self {
            kind: DistanceKind::Global,
            params,
        }
    }

    pub fn local_upper(params: DistanceParams) -> Self {
        Self {
            kind: DistanceKind::LocalUpper,
            params,
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            DistanceKind::Global => d_global(x, y, &self.params),
            DistanceKind::LocalUpper => d_local_bounds(x, y, &self.params).upper.min(1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    BothAccept,
    BothReject,
    OneAccepts,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledPair {
    pub x: StateVector,
    pub y: StateVector,
    pub case_tag: Option<CaseTag>,
}

impl CoupledPair {
    pub fn new(x: impl Into<StateVector>, y: impl Into<StateVector>) -> Result<Self> {
        let (x, y) = (x.into(), y.into());
        check_dims(x.dim(), y.dim())?;
        Ok(Self { x, y, case_tag: None })
    }
}

/// One basic-coupling step. Draw order matches [`MhKernel::mh_step`] (`ξ`
/// first, then `u`), so each margin replays an uncoupled chain on the same
/// stream.
pub fn coupled_step(kernel: &MhKernel, pair: &CoupledPair, rng: &mut RngStream) -> Result<(CoupledPair, CaseTag)> {
    check_dims(kernel.dim(), pair.x.dim())?;
    check_dims(kernel.dim(), pair.y.dim())?;
    let mut c = CoupledChain::new(kernel, &pair.x, &pair.y, rng.clone())?;
    let tag = c.step();
    *rng = c.rng;
    let out = CoupledPair {
        x: StateVector(c.x),
        y: StateVector(c.y),
        case_tag: Some(tag),
    };
    Ok((out, tag))
}

/// Two chains under basic coupling, updated in place.
pub struct CoupledChain<'k> {
    kernel: &'k MhKernel,
    x: Vec<f64>,
    y: Vec<f64>,
    px: Vec<f64>,
    py: Vec<f64>,
    ex: f64,
    ey: f64,
    rng: RngStream,
}

impl<'k> CoupledChain<'k> {
    pub fn new(kernel: &'k MhKernel, x: &[f64], y: &[f64], rng: RngStream) -> Result<Self> {
        check_dims(kernel.dim(), x.len())?;
        check_dims(kernel.dim(), y.len())?;
        Ok(Self {
            kernel,
            ex: kernel.energy(x),
            ey: kernel.energy(y),
            x: x.to_vec(),
            y: y.to_vec(),
            px: vec![0.0; x.len()],
            py: vec![0.0; x.len()],
            rng,
        })
    }

    pub fn step(&mut self) -> CaseTag {
        let c = self.kernel.mean_coefficient();
        let s = self.kernel.params().noise_scale();
        for (i, l) in self.kernel.measure().lambdas().iter().enumerate() {
            let xi = s * l * self.rng.standard_normal();
            self.px[i] = c * self.x[i] + xi;
            self.py[i] = c * self.y[i] + xi;
        }
        let epx = self.kernel.energy(&self.px);
        let epy = self.kernel.energy(&self.py);
        let u = self.rng.uniform();
        let ax = u < MhKernel::log_accept_from_energies(self.ex, epx).exp();
        let ay = u < MhKernel::log_accept_from_energies(self.ey, epy).exp();
        if ax {
            std::mem::swap(&mut self.x, &mut self.px);
            self.ex = epx;
        }
        if ay {
            std::mem::swap(&mut self.y, &mut self.py);
            self.ey = epy;
        }
        match (ax, ay) {
            (true, true) => CaseTag::BothAccept,
            (false, false) => CaseTag::BothReject,
            _ => CaseTag::OneAccepts,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// One row of the drift table: a representative state at `radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub radius: f64,
    pub v_x: f64,
    /// Monte Carlo `E[V(X_1) | X_0 = x]`.
    pub mean_next: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub l_hat: f64,
    pub k_hat: f64,
    /// Normal-approximation interval for the slope `l_hat`.
    pub l_ci: (f64, f64),
    pub table: Vec<DriftRow>,
    pub contracting: bool,
    pub z: f64,
}

/// Fits `E[V(X_1)|x] ≤ l V(x) + K` over one representative state per radius.
///
/// The slope is the least-squares fit through the Monte Carlo means (clamped
/// at 0); the intercept is then raised until the line dominates every mean
/// plus `z` standard errors.
pub fn estimate_lyapunov<V>(
    kernel: &MhKernel,
    v: V,
    radii: &[f64],
    samples: usize,
    streams: &Streams,
    z: f64,
) -> Result<LyapunovEstimate>
where
    V: Fn(&[f64]) -> f64 + Sync,
{
    if radii.is_empty() {
        return Err(Error::Precondition("radius grid is empty".into()));
    }
    if samples < 2 {
        return Err(Error::Precondition("need at least two samples per radius".into()));
    }
    let m = kernel.dim();
    let table: Vec<DriftRow> = radii
        .par_iter()
        .enumerate()
        .map(|(idx, &radius)| {
            let mut rng = streams.stream(idx as u64, 0);
            let x: Vec<f64> = random_direction(m, &mut rng).iter().map(|d| d * radius).collect();
            let v_x = v(&x);
            let vals: Vec<f64> = (0..samples)
                .map(|_| {
                    let out = kernel.mh_step(&x, &mut rng).expect("dimension checked");
                    v(&out.next)
                })
                .collect();
            DriftRow {
                radius,
                v_x,
                mean_next: Estimate::from_samples(&vals),
            }
        })
        .collect();

    let n = table.len() as f64;
    let vbar = table.iter().map(|r| r.v_x).sum::<f64>() / n;
    let sxx: f64 = table.iter().map(|r| (r.v_x - vbar).powi(2)).sum();
    let (slope, slope_sd) = if sxx > 0.0 {
        let ybar = table.iter().map(|r| r.mean_next.value).sum::<f64>() / n;
        let sxy: f64 = table.iter().map(|r| (r.v_x - vbar) * (r.mean_next.value - ybar)).sum();
        let var: f64 = table
            .iter()
            .map(|r| (r.v_x - vbar).powi(2) * r.mean_next.std_err.powi(2))
            .sum::<f64>()
            / (sxx * sxx);
        (sxy / sxx, var.sqrt())
    } else {
        (0.0, 0.0)
    };
    let l_hat = slope.max(0.0);
    let k_hat = table
        .iter()
        .map(|r| r.mean_next.upper(z) - l_hat * r.v_x)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let l_ci = ((slope - z * slope_sd).max(0.0), (slope + z * slope_sd).max(0.0));
    Ok(LyapunovEstimate {
        l_hat,
        k_hat,
        l_ci,
        contracting: l_ci.1 < 1.0,
        table,
        z,
    })
}

/// Source of `(x, y)` pairs for the contraction estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairSampler {
    /// `x` on a sphere of radius uniform in `[r_min, r_max]`, `y = x + separation · u`
    /// with `u` a uniform unit vector.
    NearDiagonal { r_min: f64, r_max: f64, separation: f64 },
    /// Fixed pairs, cycled.
    Fixed { pairs: Vec<(Vec<f64>, Vec<f64>)> },
}

impl PairSampler {
    /// Pairs inside `B_R` at separation `ε/2`.
    pub fn inside(r_big: f64, epsilon: f64) -> Self {
        PairSampler::NearDiagonal {
            r_min: 0.0,
            r_max: r_big,
            separation: 0.5 * epsilon,
        }
    }

    /// Pairs with `R ≤ ‖x‖ ≤ r_max` at separation `ε/2`.
    pub fn outside(r_big: f64, r_max: f64, epsilon: f64) -> Self {
        PairSampler::NearDiagonal {
            r_min: r_big,
            r_max,
            separation: 0.5 * epsilon,
        }
    }

    pub fn sample(&self, m: usize, index: usize, rng: &mut RngStream) -> (Vec<f64>, Vec<f64>) {
        match self {
            PairSampler::NearDiagonal { r_min, r_max, separation } => {
                let r = r_min + (r_max - r_min) * rng.uniform();
                let x: Vec<f64> = random_direction(m, rng).iter().map(|d| d * r).collect();
                let u = random_direction(m, rng);
                let y = x.iter().zip(&u).map(|(a, b)| a + separation * b).collect();
                (x, y)
            }
            PairSampler::Fixed { pairs } => pairs[index % pairs.len()].clone(),
        }
    }
}

/// Upper estimate of the one-step contraction factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionEstimate {
    pub c_hat: f64,
    /// Interval for the worst pair's ratio; the upper end is the largest
    /// `ratio + z·se` over all pairs.
    pub ci: (f64, f64),
    pub n_pairs: usize,
    pub reps_per_pair: usize,
    /// Pairs dropped because `d(x, y) ≥ 1`.
    pub rejected_far: usize,
    /// Pairs dropped because `x = y`.
    pub rejected_diagonal: usize,
    pub z: f64,
}

/// Per-pair `E[d(X_1, Y_1)] / d(x, y)` under basic coupling; `c_hat` is the
/// maximum over pairs.
pub fn estimate_contraction(
    kernel: &MhKernel,
    dist: &Distance,
    sampler: &PairSampler,
    n_pairs: usize,
    reps_per_pair: usize,
    streams: &Streams,
    z: f64,
) -> Result<ContractionEstimate> {
    if n_pairs == 0 || reps_per_pair < 2 {
        return Err(Error::Precondition("need n_pairs ≥ 1 and reps_per_pair ≥ 2".into()));
    }
    let m = kernel.dim();
    enum PairResult {
        Far,
        Diagonal,
        Ratio(Estimate),
    }
    let results: Vec<PairResult> = (0..n_pairs)
        .into_par_iter()
        .map(|p| {
            let mut rng = streams.stream(p as u64, 0);
            let (x, y) = sampler.sample(m, p, &mut rng);
            let d0 = dist.eval(&x, &y);
            if d0 >= 1.0 {
                return PairResult::Far;
            }
            if d0 <= 0.0 {
                return PairResult::Diagonal;
            }
            let mut chain_rng = streams.stream(p as u64, 1);
            let ratios: Vec<f64> = (0..reps_per_pair)
                .map(|_| {
                    let mut c = CoupledChain::new(kernel, &x, &y, chain_rng.clone()).expect("dims");
                    c.step();
                    chain_rng = c.rng;
                    dist.eval(&c.x, &c.y) / d0
                })
                .collect();
            PairResult::Ratio(Estimate::from_samples(&ratios))
        })
        .collect();

    let mut rejected_far = 0;
    let mut rejected_diagonal = 0;
    let mut worst: Option<Estimate> = None;
    let mut upper = f64::NEG_INFINITY;
    let mut used = 0;
    for r in results {
        match r {
            PairResult::Far => rejected_far += 1,
            PairResult::Diagonal => rejected_diagonal += 1,
            PairResult::Ratio(e) => {
                used += 1;
                upper = upper.max(e.upper(z));
                if worst.is_none_or(|w| e.value > w.value) {
                    worst = Some(e);
                }
            }
        }
    }
    let worst = worst.ok_or_else(|| {
        Error::Precondition(format!(
            "no usable pairs ({rejected_far} with d ≥ 1, {rejected_diagonal} on the diagonal)"
        ))
    })?;
    Ok(ContractionEstimate {
        c_hat: worst.value,
        ci: (worst.lower(z), upper),
        n_pairs: used,
        reps_per_pair,
        rejected_far,
        rejected_diagonal,
        z,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallnessEstimate {
    pub s_hat: f64,
    pub ci: (f64, f64),
    pub n_steps: usize,
    /// Radius of the sublevel set `S = {V ≤ 4K}`.
    pub set_radius: f64,
    pub n_pairs: usize,
    pub z: f64,
}

/// Smallest `n` with `c^n · diam(S)/ε · e^{η r_S} ≤ 1/2`, where `c` is the
/// proposal mean coefficient (`1 − ρ` for pCN) and the exponential factor is
/// present only for the local distance. `None` when `c ≥ 1`.
pub fn min_smallness_steps(kernel: &MhKernel, dist: &Distance, set_radius: f64) -> Option<usize> {
    let c = kernel.mean_coefficient();
    let scale = smallness_scale(dist, set_radius);
    if scale <= 0.5 {
        return Some(0);
    }
    if c >= 1.0 {
        return None;
    }
    if c <= 0.0 {
        return Some(1);
    }
    Some(((0.5 / scale).ln() / c.ln()).ceil() as usize)
}

fn smallness_scale(dist: &Distance, set_radius: f64) -> f64 {
    let base = 2.0 * set_radius / dist.params.epsilon;
    match dist.kind {
        DistanceKind::Global => base,
        DistanceKind::LocalUpper => base * (dist.params.eta * set_radius).exp(),
    }
}

/// `max` over pairs in `S × S` of `E[d(X_n, Y_n)]` under basic coupling.
///
/// Pairs: the first is the antipodal pair `(r_S e_1, −r_S e_1)`; then
/// alternately antipodal pairs on the boundary sphere and independent uniform
/// points of `S`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_smallness(
    kernel: &MhKernel,
    dist: &Distance,
    v_spec: &VSpec,
    k_hat: f64,
    n_steps: usize,
    n_pairs: usize,
    reps_per_pair: usize,
    streams: &Streams,
    z: f64,
) -> Result<SmallnessEstimate> {
    let set_radius = v_spec.sublevel_radius(4.0 * k_hat);
    let c = kernel.mean_coefficient();
    let scale = smallness_scale(dist, set_radius);
    if c.powi(n_steps as i32) * scale > 0.5 {
        return Err(Error::Precondition(format!(
            "n_steps = {n_steps} too small: need {:?} for diam(S) = {} and coefficient {c}",
            min_smallness_steps(kernel, dist, set_radius),
            2.0 * set_radius
        )));
    }
    if n_pairs == 0 || reps_per_pair < 2 {
        return Err(Error::Precondition("need n_pairs ≥ 1 and reps_per_pair ≥ 2".into()));
    }
    let m = kernel.dim();
    let origin = vec![0.0; m];
    let estimates: Vec<Estimate> = (0..n_pairs)
        .into_par_iter()
        .map(|p| {
            let mut rng = streams.stream(p as u64, 0);
            let (x, y) = if p == 0 {
                let mut x = vec![0.0; m];
                x[0] = set_radius;
                let y = x.iter().map(|v| -v).collect();
                (x, y)
            } else if p % 2 == 1 {
                let x: Vec<f64> = random_direction(m, &mut rng).iter().map(|d| d * set_radius).collect();
                let y = x.iter().map(|v| -v).collect();
                (x, y)
            } else {
                (
                    crate::measure::sample_in_ball(&origin, set_radius, &mut rng),
                    crate::measure::sample_in_ball(&origin, set_radius, &mut rng),
                )
            };
            let mut chain_rng = streams.stream(p as u64, 1);
            let vals: Vec<f64> = (0..reps_per_pair)
                .map(|_| {
                    let mut ch = CoupledChain::new(kernel, &x, &y, chain_rng.clone()).expect("dims");
                    for _ in 0..n_steps {
                        ch.step();
                    }
                    chain_rng = ch.rng;
                    dist.eval(&ch.x, &ch.y)
                })
                .collect();
            Estimate::from_samples(&vals)
        })
        .collect();
    let worst = estimates
        .iter()
        .copied()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("n_pairs ≥ 1");
    let upper = estimates.iter().map(|e| e.upper(z)).fold(f64::NEG_INFINITY, f64::max);
    Ok(SmallnessEstimate {
        s_hat: worst.value,
        ci: (worst.lower(z), upper),
        n_steps,
        set_radius,
        n_pairs,
        z,
    })
}

/// Constants of the weak Harris premises with their sampling details.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarrisCertificate {
    pub lyapunov: LyapunovPart,
    pub contraction: ContractionPart,
    pub smallness: SmallnessPart,
    pub premises_hold: bool,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovPart {
    pub l: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub ci: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionPart {
    pub c: f64,
    pub ci: (f64, f64),
    pub n_pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallnessPart {
    pub s: f64,
    pub n_steps: usize,
    pub ci: (f64, f64),
}

/// Premises hold when the upper confidence limits of `l`, `c` and `s` are
/// all below 1. The iteration count of the resulting contraction is not
/// computed.
pub fn harris_certificate(
    lyapunov: Option<&LyapunovEstimate>,
    contraction: Option<&ContractionEstimate>,
    smallness: Option<&SmallnessEstimate>,
    seeds: Vec<u64>,
) -> Result<HarrisCertificate> {
    let missing = |what: &str| Error::Precondition(format!("{what} estimate missing"));
    let l = lyapunov.ok_or_else(|| missing("Lyapunov"))?;
    let c = contraction.ok_or_else(|| missing("contraction"))?;
    let s = smallness.ok_or_else(|| missing("smallness"))?;
    let premises_hold = l.l_hat < 1.0
        && l.l_ci.1 < 1.0
        && c.c_hat < 1.0
        && c.ci.1 < 1.0
        && s.s_hat < 1.0
        && s.ci.1 < 1.0;
    Ok(HarrisCertificate {
        lyapunov: LyapunovPart {
            l: l.l_hat,
            k: l.k_hat,
            ci: l.l_ci,
        },
        contraction: ContractionPart {
            c: c.c_hat,
            ci: c.ci,
            n_pairs: c.n_pairs,
        },
        smallness: SmallnessPart {
            s: s.s_hat,
            n_steps: s.n_steps,
            ci: s.ci,
        },
        premises_hold,
        seeds,
    })
}
