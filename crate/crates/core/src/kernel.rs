//! Metropolis-Hastings kernels with pCN and random-walk proposals.
//!
//! For a current state `x` and a draw `ξ ~ γ_m`:
//!
//! * pCN proposes `(1 − 2δ)^{1/2} x + √(2δ) ξ` and accepts with
//!   `1 ∧ exp(Φ(x) − Φ(y))`;
//! * RWM proposes `x + √(2δ) ξ` and accepts with
//!   `1 ∧ exp(Φ(x) − Φ(y) + ½⟨x, C⁻¹x⟩ − ½⟨y, C⁻¹y⟩)`.
//!
//! The RWM proposal covariance is the reference covariance `C_m`, not the
//! identity. All acceptance arithmetic is done on the log scale: the
//! Cameron-Martin terms reach `10^6` at moderate `m`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, out_of_range, Error, Result};
use crate::measure::{GaussianMeasure, SpectrumSpec, StateVector};
use crate::rng::RngStream;
use crate::target::{BuiltinTarget, TargetDensity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalKind {
    Pcn,
    Rwm,
}

impl std::fmt::Display for ProposalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProposalKind::Pcn => "pcn",
            ProposalKind::Rwm => "rwm",
        })
    }
}

/// Step size `δ`, with `ρ = 1 − (1 − 2δ)^{1/2}` for `δ ≤ 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    delta: f64,
}

impl KernelParams {
    /// `δ ∈ (0, 1/2]`, the admissible range for pCN.
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(out_of_range("delta", format!("{delta} not in (0, 1/2]")));
        }
        Ok(Self { delta })
    }

    /// Any finite `δ > 0`; random-walk scalings `δ_m = s m^{-a}` may exceed 1/2.
    pub fn unrestricted(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(out_of_range("delta", format!("{delta} must be positive")));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `1 − (1 − 2δ)^{1/2}`; NaN when `δ > 1/2`.
    pub fn rho(&self) -> f64 {
        1.0 - self.pcn_coefficient()
    }

    /// `(1 − 2δ)^{1/2}`; the coefficient is exactly 0 at `δ = 1/2`.
    pub fn pcn_coefficient(&self) -> f64 {
        (1.0 - 2.0 * self.delta).sqrt()
    }

    /// `√(2δ)`.
    pub fn noise_scale(&self) -> f64 {
        (2.0 * self.delta).sqrt()
    }
}

/// `(1 − 2δ)^{1/2} x + √(2δ) ξ`.
pub fn pcn_propose(x: &[f64], xi: &[f64], params: &KernelParams) -> Result<StateVector> {
    check_dims(x.len(), xi.len())?;
    let (c, s) = (params.pcn_coefficient(), params.noise_scale());
    Ok(x.iter().zip(xi).map(|(a, b)| c * a + s * b).collect::<Vec<_>>().into())
}

/// `x + √(2δ) ξ`.
pub fn rwm_propose(x: &[f64], xi: &[f64], params: &KernelParams) -> Result<StateVector> {
    check_dims(x.len(), xi.len())?;
    let s = params.noise_scale();
    Ok(x.iter().zip(xi).map(|(a, b)| a + s * b).collect::<Vec<_>>().into())
}

/// Serializable summary of a kernel, stored with traces and reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelDescriptor {
    pub kind: ProposalKind,
    pub delta: f64,
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target_params: Option<BuiltinTarget>,
    pub spectrum: SpectrumSpec,
}

#[derive(Clone, Debug)]
pub struct MhKernel {
    kind: ProposalKind,
    params: KernelParams,
    target: TargetDensity,
    measure: GaussianMeasure,
    coef: f64,
    noise: f64,
    /// `1/λ_i²`, only populated for RWM.
    precision: Vec<f64>,
}

/// Result of one Metropolis-Hastings transition.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub next: StateVector,
    pub accepted: bool,
    pub proposal: StateVector,
}

impl MhKernel {
    pub fn new(kind: ProposalKind, params: KernelParams, target: TargetDensity, measure: GaussianMeasure) -> Result<Self> {
        let precision = match kind {
            ProposalKind::Pcn => {
                if params.delta > 0.5 {
                    return Err(out_of_range("delta", format!("{} not in (0, 1/2] for pCN", params.delta)));
                }
                Vec::new()
            }
            ProposalKind::Rwm => {
                if measure.lambdas().iter().any(|l| *l <= 0.0) {
                    return Err(Error::Precondition(
                        "random-walk acceptance needs all λ_i > 0 (C must be invertible)".into(),
                    ));
                }
                measure.lambdas().iter().map(|l| 1.0 / (l * l)).collect()
            }
        };
        let coef = match kind {
            ProposalKind::Pcn => params.pcn_coefficient(),
            ProposalKind::Rwm => 1.0,
        };
        Ok(Self {
            kind,
            params,
            target,
            measure,
            coef,
            noise: params.noise_scale(),
            precision,
        })
    }

    pub fn pcn(delta: f64, target: TargetDensity, measure: GaussianMeasure) -> Result<Self> {
        Self::new(ProposalKind::Pcn, KernelParams::new(delta)?, target, measure)
    }

    pub fn rwm(delta: f64, target: TargetDensity, measure: GaussianMeasure) -> Result<Self> {
        Self::new(ProposalKind::Rwm, KernelParams::unrestricted(delta)?, target, measure)
    }

    pub fn kind(&self) -> ProposalKind {
        self.kind
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn target(&self) -> &TargetDensity {
        &self.target
    }

    pub fn measure(&self) -> &GaussianMeasure {
        &self.measure
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    /// Multiplier of the current state in the proposal mean.
    pub fn mean_coefficient(&self) -> f64 {
        self.coef
    }

    pub fn descriptor(&self) -> KernelDescriptor {
        KernelDescriptor {
            kind: self.kind,
            delta: self.params.delta,
            target: self.target.name().to_string(),
            target_params: self.target.builtin_kind(),
            spectrum: self.measure.spectrum().clone(),
        }
    }

    /// `½ ⟨x, C⁻¹ x⟩` for RWM, zero for pCN.
    #[inline]
    pub fn reference_energy(&self, x: &[f64]) -> f64 {
        match self.kind {
            ProposalKind::Pcn => 0.0,
            ProposalKind::Rwm => 0.5 * x.iter().zip(&self.precision).map(|(v, p)| v * v * p).sum::<f64>(),
        }
    }

    /// `Φ(x)` plus the reference energy: the negative log-density that enters
    /// the acceptance ratio.
    #[inline]
    pub fn energy(&self, x: &[f64]) -> f64 {
        self.target.phi(x) + self.reference_energy(x)
    }

    /// `log α` from precomputed energies; `−∞` when the difference is undefined.
    #[inline]
    pub fn log_accept_from_energies(energy_x: f64, energy_y: f64) -> f64 {
        let d = energy_x - energy_y;
        if d.is_nan() {
            f64::NEG_INFINITY
        } else {
            d.min(0.0)
        }
    }

    pub fn log_accept_prob(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dims(self.dim(), x.len())?;
        check_dims(self.dim(), y.len())?;
        Ok(Self::log_accept_from_energies(self.energy(x), self.energy(y)))
    }

    pub fn accept_prob(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(self.log_accept_prob(x, y)?.exp().clamp(0.0, 1.0))
    }

    /// Proposal from `x` given a reference draw `ξ ~ γ_m`.
    pub fn propose(&self, x: &[f64], xi: &[f64]) -> Result<StateVector> {
        match self.kind {
            ProposalKind::Pcn => pcn_propose(x, xi, &self.params),
            ProposalKind::Rwm => rwm_propose(x, xi, &self.params),
        }
    }

    /// Writes the proposal from `x` into `out`, drawing `ξ` from `rng`.
    #[inline]
    pub(crate) fn propose_into(&self, x: &[f64], rng: &mut RngStream, out: &mut [f64]) {
        for ((o, xv), l) in out.iter_mut().zip(x).zip(self.measure.lambdas()) {
            *o = self.coef * xv + self.noise * l * rng.standard_normal();
        }
    }

    /// Log-density of the proposal kernel `Q(x, ·)` at `y` (Lebesgue reference).
    pub fn proposal_log_density(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dims(self.dim(), x.len())?;
        check_dims(self.dim(), y.len())?;
        let two_delta = 2.0 * self.params.delta;
        let mut acc = 0.0;
        for ((xv, yv), l) in x.iter().zip(y).zip(self.measure.lambdas()) {
            let var = two_delta * l * l;
            if var <= 0.0 {
                return Err(Error::Domain("proposal has no Lebesgue density with λ_i = 0".into()));
            }
            let r = yv - self.coef * xv;
            acc += -0.5 * r * r / var - 0.5 * (2.0 * std::f64::consts::PI * var).ln();
        }
        Ok(acc)
    }

    /// One transition: draw `ξ ~ γ_m` then `u ~ U[0, 1)`, move iff `u < α`.
    pub fn mh_step(&self, x: &[f64], rng: &mut RngStream) -> Result<StepOutcome> {
        check_dims(self.dim(), x.len())?;
        let mut proposal = vec![0.0; self.dim()];
        self.propose_into(x, rng, &mut proposal);
        let log_alpha = Self::log_accept_from_energies(self.energy(x), self.energy(&proposal));
        let accepted = rng.uniform() < log_alpha.exp();
        let next = if accepted { proposal.clone() } else { x.to_vec() };
        Ok(StepOutcome {
            next: next.into(),
            accepted,
            proposal: proposal.into(),
        })
    }

    /// A streaming chain positioned at `x0`.
    pub fn chain(&self, x0: &[f64], rng: RngStream) -> Result<Chain<'_>> {
        check_dims(self.dim(), x0.len())?;
        Ok(Chain {
            kernel: self,
            energy: self.energy(x0),
            state: x0.to_vec(),
            scratch: vec![0.0; x0.len()],
            rng,
        })
    }

    /// Runs `n` steps from `x0` and keeps every state.
    pub fn run_chain(&self, x0: &[f64], n: usize, rng: RngStream) -> Result<ChainTrace> {
        let seed = rng.seed();
        let mut chain = self.chain(x0, rng)?;
        let mut states = Vec::with_capacity(n + 1);
        let mut accept_flags = Vec::with_capacity(n);
        states.push(StateVector(x0.to_vec()));
        for _ in 0..n {
            accept_flags.push(chain.step());
            states.push(StateVector(chain.state().to_vec()));
        }
        Ok(ChainTrace {
            states,
            accept_flags,
            seed,
            kernel: self.descriptor(),
        })
    }

    /// Runs `n` steps from `x0` recording only `f` of each state (including
    /// `X_0`), for chains too long or too wide to store.
    pub fn run_functional<F>(&self, x0: &[f64], n: usize, rng: RngStream, f: F) -> Result<FunctionalTrace>
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut chain = self.chain(x0, rng)?;
        let mut values = Vec::with_capacity(n + 1);
        let mut accepted = 0usize;
        values.push(f(x0));
        for _ in 0..n {
            if chain.step() {
                accepted += 1;
            }
            values.push(f(chain.state()));
        }
        Ok(FunctionalTrace { values, accepted })
    }
}

/// In-place chain with the current energy cached.
pub struct Chain<'k> {
    kernel: &'k MhKernel,
    state: Vec<f64>,
    scratch: Vec<f64>,
    energy: f64,
    rng: RngStream,
}

impl<'k> Chain<'k> {
    /// Advances one transition; returns whether the proposal was accepted.
    #[inline]
    pub fn step(&mut self) -> bool {
        self.kernel.propose_into(&self.state, &mut self.rng, &mut self.scratch);
        let energy_y = self.kernel.energy(&self.scratch);
        let log_alpha = MhKernel::log_accept_from_energies(self.energy, energy_y);
        let accepted = self.rng.uniform() < log_alpha.exp();
        if accepted {
            std::mem::swap(&mut self.state, &mut self.scratch);
            self.energy = energy_y;
        }
        accepted
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn into_state(self) -> StateVector {
        StateVector(self.state)
    }
}

/// Full record of a chain run. `states.len() == accept_flags.len() + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTrace {
    pub states: Vec<StateVector>,
    pub accept_flags: Vec<bool>,
    pub seed: u64,
    pub kernel: KernelDescriptor,
}

impl ChainTrace {
    /// Number of transitions.
    pub fn steps(&self) -> usize {
        self.accept_flags.len()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.dim())
    }

    /// `f(X_k)` for every recorded state.
    pub fn map<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        self.states.iter().map(|s| f(s)).collect()
    }

    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.map(|s| s[i])
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.accept_flags.is_empty() {
            return f64::NAN;
        }
        self.accept_flags.iter().filter(|a| **a).count() as f64 / self.accept_flags.len() as f64
    }
}

/// Values `f(X_0), …, f(X_n)` and the number of accepted moves.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalTrace {
    pub values: Vec<f64>,
    pub accepted: usize,
}

impl FunctionalTrace {
    pub fn steps(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.steps() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Estimate;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn zero_pcn(delta: f64, m: usize) -> MhKernel {
        MhKernel::pcn(delta, TargetDensity::zero(), GaussianMeasure::power_law(1.0, m).unwrap()).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(KernelParams::new(0.0).is_err());
        assert!(KernelParams::new(0.51).is_err());
        assert!(KernelParams::unrestricted(3.0).is_ok());
        let p = KernelParams::new(0.18).unwrap();
        assert_relative_eq!(p.rho(), 0.2, epsilon = 1e-15);
        assert_eq!(KernelParams::new(0.5).unwrap().rho(), 1.0);
        let g = GaussianMeasure::power_law(1.0, 2).unwrap();
        assert!(MhKernel::new(ProposalKind::Pcn, KernelParams::unrestricted(0.7).unwrap(), TargetDensity::zero(), g).is_err());
    }

    #[test]
    fn pcn_proposals() {
        let half = KernelParams::new(0.5).unwrap();
        assert_eq!(pcn_propose(&[5.0, -3.0], &[0.1, 0.2], &half).unwrap().0, vec![0.1, 0.2]);
        let p = KernelParams::new(0.18).unwrap();
        let s = (0.36f64).sqrt();
        assert_eq!(pcn_propose(&[0.0, 0.0], &[1.0, 2.0], &p).unwrap().0, vec![s, 2.0 * s]);
        let y = pcn_propose(&[1.0, 0.0], &[0.0, 1.0], &p).unwrap();
        assert_relative_eq!(y[0], 0.8, epsilon = 1e-15);
        assert_relative_eq!(y[1], 0.6, epsilon = 1e-15);
        assert!(pcn_propose(&[1.0], &[1.0, 2.0], &p).is_err());
    }

    #[test]
    fn rwm_proposals() {
        let p = KernelParams::new(0.5).unwrap();
        assert_eq!(rwm_propose(&[1.0, 1.0], &[0.0, 0.0], &p).unwrap().0, vec![1.0, 1.0]);
        assert_eq!(rwm_propose(&[1.0, 1.0], &[1.0, -1.0], &p).unwrap().0, vec![2.0, 0.0]);
        assert!(rwm_propose(&[1.0, 1.0], &[1.0], &p).is_err());
    }

    #[test]
    fn rwm_proposals_centred_at_current_state() {
        let k = MhKernel::rwm(0.3, TargetDensity::zero(), GaussianMeasure::power_law(1.0, 2).unwrap()).unwrap();
        let x = [0.7, -1.3];
        let mut rng = RngStream::named(5, "rwm-mean", 0);
        let mut out = [0.0; 2];
        let mut c0 = Vec::with_capacity(100_000);
        let mut c1 = Vec::with_capacity(100_000);
        for _ in 0..100_000 {
            k.propose_into(&x, &mut rng, &mut out);
            c0.push(out[0]);
            c1.push(out[1]);
        }
        assert!(Estimate::from_samples(&c0).within(x[0], 4.0));
        let e1 = Estimate::from_samples(&c1);
        assert!(e1.within(x[1], 4.0), "{e1:?}");
    }

    #[test]
    fn acceptance_probabilities() {
        let k = zero_pcn(0.2, 3);
        assert_eq!(k.accept_prob(&[1.0, 2.0, 3.0], &[-5.0, 0.0, 9.0]).unwrap(), 1.0);

        let g = GaussianMeasure::power_law(1.0, 3).unwrap();
        let rwm = MhKernel::rwm(0.1, TargetDensity::zero(), g).unwrap();
        let x = [0.3, -0.2, 0.1];
        let y = [0.5, 0.1, -0.3];
        let expect: f64 = (1..=3)
            .map(|i| -((i * i) as f64) / 2.0 * (y[i - 1] * y[i - 1] - x[i - 1] * x[i - 1]))
            .sum();
        assert_relative_eq!(rwm.accept_prob(&x, &y).unwrap(), expect.exp().min(1.0), epsilon = 1e-14);
        assert_eq!(rwm.accept_prob(&y, &x).unwrap(), 1.0);

        let one = MhKernel::rwm(0.1, TargetDensity::zero(), GaussianMeasure::power_law(1.0, 1).unwrap()).unwrap();
        assert_eq!(one.accept_prob(&[0.0], &[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn huge_cameron_martin_terms_do_not_overflow() {
        let g = GaussianMeasure::power_law(1.0, 2000).unwrap();
        let rwm = MhKernel::rwm(0.1, TargetDensity::zero(), g).unwrap();
        let x = vec![0.0; 2000];
        let y = vec![1.0; 2000];
        assert_eq!(rwm.accept_prob(&x, &y).unwrap(), 0.0);
        assert_eq!(rwm.accept_prob(&y, &x).unwrap(), 1.0);
    }

    #[test]
    fn rwm_requires_positive_spectrum() {
        let g = GaussianMeasure::new(SpectrumSpec::explicit(vec![1.0, 0.0])).unwrap();
        assert!(MhKernel::rwm(0.1, TargetDensity::zero(), g).is_err());
    }

    #[test]
    fn pcn_zero_always_accepts() {
        let k = zero_pcn(0.18, 5);
        let mut rng = RngStream::named(1, "acc", 0);
        let mut x = k.measure().sample(&mut rng);
        for _ in 0..1000 {
            let out = k.mh_step(&x, &mut rng).unwrap();
            assert!(out.accepted);
            assert_eq!(out.next, out.proposal);
            x = out.next;
        }
    }

    #[test]
    fn infinite_potential_forces_rejection() {
        let x0 = vec![0.25, -0.5];
        let anchor = x0.clone();
        let t = TargetDensity::custom("wall", crate::target::PhiProfile::Zero, move |z| {
            if z == anchor.as_slice() {
                0.0
            } else {
                f64::INFINITY
            }
        });
        let k = MhKernel::pcn(0.2, t, GaussianMeasure::power_law(1.0, 2).unwrap()).unwrap();
        let mut rng = RngStream::named(1, "wall", 0);
        for _ in 0..100 {
            let out = k.mh_step(&x0, &mut rng).unwrap();
            assert!(!out.accepted);
            assert_eq!(out.next.0, x0);
        }
    }

    #[test]
    fn pcn_zero_preserves_reference_law() {
        // X_0 ~ γ_4, 1000 steps, 10^4 replicas: coordinate variances stay λ_i².
        let k = zero_pcn(0.18, 4);
        let reps = 10_000;
        let mut finals = Vec::with_capacity(reps);
        for r in 0..reps {
            let mut rng = RngStream::named(17, "stationary", r as u64);
            let x0 = k.measure().sample(&mut rng);
            let mut chain = k.chain(&x0, rng).unwrap();
            for _ in 0..1000 {
                chain.step();
            }
            finals.push(chain.into_state());
        }
        for i in 0..4 {
            let sq: Vec<f64> = finals.iter().map(|s| s[i] * s[i]).collect();
            let truth = 1.0 / ((i + 1) * (i + 1)) as f64;
            let est = Estimate::from_samples(&sq);
            assert!(est.within(truth, 3.0), "coord {i}: {est:?} vs {truth}");
        }
    }

    #[test]
    fn pcn_zero_lag_one_autocorrelation() {
        let k = zero_pcn(0.18, 2);
        let mut rng = RngStream::named(3, "lag1", 0);
        let x0 = k.measure().sample(&mut rng);
        let n = 1_000_000;
        let tr = k.run_functional(&x0, n, rng, |x| x[0]).unwrap();
        // Stationary with λ_1 = 1, so E[X_k X_{k+1}] = r; the products are
        // correlated, hence the batch-means standard error.
        let prods: Vec<f64> = tr.values.windows(2).map(|w| w[0] * w[1]).collect();
        let b = 1000;
        let batch: Vec<f64> = prods.chunks(prods.len() / b).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
        let est = Estimate::from_samples(&batch);
        assert!(est.within(0.8, 3.0), "{est:?}");
    }

    #[test]
    fn run_chain_shapes_and_determinism() {
        let k = MhKernel::pcn(0.1, TargetDensity::norm_tilt(1.0).unwrap(), GaussianMeasure::power_law(1.0, 3).unwrap()).unwrap();
        let x0 = [1.0, 0.0, -1.0];
        let t0 = k.run_chain(&x0, 0, RngStream::named(1, "run", 0)).unwrap();
        assert_eq!(t0.states, vec![StateVector(x0.to_vec())]);
        let a = k.run_chain(&x0, 500, RngStream::named(1, "run", 0)).unwrap();
        let b = k.run_chain(&x0, 500, RngStream::named(1, "run", 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.states.len(), 501);
        for (i, acc) in a.accept_flags.iter().enumerate() {
            if a.states[i + 1] != a.states[i] {
                assert!(*acc);
            }
        }
        assert!(a.acceptance_rate() > 0.0 && a.acceptance_rate() < 1.0);
    }

    #[test]
    fn independence_sampler_proposals_match_reference() {
        let k = zero_pcn(0.5, 3);
        let mut rng = RngStream::named(8, "indep", 0);
        let mut x = vec![10.0, -10.0, 10.0];
        let n = 100_000;
        let mut draws = Vec::with_capacity(n);
        for _ in 0..n {
            let out = k.mh_step(&x, &mut rng).unwrap();
            draws.push(out.proposal.clone());
            x = out.next.0;
        }
        for i in 0..3 {
            let c: Vec<f64> = draws.iter().map(|d| d[i]).collect();
            assert!(Estimate::from_samples(&c).within(0.0, 3.0));
            let sq: Vec<f64> = c.iter().map(|v| v * v).collect();
            let truth = 1.0 / ((i + 1) * (i + 1)) as f64;
            assert!(Estimate::from_samples(&sq).within(truth, 3.0));
        }
        let cross: Vec<f64> = draws.iter().map(|d| d[0] * d[1]).collect();
        assert!(Estimate::from_samples(&cross).within(0.0, 3.0));
        let lag: Vec<f64> = draws.windows(2).map(|w| w[0][0] * w[1][0]).collect();
        assert!(Estimate::from_samples(&lag).within(0.0, 3.0));
    }

    /// m = 1, 41-point grid: π(x_i) q(x_i, x_j) α(x_i, x_j) is symmetric.
    #[test]
    fn detailed_balance_on_grid() {
        let phi = |x: &[f64]| 0.3 * x[0].cos() + 0.1 * x[0] * x[0];
        for kind in [ProposalKind::Pcn, ProposalKind::Rwm] {
            let target = TargetDensity::custom("smooth", crate::target::PhiProfile::Zero, phi);
            let g = GaussianMeasure::new(SpectrumSpec::explicit(vec![0.8])).unwrap();
            let k = MhKernel::new(kind, KernelParams::new(0.2).unwrap(), target, g).unwrap();
            let grid: Vec<f64> = (0..41).map(|i| -4.0 + 0.2 * i as f64).collect();
            let h = 0.2;
            // unnormalised μ density: e^{-Φ} times the N(0, 0.64) density
            let weight = |x: f64| (-phi(&[x]) - 0.5 * x * x / 0.64).exp();
            let z: f64 = grid.iter().map(|x| weight(*x)).sum();
            for &xi in &grid {
                for &xj in &grid {
                    if xi == xj {
                        continue;
                    }
                    let pij = k.proposal_log_density(&[xi], &[xj]).unwrap().exp() * h * k.accept_prob(&[xi], &[xj]).unwrap();
                    let pji = k.proposal_log_density(&[xj], &[xi]).unwrap().exp() * h * k.accept_prob(&[xj], &[xi]).unwrap();
                    let lhs = weight(xi) / z * pij;
                    let rhs = weight(xj) / z * pji;
                    assert!((lhs - rhs).abs() < 1e-6, "{kind}: {xi} {xj}: {lhs} vs {rhs}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn accept_prob_in_unit_interval(
            x in prop::collection::vec(-50f64..50.0, 4),
            y in prop::collection::vec(-50f64..50.0, 4),
            l in 0f64..5.0,
        ) {
            let g = GaussianMeasure::power_law(1.0, 4).unwrap();
            for kind in [ProposalKind::Pcn, ProposalKind::Rwm] {
                let k = MhKernel::new(kind, KernelParams::new(0.25).unwrap(), TargetDensity::norm_tilt(l).unwrap(), g.clone()).unwrap();
                let a = k.accept_prob(&x, &y).unwrap();
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert_eq!(k.accept_prob(&x, &x).unwrap(), 1.0);
            }
        }
    }
}
