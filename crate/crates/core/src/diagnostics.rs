//! Gap, conductance and ergodic-average diagnostics.
//!
//! Functions here work on scalar series `f(X_0), f(X_1), …` (see
//! [`MhKernel::run_functional`]) so that long chains never have to be stored
//! in full. Direct gap estimates are only claimed for linear functionals of
//! exact AR(1) chains (pCN with `Φ = 0`); everywhere else the result is either
//! an upper bound or carries a `heuristic` flag.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{out_of_range, Error, Result};
use crate::kernel::{MhKernel, ProposalKind};
use crate::measure::{sobolev_norm, Estimate};
use crate::rng::{RngStream, Streams};

/// How a [`GapReport`] value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GapMethod {
    AcfLinearFunctional,
    BatchMeans,
    ConductanceAcceptSup,
    ConductanceAcceptMean,
    ConductanceHalfSpace,
    AnalyticRwmBound,
}

impl GapMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            GapMethod::AcfLinearFunctional => "acf_linear_functional",
            GapMethod::BatchMeans => "batch_means",
            GapMethod::ConductanceAcceptSup => "conductance_accept_sup",
            GapMethod::ConductanceAcceptMean => "conductance_accept_mean",
            GapMethod::ConductanceHalfSpace => "conductance_half_space",
            GapMethod::AnalyticRwmBound => "analytic_rwm_bound",
        }
    }
}

impl std::fmt::Display for GapMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A spectral-gap estimate or upper bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub method: GapMethod,
    /// In `[0, 1]`, or NaN for a degenerate estimate.
    pub value: f64,
    pub is_upper_bound: bool,
    pub ci: Option<(f64, f64)>,
    pub std_err: Option<f64>,
    pub m: usize,
    pub delta: f64,
    pub n_samples: usize,
    /// Set when the estimator lacks a justification for this kernel.
    pub heuristic: bool,
    pub notes: Vec<String>,
}

impl GapReport {
    fn new(method: GapMethod, kernel: &MhKernel, n_samples: usize) -> Self {
        Self {
            method,
            value: f64::NAN,
            is_upper_bound: matches!(
                method,
                GapMethod::ConductanceAcceptSup
                    | GapMethod::ConductanceAcceptMean
                    | GapMethod::ConductanceHalfSpace
                    | GapMethod::AnalyticRwmBound
            ),
            ci: None,
            std_err: None,
            m: kernel.dim(),
            delta: kernel.params().delta(),
            n_samples,
            heuristic: false,
            notes: Vec::new(),
        }
    }

    /// Sets value and interval for a bound `scale · est`, clamping at 1.
    fn set_scaled(&mut self, est: &Estimate, scale: f64, z: f64) {
        let raw = scale * est.value;
        if raw > 1.0 {
            self.notes.push(format!("vacuous: raw bound {raw:.6} clamped to 1"));
        }
        self.value = raw.min(1.0);
        self.std_err = Some(scale * est.std_err);
        self.ci = Some((
            (scale * est.lower(z)).clamp(0.0, 1.0),
            (scale * est.upper(z)).clamp(0.0, 1.0),
        ));
    }
}

fn is_exact_ar1(kernel: &MhKernel) -> bool {
    kernel.kind() == ProposalKind::Pcn && kernel.target().is_zero()
}

/// Streaming ergodic average with power-of-two checkpoints.
#[derive(Clone, Debug, Default)]
pub struct ErgodicAccumulator {
    n: usize,
    sum: f64,
    next_checkpoint: usize,
    checkpoints: Vec<(usize, f64)>,
}

impl ErgodicAccumulator {
    pub fn new() -> Self {
        Self {
            next_checkpoint: 1,
            ..Default::default()
        }
    }

    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        if self.n == self.next_checkpoint {
            self.checkpoints.push((self.n, self.mean()));
            self.next_checkpoint *= 2;
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// `(n, S_n)` at `n = 1, 2, 4, …` and at the final `n`.
    pub fn running(&self) -> Vec<(usize, f64)> {
        let mut out = self.checkpoints.clone();
        if out.last().is_some_and(|&(k, _)| k != self.n) {
            out.push((self.n, self.mean()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgodicSummary {
    pub n0: usize,
    pub n: usize,
    /// Final `S_{n,n0}`.
    pub mean: f64,
    /// Running averages at power-of-two checkpoints.
    pub s_n: Vec<(usize, f64)>,
    /// Batch-means asymptotic variance (present when `n ≥ 1000`).
    pub sigma2_hat: Option<f64>,
    pub iact: Option<f64>,
}

/// `S_{n,n0} = (1/n) Σ_{i=1}^{n} f(X_{i+n0})` with `n = len − 1 − n0`.
///
/// `values[0]` is `f(X_0)`, which never enters the average.
pub fn ergodic_average(values: &[f64], n0: usize) -> Result<ErgodicSummary> {
    if values.len() < 2 || n0 >= values.len() - 1 {
        return Err(out_of_range(
            "n0",
            format!("{n0} leaves no states in a trace of {} steps", values.len().saturating_sub(1)),
        ));
    }
    let tail = &values[n0 + 1..];
    let mut acc = ErgodicAccumulator::new();
    for &v in tail {
        acc.push(v);
    }
    let (sigma2_hat, iact) = if tail.len() >= MIN_IACT_LEN {
        match batch_means(tail) {
            Some(b) => (Some(b.sigma2), Some(b.iact)),
            None => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(ErgodicSummary {
        n0,
        n: tail.len(),
        mean: acc.mean(),
        s_n: acc.running(),
        sigma2_hat,
        iact,
    })
}

pub const MIN_IACT_LEN: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IactEstimate {
    pub iact: f64,
    pub sigma2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IactReport {
    pub n: usize,
    pub variance: f64,
    /// `⌊√n⌋` batches.
    pub batch_means: Option<IactEstimate>,
    /// Truncated autocovariance sum, initial positive sequence rule.
    pub initial_positive: Option<IactEstimate>,
    /// Last lag included by the truncation.
    pub truncation_lag: usize,
    pub degenerate: bool,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

fn batch_means(xs: &[f64]) -> Option<IactEstimate> {
    let n = xs.len();
    let b = (n as f64).sqrt().floor() as usize;
    let size = n / b;
    if b < 2 || size == 0 {
        return None;
    }
    let used = &xs[..b * size];
    let (_, var) = mean_var(used);
    if var <= 0.0 {
        return None;
    }
    let means: Vec<f64> = used.chunks_exact(size).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    let grand = means.iter().sum::<f64>() / b as f64;
    let var_means = means.iter().map(|v| (v - grand).powi(2)).sum::<f64>() / (b - 1) as f64;
    let sigma2 = size as f64 * var_means;
    Some(IactEstimate {
        iact: sigma2 / var,
        sigma2,
    })
}

fn autocov(xs: &[f64], mean: f64, lag: usize) -> f64 {
    let n = xs.len();
    xs[..n - lag]
        .iter()
        .zip(&xs[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum::<f64>()
        / n as f64
}

/// IACT and asymptotic variance of a scalar series, two ways.
pub fn iact_and_variance(values: &[f64]) -> Result<IactReport> {
    let n = values.len();
    if n < MIN_IACT_LEN {
        return Err(Error::Precondition(format!("series of length {n} < {MIN_IACT_LEN}")));
    }
    let (mean, var) = mean_var(values);
    if var <= 0.0 || !var.is_finite() {
        return Ok(IactReport {
            n,
            variance: var,
            batch_means: None,
            initial_positive: None,
            truncation_lag: 0,
            degenerate: true,
        });
    }
    let mut sigma2 = -var;
    let mut lag = 0;
    while lag + 1 < n / 2 {
        let pair = autocov(values, mean, lag) + autocov(values, mean, lag + 1);
        if pair <= 0.0 {
            break;
        }
        sigma2 += 2.0 * pair;
        lag += 2;
    }
    Ok(IactReport {
        n,
        variance: var,
        batch_means: batch_means(values),
        initial_positive: Some(IactEstimate {
            iact: sigma2 / var,
            sigma2,
        }),
        truncation_lag: lag.saturating_sub(1),
        degenerate: false,
    })
}

/// `1 − ρ̂₁` from the lag-1 autocorrelation of a coordinate series.
///
/// The standard error comes from batch means (`⌊√n⌋` batches) of the lag-1
/// products. Flagged heuristic unless the kernel is pCN with `Φ = 0`.
pub fn gap_from_acf_linear(values: &[f64], kernel: &MhKernel) -> Result<GapReport> {
    let n = values.len();
    if n < MIN_IACT_LEN {
        return Err(Error::Precondition(format!("series of length {n} < {MIN_IACT_LEN}")));
    }
    let (mean, var) = mean_var(values);
    let mut rep = GapReport::new(GapMethod::AcfLinearFunctional, kernel, n);
    if var <= 0.0 {
        rep.notes.push("degenerate: zero variance".into());
        return Ok(rep);
    }
    let products: Vec<f64> = values
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean) / var)
        .collect();
    let b = (products.len() as f64).sqrt().floor() as usize;
    let size = products.len() / b;
    let batch: Vec<f64> = products[..b * size]
        .chunks_exact(size)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let est = Estimate::from_samples(&batch);
    let rho1 = products.iter().sum::<f64>() / n as f64;
    let z = 3.0;
    rep.value = (1.0 - rho1).clamp(0.0, 1.0);
    rep.std_err = Some(est.std_err);
    rep.ci = Some((
        (1.0 - rho1 - z * est.std_err).clamp(0.0, 1.0),
        (1.0 - rho1 + z * est.std_err).clamp(0.0, 1.0),
    ));
    if !is_exact_ar1(kernel) {
        rep.heuristic = true;
        rep.notes.push("heuristic: chain is not an exact AR(1)".into());
    }
    Ok(rep)
}

/// Gap implied by an IACT under the AR(1) relation `τ = (1 + r)/(1 − r)`,
/// i.e. `1 − r = 2/(τ + 1)`.
pub fn gap_from_iact(report: &IactReport, kernel: &MhKernel) -> GapReport {
    let mut rep = GapReport::new(GapMethod::BatchMeans, kernel, report.n);
    match report.batch_means {
        Some(b) => rep.value = (2.0 / (b.iact + 1.0)).clamp(0.0, 1.0),
        None => rep.notes.push("degenerate: zero variance".into()),
    }
    if !is_exact_ar1(kernel) {
        rep.heuristic = true;
        rep.notes.push("heuristic: chain is not an exact AR(1)".into());
    }
    rep
}

/// How states distributed according to the target are produced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StationarySampler {
    /// Draws from the reference measure; exact only when `Φ = 0`.
    Exact,
    /// pCN chains started from the reference measure and run for `steps`
    /// steps, then sampled every `thin` steps.
    WarmStart { steps: usize, thin: usize, delta: f64 },
}

const WARM_BLOCK: usize = 256;

impl StationarySampler {
    /// `Exact` for `Φ = 0`; otherwise a warm start of `100 × IACT` steps, the
    /// IACT being estimated from a pilot pCN run on `x₁`.
    pub fn for_kernel(kernel: &MhKernel, streams: &Streams) -> Result<Self> {
        if kernel.target().is_zero() {
            return Ok(StationarySampler::Exact);
        }
        let delta = kernel.params().delta().min(0.5);
        let pcn = MhKernel::pcn(delta, kernel.target().clone(), kernel.measure().clone())?;
        let mut rng = streams.stream(u64::MAX, 0);
        let x0 = pcn.measure().sample(&mut rng);
        let pilot = pcn.run_functional(&x0, 20_000, rng, |x| x[0])?;
        let iact = iact_and_variance(&pilot.values)?
            .batch_means
            .map_or(1.0, |b| b.iact.max(1.0));
        Ok(StationarySampler::WarmStart {
            steps: (100.0 * iact).ceil() as usize,
            thin: iact.ceil() as usize,
            delta,
        })
    }

    pub fn is_exact_for(&self, kernel: &MhKernel) -> bool {
        matches!(self, StationarySampler::Exact) && kernel.target().is_zero()
    }

    /// `n` states, deterministic in `streams` and independent of the thread count.
    pub fn draw(&self, kernel: &MhKernel, n: usize, streams: &Streams) -> Result<Vec<Vec<f64>>> {
        match *self {
            StationarySampler::Exact => Ok((0..n)
                .into_par_iter()
                .map(|i| kernel.measure().sample(&mut streams.stream(i as u64, 0)).into_inner())
                .collect()),
            StationarySampler::WarmStart { steps, thin, delta } => {
                let pcn = MhKernel::pcn(delta, kernel.target().clone(), kernel.measure().clone())?;
                let blocks = n.div_ceil(WARM_BLOCK);
                let out: Vec<Vec<Vec<f64>>> = (0..blocks)
                    .into_par_iter()
                    .map(|b| {
                        let mut rng = streams.stream(b as u64, 1);
                        let x0 = pcn.measure().sample(&mut rng);
                        let mut chain = pcn.chain(&x0, rng).expect("dimension checked");
                        for _ in 0..steps {
                            chain.step();
                        }
                        let count = WARM_BLOCK.min(n - b * WARM_BLOCK);
                        (0..count)
                            .map(|_| {
                                for _ in 0..thin.max(1) {
                                    chain.step();
                                }
                                chain.state().to_vec()
                            })
                            .collect()
                    })
                    .collect();
                Ok(out.into_iter().flatten().collect())
            }
        }
    }
}

/// Centred ball `{‖x‖_σ ≤ radius}` used for the acceptance-supremum bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSet {
    pub radius: f64,
    pub sigma: f64,
}

impl BallSet {
    pub fn contains(&self, x: &[f64]) -> bool {
        sobolev_norm(x, self.sigma) <= self.radius
    }
}

/// Sample sizes for [`conductance_bounds`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConductanceBudget {
    /// Stationary states.
    pub n: usize,
    /// States of `B` at which `α(x)` is estimated for the supremum.
    pub sup_points: usize,
    /// Proposals per such state.
    pub sup_proposals: usize,
}

/// `E_ξ α(x, y(ξ))` estimated with `k` proposals.
pub fn mean_acceptance_at(kernel: &MhKernel, x: &[f64], k: usize, rng: &mut RngStream) -> Estimate {
    let mut y = vec![0.0; x.len()];
    let ex = kernel.energy(x);
    let vals: Vec<f64> = (0..k)
        .map(|_| {
            kernel.propose_into(x, rng, &mut y);
            MhKernel::log_accept_from_energies(ex, kernel.energy(&y)).exp()
        })
        .collect();
    Estimate::from_samples(&vals)
}

/// Stationary mean acceptance `E_μ α`, one proposal per stationary state
/// (the acceptance probability itself is averaged, not the accept flag).
pub fn mean_stationary_acceptance(
    kernel: &MhKernel,
    sampler: &StationarySampler,
    n: usize,
    streams: &Streams,
) -> Result<Estimate> {
    let states = sampler.draw(kernel, n, &streams.sub("states"))?;
    let prop = streams.sub("proposals");
    let vals: Vec<f64> = states
        .par_iter()
        .enumerate()
        .map(|(i, x)| mean_acceptance_at(kernel, x, 1, &mut prop.stream(i as u64, 0)).value)
        .collect();
    Ok(Estimate::from_samples(&vals))
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Three Cheeger-type upper bounds on the spectral gap.
///
/// * `2 sup_{x∈B} α̂(x)` over sampled states of `B` (requires `μ(B) ≤ 1/2`);
/// * `4 Ê_μ α`;
/// * `2 ∫_A Q(x, Aᶜ) dμ / μ(A)` for `A = {x₁ ≥ 0}`, with the proposal
///   probability `Q(x, Aᶜ) = Φ(−c x₁ / (√(2δ) λ₁))` computed exactly.
///
/// Bounds above 1 are clamped and noted as vacuous.
pub fn conductance_bounds(
    kernel: &MhKernel,
    sampler: &StationarySampler,
    set: &BallSet,
    budget: &ConductanceBudget,
    streams: &Streams,
) -> Result<Vec<GapReport>> {
    let n = budget.n;
    if n < 2 {
        return Err(Error::Precondition("need at least two stationary states".into()));
    }
    let states = sampler.draw(kernel, n, &streams.sub("states"))?;
    let approx_note = (!sampler.is_exact_for(kernel)).then(|| "stationarity approximated by warm start".to_string());
    let z = 3.0;

    let inside: Vec<usize> = (0..n).filter(|&i| set.contains(&states[i])).collect();
    let mass = Estimate::from_proportion(inside.len(), n);
    if mass.value > 0.5 {
        return Err(Error::Precondition(format!(
            "estimated μ(B) = {:.4} exceeds 1/2 for radius {} in H_{}",
            mass.value, set.radius, set.sigma
        )));
    }
    let mut reports = Vec::with_capacity(3);

    let mut sup = GapReport::new(GapMethod::ConductanceAcceptSup, kernel, budget.sup_points * budget.sup_proposals);
    sup.notes.push(format!("mu(B) = {:.4} +- {:.4}", mass.value, mass.std_err));
    if inside.is_empty() {
        sup.notes.push("degenerate: no sampled state in B".into());
    } else {
        let sup_streams = streams.sub("sup");
        let per_point: Vec<Estimate> = inside
            .par_iter()
            .take(budget.sup_points)
            .enumerate()
            .map(|(j, &i)| mean_acceptance_at(kernel, &states[i], budget.sup_proposals, &mut sup_streams.stream(j as u64, 0)))
            .collect();
        let worst = per_point
            .iter()
            .copied()
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .expect("nonempty");
        sup.set_scaled(&worst, 2.0, z);
    }
    reports.push(sup);

    let prop = streams.sub("proposals");
    let alphas: Vec<f64> = states
        .par_iter()
        .enumerate()
        .map(|(i, x)| mean_acceptance_at(kernel, x, 1, &mut prop.stream(i as u64, 0)).value)
        .collect();
    let mut mean = GapReport::new(GapMethod::ConductanceAcceptMean, kernel, n);
    mean.set_scaled(&Estimate::from_samples(&alphas), 4.0, z);
    reports.push(mean);

    reports.push(half_space_from_states(kernel, &states, z));

    if let Some(note) = approx_note {
        for r in &mut reports {
            r.notes.push(note.clone());
        }
    }
    Ok(reports)
}

fn half_space_report(kernel: &MhKernel, first: impl Iterator<Item = f64>, z: f64) -> GapReport {
    let lambda1 = kernel.measure().lambdas()[0];
    let scale = kernel.params().noise_scale() * lambda1;
    let c = kernel.mean_coefficient();
    let mut n = 0usize;
    let mut in_a = 0usize;
    let flux: Vec<f64> = first
        .map(|x1| {
            n += 1;
            if x1 >= 0.0 {
                in_a += 1;
                normal_cdf(-c * x1 / scale)
            } else {
                0.0
            }
        })
        .collect();
    let mut half = GapReport::new(GapMethod::ConductanceHalfSpace, kernel, n);
    if in_a == 0 || !(scale > 0.0) {
        half.notes.push("degenerate: empty half-space sample".into());
        return half;
    }
    // ratio of means; the standard error treats μ(A) as known
    let mu_a = in_a as f64 / n as f64;
    half.set_scaled(&Estimate::from_samples(&flux), 2.0 / mu_a, z);
    half.notes.push(format!("mu(A) = {mu_a:.4}"));
    half
}

fn half_space_from_states(kernel: &MhKernel, states: &[Vec<f64>], z: f64) -> GapReport {
    half_space_report(kernel, states.iter().map(|x| x[0]), z)
}

/// The half-space bound of [`conductance_bounds`] on its own.
///
/// Only `x₁` enters, so with the exact sampler just that coordinate is drawn.
pub fn half_space_bound(kernel: &MhKernel, sampler: &StationarySampler, n: usize, streams: &Streams) -> Result<GapReport> {
    if n < 2 {
        return Err(Error::Precondition("need at least two stationary states".into()));
    }
    let z = 3.0;
    match sampler {
        StationarySampler::Exact => {
            let lambda1 = kernel.measure().lambdas()[0];
            let s = streams.sub("x1");
            const BLOCK: usize = 4096;
            let x1: Vec<f64> = (0..n.div_ceil(BLOCK))
                .into_par_iter()
                .flat_map_iter(|b| {
                    let mut rng = s.stream(b as u64, 0);
                    let len = BLOCK.min(n - b * BLOCK);
                    (0..len).map(move |_| lambda1 * rng.standard_normal())
                })
                .collect();
            let mut rep = half_space_report(kernel, x1.into_iter(), z);
            if !kernel.target().is_zero() {
                rep.notes.push("stationarity approximated by the reference measure".into());
            }
            Ok(rep)
        }
        StationarySampler::WarmStart { .. } => {
            let states = sampler.draw(kernel, n, &streams.sub("states"))?;
            let mut rep = half_space_from_states(kernel, &states, z);
            rep.notes.push("stationarity approximated by warm start".into());
            Ok(rep)
        }
    }
}

/// Parameters of the RWM acceptance bound along a scaling `δ_m = m^{−a}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwmBoundParams {
    /// Step-size exponent, `δ_m ∝ m^{−a}`.
    pub a: f64,
    /// Hölder exponent; the interpolation weight is `λ = m^{−b}`.
    pub b: f64,
    pub sigma: f64,
    /// Radius of the ball in `H_σ`.
    pub r: f64,
}

impl RwmBoundParams {
    /// `b = 2(1−a)/3`, `σ = (2+a)/6`.
    pub fn with_defaults(a: f64, r: f64) -> Result<Self> {
        let p = Self {
            a,
            b: 2.0 * (1.0 - a) / 3.0,
            sigma: (2.0 + a) / 6.0,
            r,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.a < 1.0) {
            return Err(out_of_range("a", format!("{} not in [0, 1)", self.a)));
        }
        // the defaults sit exactly on a + 2b = 2 − 2σ, where the second factor stays bounded
        if !(self.a + self.b < 1.0 && self.a + 2.0 * self.b >= 2.0 - 2.0 * self.sigma - 1e-12) {
            return Err(out_of_range(
                "b",
                format!("need a + b < 1 and a + 2b ≥ 2 − 2σ (a = {}, b = {}, σ = {})", self.a, self.b, self.sigma),
            ));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(out_of_range("r", format!("{} must be finite and nonnegative", self.r)));
        }
        Ok(())
    }

    /// `λ = m^{−b}`.
    pub fn lambda_at(&self, m: usize) -> f64 {
        (m as f64).powf(-self.b)
    }

    pub fn bound_at(&self, m: usize, delta: f64) -> f64 {
        self.log_bound_at(m, delta).exp()
    }

    pub fn log_bound_at(&self, m: usize, delta: f64) -> f64 {
        rwm_log_acceptance_bound(m, delta, self.lambda_at(m), self.r, self.sigma)
    }
}

/// Logarithm of [`rwm_acceptance_bound`].
pub fn rwm_log_acceptance_bound(m: usize, delta: f64, lambda: f64, r: f64, sigma: f64) -> f64 {
    let mf = m as f64;
    let t = 2.0 * delta * lambda;
    -0.5 * mf * t.ln_1p() + r * r * mf.powf(2.0 - 2.0 * sigma) * delta * lambda * lambda / (t + 1.0)
}

/// Upper bound on the mean RWM acceptance `∫ α(x, y) Q(x, dy)` for the
/// power-law spectrum `λ_i = 1/i`, valid at every `x` with `‖x‖_σ ≤ r`:
///
/// `(1 + 2λδ)^{−m/2} · exp(r² m^{2−2σ} δλ² / (2δλ + 1))`, `λ ∈ (0, 1]`.
pub fn rwm_acceptance_bound(m: usize, delta: f64, lambda: f64, r: f64, sigma: f64) -> f64 {
    rwm_log_acceptance_bound(m, delta, lambda, r, sigma).exp()
}

/// Mean acceptance over states of the reference measure conditioned on
/// `‖x‖_σ ≤ r` (rejection sampling), one proposal per state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallAcceptance {
    pub acceptance: Estimate,
    /// Fraction of reference draws that fell in the ball.
    pub ball_mass: Estimate,
}

pub fn mean_acceptance_in_ball(kernel: &MhKernel, set: &BallSet, n: usize, streams: &Streams) -> Result<BallAcceptance> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let out: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.stream(i as u64, 0);
            let mut tries = 0usize;
            let x = loop {
                tries += 1;
                let x = kernel.measure().sample(&mut rng);
                if set.contains(&x) {
                    break x;
                }
                if tries > 1_000_000 {
                    return (f64::NAN, tries);
                }
            };
            (mean_acceptance_at(kernel, &x, 1, &mut rng).value, tries)
        })
        .collect();
    if out.iter().any(|(a, _)| a.is_nan()) {
        return Err(Error::Degenerate(format!(
            "ball of radius {} in H_{} has negligible reference mass",
            set.radius, set.sigma
        )));
    }
    let vals: Vec<f64> = out.iter().map(|p| p.0).collect();
    let tries: usize = out.iter().map(|p| p.1).sum();
    Ok(BallAcceptance {
        acceptance: Estimate::from_samples(&vals),
        ball_mass: Estimate::from_proportion(n, tries),
    })
}

/// `2/(n(1−β)) + 2/(n²(1−β)²)`.
pub fn mse_bound(n: usize, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if n == 0 {
        return Err(out_of_range("n", "must be positive"));
    }
    let g = n as f64 * (1.0 - beta);
    Ok(2.0 / g + 2.0 / (g * g))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&beta) {
        return Err(out_of_range("beta", format!("{beta} not in [0, 1)")));
    }
    Ok(())
}

/// Smallest natural number `n0` with `n0 ≥ C(p) ‖dν/dμ − 1‖ / log(1/β)`,
/// where `C(p) = p/(2(p−2)) log(32p/(p−2))` on `(2, 4)` and `log 64` on
/// `[4, ∞]`. Pass `f64::INFINITY` for `p = ∞`.
pub fn burn_in(p: f64, beta: f64, density_ratio_norm: f64) -> Result<u64> {
    check_beta(beta)?;
    if !(p > 2.0) {
        return Err(out_of_range("p", format!("{p} not in (2, ∞]")));
    }
    if !(density_ratio_norm >= 0.0 && density_ratio_norm.is_finite()) {
        return Err(out_of_range("density_ratio_norm", format!("{density_ratio_norm}")));
    }
    let c = if p < 4.0 {
        p / (2.0 * (p - 2.0)) * (32.0 * p / (p - 2.0)).ln()
    } else {
        64f64.ln()
    };
    if beta == 0.0 || density_ratio_norm == 0.0 {
        return Ok(0);
    }
    Ok((c * density_ratio_norm / (1.0 / beta).ln()).ceil() as u64)
}

/// Outcome of a Kolmogorov–Smirnov check of standardized replica sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub replicas: usize,
    pub ks_statistic: f64,
    /// Asymptotic critical value at level 0.01, `1.628/√R`.
    pub critical_value: f64,
    pub passes: bool,
    pub sigma2_hat: f64,
}

pub const KS_COEFF_01: f64 = 1.628;

/// Kolmogorov–Smirnov distance between a sample and `N(0, σ²)`.
pub fn ks_normal(sample: &[f64], sigma: f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = normal_cdf(v / sigma);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// CLT check for ergodic averages.
///
/// `averages[r]` is `S_n` of replica `r`. The standardized sums
/// `√n (S_n − μ̂)` are compared with `N(0, σ̂²)`, `σ̂²` being their sample
/// variance; `mean = None` centres at the grand mean.
pub fn clt_test(averages: &[f64], n: usize, mean: Option<f64>) -> Result<CltReport> {
    let r = averages.len();
    if r < 200 {
        return Err(Error::Precondition(format!("{r} replicas < 200")));
    }
    let mu = mean.unwrap_or_else(|| averages.iter().sum::<f64>() / r as f64);
    let z: Vec<f64> = averages.iter().map(|s| (n as f64).sqrt() * (s - mu)).collect();
    let zbar = z.iter().sum::<f64>() / r as f64;
    let sigma2_hat = z.iter().map(|v| (v - zbar).powi(2)).sum::<f64>() / (r - 1) as f64;
    if !(sigma2_hat > 0.0) {
        return Err(Error::Degenerate("standardized sums have zero variance".into()));
    }
    let ks = ks_normal(&z, sigma2_hat.sqrt());
    let critical_value = KS_COEFF_01 / (r as f64).sqrt();
    Ok(CltReport {
        replicas: r,
        ks_statistic: ks,
        critical_value,
        passes: ks <= critical_value,
        sigma2_hat,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SllnRow {
    pub start_norm: f64,
    /// `(n, |S_n − μ̂|)`.
    pub errors: Vec<(usize, f64)>,
    pub sigma_hat: f64,
    pub passes: bool,
}

/// Ergodic-average error per starting point on an increasing `n` grid.
///
/// A start passes when its final error is at most `3σ̂/√n`; `σ̂` is taken
/// from `sigma_hat` or, when `None`, from batch means over the run itself.
pub fn slln_probe<F>(
    kernel: &MhKernel,
    f: F,
    starts: &[Vec<f64>],
    n_grid: &[usize],
    reference_mean: f64,
    sigma_hat: Option<f64>,
    streams: &Streams,
) -> Result<Vec<SllnRow>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(out_of_range("n_grid", "must be nonempty, positive and strictly increasing"));
    }
    let n_max = *n_grid.last().expect("nonempty");
    if sigma_hat.is_none() && n_max < MIN_IACT_LEN {
        return Err(Error::Precondition(format!(
            "estimating σ̂ needs n ≥ {MIN_IACT_LEN}, grid ends at {n_max}"
        )));
    }
    for x in starts {
        kernel.measure().check_state(x)?;
    }
    starts
        .par_iter()
        .enumerate()
        .map(|(i, x0)| {
            let trace = kernel.run_functional(x0, n_max, streams.stream(i as u64, 0), &f)?;
            let mut acc = ErgodicAccumulator::new();
            let mut errors = Vec::with_capacity(n_grid.len());
            let mut next = n_grid.iter().peekable();
            for &v in &trace.values[1..] {
                acc.push(v);
                if next.peek().is_some_and(|&&k| k == acc.len()) {
                    errors.push((acc.len(), (acc.mean() - reference_mean).abs()));
                    next.next();
                }
            }
            let sigma = match sigma_hat {
                Some(s) => s,
                None => batch_means(&trace.values[1..]).map_or(0.0, |b| b.sigma2.sqrt()),
            };
            let (n_last, e_last) = *errors.last().expect("grid nonempty");
            Ok(SllnRow {
                start_norm: crate::measure::norm(x0),
                passes: e_last <= 3.0 * sigma / (n_last as f64).sqrt(),
                errors,
                sigma_hat: sigma,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::GaussianMeasure;
    use crate::target::TargetDensity;
    use approx::assert_relative_eq;

    fn pcn_zero(delta: f64, m: usize) -> MhKernel {
        MhKernel::pcn(delta, TargetDensity::zero(), GaussianMeasure::power_law(1.0, m).unwrap()).unwrap()
    }

    fn rwm_zero(delta: f64, m: usize) -> MhKernel {
        MhKernel::rwm(delta, TargetDensity::zero(), GaussianMeasure::power_law(1.0, m).unwrap()).unwrap()
    }

    fn ar1_series(delta: f64, n: usize, seed: u64) -> Vec<f64> {
        let k = pcn_zero(delta, 1);
        let mut rng = RngStream::named(seed, "ar1", 0);
        let x0 = k.measure().sample(&mut rng);
        k.run_functional(&x0, n, rng, |x| x[0]).unwrap().values
    }

    /// Independent AR(1) oracle: x' = r x + √(1−r²) ξ.
    fn ar1_oracle(r: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::named(seed, "oracle", 0);
        let mut x = rng.standard_normal();
        let s = (1.0 - r * r).sqrt();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(x);
            x = r * x + s * rng.standard_normal();
        }
        out
    }

    #[test]
    fn ergodic_average_basics() {
        let s = ergodic_average(&[5.0; 10], 3).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!(s.s_n.iter().all(|&(_, v)| v == 5.0));
        assert_eq!(s.n, 6);
        assert_eq!(s.s_n.last().unwrap().0, 6);

        let s = ergodic_average(&[1.0, 7.0], 0).unwrap();
        assert_eq!((s.n, s.mean), (1, 7.0));
        assert!(ergodic_average(&[1.0, 2.0], 1).is_err());
        assert!(ergodic_average(&[1.0], 0).is_err());
    }

    #[test]
    fn ergodic_average_of_ar1_coordinate() {
        let values = ar1_series(0.18, 1_000_000, 1);
        let s = ergodic_average(&values, 0).unwrap();
        // σ² = λ₁² (1+r)/(1−r) = 9
        assert!(s.mean.abs() <= 3.0 * (9.0 / s.n as f64).sqrt(), "{}", s.mean);
        assert!((s.iact.unwrap() - 9.0).abs() < 0.15 * 9.0);
    }

    #[test]
    fn iact_of_independent_draws_is_one() {
        let values = ar1_series(0.5, 1_000_000, 2);
        let rep = iact_and_variance(&values).unwrap();
        assert!((rep.batch_means.unwrap().iact - 1.0).abs() < 0.1);
        assert!((rep.initial_positive.unwrap().iact - 1.0).abs() < 0.1);
    }

    #[test]
    fn iact_of_ar1_matches_closed_form() {
        let values = ar1_series(0.18, 1_000_000, 3);
        let rep = iact_and_variance(&values).unwrap();
        let bm = rep.batch_means.unwrap().iact;
        let ips = rep.initial_positive.unwrap().iact;
        assert!((bm - 9.0).abs() < 0.15 * 9.0, "{bm}");
        assert!((ips - 9.0).abs() < 0.15 * 9.0, "{ips}");
        assert!((bm - ips).abs() < 0.2 * ips);
        assert!((rep.batch_means.unwrap().sigma2 - 9.0).abs() < 0.15 * 9.0);
    }

    #[test]
    fn iact_on_independent_oracle_series() {
        let rep = iact_and_variance(&ar1_oracle(0.5, 400_000, 9)).unwrap();
        assert!((rep.initial_positive.unwrap().iact - 3.0).abs() < 0.15);
    }

    #[test]
    fn degenerate_series() {
        let rep = iact_and_variance(&vec![0.0; 2000]).unwrap();
        assert!(rep.degenerate && rep.batch_means.is_none() && rep.initial_positive.is_none());
        assert!(iact_and_variance(&[1.0; 10]).is_err());
        let g = gap_from_acf_linear(&vec![1.0; 2000], &pcn_zero(0.1, 1)).unwrap();
        assert!(g.value.is_nan());
    }

    #[test]
    fn acf_gap_cases() {
        let k = pcn_zero(0.18, 1);
        let rep = gap_from_acf_linear(&ar1_series(0.18, 1_000_000, 4), &k).unwrap();
        assert!((rep.value - 0.2).abs() < 0.02, "{rep:?}");
        assert!(!rep.is_upper_bound && !rep.heuristic);
        let (lo, hi) = rep.ci.unwrap();
        assert!(lo <= 0.2 && 0.2 <= hi);

        let iid = gap_from_acf_linear(&ar1_series(0.5, 100_000, 5), &pcn_zero(0.5, 1)).unwrap();
        assert!((iid.value - 1.0).abs() < 0.02);

        let slow = gap_from_acf_linear(&ar1_series(1e-6, 10_000, 6), &pcn_zero(1e-6, 1)).unwrap();
        assert!(slow.value < 0.01);

        let tilted = MhKernel::pcn(0.18, TargetDensity::norm_tilt(1.0).unwrap(), GaussianMeasure::power_law(1.0, 1).unwrap())
            .unwrap();
        let h = gap_from_acf_linear(&ar1_series(0.18, 2000, 7), &tilted).unwrap();
        assert!(h.heuristic);
    }

    #[test]
    fn gap_from_iact_inverts_ar1_relation() {
        let rep = iact_and_variance(&ar1_series(0.18, 1_000_000, 8)).unwrap();
        let g = gap_from_iact(&rep, &pcn_zero(0.18, 1));
        assert!((g.value - 0.2).abs() < 0.03, "{g:?}");
    }

    #[test]
    fn pcn_zero_conductance_is_vacuous() {
        let k = pcn_zero(0.2, 4);
        let set = BallSet { radius: 0.8, sigma: 0.0 };
        let budget = ConductanceBudget {
            n: 2000,
            sup_points: 20,
            sup_proposals: 10,
        };
        let reps = conductance_bounds(&k, &StationarySampler::Exact, &set, &budget, &Streams::new(1, "cond")).unwrap();
        let mean = reps.iter().find(|r| r.method == GapMethod::ConductanceAcceptMean).unwrap();
        assert_eq!(mean.value, 1.0);
        assert!(mean.notes.iter().any(|n| n.starts_with("vacuous")));
        assert!(reps.iter().all(|r| r.is_upper_bound));
    }

    #[test]
    fn half_space_orthant_value() {
        // P(X > 0, X + Z < 0) = 1/4 − arcsin(1/√2)/(2π) = 1/8; bound 2·(1/8)/(1/2)
        let k = rwm_zero(0.5, 1);
        let set = BallSet { radius: 0.5, sigma: 0.0 };
        let budget = ConductanceBudget {
            n: 200_000,
            sup_points: 10,
            sup_proposals: 10,
        };
        let reps = conductance_bounds(&k, &StationarySampler::Exact, &set, &budget, &Streams::new(2, "orth")).unwrap();
        let half = reps.iter().find(|r| r.method == GapMethod::ConductanceHalfSpace).unwrap();
        let alone = half_space_bound(&k, &StationarySampler::Exact, 200_000, &Streams::new(2, "orth")).unwrap();
        let exact = 2.0 * (0.25 - (0.5f64.sqrt()).asin() / (2.0 * std::f64::consts::PI)) / 0.5;
        assert_relative_eq!(exact, 0.5, epsilon = 1e-15);
        assert!((half.value - exact).abs() <= 3.0 * half.std_err.unwrap(), "{half:?}");
        assert!((alone.value - exact).abs() <= 3.0 * alone.std_err.unwrap(), "{alone:?}");
    }

    #[test]
    fn half_space_bound_scales_like_root_delta() {
        // exact value 4 · arctan(√(2δ))/(2π) for the reference measure
        for delta in [0.1, 0.01, 0.001] {
            let k = rwm_zero(delta, 3);
            let rep = half_space_bound(&k, &StationarySampler::Exact, 400_000, &Streams::new(4, "hs")).unwrap();
            let exact = 4.0 * (2.0 * delta).sqrt().atan() / (2.0 * std::f64::consts::PI);
            assert!((rep.value - exact).abs() <= 3.0 * rep.std_err.unwrap(), "{delta}: {rep:?} vs {exact}");
        }
    }

    #[test]
    fn large_set_rejected() {
        let k = rwm_zero(0.5, 2);
        let set = BallSet { radius: 10.0, sigma: 0.0 };
        let budget = ConductanceBudget {
            n: 100,
            sup_points: 1,
            sup_proposals: 2,
        };
        assert!(conductance_bounds(&k, &StationarySampler::Exact, &set, &budget, &Streams::new(2, "big")).is_err());
    }

    #[test]
    fn warm_start_sampler_is_deterministic() {
        let k = MhKernel::pcn(0.3, TargetDensity::norm_tilt(0.5).unwrap(), GaussianMeasure::power_law(1.0, 3).unwrap()).unwrap();
        let s = StationarySampler::WarmStart {
            steps: 50,
            thin: 2,
            delta: 0.3,
        };
        let a = s.draw(&k, 300, &Streams::new(5, "w")).unwrap();
        let b = s.draw(&k, 300, &Streams::new(5, "w")).unwrap();
        assert_eq!(a.len(), 300);
        assert_eq!(a, b);
        assert!(!s.is_exact_for(&k));
        assert_eq!(StationarySampler::for_kernel(&pcn_zero(0.1, 2), &Streams::new(1, "x")).unwrap(), StationarySampler::Exact);
    }

    #[test]
    fn rwm_stationary_acceptance_decreases_with_dimension() {
        let mut prev = f64::INFINITY;
        for m in [1, 4, 16, 64] {
            let e = mean_stationary_acceptance(&rwm_zero(0.1, m), &StationarySampler::Exact, 20_000, &Streams::new(3, "acc"))
                .unwrap();
            assert!(e.value < prev);
            prev = e.value;
        }
    }

    #[test]
    fn rwm_bound_closed_form() {
        assert_relative_eq!(rwm_acceptance_bound(1, 0.5, 1.0, 0.0, 0.0), 0.5f64.sqrt(), epsilon = 1e-15);
        let p = RwmBoundParams::with_defaults(0.0, 1.0).unwrap();
        assert_relative_eq!(p.b, 2.0 / 3.0);
        assert_relative_eq!(p.sigma, 1.0 / 3.0);
        // m = 8: λ = 1/4, δ = 1 ⇒ (1.5)^{-4} · exp(8^{4/3} · (1/16)/1.5)
        assert_relative_eq!(p.bound_at(8, 1.0), 1.5f64.powi(-4) * (16.0 / 24.0f64).exp(), max_relative = 1e-12);
        assert!(RwmBoundParams::with_defaults(1.0, 1.0).is_err());
        assert!(rwm_log_acceptance_bound(1 << 20, 0.1, 1.0, 0.0, 0.3).is_finite());
    }

    #[test]
    fn rwm_bound_decays_faster_than_any_power_eventually() {
        // log bound ≈ −(m/2)·2m^{−b}δ: for a = 0 this is −m^{1/3} δ up to lower order,
        // so log(m^p bound) decreases once m^{1/3} ≳ 3p/δ.
        let p = RwmBoundParams::with_defaults(0.0, 1.0).unwrap();
        for pow in [1.0, 2.0, 4.0] {
            let g = |m: usize| pow * (m as f64).ln() + p.log_bound_at(m, 1.0);
            let start = 1usize << 20;
            let mut prev = g(start);
            for k in 21..40 {
                let cur = g(1usize << k);
                assert!(cur < prev, "p = {pow}, m = 2^{k}");
                prev = cur;
            }
        }
    }

    #[test]
    fn rwm_ball_acceptance_respects_bound() {
        let m = 32;
        let delta = 0.1;
        let k = rwm_zero(delta, m);
        let r = 1.5;
        let sigma = 1.0 / 3.0;
        let est = mean_acceptance_in_ball(&k, &BallSet { radius: r, sigma }, 20_000, &Streams::new(1, "ball")).unwrap();
        let lambda = (m as f64).powf(-2.0 / 3.0);
        let bound = rwm_acceptance_bound(m, delta, lambda, r, sigma);
        assert!(est.acceptance.value <= bound + 3.0 * est.acceptance.std_err, "{est:?} vs {bound}");
    }

    #[test]
    fn mse_and_burn_in_closed_forms() {
        assert_eq!(mse_bound(1, 0.0).unwrap(), 4.0);
        assert_relative_eq!(mse_bound(100, 0.8).unwrap(), 0.1 + 2.0 / 400.0, max_relative = 1e-12);
        assert!(mse_bound(10, 1.0).is_err());
        assert_eq!(burn_in(4.0, (-1.0f64).exp(), 1.0).unwrap(), 5);
        assert_eq!(burn_in(f64::INFINITY, (-1.0f64).exp(), 1.0).unwrap(), 5);
        // p = 3: (3/2) log 96 / log 2 at β = 1/2
        let expect = (1.5 * 96f64.ln() / 2f64.ln()).ceil() as u64;
        assert_eq!(burn_in(3.0, 0.5, 1.0).unwrap(), expect);
        assert_relative_eq!(1.5 * 96f64.ln() / 2f64.ln(), 9.87744375108173, max_relative = 1e-12);
        assert!(burn_in(2.0, 0.5, 1.0).is_err());
        assert!(burn_in(4.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn clt_on_iid_normals() {
        let mut rng = RngStream::named(1, "clt", 0);
        let n = 50;
        let avgs: Vec<f64> = (0..1000)
            .map(|_| (0..n).map(|_| rng.standard_normal()).sum::<f64>() / n as f64)
            .collect();
        let rep = clt_test(&avgs, n, Some(0.0)).unwrap();
        assert!(rep.passes, "{rep:?}");
        assert!((rep.sigma2_hat - 1.0).abs() < 0.15);
        assert!(clt_test(&avgs[..100], n, None).is_err());
        assert!(clt_test(&[2.0; 300], n, None).is_err());
    }

    #[test]
    fn ks_detects_wrong_scale() {
        let mut rng = RngStream::named(1, "ks", 0);
        let s: Vec<f64> = (0..2000).map(|_| 2.0 * rng.standard_normal()).collect();
        assert!(ks_normal(&s, 1.0) > KS_COEFF_01 / (2000f64).sqrt());
        assert!(ks_normal(&s, 2.0) < KS_COEFF_01 / (2000f64).sqrt());
    }

    #[test]
    fn slln_from_near_and_far_starts() {
        let m = 4;
        let k = pcn_zero(0.18, m);
        let far_norm = 10.0 * k.measure().trace().sqrt();
        let mut far = vec![0.0; m];
        far[0] = far_norm;
        let starts = vec![vec![0.0; m], far];
        let grid = [1000, 10_000, 100_000];
        let rows = slln_probe(&k, |x| x[0], &starts, &grid, 0.0, Some(3.0), &Streams::new(1, "slln")).unwrap();
        assert!(rows.iter().all(|r| r.passes), "{rows:?}");
        assert!(rows[1].errors[0].1 > rows[1].errors[2].1);

        let single = slln_probe(&k, |x| x[0], &starts[..1], &[5], 0.0, Some(3.0), &Streams::new(1, "s1")).unwrap();
        assert_eq!(single[0].errors.len(), 1);
    }

    #[test]
    fn slln_for_bounded_lipschitz_functional() {
        let m = 3;
        let k = pcn_zero(0.18, m);
        let f = |x: &[f64]| crate::measure::norm(x).min(10.0);
        let x0 = vec![0.0; m];
        let reference = k.run_functional(&x0, 2_000_000, RngStream::named(9, "ref", 0), f).unwrap();
        let mu = ergodic_average(&reference.values, 1000).unwrap().mean;
        let mut far = vec![0.0; m];
        far[1] = 20.0;
        let rows = slln_probe(&k, f, &[x0, far], &[1000, 100_000], mu, None, &Streams::new(1, "lip")).unwrap();
        for r in &rows {
            assert!(r.errors[1].1 < r.errors[0].1 || r.errors[1].1 < 0.01, "{r:?}");
            assert!(r.passes, "{r:?}");
        }
    }
}
