//! Truncated Karhunen-Loève Gaussian measures.
//!
//! A measure is stored in its eigenbasis: coordinate `i` (1-based) of a draw is
//! `λ_i ξ_i` with `ξ_i` i.i.d. standard normal, so `λ_i` is the standard
//! deviation of that coordinate and `λ_i²` the corresponding eigenvalue of the
//! covariance operator.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, out_of_range, Error, Result};
use crate::rng::RngStream;

/// Rule generating the coordinate standard deviations `λ_1, …, λ_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SpectrumSpec {
    /// `λ_i = i^{-q}`.
    PowerLaw { q: f64, m: usize },
    /// Given values, `m = lambdas.len()`.
    Explicit { lambdas: Vec<f64> },
}

impl SpectrumSpec {
    pub fn power_law(q: f64, m: usize) -> Self {
        SpectrumSpec::PowerLaw { q, m }
    }

    pub fn explicit(lambdas: Vec<f64>) -> Self {
        SpectrumSpec::Explicit { lambdas }
    }

    pub fn dimension(&self) -> usize {
        match self {
            SpectrumSpec::PowerLaw { m, .. } => *m,
            SpectrumSpec::Explicit { lambdas } => lambdas.len(),
        }
    }

    /// Same rule truncated (or extended) to dimension `m`. Explicit spectra can
    /// only be truncated.
    pub fn with_dimension(&self, m: usize) -> Result<Self> {
        match self {
            SpectrumSpec::PowerLaw { q, .. } => Ok(SpectrumSpec::PowerLaw { q: *q, m }),
            SpectrumSpec::Explicit { lambdas } => {
                if m > lambdas.len() {
                    return Err(out_of_range(
                        "dimension",
                        format!("explicit spectrum has {} values, asked for {m}", lambdas.len()),
                    ));
                }
                Ok(SpectrumSpec::Explicit {
                    lambdas: lambdas[..m].to_vec(),
                })
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectrumSpec::PowerLaw { q, m } => {
                if !(q.is_finite() && *q > 0.0) {
                    return Err(out_of_range("q", format!("{q} is not a positive real")));
                }
                if *m == 0 {
                    return Err(out_of_range("m", "dimension must be positive"));
                }
            }
            SpectrumSpec::Explicit { lambdas } => {
                if lambdas.is_empty() {
                    return Err(out_of_range("lambdas", "empty spectrum"));
                }
                if let Some(bad) = lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
                    return Err(out_of_range("lambdas", format!("{bad} is not a finite nonnegative value")));
                }
            }
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        match self {
            SpectrumSpec::PowerLaw { q, m } => (1..=*m).map(|i| (i as f64).powf(-q)).collect(),
            SpectrumSpec::Explicit { lambdas } => lambdas.clone(),
        }
    }
}

/// A coefficient vector in the eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector(pub Vec<f64>);

impl StateVector {
    pub fn zeros(m: usize) -> Self {
        StateVector(vec![0.0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(v)
    }
}

impl Deref for StateVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for StateVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Euclidean norm.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `(Σ i^{2σ} x_i²)^{1/2}` with 1-based `i`. Equal to [`norm`] at `σ = 0`.
pub fn sobolev_norm(x: &[f64], sigma: f64) -> f64 {
    if sigma == 0.0 {
        return norm(x);
    }
    x.iter()
        .enumerate()
        .map(|(i, v)| ((i + 1) as f64).powf(2.0 * sigma) * v * v)
        .sum::<f64>()
        .sqrt()
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Keep the first `k` coordinates, zero the rest.
pub fn project(x: &[f64], k: usize) -> Result<StateVector> {
    if k > x.len() {
        return Err(out_of_range("k", format!("{k} exceeds dimension {}", x.len())));
    }
    let mut out = x.to_vec();
    out[k..].iter_mut().for_each(|v| *v = 0.0);
    Ok(StateVector(out))
}

/// Uniformly distributed unit vector in `ℝ^m`.
pub fn random_direction(m: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; m];
        rng.fill_standard_normal(&mut v);
        let n = norm(&v);
        if n > 0.0 {
            v.iter_mut().for_each(|c| *c /= n);
            return v;
        }
    }
}

/// Uniform draw from the closed ball `B_radius(center)`: uniform direction
/// scaled by `radius · U^{1/m}`.
pub fn sample_in_ball(center: &[f64], radius: f64, rng: &mut RngStream) -> Vec<f64> {
    let m = center.len();
    let dir = random_direction(m, rng);
    let r = radius * rng.uniform().powf(1.0 / m as f64);
    center.iter().zip(&dir).map(|(c, d)| c + r * d).collect()
}

/// Mean-zero Gaussian with independent coordinates of standard deviation `λ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMeasure {
    spectrum: SpectrumSpec,
    lambdas: Vec<f64>,
}

impl GaussianMeasure {
    pub fn new(spectrum: SpectrumSpec) -> Result<Self> {
        spectrum.validate()?;
        let lambdas = spectrum.lambdas();
        Ok(Self { spectrum, lambdas })
    }

    pub fn power_law(q: f64, m: usize) -> Result<Self> {
        Self::new(SpectrumSpec::power_law(q, m))
    }

    pub fn spectrum(&self) -> &SpectrumSpec {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambdas.iter().cloned().fold(0.0, f64::max)
    }

    /// `E‖ξ‖² = Σ λ_i²`.
    pub fn trace(&self) -> f64 {
        self.lambdas.iter().map(|l| l * l).sum()
    }

    pub fn sample(&self, rng: &mut RngStream) -> StateVector {
        let mut out = vec![0.0; self.dim()];
        self.sample_into(rng, &mut out);
        StateVector(out)
    }

    /// Writes a draw into `out`; consumes exactly `m` normals from `rng`.
    #[inline]
    pub fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.lambdas.len());
        for (o, l) in out.iter_mut().zip(&self.lambdas) {
            *o = l * rng.standard_normal();
        }
    }

    pub fn check_state(&self, x: &[f64]) -> Result<()> {
        check_dims(self.dim(), x.len())
    }

    /// Monte Carlo estimate of `γ_m(‖ξ‖ ≤ radius)`.
    pub fn ball_probability(&self, radius: f64, n: usize, rng: &mut RngStream) -> Result<Estimate> {
        if n == 0 {
            return Err(out_of_range("n", "need at least one sample"));
        }
        let mut buf = vec![0.0; self.dim()];
        let mut hits = 0usize;
        for _ in 0..n {
            self.sample_into(rng, &mut buf);
            if radius > 0.0 && norm(&buf) <= radius {
                hits += 1;
            }
        }
        Ok(Estimate::from_proportion(hits, n))
    }

    /// Ball indicators for several truncation levels evaluated on the same
    /// underlying standard normals. `dims` must be ascending and at most `m`.
    pub fn nested_ball_indicators(
        &self,
        radius: f64,
        dims: &[usize],
        n: usize,
        rng: &mut RngStream,
    ) -> Result<NestedBallSample> {
        if dims.windows(2).any(|w| w[0] > w[1]) {
            return Err(out_of_range("dims", "must be ascending"));
        }
        if let Some(&top) = dims.last() {
            if top > self.dim() {
                return Err(out_of_range("dims", format!("{top} exceeds dimension {}", self.dim())));
            }
        }
        let r2 = radius * radius;
        let mut buf = vec![0.0; self.dim()];
        let mut indicators = Vec::with_capacity(n);
        for _ in 0..n {
            self.sample_into(rng, &mut buf);
            let mut row = Vec::with_capacity(dims.len());
            let mut acc = 0.0;
            let mut upto = 0;
            for &d in dims {
                acc += buf[upto..d].iter().map(|v| v * v).sum::<f64>();
                upto = d;
                row.push(radius > 0.0 && acc <= r2);
            }
            indicators.push(row);
        }
        Ok(NestedBallSample {
            dims: dims.to_vec(),
            indicators,
        })
    }

    /// Exact `∫ exp(β‖u‖²) dγ_m(u) = Π (1 − 2βλ_i²)^{-1/2}`.
    pub fn fernique_moment(&self, beta: f64) -> Result<f64> {
        let lmax = self.lambda_max();
        if !(beta.is_finite() && 2.0 * beta * lmax * lmax < 1.0) {
            return Err(Error::Domain(format!(
                "exponential moment diverges for beta = {beta} (needs beta < {})",
                1.0 / (2.0 * lmax * lmax)
            )));
        }
        let log_moment: f64 = self
            .lambdas
            .iter()
            .map(|l| -0.5 * (-2.0 * beta * l * l).ln_1p())
            .sum();
        Ok(log_moment.exp())
    }

    /// Upper bound on `∫_{‖u‖≥K} exp(α‖u‖) dγ_m(u)`.
    ///
    /// Markov's inequality on the Fernique moment gives the tail
    /// `γ(‖u‖ ≥ t) ≤ F_β e^{-βt²}`; integrating by parts against `e^{αt}` and
    /// completing the square (valid for `K > α/(2β)`) leaves
    /// `F_β (1 + α ∫_0^∞ e^{-βs²} ds) e^{-βK² + αK}`. The Gaussian integral is
    /// `½√(π/β)`; the returned constant uses the larger `√(π/β)`, i.e.
    /// `C_{α,β} = F_β (1 + α √(π/β))`.
    pub fn exponential_tail_bound(&self, alpha: f64, beta: f64, k: f64) -> Result<f64> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Precondition(format!("alpha = {alpha} must be finite and nonnegative")));
        }
        if !(beta > 0.0) {
            return Err(Error::Precondition(format!("beta = {beta} must be positive")));
        }
        if !(k > alpha / (2.0 * beta)) {
            return Err(Error::Precondition(format!(
                "K = {k} must exceed alpha/(2 beta) = {}",
                alpha / (2.0 * beta)
            )));
        }
        let f_beta = self.fernique_moment(beta)?;
        let constant = f_beta * (1.0 + alpha * (std::f64::consts::PI / beta).sqrt());
        Ok(constant * (-beta * k * k + alpha * k).exp())
    }
}

/// Ball indicators on shared noise; `indicators[s][j]` is sample `s` at `dims[j]`.
#[derive(Clone, Debug)]
pub struct NestedBallSample {
    pub dims: Vec<usize>,
    pub indicators: Vec<Vec<bool>>,
}

impl NestedBallSample {
    pub fn estimates(&self) -> Vec<Estimate> {
        let n = self.indicators.len();
        (0..self.dims.len())
            .map(|j| Estimate::from_proportion(self.indicators.iter().filter(|row| row[j]).count(), n))
            .collect()
    }

    /// True when every sample's indicator is nonincreasing along `dims`.
    pub fn monotone_per_sample(&self) -> bool {
        self.indicators
            .iter()
            .all(|row| row.windows(2).all(|w| w[0] >= w[1]))
    }
}

/// A Monte Carlo mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_proportion(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Estimate {
            value: p,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }

    /// Sample mean with standard error `s/√n`.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Estimate {
            value: mean,
            std_err: (var / n as f64).sqrt(),
            n,
        }
    }

    pub fn upper(&self, z: f64) -> f64 {
        self.value + z * self.std_err
    }

    pub fn lower(&self, z: f64) -> f64 {
        self.value - z * self.std_err
    }

    pub fn within(&self, truth: f64, z: f64) -> bool {
        (self.value - truth).abs() <= z * self.std_err
    }
}
