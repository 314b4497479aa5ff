//! Experiment configuration, read from JSON or TOML.

use std::path::Path;

use fsmcmc::coupling::VSpec;
use fsmcmc::kernel::ProposalKind;
use fsmcmc::measure::SpectrumSpec;
use fsmcmc::target::{BuiltinTarget, TargetDensity};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PcnUniformGap,
    RwmDecay,
    HarrisVerify,
    ErgodicSuite,
    ConductanceSweep,
}

/// `δ` fixed, or `δ_m = s · m^{−a}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum StepConfig {
    Fixed { delta: f64 },
    Scaling { s: f64, a: f64 },
}

impl StepConfig {
    pub fn delta_at(&self, m: usize) -> f64 {
        match *self {
            StepConfig::Fixed { delta } => delta,
            StepConfig::Scaling { s, a } => s * (m as f64).powf(-a),
        }
    }

    /// Scaling exponent; 0 for a fixed step.
    pub fn a(&self) -> f64 {
        match *self {
            StepConfig::Fixed { .. } => 0.0,
            StepConfig::Scaling { a, .. } => a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

fn default_csv() -> String {
    "sweep.csv".into()
}

fn default_summary() -> String {
    "summary.json".into()
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self {
            csv: default_csv(),
            summary: default_summary(),
        }
    }
}

/// Settings for the weak Harris certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarrisSettings {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// 0 selects the global distance, anything positive the local one.
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_v")]
    pub v: VSpec,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_reps")]
    pub reps_per_pair: usize,
    /// Maximum `‖x‖` for contraction pairs.
    #[serde(default = "default_pair_radius")]
    pub pair_radius: f64,
    #[serde(default = "default_confidence_z")]
    pub z: f64,
}

fn default_epsilon() -> f64 {
    0.1
}
fn default_v() -> VSpec {
    VSpec::PowerNorm { i: 2 }
}
fn default_radii() -> Vec<f64> {
    (0..10).map(|i| 0.5 + i as f64).collect()
}
fn default_pairs() -> usize {
    500
}
fn default_reps() -> usize {
    400
}
fn default_pair_radius() -> f64 {
    10.0
}
fn default_confidence_z() -> f64 {
    2.576
}

impl Default for HarrisSettings {
    fn default() -> Self {
        Self {
            epsilon: default_epsilon(),
            eta: 0.0,
            v: default_v(),
            radii: default_radii(),
            pairs: default_pairs(),
            reps_per_pair: default_reps(),
            pair_radius: default_pair_radius(),
            z: default_confidence_z(),
        }
    }
}

/// Ball `{‖x‖_σ ≤ r}` for the analytic RWM bound and the acceptance supremum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSettings {
    pub r: f64,
    /// Defaults to `(2 + a)/6`.
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub experiment: ExperimentKind,
    pub spectrum: SpectrumSpec,
    pub target: BuiltinTarget,
    pub step: StepConfig,
    /// Proposal for conductance sweeps; other experiments fix it.
    #[serde(default)]
    pub proposal: Option<ProposalKind>,
    pub m_list: Vec<usize>,
    pub n_steps: usize,
    pub n_replicas: usize,
    pub seed: u64,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub harris: Option<HarrisSettings>,
    #[serde(default)]
    pub ball: Option<BallSettings>,
    /// `β` for the MSE bound; defaults to `√(1−2δ)` for pCN with `Φ = 0`.
    #[serde(default)]
    pub beta: Option<f64>,
}

/// Invalid configuration, located by its field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn bad(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Toml,
}

impl ExperimentConfig {
    pub fn parse(text: &str, format: Format) -> Result<Self, ConfigError> {
        let value: serde_json::Value = match format {
            Format::Json => serde_json::from_str(text).map_err(|e| bad("", format!("invalid JSON: {e}")))?,
            Format::Toml => {
                let t: toml::Value = toml::from_str(text).map_err(|e| bad("", format!("invalid TOML: {}", e.message())))?;
                serde_json::to_value(t).map_err(|e| bad("", e.to_string()))?
            }
        };
        let cfg: ExperimentConfig =
            serde_path_to_error::deserialize(value).map_err(|e| bad(e.path().to_string(), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Format chosen by extension: `.json` is JSON, anything else TOML.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Toml,
        };
        Ok(Self::parse(&text, format)?)
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            serde_json::to_value(self.experiment)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default()
        })
    }

    pub fn proposal_kind(&self) -> ProposalKind {
        match self.experiment {
            ExperimentKind::RwmDecay => ProposalKind::Rwm,
            ExperimentKind::ConductanceSweep => self.proposal.unwrap_or(ProposalKind::Rwm),
            _ => ProposalKind::Pcn,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.m_list.is_empty() {
            return Err(bad("m_list", "must be nonempty"));
        }
        if self.m_list[0] == 0 {
            return Err(bad("m_list[0]", "dimension must be positive"));
        }
        if let Some(i) = self.m_list.windows(2).position(|w| w[1] <= w[0]) {
            return Err(bad(format!("m_list[{}]", i + 1), "must be strictly ascending"));
        }
        if self.n_steps < 1000 {
            return Err(bad("n_steps", format!("{} < 1000", self.n_steps)));
        }
        if self.n_replicas == 0 {
            return Err(bad("n_replicas", "must be positive"));
        }
        if self.experiment == ExperimentKind::ErgodicSuite && self.n_replicas < 200 {
            return Err(bad("n_replicas", format!("{} < 200 replicas needed for the CLT check", self.n_replicas)));
        }
        let last = *self.m_list.last().expect("nonempty");
        self.spectrum
            .with_dimension(last)
            .and_then(|s| s.validate())
            .map_err(|e| bad("spectrum", e.to_string()))?;
        TargetDensity::builtin(self.target).map_err(|e| bad("target", e.to_string()))?;
        if self.proposal_kind() == ProposalKind::Rwm {
            let lambdas = self.spectrum.with_dimension(last).map_err(|e| bad("spectrum", e.to_string()))?.lambdas();
            if lambdas.iter().any(|l| *l <= 0.0) {
                return Err(bad("spectrum", "RWM needs a strictly positive spectrum"));
            }
        }
        match self.step {
            StepConfig::Fixed { delta } => {
                if !(delta > 0.0 && delta.is_finite()) {
                    return Err(bad("step.delta", format!("{delta} must be positive")));
                }
            }
            StepConfig::Scaling { s, a } => {
                if !(s > 0.0 && s.is_finite()) {
                    return Err(bad("step.s", format!("{s} must be positive")));
                }
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(bad("step.a", format!("{a} must be nonnegative")));
                }
            }
        }
        if self.proposal_kind() == ProposalKind::Pcn {
            for &m in &self.m_list {
                let d = self.step.delta_at(m);
                if d > 0.5 {
                    return Err(bad("step", format!("pCN needs δ ≤ 1/2, got {d} at m = {m}")));
                }
            }
        }
        if let Some(h) = &self.harris {
            if !(h.epsilon > 0.0) {
                return Err(bad("harris.epsilon", "must be positive"));
            }
            if !(h.eta >= 0.0) {
                return Err(bad("harris.eta", "must be nonnegative"));
            }
            if h.radii.is_empty() {
                return Err(bad("harris.radii", "must be nonempty"));
            }
            if h.pairs == 0 || h.reps_per_pair < 2 {
                return Err(bad("harris.pairs", "need pairs ≥ 1 and reps_per_pair ≥ 2"));
            }
        }
        if let Some(b) = &self.ball {
            if !(b.r > 0.0 && b.r.is_finite()) {
                return Err(bad("ball.r", "must be positive"));
            }
            if let Some(s) = b.sigma {
                if !(0.0..0.5).contains(&s) {
                    return Err(bad("ball.sigma", format!("{s} not in [0, 1/2)")));
                }
            }
        }
        if let Some(beta) = self.beta {
            if !(0.0..1.0).contains(&beta) {
                return Err(bad("beta", format!("{beta} not in [0, 1)")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
        experiment = "pcn_uniform_gap"
        spectrum = { rule = "power_law", q = 1.0, m = 64 }
        target = { target = "norm_tilt", L = 2.0 }
        step = { delta = 0.18 }
        m_list = [8, 64]
        n_steps = 1000
        n_replicas = 1
        seed = 7
    "#;

    #[test]
    fn toml_and_json_agree() {
        let t = ExperimentConfig::parse(GOOD, Format::Toml).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let j = ExperimentConfig::parse(&json, Format::Json).unwrap();
        assert_eq!(t, j);
        assert_eq!(t.target, BuiltinTarget::NormTilt { l: 2.0 });
        assert_eq!(t.output, OutputPaths::default());
    }

    #[test]
    fn explicit_spectrum_and_scaling() {
        let j = r#"{"experiment":"conductance_sweep","spectrum":{"rule":"explicit","lambdas":[1.0,0.5]},
            "target":{"target":"zero"},"step":{"s":1.0,"a":1.0},"m_list":[1,2],"n_steps":1000,
            "n_replicas":1,"seed":1}"#;
        let c = ExperimentConfig::parse(j, Format::Json).unwrap();
        assert_eq!(c.step.delta_at(2), 0.5);
        assert_eq!(c.step.a(), 1.0);
        assert_eq!(c.proposal_kind(), ProposalKind::Rwm);
    }

    #[test]
    fn errors_carry_field_paths() {
        let e = ExperimentConfig::parse(&GOOD.replace("m_list = [8, 64]", "m_list = []"), Format::Toml).unwrap_err();
        assert_eq!(e.path, "m_list");
        let e = ExperimentConfig::parse(&GOOD.replace("m_list = [8, 64]", "m_list = [64, 8]"), Format::Toml).unwrap_err();
        assert_eq!(e.path, "m_list[1]");
        let e = ExperimentConfig::parse(&GOOD.replace("seed = 7", ""), Format::Toml).unwrap_err();
        assert!(e.message.contains("seed"), "{e}");
        let e = ExperimentConfig::parse(&GOOD.replace("q = 1.0", "q = \"x\""), Format::Toml).unwrap_err();
        assert_eq!(e.path, "spectrum");
        let e = ExperimentConfig::parse(&GOOD.replace("n_steps = 1000", "n_steps = 10"), Format::Toml).unwrap_err();
        assert_eq!(e.path, "n_steps");
        let e = ExperimentConfig::parse(&GOOD.replace("delta = 0.18", "delta = 0.7"), Format::Toml).unwrap_err();
        assert_eq!(e.path, "step");
        let e = ExperimentConfig::parse(&GOOD.replace("L = 2.0", "L = -1.0"), Format::Toml).unwrap_err();
        assert_eq!(e.path, "target");
        let e = ExperimentConfig::parse(&format!("{GOOD}\nbogus = 1"), Format::Toml).unwrap_err();
        assert!(e.message.contains("bogus"), "{e}");
    }
}
