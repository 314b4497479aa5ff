//! Configurations shipped with the tool, run by `fsmcmc run --all`.

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        /// `(name, TOML text)` pairs.
        pub const CONFIGS: &[(&str, &str)] = &[$(($name, include_str!(concat!("../configs/", $name, ".toml")))),*];
    };
}

bundled!(
    "pcn_uniform_gap",
    "pcn_norm_tilt",
    "rwm_decay",
    "conductance_a1",
    "conductance_a2",
    "harris_zero",
    "harris_norm_tilt",
    "ergodic_suite",
);
