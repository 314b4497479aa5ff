use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
name = "small"
experiment = "pcn_uniform_gap"
spectrum = { rule = "power_law", q = 1.0, m = 16 }
target = { target = "zero" }
step = { delta = 0.18 }
m_list = [2, 16]
n_steps = 20000
n_replicas = 2
seed = 11
"#;

fn fsmcmc(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fsmcmc"));
    cmd.args(args).env_remove("FSMCMC_SEED");
    if let Some(s) = seed {
        cmd.env("FSMCMC_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn run(dir: &Path, cfg: &str, out: &str, extra: &[&str], seed: Option<&str>) -> (Output, String) {
    let out = dir.join(out);
    let o = out.to_str().unwrap();
    let mut args = vec!["run", "-c", cfg, "-o", o];
    args.extend_from_slice(extra);
    let res = fsmcmc(&args, seed);
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap_or_default();
    (res, csv)
}

#[test]
fn validate_bundled_config() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/pcn_uniform_gap.toml");
    let o = fsmcmc(&["validate", "-c", cfg], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn repeated_runs_and_thread_counts_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let (a, csv_a) = run(dir.path(), &cfg, "a", &[], None);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    let (_, csv_b) = run(dir.path(), &cfg, "b", &[], None);
    let (_, csv_c) = run(dir.path(), &cfg, "c", &["--threads", "3"], None);
    assert!(csv_a.starts_with("m,delta,a,method,value,is_upper_bound,ci_lo,ci_hi,n_samples,seed\n"));
    assert_eq!(csv_a, csv_b);
    assert_eq!(csv_a, csv_c);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
}

#[test]
fn json_config_matches_toml() {
    let dir = tempfile::tempdir().unwrap();
    let toml = write_config(dir.path(), "small.toml", SMALL);
    let json = r#"{"name":"small","experiment":"pcn_uniform_gap","spectrum":{"rule":"power_law","q":1.0,"m":16},
        "target":{"target":"zero"},"step":{"delta":0.18},"m_list":[2,16],"n_steps":20000,"n_replicas":2,"seed":11}"#;
    let json = write_config(dir.path(), "small.json", json);
    let (_, a) = run(dir.path(), &toml, "t", &[], None);
    let (_, b) = run(dir.path(), &json, "j", &[], None);
    assert_eq!(a, b);
}

#[test]
fn seed_env_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let (_, base) = run(dir.path(), &cfg, "base", &[], None);
    let (o, over) = run(dir.path(), &cfg, "over", &[], Some("99"));
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(base, over);
    assert!(over.lines().skip(1).all(|l| l.ends_with(",99")));
    let (o, _) = run(dir.path(), &cfg, "bad", &[], Some("minus one"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_prints_one_line_per_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let (_, csv) = run(dir.path(), &cfg, "r", &[], None);
    let input = dir.path().join("r/sweep.csv");
    let o = fsmcmc(&["report", "-i", input.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 2 + csv.lines().count() - 1);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty.toml", &SMALL.replace("m_list = [2, 16]", "m_list = []"));
    let o = fsmcmc(&["validate", "-c", &cfg], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m_list"));
    let (o, _) = run(dir.path(), &cfg, "x", &[], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let o = fsmcmc(&["validate", "-c", missing.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
    let o = fsmcmc(&["report", "-i", missing.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failed_verdict_exits_1() {
    // a thousand steps cannot resolve an IACT near 200
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("n_steps = 20000", "n_steps = 1000").replace("delta = 0.18", "delta = 0.01");
    let cfg = write_config(dir.path(), "short.toml", &text);
    let (o, csv) = run(dir.path(), &cfg, "f", &[], None);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!csv.is_empty());
}
