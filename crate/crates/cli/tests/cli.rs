use std::path::Path;
use std::process::Command;
use turnpoint_cli::*;

fn oscillator(dir: &Path, n_max: usize) -> SuiteConfig {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/oscillator.toml")).unwrap();
    let mut cfg: SuiteConfig = toml::from_str(&text).unwrap();
    cfg.n_max = n_max;
    cfg.xi_grid = vec![1.0];
    cfg.output_dir = dir.to_path_buf();
    cfg
}

fn opts(stages: Vec<Stage>) -> RunOptions {
    RunOptions { stages, jobs: 1, seed: 7 }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_turnpoint"))
}

#[test]
fn empty_potentials_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = oscillator(dir.path(), 4);
    cfg.potentials.clear();
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));
    assert!(run_suite(&cfg, &opts(Stage::ALL.to_vec())).is_err());

    let path = dir.path().join("empty.toml");
    std::fs::write(&path, "potentials = []\n").unwrap();
    let out = bin().args(["spectrum", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("potentials list is empty"));
}

#[test]
fn config_validation() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = oscillator(dir.path(), 4);
    cfg.model = Some(ModelConfig { d1: 1, d2: 1, sigma: 1.5, epsilon: 0.0 });
    cfg.gamma_grid = vec![0.75];
    assert!(cfg.validate().is_err());
    cfg.gamma_grid = vec![0.74];
    assert!(cfg.validate().is_ok());
    cfg.xi_grid = vec![];
    assert!(cfg.validate().is_err());
}

#[test]
fn toml_and_json_configs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = oscillator(dir.path(), 6);
    let json = dir.path().join("c.json");
    let toml_path = dir.path().join("c.toml");
    std::fs::write(&json, serde_json::to_string(&cfg).unwrap()).unwrap();
    std::fs::write(&toml_path, toml::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(SuiteConfig::load(&json).unwrap(), cfg);
    assert_eq!(SuiteConfig::load(&toml_path).unwrap(), cfg);
}

#[test]
fn oscillator_suite_passes_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = oscillator(dir.path(), 8);
    let stages = vec![Stage::Membership, Stage::Spectra, Stage::Diagnostics, Stage::BohrSommerfeld];
    let cold = run_suite(&cfg, &opts(stages.clone())).unwrap();
    assert!(cold.passed(), "{}", cold.summary());
    assert!(cold.halted.is_none());
    for id in ["spectra/|t|^2/xi=1/oscillator", "diagnostics/|t|^2/xi=1/virial-oscillator", "cache/spot-check", "bohr-sommerfeld/|t|^2/xi=1"] {
        let c = cold.checks.iter().find(|c| c.check_id == id).unwrap_or_else(|| panic!("missing {id}"));
        assert_eq!(c.status, Status::Pass, "{id}");
    }
    let bs = cold.checks.iter().find(|c| c.check_id == "bohr-sommerfeld/|t|^2/xi=1").unwrap();
    assert!((bs.measured.unwrap() - 0.5).abs() < 1e-6);
    // every check id once
    let mut ids: Vec<_> = cold.checks.iter().map(|c| &c.check_id).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), cold.checks.len());

    let cache = DiskCache::open(&dir.path().join("cache")).unwrap();
    assert_eq!(cache.len(), 8);
    let warm = run_suite(&cfg, &opts(stages)).unwrap();
    let measured = |r: &VerificationReport| r.checks.iter().map(|c| (c.check_id.clone(), c.measured.map(f64::to_bits))).collect::<Vec<_>>();
    assert_eq!(measured(&cold), measured(&warm));
    assert_eq!(cold.environment, warm.environment);
}

#[test]
fn exports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = oscillator(dir.path(), 6);
    let r = run_suite(&cfg, &opts(vec![Stage::Membership, Stage::Spectra, Stage::BohrSommerfeld, Stage::Olver])).unwrap();
    assert!(r.passed(), "{}", r.summary());

    let json = export(&r, Format::Json, dir.path()).unwrap();
    assert_eq!(VerificationReport::load(&json[0]).unwrap(), r);

    let csv = export(&r, Format::Csv, dir.path()).unwrap();
    let rows = csv::Reader::from_path(&csv[0]).unwrap().records().count();
    assert_eq!(rows, r.checks.len());

    let plots = export(&r, Format::Plotdata, dir.path()).unwrap();
    let ladder = plots.iter().find(|p| p.ends_with("olver_alpha.csv")).unwrap();
    assert_eq!(csv::Reader::from_path(ladder).unwrap().records().count(), cfg.olver_alphas.len());
    let bs = plots.iter().find(|p| p.ends_with("bs_error.csv")).unwrap();
    assert_eq!(csv::Reader::from_path(bs).unwrap().records().count(), cfg.n_max);
}

#[test]
fn unwritable_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    std::fs::write(&file, "").unwrap();
    let cfg = oscillator(dir.path(), 2);
    let r = run_suite(&cfg, &opts(vec![Stage::Membership])).unwrap();
    assert!(export(&r, Format::Csv, &file.join("sub")).is_err());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = oscillator(dir.path(), 4);
    let path = dir.path().join("osc.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = dir.path().join("run");
    let ok = bin().args(["bohr-sommerfeld", "--jobs", "2", "--seed", "3", "--config"]).arg(&path).arg("--out").arg(&out).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(out.join("report.json").exists() && out.join("checks.csv").exists());

    let plot_dir = dir.path().join("plots");
    let exp = bin().args(["export", "--format", "plotdata", "--report"]).arg(out.join("report.json")).arg("--out").arg(&plot_dir).output().unwrap();
    assert_eq!(exp.status.code(), Some(0));
    assert!(plot_dir.join("plotdata/bs_error.csv").exists());

    // an oscillator check graded against an impossible tolerance fails
    let mut strict = cfg.clone();
    strict.tolerances.oscillator_rel = 0.0;
    strict.xi_grid = vec![0.3];
    std::fs::write(&path, serde_json::to_string(&strict).unwrap()).unwrap();
    let bad = bin().args(["spectrum", "--config"]).arg(&path).arg("--out").arg(&out).output().unwrap();
    assert_eq!(bad.status.code(), Some(1), "{}", String::from_utf8_lossy(&bad.stdout));

    let no_model = bin().args(["geometry", "--config"]).arg(&path).output().unwrap();
    assert_eq!(no_model.status.code(), Some(2));
}

#[test]
fn grushin_and_geometry_stages() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = oscillator(dir.path(), 24);
    cfg.model = Some(ModelConfig { d1: 1, d2: 1, sigma: 1.5, epsilon: 0.0 });
    cfg.lambda_grid = vec![0.1, 1.0, 10.0];
    cfg.gamma_grid = vec![0.0, 0.3];
    let r = run_suite(&cfg, &opts(vec![Stage::Grushin, Stage::Geometry])).unwrap();
    assert!(r.passed(), "{}", r.summary());
    for id in ["grushin/gap/min", "grushin/plancherel/gamma=0/sup", "grushin/plancherel/gamma=0.3/sup", "geometry/doubling"] {
        assert!(r.checks.iter().any(|c| c.check_id == id && c.status == Status::Pass), "{id}");
    }
    assert_eq!(r.plots["density_lambda"].rows.len(), 2 * 3 * 3);
}
