use std::fs;
use std::path::Path;
use std::process::Command;

use hyperlab::cli::{EXIT_CONFIG, EXIT_FAIL, EXIT_NUMERICAL, EXIT_PASS};
use hyperlab::grr::beta_window;
use hyperlab::models::{Fbm, FbmSheet, ModelRegistry, ModelSpec, PathModel};
use hyperlab::report::Record;
use hyperlab::tails::{beta0_max, field_sup_tail_experiment, TailConfig};
use hyperlab::{HyperParams, SamplePath};

fn hyperlab(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_hyperlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn manifest(dir: &Path) -> Record {
    Record::parse(&fs::read_to_string(dir.join("manifest.txt")).unwrap()).unwrap()
}

#[test]
fn exit_status_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(hyperlab(&["grr", "--paths", "2", "--grid", "64"], &out), EXIT_PASS);
    // beta outside the finite-moment window of fbm's C0 = 2
    assert_eq!(hyperlab(&["grr", "--beta", "5"], &out), EXIT_CONFIG);
    // reference C0 far below the true one
    assert_eq!(
        hyperlab(&["moments", "--c0", "0.2", "--paths", "200", "--grid", "17"], &out),
        EXIT_FAIL
    );
    let steep = tmp.path().join("steep.csv");
    fs::write(&steep, SamplePath::from_fn(64, |t| 1e3 * t).unwrap().to_csv()).unwrap();
    assert_eq!(
        hyperlab(
            &["grr", "--model", "linear", "--input", steep.to_str().unwrap(), "--beta", "100"],
            &out
        ),
        EXIT_NUMERICAL
    );
}

#[test]
fn config_file_loses_to_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.txt");
    fs::write(&cfg, "# small run\nmodel=fbm(0.7)\npaths=3\ngrid=33\n").unwrap();
    let out = tmp.path().join("o");
    assert_eq!(hyperlab(&["simulate", "--config", cfg.to_str().unwrap(), "--paths", "2"], &out), EXIT_PASS);
    let m = manifest(&out);
    assert_eq!(m.get("paths"), Some("2"));
    assert_eq!(m.get("grid"), Some("33"));
    assert_eq!(m.get("model"), Some("fbm(0.7)"));
    let csv = fs::read_to_string(out.join("paths.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,x0,x1"));
    assert_eq!(csv.lines().count(), 34);
}

#[test]
fn manifest_excludes_run_only_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    Command::new(env!("CARGO_BIN_EXE_hyperlab"))
        .args(["simulate", "--threads", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    let m = manifest(&out);
    assert!(m.get("out").is_none() && m.get("threads").is_none());
    assert_eq!(m.get("seed"), Some("0"));
}

#[test]
fn field_tail_holds() {
    let (c0, iota) = (2.0, 0.5);
    let cfg = TailConfig {
        alpha: vec![0.5, 0.5],
        iota,
        beta: 0.5 * beta_window(c0, iota),
        beta0: 0.5 * beta0_max(c0, iota, 2),
        c0: Some(c0),
        grid: vec![9, 9],
        n_paths: 1000,
        seed: 4,
        interval: vec![(0.0, 1.0), (0.25, 0.75)],
        base: vec![0.0, 0.25],
        u_grid: vec![0.5, 1.0, 2.0],
        normalize: false,
    };
    let curve = field_sup_tail_experiment(&FbmSheet::new(0.5, 0.5).unwrap(), &cfg).unwrap();
    assert!(curve.passes(), "{}", curve.to_csv());
    assert!(curve.meta.additive > 0.0);
}

#[derive(Debug)]
struct Scaled(Fbm, f64);

impl PathModel for Scaled {
    fn spec(&self) -> ModelSpec {
        format!("scaled({},{})", self.0.hurst(), self.1).parse().unwrap()
    }

    fn sample(&self, n: usize, seed: u64) -> hyperlab::Result<SamplePath> {
        self.0.sample(n, seed)?.scaled(self.1)
    }

    fn covariance(&self, s: f64, t: f64) -> Option<f64> {
        self.0.covariance(s, t).map(|c| c * self.1 * self.1)
    }

    fn holder_exponent(&self) -> f64 {
        self.0.holder_exponent()
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        self.0.hyper_params()
    }
}

#[test]
fn registry_accepts_new_models() {
    let mut reg = ModelRegistry::with_builtins();
    reg.register_path("scaled", |spec, _| {
        spec.expect_arity(2)?;
        Ok(Box::new(Scaled(Fbm::new(spec.num(0)?)?, spec.num(1)?)))
    });
    let m = reg.build_path(&"scaled(0.5, 3)".parse().unwrap()).unwrap();
    assert!((m.increment_scale() / 9.0 - 1.0).abs() < 1e-6);
    let p = m.sample(65, 1).unwrap();
    let q = Fbm::new(0.5).unwrap().sample(65, 1).unwrap();
    for (a, b) in p.values().iter().zip(q.values()) {
        assert!((a - 3.0 * b).abs() < 1e-12);
    }
    assert!(reg.path_names().contains(&"scaled"));
    assert!(reg.build_path(&"scaled(0.5)".parse().unwrap()).is_err());
}
