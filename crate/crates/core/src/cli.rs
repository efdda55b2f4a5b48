//! The `hyperlab` command line: flag and config-file parsing, validation,
//! experiment dispatch and report files.
//!
//! Every run writes `manifest.txt` into the output directory. It lists every
//! resolved parameter as `key=value` and is itself a valid `--config` file,
//! so `hyperlab replay <manifest>` reproduces the run byte for byte.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::fields::{self, FieldGrrResult};
use crate::grr::{self, GrrConfig, GrrResult};
use crate::holder::{self, IffConfig};
use crate::models::{FieldModel, ModelRegistry, ModelSpec, PathModel};
use crate::moments::{self, HyperParams};
use crate::path::SamplePath;
use crate::report::{Record, Table};
use crate::seed::{self, derive_seed};
use crate::tails::{self, TailConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hyperlab", version, about = "Regularity bounds for hypercontractive processes and fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write sample paths or fields as CSV.
    Simulate(Flags),
    /// Fit the hypercontractivity constants from simulated increments.
    Moments(Flags),
    /// Compute B and the Hölder constants per path and check the modulus.
    Grr(Flags),
    /// Rectangular-increment suite for a field model.
    Field(Flags),
    /// Empirical supremum tails against the sub-Weibull bound.
    Tail(Flags),
    /// Variance scaling against pathwise exponents.
    Holder(Flags),
    /// Rerun the experiment recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Model spec such as `fbm(0.5)`, `wick(2,0.5)`, `sheet(0.5,0.5)`, or a bare name.
    #[arg(long)]
    pub model: Option<String>,
    /// Hurst index for a bare model name; repeat per axis.
    #[arg(long)]
    pub hurst: Vec<f64>,
    /// Chaos order for a bare `wick`.
    #[arg(long)]
    pub order: Option<u32>,
    /// Grid points; repeat per axis.
    #[arg(long)]
    pub grid: Vec<usize>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub iota: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    /// Hölder exponent; repeat per axis.
    #[arg(long)]
    pub alpha: Vec<f64>,
    #[arg(long)]
    pub epsilon: Vec<f64>,
    /// Tail levels.
    #[arg(long = "u")]
    pub u: Vec<f64>,
    /// `lo:hi`; repeat per axis.
    #[arg(long)]
    pub interval: Vec<String>,
    /// Base point of the tail supremum; repeat per axis.
    #[arg(long)]
    pub base: Vec<f64>,
    /// β of the exponential-moment check in `holder`.
    #[arg(long)]
    pub exp_beta: Option<f64>,
    /// Path CSV to analyze instead of simulating (`grr`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// `key=value` file; flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
}

const KEYS: [&str; 18] = [
    "command", "model", "hurst", "order", "grid", "paths", "seed", "beta", "beta0", "iota", "c0", "alpha",
    "epsilon", "u", "interval", "base", "exp_beta", "input",
];

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub model: ModelSpec,
    pub grid: Vec<usize>,
    pub paths: usize,
    pub seed: u64,
    pub beta: f64,
    pub beta0: f64,
    pub iota: f64,
    pub c0: Option<f64>,
    pub alpha: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub u: Vec<f64>,
    pub interval: Vec<(f64, f64)>,
    pub base: Vec<f64>,
    pub exp_beta: Option<f64>,
    pub input: Option<PathBuf>,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn manifest(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| x.to_string());
        let mut r = Record::new();
        r.push("command", self.command.clone())
            .push("model", self.model.to_string())
            .push("grid", join(&self.grid))
            .push("paths", self.paths.to_string())
            .push("seed", self.seed.to_string())
            .push("beta", self.beta.to_string())
            .push("beta0", self.beta0.to_string())
            .push("iota", self.iota.to_string())
            .push("c0", opt(self.c0))
            .push("alpha", join(&self.alpha))
            .push("epsilon", join(&self.epsilon))
            .push("u", join(&self.u))
            .push(
                "interval",
                self.interval
                    .iter()
                    .map(|(a, b)| format!("{a}:{b}"))
                    .collect::<Vec<_>>()
                    .join(","),
            )
            .push("base", join(&self.base))
            .push("exp_beta", opt(self.exp_beta))
            .push(
                "input",
                self.input.as_ref().map_or("none".to_string(), |p| p.display().to_string()),
            );
        format!("# hyperlab manifest\n{}", r.render())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse {s:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, s: &str) -> Result<Vec<T>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| parse_num(key, x)).collect()
}

fn parse_opt(key: &str, s: &str) -> Result<Option<f64>> {
    if s.trim() == "none" {
        Ok(None)
    } else {
        parse_num(key, s).map(Some)
    }
}

fn parse_interval(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("interval {s:?} is not lo:hi")))?;
    Ok((parse_num("interval", a)?, parse_num("interval", b)?))
}

/// Reads a `key=value` config file.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let rec = Record::parse(&text)?;
    let mut map = BTreeMap::new();
    for (k, v) in rec.entries() {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::Parse(format!("unknown config key {k:?} in {}", path.display())));
        }
        map.insert(k.clone(), v.clone());
    }
    Ok(map)
}

fn overlay_flags(map: &mut BTreeMap<String, String>, f: &Flags) {
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    };
    let list = |v: &[f64]| (!v.is_empty()).then(|| join(v));
    set("model", f.model.clone());
    set("hurst", list(&f.hurst));
    set("order", f.order.map(|o| o.to_string()));
    set("grid", (!f.grid.is_empty()).then(|| join(&f.grid)));
    set("paths", f.paths.map(|v| v.to_string()));
    set("seed", f.seed.map(|v| v.to_string()));
    set("beta", f.beta.map(|v| v.to_string()));
    set("beta0", f.beta0.map(|v| v.to_string()));
    set("iota", f.iota.map(|v| v.to_string()));
    set("c0", f.c0.map(|v| v.to_string()));
    set("alpha", list(&f.alpha));
    set("epsilon", list(&f.epsilon));
    set("u", list(&f.u));
    set("interval", (!f.interval.is_empty()).then(|| f.interval.join(",")));
    set("base", list(&f.base));
    set("exp_beta", f.exp_beta.map(|v| v.to_string()));
    set("input", f.input.as_ref().map(|p| p.display().to_string()));
}

fn resolve_model(map: &BTreeMap<String, String>, command: &str) -> Result<ModelSpec> {
    let default = if command == "field" { "sheet" } else { "fbm" };
    let text = map.get("model").map(String::as_str).unwrap_or(default).trim();
    let hurst: Vec<f64> = map.get("hurst").map(|s| parse_list("hurst", s)).transpose()?.unwrap_or_default();
    let order: Option<u32> = map.get("order").map(|s| parse_num("order", s)).transpose()?;
    if text.contains('(') {
        if !hurst.is_empty() || order.is_some() {
            return Err(invalid("--hurst and --order only apply to a bare model name"));
        }
        return text.parse();
    }
    let h = |i: usize| hurst.get(i).or(hurst.first()).copied().unwrap_or(0.5);
    let name = text.to_ascii_lowercase();
    Ok(match name.as_str() {
        "fbm" => ModelSpec::fbm(h(0)),
        "wick" => ModelSpec::wick(order.unwrap_or(2), h(0)),
        "sheet" => ModelSpec::sheet(h(0), h(1)),
        _ => {
            if !hurst.is_empty() || order.is_some() {
                return Err(invalid(format!("--hurst and --order do not apply to {name}")));
            }
            ModelSpec::new(name, Vec::new())
        }
    })
}

/// Either kind of model, as built from the registry.
pub enum Built {
    Path(Box<dyn PathModel>),
    Field(Box<dyn FieldModel>),
}

impl Built {
    fn dims(&self) -> usize {
        match self {
            Built::Path(_) => 1,
            Built::Field(f) => f.dims(),
        }
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        match self {
            Built::Path(m) => m.hyper_params(),
            Built::Field(f) => f.hyper_params(),
        }
    }

    fn exponents(&self) -> Vec<f64> {
        match self {
            Built::Path(m) => vec![m.holder_exponent()],
            Built::Field(f) => f.holder_exponents(),
        }
    }
}

pub fn build_model(registry: &ModelRegistry, spec: &ModelSpec) -> Result<Built> {
    if registry.is_field(&spec.name) {
        registry.build_field(spec).map(Built::Field)
    } else {
        registry.build_path(spec).map(Built::Path)
    }
}

fn default_grid(command: &str) -> usize {
    match command {
        "simulate" | "grr" => 1024,
        "moments" => 65,
        "field" => 32,
        "tail" => 257,
        _ => 1025,
    }
}

fn default_paths(command: &str) -> usize {
    match command {
        "simulate" => 1,
        "moments" | "tail" => 10_000,
        "grr" => 100,
        "field" => 50,
        _ => 1000,
    }
}

/// Resolves and validates every parameter; nothing is simulated here.
pub fn resolve(command: &str, map: &BTreeMap<String, String>, registry: &ModelRegistry) -> Result<(RunConfig, Built)> {
    let model = resolve_model(map, command)?;
    let built = build_model(registry, &model)?;
    let dims = built.dims();
    if command == "field" && !matches!(built, Built::Field(_)) {
        return Err(invalid(format!("{model} is not a field model")));
    }
    if matches!(command, "moments" | "grr" | "holder") && !matches!(built, Built::Path(_)) {
        return Err(invalid(format!("{command} needs a path model, got {model}")));
    }
    let get = |k: &str| map.get(k).map(String::as_str);

    let mut grid: Vec<usize> = get("grid").map(|s| parse_list("grid", s)).transpose()?.unwrap_or_default();
    if grid.is_empty() {
        grid = vec![default_grid(command); dims];
    } else if grid.len() == 1 && dims > 1 {
        grid = vec![grid[0]; dims];
    }
    if grid.len() != dims || grid.iter().any(|&n| n < 2) {
        return Err(invalid(format!("grid {grid:?} does not fit a {dims}-dimensional model")));
    }
    let paths: usize = get("paths").map(|s| parse_num("paths", s)).transpose()?.unwrap_or(default_paths(command));
    if paths == 0 {
        return Err(invalid("paths must be positive"));
    }
    let seed: u64 = get("seed").map(|s| parse_num("seed", s)).transpose()?.unwrap_or(0);

    let hp = built.hyper_params();
    let c0 = match get("c0") {
        Some(s) => parse_opt("c0", s)?,
        None => hp.map(|h| h.c0),
    };
    let iota: f64 = match get("iota") {
        Some(s) => parse_num("iota", s)?,
        None => hp.map_or(0.5, |h| h.iota),
    };
    if !(iota > 0.0 && iota.is_finite()) {
        return Err(invalid(format!("iota must be positive, got {iota}")));
    }
    let window_c0 = c0.unwrap_or(2.0);
    let beta: f64 = match get("beta") {
        Some(s) => parse_num("beta", s)?,
        None => 0.5 * grr::beta_window(window_c0, iota),
    };
    let beta0: f64 = match get("beta0") {
        Some(s) => parse_num("beta0", s)?,
        None => 0.5 * tails::beta0_max(window_c0, iota, dims),
    };
    if !(beta > 0.0 && beta0 > 0.0) {
        return Err(invalid("beta and beta0 must be positive"));
    }
    if let Some(c0) = c0 {
        HyperParams::new(c0, iota)?;
        grr::check_beta_window(beta, iota, c0)?;
        let max = tails::beta0_max(c0, iota, dims);
        if beta0 >= max {
            return Err(invalid(format!("beta0 = {beta0} must be below {max}")));
        }
    }

    let mut alpha: Vec<f64> = get("alpha").map(|s| parse_list("alpha", s)).transpose()?.unwrap_or_default();
    if alpha.is_empty() {
        alpha = built.exponents();
    } else if alpha.len() == 1 && dims > 1 {
        alpha = vec![alpha[0]; dims];
    }
    if alpha.len() != dims {
        return Err(invalid(format!("need {dims} alpha values, got {}", alpha.len())));
    }
    for &a in &alpha {
        grr::check_alpha(a)?;
    }

    let mut epsilon: Vec<f64> = get("epsilon").map(|s| parse_list("epsilon", s)).transpose()?.unwrap_or_default();
    if epsilon.is_empty() {
        epsilon = if command == "field" {
            vec![0.2]
        } else {
            holder::DEFAULT_EPSILONS.to_vec()
        };
    }
    let amin = alpha.iter().copied().fold(f64::INFINITY, f64::min);
    if let Some(e) = epsilon.iter().find(|&&e| !(e > 0.0 && e < amin)) {
        return Err(invalid(format!("epsilon {e} must lie in (0, {amin})")));
    }

    let mut u: Vec<f64> = get("u").map(|s| parse_list("u", s)).transpose()?.unwrap_or_default();
    if u.is_empty() {
        u = vec![0.5, 1.0, 2.0, 4.0, 8.0];
    }
    let mut interval: Vec<(f64, f64)> = match get("interval") {
        Some(s) if !s.trim().is_empty() => s.split(',').map(parse_interval).collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    if interval.is_empty() {
        interval = vec![(0.0, 1.0); dims];
    }
    let mut base: Vec<f64> = get("base").map(|s| parse_list("base", s)).transpose()?.unwrap_or_default();
    if base.is_empty() {
        base = interval.iter().map(|i| i.0).collect();
    }
    let exp_beta = get("exp_beta").map(|s| parse_opt("exp_beta", s)).transpose()?.flatten();
    let input = get("input").filter(|s| *s != "none").map(PathBuf::from);

    let cfg = RunConfig {
        command: command.to_string(),
        model,
        grid,
        paths,
        seed,
        beta,
        beta0,
        iota,
        c0,
        alpha,
        epsilon,
        u,
        interval,
        base,
        exp_beta,
        input,
    };
    validate_command(&cfg, &built)?;
    Ok((cfg, built))
}

fn tail_config(cfg: &RunConfig) -> TailConfig {
    TailConfig {
        alpha: cfg.alpha.clone(),
        iota: cfg.iota,
        beta: cfg.beta,
        beta0: cfg.beta0,
        c0: cfg.c0,
        grid: cfg.grid.clone(),
        n_paths: cfg.paths,
        seed: cfg.seed,
        interval: cfg.interval.clone(),
        base: cfg.base.clone(),
        u_grid: cfg.u.clone(),
        normalize: true,
    }
}

fn iff_config(cfg: &RunConfig) -> IffConfig {
    let n = cfg.grid[0];
    IffConfig {
        alpha: Some(cfg.alpha[0]),
        epsilons: cfg.epsilon.clone(),
        n_points: n,
        n_paths: cfg.paths,
        n_exponent_paths: cfg.paths.min(100),
        sobolev_points: if (n - 1).is_multiple_of(256) { 257 } else { n },
        sobolev_paths: if cfg.exp_beta.is_some() { cfg.paths } else { cfg.paths.min(20) },
        exp_beta: cfg.exp_beta,
        iota: cfg.iota,
        seed: cfg.seed,
        ..IffConfig::default()
    }
}

fn validate_command(cfg: &RunConfig, built: &Built) -> Result<()> {
    match cfg.command.as_str() {
        "moments" => {
            if built.hyper_params().is_none() && cfg.c0.is_none() {
                return Err(invalid("moments needs --c0 for a model without analytic constants"));
            }
        }
        "grr" => {
            GrrConfig::new(cfg.beta, cfg.iota, cfg.alpha[0])?;
            if let Some(p) = &cfg.input {
                if !p.is_file() {
                    return Err(invalid(format!("input {} does not exist", p.display())));
                }
            }
        }
        "tail" => {
            let tc = tail_config(cfg);
            // the experiment functions validate first; a dry run on zero paths is not possible
            if tc.n_paths < 1000 {
                return Err(invalid(format!("tail experiments need at least 1000 paths, got {}", tc.n_paths)));
            }
            for (k, &(lo, hi)) in tc.interval.iter().enumerate() {
                for t in [lo, hi, tc.base[k]] {
                    crate::path::grid_index(t, tc.grid[k])?;
                }
            }
        }
        "holder" => {
            let ic = iff_config(cfg);
            if ic.n_paths < 1000 {
                return Err(invalid(format!("holder needs at least 1000 paths, got {}", ic.n_paths)));
            }
            if ic.n_points < 1024 {
                return Err(invalid("holder needs a grid of at least 1024 points"));
            }
            if !(ic.n_points - 1).is_multiple_of(1024) {
                return Err(invalid("holder needs a grid of 2^k·1024 + 1 points for lags down to 2^-10"));
            }
            if ic.exp_beta.is_some() && ic.sobolev_paths < 1000 {
                return Err(invalid("the exponential-moment check needs at least 1000 paths"));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Result of one subcommand: report files (name, contents) and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub pass: bool,
    pub summary: String,
}

fn path_model(built: &Built) -> &dyn PathModel {
    match built {
        Built::Path(m) => m.as_ref(),
        Built::Field(_) => unreachable!("checked in resolve"),
    }
}

/// Runs a resolved configuration and returns its report files.
pub fn execute(cfg: &RunConfig, built: &Built) -> Result<Outcome> {
    match cfg.command.as_str() {
        "simulate" => simulate(cfg, built),
        "moments" => run_moments(cfg, path_model(built)),
        "grr" => run_grr(cfg, path_model(built)),
        "field" => match built {
            Built::Field(f) => run_field(cfg, f.as_ref()),
            Built::Path(_) => unreachable!("checked in resolve"),
        },
        "tail" => {
            let tc = tail_config(cfg);
            let curve = match built {
                Built::Path(m) => tails::sup_tail_experiment(m.as_ref(), &tc)?,
                Built::Field(f) => tails::field_sup_tail_experiment(f.as_ref(), &tc)?,
            };
            let pass = curve.passes();
            Ok(Outcome {
                files: vec![
                    ("tail.csv".into(), curve.to_csv()),
                    ("tail.json".into(), curve.sidecar_json() + "\n"),
                ],
                pass,
                summary: format!(
                    "tail: {} of {} levels pass, C(beta0)={}, additive={}",
                    curve.pass.iter().filter(|p| **p).count(),
                    curve.u_grid.len(),
                    curve.meta.c_beta0,
                    curve.meta.additive
                ),
            })
        }
        "holder" => {
            let r = holder::iff_report(path_model(built), &iff_config(cfg))?;
            let pass = r.passes();
            Ok(Outcome {
                files: vec![
                    ("holder.txt".into(), r.record().render()),
                    ("scaling.csv".into(), r.scaling.to_csv()),
                    ("sobolev.csv".into(), r.to_csv()),
                ],
                pass,
                summary: format!(
                    "holder: alpha_moment={} alpha_path={} target={}",
                    r.alpha_moment, r.alpha_path, r.alpha
                ),
            })
        }
        other => Err(invalid(format!("unknown command {other}"))),
    }
}

fn simulate(cfg: &RunConfig, built: &Built) -> Result<Outcome> {
    let mut files = Vec::new();
    match built {
        Built::Path(m) => {
            let paths = holder::sample_paths(m.as_ref(), cfg.grid[0], cfg.paths, cfg.seed)?;
            let mut header = vec!["t".to_string()];
            header.extend((0..cfg.paths).map(|i| format!("x{i}")));
            let refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut t = Table::new(&refs);
            let grid = paths[0].grid().to_vec();
            for (j, tj) in grid.iter().enumerate() {
                let mut row = vec![(*tj).into()];
                row.extend(paths.iter().map(|p| p.values()[j].into()));
                t.row(row);
            }
            files.push(("paths.csv".into(), t.render().to_string()));
        }
        Built::Field(f) => {
            for i in 0..cfg.paths {
                let field = f.sample(&cfg.grid, derive_seed(cfg.seed, i as u64))?;
                files.push((format!("field_{i:04}.csv"), field.to_csv()));
            }
        }
    }
    Ok(Outcome {
        summary: format!("simulate: {} sample(s) of {}", cfg.paths, cfg.model),
        files,
        pass: true,
    })
}

fn run_moments(cfg: &RunConfig, model: &dyn PathModel) -> Result<Outcome> {
    let reference = match (cfg.c0, model.hyper_params()) {
        (Some(c0), _) => HyperParams::new(c0, cfg.iota)?,
        (None, Some(h)) => h,
        (None, None) => return Err(invalid("no reference constants")),
    };
    let r = moments::moment_report(model, &moments::DEFAULT_P_GRID, cfg.grid[0], cfg.paths, cfg.seed, reference)?;
    let pass = r.passes();
    let fit = r.fit_record();
    Ok(Outcome {
        files: vec![
            ("moments.csv".into(), r.to_csv()),
            ("lags.csv".into(), r.lags_csv()),
            ("fit.txt".into(), fit.render()),
        ],
        pass,
        summary: format!(
            "moments: fitted C0={} iota={}",
            r.fit.params.c0, r.fit.params.iota
        ),
    })
}

fn run_grr(cfg: &RunConfig, model: &dyn PathModel) -> Result<Outcome> {
    let gc = match cfg.c0 {
        Some(c0) => GrrConfig::with_c0(cfg.beta, cfg.iota, cfg.alpha[0], c0)?,
        None => GrrConfig::new(cfg.beta, cfg.iota, cfg.alpha[0])?,
    };
    let scale = model.increment_scale().sqrt();
    let paths: Vec<SamplePath> = match &cfg.input {
        Some(p) => vec![SamplePath::from_csv(&fs::read_to_string(p)?)?],
        None => holder::sample_paths(model, cfg.grid[0], cfg.paths, cfg.seed)?
            .into_iter()
            .map(|p| if scale != 1.0 { p.scaled(1.0 / scale) } else { Ok(p) })
            .collect::<Result<_>>()?,
    };
    let mut t = Table::new(&[
        "path",
        "B",
        "C_omega",
        "C_d",
        "violations",
        "integral_violations",
        "max_ratio",
    ]);
    let mut total = 0;
    let mut first: Option<GrrResult> = None;
    for (i, p) in paths.iter().enumerate() {
        let r = GrrResult::compute(p, &gc)?;
        let v = grr::verify_modulus(p, &r);
        let vi = grr::verify_integral_modulus(p, &r)?;
        total += v.violations + vi.violations;
        t.row(vec![
            i.into(),
            r.b.into(),
            r.c_omega.into(),
            r.c_d.into(),
            v.violations.into(),
            vi.violations.into(),
            v.max_ratio.into(),
        ]);
        first.get_or_insert(r);
    }
    let first = first.expect("at least one path");
    let mut m = Table::new(&["delta", "bound"]);
    for (d, b) in &first.modulus_samples {
        m.row(vec![(*d).into(), (*b).into()]);
    }
    let mut summary = first.record();
    summary
        .num("scale", if cfg.input.is_some() { 1.0 } else { scale })
        .push("paths", paths.len().to_string())
        .push("violations", total.to_string());
    Ok(Outcome {
        files: vec![
            ("grr.csv".into(), t.render().to_string()),
            ("modulus.csv".into(), m.render().to_string()),
            ("summary.txt".into(), summary.render()),
        ],
        pass: total == 0,
        summary: format!("grr: {} path(s), {total} violation(s)", paths.len()),
    })
}

fn run_field(cfg: &RunConfig, model: &dyn FieldModel) -> Result<Outcome> {
    let dims = model.dims();
    let mut t = Table::new(&["field", "B", "C_omega", "C_d", "C_tilde", "violations", "max_ratio"]);
    let mut s = Table::new(&["field", "epsilon", "c_eps", "violations"]);
    let mut violations = 0;
    let mut mismatches = 0;
    let mut worst_gap: f64 = 0.0;
    for i in 0..cfg.paths {
        let f = model.sample(&cfg.grid, derive_seed(cfg.seed, i as u64))?;
        let r = FieldGrrResult::compute(&f, &cfg.alpha, cfg.beta, cfg.iota)?;
        let v = fields::verify_field_modulus(&f, &r);
        violations += v.violations;
        t.row(vec![
            i.into(),
            r.b.into(),
            r.c_omega.into(),
            r.c_d.into(),
            r.c_tilde.into(),
            v.violations.into(),
            v.max_ratio.into(),
        ]);
        for &eps in &cfg.epsilon {
            let so = fields::field_sobolev_bound(&f, &cfg.alpha, eps)?;
            violations += so.check.violations;
            s.row(vec![i.into(), eps.into(), so.c_eps.into(), so.check.violations.into()]);
        }
        if i == 0 {
            // corner sum against the composed difference operators
            let mut rng = seed::rng(derive_seed(cfg.seed, u64::MAX));
            for _ in 0..1000 {
                let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
                    (0..dims)
                        .map(|k| rng.random_range(0..cfg.grid[k]) as f64 / (cfg.grid[k] - 1) as f64)
                        .collect()
                };
                let a = pick(&mut rng);
                let b = pick(&mut rng);
                let gap = (fields::box_increment(&f, &a, &b)? - fields::box_increment_operator(&f, &a, &b)?).abs();
                worst_gap = worst_gap.max(gap);
                if gap > 1e-12 {
                    mismatches += 1;
                }
            }
        }
    }
    let mut summary = Record::new();
    summary
        .push("fields", cfg.paths.to_string())
        .push("violations", violations.to_string())
        .push("box_mismatches", mismatches.to_string())
        .num("box_worst_gap", worst_gap);
    Ok(Outcome {
        files: vec![
            ("field.csv".into(), t.render().to_string()),
            ("sobolev.csv".into(), s.render().to_string()),
            ("summary.txt".into(), summary.render()),
        ],
        pass: violations == 0 && mismatches == 0,
        summary: format!("field: {} field(s), {violations} violation(s), {mismatches} box mismatch(es)", cfg.paths),
    })
}

fn write_outputs(out: &Path, cfg: &RunConfig, outcome: &Outcome) -> Result<()> {
    fs::create_dir_all(out)?;
    fs::write(out.join("manifest.txt"), cfg.manifest())?;
    for (name, text) in &outcome.files {
        fs::write(out.join(name), text)?;
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(invalid("threads must be positive")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Resolves, runs and writes one command. Returns the exit status.
pub fn run(
    command: &str,
    map: &BTreeMap<String, String>,
    out: &Path,
    threads: Option<usize>,
    log: &mut dyn std::io::Write,
) -> i32 {
    let registry = ModelRegistry::with_builtins();
    let result = resolve(command, map, &registry).and_then(|(cfg, built)| {
        // validate the output location before any work
        fs::create_dir_all(out)?;
        let outcome = with_threads(threads, || execute(&cfg, &built))??;
        write_outputs(out, &cfg, &outcome)?;
        Ok(outcome)
    });
    match result {
        Ok(o) => {
            let _ = writeln!(log, "{} [{}]", o.summary, if o.pass { "PASS" } else { "FAIL" });
            if o.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            if matches!(e, Error::Io(_)) {
                EXIT_CONFIG
            } else {
                exit_code(&e)
            }
        }
    }
}

/// Entry point shared by the binary and tests.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let mut err = std::io::stderr();
    let (command, flags) = match cli.command {
        Command::Replay(r) => {
            let map = match read_config(&r.manifest) {
                Ok(m) => m,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_CONFIG;
                }
            };
            let Some(command) = map.get("command").cloned() else {
                let _ = writeln!(err, "error: manifest has no command");
                return EXIT_CONFIG;
            };
            if command == "replay" {
                let _ = writeln!(err, "error: manifest command cannot be replay");
                return EXIT_CONFIG;
            }
            return run(&command, &map, &r.out, r.threads, &mut err);
        }
        Command::Simulate(f) => ("simulate", f),
        Command::Moments(f) => ("moments", f),
        Command::Grr(f) => ("grr", f),
        Command::Field(f) => ("field", f),
        Command::Tail(f) => ("tail", f),
        Command::Holder(f) => ("holder", f),
    };
    let mut map = match &flags.config {
        Some(p) => match read_config(p) {
            Ok(m) => m,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_CONFIG;
            }
        },
        None => BTreeMap::new(),
    };
    overlay_flags(&mut map, &flags);
    run(command, &map, &flags.out, flags.threads, &mut err)
}
