//! Hölder exponents from both sides: increment-variance scaling (moments)
//! and dyadic oscillation of individual paths, plus the exponential-moment
//! check on the Sobolev constant `C_ε(ω)`.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grr::{self, SobolevReport};
use crate::models::{increment_variance, PathModel};
use crate::path::SamplePath;
use crate::report::{Record, Table};
use crate::seed::derive_seed;

pub const DEFAULT_EPSILONS: [f64; 3] = [0.05, 0.1, 0.2];

/// Grid steps of the oscillation lags used by [`pathwise_exponent`].
pub const OSCILLATION_STEPS: [usize; 5] = [1, 2, 4, 8, 16];

/// Least-squares line through `(log lag, log E(ΔX)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub log_lags: Vec<f64>,
    pub log_moments: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

impl ScalingFit {
    /// `slope / 2`.
    pub fn alpha(&self) -> f64 {
        0.5 * self.slope
    }

    pub fn to_csv(&self) -> String {
        let mut t = Table::new(&["log_lag", "log_second_moment"]);
        for (x, y) in self.log_lags.iter().zip(&self.log_moments) {
            t.row(vec![(*x).into(), (*y).into()]);
        }
        t.render().to_string()
    }
}

struct Line {
    slope: f64,
    intercept: f64,
    slope_stderr: f64,
}

fn ols(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_stderr = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    Line {
        slope,
        intercept,
        slope_stderr,
    }
}

/// Fit `log m = a + slope·log lag` over dyadic lags `2^{-k}`.
pub fn fit_scaling(lags: &[f64], moments: &[f64]) -> Result<ScalingFit> {
    if lags.len() != moments.len() {
        return Err(invalid("lags and moments differ in length"));
    }
    if lags.len() < 5 {
        return Err(invalid(format!("need at least 5 lags, got {}", lags.len())));
    }
    for &l in lags {
        let k = -l.log2();
        if !(l > 0.0 && l <= 1.0) || (k - k.round()).abs() > 1e-9 {
            return Err(invalid(format!("lag {l} is not dyadic")));
        }
    }
    if moments.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::Degenerate(
            "increment second moment is zero or non-finite at some lag".into(),
        ));
    }
    let log_lags: Vec<f64> = lags.iter().map(|l| l.ln()).collect();
    let log_moments: Vec<f64> = moments.iter().map(|m| m.ln()).collect();
    let line = ols(&log_lags, &log_moments);
    Ok(ScalingFit {
        log_lags,
        log_moments,
        slope: line.slope,
        slope_stderr: line.slope_stderr,
        intercept: line.intercept,
    })
}

fn lag_steps(n_points: usize, ks: &[u32]) -> Result<Vec<usize>> {
    let m = n_points - 1;
    ks.iter()
        .map(|&k| {
            let d = 1usize << k;
            if !m.is_multiple_of(d) {
                Err(invalid(format!("lag 2^-{k} is not on a grid of {n_points} points")))
            } else {
                Ok(m / d)
            }
        })
        .collect()
}

fn dyadic_lags(ks: &[u32]) -> Vec<f64> {
    ks.iter().map(|&k| 0.5f64.powi(k as i32)).collect()
}

/// `Ê(ΔX)²` at lags `2^{-k}` from all grid positions of the given paths.
pub fn variance_scaling_paths(paths: &[SamplePath], ks: &[u32]) -> Result<ScalingFit> {
    let first = paths.first().ok_or_else(|| invalid("no paths"))?;
    let n = first.len();
    if paths.iter().any(|p| p.len() != n) {
        return Err(invalid("paths differ in grid size"));
    }
    let steps = lag_steps(n, ks)?;
    let moments: Vec<f64> = steps
        .iter()
        .map(|&lag| {
            let (sum, count) = paths
                .iter()
                .map(|p| {
                    let x = p.values();
                    let s: f64 = (lag..n).map(|j| (x[j] - x[j - lag]).powi(2)).sum();
                    (s, n - lag)
                })
                .fold((0.0, 0usize), |a, b| (a.0 + b.0, a.1 + b.1));
            sum / count as f64
        })
        .collect();
    fit_scaling(&dyadic_lags(ks), &moments)
}

pub fn sample_paths(model: &dyn PathModel, n_points: usize, n_paths: usize, seed: u64) -> Result<Vec<SamplePath>> {
    (0..n_paths)
        .into_par_iter()
        .map(|i| model.sample(n_points, derive_seed(seed, i as u64)))
        .collect()
}

/// Monte Carlo variance scaling over `n_paths ≥ 1000` paths on `n_points` nodes.
pub fn variance_scaling(
    model: &dyn PathModel,
    ks: &[u32],
    n_points: usize,
    n_paths: usize,
    seed: u64,
) -> Result<ScalingFit> {
    if n_paths < 1000 {
        return Err(invalid(format!("variance scaling needs at least 1000 paths, got {n_paths}")));
    }
    lag_steps(n_points, ks)?;
    variance_scaling_paths(&sample_paths(model, n_points, n_paths, seed)?, ks)
}

/// The same estimator fed exact increment variances from the covariance.
pub fn analytic_variance_scaling(model: &dyn PathModel, ks: &[u32], n_points: usize) -> Result<ScalingFit> {
    let steps = lag_steps(n_points, ks)?;
    let h = 1.0 / (n_points - 1) as f64;
    let moments: Vec<f64> = steps
        .iter()
        .map(|&lag| {
            let mut s = 0.0;
            for j in lag..n_points {
                s += increment_variance(model, (j - lag) as f64 * h, j as f64 * h)
                    .ok_or_else(|| invalid(format!("{} has no closed-form covariance", model.spec())))?;
            }
            Ok(s / (n_points - lag) as f64)
        })
        .collect::<Result<_>>()?;
    fit_scaling(&dyadic_lags(ks), &moments)
}

/// Slope of `log max_{|t-s|=δ} |X_t - X_s|` against `log δ` over the finest
/// dyadic lags. `+∞` for a constant path.
pub fn pathwise_exponent(path: &SamplePath) -> Result<f64> {
    if path.len() < 1024 {
        return Err(invalid(format!(
            "pathwise exponent needs at least 1024 grid points, got {}",
            path.len()
        )));
    }
    let x = path.values();
    let h = path.step();
    let osc: Vec<f64> = OSCILLATION_STEPS
        .iter()
        .map(|&k| (k..x.len()).map(|j| (x[j] - x[j - k]).abs()).fold(0.0, f64::max))
        .collect();
    if osc.iter().all(|&o| o == 0.0) {
        return Ok(f64::INFINITY);
    }
    if osc.contains(&0.0) {
        return Err(Error::Degenerate("oscillation vanishes at some lags only".into()));
    }
    let lx: Vec<f64> = OSCILLATION_STEPS.iter().map(|&k| (k as f64 * h).ln()).collect();
    let ly: Vec<f64> = osc.iter().map(|o| o.ln()).collect();
    Ok(ols(&lx, &ly).slope)
}

/// Neumaier-compensated mean.
fn mean(values: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    (sum + comp) / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpMomentReport {
    pub beta: f64,
    pub iota: f64,
    pub n: usize,
    /// Mean of `exp(β C^{1/ι})`; `+∞` when some term overflows.
    pub mean: f64,
    /// Mean over the first half of the samples.
    pub half_mean: f64,
    /// Mean after dropping the largest 1% of terms.
    pub trimmed_mean: f64,
    pub stable: bool,
    pub too_large: bool,
}

impl ExpMomentReport {
    pub fn verdict(&self) -> &'static str {
        if self.too_large {
            "beta too large"
        } else if self.stable {
            "stable"
        } else {
            "unstable"
        }
    }

    pub fn record(&self) -> Record {
        let mut r = Record::new();
        r.num("beta", self.beta)
            .num("iota", self.iota)
            .num("n", self.n as f64)
            .num("mean", self.mean)
            .num("half_mean", self.half_mean)
            .num("trimmed_mean", self.trimmed_mean)
            .push("verdict", self.verdict());
        r
    }
}

/// Stability of the plug-in estimate of `E exp(β C^{1/ι})`.
pub fn exp_moment_check(samples: &[f64], beta: f64, iota: f64) -> Result<ExpMomentReport> {
    if !(beta > 0.0 && iota > 0.0) {
        return Err(invalid("beta and iota must be positive"));
    }
    if let Some(c) = samples.iter().find(|c| !(**c >= 0.0) || !c.is_finite()) {
        return Err(invalid(format!("sample {c} is not a nonnegative number")));
    }
    let terms: Vec<f64> = samples
        .iter()
        .map(|c| {
            let e = beta * c.powf(1.0 / iota);
            if e > grr::MAX_EXPONENT {
                f64::INFINITY
            } else {
                e.exp()
            }
        })
        .collect();
    term_stability(&terms, beta, iota)
}

/// The same verdict applied to terms that are already exponential moments,
/// such as per-path values of `B`. Infinite terms mean `β` is too large.
pub fn term_stability(terms: &[f64], beta: f64, iota: f64) -> Result<ExpMomentReport> {
    let n = terms.len();
    if n < 1000 {
        return Err(invalid(format!("need at least 1000 samples, got {n}")));
    }
    if terms.iter().any(|t| t.is_infinite()) {
        return Ok(ExpMomentReport {
            beta,
            iota,
            n,
            mean: f64::INFINITY,
            half_mean: f64::INFINITY,
            trimmed_mean: f64::INFINITY,
            stable: false,
            too_large: true,
        });
    }
    if let Some(t) = terms.iter().find(|t| !(**t >= 0.0)) {
        return Err(invalid(format!("term {t} is negative or NaN")));
    }
    let full = mean(terms);
    let half_mean = mean(&terms[..n / 2]);
    let mut sorted = terms.to_vec();
    sorted.sort_by(f64::total_cmp);
    let trimmed_mean = mean(&sorted[..n - n / 100]);
    let stable = (full - half_mean).abs() < 0.1 * full && (full - trimmed_mean).abs() <= 0.25 * full;
    Ok(ExpMomentReport {
        beta,
        iota,
        n,
        mean: full,
        half_mean,
        trimmed_mean,
        stable,
        too_large: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IffConfig {
    /// Exponent under test; the model's own when `None`.
    pub alpha: Option<f64>,
    pub epsilons: Vec<f64>,
    pub ks: Vec<u32>,
    pub n_points: usize,
    /// Paths for the variance scaling.
    pub n_paths: usize,
    /// Paths whose pathwise exponents are pooled by the median.
    pub n_exponent_paths: usize,
    /// Grid for the Sobolev integral.
    pub sobolev_points: usize,
    pub sobolev_paths: usize,
    /// Parameters of the exponential-moment check; skipped when `None`.
    pub exp_beta: Option<f64>,
    pub iota: f64,
    pub seed: u64,
    pub tolerance: f64,
    pub agreement: f64,
}

impl Default for IffConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            ks: (3..=10).collect(),
            n_points: 1025,
            n_paths: 1000,
            n_exponent_paths: 100,
            sobolev_points: 257,
            sobolev_paths: 20,
            exp_beta: None,
            iota: 0.5,
            seed: 0,
            tolerance: 0.07,
            agreement: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevSummary {
    pub epsilon: f64,
    pub median_c_eps: f64,
    pub violations: usize,
    pub exp_check: Option<ExpMomentReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IffReport {
    pub alpha: f64,
    pub scaling: ScalingFit,
    pub alpha_moment: f64,
    pub alpha_path: f64,
    pub path_exponents: Vec<f64>,
    pub sobolev: Vec<SobolevSummary>,
    pub moment_pass: bool,
    pub path_pass: bool,
    pub agree: bool,
}

impl IffReport {
    pub fn passes(&self) -> bool {
        self.moment_pass && self.path_pass && self.agree && self.sobolev.iter().all(|s| s.violations == 0)
    }

    pub fn record(&self) -> Record {
        let mut r = Record::new();
        r.num("alpha", self.alpha)
            .num("alpha_moment", self.alpha_moment)
            .num("slope_stderr", self.scaling.slope_stderr)
            .num("alpha_path", self.alpha_path)
            .push("moment_pass", self.moment_pass.to_string())
            .push("path_pass", self.path_pass.to_string())
            .push("agree", self.agree.to_string());
        for s in &self.sobolev {
            r.num(format!("c_eps[{}]", s.epsilon), s.median_c_eps)
                .num(format!("sobolev_violations[{}]", s.epsilon), s.violations as f64);
            if let Some(e) = &s.exp_check {
                r.push(format!("exp_moment[{}]", s.epsilon), e.verdict());
            }
        }
        r.push("pass", self.passes().to_string());
        r
    }

    pub fn to_csv(&self) -> String {
        let mut t = Table::new(&["epsilon", "median_c_eps", "violations", "exp_moment"]);
        for s in &self.sobolev {
            t.row(vec![
                s.epsilon.into(),
                s.median_c_eps.into(),
                s.violations.into(),
                s.exp_check.as_ref().map_or("skipped", |e| e.verdict()).to_string().into(),
            ]);
        }
        t.render().to_string()
    }
}

/// Both directions of the Hölder characterization for one model.
pub fn iff_report(model: &dyn PathModel, cfg: &IffConfig) -> Result<IffReport> {
    let alpha = cfg.alpha.unwrap_or_else(|| model.holder_exponent());
    grr::check_alpha(alpha)?;
    if cfg.n_exponent_paths > cfg.n_paths || cfg.sobolev_paths == 0 {
        return Err(invalid("exponent and Sobolev path counts must be positive and within n_paths"));
    }
    for &e in &cfg.epsilons {
        if !(e > 0.0 && e < alpha) {
            return Err(invalid(format!("epsilon {e} must lie in (0, alpha)")));
        }
    }
    if cfg.exp_beta.is_some() && cfg.sobolev_paths < 1000 {
        return Err(invalid("the exponential-moment check needs at least 1000 Sobolev paths"));
    }
    if !(cfg.n_points - 1).is_multiple_of(cfg.sobolev_points - 1) {
        return Err(invalid("the Sobolev grid must be a subgrid of the sampling grid"));
    }

    let paths = sample_paths(model, cfg.n_points, cfg.n_paths.max(cfg.sobolev_paths), cfg.seed)?;
    if cfg.n_paths < 1000 {
        return Err(invalid(format!("variance scaling needs at least 1000 paths, got {}", cfg.n_paths)));
    }
    let scaling = variance_scaling_paths(&paths[..cfg.n_paths], &cfg.ks)?;
    let path_exponents: Vec<f64> = paths[..cfg.n_exponent_paths]
        .par_iter()
        .map(pathwise_exponent)
        .collect::<Result<_>>()?;
    let alpha_moment = scaling.alpha();
    let alpha_path = median(&path_exponents);

    let stride = (cfg.n_points - 1) / (cfg.sobolev_points - 1);
    let coarse: Vec<SamplePath> = paths[..cfg.sobolev_paths]
        .iter()
        .map(|p| SamplePath::new(p.values().iter().step_by(stride).copied().collect()))
        .collect::<Result<_>>()?;
    let mut sobolev = Vec::with_capacity(cfg.epsilons.len());
    for &eps in &cfg.epsilons {
        let reports: Vec<SobolevReport> = coarse
            .par_iter()
            .map(|p| grr::sobolev_bound(p, alpha, eps))
            .collect::<Result<_>>()?;
        let c: Vec<f64> = reports.iter().map(|r| r.c_eps).collect();
        let exp_check = cfg.exp_beta.map(|b| exp_moment_check(&c, b, cfg.iota)).transpose()?;
        sobolev.push(SobolevSummary {
            epsilon: eps,
            median_c_eps: median(&c),
            violations: reports.iter().map(|r| r.check.violations).sum(),
            exp_check,
        });
    }

    let moment_pass = (alpha_moment - alpha).abs() <= cfg.tolerance;
    let path_pass = (alpha_path - alpha).abs() <= cfg.tolerance;
    let agree = (alpha_moment - alpha_path).abs() <= cfg.agreement;
    Ok(IffReport {
        alpha,
        scaling,
        alpha_moment,
        alpha_path,
        path_exponents,
        sobolev,
        moment_pass,
        path_pass,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Constant, Fbm, Linear};
    use proptest::prelude::*;

    fn ks() -> Vec<u32> {
        (3..=10).collect()
    }

    #[test]
    fn fit_needs_five_dyadic_lags() {
        let l = dyadic_lags(&[1, 2, 3, 4]);
        assert!(fit_scaling(&l, &[1.0; 4]).is_err());
        assert!(fit_scaling(&[0.5, 0.25, 0.125, 0.0625, 0.03], &[1.0; 5]).is_err());
        let l = dyadic_lags(&[1, 2, 3, 4, 5]);
        assert!(matches!(fit_scaling(&l, &[1.0, 1.0, 0.0, 1.0, 1.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn analytic_fbm_slope_is_exact() {
        for h in [0.3, 0.5, 0.7] {
            let fit = analytic_variance_scaling(&Fbm::new(h).unwrap(), &ks(), 1025).unwrap();
            assert!((fit.slope - 2.0 * h).abs() < 1e-9, "{h}: {}", fit.slope);
        }
    }

    #[test]
    fn linear_stub_slope_two() {
        let fit = variance_scaling(&Linear, &ks(), 1025, 1000, 0).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(matches!(
            variance_scaling(&Constant::new(1.0), &ks(), 1025, 1000, 0),
            Err(Error::Degenerate(_))
        ));
        assert!(variance_scaling(&Linear, &ks(), 1025, 10, 0).is_err());
    }

    #[test]
    fn deterministic_exponents() {
        let lin = SamplePath::from_fn(1025, |t| t).unwrap();
        assert!((pathwise_exponent(&lin).unwrap() - 1.0).abs() < 0.02);
        let root = SamplePath::from_fn(1025, f64::sqrt).unwrap();
        assert!((pathwise_exponent(&root).unwrap() - 0.5).abs() < 0.05);
        let flat = SamplePath::from_fn(1025, |_| 2.0).unwrap();
        assert_eq!(pathwise_exponent(&flat).unwrap(), f64::INFINITY);
        assert!(pathwise_exponent(&SamplePath::from_fn(512, |t| t).unwrap()).is_err());
    }

    #[test]
    fn exp_moment_constant_samples() {
        let r = exp_moment_check(&[2.0; 1000], 0.3, 0.5).unwrap();
        assert!((r.mean / (0.3f64 * 4.0).exp() - 1.0).abs() < 1e-14);
        assert!(r.stable);
        let big = exp_moment_check(&[100.0; 1000], 1.0, 0.5).unwrap();
        assert!(big.too_large);
        assert_eq!(big.verdict(), "beta too large");
        assert!(exp_moment_check(&[1.0; 10], 0.3, 0.5).is_err());
        let t = term_stability(&[f64::INFINITY; 1000], 1.0, 1.0).unwrap();
        assert!(t.too_large);
    }

    #[test]
    fn heavy_single_term_is_unstable() {
        let mut s = vec![0.0; 1000];
        s[999] = 10.0;
        let r = exp_moment_check(&s, 1.0, 0.5).unwrap();
        assert!(!r.stable && !r.too_large);
    }

    #[test]
    fn linear_iff_passes_at_one() {
        let cfg = IffConfig {
            alpha: Some(1.0),
            ..IffConfig::default()
        };
        let r = iff_report(&Linear, &cfg).unwrap();
        assert!(r.passes(), "{r:?}");
        assert!((r.alpha_moment - 1.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn exponent_is_scale_invariant(seed in 0u64..1000, c in 0.01f64..100.0) {
            let p = Fbm::new(0.5).unwrap().sample(1025, seed).unwrap();
            let a = pathwise_exponent(&p).unwrap();
            let b = pathwise_exponent(&p.scaled(c).unwrap()).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn slope_is_scale_invariant(c in 0.01f64..100.0, h in 0.1f64..0.9) {
            let l = dyadic_lags(&[3, 4, 5, 6, 7, 8]);
            let m: Vec<f64> = l.iter().map(|d| d.powf(2.0 * h)).collect();
            let a = fit_scaling(&l, &m).unwrap();
            let scaled: Vec<f64> = m.iter().map(|v| c * c * v).collect();
            let b = fit_scaling(&l, &scaled).unwrap();
            prop_assert!((a.slope - b.slope).abs() < 1e-9);
            prop_assert!((a.slope - 2.0 * h).abs() < 1e-9);
        }
    }
}
