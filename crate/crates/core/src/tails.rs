//! Supremum tail bounds, the `β₀` window, and the Paley-Zygmund and
//! tightness diagnostics.
//!
//! For `β₀` below [`beta0_max`] the Hölder random constant satisfies
//! `P(sup_{t∈I} |X_t - X_s| ≥ u|I|^α + A) ≤ C(β₀) e^{-β₀ u^{1/ι}}` with
//! `C(β₀) = E[4ⁿ B^κ]` and `A` the deterministic additive constant.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fields::{c_tilde, compute_b_field, field_holder_constants};
use crate::grr::{self, check_beta_window, three_factor};
use crate::models::{FieldModel, PathModel};
use crate::quad::LogQuadrature;
use crate::report::Table;
use crate::seed::derive_seed;

/// `eι / (8ⁿ C0 3^{max(ι-1,0)})^{1/ι}`.
pub fn beta0_max(c0: f64, iota: f64, n_dims: usize) -> f64 {
    std::f64::consts::E * iota / (8f64.powi(n_dims as i32) * c0 * three_factor(iota)).powf(1.0 / iota)
}

/// `κ = β₀ β^{-1} (8ⁿ 3^{max(ι-1,0)})^{1/ι}`, the power of `B` in `C(β₀)`.
pub fn kappa(beta0: f64, beta: f64, iota: f64, n_dims: usize) -> f64 {
    beta0 / beta * (8f64.powi(n_dims as i32) * three_factor(iota)).powf(1.0 / iota)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CBeta0 {
    pub value: f64,
    pub std_error: f64,
    pub kappa: f64,
    /// Set when `κ` leaves the range where `B^κ` is known to be integrable.
    pub warning: Option<String>,
}

/// Plug-in mean of `4ⁿ B^κ`. With `c0` given, warns when `κ ≥ eι/(β C0^{1/ι})`.
pub fn estimate_c_beta0(
    b_samples: &[f64],
    beta0: f64,
    beta: f64,
    iota: f64,
    n_dims: usize,
    c0: Option<f64>,
) -> Result<CBeta0> {
    if b_samples.is_empty() {
        return Err(invalid("no B samples"));
    }
    if !(beta0 > 0.0 && beta > 0.0 && iota > 0.0) {
        return Err(invalid("beta0, beta and iota must be positive"));
    }
    let k = kappa(beta0, beta, iota, n_dims);
    let pref = 4f64.powi(n_dims as i32);
    let vals: Vec<f64> = b_samples.iter().map(|b| pref * b.powf(k)).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let std_error = if vals.len() > 1 {
        (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let warning = c0.and_then(|c0| {
        let limit = std::f64::consts::E * iota / (beta * c0.powf(1.0 / iota));
        (k >= limit).then(|| {
            format!("kappa = {k} is outside the finite-moment window (limit {limit}); C(beta0) may be infinite")
        })
    });
    Ok(CBeta0 {
        value: mean,
        std_error,
        kappa: k,
        warning,
    })
}

/// Binomial standard errors allowed above the bound before a point fails.
pub const PASS_MARGIN_SE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailMeta {
    pub model: String,
    pub seed: u64,
    pub n_paths: usize,
    pub grid: Vec<usize>,
    pub interval: Vec<(f64, f64)>,
    pub base: Vec<f64>,
    pub alpha: Vec<f64>,
    pub iota: f64,
    pub beta: f64,
    pub beta0: f64,
    pub kappa: f64,
    pub c_beta0: f64,
    pub c_beta0_std_error: f64,
    pub c_d: f64,
    /// Added to `u Π|I_j|^{α_j}`: the maximum of `C_d x^α (log 1/x)^ι`.
    pub additive: f64,
    /// `C_d e^{-αι} ι^ι`, the alternative form, reported for comparison (one axis only).
    pub additive_alternative: Option<f64>,
    /// Paths are divided by this before analysis.
    pub scale: f64,
    pub max_sup: f64,
    pub warning: Option<String>,
}

/// Empirical exceedance probabilities against `C(β₀) e^{-β₀ u^{1/ι}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCurve {
    pub u_grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub bound: Vec<f64>,
    pub pass: Vec<bool>,
    pub n_paths: usize,
    pub meta: TailMeta,
}

impl TailCurve {
    fn build(u_grid: &[f64], sups: &[f64], threshold: impl Fn(f64) -> f64, meta: TailMeta) -> Self {
        let n = sups.len() as f64;
        let mut empirical = Vec::with_capacity(u_grid.len());
        let mut bound = Vec::with_capacity(u_grid.len());
        let mut pass = Vec::with_capacity(u_grid.len());
        for &u in u_grid {
            let th = threshold(u);
            let p = sups.iter().filter(|&&s| s >= th).count() as f64 / n;
            let b = meta.c_beta0 * (-meta.beta0 * u.powf(1.0 / meta.iota)).exp();
            let se = (p * (1.0 - p) / n).sqrt();
            empirical.push(p);
            bound.push(b);
            pass.push(p <= b + PASS_MARGIN_SE * se);
        }
        Self {
            u_grid: u_grid.to_vec(),
            empirical,
            bound,
            pass,
            n_paths: sups.len(),
            meta,
        }
    }

    pub fn passes(&self) -> bool {
        self.pass.iter().all(|&p| p)
    }

    pub fn to_csv(&self) -> String {
        let mut t = Table::new(&["u", "empirical_prob", "bound", "pass"]);
        for i in 0..self.u_grid.len() {
            t.row(vec![
                self.u_grid[i].into(),
                self.empirical[i].into(),
                self.bound[i].into(),
                self.pass[i].into(),
            ]);
        }
        t.render().to_string()
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta).expect("tail metadata serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailConfig {
    /// One exponent per axis.
    pub alpha: Vec<f64>,
    pub iota: f64,
    pub beta: f64,
    pub beta0: f64,
    /// When set, `β` is checked against the finite-moment window.
    pub c0: Option<f64>,
    pub grid: Vec<usize>,
    pub n_paths: usize,
    pub seed: u64,
    /// Grid-aligned interval per axis.
    pub interval: Vec<(f64, f64)>,
    /// Base point inside the interval.
    pub base: Vec<f64>,
    pub u_grid: Vec<f64>,
    /// Divide samples by `√(sup E(ΔX)²/|Δ|^{2α})` so that `ρ(u) = u^α` dominates.
    pub normalize: bool,
}

impl TailConfig {
    fn validate(&self, dims: usize) -> Result<()> {
        if self.n_paths < 1000 {
            return Err(invalid(format!("tail experiments need at least 1000 paths, got {}", self.n_paths)));
        }
        if self.alpha.len() != dims || self.grid.len() != dims || self.interval.len() != dims || self.base.len() != dims {
            return Err(invalid(format!("alpha, grid, interval and base must all have {dims} entries")));
        }
        grr::GrrConfig::new(self.beta, self.iota, self.alpha[0])?;
        for &a in &self.alpha {
            grr::check_alpha(a)?;
        }
        if let Some(c0) = self.c0 {
            check_beta_window(self.beta, self.iota, c0)?;
        }
        if !(self.beta0 > 0.0) {
            return Err(invalid(format!("beta0 must be positive, got {}", self.beta0)));
        }
        if let Some(c0) = self.c0 {
            let max = beta0_max(c0, self.iota, dims);
            if self.beta0 >= max {
                return Err(invalid(format!("beta0 = {} must be below {max}", self.beta0)));
            }
        }
        if self.u_grid.is_empty() || self.u_grid.windows(2).any(|w| w[1] <= w[0]) || self.u_grid[0] <= 0.0 {
            return Err(invalid("u grid must be positive and strictly increasing"));
        }
        for k in 0..dims {
            let (lo, hi) = self.interval[k];
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(invalid(format!("bad interval [{lo}, {hi}]")));
            }
            crate::path::grid_index(lo, self.grid[k])?;
            crate::path::grid_index(hi, self.grid[k])?;
            if !(lo <= self.base[k] && self.base[k] <= hi) {
                return Err(invalid(format!("base point {} is outside [{lo}, {hi}]", self.base[k])));
            }
            crate::path::grid_index(self.base[k], self.grid[k])?;
        }
        Ok(())
    }
}

/// Supremum tail check for a one-parameter model: per path, `B` on
/// the whole grid and `sup_{t∈I} |X_t - X_s|` over grid nodes.
pub fn sup_tail_experiment(model: &dyn PathModel, cfg: &TailConfig) -> Result<TailCurve> {
    cfg.validate(1)?;
    let n = cfg.grid[0];
    let alpha = cfg.alpha[0];
    let scale = if cfg.normalize { model.increment_scale().sqrt() } else { 1.0 };
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Degenerate(format!("increment scale {scale}")));
    }
    let lo = crate::path::grid_index(cfg.interval[0].0, n)?;
    let hi = crate::path::grid_index(cfg.interval[0].1, n)?;
    let s = crate::path::grid_index(cfg.base[0], n)?;

    let per_path: Vec<(f64, f64)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let raw = model.sample(n, derive_seed(cfg.seed, i as u64))?;
            let p = if scale != 1.0 { raw.scaled(1.0 / scale)? } else { raw };
            let b = grr::compute_b(&p, alpha, cfg.beta, cfg.iota)?;
            let x = p.values();
            let sup = (lo..=hi).map(|t| (x[t] - x[s]).abs()).fold(0.0, f64::max);
            Ok((b, sup))
        })
        .collect::<Result<_>>()?;
    let bs: Vec<f64> = per_path.iter().map(|p| p.0).collect();
    let sups: Vec<f64> = per_path.iter().map(|p| p.1).collect();

    let c = estimate_c_beta0(&bs, cfg.beta0, cfg.beta, cfg.iota, 1, cfg.c0)?;
    let q = LogQuadrature::default();
    let (_, c_d) = grr::holder_constants(1.0, cfg.beta, cfg.iota, alpha, &q)?;
    let additive = c_tilde(&[alpha], cfg.iota, c_d)?.value;
    let width = (cfg.interval[0].1 - cfg.interval[0].0).powf(alpha);
    let meta = TailMeta {
        model: model.spec().to_string(),
        seed: cfg.seed,
        n_paths: cfg.n_paths,
        grid: cfg.grid.clone(),
        interval: cfg.interval.clone(),
        base: cfg.base.clone(),
        alpha: cfg.alpha.clone(),
        iota: cfg.iota,
        beta: cfg.beta,
        beta0: cfg.beta0,
        kappa: c.kappa,
        c_beta0: c.value,
        c_beta0_std_error: c.std_error,
        c_d,
        additive,
        additive_alternative: Some(c_d * (-alpha * cfg.iota).exp() * cfg.iota.powf(cfg.iota)),
        scale,
        max_sup: sups.iter().copied().fold(0.0, f64::max),
        warning: c.warning,
    };
    Ok(TailCurve::build(&cfg.u_grid, &sups, |u| u * width + additive, meta))
}

/// Field version: `sup_{t∈I} |□ⁿ_t X(s)|` against `u Π|I_j|^{α_j} + C̃`.
pub fn field_sup_tail_experiment(model: &dyn FieldModel, cfg: &TailConfig) -> Result<TailCurve> {
    let dims = model.dims();
    cfg.validate(dims)?;
    let ranges: Vec<(usize, usize)> = (0..dims)
        .map(|k| {
            Ok((
                crate::path::grid_index(cfg.interval[k].0, cfg.grid[k])?,
                crate::path::grid_index(cfg.interval[k].1, cfg.grid[k])?,
            ))
        })
        .collect::<Result<_>>()?;
    let s: Vec<f64> = cfg.base.clone();

    let per_field: Vec<(f64, f64)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let f = model.sample(&cfg.grid, derive_seed(cfg.seed, i as u64))?;
            let b = compute_b_field(&f, &cfg.alpha, cfg.beta, cfg.iota)?;
            let mut sup: f64 = 0.0;
            let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
            let mut t = vec![0.0; dims];
            'outer: loop {
                for k in 0..dims {
                    t[k] = idx[k] as f64 / (cfg.grid[k] - 1) as f64;
                }
                sup = sup.max(crate::fields::box_increment(&f, &s, &t)?.abs());
                let mut k = dims;
                loop {
                    if k == 0 {
                        break 'outer;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] <= ranges[k].1 {
                        break;
                    }
                    idx[k] = ranges[k].0;
                }
            }
            Ok((b, sup))
        })
        .collect::<Result<_>>()?;
    let bs: Vec<f64> = per_field.iter().map(|p| p.0).collect();
    let sups: Vec<f64> = per_field.iter().map(|p| p.1).collect();

    let c = estimate_c_beta0(&bs, cfg.beta0, cfg.beta, cfg.iota, dims, cfg.c0)?;
    let quad = LogQuadrature::for_dims(dims);
    let (_, c_d) = field_holder_constants(1.0, cfg.beta, cfg.iota, &cfg.alpha, &quad)?;
    let additive = c_tilde(&cfg.alpha, cfg.iota, c_d)?.value;
    let width: f64 = cfg
        .interval
        .iter()
        .zip(&cfg.alpha)
        .map(|((lo, hi), a)| (hi - lo).powf(*a))
        .product();
    let meta = TailMeta {
        model: model.spec().to_string(),
        seed: cfg.seed,
        n_paths: cfg.n_paths,
        grid: cfg.grid.clone(),
        interval: cfg.interval.clone(),
        base: cfg.base.clone(),
        alpha: cfg.alpha.clone(),
        iota: cfg.iota,
        beta: cfg.beta,
        beta0: cfg.beta0,
        kappa: c.kappa,
        c_beta0: c.value,
        c_beta0_std_error: c.std_error,
        c_d,
        additive,
        additive_alternative: None,
        scale: 1.0,
        max_sup: sups.iter().copied().fold(0.0, f64::max),
        warning: c.warning,
    };
    Ok(TailCurve::build(&cfg.u_grid, &sups, |u| u * width + additive, meta))
}

/// `(1-θ)² (EX)² / EX²`, a lower bound for `P(X > θ EX)`.
pub fn paley_zygmund(mean: f64, second_moment: f64, theta: f64) -> Result<f64> {
    if !(mean >= 0.0) {
        return Err(invalid(format!("mean must be nonnegative, got {mean}")));
    }
    if !(second_moment > 0.0) {
        return Err(invalid(format!("second moment must be positive, got {second_moment}")));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(invalid(format!("theta must lie in [0,1], got {theta}")));
    }
    // allow rounding in E X² ≥ (E X)²
    if mean * mean > second_moment * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "mean² = {} exceeds the second moment {second_moment}",
            mean * mean
        )));
    }
    Ok(((1.0 - theta).powi(2) * mean * mean / second_moment).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessRow {
    pub lag: usize,
    pub delta: f64,
    pub second_moment: f64,
    pub second_moment_se: f64,
    /// `E F⁴ / (E F²)²`.
    pub ratio: f64,
    pub ratio_se: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    pub alpha: f64,
    pub epsilon: f64,
    pub rows: Vec<TightnessRow>,
    pub sup_second_moment: f64,
    pub max_ratio: f64,
    pub degenerate: bool,
}

impl TightnessReport {
    pub fn to_csv(&self) -> String {
        let mut t = Table::new(&["lag", "delta", "second_moment", "second_moment_se", "ratio", "ratio_se", "samples"]);
        for r in &self.rows {
            t.row(vec![
                r.lag.into(),
                r.delta.into(),
                r.second_moment.into(),
                r.second_moment_se.into(),
                r.ratio.into(),
                r.ratio_se.into(),
                r.samples.into(),
            ]);
        }
        t.render().to_string()
    }
}

/// Moments of `F = |X_t - X_s| / |t-s|^{α-ε}` at each lag (in grid steps),
/// from non-overlapping increments so that samples within a path share no
/// grid interval.
pub fn tightness_diagnostic(
    model: &dyn PathModel,
    alpha: f64,
    epsilon: f64,
    lags: &[usize],
    n_points: usize,
    n_paths: usize,
    seed: u64,
) -> Result<TightnessReport> {
    grr::check_alpha(alpha)?;
    if !(epsilon > 0.0 && epsilon < alpha) {
        return Err(invalid(format!("need 0 < epsilon < alpha, got {epsilon}")));
    }
    if let Some(l) = lags.iter().find(|&&l| l == 0 || l >= n_points) {
        return Err(invalid(format!("lag {l} out of range")));
    }
    let paths: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| Ok(model.sample(n_points, derive_seed(seed, i as u64))?.values().to_vec()))
        .collect::<Result<_>>()?;
    let h = 1.0 / (n_points - 1) as f64;
    let mut rows = Vec::with_capacity(lags.len());
    for &lag in lags {
        let delta = lag as f64 * h;
        let norm = delta.powf(alpha - epsilon);
        let mut f2 = Vec::new();
        for x in &paths {
            let mut i = 0;
            while i + lag < x.len() {
                let f = (x[i + lag] - x[i]).abs() / norm;
                f2.push(f * f);
                i += lag;
            }
        }
        let n = f2.len() as f64;
        let m2 = f2.iter().sum::<f64>() / n;
        let m4 = f2.iter().map(|v| v * v).sum::<f64>() / n;
        let (mut v22, mut v44, mut v24) = (0.0, 0.0, 0.0);
        for v in &f2 {
            let a = v - m2;
            let b = v * v - m4;
            v22 += a * a;
            v44 += b * b;
            v24 += a * b;
        }
        let (v22, v44, v24) = (v22 / (n - 1.0), v44 / (n - 1.0), v24 / (n - 1.0));
        let (ratio, ratio_se) = if m2 > 0.0 {
            let g4 = 1.0 / (m2 * m2);
            let g2 = -2.0 * m4 / (m2 * m2 * m2);
            let var = (g4 * g4 * v44 + g2 * g2 * v22 + 2.0 * g4 * g2 * v24) / n;
            (m4 / (m2 * m2), var.max(0.0).sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };
        rows.push(TightnessRow {
            lag,
            delta,
            second_moment: m2,
            second_moment_se: (v22 / n).sqrt(),
            ratio,
            ratio_se,
            samples: f2.len(),
        });
    }
    let degenerate = rows.iter().all(|r| r.second_moment == 0.0);
    Ok(TightnessReport {
        alpha,
        epsilon,
        sup_second_moment: rows.iter().map(|r| r.second_moment).fold(0.0, f64::max),
        max_ratio: rows.iter().map(|r| r.ratio).filter(|r| r.is_finite()).fold(0.0, f64::max),
        rows,
        degenerate,
    })
}

/// Flat metadata for reports that are not tail curves.
pub fn metadata_json(entries: &BTreeMap<String, serde_json::Value>) -> String {
    serde_json::to_string_pretty(entries).expect("metadata serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Constant, Fbm};
    use proptest::prelude::*;

    #[test]
    fn beta0_examples() {
        let e = std::f64::consts::E;
        assert!((beta0_max(1.0, 1.0, 1) - e / 8.0).abs() < 1e-15);
        assert!((beta0_max(1.0, 1.0, 2) - e / 64.0).abs() < 1e-15);
        assert!(beta0_max(2.0, 0.5, 1) < beta0_max(1.0, 0.5, 1));
    }

    #[test]
    fn c_beta0_degenerate_samples() {
        let c = estimate_c_beta0(&[0.25; 10], 0.01, 0.1, 0.5, 1, None).unwrap();
        assert!((c.value - 4.0 * 0.25f64.powf(c.kappa)).abs() < 1e-14);
        let tiny = estimate_c_beta0(&[1.3, 2.0, 5.0], 1e-14, 0.1, 0.5, 1, None).unwrap();
        assert!((tiny.value - 4.0).abs() < 1e-9);
        let f = estimate_c_beta0(&[2.0; 5], 0.01, 0.1, 0.5, 2, None).unwrap();
        assert!((f.value - 16.0 * 2f64.powf(f.kappa)).abs() < 1e-12);
    }

    #[test]
    fn kappa_window_chain() {
        let (c0, iota) = (2.0, 0.5);
        let beta = 0.5 * grr::beta_window(c0, iota);
        let k = kappa(0.99 * beta0_max(c0, iota, 1), beta, iota, 1);
        assert!(k < std::f64::consts::E * iota / (beta * c0.powf(1.0 / iota)));
        let c = estimate_c_beta0(&[1.5; 4], 0.99 * beta0_max(c0, iota, 1), beta, iota, 1, Some(c0)).unwrap();
        assert!(c.warning.is_none());
        let bad = estimate_c_beta0(&[1.5; 4], 2.5 * beta0_max(c0, iota, 1), beta, iota, 1, Some(c0)).unwrap();
        assert!(bad.warning.is_some());
    }

    #[test]
    fn paley_zygmund_examples() {
        assert_eq!(paley_zygmund(2.0, 5.0, 1.0).unwrap(), 0.0);
        assert!((paley_zygmund(2.0, 5.0, 0.0).unwrap() - 0.8).abs() < 1e-15);
        // X ≡ c: the bound is 1/4 and the probability is 1
        assert!((paley_zygmund(3.0, 9.0, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!(paley_zygmund(3.0, 8.0, 0.5).is_err());
    }

    fn small_cfg() -> TailConfig {
        let (c0, iota) = (2.0, 0.5);
        TailConfig {
            alpha: vec![0.5],
            iota,
            beta: 0.5 * grr::beta_window(c0, iota),
            beta0: 0.5 * beta0_max(c0, iota, 1),
            c0: Some(c0),
            grid: vec![65],
            n_paths: 1000,
            seed: 5,
            interval: vec![(0.0, 1.0)],
            base: vec![0.0],
            u_grid: vec![0.5, 1.0, 2.0],
            normalize: true,
        }
    }

    #[test]
    fn zero_process_has_empty_tail() {
        let curve = sup_tail_experiment(&Constant::new(0.0), &small_cfg()).unwrap();
        assert!(curve.empirical.iter().all(|&p| p == 0.0));
        assert!(curve.passes());
        let expect: Vec<f64> = curve.u_grid.iter().map(|u| 4.0 * (-curve.meta.beta0 * u * u).exp()).collect();
        for (b, e) in curve.bound.iter().zip(expect) {
            assert!((b - e).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_config_validation() {
        let mut c = small_cfg();
        c.n_paths = 10;
        assert!(sup_tail_experiment(&Constant::new(0.0), &c).is_err());
        let mut c = small_cfg();
        c.interval = vec![(0.0, 0.3)];
        assert!(sup_tail_experiment(&Constant::new(0.0), &c).is_err());
        let mut c = small_cfg();
        c.beta = 1.0;
        assert!(sup_tail_experiment(&Constant::new(0.0), &c).is_err());
    }

    #[test]
    fn fbm_tail_and_sidecar() {
        let curve = sup_tail_experiment(&Fbm::new(0.5).unwrap(), &small_cfg()).unwrap();
        assert!(curve.passes());
        let csv = curve.to_csv();
        assert!(csv.starts_with("u,empirical_prob,bound,pass\n"));
        let meta: serde_json::Value = serde_json::from_str(&curve.sidecar_json()).unwrap();
        assert_eq!(meta["model"], "fbm(0.5)");
        assert_eq!(meta["n_paths"], 1000);
    }

    #[test]
    fn tightness_of_brownian_increments() {
        let r = tightness_diagnostic(&Fbm::new(0.5).unwrap(), 0.5, 0.1, &[1, 2, 4, 8], 257, 400, 1).unwrap();
        for row in &r.rows {
            assert!((row.ratio - 3.0).abs() < 4.0 * row.ratio_se, "{row:?}");
            let want = row.delta.powf(0.2);
            assert!((row.second_moment - want).abs() < 4.0 * row.second_moment_se);
        }
        assert!(r.sup_second_moment <= 1.2);
        let z = tightness_diagnostic(&Constant::new(0.0), 0.5, 0.1, &[1, 2], 65, 10, 1).unwrap();
        assert!(z.degenerate);
        assert_eq!(z.sup_second_moment, 0.0);
    }

    proptest! {
        #[test]
        fn paley_zygmund_in_unit_interval(m in 0.0f64..10.0, extra in 0.0f64..10.0, theta in 0.0f64..=1.0) {
            let second = m * m + extra + 1e-9;
            let p = paley_zygmund(m, second, theta).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn beta0_decreases_in_c0(c in 0.1f64..10.0, f in 1.01f64..5.0, iota in 0.2f64..3.0, n in 1usize..4) {
            prop_assert!(beta0_max(c * f, iota, n) < beta0_max(c, iota, n));
        }

        #[test]
        fn curve_is_monotone(sups in proptest::collection::vec(0.0f64..5.0, 1..200), c in 1.0f64..50.0, b0 in 0.001f64..1.0) {
            let meta = TailMeta {
                model: "x".into(), seed: 0, n_paths: sups.len(), grid: vec![2], interval: vec![(0.0, 1.0)],
                base: vec![0.0], alpha: vec![0.5], iota: 0.5, beta: 0.1, beta0: b0, kappa: 1.0, c_beta0: c,
                c_beta0_std_error: 0.0, c_d: 1.0, additive: 0.0, additive_alternative: None, scale: 1.0,
                max_sup: 0.0, warning: None,
            };
            let u: Vec<f64> = (1..20).map(|k| 0.25 * k as f64).collect();
            let curve = TailCurve::build(&u, &sups, |u| u, meta);
            for w in curve.empirical.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
            for w in curve.bound.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }
    }
}
