//! Moment oracles and estimation of the hypercontractivity parameters.
//!
//! A process is hypercontractive with parameters `(C0, ι)` when every
//! increment satisfies `E|Δ|^p ≤ C0^p p^{pι} (E|Δ|²)^{p/2}` for all `p ≥ 1`.
//! The normalized moment ratio `C(p) = E|Δ|^p / (E|Δ|²)^{p/2}` is what the
//! estimators here work with.

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::models::PathModel;
use crate::report::{Record, Table};
use crate::seed::derive_seed;

/// `(C0, ι)` of the moment growth bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    pub c0: f64,
    pub iota: f64,
}

impl HyperParams {
    pub fn new(c0: f64, iota: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(invalid(format!("C0 must be positive, got {c0}")));
        }
        // ι = 0 (bounded increments) makes exp(β x^{1/ι}) degenerate.
        if !(iota > 0.0 && iota.is_finite()) {
            return Err(invalid(format!("iota must be positive, got {iota}")));
        }
        Ok(Self { c0, iota })
    }

    /// `C0^p p^{pι}`.
    pub fn moment_bound(&self, p: f64) -> f64 {
        (p * (self.c0.ln() + self.iota * p.ln())).exp()
    }
}

/// Fitted parameters with least-squares diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperEstimate {
    pub params: HyperParams,
    pub p_grid: Vec<f64>,
    pub residual_rms: f64,
    pub r_squared: f64,
}

/// `E|Z|^p = 2^{p/2} Γ((p+1)/2) / √π` for a standard normal `Z`.
pub fn gaussian_abs_moment(p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("moment order must be >= 1, got {p}")));
    }
    let ln = 0.5 * p * std::f64::consts::LN_2 + ln_gamma(0.5 * (p + 1.0))
        - 0.5 * std::f64::consts::PI.ln();
    Ok(ln.exp())
}

/// Largest factor `((r-1)/(q-1))^{p/2}` by which the `L^r` norm can exceed the
/// `L^q` norm on the Wiener chaos of order `p`.
pub fn chaos_moment_comparison(q: f64, r: f64, chaos_order: u32) -> Result<f64> {
    if !(q > 1.0) {
        return Err(invalid(format!("q must exceed 1, got {q}")));
    }
    if r < q {
        return Err(invalid(format!("need q <= r, got q={q}, r={r}")));
    }
    if chaos_order == 0 {
        return Err(invalid("chaos order must be >= 1"));
    }
    Ok(((r - 1.0) / (q - 1.0)).powf(0.5 * chaos_order as f64))
}

fn abs_power_mean(samples: &[f64], p: f64) -> f64 {
    let n = samples.len() as f64;
    if p == 2.0 {
        samples.iter().map(|x| x * x).sum::<f64>() / n
    } else {
        samples.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n
    }
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.len() < 100 {
        return Err(invalid(format!(
            "moment ratios need at least 100 samples, got {}",
            samples.len()
        )));
    }
    let first = samples[0];
    if samples.iter().all(|&x| x == first) {
        return Err(Error::Degenerate("all increment samples are equal".into()));
    }
    Ok(())
}

/// Plug-in estimate of `C(p) = E|Δ|^p / (E|Δ|²)^{p/2}`.
pub fn empirical_moment_ratio(samples: &[f64], p: f64) -> Result<f64> {
    check_samples(samples)?;
    if !(p >= 1.0) {
        return Err(invalid(format!("moment order must be >= 1, got {p}")));
    }
    let m2 = abs_power_mean(samples, 2.0);
    if !(m2 > 0.0) {
        return Err(Error::Degenerate("second moment estimate is zero".into()));
    }
    Ok(abs_power_mean(samples, p) / m2.powf(0.5 * p))
}

/// Moment ratio with its delta-method Monte Carlo standard error.
pub fn moment_ratio_with_se(samples: &[f64], p: f64) -> Result<(f64, f64)> {
    let ratio = empirical_moment_ratio(samples, p)?;
    let n = samples.len() as f64;
    let a = abs_power_mean(samples, p);
    let b = abs_power_mean(samples, 2.0);
    let (mut vaa, mut vbb, mut vab) = (0.0, 0.0, 0.0);
    for x in samples {
        let da = x.abs().powf(p) - a;
        let db = x * x - b;
        vaa += da * da;
        vbb += db * db;
        vab += da * db;
    }
    let (vaa, vbb, vab) = (vaa / (n - 1.0), vbb / (n - 1.0), vab / (n - 1.0));
    let ga = b.powf(-0.5 * p);
    let gb = -0.5 * p * a * b.powf(-0.5 * p - 1.0);
    let var = (ga * ga * vaa + gb * gb * vbb + 2.0 * ga * gb * vab) / n;
    Ok((ratio, var.max(0.0).sqrt()))
}

/// Least-squares fit of `ln C(p) = p ln C0 + ι p ln p` (no free intercept).
pub fn fit_hyper_params(ratios: &[(f64, f64)]) -> Result<HyperEstimate> {
    let mut pts = ratios.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    if pts.len() < 4 {
        return Err(invalid(format!(
            "need at least 4 distinct moment orders, got {}",
            pts.len()
        )));
    }
    if let Some(&(p, r)) = pts.iter().find(|(p, r)| !(*p >= 1.0) || !(*r > 0.0)) {
        return Err(invalid(format!("invalid moment ratio C({p}) = {r}")));
    }
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(p, r) in &pts {
        let x2 = p * p.ln();
        let y = r.ln();
        s11 += p * p;
        s12 += p * x2;
        s22 += x2 * x2;
        t1 += p * y;
        t2 += x2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-12 * s11 * s22 {
        return Err(Error::Degenerate("singular design in moment fit".into()));
    }
    let a = (s22 * t1 - s12 * t2) / det;
    let iota = (s11 * t2 - s12 * t1) / det;

    let ys: Vec<f64> = pts.iter().map(|(_, r)| r.ln()).collect();
    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let (mut ssr, mut sst) = (0.0, 0.0);
    for (&(p, _), y) in pts.iter().zip(&ys) {
        let e = y - (a * p + iota * p * p.ln());
        ssr += e * e;
        sst += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(HyperEstimate {
        params: HyperParams {
            c0: a.exp(),
            iota,
        },
        p_grid: pts.iter().map(|(p, _)| *p).collect(),
        residual_rms: (ssr / pts.len() as f64).sqrt(),
        r_squared,
    })
}

/// Parameters of the product of two independent hypercontractive processes
/// started at zero: `C0 = 2^{ιX+ιY} C0X C0Y`, `ι = ιX + ιY`.
pub fn combine_product_params(x: HyperParams, y: HyperParams) -> HyperParams {
    let iota = x.iota + y.iota;
    HyperParams {
        c0: 2f64.powf(iota) * x.c0 * y.c0,
        iota,
    }
}

pub const DEFAULT_P_GRID: [f64; 7] = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];

/// Increments `X_{t+lag} - X_t` of independent paths, pooled in path order.
pub fn pooled_increments(
    model: &dyn PathModel,
    n_points: usize,
    n_paths: usize,
    lag: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if lag == 0 || lag >= n_points {
        return Err(invalid(format!("lag {lag} out of range for {n_points} points")));
    }
    let chunks: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let path = model.sample(n_points, derive_seed(seed, i as u64))?;
            let v = path.values();
            Ok((lag..v.len()).map(|j| v[j] - v[j - lag]).collect())
        })
        .collect::<Result<_>>()?;
    Ok(chunks.concat())
}

/// One row of a moment report.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub p: f64,
    /// Ratio at lag one grid step.
    pub ratio: f64,
    pub std_error: f64,
    /// Largest ratio over the dyadic lags.
    pub max_lag_ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    pub lags: Vec<usize>,
    /// `lag_ratios[l][k]`: ratio for `lags[l]` and `p_grid[k]`.
    pub lag_ratios: Vec<Vec<f64>>,
    pub fit: HyperEstimate,
    pub reference: HyperParams,
    pub n_samples: usize,
}

impl MomentReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut t = Table::new(&["p", "ratio", "bound", "pass"]);
        for r in &self.rows {
            t.row(vec![r.p.into(), r.ratio.into(), r.bound.into(), r.pass.into()]);
        }
        t.render().to_string()
    }

    pub fn lags_csv(&self) -> String {
        let mut t = Table::new(&["p", "lag", "ratio"]);
        for (k, row) in self.rows.iter().enumerate() {
            for (l, lag) in self.lags.iter().enumerate() {
                t.row(vec![row.p.into(), (*lag).into(), self.lag_ratios[l][k].into()]);
            }
        }
        t.render().to_string()
    }

    pub fn fit_record(&self) -> Record {
        let mut r = Record::new();
        r.num("C0", self.fit.params.c0)
            .num("iota", self.fit.params.iota)
            .num("residual_rms", self.fit.residual_rms)
            .num("r_squared", self.fit.r_squared)
            .num("reference_C0", self.reference.c0)
            .num("reference_iota", self.reference.iota)
            .push("n_samples", self.n_samples.to_string())
            .push("pass", self.passes().to_string());
        r
    }
}

/// Estimates `C(p)` on simulated increments, fits `(C0, ι)`, and checks each
/// ratio against the bound implied by `reference`.
pub fn moment_report(
    model: &dyn PathModel,
    p_grid: &[f64],
    n_points: usize,
    n_paths: usize,
    seed: u64,
    reference: HyperParams,
) -> Result<MomentReport> {
    let mut lags = vec![1usize];
    while lags.last().unwrap() * 2 < n_points - 1 && lags.len() < 5 {
        let next = lags.last().unwrap() * 2;
        lags.push(next);
    }
    let mut lag_ratios = Vec::with_capacity(lags.len());
    let mut rows = Vec::with_capacity(p_grid.len());
    let mut n_samples = 0;
    for (l, &lag) in lags.iter().enumerate() {
        let inc = pooled_increments(model, n_points, n_paths, lag, seed)?;
        let mut ratios = Vec::with_capacity(p_grid.len());
        for &p in p_grid {
            if l == 0 {
                let (ratio, se) = moment_ratio_with_se(&inc, p)?;
                let bound = reference.moment_bound(p);
                rows.push(MomentRow {
                    p,
                    ratio,
                    std_error: se,
                    max_lag_ratio: ratio,
                    bound,
                    pass: ratio <= bound,
                });
                ratios.push(ratio);
            } else {
                ratios.push(empirical_moment_ratio(&inc, p)?);
            }
        }
        if l == 0 {
            n_samples = inc.len();
        }
        lag_ratios.push(ratios);
    }
    for (k, row) in rows.iter_mut().enumerate() {
        row.max_lag_ratio = lag_ratios.iter().map(|r| r[k]).fold(f64::MIN, f64::max);
    }
    let fit = fit_hyper_params(&rows.iter().map(|r| (r.p, r.ratio)).collect::<Vec<_>>())?;
    Ok(MomentReport {
        rows,
        lags,
        lag_ratios,
        fit,
        reference,
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gaussian_moments_known_values() {
        assert!((gaussian_abs_moment(2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gaussian_abs_moment(4.0).unwrap() - 3.0).abs() < 1e-13);
        let m1 = (2.0 / std::f64::consts::PI).sqrt();
        assert!((gaussian_abs_moment(1.0).unwrap() - m1).abs() < 1e-14);
        // (2k-1)!! for even orders
        assert!((gaussian_abs_moment(8.0).unwrap() - 105.0).abs() / 105.0 < 1e-12);
        assert!(gaussian_abs_moment(0.5).is_err());
    }

    #[test]
    fn chaos_comparison_values() {
        assert_eq!(chaos_moment_comparison(3.0, 3.0, 4).unwrap(), 1.0);
        assert!((chaos_moment_comparison(2.0, 4.0, 2).unwrap() - 3.0).abs() < 1e-14);
        assert!((chaos_moment_comparison(2.0, 4.0, 1).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        assert!(chaos_moment_comparison(1.0, 4.0, 1).is_err());
        assert!(chaos_moment_comparison(0.5, 4.0, 1).is_err());
    }

    #[test]
    fn rademacher_ratios_are_one() {
        let s: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((empirical_moment_ratio(&s, 4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((empirical_moment_ratio(&s, 7.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_small_samples_rejected() {
        assert!(empirical_moment_ratio(&[0.3; 500], 3.0).is_err());
        assert!(empirical_moment_ratio(&[0.1, -0.2, 0.3], 3.0).is_err());
    }

    #[test]
    fn exact_model_recovery() {
        let pts: Vec<(f64, f64)> = [2.0, 3.0, 4.0, 5.0, 6.0]
            .iter()
            .map(|&p: &f64| (p, 2f64.powf(p) * p.powf(0.5 * p)))
            .collect();
        let est = fit_hyper_params(&pts).unwrap();
        assert!((est.params.c0 - 2.0).abs() < 1e-9);
        assert!((est.params.iota - 0.5).abs() < 1e-9);
        assert!((est.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_analytic_fit_gives_half() {
        let pts: Vec<(f64, f64)> = (2..=10)
            .map(|p| (p as f64, gaussian_abs_moment(p as f64).unwrap()))
            .collect();
        let iota = fit_hyper_params(&pts).unwrap().params.iota;
        assert!((0.4..=0.6).contains(&iota), "iota = {iota}");
    }

    #[test]
    fn fit_needs_four_orders() {
        assert!(fit_hyper_params(&[(2.0, 1.0), (3.0, 1.5), (4.0, 3.0)]).is_err());
        assert!(fit_hyper_params(&[(2.0, 1.0), (2.0, 1.0), (3.0, 1.5), (4.0, 3.0)]).is_err());
        assert!(fit_hyper_params(&[(2.0, 1.0), (3.0, -1.5), (4.0, 3.0), (5.0, 9.0)]).is_err());
    }

    #[test]
    fn product_combination() {
        let g = HyperParams::new(1.0, 0.5).unwrap();
        let z = combine_product_params(g, g);
        assert!((z.c0 - 2.0).abs() < 1e-15 && (z.iota - 1.0).abs() < 1e-15);
        let z = combine_product_params(
            HyperParams::new(2.0, 1.0).unwrap(),
            HyperParams::new(3.0, 0.5).unwrap(),
        );
        assert!((z.c0 - 2f64.powf(1.5) * 6.0).abs() < 1e-12);
        assert_eq!(z.iota, 1.5);
    }

    #[test]
    fn gaussian_dominated_with_c0_two() {
        let h = HyperParams::new(2.0, 0.5).unwrap();
        for k in 0..=190 {
            let p = 1.0 + 0.1 * k as f64;
            assert!(gaussian_abs_moment(p).unwrap() <= h.moment_bound(p));
        }
    }

    proptest! {
        #[test]
        fn second_order_ratio_is_one(v in proptest::collection::vec(-5.0f64..5.0, 100..300)) {
            prop_assume!(v.iter().any(|&x| x != v[0]));
            prop_assert_eq!(empirical_moment_ratio(&v, 2.0).unwrap(), 1.0);
        }

        #[test]
        fn product_iota_adds(a in 0.01f64..3.0, b in 0.01f64..3.0, c in 0.1f64..5.0, d in 0.1f64..5.0) {
            let z = combine_product_params(HyperParams::new(c, a).unwrap(), HyperParams::new(d, b).unwrap());
            prop_assert!((z.iota - (a + b)).abs() < 1e-14);
        }

        #[test]
        fn synthetic_fit_recovers(c0 in 0.2f64..5.0, iota in 0.1f64..3.0) {
            let pts: Vec<(f64, f64)> = DEFAULT_P_GRID.iter()
                .map(|&p| (p, HyperParams { c0, iota }.moment_bound(p)))
                .collect();
            let est = fit_hyper_params(&pts).unwrap();
            prop_assert!((est.params.c0 - c0).abs() / c0 < 1e-9);
            prop_assert!((est.params.iota - iota).abs() < 1e-9);
            prop_assert!((est.r_squared - 1.0).abs() < 1e-9);
        }
    }
}
