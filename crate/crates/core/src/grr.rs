//! One-parameter Garsia-Rodemich-Rumsey bounds with `Ψ(x) = exp(β x^{1/ι})`
//! and `ρ(u) = u^α`.
//!
//! For a path `X` the random variable
//! `B = ∫∫ Ψ(|X_t - X_s| / ρ(|t-s|)) ds dt` controls the modulus of continuity
//! `|X_t - X_s| ≤ 8 ∫_0^{|t-s|} β^{-ι} (log(4B/u²))^ι dρ(u)`, which in turn
//! gives the Hölder bound `|X_t - X_s| ≤ (C(ω) + C_d (log 1/δ)^ι) δ^α`.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::path::SamplePath;
use crate::quad::LogQuadrature;
use crate::report::Record;

/// Floor applied to `B` before it enters a logarithm.
pub const B_FLOOR: f64 = 0.25 + 1e-12;

/// Largest argument of `exp` that stays finite.
pub(crate) const MAX_EXPONENT: f64 = 709.0;

/// Upper end of the `β` window in which `B` has finite moments: `eι / C0^{1/ι}`.
pub fn beta_window(c0: f64, iota: f64) -> f64 {
    std::f64::consts::E * iota / c0.powf(1.0 / iota)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrrConfig {
    pub beta: f64,
    pub iota: f64,
    pub alpha: f64,
    pub quadrature_nodes: usize,
}

impl GrrConfig {
    pub fn new(beta: f64, iota: f64, alpha: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!("beta must be positive, got {beta}")));
        }
        if !(iota > 0.0 && iota.is_finite()) {
            return Err(invalid(format!("iota must be positive, got {iota}")));
        }
        check_alpha(alpha)?;
        Ok(Self {
            beta,
            iota,
            alpha,
            quadrature_nodes: crate::quad::DEFAULT_NODES,
        })
    }

    /// Also requires `β < eι / C0^{1/ι}`.
    pub fn with_c0(beta: f64, iota: f64, alpha: f64, c0: f64) -> Result<Self> {
        let cfg = Self::new(beta, iota, alpha)?;
        check_beta_window(beta, iota, c0)?;
        Ok(cfg)
    }

    pub fn quadrature(&self) -> LogQuadrature {
        LogQuadrature::new(self.quadrature_nodes)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha must lie in (0,1], got {alpha}")));
    }
    Ok(())
}

pub(crate) fn check_beta_window(beta: f64, iota: f64, c0: f64) -> Result<()> {
    if !(c0 > 0.0) {
        return Err(invalid(format!("C0 must be positive, got {c0}")));
    }
    let max = beta_window(c0, iota);
    if beta >= max {
        return Err(invalid(format!(
            "beta = {beta} is outside the finite-moment window (0, {max}) for C0 = {c0}, iota = {iota}"
        )));
    }
    Ok(())
}

/// `Ψ(x) = exp(β x^{1/ι})`.
pub fn psi(x: f64, beta: f64, iota: f64) -> f64 {
    (beta * x.abs().powf(1.0 / iota)).exp()
}

/// `Ψ^{-1}(y) = (log(y) / β)^ι` for `y ≥ 1`.
pub fn psi_inv(y: f64, beta: f64, iota: f64) -> Result<f64> {
    if !(y >= 1.0) {
        return Err(invalid(format!("psi_inv needs y >= 1, got {y}")));
    }
    Ok((y.ln() / beta).powf(iota))
}

/// `B` split into its diagonal-band and off-diagonal parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BDetail {
    pub b: f64,
    /// Contribution of the cells with `|t-s|` below one grid step (each counted as `Ψ(0) = 1`).
    pub diagonal: f64,
    pub cells: usize,
}

/// `B` by the midpoint rule on the `N-1` grid cells; see [`compute_b_detailed`].
pub fn compute_b(path: &SamplePath, alpha: f64, beta: f64, iota: f64) -> Result<f64> {
    compute_b_detailed(path, alpha, beta, iota).map(|d| d.b)
}

/// Midpoint rule: cell `a` has value `(x_a + x_{a+1})/2` at `(a+½)h`, so the
/// lag between cells `a` and `b` is `|a-b| h`. Diagonal cells contribute 1.
pub fn compute_b_detailed(path: &SamplePath, alpha: f64, beta: f64, iota: f64) -> Result<BDetail> {
    check_alpha(alpha)?;
    if !(beta > 0.0 && iota > 0.0) {
        return Err(invalid("beta and iota must be positive"));
    }
    let x = path.values();
    let m = x.len() - 1;
    let h = path.step();
    let mid: Vec<f64> = x.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let inv_iota = 1.0 / iota;
    // ln ρ(k h) for every lag k
    let ln_rho: Vec<f64> = (0..m).map(|k| alpha * (k as f64 * h).ln()).collect();

    let rows: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut s = 0.0;
            for b in (a + 1)..m {
                let d = (mid[b] - mid[a]).abs();
                if d == 0.0 {
                    s += 1.0;
                    continue;
                }
                let e = beta * (inv_iota * (d.ln() - ln_rho[b - a])).exp();
                if e > MAX_EXPONENT {
                    return Err(Error::Overflow {
                        what: "B integrand",
                        location: format!(
                            "s={}, t={} (beta too large for this path)",
                            (a as f64 + 0.5) * h,
                            (b as f64 + 0.5) * h
                        ),
                    });
                }
                s += e.exp();
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let off: f64 = rows.iter().sum();
    let cells = m * m;
    let total = 2.0 * off + m as f64;
    Ok(BDetail {
        b: total / cells as f64,
        diagonal: m as f64 / cells as f64,
        cells,
    })
}

/// `8 ∫_0^δ β^{-ι} (log(4B/u²))^ι α u^{α-1} du`.
///
/// With `v^α = e^{-w}` after `u = δv` this is
/// `8 β^{-ι} δ^α ∫_0^∞ (log(4B/δ²) + 2w/α)^ι e^{-w} dw`.
pub fn modulus_bound(
    delta: f64,
    b: f64,
    beta: f64,
    iota: f64,
    alpha: f64,
    quad: &LogQuadrature,
) -> Result<f64> {
    crate::fields::field_modulus_bound(&[delta], b, beta, iota, &[alpha], quad)
}

/// `∫_0^1 (log 1/v)^ι v^{α-1} dv = Γ(ι+1)/α^{ι+1}`, evaluated by quadrature.
pub fn v_integral(iota: f64, alpha: f64, quad: &LogQuadrature) -> Result<f64> {
    crate::fields::field_v_integral(iota, &[alpha], quad)
}

pub(crate) fn three_factor(iota: f64) -> f64 {
    3f64.powf((iota - 1.0).max(0.0))
}

/// `(C(ω), C_d)` of the Hölder bound.
pub fn holder_constants(
    b: f64,
    beta: f64,
    iota: f64,
    alpha: f64,
    quad: &LogQuadrature,
) -> Result<(f64, f64)> {
    crate::fields::field_holder_constants(b, beta, iota, &[alpha], quad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrrResult {
    pub beta: f64,
    pub iota: f64,
    pub alpha: f64,
    pub b: f64,
    pub diagonal: f64,
    pub c_omega: f64,
    pub c_d: f64,
    /// `(δ, modulus_bound(δ))` at `δ = 2^{-k}`, `k = 0..=10`.
    pub modulus_samples: Vec<(f64, f64)>,
}

impl GrrResult {
    pub fn compute(path: &SamplePath, cfg: &GrrConfig) -> Result<Self> {
        let detail = compute_b_detailed(path, cfg.alpha, cfg.beta, cfg.iota)?;
        Self::from_b(detail.b, detail.diagonal, cfg)
    }

    pub fn from_b(b: f64, diagonal: f64, cfg: &GrrConfig) -> Result<Self> {
        let q = cfg.quadrature();
        let (c_omega, c_d) = holder_constants(b, cfg.beta, cfg.iota, cfg.alpha, &q)?;
        let modulus_samples = (0..=10)
            .map(|k| {
                let d = 0.5f64.powi(k);
                modulus_bound(d, b, cfg.beta, cfg.iota, cfg.alpha, &q).map(|v| (d, v))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            beta: cfg.beta,
            iota: cfg.iota,
            alpha: cfg.alpha,
            b,
            diagonal,
            c_omega,
            c_d,
            modulus_samples,
        })
    }

    /// `(C(ω) + C_d (log 1/δ)^ι) δ^α`.
    pub fn holder_bound(&self, delta: f64) -> f64 {
        (self.c_omega + self.c_d * (-delta.ln()).max(0.0).powf(self.iota)) * delta.powf(self.alpha)
    }

    pub fn record(&self) -> Record {
        let mut r = Record::new();
        r.num("B", self.b)
            .num("C_omega", self.c_omega)
            .num("C_d", self.c_d)
            .num("beta", self.beta)
            .num("iota", self.iota)
            .num("alpha", self.alpha);
        r
    }
}

/// Outcome of checking a bound at every grid pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub pairs_checked: usize,
    pub violations: usize,
    /// Smallest `bound - |increment|` over all pairs.
    pub worst_margin: f64,
    /// Largest `|increment| / bound`.
    pub max_ratio: f64,
    /// Grid coordinates of the pair attaining `max_ratio`.
    pub worst_pair: (f64, f64),
}

impl ViolationReport {
    pub(crate) fn new() -> Self {
        Self {
            pairs_checked: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            max_ratio: 0.0,
            worst_pair: (0.0, 0.0),
        }
    }

    pub(crate) fn observe(&mut self, lhs: f64, bound: f64, pair: (f64, f64)) {
        self.pairs_checked += 1;
        if lhs > bound {
            self.violations += 1;
        }
        self.worst_margin = self.worst_margin.min(bound - lhs);
        let ratio = if bound > 0.0 {
            lhs / bound
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
            self.worst_pair = pair;
        }
    }

    pub(crate) fn merge(&mut self, other: &Self) {
        self.pairs_checked += other.pairs_checked;
        self.violations += other.violations;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
        if other.max_ratio > self.max_ratio {
            self.max_ratio = other.max_ratio;
            self.worst_pair = other.worst_pair;
        }
    }

    pub fn passes(&self) -> bool {
        self.violations == 0
    }

    pub fn record(&self) -> Record {
        let mut r = Record::new();
        r.push("pairs_checked", self.pairs_checked.to_string())
            .push("violations", self.violations.to_string())
            .num("worst_margin", self.worst_margin)
            .num("max_ratio", self.max_ratio)
            .num("worst_s", self.worst_pair.0)
            .num("worst_t", self.worst_pair.1);
        r
    }
}

fn check_by_lag(path: &SamplePath, bound_at_lag: &[f64]) -> ViolationReport {
    let x = path.values();
    let n = x.len();
    let g = path.grid();
    let parts: Vec<ViolationReport> = (1..n - 1)
        .into_par_iter()
        .map(|k| {
            let mut rep = ViolationReport::new();
            for i in 0..n - k {
                rep.observe((x[i + k] - x[i]).abs(), bound_at_lag[k], (g[i], g[i + k]));
            }
            rep
        })
        .collect();
    let mut total = ViolationReport::new();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Checks `|X_t - X_s| ≤ (C(ω) + C_d (log 1/δ)^ι) δ^α` at every grid pair with `δ < 1`.
pub fn verify_modulus(path: &SamplePath, grr: &GrrResult) -> ViolationReport {
    let h = path.step();
    let bounds: Vec<f64> = (0..path.len())
        .map(|k| grr.holder_bound(k as f64 * h))
        .collect();
    check_by_lag(path, &bounds)
}

/// Checks the integral form `|X_t - X_s| ≤ modulus_bound(δ)` at every grid pair with `δ < 1`.
pub fn verify_integral_modulus(path: &SamplePath, grr: &GrrResult) -> Result<ViolationReport> {
    let h = path.step();
    let q = LogQuadrature::default();
    let mut bounds = vec![0.0; path.len()];
    for (k, b) in bounds.iter_mut().enumerate().skip(1) {
        *b = modulus_bound(k as f64 * h, grr.b, grr.beta, grr.iota, grr.alpha, &q)?;
    }
    Ok(check_by_lag(path, &bounds))
}

/// `C_{γ,q} = 8·4^{1/q}(γ + 1/q)/(γ - 1/q)`, the constant in
/// `|f(t) - f(s)| ≤ C_{γ,q} |t-s|^{γ-1/q} (∫∫ |f(x)-f(y)|^q / |x-y|^{γq+1})^{1/q}`.
pub fn sobolev_constant(gamma: f64, q: f64) -> Result<f64> {
    if !(gamma * q > 1.0) {
        return Err(invalid(format!("need gamma*q > 1, got gamma={gamma}, q={q}")));
    }
    let r = 1.0 / q;
    Ok(8.0 * 4f64.powf(r) * (gamma + r) / (gamma - r))
}

/// `ln ∫∫ |f(x)-f(y)|^q / |x-y|^p` by the cell-midpoint rule (diagonal cells contribute 0).
/// Returns `-∞` for a constant path.
pub fn ln_sobolev_integral(path: &SamplePath, q: f64, p: f64) -> f64 {
    let x = path.values();
    let m = x.len() - 1;
    let h = path.step();
    let mid: Vec<f64> = x.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let ln_lag: Vec<f64> = (0..m).map(|k| (k as f64 * h).ln()).collect();
    let term = |a: usize, b: usize| -> f64 {
        let d = (mid[b] - mid[a]).abs();
        if d == 0.0 {
            f64::NEG_INFINITY
        } else {
            q * d.ln() - p * ln_lag[b - a]
        }
    };
    let top = (0..m)
        .into_par_iter()
        .map(|a| ((a + 1)..m).map(|b| term(a, b)).fold(f64::NEG_INFINITY, f64::max))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let rows: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|a| ((a + 1)..m).map(|b| (term(a, b) - top).exp()).sum())
        .collect();
    let s: f64 = rows.iter().sum();
    top + (2.0 * s).ln() - 2.0 * (m as f64).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevReport {
    pub alpha: f64,
    pub epsilon: f64,
    /// `C_{γ,q}` with `q = 2/ε`, `γ = α - ε/2`.
    pub constant: f64,
    /// `C_ε(ω)`.
    pub c_eps: f64,
    pub check: ViolationReport,
}

/// `C_ε(ω) = C_{γ,q} (∫∫ |X_u - X_v|^{2/ε} / |u-v|^{2α/ε})^{ε/2}` and the
/// pathwise check `|X_t - X_s| ≤ C_ε(ω) |t-s|^{α-ε}`.
pub fn sobolev_bound(path: &SamplePath, alpha: f64, epsilon: f64) -> Result<SobolevReport> {
    check_alpha(alpha)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid(format!("epsilon must lie in (0,1], got {epsilon}")));
    }
    let q = 2.0 / epsilon;
    let gamma = alpha - 0.5 * epsilon;
    let constant = sobolev_constant(gamma, q)?;
    let ln_i = ln_sobolev_integral(path, q, 2.0 * alpha / epsilon);
    let c_eps = constant * (ln_i / q).exp();
    if !c_eps.is_finite() {
        return Err(Error::Overflow {
            what: "Sobolev constant",
            location: format!("alpha={alpha}, epsilon={epsilon}"),
        });
    }
    let h = path.step();
    let bounds: Vec<f64> = (0..path.len())
        .map(|k| c_eps * (k as f64 * h).powf(alpha - epsilon))
        .collect();
    Ok(SobolevReport {
        alpha,
        epsilon,
        constant,
        c_eps,
        check: check_by_lag(path, &bounds),
    })
}

/// Max of `|X_t - X_s| / (δ^α (log 1/δ)^ι)` over pairs at most 8 grid steps apart.
pub fn limsup_ratio(path: &SamplePath, alpha: f64, iota: f64) -> Result<f64> {
    if path.len() < 1024 {
        return Err(invalid(format!(
            "limsup ratio needs at least 1024 grid points, got {}",
            path.len()
        )));
    }
    let x = path.values();
    let h = path.step();
    let mut best: f64 = 0.0;
    for k in 1..=8 {
        let d = k as f64 * h;
        let denom = d.powf(alpha) * (-d.ln()).powf(iota);
        for i in 0..x.len() - k {
            best = best.max((x[i + k] - x[i]).abs() / denom);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Fbm, PathModel};
    use proptest::prelude::*;

    fn q() -> LogQuadrature {
        LogQuadrature::default()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(0.0, 0.7, 0.5), 1.0);
        assert!((psi(3.0, 1.0, 1.0) - 3f64.exp()).abs() < 1e-12);
        assert!(psi_inv(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn b_of_linear_path_with_unit_exponent() {
        let p = SamplePath::from_fn(2049, |t| t).unwrap();
        for beta in [0.1, 0.5, 1.0] {
            let b = compute_b(&p, 1.0, beta, 0.7).unwrap();
            let want = f64::exp(beta);
            assert!((b - want).abs() / want < 1e-3, "beta={beta}: {b}");
        }
    }

    #[test]
    fn b_of_constant_path_is_one() {
        let p = SamplePath::from_fn(64, |_| 0.0).unwrap();
        assert_eq!(compute_b(&p, 0.5, 0.3, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn b_at_least_one_for_fbm() {
        let p = Fbm::new(0.5).unwrap().sample(257, 3).unwrap();
        let b = compute_b(&p, 0.4, 0.05, 0.5).unwrap();
        assert!(b.is_finite() && b >= 1.0);
    }

    #[test]
    fn b_overflow_names_the_pair() {
        let p = SamplePath::from_fn(32, |t| 1e6 * t * t).unwrap();
        let err = compute_b(&p, 1.0, 1.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
        assert!(err.to_string().contains("s="));
    }

    #[test]
    fn modulus_closed_form() {
        let v = modulus_bound(1.0, 0.25, 1.0, 1.0, 1.0, &q()).unwrap();
        assert!((v - 16.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn modulus_vanishes_monotonically() {
        let first = modulus_bound(0.5, 1.3, 0.2, 0.5, 0.5, &q()).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..=10 {
            let v = modulus_bound(0.5f64.powi(k), 1.3, 0.2, 0.5, 0.5, &q()).unwrap();
            assert!(v < last && v > 0.0);
            last = v;
        }
        assert!(last < first / 5.0);
        assert!(modulus_bound(1e-14, 1.3, 0.2, 0.5, 0.5, &q()).unwrap() < 1e-4);
    }

    #[test]
    fn v_integral_closed_forms() {
        assert!((v_integral(1.0, 1.0, &q()).unwrap() - 1.0).abs() < 1e-10);
        assert!((v_integral(1.0, 0.5, &q()).unwrap() - 4.0).abs() < 1e-9);
        assert!((v_integral(2.0, 0.5, &q()).unwrap() - 16.0).abs() < 1e-8);
    }

    #[test]
    fn c_omega_vanishes_for_small_b() {
        let (c, d) = holder_constants(0.25, 0.3, 0.5, 0.5, &q()).unwrap();
        assert_eq!(c, 0.0);
        assert!(d > 0.0);
        let (c, _) = holder_constants(0.1, 0.3, 2.0, 0.5, &q()).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn config_window() {
        let w = beta_window(2.0, 0.5);
        assert!(GrrConfig::with_c0(0.5 * w, 0.5, 0.5, 2.0).is_ok());
        assert!(GrrConfig::with_c0(w, 0.5, 0.5, 2.0).is_err());
        assert!(GrrConfig::new(0.1, 0.5, 1.5).is_err());
        assert!(GrrConfig::new(0.1, 0.0, 0.5).is_err());
    }

    #[test]
    fn constant_path_has_no_violations() {
        let p = SamplePath::from_fn(128, |_| 2.0).unwrap();
        let cfg = GrrConfig::new(0.17, 0.5, 0.5).unwrap();
        let r = GrrResult::compute(&p, &cfg).unwrap();
        assert_eq!(r.b, 1.0);
        let v = verify_modulus(&p, &r);
        assert_eq!(v.violations, 0);
        assert_eq!(v.max_ratio, 0.0);
    }

    #[test]
    fn record_keys() {
        let cfg = GrrConfig::new(0.17, 0.5, 0.5).unwrap();
        let r = GrrResult::from_b(1.5, 0.0, &cfg).unwrap();
        let rec = r.record();
        let keys: Vec<&str> = rec.entries().iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["B", "C_omega", "C_d", "beta", "iota", "alpha"]);
    }

    #[test]
    fn sobolev_on_linear_path() {
        let p = SamplePath::from_fn(257, |t| t).unwrap();
        let r = sobolev_bound(&p, 1.0, 0.5).unwrap();
        assert!(r.c_eps.is_finite() && r.c_eps > 0.0);
        assert_eq!(r.check.violations, 0);
        assert!(sobolev_bound(&p, 0.2, 0.5).is_err());
    }

    #[test]
    fn limsup_examples() {
        let c = SamplePath::from_fn(1025, |_| 1.0).unwrap();
        assert_eq!(limsup_ratio(&c, 0.5, 0.5).unwrap(), 0.0);
        let coarse = limsup_ratio(&SamplePath::from_fn(1025, |t| t).unwrap(), 1.0, 1.0).unwrap();
        let fine = limsup_ratio(&SamplePath::from_fn(8193, |t| t).unwrap(), 1.0, 1.0).unwrap();
        assert!(fine < coarse);
        // largest ratio at the widest lag, 8 steps of 1/1024
        assert!((coarse - 1.0 / f64::ln(128.0)).abs() < 1e-12);
        assert!(limsup_ratio(&SamplePath::from_fn(100, |t| t).unwrap(), 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn psi_inverse_pair(z in 0.01f64..50.0, beta in 0.05f64..3.0, iota in 0.2f64..3.0) {
            // x ranges over (0, (50/β)^ι]; below z = 0.01 the logarithm of y ≈ 1 loses digits
            let x = (z / beta).powf(iota);
            let back = psi_inv(psi(x, beta, iota), beta, iota).unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * x);
        }

        #[test]
        fn psi_of_inverse(ln_y in 0.0f64..50.0, beta in 0.05f64..3.0, iota in 0.2f64..3.0) {
            let y = ln_y.exp();
            let back = psi(psi_inv(y, beta, iota).unwrap(), beta, iota);
            prop_assert!((back - y).abs() <= 1e-12 * y);
        }

        #[test]
        fn modulus_increases_with_b(b in 0.3f64..50.0, d in 0.01f64..1.0, iota in 0.2f64..2.5, alpha in 0.1f64..1.0) {
            let lo = modulus_bound(d, b, 0.3, iota, alpha, &q()).unwrap();
            let hi = modulus_bound(d, 2.0 * b, 0.3, iota, alpha, &q()).unwrap();
            prop_assert!(hi > lo);
        }
    }
}
