//! Multiparameter bounds built on the rectangular increment
//! `□ⁿ_t f(s) = Π_k (I - V_{k,t}) f(s)`, where `V_{k,t}` replaces the `k`-th
//! coordinate of the argument by `t_k`.
//!
//! Everything here works for any number of axes; the one-parameter engine in
//! [`crate::grr`] is the case `n = 1`.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grr::{check_alpha, three_factor, ViolationReport, MAX_EXPONENT};
use crate::models::FieldModel;
use crate::path::SampleField;
use crate::quad::LogQuadrature;
use crate::report::Record;
use crate::seed::derive_seed;

/// Corner-sum form: `Σ_S (-1)^{|S|} f(x with x_k ← y_k for k ∈ S)`.
pub fn box_increment_fn(f: &dyn Fn(&[f64]) -> f64, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut corner = x.to_vec();
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        for k in 0..n {
            corner[k] = if mask >> k & 1 == 1 { y[k] } else { x[k] };
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * f(&corner);
    }
    total
}

/// `V_{k,y} x`.
pub fn substitute(x: &[f64], k: usize, y: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v[k] = y[k];
    v
}

/// Operator form: applies `(I - V_{k,y})` for `k = n, ..., 1` recursively.
pub fn box_increment_operator_fn(f: &dyn Fn(&[f64]) -> f64, x: &[f64], y: &[f64]) -> f64 {
    fn apply(f: &dyn Fn(&[f64]) -> f64, k: usize, x: &[f64], y: &[f64]) -> f64 {
        if k == 0 {
            return f(x);
        }
        apply(f, k - 1, x, y) - apply(f, k - 1, &substitute(x, k - 1, y), y)
    }
    apply(f, x.len(), x, y)
}

fn grid_lookup(field: &SampleField) -> impl Fn(&[f64]) -> f64 + '_ {
    move |p: &[f64]| {
        let idx: Vec<usize> = p
            .iter()
            .zip(field.sizes())
            .map(|(&t, &n)| (t * (n - 1) as f64).round() as usize)
            .collect();
        field.at(&idx)
    }
}

/// `□ⁿ_t X(s)` on a sampled field (corner sum); `s` and `t` must be grid nodes.
pub fn box_increment(field: &SampleField, s: &[f64], t: &[f64]) -> Result<f64> {
    field.indices_of(s)?;
    field.indices_of(t)?;
    Ok(box_increment_fn(&grid_lookup(field), s, t))
}

/// Same as [`box_increment`] through the operator expansion.
pub fn box_increment_operator(field: &SampleField, s: &[f64], t: &[f64]) -> Result<f64> {
    field.indices_of(s)?;
    field.indices_of(t)?;
    Ok(box_increment_operator_fn(&grid_lookup(field), s, t))
}

/// Index-space corner sum on a row-major array.
fn box_at(values: &[f64], strides: &[usize], a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        let mut flat = 0;
        for k in 0..n {
            flat += strides[k] * if mask >> k & 1 == 1 { b[k] } else { a[k] };
        }
        if mask.count_ones() % 2 == 0 {
            total += values[flat];
        } else {
            total -= values[flat];
        }
    }
    total
}

/// Monte Carlo `d_X(s,t) = √(E|□ⁿ_t X(s)|²)` with its standard error.
pub fn estimate_d_metric(
    model: &dyn FieldModel,
    sizes: &[usize],
    s: &[f64],
    t: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_paths < 1000 {
        return Err(invalid(format!("d_X estimation needs at least 1000 fields, got {n_paths}")));
    }
    let sq: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let f = model.sample(sizes, derive_seed(seed, i as u64))?;
            box_increment(&f, s, t).map(|v| v * v)
        })
        .collect::<Result<_>>()?;
    let n = n_paths as f64;
    let mean = sq.iter().sum::<f64>() / n;
    let var = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let d = mean.sqrt();
    let se = if d > 0.0 { (var / n).sqrt() / (2.0 * d) } else { 0.0 };
    Ok((d, se))
}

fn check_alphas(alphas: &[f64], dims: usize) -> Result<()> {
    if alphas.len() != dims {
        return Err(invalid(format!("need {dims} exponents, got {}", alphas.len())));
    }
    alphas.iter().try_for_each(|&a| check_alpha(a))
}

/// Cell-midpoint values: the mean of the `2ⁿ` corners of every grid cell.
fn cell_midpoints(field: &SampleField) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let n = field.dims();
    let cells: Vec<usize> = field.sizes().iter().map(|s| s - 1).collect();
    let mut strides = vec![1; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * cells[k + 1];
    }
    let count: usize = cells.iter().product();
    let scale = 0.5f64.powi(n as i32);
    let mut idx = vec![0; n];
    let mut corner = vec![0; n];
    let values = (0..count)
        .map(|flat| {
            for k in 0..n {
                idx[k] = (flat / strides[k]) % cells[k];
            }
            let mut s = 0.0;
            for mask in 0u32..(1 << n) {
                for k in 0..n {
                    corner[k] = idx[k] + (mask >> k & 1) as usize;
                }
                s += field.at(&corner);
            }
            s * scale
        })
        .collect();
    (cells, strides, values)
}

/// `B` of a field with `Ψ(x) = exp(β x^{1/ι})` and `ρ_j(u) = u^{α_j}`.
///
/// Midpoint rule over pairs of grid cells; a pair sharing any coordinate
/// contributes `Ψ(0) = 1`.
pub fn compute_b_field(field: &SampleField, alphas: &[f64], beta: f64, iota: f64) -> Result<f64> {
    let n = field.dims();
    check_alphas(alphas, n)?;
    if !(beta > 0.0 && iota > 0.0) {
        return Err(invalid("beta and iota must be positive"));
    }
    let (cells, strides, mid) = cell_midpoints(field);
    let steps = field.steps();
    let ln_rho: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..cells[k]).map(|l| alphas[k] * (l as f64 * steps[k]).ln()).collect())
        .collect();
    let count = mid.len();
    let coords: Vec<Vec<usize>> = (0..count)
        .map(|f| (0..n).map(|k| (f / strides[k]) % cells[k]).collect())
        .collect();
    let inv_iota = 1.0 / iota;

    let rows: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|ai| {
            let a = &coords[ai];
            let mut s = 0.0;
            for b in &coords {
                if a.iter().zip(b).any(|(p, q)| p == q) {
                    s += 1.0;
                    continue;
                }
                let d = box_at(&mid, &strides, a, b).abs();
                if d == 0.0 {
                    s += 1.0;
                    continue;
                }
                let lr: f64 = (0..n).map(|k| ln_rho[k][a[k].abs_diff(b[k])]).sum();
                let e = beta * (inv_iota * (d.ln() - lr)).exp();
                if e > MAX_EXPONENT {
                    let mid_of = |c: &[usize]| -> Vec<f64> {
                        c.iter().zip(&steps).map(|(&i, h)| (i as f64 + 0.5) * h).collect()
                    };
                    return Err(Error::Overflow {
                        what: "field B integrand",
                        location: format!("s={:?}, t={:?} (beta too large for this field)", mid_of(a), mid_of(b)),
                    });
                }
                s += e.exp();
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let total: f64 = rows.iter().sum();
    Ok(total / (count as f64 * count as f64))
}

fn b_floor(dims: usize) -> f64 {
    0.25f64.powi(dims as i32) + 1e-12
}

/// `8ⁿ ∫_0^{δ_1}…∫_0^{δ_n} β^{-ι} (log(4ⁿB / Π u_j²))^ι Π dρ_j(u_j)`.
///
/// With `u_j = δ_j e^{-w_j/α_j}` this is
/// `8ⁿ β^{-ι} Π δ_j^{α_j} ∫ (log(4ⁿB/Πδ_j²) + Σ 2w_j/α_j)^ι e^{-Σw} dw`.
/// `B` is floored just above `4^{-n}` so the logarithm stays positive.
pub fn field_modulus_bound(
    deltas: &[f64],
    b: f64,
    beta: f64,
    iota: f64,
    alphas: &[f64],
    quad: &LogQuadrature,
) -> Result<f64> {
    let n = deltas.len();
    check_alphas(alphas, n)?;
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
        return Err(invalid(format!("gaps must lie in (0,1], got {d}")));
    }
    let b = b.max(b_floor(n));
    let ln_base = n as f64 * 4f64.ln() + b.ln() - 2.0 * deltas.iter().map(|d| d.ln()).sum::<f64>();
    let scale: f64 = deltas.iter().zip(alphas).map(|(d, a)| d.powf(*a)).product();
    let integral = quad.laplace_tensor(n, |w| {
        let s: f64 = w.iter().zip(alphas).map(|(w, a)| 2.0 * w / a).sum();
        (ln_base + s).powf(iota)
    })?;
    Ok(8f64.powi(n as i32) * beta.powf(-iota) * scale * integral)
}

/// `∫_{[0,1]ⁿ} (Σ_j log 1/v_j)^ι Π_j v_j^{α_j-1} dv`.
pub fn field_v_integral(iota: f64, alphas: &[f64], quad: &LogQuadrature) -> Result<f64> {
    check_alphas(alphas, alphas.len())?;
    let pref: f64 = alphas.iter().map(|a| 1.0 / a).product();
    let integral = quad.laplace_tensor(alphas.len(), |w| {
        let s: f64 = w.iter().zip(alphas).map(|(w, a)| w / a).sum();
        s.powf(iota)
    })?;
    Ok(pref * integral)
}

/// `(C(ω), C_d)` of the rectangular Hölder bound
/// `|□ⁿ_t X(s)| ≤ (C(ω) + C_d (log 1/Πδ_j)^ι) Π δ_j^{α_j}`.
pub fn field_holder_constants(
    b: f64,
    beta: f64,
    iota: f64,
    alphas: &[f64],
    quad: &LogQuadrature,
) -> Result<(f64, f64)> {
    let n = alphas.len() as i32;
    let common = 8f64.powi(n) * three_factor(iota) * beta.powf(-iota);
    let c_omega = common * (4f64.powi(n) * b).max(1.0).ln().powf(iota);
    let prod_alpha: f64 = alphas.iter().product();
    let v = field_v_integral(iota, alphas, quad)?;
    let c_d = common * prod_alpha * 2f64.powf(iota) * (1.0 / prod_alpha + v);
    Ok((c_omega, c_d))
}

/// `C̃ = C_d max_{x ∈ [0,1]ⁿ} Π x_j^{α_j} (log 1/Π x_j)^ι` with its maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct CTilde {
    pub value: f64,
    pub max_g: f64,
    pub maximizer: Vec<f64>,
}

/// With `y_j = -log x_j` the objective is `exp(-Σ α_j y_j) (Σ y_j)^ι`; for a
/// fixed sum the exponential is largest when all mass sits on the axis with
/// the smallest `α`, which leaves `max_S e^{-α_min S} S^ι` at `S = ι/α_min`.
pub fn c_tilde(alphas: &[f64], iota: f64, c_d: f64) -> Result<CTilde> {
    check_alphas(alphas, alphas.len())?;
    if alphas.is_empty() {
        return Err(invalid("need at least one axis"));
    }
    if !(iota >= 0.0) {
        return Err(invalid(format!("iota must be nonnegative, got {iota}")));
    }
    let (jmin, amin) = alphas
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, a)| if a < acc.1 { (j, a) } else { acc });
    let s = iota / amin;
    let max_g = (-iota).exp() * s.powf(iota);
    let mut maximizer = vec![1.0; alphas.len()];
    maximizer[jmin] = (-s).exp();
    Ok(CTilde {
        value: c_d * max_g,
        max_g,
        maximizer,
    })
}

/// `Π x_j^{α_j} (log 1/Π x_j)^ι`.
pub fn c_tilde_objective(x: &[f64], alphas: &[f64], iota: f64) -> f64 {
    let p: f64 = x.iter().product();
    if p <= 0.0 {
        return 0.0;
    }
    let a: f64 = x.iter().zip(alphas).map(|(x, a)| x.powf(*a)).product();
    a * (-p.ln()).max(0.0).powf(iota)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrrResult {
    pub beta: f64,
    pub iota: f64,
    pub alphas: Vec<f64>,
    pub b: f64,
    pub c_omega: f64,
    pub c_d: f64,
    pub c_tilde: f64,
}

impl FieldGrrResult {
    pub fn compute(field: &SampleField, alphas: &[f64], beta: f64, iota: f64) -> Result<Self> {
        let b = compute_b_field(field, alphas, beta, iota)?;
        Self::from_b(b, alphas, beta, iota)
    }

    pub fn from_b(b: f64, alphas: &[f64], beta: f64, iota: f64) -> Result<Self> {
        let quad = LogQuadrature::for_dims(alphas.len());
        let (c_omega, c_d) = field_holder_constants(b, beta, iota, alphas, &quad)?;
        Ok(Self {
            beta,
            iota,
            alphas: alphas.to_vec(),
            b,
            c_omega,
            c_d,
            c_tilde: c_tilde(alphas, iota, c_d)?.value,
        })
    }

    /// `(C(ω) + C_d (log 1/Πδ_j)^ι) Π δ_j^{α_j}`.
    pub fn holder_bound(&self, deltas: &[f64]) -> f64 {
        let p: f64 = deltas.iter().product();
        let r: f64 = deltas.iter().zip(&self.alphas).map(|(d, a)| d.powf(*a)).product();
        (self.c_omega + self.c_d * (-p.ln()).max(0.0).powf(self.iota)) * r
    }

    pub fn record(&self) -> Record {
        let mut r = Record::new();
        r.num("B", self.b)
            .num("C_omega", self.c_omega)
            .num("C_d", self.c_d)
            .num("C_tilde", self.c_tilde)
            .num("beta", self.beta)
            .num("iota", self.iota);
        for (j, a) in self.alphas.iter().enumerate() {
            r.num(format!("alpha{}", j + 1), *a);
        }
        r
    }
}

fn for_each_node(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    let n = sizes.len();
    let mut idx = vec![0; n];
    loop {
        f(&idx);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Evaluates `bound(gaps)` against `|□ⁿ_t X(s)|` over all pairs of grid nodes
/// that differ in every coordinate (each unordered pair once).
fn check_field_pairs(field: &SampleField, bound: &(dyn Fn(&[f64]) -> f64 + Sync)) -> ViolationReport {
    let n = field.dims();
    let sizes = field.sizes().to_vec();
    let steps = field.steps();
    let mut strides = vec![1; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * sizes[k + 1];
    }
    let total: usize = sizes.iter().product();
    let parts: Vec<ViolationReport> = (0..total)
        .into_par_iter()
        .map(|fa| {
            let a: Vec<usize> = (0..n).map(|k| (fa / strides[k]) % sizes[k]).collect();
            let mut rep = ViolationReport::new();
            let mut gaps = vec![0.0; n];
            for_each_node(&sizes, |b| {
                // b strictly above a on the first axis: each unordered pair once
                if b[0] <= a[0] || a.iter().zip(b).any(|(p, q)| p == q) {
                    return;
                }
                for k in 0..n {
                    gaps[k] = a[k].abs_diff(b[k]) as f64 * steps[k];
                }
                let lhs = box_at(field.values(), &strides, &a, b).abs();
                let pa = a.iter().zip(&steps).map(|(&i, h)| i as f64 * h).sum::<f64>();
                let pb = b.iter().zip(&steps).map(|(&i, h)| i as f64 * h).sum::<f64>();
                rep.observe(lhs, bound(&gaps), (pa, pb));
            });
            rep
        })
        .collect();
    let mut out = ViolationReport::new();
    for p in &parts {
        out.merge(p);
    }
    out
}

/// Checks the rectangular Hölder bound at every pair of grid nodes differing
/// in all coordinates. The reported pair holds coordinate sums, for reference only.
pub fn verify_field_modulus(field: &SampleField, result: &FieldGrrResult) -> ViolationReport {
    check_field_pairs(field, &|g: &[f64]| result.holder_bound(g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSobolevReport {
    pub constant: f64,
    pub c_eps: f64,
    pub check: ViolationReport,
}

/// Rectangular Sobolev bound with `q = 2/ε`, `γ_j = α_j - ε/2`:
/// `|□ⁿ_t f(s)| ≤ Π_j C_{γ_j,q} δ_j^{α_j - ε} (∫∫ |□ⁿ_y f(x)|^q / Π_j |x_j - y_j|^{γ_j q + 1})^{1/q}`.
pub fn field_sobolev_bound(field: &SampleField, alphas: &[f64], epsilon: f64) -> Result<FieldSobolevReport> {
    let n = field.dims();
    check_alphas(alphas, n)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid(format!("epsilon must lie in (0,1], got {epsilon}")));
    }
    let q = 2.0 / epsilon;
    let constant = alphas
        .iter()
        .map(|a| crate::grr::sobolev_constant(a - 0.5 * epsilon, q))
        .product::<Result<f64>>()?;
    let (cells, strides, mid) = cell_midpoints(field);
    let steps = field.steps();
    let coords: Vec<Vec<usize>> = (0..mid.len())
        .map(|f| (0..n).map(|k| (f / strides[k]) % cells[k]).collect())
        .collect();
    // exponent of |x_j - y_j| is γ_j q + 1 = 2α_j/ε
    let ln_den: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let p = 2.0 * alphas[k] / epsilon;
            (0..cells[k]).map(|l| p * (l as f64 * steps[k]).ln()).collect()
        })
        .collect();
    let term = |a: &[usize], b: &[usize]| -> f64 {
        if a.iter().zip(b).any(|(p, q)| p == q) {
            return f64::NEG_INFINITY;
        }
        let d = box_at(&mid, &strides, a, b).abs();
        if d == 0.0 {
            return f64::NEG_INFINITY;
        }
        q * d.ln() - (0..n).map(|k| ln_den[k][a[k].abs_diff(b[k])]).sum::<f64>()
    };
    let top = coords
        .par_iter()
        .map(|a| coords.iter().map(|b| term(a, b)).fold(f64::NEG_INFINITY, f64::max))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let c_eps = if top == f64::NEG_INFINITY {
        0.0
    } else {
        let rows: Vec<f64> = coords
            .par_iter()
            .map(|a| coords.iter().map(|b| (term(a, b) - top).exp()).sum())
            .collect();
        let count = mid.len() as f64;
        let ln_i = top + rows.iter().sum::<f64>().ln() - 2.0 * count.ln();
        constant * (ln_i / q).exp()
    };
    if !c_eps.is_finite() {
        return Err(Error::Overflow {
            what: "field Sobolev constant",
            location: format!("epsilon={epsilon}"),
        });
    }
    let check = check_field_pairs(field, &|g: &[f64]| {
        c_eps * g.iter().zip(alphas).map(|(d, a)| d.powf(a - epsilon)).product::<f64>()
    });
    Ok(FieldSobolevReport {
        constant,
        c_eps,
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grr;
    use crate::path::SamplePath;
    use proptest::prelude::*;

    fn q() -> LogQuadrature {
        LogQuadrature::default()
    }

    #[test]
    fn one_axis_is_plain_increment() {
        let f = SampleField::from_fn(&[9], |x| x[0] * x[0]).unwrap();
        let v = box_increment(&f, &[0.75], &[0.25]).unwrap();
        assert!((v - (0.5625 - 0.0625)).abs() < 1e-15);
    }

    #[test]
    fn product_function_rectangle() {
        let f = SampleField::from_fn(&[5, 5], |x| x[0] * x[1]).unwrap();
        let v = box_increment(&f, &[0.75, 0.5], &[0.0, 0.0]).unwrap();
        assert!((v - 0.375).abs() < 1e-15);
        assert!(box_increment(&f, &[0.3, 0.5], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn additive_functions_are_annihilated() {
        let f = |x: &[f64]| x[0].sin() + x[1] * x[1] * x[1];
        for (x, y) in [([0.2, 0.9], [0.7, 0.1]), ([0.0, 1.0], [1.0, 0.3])] {
            assert!(box_increment_fn(&f, &x, &y).abs() < 1e-15);
        }
        let g = |x: &[f64]| x[0] * x[1] + x[1] * x[2] + x[0].exp();
        assert!(box_increment_fn(&g, &[0.1, 0.5, 0.9], &[0.8, 0.2, 0.3]).abs() < 1e-14);
    }

    #[test]
    fn substitution_identities() {
        let f = |x: &[f64]| x[0] * 3.0 + x[1] * x[2] - x[0] * x[2];
        let (x, y) = ([0.1, 0.2, 0.3], [0.9, 0.8, 0.7]);
        for k in 0..3 {
            let once = f(&substitute(&x, k, &y));
            let twice = f(&substitute(&substitute(&x, k, &y), k, &y));
            assert_eq!(once, twice);
            for l in 0..3 {
                let kl = f(&substitute(&substitute(&x, k, &y), l, &y));
                let lk = f(&substitute(&substitute(&x, l, &y), k, &y));
                assert_eq!(kl, lk);
            }
        }
    }

    #[test]
    fn b_field_examples() {
        let zero = SampleField::from_fn(&[9, 9], |_| 0.0).unwrap();
        assert_eq!(compute_b_field(&zero, &[0.5, 0.5], 0.3, 0.5).unwrap(), 1.0);
        let f = SampleField::from_fn(&[65, 65], |x| x[0] * x[1]).unwrap();
        let beta: f64 = 0.4;
        let b = compute_b_field(&f, &[1.0, 1.0], beta, 0.5).unwrap();
        // pairs sharing a cell coordinate count as 1: a 2/64 fraction
        assert!((b - beta.exp()).abs() / beta.exp() < 0.02, "{b}");
        assert!(b >= 1.0);
    }

    #[test]
    fn b_field_matches_path_b_in_one_dimension() {
        let vals: Vec<f64> = (0..200).map(|i| ((i * 37 % 101) as f64 / 50.0 - 1.0) * 0.1).collect();
        let p = SamplePath::new(vals.clone()).unwrap();
        let f = SampleField::new(vec![200], vals).unwrap();
        let a = grr::compute_b(&p, 0.5, 0.2, 0.5).unwrap();
        let b = compute_b_field(&f, &[0.5], 0.2, 0.5).unwrap();
        assert!((a - b).abs() / a < 1e-12);
    }

    #[test]
    fn v_integral_two_axes() {
        let qd = LogQuadrature::for_dims(2);
        assert!((field_v_integral(1.0, &[1.0, 1.0], &qd).unwrap() - 2.0).abs() < 1e-8);
        let (a1, a2) = (0.5, 0.8);
        let want = (1.0 / a1) * (1.0 / a2) * (1.0 / a1 + 1.0 / a2);
        let got = field_v_integral(1.0, &[a1, a2], &qd).unwrap();
        assert!((got - want).abs() / want < 1e-8);
    }

    #[test]
    fn field_constants_at_one_axis_match_grr() {
        let (c1, d1) = grr::holder_constants(1.7, 0.2, 0.5, 0.5, &q()).unwrap();
        let (c2, d2) = field_holder_constants(1.7, 0.2, 0.5, &[0.5], &q()).unwrap();
        assert_eq!((c1, d1), (c2, d2));
        let (c, _) = field_holder_constants(1.0 / 16.0, 0.2, 0.5, &[0.5, 0.5], &q()).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn field_modulus_vanishes() {
        let qd = LogQuadrature::for_dims(2);
        let big = field_modulus_bound(&[0.5, 0.5], 2.0, 0.2, 0.5, &[0.5, 0.5], &qd).unwrap();
        let small = field_modulus_bound(&[1e-6, 0.5], 2.0, 0.2, 0.5, &[0.5, 0.5], &qd).unwrap();
        assert!(small < 1e-2 * big);
    }

    #[test]
    fn c_tilde_one_dimensional() {
        let r = c_tilde(&[1.0], 1.0, 2.0).unwrap();
        assert!((r.value - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!((r.maximizer[0] - (-1f64).exp()).abs() < 1e-15);
        let (a, i): (f64, f64) = (0.4, 0.7);
        let r = c_tilde(&[a], i, 1.0).unwrap();
        assert!((r.value - (-i).exp() * (i / a).powf(i)).abs() < 1e-14);
        assert!((r.value - c_tilde_objective(&r.maximizer, &[a], i)).abs() < 1e-14);
        let r0 = c_tilde(&[0.5, 0.7], 1e-9, 3.0).unwrap();
        assert!((r0.value - 3.0).abs() < 1e-6);
    }

    #[test]
    fn zero_field_has_no_violations() {
        let zero = SampleField::from_fn(&[9, 9], |_| 0.0).unwrap();
        let r = FieldGrrResult::compute(&zero, &[0.5, 0.5], 0.1, 0.5).unwrap();
        let v = verify_field_modulus(&zero, &r);
        assert_eq!(v.violations, 0);
        assert_eq!(v.pairs_checked, 81 * 64 / 2);
    }

    #[test]
    fn field_verification_matches_path_verification_in_one_dimension() {
        let vals: Vec<f64> = (0..129).map(|i| (i as f64 * 0.37).sin() * 0.05).collect();
        let p = SamplePath::new(vals.clone()).unwrap();
        let f = SampleField::new(vec![129], vals).unwrap();
        let cfg = grr::GrrConfig::new(0.17, 0.5, 0.5).unwrap();
        let a = grr::GrrResult::compute(&p, &cfg).unwrap();
        let b = FieldGrrResult::compute(&f, &[0.5], 0.17, 0.5).unwrap();
        assert_eq!((a.b, a.c_omega, a.c_d), (b.b, b.c_omega, b.c_d));
        let va = grr::verify_modulus(&p, &a);
        let vb = verify_field_modulus(&f, &b);
        // the path check skips the single pair at distance 1
        assert_eq!(vb.pairs_checked, va.pairs_checked + 1);
        assert_eq!(va.violations, vb.violations);
        assert!(vb.max_ratio >= va.max_ratio);
    }

    proptest! {
        #[test]
        fn operator_and_corner_sums_agree(
            coef in proptest::collection::vec(-2.0f64..2.0, 8),
            x in proptest::collection::vec(0.0f64..1.0, 3),
            y in proptest::collection::vec(0.0f64..1.0, 3),
        ) {
            let f = |p: &[f64]| {
                coef[0] + coef[1] * p[0] * p[1] * p[2] + coef[2] * (p[0] * 5.0).sin() * p[2]
                    + coef[3] * p[1].exp() * p[0] + coef[4] * p[2] * p[2] * p[1]
            };
            let a = box_increment_fn(&f, &x, &y);
            let b = box_increment_operator_fn(&f, &x, &y);
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn field_modulus_one_axis_is_path_modulus(d in 0.001f64..1.0, b in 0.3f64..20.0, iota in 0.2f64..2.0, alpha in 0.1f64..1.0) {
            let x = grr::modulus_bound(d, b, 0.3, iota, alpha, &q()).unwrap();
            let y = field_modulus_bound(&[d], b, 0.3, iota, &[alpha], &q()).unwrap();
            prop_assert_eq!(x, y);
        }

        #[test]
        fn field_modulus_monotone_in_b(b in 0.1f64..20.0, d1 in 0.01f64..1.0, d2 in 0.01f64..1.0) {
            let qd = LogQuadrature::for_dims(2);
            let lo = field_modulus_bound(&[d1, d2], b, 0.3, 0.5, &[0.5, 0.7], &qd).unwrap();
            let hi = field_modulus_bound(&[d1, d2], 2.0 * b, 0.3, 0.5, &[0.5, 0.7], &qd).unwrap();
            prop_assert!(hi > lo);
        }
    }
}
