use super::fbm::{cov, Fbm};
use super::{ModelSpec, PathModel};
use crate::error::{invalid, Error, Result};
use crate::moments::HyperParams;
use crate::path::SamplePath;

/// Probabilists' Hermite polynomial by `H_{k+1} = x H_k - k H_{k-1}`.
pub fn hermite(n: u32, x: f64) -> Result<f64> {
    let v = scaled_hermite(n, x, 1.0);
    if !v.is_finite() {
        return Err(Error::Overflow {
            what: "hermite",
            location: format!("n={n}, x={x}"),
        });
    }
    Ok(v)
}

/// `v^{n/2} H_n(x/√v)`, via the homogeneous recurrence so that `v = 0` is exact.
fn scaled_hermite(n: u32, x: f64, v: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, x);
    for k in 1..n {
        let next = x * cur - k as f64 * v * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Wick power `:x^n:` of a centered Gaussian value with variance `variance`.
pub fn wick_power(order: u32, x: f64, variance: f64) -> f64 {
    scaled_hermite(order, x, variance)
}

/// `Y_t = t^{nH} H_n(X_t / t^H)` for an fBm `X`.
#[derive(Debug)]
pub struct WickChaos {
    order: u32,
    base: Fbm,
}

impl WickChaos {
    pub fn new(order: u32, hurst: f64) -> Result<Self> {
        if order == 0 {
            return Err(invalid("chaos order must be >= 1"));
        }
        Ok(Self {
            order,
            base: Fbm::new(hurst)?,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl PathModel for WickChaos {
    fn spec(&self) -> ModelSpec {
        ModelSpec::wick(self.order, self.base.hurst())
    }

    fn sample(&self, n_points: usize, seed: u64) -> Result<SamplePath> {
        let x = self.base.sample(n_points, seed)?;
        let e = 2.0 * self.base.hurst();
        let values: Vec<f64> = x
            .grid()
            .iter()
            .zip(x.values())
            .map(|(&t, &v)| wick_power(self.order, v, t.powf(e)))
            .collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Overflow {
                what: "wick power",
                location: format!("grid index {i}"),
            });
        }
        SamplePath::new(values)
    }

    fn covariance(&self, s: f64, t: f64) -> Option<f64> {
        Some(factorial(self.order) * cov(s, t, self.base.hurst()).powi(self.order as i32))
    }

    fn holder_exponent(&self) -> f64 {
        self.base.hurst()
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        Some(HyperParams {
            c0: 2.0,
            iota: 0.5 * self.order as f64,
        })
    }
}
