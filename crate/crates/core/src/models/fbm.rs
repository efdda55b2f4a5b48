use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;

use super::gauss::LowerFactor;
use super::{check_hurst, ModelSpec, PathModel};
use crate::error::{invalid, Result};
use crate::moments::HyperParams;
use crate::path::SamplePath;
use crate::seed;

/// `½(t^{2H} + s^{2H} - |t-s|^{2H})`.
pub fn fbm_covariance(s: f64, t: f64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("times must lie in [0,1], got ({s}, {t})")));
    }
    Ok(cov(s, t, hurst))
}

#[inline]
pub(crate) fn cov(s: f64, t: f64, h: f64) -> f64 {
    let e = 2.0 * h;
    0.5 * (t.powf(e) + s.powf(e) - (t - s).abs().powf(e))
}

/// Cholesky factor of the fBm covariance at the nonzero grid nodes `i/(n-1)`.
pub(crate) fn grid_factor(n_points: usize, h: f64) -> Result<LowerFactor> {
    let m = n_points - 1;
    let times: Vec<f64> = (1..=m).map(|i| i as f64 / m as f64).collect();
    let c = DMatrix::from_fn(m, m, |i, j| cov(times[i], times[j], h));
    LowerFactor::factor(c)
}

/// Fractional Brownian motion, sampled exactly from its covariance.
pub struct Fbm {
    hurst: f64,
    factors: Mutex<HashMap<usize, Arc<LowerFactor>>>,
}

impl fmt::Debug for Fbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fbm").field("hurst", &self.hurst).finish()
    }
}

impl Fbm {
    pub fn new(hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        Ok(Self {
            hurst,
            factors: Mutex::new(HashMap::new()),
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    fn factor(&self, n_points: usize) -> Result<Arc<LowerFactor>> {
        // the lock is held while factoring so concurrent callers wait instead of duplicating work
        let mut cache = self.factors.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(f) = cache.get(&n_points) {
            return Ok(f.clone());
        }
        let f = Arc::new(grid_factor(n_points, self.hurst)?);
        cache.insert(n_points, f.clone());
        Ok(f)
    }
}

impl PathModel for Fbm {
    fn spec(&self) -> ModelSpec {
        ModelSpec::fbm(self.hurst)
    }

    fn sample(&self, n_points: usize, seed: u64) -> Result<SamplePath> {
        if n_points < 2 {
            return Err(invalid("a sample path needs at least 2 grid points"));
        }
        let l = self.factor(n_points)?;
        let mut rng = seed::rng(seed);
        let mut values = Vec::with_capacity(n_points);
        values.push(0.0);
        values.extend(l.sample(&mut rng));
        SamplePath::new(values)
    }

    fn covariance(&self, s: f64, t: f64) -> Option<f64> {
        Some(cov(s, t, self.hurst))
    }

    fn holder_exponent(&self) -> f64 {
        self.hurst
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        Some(HyperParams { c0: 2.0, iota: 0.5 })
    }

    fn increment_scale(&self) -> f64 {
        // E(X_t - X_s)² = |t-s|^{2H} exactly
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_examples() {
        assert_eq!(fbm_covariance(1.0, 1.0, 0.5).unwrap(), 1.0);
        assert!((fbm_covariance(0.5, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        for &(t, h) in &[(0.3, 0.2), (0.9, 0.7), (0.01, 0.5)] {
            let d = fbm_covariance(t, t, h).unwrap();
            assert!((d - f64::powf(t, 2.0 * h)).abs() < 1e-15);
        }
        assert_eq!(
            fbm_covariance(0.2, 0.7, 0.3).unwrap(),
            fbm_covariance(0.7, 0.2, 0.3).unwrap()
        );
        assert!(fbm_covariance(0.5, 0.5, 1.0).is_err());
        assert!(fbm_covariance(0.5, 1.5, 0.5).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_starts_at_zero() {
        let m = Fbm::new(0.7).unwrap();
        let a = m.sample(65, 11).unwrap();
        let b = m.sample(65, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values()[0], 0.0);
        assert_ne!(a, m.sample(65, 12).unwrap());
    }

    #[test]
    fn terminal_variance() {
        let m = Fbm::new(0.7).unwrap();
        let n = 10_000;
        let sq: Vec<f64> = (0..n)
            .map(|i| m.sample(9, seed::derive_seed(3, i)).unwrap().values()[8].powi(2))
            .collect();
        let mean = sq.iter().sum::<f64>() / n as f64;
        let sd = (sq.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * sd / (n as f64).sqrt(), "{mean}");
    }
}
