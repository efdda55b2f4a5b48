use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_distr::StandardNormal;

use super::fbm::grid_factor;
use super::gauss::LowerFactor;
use super::{check_hurst, FieldModel, ModelSpec};
use crate::error::{invalid, Result};
use crate::moments::HyperParams;
use crate::path::SampleField;
use crate::seed;

/// Fractional Brownian sheet on `[0,1]²`: covariance is the product of the
/// per-axis fBm covariances, so the field is `L₁ Z L₂ᵀ` with `Z` white noise.
pub struct FbmSheet {
    hurst: [f64; 2],
    factors: Mutex<HashMap<(usize, usize), Arc<LowerFactor>>>,
}

impl fmt::Debug for FbmSheet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FbmSheet").field("hurst", &self.hurst).finish()
    }
}

impl FbmSheet {
    pub fn new(h1: f64, h2: f64) -> Result<Self> {
        check_hurst(h1)?;
        check_hurst(h2)?;
        Ok(Self {
            hurst: [h1, h2],
            factors: Mutex::new(HashMap::new()),
        })
    }

    fn factor(&self, axis: usize, n: usize) -> Result<Arc<LowerFactor>> {
        let mut cache = self.factors.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(f) = cache.get(&(axis, n)) {
            return Ok(f.clone());
        }
        let f = Arc::new(grid_factor(n, self.hurst[axis])?);
        cache.insert((axis, n), f.clone());
        Ok(f)
    }
}

impl FieldModel for FbmSheet {
    fn spec(&self) -> ModelSpec {
        ModelSpec::sheet(self.hurst[0], self.hurst[1])
    }

    fn dims(&self) -> usize {
        2
    }

    fn sample(&self, sizes: &[usize], seed: u64) -> Result<SampleField> {
        if sizes.len() != 2 {
            return Err(invalid(format!("sheet is two-dimensional, got grid {sizes:?}")));
        }
        let (n1, n2) = (sizes[0], sizes[1]);
        if n1 < 2 || n2 < 2 {
            return Err(invalid("every field axis needs at least 2 grid points"));
        }
        let l1 = self.factor(0, n1)?;
        let l2 = self.factor(1, n2)?;
        let (m1, m2) = (n1 - 1, n2 - 1);
        let mut rng = seed::rng(seed);

        // W = Z L₂ᵀ row by row, then X = L₁ W column by column
        let mut w = vec![0.0; m1 * m2];
        let mut z = vec![0.0; m2];
        for row in w.chunks_mut(m2) {
            for v in z.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            l2.apply(&z, row);
        }
        let mut values = vec![0.0; n1 * n2];
        let mut col = vec![0.0; m1];
        let mut out = vec![0.0; m1];
        for j in 0..m2 {
            for i in 0..m1 {
                col[i] = w[i * m2 + j];
            }
            l1.apply(&col, &mut out);
            for i in 0..m1 {
                values[(i + 1) * n2 + j + 1] = out[i];
            }
        }
        SampleField::new(vec![n1, n2], values)
    }

    fn holder_exponents(&self) -> Vec<f64> {
        self.hurst.to_vec()
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        Some(HyperParams { c0: 2.0, iota: 0.5 })
    }
}
