use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const JITTER: f64 = 1e-12;

/// Lower Cholesky factor stored packed by rows.
#[derive(Clone)]
pub struct LowerFactor {
    n: usize,
    data: Vec<f64>,
}

impl std::fmt::Debug for LowerFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LowerFactor({}x{})", self.n, self.n)
    }
}

impl LowerFactor {
    /// Factors `cov + 1e-12·max(diag)·I`; fails rather than regularizing further.
    pub fn factor(mut cov: DMatrix<f64>) -> Result<Self> {
        let n = cov.nrows();
        let max_diag = (0..n).map(|i| cov[(i, i)]).fold(0.0, f64::max);
        let jitter = JITTER * max_diag;
        for i in 0..n {
            cov[(i, i)] += jitter;
        }
        let chol = nalgebra::linalg::Cholesky::new(cov)
            .ok_or(Error::NotPositiveDefinite { dim: n, jitter })?;
        let l = chol.l();
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                data.push(l[(i, j)]);
            }
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.data[start..start + i + 1]
    }

    /// `out = L z`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = self.row(i).iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }

    /// `L z` with `z` standard normal drawn from `rng`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
        let mut out = vec![0.0; self.n];
        self.apply(&z, &mut out);
        out
    }
}
