use super::{ModelSpec, PathModel};
use crate::error::Result;
use crate::moments::{combine_product_params, HyperParams};
use crate::path::SamplePath;
use crate::seed::derive_seed;

/// Pointwise product of two independent processes.
///
/// Factor `a` is sampled with `derive_seed(seed, 0)`, factor `b` with
/// `derive_seed(seed, 1)`.
#[derive(Debug)]
pub struct Product {
    a: Box<dyn PathModel>,
    b: Box<dyn PathModel>,
}

impl Product {
    pub fn new(a: Box<dyn PathModel>, b: Box<dyn PathModel>) -> Self {
        Self { a, b }
    }
}

impl PathModel for Product {
    fn spec(&self) -> ModelSpec {
        ModelSpec::product(self.a.spec(), self.b.spec())
    }

    fn sample(&self, n_points: usize, seed: u64) -> Result<SamplePath> {
        let x = self.a.sample(n_points, derive_seed(seed, 0))?;
        let y = self.b.sample(n_points, derive_seed(seed, 1))?;
        SamplePath::new(x.values().iter().zip(y.values()).map(|(p, q)| p * q).collect())
    }

    fn covariance(&self, s: f64, t: f64) -> Option<f64> {
        Some(self.a.covariance(s, t)? * self.b.covariance(s, t)?)
    }

    fn holder_exponent(&self) -> f64 {
        self.a.holder_exponent().min(self.b.holder_exponent())
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        Some(combine_product_params(self.a.hyper_params()?, self.b.hyper_params()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Constant, Fbm};

    #[test]
    fn unit_factor_is_identity() {
        let z = Product::new(Box::new(Fbm::new(0.5).unwrap()), Box::new(Constant::new(1.0)));
        let x = Fbm::new(0.5).unwrap().sample(33, derive_seed(4, 0)).unwrap();
        assert_eq!(z.sample(33, 4).unwrap(), x);
    }

    #[test]
    fn starts_at_zero() {
        let z = Product::new(Box::new(Fbm::new(0.5).unwrap()), Box::new(Fbm::new(0.3).unwrap()));
        for s in 0..20 {
            assert_eq!(z.sample(17, s).unwrap().values()[0], 0.0);
        }
    }

    #[test]
    fn terminal_second_moment() {
        let z = Product::new(Box::new(Fbm::new(0.5).unwrap()), Box::new(Fbm::new(0.5).unwrap()));
        let n = 10_000;
        let sq: Vec<f64> = (0..n)
            .map(|i| z.sample(5, derive_seed(21, i)).unwrap().values()[4].powi(2))
            .collect();
        let m = sq.iter().sum::<f64>() / n as f64;
        let sd = (sq.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((m - 1.0).abs() < 4.0 * sd / (n as f64).sqrt(), "{m}");
        assert_eq!(z.hyper_params().unwrap().iota, 1.0);
    }
}
