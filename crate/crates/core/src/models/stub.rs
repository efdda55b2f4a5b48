//! Deterministic paths for tests and fixtures.

use super::{ModelSpec, PathModel, SpecArg};
use crate::error::Result;
use crate::moments::HyperParams;
use crate::path::SamplePath;

#[derive(Debug, Clone, Copy)]
pub struct Constant(f64);

impl Constant {
    pub fn new(value: f64) -> Self {
        Self(value)
    }
}

impl PathModel for Constant {
    fn spec(&self) -> ModelSpec {
        ModelSpec::new("const", vec![SpecArg::Num(self.0)])
    }

    fn sample(&self, n_points: usize, _seed: u64) -> Result<SamplePath> {
        SamplePath::from_fn(n_points, |_| self.0)
    }

    fn holder_exponent(&self) -> f64 {
        1.0
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        None
    }
}

/// `f(t) = t`.
#[derive(Debug, Clone, Copy)]
pub struct Linear;

impl PathModel for Linear {
    fn spec(&self) -> ModelSpec {
        ModelSpec::new("linear", vec![])
    }

    fn sample(&self, n_points: usize, _seed: u64) -> Result<SamplePath> {
        SamplePath::from_fn(n_points, |t| t)
    }

    fn covariance(&self, s: f64, t: f64) -> Option<f64> {
        Some(s * t)
    }

    fn holder_exponent(&self) -> f64 {
        1.0
    }

    fn hyper_params(&self) -> Option<HyperParams> {
        None
    }
}
