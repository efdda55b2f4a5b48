//! Quadrature for integrals with power-law singularities at the origin.
//!
//! Every integral the bound engines need has the shape
//! `∫₀¹ g(log 1/v) α v^{α-1} dv` (one factor per axis), which the substitution
//! `v^α = e^{-w}` turns into a Laplace-type integral `∫₀^∞ f(w) e^{-w} dw`.
//! The nodes are log-spaced in `w` (midpoint rule in `z = ln w`), so the
//! integrand decays double-exponentially at both ends and the rule converges
//! geometrically in the node count.

use crate::error::{Error, Result};

const Z_MIN: f64 = -40.0;
// ln(200): e^{-200} is far below f64 resolution for any polynomial growth we use.
const Z_MAX: f64 = 5.298_317_366_548_036;

/// Node-doubling tolerance above which an evaluation is reported as nonconvergent.
pub const DOUBLING_TOLERANCE: f64 = 1e-4;

pub const DEFAULT_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogQuadrature {
    /// Nodes per axis for the coarse evaluation; the check doubles this.
    pub nodes: usize,
}

impl Default for LogQuadrature {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
        }
    }
}

/// Result of an integral together with its node-doubling diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub coarse: f64,
    pub relative_change: f64,
}

fn rule(nodes: usize) -> Vec<(f64, f64)> {
    let h = (Z_MAX - Z_MIN) / nodes as f64;
    (0..nodes)
        .map(|k| {
            let z = Z_MIN + (k as f64 + 0.5) * h;
            let w = z.exp();
            (w, h * w * (-w).exp())
        })
        .collect()
}

fn tensor_sum<F>(dims: usize, nodes: usize, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let rule = rule(nodes);
    let mut idx = vec![0usize; dims];
    let mut point = vec![rule[0].0; dims];
    let mut total = 0.0;
    loop {
        let weight: f64 = idx.iter().map(|&k| rule[k].1).product();
        total += weight * f(&point);
        // odometer increment, last axis fastest
        let mut axis = dims;
        loop {
            if axis == 0 {
                return total;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < nodes {
                point[axis] = rule[idx[axis]].0;
                break;
            }
            idx[axis] = 0;
            point[axis] = rule[0].0;
        }
    }
}

impl LogQuadrature {
    pub fn new(nodes: usize) -> Self {
        Self { nodes: nodes.max(2) }
    }

    /// Per-axis node count for a `dims`-dimensional tensor rule.
    pub fn for_dims(dims: usize) -> Self {
        let shift = 2 * dims.saturating_sub(1) as u32;
        Self::new((DEFAULT_NODES >> shift.min(9)).max(64))
    }

    /// `∫₀^∞ f(w) e^{-w} dw`.
    pub fn laplace<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        self.laplace_tensor(1, |w| f(w[0]))
    }

    /// `∫_{[0,∞)^dims} f(w) e^{-Σw} dw` on a tensor grid.
    pub fn laplace_tensor<F>(&self, dims: usize, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64,
    {
        self.laplace_tensor_estimate(dims, f).map(|e| e.value)
    }

    pub fn laplace_tensor_estimate<F>(&self, dims: usize, f: F) -> Result<Estimate>
    where
        F: Fn(&[f64]) -> f64,
    {
        assert!(dims >= 1, "tensor quadrature needs at least one axis");
        let coarse = tensor_sum(dims, self.nodes, &f);
        let fine = tensor_sum(dims, 2 * self.nodes, &f);
        let scale = fine.abs().max(coarse.abs());
        let relative_change = if scale == 0.0 {
            0.0
        } else {
            (fine - coarse).abs() / scale
        };
        if !fine.is_finite() || relative_change > DOUBLING_TOLERANCE {
            return Err(Error::Quadrature {
                coarse,
                fine,
                relative: relative_change,
            });
        }
        Ok(Estimate {
            value: fine,
            coarse,
            relative_change,
        })
    }
}
