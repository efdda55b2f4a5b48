//! Simulation and verification of sample-path regularity bounds for
//! hypercontractive processes and fields.
//!
//! A process is hypercontractive when the moments of its increments grow like
//! `E|Δ|^p ≤ C0^p p^{pι} (E|Δ|²)^{p/2}`. For such processes the
//! Garsia-Rodemich-Rumsey inequality gives explicit pathwise moduli of
//! continuity, Hölder constants and supremum tail bounds. This crate simulates
//! model processes, evaluates those bounds and checks them against the
//! simulated paths.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fields;
pub mod grr;
pub mod holder;
pub mod models;
pub mod moments;
pub mod path;
pub mod quad;
pub mod report;
pub mod seed;
pub mod tails;

pub use error::{Error, Result};
pub use models::{FieldModel, ModelRegistry, ModelSpec, PathModel};
pub use moments::{HyperEstimate, HyperParams};
pub use path::{SampleField, SamplePath};
