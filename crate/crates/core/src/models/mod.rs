//! Model processes and fields, built by name from a [`ModelSpec`].
//!
//! Each variant implements [`PathModel`] or [`FieldModel`] and is registered
//! in a [`ModelRegistry`] under the name used in specs such as `fbm(0.5)`,
//! `wick(2,0.5)`, `product(fbm(0.5),fbm(0.5))` or `sheet(0.5,0.5)`.

mod fbm;
mod gauss;
mod product;
mod sheet;
mod stub;
mod wick;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use fbm::{fbm_covariance, Fbm};
pub use gauss::LowerFactor;
pub use product::Product;
pub use sheet::FbmSheet;
pub use stub::{Constant, Linear};
pub use wick::{hermite, wick_power, WickChaos};

use crate::error::{invalid, Error, Result};
use crate::moments::HyperParams;
use crate::path::{SampleField, SamplePath};

/// A one-parameter process on `[0,1]`.
pub trait PathModel: Send + Sync + fmt::Debug {
    fn spec(&self) -> ModelSpec;

    /// One path on the uniform grid with `n_points` nodes. Pure in `seed`.
    fn sample(&self, n_points: usize, seed: u64) -> Result<SamplePath>;

    /// `Cov(X_s, X_t)` when known in closed form.
    fn covariance(&self, _s: f64, _t: f64) -> Option<f64> {
        None
    }

    /// Exponent `α` with `E(X_t - X_s)² ≍ |t-s|^{2α}`.
    fn holder_exponent(&self) -> f64;

    /// Analytic `(C0, ι)` when the model has them.
    fn hyper_params(&self) -> Option<HyperParams>;

    /// `sup E(X_t - X_s)² / |t-s|^{2α}` over `[0,1]²`, so that `ρ(u) = σ u^α`
    /// with `σ²` this value dominates the increment metric.
    fn increment_scale(&self) -> f64 {
        numeric_increment_scale(self)
    }
}

/// A field on `[0,1]^n`.
pub trait FieldModel: Send + Sync + fmt::Debug {
    fn spec(&self) -> ModelSpec;

    fn dims(&self) -> usize;

    fn sample(&self, sizes: &[usize], seed: u64) -> Result<SampleField>;

    fn holder_exponents(&self) -> Vec<f64>;

    fn hyper_params(&self) -> Option<HyperParams>;
}

/// `E(X_t - X_s)²` from a closed-form covariance.
pub fn increment_variance(model: &(impl PathModel + ?Sized), s: f64, t: f64) -> Option<f64> {
    Some(model.covariance(t, t)? + model.covariance(s, s)? - 2.0 * model.covariance(s, t)?)
}

/// Sup of the normalized increment variance over a 257-point grid plus
/// near-diagonal pairs. Returns 1 when no covariance is available.
pub fn numeric_increment_scale(model: &(impl PathModel + ?Sized)) -> f64 {
    if model.covariance(0.5, 1.0).is_none() {
        return 1.0;
    }
    let a = model.holder_exponent();
    let n = 257;
    let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut best: f64 = 0.0;
    let mut consider = |s: f64, t: f64| {
        if let Some(v) = increment_variance(model, s, t) {
            let r = v / (t - s).abs().powf(2.0 * a);
            if r.is_finite() {
                best = best.max(r);
            }
        }
    };
    for i in 0..n {
        for j in (i + 1)..n {
            consider(grid[i], grid[j]);
        }
        if i > 0 {
            consider(grid[i] - 1e-6, grid[i]);
        }
    }
    best
}

/// Argument of a model spec: a number or a nested model.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecArg {
    Num(f64),
    Model(ModelSpec),
}

/// Parsed `name(arg, ...)` description of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub args: Vec<SpecArg>,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, args: Vec<SpecArg>) -> Self {
        Self {
            name: name.into(),
            args,
        }
    }

    pub fn fbm(h: f64) -> Self {
        Self::new("fbm", vec![SpecArg::Num(h)])
    }

    pub fn wick(order: u32, h: f64) -> Self {
        Self::new("wick", vec![SpecArg::Num(order as f64), SpecArg::Num(h)])
    }

    pub fn product(a: ModelSpec, b: ModelSpec) -> Self {
        Self::new("product", vec![SpecArg::Model(a), SpecArg::Model(b)])
    }

    pub fn sheet(h1: f64, h2: f64) -> Self {
        Self::new("sheet", vec![SpecArg::Num(h1), SpecArg::Num(h2)])
    }

    pub fn expect_arity(&self, n: usize) -> Result<()> {
        if self.args.len() != n {
            return Err(invalid(format!(
                "{} takes {n} argument(s), got {}",
                self.name,
                self.args.len()
            )));
        }
        Ok(())
    }

    pub fn num(&self, i: usize) -> Result<f64> {
        match self.args.get(i) {
            Some(SpecArg::Num(x)) => Ok(*x),
            _ => Err(invalid(format!("{}: argument {} must be a number", self.name, i + 1))),
        }
    }

    pub fn model(&self, i: usize) -> Result<&ModelSpec> {
        match self.args.get(i) {
            Some(SpecArg::Model(m)) => Ok(m),
            _ => Err(invalid(format!("{}: argument {} must be a model", self.name, i + 1))),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match a {
                SpecArg::Num(x) => write!(f, "{x}")?,
                SpecArg::Model(m) => write!(f, "{m}")?,
            }
        }
        f.write_str(")")
    }
}

struct SpecParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl SpecParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("model spec at offset {}: {what}", self.pos))
    }

    fn spec(&mut self) -> Result<ModelSpec> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || !self.s[start].is_ascii_alphabetic() {
            return Err(self.err("expected a model name"));
        }
        let name = std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .to_ascii_lowercase();
        self.skip_ws();
        let mut args = Vec::new();
        if self.pos < self.s.len() && self.s[self.pos] == b'(' {
            self.pos += 1;
            loop {
                self.skip_ws();
                args.push(self.arg()?);
                self.skip_ws();
                match self.s.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
        }
        Ok(ModelSpec { name, args })
    }

    fn arg(&mut self) -> Result<SpecArg> {
        match self.s.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() => self.spec().map(SpecArg::Model),
            Some(_) => {
                let start = self.pos;
                while self.pos < self.s.len() && !matches!(self.s[self.pos], b',' | b')') {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap().trim();
                text.parse::<f64>()
                    .map(SpecArg::Num)
                    .map_err(|_| self.err(&format!("bad number {text:?}")))
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = SpecParser {
            s: s.as_bytes(),
            pos: 0,
        };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(spec)
    }
}

type PathBuilder = Box<dyn Fn(&ModelSpec, &ModelRegistry) -> Result<Box<dyn PathModel>> + Send + Sync>;
type FieldBuilder = Box<dyn Fn(&ModelSpec) -> Result<Box<dyn FieldModel>> + Send + Sync>;

/// Name-indexed constructors for path and field models.
#[derive(Default)]
pub struct ModelRegistry {
    paths: BTreeMap<String, PathBuilder>,
    fields: BTreeMap<String, FieldBuilder>,
}

impl fmt::Debug for ModelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelRegistry")
            .field("paths", &self.paths.keys().collect::<Vec<_>>())
            .field("fields", &self.fields.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register_path("fbm", |spec, _| {
            spec.expect_arity(1)?;
            Ok(Box::new(Fbm::new(spec.num(0)?)?))
        });
        r.register_path("wick", |spec, _| {
            spec.expect_arity(2)?;
            let order = spec.num(0)?;
            if order.fract() != 0.0 || order < 1.0 {
                return Err(invalid(format!("chaos order must be an integer >= 1, got {order}")));
            }
            Ok(Box::new(WickChaos::new(order as u32, spec.num(1)?)?))
        });
        r.register_path("product", |spec, reg| {
            spec.expect_arity(2)?;
            let a = reg.build_path(spec.model(0)?)?;
            let b = reg.build_path(spec.model(1)?)?;
            Ok(Box::new(Product::new(a, b)))
        });
        r.register_path("const", |spec, _| {
            spec.expect_arity(1)?;
            Ok(Box::new(Constant::new(spec.num(0)?)))
        });
        r.register_path("linear", |spec, _| {
            spec.expect_arity(0)?;
            Ok(Box::new(Linear))
        });
        r.register_field("sheet", |spec| {
            spec.expect_arity(2)?;
            Ok(Box::new(FbmSheet::new(spec.num(0)?, spec.num(1)?)?))
        });
        r
    }

    pub fn register_path<F>(&mut self, name: &str, build: F)
    where
        F: Fn(&ModelSpec, &ModelRegistry) -> Result<Box<dyn PathModel>> + Send + Sync + 'static,
    {
        self.paths.insert(name.to_string(), Box::new(build));
    }

    pub fn register_field<F>(&mut self, name: &str, build: F)
    where
        F: Fn(&ModelSpec) -> Result<Box<dyn FieldModel>> + Send + Sync + 'static,
    {
        self.fields.insert(name.to_string(), Box::new(build));
    }

    pub fn build_path(&self, spec: &ModelSpec) -> Result<Box<dyn PathModel>> {
        let build = self.paths.get(&spec.name).ok_or_else(|| {
            invalid(format!(
                "unknown path model {:?} (known: {})",
                spec.name,
                self.path_names().join(", ")
            ))
        })?;
        build(spec, self)
    }

    pub fn build_field(&self, spec: &ModelSpec) -> Result<Box<dyn FieldModel>> {
        let build = self.fields.get(&spec.name).ok_or_else(|| {
            invalid(format!(
                "unknown field model {:?} (known: {})",
                spec.name,
                self.field_names().join(", ")
            ))
        })?;
        build(spec)
    }

    pub fn is_field(&self, name: &str) -> bool {
        self.fields.contains_key(name)
    }

    pub fn path_names(&self) -> Vec<&str> {
        self.paths.keys().map(String::as_str).collect()
    }

    pub fn field_names(&self) -> Vec<&str> {
        self.fields.keys().map(String::as_str).collect()
    }
}

pub(crate) fn check_hurst(h: f64) -> Result<()> {
    if !(h > 0.0 && h < 1.0) {
        return Err(invalid(format!("Hurst parameter must lie in (0,1), got {h}")));
    }
    Ok(())
}
