//! Sample paths and fields on uniform grids, with their CSV encoding.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::report::fmt_f64;

/// One realization of a process on the uniform grid `i / (N-1)`, `i = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: Vec<f64>,
    values: Vec<f64>,
}

pub(crate) fn uniform_grid(n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n).map(|i| i as f64 / m).collect()
}

impl SamplePath {
    /// Wraps values observed on the uniform grid with `values.len()` points.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("a sample path needs at least 2 grid points"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!("non-finite value at grid index {i}")));
        }
        Ok(Self {
            grid: uniform_grid(values.len()),
            values,
        })
    }

    pub fn from_fn(n_points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n_points < 2 {
            return Err(invalid("a sample path needs at least 2 grid points"));
        }
        Self::new(uniform_grid(n_points).into_iter().map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid spacing `1 / (N-1)`.
    pub fn step(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }

    /// Index of the grid node at `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        grid_index(t, self.len())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt_f64(*t), fmt_f64(*v));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_rows(text, 2)?;
        let n = rows.len();
        if n < 2 {
            return Err(Error::Parse("path CSV needs at least 2 rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            let want = i as f64 / (n - 1) as f64;
            if (row[0] - want).abs() > 1e-9 {
                return Err(Error::Parse(format!(
                    "row {i}: t = {} is not on the uniform grid (expected {want})",
                    row[0]
                )));
            }
        }
        Self::new(rows.into_iter().map(|r| r[1]).collect())
    }
}

pub(crate) fn grid_index(t: f64, n: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OffGrid(format!("{t}")));
    }
    let m = (n - 1) as f64;
    let k = (t * m).round();
    if (k - t * m).abs() > 1e-9 * m.max(1.0) {
        return Err(Error::OffGrid(format!("{t}")));
    }
    Ok(k as usize)
}

fn parse_rows(text: &str, min_cols: usize) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let cols = header.split(',').count();
    if cols < min_cols {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            match row {
                Ok(r) if r.len() == cols => Ok(r),
                Ok(_) => Err(Error::Parse(format!("row {}: expected {cols} columns", i + 1))),
                Err(e) => Err(Error::Parse(format!("row {}: {e}", i + 1))),
            }
        })
        .collect()
}

/// One realization of a field on the product grid of `[0,1]^n`.
///
/// Values are stored row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleField {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

fn strides_for(sizes: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; sizes.len()];
    for k in (0..sizes.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * sizes[k + 1];
    }
    strides
}

impl SampleField {
    pub fn new(sizes: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(invalid("a field needs at least one axis"));
        }
        if sizes.iter().any(|&s| s < 2) {
            return Err(invalid("every field axis needs at least 2 grid points"));
        }
        let count: usize = sizes.iter().product();
        if count != values.len() {
            return Err(invalid(format!(
                "field has {} values but grid {:?} has {count} nodes",
                values.len(),
                sizes
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!("non-finite field value at flat index {i}")));
        }
        Ok(Self {
            strides: strides_for(&sizes),
            sizes,
            values,
        })
    }

    pub fn from_fn(sizes: &[usize], f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if sizes.iter().any(|&s| s < 2) {
            return Err(invalid("every field axis needs at least 2 grid points"));
        }
        let count: usize = sizes.iter().product();
        let strides = strides_for(sizes);
        let mut x = vec![0.0; sizes.len()];
        let values = (0..count)
            .map(|flat| {
                for k in 0..sizes.len() {
                    let i = (flat / strides[k]) % sizes[k];
                    x[k] = i as f64 / (sizes[k] - 1) as f64;
                }
                f(&x)
            })
            .collect();
        Self::new(sizes.to_vec(), values)
    }

    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn steps(&self) -> Vec<f64> {
        self.sizes.iter().map(|&s| 1.0 / (s - 1) as f64).collect()
    }

    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    #[inline]
    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    /// Grid indices of a point given in coordinates.
    pub fn indices_of(&self, point: &[f64]) -> Result<Vec<usize>> {
        if point.len() != self.dims() {
            return Err(invalid(format!(
                "point has {} coordinates, field has {} axes",
                point.len(),
                self.dims()
            )));
        }
        point
            .iter()
            .zip(&self.sizes)
            .map(|(&t, &n)| grid_index(t, n).map_err(|_| Error::OffGrid(format!("{point:?}"))))
            .collect()
    }

    /// Keeps every `stride`-th node along each axis (the last node must be kept).
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        if stride == 0 || self.sizes.iter().any(|&s| (s - 1) % stride != 0) {
            return Err(invalid(format!(
                "stride {stride} does not divide the grid intervals {:?}",
                self.sizes
            )));
        }
        let sizes: Vec<usize> = self.sizes.iter().map(|&s| (s - 1) / stride + 1).collect();
        let sub_strides = strides_for(&sizes);
        let count: usize = sizes.iter().product();
        let mut idx = vec![0; sizes.len()];
        let values = (0..count)
            .map(|flat| {
                for k in 0..sizes.len() {
                    idx[k] = ((flat / sub_strides[k]) % sizes[k]) * stride;
                }
                self.at(&idx)
            })
            .collect();
        Self::new(sizes, values)
    }

    pub fn to_csv(&self) -> String {
        let n = self.dims();
        let mut out = String::new();
        for k in 1..=n {
            let _ = write!(out, "t{k},");
        }
        out.push_str("value\n");
        for (flat, v) in self.values.iter().enumerate() {
            for k in 0..n {
                let i = (flat / self.strides[k]) % self.sizes[k];
                let t = i as f64 / (self.sizes[k] - 1) as f64;
                let _ = write!(out, "{},", fmt_f64(t));
            }
            let _ = writeln!(out, "{}", fmt_f64(*v));
        }
        out
    }

    /// Reads a field written by [`SampleField::to_csv`] (row-major node order).
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_rows(text, 2)?;
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if cols < 2 {
            return Err(Error::Parse("field CSV needs coordinate and value columns".into()));
        }
        let n = cols - 1;
        let mut sizes = Vec::with_capacity(n);
        for k in 0..n {
            let mut coords: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            coords.sort_by(f64::total_cmp);
            coords.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            sizes.push(coords.len());
        }
        let field = Self::new(sizes, rows.iter().map(|r| r[n]).collect())?;
        for (flat, row) in rows.iter().enumerate() {
            for (k, coord) in row.iter().take(n).enumerate() {
                let i = (flat / field.strides[k]) % field.sizes[k];
                let want = i as f64 / (field.sizes[k] - 1) as f64;
                if (coord - want).abs() > 1e-9 {
                    return Err(Error::Parse(format!(
                        "row {flat}: coordinates are not in row-major grid order"
                    )));
                }
            }
        }
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_or_nonfinite_paths() {
        assert!(SamplePath::new(vec![0.0]).is_err());
        assert!(SamplePath::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let p = SamplePath::from_fn(5, |t| t).unwrap();
        assert_eq!(p.grid()[0], 0.0);
        assert_eq!(p.grid()[4], 1.0);
        assert_eq!(p.index_of(0.75).unwrap(), 3);
        assert!(p.index_of(0.3).is_err());
    }

    #[test]
    fn path_csv_round_trip_is_bitwise() {
        let p = SamplePath::from_fn(17, |t| (7.0 * t).sin() / 3.0).unwrap();
        let csv = p.to_csv();
        assert!(csv.starts_with("t,value\n"));
        let q = SamplePath::from_csv(&csv).unwrap();
        for (a, b) in p.values().iter().zip(q.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn field_layout_and_csv() {
        let f = SampleField::from_fn(&[3, 4], |x| x[0] + 10.0 * x[1]).unwrap();
        assert_eq!(f.at(&[2, 0]), 1.0);
        assert!((f.at(&[0, 3]) - 10.0).abs() < 1e-15);
        let csv = f.to_csv();
        assert!(csv.starts_with("t1,t2,value\n"));
        let g = SampleField::from_csv(&csv).unwrap();
        assert_eq!(g.sizes(), &[3, 4]);
        assert_eq!(f.values(), g.values());
    }

    #[test]
    fn field_subsample_keeps_corners() {
        let f = SampleField::from_fn(&[9, 5], |x| x[0] * x[1]).unwrap();
        let g = f.subsample(2).unwrap();
        assert_eq!(g.sizes(), &[5, 3]);
        assert_eq!(g.at(&[4, 2]), 1.0);
        assert!(f.subsample(3).is_err());
    }

    #[test]
    fn value_count_must_match_grid() {
        assert!(SampleField::new(vec![2, 3], vec![0.0; 5]).is_err());
    }
}
