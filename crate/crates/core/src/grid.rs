//! Sampled functions: piecewise-linear interpolation on 1-D or product grids,
//! and their CSV form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{Piece, Piecewise};
use crate::spaces::Ball;

/// Samples on a (product) grid, interpolated multilinearly and zero outside.
/// Values are stored row-major with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Ball>,
}

fn check_axis(axis: &[f64]) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::invalid("each axis needs at least two samples"));
    }
    for w in axis.windows(2) {
        if !(w[0] < w[1]) || !w[1].is_finite() || !w[0].is_finite() {
            return Err(Error::invalid(format!("sample points must be finite and strictly increasing ({} then {})", w[0], w[1])));
        }
    }
    Ok(())
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::product(vec![xs], values)
    }

    pub fn product(axes: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("grid needs at least one axis"));
        }
        for a in &axes {
            check_axis(a)?;
        }
        let n: usize = axes.iter().map(|a| a.len()).product();
        if values.len() != n {
            return Err(Error::invalid(format!("expected {n} values, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values must be finite"));
        }
        Ok(GridFunction { axes, values, support: None })
    }

    pub fn sample(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, v)
    }

    pub fn with_support(mut self, b: Ball) -> Result<Self> {
        if self.dim() == 1 {
            let (lo, hi) = (b.center[0] - b.radius, b.center[0] + b.radius);
            for (x, v) in self.axes[0].iter().zip(&self.values) {
                if *v != 0.0 && (*x < lo || *x > hi) {
                    return Err(Error::invalid(format!("nonzero sample at {x} outside the declared support")));
                }
            }
        }
        self.support = Some(b);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// The linear interpolant as a piecewise polynomial (1-D grids only).
    pub fn to_piecewise(&self) -> Result<Piecewise<f64>> {
        if self.dim() != 1 {
            return Err(Error::Unsupported("product grid has no 1-D piecewise form".into()));
        }
        let xs = &self.axes[0];
        let pieces = (0..xs.len() - 1)
            .map(|i| {
                let (x0, x1, v0, v1) = (xs[i], xs[i + 1], self.values[i], self.values[i + 1]);
                let slope = (v1 - v0) / (x1 - x0);
                let coeffs = if slope == 0.0 { vec![v0] } else { vec![v0 - slope * x0, slope] };
                Piece { from: x0, to: x1, coeffs }
            })
            .collect();
        Piecewise::new(pieces)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() {
            return f64::NAN;
        }
        // multilinear: accumulate over the 2^n cell corners
        let mut idx = Vec::with_capacity(x.len());
        for (a, &xi) in self.axes.iter().zip(x) {
            if xi < a[0] || xi > a[a.len() - 1] {
                return 0.0;
            }
            let j = a.partition_point(|&v| v <= xi).clamp(1, a.len() - 1) - 1;
            let w = (xi - a[j]) / (a[j + 1] - a[j]);
            idx.push((j, w));
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << x.len()) {
            let mut flat = 0;
            let mut weight = 1.0;
            for (d, &(j, w)) in idx.iter().enumerate() {
                let up = (corner >> d) & 1 == 1;
                flat = flat * self.axes[d].len() + j + up as usize;
                weight *= if up { w } else { 1.0 - w };
            }
            if weight != 0.0 {
                acc += weight * self.values[flat];
            }
        }
        acc
    }

    /// Parses CSV with header `x,value` or `x1,…,xn,value`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols.last() != Some(&"value") {
            return Err(Error::Parse { line: hline + 1, message: format!("expected header `x,value` or `x1,...,xn,value`, got {header:?}") });
        }
        let n = cols.len() - 1;
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        for (i, l) in lines {
            let fields: Vec<&str> = l.split(',').map(str::trim).collect();
            if fields.len() != n + 1 {
                return Err(Error::Parse { line: i + 1, message: format!("expected {} fields, got {}", n + 1, fields.len()) });
            }
            let nums = fields
                .iter()
                .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::Parse { line: i + 1, message: format!("non-numeric or non-finite field in {l:?}") })?;
            rows.push((i + 1, nums));
        }
        if rows.len() < 2 {
            return Err(Error::Parse { line: hline + 1, message: "need at least two samples".into() });
        }
        if n == 1 {
            for w in rows.windows(2) {
                if !(w[0].1[0] < w[1].1[0]) {
                    return Err(Error::Parse { line: w[1].0, message: "first column must be strictly increasing".into() });
                }
            }
            let (xs, vs) = rows.iter().map(|(_, r)| (r[0], r[1])).unzip();
            return GridFunction::new(xs, vs).map_err(|e| Error::Parse { line: hline + 1, message: e.to_string() });
        }
        let mut axes: Vec<Vec<f64>> = (0..n)
            .map(|d| {
                let mut a: Vec<f64> = rows.iter().map(|(_, r)| r[d]).collect();
                a.sort_by(|x, y| x.partial_cmp(y).unwrap());
                a.dedup();
                a
            })
            .collect();
        let total: usize = axes.iter().map(|a| a.len()).product();
        if total != rows.len() {
            return Err(Error::Parse { line: rows.last().unwrap().0, message: format!("{} rows do not form a full product grid of {total} points", rows.len()) });
        }
        let mut values = vec![f64::NAN; total];
        for (line, r) in &rows {
            let mut flat = 0;
            for d in 0..n {
                flat = flat * axes[d].len() + axes[d].partition_point(|&v| v < r[d]);
            }
            if !values[flat].is_nan() {
                return Err(Error::Parse { line: *line, message: "duplicate grid point".into() });
            }
            values[flat] = r[n];
        }
        let axes = std::mem::take(&mut axes);
        GridFunction::product(axes, values).map_err(|e| Error::Parse { line: hline + 1, message: e.to_string() })
    }

    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = if n == 1 {
            "x,value\n".to_string()
        } else {
            let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            format!("{},value\n", names.join(","))
        };
        let sizes: Vec<usize> = self.axes.iter().map(|a| a.len()).collect();
        for (flat, v) in self.values.iter().enumerate() {
            let mut rem = flat;
            let mut coords = vec![0.0; n];
            for d in (0..n).rev() {
                coords[d] = self.axes[d][rem % sizes[d]];
                rem /= sizes[d];
            }
            let cs: Vec<String> = coords.iter().map(|c| format!("{c}")).collect();
            out.push_str(&format!("{},{v}\n", cs.join(",")));
        }
        out
    }
}
