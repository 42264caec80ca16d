//! Intervals, graded node sets and tabulated functions.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::expr::DomainError;

/// Behaviour of an interval end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    Regular,
    Singular,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
    pub left: Endpoint,
    pub right: Endpoint,
}

impl Interval {
    /// Finite ends are tagged singular, infinite ends infinite.
    pub fn new(a: f64, b: f64) -> Result<Self, Error> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::invalid(format!("interval requires a < b, got ({a}, {b})")));
        }
        let tag = |x: f64| {
            if x.is_finite() {
                Endpoint::Singular
            } else {
                Endpoint::Infinite
            }
        };
        Ok(Interval {
            a,
            b,
            left: tag(a),
            right: tag(b),
        })
    }

    pub fn half_line() -> Self {
        Interval::new(0.0, f64::INFINITY).expect("valid")
    }

    pub fn with_tags(mut self, left: Endpoint, right: Endpoint) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn end(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.a,
            Side::Right => self.b,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a < t && t < self.b
    }

    /// Normalization point: 1 on (0, ∞), the midpoint of finite intervals.
    pub fn reference_point(&self) -> f64 {
        match (self.a.is_finite(), self.b.is_finite()) {
            (true, true) => 0.5 * (self.a + self.b),
            (true, false) if self.a == 0.0 => 1.0,
            (true, false) => self.a + 1.0,
            (false, true) => self.b - 1.0,
            (false, false) => 0.0,
        }
    }

    /// Cutoffs `depth` deep into each end: relative to the length at finite
    /// ends, `scale / depth` at infinite ones.
    pub fn default_cutoffs(&self, depth: f64) -> (f64, f64) {
        let len = if self.a.is_finite() && self.b.is_finite() {
            self.b - self.a
        } else {
            1.0
        };
        let lo = if self.a.is_finite() {
            self.a + depth * len
        } else {
            -(self.b.abs() + 1.0) / depth
        };
        let hi = if self.b.is_finite() {
            self.b - depth * len
        } else {
            (self.a.abs() + 1.0) / depth
        };
        (lo, hi)
    }

    /// Signed distance scale used for geometric windows toward `side`.
    pub fn distance_to(&self, side: Side, t: f64) -> f64 {
        match side {
            Side::Left if self.a.is_finite() => t - self.a,
            Side::Right if self.b.is_finite() => self.b - t,
            // Infinite ends: distance is measured by |t| itself.
            _ => t.abs(),
        }
    }

    /// Inverse of [`Interval::distance_to`].
    pub fn point_at_distance(&self, side: Side, d: f64) -> f64 {
        match side {
            Side::Left if self.a.is_finite() => self.a + d,
            Side::Right if self.b.is_finite() => self.b - d,
            Side::Left => -d,
            Side::Right => d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grading {
    Uniform,
    LogLeft,
    LogRight,
    LogBoth,
}

/// Smooth coordinate in which graded grids are uniform.
#[derive(Debug, Clone, Copy)]
enum Chart {
    Identity,
    LogFrom(f64),
    LogTo(f64),
    Logit(f64, f64),
    Asinh,
}

impl Chart {
    fn choose(iv: &Interval, g: Grading) -> Chart {
        let (fa, fb) = (iv.a.is_finite(), iv.b.is_finite());
        match g {
            Grading::Uniform => Chart::Identity,
            Grading::LogLeft if fa => Chart::LogFrom(iv.a),
            Grading::LogRight if fb => Chart::LogTo(iv.b),
            Grading::LogRight if fa => Chart::LogFrom(iv.a),
            Grading::LogBoth if fa && fb => Chart::Logit(iv.a, iv.b),
            Grading::LogBoth if fa => Chart::LogFrom(iv.a),
            Grading::LogBoth if fb => Chart::LogTo(iv.b),
            _ => Chart::Asinh,
        }
    }

    fn fwd(self, t: f64) -> f64 {
        match self {
            Chart::Identity => t,
            Chart::LogFrom(a) => (t - a).ln(),
            Chart::LogTo(b) => -(b - t).ln(),
            Chart::Logit(a, b) => ((t - a) / (b - t)).ln(),
            Chart::Asinh => t.asinh(),
        }
    }

    fn inv(self, s: f64) -> f64 {
        match self {
            Chart::Identity => s,
            Chart::LogFrom(a) => a + s.exp(),
            Chart::LogTo(b) => b - (-s).exp(),
            Chart::Logit(a, b) => {
                // (t - a) / (b - t) = e^s, written to stay accurate near both ends.
                if s <= 0.0 {
                    let e = s.exp();
                    a + (b - a) * e / (1.0 + e)
                } else {
                    let e = (-s).exp();
                    b - (b - a) * e / (1.0 + e)
                }
            }
            Chart::Asinh => s.sinh(),
        }
    }
}

/// `n` strictly increasing nodes from `cutoffs.0` to `cutoffs.1`, graded toward
/// the requested ends.
pub fn make_grid(
    iv: &Interval,
    cutoffs: (f64, f64),
    n: usize,
    grading: Grading,
) -> Result<Vec<f64>, Error> {
    let (lo, hi) = cutoffs;
    if !(iv.a < lo && lo < hi && hi < iv.b) {
        return Err(Error::invalid(format!(
            "cutoffs ({lo}, {hi}) must lie strictly inside ({}, {}) in increasing order",
            iv.a, iv.b
        )));
    }
    if n < 16 {
        return Err(Error::invalid(format!("grid needs at least 16 nodes, got {n}")));
    }
    let chart = Chart::choose(iv, grading);
    let (s0, s1) = (chart.fwd(lo), chart.fwd(hi));
    let mut nodes: Vec<f64> = (0..n)
        .map(|i| chart.inv(s0 + (s1 - s0) * i as f64 / (n - 1) as f64))
        .collect();
    nodes[0] = lo;
    nodes[n - 1] = hi;
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "grid nodes collapse in floating point; reduce n or widen the cutoffs".to_string(),
        ));
    }
    Ok(nodes)
}

/// Log-spaced nodes on `[lo, hi]` (both positive).
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

/// A function tabulated on strictly increasing nodes. Cubic Hermite
/// interpolation when derivatives are stored, piecewise linear otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    derivs: Option<Vec<f64>>,
    pub left: Endpoint,
    pub right: Endpoint,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, derivs: Option<Vec<f64>>) -> Result<Self, Error> {
        if nodes.len() < 2 {
            return Err(Error::invalid("grid function needs at least two nodes".to_string()));
        }
        if values.len() != nodes.len() || derivs.as_ref().is_some_and(|d| d.len() != nodes.len()) {
            return Err(Error::invalid("node/value length mismatch".to_string()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("nodes must be strictly increasing".to_string()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at node t = {:e}",
                nodes[i]
            )));
        }
        if let Some(i) = derivs
            .as_ref()
            .and_then(|d| d.iter().position(|v| !v.is_finite()))
        {
            return Err(Error::invalid(format!(
                "non-finite derivative at node t = {:e}",
                nodes[i]
            )));
        }
        Ok(GridFunction {
            nodes,
            values,
            derivs,
            left: Endpoint::Regular,
            right: Endpoint::Regular,
        })
    }

    /// Tabulates `f` (and optionally `df`) on `nodes`.
    pub fn sample(
        nodes: &[f64],
        f: impl Fn(f64) -> Result<f64, DomainError>,
        df: Option<&dyn Fn(f64) -> Result<f64, DomainError>>,
    ) -> Result<Self, Error> {
        let values = nodes.iter().map(|&t| f(t)).collect::<Result<Vec<_>, _>>()?;
        let derivs = match df {
            Some(df) => Some(nodes.iter().map(|&t| df(t)).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };
        GridFunction::new(nodes.to_vec(), values, derivs)
    }

    pub fn with_tags(mut self, left: Endpoint, right: Endpoint) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> Option<&[f64]> {
        self.derivs.as_deref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    fn locate(&self, x: f64) -> Result<usize, DomainError> {
        if !(x >= self.lo() && x <= self.hi()) {
            return Err(DomainError {
                x,
                reason: "outside the tabulated range",
            });
        }
        let i = self.nodes.partition_point(|&t| t <= x);
        Ok(i.clamp(1, self.nodes.len() - 1) - 1)
    }

    pub fn eval(&self, x: f64) -> Result<f64, DomainError> {
        let i = self.locate(x)?;
        let (t0, t1) = (self.nodes[i], self.nodes[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        if x == t0 {
            return Ok(y0);
        }
        if x == t1 {
            return Ok(y1);
        }
        let h = t1 - t0;
        let s = (x - t0) / h;
        Ok(match &self.derivs {
            Some(d) => {
                let (m0, m1) = (d[i] * h, d[i + 1] * h);
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                    + (s3 - 2.0 * s2 + s) * m0
                    + (-2.0 * s3 + 3.0 * s2) * y1
                    + (s3 - s2) * m1
            }
            None => y0 + s * (y1 - y0),
        })
    }

    /// Derivative of the interpolant (stored value at nodes when available).
    pub fn deriv(&self, x: f64) -> Result<f64, DomainError> {
        let i = self.locate(x)?;
        let (t0, t1) = (self.nodes[i], self.nodes[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let h = t1 - t0;
        Ok(match &self.derivs {
            Some(d) => {
                if x == t0 {
                    return Ok(d[i]);
                }
                if x == t1 {
                    return Ok(d[i + 1]);
                }
                let s = (x - t0) / h;
                let s2 = s * s;
                ((6.0 * s2 - 6.0 * s) * y0 + (6.0 * s - 6.0 * s2) * y1) / h
                    + (3.0 * s2 - 4.0 * s + 1.0) * d[i]
                    + (3.0 * s2 - 2.0 * s) * d[i + 1]
            }
            None => (y1 - y0) / h,
        })
    }

    /// Restriction to nodes `lo..=hi` (indices).
    pub fn slice(&self, lo: usize, hi: usize) -> Result<GridFunction, Error> {
        GridFunction::new(
            self.nodes[lo..=hi].to_vec(),
            self.values[lo..=hi].to_vec(),
            self.derivs.as_ref().map(|d| d[lo..=hi].to_vec()),
        )
    }

    /// Multiplies values (and derivatives) by `s`.
    pub fn scaled(&self, s: f64) -> GridFunction {
        GridFunction {
            nodes: self.nodes.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
            derivs: self.derivs.as_ref().map(|d| d.iter().map(|v| v * s).collect()),
            left: self.left,
            right: self.right,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_left_gaps_shrink_geometrically() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let g = make_grid(&iv, (1e-6, 1.0 - 1e-6), 100, Grading::LogLeft).unwrap();
        assert_eq!(g.len(), 100);
        let r1 = (g[2] - g[1]) / (g[1] - g[0]);
        let r2 = (g[3] - g[2]) / (g[2] - g[1]);
        assert!(r1 > 1.1 && (r1 / r2 - 1.0).abs() < 1e-9, "{r1} {r2}");
    }

    #[test]
    fn log_both_on_half_line_is_symmetric() {
        let iv = Interval::half_line();
        let g = make_grid(&iv, (1e-4, 1e4), 201, Grading::LogBoth).unwrap();
        for i in 0..g.len() {
            let j = g.len() - 1 - i;
            assert!((g[i] * g[j] - 1.0).abs() < 1e-12, "{} {}", g[i], g[j]);
        }
        assert!((g[100] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn logit_grid_clusters_at_both_ends() {
        let iv = Interval::new(0.0, 2.0).unwrap();
        let g = make_grid(&iv, (1e-8, 2.0 - 1e-8), 64, Grading::LogBoth).unwrap();
        assert!(g[1] - g[0] < 1e-8);
        assert!(g[63] - g[62] < 1e-8);
    }

    #[test]
    fn bad_cutoffs_rejected() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        assert!(make_grid(&iv, (2.0, 3.0), 32, Grading::Uniform).is_err());
        assert!(make_grid(&iv, (0.1, 0.9), 8, Grading::Uniform).is_err());
    }

    #[test]
    fn interpolation_hits_nodes_exactly() {
        let nodes = geomspace(0.01, 10.0, 40);
        let g = GridFunction::sample(&nodes, |t| Ok(t.sin()), Some(&|t: f64| Ok(t.cos()))).unwrap();
        for (t, v) in g.nodes().iter().zip(g.values()) {
            assert_eq!(g.eval(*t).unwrap(), *v);
        }
        let x = 3.3;
        assert!((g.eval(x).unwrap() - x.sin()).abs() < 1e-5);
        assert!((g.deriv(x).unwrap() - x.cos()).abs() < 1e-3);
        assert!(g.eval(11.0).is_err());
    }
}
