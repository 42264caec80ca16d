//! Ermakov–Pinney solutions `y = √|c1 v1² + c2 v2² + 2 c3 v1 v2|` of
//! `-y'' + q y = k / y³`, built from a normalized solution pair.

use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::ode::{Endpoint, GridFunction, Interval};
use crate::sl::{SolutionPair, WRONSKIAN_RTOL};

use super::{Provenance, WeightFamily1D};

#[derive(Debug, Clone)]
pub struct EPFamily {
    pub pair: SolutionPair,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub k: f64,
}

impl EPFamily {
    /// Requires a pair with Wronskian ±1 and `c3² - c1 c2 = k > 0`.
    pub fn new(pair: SolutionPair, c1: f64, c2: f64, c3: f64, k: f64) -> Result<Self, Error> {
        if ((pair.wronskian.abs()) - 1.0).abs() > WRONSKIAN_RTOL {
            return Err(Error::invalid(format!(
                "Ermakov–Pinney pair needs Wronskian ±1, got {:e}",
                pair.wronskian
            )));
        }
        if !(k > 0.0) {
            return Err(Error::invalid(format!("k must be positive, got {k}")));
        }
        let disc = c3 * c3 - c1 * c2;
        if (disc - k).abs() > 1e-12 * k.max(disc.abs()) {
            return Err(Error::invalid(format!(
                "coefficients give c3² - c1 c2 = {disc}, declared k = {k}"
            )));
        }
        Ok(EPFamily { pair, c1, c2, c3, k })
    }
}

/// `f = √|c1 v1² + c2 v2² + 2 c3 v1 v2|` on the largest zero-free run of the
/// radicand containing the node nearest the reference point, shrunk by one
/// cell at every end where the radicand changed sign or vanished.
pub fn ep_solution(fam: &EPFamily) -> Result<GridFunction, Error> {
    let (v1, v2) = (&fam.pair.v1, &fam.pair.v2);
    let (d1, d2) = match (v1.derivs(), v2.derivs()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::invalid("solution pair needs derivative data")),
    };
    let t = v1.nodes();
    let n = t.len();
    let (c1, c2, c3) = (fam.c1, fam.c2, fam.c3);
    let mut rad = Vec::with_capacity(n);
    let mut half_slope = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b, da, db) = (v1.values()[i], v2.values()[i], d1[i], d2[i]);
        rad.push(c1 * a * a + c2 * b * b + 2.0 * c3 * a * b);
        half_slope.push(c1 * a * da + c2 * b * db + c3 * (da * b + a * db));
    }
    let scale = rad.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !(scale > 0.0) {
        return Err(Error::invalid("Ermakov–Pinney radicand vanishes identically"));
    }
    // Reference node: geometric middle of positive grids, else the midpoint.
    let centre = {
        let c = if t[0] > 0.0 {
            (t[0] * t[n - 1]).sqrt()
        } else {
            0.5 * (t[0] + t[n - 1])
        };
        t.partition_point(|&x| x < c).min(n - 1)
    };
    let tiny = 1e-14 * scale;
    let sign = rad[centre].signum();
    if rad[centre].abs() <= tiny {
        return Err(Error::invalid(
            "Ermakov–Pinney radicand vanishes at the reference node",
        ));
    }
    let ok = |i: usize| rad[i].signum() == sign && rad[i].abs() > tiny;
    let mut lo = centre;
    while lo > 0 && ok(lo - 1) {
        lo -= 1;
    }
    let mut hi = centre;
    while hi + 1 < n && ok(hi + 1) {
        hi += 1;
    }
    let (cut_lo, cut_hi) = (lo > 0, hi + 1 < n);
    if cut_lo {
        lo += 1;
    }
    if cut_hi {
        hi -= 1;
    }
    if hi <= lo {
        return Err(Error::invalid(
            "Ermakov–Pinney radicand leaves no zero-free subinterval",
        ));
    }
    let nodes = t[lo..=hi].to_vec();
    let values: Vec<f64> = rad[lo..=hi].iter().map(|r| r.abs().sqrt()).collect();
    let derivs: Vec<f64> = half_slope[lo..=hi]
        .iter()
        .zip(&values)
        .map(|(s, y)| sign * s / y)
        .collect();
    let tag = |cut: bool, orig: Endpoint| if cut { Endpoint::Regular } else { orig };
    Ok(GridFunction::new(nodes, values, Some(derivs))?
        .with_tags(tag(cut_lo, v1.left), tag(cut_hi, v1.right)))
}

/// Packages `w = k / f⁴` with `f` as its candidate ground state.
pub fn ep_weight(f: &GridFunction, k: f64) -> Result<WeightFamily1D, Error> {
    if let Some(i) = f.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::invalid(format!(
            "f must be positive; f({:e}) = {:e}",
            f.nodes()[i],
            f.values()[i]
        )));
    }
    let g = f.clone();
    let w = CoefficientFn::try_from_fn(&format!("{k:?}/f^4"), move |t| {
        let v = g.eval(t)?;
        Ok(k / (v * v * v * v))
    });
    Ok(WeightFamily1D {
        w,
        f_w: f.clone(),
        f_exact: None,
        provenance: Provenance::Ep { k },
        iv: Interval::new(f.lo(), f.hi())?.with_tags(f.left, f.right),
    })
}
