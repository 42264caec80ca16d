//! Iterated weight series: each step takes the principal solution of the
//! operator minus the weights found so far, pairs it with a second solution
//! and adds the Ermakov–Pinney weight `k / y⁴` built from the pair.

use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::expr::DomainError;
use crate::ode::{make_grid, Grading, GridFunction, Interval, Side};
use crate::sl::{principal_solution, reduction_of_order, SLProblem, SolutionPair};

use super::ep::{ep_solution, ep_weight, EPFamily};
use super::{Provenance, WeightFamily1D};

/// Where step `j` anchors its second solution (and ends its window).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorPolicy {
    /// `m + 1 - ε_{j-1}` with `ε_0 = 0`, `ε_j = ε_{j-1} + 2^{-j}`.
    Margins,
    /// The same anchor at every step.
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct SeriesOptions {
    /// `v2 = α v1 + β · (reduction of order anchored at the window end)`.
    pub alpha: f64,
    pub beta: f64,
    pub anchors: AnchorPolicy,
    /// Replaces the principal-solution pair at the first step.
    pub initial_pair: Option<SolutionPair>,
    /// Base grid; defaults to 2001 nodes graded toward the left end.
    pub nodes: Option<Vec<f64>>,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            alpha: 1.0,
            beta: 1.0,
            anchors: AnchorPolicy::Margins,
            initial_pair: None,
            nodes: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeriesStep {
    pub v1: GridFunction,
    pub v2: GridFunction,
    pub y: GridFunction,
    pub weight: WeightFamily1D,
    pub alpha: f64,
    pub beta: f64,
    /// `k` of the step's Pinney equation after normalizing the pair.
    pub k: f64,
    pub window: (f64, f64),
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SeriesOutput {
    pub steps: Vec<SeriesStep>,
    /// `w̃_j = w_1 + … + w_j`.
    pub partial_sums: Vec<CoefficientFn>,
    /// `y_depth`, a positive solution of `(L - w̃_depth) y = 0`.
    pub solution: GridFunction,
}

fn anchor_at(policy: AnchorPolicy, m: f64, j: usize) -> f64 {
    match policy {
        AnchorPolicy::Fixed(l) => l,
        AnchorPolicy::Margins => {
            let eps: f64 = (1..j).map(|i| 0.5f64.powi(i as i32)).sum();
            m + 1.0 - eps
        }
    }
}

fn combine(a: f64, x: &GridFunction, b: f64, y: &GridFunction) -> Result<GridFunction, Error> {
    let (Some(dx), Some(dy)) = (x.derivs(), y.derivs()) else {
        return Err(Error::invalid("combination needs derivative data"));
    };
    let vals = x.values().iter().zip(y.values()).map(|(u, v)| a * u + b * v).collect();
    let ders = dx.iter().zip(dy).map(|(u, v)| a * u + b * v).collect();
    Ok(GridFunction::new(x.nodes().to_vec(), vals, Some(ders))?.with_tags(x.left, x.right))
}

fn resample(g: &GridFunction, nodes: &[f64]) -> Result<GridFunction, Error> {
    let vals = nodes.iter().map(|&t| g.eval(t)).collect::<Result<Vec<_>, _>>()?;
    let ders = nodes.iter().map(|&t| g.deriv(t)).collect::<Result<Vec<_>, _>>()?;
    Ok(GridFunction::new(nodes.to_vec(), vals, Some(ders))?.with_tags(g.left, g.right))
}

/// Builds `w_1 … w_depth` for `prob` (which must have `p ≡ 1`) on `(a, m + 1)`.
/// `coeffs` holds one `(c1, c2, c3)` per step, or a single triple reused at
/// every step; each needs `c1 > 0`, `c2 ≥ 0`, `c3 > 0`, `c3² - c1 c2 = 1`.
pub fn weight_series(
    prob: &SLProblem,
    m: f64,
    coeffs: &[(f64, f64, f64)],
    depth: usize,
    opts: &SeriesOptions,
) -> Result<SeriesOutput, Error> {
    if depth == 0 {
        return Err(Error::invalid("series depth must be at least 1"));
    }
    if coeffs.is_empty() || (coeffs.len() != 1 && coeffs.len() < depth) {
        return Err(Error::invalid(format!(
            "need one coefficient triple or at least {depth}, got {}",
            coeffs.len()
        )));
    }
    for &(c1, c2, c3) in coeffs {
        if !(c1 > 0.0 && c2 >= 0.0 && c3 > 0.0) || (c3 * c3 - c1 * c2 - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "coefficients ({c1}, {c2}, {c3}) need c1 > 0, c2 ≥ 0, c3 > 0 and c3² - c1 c2 = 1"
            )));
        }
    }
    if !(opts.alpha >= 0.0 && opts.beta > 0.0) {
        return Err(Error::invalid("series needs α ≥ 0 and β > 0"));
    }
    let top = anchor_at(opts.anchors, m, 1);
    let lo_end = prob.iv.a;
    if !(lo_end.is_finite() && lo_end < m && top <= prob.iv.b) {
        return Err(Error::invalid(format!(
            "series window ({lo_end}, {top}) must lie in ({}, {})",
            prob.iv.a, prob.iv.b
        )));
    }
    // Pinney's identity -y'' + q y = k/y³ is for p ≡ 1.
    let mid = 0.5 * (lo_end + m);
    if !prob.p.is_constant_on(lo_end + 1e-3 * (m - lo_end), mid, 1.0) {
        return Err(Error::invalid("weight series requires p ≡ 1"));
    }
    let base = match &opts.nodes {
        Some(n) => n.clone(),
        None => {
            let lo = lo_end + 1e-6 * (top - lo_end);
            make_grid(&Interval::new(lo_end, f64::INFINITY)?, (lo, top), 2001, Grading::LogLeft)?
        }
    };

    let mut steps: Vec<SeriesStep> = Vec::with_capacity(depth);
    let mut partial_sums: Vec<CoefficientFn> = Vec::with_capacity(depth);
    let mut total = CoefficientFn::zero();
    for j in 1..=depth {
        let anchor = anchor_at(opts.anchors, m, j);
        let mut nodes: Vec<f64> = base
            .iter()
            .copied()
            .filter(|&t| t < anchor * (1.0 - 1e-12))
            .collect();
        nodes.push(anchor);
        if nodes.len() < 16 {
            return Err(Error::invalid(format!("step {j}: fewer than 16 nodes below {anchor}")));
        }
        let op = prob.shifted(&total, 1.0);
        let mut note = None;
        let (alpha, beta, pair) = match (j, &opts.initial_pair) {
            (1, Some(p)) => {
                let v1 = resample(&p.v1, &nodes)?;
                let v2 = resample(&p.v2, &nodes)?;
                note = Some("seed pair supplied; α, β not used".to_string());
                (0.0, 1.0, SolutionPair::new(&op, v1, v2)?)
            }
            _ => {
                let probe = steps.last().map(|s| &s.y);
                let v1 = match principal_solution(&op, Side::Left, probe, &nodes) {
                    Ok(v) => v,
                    Err(Error::NoConvergence(why)) if probe.is_some() => {
                        note = Some(format!("principal solution inconclusive ({why}); used y_{}", j - 1));
                        resample(probe.expect("checked"), &nodes)?
                    }
                    Err(e) => return Err(e),
                };
                let red = reduction_of_order(&op, &v1, anchor)?;
                let v2 = combine(opts.alpha, &v1, opts.beta, &red)?;
                (opts.alpha, opts.beta, SolutionPair::new(&op, v1, v2)?)
            }
        };
        let (c1, c2, c3) = coeffs[if coeffs.len() == 1 { 0 } else { j - 1 }];
        // Normalize to Wronskian 1: y is unchanged, k scales by W².
        let w = pair.wronskian;
        let normalized = SolutionPair {
            v1: pair.v1.clone(),
            v2: pair.v2.scaled(1.0 / w),
            wronskian: 1.0,
        };
        let k = w * w * (c3 * c3 - c1 * c2);
        let fam = EPFamily::new(normalized, c1, c2 * w * w, c3 * w, k)?;
        let y = ep_solution(&fam)?;
        let mut weight = ep_weight(&y, k)?;
        weight.provenance = Provenance::Series { term: j };
        total = total.plus(&weight.w);
        log::debug!("series step {j}: window ({:e}, {anchor}), k = {k}", nodes[0]);
        steps.push(SeriesStep {
            v1: pair.v1,
            v2: pair.v2,
            window: (y.lo(), y.hi()),
            y,
            weight,
            alpha,
            beta,
            k,
            note,
        });
        partial_sums.push(total.clone());
    }
    let solution = steps.last().expect("depth ≥ 1").y.clone();
    Ok(SeriesOutput {
        steps,
        partial_sums,
        solution,
    })
}

/// Antiderivative of `1/(c1 + c2 τ² + 2 c3 τ)`.
fn antiderivative(c1: f64, c2: f64, c3: f64, tau: f64) -> f64 {
    if c2 == 0.0 {
        return (c1 + 2.0 * c3 * tau).ln() / (2.0 * c3);
    }
    let d = c3 * c3 - c1 * c2;
    let x = c2 * tau + c3;
    if d > 0.0 {
        let r = d.sqrt();
        ((x - r) / (x + r)).abs().ln() / (2.0 * r)
    } else if d == 0.0 {
        -1.0 / x
    } else {
        let r = (-d).sqrt();
        (x / r).atan() / r
    }
}

/// `(G_1', …, G_depth')` at `t` for the harmonic seed `G_0 = (L - t)/(2Lt)`,
/// with `G_k = F(G_{k-1}) - F(0)`.
fn derivative_chain(l: f64, c1: f64, c2: f64, depth: usize, t: f64) -> Vec<f64> {
    let c3 = (1.0 + c1 * c2).sqrt();
    let mut g = (l - t) / (2.0 * l * t);
    let mut dg = -0.5 / (t * t);
    let f0 = antiderivative(c1, c2, c3, 0.0);
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        dg /= c1 + c2 * g * g + 2.0 * c3 * g;
        g = antiderivative(c1, c2, c3, g) - f0;
        out.push(dg);
    }
    out
}

fn check_closed_form(l: f64, c1: f64, c2: f64, depth: usize) -> Result<(), Error> {
    if !(l > 0.0 && c1 > 0.0 && c2 >= 0.0 && depth >= 1) {
        return Err(Error::invalid(format!(
            "closed form needs L > 0, c1 > 0, c2 ≥ 0, depth ≥ 1; got L = {l}, c1 = {c1}, c2 = {c2}, depth = {depth}"
        )));
    }
    Ok(())
}

fn in_window(l: f64, t: f64) -> Result<(), DomainError> {
    if t > 0.0 && t <= l {
        Ok(())
    } else {
        Err(DomainError {
            x: t,
            reason: "series closed form lives on (0, L]",
        })
    }
}

/// `Σ_{j ≤ depth} (G_j')²` on `(0, L]`.
pub fn series_weight_closed_form(l: f64, c1: f64, c2: f64, depth: usize) -> Result<CoefficientFn, Error> {
    check_closed_form(l, c1, c2, depth)?;
    Ok(CoefficientFn::try_from_fn(
        &format!("series(L={l:?}, c1={c1:?}, c2={c2:?}, depth={depth})"),
        move |t| {
            in_window(l, t)?;
            Ok(derivative_chain(l, c1, c2, depth, t).iter().map(|d| d * d).sum())
        },
    ))
}

/// The single term `(G_term')²`.
pub fn series_term_closed_form(l: f64, c1: f64, c2: f64, term: usize) -> Result<CoefficientFn, Error> {
    check_closed_form(l, c1, c2, term)?;
    Ok(CoefficientFn::try_from_fn(
        &format!("series-term(L={l:?}, c1={c1:?}, c2={c2:?}, term={term})"),
        move |t| {
            in_window(l, t)?;
            let d = derivative_chain(l, c1, c2, term, t)[term - 1];
            Ok(d * d)
        },
    ))
}
