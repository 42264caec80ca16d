//! Best constant of `∫ p φ'² + q φ² ≥ λ ∫ w φ²` on a truncated window, from
//! piecewise-linear elements and Sturm-sequence bisection.

use serde::{Deserialize, Serialize};

use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::ode::{make_grid, Grading};
use crate::sl::SLProblem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambda0Estimate {
    pub estimate: f64,
    pub bracket: (f64, f64),
    pub cutoffs: (f64, f64),
    pub mesh: usize,
}

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples `i` and `i + 1`.
struct Tridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// Three-point Gauss–Legendre on [0, 1].
const GAUSS: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

fn assemble(
    prob: &SLProblem,
    w: &CoefficientFn,
    nodes: &[f64],
) -> Result<(Tridiag, Tridiag), Error> {
    // Unknowns are the interior nodes 1..n-1; φ vanishes at both cutoffs.
    let n = nodes.len();
    let m = n - 2;
    let mut k = Tridiag {
        diag: vec![0.0; m],
        off: vec![0.0; m.saturating_sub(1)],
    };
    let mut mass = Tridiag {
        diag: vec![0.0; m],
        off: vec![0.0; m.saturating_sub(1)],
    };
    for e in 0..n - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        // Element matrices in the local basis (1 - s, s).
        let (mut kp, mut kq) = (0.0, [0.0; 3]);
        let mut mw = [0.0; 3];
        for &(s, wt) in &GAUSS {
            let t = a + s * h;
            let (pt, qt, wv) = (prob.p_at(t)?, prob.q.eval(t)?, w.eval(t)?);
            kp += wt * pt / h;
            let (l0, l1) = (1.0 - s, s);
            for (acc, v) in [(&mut kq, qt), (&mut mw, wv)] {
                acc[0] += wt * h * v * l0 * l0;
                acc[1] += wt * h * v * l0 * l1;
                acc[2] += wt * h * v * l1 * l1;
            }
        }
        let ke = [kp + kq[0], -kp + kq[1], kp + kq[2]];
        // Global interior indices of the element's two nodes.
        let (i, j) = (e.checked_sub(1), (e + 1 < n - 1).then_some(e));
        if let Some(i) = i {
            k.diag[i] += ke[0];
            mass.diag[i] += mw[0];
        }
        if let Some(j) = j {
            k.diag[j] += ke[2];
            mass.diag[j] += mw[2];
        }
        if let (Some(i), Some(_)) = (i, j) {
            k.off[i] += ke[1];
            mass.off[i] += mw[1];
        }
    }
    Ok((k, mass))
}

/// Number of eigenvalues of `K x = λ M x` below `sigma`: the negative pivots
/// of the LDLᵀ factorization of `K - σ M` (Sylvester inertia).
fn count_below(k: &Tridiag, mass: &Tridiag, sigma: f64) -> usize {
    let m = k.diag.len();
    let mut count = 0;
    let mut d = 0.0f64;
    for i in 0..m {
        let a = k.diag[i] - sigma * mass.diag[i];
        d = if i == 0 {
            a
        } else {
            let b = k.off[i - 1] - sigma * mass.off[i - 1];
            a - b * b / d
        };
        if d == 0.0 {
            // Perturb an exact zero pivot; the count is unaffected generically.
            d = -f64::EPSILON * a.abs().max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of the form against `w` with Dirichlet conditions at
/// `cutoffs`, on `mesh` elements graded logarithmically toward finite ends.
pub fn lambda0_rayleigh(
    prob: &SLProblem,
    w: &CoefficientFn,
    cutoffs: (f64, f64),
    mesh: usize,
) -> Result<Lambda0Estimate, Error> {
    if mesh < 16 {
        return Err(Error::invalid(format!("mesh needs at least 16 elements, got {mesh}")));
    }
    let nodes = make_grid(&prob.iv, cutoffs, mesh + 1, Grading::LogBoth)?;
    let (k, mass) = assemble(prob, w, &nodes)?;
    if let Some(i) = mass.diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::invalid(format!(
            "mass matrix singular: w vanishes near t = {:e}",
            nodes[i + 1]
        )));
    }
    let count = |s: f64| count_below(&k, &mass, s);
    let mut lo = -1.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        if count(lo) == 0 {
            break;
        }
        lo *= 2.0;
    }
    for _ in 0..200 {
        if count(hi) >= 1 {
            break;
        }
        hi *= 2.0;
    }
    if count(lo) != 0 || count(hi) == 0 {
        return Err(Error::NoConvergence("could not bracket the lowest eigenvalue".into()));
    }
    while hi - lo > 1e-8 * (1.0 + 0.5 * (lo + hi).abs()) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Lambda0Estimate {
        estimate: 0.5 * (lo + hi),
        bracket: (lo, hi),
        cutoffs,
        mesh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::Interval;
    use std::f64::consts::PI;

    #[test]
    fn sine_ground_state() {
        let prob = SLProblem::free(Interval::new(-1.0, PI + 1.0).unwrap());
        let one = CoefficientFn::constant(1.0);
        let coarse = lambda0_rayleigh(&prob, &one, (0.0, PI), 200).unwrap();
        let fine = lambda0_rayleigh(&prob, &one, (0.0, PI), 400).unwrap();
        // Graded meshes still converge at second order.
        assert!(fine.estimate > 1.0 && coarse.estimate > fine.estimate);
        assert!((fine.estimate - 1.0) < 1e-3, "{}", fine.estimate);
        let ratio = (coarse.estimate - 1.0) / (fine.estimate - 1.0);
        assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
        assert!(fine.bracket.1 - fine.bracket.0 <= 1e-8 * (1.0 + fine.estimate));
    }

    #[test]
    fn truncated_hardy_constant_matches_log_formula() {
        // On (ε, R) with w = 1/(4t²) the eigenfunctions are √t sin(ν ln(t/ε)),
        // λ = 1 + 4ν², ν = π / ln(R/ε).
        let prob = SLProblem::free(Interval::half_line());
        let w = CoefficientFn::from_fn("1/(4t^2)", |t| 0.25 / (t * t));
        let est = lambda0_rayleigh(&prob, &w, (1e-2, 1e2), 2000).unwrap();
        let nu = PI / (1e4f64).ln();
        assert!((est.estimate - (1.0 + 4.0 * nu * nu)).abs() < 1e-4, "{}", est.estimate);
    }

    #[test]
    fn vanishing_weight_is_singular() {
        let prob = SLProblem::free(Interval::new(0.0, 1.0).unwrap());
        let w = CoefficientFn::from_fn("step", |t| if t < 0.5 { 0.0 } else { 1.0 });
        assert!(lambda0_rayleigh(&prob, &w, (0.1, 0.9), 100).is_err());
    }

    #[test]
    fn negative_potential_gives_negative_estimate() {
        let q = CoefficientFn::constant(-20.0);
        let prob = SLProblem::new(CoefficientFn::constant(1.0), q, Interval::new(0.0, PI).unwrap());
        let est = lambda0_rayleigh(&prob, &CoefficientFn::constant(1.0), (1e-6, PI - 1e-6), 400)
            .unwrap();
        assert!((est.estimate + 19.0).abs() < 1e-2, "{}", est.estimate);
    }
}
