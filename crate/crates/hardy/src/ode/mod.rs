//! Linear second-order ODEs `-(p y')' + q y = λ w y` on intervals with
//! singular ends, and Prüfer phase counting.

pub mod dopri;
mod grid;
mod prufer;

pub use dopri::Tolerances;
pub use grid::{geomspace, make_grid, Endpoint, Grading, GridFunction, Interval, Side};
pub use prufer::{pruefer_phase, pruefer_zero_count};

use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::expr::DomainError;

/// Right-hand side of the first-order system for `(y, p y')`.
fn sl_rhs<'a>(
    p: &'a CoefficientFn,
    q: &'a CoefficientFn,
    w: Option<&'a CoefficientFn>,
    lam: f64,
) -> impl FnMut(f64, &[f64; 2]) -> Result<[f64; 2], DomainError> + 'a {
    move |t, u| {
        let pt = p.eval(t)?;
        if pt <= 0.0 {
            return Err(DomainError {
                x: t,
                reason: "p must be positive",
            });
        }
        let mut pot = q.eval(t)?;
        if let Some(w) = w {
            pot -= lam * w.eval(t)?;
        }
        Ok([u[1] / pt, pot * u[0]])
    }
}

/// Solves `-(p y')' + q y = λ w y` with `y(t0) = y0`, `y'(t0) = yp0` and
/// returns `y`, `y'` at `targets` (strictly increasing, either side of `t0`).
#[allow(clippy::too_many_arguments)]
pub fn solve_ivp(
    p: &CoefficientFn,
    q: &CoefficientFn,
    w: Option<&CoefficientFn>,
    lam: f64,
    t0: f64,
    y0: f64,
    yp0: f64,
    targets: &[f64],
) -> Result<GridFunction, Error> {
    solve_ivp_with(p, q, w, lam, t0, y0, yp0, targets, Tolerances::default())
}

#[allow(clippy::too_many_arguments)]
pub fn solve_ivp_with(
    p: &CoefficientFn,
    q: &CoefficientFn,
    w: Option<&CoefficientFn>,
    lam: f64,
    t0: f64,
    y0: f64,
    yp0: f64,
    targets: &[f64],
    tol: Tolerances,
) -> Result<GridFunction, Error> {
    if targets.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("targets must be strictly increasing"));
    }
    let p0 = p.eval(t0)?;
    let state0 = [y0, p0 * yp0];
    let split = targets.partition_point(|&t| t < t0);
    let left: Vec<f64> = targets[..split].iter().rev().copied().collect();
    let right = &targets[split..];
    let mut states = integrate_states(p, q, w, lam, t0, state0, &left, tol)?;
    states.reverse();
    states.extend(integrate_states(p, q, w, lam, t0, state0, right, tol)?);
    let values = states.iter().map(|s| s[0]).collect();
    let derivs = targets
        .iter()
        .zip(&states)
        .map(|(&t, s)| Ok(s[1] / p.eval(t)?))
        .collect::<Result<Vec<_>, DomainError>>()?;
    GridFunction::new(targets.to_vec(), values, Some(derivs))
}

/// Raw `(y, p y')` states at monotone `targets`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_states(
    p: &CoefficientFn,
    q: &CoefficientFn,
    w: Option<&CoefficientFn>,
    lam: f64,
    t0: f64,
    state0: [f64; 2],
    targets: &[f64],
    tol: Tolerances,
) -> Result<Vec<[f64; 2]>, Error> {
    dopri::integrate(sl_rhs(p, q, w, lam), t0, state0, targets, tol)
}
