//! Modified Prüfer phase for `(p y')' + Q y = 0`.
//!
//! With `y = (ρ/√k) sin θ` and `p y' = ρ √k cos θ` the phase obeys
//! `θ' = (k/p) cos²θ + (Q/k) sin²θ + (k'/k) sin θ cos θ`.
//! Zeros of `y` are exactly the crossings of multiples of π, which happen
//! upward because `θ' = k/p > 0` there. The scale `k ≈ √(p |Q|)` keeps the
//! phase speed balanced near singular ends; it does not change the count.

use super::dopri::{integrate, Tolerances};
use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::expr::DomainError;

fn log_scale(p: &CoefficientFn, q: &CoefficientFn, t: f64) -> Result<f64, DomainError> {
    let pt = p.eval(t)?;
    let qt = q.eval(t)?;
    let floor = pt / (1.0 + t * t);
    Ok(0.5 * pt.ln() + 0.25 * (qt * qt + floor * floor).ln())
}

fn log_scale_slope(p: &CoefficientFn, q: &CoefficientFn, t: f64) -> Result<f64, DomainError> {
    let mut h = 1e-5 * t.abs().max(1e-8);
    for _ in 0..40 {
        match (log_scale(p, q, t + h), log_scale(p, q, t - h)) {
            (Ok(a), Ok(b)) => return Ok((a - b) / (2.0 * h)),
            _ => h *= 0.125,
        }
    }
    Err(DomainError {
        x: t,
        reason: "scale derivative stencil leaves the domain",
    })
}

/// Phase at `t_end` starting from `init_angle` at `t_start`.
pub fn pruefer_phase(
    p: &CoefficientFn,
    q_eff: &CoefficientFn,
    t_start: f64,
    t_end: f64,
    init_angle: f64,
) -> Result<f64, Error> {
    let rhs = |t: f64, th: &[f64; 1]| -> Result<[f64; 1], DomainError> {
        let pt = p.eval(t)?;
        if pt <= 0.0 {
            return Err(DomainError {
                x: t,
                reason: "p must be positive",
            });
        }
        let qt = q_eff.eval(t)?;
        let lk = log_scale(p, q_eff, t)?;
        let k = lk.exp();
        let dk = log_scale_slope(p, q_eff, t)?;
        let (s, c) = th[0].sin_cos();
        Ok([k / pt * c * c + qt / k * s * s + dk * s * c])
    };
    let tol = Tolerances {
        rtol: 1e-10,
        atol: 1e-10,
    };
    let out = integrate(rhs, t_start, [init_angle], &[t_end], tol)?;
    Ok(out[0][0])
}

/// Number of zeros on `(t_start, t_end]` of the solution of
/// `-(p y')' = q_eff y` whose Prüfer phase at `t_start` is `init_angle`.
pub fn pruefer_zero_count(
    p: &CoefficientFn,
    q_eff: &CoefficientFn,
    t_start: f64,
    t_end: f64,
    init_angle: f64,
) -> Result<u64, Error> {
    if !(t_start < t_end) {
        return Err(Error::invalid("pruefer_zero_count needs t_start < t_end"));
    }
    let th = pruefer_phase(p, q_eff, t_start, t_end, init_angle)?;
    // A zero landing on t_end within the integration error still counts.
    const SLACK: f64 = 1e-8;
    let crossings = (th / std::f64::consts::PI + SLACK).floor()
        - (init_angle / std::f64::consts::PI + SLACK).floor();
    Ok(crossings.max(0.0) as u64)
}
