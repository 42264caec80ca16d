//! Liouville normal form of `-y'' + q y - ρ y = 0`: with `s = ∫ √ρ` and
//! `z = ρ^{1/4} y` it becomes `-z_ss + q̂ z = 0`.

use crate::coef::{default_step, CoefficientFn};
use crate::diff;
use crate::error::Error;
use crate::expr::DomainError;
use crate::ode::{make_grid, Grading, GridFunction, Interval};
use crate::quad;

/// `(s, q̂)` with `s(t) = ∫_α^t √ρ` (α the first grid node) and
/// `q̂ = q/ρ - 1 + (ℓ'' - ℓ'²/4)/(4ρ)`, `ℓ = ln ρ`.
pub fn liouville_transform(
    rho: &CoefficientFn,
    q: &CoefficientFn,
    iv: Interval,
) -> Result<(GridFunction, CoefficientFn), Error> {
    let nodes = make_grid(&iv, iv.default_cutoffs(1e-6), 2001, Grading::LogBoth)?;
    liouville_transform_on(rho, q, iv, &nodes)
}

pub fn liouville_transform_on(
    rho: &CoefficientFn,
    q: &CoefficientFn,
    iv: Interval,
    nodes: &[f64],
) -> Result<(GridFunction, CoefficientFn), Error> {
    if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("Liouville transform needs increasing nodes"));
    }
    if !(iv.a <= nodes[0] && nodes[nodes.len() - 1] <= iv.b) {
        return Err(Error::invalid("nodes must lie in the interval"));
    }
    let root = |t: f64| -> Result<f64, DomainError> {
        let r = rho.eval(t)?;
        if r > 0.0 {
            Ok(r.sqrt())
        } else {
            Err(DomainError {
                x: t,
                reason: "rho must be positive",
            })
        }
    };
    let mut s = vec![0.0; nodes.len()];
    for i in 1..nodes.len() {
        s[i] = s[i - 1] + quad::integrate(root, nodes[i - 1], nodes[i], 1e-300, 1e-12)?.value;
    }
    let ds = nodes.iter().map(|&t| root(t)).collect::<Result<Vec<_>, _>>()?;
    let s_map = GridFunction::new(nodes.to_vec(), s, Some(ds))?;

    let (rho, q) = (rho.clone(), q.clone());
    let label = format!("liouville[{}; {}]", rho.label(), q.label());
    let q_hat = CoefficientFn::try_from_fn(&label, move |t| {
        let r = rho.eval(t)?;
        if !(r > 0.0) {
            return Err(DomainError {
                x: t,
                reason: "rho must be positive",
            });
        }
        // Keep the difference stencil inside the interval.
        let room = (t - iv.a).min(iv.b - t);
        let h = default_step(t).min(0.25 * room);
        let ell = |x: f64| rho.eval(x).map(f64::ln);
        let d1 = diff::derivative(ell, t, h)?;
        let d2 = diff::second_derivative(ell, t, h)?;
        Ok(q.eval(t)? / r - 1.0 + (d2 - 0.25 * d1 * d1) / (4.0 * r))
    });
    Ok((s_map, q_hat))
}
