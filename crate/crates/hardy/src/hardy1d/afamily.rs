//! The family `w = (2t - at²)⁻²`, `f_w = √(2t - at²)` on `(0, 2/a)` and the
//! eigenfunctions `u_ξ` of `-u'' = (1 + ξ²) w u`.

use std::f64::consts::FRAC_PI_2;

use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::ode::{make_grid, Endpoint, Grading, GridFunction, Interval};
use crate::sl::{apply_l, SLProblem};

use super::{Provenance, WeightFamily1D};

const DEFAULT_NODES: usize = 2001;

fn check_a(a: f64) -> Result<(), Error> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("a must be positive and finite, got {a}")))
    }
}

/// The closed-form pair on `(0, 2/a)`, tabulated on a grid graded toward both
/// ends.
pub fn a_family(a: f64) -> Result<WeightFamily1D, Error> {
    check_a(a)?;
    let iv = Interval::new(0.0, 2.0 / a)?;
    let nodes = make_grid(&iv, iv.default_cutoffs(1e-6), DEFAULT_NODES, Grading::LogBoth)?;
    a_family_on(a, &nodes)
}

pub fn a_family_on(a: f64, nodes: &[f64]) -> Result<WeightFamily1D, Error> {
    check_a(a)?;
    let b = 2.0 / a;
    if nodes.first().is_some_and(|&t| t <= 0.0) || nodes.last().is_some_and(|&t| t >= b) {
        return Err(Error::invalid(format!("nodes must lie inside (0, {b})")));
    }
    let g = move |t: f64| t * (2.0 - a * t);
    let f_w = GridFunction::sample(
        nodes,
        |t| Ok(g(t).sqrt()),
        Some(&|t| Ok((1.0 - a * t) / g(t).sqrt())),
    )?
    .with_tags(Endpoint::Singular, Endpoint::Singular);
    Ok(WeightFamily1D {
        w: CoefficientFn::from_fn(&format!("(2*t - {a:?}*t^2)^(-2)"), move |t| {
            let v = g(t);
            1.0 / (v * v)
        }),
        f_w,
        f_exact: Some(CoefficientFn::from_fn(
            &format!("sqrt(2*t - {a:?}*t^2)"),
            move |t| g(t).sqrt(),
        )),
        provenance: Provenance::AFamily { a },
        iv: Interval::new(0.0, b)?.with_tags(Endpoint::Singular, Endpoint::Singular),
    })
}

/// `u_ξ` tabulated on its window, where the phase runs from `-π/2` to `0`.
#[derive(Debug, Clone)]
pub struct UXi {
    pub a: f64,
    pub m: f64,
    pub xi: f64,
    /// Eigenvalue `1 + ξ²` against `w`.
    pub lambda: f64,
    pub window: (f64, f64),
    pub u: GridFunction,
}

/// `(t_l, t_r) = (2/(M e^{π/ξ} + a), 2/(M + a))`.
pub fn u_xi_window(a: f64, m: f64, xi: f64) -> Result<(f64, f64), Error> {
    check_params(a, m, xi)?;
    Ok((2.0 / (m * (FRAC_PI_2 * 2.0 / xi).exp() + a), 2.0 / (m + a)))
}

fn check_params(a: f64, m: f64, xi: f64) -> Result<(), Error> {
    check_a(a)?;
    for (name, v) in [("M", m), ("xi", xi)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// `(u_ξ(t), u_ξ'(t))` in closed form.
pub fn u_xi_eval(a: f64, m: f64, xi: f64, t: f64) -> (f64, f64) {
    let g = t * (2.0 - a * t);
    let f = g.sqrt();
    let df = (1.0 - a * t) / f;
    let phi = 0.5 * xi * (m * t / (2.0 - a * t)).ln();
    let (s, c) = phi.sin_cos();
    // φ' = ξ / f².
    (f * c, df * c - xi / f * s)
}

/// Time at which the phase equals `phi`.
fn t_of_phase(a: f64, m: f64, xi: f64, phi: f64) -> f64 {
    let e = (2.0 * phi / xi).exp();
    2.0 * e / (m + a * e)
}

pub fn u_xi(a: f64, m: f64, xi: f64) -> Result<UXi, Error> {
    u_xi_with(a, m, xi, DEFAULT_NODES)
}

/// As [`u_xi`] on `n` nodes uniform in the phase.
pub fn u_xi_with(a: f64, m: f64, xi: f64, n: usize) -> Result<UXi, Error> {
    let window = u_xi_window(a, m, xi)?;
    if n < 16 {
        return Err(Error::invalid(format!("u_xi needs at least 16 nodes, got {n}")));
    }
    let mut nodes: Vec<f64> = (0..n)
        .map(|i| t_of_phase(a, m, xi, -FRAC_PI_2 * (1.0 - i as f64 / (n - 1) as f64)))
        .collect();
    nodes[0] = window.0;
    nodes[n - 1] = window.1;
    let u = GridFunction::sample(
        &nodes,
        |t| Ok(u_xi_eval(a, m, xi, t).0),
        Some(&|t| Ok(u_xi_eval(a, m, xi, t).1)),
    )?;
    Ok(UXi {
        a,
        m,
        xi,
        lambda: 1.0 + xi * xi,
        window,
        u,
    })
}

impl UXi {
    /// `max |-u'' - λ w u| / (1 + λ w f)` over the grid interior, with `u''`
    /// from finite differences of the stored derivative.
    pub fn residual(&self) -> Result<f64, Error> {
        let iv = Interval::new(self.window.0, self.window.1)?;
        let lu = apply_l(&SLProblem::free(iv), &self.u)?;
        let a = self.a;
        let mut worst = 0.0f64;
        for (&t, &v) in lu.nodes().iter().zip(lu.values()) {
            let g = t * (2.0 - a * t);
            let lwf = self.lambda / g.powf(1.5);
            let r = v - self.lambda / (g * g) * self.u.eval(t)?;
            worst = worst.max(r.abs() / (1.0 + lwf));
        }
        Ok(worst)
    }

    /// `|u'(t_r) - ((M² - a²)/(4M)) u(t_r)|`.
    pub fn right_condition(&self) -> f64 {
        let (u, du) = u_xi_eval(self.a, self.m, self.xi, self.window.1);
        (du - (self.m * self.m - self.a * self.a) / (4.0 * self.m) * u).abs()
    }

    /// `|u(t_l)|`.
    pub fn left_condition(&self) -> f64 {
        u_xi_eval(self.a, self.m, self.xi, self.window.0).0.abs()
    }

    /// `max(|u| - f_w)` over the grid; nonpositive when the envelope holds.
    pub fn envelope_excess(&self) -> f64 {
        let a = self.a;
        self.u
            .nodes()
            .iter()
            .zip(self.u.values())
            .map(|(&t, &v)| v.abs() - (t * (2.0 - a * t)).sqrt())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max |u - f_w|` over the grid.
    pub fn distance_to_ground_state(&self) -> f64 {
        let a = self.a;
        self.u
            .nodes()
            .iter()
            .zip(self.u.values())
            .map(|(&t, &v)| (v - (t * (2.0 - a * t)).sqrt()).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_values() {
        let fam = a_family(1.0).unwrap();
        assert_eq!(fam.iv.b, 2.0);
        assert!((fam.w.eval(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((fam.f_at(1.0).unwrap() - 1.0).abs() < 1e-15);
        let half = a_family(0.5).unwrap();
        assert_eq!(half.iv.b, 4.0);
        assert!((half.w.eval(2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(a_family(0.0).is_err());
        assert!(a_family(-1.0).is_err());
    }

    #[test]
    fn ground_state_residual() {
        for a in [0.1, 0.5, 1.0, 2.0] {
            let fam = a_family(a).unwrap();
            let r = fam.residual(&SLProblem::free(fam.iv)).unwrap();
            assert!(r < 1e-6, "a = {a}: {r}");
        }
    }

    #[test]
    fn u_xi_right_endpoint_value() {
        let (u, _) = u_xi_eval(1.0, 2.0, 1.0, 2.0 / 3.0);
        assert!((u - (8.0f64 / 9.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn u_xi_properties() {
        let v = u_xi(1.0, 2.0, 1.0).unwrap();
        assert!(v.residual().unwrap() < 1e-7);
        assert!(v.left_condition() < 1e-9);
        assert!(v.right_condition() < 1e-9);
        assert!(v.envelope_excess() <= 1e-15);
        assert_eq!(v.u.lo(), v.window.0);
    }

    #[test]
    fn small_xi_approaches_ground_state() {
        let t = 0.3;
        let (u, _) = u_xi_eval(1.0, 2.0, 1e-6, t);
        assert!((u - (t * (2.0 - t) as f64).sqrt()).abs() < 1e-9);
    }
}
