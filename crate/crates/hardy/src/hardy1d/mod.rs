//! One-dimensional Hardy-weight families: Ermakov–Pinney constructions, the
//! `(2t - at²)⁻²` family and its oscillating eigenfunctions, iterated weight
//! series and the Liouville normal form.

mod afamily;
mod ep;
mod liouville;
mod series;

pub use afamily::{a_family, a_family_on, u_xi, u_xi_eval, u_xi_window, u_xi_with, UXi};
pub use ep::{ep_solution, ep_weight, EPFamily};
pub use liouville::{liouville_transform, liouville_transform_on};
pub use series::{
    series_term_closed_form, series_weight_closed_form, weight_series, AnchorPolicy,
    SeriesOptions, SeriesOutput, SeriesStep,
};

use serde::{Deserialize, Serialize};

use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::expr::DomainError;
use crate::ode::{GridFunction, Interval};
use crate::sl::{apply_l, SLProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Ep { k: f64 },
    AFamily { a: f64 },
    Classical,
    Series { term: usize },
    External,
}

/// A weight `w` with a positive solution `f_w` of `(L - w) f = 0`.
#[derive(Debug, Clone)]
pub struct WeightFamily1D {
    pub w: CoefficientFn,
    pub f_w: GridFunction,
    /// Closed form of `f_w`, when known; lets certification look past the grid.
    pub f_exact: Option<CoefficientFn>,
    pub provenance: Provenance,
    pub iv: Interval,
}

impl WeightFamily1D {
    /// `f_w(t)`, from the closed form when available.
    pub fn f_at(&self, t: f64) -> Result<f64, DomainError> {
        match &self.f_exact {
            Some(f) => f.eval(t),
            None => self.f_w.eval(t),
        }
    }

    /// `f_w` as a coefficient function.
    pub fn f_fn(&self) -> CoefficientFn {
        match &self.f_exact {
            Some(f) => f.clone(),
            None => CoefficientFn::from_grid("f_w", self.f_w.clone()),
        }
    }

    /// `sup |L f_w - w f_w| / (1 + sup |w f_w|)` over the grid interior.
    pub fn residual(&self, prob: &SLProblem) -> Result<f64, Error> {
        let lf = apply_l(prob, &self.f_w)?;
        let mut num = 0.0f64;
        let mut scale = 0.0f64;
        for (&t, &v) in lf.nodes().iter().zip(lf.values()) {
            let wf = self.w.eval(t)? * self.f_w.eval(t)?;
            num = num.max((v - wf).abs());
            scale = scale.max(wf.abs());
        }
        Ok(num / (1.0 + scale))
    }
}

/// The classical pair `w = 1/(4t²)`, `f_w = √(2t)` of `-y''` tabulated on `nodes`.
pub fn classical_family(iv: Interval, nodes: &[f64]) -> Result<WeightFamily1D, Error> {
    if nodes.first().is_some_and(|&t| t <= 0.0) {
        return Err(Error::invalid("classical family lives on t > 0"));
    }
    let f_w = GridFunction::sample(
        nodes,
        |t: f64| Ok((2.0 * t).sqrt()),
        Some(&|t: f64| Ok(1.0 / (2.0 * t).sqrt())),
    )?;
    Ok(WeightFamily1D {
        w: CoefficientFn::from_fn("1/(4*t^2)", |t| 0.25 / (t * t)),
        f_w,
        f_exact: Some(CoefficientFn::from_fn("sqrt(2*t)", |t| {
            if t >= 0.0 {
                (2.0 * t).sqrt()
            } else {
                f64::NAN
            }
        })),
        provenance: Provenance::Classical,
        iv,
    })
}
