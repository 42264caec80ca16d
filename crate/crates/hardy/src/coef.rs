//! Evaluable scalar coefficients: parsed expressions, closures, sampled grids.

use std::fmt;
use std::sync::Arc;

use crate::expr::{DomainError, Expr};
use crate::ode::GridFunction;

type EvalFn = dyn Fn(f64) -> Result<f64, DomainError> + Send + Sync;

/// A real function of one variable, shared cheaply between threads.
#[derive(Clone)]
pub struct CoefficientFn {
    f: Arc<EvalFn>,
    label: Arc<str>,
}

impl fmt::Debug for CoefficientFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefficientFn({})", self.label)
    }
}

impl CoefficientFn {
    pub fn from_expr(e: Expr) -> Self {
        let label = e.to_string();
        CoefficientFn {
            f: Arc::new(move |x| e.eval(x)),
            label: label.into(),
        }
    }

    pub fn parse(src: &str) -> Result<Self, crate::expr::ParseError> {
        Expr::parse(src).map(Self::from_expr)
    }

    /// Wraps a plain closure; non-finite results become domain errors.
    pub fn from_fn(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CoefficientFn {
            f: Arc::new(move |x| {
                let v = f(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(DomainError {
                        x,
                        reason: "non-finite value",
                    })
                }
            }),
            label: label.into(),
        }
    }

    pub fn try_from_fn(
        label: &str,
        f: impl Fn(f64) -> Result<f64, DomainError> + Send + Sync + 'static,
    ) -> Self {
        CoefficientFn {
            f: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(&format!("{c:?}"), move |_| c)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn from_grid(label: &str, g: GridFunction) -> Self {
        Self::try_from_fn(label, move |x| g.eval(x))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> Result<f64, DomainError> {
        (self.f)(x)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let me = self.clone();
        Self::try_from_fn(&format!("{s:?}*({})", self.label), move |x| {
            Ok(s * me.eval(x)?)
        })
    }

    pub fn plus(&self, other: &CoefficientFn) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::try_from_fn(&format!("({}) + ({})", self.label, other.label), move |x| {
            Ok(a.eval(x)? + b.eval(x)?)
        })
    }

    pub fn minus(&self, other: &CoefficientFn) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::try_from_fn(&format!("({}) - ({})", self.label, other.label), move |x| {
            Ok(a.eval(x)? - b.eval(x)?)
        })
    }

    pub fn times(&self, other: &CoefficientFn) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::try_from_fn(&format!("({}) * ({})", self.label, other.label), move |x| {
            Ok(a.eval(x)? * b.eval(x)?)
        })
    }

    /// True if the function evaluates to the same constant at a few probe points.
    pub fn is_constant_on(&self, lo: f64, hi: f64, value: f64) -> bool {
        (0..=8).all(|i| {
            let x = lo + (hi - lo) * (0.05 + 0.9 * i as f64 / 8.0);
            matches!(self.eval(x), Ok(v) if v == value)
        })
    }

    pub fn derivative(&self, x: f64) -> Result<f64, DomainError> {
        crate::diff::derivative(|s| self.eval(s), x, default_step(x))
    }

    pub fn second_derivative(&self, x: f64) -> Result<f64, DomainError> {
        crate::diff::second_derivative(|s| self.eval(s), x, default_step(x))
    }
}

/// Initial difference step: relative to |x| so singular points at 0 stay outside the stencil.
pub(crate) fn default_step(x: f64) -> f64 {
    0.05 * x.abs().max(1e-3)
}
