//! Hardy weights for Sturm–Liouville and radial elliptic operators, with
//! numerical optimality certificates.

pub mod certify;
pub mod cli;
pub mod coef;
pub mod diff;
pub mod error;
pub mod expr;
pub mod hardy1d;
pub mod nd;
pub mod ode;
pub mod quad;
pub mod sl;

pub use coef::CoefficientFn;
pub use error::{Error, Result};
pub use expr::{eval_expr, parse_expr, DomainError, Expr, ParseError};
