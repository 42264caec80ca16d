//! Numerical certification of optimal Hardy weights.

pub mod classify;
mod lambda0;
mod report;

pub use classify::{
    classify_with, improper_integral_classify, ClassifyOptions, DivergenceVerdict, GrowthModel,
    VerdictKind, WindowValue,
};
pub use lambda0::{lambda0_rayleigh, Lambda0Estimate};
pub use report::{
    certify_optimality_1d, certify_optimality_1d_with, lambda_inf_oscillation_evidence,
    lambda_inf_oscillation_evidence_on, CertifyOptions, IntegralCheck, OptimalityReport,
    OscillationRun, Verdict, ZeroCount, RESIDUAL_TOL,
};
