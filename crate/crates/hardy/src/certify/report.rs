//! Optimality reports for one-dimensional weights: the four improper
//! integrals of the ground state, oscillation beyond the critical constant,
//! and a truncated estimate of the best constant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::hardy1d::WeightFamily1D;
use crate::ode::{pruefer_zero_count, Interval, Side};
use crate::sl::SLProblem;

use super::classify::{classify_with, ClassifyOptions, DivergenceVerdict, GrowthModel, VerdictKind};
use super::lambda0::{lambda0_rayleigh, Lambda0Estimate};

/// Residual bound for the ground state relative to `1 + sup |w f|`.
pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Optimal,
    CriticalButPositiveCriticalSuspected,
    NotCritical,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralCheck {
    /// `"1/(p f^2)"` or `"w f^2"`.
    pub integrand: String,
    pub verdict: DivergenceVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub cutoff: f64,
    pub zeros: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationRun {
    pub xi: f64,
    pub lambda: f64,
    pub left: Vec<ZeroCount>,
    pub right: Vec<ZeroCount>,
    /// Counts at both ends increase across the shrinking windows.
    pub growing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub integrals: Vec<IntegralCheck>,
    pub lambda0: Option<Lambda0Estimate>,
    pub oscillation: Vec<OscillationRun>,
    pub residual: Option<f64>,
    pub verdict: Verdict,
    pub assumptions: Vec<String>,
}

impl OptimalityReport {
    pub fn integral(&self, integrand: &str, side: Side) -> Option<&DivergenceVerdict> {
        self.integrals
            .iter()
            .find(|c| c.integrand == integrand && c.verdict.side == side)
            .map(|c| &c.verdict)
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub classify: ClassifyOptions,
    pub xis: Vec<f64>,
    /// Geometric end-windows for the zero counts.
    pub oscillation_windows: usize,
    /// Mesh for the best-constant estimate; `None` skips it.
    pub lambda0_mesh: Option<usize>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            classify: ClassifyOptions::default(),
            xis: vec![1.0],
            oscillation_windows: 6,
            lambda0_mesh: Some(2000),
        }
    }
}

fn inconclusive(side: Side, reference: f64) -> DivergenceVerdict {
    DivergenceVerdict {
        kind: VerdictKind::Inconclusive,
        side,
        model: GrowthModel::Unfitted,
        fit_residual: f64::NAN,
        windows: Vec::new(),
        limit: None,
        tail: None,
        reference,
    }
}

/// Largest window count whose cutoffs stay within `[lo, hi]`.
fn windows_inside(iv: &Interval, side: Side, c: f64, ratio: f64, lo: f64, hi: f64, max: usize) -> usize {
    let d0 = iv.distance_to(side, c);
    let inf = !iv.end(side).is_finite();
    let mut j = 0;
    while j < max {
        let d = if inf {
            d0 / ratio.powi(j as i32 + 1)
        } else {
            d0 * ratio.powi(j as i32 + 1)
        };
        let t = iv.point_at_distance(side, d);
        if !(lo <= t && t <= hi) {
            break;
        }
        j += 1;
    }
    j
}

pub fn certify_optimality_1d(prob: &SLProblem, fam: &WeightFamily1D) -> Result<OptimalityReport, Error> {
    certify_optimality_1d_with(prob, fam, &CertifyOptions::default())
}

pub fn certify_optimality_1d_with(
    prob: &SLProblem,
    fam: &WeightFamily1D,
    opts: &CertifyOptions,
) -> Result<OptimalityReport, Error> {
    if let Some(i) = fam.f_w.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::invalid(format!(
            "f_w must be positive; f_w({:e}) = {:e}",
            fam.f_w.nodes()[i],
            fam.f_w.values()[i]
        )));
    }
    let iv = prob.iv;
    let f = fam.f_fn();
    let (glo, ghi) = (fam.f_w.lo(), fam.f_w.hi());
    let exact = fam.f_exact.is_some();
    let c = match opts.classify.reference {
        Some(c) => c,
        None => {
            let c = iv.reference_point();
            if exact || (glo < c && c < ghi) {
                c
            } else if glo > 0.0 {
                (glo * ghi).sqrt()
            } else {
                0.5 * (glo + ghi)
            }
        }
    };
    let mut assumptions = vec![
        "Hölder regularity of p unchecked".to_string(),
        "divergence judged from finitely many geometric windows".to_string(),
    ];
    if !exact {
        assumptions.push("f_w known only on its grid; windows limited to the grid".to_string());
    }

    let inv = {
        let (p, f) = (prob.p.clone(), f.clone());
        CoefficientFn::try_from_fn("1/(p f^2)", move |t| {
            let v = f.eval(t)?;
            Ok(1.0 / (p.eval(t)? * v * v))
        })
    };
    let mass = {
        let (w, f) = (fam.w.clone(), f.clone());
        CoefficientFn::try_from_fn("w f^2", move |t| {
            let v = f.eval(t)?;
            Ok(w.eval(t)? * v * v)
        })
    };
    let jobs = [
        ("1/(p f^2)", &inv, Side::Left),
        ("1/(p f^2)", &inv, Side::Right),
        ("w f^2", &mass, Side::Left),
        ("w f^2", &mass, Side::Right),
    ];
    let integrals = jobs
        .par_iter()
        .map(|&(name, g, side)| {
            let windows = if exact {
                opts.classify.windows
            } else {
                windows_inside(&iv, side, c, opts.classify.ratio, glo, ghi, opts.classify.windows)
            };
            let verdict = if windows < 4 {
                inconclusive(side, c)
            } else {
                let o = ClassifyOptions {
                    windows,
                    reference: Some(c),
                    ..opts.classify
                };
                classify_with(g, side, &iv, &o)?
            };
            Ok(IntegralCheck {
                integrand: name.to_string(),
                verdict,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let residual = if fam.f_w.len() >= 5 {
        Some(fam.residual(prob)?)
    } else {
        None
    };

    // Evidence windows reuse the classification cutoffs.
    let deepest = |side: Side| {
        integrals
            .iter()
            .filter(|ch| ch.verdict.side == side)
            .filter_map(|ch| ch.verdict.windows.last().map(|w| w.cutoff))
            .next()
    };
    let oscillation = match (deepest(Side::Left), deepest(Side::Right)) {
        (Some(l), Some(r)) if !opts.xis.is_empty() => {
            lambda_inf_oscillation_evidence_on(prob, &fam.w, &opts.xis, c, (l, r), opts.oscillation_windows)?
        }
        _ if opts.xis.is_empty() => Vec::new(),
        _ => {
            assumptions.push("oscillation evidence skipped: no classification windows".to_string());
            Vec::new()
        }
    };
    let lambda0 = match (opts.lambda0_mesh, deepest(Side::Left), deepest(Side::Right)) {
        (Some(mesh), Some(l), Some(r)) => match lambda0_rayleigh(prob, &fam.w, (l, r), mesh) {
            Ok(e) => Some(e),
            Err(e) => {
                assumptions.push(format!("best-constant estimate failed: {e}"));
                None
            }
        },
        _ => None,
    };

    let kind = |name: &str, side| {
        integrals
            .iter()
            .find(|ch| ch.integrand == name && ch.verdict.side == side)
            .map(|ch| ch.verdict.kind)
            .expect("all four integrals are classified")
    };
    use VerdictKind::*;
    let crit = [kind("1/(p f^2)", Side::Left), kind("1/(p f^2)", Side::Right)];
    let null = [kind("w f^2", Side::Left), kind("w f^2", Side::Right)];
    let residual_ok = residual.map_or(exact, |r| r <= RESIDUAL_TOL);
    if !residual_ok {
        assumptions.push(format!(
            "ground-state residual {} exceeds {RESIDUAL_TOL:e}",
            residual.map_or("unavailable".to_string(), |r| format!("{r:e}"))
        ));
    }
    let verdict = if crit.contains(&Convergent) {
        Verdict::NotCritical
    } else if !residual_ok || crit.contains(&Inconclusive) {
        Verdict::Inconclusive
    } else if null == [Divergent, Divergent] {
        Verdict::Optimal
    } else if null.contains(&Convergent) {
        Verdict::CriticalButPositiveCriticalSuspected
    } else {
        // Slow divergence and large convergent values look alike.
        Verdict::Inconclusive
    };
    Ok(OptimalityReport {
        integrals,
        lambda0,
        oscillation,
        residual,
        verdict,
        assumptions,
    })
}

/// Prüfer zero counts of `-(p y')' + q y = (1 + ξ²) w y` on end windows
/// shrinking geometrically from the interval's reference point, for each ξ.
pub fn lambda_inf_oscillation_evidence(
    prob: &SLProblem,
    w: &CoefficientFn,
    xis: &[f64],
) -> Result<Vec<OscillationRun>, Error> {
    let iv = prob.iv;
    let c = iv.reference_point();
    let deep = |side| {
        let d0 = iv.distance_to(side, c);
        let d = if iv.end(side).is_finite() { d0 * 1e-8 } else { d0 * 1e8 };
        iv.point_at_distance(side, d)
    };
    lambda_inf_oscillation_evidence_on(prob, w, xis, c, (deep(Side::Left), deep(Side::Right)), 6)
}

/// As [`lambda_inf_oscillation_evidence`] with `windows` cutoffs spaced
/// geometrically (in end-distance) between `c` and `deepest`.
pub fn lambda_inf_oscillation_evidence_on(
    prob: &SLProblem,
    w: &CoefficientFn,
    xis: &[f64],
    c: f64,
    deepest: (f64, f64),
    windows: usize,
) -> Result<Vec<OscillationRun>, Error> {
    if let Some(x) = xis.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::invalid(format!("ξ must be nonnegative, got {x}")));
    }
    if windows == 0 {
        return Err(Error::invalid("need at least one oscillation window"));
    }
    let iv = prob.iv;
    let cutoffs = |side: Side, end: f64| -> Vec<f64> {
        let (d0, d1) = (iv.distance_to(side, c), iv.distance_to(side, end));
        (1..=windows)
            .map(|j| {
                let d = d0 * (d1 / d0).powf(j as f64 / windows as f64);
                iv.point_at_distance(side, d)
            })
            .collect()
    };
    let left = cutoffs(Side::Left, deepest.0);
    let right = cutoffs(Side::Right, deepest.1);
    xis.par_iter()
        .map(|&xi| {
            let lambda = 1.0 + xi * xi;
            // (p y')' + (λ w - q) y = 0.
            let q_eff = w.scaled(lambda).minus(&prob.q);
            let count = |a: f64, b: f64| pruefer_zero_count(&prob.p, &q_eff, a, b, 0.0);
            let l = left
                .iter()
                .map(|&t| Ok(ZeroCount { cutoff: t, zeros: count(t, c)? }))
                .collect::<Result<Vec<_>, Error>>()?;
            let r = right
                .iter()
                .map(|&t| Ok(ZeroCount { cutoff: t, zeros: count(c, t)? }))
                .collect::<Result<Vec<_>, Error>>()?;
            let grows = |v: &[ZeroCount]| {
                v.windows(2).all(|p| p[1].zeros >= p[0].zeros) && v[v.len() - 1].zeros > v[0].zeros
            };
            let growing = grows(&l) && grows(&r);
            Ok(OscillationRun {
                xi,
                lambda,
                left: l,
                right: r,
                growing,
            })
        })
        .collect()
}
