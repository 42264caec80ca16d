//! Globally adaptive Gauss–Kronrod (7, 15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::expr::DomainError;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("quadrature did not converge: value {value:e}, error estimate {abs_err:e}")]
    NotConverged { value: f64, abs_err: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn kronrod15(
    f: &mut impl FnMut(f64) -> Result<f64, DomainError>,
    a: f64,
    b: f64,
) -> Result<Segment, DomainError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = h * x;
        let s = f(c - dx)? + f(c + dx)?;
        kron += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let diff = ((kron - gauss) * h).abs();
    // QUADPACK-style error scaling: pessimistic while the rule is unresolved.
    let err = if diff > 0.0 {
        diff * (200.0 * diff / (value.abs() + f64::MIN_POSITIVE)).powf(1.5).min(1.0)
    } else {
        0.0
    };
    Ok(Segment { a, b, value, err })
}

/// Integrates `f` over `[a, b]` until the error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate(
    mut f: impl FnMut(f64) -> Result<f64, DomainError>,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult, QuadError> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
            evals: 0,
        });
    }
    const MAX_SEGMENTS: usize = 4000;
    let first = kronrod15(&mut f, a, b)?;
    let mut evals = 15;
    let mut value = first.value;
    let mut err = first.err;
    let mut heap = BinaryHeap::from([first]);
    // Tolerances below the roundoff floor are clamped to it.
    while err > abs_tol.max(rel_tol.max(50.0 * f64::EPSILON) * value.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(QuadError::NotConverged {
                value,
                abs_err: err,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a.min(worst.b) || m >= worst.a.max(worst.b) {
            // Cannot split further in floating point.
            return Err(QuadError::NotConverged {
                value,
                abs_err: err,
            });
        }
        let l = kronrod15(&mut f, worst.a, m)?;
        let r = kronrod15(&mut f, m, worst.b)?;
        evals += 30;
        value += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let abs_err: f64 = heap.iter().map(|s| s.err).sum();
    Ok(QuadResult {
        value,
        abs_err,
        evals,
    })
}

/// Integrates over consecutive breakpoints, summing the pieces.
pub fn integrate_pieces(
    mut f: impl FnMut(f64) -> Result<f64, DomainError>,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult, QuadError> {
    let mut total = QuadResult {
        value: 0.0,
        abs_err: 0.0,
        evals: 0,
    };
    for w in breaks.windows(2) {
        let r = integrate(&mut f, w[0], w[1], abs_tol, rel_tol)?;
        total.value += r.value;
        total.abs_err += r.abs_err;
        total.evals += r.evals;
    }
    Ok(total)
}
