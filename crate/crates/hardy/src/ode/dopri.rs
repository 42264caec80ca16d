//! Dormand–Prince 5(4) with PI step control and the 4th-order continuous
//! extension for output at arbitrary points.

use crate::error::Error;
use crate::expr::DomainError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 2_000_000;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn norm<const N: usize>(v: &[f64; N], scale: &[f64; N]) -> f64 {
    let s: f64 = (0..N).map(|i| (v[i] / scale[i]).powi(2)).sum();
    (s / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` through `targets`, which must be
/// monotone in one direction away from `t0`. Returns the state at each target.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N], DomainError>,
    t0: f64,
    y0: [f64; N],
    targets: &[f64],
    tol: Tolerances,
) -> Result<Vec<[f64; N]>, Error> {
    let mut out = Vec::with_capacity(targets.len());
    let Some(&t_final) = targets.last() else {
        return Ok(out);
    };
    let dir = if t_final >= t0 { 1.0 } else { -1.0 };
    if targets
        .windows(2)
        .any(|w| (w[1] - w[0]) * dir < 0.0)
        || (targets[0] - t0) * dir < 0.0
    {
        return Err(Error::invalid("targets must be monotone away from t0"));
    }
    let mut next = 0;
    while next < targets.len() && targets[next] == t0 {
        out.push(y0);
        next += 1;
    }
    if next == targets.len() {
        return Ok(out);
    }

    let scale = |a: &[f64; N], b: &[f64; N]| {
        let mut s = [0.0; N];
        for i in 0..N {
            s[i] = tol.atol + tol.rtol * a[i].abs().max(b[i].abs());
        }
        s
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;

    // Initial step (Hairer–Wanner heuristic).
    let span = (t_final - t0).abs();
    let sk = scale(&y, &y);
    let d0 = norm(&y, &sk);
    let d1 = norm(&k1, &sk);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span.max(1e-300)
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(span);
    let y1 = axpy(&y, dir * h0, &[(1.0, &k1)]);
    let f1 = f(t + dir * h0, &y1)?;
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - k1[i];
    }
    let d2 = norm(&diff, &sk) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let mut h = (100.0 * h0).min(h1).min(span);

    const BETA: f64 = 0.04;
    const SAFE: f64 = 0.9;
    let expo1 = 0.2 - BETA * 0.75;
    let mut facold: f64 = 1e-4;
    let mut reject = false;

    for _ in 0..MAX_STEPS {
        let remaining = (t_final - t) * dir;
        if h >= remaining {
            h = remaining;
        }
        if h <= 10.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::StepUnderflow { t_reached: t });
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(
            t + C4 * hs,
            &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = f(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let t_new = if h == remaining { t_final } else { t + hs };
        let k6 = f(
            t_new,
            &axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y_new = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t_new, &y_new)?;
        let mut e = [0.0; N];
        for i in 0..N {
            e[i] = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = norm(&e, &scale(&y, &y_new));
        let fac11 = err.powf(expo1);

        if err <= 1.0 {
            // Dense output on (t, t_new].
            while next < targets.len() && (targets[next] - t_new) * dir <= 0.0 {
                let x = targets[next];
                if x == t_new {
                    out.push(y_new);
                } else {
                    let theta = (x - t) / hs;
                    let theta1 = 1.0 - theta;
                    let mut yi = [0.0; N];
                    for i in 0..N {
                        let ydiff = y_new[i] - y[i];
                        let bspl = hs * k1[i] - ydiff;
                        let r4 = ydiff - hs * k7[i] - bspl;
                        let r5 = hs
                            * (D1 * k1[i]
                                + D3 * k3[i]
                                + D4 * k4[i]
                                + D5 * k5[i]
                                + D6 * k6[i]
                                + D7 * k7[i]);
                        yi[i] = y[i] + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
                    }
                    out.push(yi);
                }
                next += 1;
            }
            if next == targets.len() {
                return Ok(out);
            }
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(0.1, 5.0);
            facold = err.max(1e-4);
            let mut h_new = h / fac;
            if reject {
                h_new = h_new.min(h);
            }
            reject = false;
            t = t_new;
            y = y_new;
            k1 = k7;
            h = h_new;
        } else {
            reject = true;
            h /= (fac11 / SAFE).min(5.0).max(1.0 + 1e-3);
        }
    }
    Err(Error::TooManySteps { t_reached: t })
}
