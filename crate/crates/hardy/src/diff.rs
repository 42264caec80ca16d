//! Numerical differentiation by Richardson extrapolation of central differences
//! (Ridders' tableau). Steps that leave the function's domain are shrunk.

use crate::expr::DomainError;

const CON: f64 = 1.4;
const NTAB: usize = 12;

fn ridders(
    stencil: impl Fn(f64) -> Result<f64, DomainError>,
    x: f64,
    h0: f64,
) -> Result<f64, DomainError> {
    let mut h = h0;
    // Shrink until the first stencil fits inside the domain.
    let mut first = None;
    for _ in 0..60 {
        match stencil(h) {
            Ok(v) => {
                first = Some(v);
                break;
            }
            Err(_) => h *= 0.25,
        }
    }
    let Some(first) = first else {
        return Err(DomainError {
            x,
            reason: "no difference stencil fits inside the domain",
        });
    };
    let fac0 = CON * CON;
    let mut a = [[0.0f64; NTAB]; NTAB];
    a[0][0] = first;
    let mut best = first;
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = stencil(h)?;
        let mut fac = fac0;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= fac0;
            let e = (a[j][i] - a[j - 1][i])
                .abs()
                .max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        // Higher order is getting worse: stop.
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    Ok(best)
}

/// First derivative of `f` at `x`, starting step `h`.
pub fn derivative(
    f: impl Fn(f64) -> Result<f64, DomainError>,
    x: f64,
    h: f64,
) -> Result<f64, DomainError> {
    ridders(|h| Ok((f(x + h)? - f(x - h)?) / (2.0 * h)), x, h)
}

/// Second derivative of `f` at `x`, starting step `h`.
pub fn second_derivative(
    f: impl Fn(f64) -> Result<f64, DomainError>,
    x: f64,
    h: f64,
) -> Result<f64, DomainError> {
    let fx = f(x)?;
    ridders(
        |h| Ok((f(x + h)? - 2.0 * fx + f(x - h)?) / (h * h)),
        x,
        h,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_functions() {
        let d = derivative(|x| Ok(x.sin()), 0.7, 0.1).unwrap();
        assert!((d - 0.7f64.cos()).abs() < 1e-12, "{d}");
        let d2 = second_derivative(|x| Ok(x.exp()), 1.3, 0.1).unwrap();
        assert!((d2 / 1.3f64.exp() - 1.0).abs() < 1e-9, "{d2}");
    }

    #[test]
    fn shrinks_near_domain_edge() {
        let f = |x: f64| {
            if x <= 0.0 {
                Err(DomainError { x, reason: "sqrt" })
            } else {
                Ok(x.sqrt())
            }
        };
        let x = 1e-4;
        let d = derivative(f, x, 0.5).unwrap();
        assert!((d - 0.5 / x.sqrt()).abs() < 1e-8 * d, "{d}");
        let d2 = second_derivative(f, x, 0.5).unwrap();
        let exact = -0.25 * x.powf(-1.5);
        assert!((d2 / exact - 1.0).abs() < 1e-8, "{d2} {exact}");
    }
}
