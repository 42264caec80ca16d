//! Radial Hardy weights for `-Δ` on `ℝⁿ`, `n ≥ 3`: the Green potential of a
//! compactly supported radial density, the classical, pulled-back and
//! improved weights built from `t = G_φ / u`, and the Rellich-type check.
//!
//! Everything reduces to functions of `r`. With `u` harmonic, the ground-state
//! transform gives `P(u F(t)) = -u F''(t) t'² + F'(t) φ`, so the weight of the
//! ground state `u F(t)` is `w(t) t'² + F'(t) φ / (u F(t))` whenever `-F'' = w F`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{classify_with, ClassifyOptions, DivergenceVerdict};
use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::expr::DomainError;
use crate::hardy1d::WeightFamily1D;
use crate::ode::{make_grid, Grading, GridFunction, Interval, Side};
use crate::quad;

/// Area of the unit sphere in `ℝⁿ`, `2 π^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    // Γ(n/2) by the recursion from Γ(1) = 1 or Γ(1/2) = √π.
    let (mut g, mut x) = if n % 2 == 0 {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while x < n as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / g
}

fn check_dimension(n: usize) -> Result<(), Error> {
    if n >= 3 {
        Ok(())
    } else {
        Err(Error::invalid(format!("dimension must be at least 3, got {n}")))
    }
}

/// `φ` on `[0, R_φ)`, zero beyond.
fn truncated(phi: &CoefficientFn, r_phi: f64) -> impl Fn(f64) -> Result<f64, DomainError> + '_ {
    move |r| if r < r_phi { phi.eval(r) } else { Ok(0.0) }
}

/// `A(r) = ∫_0^r φ s^{n-1} ds` at each node, split at `R_φ`.
fn enclosed(n: usize, phi: &CoefficientFn, r_phi: f64, nodes: &[f64]) -> Result<Vec<f64>, Error> {
    let f = truncated(phi, r_phi);
    let g = |s: f64| Ok(f(s)? * s.powi(n as i32 - 1));
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &r in nodes {
        let mut breaks = vec![prev];
        if prev < r_phi && r_phi < r {
            breaks.push(r_phi);
        }
        breaks.push(r);
        acc += quad::integrate_pieces(g, &breaks, 1e-300, 1e-13)?.value;
        out.push(acc);
        prev = r;
    }
    Ok(out)
}

/// `G(r) = (1/(n-2)) [r^{2-n} ∫_0^r φ s^{n-1} ds + ∫_r^∞ φ s ds]` and
/// `G'(r) = -r^{1-n} ∫_0^r φ s^{n-1} ds` at `r_grid`, with `φ` taken as zero
/// beyond `r_phi`.
pub fn green_potential_radial(
    n: usize,
    phi: &CoefficientFn,
    r_phi: f64,
    r_grid: &[f64],
) -> Result<GridFunction, Error> {
    check_dimension(n)?;
    if !(r_phi > 0.0 && r_phi.is_finite()) {
        return Err(Error::invalid(format!(
            "φ needs a finite support radius, got {r_phi}"
        )));
    }
    if r_grid.first().is_some_and(|&r| r <= 0.0) || r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("radial grid must be positive and increasing"));
    }
    let f = truncated(phi, r_phi);
    if let Some(r) = r_grid.iter().find(|&&r| r < r_phi && f(r).is_ok_and(|v| v < 0.0)) {
        return Err(Error::invalid(format!("φ must be nonnegative; φ({r}) < 0")));
    }
    let a = enclosed(n, phi, r_phi, r_grid)?;
    let total = enclosed(n, phi, r_phi, &[r_phi])?[0];
    if !(total > 0.0) {
        return Err(Error::invalid("φ vanishes identically"));
    }
    // Outer integral ∫_r^{R_φ} φ s ds, accumulated from the support edge inward.
    let h = |s: f64| Ok(f(s)? * s);
    let mut b = vec![0.0; r_grid.len()];
    let mut acc = 0.0;
    let mut next = r_phi;
    for i in (0..r_grid.len()).rev() {
        let r = r_grid[i];
        if r < next {
            acc += quad::integrate(h, r, next, 1e-300, 1e-13)?.value;
            next = r;
        }
        b[i] = acc;
    }
    let k = (n - 2) as f64;
    let vals = r_grid
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(&r, (&a, &b))| (a * r.powf(2.0 - n as f64) + b) / k)
        .collect();
    let ders = r_grid
        .iter()
        .zip(&a)
        .map(|(&r, &a)| -a * r.powf(1.0 - n as f64))
        .collect();
    GridFunction::new(r_grid.to_vec(), vals, Some(ders))
}

/// A radial density with its Green potential and the harmonic `u` of the
/// quotient `t = G_φ / u`.
#[derive(Debug, Clone)]
pub struct RadialProblem {
    pub n: usize,
    pub phi: CoefficientFn,
    pub r_phi: f64,
    pub u: CoefficientFn,
    /// `u ≡ 1`, whose quotient tends to 0 at infinity.
    pub u_is_one: bool,
    pub g: GridFunction,
    /// `C` in `G_φ = C r^{2-n}` outside the support.
    pub exterior_c: f64,
}

impl RadialProblem {
    /// `u ≡ 1` on a grid from `10⁻³ R_φ` to `R_φ`.
    pub fn new(n: usize, phi: CoefficientFn, r_phi: f64) -> Result<Self, Error> {
        check_dimension(n)?;
        if !(r_phi > 0.0 && r_phi.is_finite()) {
            return Err(Error::invalid(format!("support radius must be positive, got {r_phi}")));
        }
        let nodes = make_grid(
            &Interval::half_line(),
            (1e-3 * r_phi, r_phi),
            2001,
            Grading::LogLeft,
        )?;
        let g = green_potential_radial(n, &phi, r_phi, &nodes)?;
        let exterior_c = enclosed(n, &phi, r_phi, &[r_phi])?[0] / (n - 2) as f64;
        Ok(RadialProblem {
            n,
            phi,
            r_phi,
            u: CoefficientFn::constant(1.0),
            u_is_one: true,
            g,
            exterior_c,
        })
    }

    /// Replaces `u`; it should be positive and radially harmonic.
    pub fn with_u(mut self, u: CoefficientFn) -> Self {
        self.u_is_one = false;
        self.u = u;
        self
    }

    /// `(G, G')` at `r`: the grid inside the support, the closed form outside.
    pub fn potential(&self, r: f64) -> Result<(f64, f64), DomainError> {
        let n = self.n as f64;
        if r >= self.r_phi {
            let c = self.exterior_c;
            Ok((c * r.powf(2.0 - n), (2.0 - n) * c * r.powf(1.0 - n)))
        } else if r >= self.g.lo() {
            Ok((self.g.eval(r)?, self.g.deriv(r)?))
        } else if r > 0.0 {
            // Below the grid φ is smooth, so G is flat to second order.
            Ok((self.g.values()[0], self.g.derivs().expect("potential stores G'")[0] * r / self.g.lo()))
        } else {
            Err(DomainError {
                x: r,
                reason: "radius must be positive",
            })
        }
    }

    /// `(t, t')` for `t = G / u`.
    pub fn quotient(&self, r: f64) -> Result<(f64, f64), DomainError> {
        let (g, dg) = self.potential(r)?;
        let u = self.u.eval(r)?;
        let du = if self.u_is_one { 0.0 } else { self.u.derivative(r)? };
        Ok((g / u, (dg * u - g * du) / (u * u)))
    }

    /// `sup t` over the grid and a geometric sweep of the exterior.
    pub fn sup_quotient(&self) -> Result<f64, Error> {
        let mut best = 0.0f64;
        for &r in self.g.nodes() {
            best = best.max(self.quotient(r)?.0);
        }
        for j in 0..=120 {
            let r = self.r_phi * 10f64.powf(j as f64 * 0.05);
            best = best.max(self.quotient(r)?.0);
        }
        Ok(best)
    }

    /// `sup |u'' + ((n-1)/r) u'|` at sample radii; zero for `u ≡ 1`.
    pub fn harmonicity_residual(&self) -> Result<f64, Error> {
        if self.u_is_one {
            return Ok(0.0);
        }
        let mut worst = 0.0f64;
        for j in 0..=40 {
            let r = self.r_phi * 10f64.powf(-2.0 + j as f64 * 0.1);
            let lap = self.u.second_derivative(r)? + (self.n as f64 - 1.0) / r * self.u.derivative(r)?;
            worst = worst.max(lap.abs());
        }
        Ok(worst)
    }

    /// `sup |-(r^{n-1} G')' - r^{n-1} φ| / (1 + sup r^{n-1} φ)` on the grid,
    /// by differencing the stored flux.
    pub fn poisson_residual(&self) -> Result<f64, Error> {
        let p = CoefficientFn::from_fn("r^(n-1)", {
            let n = self.n as i32;
            move |r| r.powi(n - 1)
        });
        let prob = crate::sl::SLProblem::new(p, CoefficientFn::zero(), Interval::half_line());
        let lg = crate::sl::apply_l(&prob, &self.g)?;
        let f = truncated(&self.phi, self.r_phi);
        let mut num = 0.0f64;
        let mut scale = 0.0f64;
        for (&r, &v) in lg.nodes().iter().zip(lg.values()) {
            let rhs = r.powi(self.n as i32 - 1) * f(r)?;
            num = num.max((v - rhs).abs());
            scale = scale.max(rhs.abs());
        }
        Ok(num / (1.0 + scale))
    }

    fn phi_at(&self, r: f64) -> Result<f64, DomainError> {
        truncated(&self.phi, self.r_phi)(r)
    }

    fn volume(&self, r: f64) -> f64 {
        sphere_area(self.n) * r.powi(self.n as i32 - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NdKind {
    Classical,
    Pullback,
    Improved { a: f64 },
}

/// A radial weight `W(r)` with its ground state.
#[derive(Debug, Clone)]
pub struct NDWeight {
    pub kind: NdKind,
    pub w: CoefficientFn,
    pub ground_state: CoefficientFn,
    /// `f_w' ≥ 0` on the image of the support (pullbacks only).
    pub hypothesis_ok: bool,
    pub notes: Vec<String>,
}

/// `W = t'²/(4t²) + φ/(2ut)`, the weight of `√(G u)`.
pub fn classical_weight_nd(rp: &RadialProblem) -> NDWeight {
    let (a, b) = (rp.clone(), rp.clone());
    NDWeight {
        kind: NdKind::Classical,
        w: CoefficientFn::try_from_fn("W_classical", move |r| {
            let (t, dt) = a.quotient(r)?;
            Ok(0.25 * (dt / t).powi(2) + a.phi_at(r)? / (2.0 * a.u.eval(r)? * t))
        }),
        ground_state: CoefficientFn::try_from_fn("sqrt(G u)", move |r| {
            Ok((b.potential(r)?.0 * b.u.eval(r)?).sqrt())
        }),
        hypothesis_ok: true,
        notes: Vec::new(),
    }
}

/// `W = t'² w(t) + f_w'(t) φ / (u f_w(t))` with ground state `u f_w(t)`.
pub fn pullback_weight_nd(rp: &RadialProblem, fam: &WeightFamily1D) -> Result<NDWeight, Error> {
    let sup = rp.sup_quotient()?;
    if !(fam.iv.a <= 0.0 && sup < fam.iv.b) {
        return Err(Error::invalid(format!(
            "family interval ({}, {}) must contain (0, sup t] = (0, {sup}]",
            fam.iv.a, fam.iv.b
        )));
    }
    let f = fam.f_fn();
    let df = {
        let f = f.clone();
        let grid = fam.f_w.clone();
        let exact = fam.f_exact.is_some();
        move |t: f64| -> Result<f64, DomainError> {
            if exact {
                f.derivative(t)
            } else {
                grid.deriv(t)
            }
        }
    };
    let mut notes = Vec::new();
    let mut ok = true;
    for &r in rp.g.nodes().iter().filter(|&&r| rp.phi_at(r).is_ok_and(|v| v > 0.0)) {
        let t = rp.quotient(r)?.0;
        let d = df(t)?;
        if d < 0.0 {
            ok = false;
            notes.push(format!(
                "hypothesis f_w' ≥ 0 fails on the support: f_w'({t:e}) = {d:e} at r = {r:e}"
            ));
            break;
        }
    }
    let (a, b) = (rp.clone(), rp.clone());
    let w1 = fam.w.clone();
    let f1 = f.clone();
    let w = CoefficientFn::try_from_fn(&format!("pullback[{}]", fam.w.label()), move |r| {
        let (t, dt) = a.quotient(r)?;
        let phi = a.phi_at(r)?;
        let inner = if phi == 0.0 {
            0.0
        } else {
            df(t)? * phi / (a.u.eval(r)? * f1.eval(t)?)
        };
        Ok(dt * dt * w1.eval(t)? + inner)
    });
    let ground_state = CoefficientFn::try_from_fn("u f_w(t)", move |r| {
        let t = b.quotient(r)?.0;
        Ok(b.u.eval(r)? * f.eval(t)?)
    });
    if let Some(r) = rp.g.nodes().iter().find(|&&r| w.eval(r).is_ok_and(|v| v < 0.0)) {
        notes.push(format!("W negative at r = {r:e}"));
        ok = false;
    }
    Ok(NDWeight {
        kind: NdKind::Pullback,
        w,
        ground_state,
        hypothesis_ok: ok,
        notes,
    })
}

/// `W = t'²/(t²(2 - a t)²) + (1 - a t) φ / (u t (2 - a t))`, ground state
/// `u √(2t - a t²)`; needs `a ≤ 0.99 / sup t`.
pub fn improved_weight_nd(rp: &RadialProblem, a: f64) -> Result<NDWeight, Error> {
    let sup = rp.sup_quotient()?;
    if !(a > 0.0 && a * sup <= 0.99) {
        return Err(Error::invalid(format!(
            "a must lie in (0, 0.99 / sup t] = (0, {:e}], got {a}",
            0.99 / sup
        )));
    }
    let (p, q) = (rp.clone(), rp.clone());
    Ok(NDWeight {
        kind: NdKind::Improved { a },
        w: CoefficientFn::try_from_fn(&format!("W_improved(a={a:?})"), move |r| {
            let (t, dt) = p.quotient(r)?;
            let s = 2.0 - a * t;
            let inner = p.phi_at(r)? * (1.0 - a * t) / (p.u.eval(r)? * t * s);
            Ok((dt / (t * s)).powi(2) + inner)
        }),
        ground_state: CoefficientFn::try_from_fn("u sqrt(2t - a t^2)", move |r| {
            let t = q.quotient(r)?.0;
            Ok(q.u.eval(r)? * (t * (2.0 - a * t)).sqrt())
        }),
        hypothesis_ok: true,
        notes: Vec::new(),
    })
}

/// `W_improved / W_classical = 4/(2 - a t)²` off the support.
pub fn improvement_ratio(rp: &RadialProblem, a: f64, r: f64) -> Result<f64, DomainError> {
    let t = rp.quotient(r)?.0;
    Ok(4.0 / (2.0 - a * t).powi(2))
}

/// Growth of `∫ v² W r^{n-1} dr` at the inner end (`r → 0`) and at infinity,
/// with windows starting at `2 R_φ` toward infinity and `R_φ / 2` inward.
pub fn null_criticality_integral_nd(
    rp: &RadialProblem,
    ndw: &NDWeight,
) -> Result<(DivergenceVerdict, DivergenceVerdict), Error> {
    let (w, v) = (ndw.w.clone(), ndw.ground_state.clone());
    let n = rp.n as i32;
    let integrand = CoefficientFn::try_from_fn("v^2 W r^(n-1)", move |r| {
        let g = v.eval(r)?;
        Ok(g * g * w.eval(r)? * r.powi(n - 1))
    });
    let iv = Interval::half_line();
    let opts = |c: f64| ClassifyOptions {
        reference: Some(c),
        ..ClassifyOptions::default()
    };
    let inner = classify_with(&integrand, Side::Left, &iv, &opts(0.5 * rp.r_phi))?;
    let outer = classify_with(&integrand, Side::Right, &iv, &opts(2.0 * rp.r_phi))?;
    Ok((inner, outer))
}

/// `ψ(r) = amp (1 - s²)³`, `s = (2r - r0 - r1)/(r1 - r0)`, on `(r0, r1)`: C².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularBump {
    pub r0: f64,
    pub r1: f64,
    pub amp: f64,
}

impl AnnularBump {
    /// `(ψ, ψ', ψ'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        if !(self.r0 < r && r < self.r1) {
            return (0.0, 0.0, 0.0);
        }
        let k = 2.0 / (self.r1 - self.r0);
        let s = k * r - (self.r0 + self.r1) / (self.r1 - self.r0);
        let b = 1.0 - s * s;
        let v = self.amp * b * b * b;
        let d = self.amp * -6.0 * s * b * b * k;
        let dd = self.amp * (-6.0 * b * b + 24.0 * s * s * b) * k * k;
        (v, d, dd)
    }
}

/// `count` bumps with seeded random annuli in `(1.1 R_φ, 11 R_φ)`.
pub fn random_bumps(r_phi: f64, count: usize, seed: u64) -> Vec<AnnularBump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r0 = r_phi * rng.gen_range(1.1..5.0);
            let width = r_phi * rng.gen_range(0.1..6.0);
            AnnularBump {
                r0,
                r1: r0 + width,
                amp: rng.gen_range(0.5..2.0),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RellichResult {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// `∫ (Pψ)² t/(W - W_cl) dV ≥ ∫ ψ² (W - W_cl) t dV` for each bump, with
/// `Pψ = -ψ'' - ((n-1)/r) ψ'` and `dV = ω_{n-1} r^{n-1} dr`. Passes when
/// `LHS - RHS ≥ -1e-8 (1 + LHS)`.
pub fn rellich_check(rp: &RadialProblem, a: f64, psis: &[AnnularBump]) -> Result<Vec<RellichResult>, Error> {
    let improved = improved_weight_nd(rp, a)?;
    let classical = classical_weight_nd(rp);
    if let Some(b) = psis.iter().find(|b| !(b.r0 >= rp.r_phi && b.r0 < b.r1)) {
        return Err(Error::invalid(format!(
            "test function support ({}, {}) must lie outside the support of φ (r ≥ {})",
            b.r0, b.r1, rp.r_phi
        )));
    }
    let nm1 = rp.n as f64 - 1.0;
    psis.par_iter()
        .map(|b| {
            let gap = |r: f64| -> Result<f64, DomainError> {
                let d = improved.w.eval(r)? - classical.w.eval(r)?;
                if d > 0.0 {
                    Ok(d)
                } else {
                    Err(DomainError {
                        x: r,
                        reason: "W - W_classical vanishes on the test support",
                    })
                }
            };
            let lhs_f = |r: f64| {
                let (_, d, dd) = b.eval(r);
                let p = -dd - nm1 / r * d;
                Ok(p * p * rp.quotient(r)?.0 / gap(r)? * rp.volume(r))
            };
            let rhs_f = |r: f64| {
                let (v, _, _) = b.eval(r);
                Ok(v * v * gap(r)? * rp.quotient(r)?.0 * rp.volume(r))
            };
            let lhs = quad::integrate(lhs_f, b.r0, b.r1, 1e-300, 1e-12)?.value;
            let rhs = quad::integrate(rhs_f, b.r0, b.r1, 1e-300, 1e-12)?.value;
            let margin = lhs - rhs;
            Ok(RellichResult {
                lhs,
                rhs,
                margin,
                pass: margin >= -1e-8 * (1.0 + lhs),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy1d::{a_family_on, classical_family};
    use crate::ode::geomspace;
    use std::f64::consts::PI;

    fn bump3() -> RadialProblem {
        // ∫ (1 - r²)³ dx over the unit ball is 4π · 16/315.
        let phi = CoefficientFn::parse("(1 - r^2)^3").unwrap();
        RadialProblem::new(3, phi, 1.0).unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn exterior_constant_and_interior_value() {
        let rp = bump3();
        assert!((rp.exterior_c - 16.0 / 315.0).abs() < 1e-14);
        // G(0) = ∫_0^1 (1-s²)³ s ds = 1/8.
        let g0 = rp.g.values()[0];
        assert!((g0 - 0.125).abs() < 1e-6, "{g0}");
        assert!(rp.poisson_residual().unwrap() < 1e-7);
    }

    #[test]
    fn linear_in_density() {
        let nodes = geomspace(0.01, 3.0, 100);
        let a = green_potential_radial(4, &CoefficientFn::parse("1 - r^2").unwrap(), 1.0, &nodes).unwrap();
        let b = green_potential_radial(4, &CoefficientFn::parse("2 - 2*r^2").unwrap(), 1.0, &nodes).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((2.0 * x - y).abs() < 1e-14 * y.abs().max(1.0));
        }
        assert!(green_potential_radial(2, &CoefficientFn::constant(1.0), 1.0, &nodes).is_err());
    }

    #[test]
    fn classical_weight_outside_support() {
        let rp = bump3();
        let w = classical_weight_nd(&rp);
        for r in [1.5, 3.0, 40.0] {
            assert!((w.w.eval(r).unwrap() * 4.0 * r * r - 1.0).abs() < 1e-12);
        }
        let phi = CoefficientFn::parse("(1 - r^2)^3").unwrap();
        let rp4 = RadialProblem::new(4, phi, 1.0).unwrap();
        assert!((classical_weight_nd(&rp4).w.eval(2.0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn constant_u_scaling_leaves_weight() {
        let rp = bump3();
        let scaled = bump3().with_u(CoefficientFn::constant(3.0));
        let (a, b) = (classical_weight_nd(&rp), classical_weight_nd(&scaled));
        for r in [1.2, 5.0] {
            assert!((a.w.eval(r).unwrap() - b.w.eval(r).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn pullbacks_match_closed_forms() {
        let rp = bump3();
        let sup = rp.sup_quotient().unwrap();
        let nodes = geomspace(1e-9, 2.0 * sup, 3000);
        let cl = classical_family(Interval::half_line(), &nodes).unwrap();
        let pb = pullback_weight_nd(&rp, &cl).unwrap();
        let w = classical_weight_nd(&rp);
        assert!(pb.hypothesis_ok);
        for r in [0.3, 1.5, 4.0] {
            let (x, y) = (pb.w.eval(r).unwrap(), w.w.eval(r).unwrap());
            assert!((x - y).abs() < 1e-8 * y, "{r}: {x} vs {y}");
        }
        let a = 0.5 / sup;
        let fam = a_family_on(a, &geomspace(1e-9, 0.99 * 2.0 / a, 3000)).unwrap();
        let pb = pullback_weight_nd(&rp, &fam).unwrap();
        let imp = improved_weight_nd(&rp, a).unwrap();
        for r in [0.3, 1.5, 4.0] {
            let (x, y) = (pb.w.eval(r).unwrap(), imp.w.eval(r).unwrap());
            assert!((x - y).abs() < 1e-8 * y, "{r}: {x} vs {y}");
        }
    }

    #[test]
    fn decreasing_profile_violates_hypothesis() {
        let rp = bump3();
        let sup = rp.sup_quotient().unwrap();
        // f = √(2t - a t²) decreases beyond t = 1/a; choose 1/a inside the image.
        let a = 1.5 / sup;
        let fam = a_family_on(a, &geomspace(1e-9, 0.999 * 2.0 / a, 500)).unwrap();
        let pb = pullback_weight_nd(&rp, &fam).unwrap();
        assert!(!pb.hypothesis_ok);
    }

    #[test]
    fn improved_ratio_and_range() {
        let rp = bump3();
        let sup = rp.sup_quotient().unwrap();
        assert!(improved_weight_nd(&rp, 1.0 / sup).is_err());
        assert!(improved_weight_nd(&rp, 0.0).is_err());
        let a = 0.9 / sup;
        let imp = improved_weight_nd(&rp, a).unwrap();
        let cl = classical_weight_nd(&rp);
        for r in [1.1, 2.0, 10.0] {
            let ratio = imp.w.eval(r).unwrap() / cl.w.eval(r).unwrap();
            let want = improvement_ratio(&rp, a, r).unwrap();
            assert!((ratio - want).abs() < 1e-12 && ratio > 1.0);
        }
    }

    #[test]
    fn null_criticality_of_classical_weight() {
        let rp = bump3();
        let (inner, outer) = null_criticality_integral_nd(&rp, &classical_weight_nd(&rp)).unwrap();
        assert_eq!(outer.kind, crate::certify::VerdictKind::Divergent);
        assert_eq!(inner.kind, crate::certify::VerdictKind::Convergent);
    }

    #[test]
    fn bump_is_c2_and_homogeneous() {
        let b = AnnularBump { r0: 2.0, r1: 4.0, amp: 1.5 };
        assert_eq!(b.eval(2.0), (0.0, 0.0, 0.0));
        let (v, _, _) = b.eval(3.0);
        assert!((v - 1.5).abs() < 1e-15);
        // Derivatives by differences.
        let h = 1e-5;
        let (_, d, dd) = b.eval(2.7);
        let fd = (b.eval(2.7 + h).0 - b.eval(2.7 - h).0) / (2.0 * h);
        let fdd = (b.eval(2.7 + h).1 - b.eval(2.7 - h).1) / (2.0 * h);
        assert!((d - fd).abs() < 1e-8 && (dd - fdd).abs() < 1e-6);
        let rp = bump3();
        let a = 0.5 / rp.sup_quotient().unwrap();
        let one = rellich_check(&rp, a, &[b]).unwrap()[0];
        let two = rellich_check(&rp, a, &[AnnularBump { amp: 3.0, ..b }]).unwrap()[0];
        assert!((two.lhs / one.lhs - 4.0).abs() < 1e-10);
        assert!((two.rhs / one.rhs - 4.0).abs() < 1e-10);
        assert!(one.pass);
        let zero = rellich_check(&rp, a, &[AnnularBump { amp: 0.0, ..b }]).unwrap()[0];
        assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
        assert!(rellich_check(&rp, a, &[AnnularBump { r0: 0.5, r1: 2.0, amp: 1.0 }]).is_err());
    }
}
