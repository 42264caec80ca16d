//! Liouville normal form of `-y'' = ρ y` for `ρ = (2t - t²)⁻²`: the potential vanishes.

use hardy::hardy1d::liouville_transform;
use hardy::ode::Interval;
use hardy::CoefficientFn;

fn main() -> Result<(), hardy::Error> {
    let rho = CoefficientFn::parse("(2*t - t^2)^(-2)")?;
    let (s, q_hat) = liouville_transform(&rho, &CoefficientFn::zero(), Interval::new(0.0, 2.0)?)?;
    for t in [0.05, 0.5, 1.0, 1.5, 1.95] {
        println!("t = {t:<5} s = {:>9.5}  q̂ = {:.2e}", s.eval(t)?, q_hat.eval(t)?);
    }
    Ok(())
}
