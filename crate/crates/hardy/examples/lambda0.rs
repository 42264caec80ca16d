//! Best constant of the truncated Hardy inequality against `1 + 4π²/ln(R/ε)²`.

use std::f64::consts::PI;

use hardy::certify::lambda0_rayleigh;
use hardy::ode::Interval;
use hardy::sl::SLProblem;
use hardy::CoefficientFn;

fn main() -> Result<(), hardy::Error> {
    let prob = SLProblem::free(Interval::half_line());
    let w = CoefficientFn::from_fn("1/(4t^2)", |t| 0.25 / (t * t));
    for k in [2, 4, 6, 8] {
        let (eps, r) = (10f64.powi(-k), 10f64.powi(k));
        let est = lambda0_rayleigh(&prob, &w, (eps, r), 4000)?;
        let nu = PI / (r / eps).ln();
        println!("(1e-{k}, 1e{k}): {:.8}  exact {:.8}", est.estimate, 1.0 + 4.0 * nu * nu);
    }
    Ok(())
}
