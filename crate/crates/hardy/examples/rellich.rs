//! Rellich-type inequality on seeded random annular bumps in dimensions 3 to 5.

use hardy::nd::{random_bumps, rellich_check, RadialProblem};
use hardy::CoefficientFn;

fn main() -> Result<(), hardy::Error> {
    for n in [3, 4, 5] {
        let rp = RadialProblem::new(n, CoefficientFn::parse("(1 - r^2)^3")?, 1.0)?;
        let a = 0.5 / rp.sup_quotient()?;
        let results = rellich_check(&rp, a, &random_bumps(1.0, 20, 42))?;
        let worst = results.iter().map(|r| r.margin / (1.0 + r.lhs)).fold(f64::INFINITY, f64::min);
        let passed = results.iter().filter(|r| r.pass).count();
        println!("n = {n}: {passed}/{} pass, smallest relative margin {worst:.3e}", results.len());
    }
    Ok(())
}
