//! Divergence classification of improper integrals at an endpoint.

use hardy::certify::improper_integral_classify;
use hardy::ode::{Interval, Side};
use hardy::CoefficientFn;

fn main() -> Result<(), hardy::Error> {
    let unit = Interval::new(0.0, 1.0)?;
    for src in ["1/t", "1/(t*ln(1/t))", "1/(t*ln(1/t)^2)", "t^(-0.5)", "t^(-1.5)"] {
        let v = improper_integral_classify(&CoefficientFn::parse(src)?, Side::Left, &unit, 8)?;
        println!("{src:<18} {:?} {:?} limit {:?}", v.kind, v.model, v.limit);
    }
    Ok(())
}
