//! Radial weights in ℝ³ built from the Newton potential of a bump.

use hardy::nd::{classical_weight_nd, improved_weight_nd, null_criticality_integral_nd, RadialProblem};
use hardy::CoefficientFn;

fn main() -> Result<(), hardy::Error> {
    let rp = RadialProblem::new(3, CoefficientFn::parse("(1 - r^2)^3")?, 1.0)?;
    let sup = rp.sup_quotient()?;
    let a = 0.5 / sup;
    println!("exterior constant C = {:.10}, sup G = {sup:.6}, a = {a:.4}", rp.exterior_c);
    let classical = classical_weight_nd(&rp);
    let improved = improved_weight_nd(&rp, a)?;
    for r in [0.5, 1.5, 4.0, 20.0] {
        let (c, i) = (classical.w.eval(r)?, improved.w.eval(r)?);
        println!("r = {r:<5} W_classical r² = {:.6}  W_improved / W_classical = {:.6}", c * r * r, i / c);
    }
    for w in [&classical, &improved] {
        let (_, outer) = null_criticality_integral_nd(&rp, w)?;
        println!("{:?}: exterior integral {:?} ({:?})", w.kind, outer.kind, outer.model);
    }
    Ok(())
}
