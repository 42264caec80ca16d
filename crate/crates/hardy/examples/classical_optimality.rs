//! Certifies `w = 1/(4t²)` for `-y''` on `(0, ∞)` and on the truncated `(0, 1)`.

use hardy::certify::certify_optimality_1d;
use hardy::hardy1d::classical_family;
use hardy::ode::{make_grid, Grading, Interval};
use hardy::sl::SLProblem;

fn main() -> Result<(), hardy::Error> {
    for (a, b) in [(0.0, f64::INFINITY), (0.0, 1.0)] {
        let iv = Interval::new(a, b)?;
        let nodes = make_grid(&iv, iv.default_cutoffs(1e-6), 2001, Grading::LogBoth)?;
        let fam = classical_family(iv, &nodes)?;
        let report = certify_optimality_1d(&SLProblem::free(iv), &fam)?;
        println!("({a}, {b}): {:?}", report.verdict);
        for c in &report.integrals {
            println!("  {:>10} {:?}: {:?} {:?}", c.integrand, c.verdict.side, c.verdict.kind, c.verdict.model);
        }
        if let Some(l) = report.lambda0 {
            println!("  truncated best constant {:.6} on {:?}", l.estimate, l.cutoffs);
        }
    }
    Ok(())
}
