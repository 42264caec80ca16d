//! Ermakov–Pinney weights from the pair `(t, 1 - t/2)` of `-y''` on `(0, 2)`.

use hardy::certify::certify_optimality_1d;
use hardy::hardy1d::{ep_solution, ep_weight, EPFamily};
use hardy::ode::{make_grid, Grading, GridFunction, Interval};
use hardy::sl::{SLProblem, SolutionPair};

fn main() -> Result<(), hardy::Error> {
    let iv = Interval::new(0.0, 2.0)?;
    let prob = SLProblem::free(iv);
    let nodes = make_grid(&iv, iv.default_cutoffs(1e-6), 2001, Grading::LogBoth)?;
    let v1 = GridFunction::sample(&nodes, |t| Ok(t), Some(&|_| Ok(1.0)))?;
    let v2 = GridFunction::sample(&nodes, |t| Ok(1.0 - t / 2.0), Some(&|_| Ok(-0.5)))?;
    let pair = SolutionPair::new(&prob, v1, v2)?;
    println!("Wronskian {}", pair.wronskian);
    // (c1, c2, c3) with c3² - c1 c2 = 1; the first gives y² = 2t - t².
    for (c1, c2, c3) in [(0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (0.5, 1.0, 1.5f64.sqrt())] {
        let fam = EPFamily::new(pair.clone(), c1, c2, c3, c3 * c3 - c1 * c2)?;
        let f = ep_solution(&fam)?;
        let weight = ep_weight(&f, fam.k)?;
        let report = certify_optimality_1d(&prob, &weight)?;
        println!(
            "c = ({c1}, {c2}, {c3:.4}): f on ({:.2e}, {:.4}), w(1) = {:.6}, verdict {:?}",
            f.lo(),
            f.hi(),
            weight.w.eval(1.0)?,
            report.verdict
        );
    }
    Ok(())
}
