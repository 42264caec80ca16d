//! The weights `(2t - at²)⁻²` on `(0, 2/a)`: closed-form identity and verdict.

use hardy::certify::certify_optimality_1d;
use hardy::hardy1d::a_family;
use hardy::ode::geomspace;
use hardy::sl::SLProblem;

fn main() -> Result<(), hardy::Error> {
    for a in [0.1, 0.5, 1.0, 2.0] {
        let fam = a_family(a)?;
        let b = 2.0 / a;
        let mut worst = 0.0f64;
        for t in geomspace(1e-4 * b, (1.0 - 1e-4) * b, 1000) {
            let g = t * (2.0 - a * t);
            // -f'' = g^{-3/2} = w f.
            let wf = fam.w.eval(t)? * fam.f_at(t)?;
            worst = worst.max((g.powf(-1.5) - wf).abs() / wf);
        }
        let report = certify_optimality_1d(&SLProblem::free(fam.iv), &fam)?;
        println!("a = {a}: identity error {worst:.1e}, verdict {:?}", report.verdict);
    }
    Ok(())
}
