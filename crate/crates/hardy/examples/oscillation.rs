//! Prüfer zero counts for `-y'' = λ y/(4t²)`: oscillation starts right above λ = 1.

use hardy::ode::pruefer_zero_count;
use hardy::CoefficientFn;

fn main() -> Result<(), hardy::Error> {
    let one = CoefficientFn::constant(1.0);
    for lam in [1.0, 2.0, 5.0] {
        let q = CoefficientFn::from_fn("λ/(4t²)", move |t| lam / (4.0 * t * t));
        let counts: Vec<u64> = [1e-2, 1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&eps| pruefer_zero_count(&one, &q, eps, 1.0, 0.0))
            .collect::<Result<_, _>>()?;
        println!("λ = {lam}: zeros on (ε, 1) for ε = 1e-2 … 1e-8: {counts:?}");
    }
    Ok(())
}
