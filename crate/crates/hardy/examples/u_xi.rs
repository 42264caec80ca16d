//! Eigenfunctions `u_ξ` above the critical constant approach the ground state as ξ → 0.

use hardy::hardy1d::u_xi;

fn main() -> Result<(), hardy::Error> {
    let (a, m) = (1.0, 2.0);
    for xi in [1.0, 0.5, 0.25, 0.125] {
        let u = u_xi(a, m, xi)?;
        println!(
            "ξ = {xi:<5}  λ = {:.4}  window ({:.3e}, {:.4})  residual {:.1e}  |u - f| ≤ {:.4}",
            u.lambda,
            u.window.0,
            u.window.1,
            u.residual()?,
            u.distance_to_ground_state()
        );
    }
    Ok(())
}
