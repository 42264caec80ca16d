//! Iterated weights from the principal solution, compared with `1/(4t²)`.

use hardy::hardy1d::{weight_series, SeriesOptions};
use hardy::ode::Interval;
use hardy::sl::SLProblem;

fn main() -> Result<(), hardy::Error> {
    let prob = SLProblem::free(Interval::new(0.0, 3.0)?);
    let out = weight_series(&prob, 2.0, &[(1.0, 0.0, 1.0)], 3, &SeriesOptions::default())?;
    for (j, st) in out.steps.iter().enumerate() {
        println!("term {}: window ({:.1e}, {}), k = {}", j + 1, st.window.0, st.window.1, st.k);
        if let Some(n) = &st.note {
            println!("  note: {n}");
        }
    }
    for t in [1e-4, 1e-2, 0.5, 2.0] {
        let sums: Vec<String> = out
            .partial_sums
            .iter()
            .map(|w| w.eval(t).map(|v| format!("{:.5}", v * 4.0 * t * t)))
            .collect::<Result<_, _>>()?;
        println!("t = {t:<6}  4t² w̃_j = {}", sums.join(", "));
    }
    Ok(())
}
