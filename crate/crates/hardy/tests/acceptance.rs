//! Acceptance criteria, one test each. Every test writes a single
//! `PASS`/`FAIL` line to stderr (bypassing the capture, so the lines show up
//! in plain `cargo test` output) and then asserts what it can.

use std::f64::consts::PI;
use std::io::Write as _;
use std::time::Instant;

use hardy::certify::{
    certify_optimality_1d, improper_integral_classify, lambda0_rayleigh, GrowthModel, Verdict,
    VerdictKind,
};
use hardy::hardy1d::{
    a_family, classical_family, liouville_transform, series_term_closed_form,
    series_weight_closed_form, u_xi, u_xi_eval, weight_series, AnchorPolicy, SeriesOptions,
};
use hardy::nd::{
    classical_weight_nd, improved_weight_nd, null_criticality_integral_nd, pullback_weight_nd,
    random_bumps, rellich_check, RadialProblem,
};
use hardy::ode::{geomspace, make_grid, pruefer_zero_count, Grading, GridFunction, Interval, Side};
use hardy::sl::{SLProblem, SolutionPair};
use hardy::CoefficientFn;

// Pinned tolerances and budgets.
const C1_RUNTIME_S: f64 = 5.0;
const C2_RUNTIME_S: f64 = 5.0;
const C2_LIMIT_RTOL: f64 = 1e-6;
const C3_IDENTITY_TOL: f64 = 1e-8;
const C4_RESIDUAL_TOL: f64 = 1e-7;
const C4_BOUNDARY_TOL: f64 = 1e-9;
const C5_COUNT_SLACK: i64 = 1;
const C6_BAND: (f64, f64) = (1.0, 1.05);
const C6_FORMULA_RTOL: f64 = 1e-4;
const C6_RUNTIME_S: f64 = 30.0;
const C7_TOL: f64 = 1e-8;
const C7_CLOSED_FORM_RTOL: f64 = 1e-6;
const C8_TOL: f64 = 1e-8;
const C9_WEIGHT_TOL: f64 = 1e-7;
const C9_CONSTANT_TOL: f64 = 1e-6;
const C10_TOL: f64 = 1e-8;
const C11_MARGIN: f64 = 1e-8;
const C11_RUNTIME_S: f64 = 60.0;
const C13_TOL: f64 = 1e-6;

fn line(id: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance] {status} {id:02} {name}: {detail}");
}

fn free(a: f64, b: f64) -> SLProblem {
    SLProblem::free(Interval::new(a, b).unwrap())
}

fn bump() -> CoefficientFn {
    CoefficientFn::parse("(1 - r^2)^3").unwrap()
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `∫_a^b f` by composite Gauss–Legendre on `panels` equal panels.
fn gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
        for &(x, w) in rule {
            s += w * 0.5 * h * f(0.5 * (lo + hi) + 0.5 * h * x);
        }
    }
    s
}

#[test]
fn criterion_01_classical_optimality() {
    let start = Instant::now();
    let iv = Interval::half_line();
    let nodes = make_grid(&iv, iv.default_cutoffs(1e-6), 2001, Grading::LogBoth).unwrap();
    let fam = classical_family(iv, &nodes).unwrap();
    let report = certify_optimality_1d(&SLProblem::free(iv), &fam).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let all_log = report.integrals.iter().all(|c| {
        c.verdict.kind == VerdictKind::Divergent && matches!(c.verdict.model, GrowthModel::Log { .. })
    });
    // Oracle: 1/(p f²) = w f² = 1/(2t), so partials are ½ |ln(cutoff / c)|.
    let mut window_err = 0.0f64;
    for c in &report.integrals {
        let r = c.verdict.reference;
        for w in &c.verdict.windows {
            let exact = 0.5 * (w.cutoff / r).ln().abs();
            window_err = window_err.max((w.partial - exact).abs() / (1.0 + exact));
        }
    }
    let pass = report.verdict == Verdict::Optimal
        && report.integrals.len() == 4
        && all_log
        && window_err < 1e-8
        && secs < C1_RUNTIME_S;
    line(
        1,
        "classical optimality",
        pass,
        &format!(
            "verdict {:?}, four log-divergent integrals {all_log}, window error {window_err:.1e}, {secs:.2} s",
            report.verdict
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_truncation_counterexample() {
    let start = Instant::now();
    let iv = Interval::new(0.0, 1.0).unwrap();
    let nodes = make_grid(&iv, iv.default_cutoffs(1e-6), 2001, Grading::LogBoth).unwrap();
    let fam = classical_family(iv, &nodes).unwrap();
    let report = certify_optimality_1d(&SLProblem::free(iv), &fam).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let kinds: Vec<(String, Side, VerdictKind)> = report
        .integrals
        .iter()
        .map(|c| (c.integrand.clone(), c.verdict.side, c.verdict.kind))
        .collect();
    let convergent: Vec<_> = kinds.iter().filter(|k| k.2 == VerdictKind::Convergent).collect();
    let exactly_right = convergent.len() == 2 && convergent.iter().all(|k| k.1 == Side::Right);
    // Oracle: both right-end integrands are 1/(2t), whose integral from c to 1
    // is ½ ln(1/c).
    let mut limit_err = 0.0f64;
    for name in ["1/(p f^2)", "w f^2"] {
        let v = report.integral(name, Side::Right).unwrap();
        let exact = 0.5 * (1.0 / v.reference).ln();
        limit_err = limit_err.max(v.limit.map_or(f64::INFINITY, |l| (l / exact - 1.0).abs()));
    }
    let pass = report.verdict == Verdict::NotCritical
        && exactly_right
        && limit_err < C2_LIMIT_RTOL
        && secs < C2_RUNTIME_S;
    line(
        2,
        "truncation counterexample",
        pass,
        &format!(
            "verdict {:?}, convergent exactly at the right end {exactly_right}, limit error {limit_err:.1e}, {secs:.2} s",
            report.verdict
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_03_a_family_identity() {
    let mut worst = 0.0f64;
    let mut verdicts = Vec::new();
    for a in [0.1, 0.5, 1.0, 2.0] {
        let fam = a_family(a).unwrap();
        let b = 2.0 / a;
        for t in geomspace(1e-6 * b, (1.0 - 1e-6) * b, 1000) {
            // Oracle: f = g^{1/2}, f'' = (2 g g'' - g'²) / (4 g^{3/2}), by hand.
            let (g, dg, ddg) = (2.0 * t - a * t * t, 2.0 - 2.0 * a * t, -2.0 * a);
            let fpp = (2.0 * g * ddg - dg * dg) / (4.0 * g.powf(1.5));
            let wf = fam.w.eval(t).unwrap() * fam.f_at(t).unwrap();
            worst = worst.max((-fpp - wf).abs() / (1.0 + wf.abs()));
        }
        let report = certify_optimality_1d(&SLProblem::free(fam.iv), &fam).unwrap();
        verdicts.push(report.verdict);
    }
    let pass = worst <= C3_IDENTITY_TOL && verdicts.iter().all(|v| *v == Verdict::Optimal);
    line(
        3,
        "a-family identity",
        pass,
        &format!("identity residual {worst:.1e}, verdicts {verdicts:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_u_xi_properties() {
    let mut worst_res = 0.0f64;
    let mut worst_bc = 0.0f64;
    let mut envelope_ok = true;
    let mut oracle_bc = 0.0f64;
    for a in [0.5, 1.0] {
        for m in [1.0, 2.0, 4.0] {
            for xi in [1.0, 0.5, 0.25] {
                let u = u_xi(a, m, xi).unwrap();
                worst_res = worst_res.max(u.residual().unwrap());
                worst_bc = worst_bc.max(u.left_condition()).max(u.right_condition());
                envelope_ok &= u.envelope_excess() <= 0.0;
                // Oracle: φ(t_l) = -π/2 and φ(t_r) = 0, from the phase formula.
                let (tl, tr) = u.window;
                let phase = |t: f64| 0.5 * xi * (m * t / (2.0 - a * t)).ln();
                oracle_bc = oracle_bc
                    .max((phase(tl) + PI / 2.0).abs())
                    .max(phase(tr).abs());
                let (ul, _) = u_xi_eval(a, m, xi, tl);
                oracle_bc = oracle_bc.max(ul.abs());
            }
        }
    }
    let mut monotone = true;
    for a in [0.5, 1.0] {
        for m in [1.0, 2.0, 4.0] {
            let d: Vec<f64> = [1.0, 0.5, 0.25, 0.125]
                .iter()
                .map(|&xi| u_xi(a, m, xi).unwrap().distance_to_ground_state())
                .collect();
            monotone &= d.windows(2).all(|p| p[1] < p[0]);
        }
    }
    let pass = worst_res <= C4_RESIDUAL_TOL
        && worst_bc <= C4_BOUNDARY_TOL
        && oracle_bc <= C4_BOUNDARY_TOL
        && envelope_ok
        && monotone;
    line(
        4,
        "u_xi properties",
        pass,
        &format!(
            "residual {worst_res:.1e}, boundary {worst_bc:.1e}, envelope {envelope_ok}, distance decreasing {monotone}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_oscillation_evidence() {
    let one = CoefficientFn::constant(1.0);
    let euler = |lam: f64| CoefficientFn::from_fn("lam/(4t^2)", move |t| lam / (4.0 * t * t));
    let mut ok = true;
    let mut detail = Vec::new();
    for eps in [1e-4, 1e-6, 1e-8] {
        // Oracle: √t sin(½ ln(t/ε)) vanishes when ln(t/ε) ∈ 2πℕ.
        let expect = ((1.0 / (2.0 * PI)) * (1.0f64 / eps).ln()).floor() as i64;
        let got = pruefer_zero_count(&one, &euler(2.0), eps, 1.0, 0.0).unwrap() as i64;
        let flat = pruefer_zero_count(&one, &euler(1.0), eps, 1.0, 0.0).unwrap();
        ok &= (got - expect).abs() <= C5_COUNT_SLACK && flat == 0;
        detail.push(format!("ε={eps:e}: {got}/{expect}, λ=1: {flat}"));
    }
    line(5, "oscillation evidence", ok, &detail.join("; "));
    assert!(ok);
}

fn truncated_hardy(eps: f64, r: f64) -> f64 {
    let nu = PI / (r / eps).ln();
    1.0 + 4.0 * nu * nu
}

fn criterion_06_estimates() -> (f64, f64, f64) {
    let prob = SLProblem::free(Interval::half_line());
    let w = CoefficientFn::from_fn("1/(4t^2)", |t| 0.25 / (t * t));
    let start = Instant::now();
    let narrow = lambda0_rayleigh(&prob, &w, (1e-4, 1e4), 4000).unwrap();
    let wide = lambda0_rayleigh(&prob, &w, (1e-6, 1e6), 4000).unwrap();
    (narrow.estimate, wide.estimate, start.elapsed().as_secs_f64())
}

#[test]
fn criterion_06_lambda0_estimate() {
    let (narrow, wide, secs) = criterion_06_estimates();
    let in_band = C6_BAND.0 < narrow && narrow < C6_BAND.1;
    let exact = truncated_hardy(1e-4, 1e4);
    let exact_wide = truncated_hardy(1e-6, 1e6);
    let formula_err = ((narrow - exact) / exact).abs().max(((wide - exact_wide) / exact_wide).abs());
    let decreasing = wide < narrow;
    // The truncated problem on (ε, R) has best constant 1 + 4π²/ln(R/ε)²
    // exactly, ≈ 1.116 for (1e-4, 1e4); no correct estimate lies in the band.
    line(
        6,
        "lambda0 estimate",
        in_band && decreasing && secs < C6_RUNTIME_S,
        &format!(
            "estimate {narrow:.6} (band {:?} unattainable: exact {exact:.6}), widened {wide:.6} (exact {exact_wide:.6}), decreasing {decreasing}, formula error {formula_err:.1e}, {secs:.2} s",
            C6_BAND
        ),
    );
    assert!(decreasing && formula_err < C6_FORMULA_RTOL && secs < C6_RUNTIME_S);
}

#[test]
#[ignore = "the band excludes the exact truncated constant 1 + 4π²/ln(1e8)² ≈ 1.116"]
fn criterion_06_literal_band() {
    let (narrow, _, _) = criterion_06_estimates();
    assert!(C6_BAND.0 < narrow && narrow < C6_BAND.1, "{narrow}");
}

fn seed_pair(l: f64, nodes: &[f64]) -> SolutionPair {
    let s = 2f64.sqrt();
    let v1 = GridFunction::sample(nodes, |t| Ok(s * t), Some(&|_| Ok(s))).unwrap();
    let v2 = GridFunction::sample(nodes, |t| Ok((l - t) / (s * l)), Some(&|_| Ok(-1.0 / (s * l))))
        .unwrap();
    SolutionPair::new(&free(0.0, l), v1, v2).unwrap()
}

#[test]
fn criterion_07_series_recursion() {
    let l = 2.0;
    let nodes = geomspace(1e-5, l, 500);
    let prob = free(0.0, l);
    let opts = |pair| SeriesOptions {
        alpha: 0.0,
        anchors: AnchorPolicy::Fixed(l),
        initial_pair: Some(pair),
        nodes: Some(nodes.clone()),
        ..SeriesOptions::default()
    };
    // Depth 2 exposes G₁ through the second step's pair: with v1 = s y₁ and
    // v2 = v1 ∫_t^L 1/v1², G₁ = (v2 / v1) s².
    let out = weight_series(&prob, l - 1.0, &[(1.0 / l, 0.0, 1.0)], 2, &opts(seed_pair(l, &nodes))).unwrap();
    let y1 = &out.steps[0].y;
    let (v1, v2) = (&out.steps[1].v1, &out.steps[1].v2);
    let mut g_err = 0.0f64;
    let mut w_err = 0.0f64;
    for &t in &nodes[..nodes.len() - 1] {
        let s = v1.eval(t).unwrap() / y1.eval(t).unwrap();
        let g1 = v2.eval(t).unwrap() / v1.eval(t).unwrap() * s * s;
        g_err = g_err.max((g1 - 0.5 * (l / t).ln()).abs());
        let w1 = out.steps[0].weight.w.eval(t).unwrap();
        w_err = w_err.max((w1 * 4.0 * t * t - 1.0).abs());
    }
    // Truncated series above (2t)⁻² for c1 ≤ 1/L, checked against the closed
    // form on a finer grid.
    let fine = geomspace(1e-5, l, 2001);
    let mut exceeds = true;
    let mut cf_err = 0.0f64;
    for c1 in [1.0 / l, 0.5 / l] {
        for depth in [2, 3] {
            let o = SeriesOptions {
                nodes: Some(fine.clone()),
                ..opts(seed_pair(l, &fine))
            };
            let out = weight_series(&prob, l - 1.0, &[(c1, 0.0, 1.0)], depth, &o).unwrap();
            let total = out.partial_sums.last().unwrap();
            let exact = series_weight_closed_form(l, c1, 0.0, depth).unwrap();
            let mut e = 0.0f64;
            for &t in &fine[..fine.len() - 1] {
                let v = total.eval(t).unwrap();
                exceeds &= v > 0.25 / (t * t);
                e = e.max((v / exact.eval(t).unwrap() - 1.0).abs());
            }
            cf_err = cf_err.max(e);
        }
    }
    // The closed-form terms themselves are positive, so the sum exceeds its
    // first term (2t)⁻² when c1 = 1/L.
    let second = series_term_closed_form(l, 1.0 / l, 0.0, 2).unwrap();
    let positive = nodes[..nodes.len() - 1].iter().all(|&t| second.eval(t).unwrap() > 0.0);
    let pass = g_err <= C7_TOL && w_err <= C7_TOL && exceeds && cf_err <= C7_CLOSED_FORM_RTOL && positive;
    line(
        7,
        "series recursion",
        pass,
        &format!("G1 error {g_err:.1e}, first term error {w_err:.1e}, exceeds (2t)^-2 {exceeds}, closed-form error {cf_err:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_pullback_consistency() {
    let rp = RadialProblem::new(3, bump(), 1.0).unwrap();
    let sup = rp.sup_quotient().unwrap();
    let a = 0.5 / sup;
    let iv = Interval::half_line();
    let nodes = make_grid(&iv, iv.default_cutoffs(1e-6), 2001, Grading::LogBoth).unwrap();
    let classical_1d = classical_family(iv, &nodes).unwrap();
    let pull_classical = pullback_weight_nd(&rp, &classical_1d).unwrap();
    let direct_classical = classical_weight_nd(&rp);
    let pull_a = pullback_weight_nd(&rp, &a_family(a).unwrap()).unwrap();
    let direct_a = improved_weight_nd(&rp, a).unwrap();
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    for r in geomspace(1.001, 1e3, 400) {
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
        e1 = e1.max(rel(pull_classical.w.eval(r).unwrap(), direct_classical.w.eval(r).unwrap()));
        e2 = e2.max(rel(pull_a.w.eval(r).unwrap(), direct_a.w.eval(r).unwrap()));
    }
    let pass = e1 <= C8_TOL && e2 <= C8_TOL;
    line(
        8,
        "pullback consistency",
        pass,
        &format!("classical {e1:.1e}, a-family vs improved {e2:.1e}"),
    );
    assert!(pass);
}

/// Newton potential `∫ φ(|y|) / ((n-2) ω_{n-1} |x-y|^{n-2}) dy` at `|x| = r0`
/// outside the support, by angular quadrature, times `r0^{n-2}`.
fn newton_constant(n: usize, r0: f64) -> f64 {
    // ω_{n-1} = |S^{n-1}| and ω_{n-2} = |S^{n-2}|, hard-coded.
    let (omega_n1, omega_n2) = match n {
        3 => (4.0 * PI, 2.0 * PI),
        4 => (2.0 * PI * PI, 4.0 * PI),
        5 => (8.0 * PI * PI / 3.0, 2.0 * PI * PI),
        _ => unreachable!(),
    };
    let rule = gauss_legendre(20);
    let k = (n - 2) as f64;
    let radial = |s: f64| {
        let phi = (1.0 - s * s).powi(3);
        let angular = gl(
            |psi: f64| {
                let d2 = r0 * r0 + s * s - 2.0 * r0 * s * psi.cos();
                psi.sin().powi(n as i32 - 2) / d2.powf(0.5 * k)
            },
            0.0,
            PI,
            8,
            &rule,
        );
        phi * s.powi(n as i32 - 1) * omega_n2 * angular
    };
    gl(radial, 0.0, 1.0, 8, &rule) / (k * omega_n1) * r0.powf(k)
}

#[test]
fn criterion_09_example_one() {
    let mut w_err = 0.0f64;
    let mut c_err = 0.0f64;
    for n in [3usize, 4, 5] {
        let rp = RadialProblem::new(n, bump(), 1.0).unwrap();
        let w = classical_weight_nd(&rp);
        let k = (n as f64 - 2.0) / 2.0;
        for r in geomspace(1.001, 1e3, 300) {
            let exact = k * k / (r * r);
            w_err = w_err.max((w.w.eval(r).unwrap() / exact - 1.0).abs());
        }
        let oracle = newton_constant(n, 2.0);
        c_err = c_err.max((rp.exterior_c / oracle - 1.0).abs());
    }
    let pass = w_err <= C9_WEIGHT_TOL && c_err <= C9_CONSTANT_TOL;
    line(
        9,
        "example one",
        pass,
        &format!("weight error {w_err:.1e}, exterior constant vs Newton potential {c_err:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_improved_domination() {
    let rp = RadialProblem::new(3, bump(), 1.0).unwrap();
    let a = 0.5 / rp.sup_quotient().unwrap();
    let improved = improved_weight_nd(&rp, a).unwrap();
    let classical = classical_weight_nd(&rp);
    // Oracle for G_φ outside the support: the Newton-potential constant.
    let c = newton_constant(3, 2.0);
    let mut err = 0.0f64;
    let mut above = true;
    for r in geomspace(1.001, 1e3, 300) {
        let ratio = improved.w.eval(r).unwrap() / classical.w.eval(r).unwrap();
        let expect = 4.0 / (2.0 - a * c / r).powi(2);
        err = err.max((ratio / expect - 1.0).abs());
        above &= ratio > 1.0;
    }
    let pass = err <= C10_TOL && above;
    line(
        10,
        "improved domination",
        pass,
        &format!("ratio error {err:.1e}, ratio > 1 everywhere {above}"),
    );
    assert!(pass);
}

#[test]
fn criterion_11_rellich() {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for n in [3usize, 4, 5] {
        let rp = RadialProblem::new(n, bump(), 1.0).unwrap();
        let a = 0.5 / rp.sup_quotient().unwrap();
        let bumps = random_bumps(1.0, 20, 2024);
        for r in rellich_check(&rp, a, &bumps).unwrap() {
            let rel = (r.lhs - r.rhs) / (1.0 + r.lhs);
            worst = worst.min(rel);
            if rel < -C11_MARGIN {
                failures += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures == 0 && secs < C11_RUNTIME_S;
    line(
        11,
        "Rellich inequality",
        pass,
        &format!("60 test functions, worst (LHS - RHS)/(1 + LHS) = {worst:.3e}, {secs:.2} s"),
    );
    assert!(pass);
}

#[test]
fn criterion_12_null_criticality_at_infinity() {
    let rp = RadialProblem::new(3, bump(), 1.0).unwrap();
    let a = 0.5 / rp.sup_quotient().unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for w in [classical_weight_nd(&rp), improved_weight_nd(&rp, a).unwrap()] {
        let (_, outer) = null_criticality_integral_nd(&rp, &w).unwrap();
        let log = matches!(outer.model, GrowthModel::Log { .. });
        ok &= outer.kind == VerdictKind::Divergent && log;
        detail.push(format!("{:?}: {:?} {:?}", w.kind, outer.kind, outer.model));
    }
    // Oracle for the classical case: the integrand is C/(4r).
    let (_, outer) = null_criticality_integral_nd(&rp, &classical_weight_nd(&rp)).unwrap();
    let mut win_err = 0.0f64;
    for w in &outer.windows {
        let exact = 0.25 * rp.exterior_c * (w.cutoff / outer.reference).ln();
        win_err = win_err.max((w.partial - exact).abs() / (1.0 + exact));
    }
    ok &= win_err < 1e-8;
    detail.push(format!("classical windows vs C/(4r): {win_err:.1e}"));
    line(12, "null-criticality at infinity", ok, &detail.join("; "));
    assert!(ok);
}

#[test]
fn criterion_13_liouville() {
    let a = 1.0;
    let rho = CoefficientFn::from_fn("(2t - t^2)^-2", move |t| (2.0 * t - a * t * t).powi(-2));
    let iv = Interval::new(0.0, 2.0 / a).unwrap();
    let (_, q_hat) = liouville_transform(&rho, &CoefficientFn::zero(), iv).unwrap();
    let mut sup = 0.0f64;
    for i in 0..=1000 {
        let t = 0.05 + (2.0 / a - 0.1) * i as f64 / 1000.0;
        sup = sup.max(q_hat.eval(t).unwrap().abs());
    }
    let pass = sup <= C13_TOL;
    line(13, "Liouville transform", pass, &format!("sup |q_hat| = {sup:.1e}"));
    assert!(pass);
}

#[test]
fn criterion_14_classifier_corpus() {
    // (integrand, interval, side, divergent?) with labels from closed-form
    // antiderivatives.
    let corpus: [(&str, (f64, f64), Side, bool); 12] = [
        ("1/t", (0.0, 1.0), Side::Left, true),
        ("1/(t*ln(1/t))", (0.0, 1.0), Side::Left, true),
        ("t^(-1.5)", (0.0, 1.0), Side::Left, true),
        ("1/(t*sqrt(ln(1/t)))", (0.0, 1.0), Side::Left, true),
        ("1/t", (0.0, f64::INFINITY), Side::Right, true),
        ("1/sqrt(t)", (0.0, f64::INFINITY), Side::Right, true),
        ("t^(-0.5)", (0.0, 1.0), Side::Left, false),
        ("t^(-0.5)*(1 + t)", (0.0, 1.0), Side::Left, false),
        ("1/(t*ln(1/t)^2)", (0.0, 1.0), Side::Left, false),
        ("ln(1/t)", (0.0, 1.0), Side::Left, false),
        ("exp(-t)", (0.0, f64::INFINITY), Side::Right, false),
        ("t^(-2)", (0.0, f64::INFINITY), Side::Right, false),
    ];
    let (mut right, mut wrong, mut inconclusive) = (0, 0, 0);
    for (src, (a, b), side, divergent) in corpus {
        let f = CoefficientFn::parse(src).unwrap();
        let v = improper_integral_classify(&f, side, &Interval::new(a, b).unwrap(), 8).unwrap();
        match (v.kind, divergent) {
            (VerdictKind::Divergent, true) | (VerdictKind::Convergent, false) => right += 1,
            (VerdictKind::Inconclusive, _) => inconclusive += 1,
            _ => {
                wrong += 1;
                let mut err = std::io::stderr().lock();
                let _ = writeln!(err, "[acceptance]    misclassified {src}: {:?}", v.kind);
            }
        }
    }
    let pass = right >= 11 && wrong == 0 && inconclusive <= 1;
    line(
        14,
        "classifier corpus",
        pass,
        &format!("{right}/12 correct, {wrong} wrong, {inconclusive} inconclusive"),
    );
    assert!(pass);
}
