//! The pipeline behind each mode.

use serde_json::{json, Value};

use crate::certify::{
    certify_optimality_1d_with, CertifyOptions, ClassifyOptions, DivergenceVerdict, OptimalityReport,
    VerdictKind, RESIDUAL_TOL,
};
use crate::coef::CoefficientFn;
use crate::error::Error;
use crate::hardy1d::{
    a_family_on, classical_family, ep_solution, ep_weight, series_weight_closed_form, u_xi,
    weight_series, AnchorPolicy, EPFamily, Provenance, SeriesOptions, WeightFamily1D,
};
use crate::nd::{
    classical_weight_nd, improved_weight_nd, null_criticality_integral_nd, random_bumps,
    rellich_check, NDWeight, RadialProblem,
};
use crate::ode::{geomspace, make_grid, Endpoint, Grading, GridFunction, Interval};
use crate::sl::{apply_l, SLProblem, SolutionPair};

use super::config::{FamilyKind, JobConfig, SeedPair};
use super::emit::{envelope, Table};
use super::{Mode, Status};

/// Everything a job produces; `report` is the full JSON envelope.
#[derive(Debug, Clone)]
pub struct JobOutput {
    pub status: Status,
    pub report: Value,
    pub tables: Vec<Table>,
}

/// Thresholds on the a-family eigenfunctions `u_ξ`.
const UXI_RESIDUAL_TOL: f64 = 1e-7;
const UXI_BOUNDARY_TOL: f64 = 1e-9;

pub fn run_job(mode: Mode, cfg: &JobConfig, seed: u64) -> Result<JobOutput, Error> {
    log::info!("running {} job", mode.name());
    let (status, result, tables) = match mode {
        Mode::Verify1d => verify_1d(cfg)?,
        Mode::EpFamily => ep_family(cfg)?,
        Mode::AFamily => a_family_job(cfg)?,
        Mode::Series => series(cfg)?,
        Mode::NdExample => nd_example(cfg)?,
        Mode::Rellich => rellich(cfg, seed)?,
    };
    Ok(JobOutput {
        status,
        report: envelope(mode, status, seed, result),
        tables,
    })
}

type Job = (Status, Value, Vec<Table>);

fn expr(key: &str, src: &str) -> Result<CoefficientFn, Error> {
    CoefficientFn::parse(src).map_err(|e| Error::config(key, e.to_string()))
}

fn problem(cfg: &JobConfig) -> Result<SLProblem, Error> {
    let [a, b] = cfg.problem.interval;
    Ok(SLProblem::new(
        expr("problem.p", &cfg.problem.p)?,
        expr("problem.q", &cfg.problem.q)?,
        Interval::new(a, b)?,
    ))
}

fn grid(cfg: &JobConfig, iv: &Interval) -> Result<Vec<f64>, Error> {
    make_grid(iv, iv.default_cutoffs(cfg.grid.depth), cfg.grid.nodes, Grading::LogBoth)
}

fn certify_options(cfg: &JobConfig) -> CertifyOptions {
    CertifyOptions {
        classify: ClassifyOptions {
            windows: cfg.certify.windows,
            ratio: cfg.certify.ratio,
            ..ClassifyOptions::default()
        },
        xis: cfg.certify.xis.clone(),
        lambda0_mesh: (cfg.certify.mesh > 0).then_some(cfg.certify.mesh),
        ..CertifyOptions::default()
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, Error> {
    Ok(serde_json::to_value(x)?)
}

fn family_json(fam: &WeightFamily1D) -> Result<Value, Error> {
    Ok(json!({
        "w": fam.w.label(),
        "f": fam.f_exact.as_ref().map(|f| f.label().to_string()),
        "provenance": to_value(&fam.provenance)?,
        "interval": [fam.iv.a, fam.iv.b],
        "grid": [fam.f_w.lo(), fam.f_w.hi(), fam.f_w.len()],
    }))
}

fn family_tables(prefix: &str, fam: &WeightFamily1D) -> Vec<Table> {
    let w = fam.w.clone();
    vec![
        Table::from_grid(&format!("{prefix}f_w"), &fam.f_w),
        Table::sampled(&format!("{prefix}w"), "t", fam.f_w.nodes(), |t| {
            w.eval(t).ok().map(|v| (v, w.derivative(t).ok()))
        }),
    ]
}

fn certified(prob: &SLProblem, fam: &WeightFamily1D, cfg: &JobConfig) -> Result<(OptimalityReport, Value), Error> {
    let report = certify_optimality_1d_with(prob, fam, &certify_options(cfg))?;
    log::info!("verdict {:?}", report.verdict);
    let v = to_value(&report)?;
    Ok((report, v))
}

fn verify_1d(cfg: &JobConfig) -> Result<Job, Error> {
    let mut prob = problem(cfg)?;
    let fam = match cfg.family.kind {
        FamilyKind::Classical => classical_family(prob.iv, &grid(cfg, &prob.iv)?)?,
        FamilyKind::AFamily => {
            let a = cfg.family.a;
            let b = 2.0 / a;
            if prob.iv.a != 0.0 || ((prob.iv.b - b) / b).abs() > 1e-12 {
                return Err(Error::config(
                    "problem.interval",
                    format!("the a-family with a = {a} lives on [0, {b}]"),
                ));
            }
            let iv = Interval::new(0.0, b)?.with_tags(Endpoint::Singular, Endpoint::Singular);
            prob.iv = iv;
            a_family_on(a, &grid(cfg, &iv)?)?
        }
        FamilyKind::Custom => {
            let w = expr("family.w", cfg.family.w.as_deref().unwrap_or_default())?;
            let f = expr("family.f", cfg.family.f.as_deref().unwrap_or_default())?;
            let nodes = grid(cfg, &prob.iv)?;
            let (fv, fd) = (f.clone(), f.clone());
            let f_w = GridFunction::sample(&nodes, move |t| fv.eval(t), Some(&move |t| fd.derivative(t)))?;
            WeightFamily1D {
                w,
                f_w,
                f_exact: Some(f),
                provenance: Provenance::External,
                iv: prob.iv,
            }
        }
    };
    let (report, rv) = certified(&prob, &fam, cfg)?;
    let result = json!({
        "problem": {"p": prob.p.label(), "q": prob.q.label(), "interval": [prob.iv.a, prob.iv.b]},
        "family": family_json(&fam)?,
        "report": rv,
        "verdict": to_value(&report.verdict)?,
    });
    Ok((Status::from_verdict(report.verdict), result, family_tables("", &fam)))
}

fn sample_expr(key: &str, src: &str, nodes: &[f64]) -> Result<GridFunction, Error> {
    let f = expr(key, src)?;
    let g = f.clone();
    GridFunction::sample(nodes, move |t| f.eval(t), Some(&move |t| g.derivative(t)))
}

fn ep_family(cfg: &JobConfig) -> Result<Job, Error> {
    let prob = problem(cfg)?;
    let nodes = grid(cfg, &prob.iv)?;
    let (pair, source) = match (&cfg.ep.v1, &cfg.ep.v2) {
        (Some(v1), Some(v2)) => {
            let v1 = sample_expr("ep.v1", v1, &nodes)?;
            let v2 = sample_expr("ep.v2", v2, &nodes)?;
            (SolutionPair::new(&prob, v1, v2)?, "expressions")
        }
        (None, None) => {
            let c = prob.iv.reference_point();
            let v1 = prob.solve(c, 1.0, 0.0, &nodes)?;
            let v2 = prob.solve(c, 0.0, 1.0 / prob.p_at(c)?, &nodes)?;
            (SolutionPair::new(&prob, v1, v2)?, "integrated from the reference point")
        }
        _ => return Err(Error::config("ep", "give both `v1` and `v2` or neither")),
    };
    let [c1, c2, c3] = cfg.ep.c;
    let wr = pair.wronskian;
    // Coefficients refer to the pair as given; rescaling v2 to Wronskian 1
    // keeps y and multiplies k by W².
    let k = wr * wr * (c3 * c3 - c1 * c2);
    let fam = EPFamily::new(pair.normalized(), c1, c2 * wr * wr, c3 * wr, k)?;
    let f = ep_solution(&fam)?;
    let weight = ep_weight(&f, k)?;
    // A radicand zero ends the domain; the weight is singular there.
    let mut iv = prob.iv;
    let lo = nodes.iter().position(|&t| t == f.lo()).unwrap_or(0);
    let hi = nodes.iter().position(|&t| t == f.hi()).unwrap_or(nodes.len() - 1);
    let restricted = lo > 0 || hi < nodes.len() - 1;
    if lo > 0 {
        iv = Interval::new(nodes[lo - 1], iv.b)?.with_tags(Endpoint::Singular, iv.right);
    }
    if hi < nodes.len() - 1 {
        iv = Interval::new(iv.a, nodes[hi + 1])?.with_tags(iv.left, Endpoint::Singular);
    }
    let sub = SLProblem::new(prob.p.clone(), prob.q.clone(), iv);
    let (report, rv) = certified(&sub, &weight, cfg)?;
    let mut tables = family_tables("", &weight);
    tables.push(Table::from_grid("v1", &fam.pair.v1));
    tables.push(Table::from_grid("v2", &fam.pair.v2));
    let result = json!({
        "problem": {"p": prob.p.label(), "q": prob.q.label(), "interval": [prob.iv.a, prob.iv.b]},
        "pair": {"source": source, "wronskian": wr},
        "c": [c1, c2, c3],
        "k": k,
        "domain": {"interval": [iv.a, iv.b], "restricted": restricted},
        "family": family_json(&weight)?,
        "report": rv,
        "verdict": to_value(&report.verdict)?,
    });
    Ok((Status::from_verdict(report.verdict), result, tables))
}

fn a_family_job(cfg: &JobConfig) -> Result<Job, Error> {
    let (a, m) = (cfg.afamily.a, cfg.afamily.m);
    let iv = Interval::new(0.0, 2.0 / a)?.with_tags(Endpoint::Singular, Endpoint::Singular);
    let prob = SLProblem::free(iv);
    let fam = a_family_on(a, &grid(cfg, &iv)?)?;
    // -f'' = f⁻³ = w f, checked against the closed-form second derivative.
    let pts = geomspace(1e-3 * iv.b, (1.0 - 1e-3) * iv.b, 1000);
    let mut identity = 0.0f64;
    for &t in &pts {
        let g = t * (2.0 - a * t);
        let fpp = -g.powf(-1.5);
        let wf = fam.w.eval(t)? * fam.f_at(t)?;
        identity = identity.max((-fpp - wf).abs() / (1.0 + wf.abs()));
    }
    let (report, rv) = certified(&prob, &fam, cfg)?;
    let mut status = Status::from_verdict(report.verdict);
    if identity > 1e-8 {
        status = status.and(Status::Fail);
    }
    let mut tables = family_tables("", &fam);
    let mut runs = Vec::new();
    let mut last_distance = f64::INFINITY;
    let mut monotone = true;
    let mut xis = cfg.afamily.xi.clone();
    xis.sort_by(|x, y| y.total_cmp(x));
    for (i, &xi) in xis.iter().enumerate() {
        let u = u_xi(a, m, xi)?;
        let residual = u.residual()?;
        let (left, right) = (u.left_condition(), u.right_condition());
        let excess = u.envelope_excess();
        let distance = u.distance_to_ground_state();
        monotone &= distance < last_distance;
        last_distance = distance;
        let ok = residual <= UXI_RESIDUAL_TOL
            && left <= UXI_BOUNDARY_TOL
            && right <= UXI_BOUNDARY_TOL
            && excess <= 0.0;
        if !ok {
            status = status.and(Status::Fail);
        }
        runs.push(json!({
            "xi": xi,
            "lambda": u.lambda,
            "window": [u.window.0, u.window.1],
            "residual": residual,
            "left_condition": left,
            "right_condition": right,
            "envelope_excess": excess,
            "distance_to_ground_state": distance,
            "pass": ok,
        }));
        tables.push(Table::from_grid(&format!("u_xi_{i}"), &u.u));
    }
    if !monotone {
        status = status.and(Status::Fail);
    }
    let result = json!({
        "a": a,
        "M": m,
        "identity_residual": identity,
        "family": family_json(&fam)?,
        "report": rv,
        "verdict": to_value(&report.verdict)?,
        "u_xi": runs,
        "distance_decreasing": monotone,
    });
    Ok((status, result, tables))
}

fn seed_pair(l: f64, nodes: &[f64], prob: &SLProblem) -> Result<SolutionPair, Error> {
    let s = 2f64.sqrt();
    let v1 = GridFunction::sample(nodes, |t| Ok(s * t), Some(&|_| Ok(s)))?;
    let v2 = GridFunction::sample(nodes, |t| Ok((l - t) / (s * l)), Some(&|_| Ok(-1.0 / (s * l))))?;
    SolutionPair::new(prob, v1, v2)
}

fn series(cfg: &JobConfig) -> Result<Job, Error> {
    let sc = &cfg.series;
    let prob = problem(cfg)?;
    let l = sc.m + 1.0;
    let anchors = match sc.anchors.as_str() {
        "fixed" => AnchorPolicy::Fixed(l),
        _ => AnchorPolicy::Margins,
    };
    let a = prob.iv.a;
    let lo = a + cfg.grid.depth * (l - a);
    let nodes = make_grid(&Interval::new(a, f64::INFINITY)?, (lo, l), cfg.grid.nodes, Grading::LogLeft)?;
    let initial_pair = match sc.seed {
        SeedPair::Principal => None,
        SeedPair::Classical => {
            if !prob.q.is_constant_on(lo, l, 0.0) || a != 0.0 {
                return Err(Error::config("series.seed", "the classical seed pair needs q = 0 on (0, L)"));
            }
            Some(seed_pair(l, &nodes, &prob)?)
        }
    };
    let coeffs: Vec<(f64, f64, f64)> = sc.c.iter().map(|c| (c[0], c[1], c[2])).collect();
    let opts = SeriesOptions {
        alpha: sc.alpha,
        beta: sc.beta,
        anchors,
        initial_pair,
        nodes: Some(nodes),
    };
    let out = weight_series(&prob, sc.m, &coeffs, sc.depth, &opts)?;

    let mut status = Status::Pass;
    let mut steps = Vec::new();
    let mut tables = Vec::new();
    for (j, st) in out.steps.iter().enumerate() {
        // y_j solves (L - w̃_j) y = 0; the anchor node spoils the stencil next
        // to it, so the check stops short of the window end.
        let op = prob.shifted(&out.partial_sums[j], 1.0);
        let ly = apply_l(&op, &st.y)?;
        let mut residual = 0.0f64;
        for (&t, &v) in ly.nodes().iter().zip(ly.values()) {
            if t > 0.95 * st.window.1 {
                continue;
            }
            let scale = out.partial_sums[j].eval(t)? * st.y.eval(t)?;
            residual = residual.max(v.abs() / (1.0 + scale));
        }
        if residual > RESIDUAL_TOL {
            status = status.and(Status::Fail);
        }
        steps.push(json!({
            "term": j + 1,
            "window": [st.window.0, st.window.1],
            "alpha": st.alpha,
            "beta": st.beta,
            "k": st.k,
            "residual": residual,
            "note": st.note,
        }));
        tables.push(Table::from_grid(&format!("y_{}", j + 1), &st.y));
        let w = out.partial_sums[j].clone();
        tables.push(Table::sampled(&format!("partial_sum_{}", j + 1), "t", st.y.nodes(), |t| {
            w.eval(t).ok().map(|v| (v, None))
        }));
    }
    // Partial sums increase: each term is positive.
    let probe = geomspace(out.solution.lo(), 0.9 * out.solution.hi(), 50);
    let mut increasing = true;
    for &t in &probe {
        let mut prev = 0.0;
        for s in &out.partial_sums {
            let v = s.eval(t)?;
            increasing &= v > prev;
            prev = v;
        }
    }
    if !increasing {
        status = status.and(Status::Fail);
    }
    // The closed form covers the classical seed with α = 0, a fixed anchor
    // and c2 = 0.
    let closed_form = if sc.seed == SeedPair::Classical
        && sc.alpha == 0.0
        && anchors == AnchorPolicy::Fixed(l)
        && coeffs.iter().all(|c| c.1 == 0.0 && c.0 == coeffs[0].0)
    {
        let exact = series_weight_closed_form(l, coeffs[0].0, 0.0, sc.depth)?;
        let total = out.partial_sums.last().expect("depth ≥ 1");
        let mut dev = 0.0f64;
        for &t in &probe {
            let e = exact.eval(t)?;
            dev = dev.max((total.eval(t)? / e - 1.0).abs());
        }
        if dev > RESIDUAL_TOL {
            status = status.and(Status::Fail);
        }
        Some(dev)
    } else {
        None
    };
    let result = json!({
        "m": sc.m,
        "depth": sc.depth,
        "c": sc.c,
        "anchors": sc.anchors,
        "seed": match sc.seed { SeedPair::Classical => "classical", SeedPair::Principal => "principal" },
        "steps": steps,
        "partial_sums_increasing": increasing,
        "closed_form_deviation": closed_form,
    });
    Ok((status, result, tables))
}

fn radial_problem(cfg: &JobConfig, n: usize) -> Result<RadialProblem, Error> {
    let phi = expr("nd.phi", &cfg.nd.phi)?;
    let rp = RadialProblem::new(n, phi, cfg.nd.r_phi)?;
    Ok(match &cfg.nd.u {
        Some(u) => rp.with_u(expr("nd.u", u)?),
        None => rp,
    })
}

fn verdict_json(v: &DivergenceVerdict) -> Result<Value, Error> {
    to_value(v)
}

fn nd_weight_json(rp: &RadialProblem, w: &NDWeight) -> Result<(Value, VerdictKind), Error> {
    let (inner, outer) = null_criticality_integral_nd(rp, w)?;
    let kind = outer.kind;
    Ok((
        json!({
            "kind": to_value(&w.kind)?,
            "w": w.w.label(),
            "ground_state": w.ground_state.label(),
            "hypothesis_ok": w.hypothesis_ok,
            "notes": w.notes,
            "null_criticality": {"inner": verdict_json(&inner)?, "outer": verdict_json(&outer)?},
        }),
        kind,
    ))
}

fn nd_tables(prefix: &str, w: &NDWeight, rs: &[f64]) -> Vec<Table> {
    let (ww, gs) = (w.w.clone(), w.ground_state.clone());
    vec![
        Table::sampled(&format!("{prefix}_weight"), "r", rs, |r| {
            ww.eval(r).ok().map(|v| (v, ww.derivative(r).ok()))
        }),
        Table::sampled(&format!("{prefix}_ground_state"), "r", rs, |r| {
            gs.eval(r).ok().map(|v| (v, gs.derivative(r).ok()))
        }),
    ]
}

fn nd_example(cfg: &JobConfig) -> Result<Job, Error> {
    let rp = radial_problem(cfg, cfg.nd.n)?;
    let sup = rp.sup_quotient()?;
    let a = cfg.nd.a_fraction / sup;
    let classical = classical_weight_nd(&rp);
    let improved = improved_weight_nd(&rp, a)?;
    let (cj, ck) = nd_weight_json(&rp, &classical)?;
    let (ij, ik) = nd_weight_json(&rp, &improved)?;
    let status = match (ck, ik) {
        (VerdictKind::Divergent, VerdictKind::Divergent) => Status::Pass,
        (VerdictKind::Convergent, _) | (_, VerdictKind::Convergent) => Status::Fail,
        _ => Status::Inconclusive,
    };
    let rs = geomspace(1e-2 * rp.r_phi, 1e2 * rp.r_phi, 400);
    let mut tables = nd_tables("classical", &classical, &rs);
    tables.extend(nd_tables("improved", &improved, &rs));
    tables.push(Table::sampled("potential", "r", &rs, |r| {
        rp.potential(r).ok().map(|(g, dg)| (g, Some(dg)))
    }));
    let result = json!({
        "n": rp.n,
        "phi": rp.phi.label(),
        "r_phi": rp.r_phi,
        "u": rp.u.label(),
        "exterior_c": rp.exterior_c,
        "sup_quotient": sup,
        "a": a,
        "harmonicity_residual": rp.harmonicity_residual()?,
        "poisson_residual": rp.poisson_residual()?,
        "classical": cj,
        "improved": ij,
    });
    Ok((status, result, tables))
}

fn rellich(cfg: &JobConfig, seed: u64) -> Result<Job, Error> {
    let mut status = Status::Pass;
    let mut runs = Vec::new();
    for &n in &cfg.rellich.dimensions {
        let rp = radial_problem(cfg, n)?;
        let a = cfg.nd.a_fraction / rp.sup_quotient()?;
        let bumps = random_bumps(rp.r_phi, cfg.rellich.count, seed);
        let results = rellich_check(&rp, a, &bumps)?;
        let passed = results.iter().filter(|r| r.pass).count();
        if passed < results.len() {
            status = status.and(Status::Fail);
        }
        let worst = results
            .iter()
            .map(|r| r.margin / (1.0 + r.lhs.abs()))
            .fold(f64::INFINITY, f64::min);
        let cases: Vec<Value> = bumps
            .iter()
            .zip(&results)
            .map(|(b, r)| Ok(json!({"psi": to_value(b)?, "result": to_value(r)?})))
            .collect::<Result<_, Error>>()?;
        runs.push(json!({
            "n": n,
            "a": a,
            "passed": passed,
            "count": results.len(),
            "worst_relative_margin": worst,
            "cases": cases,
        }));
    }
    Ok((status, json!({"dimensions": runs}), Vec::new()))
}
