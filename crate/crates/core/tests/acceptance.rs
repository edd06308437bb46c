//! Acceptance suite. Each test covers one criterion and prints a single
//! `criterion N ... PASS|FAIL` line (visible with `--nocapture`).

mod support;

use std::time::Instant;

use curvegraph::bounds::{full_report, ReportOptions, Status};
use curvegraph::curvature::{
    cd_check_graph, curvature_value, local_forms, product_superadditivity_residual, Dimension,
    PSD_TOL,
};
use curvegraph::generators::{
    dumbbell_witness_functions, product_tightness_function, torus_generators, triangle_measure,
    Family,
};
use curvegraph::graph::{cartesian_product, MeasureMode, WeightedGraph};
use curvegraph::isoperimetry::{multiway_constant, Mode};
use curvegraph::spectral::{
    boundary_measure_check, decompose, gradient_estimate_check, l1_contraction_check,
    reverse_poincare_check, semigroup_residuals,
};
use curvegraph::curvature::gamma2_value;
use rand::Rng;
use support::*;

const INF: Dimension = Dimension::Infinite;

fn finish(id: u32, name: &str, start: Instant, limit_secs: f64, failures: Vec<String>) {
    let secs = start.elapsed().as_secs_f64();
    let mut failures = failures;
    if secs > limit_secs {
        failures.push(format!("took {secs:.2}s, limit {limit_secs}s"));
    }
    if failures.is_empty() {
        println!("criterion {id} ({name}): PASS [{secs:.2}s]");
    } else {
        println!("criterion {id} ({name}): FAIL [{secs:.2}s]");
        for f in &failures {
            println!("    {f}");
        }
    }
    assert!(failures.is_empty(), "criterion {id} failed: {failures:?}");
}

#[test]
fn criterion_01_explicit_gamma2_matrices() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut r = rng(1);
    for trial in 0..20 {
        let p: Vec<f64> = (0..6).map(|_| r.gen_range(0.1..5.0)).collect();
        let (a, b, c, ma, mb, mc) = (p[0], p[1], p[2], p[3], p[4], p[5]);
        let g = gen(Family::Triangle { a, b, c }, triangle_measure(ma, mb, mc));
        let forms = local_forms(&g, 0);
        let gap = relative_gap(&forms.gamma2, &triangle_gamma2_closed_form(a, b, c, ma, mb, mc));
        if gap > 1e-10 {
            failures.push(format!("triangle trial {trial}: relative gap {gap:e}"));
        }

        let mt = p[3];
        let t = gen(Family::Tetrahedron { a, b, c }, MeasureMode::Constant(mt));
        let scaled = local_forms(&t, 0).gamma2 * (4.0 * mt * mt);
        let gap = relative_gap(&scaled, &tetrahedron_gamma2_closed_form(a, b, c));
        if gap > 1e-10 {
            failures.push(format!("tetrahedron trial {trial}: relative gap {gap:e}"));
        }
    }
    finish(1, "explicit triangle and tetrahedron matrices", start, 1.0, failures);
}

#[test]
fn criterion_02_triangle_curvature_cases() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut r = rng(2);
    for _ in 0..10 {
        let (a, b, c) = (r.gen_range(0.1..5.0), r.gen_range(0.1..5.0), r.gen_range(0.1..5.0));
        let degree = gen(Family::Triangle { a, b, c }, MeasureMode::Degree);
        if !cd_check_graph(&degree, 0.0, INF, PSD_TOL).holds {
            failures.push(format!("degree measure a={a} b={b} c={c} not CD(0,inf)"));
        }
        let unit = gen(Family::Triangle { a, b, c: a }, MeasureMode::Unit);
        if !cd_check_graph(&unit, 0.0, INF, PSD_TOL).holds {
            failures.push(format!("unit measure a=c={a} b={b} not CD(0,inf)"));
        }
    }
    for b in [5.01, 0.12] {
        let g = gen(Family::Triangle { a: 1.0, b, c: 1.0 / b }, MeasureMode::Unit);
        let check = cd_check_graph(&g, 0.0, INF, PSD_TOL);
        let at_x = &check.per_vertex[0];
        if at_x.holds || at_x.min_eigenvalue >= 0.0 {
            failures.push(format!("b = {b}: Γ₂(x) has no negative eigenvalue"));
        }
    }
    finish(2, "triangle CD(0,inf) cases", start, 1.0, failures);
}

#[test]
fn criterion_03_cycle_spectrum() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 3..=50 {
        let g = gen(Family::Cycle { n }, MeasureMode::Constant(2.0));
        let dec = decompose(&g).unwrap();
        let gap = spectra_gap(dec.eigenvalues(), &cycle_spectrum(n));
        if gap > 1e-9 {
            failures.push(format!("C_{n}: spectrum gap {gap:e}"));
        }
    }
    let g = gen(Family::Cycle { n: 200 }, MeasureMode::Constant(2.0));
    let dec = decompose(&g).unwrap();
    let l2 = dec.lambda(2).unwrap();
    for k in 2..=6 {
        let ratio = dec.lambda(k).unwrap() / l2;
        let limit = ((k / 2) * (k / 2)) as f64;
        if ((ratio - limit) / limit).abs() > 0.02 {
            failures.push(format!("C_200: λ_{k}/λ_2 = {ratio}, limit {limit}"));
        }
    }
    finish(3, "cycle spectrum and ratio limit", start, 5.0, failures);
}

#[test]
fn criterion_04_cycle_multiway_constants() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 3..=12 {
        let g = gen(Family::Cycle { n }, MeasureMode::Constant(2.0));
        for k in 2..=4.min(n) {
            let h = multiway_constant(&g, k, Mode::Subpartition).unwrap().value;
            let expected = 1.0 / (n / k) as f64;
            if (h - expected).abs() > 1e-12 {
                failures.push(format!("h_{k}(C_{n}) = {h}, expected {expected}"));
            }
            if n <= 10 {
                let naive = naive_multiway(&g, k, Mode::Subpartition);
                if (h - naive).abs() > 1e-12 {
                    failures.push(format!("h_{k}(C_{n}) = {h}, naive {naive}"));
                }
            }
        }
    }
    finish(4, "multi-way constants of cycles", start, 30.0, failures);
}

#[test]
fn criterion_05_dumbbells() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 3..=10 {
        let g = gen(Family::Dumbbell { n }, MeasureMode::Degree);
        let (f0, g0) = dumbbell_witness_functions(n).unwrap();
        let y0 = n - 1;
        if n >= 4 {
            let value = gamma2_value(&g, &f0, y0);
            let expected = (3.0 - n as f64) / (2.0 * (n * n) as f64);
            if (value - expected).abs() > 1e-10 {
                failures.push(format!("N={n}: Γ₂(f₀)(y₀) = {value}, expected {expected}"));
            }
        }
        if let Some(g0) = g0 {
            let value = gamma2_value(&g, &g0, y0);
            if (value + 1.0 / 9.0).abs() > 1e-10 {
                failures.push(format!("N=3: Γ₂(g₀)(y₀) = {value}, expected -1/9"));
            }
        }
        let unit = gen(Family::Dumbbell { n }, MeasureMode::Unit);
        for x in (0..2 * n).filter(|&x| x != y0 && x != n) {
            let kd = curvature_value(&g, x, INF).unwrap().value;
            if kd < 0.5 - 1e-9 {
                failures.push(format!("N={n}, degree measure: K({x}) = {kd} < 1/2"));
            }
            let ku = curvature_value(&unit, x, INF).unwrap().value;
            if ku < n as f64 / 2.0 - 1e-9 {
                failures.push(format!("N={n}, unit measure: K({x}) = {ku} < N/2"));
            }
        }
        if n >= 5 {
            let dec = decompose(&g).unwrap();
            let ratio = dec.lambda(4).unwrap() / dec.lambda(2).unwrap();
            if ratio < (n * n) as f64 / 2.0 {
                failures.push(format!("N={n}: λ₄/λ₂ = {ratio} < N²/2"));
            }
        }
    }
    finish(5, "dumbbell curvature and spectrum", start, 10.0, failures);
}

fn soundness_families() -> Vec<(String, WeightedGraph)> {
    let mut out = Vec::new();
    for n in 3..=50 {
        out.push((format!("C_{n}"), gen(Family::Cycle { n }, MeasureMode::Constant(2.0))));
    }
    for n in 2..=10 {
        out.push((format!("K_{n} unit"), gen(Family::Complete { n }, MeasureMode::Unit)));
        out.push((format!("K_{n} degree"), gen(Family::Complete { n }, MeasureMode::Degree)));
    }
    for d in 1..=5 {
        out.push((format!("Q_{d}"), gen(Family::Hypercube { d }, MeasureMode::Unit)));
    }
    for m in 2..=18 {
        for n in m..=36 / m {
            let family = Family::AbelianCayley {
                orders: vec![m, n],
                generators: torus_generators(2),
            };
            out.push((format!("Z_{m} x Z_{n}"), gen(family, MeasureMode::Unit)));
        }
    }
    for n in 2..=5 {
        out.push((format!("G_{n},2"), gen(Family::MimuraProduct { n }, MeasureMode::Unit)));
    }
    out
}

#[test]
fn criterion_06_inequality_soundness() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let options = ReportOptions {
        enumeration_budget: 2e5,
        cheeger_budget: 1e6,
        ..ReportOptions::default()
    };
    let gated = ["buser", "eigenvalue_ratio", "higher_buser"];
    for (name, g) in soundness_families() {
        if !cd_check_graph(&g, 0.0, INF, PSD_TOL).holds {
            failures.push(format!("{name}: not certified CD(0,inf)"));
            continue;
        }
        let k_max = 6.min(g.n()).max(2);
        let report = full_report(&g, k_max, &options).unwrap();
        for gate in gated {
            if !report.entries_named(gate).any(|e| e.status == Status::Pass) {
                failures.push(format!("{name}: no passing {gate} entry"));
            }
        }
        for e in &report.entries {
            if e.status == Status::Fail {
                failures.push(format!("{name}: {} [{}] k={:?} failed: {} > {}", e.name, e.tag, e.k, e.lhs, e.rhs));
            }
            let must_pass = gated.contains(&e.name.as_str()) && e.tag != "observed"
                || (e.name == "concentration" || e.name == "diameter" || e.name == "finer_cheeger")
                    && e.note.is_none();
            if must_pass && e.status != Status::Pass {
                failures.push(format!("{name}: {} [{}] k={:?} is {:?}: {:?}", e.name, e.tag, e.k, e.status, e.note));
            }
        }
    }
    for n in 3..=8 {
        let g = gen(Family::Dumbbell { n }, MeasureMode::Degree);
        let report = full_report(&g, 4.min(g.n()), &options).unwrap();
        for e in &report.entries {
            if e.status == Status::Fail {
                failures.push(format!("dumbbell {n}: {} [{}] failed", e.name, e.tag));
            }
            let universal = ["improved_cheeger", "finer_cheeger"].contains(&e.name.as_str())
                || e.name == "concentration" && e.tag == "lambda_2"
                || e.name == "diameter" && e.tag == "lambda_2";
            if universal && e.status != Status::Pass {
                failures.push(format!("dumbbell {n}: {} [{}] is {:?}", e.name, e.tag, e.status));
            }
        }
    }
    finish(6, "inequality soundness sweep", start, 120.0, failures);
}

#[test]
fn criterion_07_product_superadditivity() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut r = rng(7);
    let c4 = gen(Family::Cycle { n: 4 }, MeasureMode::Unit);
    let k3 = gen(Family::Complete { n: 3 }, MeasureMode::Unit);
    for (g1, g2, name) in [(&c4, &k3, "C_4 x K_3"), (&k3, &k3, "K_3 x K_3")] {
        for _ in 0..200 {
            let f = random_function(&mut r, g1.n() * g2.n());
            let x = r.gen_range(0..g1.n());
            let y = r.gen_range(0..g2.n());
            let res = product_superadditivity_residual(g1, g2, &f, x, y).unwrap();
            if res.residual() < -1e-10 {
                failures.push(format!("{name}: residual {} at ({x},{y})", res.residual()));
            }
        }
    }
    for g in [&k3, &c4] {
        for x in 0..g.n() {
            // a CD equality witness at x: the minimizer from the exact curvature
            let f = curvature_value(g, x, INF).unwrap().witness;
            let big = product_tightness_function(g, &f, x);
            let res = product_superadditivity_residual(g, g, &big, x, x).unwrap();
            if res.residual().abs() > 1e-9 {
                failures.push(format!("tightness at ({x},{x}): residual {}", res.residual()));
            }
        }
    }
    finish(7, "product superadditivity and tightness", start, 10.0, failures);
}

fn certified_graphs() -> Vec<(String, WeightedGraph)> {
    vec![
        ("C_12".into(), gen(Family::Cycle { n: 12 }, MeasureMode::Constant(2.0))),
        ("K_5 degree".into(), gen(Family::Complete { n: 5 }, MeasureMode::Degree)),
        ("K_4 unit".into(), gen(Family::Complete { n: 4 }, MeasureMode::Unit)),
        ("Q_4".into(), gen(Family::Hypercube { d: 4 }, MeasureMode::Unit)),
        (
            "Z_3 x Z_5".into(),
            gen(
                Family::AbelianCayley {
                    orders: vec![3, 5],
                    generators: torus_generators(2),
                },
                MeasureMode::Unit,
            ),
        ),
        ("G_3,2".into(), gen(Family::MimuraProduct { n: 3 }, MeasureMode::Unit)),
        (
            "tetrahedron".into(),
            gen(Family::Tetrahedron { a: 1.0, b: 2.5, c: 0.4 }, MeasureMode::Constant(1.7)),
        ),
    ]
}

#[test]
fn criterion_08_heat_machinery() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut r = rng(8);
    for (name, g) in certified_graphs() {
        let dec = decompose(&g).unwrap();
        let cert = cd_check_graph(&g, 0.0, INF, PSD_TOL).certificate();
        if cert.is_none() {
            failures.push(format!("{name}: not certified"));
            continue;
        }
        let cert = cert.as_ref();
        for _ in 0..50 {
            let f = random_function(&mut r, g.n());
            let h = random_function(&mut r, g.n());
            let (s, t) = (r.gen_range(0.0..5.0), r.gen_range(0.0..5.0));
            let res = semigroup_residuals(&dec, &f, &h, s, t).unwrap();
            if !res.within(1e-8) {
                failures.push(format!("{name}: semigroup residuals {res:?}"));
            }
        }
        for _ in 0..50 {
            let f = random_function(&mut r, g.n());
            for t in [0.1, 1.0, 5.0] {
                let c = gradient_estimate_check(&g, &dec, cert, &f, t, 0.0).unwrap();
                if !c.holds {
                    failures.push(format!("{name}: gradient estimate t={t}: {c:?}"));
                }
                let c = reverse_poincare_check(&g, &dec, cert, &f, t).unwrap();
                if !c.holds {
                    failures.push(format!("{name}: reverse Poincaré t={t}: {c:?}"));
                }
                let c = l1_contraction_check(&g, &dec, cert, &f, t).unwrap();
                if !c.holds {
                    failures.push(format!("{name}: L1 contraction t={t}: {c:?}"));
                }
            }
            let s = random_set(&mut r, &g);
            let c = boundary_measure_check(&g, &s);
            if !c.holds {
                failures.push(format!("{name}: boundary measure: {c:?}"));
            }
        }
    }
    finish(8, "heat semigroup inequalities", start, 30.0, failures);
}

#[test]
fn criterion_09_product_spectrum() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let c4 = gen(Family::Cycle { n: 4 }, MeasureMode::Unit);
    let k3 = gen(Family::Complete { n: 3 }, MeasureMode::Unit);
    let product = cartesian_product(&c4, &k3, MeasureMode::Unit).unwrap();
    let d1 = decompose(&c4).unwrap();
    let d2 = decompose(&k3).unwrap();
    let sums: Vec<f64> = d1
        .eigenvalues()
        .iter()
        .flat_map(|a| d2.eigenvalues().iter().map(move |b| a + b))
        .collect();
    let gap = spectra_gap(decompose(&product).unwrap().eigenvalues(), &sums);
    if gap > 1e-8 {
        failures.push(format!("spectrum gap {gap:e}"));
    }
    finish(9, "product spectrum", start, 1.0, failures);
}

#[test]
fn criterion_10_isoperimetric_ratio_evidence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let g = gen(Family::MimuraProduct { n: 4 }, MeasureMode::Unit);
    let h2 = multiway_constant(&g, 2, Mode::Subpartition).unwrap().value;
    let h3 = multiway_constant(&g, 3, Mode::Subpartition).unwrap().value;
    if h2 > 1.0 + 1e-12 {
        failures.push(format!("h_2 = {h2} > 1"));
    }
    if h3 < 2.0 - 1e-12 {
        failures.push(format!("h_3 = {h3} < 2"));
    }
    let options = ReportOptions {
        mimura_evidence: true,
        ..ReportOptions::default()
    };
    let report = full_report(&g, 4, &options).unwrap();
    match report.entries_named("mimura").next() {
        Some(e) if e.status == Status::Pass => {}
        other => failures.push(format!("mimura entry: {other:?}")),
    }
    let ratios: Vec<_> = report.entries_named("isoperimetric_ratio").collect();
    if ratios.is_empty() {
        failures.push("no isoperimetric ratio entries".into());
    }
    for e in ratios {
        let c = e.inputs.get("implied_constant").and_then(|v| v.as_f64());
        if e.status != Status::ReportOnly || !c.is_some_and(f64::is_finite) {
            failures.push(format!("ratio entry k={:?}: {:?} constant {c:?}", e.k, e.status));
        }
    }
    if report.has_failures() {
        failures.push("report contains Fail entries".into());
    }
    finish(10, "multi-way ratio evidence on K_4 x K_2", start, 30.0, failures);
}
