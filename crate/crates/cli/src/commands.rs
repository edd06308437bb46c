use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use curvegraph::bounds::{full_report, ReportOptions, Status};
use curvegraph::curvature::{cd_check_graph, curvature_sweep, product_cd_bound, Dimension};
use curvegraph::generators::{generate as build_family, torus_generators, Family, FamilySpec};
use curvegraph::graph::cartesian_product;
use curvegraph::io::{read_graph, GraphFile, SCHEMA};
use curvegraph::isoperimetry::multiway_constant_with_budget;
use curvegraph::spectral::{decompose, semigroup_residuals};
use curvegraph::WeightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::table::{num, render};
use crate::{
    CurvatureArgs, FamilyName, Format, GenerateArgs, GraphInput, HeatArgs, IsoperimetryArgs,
    ProductArgs, SpectrumArgs, VerifyArgs,
};

fn load(input: &GraphInput) -> Result<WeightedGraph> {
    let g = read_graph(&input.graph)
        .with_context(|| format!("reading {}", input.graph.display()))?;
    match &input.measure {
        Some(mode) => Ok(g.with_measure(mode.clone())?),
        None => Ok(g),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

fn require<T>(value: Option<T>, flag: &str, family: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("family `{family}` needs --{flag}"))
}

fn parse_generators(text: &str) -> Result<Vec<Vec<i64>>> {
    text.split(';')
        .map(|tuple| {
            tuple
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<i64>()
                        .with_context(|| format!("bad generator entry `{v}`"))
                })
                .collect()
        })
        .collect()
}

pub fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let name = format!("{:?}", args.family).to_lowercase();
    let n = || require(args.n, "n", &name);
    let weights = || -> Result<(f64, f64, f64)> {
        Ok((
            require(args.a, "a", &name)?,
            require(args.b, "b", &name)?,
            require(args.c, "c", &name)?,
        ))
    };
    let family = match args.family {
        FamilyName::Cycle => Family::Cycle { n: n()? },
        FamilyName::Path => Family::Path { n: n()? },
        FamilyName::Complete => Family::Complete { n: n()? },
        FamilyName::Dumbbell => Family::Dumbbell { n: n()? },
        FamilyName::Mimura => Family::MimuraProduct { n: n()? },
        FamilyName::Hypercube => Family::Hypercube {
            d: require(args.d, "d", &name)?,
        },
        FamilyName::Cayley => {
            if args.orders.is_empty() {
                bail!("family `cayley` needs --orders");
            }
            let generators = match &args.generators {
                Some(text) => parse_generators(text)?,
                None => torus_generators(args.orders.len()),
            };
            Family::AbelianCayley {
                orders: args.orders.clone(),
                generators,
            }
        }
        FamilyName::Triangle => {
            let (a, b, c) = weights()?;
            Family::Triangle { a, b, c }
        }
        FamilyName::Tetrahedron => {
            let (a, b, c) = weights()?;
            Family::Tetrahedron { a, b, c }
        }
    };
    let g = build_family(&FamilySpec::new(family, args.measure))?;
    emit(&GraphFile::from_graph(&g).to_json(), args.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

pub fn spectrum(args: SpectrumArgs) -> Result<ExitCode> {
    let g = load(&args.input)?;
    let dec = decompose(&g)?;
    let count = match args.k {
        Some(k) => {
            dec.lambda(k)?;
            k
        }
        None => g.n(),
    };
    let values = &dec.eigenvalues()[..count];
    let text = match args.common.format {
        Format::Json => pretty(&json!({
            "schema": SCHEMA,
            "vertices": g.n(),
            "eigenvalues": values,
        })),
        Format::Table => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .enumerate()
                .map(|(i, &l)| vec![(i + 1).to_string(), num(l)])
                .collect();
            render(&["k", "lambda_k"], &rows)
        }
    };
    emit(&text, None)?;
    Ok(ExitCode::SUCCESS)
}

pub fn curvature(args: CurvatureArgs) -> Result<ExitCode> {
    let g = load(&args.input)?;
    let only = match &args.vertex {
        Some(id) => Some(
            g.index_of(id)
                .ok_or_else(|| anyhow!("unknown vertex id `{id}`"))?,
        ),
        None => None,
    };
    let sweep = curvature_sweep(&g, args.n)?;
    let check = cd_check_graph(&g, args.k, args.n, args.tol);
    let selected: Vec<usize> = match only {
        Some(x) => vec![x],
        None => (0..g.n()).collect(),
    };
    let holds = selected.iter().all(|&x| check.per_vertex[x].holds);
    let text = match args.common.format {
        Format::Json => {
            let vertices: Vec<Value> = selected
                .iter()
                .map(|&x| {
                    let c = &check.per_vertex[x];
                    let mut v = json!({
                        "vertex": g.label(x),
                        "curvature": finite_or_null(sweep[x].value),
                        "holds": c.holds,
                        "min_eigenvalue": c.min_eigenvalue,
                    });
                    if args.witness {
                        v["curvature_witness"] = json!(sweep[x].witness);
                        v["cd_witness"] = json!(c.witness);
                    }
                    v
                })
                .collect();
            pretty(&json!({
                "schema": SCHEMA,
                "dimension": args.n.to_string(),
                "K": args.k,
                "holds": holds,
                "vertices": vertices,
            }))
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = selected
                .iter()
                .map(|&x| {
                    let c = &check.per_vertex[x];
                    let mut row = vec![
                        g.label(x).to_string(),
                        num(sweep[x].value),
                        if c.holds { "yes" } else { "no" }.to_string(),
                        num(c.min_eigenvalue),
                    ];
                    if args.witness {
                        row.push(vector(&sweep[x].witness));
                    }
                    row
                })
                .collect();
            let mut headers = vec!["vertex", "K(x,n)", "CD holds", "min eigenvalue"];
            if args.witness {
                headers.push("witness");
            }
            format!(
                "CD({}, {}): {}\n\n{}",
                args.k,
                args.n,
                if holds { "holds" } else { "fails" },
                render(&headers, &rows)
            )
        }
    };
    emit(&text, None)?;
    Ok(ExitCode::SUCCESS)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn vector(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn isoperimetry(args: IsoperimetryArgs) -> Result<ExitCode> {
    let g = load(&args.input)?;
    let result = multiway_constant_with_budget(&g, args.k, args.mode, args.budget)?;
    let sets: Vec<Vec<&str>> = result
        .witness
        .iter()
        .map(|s| s.iter().map(|x| g.label(x)).collect())
        .collect();
    let text = match args.common.format {
        Format::Json => pretty(&json!({
            "schema": SCHEMA,
            "k": args.k,
            "mode": args.mode,
            "value": result.value,
            "witness": sets,
        })),
        Format::Table => {
            let rows: Vec<Vec<String>> = result
                .witness
                .iter()
                .zip(&sets)
                .enumerate()
                .map(|(i, (s, ids))| {
                    let phi = curvegraph::isoperimetry::expansion(&g, s).expect("witness sets are nonempty");
                    vec![(i + 1).to_string(), num(phi), ids.join(" ")]
                })
                .collect();
            format!(
                "{:?} constant for k = {}: {}\n\n{}",
                args.mode,
                args.k,
                num(result.value),
                render(&["part", "expansion", "vertices"], &rows)
            )
        }
    };
    emit(&text, None)?;
    Ok(ExitCode::SUCCESS)
}

fn read_function(path: &Path, g: &WeightedGraph) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let number = |v: &Value| v.as_f64().ok_or_else(|| anyhow!("function values must be numbers"));
    let f = match value {
        Value::Array(items) => items.iter().map(number).collect::<Result<Vec<_>>>()?,
        Value::Object(map) => {
            let mut f = vec![None; g.n()];
            for (id, v) in &map {
                let x = g.index_of(id).ok_or_else(|| anyhow!("unknown vertex id `{id}`"))?;
                f[x] = Some(number(v)?);
            }
            f.into_iter()
                .enumerate()
                .map(|(x, v)| v.ok_or_else(|| anyhow!("no value for vertex `{}`", g.label(x))))
                .collect::<Result<Vec<_>>>()?
        }
        _ => bail!("function file must hold an array or an object"),
    };
    if f.len() != g.n() {
        bail!("function has {} values, graph has {} vertices", f.len(), g.n());
    }
    Ok(f)
}

pub fn heat(args: HeatArgs) -> Result<ExitCode> {
    let g = load(&args.input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut random = || (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    let f = match &args.f {
        Some(path) => read_function(path, &g)?,
        None => random(),
    };
    let probe = random();
    let dec = decompose(&g)?;
    let pf = dec.heat(args.t)?.apply(&f);
    let res = semigroup_residuals(&dec, &f, &probe, args.t, args.t)?;
    let text = match args.common.format {
        Format::Json => pretty(&json!({
            "schema": SCHEMA,
            "t": args.t,
            "f": f,
            "heat": pf,
            "residuals": {
                "self_adjoint": res.self_adjoint,
                "commutation": res.commutation,
                "semigroup": res.semigroup,
                "kernel_min": res.kernel_min,
                "kernel_mass": res.kernel_mass,
            },
        })),
        Format::Table => {
            let rows: Vec<Vec<String>> = (0..g.n())
                .map(|x| vec![g.label(x).to_string(), num(f[x]), num(pf[x])])
                .collect();
            format!(
                "{}\nresiduals: self-adjoint {}, commutation {}, semigroup {}, kernel min {}, kernel mass {}\n",
                render(&["vertex", "f", &format!("P_{} f", args.t)], &rows),
                num(res.self_adjoint),
                num(res.commutation),
                num(res.semigroup),
                num(res.kernel_min),
                num(res.kernel_mass)
            )
        }
    };
    emit(&text, None)?;
    Ok(ExitCode::SUCCESS)
}

fn min_curvature(g: &WeightedGraph) -> Result<f64> {
    Ok(curvature_sweep(g, Dimension::Infinite)?
        .iter()
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min))
}

pub fn product(args: ProductArgs) -> Result<ExitCode> {
    let g1 = read_graph(&args.first).with_context(|| format!("reading {}", args.first.display()))?;
    let g2 = read_graph(&args.second).with_context(|| format!("reading {}", args.second.display()))?;
    let g = cartesian_product(&g1, &g2, args.measure)?;
    let annotation = match (g1.constant_measure(), g2.constant_measure(), g.constant_measure()) {
        (Some(mu1), Some(mu2), Some(mu12)) => {
            let (k1, k2) = (min_curvature(&g1)?, min_curvature(&g2)?);
            let (k, n) = product_cd_bound(k1, Dimension::Infinite, k2, Dimension::Infinite, mu1, mu2, mu12)?;
            json!({
                "predicted_curvature": finite_or_null(k),
                "predicted_dimension": n.to_string(),
                "factor_curvatures": [finite_or_null(k1), finite_or_null(k2)],
            })
        }
        _ => json!({
            "note": "no curvature prediction: the factor and product measures must all be constant"
        }),
    };
    let mut file = GraphFile::from_graph(&g);
    file.annotation = Some(annotation);
    emit(&file.to_json(), args.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let g = load(&args.input)?;
    let options = ReportOptions {
        seed: args.seed,
        tol: args.tol,
        force: args.force,
        sampled_pairs: args.pairs,
        genus_bound: args.genus,
        mimura_evidence: args.mimura,
        enumeration_budget: args.budget,
        ..ReportOptions::default()
    };
    let report = full_report(&g, args.k_max, &options)?;
    let text = match args.common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
        Format::Table => {
            let c = &report.curvature;
            let mut out = format!(
                "vertices: {}\nCD(0,inf): {}\nmin curvature: {}\n",
                report.vertices,
                if c.cd0 { "holds" } else { "fails" },
                num(c.min_curvature)
            );
            if !c.failing_vertices.is_empty() {
                out.push_str(&format!("failing vertices: {}\n", c.failing_vertices.join(" ")));
            }
            out.push_str(&match report.h2.exact() {
                Some(h) => format!("h_2: {}\n\n", num(h)),
                None => format!("h_2 in [{}, {}]\n\n", num(report.h2.lower()), num(report.h2.upper())),
            });
            let rows: Vec<Vec<String>> = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.name.clone(),
                        e.tag.clone(),
                        e.k.map(|k| k.to_string()).unwrap_or_default(),
                        num(e.lhs),
                        num(e.rhs),
                        num(e.slack),
                        format!("{:?}", e.status),
                        e.note.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            out.push_str(&render(
                &["check", "tag", "k", "lhs", "rhs", "slack", "status", "note"],
                &rows,
            ));
            out.push_str(&format!(
                "\n{} pass, {} fail, {} report-only, {} skipped\n",
                report.count(Status::Pass),
                report.count(Status::Fail),
                report.count(Status::ReportOnly),
                report.count(Status::Skipped)
            ));
            out
        }
    };
    emit(&text, args.output.as_deref())?;
    Ok(if report.has_failures() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
