mod support;

use curvegraph::curvature::{
    cd_check, curvature_value, gamma2_explicit, gamma2_value, local_forms, Dimension, PSD_TOL,
};
use curvegraph::graph::{MeasureMode, VertexSet, WeightedGraph};
use curvegraph::io::GraphFile;
use curvegraph::isoperimetry::{
    cheeger_constant, cheeger_flow_lower_bound, expansion, multiway_constant, sweep_upper_bound,
    Mode,
};
use curvegraph::spectral::{decompose, heat_apply, semigroup_residuals};
use proptest::prelude::*;
use support::naive_multiway;

/// A random connected weighted graph: a random spanning tree plus extra edges.
fn weighted_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
            (
                Just(n),
                parents,
                prop::collection::vec(0.2f64..3.0, n - 1),
                prop::collection::vec((0..n, 0..n, 0.2f64..3.0), 0..n),
                prop::collection::vec(0.3f64..2.0, n),
                0..3usize,
            )
        })
        .prop_map(|(n, parents, tree_w, extra, mu, mode)| {
            let mut edges: Vec<(usize, usize, f64)> = parents
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, i + 1, tree_w[i]))
                .collect();
            for (u, v, w) in extra {
                let (u, v) = (u.min(v), u.max(v));
                if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (b, a) == (u, v)) {
                    edges.push((u, v, w));
                }
            }
            let mode = match mode {
                0 => MeasureMode::Unit,
                1 => MeasureMode::Degree,
                _ => MeasureMode::Explicit(mu),
            };
            WeightedGraph::new(n, &edges, mode).unwrap()
        })
}

fn graph_and_function(max_n: usize) -> impl Strategy<Value = (WeightedGraph, Vec<f64>)> {
    weighted_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), prop::collection::vec(-3.0f64..3.0, n))
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma2_polarization_matches_explicit_formula((g, f) in graph_and_function(9)) {
        for x in 0..g.n() {
            prop_assert!(close(gamma2_value(&g, &f, x), gamma2_explicit(&g, &f, x), 1e-10));
        }
    }

    #[test]
    fn local_matrix_reproduces_gamma2((g, f) in graph_and_function(9)) {
        for x in 0..g.n() {
            let forms = local_forms(&g, x);
            prop_assert!(close(forms.gamma2_quadratic(&f), gamma2_value(&g, &f, x), 1e-10));
        }
    }

    #[test]
    fn green_formula_and_chain_rule((g, f) in graph_and_function(9)) {
        let h: Vec<f64> = f.iter().rev().copied().collect();
        prop_assert!(g.summation_by_parts_residual(&f, &h).abs() < 1e-9);
        for r in g.chain_rule_residual(&f) {
            prop_assert!(r.abs() < 1e-9);
        }
    }

    #[test]
    fn curvature_value_is_the_sharp_constant(g in weighted_graph(7)) {
        for x in 0..g.n() {
            let k = curvature_value(&g, x, Dimension::Infinite).unwrap().value;
            if k.is_finite() {
                let slack = 1e-6 * k.abs().max(1.0);
                prop_assert!(cd_check(&g, x, k - slack, Dimension::Infinite, PSD_TOL).holds);
                prop_assert!(!cd_check(&g, x, k + 1e-3 * k.abs().max(1.0), Dimension::Infinite, PSD_TOL).holds);
            } else {
                prop_assert!(!cd_check(&g, x, -1e6, Dimension::Infinite, PSD_TOL).holds);
            }
        }
    }

    #[test]
    fn finite_dimension_lowers_curvature(g in weighted_graph(7)) {
        for x in 0..g.n() {
            let inf = curvature_value(&g, x, Dimension::Infinite).unwrap().value;
            let two = curvature_value(&g, x, Dimension::Finite(2.0)).unwrap().value;
            prop_assert!(two <= inf + 1e-9 * inf.abs().max(1.0));
        }
    }

    #[test]
    fn spectral_decomposition_is_consistent((g, f) in graph_and_function(12)) {
        let dec = decompose(&g).unwrap();
        prop_assert!(dec.eigen_residual() < 1e-9);
        prop_assert!(dec.orthonormality_residual() < 1e-9);
        prop_assert!(dec.lambda(1).unwrap().abs() < 1e-9);
        prop_assert!(dec.lambda(2).unwrap() > 1e-9);
        prop_assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        let back = heat_apply(&dec, &f, 0.0).unwrap();
        for (a, b) in back.iter().zip(&f) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let h: Vec<f64> = f.iter().map(|v| v * v).collect();
        prop_assert!(semigroup_residuals(&dec, &f, &h, 0.3, 1.7).unwrap().within(1e-8));
    }

    #[test]
    fn cheeger_matches_enumeration_and_bounds(g in weighted_graph(8)) {
        let exact = cheeger_constant(&g, 1e7).unwrap();
        let naive = naive_multiway(&g, 2, Mode::Subpartition);
        prop_assert!(close(exact.value, naive, 1e-12));
        prop_assert!(close(expansion(&g, &exact.witness).unwrap(), exact.value, 1e-12));
        prop_assert!(cheeger_flow_lower_bound(&g) <= exact.value * (1.0 + 1e-12));
        let psi2 = decompose(&g).unwrap().eigenfunction(2).unwrap();
        let (upper, _) = sweep_upper_bound(&g, &psi2).unwrap();
        prop_assert!(exact.value <= upper * (1.0 + 1e-12));
    }

    #[test]
    fn multiway_constants_are_ordered(g in weighted_graph(7)) {
        let mut previous = 0.0;
        for k in 2..=g.n().min(4) {
            let sub = multiway_constant(&g, k, Mode::Subpartition).unwrap();
            let part = multiway_constant(&g, k, Mode::Partition).unwrap();
            prop_assert!(sub.value >= previous * (1.0 - 1e-12));
            prop_assert!(part.value >= sub.value * (1.0 - 1e-12));
            prop_assert_eq!(sub.witness.len(), k);
            let worst = sub
                .witness
                .iter()
                .map(|s| expansion(&g, s).unwrap())
                .fold(0.0, f64::max);
            prop_assert!(close(worst, sub.value, 1e-12));
            previous = sub.value;
        }
    }

    #[test]
    fn graph_files_round_trip(g in weighted_graph(10)) {
        let text = GraphFile::from_graph(&g).to_json();
        let back = GraphFile::parse(&text).unwrap().to_graph().unwrap();
        prop_assert_eq!(back.fingerprint(), g.fingerprint());
        prop_assert_eq!(back.measure(), g.measure());
    }

    #[test]
    fn boundary_of_complement_is_symmetric(g in weighted_graph(10), mask in any::<u16>()) {
        let members: Vec<usize> = (0..g.n()).filter(|&i| mask >> i & 1 == 1).collect();
        prop_assume!(!members.is_empty() && members.len() < g.n());
        let s = VertexSet::new(&g, members.clone()).unwrap();
        let c = VertexSet::new(&g, (0..g.n()).filter(|i| !members.contains(i))).unwrap();
        prop_assert!(close(g.boundary_weight(&s), g.boundary_weight(&c), 1e-12));
        let total = 2.0 * g.interior_weight(&s) + g.boundary_weight(&s);
        let degree_sum: f64 = s.iter().map(|x| g.degree(x)).sum();
        prop_assert!(close(total, degree_sum, 1e-12));
    }
}
