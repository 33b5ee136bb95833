mod common;

use common::{q, to_f64, tree_placement_average_exact};
use num_rational::BigRational;
use qnetfid::analytic::{self, parse_exact};
use qnetfid::fidelity::average_max_fidelity_value;
use qnetfid::scenarios::{base_network, run_scenario_b, PlacementMode};
use qnetfid::TopologySpec;

fn engine_a(spec: &TopologySpec, p: f64) -> f64 {
    let base = base_network(spec).unwrap();
    average_max_fidelity_value(&base.reweighted(&vec![p; base.edge_count()]).unwrap()).unwrap()
}

fn tree_specs(max_n: usize) -> Vec<TopologySpec> {
    let mut specs = Vec::new();
    for n in 2..=max_n {
        specs.push(TopologySpec::chain(n));
        if n >= 3 {
            specs.push(TopologySpec::star(n));
        }
        for k in 0..=n.saturating_sub(3) {
            if n >= 3 {
                specs.push(TopologySpec::flower(n, k));
            }
        }
    }
    specs
}

#[test]
fn scenario_a_closed_forms_match_engine() {
    for p in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
        for spec in tree_specs(12) {
            let a = analytic::scenario_a(&spec, p).unwrap().unwrap();
            assert!((a - engine_a(&spec, p)).abs() < 1e-12, "{spec} p={p}");
        }
        for n in 3..=12 {
            let ring = TopologySpec::ring(n);
            let pairs = analytic::ring_pairs_a(n, p).unwrap();
            assert!((pairs - engine_a(&ring, p)).abs() < 1e-12, "ring {n} p={p}");
            if n % 2 == 1 {
                assert!((analytic::ring_a(n, p).unwrap() - pairs).abs() < 1e-12, "ring {n}");
            }
            let complete = TopologySpec::complete(n);
            assert!((analytic::complete_a(p).unwrap() - engine_a(&complete, p)).abs() < 1e-12);
        }
    }
}

#[test]
fn exact_mode_matches_rational_enumeration_on_trees() {
    let p = parse_exact("1/3").unwrap();
    for spec in tree_specs(8) {
        let links = spec.links().unwrap();
        let n = spec.n;
        for m in 0..=links.len() {
            let oracle = tree_placement_average_exact(&links, n, m, &p);
            let closed: BigRational = analytic::scenario_b(&spec, m, p.clone()).unwrap().unwrap();
            assert_eq!(closed, oracle, "{spec} M={m}");
        }
        let a: BigRational = analytic::scenario_a(&spec, p.clone()).unwrap().unwrap();
        assert_eq!(a, tree_placement_average_exact(&links, n, 0, &p), "{spec}");
    }
}

#[test]
fn scenario_b_closed_forms_match_exhaustive_engine() {
    for p in [0.1, 0.5, 0.9] {
        for spec in tree_specs(8) {
            for m in 0..=spec.link_count().unwrap() {
                let est = run_scenario_b(&spec, p, m, PlacementMode::Exhaustive, 0).unwrap();
                let closed = analytic::scenario_b(&spec, m, p).unwrap().unwrap();
                assert!((est.estimate.mean - closed).abs() <= 1e-10, "{spec} M={m} p={p}");
                assert_eq!(est.analytic, Some(closed));
            }
        }
    }
}

#[test]
fn chain4_single_me_link_by_hand() {
    let p = q(1, 2);
    let exact: BigRational = analytic::chain_b(4, 1, p.clone()).unwrap();
    assert_eq!(exact, q(109, 144));
    let links = TopologySpec::chain(4).links().unwrap();
    assert_eq!(tree_placement_average_exact(&links, 4, 1, &p), q(109, 144));
    assert!((to_f64(&exact) - 0.756_944_444_444_444_4).abs() < 1e-15);
}

#[test]
fn star_placements_are_all_equivalent() {
    for m in 0..=7 {
        let est = run_scenario_b(&TopologySpec::star(8), 0.3, m, PlacementMode::Exhaustive, 0).unwrap();
        assert!(est.estimate.std_dev.abs() < 1e-15, "M={m}");
        assert_eq!(est.estimate.min, est.estimate.max);
    }
}

#[test]
fn ring_and_complete_b_are_numeric_only() {
    for spec in [TopologySpec::ring(5), TopologySpec::complete(4)] {
        let est = run_scenario_b(&spec, 0.5, 2, PlacementMode::Exhaustive, 0).unwrap();
        assert!(est.numeric_only);
        assert!(est.analytic.is_none());
    }
}
