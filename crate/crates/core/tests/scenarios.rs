mod common;

use qnetfid::scenarios::{
    advantage_point, advantage_region, base_network, decoherence_weight, large_n_limit, large_n_table, me_count,
    run_scenario_a, run_scenario_b, run_scenario_c, run_scenario_c_with_me, unit_grid, DecoherenceParams,
    PlacementMode, Scenario, ScenarioConfig, CLASSICAL_FIDELITY,
};
use qnetfid::{Family, TopologySpec};

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn scenario_c_is_identical_across_thread_counts() {
    let spec = TopologySpec::ring(6);
    let one = with_threads(1, || run_scenario_c(&spec, 20_000, 9).unwrap());
    let four = with_threads(4, || run_scenario_c(&spec, 20_000, 9).unwrap());
    assert_eq!(one, four);
    assert_eq!(one, run_scenario_c(&spec, 20_000, 9).unwrap());
}

#[test]
fn sampled_placements_are_identical_across_thread_counts() {
    let spec = TopologySpec::complete(6);
    let one = with_threads(1, || run_scenario_b(&spec, 0.4, 5, PlacementMode::Sample(3000), 2).unwrap());
    let three = with_threads(3, || run_scenario_b(&spec, 0.4, 5, PlacementMode::Sample(3000), 2).unwrap());
    assert_eq!(one, three);
}

#[test]
fn different_seeds_agree_statistically() {
    let spec = TopologySpec::flower(7, 2);
    let a = run_scenario_c(&spec, 50_000, 1).unwrap();
    let b = run_scenario_c(&spec, 50_000, 2).unwrap();
    assert_ne!(a.mean, b.mean);
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() < 4.0 * se);
}

#[test]
fn loops_beat_uniform_half_but_trees_do_not() {
    for spec in [TopologySpec::ring(5), TopologySpec::complete(5)] {
        let a = run_scenario_a(&spec, 0.5).unwrap().fidelity.avg_max_fidelity;
        let c = run_scenario_c(&spec, 100_000, 3).unwrap();
        assert!(c.mean - 3.0 * c.std_error > a, "{spec}: C {} vs A {a}", c.mean);
    }
    for spec in [TopologySpec::chain(6), TopologySpec::star(6), TopologySpec::flower(6, 1)] {
        let a = run_scenario_a(&spec, 0.5).unwrap().fidelity.avg_max_fidelity;
        let c = run_scenario_c(&spec, 100_000, 3).unwrap();
        assert!((c.mean - a).abs() < 3.0 * c.std_error, "{spec}: C {} vs A {a}", c.mean);
    }
}

#[test]
fn sampled_placements_agree_with_exhaustive() {
    let spec = TopologySpec::ring(7);
    for m in [1, 3, 5] {
        let exact = run_scenario_b(&spec, 0.6, m, PlacementMode::Exhaustive, 0).unwrap();
        let sampled = run_scenario_b(&spec, 0.6, m, PlacementMode::Sample(20_000), 4).unwrap();
        assert!((exact.estimate.mean - sampled.estimate.mean).abs() < 4.0 * sampled.estimate.std_error + 1e-12);
        assert_eq!(exact.estimate.std_error, 0.0);
    }
}

#[test]
fn me_links_in_scenario_c_raise_the_mean() {
    let spec = TopologySpec::chain(6);
    let none = run_scenario_c_with_me(&spec, 0, 40_000, 5).unwrap();
    let some = run_scenario_c_with_me(&spec, 3, 40_000, 5).unwrap();
    let all = run_scenario_c_with_me(&spec, 5, 10, 5).unwrap();
    assert!(some.mean > none.mean);
    assert_eq!(all.mean, 1.0);
}

#[test]
fn config_runs_each_scenario() {
    let topology = TopologySpec::star(5);
    for scenario in [
        Scenario::A { p: 0.5 },
        Scenario::B { p: 0.5, m: 2, placement: PlacementMode::Exhaustive },
        Scenario::C { samples: 1000 },
    ] {
        let config = ScenarioConfig { scenario, seed: 0, topology: topology.clone() };
        config.validate().unwrap();
        let mean = config.run().unwrap().mean();
        assert!((0.5..=1.0).contains(&mean));
    }
    let bad = ScenarioConfig { scenario: Scenario::A { p: 1.5 }, seed: 0, topology };
    assert!(bad.validate().is_err());
}

#[test]
fn decoherence_weight_falls_with_distance_and_loss() {
    let w = |alpha, d| decoherence_weight(&DecoherenceParams { alpha, p_det: 0.8, d }).unwrap();
    let mut last = f64::INFINITY;
    for d in [0.0, 1.0, 10.0, 55.5, 100.0, 300.0] {
        assert!(w(0.2, d) < last);
        assert!(w(0.3, d + 1.0) < w(0.2, d + 1.0));
        last = w(0.2, d);
    }
    assert_eq!(w(0.2, 0.0), 0.8);
    assert!(decoherence_weight(&DecoherenceParams { alpha: -1.0, p_det: 1.0, d: 1.0 }).is_err());
    assert!(decoherence_weight(&DecoherenceParams { alpha: 0.2, p_det: 1.5, d: 1.0 }).is_err());
}

#[test]
fn tree_shortcut_extremes_match_enumeration() {
    for spec in [TopologySpec::chain(8), TopologySpec::flower(8, 2), TopologySpec::star(8)] {
        let base = base_network(&spec).unwrap();
        for m in [0.0, 0.3, 0.5, 0.8, 1.0] {
            let fast = advantage_point(&spec, &base, 0.7, m, PlacementMode::Exhaustive, 0).unwrap();
            assert!(fast.analytic);
            let me = me_count(m, base.edge_count()).unwrap();
            let slow = run_scenario_b(&spec, 0.7, me, PlacementMode::Exhaustive, 0).unwrap();
            assert!((fast.avg_fidelity - slow.estimate.mean).abs() < 1e-12);
            assert!((fast.min_pair_fidelity - slow.min_pair_fidelity).abs() < 1e-12, "{spec} m={m}");
            assert!((fast.max_pair_fidelity - slow.max_pair_fidelity).abs() < 1e-12, "{spec} m={m}");
        }
    }
}

#[test]
fn advantage_examples() {
    let star = TopologySpec::star(100);
    let base = base_network(&star).unwrap();
    let pt = advantage_point(&star, &base, 0.9, 0.0, PlacementMode::Exhaustive, 0).unwrap();
    let expected = (99.0 * 0.95 + 4851.0 * 0.905) / 4950.0;
    assert!((pt.avg_fidelity - expected).abs() < 1e-12);
    assert!(pt.average_advantage());

    let chain = TopologySpec::chain(100);
    let base = base_network(&chain).unwrap();
    let pt = advantage_point(&chain, &base, 0.5, 0.5, PlacementMode::Exhaustive, 0).unwrap();
    assert!(!pt.average_advantage());

    for spec in [TopologySpec::chain(10), TopologySpec::ring(6), TopologySpec::complete(5)] {
        let table = advantage_region(&spec, &[1.0], &unit_grid(5), PlacementMode::Sample(8), 0).unwrap();
        for col in ["avg_advantage", "any_path_advantage", "all_path_advantage"] {
            assert!(table.column(col).unwrap().iter().all(|v| v.as_bool() == Some(true)), "{spec} {col}");
        }
    }
}

#[test]
fn advantage_grid_has_fixed_row_order() {
    let spec = TopologySpec::flower(12, 4);
    let grid = unit_grid(6);
    let table = advantage_region(&spec, &grid, &grid, PlacementMode::Sample(8), 0).unwrap();
    assert_eq!(table.rows.len(), 36);
    let p = table.floats("p").unwrap();
    let m = table.floats("m").unwrap();
    for (i, (p, m)) in p.iter().zip(&m).enumerate() {
        assert_eq!(*p, grid[i / 6]);
        assert_eq!(*m, grid[i % 6]);
    }
}

#[test]
fn large_n_tables_approach_limits() {
    let sizes = [10, 50, 100, 500];
    let chain = large_n_table(&Family::Chain, 0.5, 0.6, &sizes, 50, 8, 0).unwrap();
    let gaps = chain.floats("gap_to_half").unwrap();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");

    let star = large_n_table(&Family::Star, 0.7, 0.2, &[100, 1000, 10_000], 0, 0, 0).unwrap();
    let f = star.floats("F_analytic").unwrap();
    let limit = large_n_limit(&Family::Star, 0.7, 0.2).unwrap();
    assert!((f[2] - limit).abs() < 1e-3);
    assert!((f[2] - limit).abs() < (f[0] - limit).abs());

    let threshold = 1.0 / 3f64.sqrt();
    for (p, above) in [(threshold - 0.01, false), (threshold + 0.01, true)] {
        assert_eq!(large_n_limit(&Family::Star, p, 0.0).unwrap() > CLASSICAL_FIDELITY, above);
    }
}
