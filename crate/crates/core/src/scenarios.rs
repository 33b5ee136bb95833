//! Scenario drivers.
//!
//! * Scenario A: every link has the same weight `p`.
//! * Scenario B: `M` links are maximally entangled (weight 1), the rest have `p`.
//!   Results are averaged over link placements, either all `C(L, M)` of them
//!   or a seeded random sample.
//! * Scenario C: link weights are i.i.d. uniform on `[0, 1]`.
//!
//! Randomness comes from ChaCha8 with the master seed as key and the sample
//! index as stream id ([`RNG_ALGORITHM`]), so sample `i` is the same no matter
//! how work is split across threads. Samples are reduced in fixed-size chunks
//! merged in index order, making every estimate bit-reproducible.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic;
use crate::error::{Error, Result};
use crate::fidelity::{self, path_fidelity, NetworkFidelity};
use crate::network::{generate, Family, Network, TopologySpec, WeightAssignment};
use crate::stats::{Accumulator, EstimateResult};
use crate::sweep::SweepResult;

/// Identifier recorded in outputs for the sample generator.
pub const RNG_ALGORITHM: &str = "chacha8(key=seed_from_u64(seed), stream=sample_index)";

/// Largest `C(L, M)` enumerated in exhaustive placement mode by default.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;

/// Classical teleportation ceiling.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

const CHUNK: u64 = 2048;

/// Generator for sample `index` under master `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Default Scenario C sample count for a network of `n` nodes.
pub fn default_scenario_c_samples(n: usize) -> u64 {
    if n <= 10 {
        100_000
    } else {
        1_000
    }
}

/// Number of ME links for a fraction `m` of `links` links (nearest integer).
pub fn me_count(m: f64, links: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::param(format!("ME fraction m = {m} outside [0, 1]")));
    }
    Ok((m * links as f64).round() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlacementMode {
    /// Every one of the `C(L, M)` placements.
    Exhaustive,
    /// This many placements drawn uniformly at random.
    Sample(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    A { p: f64 },
    B { p: f64, m: usize, placement: PlacementMode },
    C { samples: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub topology: TopologySpec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "scenario")]
pub enum ScenarioOutcome {
    A(ScenarioAResult),
    B(PlacementEstimate),
    C(EstimateResult),
}

impl ScenarioOutcome {
    /// The headline `F^max_avg` value.
    pub fn mean(&self) -> f64 {
        match self {
            ScenarioOutcome::A(a) => a.fidelity.avg_max_fidelity,
            ScenarioOutcome::B(b) => b.estimate.mean,
            ScenarioOutcome::C(c) => c.mean,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.topology.family.is_canonical() {
            self.topology.validate()?;
        }
        match &self.scenario {
            Scenario::A { p } | Scenario::B { p, .. } if !(0.0..=1.0).contains(p) => {
                Err(Error::WeightOutOfRange(*p))
            }
            Scenario::B { placement: PlacementMode::Sample(0), .. } | Scenario::C { samples: 0 } => {
                Err(Error::param("sample count must be at least 1"))
            }
            Scenario::B { m, .. } => match self.topology.link_count() {
                Some(l) if *m > l => Err(Error::param(format!("M = {m} exceeds the {l} links"))),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn run(&self) -> Result<ScenarioOutcome> {
        self.validate()?;
        Ok(match &self.scenario {
            Scenario::A { p } => ScenarioOutcome::A(run_scenario_a(&self.topology, *p)?),
            Scenario::B { p, m, placement } => {
                ScenarioOutcome::B(run_scenario_b(&self.topology, *p, *m, *placement, self.seed)?)
            }
            Scenario::C { samples } => {
                ScenarioOutcome::C(run_scenario_c(&self.topology, *samples, self.seed)?)
            }
        })
    }
}

/// Network structure for a spec; canonical families get unit weights, custom
/// files keep theirs.
pub fn base_network(spec: &TopologySpec) -> Result<Network> {
    let weights = if spec.family.is_canonical() {
        WeightAssignment::Uniform(1.0)
    } else {
        WeightAssignment::AsLoaded
    };
    generate(spec, &weights)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioAResult {
    pub fidelity: NetworkFidelity,
    pub analytic: Option<f64>,
    pub analytic_diff: Option<f64>,
}

/// Uniform weight `p` on every link. Canonical topologies also get the
/// closed-form value and its distance from the engine result.
pub fn run_scenario_a(spec: &TopologySpec, p: f64) -> Result<ScenarioAResult> {
    let net = generate(spec, &WeightAssignment::Uniform(p))?;
    let fidelity = fidelity::analyze(&net)?;
    let analytic = analytic::scenario_a(spec, p).transpose()?;
    let analytic_diff = analytic.map(|a| (a - fidelity.avg_max_fidelity).abs());
    Ok(ScenarioAResult { fidelity, analytic, analytic_diff })
}

/// Placement-averaged Scenario B result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlacementEstimate {
    /// Statistics of `F^max_avg` over placements: `min`/`max` are the envelope,
    /// `std_dev` the spread, `std_error` is zero in exhaustive mode.
    pub estimate: EstimateResult,
    /// Lowest single-pair fidelity seen over all evaluated placements.
    pub min_pair_fidelity: f64,
    /// Highest single-pair fidelity seen over all evaluated placements.
    pub max_pair_fidelity: f64,
    pub mode: PlacementMode,
    /// Closed-form placement average where one exists (chain, star, flowers).
    pub analytic: Option<f64>,
    pub numeric_only: bool,
}

#[derive(Clone, Copy, Debug)]
struct PlacementAcc {
    acc: Accumulator,
    pair_min: f64,
    pair_max: f64,
}

impl Default for PlacementAcc {
    fn default() -> Self {
        PlacementAcc { acc: Accumulator::default(), pair_min: f64::INFINITY, pair_max: f64::NEG_INFINITY }
    }
}

impl PlacementAcc {
    fn push(&mut self, s: Summary) {
        self.acc.push(s.avg);
        self.pair_min = self.pair_min.min(s.min_pair);
        self.pair_max = self.pair_max.max(s.max_pair);
    }

    fn merge(&mut self, other: &PlacementAcc) {
        self.acc.merge(&other.acc);
        self.pair_min = self.pair_min.min(other.pair_min);
        self.pair_max = self.pair_max.max(other.pair_max);
    }
}

#[derive(Clone, Copy, Debug)]
struct Summary {
    avg: f64,
    min_pair: f64,
    max_pair: f64,
}

fn summarize(net: &Network) -> Result<Summary> {
    if net.node_count() < 2 {
        return Err(Error::param("network average needs at least two nodes"));
    }
    let products = fidelity::pair_products(net);
    let avg = fidelity::mean_fidelity(&products);
    let (lo, hi) = products
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    Ok(Summary { avg, min_pair: path_fidelity(lo), max_pair: path_fidelity(hi) })
}

/// Evaluates `eval(i)` for `i in 0..count` in fixed chunks and merges the
/// chunk results in index order.
fn reduce_indexed<F>(count: u64, eval: F) -> Result<PlacementAcc>
where
    F: Fn(u64, &mut PlacementAcc) -> Result<()> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Result<PlacementAcc>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut part = PlacementAcc::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                eval(i, &mut part)?;
            }
            Ok(part)
        })
        .collect();
    let mut total = PlacementAcc::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total)
}

/// `C(n, k)` if it fits in a `u128`.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(acc)
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank_combination(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for remaining in (1..=k).rev() {
        loop {
            // subsets that start with `next`
            let with_next = binomial_u128((n - next - 1) as u64, (remaining - 1) as u64)
                .expect("bounded by C(n, k)");
            if rank < with_next {
                break;
            }
            rank -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

fn mask_for(indices: impl IntoIterator<Item = usize>, links: usize) -> Vec<bool> {
    let mut me = vec![false; links];
    for i in indices {
        me[i] = true;
    }
    me
}

fn me_weights(me: &[bool], p: f64) -> Vec<f64> {
    me.iter().map(|&m| if m { 1.0 } else { p }).collect()
}

/// Scenario B with the default exhaustive cap.
pub fn run_scenario_b(
    spec: &TopologySpec,
    p: f64,
    m: usize,
    mode: PlacementMode,
    seed: u64,
) -> Result<PlacementEstimate> {
    run_scenario_b_capped(spec, p, m, mode, seed, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn run_scenario_b_capped(
    spec: &TopologySpec,
    p: f64,
    m: usize,
    mode: PlacementMode,
    seed: u64,
    cap: u64,
) -> Result<PlacementEstimate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::WeightOutOfRange(p));
    }
    let base = base_network(spec)?;
    let links = base.edge_count();
    if m > links {
        return Err(Error::param(format!("M = {m} exceeds the {links} links")));
    }
    let evaluate = |me: Vec<bool>, acc: &mut PlacementAcc| -> Result<()> {
        let net = base.reweighted(&me_weights(&me, p))?;
        acc.push(summarize(&net)?);
        Ok(())
    };
    let (total, exhaustive) = match mode {
        PlacementMode::Exhaustive => {
            let count = binomial_u128(links as u64, m as u64)
                .filter(|&c| c <= cap as u128)
                .ok_or_else(|| {
                    Error::param(format!("C({links}, {m}) placements exceed the exhaustive cap of {cap}"))
                })? as u64;
            let acc = reduce_indexed(count, |i, acc| {
                evaluate(mask_for(unrank_combination(i as u128, links, m), links), acc)
            })?;
            (acc, true)
        }
        PlacementMode::Sample(samples) => {
            if samples == 0 {
                return Err(Error::param("sample count must be at least 1"));
            }
            let acc = reduce_indexed(samples, |i, acc| {
                let mut rng = sample_rng(seed, i);
                let chosen = index::sample(&mut rng, links, m);
                evaluate(mask_for(chosen.iter(), links), acc)
            })?;
            (acc, false)
        }
    };
    let analytic = analytic::scenario_b(spec, m, p).transpose()?;
    Ok(PlacementEstimate {
        estimate: total.acc.finish(exhaustive),
        min_pair_fidelity: total.pair_min,
        max_pair_fidelity: total.pair_max,
        mode,
        analytic,
        numeric_only: analytic.is_none(),
    })
}

/// Scenario C: i.i.d. uniform link weights, max per pair then average.
pub fn run_scenario_c(spec: &TopologySpec, samples: u64, seed: u64) -> Result<EstimateResult> {
    run_scenario_c_with_me(spec, 0, samples, seed)
}

/// Scenario C on top of `m` randomly placed ME links: per sample, draw the
/// placement, then i.i.d. uniform weights for the remaining links.
pub fn run_scenario_c_with_me(spec: &TopologySpec, m: usize, samples: u64, seed: u64) -> Result<EstimateResult> {
    if samples == 0 {
        return Err(Error::param("sample count must be at least 1"));
    }
    let base = base_network(spec)?;
    let links = base.edge_count();
    if m > links {
        return Err(Error::param(format!("M = {m} exceeds the {links} links")));
    }
    let total = reduce_indexed(samples, |i, acc| {
        let mut rng = sample_rng(seed, i);
        let me = if m > 0 { mask_for(index::sample(&mut rng, links, m).iter(), links) } else { vec![false; links] };
        let weights: Vec<f64> = me.iter().map(|&is_me| if is_me { 1.0 } else { rng.random::<f64>() }).collect();
        let net = base.reweighted(&weights)?;
        let avg = fidelity::average_max_fidelity_value(&net)?;
        acc.push(Summary { avg, min_pair: avg, max_pair: avg });
        Ok(())
    })?;
    Ok(total.acc.finish(false))
}

/// Fibre-loss model for a link of length `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecoherenceParams {
    /// Attenuation coefficient in dB/km.
    pub alpha: f64,
    /// Detection probability.
    pub p_det: f64,
    /// Inter-node fibre distance in km.
    pub d: f64,
}

impl DecoherenceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param(format!("alpha = {} must be a finite value >= 0", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.p_det) {
            return Err(Error::param(format!("p_det = {} outside [0, 1]", self.p_det)));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(Error::param(format!("distance d = {} must be a finite value >= 0", self.d)));
        }
        Ok(())
    }
}

/// Link success probability `p_det * 10^(-alpha d / 10)`, used as the Werner weight.
pub fn decoherence_weight(params: &DecoherenceParams) -> Result<f64> {
    params.validate()?;
    Ok(params.p_det * 10f64.powf(-params.alpha * params.d / 10.0))
}

/// Distances 30, 40, .., 150 km.
pub fn fig5_distances() -> Vec<f64> {
    (3..=15).map(|i| f64::from(i) * 10.0).collect()
}

/// Scenario A over a range of fibre distances for each family.
pub fn decoherence_sweep(
    families: &[Family],
    n: usize,
    alpha: f64,
    p_det: f64,
    distances: &[f64],
) -> Result<SweepResult> {
    let mut table = SweepResult::new(["topology", "N", "d_km", "p", "F_avg", "F_analytic"]);
    for family in families {
        let spec = TopologySpec::new(family.clone(), n);
        let base = base_network(&spec)?;
        for &d in distances {
            let p = decoherence_weight(&DecoherenceParams { alpha, p_det, d })?;
            let net = base.reweighted(&vec![p; base.edge_count()])?;
            let f = fidelity::average_max_fidelity_value(&net)?;
            let analytic = analytic::scenario_a(&spec, p).transpose()?;
            table.push(vec![
                family.to_string().into(),
                net.node_count().into(),
                d.into(),
                p.into(),
                f.into(),
                analytic.into(),
            ])?;
        }
    }
    Ok(table)
}

/// Evenly spaced grid of `points` values on `[0, 1]`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdvantagePoint {
    pub p: f64,
    pub m: f64,
    pub me_links: usize,
    pub avg_fidelity: f64,
    pub min_pair_fidelity: f64,
    pub max_pair_fidelity: f64,
    pub analytic: bool,
}

impl AdvantagePoint {
    /// `F^max_avg > 2/3`.
    pub fn average_advantage(&self) -> bool {
        self.avg_fidelity > CLASSICAL_FIDELITY
    }

    /// Some pair beats the classical ceiling in some placement.
    pub fn any_path_advantage(&self) -> bool {
        self.max_pair_fidelity > CLASSICAL_FIDELITY
    }

    /// Every pair beats the classical ceiling in every placement.
    pub fn all_path_advantage(&self) -> bool {
        self.min_pair_fidelity > CLASSICAL_FIDELITY
    }
}

/// Quantum-advantage classification at one `(p, m)` point.
///
/// Tree families use the closed-form placement average, and exact pair
/// extremes over all placements: on a tree the worst pair is a diameter pair
/// with as few ME links on it as possible, `min(D, L - M)` lossy links, and the
/// best pair is adjacent. Other topologies are evaluated with the engine
/// according to `mode`.
pub fn advantage_point(
    spec: &TopologySpec,
    base: &Network,
    p: f64,
    m: f64,
    mode: PlacementMode,
    seed: u64,
) -> Result<AdvantagePoint> {
    let links = base.edge_count();
    let me = me_count(m, links)?;
    if let (true, Some(avg)) = (base.is_tree(), analytic::scenario_b(spec, me, p).transpose()?) {
        let worst = base.diameter().min(links - me);
        let best = usize::from(me == 0);
        return Ok(AdvantagePoint {
            p,
            m,
            me_links: me,
            avg_fidelity: avg,
            min_pair_fidelity: analytic::FTerm::new(worst as u32).value(&p),
            max_pair_fidelity: analytic::FTerm::new(best as u32).value(&p),
            analytic: true,
        });
    }
    let est = run_scenario_b(spec, p, me, mode, seed)?;
    Ok(AdvantagePoint {
        p,
        m,
        me_links: me,
        avg_fidelity: est.estimate.mean,
        min_pair_fidelity: est.min_pair_fidelity,
        max_pair_fidelity: est.max_pair_fidelity,
        analytic: false,
    })
}

/// Advantage regions over a `p` × `m` grid; rows ordered by `p`, then `m`.
pub fn advantage_region(
    spec: &TopologySpec,
    p_grid: &[f64],
    m_grid: &[f64],
    mode: PlacementMode,
    seed: u64,
) -> Result<SweepResult> {
    let base = base_network(spec)?;
    let grid: Vec<(f64, f64)> = p_grid.iter().flat_map(|&p| m_grid.iter().map(move |&m| (p, m))).collect();
    let points: Vec<Result<AdvantagePoint>> = grid
        .par_iter()
        .map(|&(p, m)| advantage_point(spec, &base, p, m, mode, seed))
        .collect();
    let mut table = SweepResult::new([
        "topology",
        "N",
        "p",
        "m",
        "M",
        "F_avg",
        "min_pair_F",
        "max_pair_F",
        "avg_advantage",
        "any_path_advantage",
        "all_path_advantage",
        "source",
    ]);
    for point in points {
        let pt = point?;
        table.push(vec![
            spec.family.to_string().into(),
            base.node_count().into(),
            pt.p.into(),
            pt.m.into(),
            pt.me_links.into(),
            pt.avg_fidelity.into(),
            pt.min_pair_fidelity.into(),
            pt.max_pair_fidelity.into(),
            pt.average_advantage().into(),
            pt.any_path_advantage().into(),
            pt.all_path_advantage().into(),
            (if pt.analytic { "analytic" } else { "numeric" }).into(),
        ])?;
    }
    Ok(table)
}

/// Large-`N` limit of the placement-averaged `F^max_avg` where known:
/// chains tend to 1/2 unless every link is ME or `p = 1`; stars tend to
/// `m^2 + 2m(1-m) F1 + (1-m)^2 F2`.
pub fn large_n_limit(family: &Family, p: f64, m: f64) -> Option<f64> {
    match family {
        Family::Chain => Some(if p >= 1.0 || m >= 1.0 { 1.0 } else { 0.5 }),
        Family::Star => {
            let f1 = (1.0 + p) / 2.0;
            let f2 = (1.0 + p * p) / 2.0;
            Some(m * m + 2.0 * m * (1.0 - m) * f1 + (1.0 - m) * (1.0 - m) * f2)
        }
        Family::Complete => (m == 0.0).then_some((1.0 + p) / 2.0),
        _ => None,
    }
}

/// `F^max_avg` against network size at fixed `(p, m)` from the closed forms.
/// For `N <= numeric_max_n` the table also carries an engine estimate over
/// `numeric_samples` random placements.
pub fn large_n_table(
    family: &Family,
    p: f64,
    m: f64,
    n_list: &[usize],
    numeric_max_n: usize,
    numeric_samples: u64,
    seed: u64,
) -> Result<SweepResult> {
    if !family.is_tree() {
        return Err(Error::param(format!("no closed form for {family} in Scenario B")));
    }
    let mut table = SweepResult::new([
        "topology",
        "N",
        "p",
        "m",
        "M",
        "F_analytic",
        "F_numeric",
        "F_numeric_se",
        "gap_to_half",
        "large_n_limit",
        "avg_advantage",
    ]);
    let limit = large_n_limit(family, p, m);
    for &n in n_list {
        let spec = TopologySpec::new(family.clone(), n);
        spec.validate()?;
        let links = n - 1;
        let me = me_count(m, links)?;
        let f = analytic::scenario_b(&spec, me, p)
            .expect("tree families have closed forms")?;
        let numeric = if n <= numeric_max_n && numeric_samples > 0 {
            Some(run_scenario_b(&spec, p, me, PlacementMode::Sample(numeric_samples), seed)?.estimate)
        } else {
            None
        };
        table.push(vec![
            family.to_string().into(),
            n.into(),
            p.into(),
            m.into(),
            me.into(),
            f.into(),
            numeric.map(|e| e.mean).into(),
            numeric.map(|e| e.std_error).into(),
            (f - 0.5).into(),
            limit.into(),
            (f > CLASSICAL_FIDELITY).into(),
        ])?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unranking_enumerates_in_lexicographic_order() {
        let all: Vec<Vec<usize>> = (0..10).map(|r| unrank_combination(r, 5, 3)).collect();
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[1], vec![0, 1, 3]);
        assert_eq!(all[9], vec![2, 3, 4]);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all);
        assert_eq!(unrank_combination(0, 4, 0), Vec::<usize>::new());
    }

    #[test]
    fn u128_binomials() {
        assert_eq!(binomial_u128(9, 6), Some(84));
        assert_eq!(binomial_u128(3, 5), Some(0));
        assert_eq!(binomial_u128(4950, 2), Some(12_248_775));
    }

    #[test]
    fn chain_four_single_me_link() {
        let est = run_scenario_b(&TopologySpec::chain(4), 0.5, 1, PlacementMode::Exhaustive, 0).unwrap();
        assert_eq!(est.estimate.sample_count, 3);
        assert!((est.estimate.mean - 109.0 / 144.0).abs() < 1e-15);
        assert_eq!(est.estimate.min, 0.75);
        assert!((est.estimate.max - 4.625 / 6.0).abs() < 1e-15);
        assert_eq!(est.estimate.std_error, 0.0);
        assert!(!est.numeric_only);
    }

    #[test]
    fn star_placements_are_equivalent() {
        let est = run_scenario_b(&TopologySpec::star(7), 0.3, 2, PlacementMode::Exhaustive, 0).unwrap();
        assert_eq!(est.estimate.min, est.estimate.max);
        assert!((est.estimate.mean - analytic::star_b(7, 2, 0.3).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn ring_scenario_b_is_numeric_only() {
        let est = run_scenario_b(&TopologySpec::ring(6), 0.5, 2, PlacementMode::Exhaustive, 0).unwrap();
        assert!(est.numeric_only);
        assert!(est.analytic.is_none());
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        let err = run_scenario_b_capped(&TopologySpec::chain(12), 0.5, 5, PlacementMode::Exhaustive, 0, 100);
        assert!(err.is_err());
    }

    #[test]
    fn sampled_placements_are_reproducible() {
        let spec = TopologySpec::flower(9, 2);
        let a = run_scenario_b(&spec, 0.5, 3, PlacementMode::Sample(500), 11).unwrap();
        let b = run_scenario_b(&spec, 0.5, 3, PlacementMode::Sample(500), 11).unwrap();
        assert_eq!(a, b);
        let exact = analytic::flower_b(9, 2, 3, 0.5).unwrap();
        assert!((a.estimate.mean - exact).abs() < 4.0 * a.estimate.std_error + 1e-12);
    }

    #[test]
    fn scenario_c_on_trees_matches_half() {
        let est = run_scenario_c(&TopologySpec::star(5), 20_000, 3).unwrap();
        let a = analytic::star_a(5, 0.5).unwrap();
        assert!((est.mean - a).abs() < 4.0 * est.std_error);
    }

    #[test]
    fn decoherence_examples() {
        let w = |alpha, d| decoherence_weight(&DecoherenceParams { alpha, p_det: 1.0, d }).unwrap();
        assert!((w(0.46, 30.0) - 10f64.powf(-1.38)).abs() < 1e-15);
        assert!((w(0.46, 30.0) - 0.04168693834703354).abs() < 1e-15);
        assert_eq!(w(0.0, 80.0), 1.0);
        assert_eq!(w(0.46, 0.0), 1.0);
        assert!(w(0.46, 40.0) < w(0.46, 30.0));
        assert!(w(0.5, 30.0) < w(0.46, 30.0));
        let bad = DecoherenceParams { alpha: -1.0, p_det: 1.0, d: 1.0 };
        assert!(decoherence_weight(&bad).is_err());
        let bad = DecoherenceParams { alpha: 0.2, p_det: 1.5, d: 1.0 };
        assert!(decoherence_weight(&bad).is_err());
    }

    #[test]
    fn advantage_examples() {
        let star = TopologySpec::star(100);
        let base = base_network(&star).unwrap();
        let pt = advantage_point(&star, &base, 0.9, 0.0, PlacementMode::Exhaustive, 0).unwrap();
        assert!(pt.average_advantage());
        assert!(pt.analytic);

        let chain = TopologySpec::chain(100);
        let base = base_network(&chain).unwrap();
        let pt = advantage_point(&chain, &base, 0.5, 0.5, PlacementMode::Exhaustive, 0).unwrap();
        assert!(!pt.average_advantage());

        for spec in [TopologySpec::chain(10), TopologySpec::ring(6)] {
            let base = base_network(&spec).unwrap();
            for m in [0.0, 0.3, 1.0] {
                let pt = advantage_point(&spec, &base, 1.0, m, PlacementMode::Exhaustive, 0).unwrap();
                assert!(pt.average_advantage() && pt.any_path_advantage() && pt.all_path_advantage());
            }
        }
    }

    #[test]
    fn tree_extremes_match_enumeration() {
        let spec = TopologySpec::flower(8, 2);
        let base = base_network(&spec).unwrap();
        for m in 0..=7 {
            for p in [0.2, 0.7] {
                let frac = m as f64 / 7.0;
                let fast = advantage_point(&spec, &base, p, frac, PlacementMode::Exhaustive, 0).unwrap();
                let full = run_scenario_b(&spec, p, m, PlacementMode::Exhaustive, 0).unwrap();
                assert!((fast.min_pair_fidelity - full.min_pair_fidelity).abs() < 1e-15, "m={m} p={p}");
                assert!((fast.max_pair_fidelity - full.max_pair_fidelity).abs() < 1e-15, "m={m} p={p}");
                assert!((fast.avg_fidelity - full.estimate.mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn star_advantage_flips_near_inverse_sqrt_three() {
        let f = |p| analytic::star_a(10_000, p).unwrap();
        assert!(f(0.57) < CLASSICAL_FIDELITY);
        assert!(f(0.58) > CLASSICAL_FIDELITY);
        assert!(f(0.60) > CLASSICAL_FIDELITY);
    }

    #[test]
    fn config_validation() {
        let cfg = |scenario| ScenarioConfig { scenario, seed: 1, topology: TopologySpec::chain(4) };
        assert!(cfg(Scenario::C { samples: 0 }).validate().is_err());
        assert!(cfg(Scenario::A { p: 1.5 }).validate().is_err());
        assert!(cfg(Scenario::B { p: 0.5, m: 4, placement: PlacementMode::Exhaustive }).validate().is_err());
        let out = cfg(Scenario::A { p: 0.5 }).run().unwrap();
        assert!((out.mean() - 65.0 / 96.0).abs() < 1e-15);
    }

    #[test]
    fn me_fraction_rounding() {
        assert_eq!(me_count(0.6, 49).unwrap(), 29);
        assert_eq!(me_count(0.6, 499).unwrap(), 299);
        assert_eq!(me_count(1.0, 9).unwrap(), 9);
        assert!(me_count(1.2, 9).is_err());
    }
}
