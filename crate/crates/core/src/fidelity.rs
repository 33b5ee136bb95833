//! Maximum teleportation fidelity between node pairs and its network average.
//!
//! A path whose links carry Werner weights `p_i` teleports with fidelity
//! `(1 + Π p_i) / 2`, so the best path between two nodes is the one with the
//! largest weight product. Since every weight lies in `[0, 1]`, extending a
//! path never increases its product and a best-first search that maximizes
//! the product directly is exact. Only simple paths need to be considered.
//!
//! Ties on the product are broken by fewer hops, then by the lexicographically
//! smallest node sequence. The tie-break only affects which path is reported.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{Network, NodeId};
use crate::stats::NeumaierSum;

/// Node count from which per-source searches run on the rayon pool.
const PARALLEL_SOURCES_FROM: usize = 64;

/// Default node cap for [`brute_force_pair_fidelity`].
pub const BRUTE_FORCE_NODE_CAP: usize = 10;

/// Teleportation fidelity of a path with weight product `product`.
#[inline]
pub fn path_fidelity(product: f64) -> f64 {
    (1.0 + product) / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairFidelity {
    pub source: NodeId,
    pub target: NodeId,
    pub best_path: Vec<NodeId>,
    pub product: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkFidelity {
    pub avg_max_fidelity: f64,
    /// One record per unordered pair, ordered by `(source, target)` with `source < target`.
    pub pair_records: Vec<PairFidelity>,
    pub effective_path_length: Option<f64>,
}

impl NetworkFidelity {
    pub fn min_pair_fidelity(&self) -> f64 {
        self.pair_records.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min)
    }

    pub fn max_pair_fidelity(&self) -> f64 {
        self.pair_records.iter().map(|r| r.fidelity).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Frontier {
    product: f64,
    hops: usize,
    node: NodeId,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        self.product
            .total_cmp(&other.product)
            .then_with(|| other.hops.cmp(&self.hops))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Best labels from one source to every node.
struct SourceTree {
    source: NodeId,
    product: Vec<f64>,
    hops: Vec<usize>,
    pred: Vec<Option<NodeId>>,
    /// Predecessors along lexicographically smallest fewest-hop paths, used
    /// for targets whose best product is zero (every path ties there).
    zero_pred: Option<Vec<Option<NodeId>>>,
}

impl SourceTree {
    fn path_to(&self, target: NodeId) -> Vec<NodeId> {
        let pred = match &self.zero_pred {
            Some(zero) if self.product[target] == 0.0 => zero,
            _ => &self.pred,
        };
        let mut path = vec![target];
        let mut cur = target;
        while let Some(prev) = pred[cur] {
            path.push(prev);
            cur = prev;
        }
        path.reverse();
        debug_assert_eq!(path[0], self.source);
        path
    }

    fn record(&self, target: NodeId) -> PairFidelity {
        let product = self.product[target];
        PairFidelity {
            source: self.source,
            target,
            best_path: self.path_to(target),
            product,
            fidelity: path_fidelity(product),
        }
    }
}

fn search(net: &Network, source: NodeId) -> SourceTree {
    let n = net.node_count();
    let mut tree = SourceTree {
        source,
        product: vec![-1.0; n],
        hops: vec![usize::MAX; n],
        pred: vec![None; n],
        zero_pred: None,
    };
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    tree.product[source] = 1.0;
    tree.hops[source] = 0;
    heap.push(Frontier { product: 1.0, hops: 0, node: source });

    while let Some(Frontier { product, hops, node: u }) = heap.pop() {
        if settled[u] || product != tree.product[u] || hops != tree.hops[u] {
            continue;
        }
        settled[u] = true;
        for &(v, edge) in net.neighbor_edges(u) {
            if settled[v] {
                continue;
            }
            let cand = product * net.edges()[edge].p;
            let cand_hops = hops + 1;
            let improves = match cand.total_cmp(&tree.product[v]) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => match cand_hops.cmp(&tree.hops[v]) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => {
                        let incumbent = tree.pred[v].expect("labelled node has a predecessor");
                        tree.path_to(u) < tree.path_to(incumbent)
                    }
                },
            };
            if improves {
                let relabel = cand != tree.product[v] || cand_hops != tree.hops[v];
                tree.product[v] = cand;
                tree.hops[v] = cand_hops;
                tree.pred[v] = Some(u);
                if relabel {
                    heap.push(Frontier { product: cand, hops: cand_hops, node: v });
                }
            }
        }
    }
    if tree.product.contains(&0.0) {
        tree.zero_pred = Some(lexicographic_bfs(net, source));
    }
    tree
}

/// Predecessor of every node on its lexicographically smallest shortest-hop
/// path from `source`. Paths within one BFS layer are ranked, and each node
/// takes the lowest-ranked predecessor from the layer before.
fn lexicographic_bfs(net: &Network, source: NodeId) -> Vec<Option<NodeId>> {
    let n = net.node_count();
    let dist = net.hop_distances(source);
    let mut pred = vec![None; n];
    let mut rank = vec![usize::MAX; n];
    rank[source] = 0;
    let mut layer = vec![source];
    while !layer.is_empty() {
        let mut next: Vec<NodeId> = Vec::new();
        for &u in &layer {
            for (v, _) in net.neighbors(u) {
                if dist[v] == dist[u] + 1 {
                    match pred[v] {
                        None => {
                            pred[v] = Some(u);
                            next.push(v);
                        }
                        Some(w) if rank[u] < rank[w] => pred[v] = Some(u),
                        _ => {}
                    }
                }
            }
        }
        next.sort_by_key(|&v| (rank[pred[v].expect("reached")], v));
        for (i, &v) in next.iter().enumerate() {
            rank[v] = i;
        }
        layer = next;
    }
    pred
}

fn check_pair(net: &Network, s: NodeId, t: NodeId) -> Result<()> {
    let n = net.node_count();
    for x in [s, t] {
        if x >= n {
            return Err(Error::NodeOutOfRange { node: x, node_count: n });
        }
    }
    if s == t {
        return Err(Error::SameEndpoints(s));
    }
    Ok(())
}

fn check_size(net: &Network) -> Result<()> {
    if net.node_count() < 2 {
        return Err(Error::param("network average needs at least two nodes"));
    }
    Ok(())
}

/// Highest-fidelity path between `s` and `t`.
pub fn pair_max_fidelity(net: &Network, s: NodeId, t: NodeId) -> Result<PairFidelity> {
    check_pair(net, s, t)?;
    Ok(search(net, s).record(t))
}

/// Best products for all unordered pairs `(s, t)`, `s < t`, in row-major order.
pub fn pair_products(net: &Network) -> Vec<f64> {
    let n = net.node_count();
    let row = |s: NodeId| search(net, s).product[s + 1..].to_vec();
    if n >= PARALLEL_SOURCES_FROM {
        (0..n).into_par_iter().flat_map_iter(row).collect()
    } else {
        (0..n).flat_map(row).collect()
    }
}

/// Network average of the maximum pair fidelities, without path records.
pub fn average_max_fidelity_value(net: &Network) -> Result<f64> {
    check_size(net)?;
    Ok(mean_fidelity(&pair_products(net)))
}

/// Mean of `(1 + product) / 2` over best-path products.
/// Summed in ascending order, so the result depends only on the multiset of
/// products and isomorphic weightings give identical averages.
pub fn mean_fidelity(products: &[f64]) -> f64 {
    let mut sorted = products.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut sum = NeumaierSum::default();
    for &p in &sorted {
        sum.add(path_fidelity(p));
    }
    sum.value() / sorted.len() as f64
}

/// Network average of the maximum pair fidelities with one record per unordered pair.
pub fn average_max_fidelity(net: &Network) -> Result<NetworkFidelity> {
    check_size(net)?;
    let n = net.node_count();
    let row = |s: NodeId| {
        let tree = search(net, s);
        (s + 1..n).map(|t| tree.record(t)).collect::<Vec<_>>()
    };
    let pair_records: Vec<PairFidelity> = if n >= PARALLEL_SOURCES_FROM {
        (0..n).into_par_iter().flat_map_iter(row).collect()
    } else {
        (0..n).flat_map(row).collect()
    };
    let products: Vec<f64> = pair_records.iter().map(|r| r.product).collect();
    Ok(NetworkFidelity {
        avg_max_fidelity: mean_fidelity(&products),
        pair_records,
        effective_path_length: None,
    })
}

/// Exhaustive enumeration of simple `s`–`t` paths; the test oracle for
/// [`pair_max_fidelity`]. Uses [`BRUTE_FORCE_NODE_CAP`].
pub fn brute_force_pair_fidelity(net: &Network, s: NodeId, t: NodeId) -> Result<PairFidelity> {
    brute_force_pair_fidelity_capped(net, s, t, BRUTE_FORCE_NODE_CAP)
}

pub fn brute_force_pair_fidelity_capped(
    net: &Network,
    s: NodeId,
    t: NodeId,
    cap: usize,
) -> Result<PairFidelity> {
    if net.node_count() > cap {
        return Err(Error::CapExceeded { cap, node_count: net.node_count() });
    }
    check_pair(net, s, t)?;

    struct Walk<'a> {
        net: &'a Network,
        target: NodeId,
        on_path: Vec<bool>,
        path: Vec<NodeId>,
        best: Option<(f64, Vec<NodeId>)>,
    }

    impl Walk<'_> {
        fn visit(&mut self, u: NodeId, product: f64) {
            if u == self.target {
                let better = match &self.best {
                    None => true,
                    Some((bp, bpath)) => match product.total_cmp(bp) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => {
                            (self.path.len(), &self.path) < (bpath.len(), bpath)
                        }
                    },
                };
                if better {
                    self.best = Some((product, self.path.clone()));
                }
                return;
            }
            for (v, w) in self.net.neighbors(u) {
                if self.on_path[v] {
                    continue;
                }
                self.on_path[v] = true;
                self.path.push(v);
                self.visit(v, product * w);
                self.path.pop();
                self.on_path[v] = false;
            }
        }
    }

    let mut walk = Walk {
        net,
        target: t,
        on_path: vec![false; net.node_count()],
        path: vec![s],
        best: None,
    };
    walk.on_path[s] = true;
    walk.visit(s, 1.0);
    let (product, best_path) = walk.best.ok_or(Error::Disconnected)?;
    Ok(PairFidelity { source: s, target: t, best_path, product, fidelity: path_fidelity(product) })
}

/// Mean over unordered pairs of the number of non-ME links on the best path
/// in the limit where all non-ME weights tend to one: a 0-1 shortest-path
/// distance where ME links cost nothing.
pub fn effective_path_length(net: &Network) -> f64 {
    let n = net.node_count();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0usize;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut deque = VecDeque::from([s]);
        while let Some(u) = deque.pop_front() {
            for &(v, edge) in net.neighbor_edges(u) {
                let cost = usize::from(!net.edges()[edge].is_me());
                if dist[u] + cost < dist[v] {
                    dist[v] = dist[u] + cost;
                    if cost == 0 {
                        deque.push_front(v);
                    } else {
                        deque.push_back(v);
                    }
                }
            }
        }
        total += dist[s + 1..].iter().sum::<usize>();
    }
    total as f64 / (n * (n - 1) / 2) as f64
}

/// `2 [F(1) - F(1 - h)] / h` with every non-ME link set to `1 - h`.
pub fn finite_difference_path_length(net: &Network, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::param(format!("step h = {h} must lie in (0, 1]")));
    }
    let weights: Vec<f64> = net.edges().iter().map(|e| if e.is_me() { 1.0 } else { 1.0 - h }).collect();
    let at_one = average_max_fidelity_value(&net.reweighted(&vec![1.0; net.edge_count()])?)?;
    let below = average_max_fidelity_value(&net.reweighted(&weights)?)?;
    Ok(2.0 * (at_one - below) / h)
}

/// Engine output together with the effective path length.
pub fn analyze(net: &Network) -> Result<NetworkFidelity> {
    let mut out = average_max_fidelity(net)?;
    out.effective_path_length = Some(effective_path_length(net));
    Ok(out)
}
