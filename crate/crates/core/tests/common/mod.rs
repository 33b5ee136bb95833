#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use qnetfid::network::{Edge, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Best weight product between `s` and `t` over every simple path, by DFS.
pub fn dfs_best_product(net: &Network, s: usize, t: usize) -> f64 {
    fn walk(net: &Network, at: usize, t: usize, product: f64, seen: &mut Vec<bool>, best: &mut f64) {
        if at == t {
            if product > *best {
                *best = product;
            }
            return;
        }
        for (next, p) in net.neighbors(at).collect::<Vec<_>>() {
            if !seen[next] {
                seen[next] = true;
                walk(net, next, t, product * p, seen, best);
                seen[next] = false;
            }
        }
    }
    let mut seen = vec![false; net.node_count()];
    seen[s] = true;
    let mut best = f64::NEG_INFINITY;
    walk(net, s, t, 1.0, &mut seen, &mut best);
    best
}

/// Pair-averaged fidelity from the DFS oracle, summed in plain f64.
pub fn dfs_average(net: &Network) -> f64 {
    let n = net.node_count();
    let mut sum = 0.0;
    for s in 0..n {
        for t in s + 1..n {
            sum += (1.0 + dfs_best_product(net, s, t)) / 2.0;
        }
    }
    sum / (n * (n - 1) / 2) as f64
}

/// Random connected graph: a random spanning tree plus each other pair with
/// probability `extra`, i.i.d. uniform weights.
#[allow(clippy::needless_range_loop)]
pub fn random_connected(rng: &mut impl Rng, n: usize, extra: f64) -> Network {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for i in 1..n {
        let (a, b) = (order[i], order[rng.random_range(0..i)]);
        present[a][b] = true;
        present[b][a] = true;
        edges.push(Edge::new(a, b, rng.random::<f64>()));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !present[a][b] && rng.random_bool(extra) {
                edges.push(Edge::new(a, b, rng.random::<f64>()));
            }
        }
    }
    Network::new(n, edges).expect("connected by construction")
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Proptest strategy for connected graphs with 2..=max_n nodes. Weights come
/// from a small set so exact ties and ME links show up often.
pub fn connected_graph(max_n: usize) -> impl Strategy<Value = Network> {
    let weights = prop_oneof![
        Just(0.0),
        Just(0.25),
        Just(0.5),
        Just(0.75),
        Just(1.0),
        0.0..=1.0f64,
    ];
    (2..=max_n)
        .prop_flat_map(move |n| {
            let parents: Vec<_> = (1..n).map(|i| 0..i).collect();
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                parents,
                proptest::collection::vec(proptest::bool::weighted(0.3), pairs),
                proptest::collection::vec(weights.clone(), n - 1 + pairs),
            )
        })
        .prop_map(|(n, parents, extra, w)| {
            let mut edges = Vec::new();
            let mut wi = w.into_iter();
            for (i, &parent) in parents.iter().enumerate() {
                edges.push(Edge::new(i + 1, parent, wi.next().unwrap()));
            }
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    let is_tree_edge = b >= 1 && parents[b - 1] == a;
                    if extra[k] && !is_tree_edge {
                        edges.push(Edge::new(a, b, wi.next().unwrap()));
                    }
                    k += 1;
                }
            }
            Network::new(n, edges).expect("spanning tree included")
        })
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact placement average of F^max_avg on a tree: every way of making `m`
/// of its links ME (weight 1), others `p`, with unique-path products.
pub fn tree_placement_average_exact(links: &[(usize, usize)], n: usize, m: usize, p: &BigRational) -> BigRational {
    let l = links.len();
    let paths = tree_paths(links, n);
    let mut total = BigRational::zero();
    let mut placements = 0i64;
    for mask in 0u64..(1u64 << l) {
        if mask.count_ones() as usize != m {
            continue;
        }
        placements += 1;
        let mut sum = BigRational::zero();
        for path in &paths {
            let mut prod = BigRational::one();
            for &e in path {
                if mask >> e & 1 == 0 {
                    prod *= p;
                }
            }
            sum += (BigRational::one() + prod) / BigRational::from_integer(2.into());
        }
        total += sum / BigRational::from_integer(BigInt::from(paths.len()));
    }
    total / BigRational::from_integer(BigInt::from(placements))
}

/// Link indices along the unique path of every unordered pair of a tree.
pub fn tree_paths(links: &[(usize, usize)], n: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for (i, &(a, b)) in links.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut via: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut stack = vec![s];
        let mut seen = vec![false; n];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &(v, e) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    via[v] = Some((u, e));
                    stack.push(v);
                }
            }
        }
        for t in s + 1..n {
            let mut path = Vec::new();
            let mut at = t;
            while let Some((prev, e)) = via[at] {
                path.push(e);
                at = prev;
            }
            out.push(path);
        }
    }
    out
}

pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}
