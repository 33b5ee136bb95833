//! Repeater networks: weighted undirected graphs whose edge weights are the
//! Werner parameters of the shared states, plus the canonical topology
//! families and the plain-text edge-list format.
//!
//! Edge-list format:
//!
//! ```text
//! # optional comments and blank lines
//! 4
//! 0 1 0.5
//! 1 2 0.5
//! 2 3 0.5
//! ```
//!
//! The first significant line is the node count `N`; every later significant
//! line is `u v p` with 0-based node ids and a decimal weight in `[0, 1]`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// An undirected link with its Werner weight. Endpoints are stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub p: f64,
}

impl Edge {
    pub fn new(a: NodeId, b: NodeId, p: f64) -> Self {
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        Edge { u, v, p }
    }

    /// True when the link carries a maximally entangled state.
    pub fn is_me(&self) -> bool {
        self.p == 1.0
    }
}

/// A validated, connected repeater network. Immutable once built.
#[derive(Clone, Debug)]
pub struct Network {
    node_count: usize,
    edges: Vec<Edge>,
    // (neighbor, edge index), neighbors sorted ascending
    adjacency: Vec<Vec<(NodeId, usize)>>,
}

impl Network {
    /// Builds a network, rejecting self-loops, duplicate links, weights outside
    /// `[0, 1]`, unknown node ids and disconnected graphs.
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidTopology("network needs at least one node".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for e in edges {
            let e = Edge::new(e.u, e.v, e.p);
            if e.v >= node_count {
                return Err(Error::NodeOutOfRange { node: e.v, node_count });
            }
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u));
            }
            check_weight(e.p)?;
            if !seen.insert((e.u, e.v)) {
                return Err(Error::DuplicateEdge(e.u, e.v));
            }
            normalized.push(e);
        }
        let net = Self::from_parts(node_count, normalized);
        if !net.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(net)
    }

    fn from_parts(node_count: usize, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Network { node_count, edges, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.p).collect()
    }

    /// Neighbors of `node` as `(neighbor, weight)` in ascending neighbor order.
    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.adjacency[node].iter().map(move |&(v, i)| (v, self.edges[i].p))
    }

    pub(crate) fn neighbor_edges(&self, node: NodeId) -> &[(NodeId, usize)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.node_count).map(|v| self.degree(v)).collect()
    }

    /// Weight of the link between `a` and `b`, if any.
    pub fn weight(&self, a: NodeId, b: NodeId) -> Option<f64> {
        self.adjacency
            .get(a)?
            .binary_search_by_key(&b, |&(v, _)| v)
            .ok()
            .map(|pos| self.edges[self.adjacency[a][pos].1].p)
    }

    /// Same structure with new per-link weights (in edge order).
    pub fn reweighted(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::WeightCountMismatch { expected: self.edges.len(), got: weights.len() });
        }
        for &p in weights {
            check_weight(p)?;
        }
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &p)| Edge { p, ..*e })
            .collect();
        Ok(Network { node_count: self.node_count, edges, adjacency: self.adjacency.clone() })
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.node_count
    }

    /// Hop distances from `source` to every node (BFS).
    pub fn hop_distances(&self, source: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Largest hop distance between any two nodes.
    pub fn diameter(&self) -> usize {
        (0..self.node_count)
            .map(|s| self.hop_distances(s).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Mean hop distance over unordered node pairs.
    pub fn average_path_length(&self) -> f64 {
        let n = self.node_count;
        if n < 2 {
            return 0.0;
        }
        let total: usize = (0..n)
            .map(|s| self.hop_distances(s)[s + 1..].iter().sum::<usize>())
            .sum();
        total as f64 / (n * (n - 1) / 2) as f64
    }

    fn is_connected(&self) -> bool {
        self.hop_distances(0).iter().all(|&d| d != usize::MAX)
    }
}

/// Equality up to edge ordering.
impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        if self.node_count != other.node_count || self.edges.len() != other.edges.len() {
            return false;
        }
        let key = |e: &Edge| (e.u, e.v);
        let mut a = self.edges.clone();
        let mut b = other.edges.clone();
        a.sort_by_key(key);
        b.sort_by_key(key);
        a == b
    }
}

fn check_weight(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::WeightOutOfRange(p))
    }
}

/// Canonical topology families.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Chain,
    Star,
    /// k-th intermediate flower: a star of `k + 2` spokes, one of which
    /// continues as a chain of `L - k - 2` further links.
    Flower(usize),
    Ring,
    Complete,
    Custom(PathBuf),
}

impl Family {
    pub fn is_canonical(&self) -> bool {
        !matches!(self, Family::Custom(_))
    }

    pub fn is_tree(&self) -> bool {
        matches!(self, Family::Chain | Family::Star | Family::Flower(_))
    }

    /// Short name without parameters.
    pub fn kind(&self) -> &'static str {
        match self {
            Family::Chain => "chain",
            Family::Star => "star",
            Family::Flower(_) => "flower",
            Family::Ring => "ring",
            Family::Complete => "complete",
            Family::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Flower(k) => write!(f, "flower{k}"),
            Family::Custom(path) => write!(f, "custom({})", path.display()),
            other => f.write_str(other.kind()),
        }
    }
}

/// Parses `chain`, `star`, `ring`, `complete`, `flower<k>` / `flower(<k>)`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "chain" => return Ok(Family::Chain),
            "star" => return Ok(Family::Star),
            "ring" => return Ok(Family::Ring),
            "complete" => return Ok(Family::Complete),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix("flower") {
            let digits = rest.trim_start_matches('(').trim_end_matches(')');
            return digits
                .parse()
                .map(Family::Flower)
                .map_err(|_| Error::InvalidTopology(format!("bad flower spec '{s}'")));
        }
        Err(Error::InvalidTopology(format!("unknown family '{s}'")))
    }
}

/// A family together with its node count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TopologySpec {
    pub family: Family,
    /// Node count; ignored for `Custom`, whose size comes from the file.
    pub n: usize,
}

impl TopologySpec {
    pub fn new(family: Family, n: usize) -> Self {
        TopologySpec { family, n }
    }

    pub fn chain(n: usize) -> Self {
        Self::new(Family::Chain, n)
    }

    pub fn star(n: usize) -> Self {
        Self::new(Family::Star, n)
    }

    pub fn flower(n: usize, k: usize) -> Self {
        Self::new(Family::Flower(k), n)
    }

    pub fn ring(n: usize) -> Self {
        Self::new(Family::Ring, n)
    }

    pub fn complete(n: usize) -> Self {
        Self::new(Family::Complete, n)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let fail = |msg: String| Err(Error::InvalidTopology(msg));
        match self.family {
            Family::Chain | Family::Star | Family::Complete if n < 2 => {
                fail(format!("{} needs N >= 2, got {n}", self.family))
            }
            Family::Ring if n < 3 => fail(format!("ring needs N >= 3, got {n}")),
            Family::Flower(k) => {
                if n < 3 {
                    return fail(format!("flower needs N >= 3, got {n}"));
                }
                let links = n - 1;
                if k + 2 > links {
                    return fail(format!("flower k = {k} out of range 0..={} for N = {n}", links - 2));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of links `L` for canonical families.
    pub fn link_count(&self) -> Option<usize> {
        let n = self.n;
        match self.family {
            Family::Chain | Family::Star | Family::Flower(_) => Some(n - 1),
            Family::Ring => Some(n),
            Family::Complete => Some(n * (n - 1) / 2),
            Family::Custom(_) => None,
        }
    }

    /// Link endpoints of a canonical family in generation order.
    ///
    /// Flower labelling: hub 0, petal leaves `1..=k+1`, then the stem
    /// `k+2, k+3, .., N-1` in chain order starting from the hub.
    pub fn links(&self) -> Result<Vec<(NodeId, NodeId)>> {
        self.validate()?;
        let n = self.n;
        let links = match self.family {
            Family::Chain => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Family::Star => (1..n).map(|i| (0, i)).collect(),
            Family::Flower(k) => {
                let mut links: Vec<_> = (1..=k + 2).map(|i| (0, i)).collect();
                links.extend((k + 2..n - 1).map(|i| (i, i + 1)));
                links
            }
            Family::Ring => {
                let mut links: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
                links.push((n - 1, 0));
                links
            }
            Family::Complete => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
            Family::Custom(_) => {
                return Err(Error::InvalidTopology("custom topologies have no generator".into()))
            }
        };
        Ok(links)
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Custom(_) => write!(f, "{}", self.family),
            family => write!(f, "{family}(N={})", self.n),
        }
    }
}

/// How link weights are assigned when generating a network.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightAssignment {
    /// Every link gets the same weight (Scenario A).
    Uniform(f64),
    /// One weight per link, in generation order.
    PerLink(Vec<f64>),
    /// Links flagged `true` are maximally entangled (weight 1), the rest get `p`.
    MeMask { me: Vec<bool>, p: f64 },
    /// Keep the weights stored in a custom edge-list file.
    AsLoaded,
}

impl WeightAssignment {
    fn resolve(&self, link_count: usize) -> Result<Option<Vec<f64>>> {
        let check_len = |got: usize| {
            if got == link_count {
                Ok(())
            } else {
                Err(Error::WeightCountMismatch { expected: link_count, got })
            }
        };
        let weights = match self {
            WeightAssignment::Uniform(p) => vec![*p; link_count],
            WeightAssignment::PerLink(w) => {
                check_len(w.len())?;
                w.clone()
            }
            WeightAssignment::MeMask { me, p } => {
                check_len(me.len())?;
                me.iter().map(|&m| if m { 1.0 } else { *p }).collect()
            }
            WeightAssignment::AsLoaded => return Ok(None),
        };
        for &p in &weights {
            check_weight(p)?;
        }
        Ok(Some(weights))
    }
}

/// Builds the network described by `spec` with the given weights.
pub fn generate(spec: &TopologySpec, weights: &WeightAssignment) -> Result<Network> {
    if let Family::Custom(path) = &spec.family {
        let loaded = load_edge_list(path)?;
        return match weights.resolve(loaded.edge_count())? {
            Some(w) => loaded.reweighted(&w),
            None => Ok(loaded),
        };
    }
    let links = spec.links()?;
    let w = weights.resolve(links.len())?.ok_or_else(|| {
        Error::param("AsLoaded weights only apply to custom edge-list topologies")
    })?;
    let edges = links.into_iter().zip(w).map(|((u, v), p)| Edge::new(u, v, p)).collect();
    Network::new(spec.n, edges)
}

/// Parses the edge-list text format.
pub fn parse_edge_list(text: &str) -> Result<Network> {
    let mut node_count: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |source: Error| Error::AtLine { line: line_no, source: Box::new(source) };
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        let Some(n) = node_count else {
            let n: usize = line
                .parse()
                .map_err(|_| parse_err(format!("expected node count, found '{line}'")))?;
            if n == 0 {
                return Err(parse_err("node count must be positive".into()));
            }
            node_count = Some(n);
            continue;
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected 'u v p', found '{line}'")));
        }
        let node = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| parse_err(format!("bad node id '{s}'")))
        };
        let (a, b) = (node(fields[0])?, node(fields[1])?);
        let p: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(format!("bad weight '{}'", fields[2])))?;
        for x in [a, b] {
            if x >= n {
                return Err(at(Error::NodeOutOfRange { node: x, node_count: n }));
            }
        }
        if a == b {
            return Err(at(Error::SelfLoop(a)));
        }
        check_weight(p).map_err(at)?;
        let e = Edge::new(a, b, p);
        if !seen.insert((e.u, e.v)) {
            return Err(at(Error::DuplicateEdge(e.u, e.v)));
        }
        edges.push(e);
    }
    let n = node_count.ok_or(Error::Parse { line: 0, message: "empty edge list".into() })?;
    Network::new(n, edges)
}

/// Renders a network in the edge-list format. Weights use the shortest
/// representation that round-trips exactly.
pub fn format_edge_list(net: &Network) -> String {
    let mut out = format!("{}\n", net.node_count());
    for e in net.edges() {
        out.push_str(&format!("{} {} {}\n", e.u, e.v, e.p));
    }
    out
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    parse_edge_list(&text)
}

pub fn save_edge_list(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    crate::io::write_atomic(path, format_edge_list(net).as_bytes())
}
