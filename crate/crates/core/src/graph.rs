//! Immutable simple undirected graphs, BFS distances and vertex-pair sets.
//!
//! Vertices are always `0..n`. A [`Graph`] is simple and, unless the caller
//! opts out with [`Connectivity::Unchecked`], connected. The configuration
//! model produces a [`Multigraph`] first, which may carry loops and parallel
//! edges until it is accepted or rejected.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub type Vertex = usize;

/// Hop count between two vertices.
pub type Distance = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    Empty,
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("graph is not connected")]
    NotConnected,
}

/// Whether [`Graph::from_edges`] rejects disconnected input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    #[default]
    Required,
    Unchecked,
}

/// Unordered vertex pair stored as `(lo, hi)` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    lo: Vertex,
    hi: Vertex,
}

impl Pair {
    /// Returns `None` for `a == b`.
    pub fn new(a: Vertex, b: Vertex) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Pair { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Pair { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(&self) -> Vertex {
        self.lo
    }

    pub fn hi(&self) -> Vertex {
        self.hi
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.lo == v || self.hi == v
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.lo, self.hi)
    }
}

/// Canonical set of unordered vertex pairs, kept sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PairSet {
    pairs: Vec<Pair>,
}

impl PairSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from pairs that are already strictly increasing. Debug builds
    /// check the ordering.
    pub(crate) fn from_sorted(pairs: Vec<Pair>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0] < w[1]));
        PairSet { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: &Pair) -> bool {
        self.pairs.binary_search(pair).is_ok()
    }

    pub fn contains_vertices(&self, a: Vertex, b: Vertex) -> bool {
        Pair::new(a, b).is_some_and(|p| self.contains(&p))
    }

    /// Inserts `pair`, returning false if it was already present.
    pub fn insert(&mut self, pair: Pair) -> bool {
        match self.pairs.binary_search(&pair) {
            Ok(_) => false,
            Err(pos) => {
                self.pairs.insert(pos, pair);
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pair> + '_ {
        self.pairs.iter()
    }

    pub fn as_slice(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn is_subset(&self, other: &PairSet) -> bool {
        self.pairs.iter().all(|p| other.contains(p))
    }

    /// Pairs of `self` that are not in `other`.
    pub fn difference(&self, other: &PairSet) -> PairSet {
        PairSet::from_sorted(
            self.pairs
                .iter()
                .copied()
                .filter(|p| !other.contains(p))
                .collect(),
        )
    }
}

impl FromIterator<Pair> for PairSet {
    fn from_iter<I: IntoIterator<Item = Pair>>(iter: I) -> Self {
        let mut pairs: Vec<Pair> = iter.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        PairSet { pairs }
    }
}

impl<'a> IntoIterator for &'a PairSet {
    type Item = &'a Pair;
    type IntoIter = std::slice::Iter<'a, Pair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

/// Single-source hop counts. Unreachable vertices hold [`DistanceVector::unreachable`],
/// which is `n` and therefore larger than any real distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceVector {
    source: Vertex,
    dist: Vec<Distance>,
}

impl DistanceVector {
    pub(crate) fn new(source: Vertex, dist: Vec<Distance>) -> Self {
        debug_assert_eq!(dist[source], 0);
        DistanceVector { source, dist }
    }

    pub fn source(&self) -> Vertex {
        self.source
    }

    pub fn unreachable(&self) -> Distance {
        self.dist.len() as Distance
    }

    pub fn as_slice(&self) -> &[Distance] {
        &self.dist
    }

    pub fn into_vec(self) -> Vec<Distance> {
        self.dist
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }
}

impl std::ops::Index<Vertex> for DistanceVector {
    type Output = Distance;

    fn index(&self, v: Vertex) -> &Distance {
        &self.dist[v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl Graph {
    pub fn from_edges<I>(n: usize, edges: I, connectivity: Connectivity) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            let pair = Pair::new(u, v).ok_or(GraphError::SelfLoop(u))?;
            if !seen.insert(pair) {
                return Err(GraphError::DuplicateEdge(pair.lo, pair.hi));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = Graph {
            adjacency,
            edge_count: seen.len(),
        };
        if connectivity == Connectivity::Required && !graph.is_connected() {
            return Err(GraphError::NotConnected);
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        self.adjacency.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adjacency
            .get(a)
            .is_some_and(|l| l.binary_search(&b).is_ok())
    }

    /// Edges as `(lo, hi)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    pub fn edge_set(&self) -> PairSet {
        PairSet::from_sorted(self.edges().map(|(u, v)| Pair { lo: u, hi: v }).collect())
    }

    pub fn is_connected(&self) -> bool {
        reaches_all(self.vertex_count(), |v| self.adjacency[v].iter().copied())
    }

    /// Panics if `source >= n`.
    pub fn bfs_distances(&self, source: Vertex) -> DistanceVector {
        let n = self.vertex_count();
        assert!(source < n, "source {source} out of range for n = {n}");
        let unreachable = n as Distance;
        let mut dist = vec![unreachable; n];
        let mut queue = VecDeque::with_capacity(n);
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &v in &self.adjacency[u] {
                if dist[v] == unreachable {
                    dist[v] = next;
                    queue.push_back(v);
                }
            }
        }
        DistanceVector::new(source, dist)
    }

    /// Distance rows from every vertex; `n²` entries.
    pub fn all_pairs_distances(&self) -> Vec<Vec<Distance>> {
        use rayon::prelude::*;
        (0..self.vertex_count())
            .into_par_iter()
            .map(|s| self.bfs_distances(s).into_vec())
            .collect()
    }
}

/// Configuration-model output: `Δn/2` vertex pairs, loops and repeats allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    pairings: Vec<(Vertex, Vertex)>,
}

impl Multigraph {
    pub(crate) fn new(n: usize, pairings: Vec<(Vertex, Vertex)>) -> Self {
        Multigraph { n, pairings }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn pairings(&self) -> &[(Vertex, Vertex)] {
        &self.pairings
    }

    /// Endpoint count per vertex; loops count twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.pairings {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.pairings.len());
        self.pairings
            .iter()
            .all(|&(u, v)| Pair::new(u, v).is_some_and(|p| seen.insert(p)))
    }

    pub fn is_connected(&self) -> bool {
        let mut adjacency = vec![Vec::new(); self.n];
        for &(u, v) in &self.pairings {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        reaches_all(self.n, |v| adjacency[v].iter().copied())
    }

    pub fn to_graph(&self, connectivity: Connectivity) -> Result<Graph, GraphError> {
        Graph::from_edges(self.n, self.pairings.iter().copied(), connectivity)
    }
}

fn reaches_all<F, I>(n: usize, neighbors: F) -> bool
where
    F: Fn(Vertex) -> I,
    I: Iterator<Item = Vertex>,
{
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for v in neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}
