//! Query oracles over a hidden graph.
//!
//! Reconstruction code only ever sees the traits in this module. An
//! [`OracleSession`] implements all three query models over a hidden
//! [`Graph`] and keeps a per-model query count plus a per-round count.
//!
//! By default every call is counted, including repeats of an earlier query.
//! [`SessionOptions::dedup`] memoizes answers so repeats are free; that mode
//! is for exploration only and does not reproduce the query accounting of the
//! algorithms.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Distance, DistanceVector, Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("hidden graph must be connected")]
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryKind {
    Distance,
    AllDistances,
    Betweenness,
}

/// Frozen snapshot of a session's counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryLedger {
    pub distance: u64,
    pub all_distances: u64,
    pub betweenness: u64,
    /// Queries per round, all models combined. Always sums to [`QueryLedger::total`].
    pub rounds: Vec<u64>,
}

impl QueryLedger {
    pub fn count(&self, kind: QueryKind) -> u64 {
        match kind {
            QueryKind::Distance => self.distance,
            QueryKind::AllDistances => self.all_distances,
            QueryKind::Betweenness => self.betweenness,
        }
    }

    pub fn total(&self) -> u64 {
        self.distance + self.all_distances + self.betweenness
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }
}

/// Shared surface of every query model.
pub trait Oracle {
    fn vertex_count(&self) -> usize;

    /// Starts a new round; later queries are attributed to it.
    fn begin_round(&mut self) -> usize;

    fn ledger(&self) -> QueryLedger;
}

pub trait DistanceOracle: Oracle {
    fn distance(&mut self, a: Vertex, b: Vertex) -> Result<Distance, OracleError>;
}

pub trait AllDistancesOracle: Oracle {
    fn all_distances(&mut self, u: Vertex) -> Result<DistanceVector, OracleError>;
}

pub trait BetweennessOracle: Oracle {
    /// Whether `w` lies on some shortest `u`-`v` path.
    fn betweenness(&mut self, u: Vertex, v: Vertex, w: Vertex) -> Result<bool, OracleError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SessionOptions {
    /// Memoize answers; repeated queries are not counted.
    pub dedup: bool,
    /// Accept `distance(u, u)`, answer 0 and count it. Used for the strict
    /// query accounting of the simple algorithm, where stage 1 queries every
    /// `(u, v)` including `v = u`.
    pub count_self_queries: bool,
}

/// Upper bound on cached distance entries (rows times `n`).
const CACHE_ENTRY_BUDGET: usize = 1 << 24;

/// Per-trial oracle over a hidden graph.
///
/// Answers are computed from BFS rows of the hidden graph, cached FIFO under a
/// fixed memory budget. The cache is a simulation detail and never affects
/// counting.
pub struct OracleSession {
    hidden: Arc<Graph>,
    options: SessionOptions,
    ledger: QueryLedger,
    rows: HashMap<Vertex, Arc<[Distance]>>,
    row_order: VecDeque<Vertex>,
    row_capacity: usize,
    seen_distance: HashMap<(Vertex, Vertex), Distance>,
    seen_all: HashMap<Vertex, DistanceVector>,
    seen_betweenness: HashMap<(Vertex, Vertex, Vertex), bool>,
}

impl std::fmt::Debug for OracleSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleSession")
            .field("n", &self.hidden.vertex_count())
            .field("options", &self.options)
            .field("ledger", &self.ledger)
            .finish_non_exhaustive()
    }
}

impl OracleSession {
    pub fn new(hidden: impl Into<Arc<Graph>>) -> Result<Self, OracleError> {
        Self::with_options(hidden, SessionOptions::default())
    }

    pub fn with_options(
        hidden: impl Into<Arc<Graph>>,
        options: SessionOptions,
    ) -> Result<Self, OracleError> {
        let hidden = hidden.into();
        if !hidden.is_connected() {
            return Err(OracleError::Disconnected);
        }
        let row_capacity = (CACHE_ENTRY_BUDGET / hidden.vertex_count()).max(2);
        Ok(OracleSession {
            hidden,
            options,
            ledger: QueryLedger::default(),
            rows: HashMap::new(),
            row_order: VecDeque::new(),
            row_capacity,
            seen_distance: HashMap::new(),
            seen_all: HashMap::new(),
            seen_betweenness: HashMap::new(),
        })
    }

    pub fn options(&self) -> SessionOptions {
        self.options
    }

    /// Consumes the session and returns its final counters.
    pub fn close(self) -> QueryLedger {
        self.ledger
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), OracleError> {
        let n = self.hidden.vertex_count();
        if v >= n {
            return Err(OracleError::ContractViolation(format!(
                "vertex {v} out of range for n = {n}"
            )));
        }
        Ok(())
    }

    fn charge(&mut self, kind: QueryKind) {
        match kind {
            QueryKind::Distance => self.ledger.distance += 1,
            QueryKind::AllDistances => self.ledger.all_distances += 1,
            QueryKind::Betweenness => self.ledger.betweenness += 1,
        }
        match self.ledger.rounds.last_mut() {
            Some(r) => *r += 1,
            None => self.ledger.rounds.push(1),
        }
    }

    fn row(&mut self, source: Vertex) -> Arc<[Distance]> {
        if let Some(row) = self.rows.get(&source) {
            return Arc::clone(row);
        }
        let row: Arc<[Distance]> = self.hidden.bfs_distances(source).into_vec().into();
        if self.row_order.len() == self.row_capacity {
            if let Some(old) = self.row_order.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.row_order.push_back(source);
        self.rows.insert(source, Arc::clone(&row));
        row
    }

    fn lookup(&mut self, a: Vertex, b: Vertex) -> Distance {
        if let Some(row) = self.rows.get(&a) {
            return row[b];
        }
        if let Some(row) = self.rows.get(&b) {
            return row[a];
        }
        self.row(a)[b]
    }
}

impl Oracle for OracleSession {
    fn vertex_count(&self) -> usize {
        self.hidden.vertex_count()
    }

    fn begin_round(&mut self) -> usize {
        self.ledger.rounds.push(0);
        self.ledger.rounds.len() - 1
    }

    fn ledger(&self) -> QueryLedger {
        self.ledger.clone()
    }
}

impl DistanceOracle for OracleSession {
    fn distance(&mut self, a: Vertex, b: Vertex) -> Result<Distance, OracleError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            if !self.options.count_self_queries {
                return Err(OracleError::ContractViolation(format!(
                    "self distance query ({a}, {a})"
                )));
            }
            if !self.options.dedup || self.seen_distance.insert((a, a), 0).is_none() {
                self.charge(QueryKind::Distance);
            }
            return Ok(0);
        }
        let key = (a.min(b), a.max(b));
        if self.options.dedup {
            if let Some(&d) = self.seen_distance.get(&key) {
                return Ok(d);
            }
        }
        let d = self.lookup(a, b);
        self.charge(QueryKind::Distance);
        if self.options.dedup {
            self.seen_distance.insert(key, d);
        }
        Ok(d)
    }
}

impl AllDistancesOracle for OracleSession {
    fn all_distances(&mut self, u: Vertex) -> Result<DistanceVector, OracleError> {
        self.check_vertex(u)?;
        if self.options.dedup {
            if let Some(dv) = self.seen_all.get(&u) {
                return Ok(dv.clone());
            }
        }
        let dv = DistanceVector::new(u, self.row(u).to_vec());
        self.charge(QueryKind::AllDistances);
        if self.options.dedup {
            self.seen_all.insert(u, dv.clone());
        }
        Ok(dv)
    }
}

impl BetweennessOracle for OracleSession {
    fn betweenness(&mut self, u: Vertex, v: Vertex, w: Vertex) -> Result<bool, OracleError> {
        for x in [u, v, w] {
            self.check_vertex(x)?;
        }
        if u == v {
            return Err(OracleError::ContractViolation(format!(
                "betweenness query with equal endpoints ({u}, {u}, {w})"
            )));
        }
        let key = (u.min(v), u.max(v), w);
        if self.options.dedup {
            if let Some(&ans) = self.seen_betweenness.get(&key) {
                return Ok(ans);
            }
        }
        let through = self.lookup(u, w) + self.lookup(w, v);
        let ans = through == self.lookup(u, v);
        self.charge(QueryKind::Betweenness);
        if self.options.dedup {
            self.seen_betweenness.insert(key, ans);
        }
        Ok(ans)
    }
}

/// Distances from `u` to every vertex using betweenness queries only.
///
/// For every `v != u` the strict intermediates `I(v) = { w : w on a shortest
/// u-v path, w not in {u, v} }` are collected with `(n-1)(n-2)` queries. Then
/// `δ(u,v) = 1` when `I(v)` is empty and `1 + max δ(u,w)` over `w ∈ I(v)`
/// otherwise. Every `w ∈ I(v)` has `I(w) ⊊ I(v)`, so evaluating vertices by
/// increasing `|I(v)|` sees each intermediate before it is needed.
///
/// The hidden graph must be connected.
pub fn betweenness_all_distances<O>(oracle: &mut O, u: Vertex) -> Result<DistanceVector, OracleError>
where
    O: BetweennessOracle + ?Sized,
{
    let n = oracle.vertex_count();
    if u >= n {
        return Err(OracleError::ContractViolation(format!(
            "vertex {u} out of range for n = {n}"
        )));
    }
    let mut intermediates: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| v != u) {
        for w in (0..n).filter(|&w| w != u && w != v) {
            if oracle.betweenness(u, v, w)? {
                intermediates[v].push(w);
            }
        }
    }
    let mut order: Vec<Vertex> = (0..n).filter(|&v| v != u).collect();
    order.sort_by_key(|&v| intermediates[v].len());

    let unknown = Distance::MAX;
    let mut dist = vec![unknown; n];
    dist[u] = 0;
    for v in order {
        let mut d = 1;
        for &w in &intermediates[v] {
            debug_assert_ne!(dist[w], unknown);
            d = d.max(dist[w] + 1);
        }
        dist[v] = d;
    }
    Ok(DistanceVector::new(u, dist))
}

/// Presents a betweenness oracle as an all-distances oracle through
/// [`betweenness_all_distances`]. Only betweenness queries are counted.
pub struct BetweennessAsAllDistances<'a, O: ?Sized> {
    inner: &'a mut O,
}

impl<'a, O: BetweennessOracle + ?Sized> BetweennessAsAllDistances<'a, O> {
    pub fn new(inner: &'a mut O) -> Self {
        BetweennessAsAllDistances { inner }
    }
}

impl<O: BetweennessOracle + ?Sized> Oracle for BetweennessAsAllDistances<'_, O> {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn begin_round(&mut self) -> usize {
        self.inner.begin_round()
    }

    fn ledger(&self) -> QueryLedger {
        self.inner.ledger()
    }
}

impl<O: BetweennessOracle + ?Sized> AllDistancesOracle for BetweennessAsAllDistances<'_, O> {
    fn all_distances(&mut self, u: Vertex) -> Result<DistanceVector, OracleError> {
        betweenness_all_distances(self.inner, u)
    }
}
