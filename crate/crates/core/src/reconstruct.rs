//! Edge-set reconstruction from sampled distance rows.
//!
//! Both algorithms draw a multiset `S` of `s` uniform vertices and learn the
//! distance from every `u ∈ S` to every vertex. A pair `{a, b}` stays a
//! candidate when no sampled `u` has `|δ(u,a) - δ(u,b)| > 1`. Every edge is a
//! candidate, so the candidate set is a superset of the edge set.
//!
//! * [`simple`] queries every candidate pair once more and keeps those at
//!   distance 1. It is exact for any `s` and uses two rounds.
//! * [`simple_modified`] resamples until the candidate set has exactly
//!   `Δn/2` pairs and returns it without further queries. It is meant for
//!   `Δ`-regular inputs, where that size forces candidates to equal edges.
//!   [`reconstruct_all_distances`] and [`reconstruct_betweenness`] run the
//!   same loop in the other two query models.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Distance, Pair, PairSet, Vertex};
use crate::oracle::{
    AllDistancesOracle, BetweennessAsAllDistances, BetweennessOracle, DistanceOracle,
    OracleError, QueryLedger,
};
use crate::rng::SplitMix64;

pub const DEFAULT_MAX_ITERS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconError {
    #[error("bad sample-size policy: {0}")]
    BadPolicy(String),
    #[error("candidate set never reached the target size in {0} iterations")]
    MaxItersExceeded(usize),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Rule mapping `n` to the sample size `s`. Logarithms are base 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SPolicy {
    /// `⌈(log₂ n)²⌉`
    Log2Squared,
    /// `⌈n^(2/3)⌉`
    TwoThirds,
    /// `⌈log₂ n · (log₂ log₂ n)^(2+ε)⌉`
    LogLogEps { epsilon: f64 },
    /// `⌈√n⌉`
    Sqrt,
    Fixed(usize),
}

impl SPolicy {
    pub fn validate(&self) -> Result<(), ReconError> {
        match *self {
            SPolicy::LogLogEps { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => Err(
                ReconError::BadPolicy(format!("epsilon must be positive, got {epsilon}")),
            ),
            SPolicy::Fixed(0) => Err(ReconError::BadPolicy("fixed s must be at least 1".into())),
            _ => Ok(()),
        }
    }

    /// Short name used on the command line and in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            SPolicy::Log2Squared => "log2sq",
            SPolicy::TwoThirds => "two-thirds",
            SPolicy::LogLogEps { .. } => "loglog-eps",
            SPolicy::Sqrt => "sqrt",
            SPolicy::Fixed(_) => "fixed",
        }
    }
}

impl fmt::Display for SPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SPolicy::LogLogEps { epsilon } => write!(f, "loglog-eps:{epsilon}"),
            SPolicy::Fixed(s) => write!(f, "fixed:{s}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for SPolicy {
    type Err = ReconError;

    /// Accepts `log2sq`, `two-thirds`, `sqrt`, `loglog-eps:<ε>` and `fixed:<s>`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match text.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (text, None),
        };
        let bad = || ReconError::BadPolicy(format!("cannot parse {text:?}"));
        let policy = match (name, arg) {
            ("log2sq", None) => SPolicy::Log2Squared,
            ("two-thirds", None) => SPolicy::TwoThirds,
            ("sqrt", None) => SPolicy::Sqrt,
            ("loglog-eps", Some(a)) => SPolicy::LogLogEps {
                epsilon: a.parse().map_err(|_| bad())?,
            },
            ("fixed", Some(a)) => SPolicy::Fixed(a.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        policy.validate()?;
        Ok(policy)
    }
}

/// Smallest `k` with `k^p >= x`.
fn ceil_root(x: u128, p: u32) -> u128 {
    let mut k = (x as f64).powf(1.0 / p as f64).floor() as u128;
    while k > 0 && k.pow(p) >= x {
        k -= 1;
    }
    while k.pow(p) < x {
        k += 1;
    }
    k
}

/// Sample size for `n` under `policy`, clamped to `[1, n]`.
pub fn compute_s(policy: SPolicy, n: usize) -> Result<usize, ReconError> {
    policy.validate()?;
    if n == 0 {
        return Err(ReconError::BadPolicy("n must be at least 1".into()));
    }
    let raw: f64 = match policy {
        SPolicy::Log2Squared => (n as f64).log2().powi(2).ceil(),
        SPolicy::TwoThirds => ceil_root((n as u128).pow(2), 3) as f64,
        SPolicy::Sqrt => ceil_root(n as u128, 2) as f64,
        SPolicy::LogLogEps { epsilon } => {
            if n <= 2 {
                1.0
            } else {
                let lg = (n as f64).log2();
                (lg * lg.log2().powf(2.0 + epsilon)).ceil()
            }
        }
        SPolicy::Fixed(s) => s as f64,
    };
    Ok((raw as usize).clamp(1, n))
}

/// Multiset of `s` vertices drawn uniformly and independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet(Vec<Vertex>);

impl SampleSet {
    pub fn draw(n: usize, s: usize, rng: &mut SplitMix64) -> Self {
        SampleSet((0..s).map(|_| rng.index(n)).collect())
    }

    pub fn from_vertices(vertices: Vec<Vertex>) -> Self {
        SampleSet(vertices)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct sampled vertices, ascending.
    pub fn support(&self) -> Vec<Vertex> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Pairs `{a, b}` with `|row[a] - row[b]| <= 1` for every row.
///
/// Makes no queries. With no rows every pair is a candidate.
pub fn candidate_set<R: AsRef<[Distance]> + Sync>(rows: &[R], n: usize) -> PairSet {
    let Some((first, rest)) = rows.split_first() else {
        return (0..n)
            .flat_map(|a| (a + 1..n).filter_map(move |b| Pair::new(a, b)))
            .collect();
    };
    let first = first.as_ref();
    let width = rest.len();
    // Vertex-major copy of the remaining rows so each pair test scans contiguous memory.
    let mut signature = vec![0 as Distance; n * width];
    for (i, row) in rest.iter().enumerate() {
        for (v, &d) in row.as_ref().iter().enumerate() {
            signature[v * width + i] = d;
        }
    }
    // Vertices bucketed by their distance in the first row.
    let levels = first.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut buckets: Vec<Vec<Vertex>> = vec![Vec::new(); levels];
    for (v, &d) in first.iter().enumerate() {
        buckets[d as usize].push(v);
    }

    let pairs: Vec<Pair> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let da = first[a] as usize;
            let sig_a = &signature[a * width..(a + 1) * width];
            let mut found: Vec<Pair> = buckets[da.saturating_sub(1)..(da + 2).min(levels)]
                .iter()
                .flatten()
                .copied()
                .filter(|&b| b > a)
                .filter(|&b| {
                    let sig_b = &signature[b * width..(b + 1) * width];
                    sig_a.iter().zip(sig_b).all(|(&x, &y)| x.abs_diff(y) <= 1)
                })
                .map(|b| Pair::new(a, b).expect("b > a"))
                .collect();
            found.sort_unstable();
            found
        })
        .collect();
    PairSet::from_sorted(pairs)
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// The reconstructed edge set.
    pub edges: PairSet,
    /// Candidate-set size in the final iteration.
    pub candidate_count: usize,
    /// Candidate pairs not in `edges`, one entry per iteration.
    pub excess: Vec<usize>,
    pub iterations: usize,
    /// Session counters when the run finished.
    pub ledger: QueryLedger,
    pub s_used: usize,
    /// Sample of every iteration.
    pub samples: Vec<SampleSet>,
    /// Queries issued while sampling distance rows, all iterations.
    pub stage1_queries: u64,
    /// Queries issued to verify candidates (simple only).
    pub stage2_queries: u64,
    /// Self pairs `(u, u)` answered locally instead of queried.
    pub self_skips: u64,
}

impl ReconstructionResult {
    pub fn final_excess(&self) -> usize {
        self.excess.last().copied().unwrap_or(0)
    }

    /// Stage-1 plus stage-2 queries with skipped self pairs counted, i.e. the
    /// `n·s + |Ê|` accounting of the simple algorithm.
    pub fn accounted_queries(&self) -> u64 {
        self.stage1_queries + self.stage2_queries + self.self_skips
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimpleOptions {
    /// Query `(u, u)` in stage 1 instead of answering 0 locally. The oracle
    /// must be configured to accept self queries.
    pub strict_count: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModifiedOptions {
    pub max_iters: usize,
    /// As [`SimpleOptions::strict_count`]; distance model only.
    pub strict_count: bool,
}

impl Default for ModifiedOptions {
    fn default() -> Self {
        ModifiedOptions {
            max_iters: DEFAULT_MAX_ITERS,
            strict_count: false,
        }
    }
}

/// Source of full distance rows for sampled vertices.
trait RowSource {
    fn vertex_count(&self) -> usize;
    fn begin_round(&mut self);
    fn ledger(&self) -> QueryLedger;
    /// Returns the row and the number of self pairs skipped.
    fn row(&mut self, u: Vertex) -> Result<(Vec<Distance>, u64), OracleError>;
}

struct RowsByDistance<'a, O: ?Sized> {
    oracle: &'a mut O,
    strict: bool,
}

impl<O: DistanceOracle + ?Sized> RowSource for RowsByDistance<'_, O> {
    fn vertex_count(&self) -> usize {
        self.oracle.vertex_count()
    }

    fn begin_round(&mut self) {
        self.oracle.begin_round();
    }

    fn ledger(&self) -> QueryLedger {
        self.oracle.ledger()
    }

    fn row(&mut self, u: Vertex) -> Result<(Vec<Distance>, u64), OracleError> {
        let n = self.oracle.vertex_count();
        let mut row = Vec::with_capacity(n);
        for v in 0..n {
            let d = if v == u && !self.strict {
                0
            } else {
                self.oracle.distance(u, v)?
            };
            row.push(d);
        }
        Ok((row, u64::from(!self.strict)))
    }
}

struct RowsByAllDistances<'a, O: ?Sized> {
    oracle: &'a mut O,
}

impl<O: AllDistancesOracle + ?Sized> RowSource for RowsByAllDistances<'_, O> {
    fn vertex_count(&self) -> usize {
        self.oracle.vertex_count()
    }

    fn begin_round(&mut self) {
        self.oracle.begin_round();
    }

    fn ledger(&self) -> QueryLedger {
        self.oracle.ledger()
    }

    fn row(&mut self, u: Vertex) -> Result<(Vec<Distance>, u64), OracleError> {
        Ok((self.oracle.all_distances(u)?.into_vec(), 0))
    }
}

struct Stage1 {
    sample: SampleSet,
    candidates: PairSet,
    queries: u64,
    self_skips: u64,
}

/// One round: draw a sample, fetch its rows, compute candidates.
fn sample_round<R: RowSource>(
    source: &mut R,
    s: usize,
    rng: &mut SplitMix64,
) -> Result<Stage1, OracleError> {
    let n = source.vertex_count();
    let sample = SampleSet::draw(n, s, rng);
    source.begin_round();
    let before = source.ledger().total();
    let mut rows = Vec::with_capacity(s);
    let mut self_skips = 0;
    for &u in sample.vertices() {
        let (row, skips) = source.row(u)?;
        self_skips += skips;
        rows.push(row);
    }
    let queries = source.ledger().total() - before;
    let candidates = candidate_set(&rows, n);
    Ok(Stage1 {
        sample,
        candidates,
        queries,
        self_skips,
    })
}

/// Two-round reconstruction with distance queries. Exact for every `s ∈ [1, n]`.
///
/// Round 1 queries every sampled `u` against every vertex; round 2 queries
/// each candidate pair and keeps those at distance 1.
pub fn simple<O>(
    oracle: &mut O,
    policy: SPolicy,
    rng: &mut SplitMix64,
    options: SimpleOptions,
) -> Result<ReconstructionResult, ReconError>
where
    O: DistanceOracle + ?Sized,
{
    let n = oracle.vertex_count();
    let s = compute_s(policy, n)?;
    let mut rows = RowsByDistance {
        oracle,
        strict: options.strict_count,
    };
    let stage1 = sample_round(&mut rows, s, rng)?;
    let oracle = rows.oracle;

    oracle.begin_round();
    let before = oracle.ledger().total();
    let mut edges = Vec::new();
    for pair in stage1.candidates.iter() {
        if oracle.distance(pair.lo(), pair.hi())? == 1 {
            edges.push(*pair);
        }
    }
    let stage2_queries = oracle.ledger().total() - before;
    let edges = PairSet::from_sorted(edges);
    let candidate_count = stage1.candidates.len();

    Ok(ReconstructionResult {
        excess: vec![candidate_count - edges.len()],
        edges,
        candidate_count,
        iterations: 1,
        ledger: oracle.ledger(),
        s_used: s,
        samples: vec![stage1.sample],
        stage1_queries: stage1.queries,
        stage2_queries,
        self_skips: stage1.self_skips,
    })
}

fn modified_loop<R: RowSource>(
    source: &mut R,
    delta: usize,
    rng: &mut SplitMix64,
    max_iters: usize,
) -> Result<ReconstructionResult, ReconError> {
    let n = source.vertex_count();
    let s = compute_s(SPolicy::Log2Squared, n)?;
    let target = delta * n / 2;
    let exact_target = (delta * n).is_multiple_of(2);
    let mut history = Vec::new();
    let mut samples = Vec::new();
    let mut stage1_queries = 0;
    let mut self_skips = 0;
    for _ in 0..max_iters {
        let round = sample_round(source, s, rng)?;
        stage1_queries += round.queries;
        self_skips += round.self_skips;
        samples.push(round.sample);
        let done = exact_target && round.candidates.len() == target;
        history.push(round.candidates);
        if done {
            let edges = history.pop().expect("just pushed");
            let mut excess: Vec<usize> =
                history.iter().map(|c| c.difference(&edges).len()).collect();
            excess.push(0);
            return Ok(ReconstructionResult {
                candidate_count: edges.len(),
                edges,
                excess,
                iterations: samples.len(),
                ledger: source.ledger(),
                s_used: s,
                samples,
                stage1_queries,
                stage2_queries: 0,
                self_skips,
            });
        }
    }
    Err(ReconError::MaxItersExceeded(max_iters))
}

/// Resampling reconstruction for `Δ`-regular graphs with distance queries,
/// `s = ⌈(log₂ n)²⌉`, one round per iteration.
pub fn simple_modified<O>(
    oracle: &mut O,
    delta: usize,
    rng: &mut SplitMix64,
    options: ModifiedOptions,
) -> Result<ReconstructionResult, ReconError>
where
    O: DistanceOracle + ?Sized,
{
    let mut rows = RowsByDistance {
        oracle,
        strict: options.strict_count,
    };
    modified_loop(&mut rows, delta, rng, options.max_iters)
}

/// [`simple_modified`] with one all-distances query per sampled vertex.
pub fn reconstruct_all_distances<O>(
    oracle: &mut O,
    delta: usize,
    rng: &mut SplitMix64,
    max_iters: usize,
) -> Result<ReconstructionResult, ReconError>
where
    O: AllDistancesOracle + ?Sized,
{
    modified_loop(&mut RowsByAllDistances { oracle }, delta, rng, max_iters)
}

/// [`reconstruct_all_distances`] with each row obtained from
/// [`betweenness_all_distances`](crate::oracle::betweenness_all_distances),
/// costing `(n-1)(n-2)` betweenness queries per sampled vertex.
pub fn reconstruct_betweenness<O>(
    oracle: &mut O,
    delta: usize,
    rng: &mut SplitMix64,
    max_iters: usize,
) -> Result<ReconstructionResult, ReconError>
where
    O: BetweennessOracle + ?Sized,
{
    let mut adapter = BetweennessAsAllDistances::new(oracle);
    reconstruct_all_distances(&mut adapter, delta, rng, max_iters)
}
