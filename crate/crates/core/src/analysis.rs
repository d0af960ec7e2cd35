//! White-box measurements over a known graph: distinguisher sets, bad pairs,
//! resolving sets and metric dimension.
//!
//! A vertex `u` distinguishes `{a, b}` when `|δ(u,a) - δ(u,b)| > 1`. A sampled
//! distinguisher removes the pair from the candidate set, so pairs with few
//! distinguishers ("bad" pairs) are the ones that survive sampling.

use std::collections::HashSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Distance, Graph, Pair, PairSet, Vertex};
use crate::reconstruct::SampleSet;
use crate::rng::SplitMix64;

/// Largest graph accepted by [`metric_dimension_exact`].
pub const METRIC_DIMENSION_MAX_N: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("graph has {n} vertices, exhaustive search is limited to {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("graph has no pair at distance 2 or more")]
    NoNonAdjacentPairs,
}

fn count_distinguishers(row_a: &[Distance], row_b: &[Distance]) -> usize {
    row_a
        .iter()
        .zip(row_b)
        .filter(|(&x, &y)| x.abs_diff(y) > 1)
        .count()
}

/// `D(a, b)`, ascending. Includes `a` and `b` themselves when `δ(a,b) > 1`.
pub fn distinguishers(g: &Graph, a: Vertex, b: Vertex) -> Result<Vec<Vertex>, AnalysisError> {
    let n = g.vertex_count();
    if a == b || a >= n || b >= n {
        return Err(AnalysisError::ContractViolation(format!(
            "need two distinct vertices below {n}, got {a} and {b}"
        )));
    }
    let da = g.bfs_distances(a);
    let db = g.bfs_distances(b);
    Ok((0..n).filter(|&u| da[u].abs_diff(db[u]) > 1).collect())
}

/// `3n·log₂(n)/s`, the distinguisher count at or below which a pair is bad.
pub fn bad_pair_threshold(n: usize, s: usize) -> f64 {
    3.0 * n as f64 * (n as f64).log2() / s as f64
}

fn is_bad(rows: &[Vec<Distance>], a: Vertex, b: Vertex, threshold: f64) -> bool {
    rows[a][b] >= 2 && count_distinguishers(&rows[a], &rows[b]) as f64 <= threshold
}

/// Pairs at distance at least 2 with at most `3n·log₂(n)/s` distinguishers.
pub fn bad_pairs(g: &Graph, s: usize) -> PairSet {
    let n = g.vertex_count();
    let threshold = bad_pair_threshold(n, s.max(1));
    let rows = g.all_pairs_distances();
    let pairs: Vec<Pair> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let rows = &rows;
            (a + 1..n)
                .filter(move |&b| is_bad(rows, a, b, threshold))
                .map(move |b| Pair::new(a, b).expect("a < b"))
        })
        .collect();
    pairs.into_iter().collect()
}

/// `B(a) = { b : {a, b} is a bad pair }`, ascending.
pub fn bad_neighborhood(g: &Graph, a: Vertex, s: usize) -> Vec<Vertex> {
    let n = g.vertex_count();
    let threshold = bad_pair_threshold(n, s.max(1));
    let row_a = g.bfs_distances(a);
    (0..n)
        .into_par_iter()
        .filter(|&b| {
            b != a
                && row_a[b] >= 2
                && count_distinguishers(row_a.as_slice(), g.bfs_distances(b).as_slice()) as f64
                    <= threshold
        })
        .collect()
}

fn signatures_distinct(n: usize, rows: &[&[Distance]]) -> bool {
    let mut seen = HashSet::with_capacity(n);
    (0..n).all(|v| seen.insert(rows.iter().map(|r| r[v]).collect::<Vec<_>>()))
}

/// Whether every vertex has a distinct vector of distances to `subset`.
pub fn is_resolving_set(g: &Graph, subset: &[Vertex]) -> bool {
    let rows: Vec<_> = subset
        .iter()
        .unique()
        .map(|&u| g.bfs_distances(u).into_vec())
        .collect();
    let refs: Vec<&[Distance]> = rows.iter().map(Vec::as_slice).collect();
    signatures_distinct(g.vertex_count(), &refs)
}

/// Size of a smallest resolving set, by exhaustive search over subsets of
/// increasing size. Refuses graphs above `min(size_cap, 16)` vertices.
pub fn metric_dimension_exact(g: &Graph, size_cap: usize) -> Result<usize, AnalysisError> {
    let n = g.vertex_count();
    let cap = size_cap.min(METRIC_DIMENSION_MAX_N);
    if n > cap {
        return Err(AnalysisError::TooLarge { n, cap });
    }
    let rows = g.all_pairs_distances();
    for k in 0..=n {
        let found = (0..n).combinations(k).any(|subset| {
            let refs: Vec<&[Distance]> = subset.iter().map(|&u| rows[u].as_slice()).collect();
            signatures_distinct(n, &refs)
        });
        if found {
            return Ok(k);
        }
    }
    unreachable!("the full vertex set always resolves")
}

/// Draws `s` uniform vertices with replacement and tests whether their
/// support resolves `g`.
pub fn resolving_sample_trial(g: &Graph, s: usize, rng: &mut SplitMix64) -> bool {
    let sample = SampleSet::draw(g.vertex_count(), s, rng);
    is_resolving_set(g, &sample.support())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralReport {
    pub n: usize,
    /// Maximum degree of the instance.
    pub delta: usize,
    pub sampled_pairs: usize,
    pub min_distinguishers: usize,
    /// `3n / log₂ n`
    pub threshold: f64,
    /// Fraction of sampled pairs with at most `threshold` distinguishers.
    pub fraction_below: f64,
    /// `|D(v, w)|` for every sampled pair, in sampling order.
    #[serde(skip)]
    pub distinguisher_counts: Vec<usize>,
}

/// Samples non-adjacent pairs and reports how many vertices distinguish them.
///
/// When the graph has at most `pair_budget` non-adjacent pairs all of them
/// are measured. Otherwise `pair_budget` distinct pairs are drawn uniformly
/// by rejection.
pub fn structural_probe(
    g: &Graph,
    pair_budget: usize,
    rng: &mut SplitMix64,
) -> Result<StructuralReport, AnalysisError> {
    if pair_budget == 0 {
        return Err(AnalysisError::ContractViolation(
            "pair budget must be at least 1".into(),
        ));
    }
    let n = g.vertex_count();
    let non_adjacent = n * (n - 1) / 2 - g.edge_count();
    if non_adjacent == 0 {
        return Err(AnalysisError::NoNonAdjacentPairs);
    }
    let pairs: Vec<Pair> = if non_adjacent <= pair_budget {
        (0..n)
            .tuple_combinations()
            .filter(|&(a, b)| !g.has_edge(a, b))
            .filter_map(|(a, b)| Pair::new(a, b))
            .collect()
    } else {
        let mut chosen = HashSet::with_capacity(pair_budget);
        let mut order = Vec::with_capacity(pair_budget);
        while order.len() < pair_budget {
            let a = rng.index(n);
            let b = rng.index(n);
            if let Some(p) = Pair::new(a, b) {
                if !g.has_edge(a, b) && chosen.insert(p) {
                    order.push(p);
                }
            }
        }
        order
    };

    let counts: Vec<usize> = pairs
        .par_iter()
        .map(|p| {
            let da = g.bfs_distances(p.lo());
            let db = g.bfs_distances(p.hi());
            count_distinguishers(da.as_slice(), db.as_slice())
        })
        .collect();
    let threshold = 3.0 * n as f64 / (n as f64).log2();
    let below = counts.iter().filter(|&&c| c as f64 <= threshold).count();
    Ok(StructuralReport {
        n,
        delta: g.max_degree(),
        sampled_pairs: counts.len(),
        min_distinguishers: counts.iter().copied().min().unwrap_or(0),
        threshold,
        fraction_below: below as f64 / counts.len() as f64,
        distinguisher_counts: counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, complete_binary_tree, path, ring};

    #[test]
    fn distinguisher_examples_on_c6() {
        let c6 = ring(6).unwrap();
        assert_eq!(distinguishers(&c6, 0, 3).unwrap(), vec![0, 3]);
        assert_eq!(distinguishers(&c6, 0, 2).unwrap(), vec![0, 2, 3, 5]);
        for (a, b) in c6.edges() {
            assert!(distinguishers(&c6, a, b).unwrap().is_empty());
        }
        assert!(distinguishers(&c6, 1, 1).is_err());
    }

    #[test]
    fn bad_pairs_examples() {
        assert!(bad_pairs(&ring(6).unwrap(), 36).is_empty());
        assert!(bad_pairs(&complete(3), 1).is_empty());
        let big = ring(512).unwrap();
        assert!(bad_pairs(&big, 81).is_empty());
    }

    #[test]
    fn bad_neighborhood_matches_bad_pairs() {
        let g = complete_binary_tree(4);
        for s in [2, 5, 31] {
            let b = bad_pairs(&g, s);
            for a in 0..g.vertex_count() {
                for x in bad_neighborhood(&g, a, s) {
                    assert!(b.contains_vertices(a, x));
                }
            }
            let total: usize = (0..g.vertex_count()).map(|a| bad_neighborhood(&g, a, s).len()).sum();
            assert_eq!(total, 2 * b.len());
        }
        assert!(bad_neighborhood(&complete(3), 0, 1).is_empty());
    }

    #[test]
    fn bad_neighborhood_of_tree_root_within_bound() {
        let g = complete_binary_tree(6);
        let n = g.vertex_count() as f64;
        let s = crate::reconstruct::compute_s(crate::reconstruct::SPolicy::TwoThirds, 127).unwrap();
        let bound = 9.0 * 27.0 * n * n * n.log2().powi(2) / (s * s) as f64;
        assert!((bad_neighborhood(&g, 0, s).len() as f64) <= bound);
    }

    #[test]
    fn resolving_set_examples() {
        let c6 = ring(6).unwrap();
        assert!(is_resolving_set(&c6, &[0, 1]));
        assert!(!is_resolving_set(&c6, &[0]));
        assert!(is_resolving_set(&c6, &(0..6).collect::<Vec<_>>()));
        assert!(!is_resolving_set(&c6, &[]));
        assert!(is_resolving_set(&complete(1), &[]));
    }

    #[test]
    fn metric_dimension_examples() {
        assert_eq!(metric_dimension_exact(&path(4), 16), Ok(1));
        assert_eq!(metric_dimension_exact(&ring(6).unwrap(), 16), Ok(2));
        assert_eq!(metric_dimension_exact(&complete(4), 16), Ok(3));
        for n in 3..=5 {
            assert_eq!(metric_dimension_exact(&complete(n), 16), Ok(n - 1));
        }
        assert_eq!(
            metric_dimension_exact(&ring(17).unwrap(), 100),
            Err(AnalysisError::TooLarge { n: 17, cap: 16 })
        );
        assert_eq!(
            metric_dimension_exact(&ring(6).unwrap(), 5),
            Err(AnalysisError::TooLarge { n: 6, cap: 5 })
        );
    }

    #[test]
    fn single_sample_never_resolves_c6() {
        let c6 = ring(6).unwrap();
        let mut rng = SplitMix64::new(0);
        for _ in 0..50 {
            assert!(!resolving_sample_trial(&c6, 1, &mut rng));
        }
    }

    #[test]
    fn structural_probe_examples() {
        let mut rng = SplitMix64::new(1);
        assert_eq!(
            structural_probe(&complete(3), 10, &mut rng),
            Err(AnalysisError::NoNonAdjacentPairs)
        );
        let report = structural_probe(&ring(6).unwrap(), 100, &mut rng).unwrap();
        assert_eq!(report.sampled_pairs, 9);
        assert_eq!(report.min_distinguishers, 2);
        assert_eq!(report.fraction_below, 1.0);
        assert!((report.threshold - 18.0 / 6f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn structural_probe_respects_budget() {
        let g = ring(40).unwrap();
        let report = structural_probe(&g, 25, &mut SplitMix64::new(3)).unwrap();
        assert_eq!(report.sampled_pairs, 25);
        assert_eq!(report.distinguisher_counts.len(), 25);
        assert!(report.min_distinguishers >= 2);
    }
}
