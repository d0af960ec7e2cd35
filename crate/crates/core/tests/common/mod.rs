//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use distrecon::Graph;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub const INF: u32 = u32::MAX / 4;

/// All-pairs hop distances by Floyd-Warshall over the adjacency matrix.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let mut d = vec![vec![INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (a, b) in g.edges() {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Pearson statistic and its upper-tail p-value.
pub fn chi_square(observed: &[u64], expected_prob: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected_prob.len());
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected_prob)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = (observed.len() - 1) as f64;
    let p_value = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
    (stat, p_value)
}

/// Every perfect matching of `points` points, each as a list of point pairs.
pub fn perfect_matchings(points: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, current: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(current.clone());
            return;
        }
        let first = free.remove(0);
        for i in 0..free.len() {
            let partner = free.remove(i);
            current.push((first, partner));
            rec(free, current, out);
            current.pop();
            free.insert(i, partner);
        }
        free.insert(0, first);
    }
    let mut out = Vec::new();
    rec(&mut (0..points).collect(), &mut Vec::new(), &mut out);
    out
}

/// Sorted multiset of vertex pairs, the key identifying a multigraph.
pub fn multigraph_key(pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize)> {
    let mut key: Vec<_> = pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    key.sort_unstable();
    key
}

/// Outcome probabilities of the configuration model, by enumerating every
/// matching of the `n * delta` points.
pub fn configuration_distribution(n: usize, delta: usize) -> HashMap<Vec<(usize, usize)>, f64> {
    let matchings = perfect_matchings(n * delta);
    let weight = 1.0 / matchings.len() as f64;
    let mut dist = HashMap::new();
    for m in matchings {
        let key = multigraph_key(m.into_iter().map(|(p, q)| (p / delta, q / delta)));
        *dist.entry(key).or_insert(0.0) += weight;
    }
    dist
}

/// All labeled 3-regular simple graphs on 6 vertices, as sorted edge lists.
pub fn labeled_cubic_graphs_on_six() -> Vec<Vec<(usize, usize)>> {
    let all: Vec<(usize, usize)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
    let mut graphs = Vec::new();
    for mask in 0u32..(1 << all.len()) {
        if mask.count_ones() != 9 {
            continue;
        }
        let edges: Vec<_> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let mut deg = [0; 6];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        if deg.iter().all(|&d| d == 3) {
            graphs.push(edges);
        }
    }
    graphs
}

pub fn has_triangle(edges: &[(usize, usize)]) -> bool {
    let adj = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    (0..6).any(|a| (a + 1..6).any(|b| (b + 1..6).any(|c| adj(a, b) && adj(b, c) && adj(a, c))))
}

/// Whether the distance columns of `subset` separate every vertex pair,
/// over a precomputed distance matrix.
pub fn resolves(dist: &[Vec<u32>], subset: &[usize]) -> bool {
    let n = dist.len();
    (0..n).all(|a| (a + 1..n).all(|b| subset.iter().any(|&u| dist[u][a] != dist[u][b])))
}

/// Metric dimension by bitmask enumeration.
pub fn brute_metric_dimension(dist: &[Vec<u32>]) -> usize {
    let n = dist.len();
    (0u32..(1 << n))
        .filter(|mask| {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            resolves(dist, &subset)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}
