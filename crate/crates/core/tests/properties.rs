mod common;

use std::collections::HashMap;

use distrecon::analysis::{bad_neighborhood, bad_pairs, distinguishers, is_resolving_set};
use distrecon::generators::{
    complete_binary_tree, configuration_multigraph, random_regular, ring, DEFAULT_MAX_ATTEMPTS,
};
use distrecon::oracle::{
    betweenness_all_distances, AllDistancesOracle, BetweennessOracle, DistanceOracle, Oracle,
    OracleError,
};
use distrecon::reconstruct::{
    candidate_set, reconstruct_all_distances, reconstruct_betweenness, simple, simple_modified,
    ModifiedOptions, SPolicy, SimpleOptions, DEFAULT_MAX_ITERS,
};
use distrecon::{Distance, DistanceVector, Graph, OracleSession, Pair, PairSet, QueryLedger, SessionOptions, SplitMix64, Vertex};
use proptest::prelude::*;

use common::{chi_square, configuration_distribution, floyd_warshall, multigraph_key};

/// Graphs of the three families, chosen by a proptest-driven selector.
fn family_graph(kind: u8, size: usize, seed: u64) -> Graph {
    match kind % 3 {
        0 => ring(3 + size % 40).unwrap(),
        1 => complete_binary_tree((size % 6) as u32),
        _ => {
            let delta = 2 + size % 3;
            let n = 8 + 2 * (size % 20);
            random_regular(n, delta, &mut SplitMix64::new(seed), DEFAULT_MAX_ATTEMPTS).unwrap()
        }
    }
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (any::<u8>(), 0usize..200, any::<u64>()).prop_map(|(k, s, seed)| family_graph(k, s, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distances_are_lipschitz_along_edges(g in graph_strategy()) {
        for u in 0..g.vertex_count() {
            let d = g.bfs_distances(u);
            prop_assert_eq!(d[u], 0);
            for (a, b) in g.edges() {
                prop_assert!(d[a].abs_diff(d[b]) <= 1);
            }
        }
    }

    #[test]
    fn bfs_matches_floyd_warshall_and_triangle_inequality(g in graph_strategy()) {
        let fw = floyd_warshall(&g);
        let n = g.vertex_count();
        let rows: Vec<_> = (0..n).map(|u| g.bfs_distances(u)).collect();
        for u in 0..n {
            prop_assert_eq!(rows[u].as_slice(), fw[u].as_slice());
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    prop_assert!(rows[u][w] <= rows[u][v] + rows[v][w]);
                }
            }
        }
    }

    #[test]
    fn pair_sets_are_canonical(raw in proptest::collection::vec((0usize..30, 0usize..30), 0..80)) {
        let set: PairSet = raw.iter().filter_map(|&(a, b)| Pair::new(a, b)).collect();
        let slice = set.as_slice();
        prop_assert!(slice.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(slice.iter().all(|p| p.lo() < p.hi()));
        for &(a, b) in &raw {
            prop_assert_eq!(set.contains_vertices(a, b), a != b);
        }
    }

    #[test]
    fn simple_is_exact_for_any_s(g in graph_strategy(), s_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let n = g.vertex_count();
        let s = 1 + (s_frac * n as f64) as usize % n;
        let mut session = OracleSession::new(g.clone()).unwrap();
        let r = simple(&mut session, SPolicy::Fixed(s), &mut SplitMix64::new(seed), SimpleOptions::default()).unwrap();
        prop_assert_eq!(&r.edges, &g.edge_set());
        let identity = (n * s - s + r.candidate_count) as u64;
        prop_assert_eq!(r.ledger.distance, identity);
        prop_assert_eq!(r.self_skips, s as u64);
        prop_assert_eq!(r.ledger.rounds.len(), 2);
    }

    #[test]
    fn adding_a_sample_never_grows_candidates(g in graph_strategy(), picks in proptest::collection::vec(any::<usize>(), 1..6)) {
        let n = g.vertex_count();
        let rows: Vec<Vec<Distance>> = picks.iter().map(|&p| g.bfs_distances(p % n).into_vec()).collect();
        let mut previous = candidate_set(&rows[..0], n);
        for k in 1..=rows.len() {
            let current = candidate_set(&rows[..k], n);
            prop_assert!(current.is_subset(&previous));
            prop_assert!(g.edge_set().is_subset(&current));
            previous = current;
        }
    }

    #[test]
    fn resolving_sets_are_closed_upwards(g in graph_strategy(), base in proptest::collection::vec(any::<usize>(), 0..6), extra in any::<usize>()) {
        let n = g.vertex_count();
        let subset: Vec<Vertex> = base.iter().map(|b| b % n).collect();
        if is_resolving_set(&g, &subset) {
            let mut bigger = subset.clone();
            bigger.push(extra % n);
            prop_assert!(is_resolving_set(&g, &bigger));
        }
    }
}

/// Wraps a session and counts every call independently of its ledger.
/// Records, per round, which queries were issued.
struct Intercept {
    inner: OracleSession,
    calls: u64,
    round_of_call: Vec<usize>,
    current_round: usize,
    distance_calls: Vec<(Vertex, Vertex, Distance)>,
}

impl Intercept {
    fn new(inner: OracleSession) -> Self {
        Intercept {
            inner,
            calls: 0,
            round_of_call: Vec::new(),
            current_round: 0,
            distance_calls: Vec::new(),
        }
    }

    fn note(&mut self) {
        self.calls += 1;
        self.round_of_call.push(self.current_round);
    }
}

impl Oracle for Intercept {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn begin_round(&mut self) -> usize {
        self.current_round = self.inner.begin_round();
        self.current_round
    }

    fn ledger(&self) -> QueryLedger {
        self.inner.ledger()
    }
}

impl DistanceOracle for Intercept {
    fn distance(&mut self, a: Vertex, b: Vertex) -> Result<Distance, OracleError> {
        self.note();
        let d = self.inner.distance(a, b)?;
        self.distance_calls.push((a, b, d));
        Ok(d)
    }
}

impl AllDistancesOracle for Intercept {
    fn all_distances(&mut self, u: Vertex) -> Result<DistanceVector, OracleError> {
        self.note();
        self.inner.all_distances(u)
    }
}

impl BetweennessOracle for Intercept {
    fn betweenness(&mut self, u: Vertex, v: Vertex, w: Vertex) -> Result<bool, OracleError> {
        self.note();
        self.inner.betweenness(u, v, w)
    }
}

fn ledger_round_sum(l: &QueryLedger) -> u64 {
    l.rounds.iter().sum()
}

#[test]
fn ledger_totals_equal_intercepted_calls() {
    for seed in 0..4 {
        let g = random_regular(48, 3, &mut SplitMix64::new(seed), DEFAULT_MAX_ATTEMPTS).unwrap();

        let mut spy = Intercept::new(OracleSession::new(g.clone()).unwrap());
        simple(&mut spy, SPolicy::Log2Squared, &mut SplitMix64::new(seed), SimpleOptions::default()).unwrap();
        let l = spy.ledger();
        assert_eq!(l.distance, spy.calls);
        assert_eq!(ledger_round_sum(&l), spy.calls);

        let mut spy = Intercept::new(OracleSession::new(g.clone()).unwrap());
        let r = simple_modified(&mut spy, 3, &mut SplitMix64::new(seed), ModifiedOptions::default()).unwrap();
        assert_eq!(spy.ledger().distance, spy.calls);
        assert_eq!(r.ledger.round_count(), r.iterations);

        let mut spy = Intercept::new(OracleSession::new(g.clone()).unwrap());
        reconstruct_all_distances(&mut spy, 3, &mut SplitMix64::new(seed), DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(spy.ledger().all_distances, spy.calls);

        let small = ring(10).unwrap();
        let mut spy = Intercept::new(OracleSession::new(small).unwrap());
        reconstruct_betweenness(&mut spy, 2, &mut SplitMix64::new(seed), DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(spy.ledger().betweenness, spy.calls);
        assert_eq!(ledger_round_sum(&spy.ledger()), spy.calls);
    }
}

#[test]
fn simple_round_two_depends_only_on_round_one() {
    let g = random_regular(60, 3, &mut SplitMix64::new(77), DEFAULT_MAX_ATTEMPTS).unwrap();
    let n = g.vertex_count();
    let mut spy = Intercept::new(OracleSession::new(g.clone()).unwrap());
    let r = simple(&mut spy, SPolicy::Fixed(5), &mut SplitMix64::new(1), SimpleOptions::default()).unwrap();

    let split = spy.round_of_call.iter().position(|&round| round == 1).unwrap();
    assert!(spy.round_of_call[..split].iter().all(|&r| r == 0));
    assert!(spy.round_of_call[split..].iter().all(|&r| r == 1));

    // Rebuild the round-1 rows from the intercepted answers alone.
    let mut rows: HashMap<Vertex, Vec<Distance>> = HashMap::new();
    for &(u, v, d) in &spy.distance_calls[..split] {
        rows.entry(u).or_insert_with(|| vec![0; n])[v] = d;
    }
    let rows: Vec<Vec<Distance>> = rows.into_values().collect();
    let expected = candidate_set(&rows, n);
    let asked: PairSet = spy.distance_calls[split..]
        .iter()
        .filter_map(|&(a, b, _)| Pair::new(a, b))
        .collect();
    assert_eq!(asked, expected);
    assert_eq!(r.candidate_count, expected.len());
    assert_eq!(spy.distance_calls.len() - split, expected.len());
}

#[test]
fn surviving_non_edges_have_no_sampled_distinguisher() {
    for seed in 0..6 {
        let g = random_regular(40, 3, &mut SplitMix64::new(seed), DEFAULT_MAX_ATTEMPTS).unwrap();
        let mut session = OracleSession::new(g.clone()).unwrap();
        let r = simple(&mut session, SPolicy::Fixed(3), &mut SplitMix64::new(seed + 100), SimpleOptions::default()).unwrap();
        let support = r.samples[0].support();
        let rows: Vec<_> = support.iter().map(|&u| g.bfs_distances(u).into_vec()).collect();
        let candidates = candidate_set(&rows, g.vertex_count());
        assert_eq!(candidates.len(), r.candidate_count);
        for p in candidates.difference(&g.edge_set()).iter() {
            let d = distinguishers(&g, p.lo(), p.hi()).unwrap();
            assert!(d.iter().all(|u| !support.contains(u)), "{p} distinguished");
        }
    }
}

#[test]
fn bad_pair_sets_are_symmetric() {
    let graphs = [
        ring(20).unwrap(),
        complete_binary_tree(4),
        random_regular(30, 3, &mut SplitMix64::new(5), DEFAULT_MAX_ATTEMPTS).unwrap(),
    ];
    for g in &graphs {
        for s in [1, 4, 16] {
            let bad = bad_pairs(g, s);
            let hoods: Vec<Vec<Vertex>> = (0..g.vertex_count()).map(|a| bad_neighborhood(g, a, s)).collect();
            for a in 0..g.vertex_count() {
                for b in 0..g.vertex_count() {
                    let in_set = bad.contains_vertices(a, b);
                    assert_eq!(in_set, hoods[a].contains(&b));
                    assert_eq!(in_set, hoods[b].contains(&a));
                }
            }
        }
    }
}

#[test]
fn oracles_agree_with_floyd_warshall() {
    for g in [ring(9).unwrap(), complete_binary_tree(3), random_regular(16, 3, &mut SplitMix64::new(2), DEFAULT_MAX_ATTEMPTS).unwrap()] {
        let fw = floyd_warshall(&g);
        let n = g.vertex_count();
        let mut s = OracleSession::new(g.clone()).unwrap();
        for u in 0..n {
            assert_eq!(s.all_distances(u).unwrap().as_slice(), fw[u].as_slice());
            for v in (0..n).filter(|&v| v != u) {
                assert_eq!(s.distance(u, v).unwrap(), fw[u][v]);
                for w in 0..n {
                    assert_eq!(s.betweenness(u, v, w).unwrap(), fw[u][w] + fw[w][v] == fw[u][v]);
                }
            }
            let before = s.ledger().betweenness;
            assert_eq!(betweenness_all_distances(&mut s, u).unwrap().as_slice(), fw[u].as_slice());
            assert_eq!(s.ledger().betweenness - before, ((n - 1) * (n - 2)) as u64);
        }
    }
}

#[test]
fn strict_session_counts_n_times_s_plus_candidates() {
    for seed in 0..5 {
        let g = random_regular(64, 4, &mut SplitMix64::new(seed), DEFAULT_MAX_ATTEMPTS).unwrap();
        let opts = SessionOptions { count_self_queries: true, dedup: false };
        let mut session = OracleSession::with_options(g, opts).unwrap();
        let r = simple(&mut session, SPolicy::Log2Squared, &mut SplitMix64::new(seed), SimpleOptions { strict_count: true }).unwrap();
        assert_eq!(r.ledger.distance, (64 * r.s_used + r.candidate_count) as u64);
        assert_eq!(r.accounted_queries(), r.ledger.distance);
    }
}

fn empirical_matches_enumeration(n: usize, delta: usize, samples: usize, seed: u64) {
    let dist = configuration_distribution(n, delta);
    let keys: Vec<_> = dist.keys().cloned().collect();
    let probs: Vec<f64> = keys.iter().map(|k| dist[k]).collect();
    let mut counts = vec![0u64; keys.len()];
    let mut rng = SplitMix64::new(seed);
    for _ in 0..samples {
        let m = configuration_multigraph(n, delta, &mut rng).unwrap();
        let key = multigraph_key(m.pairings().iter().copied());
        let idx = keys.iter().position(|k| *k == key).expect("outcome is a valid matching");
        counts[idx] += 1;
    }
    let (stat, p) = chi_square(&counts, &probs);
    assert!(p > 0.01, "n={n} delta={delta}: chi2={stat} p={p} counts={counts:?}");
}

#[test]
fn configuration_model_on_four_points_is_uniform() {
    // n=4, Δ=1: three matchings of four vertices, each 1/3.
    let dist = configuration_distribution(4, 1);
    assert_eq!(dist.len(), 3);
    assert!(dist.values().all(|&p| (p - 1.0 / 3.0).abs() < 1e-12));
    empirical_matches_enumeration(4, 1, 3000, 31);

    // n=2, Δ=2: double edge with probability 2/3, two loops with 1/3.
    let dist = configuration_distribution(2, 2);
    assert_eq!(dist.len(), 2);
    assert!((dist[&vec![(0, 1), (0, 1)]] - 2.0 / 3.0).abs() < 1e-12);
    assert!((dist[&vec![(0, 0), (1, 1)]] - 1.0 / 3.0).abs() < 1e-12);
    empirical_matches_enumeration(2, 2, 3000, 32);
}

#[test]
fn configuration_model_on_larger_point_sets() {
    // 4 vertices of degree 3: 11!! = 10395 matchings.
    empirical_matches_enumeration(4, 3, 20000, 33);
}

#[test]
fn random_regular_outputs_are_valid() {
    let mut rng = SplitMix64::new(4);
    for &(n, delta) in &[(8, 2), (10, 3), (12, 4), (50, 3), (101, 4), (30, 5)] {
        for _ in 0..10 {
            let g = random_regular(n, delta, &mut rng, DEFAULT_MAX_ATTEMPTS).unwrap();
            assert_eq!(g.vertex_count(), n);
            assert_eq!(g.regular_degree(), Some(delta));
            assert!(g.is_connected());
        }
    }
}

#[test]
fn acceptance_rate_for_cubic_graphs_near_e_to_minus_two() {
    let mut rng = SplitMix64::new(2);
    let trials = 2000;
    let accepted = (0..trials)
        .filter(|_| {
            let m = configuration_multigraph(1000, 3, &mut rng).unwrap();
            m.is_simple() && m.is_connected()
        })
        .count();
    let rate = accepted as f64 / trials as f64;
    let target = (-2.0f64).exp();
    assert!(rate > target / 2.0 && rate < target * 2.0, "rate {rate}");
}
