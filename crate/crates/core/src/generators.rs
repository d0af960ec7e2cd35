//! Graph families: random regular graphs via the configuration model, rings,
//! complete binary trees, and edge-list files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{Connectivity, Graph, GraphError, Multigraph, Vertex};
use crate::rng::SplitMix64;

pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("degree sum {n} * {delta} is odd")]
    OddDegreeSum { n: usize, delta: usize },
    #[error("degree {delta} must be below n = {n}")]
    DegreeTooLarge { n: usize, delta: usize },
    #[error("degree {delta} is below the minimum {min}")]
    DegreeTooSmall { delta: usize, min: usize },
    #[error("no simple connected sample after {0} attempts")]
    AttemptsExhausted(usize),
    #[error("ring needs at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error("{0} is not 2^(d+1) - 1 for any tree depth d")]
    NotTreeSize(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Graph family with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    RandomRegular { delta: usize },
    Ring,
    /// Vertex count must be `2^(depth+1) - 1`.
    BinaryTree,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::RandomRegular { .. } => "random-regular",
            Family::Ring => "ring",
            Family::BinaryTree => "binary-tree",
            Family::File(_) => "file",
        }
    }
}

impl GenSpec {
    /// Builds the instance. Random choices are drawn from `rng`; `seed` is
    /// carried for bookkeeping.
    pub fn generate(&self, rng: &mut SplitMix64) -> Result<Graph, GenError> {
        match &self.family {
            Family::RandomRegular { delta } => {
                random_regular(self.n, *delta, rng, DEFAULT_MAX_ATTEMPTS)
            }
            Family::Ring => ring(self.n),
            Family::BinaryTree => {
                let depth = tree_depth_for(self.n).ok_or(GenError::NotTreeSize(self.n))?;
                Ok(complete_binary_tree(depth))
            }
            Family::File(path) => load_edge_list(path),
        }
    }
}

pub fn tree_depth_for(n: usize) -> Option<u32> {
    let m = n.checked_add(1)?;
    (m.is_power_of_two() && m >= 2).then(|| m.trailing_zeros() - 1)
}

/// Fenwick tree over 0/1 flags with order-statistic lookup.
struct Fenwick {
    tree: Vec<usize>,
}

impl Fenwick {
    fn all_ones(len: usize) -> Self {
        let mut tree = vec![0; len + 1];
        for i in 1..=len {
            tree[i] += 1;
            let j = i + (i & i.wrapping_neg());
            if j <= len {
                tree[j] += tree[i];
            }
        }
        Fenwick { tree }
    }

    fn clear(&mut self, pos: usize) {
        let mut i = pos + 1;
        while i < self.tree.len() {
            self.tree[i] -= 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Position of the `k`-th set flag, 0-based.
    fn select(&self, mut k: usize) -> usize {
        let len = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = len.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= len && self.tree[next] <= k {
                pos = next;
                k -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

/// Uniform random configuration: a perfect matching of the `Δn` points,
/// point `p` belonging to vertex `p / Δ`.
///
/// Pairs are formed one at a time. The lowest unmatched point is paired with
/// the `r`-th of the other unmatched points in ascending order, where
/// `r = rng.below(remaining - 1)`.
pub fn configuration_multigraph(
    n: usize,
    delta: usize,
    rng: &mut SplitMix64,
) -> Result<Multigraph, GenError> {
    if delta == 0 {
        return Err(GenError::DegreeTooSmall { delta, min: 1 });
    }
    let points = n * delta;
    if !points.is_multiple_of(2) {
        return Err(GenError::OddDegreeSum { n, delta });
    }
    let mut unmatched = Fenwick::all_ones(points);
    let mut matched = vec![false; points];
    let mut pairings = Vec::with_capacity(points / 2);
    let mut first = 0;
    let mut remaining = points;
    while remaining > 0 {
        while matched[first] {
            first += 1;
        }
        matched[first] = true;
        unmatched.clear(first);
        let r = rng.index(remaining - 1);
        let partner = unmatched.select(r);
        matched[partner] = true;
        unmatched.clear(partner);
        remaining -= 2;
        pairings.push((first / delta, partner / delta));
    }
    Ok(Multigraph::new(n, pairings))
}

/// Uniform random simple connected `Δ`-regular graph, by rejection sampling
/// over [`configuration_multigraph`].
pub fn random_regular(
    n: usize,
    delta: usize,
    rng: &mut SplitMix64,
    max_attempts: usize,
) -> Result<Graph, GenError> {
    if delta < 2 {
        return Err(GenError::DegreeTooSmall { delta, min: 2 });
    }
    if !(n * delta).is_multiple_of(2) {
        return Err(GenError::OddDegreeSum { n, delta });
    }
    if delta >= n {
        return Err(GenError::DegreeTooLarge { n, delta });
    }
    for _ in 0..max_attempts {
        let multi = configuration_multigraph(n, delta, rng)?;
        if multi.is_simple() && multi.is_connected() {
            return Ok(multi.to_graph(Connectivity::Required)?);
        }
    }
    Err(GenError::AttemptsExhausted(max_attempts))
}

pub fn ring(n: usize) -> Result<Graph, GenError> {
    if n < 3 {
        return Err(GenError::TooSmall(n));
    }
    Ok(Graph::from_edges(
        n,
        (0..n).map(|i| (i, (i + 1) % n)),
        Connectivity::Required,
    )?)
}

/// Level-order complete binary tree: root 0, children of `i` are `2i+1`, `2i+2`.
pub fn complete_binary_tree(depth: u32) -> Graph {
    let n = (1usize << (depth + 1)) - 1;
    Graph::from_edges(n, (1..n).map(|v| ((v - 1) / 2, v)), Connectivity::Required)
        .expect("a complete binary tree is a valid connected graph")
}

/// Star with `leaves` leaves around vertex 0.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)), Connectivity::Required)
        .expect("a star is a valid connected graph")
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v)), Connectivity::Required)
        .expect("a path is a valid connected graph")
}

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges, Connectivity::Required).expect("complete graphs are valid")
}

/// Parses the `n m` / `u v` edge-list format. Lines starting with `#` and
/// blank lines are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph, GenError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or(GenError::Parse {
        line: 0,
        message: "missing header".into(),
    })?;
    let (n, m) = parse_two(line, header)?;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::with_capacity(m);
    for (line, body) in lines {
        if edges.len() == m {
            return Err(GenError::Parse {
                line,
                message: format!("more than the {m} edges announced in the header"),
            });
        }
        edges.push(parse_two(line, body)?);
    }
    if edges.len() != m {
        return Err(GenError::Parse {
            line: 0,
            message: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Ok(Graph::from_edges(n, edges, Connectivity::Required)?)
}

fn parse_two(line: usize, text: &str) -> Result<(usize, usize), GenError> {
    let bad = |message: String| GenError::Parse { line, message };
    let mut fields = text.split_whitespace();
    let mut next = || -> Result<usize, GenError> {
        let field = fields
            .next()
            .ok_or_else(|| bad(format!("expected two integers in {text:?}")))?;
        field
            .parse()
            .map_err(|e| bad(format!("{field:?}: {e}")))
    };
    let pair = (next()?, next()?);
    if let Some(extra) = fields.next() {
        return Err(bad(format!("unexpected field {extra:?}")));
    }
    Ok(pair)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph, GenError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| GenError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_edge_list(&text)
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<(), GenError> {
    let path = path.as_ref();
    fs::write(path, format_edge_list(g)).map_err(|source| GenError::Io {
        path: path.to_path_buf(),
        source,
    })
}
