//! Parameter sweeps over generated instances, with one CSV row per trial.
//!
//! Trial `i` runs with seed `base_seed ^ ((i + 1) * 0x9E3779B97F4A7C15)`
//! (wrapping). The instance is generated from a [`SplitMix64`] seeded with
//! that value and the same generator then drives the algorithm, so a row is a
//! pure function of the configuration and its trial index. Trials run in
//! parallel and are merged in `(n, trial)` order.

use std::io::{self, Write};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{Family, GenSpec};
use crate::graph::Graph;
use crate::oracle::{OracleSession, QueryKind, SessionOptions};
use crate::reconstruct::{
    reconstruct_all_distances, reconstruct_betweenness, simple, simple_modified, ModifiedOptions,
    ReconstructionResult, SPolicy, SimpleOptions, DEFAULT_MAX_ITERS,
};
use crate::rng::{SplitMix64, GOLDEN_GAMMA};

/// First line of every experiment CSV.
pub const CSV_SCHEMA_LINE: &str = "# distrecon-experiment v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Distance,
    AllDistances,
    Betweenness,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Distance => "distance",
            Model::AllDistances => "all-distances",
            Model::Betweenness => "betweenness",
        }
    }

    fn query_kind(&self) -> QueryKind {
        match self {
            Model::Distance => QueryKind::Distance,
            Model::AllDistances => QueryKind::AllDistances,
            Model::Betweenness => QueryKind::Betweenness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Simple,
    SimpleModified,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Simple => "simple",
            Algorithm::SimpleModified => "simple-modified",
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Vertex counts. Ignored for [`Family::File`].
    pub n_list: Vec<usize>,
    /// Sample-size rule for the simple algorithm. The modified algorithm
    /// always uses `⌈(log₂ n)²⌉`.
    pub s_policy: SPolicy,
    pub model: Model,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub base_seed: u64,
    /// Count stage-1 self pairs as queries.
    pub strict_count: bool,
    pub dedup: bool,
    pub max_iters: usize,
}

impl ExperimentConfig {
    pub fn new(family: Family, n_list: Vec<usize>, algorithm: Algorithm, model: Model) -> Self {
        ExperimentConfig {
            family,
            n_list,
            s_policy: SPolicy::Log2Squared,
            model,
            algorithm,
            trials: 1,
            base_seed: 0,
            strict_count: false,
            dedup: false,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidConfig(m.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.n_list.is_empty() && !matches!(self.family, Family::File(_)) {
            return bad("n list is empty");
        }
        if self.algorithm == Algorithm::Simple && self.model != Model::Distance {
            return bad("the simple algorithm requires the distance model");
        }
        if self.strict_count && self.model != Model::Distance {
            return bad("strict counting applies to the distance model only");
        }
        if self.max_iters == 0 {
            return bad("max iterations must be at least 1");
        }
        self.s_policy
            .validate()
            .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))
    }

    fn sizes(&self) -> Vec<usize> {
        match self.family {
            // One placeholder size; the file decides n.
            Family::File(_) => vec![0],
            _ => self.n_list.clone(),
        }
    }
}

pub fn trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    base_seed ^ (trial_index.wrapping_add(1)).wrapping_mul(GOLDEN_GAMMA)
}

/// One CSV row. Columns appear in field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub family: String,
    pub n: usize,
    pub delta: usize,
    pub s: usize,
    pub policy: String,
    pub model: Model,
    pub algorithm: Algorithm,
    pub trial: u64,
    pub seed: u64,
    pub queries_stage1: u64,
    pub queries_stage2: u64,
    pub queries_total: u64,
    pub all_distances_queries: u64,
    pub betweenness_queries: u64,
    pub candidate_count: usize,
    pub excess: usize,
    pub iterations: usize,
    pub rounds: usize,
    pub correct: bool,
    pub wall_ms: f64,
    pub error: String,
}

struct TrialOutcome {
    graph: Arc<Graph>,
    delta: usize,
    result: ReconstructionResult,
}

fn run_trial(
    config: &ExperimentConfig,
    n: usize,
    rng: &mut SplitMix64,
    seed: u64,
) -> Result<TrialOutcome, String> {
    let spec = GenSpec {
        family: config.family.clone(),
        n,
        seed,
    };
    let graph = Arc::new(spec.generate(rng).map_err(|e| e.to_string())?);
    let delta = match config.family {
        Family::RandomRegular { delta } => delta,
        _ => graph.regular_degree().unwrap_or_else(|| graph.max_degree()),
    };

    let options = SessionOptions {
        dedup: config.dedup,
        count_self_queries: config.strict_count,
    };
    let mut session =
        OracleSession::with_options(Arc::clone(&graph), options).map_err(|e| e.to_string())?;
    let needs_regular = config.algorithm == Algorithm::SimpleModified;
    if needs_regular && graph.regular_degree().is_none() {
        return Err("simple-modified needs a regular instance".into());
    }
    let result = match (config.algorithm, config.model) {
        (Algorithm::Simple, _) => simple(
            &mut session,
            config.s_policy,
            rng,
            SimpleOptions {
                strict_count: config.strict_count,
            },
        ),
        (Algorithm::SimpleModified, Model::Distance) => simple_modified(
            &mut session,
            delta,
            rng,
            ModifiedOptions {
                max_iters: config.max_iters,
                strict_count: config.strict_count,
            },
        ),
        (Algorithm::SimpleModified, Model::AllDistances) => {
            reconstruct_all_distances(&mut session, delta, rng, config.max_iters)
        }
        (Algorithm::SimpleModified, Model::Betweenness) => {
            reconstruct_betweenness(&mut session, delta, rng, config.max_iters)
        }
    }
    .map_err(|e| e.to_string())?;
    Ok(TrialOutcome {
        graph,
        delta,
        result,
    })
}

fn record_for(config: &ExperimentConfig, n: usize, trial: u64) -> ExperimentRecord {
    let seed = trial_seed(config.base_seed, trial);
    let mut rng = SplitMix64::new(seed);
    let start = Instant::now();
    let outcome = run_trial(config, n, &mut rng, seed);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut record = ExperimentRecord {
        family: config.family.name().to_string(),
        n,
        delta: match config.family {
            Family::RandomRegular { delta } => delta,
            _ => 0,
        },
        s: 0,
        policy: match config.algorithm {
            Algorithm::Simple => config.s_policy.to_string(),
            Algorithm::SimpleModified => SPolicy::Log2Squared.to_string(),
        },
        model: config.model,
        algorithm: config.algorithm,
        trial,
        seed,
        queries_stage1: 0,
        queries_stage2: 0,
        queries_total: 0,
        all_distances_queries: 0,
        betweenness_queries: 0,
        candidate_count: 0,
        excess: 0,
        iterations: 0,
        rounds: 0,
        correct: false,
        wall_ms,
        error: String::new(),
    };
    match outcome {
        Ok(TrialOutcome {
            graph,
            delta,
            result,
        }) => {
            let truth = graph.edge_set();
            record.n = graph.vertex_count();
            record.delta = delta;
            record.s = result.s_used;
            record.queries_stage1 = result.stage1_queries;
            record.queries_stage2 = result.stage2_queries;
            record.queries_total = result.ledger.count(config.model.query_kind());
            record.all_distances_queries = result.ledger.all_distances;
            record.betweenness_queries = result.ledger.betweenness;
            record.candidate_count = result.candidate_count;
            // Every edge is a candidate, so |Ê \ E| = |Ê| - |E|.
            record.excess = result.candidate_count.saturating_sub(truth.len());
            record.iterations = result.iterations;
            record.rounds = result.ledger.round_count();
            record.correct = result.edges == truth;
        }
        Err(message) => record.error = message,
    }
    record
}

/// Runs every `(n, trial)` combination. Generator and algorithm failures
/// become rows with a non-empty `error` column.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    config.validate()?;
    let jobs: Vec<(usize, u64)> = config
        .sizes()
        .into_iter()
        .flat_map(|n| (0..config.trials as u64).map(move |t| (n, t)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(n, t)| record_for(config, n, t))
        .collect())
}

/// Writes the schema line, the header and one row per record.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], mut out: W) -> Result<(), ExperimentError> {
    writeln!(out, "{CSV_SCHEMA_LINE}")?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_COLUMNS)?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    Ok(reader.deserialize().collect::<Result<_, _>>()?)
}

pub const CSV_COLUMNS: [&str; 21] = [
    "family",
    "n",
    "delta",
    "s",
    "policy",
    "model",
    "algorithm",
    "trial",
    "seed",
    "queries_stage1",
    "queries_stage2",
    "queries_total",
    "all_distances_queries",
    "betweenness_queries",
    "candidate_count",
    "excess",
    "iterations",
    "rounds",
    "correct",
    "wall_ms",
    "error",
];
