use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use distrecon::analysis::{
    bad_pairs, metric_dimension_exact, resolving_sample_trial, structural_probe,
    METRIC_DIMENSION_MAX_N,
};
use distrecon::experiment::{run_experiment, write_csv, Algorithm, ExperimentConfig, Model};
use distrecon::generators::{
    complete_binary_tree, load_edge_list, random_regular, ring, save_edge_list, Family,
    DEFAULT_MAX_ATTEMPTS,
};
use distrecon::reconstruct::{
    compute_s, reconstruct_all_distances, reconstruct_betweenness, simple, simple_modified,
    ModifiedOptions, SPolicy, SimpleOptions, DEFAULT_MAX_ITERS,
};
use distrecon::{Graph, OracleSession, SessionOptions, SplitMix64};

#[derive(Parser)]
#[command(name = "distrecon", version, about = "Reconstruct hidden graphs from distance oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    RandomRegular,
    Ring,
    BinaryTree,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Simple,
    SimpleModified,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Distance,
    AllDistances,
    Betweenness,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Simple => Algorithm::Simple,
            AlgorithmArg::SimpleModified => Algorithm::SimpleModified,
        }
    }
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Distance => Model::Distance,
            ModelArg::AllDistances => Model::AllDistances,
            ModelArg::Betweenness => Model::Betweenness,
        }
    }
}

#[derive(clap::Args)]
struct PolicyArgs {
    /// Sample-size rule: log2sq, two-thirds, sqrt, loglog-eps, fixed.
    #[arg(long, default_value = "log2sq")]
    s_policy: String,
    /// Exponent slack for loglog-eps.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Sample size for the fixed policy.
    #[arg(long)]
    s: Option<usize>,
}

impl PolicyArgs {
    fn policy(&self) -> Result<SPolicy> {
        let text = match (self.s_policy.as_str(), self.epsilon, self.s) {
            ("loglog-eps", Some(e), _) => format!("loglog-eps:{e}"),
            ("loglog-eps", None, _) => bail!("--s-policy loglog-eps needs --epsilon"),
            ("fixed", _, Some(s)) => format!("fixed:{s}"),
            ("fixed", _, None) => bail!("--s-policy fixed needs --s"),
            (other, _, _) => other.to_string(),
        };
        Ok(text.parse()?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct one graph and print a summary.
    Reconstruct {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "simple")]
        algorithm: AlgorithmArg,
        #[arg(long, value_enum, default_value = "distance")]
        model: ModelArg,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Degree for simple-modified; defaults to the graph's common degree.
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        /// Count stage-1 self pairs as distance queries.
        #[arg(long)]
        strict_count: bool,
        /// Memoize oracle answers; repeated queries are free.
        #[arg(long)]
        dedup: bool,
        /// Write the reconstructed edge set here.
        #[arg(long)]
        out_edges: Option<PathBuf>,
    },
    /// Run a parameter sweep and write CSV.
    Experiment {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// Edge-list file instead of a generated family.
        #[arg(long, conflicts_with = "family")]
        graph: Option<PathBuf>,
        /// Comma-separated vertex counts.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        delta: Option<usize>,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, value_enum, default_value = "distance")]
        model: ModelArg,
        #[arg(long, value_enum, default_value = "simple")]
        algorithm: AlgorithmArg,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        #[arg(long)]
        strict_count: bool,
        #[arg(long)]
        dedup: bool,
        /// CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distinguisher statistics and bad-pair count for a graph, as CSV.
    Analyze {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        /// Sample size for the bad-pair threshold; ⌈(log₂ n)²⌉ when absent.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact metric dimension, or resolving-set trials for random samples.
    Metricdim {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Sample size; ⌈(log₂ n)²⌉ when absent.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn family_from(arg: FamilyArg, delta: Option<usize>) -> Result<Family> {
    Ok(match arg {
        FamilyArg::RandomRegular => Family::RandomRegular {
            delta: delta.context("--family random-regular needs --delta")?,
        },
        FamilyArg::Ring => Family::Ring,
        FamilyArg::BinaryTree => Family::BinaryTree,
    })
}

fn generate(
    family: FamilyArg,
    n: Option<usize>,
    delta: Option<usize>,
    depth: Option<u32>,
    seed: u64,
    max_attempts: usize,
) -> Result<Graph> {
    let mut rng = SplitMix64::new(seed);
    Ok(match family {
        FamilyArg::RandomRegular => random_regular(
            n.context("--n is required")?,
            delta.context("--delta is required")?,
            &mut rng,
            max_attempts,
        )?,
        FamilyArg::Ring => ring(n.context("--n is required")?)?,
        FamilyArg::BinaryTree => complete_binary_tree(depth.context("--depth is required")?),
    })
}

fn default_s(g: &Graph, s: Option<usize>) -> Result<usize> {
    match s {
        Some(0) => bail!("--s must be at least 1"),
        Some(s) => Ok(s),
        None => Ok(compute_s(SPolicy::Log2Squared, g.vertex_count())?),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            family,
            n,
            delta,
            depth,
            seed,
            max_attempts,
            out,
        } => {
            let g = generate(family, n, delta, depth, seed, max_attempts)?;
            save_edge_list(&g, &out)?;
            println!("wrote n={} m={} to {}", g.vertex_count(), g.edge_count(), out.display());
        }

        Command::Reconstruct {
            graph,
            algorithm,
            model,
            policy,
            delta,
            seed,
            max_iters,
            strict_count,
            dedup,
            out_edges,
        } => {
            let g = Arc::new(load_edge_list(&graph)?);
            let policy = policy.policy()?;
            let options = SessionOptions {
                dedup,
                count_self_queries: strict_count,
            };
            let mut session = OracleSession::with_options(Arc::clone(&g), options)?;
            let mut rng = SplitMix64::new(seed);
            let result = match (algorithm, model) {
                (AlgorithmArg::Simple, ModelArg::Distance) => {
                    simple(&mut session, policy, &mut rng, SimpleOptions { strict_count })?
                }
                (AlgorithmArg::Simple, _) => bail!("--algorithm simple needs --model distance"),
                (AlgorithmArg::SimpleModified, model) => {
                    let delta = match delta.or(g.regular_degree()) {
                        Some(d) => d,
                        None => bail!("graph is not regular; pass --delta to force a target"),
                    };
                    match model {
                        ModelArg::Distance => simple_modified(
                            &mut session,
                            delta,
                            &mut rng,
                            ModifiedOptions { max_iters, strict_count },
                        )?,
                        ModelArg::AllDistances => {
                            reconstruct_all_distances(&mut session, delta, &mut rng, max_iters)?
                        }
                        ModelArg::Betweenness => {
                            reconstruct_betweenness(&mut session, delta, &mut rng, max_iters)?
                        }
                    }
                }
            };
            let correct = result.edges == g.edge_set();
            let ledger = &result.ledger;
            println!(
                "edges={} queries={} distance={} all_distances={} betweenness={} s={} candidates={} iterations={} rounds={} correct={}",
                result.edges.len(),
                ledger.total(),
                ledger.distance,
                ledger.all_distances,
                ledger.betweenness,
                result.s_used,
                result.candidate_count,
                result.iterations,
                ledger.round_count(),
                correct,
            );
            if let Some(path) = out_edges {
                let rebuilt = Graph::from_edges(
                    g.vertex_count(),
                    result.edges.iter().map(|p| (p.lo(), p.hi())),
                    distrecon::Connectivity::Unchecked,
                )?;
                save_edge_list(&rebuilt, &path)?;
            }
            if !correct {
                bail!("reconstructed edge set differs from the hidden graph");
            }
        }

        Command::Experiment {
            family,
            graph,
            n,
            delta,
            policy,
            model,
            algorithm,
            trials,
            seed,
            max_iters,
            strict_count,
            dedup,
            out,
        } => {
            let family = match (family, graph) {
                (Some(f), None) => family_from(f, delta)?,
                (None, Some(path)) => Family::File(path),
                _ => bail!("pass exactly one of --family or --graph"),
            };
            let mut config = ExperimentConfig::new(family, n, algorithm.into(), model.into());
            config.s_policy = policy.policy()?;
            config.trials = trials;
            config.base_seed = seed;
            config.max_iters = max_iters;
            config.strict_count = strict_count;
            config.dedup = dedup;
            let records = run_experiment(&config)?;
            write_csv(&records, output(out.as_ref())?)?;
            let failed = records.iter().filter(|r| !r.correct).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} trials not reconstructed exactly", records.len());
            }
        }

        Command::Analyze {
            graph,
            pairs,
            s,
            seed,
            out,
        } => {
            let g = load_edge_list(&graph)?;
            let s = default_s(&g, s)?;
            let report = structural_probe(&g, pairs, &mut SplitMix64::new(seed))?;
            let bad = bad_pairs(&g, s);
            let mut w = output(out.as_ref())?;
            writeln!(
                w,
                "n,delta,sampled_pairs,min_distinguishers,threshold,fraction_below,s,bad_pairs"
            )?;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                report.n,
                report.delta,
                report.sampled_pairs,
                report.min_distinguishers,
                report.threshold,
                report.fraction_below,
                s,
                bad.len()
            )?;
            w.flush()?;
        }

        Command::Metricdim {
            graph,
            exact,
            trials,
            s,
            seed,
        } => {
            let g = load_edge_list(&graph)?;
            if exact {
                println!("{}", metric_dimension_exact(&g, METRIC_DIMENSION_MAX_N)?);
            } else {
                let s = default_s(&g, s)?;
                let mut rng = SplitMix64::new(seed);
                let hits = (0..trials)
                    .filter(|_| resolving_sample_trial(&g, s, &mut rng))
                    .count();
                println!(
                    "s={s} trials={trials} resolving={hits} fraction={}",
                    hits as f64 / trials.max(1) as f64
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
