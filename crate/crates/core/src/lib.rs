//! Reconstruction of hidden graphs from simulated distance oracles.
//!
//! The crate is split along the pipeline of an experiment:
//!
//! * [`graph`]: immutable graphs, BFS distances, vertex-pair sets.
//! * [`generators`]: random regular graphs (configuration model with
//!   rejection), rings, complete binary trees, edge-list files.
//! * [`oracle`]: distance, all-distances and betweenness oracles with
//!   query and round accounting.
//! * [`reconstruct`]: the sampling-based reconstruction algorithms.
//! * [`analysis`]: distinguisher sets, bad pairs, resolving sets and metric
//!   dimension over a known graph.
//! * [`experiment`]: seeded parameter sweeps and CSV output.

pub mod analysis;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod reconstruct;
pub mod rng;

pub use graph::{Connectivity, Distance, DistanceVector, Graph, Multigraph, Pair, PairSet, Vertex};
pub use oracle::{OracleSession, QueryLedger, SessionOptions};
pub use rng::SplitMix64;
