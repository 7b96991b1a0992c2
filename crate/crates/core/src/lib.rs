//! Laboratory for random shortest path metrics on general graphs.
//!
//! A random shortest path metric is obtained by drawing independent
//! exponential edge weights on a connected graph and measuring distances
//! along shortest paths. This crate provides:
//!
//! * [`graphs`]: complete and Erdős–Rényi graphs, seeded weight draws and
//!   exact cut parameters `(alpha, beta)`.
//! * [`metric`]: all-pairs distances, the `tau_k`/`chi_k` growth profile,
//!   balls, the diameter and a `4 * delta` clustering.
//! * [`heuristics`]: greedy matching, nearest neighbor, insertion, 2-opt
//!   and the trivial k-median heuristic, plus exact baselines.
//! * [`bounds`]: closed-form evaluators for the tail and expectation bounds
//!   the lab compares against.
//! * [`lab`]: a seeded, parallel Monte Carlo runner with verification suites
//!   and CSV/JSON reporting.

pub mod bounds;
pub mod fmt;
pub mod graphs;
pub mod heuristics;
pub mod lab;
pub mod metric;

pub use graphs::{CutParameters, Graph, GraphError, Seed, WeightedGraph};
pub use heuristics::{HeuristicError, InsertionRule, Matching, MedianSolution, Tour, TwoOptTrace};
pub use metric::{Metric, MetricError, Partition, TauProfile};
