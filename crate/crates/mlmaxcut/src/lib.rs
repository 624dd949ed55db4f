//! Multilevel solver for the weighted Max-Cut problem.
//!
//! The solver coarsens a graph through a geometric distance embedding,
//! solves the coarsest instance, and uncoarsens with randomized multistart
//! refinement in which small pinned subproblems are handed to pluggable
//! backends: exact brute force, tabu search, or a simulated QAOA circuit.
//!
//! The typical entry point is [`pipeline::solve`]:
//!
//! ```
//! use mlmaxcut::graph::Graph;
//! use mlmaxcut::pipeline::{self, RunConfig};
//!
//! let g = Graph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
//! let cfg = RunConfig {
//!     subproblem_size: 4,
//!     multistarts: 2,
//!     ..RunConfig::default()
//! };
//! let report = pipeline::solve(&g, &cfg).unwrap();
//! assert_eq!(report.objective, 4.0);
//! ```
//!
//! A narrative guide to every stage lives under `book/` in the repository
//! root; its code snippets compile and run as part of `cargo test`.

pub mod coarsening;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod io;
pub mod pipeline;
pub mod qaoa;
pub mod solver;
pub mod subproblem;

mod kdtree;
mod seeding;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use graph::{CutAssignment, GainTable, Graph};
pub use pipeline::{RunConfig, RunReport};
