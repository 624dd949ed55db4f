//! Doc-test shims for the narrative guide under `book/`.
//!
//! Each chapter of the guide is attached here as module documentation, so
//! every fenced code block in the book compiles and runs under
//! `cargo test` exactly as printed.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/cut-objective.md")]
mod cut_objective {}

#[doc = include_str!("../../../book/src/embeddings.md")]
mod embeddings {}

#[doc = include_str!("../../../book/src/coarsening.md")]
mod coarsening {}

#[doc = include_str!("../../../book/src/subproblems.md")]
mod subproblems {}

#[doc = include_str!("../../../book/src/solvers.md")]
mod solvers {}

#[doc = include_str!("../../../book/src/qaoa.md")]
mod qaoa {}

#[doc = include_str!("../../../book/src/pipeline.md")]
mod pipeline {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
