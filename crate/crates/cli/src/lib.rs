// SPDX-License-Identifier: Apache-2.0

//! File formats, JSON reports and the `kernineq` command line.
//!
//! Exit codes: 0 the checked inequality holds (or the operation succeeded),
//! 1 it is violated, 2 the input is structurally infeasible (negative cycle,
//! vanishing factor, non-positive entry), 3 I/O or usage error.

pub mod app;
pub mod io;

pub use app::{run, Cli, Status};
