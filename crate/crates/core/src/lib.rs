//! Exact maximum population variance over interval-valued data.
//!
//! The solver sweeps the narrowed intervals `[c - r/n, c + r/n]` and only
//! enumerates the vertices of the box that can still be optimal at each sweep
//! point, so its cost is governed by the clique number of their intersection
//! graph. The remaining modules sample random instances, measure that clique
//! number, and evaluate closed-form bounds on it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod gen;
pub mod intgraph;
pub mod io;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod variance;

pub use error::{Error, Result};
pub use gen::{sample_instance, GeneratorSpec};
pub use intgraph::{edge_list, omega_sweep};
pub use model::{Instance, Interval, SignVector};
pub use oracle::{brute_force_clique, brute_force_max};
pub use solver::{solve_max_variance, SolveResult};
pub use variance::variance_direct;
