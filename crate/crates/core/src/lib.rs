//! Line-up optimization for two-team competitions.
//!
//! Given an `n x n` matrix of pairwise win probabilities and a fixed opponent
//! line-up, choose the line-up (a perfect bipartite matching) that maximizes the
//! probability of winning at least `target` individual matches.
//!
//! The crate provides:
//! - [`instance`]: problem types, JSON format, classification and generators.
//! - [`pb`]: exact Poisson binomial win distributions and the analytic tail and
//!   distance bounds used by the solvers and auditors.
//! - [`matching`]: Hungarian max-weight perfect matching, fixed-cardinality
//!   matching and Lagrangian budgeted matching.
//! - [`solvers`]: brute-force oracle, the three-value iterative solver, the PTAS
//!   and the max-weight / win-all baselines.
//! - [`bounds`]: gap bounds for the max-weight baseline and their audit.
//! - [`extensions`]: multi-opponent line-ups, the hitting-set reduction and the
//!   uniform-equilibrium verifier.

pub mod bounds;
pub mod error;
pub mod extensions;
pub mod instance;
pub mod matching;
pub mod pb;
pub mod solvers;

pub use error::{Error, Result};
pub use instance::{Instance, InstanceClass, LineUp};
pub use pb::{PbParams, WinReport};
pub use solvers::SolveResult;
