//! Variants of the line-up problem: several opponents at once, the hitting
//! set reduction that makes that variant hard, and the simultaneous-move game.

mod equilibrium;
mod hitting_set;
mod multi;

pub use equilibrium::{verify_uniform_equilibrium, EquilibriumReport, DEFAULT_EQUILIBRIUM_CAP};
pub use hitting_set::{
    normalize, reduce_hitting_set, solve_hitting_set_brute, HittingSetInstance, Reduction,
};
pub use multi::{solve_multi, MultiInstance, MultiSolution, DEFAULT_MULTI_CAP};
