//! Structure validators.

mod b;
pub mod chain;
mod f;
pub mod theta;

pub use b::{check_b, min_b_constant};
pub use chain::{all_pairs_min_chain, min_chain_matrix, SpMatrix};
pub use f::{check_f1_monotone, check_f2_limit, check_f_metric, geometric_grid, DecaySchedule};
pub use theta::{
    check_action_axioms, check_b_action, check_chain_bound, check_theta_metric, default_action_grid, refine_grid,
    theta_fold, ActionAxiom,
};
