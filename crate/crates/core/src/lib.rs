//! Many-to-many recourse matching as capacitated weighted bipartite matching.
//!
//! Recourse seekers and capacity-limited providers form a bipartite graph
//! whose edge weights `w = exp(-gamma * cost)` encode how cheap each
//! provider's recourse recommendation is. Three optimization layers operate
//! on that graph:
//!
//! 1. [`solve_matching`]: welfare-maximal matching under fixed capacities,
//!    solved exactly by min-cost max-flow.
//! 2. [`optimal_capacity`]: the capacity split of a fixed total budget that
//!    minimizes the gap to the seekers' individually optimal welfare.
//! 3. [`solve_penalized`]: capacity redistribution that trades welfare gains
//!    against per-provider deviation penalties.
//!
//! [`brute_force_matching`] and [`enumerate_capacities`] are exact oracles
//! used to certify the solvers on small instances.

mod capacity;
mod error;
mod matching;
mod penalized;
mod recourse;
mod types;
mod weights;
mod welfare;

pub use capacity::{optimal_capacity, welfare_curve, CurvePoint};
pub use error::{Error, Result};
pub use matching::{brute_force_matching, solve_matching};
pub use penalized::{
    composition_count, enumerate_capacities, local_search_penalized, solve_penalized,
    Compositions, MAX_COMPOSITIONS,
};
pub use recourse::{
    build_cost_matrix, min_cost_action, ActionConstraints, LinearProvider, Norm, RecourseAction,
    Seeker, DECISION_MARGIN,
};
pub use types::{
    CapacityVector, CostMatrix, Matching, PenaltyConfig, WeightMatrix, WelfareReport,
};
pub use weights::to_weights;
pub use welfare::{evaluate, individual_welfare, WELFARE_TOL};
