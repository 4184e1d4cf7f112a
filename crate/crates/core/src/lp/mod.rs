//! Exact solver for small max-min linear programs.

mod equivalence;
mod maxmin;
pub mod simplex;

pub use equivalence::{check_lemma1_equivalence, EquivalenceReport, EQUIVALENCE_TOLERANCE};
pub use maxmin::{
    covered_targets, solve_instance_lp, solve_maxmin_lp, LpOptions, MaxMinLp, MAX_DYNAMIC_RANGE,
};
