//! Sensing-graph instances, solutions, objectives, and the communication
//! graph induced by shared targets.

mod comm;
mod format;
mod instance;
mod solution;

pub use comm::{derive_comm_graph, CommGraph};
pub use format::{
    instance_to_json, parse_instance, read_instance, write_instance, InstanceFile, PrimitiveEntry,
    RobotEntry, TargetEntry,
};
pub use instance::{validate_instance, Instance, RawInstance, ValidationReport, Violation, WeightedEdge};
pub use solution::{
    eval_bottleneck, eval_wta, eval_wta_from_x, target_coverage, Assignment, Bottleneck,
    FractionalSolution, Selection, NEGATIVE_SLACK, SIMPLEX_SLACK,
};

pub(crate) use solution::{check_chosen, induced_owners};
