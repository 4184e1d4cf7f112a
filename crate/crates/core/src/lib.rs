//! Simultaneous action and target assignment for multi-robot tracking.
//!
//! Robots pick one motion primitive each so that the targets their next
//! poses can observe are tracked well. Two objectives are supported: the
//! bottleneck (maximize the worst-covered target) and winner-takes-all
//! (maximize total quality, each target credited to one robot).

pub mod error;
pub mod experiment;
pub mod gen;
pub mod greedy;
pub mod local;
pub mod lp;
pub mod model;
pub mod netsim;
pub mod oracle;
pub mod seed;
pub mod tracking;

pub use error::{Error, Result};
pub use model::{
    derive_comm_graph, eval_bottleneck, eval_wta, eval_wta_from_x, Assignment, Bottleneck, CommGraph,
    FractionalSolution, Instance, WeightedEdge,
};
