//! Planar multi-step tracking: moving targets, disk sensing, motion
//! primitive libraries, and the select-then-execute planning loop.

mod config;
mod episode;
mod parker;
mod world;

pub use config::{PrimitiveLibrary, QualityMode, SimConfig, MIN_DISTANCE};
pub use episode::{
    initial_world, run_episode, write_episode_csv, EpisodeReport, EpisodeRow, Policy, EPISODE_HEADER,
};
pub use parker::{parker_displacement, parker_policy};
pub use world::{
    build_primitives, observed_count, disk_graph, distance, estimated_quality, predict_targets, quality,
    snapshot_instance, step_targets, Point, Pose, PrimitiveStateSet, WorldState,
};
