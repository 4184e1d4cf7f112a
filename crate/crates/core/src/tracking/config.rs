use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Candidate motions available to a robot at every step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PrimitiveLibrary {
    /// `headings` directions evenly spaced over a full turn, each moving the
    /// robot step length.
    Fan { headings: usize, include_stay: bool },
    /// One heading within `max_turn_deg` of the current heading, with a
    /// length uniform in `(0, max_length]`.
    RandomForward { max_turn_deg: f64, max_length: f64, include_stay: bool },
}

impl PrimitiveLibrary {
    pub fn size(&self) -> usize {
        match *self {
            PrimitiveLibrary::Fan { headings, include_stay } => headings + include_stay as usize,
            PrimitiveLibrary::RandomForward { include_stay, .. } => 1 + include_stay as usize,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QualityMode {
    /// One per target in range.
    Count,
    /// Inverse distance, with distances clamped below at [`MIN_DISTANCE`].
    InverseDistance,
}

pub const MIN_DISTANCE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub notes: Vec<String>,
    pub arena: f64,
    pub robot_count: usize,
    pub target_count: usize,
    pub robot_step: f64,
    pub target_step: f64,
    pub turn_period: usize,
    pub sensing_range: f64,
    pub comm_range: f64,
    pub library: PrimitiveLibrary,
    pub quality: QualityMode,
    pub horizon: usize,
    pub seed: u64,
}

impl SimConfig {
    /// 30 m arena, 5 m sensing, 10 m communication, 21 primitives.
    pub fn gazebo_like() -> Self {
        SimConfig {
            notes: vec![
                "target speed and turn period are not given for this setup".into(),
                "assumed: turn period 25 steps, target step half the robot step".into(),
            ],
            arena: 30.0,
            robot_count: 10,
            target_count: 30,
            robot_step: 1.0,
            target_step: 0.5,
            turn_period: 25,
            sensing_range: 5.0,
            comm_range: 10.0,
            library: PrimitiveLibrary::Fan { headings: 20, include_stay: true },
            quality: QualityMode::Count,
            horizon: 200,
            seed: 0,
        }
    }

    /// 200 m arena, 40 m sensing, 80 m communication, robots 10 m and
    /// targets 5 m per step.
    pub fn parker_cmp() -> Self {
        SimConfig {
            notes: vec!["force-vector weights are unit attraction and unit repulsion".into()],
            arena: 200.0,
            robot_count: 10,
            target_count: 10,
            robot_step: 10.0,
            target_step: 5.0,
            turn_period: 25,
            sensing_range: 40.0,
            comm_range: 80.0,
            library: PrimitiveLibrary::Fan { headings: 20, include_stay: true },
            quality: QualityMode::Count,
            horizon: 200,
            seed: 0,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "gazebo-like" => Ok(Self::gazebo_like()),
            "parker-cmp" => Ok(Self::parker_cmp()),
            _ => Err(Error::Param(format!("unknown preset {name:?} (gazebo-like|parker-cmp)"))),
        }
    }

    /// A preset name or a path to a JSON config.
    pub fn load(spec: &str) -> Result<Self> {
        let cfg = match Self::preset(spec) {
            Ok(cfg) => cfg,
            Err(_) => serde_json::from_str(&std::fs::read_to_string(Path::new(spec))?)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("arena", self.arena),
            ("robot_step", self.robot_step),
            ("sensing_range", self.sensing_range),
            ("comm_range", self.comm_range),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Param(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.target_step >= 0.0 && self.target_step.is_finite()) {
            return Err(Error::Param(format!("target_step must be non-negative, got {}", self.target_step)));
        }
        if self.robot_count == 0 {
            return Err(Error::Param("robot_count must be positive".into()));
        }
        if self.turn_period == 0 {
            return Err(Error::Param("turn_period must be positive".into()));
        }
        if self.sensing_range > self.comm_range {
            return Err(Error::Param(format!(
                "sensing range {} exceeds communication range {}",
                self.sensing_range, self.comm_range
            )));
        }
        match self.library {
            PrimitiveLibrary::Fan { headings, include_stay } => {
                if headings == 0 && !include_stay {
                    return Err(Error::Param("primitive library is empty".into()));
                }
            }
            PrimitiveLibrary::RandomForward { max_turn_deg, max_length, .. } => {
                if !(max_length > 0.0 && max_length <= self.robot_step) {
                    return Err(Error::Param(format!(
                        "max_length must be in (0, robot_step], got {max_length}"
                    )));
                }
                if !(0.0..=180.0).contains(&max_turn_deg) {
                    return Err(Error::Param(format!("max_turn_deg must be in [0, 180], got {max_turn_deg}")));
                }
            }
        }
        Ok(())
    }
}
