//! JSON instance files. Robot, primitive, and target ids are one-based.
//!
//! ```json
//! {"robots": [{"id": 1, "primitives": [{"id": 1, "targets": [{"target": 1, "weight": 1.0}]}]}],
//!  "target_count": 2}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Instance, RawInstance, ValidationReport, Violation, WeightedEdge};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub robots: Vec<RobotEntry>,
    pub target_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotEntry {
    pub id: usize,
    pub primitives: Vec<PrimitiveEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveEntry {
    pub id: usize,
    #[serde(default)]
    pub targets: Vec<TargetEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetEntry {
    pub target: usize,
    pub weight: f64,
}

impl InstanceFile {
    /// Converts to zero-based raw data, collecting id violations that the
    /// raw form cannot express.
    pub fn to_raw(&self) -> std::result::Result<RawInstance, ValidationReport> {
        let n = self.robots.len();
        let mut report = ValidationReport::default();
        let mut slots: Vec<Option<&RobotEntry>> = vec![None; n];
        for r in &self.robots {
            match r.id.checked_sub(1) {
                Some(i) if i < n => {
                    if slots[i].is_some() {
                        report.violations.push(Violation::DuplicateRobotId { robot: i });
                    } else {
                        slots[i] = Some(r);
                    }
                }
                _ => report.violations.push(Violation::RobotOutOfRange {
                    robot: r.id.wrapping_sub(1),
                    robot_count: n,
                }),
            }
        }
        let mut raw = RawInstance {
            primitives_per_robot: vec![0; n],
            target_count: self.target_count,
            edges: Vec::new(),
        };
        for (i, slot) in slots.iter().enumerate() {
            let Some(r) = slot else { continue };
            let declared = r.primitives.len();
            raw.primitives_per_robot[i] = declared;
            let mut seen = vec![false; declared];
            for p in &r.primitives {
                let m = p.id.wrapping_sub(1);
                if m >= declared {
                    report.violations.push(Violation::PrimitiveOutOfRange {
                        robot: i,
                        primitive: m,
                        declared,
                    });
                    continue;
                }
                if std::mem::replace(&mut seen[m], true) {
                    report.violations.push(Violation::DuplicatePrimitiveId { robot: i, primitive: m });
                    continue;
                }
                for t in &p.targets {
                    raw.edges.push(WeightedEdge::new(i, m, t.target.wrapping_sub(1), t.weight));
                }
            }
        }
        if report.is_empty() {
            Ok(raw)
        } else {
            Err(report)
        }
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let robots = (0..inst.robot_count())
            .map(|i| RobotEntry {
                id: i + 1,
                primitives: (0..inst.primitive_count(i))
                    .map(|m| PrimitiveEntry {
                        id: m + 1,
                        targets: inst
                            .coverage(i, m)
                            .iter()
                            .map(|&(j, c)| TargetEntry { target: j + 1, weight: c })
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        InstanceFile { robots, target_count: inst.target_count() }
    }
}

pub fn parse_instance(json: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(json)?;
    let raw = file.to_raw()?;
    Ok(Instance::from_raw(&raw)?)
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("serializable")
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    std::fs::write(path, instance_to_json(inst) + "\n")?;
    Ok(())
}
