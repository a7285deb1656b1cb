//! Serial-chain arm descriptions, primitive-to-joint mapping, and forward
//! kinematics.
//!
//! Robot definitions are JSON files with angles in degrees; everything in
//! memory is radians. The two builtin robots ship as such files. Their
//! link lengths, limits and rest angles are placeholders, not measurements
//! of any particular platform.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use nalgebra::{Isometry3, Rotation3, Translation3, Unit, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::PrimitiveKind;

const HUMANOID_ARM: &str = include_str!("../robots/humanoid-arm.json");
const ARM_5DOF: &str = include_str!("../robots/arm-5dof.json");

pub const BUILTIN_ROBOTS: [&str; 2] = ["humanoid-arm", "arm-5dof"];

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec {
    pub name: String,
    /// Rotation axis in the parent frame.
    pub axis: Unit<Vector3<f64>>,
    /// Translation from the parent joint, meters.
    pub offset: Vector3<f64>,
    /// `[min, max]`, radians.
    pub limits: [f64; 2],
    /// Angle taken when no primitive drives the joint, radians.
    pub rest: f64,
}

impl JointSpec {
    pub fn new(
        name: impl Into<String>,
        axis: [f64; 3],
        offset: [f64; 3],
        limits: [f64; 2],
        rest: f64,
    ) -> Result<Self> {
        let name = name.into();
        let raw = Vector3::from(axis);
        if (raw.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "joint '{name}': axis must be a unit vector (norm {})",
                raw.norm()
            )));
        }
        if !(limits[0] < limits[1]) {
            return Err(Error::InvalidParameter(format!(
                "joint '{name}': limits must satisfy min < max"
            )));
        }
        if offset.iter().any(|v| !v.is_finite()) || !rest.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "joint '{name}': non-finite value"
            )));
        }
        Ok(Self {
            name,
            axis: Unit::new_unchecked(raw),
            offset: Vector3::from(offset),
            limits,
            rest,
        })
    }

    pub fn clamp(&self, angle: f64) -> (f64, bool) {
        let clamped = angle.clamp(self.limits[0], self.limits[1]);
        (clamped, clamped != angle)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    pub name: String,
    pub joints: Vec<JointSpec>,
    /// Tool point relative to the last joint, meters.
    pub ee_offset: Vector3<f64>,
}

impl RobotModel {
    pub fn new(
        name: impl Into<String>,
        joints: Vec<JointSpec>,
        ee_offset: [f64; 3],
    ) -> Result<Self> {
        let name = name.into();
        if joints.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "robot '{name}' has no joints"
            )));
        }
        let mut seen = HashSet::new();
        for j in &joints {
            if !seen.insert(j.name.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "robot '{name}': duplicate joint name '{}'",
                    j.name
                )));
            }
        }
        Ok(Self {
            name,
            joints,
            ee_offset: Vector3::from(ee_offset),
        })
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn joint_names(&self) -> Vec<String> {
        self.joints.iter().map(|j| j.name.clone()).collect()
    }

    pub fn rest_angles(&self) -> Vec<f64> {
        self.joints.iter().map(|j| j.rest).collect()
    }

    /// Upper bound on the distance from the base to the tool point.
    pub fn reach(&self) -> f64 {
        self.joints.iter().map(|j| j.offset.norm()).sum::<f64>() + self.ee_offset.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointBinding {
    pub joint: usize,
    pub sign: f64,
    pub rc: f64,
}

/// Which joint realizes each primitive, with its sign and robot constant.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrimitiveMapping {
    pub entries: BTreeMap<PrimitiveKind, JointBinding>,
}

impl PrimitiveMapping {
    pub fn new(entries: BTreeMap<PrimitiveKind, JointBinding>, robot: &RobotModel) -> Result<Self> {
        let m = Self { entries };
        m.validate(robot)?;
        Ok(m)
    }

    pub fn validate(&self, robot: &RobotModel) -> Result<()> {
        let mut used = HashSet::new();
        for (kind, b) in &self.entries {
            if b.joint >= robot.dof() {
                return Err(Error::InvalidParameter(format!(
                    "{kind} mapped to joint {} but robot has {} joints",
                    b.joint,
                    robot.dof()
                )));
            }
            if !used.insert(b.joint) {
                return Err(Error::InvalidParameter(format!(
                    "joint {} is mapped more than once",
                    b.joint
                )));
            }
            if b.sign != 1.0 && b.sign != -1.0 {
                return Err(Error::InvalidParameter(format!(
                    "{kind}: sign must be +1 or -1"
                )));
            }
            if !(b.rc.is_finite() && b.rc > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{kind}: rc must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, kind: PrimitiveKind) -> Result<&JointBinding> {
        self.entries
            .get(&kind)
            .ok_or_else(|| Error::UnmappedPrimitive(kind.name().to_string()))
    }
}

/// Joint vector produced by [`map_primitives`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointVector {
    pub q: Vec<f64>,
    /// Per joint: whether the requested value was outside the limits.
    pub clamped: Vec<bool>,
}

impl JointVector {
    pub fn any_clamped(&self) -> bool {
        self.clamped.iter().any(|&c| c)
    }
}

/// Places primitive angles onto the robot's joints.
///
/// Unmapped joints sit at their rest angle. Every entry is clamped to its
/// limits and the clamp is reported rather than rejected.
pub fn map_primitives(
    mapping: &PrimitiveMapping,
    angles: &BTreeMap<PrimitiveKind, f64>,
    robot: &RobotModel,
) -> Result<JointVector> {
    let mut q = robot.rest_angles();
    for (&kind, &angle) in angles {
        let b = mapping.get(kind)?;
        if b.joint >= q.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                actual: b.joint + 1,
            });
        }
        q[b.joint] = b.sign * angle;
    }
    Ok(clamp_to_limits(robot, &q))
}

pub fn clamp_to_limits(robot: &RobotModel, q: &[f64]) -> JointVector {
    let (q, clamped) = robot.joints.iter().zip(q).map(|(j, &a)| j.clamp(a)).unzip();
    JointVector { q, clamped }
}

/// Tool-point position for joint angles `q`.
pub fn forward_kinematics(robot: &RobotModel, q: &[f64]) -> Result<Vector3<f64>> {
    if q.len() != robot.dof() {
        return Err(Error::DimensionMismatch {
            expected: robot.dof(),
            actual: q.len(),
        });
    }
    let pose = robot
        .joints
        .iter()
        .zip(q)
        .fold(Isometry3::identity(), |pose, (joint, &angle)| {
            let rot = UnitQuaternion::from_rotation_matrix(&Rotation3::from_axis_angle(
                &joint.axis,
                angle,
            ));
            pose * Isometry3::from_parts(Translation3::from(joint.offset), rot)
        });
    Ok((pose * nalgebra::Point3::from(robot.ee_offset)).coords)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JointDef {
    name: String,
    axis: [f64; 3],
    offset: [f64; 3],
    limits_deg: [f64; 2],
    #[serde(default)]
    rest_deg: f64,
}

/// On-disk robot description (degrees).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobotDefinition {
    name: String,
    joints: Vec<JointDef>,
    ee_offset: [f64; 3],
    #[serde(default)]
    mapping: BTreeMap<PrimitiveKind, JointBinding>,
}

impl RobotDefinition {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn build(&self) -> Result<(RobotModel, PrimitiveMapping)> {
        let joints = self
            .joints
            .iter()
            .map(|j| {
                JointSpec::new(
                    &j.name,
                    j.axis,
                    j.offset,
                    [j.limits_deg[0].to_radians(), j.limits_deg[1].to_radians()],
                    j.rest_deg.to_radians(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let robot = RobotModel::new(&self.name, joints, self.ee_offset)?;
        let mapping = PrimitiveMapping::new(self.mapping.clone(), &robot)?;
        Ok((robot, mapping))
    }

    pub fn from_model(robot: &RobotModel, mapping: &PrimitiveMapping) -> Self {
        Self {
            name: robot.name.clone(),
            joints: robot
                .joints
                .iter()
                .map(|j| JointDef {
                    name: j.name.clone(),
                    axis: j.axis.into_inner().into(),
                    offset: j.offset.into(),
                    limits_deg: [j.limits[0].to_degrees(), j.limits[1].to_degrees()],
                    rest_deg: j.rest.to_degrees(),
                })
                .collect(),
            ee_offset: robot.ee_offset.into(),
            mapping: mapping.entries.clone(),
        }
    }
}

pub fn builtin_definition(name: &str) -> Result<RobotDefinition> {
    let text = match name {
        "humanoid-arm" => HUMANOID_ARM,
        "arm-5dof" => ARM_5DOF,
        other => return Err(Error::UnknownRobot(other.to_string())),
    };
    RobotDefinition::from_json(text)
}

pub fn builtin_robot(name: &str) -> Result<(RobotModel, PrimitiveMapping)> {
    builtin_definition(name)?.build()
}

pub fn load_robot(path: &Path) -> Result<(RobotModel, PrimitiveMapping)> {
    RobotDefinition::from_json(&std::fs::read_to_string(path)?)?.build()
}
