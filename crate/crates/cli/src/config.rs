//! `--config` file and flag resolution for `generate`.

use std::collections::BTreeMap;
use std::path::Path;

use handover_jmm::kinematics::{builtin_definition, load_robot, BUILTIN_ROBOTS};
use handover_jmm::{
    ElbowVariant, EvalMode, ForearmDirection, PrimitiveKind, PrimitiveMapping, ProfileSet,
    RobotModel,
};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_ROBOT: &str = "humanoid-arm";
pub const DEFAULT_DURATION: f64 = 1.2;
pub const DEFAULT_RATE: f64 = 100.0;

/// Start / end posture in degrees used when neither the config nor the flags
/// name a primitive.
pub const DEFAULT_START_DEG: [(PrimitiveKind, f64); 4] = [
    (PrimitiveKind::ShoulderFlexion, 0.0),
    (PrimitiveKind::ShoulderAdduction, 0.0),
    (PrimitiveKind::ElbowFlexion, 20.0),
    (PrimitiveKind::ForearmRotation, 0.0),
];
pub const DEFAULT_END_DEG: [(PrimitiveKind, f64); 4] = [
    (PrimitiveKind::ShoulderFlexion, 50.0),
    (PrimitiveKind::ShoulderAdduction, 15.0),
    (PrimitiveKind::ElbowFlexion, 40.0),
    (PrimitiveKind::ForearmRotation, -30.0),
];

/// Everything optional; flags win over file values, file values over
/// defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub robot: Option<String>,
    pub duration: Option<f64>,
    pub rate: Option<f64>,
    pub mode: Option<EvalMode>,
    pub variant: Option<ElbowVariant>,
    pub forearm_direction: Option<ForearmDirection>,
    #[serde(default)]
    pub start_deg: BTreeMap<PrimitiveKind, f64>,
    #[serde(default)]
    pub end_deg: BTreeMap<PrimitiveKind, f64>,
    /// Seconds from the start of the handover.
    #[serde(default)]
    pub windows: BTreeMap<PrimitiveKind, (f64, f64)>,
    pub profiles: Option<ProfileSet>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved settings for one `generate` run.
#[derive(Debug)]
pub struct Resolved {
    pub robot: RobotModel,
    pub mapping: PrimitiveMapping,
    pub duration: f64,
    pub rate: f64,
    pub mode: EvalMode,
    pub variant: ElbowVariant,
    pub forearm_direction: ForearmDirection,
    /// Radians.
    pub start: BTreeMap<PrimitiveKind, f64>,
    /// Radians.
    pub end: BTreeMap<PrimitiveKind, f64>,
    pub windows: BTreeMap<PrimitiveKind, (f64, f64)>,
    pub profiles: ProfileSet,
}

#[derive(Debug, Default)]
pub struct Overrides {
    pub robot: Option<String>,
    pub duration: Option<f64>,
    pub rate: Option<f64>,
    pub mode: Option<EvalMode>,
    pub variant: Option<ElbowVariant>,
    pub forearm_direction: Option<ForearmDirection>,
    pub start_deg: Vec<(PrimitiveKind, f64)>,
    pub end_deg: Vec<(PrimitiveKind, f64)>,
}

/// A builtin name, otherwise a path to a robot JSON file.
pub fn robot_from_source(source: &str) -> Result<(RobotModel, PrimitiveMapping), CliError> {
    if BUILTIN_ROBOTS.contains(&source) {
        return builtin_definition(source)?.build().map_err(CliError::from);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::usage(format!(
            "robot '{source}' is neither a builtin ({}) nor an existing file",
            BUILTIN_ROBOTS.join(", ")
        )));
    }
    load_robot(path).map_err(|e| CliError::usage(format!("robot file {source}: {e}")))
}

pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Resolved, CliError> {
    let robot_src = flags
        .robot
        .or(file.robot)
        .unwrap_or_else(|| DEFAULT_ROBOT.to_string());
    let (robot, mapping) = robot_from_source(&robot_src)?;

    let mut start: BTreeMap<PrimitiveKind, f64> = DEFAULT_START_DEG.into_iter().collect();
    let mut end: BTreeMap<PrimitiveKind, f64> = DEFAULT_END_DEG.into_iter().collect();
    start.extend(file.start_deg);
    end.extend(file.end_deg);
    start.extend(flags.start_deg);
    end.extend(flags.end_deg);
    // only primitives the robot can express
    start.retain(|k, _| mapping.entries.contains_key(k));
    end.retain(|k, _| mapping.entries.contains_key(k));

    Ok(Resolved {
        robot,
        mapping,
        duration: flags.duration.or(file.duration).unwrap_or(DEFAULT_DURATION),
        rate: flags.rate.or(file.rate).unwrap_or(DEFAULT_RATE),
        mode: flags.mode.or(file.mode).unwrap_or_default(),
        variant: flags.variant.or(file.variant).unwrap_or(ElbowVariant::V1),
        forearm_direction: flags
            .forearm_direction
            .or(file.forearm_direction)
            .unwrap_or(ForearmDirection::Pronation),
        start: start
            .into_iter()
            .map(|(k, v)| (k, v.to_radians()))
            .collect(),
        end: end.into_iter().map(|(k, v)| (k, v.to_radians())).collect(),
        windows: file.windows,
        profiles: file.profiles.unwrap_or_default(),
    })
}
