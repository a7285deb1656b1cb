//! Sampled handover trajectories and the metrics used to compare them.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp;
use crate::kinematics::{forward_kinematics, map_primitives, PrimitiveMapping, RobotModel};
use crate::profiles::{
    ElbowVariant, EvalMode, ForearmDirection, MotionPrimitive, PrimitiveKind, ProfileParams,
    ProfileSet,
};

pub const MIN_RATE_HZ: f64 = 10.0;

/// Start and end primitive angles (radians) plus how to move between them.
#[derive(Debug, Clone, PartialEq)]
pub struct HandoverSpec {
    pub start: BTreeMap<PrimitiveKind, f64>,
    pub end: BTreeMap<PrimitiveKind, f64>,
    /// Duration, seconds.
    pub te: f64,
    pub elbow_variant: ElbowVariant,
    pub forearm_direction: ForearmDirection,
    pub mode: EvalMode,
    /// Optional `[t_start, t_end]` activity window per primitive. Primitives
    /// without an entry span the whole duration.
    pub windows: BTreeMap<PrimitiveKind, (f64, f64)>,
    pub profiles: ProfileSet,
}

impl HandoverSpec {
    pub fn new(
        start: BTreeMap<PrimitiveKind, f64>,
        end: BTreeMap<PrimitiveKind, f64>,
        te: f64,
    ) -> Result<Self> {
        let spec = Self {
            start,
            end,
            te,
            elbow_variant: ElbowVariant::V1,
            forearm_direction: ForearmDirection::Pronation,
            mode: EvalMode::Anchored,
            windows: BTreeMap::new(),
            profiles: ProfileSet::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.te.is_finite() && self.te > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {}",
                self.te
            )));
        }
        if !self.start.keys().eq(self.end.keys()) {
            return Err(Error::InvalidParameter(
                "start and end must cover the same primitives".into(),
            ));
        }
        if self
            .start
            .values()
            .chain(self.end.values())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite primitive angle".into()));
        }
        for (kind, &(a, b)) in &self.windows {
            if !(0.0 <= a && a < b && b <= self.te) {
                return Err(Error::InvalidParameter(format!(
                    "{kind}: window [{a}, {b}] must satisfy 0 <= start < end <= duration"
                )));
            }
        }
        Ok(())
    }

    fn primitive(&self, kind: PrimitiveKind) -> MotionPrimitive {
        match kind {
            PrimitiveKind::ShoulderFlexion => MotionPrimitive::ShoulderFlexion,
            PrimitiveKind::ShoulderAdduction => MotionPrimitive::ShoulderAdduction,
            PrimitiveKind::ElbowFlexion => MotionPrimitive::ElbowFlexion(self.elbow_variant),
            PrimitiveKind::ForearmRotation => {
                MotionPrimitive::ForearmRotation(self.forearm_direction)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: f64,
    /// Joint angles, radians.
    pub q: Vec<f64>,
    /// Tool-point position, meters.
    pub ee: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rate: f64,
    pub joint_names: Vec<String>,
    pub frames: Vec<Frame>,
    /// Commanded joint vectors at start and end, when known.
    pub targets: Option<(Vec<f64>, Vec<f64>)>,
    /// Number of frames in which at least one joint hit a limit.
    pub clamped_frames: usize,
}

impl Trajectory {
    pub fn dof(&self) -> usize {
        self.joint_names.len()
    }

    pub fn duration(&self) -> f64 {
        self.frames.last().map_or(0.0, |f| f.t)
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.t).collect()
    }

    /// Angle trace of one joint.
    pub fn joint_trace(&self, joint: usize) -> Vec<f64> {
        self.frames.iter().map(|f| f.q[joint]).collect()
    }

    /// Writes `t,<joints...>,ee_x,ee_y,ee_z` with angles in degrees.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "t")?;
        for name in &self.joint_names {
            write!(out, ",{name}")?;
        }
        writeln!(out, ",ee_x,ee_y,ee_z")?;
        for f in &self.frames {
            write!(out, "{:.6}", f.t)?;
            for q in &f.q {
                write!(out, ",{:.6}", q.to_degrees())?;
            }
            writeln!(out, ",{:.6},{:.6},{:.6}", f.ee.x, f.ee.y, f.ee.z)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let n = header.len();
        if n < 5 || header[0] != "t" || header[n - 3..] != ["ee_x", "ee_y", "ee_z"] {
            return Err(Error::Parse(
                "trajectory header must be t,<joints...>,ee_x,ee_y,ee_z".into(),
            ));
        }
        let joint_names = header[1..n - 3].to_vec();
        let mut frames = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))?;
            if vals.len() != n {
                return Err(Error::Parse(format!(
                    "row {}: expected {n} fields",
                    line + 2
                )));
            }
            frames.push(Frame {
                t: vals[0],
                q: vals[1..n - 3].iter().map(|d| d.to_radians()).collect(),
                ee: Vector3::new(vals[n - 3], vals[n - 2], vals[n - 1]),
            });
        }
        if frames.len() < 2 {
            return Err(Error::Parse("trajectory needs at least two rows".into()));
        }
        if frames.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::Parse(
                "time column must be strictly increasing".into(),
            ));
        }
        let span = frames[frames.len() - 1].t - frames[0].t;
        Ok(Self {
            rate: (frames.len() - 1) as f64 / span,
            joint_names,
            frames,
            targets: None,
            clamped_frames: 0,
        })
    }
}

/// Frame times covering `[0, te]` inclusive: `round(te * rate) + 1` samples.
pub fn sample_times(te: f64, rate: f64) -> Result<Vec<f64>> {
    if !(rate.is_finite() && rate >= MIN_RATE_HZ) {
        return Err(Error::InvalidParameter(format!(
            "rate must be at least {MIN_RATE_HZ} Hz, got {rate}"
        )));
    }
    if !(te.is_finite() && te > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "duration must be positive, got {te}"
        )));
    }
    let n = ((te * rate).round() as usize).max(1) + 1;
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| te * (i as f64 / last)).collect())
}

fn build(
    spec: &HandoverSpec,
    robot: &RobotModel,
    mapping: &PrimitiveMapping,
    rate: f64,
    mut joints_at: impl FnMut(f64) -> Result<Vec<f64>>,
) -> Result<Trajectory> {
    spec.validate()?;
    mapping.validate(robot)?;
    let times = sample_times(spec.te, rate)?;
    let start = map_primitives(mapping, &spec.start, robot)?;
    let end = map_primitives(mapping, &spec.end, robot)?;

    let mut clamped_frames = 0;
    let frames = times
        .into_iter()
        .map(|t| {
            let raw = joints_at(t)?;
            let v = crate::kinematics::clamp_to_limits(robot, &raw);
            if v.any_clamped() {
                clamped_frames += 1;
            }
            let ee = forward_kinematics(robot, &v.q)?;
            Ok(Frame { t, q: v.q, ee })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Trajectory {
        rate,
        joint_names: robot.joint_names(),
        frames,
        targets: Some((start.q, end.q)),
        clamped_frames,
    })
}

/// Samples the profile-based model: every primitive follows its motion
/// profile, in parallel, over its window (the full duration by default).
pub fn generate_jmm(
    spec: &HandoverSpec,
    robot: &RobotModel,
    mapping: &PrimitiveMapping,
    rate: f64,
) -> Result<Trajectory> {
    let mut params = Vec::new();
    for (&kind, &j0) in &spec.start {
        let binding = mapping.get(kind)?;
        let (ws, we) = spec.windows.get(&kind).copied().unwrap_or((0.0, spec.te));
        let p = ProfileParams::with(j0, spec.end[&kind], we - ws, binding.rc, spec.mode)?;
        params.push((kind, spec.primitive(kind), p, ws));
    }

    build(spec, robot, mapping, rate, |t| {
        let mut q = robot.rest_angles();
        for (kind, prim, p, ws) in &params {
            let local = (t - ws).clamp(0.0, p.te);
            let b = mapping.get(*kind)?;
            q[b.joint] = b.sign * spec.profiles.angle(*prim, p, local)?;
        }
        Ok(q)
    })
}

/// Samples the linear joint-space baseline between the mapped start and
/// end joint vectors.
pub fn generate_ljst(
    spec: &HandoverSpec,
    robot: &RobotModel,
    mapping: &PrimitiveMapping,
    rate: f64,
) -> Result<Trajectory> {
    let start = map_primitives(mapping, &spec.start, robot)?.q;
    let end = map_primitives(mapping, &spec.end, robot)?.q;
    build(spec, robot, mapping, rate, |t| {
        let s = t / spec.te;
        Ok(start
            .iter()
            .zip(&end)
            .map(|(a, b)| if s >= 1.0 { *b } else { a + (b - a) * s })
            .collect())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    /// Per joint, rad^2/s^6.
    pub mean_squared_jerk: Vec<f64>,
    /// Meters.
    pub ee_path_length: f64,
    /// Per joint, rad/s.
    pub max_angular_velocity: Vec<f64>,
    /// Per joint, radians; only for trajectories that carry their targets.
    pub endpoint_error: Option<Vec<f64>>,
}

pub fn metrics(traj: &Trajectory) -> Result<MetricsReport> {
    let n = traj.frames.len();
    if n < 5 {
        return Err(Error::TooFewSamples {
            required: 5,
            actual: n,
        });
    }
    let dof = traj.dof();
    let dt = (traj.frames[n - 1].t - traj.frames[0].t) / (n - 1) as f64;

    let mut mean_squared_jerk = vec![0.0; dof];
    let mut max_angular_velocity = vec![0.0f64; dof];
    for (j, (msj, vmax)) in mean_squared_jerk
        .iter_mut()
        .zip(max_angular_velocity.iter_mut())
        .enumerate()
    {
        let q = traj.joint_trace(j);
        let jerks = (2..n - 2)
            .map(|i| (q[i + 2] - 2.0 * q[i + 1] + 2.0 * q[i - 1] - q[i - 2]) / (2.0 * dt.powi(3)));
        *msj = jerks.map(|x| x * x).sum::<f64>() / (n - 4) as f64;
        *vmax = q
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / dt)
            .fold(0.0, f64::max);
    }

    let ee_path_length = traj
        .frames
        .windows(2)
        .map(|w| (w[1].ee - w[0].ee).norm())
        .sum();

    let endpoint_error = traj.targets.as_ref().map(|(start, end)| {
        let first = &traj.frames[0].q;
        let last = &traj.frames[n - 1].q;
        (0..dof)
            .map(|j| (first[j] - start[j]).abs().max((last[j] - end[j]).abs()))
            .collect()
    });

    Ok(MetricsReport {
        mean_squared_jerk,
        ee_path_length,
        max_angular_velocity,
        endpoint_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub joint_names: Vec<String>,
    pub a: MetricsReport,
    pub b: MetricsReport,
    /// Max |a - b| per joint over the common time grid, radians.
    pub max_difference: Vec<f64>,
    /// |a(0) - b(0)| per joint, radians.
    pub start_difference: Vec<f64>,
    /// |a(end) - b(end)| per joint, radians.
    pub end_difference: Vec<f64>,
}

/// Compares two trajectories on `a`'s time grid, resampling `b` linearly.
pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<Comparison> {
    if a.dof() != b.dof() {
        return Err(Error::DimensionMismatch {
            expected: a.dof(),
            actual: b.dof(),
        });
    }
    let dof = a.dof();
    let horizon = a.duration().min(b.duration());
    let bt = b.times();
    let b_traces: Vec<Vec<f64>> = (0..dof).map(|j| b.joint_trace(j)).collect();

    let mut max_difference = vec![0.0f64; dof];
    for f in a.frames.iter().filter(|f| f.t <= horizon + 1e-12) {
        for j in 0..dof {
            let d = (f.q[j] - interp::linear(&bt, &b_traces[j], f.t)).abs();
            max_difference[j] = max_difference[j].max(d);
        }
    }
    let diff = |x: &Frame, y: &Frame| -> Vec<f64> {
        x.q.iter().zip(&y.q).map(|(p, q)| (p - q).abs()).collect()
    };

    Ok(Comparison {
        joint_names: a.joint_names.clone(),
        a: metrics(a)?,
        b: metrics(b)?,
        max_difference,
        start_difference: diff(&a.frames[0], &b.frames[0]),
        end_difference: diff(a.frames.last().unwrap(), b.frames.last().unwrap()),
    })
}
