//! From skeleton keypoints to normalized joint-angle curves.
//!
//! The pipeline is track -> angles -> smoothing -> segmentation ->
//! normalization -> (elbow only) variant classification. Each stage is a
//! pure function and can be used on its own.

pub mod angles;
pub mod keypoints;
pub mod normalize;
pub mod smoothing;

use std::io::{Read, Write};

use serde::Serialize;

pub use angles::{
    adduction_from_points, elbow_angle_from_points, shoulder_flexion_from_points, BodyFrame,
};
pub use keypoints::{
    track_person, KeypointFrame, KeypointRecording, Point, Skeleton, TrackConfig, TrackSeed,
};
pub use normalize::{
    classify_variant, mean_curve, normalize, segment_motion, Convention, Segment, VariantLabel,
    VariantThresholds,
};
pub use smoothing::{smooth_sg, EdgeMode};

use crate::error::{Error, Result};
use crate::profiles::PrimitiveKind;

/// Samples on the normalized time grid; puts u = 0.5 and u = 0.6 on nodes.
pub const GRID_POINTS: usize = 101;

/// Joint angle of one primitive over time.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSeries {
    /// Seconds, strictly increasing.
    pub t: Vec<f64>,
    /// Radians.
    pub theta: Vec<f64>,
    pub primitive: PrimitiveKind,
}

impl AngleSeries {
    pub fn new(t: Vec<f64>, theta: Vec<f64>, primitive: PrimitiveKind) -> Result<Self> {
        if t.len() != theta.len() {
            return Err(Error::DimensionMismatch {
                expected: t.len(),
                actual: theta.len(),
            });
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            t,
            theta,
            primitive,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Samples `from..=to`.
    pub fn slice(&self, from: usize, to: usize) -> AngleSeries {
        AngleSeries {
            t: self.t[from..=to].to_vec(),
            theta: self.theta[from..=to].to_vec(),
            primitive: self.primitive,
        }
    }

    /// `t,theta_deg`
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,theta_deg")?;
        for (t, th) in self.t.iter().zip(&self.theta) {
            writeln!(out, "{t:.6},{:.6}", th.to_degrees())?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, primitive: PrimitiveKind) -> Result<Self> {
        let (t, deg) = read_two_columns(input, ["t", "theta_deg"])?;
        Self::new(t, deg.into_iter().map(f64::to_radians).collect(), primitive)
    }
}

/// A curve over normalized time `u` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedSeries {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl NormalizedSeries {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                actual: v.len(),
            });
        }
        if u.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample".into()));
        }
        if u.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidParameter("u must lie in [0, 1]".into()));
        }
        if u.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("u must be non-decreasing".into()));
        }
        Ok(Self { u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Reinterprets the curve as an angle series with `t = u`.
    pub fn as_series(&self, primitive: PrimitiveKind) -> AngleSeries {
        AngleSeries {
            t: self.u.clone(),
            theta: self.v.clone(),
            primitive,
        }
    }

    /// `u,v`
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "u,v")?;
        for (u, v) in self.u.iter().zip(&self.v) {
            // shortest round-trip form, so files reload bit-exact
            writeln!(out, "{u},{v}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let (u, v) = read_two_columns(input, ["u", "v"])?;
        Self::new(u, v)
    }
}

fn read_two_columns<R: Read>(input: R, names: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rdr.headers()?;
    if header.len() != 2 || header[0] != *names[0] || header[1] != *names[1] {
        return Err(Error::Parse(format!(
            "expected header {},{}",
            names[0], names[1]
        )));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", i + 2)))
        };
        if rec.len() != 2 {
            return Err(Error::Parse(format!("row {}: expected 2 fields", i + 2)));
        }
        a.push(parse(&rec[0])?);
        b.push(parse(&rec[1])?);
    }
    Ok((a, b))
}

/// Extracts one primitive's angle from a tracked (one skeleton per frame)
/// sequence.
pub fn extract_angles(
    frames: &[KeypointFrame],
    primitive: PrimitiveKind,
    body: &BodyFrame,
) -> Result<AngleSeries> {
    use keypoints::{ELBOW, HIP, SHOULDER, WRIST};
    let mut t = Vec::with_capacity(frames.len());
    let mut theta = Vec::with_capacity(frames.len());
    for f in frames {
        let s = f
            .skeletons
            .first()
            .ok_or_else(|| Error::InvalidParameter(format!("no skeleton at t = {}", f.t)))?;
        let angle =
            match primitive {
                PrimitiveKind::ElbowFlexion => {
                    elbow_angle_from_points(s.point(SHOULDER)?, s.point(ELBOW)?, s.point(WRIST)?)?
                }
                PrimitiveKind::ShoulderFlexion => angles::shoulder_flexion_in(
                    s.point(HIP)?,
                    s.point(SHOULDER)?,
                    s.point(ELBOW)?,
                    body,
                )?,
                PrimitiveKind::ShoulderAdduction => {
                    angles::adduction_in(s.point(HIP)?, s.point(SHOULDER)?, s.point(ELBOW)?, body)?
                }
                PrimitiveKind::ForearmRotation => return Err(Error::InvalidParameter(
                    "forearm rotation cannot be measured from shoulder/elbow/wrist/hip keypoints"
                        .into(),
                )),
            };
        t.push(f.t);
        theta.push(angle);
    }
    AngleSeries::new(t, theta, primitive)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub primitive: PrimitiveKind,
    pub seed: TrackSeed,
    pub track: TrackConfig,
    pub body: BodyFrame,
    /// `(window, order)`; picked from the frame rate when `None`.
    pub sg: Option<(usize, usize)>,
    pub edge: EdgeMode,
    /// Picked from the primitive when `None`.
    pub convention: Option<Convention>,
    pub thresholds: VariantThresholds,
}

impl AnalysisConfig {
    pub fn new(primitive: PrimitiveKind) -> Self {
        Self {
            primitive,
            seed: TrackSeed::Leftmost,
            track: TrackConfig::default(),
            body: BodyFrame::default(),
            sg: None,
            edge: EdgeMode::default(),
            convention: None,
            thresholds: VariantThresholds::default(),
        }
    }

    pub fn convention(&self) -> Convention {
        self.convention.unwrap_or(match self.primitive {
            PrimitiveKind::ElbowFlexion => Convention::ElbowMin0,
            _ => Convention::ShoulderStart0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutput {
    pub raw: AngleSeries,
    pub smoothed: AngleSeries,
    pub segment: Segment,
    pub normalized: NormalizedSeries,
    /// Only for elbow flexion.
    pub label: Option<VariantLabel>,
}

/// A pipeline failure tagged with the stage it happened in.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct StageError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

fn stage<T>(name: &'static str, r: Result<T>) -> std::result::Result<T, StageError> {
    r.map_err(|source| StageError {
        stage: name,
        source,
    })
}

/// Runs the whole pipeline on a recording.
pub fn analyze(
    rec: &KeypointRecording,
    cfg: &AnalysisConfig,
) -> std::result::Result<AnalysisOutput, StageError> {
    let tracked = stage("track", track_person(&rec.frames, cfg.seed, &cfg.track))?;
    let raw = stage("angles", extract_angles(&tracked, cfg.primitive, &cfg.body))?;
    let (window, order) = cfg.sg.unwrap_or_else(|| smoothing::default_params(rec.fps));
    let smoothed = stage("smooth", smooth_sg(&raw, window, order, cfg.edge))?;
    let segment = stage("segment", segment_motion(&smoothed))?;
    let cut = smoothed.slice(segment.i_start, segment.i_end);
    let normalized = stage("normalize", normalize(&cut, cfg.convention()))?;
    let label = (cfg.primitive == PrimitiveKind::ElbowFlexion)
        .then(|| classify_variant(&normalized, &cfg.thresholds));
    Ok(AnalysisOutput {
        raw,
        smoothed,
        segment,
        normalized,
        label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_validation() {
        assert!(AngleSeries::new(vec![0.0, 1.0], vec![0.0], PrimitiveKind::ElbowFlexion).is_err());
        assert!(
            AngleSeries::new(vec![0.0, 0.0], vec![0.0, 1.0], PrimitiveKind::ElbowFlexion).is_err()
        );
        assert!(NormalizedSeries::new(vec![0.0, 1.5], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn csv_formats() {
        let s = AngleSeries::new(
            vec![0.0, 0.01],
            vec![0.0, std::f64::consts::PI],
            PrimitiveKind::ElbowFlexion,
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "t,theta_deg\n0.000000,0.000000\n0.010000,180.000000\n"
        );
        let back = AngleSeries::read_csv(buf.as_slice(), PrimitiveKind::ElbowFlexion).unwrap();
        assert!((back.theta[1] - std::f64::consts::PI).abs() < 1e-12);

        let n = NormalizedSeries::new(vec![0.0, 1.0], vec![1.0, 0.25]).unwrap();
        let mut buf = Vec::new();
        n.write_csv(&mut buf).unwrap();
        assert_eq!(NormalizedSeries::read_csv(buf.as_slice()).unwrap(), n);
        assert!(NormalizedSeries::read_csv("x,y\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn adduction_on_flat_keypoints_fails_in_angle_stage() {
        let mut points = std::collections::BTreeMap::new();
        for (k, p) in [
            ("r_hip", (0.0, 1.0)),
            ("r_shoulder", (0.0, 0.0)),
            ("r_elbow", (0.3, 0.2)),
            ("r_wrist", (0.5, 0.1)),
        ] {
            points.insert(k.to_string(), Point::xy(p.0, p.1));
        }
        let frames = (0..30)
            .map(|i| KeypointFrame {
                t: i as f64 / 30.0,
                skeletons: vec![Skeleton {
                    points: points.clone(),
                }],
            })
            .collect();
        let rec = KeypointRecording { fps: 30.0, frames };
        let err =
            analyze(&rec, &AnalysisConfig::new(PrimitiveKind::ShoulderAdduction)).unwrap_err();
        assert_eq!(err.stage, "angles");
        assert!(matches!(err.source, Error::MissingDepth));
    }
}
