//! Skeleton keypoint input and single-person tracking.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SHOULDER: &str = "r_shoulder";
pub const ELBOW: &str = "r_elbow";
pub const WRIST: &str = "r_wrist";
pub const HIP: &str = "r_hip";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: Option<f64>,
    pub confidence: f64,
}

impl Point {
    pub fn xy(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            z: None,
            confidence: 1.0,
        }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self {
            x,
            y,
            z: Some(z),
            confidence: 1.0,
        }
    }

    fn from_json(name: &str, v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse(format!("point '{name}' must be an array")))?;
        let nums = arr
            .iter()
            .map(|x| x.as_f64())
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::Parse(format!("point '{name}' has a non-numeric entry")))?;
        let p = match nums[..] {
            [x, y] => Self {
                x,
                y,
                z: None,
                confidence: 1.0,
            },
            [x, y, c] => Self {
                x,
                y,
                z: None,
                confidence: c,
            },
            [x, y, z, c] => Self {
                x,
                y,
                z: Some(z),
                confidence: c,
            },
            _ => {
                return Err(Error::Parse(format!(
                    "point '{name}' must be [x, y, conf] or [x, y, z, conf]"
                )))
            }
        };
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_none_or(f64::is_finite)) {
            return Err(Error::Parse(format!("point '{name}' is not finite")));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Skeleton {
    pub points: BTreeMap<String, Point>,
}

impl Skeleton {
    pub fn point(&self, name: &str) -> Result<&Point> {
        self.points
            .get(name)
            .ok_or_else(|| Error::MissingKeypoint(name.to_string()))
    }

    /// Image-plane centroid of all points.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .values()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Some((sx / n, sy / n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeypointFrame {
    pub t: f64,
    pub skeletons: Vec<Skeleton>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeypointRecording {
    pub fps: f64,
    pub frames: Vec<KeypointFrame>,
}

#[derive(Deserialize)]
struct RawRecording {
    fps: f64,
    frames: Vec<RawFrame>,
}

#[derive(Deserialize)]
struct RawFrame {
    t: f64,
    skeletons: Vec<RawSkeleton>,
}

#[derive(Deserialize)]
struct RawSkeleton {
    points: BTreeMap<String, Value>,
}

impl KeypointRecording {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawRecording = serde_json::from_str(text)?;
        if !(raw.fps.is_finite() && raw.fps > 0.0) {
            return Err(Error::Parse(format!(
                "fps must be positive, got {}",
                raw.fps
            )));
        }
        if raw.frames.is_empty() {
            return Err(Error::Parse("recording has no frames".into()));
        }
        let mut frames = Vec::with_capacity(raw.frames.len());
        for f in raw.frames {
            let skeletons = f
                .skeletons
                .into_iter()
                .map(|s| {
                    s.points
                        .iter()
                        .map(|(k, v)| Ok((k.clone(), Point::from_json(k, v)?)))
                        .collect::<Result<BTreeMap<_, _>>>()
                        .map(|points| Skeleton { points })
                })
                .collect::<Result<Vec<_>>>()?;
            frames.push(KeypointFrame { t: f.t, skeletons });
        }
        if frames.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::Parse(
                "frame times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            fps: raw.fps,
            frames,
        })
    }
}

/// How to pick the person in the first frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrackSeed {
    Leftmost,
    Rightmost,
    /// Image-plane box `[x_min, y_min, x_max, y_max]`.
    Region([f64; 4]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackConfig {
    /// Largest centroid jump accepted between consecutive tracked frames.
    pub radius: f64,
    /// Consecutive frames without a match that are bridged before giving up.
    pub max_gap: usize,
}

impl Default for TrackConfig {
    fn default() -> Self {
        Self {
            radius: f64::INFINITY,
            max_gap: 3,
        }
    }
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn pick_seed(skeletons: &[Skeleton], seed: TrackSeed) -> Result<usize> {
    let centroids: Vec<(usize, (f64, f64))> = skeletons
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.centroid().map(|c| (i, c)))
        .collect();
    let chosen = match seed {
        TrackSeed::Leftmost => centroids.iter().min_by(|a, b| a.1 .0.total_cmp(&b.1 .0)),
        TrackSeed::Rightmost => centroids.iter().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)),
        TrackSeed::Region([x0, y0, x1, y1]) => {
            let center = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            centroids
                .iter()
                .filter(|(_, (x, y))| (x0..=x1).contains(x) && (y0..=y1).contains(y))
                .min_by(|a, b| distance(a.1, center).total_cmp(&distance(b.1, center)))
        }
    };
    chosen
        .map(|&(i, _)| i)
        .ok_or_else(|| Error::InvalidParameter("no skeleton matches the seed in frame 0".into()))
}

/// Follows one person through the recording by nearest-centroid
/// association and returns one skeleton per frame.
///
/// Frames with no skeleton inside `radius` of the last tracked centroid
/// repeat the last tracked skeleton; more than `max_gap` such frames in a
/// row is a lost track.
pub fn track_person(
    frames: &[KeypointFrame],
    seed: TrackSeed,
    config: &TrackConfig,
) -> Result<Vec<KeypointFrame>> {
    let first = frames
        .first()
        .ok_or_else(|| Error::InvalidParameter("no frames to track".into()))?;
    if first.skeletons.is_empty() {
        return Err(Error::InvalidParameter("frame 0 has no skeleton".into()));
    }
    let mut current = first.skeletons[pick_seed(&first.skeletons, seed)?].clone();
    let mut last_centroid = current.centroid().expect("seed skeleton has points");
    let mut gap = 0;
    let mut out = Vec::with_capacity(frames.len());
    out.push(KeypointFrame {
        t: first.t,
        skeletons: vec![current.clone()],
    });

    for (k, frame) in frames.iter().enumerate().skip(1) {
        let best = frame
            .skeletons
            .iter()
            .filter_map(|s| s.centroid().map(|c| (s, c, distance(c, last_centroid))))
            .filter(|(_, _, d)| *d <= config.radius)
            .min_by(|a, b| a.2.total_cmp(&b.2));
        match best {
            Some((s, c, _)) => {
                current = s.clone();
                last_centroid = c;
                gap = 0;
            }
            None => {
                gap += 1;
                if gap > config.max_gap {
                    return Err(Error::LostTrack {
                        frame: k,
                        radius: config.radius,
                    });
                }
            }
        }
        out.push(KeypointFrame {
            t: frame.t,
            skeletons: vec![current.clone()],
        });
    }
    Ok(out)
}
