//! Joint angles from keypoints.
//!
//! Angles come from normalized dot products, so they do not depend on the
//! keypoint units (pixels or meters) or on where the person stands.
//!
//! The elbow uses the interior angle: 180 degrees is a straight arm.
//! Shoulder flexion is 0 with the arm hanging along the torso. In 3D both
//! shoulder vectors are first projected onto the sagittal plane, whose
//! normal is the body's medial axis. Adduction is measured in the
//! transverse plane from straight forward toward the midline.

use nalgebra::Vector3;

use super::keypoints::Point;
use crate::error::{Error, Result};

const MIN_NORM: f64 = 1e-9;

/// Body axes for 3D input, in keypoint coordinates. `up` always comes from
/// hip to shoulder; `medial` and `forward` are orthogonalized against it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyFrame {
    /// Points from the tracked (right) arm toward the body midline.
    pub medial: [f64; 3],
    /// Points toward the receiver.
    pub forward: [f64; 3],
}

impl Default for BodyFrame {
    /// Camera looking along the body's lateral axis, receiver toward +x.
    fn default() -> Self {
        Self {
            medial: [0.0, 0.0, 1.0],
            forward: [1.0, 0.0, 0.0],
        }
    }
}

fn vec3(p: &Point) -> Vector3<f64> {
    Vector3::new(p.x, p.y, p.z.unwrap_or(0.0))
}

fn all_3d(points: &[&Point]) -> bool {
    points.iter().all(|p| p.z.is_some())
}

fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    if na < MIN_NORM || nb < MIN_NORM {
        return Err(Error::Degenerate("zero-length limb vector".into()));
    }
    // atan2 of cross/dot is accurate near 0 and pi, unlike acos.
    Ok(a.cross(b).norm().atan2(a.dot(b)))
}

fn unit(v: Vector3<f64>, what: &str) -> Result<Vector3<f64>> {
    let n = v.norm();
    if n < MIN_NORM {
        return Err(Error::Degenerate(format!("{what} axis is degenerate")));
    }
    Ok(v / n)
}

fn reject(v: &Vector3<f64>, axis: &Vector3<f64>) -> Vector3<f64> {
    v - axis * v.dot(axis)
}

/// Interior elbow angle in `[0, pi]`.
pub fn elbow_angle_from_points(shoulder: &Point, elbow: &Point, wrist: &Point) -> Result<f64> {
    let use_z = all_3d(&[shoulder, elbow, wrist]);
    let flat = |p: &Point| {
        if use_z {
            vec3(p)
        } else {
            Vector3::new(p.x, p.y, 0.0)
        }
    };
    let e = flat(elbow);
    angle_between(&(flat(shoulder) - e), &(flat(wrist) - e))
}

pub fn shoulder_flexion_from_points(hip: &Point, shoulder: &Point, elbow: &Point) -> Result<f64> {
    shoulder_flexion_in(hip, shoulder, elbow, &BodyFrame::default())
}

pub fn shoulder_flexion_in(
    hip: &Point,
    shoulder: &Point,
    elbow: &Point,
    frame: &BodyFrame,
) -> Result<f64> {
    if !all_3d(&[hip, shoulder, elbow]) {
        let s = Vector3::new(shoulder.x, shoulder.y, 0.0);
        let torso = Vector3::new(hip.x, hip.y, 0.0) - s;
        let arm = Vector3::new(elbow.x, elbow.y, 0.0) - s;
        return angle_between(&torso, &arm);
    }
    let s = vec3(shoulder);
    let torso = vec3(hip) - s;
    let arm = vec3(elbow) - s;
    let up = unit(-torso, "torso")?;
    let medial = unit(reject(&Vector3::from(frame.medial), &up), "medial")?;
    angle_between(&reject(&torso, &medial), &reject(&arm, &medial))
}

pub fn adduction_from_points(hip: &Point, shoulder: &Point, elbow: &Point) -> Result<f64> {
    adduction_in(hip, shoulder, elbow, &BodyFrame::default())
}

pub fn adduction_in(
    hip: &Point,
    shoulder: &Point,
    elbow: &Point,
    frame: &BodyFrame,
) -> Result<f64> {
    if !all_3d(&[hip, shoulder, elbow]) {
        return Err(Error::MissingDepth);
    }
    let s = vec3(shoulder);
    let up = unit(s - vec3(hip), "torso")?;
    let medial = unit(reject(&Vector3::from(frame.medial), &up), "medial")?;
    let forward = reject(&reject(&Vector3::from(frame.forward), &up), &medial);
    let forward = unit(forward, "forward")?;
    let arm = vec3(elbow) - s;
    let (f, m) = (arm.dot(&forward), arm.dot(&medial));
    if f.hypot(m) < MIN_NORM {
        return Err(Error::Degenerate(
            "arm is vertical; no transverse component".into(),
        ));
    }
    Ok(m.atan2(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn deg(x: f64) -> f64 {
        x.to_degrees()
    }

    #[test]
    fn elbow_examples() {
        let s = Point::xy(0.0, 0.0);
        assert!(
            (deg(elbow_angle_from_points(&s, &Point::xy(1.0, 0.0), &Point::xy(2.0, 0.0)).unwrap())
                - 180.0)
                .abs()
                < 1e-12
        );
        assert!(
            (deg(elbow_angle_from_points(&s, &Point::xy(1.0, 0.0), &Point::xy(1.0, 1.0)).unwrap())
                - 90.0)
                .abs()
                < 1e-12
        );
        // acos((-1,0).(1,1)/sqrt 2) = 135 deg
        assert!(
            (deg(elbow_angle_from_points(&s, &Point::xy(1.0, 0.0), &Point::xy(2.0, 1.0)).unwrap())
                - 135.0)
                .abs()
                < 1e-12
        );
        assert!(matches!(
            elbow_angle_from_points(&s, &s, &Point::xy(1.0, 0.0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn shoulder_examples() {
        let hip = Point::xy(0.0, -1.0);
        let sh = Point::xy(0.0, 0.0);
        assert!(
            deg(shoulder_flexion_from_points(&hip, &sh, &Point::xy(0.0, -0.5)).unwrap()).abs()
                < 1e-12
        );
        assert!(
            (deg(shoulder_flexion_from_points(&hip, &sh, &Point::xy(0.5, 0.0)).unwrap()) - 90.0)
                .abs()
                < 1e-12
        );

        let hip = Point::xyz(0.0, -1.0, 0.0);
        let sh = Point::xyz(0.0, 0.0, 0.0);
        let lateral = Point::xyz(0.0, -0.5, 0.3);
        assert!(deg(shoulder_flexion_from_points(&hip, &sh, &lateral).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn adduction_examples() {
        let hip = Point::xyz(0.0, -1.0, 0.0);
        let sh = Point::xyz(0.0, 0.0, 0.0);
        let fwd = Point::xyz(0.3, 0.0, 0.0);
        assert!(deg(adduction_from_points(&hip, &sh, &fwd).unwrap()).abs() < 1e-12);
        let a = 30f64.to_radians();
        // 30 deg toward the midline, elbow also lowered (ignored by the projection).
        let inward = Point::xyz(0.3 * a.cos(), -0.1, 0.3 * a.sin());
        assert!((deg(adduction_from_points(&hip, &sh, &inward).unwrap()) - 30.0).abs() < 1e-9);
        assert!(matches!(
            adduction_from_points(
                &Point::xy(0.0, -1.0),
                &Point::xy(0.0, 0.0),
                &Point::xy(1.0, 0.0)
            ),
            Err(Error::MissingDepth)
        ));
    }

    proptest! {
        #[test]
        fn scale_and_translation_invariant(
            pts in prop::collection::vec(-5.0f64..5.0, 12),
            scale in 0.1f64..100.0,
            shift in prop::collection::vec(-50.0f64..50.0, 3),
        ) {
            let p = |i: usize| Point::xyz(pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]);
            let q = |i: usize| Point::xyz(
                pts[3 * i] * scale + shift[0],
                pts[3 * i + 1] * scale + shift[1],
                pts[3 * i + 2] * scale + shift[2],
            );
            let (a, b) = (elbow_angle_from_points(&p(0), &p(1), &p(2)), elbow_angle_from_points(&q(0), &q(1), &q(2)));
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a - b).abs() < 1e-7);
            }
            let (a, b) = (shoulder_flexion_from_points(&p(3), &p(0), &p(1)), shoulder_flexion_from_points(&q(3), &q(0), &q(1)));
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a - b).abs() < 1e-6);
            }
        }
    }
}
