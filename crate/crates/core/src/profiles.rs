//! Normalized motion profiles and the joint-angle models built on them.
//!
//! Every primitive is driven by a curve over normalized time `u = t / te`.
//! Shoulder flexion and adduction use a sigmoid `a / (b + exp(-c u))`;
//! elbow flexion uses a degree-7 polynomial with one coefficient set per
//! movement variant; forearm rotation uses a caller-supplied polynomial.
//!
//! Two evaluation modes exist. [`EvalMode::Literal`] applies the
//! published joint-angle formulas as written, which neither start nor end
//! exactly on the commanded angles. [`EvalMode::Anchored`] affinely
//! renormalizes the same curves so that `J(0) = j0` and `J(te) = je` when
//! `rc = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of `a / (b + exp(-c u))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SigmoidCoefficients {
    /// Fitted shoulder-flexion coefficients from the recorded handovers.
    pub const SHOULDER_FLEXION: Self = Self {
        a: 0.000905,
        b: 0.0008908,
        c: 12.87,
    };

    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let coef = Self { a, b, c };
        coef.validate()?;
        Ok(coef)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "sigmoid coefficient {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// Evaluates the curve without checking the domain.
    #[inline]
    pub(crate) fn value(&self, u: f64) -> f64 {
        self.a / (self.b + (-self.c * u).exp())
    }
}

impl Default for SigmoidCoefficients {
    fn default() -> Self {
        Self::SHOULDER_FLEXION
    }
}

/// Coefficients `c0..=c7` of a degree-7 polynomial, constant term first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyCoefficients(pub [f64; 8]);

impl PolyCoefficients {
    /// Mean elbow curve of the movements with a pronounced mid-motion dip.
    pub const ELBOW_V1: Self = Self([1.0, -1.7, 27.2, -157.3, 314.6, -240.9, 34.2, 23.2]);
    /// Mean elbow curve of the mostly monotone movements.
    pub const ELBOW_V2: Self = Self([1.0, 0.5, -6.7, 53.1, -240.1, 454.1, -376.9, 115.1]);
    /// Quintic smoothstep `10u^3 - 15u^4 + 6u^5`. Not fitted to any
    /// recording; used as the forearm-rotation default.
    pub const SMOOTHSTEP5: Self = Self([0.0, 0.0, 0.0, 10.0, -15.0, 6.0, 0.0, 0.0]);

    pub fn from_slice(coefs: &[f64]) -> Result<Self> {
        let arr: [f64; 8] = coefs.try_into().map_err(|_| {
            Error::InvalidParameter(format!(
                "polynomial needs exactly 8 coefficients, got {}",
                coefs.len()
            ))
        })?;
        if arr.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite polynomial coefficient".into(),
            ));
        }
        Ok(Self(arr))
    }

    pub fn coefficients(&self) -> &[f64; 8] {
        &self.0
    }

    /// Horner evaluation without a domain check.
    #[inline]
    pub(crate) fn value(&self, u: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    #[default]
    Anchored,
    Literal,
}

/// Boundary data for one joint motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    /// Start angle, radians.
    pub j0: f64,
    /// End angle, radians.
    pub je: f64,
    /// Duration, seconds.
    pub te: f64,
    /// Robot constant scaling the amplitude.
    pub rc: f64,
    pub mode: EvalMode,
}

impl ProfileParams {
    pub fn new(j0: f64, je: f64, te: f64) -> Result<Self> {
        Self::with(j0, je, te, 1.0, EvalMode::Anchored)
    }

    pub fn with(j0: f64, je: f64, te: f64, rc: f64, mode: EvalMode) -> Result<Self> {
        let p = Self {
            j0,
            je,
            te,
            rc,
            mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j0.is_finite() && self.je.is_finite()) {
            return Err(Error::InvalidParameter(
                "start/end angles must be finite".into(),
            ));
        }
        if !(self.te.is_finite() && self.te > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {}",
                self.te
            )));
        }
        if !(self.rc.is_finite() && self.rc > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "robot constant must be positive, got {}",
                self.rc
            )));
        }
        Ok(())
    }

    /// Maps `t` in `[0, te]` onto `[0, 1]`.
    pub fn normalized_time(&self, t: f64) -> Result<f64> {
        self.validate()?;
        if !(0.0..=self.te).contains(&t) {
            return Err(Error::Domain {
                what: "t",
                value: t,
                lo: 0.0,
                hi: self.te,
            });
        }
        Ok((t / self.te).clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElbowVariant {
    #[default]
    V1,
    V2,
}

impl ElbowVariant {
    pub fn coefficients(self) -> PolyCoefficients {
        match self {
            ElbowVariant::V1 => PolyCoefficients::ELBOW_V1,
            ElbowVariant::V2 => PolyCoefficients::ELBOW_V2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForearmDirection {
    #[default]
    Pronation,
    Supination,
}

/// Primitive identity without variant data; used as a mapping key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    ShoulderFlexion,
    #[serde(alias = "adduction")]
    ShoulderAdduction,
    #[serde(alias = "elbow")]
    ElbowFlexion,
    #[serde(alias = "forearm")]
    ForearmRotation,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 4] = [
        PrimitiveKind::ShoulderFlexion,
        PrimitiveKind::ShoulderAdduction,
        PrimitiveKind::ElbowFlexion,
        PrimitiveKind::ForearmRotation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::ShoulderFlexion => "shoulder_flexion",
            PrimitiveKind::ShoulderAdduction => "shoulder_adduction",
            PrimitiveKind::ElbowFlexion => "elbow_flexion",
            PrimitiveKind::ForearmRotation => "forearm_rotation",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "shoulder_flexion" | "shoulder" => Ok(PrimitiveKind::ShoulderFlexion),
            "shoulder_adduction" | "adduction" => Ok(PrimitiveKind::ShoulderAdduction),
            "elbow_flexion" | "elbow" => Ok(PrimitiveKind::ElbowFlexion),
            "forearm_rotation" | "forearm" => Ok(PrimitiveKind::ForearmRotation),
            other => Err(Error::InvalidParameter(format!(
                "unknown primitive '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One elementary joint motion of the handover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionPrimitive {
    ShoulderFlexion,
    ShoulderAdduction,
    ElbowFlexion(ElbowVariant),
    ForearmRotation(ForearmDirection),
}

impl MotionPrimitive {
    pub fn kind(self) -> PrimitiveKind {
        match self {
            MotionPrimitive::ShoulderFlexion => PrimitiveKind::ShoulderFlexion,
            MotionPrimitive::ShoulderAdduction => PrimitiveKind::ShoulderAdduction,
            MotionPrimitive::ElbowFlexion(_) => PrimitiveKind::ElbowFlexion,
            MotionPrimitive::ForearmRotation(_) => PrimitiveKind::ForearmRotation,
        }
    }
}

fn check_unit(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "u",
            value: u,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

pub fn eval_sigmoid(coef: &SigmoidCoefficients, u: f64) -> Result<f64> {
    check_unit(u)?;
    Ok(coef.value(u))
}

pub fn eval_poly7(coef: &PolyCoefficients, u: f64) -> Result<f64> {
    check_unit(u)?;
    Ok(coef.value(u))
}

fn sigmoid_angle(p: &ProfileParams, coef: &SigmoidCoefficients, t: f64) -> Result<f64> {
    coef.validate()?;
    let u = p.normalized_time(t)?;
    let amplitude = (p.je - p.j0) * p.rc;
    Ok(match p.mode {
        EvalMode::Literal => amplitude * coef.value(u) + p.j0,
        EvalMode::Anchored => {
            let f0 = coef.value(0.0);
            let f1 = coef.value(1.0);
            p.j0 + amplitude * (coef.value(u) - f0) / (f1 - f0)
        }
    })
}

/// Shoulder flexion angle at time `t` using the fitted sigmoid.
pub fn shoulder_flexion_angle(p: &ProfileParams, t: f64) -> Result<f64> {
    sigmoid_angle(p, &SigmoidCoefficients::SHOULDER_FLEXION, t)
}

/// Shoulder adduction shares the sigmoid form with caller-supplied coefficients.
pub fn adduction_angle(p: &ProfileParams, coef: &SigmoidCoefficients, t: f64) -> Result<f64> {
    sigmoid_angle(p, coef, t)
}

/// Elbow angle for one of the two published variants.
pub fn elbow_angle(p: &ProfileParams, variant: ElbowVariant, t: f64) -> Result<f64> {
    elbow_angle_with(p, &variant.coefficients(), t)
}

/// Elbow angle for an arbitrary polynomial.
///
/// The curve runs from `f(0)` toward `f(1)`; the anchored form maps those
/// two values onto `j0` and `je` while keeping the interior shape, so an
/// interior minimum below `f(1)` shows up as an overshoot past `je`.
pub fn elbow_angle_with(p: &ProfileParams, coef: &PolyCoefficients, t: f64) -> Result<f64> {
    let u = p.normalized_time(t)?;
    let f = coef.value(u);
    match p.mode {
        EvalMode::Literal => Ok(p.j0 + (p.j0 - p.je) * p.rc * f),
        EvalMode::Anchored => {
            let f0 = coef.value(0.0);
            let f1 = coef.value(1.0);
            let span = f0 - f1;
            if span.abs() < 1e-12 {
                return Err(Error::InvalidParameter(
                    "polynomial has equal values at u=0 and u=1".into(),
                ));
            }
            Ok(p.je + (p.j0 - p.je) * p.rc * (f - f1) / span)
        }
    }
}

/// Forearm pronation/supination. Always anchored; `direction` is a label
/// and the sign of the rotation comes from `je - j0`.
pub fn forearm_angle(
    p: &ProfileParams,
    coef: &PolyCoefficients,
    _direction: ForearmDirection,
    t: f64,
) -> Result<f64> {
    let u = p.normalized_time(t)?;
    let f0 = coef.value(0.0);
    let f1 = coef.value(1.0);
    let span = f1 - f0;
    if span.abs() < 1e-12 {
        return Err(Error::InvalidParameter(
            "polynomial has equal values at u=0 and u=1".into(),
        ));
    }
    Ok(p.j0 + (p.je - p.j0) * p.rc * (coef.value(u) - f0) / span)
}

/// The full set of curves used when generating a handover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileSet {
    pub shoulder_flexion: SigmoidCoefficients,
    pub shoulder_adduction: SigmoidCoefficients,
    pub elbow_v1: PolyCoefficients,
    pub elbow_v2: PolyCoefficients,
    pub forearm: PolyCoefficients,
}

impl Default for ProfileSet {
    fn default() -> Self {
        Self {
            shoulder_flexion: SigmoidCoefficients::SHOULDER_FLEXION,
            shoulder_adduction: SigmoidCoefficients::SHOULDER_FLEXION,
            elbow_v1: PolyCoefficients::ELBOW_V1,
            elbow_v2: PolyCoefficients::ELBOW_V2,
            forearm: PolyCoefficients::SMOOTHSTEP5,
        }
    }
}

impl ProfileSet {
    pub fn elbow(&self, variant: ElbowVariant) -> &PolyCoefficients {
        match variant {
            ElbowVariant::V1 => &self.elbow_v1,
            ElbowVariant::V2 => &self.elbow_v2,
        }
    }

    /// Angle of `primitive` at time `t`.
    pub fn angle(&self, primitive: MotionPrimitive, p: &ProfileParams, t: f64) -> Result<f64> {
        match primitive {
            MotionPrimitive::ShoulderFlexion => sigmoid_angle(p, &self.shoulder_flexion, t),
            MotionPrimitive::ShoulderAdduction => adduction_angle(p, &self.shoulder_adduction, t),
            MotionPrimitive::ElbowFlexion(v) => elbow_angle_with(p, self.elbow(v), t),
            MotionPrimitive::ForearmRotation(d) => forearm_angle(p, &self.forearm, d, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DEG: f64 = std::f64::consts::PI / 180.0;

    fn dense_min(coef: &PolyCoefficients) -> (f64, f64) {
        (0..=10_000)
            .map(|i| {
                let u = i as f64 / 10_000.0;
                (u, coef.value(u))
            })
            .fold(
                (0.0, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            )
    }

    #[test]
    fn sigmoid_reference_values() {
        let c = SigmoidCoefficients::SHOULDER_FLEXION;
        // 30-digit reference evaluation
        assert!((eval_sigmoid(&c, 0.0).unwrap() - 9.041945435006496e-4).abs() < 1e-15);
        assert!((eval_sigmoid(&c, 0.5).unwrap() - 0.36269511208819).abs() < 1e-12);
        assert!((eval_sigmoid(&c, 1.0).unwrap() - 1.01301344236485).abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let c = SigmoidCoefficients::SHOULDER_FLEXION;
        assert!(matches!(eval_sigmoid(&c, -0.01), Err(Error::Domain { .. })));
        assert!(matches!(
            eval_poly7(&PolyCoefficients::ELBOW_V1, 1.01),
            Err(Error::Domain { .. })
        ));
        let p = ProfileParams::new(0.0, 1.0, 2.0).unwrap();
        assert!(shoulder_flexion_angle(&p, 2.0001).is_err());
        assert!(elbow_angle(&p, ElbowVariant::V1, -1e-9).is_err());
    }

    #[test]
    fn poly_endpoints_match_table() {
        assert_eq!(eval_poly7(&PolyCoefficients::ELBOW_V1, 0.0).unwrap(), 1.0);
        assert_eq!(eval_poly7(&PolyCoefficients::ELBOW_V2, 0.0).unwrap(), 1.0);
        assert!((eval_poly7(&PolyCoefficients::ELBOW_V1, 1.0).unwrap() - 0.3).abs() < 1e-9);
        assert!((eval_poly7(&PolyCoefficients::ELBOW_V2, 1.0).unwrap() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn shoulder_examples() {
        let te = 1.3;
        let p = ProfileParams::new(0.0, 50.0 * DEG, te).unwrap();
        assert!(shoulder_flexion_angle(&p, 0.0).unwrap().abs() < 1e-12);
        assert!((shoulder_flexion_angle(&p, te).unwrap() - 50.0 * DEG).abs() < 1e-12);
        let mid = shoulder_flexion_angle(&p, te / 2.0).unwrap() / DEG;
        assert!((mid - 17.87).abs() < 0.01, "{mid}");

        let lit = ProfileParams {
            mode: EvalMode::Literal,
            ..p
        };
        let end = shoulder_flexion_angle(&lit, te).unwrap() / DEG;
        assert!((end - 50.65).abs() < 0.01, "{end}");
    }

    #[test]
    fn elbow_examples() {
        let p = ProfileParams::new(180.0 * DEG, 160.0 * DEG, 0.8).unwrap();
        assert!((elbow_angle(&p, ElbowVariant::V1, 0.0).unwrap() - 180.0 * DEG).abs() < 1e-12);
        assert!((elbow_angle(&p, ElbowVariant::V1, 0.8).unwrap() - 160.0 * DEG).abs() < 1e-12);

        // The dip of V1 carries the angle below the end value.
        let min = (0..=100)
            .map(|i| elbow_angle(&p, ElbowVariant::V1, 0.8 * i as f64 / 100.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min < 160.0 * DEG - 5.0 * DEG);

        // Literal form: f(0) = 1 offsets the start by the full amplitude.
        let lit = ProfileParams {
            mode: EvalMode::Literal,
            ..p
        };
        let start = elbow_angle(&lit, ElbowVariant::V1, 0.0).unwrap();
        assert!((start - 200.0 * DEG).abs() < 1e-12);
    }

    #[test]
    fn v1_curve_geometry() {
        let (u_min, f_min) = dense_min(&PolyCoefficients::ELBOW_V1);
        assert!((0.5..=0.7).contains(&u_min), "{u_min}");
        assert!((f_min - 0.0772).abs() < 1e-3);
        assert!(0.3 - f_min >= 0.15);
    }

    #[test]
    fn v2_curve_geometry() {
        // Dense-grid oracle: minimum at u = 0.743 with value 0.0825.
        let (u_min, f_min) = dense_min(&PolyCoefficients::ELBOW_V2);
        assert!((0.70..=0.80).contains(&u_min), "{u_min}");
        assert!((f_min - 0.0825).abs() < 1e-3);
        assert!(0.1 - f_min <= 0.05);
    }

    #[test]
    fn adduction_default_matches_shoulder_fraction() {
        let p = ProfileParams::new(0.2, 0.7, 1.0).unwrap();
        let q = ProfileParams::new(-1.0, 1.0, 1.0).unwrap();
        let set = ProfileSet::default();
        let fa = (adduction_angle(&p, &set.shoulder_adduction, 0.5).unwrap() - 0.2) / 0.5;
        let fs = (shoulder_flexion_angle(&q, 0.5).unwrap() + 1.0) / 2.0;
        assert!((fa - fs).abs() < 1e-12);
        assert!((adduction_angle(&p, &set.shoulder_adduction, 0.0).unwrap() - 0.2).abs() < 1e-12);
        assert!((adduction_angle(&p, &set.shoulder_adduction, 1.0).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn forearm_smoothstep_midpoint() {
        let p = ProfileParams::new(-0.4, 1.2, 2.0).unwrap();
        let c = PolyCoefficients::SMOOTHSTEP5;
        let d = ForearmDirection::Supination;
        assert!((forearm_angle(&p, &c, d, 0.0).unwrap() + 0.4).abs() < 1e-12);
        assert!((forearm_angle(&p, &c, d, 2.0).unwrap() - 1.2).abs() < 1e-12);
        assert!((forearm_angle(&p, &c, d, 1.0).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn flat_polynomial_cannot_be_anchored() {
        let p = ProfileParams::new(0.0, 1.0, 1.0).unwrap();
        let flat = PolyCoefficients([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(elbow_angle_with(&p, &flat, 0.5).is_err());
        assert!(forearm_angle(&p, &flat, ForearmDirection::Pronation, 0.5).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ProfileParams::new(0.0, 1.0, 0.0).is_err());
        assert!(ProfileParams::with(0.0, 1.0, 1.0, 0.0, EvalMode::Anchored).is_err());
        assert!(ProfileParams::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(SigmoidCoefficients::new(1.0, -1.0, 1.0).is_err());
        assert!(PolyCoefficients::from_slice(&[1.0; 7]).is_err());
    }

    fn primitives() -> [MotionPrimitive; 5] {
        [
            MotionPrimitive::ShoulderFlexion,
            MotionPrimitive::ShoulderAdduction,
            MotionPrimitive::ElbowFlexion(ElbowVariant::V1),
            MotionPrimitive::ElbowFlexion(ElbowVariant::V2),
            MotionPrimitive::ForearmRotation(ForearmDirection::Pronation),
        ]
    }

    proptest! {
        #[test]
        fn anchored_endpoints(j0 in -3.0f64..3.0, je in -3.0f64..3.0, te in 0.05f64..20.0) {
            let p = ProfileParams::new(j0, je, te).unwrap();
            let set = ProfileSet::default();
            for prim in primitives() {
                prop_assert!((set.angle(prim, &p, 0.0).unwrap() - j0).abs() <= 1e-9);
                prop_assert!((set.angle(prim, &p, te).unwrap() - je).abs() <= 1e-9);
            }
        }

        #[test]
        fn sigmoid_strictly_increasing(u in 0.0f64..0.999) {
            let c = SigmoidCoefficients::SHOULDER_FLEXION;
            prop_assert!(eval_sigmoid(&c, u + 0.001).unwrap() > eval_sigmoid(&c, u).unwrap());
        }

        #[test]
        fn shoulder_monotone(j0 in -2.0f64..2.0, je in -2.0f64..2.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let p = ProfileParams::new(j0, je, 1.0).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let d = shoulder_flexion_angle(&p, hi).unwrap() - shoulder_flexion_angle(&p, lo).unwrap();
            prop_assert!(d * (je - j0) >= -1e-15);
        }

        #[test]
        fn time_scaling(k in 0.1f64..10.0, te in 0.1f64..5.0, s in 0.0f64..1.0) {
            let p = ProfileParams::new(0.3, -0.9, te).unwrap();
            let q = ProfileParams::new(0.3, -0.9, k * te).unwrap();
            let set = ProfileSet::default();
            let t = s * te;
            for prim in primitives() {
                let kt = (k * t).min(k * te);
                let a = set.angle(prim, &p, t).unwrap();
                let b = set.angle(prim, &q, kt).unwrap();
                prop_assert!((a - b).abs() < 1e-9, "{prim:?}: {a} vs {b}");
            }
        }

        #[test]
        fn rc_linearity(rc in 0.1f64..3.0, s in 0.0f64..1.0, mode_literal in any::<bool>()) {
            let mode = if mode_literal { EvalMode::Literal } else { EvalMode::Anchored };
            let (j0, je) = (0.4, 1.1);
            let one = ProfileParams::with(j0, je, 1.0, 1.0, mode).unwrap();
            let scaled = ProfileParams::with(j0, je, 1.0, rc, mode).unwrap();
            let sh1 = shoulder_flexion_angle(&one, s).unwrap();
            let shr = shoulder_flexion_angle(&scaled, s).unwrap();
            prop_assert!((shr - (j0 + rc * (sh1 - j0))).abs() < 1e-12);
            if mode == EvalMode::Anchored {
                let e1 = elbow_angle(&one, ElbowVariant::V1, s).unwrap();
                let er = elbow_angle(&scaled, ElbowVariant::V1, s).unwrap();
                prop_assert!((er - (je + rc * (e1 - je))).abs() < 1e-12);
            }
        }
    }
}
