//! Human-like handover arm motions built from per-joint motion profiles.
//!
//! The crate covers the whole loop:
//!
//! - [`profiles`]: normalized sigmoid and degree-7 polynomial curves and the
//!   joint-angle models built on them.
//! - [`kinematics`]: serial-chain arm descriptions, primitive-to-joint
//!   mapping and forward kinematics.
//! - [`trajectory`]: sampled profile-based and linear joint-space
//!   trajectories plus comparison metrics.
//! - [`analysis`]: joint angles from skeleton keypoints, smoothing,
//!   segmentation, normalization and elbow-variant classification.
//! - [`fitting`]: Levenberg-Marquardt sigmoid fits and least-squares
//!   polynomial fits that re-derive the profile coefficients.

// `!(a < b)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fitting;
mod interp;
pub mod kinematics;
pub mod profiles;
pub mod trajectory;

pub use error::{Error, Result};
pub use kinematics::{
    builtin_robot, forward_kinematics, map_primitives, PrimitiveMapping, RobotModel,
};
pub use profiles::{
    ElbowVariant, EvalMode, ForearmDirection, MotionPrimitive, PolyCoefficients, PrimitiveKind,
    ProfileParams, ProfileSet, SigmoidCoefficients,
};
