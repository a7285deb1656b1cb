use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A profile or sample time was evaluated outside its defined interval.
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown robot '{0}'")]
    UnknownRobot(String),

    #[error("primitive '{0}' has no joint in the mapping")]
    UnmappedPrimitive(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("keypoints have no depth coordinate")]
    MissingDepth,

    #[error("missing keypoint '{0}'")]
    MissingKeypoint(String),

    #[error("lost track at frame {frame}: no skeleton within {radius} of the last position")]
    LostTrack { frame: usize, radius: f64 },

    #[error("no motion detected (peak speed {peak_speed:.3e} rad/s)")]
    NoMotion { peak_speed: f64 },

    #[error("series has zero amplitude")]
    ZeroAmplitude,

    #[error("data has zero variance")]
    ZeroVariance,

    #[error("need at least {required} samples, got {actual}")]
    TooFewSamples { required: usize, actual: usize },

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("normal equations stayed singular after damping escalation")]
    SingularJacobian,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from invalid user input rather than a failed
    /// computation. The CLI maps these to its usage exit code.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::UnknownRobot(_)
                | Error::UnmappedPrimitive(_)
                | Error::DimensionMismatch { .. }
                | Error::Parse(_)
                | Error::Json(_)
                | Error::Csv(_)
        )
    }
}
