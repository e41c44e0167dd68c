use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("factor label `{0}` appears twice")]
    LabelCollision(String),
    #[error("no factor labeled `{0}`")]
    UnknownFactor(String),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid clock dimension {0}: need an even dimension of at least 2")]
    InvalidDimension(usize),
    #[error("invalid time spacing {0}")]
    InvalidSpacing(f64),
    #[error("profile width must be positive, got {0}")]
    InvalidWidth(f64),
    #[error("time {value} is not on the grid of clock `{clock}`")]
    OffGridTime { clock: String, value: f64 },
    #[error("constraint holds an instantaneous kick; use the propagator path")]
    RequiresPropagatorPath,
    #[error("constraint has no zero eigenvalue within tolerance {0:e}")]
    NoPhysicalStates(f64),
    #[error("spectrum is not commensurate with a common base frequency")]
    NotCommensurate,
    #[error("group average needs at least {needed} steps, got {got}")]
    TooFewSteps { needed: usize, got: usize },
    #[error("conditional state vanishes at clock `{clock}` reading {tau}")]
    DegenerateNormalization { clock: String, tau: f64 },
    #[error("kinematical state is not of the supported seed form: {0}")]
    UnsupportedKinematicalForm(String),
    #[error("kick width {sigma} is below two grid spacings ({dt})")]
    UnresolvableWidth { sigma: f64, dt: f64 },
    #[error("kick schedule invalid: {0}")]
    InvalidSchedule(String),
    #[error("readout time {readout} must come after the measurement at {measurement}")]
    BadReadoutTime { readout: f64, measurement: f64 },
    #[error("profile peaks overlap: offset {offset} is below 3 sigma ({sigma})")]
    IndistinctBranches { offset: f64, sigma: f64 },
    #[error("kick separation {separation} does not exceed 3 sigma ({sigma}); order is not defined")]
    OrderNotDefined { separation: f64, sigma: f64 },
    #[error("reading {0} is too close to the clock wrap-around")]
    GuardGapViolation(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
