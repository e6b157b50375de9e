use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptySet,
    DegenerateCurve,
    NonInjective,
    NonInjectiveSample,
    CollapsedNode,
    OutOfDomain,
    Orientation,
    DegenerateOrbit,
    Pole,
    BoundaryNotPreserved { deviation: f64 },
    OrbitMatchingFailed,
    InvalidInitialExtension,
    DegeneratePath,
    GridMismatch,
    NotBijective,
    SquareHole,
    NoFixedPoint,
    Resolution,
    NotPeriodic { residual: f64 },
    NoConvergence { residual: f64 },
    /// A named hypothesis of a rigidity pipeline failed.
    Hypothesis { name: &'static str, detail: String },
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySet => f.write_str("empty set"),
            Error::DegenerateCurve => f.write_str("degenerate curve"),
            Error::NonInjective => f.write_str("non-injective"),
            Error::NonInjectiveSample => f.write_str("non-injective sample"),
            Error::CollapsedNode => f.write_str("collapsed node"),
            Error::OutOfDomain => f.write_str("out of domain"),
            Error::Orientation => f.write_str("orientation"),
            Error::DegenerateOrbit => {
                f.write_str("degenerate orbit: choose different u0 or reduce k")
            }
            Error::Pole => f.write_str("pole"),
            Error::BoundaryNotPreserved { deviation } => {
                write!(f, "boundary not preserved (deviation {deviation:e})")
            }
            Error::OrbitMatchingFailed => f.write_str("orbit matching failed"),
            Error::InvalidInitialExtension => f.write_str("invalid initial extension"),
            Error::DegeneratePath => f.write_str("degenerate path"),
            Error::GridMismatch => f.write_str("grid mismatch"),
            Error::NotBijective => f.write_str("pairing is not a bijection"),
            Error::SquareHole => f.write_str("square hole: use the square-case theorem"),
            Error::NoFixedPoint => f.write_str("no fixed point: lemma hypotheses unmet"),
            Error::Resolution => f.write_str("resolution"),
            Error::NotPeriodic { residual } => write!(f, "not periodic (residual {residual:e})"),
            Error::NoConvergence { residual } => {
                write!(f, "local solve did not converge (residual {residual:e})")
            }
            Error::Hypothesis { name, detail } => write!(f, "hypothesis `{name}` failed: {detail}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
