//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Syntax error in a DSL expression, with a byte offset into the source.
    Parse {
        offset: usize,
        message: String,
    },
    /// Expression references a name outside the declared variable list.
    UnknownVariable {
        name: String,
        offset: usize,
    },
    /// sqrt/log of a non-positive value, or differentiating `abs` at zero.
    Domain {
        what: String,
    },
    DivisionByZero,
    /// Requested jet order outside the supported range.
    JetOrder {
        requested: usize,
        max: usize,
    },
    /// Metric determinant below the degeneracy threshold at a point.
    DegenerateMetric {
        det: f64,
    },
    /// Induced metric rank is not m: not a lightlike hypersurface.
    NotLightlike {
        rank: usize,
        expected: usize,
    },
    /// Induced metric is non-degenerate: no radical direction exists.
    NonDegenerate,
    /// A manifest-supplied radical field does not lie in the Gram kernel.
    XiNotInKernel {
        residual: f64,
    },
    /// Screen Gram matrix is degenerate at the evaluation point.
    DegenerateScreen {
        det: f64,
    },
    /// Gram–Schmidt pivot collapsed; screen basis cannot be orthonormalised.
    GramSchmidtBreakdown {
        pivot: f64,
    },
    /// A dense linear solve hit a singular matrix.
    SingularSystem {
        what: String,
    },
    /// Embedding Jacobian not of full rank at the evaluation point.
    DegenerateJacobian,
    /// Sparse difference-tensor entry with an index outside the dimension.
    IndexOutOfRange {
        index: usize,
        dim: usize,
    },
    /// Two sparse entries sort to the same triple but disagree.
    AsymmetricK {
        triple: [usize; 3],
    },
    /// Generic invalid-input condition, described in the message.
    Invalid {
        message: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { offset, message } => {
                write!(f, "syntax error at byte {offset}: {message}")
            }
            Error::UnknownVariable { name, offset } => {
                write!(f, "unknown variable `{name}` at byte {offset}")
            }
            Error::Domain { what } => write!(f, "domain error: {what}"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::JetOrder { requested, max } => {
                write!(f, "jet order {requested} exceeds maximum {max}")
            }
            Error::DegenerateMetric { det } => {
                write!(f, "metric degenerate at evaluation point (det = {det:e})")
            }
            Error::NotLightlike { rank, expected } => write!(
                f,
                "induced metric has rank {rank}, expected {expected} (nullity degree 1)"
            ),
            Error::NonDegenerate => {
                write!(f, "induced metric is non-degenerate: not a lightlike hypersurface")
            }
            Error::XiNotInKernel { residual } => write!(
                f,
                "supplied radical field is not in the kernel of the induced metric (residual {residual:e})"
            ),
            Error::DegenerateScreen { det } => {
                write!(f, "screen Gram matrix degenerate (det = {det:e})")
            }
            Error::GramSchmidtBreakdown { pivot } => write!(
                f,
                "Gram-Schmidt breakdown (pivot {pivot:e}); reorder or choose a different screen"
            ),
            Error::SingularSystem { what } => write!(f, "singular linear system: {what}"),
            Error::DegenerateJacobian => write!(f, "embedding Jacobian rank-deficient"),
            Error::IndexOutOfRange { index, dim } => {
                write!(f, "tensor index {index} out of range for dimension {dim}")
            }
            Error::AsymmetricK { triple } => write!(
                f,
                "difference-tensor entries disagree for sorted triple ({},{},{})",
                triple[0], triple[1], triple[2]
            ),
            Error::Invalid { message } => write!(f, "{message}"),
        }
    }
}

#[cfg(any(test, feature = "std"))]
impl std::error::Error for Error {}
