use thiserror::Error;

use crate::distribution::InvolutivityWitness;
use crate::fields::VectorField;
use crate::io::parse::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("degree vectors of different length ({0} vs {1})")]
    Dimension(usize, usize),
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("cannot integrate along odd coordinate `{0}`")]
    OddIntegration(String),
    #[error("inhomogeneous input: {0}")]
    Homogeneity(String),
    #[error("coordinate change is not centered: image of `{0}` does not vanish at the base point")]
    Centering(String),
    #[error("matrix is not invertible at the base point")]
    NotInvertibleModJ,
    #[error("tangent vectors are linearly dependent at the base point")]
    DependentAtPoint,
    #[error("Jacobian of the coordinate change is singular at the base point")]
    JacobianSingular,
    #[error("vector field vanishes at the base point")]
    DegenerateAtPoint,
    #[error("expected a vector field of degree zero")]
    NonzeroDegree,
    #[error("expected a vector field of nonzero degree")]
    ZeroDegree,
    #[error("odd vector field does not square to zero")]
    OddSquareNonzero,
    #[error("fields {left} and {right} do not supercommute")]
    NotCommuting {
        left: usize,
        right: usize,
        bracket: Box<VectorField>,
    },
    #[error("distribution is not involutive (bracket of generators {} and {})", .0.left, .0.right)]
    NotInvolutive(Box<InvolutivityWitness>),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Stable name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(..) => "DimensionError",
            Error::ChartMismatch => "ChartError",
            Error::UnknownCoordinate(_) => "UnknownCoordinate",
            Error::OddIntegration(_) => "OddIntegrationError",
            Error::Homogeneity(_) => "HomogeneityError",
            Error::Centering(_) => "CenteringError",
            Error::NotInvertibleModJ => "NotInvertibleModJ",
            Error::DependentAtPoint => "DependentAtPoint",
            Error::JacobianSingular => "JacobianSingular",
            Error::DegenerateAtPoint => "DegenerateAtPoint",
            Error::NonzeroDegree => "NonzeroDegree",
            Error::ZeroDegree => "ZeroDegree",
            Error::OddSquareNonzero => "OddSquareNonzero",
            Error::NotCommuting { .. } => "NotCommuting",
            Error::NotInvolutive(_) => "NotInvolutive",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::Parse(_) => "ParseError",
            Error::Format(_) => "FormatError",
        }
    }
}
