use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not skew-symmetric (symmetric part {sym_norm:e})")]
    NotSkew { sym_norm: f64 },

    #[error("rotation angle {angle} exceeds the logarithm's range")]
    OutOfRange { angle: f64 },

    #[error("invalid perturbation step h = {h:e}; need 0 < h <= 1e-20")]
    InvalidStep { h: f64 },

    #[error("differentiated map returned a non-finite value{}", column.map(|c| format!(" in column {c}")).unwrap_or_default())]
    NonFiniteResult { column: Option<usize> },

    #[error("degenerate element geometry: {0}")]
    DegenerateGeometry(String),

    #[error("unsupported element kind {0}")]
    UnsupportedKind(String),

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("element side has zero length")]
    DegenerateSide,

    #[error("node configuration is rank deficient")]
    DegenerateConfiguration,

    #[error("element is inverted (det F = {det:e})")]
    InvertedElement { det: f64 },

    #[error("frame nodes are collinear")]
    CollinearNodes,

    #[error("beam auxiliary vector is parallel to the element axis")]
    DegenerateAuxiliary,

    #[error("shell diagonals are parallel")]
    DegenerateDiagonals,

    #[error("frame strategy {strategy} cannot be used with element kind {kind}")]
    IncompatibleFrame { strategy: String, kind: String },

    #[error("weight case {case} requires rotational degrees of freedom")]
    IncompatibleWeightCase { case: String },

    #[error("local rotation {angle} is too large for the current increment")]
    StepTooLarge { angle: f64 },

    #[error("Schur complement of the constraint metric is singular")]
    SingularSchur,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("tangent matrix is singular")]
    SingularTangent,

    #[error("no convergence at load step {step} (load factor {load_factor})")]
    NoConvergence { step: usize, load_factor: f64 },

    #[error("element {element}: {source}")]
    Element { element: usize, source: Box<Error> },

    #[error("unknown benchmark '{0}'")]
    UnknownBenchmark(String),

    #[error("unknown {what} '{name}'")]
    UnknownName { what: &'static str, name: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Innermost error, looking through element wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Element { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures that a smaller load increment may cure.
    pub fn is_recoverable(&self) -> bool {
        matches!(
            self.root(),
            Error::StepTooLarge { .. }
                | Error::SingularTangent
                | Error::SingularMatrix
                | Error::NoConvergence { .. }
                | Error::InvertedElement { .. }
                | Error::OutOfRange { .. }
                | Error::NonFiniteResult { .. }
                | Error::SingularSchur
                | Error::DegenerateAuxiliary
                | Error::DegenerateConfiguration
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
