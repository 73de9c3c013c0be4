use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad user input: malformed config, unknown keys, invalid parameters.
    Config,
    /// The physics is ill-posed at this point: degeneracies, dark states,
    /// integrator trouble.
    Physics,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown geometry `{0}` (expected nested, braided, separated or small)")]
    UnknownGeometry(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{atoms} atoms exceeds the dense-representation cap of {max}")]
    TooManyAtoms { atoms: usize, max: usize },

    #[error("decay matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    NotPositiveSemidefinite { eigenvalue: f64, tolerance: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("degenerate dressed states: {0}")]
    Degenerate(String),

    #[error("rate extraction requires an undriven model (drive terms present in the Hamiltonian)")]
    DrivenModel,

    #[error("integrator accuracy lost at t = {time}: minimum eigenvalue {min_eigenvalue:e}")]
    IntegratorAccuracy { time: f64, min_eigenvalue: f64 },

    #[error(
        "steady state is not unique (uniqueness margin {margin:e} < {threshold:e}); \
         propagate to convergence from the initial state of interest instead"
    )]
    DegenerateSteadyState { margin: f64, threshold: f64 },

    #[error("emitted intensity {intensity:e} vanishes: correlation function undefined")]
    DarkState { intensity: f64 },

    #[error("invalid SLH triplet: {0}")]
    InvalidTriplet(String),

    #[error("SLH export failed: {0}")]
    SlhExport(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_)
            | Error::UnknownGeometry(_)
            | Error::DimensionMismatch { .. }
            | Error::TooManyAtoms { .. }
            | Error::InvalidState(_)
            | Error::InvalidTriplet(_)
            | Error::Config(_) => ErrorKind::Config,
            Error::NotPositiveSemidefinite { .. }
            | Error::Degenerate(_)
            | Error::DrivenModel
            | Error::IntegratorAccuracy { .. }
            | Error::DegenerateSteadyState { .. }
            | Error::DarkState { .. }
            | Error::SlhExport(_) => ErrorKind::Physics,
            Error::Context { source, .. } => source.kind(),
            Error::Io(_) | Error::Csv(_) => ErrorKind::Io,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite, got {value}")))
    }
}
