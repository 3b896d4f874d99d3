use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        context: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A configuration the chosen scheme cannot handle, e.g. a nullspace
    /// design without spare transmit antennas.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("{context}: matrix is not positive definite (eigenvalues in [{min_eig:e}, {max_eig:e}])")]
    NotPositiveDefinite {
        context: &'static str,
        min_eig: f64,
        max_eig: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("division by a vanishing denominator in {0}")]
    VanishingDenominator(&'static str),

    #[error("degenerate alignment: kappa = {kappa} is too close to 1")]
    DegenerateAlignment { kappa: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidParameter(_)
                | Error::Unsupported(_)
                | Error::DimensionMismatch { .. }
                | Error::Io(_)
        )
    }
}
