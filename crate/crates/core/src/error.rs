use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Reflection closure did not terminate within the element cap.
    ClosureOverflow { limit: usize },
    /// Root data failed validation.
    InvalidRootSystem(&'static str),
    /// Generic invalid argument (non-positive time, empty grid, ...).
    InvalidInput(&'static str),
    /// A continued spherical function was requested on its singular set.
    SingularPoint { jc_half: f64 },
    /// Argument outside the domain where the requested formula is valid.
    DomainError { what: &'static str, value: f64, limit: f64 },
    /// Adaptive refinement ran out of panels before meeting the tolerance.
    QuadratureFailure { panels: usize, estimate: f64, error: f64 },
    /// Power series tail bound not met within the allowed number of terms.
    SeriesNotConverged { terms: usize, tail: f64 },
    /// Integrand growth is not dominated by the spectral decay at the cutoff.
    GrowthError { xi_cutoff: f64, integrand: f64 },
    /// Finite-difference eigenfunction test failed.
    NotAnEigenfunction { residual: f64 },
    /// The tube-limit finiteness criterion fails: the function is not in the
    /// image of the heat operator.
    FiniteLimitAbsent,
    /// Shift-operator calibration residual above tolerance.
    CalibrationFailure { residual: f64 },
    /// Sampled data too short to contain the Gaussian tail.
    TruncationError { tail: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ClosureOverflow { limit } => {
                write!(f, "reflection closure exceeded {limit} elements")
            }
            Error::InvalidRootSystem(why) => write!(f, "invalid root system: {why}"),
            Error::InvalidInput(why) => write!(f, "invalid input: {why}"),
            Error::SingularPoint { jc_half } => {
                write!(f, "singular point of the continued spherical function (j^c^1/2 = {jc_half:e})")
            }
            Error::DomainError { what, value, limit } => {
                write!(f, "{what} = {value} outside the valid domain (limit {limit})")
            }
            Error::QuadratureFailure { panels, estimate, error } => write!(
                f,
                "quadrature did not converge after {panels} panels (estimate {estimate:e}, error {error:e})"
            ),
            Error::SeriesNotConverged { terms, tail } => {
                write!(f, "series not converged after {terms} terms (tail bound {tail:e})")
            }
            Error::GrowthError { xi_cutoff, integrand } => write!(
                f,
                "integrand not dominated at spectral cutoff {xi_cutoff} (value {integrand:e})"
            ),
            Error::NotAnEigenfunction { residual } => {
                write!(f, "function fails the Laplacian eigenfunction test (residual {residual:e})")
            }
            Error::FiniteLimitAbsent => {
                f.write_str("tube limit is infinite: function is not in the heat-operator image")
            }
            Error::CalibrationFailure { residual } => {
                write!(f, "shift operator calibration residual {residual:e} above tolerance")
            }
            Error::TruncationError { tail } => {
                write!(f, "Gaussian tail {tail:e} at the grid edge exceeds tolerance")
            }
        }
    }
}

impl core::error::Error for Error {}
