use alloc::string::String;
use core::fmt;

/// Errors shared by every module: precondition violations on the input side,
/// numeric assertion failures on the output side.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied parameter violates a documented precondition.
    InvalidParameter { what: &'static str, details: String },
    /// A built-in numeric cross-check failed (closed form vs quadrature,
    /// normalization defect, residual imaginary part, ...).
    NumericAssertion { what: &'static str, details: String },
    /// Coefficient data is not conjugate-symmetric within tolerance.
    SymmetryViolation { defect: f64, tolerance: f64 },
    /// Evaluation grid is empty or not uniform.
    GridError { details: String },
    /// The bracket handed to the beta optimizer has its minimum on the
    /// boundary; carries the boundary minimizer as a diagnostic.
    NoInteriorMinimum { boundary_beta: f64, objective: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { what, details } => {
                write!(f, "invalid parameter {what}: {details}")
            }
            Error::NumericAssertion { what, details } => {
                write!(f, "numeric assertion failed in {what}: {details}")
            }
            Error::SymmetryViolation { defect, tolerance } => {
                write!(
                    f,
                    "coefficients not conjugate-symmetric: defect {defect:e} exceeds {tolerance:e}"
                )
            }
            Error::GridError { details } => write!(f, "grid error: {details}"),
            Error::NoInteriorMinimum {
                boundary_beta,
                objective,
            } => {
                write!(
                    f,
                    "no interior minimum in bracket; boundary minimizer beta = {boundary_beta} \
                     (objective {objective})"
                )
            }
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub(crate) fn invalid(what: &'static str, details: String) -> Self {
        Error::InvalidParameter { what, details }
    }

    pub(crate) fn numeric(what: &'static str, details: String) -> Self {
        Error::NumericAssertion { what, details }
    }

    /// True for errors that signal a failed numeric self-check rather than
    /// bad input; front ends map these to a distinct exit code.
    pub fn is_numeric_assertion(&self) -> bool {
        matches!(
            self,
            Error::NumericAssertion { .. } | Error::SymmetryViolation { .. }
        )
    }
}
