//! Error type shared by every analysis layer.

use crate::series::Rat;

/// Structured failure of an exact computation.
///
/// Input problems (`Parse`, `Input`, `ForbiddenPole`, `BaseMismatch`,
/// `InvalidWeight`) are distinguished from mathematical failures so the
/// command-line front end can map them to different exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("negative exponent in variable `{0}`, which does not admit poles")]
    ForbiddenPole(String),
    #[error("modules live over different base rings")]
    BaseMismatch,
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("series is not a unit")]
    NonUnit,
    #[error("an extension of Q is required ({context}): {poly}")]
    ExtensionRequired { poly: String, context: String },
    #[error("no cyclic vector found after {tried} candidates")]
    CyclicVectorExhausted { tried: usize },
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("working precision too low: {0}")]
    PrecisionExhausted(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("singular Sylvester system at order {order}")]
    SingularSylvester { order: Rat },
    #[error("unsupported general case: {0}")]
    UnsupportedGeneralCase(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-range input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Input(_)
                | Error::ForbiddenPole(_)
                | Error::BaseMismatch
                | Error::InvalidWeight(_)
        )
    }

    /// Short machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Input(_) => "input",
            Error::ForbiddenPole(_) => "forbidden_pole",
            Error::BaseMismatch => "base_mismatch",
            Error::InvalidWeight(_) => "invalid_weight",
            Error::NonUnit => "non_unit",
            Error::ExtensionRequired { .. } => "extension_required",
            Error::CyclicVectorExhausted { .. } => "cyclic_vector_exhausted",
            Error::BudgetExhausted(_) => "budget_exhausted",
            Error::PrecisionExhausted(_) => "precision_exhausted",
            Error::NonConvergence(_) => "non_convergence",
            Error::SingularSylvester { .. } => "singular_sylvester",
            Error::UnsupportedGeneralCase(_) => "unsupported_general_case",
            Error::Precondition(_) => "precondition",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
