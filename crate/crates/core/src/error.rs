//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Division or inversion by the zero element.
    #[error("division by zero")]
    DivisionByZero,

    /// Two values from different fields were combined.
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    /// GF(2) (or any even modulus) is rejected: the classification needs
    /// to divide by two.
    #[error("characteristic-two field GF({0}) is not supported")]
    CharacteristicTwo(u64),

    /// The requested prime-field modulus is not prime.
    #[error("modulus {0} is not an odd prime")]
    NotPrime(u64),

    /// The integer whose square part must be removed exceeds the
    /// trial-division bound.
    #[error("integer {0} exceeds the factorization bound {1}")]
    FactorizationOverflow(String, String),

    /// A square matrix required to be invertible is singular.
    #[error("singular matrix")]
    SingularMatrix,

    /// Incompatible dimensions.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A certificate component is singular.
    #[error("certificate matrices must be nonsingular")]
    SingularCertificate,

    /// The operation requires a regular spatial matrix.
    #[error("spatial matrix is not regular")]
    NotRegular,

    /// A regular shape outside the classified catalogue. Unreachable for
    /// inputs with n ≤ 2 and q ≤ 2.
    #[error("no canonical form for regular shape {0}×{1}×{2}")]
    UnsupportedShape(usize, usize, usize),

    /// Mode ranks n′ or q′ exceed 2. Tensors with three or more
    /// independent slices fall into the wild classification regime and
    /// admit no canonical form here.
    #[error(
        "mode ranks n'={n_rank}, q'={q_rank} are unsupported: \
         classification with more than two independent slices is wild"
    )]
    UnsupportedRanks { n_rank: usize, q_rank: usize },

    /// The operation needs a (small) prime field.
    #[error("operation requires a prime field, got {0}")]
    UnsupportedField(String),

    /// The exhaustive enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {needed} states > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    /// A condition the theory guarantees failed; indicates a bug.
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    /// Malformed JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::InternalInvariant(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
