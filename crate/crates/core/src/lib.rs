//! Exact classification of m×n×q spatial matrices (three-index arrays of
//! field elements) with n ≤ 2 and q ≤ 2, under the equivalence induced by
//! independent nonsingular basis changes on the three index spaces.
//!
//! Everything is computed in exact arithmetic over ℚ or GF(p) for an odd
//! prime p. The central entry points are:
//!
//! * [`canonicalizer::canonicalize`] — reduces a tensor to its canonical
//!   regularized form, together with an explicit certificate (a triple of
//!   nonsingular matrices) that witnesses the reduction and can be
//!   replayed independently;
//! * [`canonicalizer::are_equivalent`] — decides equivalence of two
//!   tensors by comparing canonical labels;
//! * [`oracle::classify_all`] — brute-force ground truth: partitions the
//!   full tensor space over a small finite field into orbits of the
//!   equivalence group, independently of the canonicalizer.

pub mod canonicalizer;
pub mod error;
pub mod exactmat;
pub mod field;
pub mod json;
pub mod oracle;
pub mod regularizer;
pub mod spatial;

pub use canonicalizer::{
    are_equivalent, canonicalize, canonicalize_regular, pencil_min_rank, verify_certificate,
    CanonResult, CanonicalLabel,
};
pub use error::Error;
pub use exactmat::{rank_of_span, ExactMatrix, Rref, SpanRank};
pub use field::{FieldElement, FieldSpec};
pub use oracle::{
    classify_all, decode_tensor, encode_tensor, gl_generators, orbit, Classification,
};
pub use regularizer::{embed_regular, regularize, Regularized};
pub use spatial::{EquivCertificate, ModeRanks, ReductionStep, SpatialMatrix};
