//! Shared helpers for the integration and acceptance suites: seeded
//! random tensors and certificates, and small independent oracles.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trimat::{EquivCertificate, ExactMatrix, FieldElement, FieldSpec, SpatialMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random element; over ℚ both numerator and denominator are bounded
/// by `bound`.
pub fn random_element(rng: &mut ChaCha8Rng, spec: FieldSpec, bound: i64) -> FieldElement {
    match spec.modulus() {
        Some(p) => spec.from_integer(rng.gen_range(0..p) as i64),
        None => {
            let num = rng.gen_range(-bound..=bound);
            let den = rng.gen_range(1..=bound);
            spec.from_fraction(num, den).expect("positive denominator")
        }
    }
}

pub fn random_tensor(
    rng: &mut ChaCha8Rng,
    spec: FieldSpec,
    dims: [usize; 3],
    bound: i64,
) -> SpatialMatrix {
    let entries = (0..dims[0] * dims[1] * dims[2])
        .map(|_| random_element(rng, spec, bound))
        .collect();
    SpatialMatrix::new(spec, dims, entries).expect("entry count matches dims")
}

pub fn random_nonsingular(
    rng: &mut ChaCha8Rng,
    spec: FieldSpec,
    size: usize,
    bound: i64,
) -> ExactMatrix {
    loop {
        let mut m = ExactMatrix::zero(spec, size, size);
        for i in 0..size {
            for j in 0..size {
                m[(i, j)] = random_element(rng, spec, bound);
            }
        }
        if m.is_nonsingular() {
            return m;
        }
    }
}

pub fn random_certificate(
    rng: &mut ChaCha8Rng,
    spec: FieldSpec,
    dims: [usize; 3],
    bound: i64,
) -> EquivCertificate {
    EquivCertificate::new(
        random_nonsingular(rng, spec, dims[0], bound),
        random_nonsingular(rng, spec, dims[1], bound),
        random_nonsingular(rng, spec, dims[2], bound),
    )
    .expect("components are nonsingular by construction")
}

/// Independent square-class oracle over GF(p): a ~ b iff a = b·z² for
/// some nonzero z, decided by enumeration.
pub fn same_square_class_brute(p: u64, a: u64, b: u64) -> bool {
    if a == 0 || b == 0 {
        return a == b;
    }
    (1..p).any(|z| (b * z % p) * z % p == a)
}

/// ‖I₂ | B(a)‖ over the given field.
pub fn slice_pair_tensor(spec: FieldSpec, a: &FieldElement) -> SpatialMatrix {
    let first = ExactMatrix::identity(spec, 2);
    let mut second = ExactMatrix::zero(spec, 2, 2);
    second[(0, 1)] = a.clone();
    second[(1, 0)] = spec.one();
    SpatialMatrix::from_mode3_slices(spec, 2, 2, &[first, second])
        .expect("slices are well-formed")
}
