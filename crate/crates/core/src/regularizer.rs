//! Regularized form and regular part of a spatial matrix, with a
//! certificate.
//!
//! One pass per mode, in the fixed order mode-3, mode-2, mode-1: each
//! pass changes basis so that the first r flattening matrices of that
//! mode are the lexicographically first independent ones and the rest
//! are zero. Later passes act inside slices and cannot disturb the zeros
//! produced earlier, so a single sweep leaves everything outside the
//! leading m′×n′×q′ corner zero.

use crate::error::Error;
use crate::exactmat::{stack_as_columns, ExactMatrix};
use crate::field::FieldSpec;
use crate::spatial::{EquivCertificate, ReductionStep, SpatialMatrix};

/// Output of [`regularize`]: `regularized = apply_equivalence(input, cert)`,
/// zero outside the leading corner, whose content is `regular_part`.
#[derive(Clone, Debug)]
pub struct Regularized {
    pub regularized: SpatialMatrix,
    pub cert: EquivCertificate,
    pub regular_part: SpatialMatrix,
    pub steps: Vec<ReductionStep>,
}

/// Brings `a` to a regularized form.
///
/// Already-regular inputs come back unchanged with the identity
/// certificate, so canonical tensors are fixed points.
pub fn regularize(a: &SpatialMatrix) -> Result<Regularized, Error> {
    regularize_with_ranks(a, a.mode_ranks())
}

/// [`regularize`] with the mode ranks already in hand, so callers that
/// computed them for gating do not pay for them twice.
pub(crate) fn regularize_with_ranks(
    a: &SpatialMatrix,
    ranks: crate::spatial::ModeRanks,
) -> Result<Regularized, Error> {
    let spec = a.spec();
    let dims = a.dims();

    if ranks.m == dims[0] && ranks.n == dims[1] && ranks.q == dims[2] {
        return Ok(Regularized {
            regularized: a.clone(),
            cert: EquivCertificate::identity(spec, dims),
            regular_part: a.clone(),
            steps: Vec::new(),
        });
    }

    let mut current = a.clone();
    let mut cert = EquivCertificate::identity(spec, dims);
    let mut steps = Vec::new();

    let passes: [(&'static str, fn(&SpatialMatrix) -> Vec<ExactMatrix>, usize); 3] = [
        ("compress_mode3_slices", SpatialMatrix::slices_mode3, 2),
        ("compress_mode2_flattenings", SpatialMatrix::flatten_mode2, 1),
        ("compress_mode1_flattenings", SpatialMatrix::flatten_mode1, 0),
    ];
    for (name, flatten, axis) in passes {
        let transform = span_compression(spec, &flatten(&current))?;
        let id = |n: usize| ExactMatrix::identity(spec, n);
        let step_cert = match axis {
            0 => EquivCertificate::new(transform, id(dims[1]), id(dims[2]))?,
            1 => EquivCertificate::new(id(dims[0]), transform, id(dims[2]))?,
            _ => EquivCertificate::new(id(dims[0]), id(dims[1]), transform)?,
        };
        if step_cert.is_identity() {
            continue;
        }
        current = current.apply_equivalence(&step_cert)?;
        cert = cert.compose(&step_cert)?;
        steps.push(ReductionStep::new(name, step_cert));
    }

    let part_dims = [ranks.m, ranks.n, ranks.q];
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                if (i < part_dims[0] && j < part_dims[1] && k < part_dims[2])
                    || current.get(i, j, k).is_zero()
                {
                    continue;
                }
                return Err(Error::internal(format!(
                    "regularization left a nonzero entry at ({i},{j},{k})"
                )));
            }
        }
    }
    let regular_part = extract_corner(&current, part_dims);
    if !regular_part.is_regular() {
        // Mode ranks are invariants, so the corner must be regular.
        return Err(Error::internal(
            "regular part fails the regularity check".to_string(),
        ));
    }

    Ok(Regularized {
        regularized: current,
        cert,
        regular_part,
        steps,
    })
}

/// Zero-pads `part` into the leading corner of a `dims`-shaped tensor.
pub fn embed_regular(part: &SpatialMatrix, dims: [usize; 3]) -> Result<SpatialMatrix, Error> {
    let pd = part.dims();
    if pd[0] > dims[0] || pd[1] > dims[1] || pd[2] > dims[2] {
        return Err(Error::shape(format!(
            "part dims {pd:?} exceed target dims {dims:?}"
        )));
    }
    let mut out = SpatialMatrix::zero(part.spec(), dims);
    for i in 0..pd[0] {
        for j in 0..pd[1] {
            for k in 0..pd[2] {
                *out.get_mut(i, j, k) = part.get(i, j, k).clone();
            }
        }
    }
    Ok(out)
}

fn extract_corner(tensor: &SpatialMatrix, dims: [usize; 3]) -> SpatialMatrix {
    let mut out = SpatialMatrix::zero(tensor.spec(), dims);
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                *out.get_mut(i, j, k) = tensor.get(i, j, k).clone();
            }
        }
    }
    out
}

/// The nonsingular change of basis that moves the lexicographically
/// first independent flattenings to the front and sends the rest to
/// zero: pivot columns become standard basis vectors, the remaining
/// columns come from the null space of the stacked vectorizations.
fn span_compression(spec: FieldSpec, mats: &[ExactMatrix]) -> Result<ExactMatrix, Error> {
    let count = mats.len();
    if count == 0 {
        return Ok(ExactMatrix::identity(spec, 0));
    }
    let stacked = stack_as_columns(mats)?;
    let reduced = stacked.rref();
    let kernel = stacked.kernel_basis();
    let mut transform = ExactMatrix::zero(spec, count, count);
    for (col, &pivot) in reduced.pivots.iter().enumerate() {
        transform[(pivot, col)] = spec.one();
    }
    for (offset, vector) in kernel.into_iter().enumerate() {
        let col = reduced.pivots.len() + offset;
        for (row, value) in vector.into_iter().enumerate() {
            transform[(row, col)] = value;
        }
    }
    debug_assert!(transform.is_nonsingular());
    Ok(transform)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::ModeRanks;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn zero_tensor_regularizes_to_the_empty_part() {
        let zero = SpatialMatrix::zero(q(), [3, 2, 2]);
        let reg = regularize(&zero).unwrap();
        assert_eq!(reg.regularized, zero);
        assert_eq!(reg.regular_part.dims(), [0, 0, 0]);
        assert!(reg.regular_part.is_regular());
        assert_eq!(
            zero.apply_equivalence(&reg.cert).unwrap(),
            reg.regularized
        );
    }

    #[test]
    fn dependent_slice_is_dropped() {
        let spec = q();
        let t = SpatialMatrix::from_integer_slices(
            spec,
            &[&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 1]]],
        );
        let reg = regularize(&t).unwrap();
        assert_eq!(reg.regular_part.dims(), [2, 2, 1]);
        assert_eq!(
            reg.regular_part.slices_mode3(),
            vec![ExactMatrix::identity(spec, 2)]
        );
        assert_eq!(t.apply_equivalence(&reg.cert).unwrap(), reg.regularized);
        assert_eq!(reg.regularized.mode_ranks(), t.mode_ranks());
    }

    #[test]
    fn regular_input_short_circuits() {
        let t = SpatialMatrix::from_integer_slices(
            q(),
            &[&[&[1, 0], &[0, 1]], &[&[0, 2], &[1, 0]]],
        );
        assert!(t.is_regular());
        let reg = regularize(&t).unwrap();
        assert_eq!(reg.regularized, t);
        assert_eq!(reg.regular_part, t);
        assert!(reg.cert.is_identity());
        assert!(reg.steps.is_empty());
    }

    #[test]
    fn regularize_is_idempotent_on_its_output() {
        let spec = gf(3);
        // Rank-deficient in every mode: single nonzero entry in a 2×2×2.
        let mut t = SpatialMatrix::zero(spec, [2, 2, 2]);
        *t.get_mut(1, 1, 1) = spec.one();
        let reg = regularize(&t).unwrap();
        assert_eq!(reg.regular_part.dims(), [1, 1, 1]);
        let again = regularize(&reg.regularized).unwrap();
        assert_eq!(again.regularized, reg.regularized);

        let ranks = t.mode_ranks();
        assert_eq!(ranks, ModeRanks { m: 1, n: 1, q: 1 });
        assert_eq!(reg.regularized.mode_ranks(), ranks);
    }

    #[test]
    fn embed_roundtrips() {
        let spec = q();
        let mut part = SpatialMatrix::zero(spec, [1, 1, 1]);
        *part.get_mut(0, 0, 0) = spec.one();
        let embedded = embed_regular(&part, [2, 2, 2]).unwrap();
        assert_eq!(embedded.get(0, 0, 0), &spec.one());
        assert!(embedded
            .slices_mode3()[1]
            .is_zero());

        let empty = SpatialMatrix::zero(spec, [0, 0, 0]);
        assert!(embed_regular(&empty, [1, 1, 1]).unwrap().is_zero());

        assert_eq!(embed_regular(&part, [1, 1, 1]).unwrap(), part);
        assert!(embed_regular(&embedded, [1, 1, 1]).is_err());
    }

    #[test]
    fn all_gf3_2x2x2_tensors_regularize_cleanly() {
        let spec = gf(3);
        for code in 0..3u64.pow(8) {
            let mut c = code;
            let mut entries = Vec::with_capacity(8);
            for _ in 0..8 {
                entries.push(spec.from_integer((c % 3) as i64));
                c /= 3;
            }
            let t = SpatialMatrix::new(spec, [2, 2, 2], entries).unwrap();
            let ranks = t.mode_ranks();
            let reg = regularize(&t).unwrap();
            assert_eq!(reg.regular_part.dims(), [ranks.m, ranks.n, ranks.q]);
            assert_eq!(t.apply_equivalence(&reg.cert).unwrap(), reg.regularized);
        }
    }
}
