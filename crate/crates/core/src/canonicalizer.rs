//! Canonical forms for spatial matrices with mode ranks n′, q′ ≤ 2, an
//! equivalence decision built on them, and the pencil invariant that
//! separates the two 3×2×2 forms.
//!
//! Every regular tensor of the supported shapes reduces to exactly one
//! member of a nine-family catalogue; the reduction is carried out by
//! composing elementary certificates, never by rewriting entries, so the
//! certificate in every [`CanonResult`] replays to the canonical tensor
//! by construction.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::exactmat::ExactMatrix;
use crate::field::{FieldElement, FieldSpec};
use crate::regularizer::embed_regular;
use crate::spatial::{EquivCertificate, ModeRanks, ReductionStep, SpatialMatrix};

/// Tag of a canonical form. `A11` carries its parameter, stored already
/// reduced to the canonical representative of its square class.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CanonicalLabel {
    /// 0×0×0 — the regular part of the zero tensor.
    Zero,
    /// 1×1×1, single entry 1.
    A9,
    /// 2×2×1, slice I₂.
    A10,
    /// 2×1×2, slices e₁, e₂.
    A10a,
    /// 1×2×2, slices e₁ᵀ, e₂ᵀ.
    A10b,
    /// 2×2×2, slices I₂ and [[0, a], [1, 0]].
    A11(FieldElement),
    /// 3×2×2, second slice [[0,0],[0,0],[0,1]].
    A12,
    /// 3×2×2, second slice [[0,0],[1,0],[0,1]].
    A12a,
    /// 4×2×2, stacked slices forming I₄.
    A14z,
}

impl CanonicalLabel {
    /// The dimensions of the regular tensor this label names.
    pub fn part_dims(&self) -> [usize; 3] {
        match self {
            CanonicalLabel::Zero => [0, 0, 0],
            CanonicalLabel::A9 => [1, 1, 1],
            CanonicalLabel::A10 => [2, 2, 1],
            CanonicalLabel::A10a => [2, 1, 2],
            CanonicalLabel::A10b => [1, 2, 2],
            CanonicalLabel::A11(_) => [2, 2, 2],
            CanonicalLabel::A12 | CanonicalLabel::A12a => [3, 2, 2],
            CanonicalLabel::A14z => [4, 2, 2],
        }
    }

    /// The family name, without the A11 parameter.
    pub fn tag(&self) -> &'static str {
        match self {
            CanonicalLabel::Zero => "Zero",
            CanonicalLabel::A9 => "A9",
            CanonicalLabel::A10 => "A10",
            CanonicalLabel::A10a => "A10a",
            CanonicalLabel::A10b => "A10b",
            CanonicalLabel::A11(_) => "A11",
            CanonicalLabel::A12 => "A12",
            CanonicalLabel::A12a => "A12a",
            CanonicalLabel::A14z => "A14z",
        }
    }

    pub fn param(&self) -> Option<&FieldElement> {
        match self {
            CanonicalLabel::A11(a) => Some(a),
            _ => None,
        }
    }

    /// Builds the canonical regular tensor this label names.
    pub fn regular_tensor(&self, spec: FieldSpec) -> Result<SpatialMatrix, Error> {
        let t = match self {
            CanonicalLabel::Zero => SpatialMatrix::zero(spec, [0, 0, 0]),
            CanonicalLabel::A9 => SpatialMatrix::from_integer_slices(spec, &[&[&[1]]]),
            CanonicalLabel::A10 => {
                SpatialMatrix::from_integer_slices(spec, &[&[&[1, 0], &[0, 1]]])
            }
            CanonicalLabel::A10a => {
                SpatialMatrix::from_integer_slices(spec, &[&[&[1], &[0]], &[&[0], &[1]]])
            }
            CanonicalLabel::A10b => {
                SpatialMatrix::from_integer_slices(spec, &[&[&[1, 0]], &[&[0, 1]]])
            }
            CanonicalLabel::A11(a) => {
                if a.spec() != spec {
                    return Err(Error::FieldMismatch(
                        spec.to_string(),
                        a.spec().to_string(),
                    ));
                }
                let first = ExactMatrix::identity(spec, 2);
                let mut second = ExactMatrix::zero(spec, 2, 2);
                second[(0, 1)] = a.clone();
                second[(1, 0)] = spec.one();
                SpatialMatrix::from_mode3_slices(spec, 2, 2, &[first, second])?
            }
            CanonicalLabel::A12 => SpatialMatrix::from_integer_slices(
                spec,
                &[
                    &[&[1, 0], &[0, 1], &[0, 0]],
                    &[&[0, 0], &[0, 0], &[0, 1]],
                ],
            ),
            CanonicalLabel::A12a => SpatialMatrix::from_integer_slices(
                spec,
                &[
                    &[&[1, 0], &[0, 1], &[0, 0]],
                    &[&[0, 0], &[1, 0], &[0, 1]],
                ],
            ),
            CanonicalLabel::A14z => SpatialMatrix::from_integer_slices(
                spec,
                &[
                    &[&[1, 0], &[0, 1], &[0, 0], &[0, 0]],
                    &[&[0, 0], &[0, 0], &[1, 0], &[0, 1]],
                ],
            ),
        };
        Ok(t)
    }
}

impl fmt::Display for CanonicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalLabel::A11(a) => write!(f, "A11({a})"),
            other => write!(f, "{}", other.tag()),
        }
    }
}

/// The labels that can occur at the given dimensions over a finite
/// field: every family whose regular part fits, with one A11 entry per
/// square class (including zero).
pub fn admissible_labels(
    spec: FieldSpec,
    dims: [usize; 3],
) -> Result<Vec<CanonicalLabel>, Error> {
    if spec.is_rationals() {
        return Err(Error::UnsupportedField(
            "the A11 family over Q has infinitely many classes".to_string(),
        ));
    }
    let mut params: Vec<FieldElement> = Vec::new();
    for a in spec.elements().expect("finite field") {
        let (rep, _) = a.square_class_rep()?;
        if !params.contains(&rep) {
            params.push(rep);
        }
    }
    let mut labels = vec![
        CanonicalLabel::Zero,
        CanonicalLabel::A9,
        CanonicalLabel::A10,
        CanonicalLabel::A10a,
        CanonicalLabel::A10b,
    ];
    labels.extend(params.into_iter().map(CanonicalLabel::A11));
    labels.push(CanonicalLabel::A12);
    labels.push(CanonicalLabel::A12a);
    labels.push(CanonicalLabel::A14z);
    labels.retain(|label| {
        let pd = label.part_dims();
        pd[0] <= dims[0] && pd[1] <= dims[1] && pd[2] <= dims[2]
    });
    Ok(labels)
}

/// Result of a canonicalization: `apply_equivalence(input, cert)` equals
/// `canonical` exactly, and `canonical` is the canonical regular tensor
/// zero-padded to the input dimensions.
#[derive(Clone, Debug)]
pub struct CanonResult {
    pub label: CanonicalLabel,
    pub canonical: SpatialMatrix,
    pub cert: EquivCertificate,
    pub ranks: ModeRanks,
    pub steps: Vec<ReductionStep>,
}

/// Accumulates elementary certificates against a running tensor.
struct Reduction {
    current: SpatialMatrix,
    cert: EquivCertificate,
    steps: Vec<ReductionStep>,
}

impl Reduction {
    fn start(t: &SpatialMatrix) -> Self {
        Reduction {
            current: t.clone(),
            cert: EquivCertificate::identity(t.spec(), t.dims()),
            steps: Vec::new(),
        }
    }

    fn apply(&mut self, name: &'static str, cert: EquivCertificate) -> Result<(), Error> {
        if cert.is_identity() {
            return Ok(());
        }
        self.current = self.current.apply_equivalence(&cert)?;
        self.cert = self.cert.compose(&cert)?;
        self.steps.push(ReductionStep::new(name, cert));
        Ok(())
    }

    fn spec(&self) -> FieldSpec {
        self.current.spec()
    }

    fn identity(&self, axis: usize) -> ExactMatrix {
        ExactMatrix::identity(self.spec(), self.current.dims()[axis])
    }

    /// Slices ↦ P·slice.
    fn row_transform(&mut self, name: &'static str, p: ExactMatrix) -> Result<(), Error> {
        let cert = EquivCertificate::new(p.transpose(), self.identity(1), self.identity(2))?;
        self.apply(name, cert)
    }

    /// Slices ↦ slice·Q.
    fn col_transform(&mut self, name: &'static str, q: ExactMatrix) -> Result<(), Error> {
        let cert = EquivCertificate::new(self.identity(0), q, self.identity(2))?;
        self.apply(name, cert)
    }

    /// New slice k′ = Σₖ (old slice k)·T[k][k′].
    fn slice_transform(&mut self, name: &'static str, t: ExactMatrix) -> Result<(), Error> {
        let cert = EquivCertificate::new(self.identity(0), self.identity(1), t)?;
        self.apply(name, cert)
    }

    /// Slices ↦ P·slice·P⁻¹ (requires m = n).
    fn similarity(&mut self, name: &'static str, p: ExactMatrix) -> Result<(), Error> {
        let cert = EquivCertificate::new(p.transpose(), p.inverse()?, self.identity(2))?;
        self.apply(name, cert)
    }

    fn slices(&self) -> Vec<ExactMatrix> {
        self.current.slices_mode3()
    }
}

/// Reduces a regular tensor with n ≤ 2 and q ≤ 2 to its canonical form.
pub fn canonicalize_regular(a: &SpatialMatrix) -> Result<CanonResult, Error> {
    let [m, n, q] = a.dims();
    if n > 2 || q > 2 {
        return Err(Error::UnsupportedShape(m, n, q));
    }
    let ranks = a.mode_ranks();
    if [ranks.m, ranks.n, ranks.q] != a.dims() {
        return Err(Error::NotRegular);
    }
    let spec = a.spec();
    let mut red = Reduction::start(a);
    let label = match (m, n, q) {
        (0, 0, 0) => CanonicalLabel::Zero,
        (1, 1, 1) => {
            let value = red.current.get(0, 0, 0).clone();
            red.row_transform("scale_entry", scalar_matrix(spec, value.inv()?))?;
            CanonicalLabel::A9
        }
        (2, 2, 1) => {
            let slice = red.slices().remove(0);
            red.row_transform("normalize_slice", slice.inverse()?)?;
            CanonicalLabel::A10
        }
        (2, 1, 2) => {
            let slices = red.slices();
            let stacked = slices[0].hconcat(&slices[1])?;
            red.row_transform("normalize_stacked_slices", stacked.inverse()?)?;
            CanonicalLabel::A10a
        }
        (1, 2, 2) => {
            let slices = red.slices();
            let stacked = ExactMatrix::from_rows(
                spec,
                vec![slices[0].row(0).to_vec(), slices[1].row(0).to_vec()],
            )?;
            red.col_transform("normalize_stacked_slices", stacked.inverse()?)?;
            CanonicalLabel::A10b
        }
        (2, 2, 2) => reduce_2x2x2(&mut red)?,
        (3, 2, 2) => reduce_3x2x2(&mut red)?,
        (4, 2, 2) => {
            let slices = red.slices();
            let stacked = slices[0].hconcat(&slices[1])?;
            red.row_transform("normalize_stacked_slices", stacked.inverse()?)?;
            CanonicalLabel::A14z
        }
        _ => return Err(Error::UnsupportedShape(m, n, q)),
    };

    let expected = label.regular_tensor(spec)?;
    if red.current != expected {
        return Err(Error::internal(format!(
            "reduction for {label} did not reach its canonical tensor"
        )));
    }
    Ok(CanonResult {
        label,
        canonical: red.current,
        cert: red.cert,
        ranks,
        steps: red.steps,
    })
}

/// The 2×2×2 case: normalize the first slice to I₂ and drive the second
/// to the antidiagonal parametric form by similarities.
fn reduce_2x2x2(red: &mut Reduction) -> Result<CanonicalLabel, Error> {
    let spec = red.spec();
    let slices = red.slices();
    // Put the slice of larger rank first; ties keep the original order.
    if slices[0].rank() < slices[1].rank() {
        red.slice_transform(
            "order_slices_by_rank",
            ExactMatrix::from_integers(spec, &[&[0, 1], &[1, 0]]),
        )?;
    }
    if red.slices()[0].rank() < 2 {
        // Both slices have rank one; regularity makes their sum
        // nonsingular (otherwise all columns or all rows would be
        // proportional, collapsing m' or n').
        red.slice_transform(
            "replace_first_by_slice_sum",
            ExactMatrix::from_integers(spec, &[&[1, 0], &[1, 1]]),
        )?;
    }
    let first = red.slices().remove(0);
    if !first.is_nonsingular() {
        return Err(Error::internal(
            "sum of the rank-one slices is singular".to_string(),
        ));
    }
    red.row_transform("normalize_first_slice", first.inverse()?)?;

    // From here on the first slice stays I₂; the second moves by
    // similarity.
    if red.slices()[1][(1, 0)].is_zero() {
        let mut forced = false;
        for eps in [1i64, -1] {
            let p = ExactMatrix::from_integers(spec, &[&[1, 0], &[-eps, 1]]);
            let b = &red.slices()[1];
            let conjugated = &(&p * b) * &p.inverse()?;
            if !conjugated[(1, 0)].is_zero() {
                red.similarity("force_corner_nonzero", p)?;
                forced = true;
                break;
            }
        }
        if !forced {
            // Both ε fail only for a scalar second slice, which
            // contradicts q' = 2. Needs characteristic ≠ 2.
            return Err(Error::internal(
                "second slice is scalar after normalization".to_string(),
            ));
        }
    }

    let corner = red.slices()[1][(1, 0)].clone();
    if !corner.is_one() {
        let mut p = ExactMatrix::identity(spec, 2);
        p[(0, 0)] = corner;
        red.similarity("scale_corner_to_one", p)?;
    }

    let b = &red.slices()[1];
    let two_inv = (&spec.one() + &spec.one()).inv()?;
    let alpha = &(&b[(0, 0)] + &b[(1, 1)]) * &two_inv;
    if !alpha.is_zero() {
        let mut t = ExactMatrix::identity(spec, 2);
        t[(0, 1)] = -&alpha;
        red.slice_transform("shift_trace_to_zero", t)?;
    }

    let beta = red.slices()[1][(0, 0)].clone();
    if !beta.is_zero() {
        let mut p = ExactMatrix::identity(spec, 2);
        p[(0, 1)] = -&beta;
        red.similarity("conjugate_to_antidiagonal", p)?;
    }

    let b = &red.slices()[1];
    if !b[(0, 0)].is_zero() || !b[(1, 1)].is_zero() || !b[(1, 0)].is_one() {
        return Err(Error::internal(
            "similarity chain missed the antidiagonal form".to_string(),
        ));
    }
    let raw_param = b[(0, 1)].clone();
    let (rep, z) = raw_param.square_class_rep()?;
    if !z.is_one() {
        let mut p = ExactMatrix::identity(spec, 2);
        p[(0, 0)] = z.inv()?;
        red.similarity("normalize_square_class", p)?;
        let mut t = ExactMatrix::identity(spec, 2);
        t[(1, 1)] = z.inv()?;
        red.slice_transform("rescale_second_slice", t)?;
    }
    Ok(CanonicalLabel::A11(rep))
}

/// The 3×2×2 case: staircase the pair, eliminate the upper-left block of
/// the second slice, and read off the distinguishing corner entry.
fn reduce_3x2x2(red: &mut Reduction) -> Result<CanonicalLabel, Error> {
    let spec = red.spec();
    let slices = red.slices();
    if slices[0].rank() < slices[1].rank() {
        red.slice_transform(
            "order_slices_by_rank",
            ExactMatrix::from_integers(spec, &[&[0, 1], &[1, 0]]),
        )?;
    }
    // rank[A B] = 3 forces rank A = 2 once ranks are ordered.
    let first = red.slices().remove(0);
    let reduced = first.rref();
    if reduced.rank != 2 {
        return Err(Error::internal("leading 3×2 slice must have rank 2".to_string()));
    }
    // A 3×2 matrix of rank 2 has [I₂; 0] as its echelon form.
    red.row_transform("reduce_first_slice", reduced.transform)?;

    let b = red.slices().remove(1);
    if b[(2, 1)].is_zero() {
        if b[(2, 0)].is_zero() {
            return Err(Error::internal(
                "third row vanished in a regular 3×2×2 tensor".to_string(),
            ));
        }
        // Swap the two columns, fixing the first slice by swapping its
        // first two rows.
        let cert = EquivCertificate::new(
            ExactMatrix::from_integers(spec, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]),
            ExactMatrix::from_integers(spec, &[&[0, 1], &[1, 0]]),
            red.identity(2),
        )?;
        red.apply("swap_columns", cert)?;
    }

    let pivot = red.slices()[1][(2, 1)].clone();
    if !pivot.is_one() {
        let mut p = ExactMatrix::identity(spec, 3);
        p[(2, 2)] = pivot.inv()?;
        red.row_transform("scale_third_row", p)?;
    }

    let stray = red.slices()[1][(2, 0)].clone();
    if !stray.is_zero() {
        // Column operation col₀ ← col₀ − stray·col₁ clears the (2,0)
        // entry; the induced damage to the first slice is undone by a
        // row operation inside its identity block.
        let mut s = ExactMatrix::identity(spec, 2);
        s[(1, 0)] = -&stray;
        let mut p = ExactMatrix::identity(spec, 3);
        p[(1, 0)] = stray.clone();
        let cert = EquivCertificate::new(p.transpose(), s, red.identity(2))?;
        red.apply("clear_third_row_companion", cert)?;
    }

    let b = red.slices().remove(1);
    let mut p = ExactMatrix::identity(spec, 3);
    p[(0, 2)] = -&b[(0, 1)];
    p[(1, 2)] = -&b[(1, 1)];
    red.row_transform("clear_second_column", p)?;

    let head = red.slices()[1][(0, 0)].clone();
    if !head.is_zero() {
        let mut t = ExactMatrix::identity(spec, 2);
        t[(0, 1)] = -&head;
        red.slice_transform("subtract_first_slice", t)?;
        // The subtraction spoiled the (1,1) entry; repair it from the
        // third row.
        let mut p = ExactMatrix::identity(spec, 3);
        p[(1, 2)] = head;
        red.row_transform("repair_spoiled_entry", p)?;
    }

    let corner = red.slices()[1][(1, 0)].clone();
    if corner.is_zero() {
        Ok(CanonicalLabel::A12)
    } else {
        let mut p = ExactMatrix::identity(spec, 3);
        p[(0, 0)] = corner.clone();
        let mut s = ExactMatrix::identity(spec, 2);
        s[(0, 0)] = corner.inv()?;
        let cert = EquivCertificate::new(p.transpose(), s, red.identity(2))?;
        red.apply("scale_corner_to_one", cert)?;
        Ok(CanonicalLabel::A12a)
    }
}

fn scalar_matrix(spec: FieldSpec, value: FieldElement) -> ExactMatrix {
    let mut m = ExactMatrix::zero(spec, 1, 1);
    m[(0, 0)] = value;
    m
}

/// Canonicalizes an arbitrary tensor with n′ ≤ 2 and q′ ≤ 2: regularize,
/// canonicalize the regular part, embed back at the input dimensions.
pub fn canonicalize(a: &SpatialMatrix) -> Result<CanonResult, Error> {
    let ranks = a.mode_ranks();
    if ranks.n > 2 || ranks.q > 2 {
        return Err(Error::UnsupportedRanks {
            n_rank: ranks.n,
            q_rank: ranks.q,
        });
    }
    let dims = a.dims();
    let reg = crate::regularizer::regularize_with_ranks(a, ranks)?;
    let part = canonicalize_regular(&reg.regular_part)?;

    let embedded_cert = embed_certificate(&part.cert, dims)?;
    let cert = reg.cert.compose(&embedded_cert)?;
    let canonical = embed_regular(&part.canonical, dims)?;
    if a.apply_equivalence(&cert)? != canonical {
        return Err(Error::internal(
            "composed certificate does not reproduce the canonical tensor".to_string(),
        ));
    }

    let mut steps = reg.steps;
    for step in part.steps {
        steps.push(ReductionStep::new(
            step.name,
            embed_certificate(&step.cert, dims)?,
        ));
    }

    Ok(CanonResult {
        label: part.label,
        canonical,
        cert,
        ranks,
        steps,
    })
}

/// Extends a certificate on the leading corner to the ambient dimensions
/// by direct sum with identities. On tensors that vanish outside the
/// corner this acts exactly as the original certificate acts on the
/// corner.
fn embed_certificate(
    cert: &EquivCertificate,
    dims: [usize; 3],
) -> Result<EquivCertificate, Error> {
    let spec = cert.spec();
    let embed = |small: &ExactMatrix, size: usize| -> Result<ExactMatrix, Error> {
        if small.rows() > size {
            return Err(Error::shape(format!(
                "cannot embed a {}×{} block into size {size}",
                small.rows(),
                small.cols()
            )));
        }
        let mut big = ExactMatrix::identity(spec, size);
        for i in 0..small.rows() {
            for j in 0..small.cols() {
                big[(i, j)] = small[(i, j)].clone();
            }
        }
        Ok(big)
    };
    EquivCertificate::new(
        embed(cert.r(), dims[0])?,
        embed(cert.s(), dims[1])?,
        embed(cert.t(), dims[2])?,
    )
}

/// Equivalence decision: same dimensions and same canonical label. The
/// A11 parameter is stored square-class reduced, so comparing labels
/// already implements the `a = b·z²` criterion.
pub fn are_equivalent(a: &SpatialMatrix, b: &SpatialMatrix) -> Result<bool, Error> {
    if a.spec() != b.spec() {
        return Err(Error::FieldMismatch(
            a.spec().to_string(),
            b.spec().to_string(),
        ));
    }
    if a.dims() != b.dims() {
        return Ok(false);
    }
    Ok(canonicalize(a)?.label == canonicalize(b)?.label)
}

/// Replays a certificate and compares with the expected tensor.
pub fn verify_certificate(
    a: &SpatialMatrix,
    cert: &EquivCertificate,
    expected: &SpatialMatrix,
) -> Result<bool, Error> {
    if a.dims() != expected.dims() {
        return Err(Error::shape(format!(
            "certificate target dims {:?} differ from source dims {:?}",
            expected.dims(),
            a.dims()
        )));
    }
    Ok(&a.apply_equivalence(cert)? == expected)
}

/// Minimum of rank(αA + βB) over all (α, β) ≠ (0, 0).
///
/// Over GF(p) the projective line is enumerated exhaustively. Over ℚ the
/// candidates are the rational points where all minors of the next size
/// vanish simultaneously, found from the minor polynomials.
pub fn pencil_min_rank(a: &ExactMatrix, b: &ExactMatrix) -> Result<usize, Error> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::shape(format!(
            "pencil of a {}×{} with a {}×{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.spec() != b.spec() {
        return Err(Error::FieldMismatch(
            a.spec().to_string(),
            b.spec().to_string(),
        ));
    }
    let spec = a.spec();
    match spec.modulus() {
        Some(p) => {
            let mut min_rank = usize::MAX;
            for beta in 0..p {
                let comb = &a.scale(&spec.one()) + &b.scale(&spec.from_integer(beta as i64));
                min_rank = min_rank.min(comb.rank());
            }
            min_rank = min_rank.min(b.rank());
            Ok(min_rank)
        }
        None => pencil_min_rank_rational(a, b),
    }
}

fn pencil_min_rank_rational(a: &ExactMatrix, b: &ExactMatrix) -> Result<usize, Error> {
    let spec = a.spec();
    let max_rank = a.rows().min(a.cols());
    for rank in 0..max_rank {
        let size = rank + 1;
        let minors = pencil_minors(a, b, size);
        let nonzero: Vec<&BinaryForm> = minors.iter().filter(|f| !f.is_zero()).collect();
        if nonzero.is_empty() {
            return Ok(rank);
        }
        // The point (α, β) = (1, 0), missed by the affine chart below.
        if nonzero
            .iter()
            .all(|f| f.eval(&spec.one(), &spec.zero()).is_zero())
        {
            return Ok(rank);
        }
        // Any common root is in particular a root of the first nonzero
        // minor; the rational root theorem bounds its candidates.
        let candidates = rational_root_candidates(&nonzero[0].dehomogenize());
        for t in candidates {
            let alpha = spec.from_ratio(t)?;
            if nonzero.iter().all(|f| f.eval(&alpha, &spec.one()).is_zero()) {
                return Ok(rank);
            }
        }
    }
    Ok(max_rank)
}

/// All size×size minors of αA + βB as binary forms in (α, β).
fn pencil_minors(a: &ExactMatrix, b: &ExactMatrix, size: usize) -> Vec<BinaryForm> {
    let spec = a.spec();
    let row_sets = combinations(a.rows(), size);
    let col_sets = combinations(a.cols(), size);
    let mut minors = Vec::new();
    for rows in &row_sets {
        for cols in &col_sets {
            let grid: Vec<Vec<BinaryForm>> = rows
                .iter()
                .map(|&i| {
                    cols.iter()
                        .map(|&j| BinaryForm::linear(spec, &a[(i, j)], &b[(i, j)]))
                        .collect()
                })
                .collect();
            minors.push(form_determinant(spec, &grid));
        }
    }
    minors
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // Advance the rightmost index that can still move.
        let mut idx = k;
        while idx > 0 {
            idx -= 1;
            if current[idx] + 1 <= n - (k - idx) {
                current[idx] += 1;
                for later in idx + 1..k {
                    current[later] = current[later - 1] + 1;
                }
                break;
            }
            if idx == 0 {
                return out;
            }
        }
    }
}

/// Laplace expansion along the first row.
fn form_determinant(spec: FieldSpec, grid: &[Vec<BinaryForm>]) -> BinaryForm {
    let n = grid.len();
    if n == 0 {
        return BinaryForm::constant(spec, spec.one());
    }
    if n == 1 {
        return grid[0][0].clone();
    }
    let mut acc = BinaryForm::constant(spec, spec.zero());
    for (j, cofactor) in grid[0].iter().enumerate() {
        let sub: Vec<Vec<BinaryForm>> = grid[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, f)| f.clone())
                    .collect()
            })
            .collect();
        let mut term = cofactor.mul(&form_determinant(spec, &sub));
        if j % 2 == 1 {
            term = term.negate();
        }
        acc = acc.add(&term);
    }
    acc
}

/// A homogeneous polynomial in (α, β): `coeffs[i]` multiplies
/// α^(deg−i)·β^i.
#[derive(Clone, Debug)]
struct BinaryForm {
    spec: FieldSpec,
    coeffs: Vec<FieldElement>,
}

impl BinaryForm {
    fn constant(spec: FieldSpec, value: FieldElement) -> Self {
        BinaryForm {
            spec,
            coeffs: vec![value],
        }
    }

    fn linear(spec: FieldSpec, a: &FieldElement, b: &FieldElement) -> Self {
        BinaryForm {
            spec,
            coeffs: vec![a.clone(), b.clone()],
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldElement::is_zero)
    }

    fn add(&self, other: &BinaryForm) -> BinaryForm {
        let deg = self.coeffs.len().max(other.coeffs.len());
        let pad = |f: &BinaryForm| {
            // Padding in front multiplies by no power of anything: forms
            // of different degrees only meet through multiplication by a
            // same-degree zero, so pad with zeros on the low side.
            let mut c = vec![self.spec.zero(); deg - f.coeffs.len()];
            c.extend(f.coeffs.iter().cloned());
            c
        };
        let a = pad(self);
        let b = pad(other);
        BinaryForm {
            spec: self.spec,
            coeffs: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        }
    }

    fn negate(&self) -> BinaryForm {
        BinaryForm {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn mul(&self, other: &BinaryForm) -> BinaryForm {
        let mut coeffs =
            vec![self.spec.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        BinaryForm { spec: self.spec, coeffs }
    }

    fn eval(&self, alpha: &FieldElement, beta: &FieldElement) -> FieldElement {
        let deg = self.coeffs.len() - 1;
        let mut acc = self.spec.zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for _ in 0..deg - i {
                term = &term * alpha;
            }
            for _ in 0..i {
                term = &term * beta;
            }
            acc = &acc + &term;
        }
        acc
    }

    /// The univariate polynomial f(t, 1), coefficients by ascending
    /// power of t.
    fn dehomogenize(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .rev()
            .map(|c| {
                c.as_ratio()
                    .expect("dehomogenization is used on rational forms only")
                    .clone()
            })
            .collect()
    }
}

/// Candidate rational roots of a nonzero polynomial with rational
/// coefficients (ascending powers), by the rational root theorem after
/// clearing denominators. The returned list always contains every
/// rational root; it may contain non-roots.
fn rational_root_candidates(poly: &[BigRational]) -> Vec<BigRational> {
    let degree = match poly.iter().rposition(|c| !c.is_zero()) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let mut candidates = Vec::new();
    let low = match poly.iter().position(|c| !c.is_zero()) {
        Some(l) => l,
        None => return Vec::new(),
    };
    if low > 0 {
        candidates.push(BigRational::zero());
    }
    if degree == low {
        // c·t^low has no nonzero roots.
        return candidates;
    }
    let mut denom_lcm = BigInt::one();
    for c in &poly[low..=degree] {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let scaled: Vec<BigInt> = poly[low..=degree]
        .iter()
        .map(|c| (c * BigRational::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    let constant = scaled.first().expect("degree > low").abs();
    let leading = scaled.last().expect("degree > low").abs();
    for p in divisors(&constant) {
        for q in divisors(&leading) {
            let root = BigRational::new(p.clone(), q.clone());
            if !candidates.contains(&root) {
                candidates.push(root.clone());
            }
            let neg = -root;
            if !candidates.contains(&neg) {
                candidates.push(neg);
            }
        }
    }
    candidates
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            out.push(n / &d);
        }
        d += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    /// ‖I₂ | B(a)‖.
    fn pair_tensor(spec: FieldSpec, a: i64) -> SpatialMatrix {
        CanonicalLabel::A11(spec.from_integer(a))
            .regular_tensor(spec)
            .unwrap()
    }

    #[test]
    fn canonical_pair_with_squarefree_parameter_is_fixed() {
        let t = pair_tensor(q(), 2);
        let result = canonicalize_regular(&t).unwrap();
        assert_eq!(result.label, CanonicalLabel::A11(q().from_integer(2)));
        assert_eq!(result.canonical, t);
        assert!(result.cert.is_identity());
        assert!(result.steps.is_empty());
    }

    #[test]
    fn square_factors_are_stripped_from_the_parameter() {
        let t = pair_tensor(q(), 8);
        let result = canonicalize_regular(&t).unwrap();
        assert_eq!(result.label, CanonicalLabel::A11(q().from_integer(2)));
        assert!(verify_certificate(&t, &result.cert, &result.canonical).unwrap());
    }

    #[test]
    fn parameter_reduces_modulo_squares_over_gf7() {
        // square_class_rep(5) = (3, 2) over GF(7).
        let t = pair_tensor(gf(7), 5);
        let result = canonicalize_regular(&t).unwrap();
        assert_eq!(result.label, CanonicalLabel::A11(gf(7).from_integer(3)));
        assert!(verify_certificate(&t, &result.cert, &result.canonical).unwrap());
    }

    #[test]
    fn the_two_3x2x2_forms_are_fixed_points() {
        for label in [CanonicalLabel::A12, CanonicalLabel::A12a] {
            let t = label.regular_tensor(q()).unwrap();
            let result = canonicalize_regular(&t).unwrap();
            assert_eq!(result.label, label);
            assert_eq!(result.canonical, t);
            assert!(result.cert.is_identity());
        }
    }

    #[test]
    fn transformed_4x2x2_returns_home() {
        let spec = gf(5);
        let t = CanonicalLabel::A14z.regular_tensor(spec).unwrap();
        // A hand-picked nonsingular certificate.
        let cert = EquivCertificate::new(
            ExactMatrix::from_integers(
                spec,
                &[&[1, 2, 0, 4], &[0, 1, 3, 0], &[2, 0, 1, 1], &[3, 1, 0, 1]],
            ),
            ExactMatrix::from_integers(spec, &[&[2, 1], &[3, 3]]),
            ExactMatrix::from_integers(spec, &[&[1, 4], &[2, 1]]),
        )
        .unwrap();
        let moved = t.apply_equivalence(&cert).unwrap();
        let result = canonicalize_regular(&moved).unwrap();
        assert_eq!(result.label, CanonicalLabel::A14z);
        assert_eq!(result.canonical, t);
        assert!(verify_certificate(&moved, &result.cert, &result.canonical).unwrap());
    }

    #[test]
    fn canonicalize_handles_irregular_inputs() {
        let zero = SpatialMatrix::zero(q(), [4, 2, 2]);
        let result = canonicalize(&zero).unwrap();
        assert_eq!(result.label, CanonicalLabel::Zero);
        assert_eq!(result.canonical, zero);

        let doubled = SpatialMatrix::from_integer_slices(
            q(),
            &[&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 1]]],
        );
        let result = canonicalize(&doubled).unwrap();
        assert_eq!(result.label, CanonicalLabel::A10);
        let slices = result.canonical.slices_mode3();
        assert_eq!(slices[0], ExactMatrix::identity(q(), 2));
        assert!(slices[1].is_zero());
        assert!(verify_certificate(&doubled, &result.cert, &result.canonical).unwrap());
    }

    #[test]
    fn oversized_ambient_dims_are_fine_when_ranks_are_small() {
        let spec = q();
        let mut t = SpatialMatrix::zero(spec, [2, 5, 7]);
        *t.get_mut(0, 0, 0) = spec.one();
        let result = canonicalize(&t).unwrap();
        assert_eq!(result.label, CanonicalLabel::A9);
        assert_eq!(result.canonical.dims(), [2, 5, 7]);
        assert_eq!(result.canonical, {
            let mut c = SpatialMatrix::zero(spec, [2, 5, 7]);
            *c.get_mut(0, 0, 0) = spec.one();
            c
        });
    }

    #[test]
    fn wild_ranks_are_rejected() {
        // Three independent 1×1 slices cannot exist; use 2×2×3 with
        // independent slices instead: q' = 3.
        let spec = gf(3);
        let slices = [
            ExactMatrix::from_integers(spec, &[&[1, 0], &[0, 0]]),
            ExactMatrix::from_integers(spec, &[&[0, 1], &[0, 0]]),
            ExactMatrix::from_integers(spec, &[&[0, 0], &[1, 0]]),
        ];
        let t = SpatialMatrix::from_mode3_slices(spec, 2, 2, &slices).unwrap();
        assert!(matches!(
            canonicalize(&t),
            Err(Error::UnsupportedRanks { n_rank: 2, q_rank: 3 })
        ));
    }

    #[test]
    fn equivalence_examples() {
        let spec = q();
        assert!(are_equivalent(&pair_tensor(spec, 1), &pair_tensor(spec, 4)).unwrap());
        assert!(!are_equivalent(&pair_tensor(spec, 1), &pair_tensor(spec, 2)).unwrap());

        let a12 = CanonicalLabel::A12.regular_tensor(spec).unwrap();
        let a12a = CanonicalLabel::A12a.regular_tensor(spec).unwrap();
        assert!(!are_equivalent(&a12, &a12a).unwrap());

        let spec = gf(7);
        // 5 = 3·2² mod 7.
        assert!(are_equivalent(&pair_tensor(spec, 5), &pair_tensor(spec, 3)).unwrap());

        // Same regular part at different ambient dims is not equivalence:
        // the dimensions must match before labels are compared.
        let small = CanonicalLabel::A9.regular_tensor(q()).unwrap();
        let padded = embed_regular(&small, [2, 2, 2]).unwrap();
        assert!(!are_equivalent(&small, &padded).unwrap());
        assert!(are_equivalent(&padded, &padded).unwrap());
    }

    #[test]
    fn field_mismatch_is_an_error() {
        let a = pair_tensor(q(), 1);
        let b = pair_tensor(gf(3), 1);
        assert!(matches!(
            are_equivalent(&a, &b),
            Err(Error::FieldMismatch(_, _))
        ));
    }

    #[test]
    fn certificate_verification() {
        let t = pair_tensor(q(), 3);
        let id = EquivCertificate::identity(q(), t.dims());
        assert!(verify_certificate(&t, &id, &t).unwrap());
        let mut tampered = t.clone();
        *tampered.get_mut(0, 0, 0) = q().from_integer(7);
        assert!(!verify_certificate(&t, &id, &tampered).unwrap());
    }

    #[test]
    fn pencil_separates_the_3x2x2_pair() {
        for spec in [q(), gf(3), gf(5)] {
            let a12 = CanonicalLabel::A12.regular_tensor(spec).unwrap();
            let s = a12.slices_mode3();
            assert_eq!(pencil_min_rank(&s[0], &s[1]).unwrap(), 1, "{spec}");

            let a12a = CanonicalLabel::A12a.regular_tensor(spec).unwrap();
            let s = a12a.slices_mode3();
            assert_eq!(pencil_min_rank(&s[0], &s[1]).unwrap(), 2, "{spec}");
        }
        let zero = ExactMatrix::zero(q(), 3, 2);
        assert_eq!(pencil_min_rank(&zero, &zero).unwrap(), 0);
    }

    #[test]
    fn pencil_finds_interior_rational_drops() {
        // A + tB drops rank at t = -3/2, nowhere else.
        let spec = q();
        let a = ExactMatrix::from_integers(spec, &[&[3, 0], &[0, 1]]);
        let b = ExactMatrix::from_integers(spec, &[&[2, 0], &[0, 5]]);
        assert_eq!(pencil_min_rank(&a, &b).unwrap(), 1);

        // Rank drops only at irrational points: x² = 2 has no rational
        // solution, so the minimum over ℚ stays 2.
        let a = ExactMatrix::from_integers(spec, &[&[2, 0], &[0, 1]]);
        let b = ExactMatrix::from_integers(spec, &[&[0, 1], &[1, 0]]);
        // det(αA + βB) = 2α² − β².
        assert_eq!(pencil_min_rank(&a, &b).unwrap(), 2);
    }

    #[test]
    fn epsilon_trick_covers_every_non_scalar_triangular_slice() {
        for p in [3u64, 5, 7] {
            let spec = gf(p);
            for b11 in 0..p {
                for b12 in 0..p {
                    for b22 in 0..p {
                        if b12 == 0 && b11 == b22 {
                            continue; // scalar: excluded by regularity
                        }
                        let b = ExactMatrix::from_integers(
                            spec,
                            &[&[b11 as i64, b12 as i64], &[0, b22 as i64]],
                        );
                        let works = [1i64, -1].iter().any(|&eps| {
                            let p_mat = ExactMatrix::from_integers(
                                spec,
                                &[&[1, 0], &[-eps, 1]],
                            );
                            let conj = &(&p_mat * &b) * &p_mat.inverse().unwrap();
                            !conj[(1, 0)].is_zero()
                        });
                        assert!(works, "GF({p}): {b11} {b12} / 0 {b22}");
                    }
                }
            }
        }
    }

    #[test]
    fn admissible_labels_match_the_catalogue() {
        let spec = gf(3);
        let labels = admissible_labels(spec, [2, 2, 2]).unwrap();
        // Zero, A9, A10, A10a, A10b, A11(0), A11(1), A11(2).
        assert_eq!(labels.len(), 8);
        let labels = admissible_labels(spec, [1, 2, 2]).unwrap();
        assert_eq!(labels.len(), 3);
        let labels = admissible_labels(spec, [3, 2, 2]).unwrap();
        assert_eq!(labels.len(), 10);
        let labels = admissible_labels(spec, [4, 2, 2]).unwrap();
        assert_eq!(labels.len(), 11);
        assert!(admissible_labels(q(), [2, 2, 2]).is_err());
    }

    #[test]
    fn a11_parameter_law_exhaustive_over_small_primes() {
        for p in [3u64, 5, 7, 11, 13] {
            let spec = gf(p);
            for a in 0..p {
                let elem = spec.from_integer(a as i64);
                let t = pair_tensor(spec, a as i64);
                let result = canonicalize(&t).unwrap();
                let (rep, _) = elem.square_class_rep().unwrap();
                assert_eq!(result.label, CanonicalLabel::A11(rep), "GF({p}), a={a}");
            }
        }
    }

    #[test]
    fn canonicalize_is_idempotent_on_canonical_tensors() {
        let spec = gf(5);
        for label in admissible_labels(spec, [4, 2, 2]).unwrap() {
            let part = label.regular_tensor(spec).unwrap();
            let embedded = embed_regular(&part, [4, 2, 2]).unwrap();
            let result = canonicalize(&embedded).unwrap();
            assert_eq!(result.label, label);
            assert_eq!(result.canonical, embedded);
            assert!(result.cert.is_identity());
        }
    }
}
