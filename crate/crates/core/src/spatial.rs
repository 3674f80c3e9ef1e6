//! The spatial-matrix type (an m×n×q array of field elements), its three
//! flattenings and mode ranks, the regularity test, and the action of
//! equivalence certificates.
//!
//! Index convention, fixed once for the whole crate: a certificate
//! `(R, S, T)` of nonsingular matrices acts by
//!
//! ```text
//! b[i'][j'][k'] = Σ_{i,j,k} a[i][j][k] · R[i][i'] · S[j][j'] · T[k][k']
//! ```
//!
//! i.e. each transformation matrix is indexed old-index by new-index.
//! Equivalently the action factors as a slice substitution
//! `C_{k'} = Σ_k A_k·T[k][k']` followed by the simultaneous equivalence
//! `C_{k'} ↦ Rᵀ·C_{k'}·S`.

use std::fmt;

use crate::error::Error;
use crate::exactmat::{rank_of_span, ExactMatrix};
use crate::field::{FieldElement, FieldSpec};

/// An m×n×q array of exact field elements — the object being classified.
/// Any dimension may be zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpatialMatrix {
    spec: FieldSpec,
    dims: [usize; 3],
    /// Row-major: entry (i, j, k) lives at `(i·n + j)·q + k`.
    entries: Vec<FieldElement>,
}

impl SpatialMatrix {
    pub fn zero(spec: FieldSpec, dims: [usize; 3]) -> Self {
        SpatialMatrix {
            spec,
            dims,
            entries: vec![spec.zero(); dims[0] * dims[1] * dims[2]],
        }
    }

    /// Builds a tensor from the flat entry list in (i, j, k) order.
    pub fn new(
        spec: FieldSpec,
        dims: [usize; 3],
        entries: Vec<FieldElement>,
    ) -> Result<Self, Error> {
        if entries.len() != dims[0] * dims[1] * dims[2] {
            return Err(Error::shape(format!(
                "{}×{}×{} tensor needs {} entries, got {}",
                dims[0],
                dims[1],
                dims[2],
                dims[0] * dims[1] * dims[2],
                entries.len()
            )));
        }
        for entry in &entries {
            if entry.spec() != spec {
                return Err(Error::FieldMismatch(
                    spec.to_string(),
                    entry.spec().to_string(),
                ));
            }
        }
        Ok(SpatialMatrix {
            spec,
            dims,
            entries,
        })
    }

    /// Builds the tensor `‖A_1 | … | A_q‖` from its mode-3 slices.
    pub fn from_mode3_slices(
        spec: FieldSpec,
        m: usize,
        n: usize,
        slices: &[ExactMatrix],
    ) -> Result<Self, Error> {
        let q = slices.len();
        let mut tensor = SpatialMatrix::zero(spec, [m, n, q]);
        for (k, slice) in slices.iter().enumerate() {
            if (slice.rows(), slice.cols()) != (m, n) {
                return Err(Error::shape(format!(
                    "slice {k} is {}×{}, expected {m}×{n}",
                    slice.rows(),
                    slice.cols()
                )));
            }
            if slice.spec() != spec {
                return Err(Error::FieldMismatch(
                    spec.to_string(),
                    slice.spec().to_string(),
                ));
            }
            for i in 0..m {
                for j in 0..n {
                    *tensor.get_mut(i, j, k) = slice[(i, j)].clone();
                }
            }
        }
        Ok(tensor)
    }

    /// Convenience constructor from integer slices.
    pub fn from_integer_slices(spec: FieldSpec, slices: &[&[&[i64]]]) -> Self {
        let mats: Vec<ExactMatrix> = slices
            .iter()
            .map(|rows| ExactMatrix::from_integers(spec, rows))
            .collect();
        let m = mats.first().map_or(0, ExactMatrix::rows);
        let n = mats.first().map_or(0, ExactMatrix::cols);
        Self::from_mode3_slices(spec, m, n, &mats).expect("consistent integer slices")
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElement::is_zero)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &FieldElement {
        &self.entries[(i * self.dims[1] + j) * self.dims[2] + k]
    }

    pub fn get_mut(&mut self, i: usize, j: usize, k: usize) -> &mut FieldElement {
        &mut self.entries[(i * self.dims[1] + j) * self.dims[2] + k]
    }

    /// The q-tuple of m×n slices `A_k = [a_{ijk}]_{ij}`.
    pub fn slices_mode3(&self) -> Vec<ExactMatrix> {
        let [m, n, q] = self.dims;
        (0..q)
            .map(|k| {
                let mut mat = ExactMatrix::zero(self.spec, m, n);
                for i in 0..m {
                    for j in 0..n {
                        mat[(i, j)] = self.get(i, j, k).clone();
                    }
                }
                mat
            })
            .collect()
    }

    /// The n-tuple of m×q flattenings `Ã_j = [a_{ijk}]_{ik}`.
    pub fn flatten_mode2(&self) -> Vec<ExactMatrix> {
        let [m, n, q] = self.dims;
        (0..n)
            .map(|j| {
                let mut mat = ExactMatrix::zero(self.spec, m, q);
                for i in 0..m {
                    for k in 0..q {
                        mat[(i, k)] = self.get(i, j, k).clone();
                    }
                }
                mat
            })
            .collect()
    }

    /// The m-tuple of n×q flattenings `Ã̃_i = [a_{ijk}]_{jk}`.
    pub fn flatten_mode1(&self) -> Vec<ExactMatrix> {
        let [m, n, q] = self.dims;
        (0..m)
            .map(|i| {
                let mut mat = ExactMatrix::zero(self.spec, n, q);
                for j in 0..n {
                    for k in 0..q {
                        mat[(j, k)] = self.get(i, j, k).clone();
                    }
                }
                mat
            })
            .collect()
    }

    /// The equivalence invariants (m′, n′, q′): the span dimensions of
    /// the three flattening families.
    pub fn mode_ranks(&self) -> ModeRanks {
        ModeRanks {
            m: rank_of_span(&self.flatten_mode1())
                .expect("flattenings share a shape")
                .rank,
            n: rank_of_span(&self.flatten_mode2())
                .expect("flattenings share a shape")
                .rank,
            q: rank_of_span(&self.slices_mode3())
                .expect("slices share a shape")
                .rank,
        }
    }

    /// A spatial matrix is regular when every dimension equals its mode
    /// rank. The empty 0×0×0 tensor is regular vacuously.
    pub fn is_regular(&self) -> bool {
        let ranks = self.mode_ranks();
        ranks.m == self.dims[0] && ranks.n == self.dims[1] && ranks.q == self.dims[2]
    }

    /// Applies a certificate via slice substitution followed by
    /// simultaneous equivalence; see the module docs for the convention.
    pub fn apply_equivalence(&self, cert: &EquivCertificate) -> Result<SpatialMatrix, Error> {
        cert.check_dims(self)?;
        let [m, n, q] = self.dims;
        let slices = self.slices_mode3();
        let r_t = cert.r.transpose();
        let mut new_slices = Vec::with_capacity(q);
        for k_new in 0..q {
            // C_{k'} = Σ_k A_k · T[k][k']
            let mut combined = ExactMatrix::zero(self.spec, m, n);
            for (k, slice) in slices.iter().enumerate() {
                let coeff = &cert.t[(k, k_new)];
                if !coeff.is_zero() {
                    combined = &combined + &slice.scale(coeff);
                }
            }
            new_slices.push(&(&r_t * &combined) * &cert.s);
        }
        SpatialMatrix::from_mode3_slices(self.spec, m, n, &new_slices)
    }

    /// Reference route for [`Self::apply_equivalence`]: the plain triple
    /// sum, kept separate so the two can be checked against each other.
    pub fn apply_equivalence_direct(
        &self,
        cert: &EquivCertificate,
    ) -> Result<SpatialMatrix, Error> {
        cert.check_dims(self)?;
        let [m, n, q] = self.dims;
        let mut out = SpatialMatrix::zero(self.spec, self.dims);
        for i_new in 0..m {
            for j_new in 0..n {
                for k_new in 0..q {
                    let mut acc = self.spec.zero();
                    for i in 0..m {
                        for j in 0..n {
                            for k in 0..q {
                                let term = &(self.get(i, j, k) * &cert.r[(i, i_new)])
                                    * &(&cert.s[(j, j_new)] * &cert.t[(k, k_new)]);
                                acc = &acc + &term;
                            }
                        }
                    }
                    *out.get_mut(i_new, j_new, k_new) = acc;
                }
            }
        }
        Ok(out)
    }

    /// The trilinear form value `Σ a_{ijk} u_i v_j w_k`.
    pub fn eval_form(
        &self,
        u: &[FieldElement],
        v: &[FieldElement],
        w: &[FieldElement],
    ) -> Result<FieldElement, Error> {
        let [m, n, q] = self.dims;
        if u.len() != m || v.len() != n || w.len() != q {
            return Err(Error::shape(format!(
                "vectors of lengths {}, {}, {} against a {m}×{n}×{q} tensor",
                u.len(),
                v.len(),
                w.len()
            )));
        }
        let mut acc = self.spec.zero();
        for i in 0..m {
            for j in 0..n {
                for k in 0..q {
                    acc = &acc + &(&(self.get(i, j, k) * &u[i]) * &(&v[j] * &w[k]));
                }
            }
        }
        Ok(acc)
    }
}

impl fmt::Debug for SpatialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [m, n, q] = self.dims;
        writeln!(f, "SpatialMatrix {m}×{n}×{q} over {}", self.spec)?;
        for i in 0..m {
            let mut row = String::new();
            for k in 0..q {
                if k > 0 {
                    row.push_str(" | ");
                }
                let cells: Vec<String> =
                    (0..n).map(|j| self.get(i, j, k).to_string()).collect();
                row.push_str(&cells.join(" "));
            }
            writeln!(f, "  ‖ {row} ‖")?;
        }
        Ok(())
    }
}

/// The mode ranks (m′, n′, q′).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ModeRanks {
    pub m: usize,
    pub n: usize,
    pub q: usize,
}

/// A triple (R, S, T) of nonsingular matrices witnessing an equivalence;
/// checkable against any tensor pair by direct application.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquivCertificate {
    r: ExactMatrix,
    s: ExactMatrix,
    t: ExactMatrix,
}

impl EquivCertificate {
    /// Validates squareness and nonsingularity of all three components.
    pub fn new(r: ExactMatrix, s: ExactMatrix, t: ExactMatrix) -> Result<Self, Error> {
        for mat in [&r, &s, &t] {
            if !mat.is_square() {
                return Err(Error::shape(format!(
                    "certificate component is {}×{}",
                    mat.rows(),
                    mat.cols()
                )));
            }
            // Identity components are common and trivially nonsingular.
            if *mat == ExactMatrix::identity(mat.spec(), mat.rows()) {
                continue;
            }
            if !mat.is_nonsingular() {
                return Err(Error::SingularCertificate);
            }
        }
        if r.spec() != s.spec() || s.spec() != t.spec() {
            return Err(Error::FieldMismatch(
                r.spec().to_string(),
                if s.spec() != r.spec() { s.spec() } else { t.spec() }.to_string(),
            ));
        }
        Ok(EquivCertificate { r, s, t })
    }

    pub fn identity(spec: FieldSpec, dims: [usize; 3]) -> Self {
        EquivCertificate {
            r: ExactMatrix::identity(spec, dims[0]),
            s: ExactMatrix::identity(spec, dims[1]),
            t: ExactMatrix::identity(spec, dims[2]),
        }
    }

    pub fn r(&self) -> &ExactMatrix {
        &self.r
    }

    pub fn s(&self) -> &ExactMatrix {
        &self.s
    }

    pub fn t(&self) -> &ExactMatrix {
        &self.t
    }

    pub fn spec(&self) -> FieldSpec {
        self.r.spec()
    }

    /// The tensor dimensions this certificate acts on.
    pub fn dims(&self) -> [usize; 3] {
        [self.r.rows(), self.s.rows(), self.t.rows()]
    }

    pub fn is_identity(&self) -> bool {
        let spec = self.spec();
        self.r == ExactMatrix::identity(spec, self.r.rows())
            && self.s == ExactMatrix::identity(spec, self.s.rows())
            && self.t == ExactMatrix::identity(spec, self.t.rows())
    }

    fn check_dims(&self, tensor: &SpatialMatrix) -> Result<(), Error> {
        if self.dims() != tensor.dims() {
            return Err(Error::shape(format!(
                "certificate for dims {:?} applied to {:?}",
                self.dims(),
                tensor.dims()
            )));
        }
        if self.spec() != tensor.spec() {
            return Err(Error::FieldMismatch(
                self.spec().to_string(),
                tensor.spec().to_string(),
            ));
        }
        Ok(())
    }

    /// Sequential composition: applying `compose(c1, c2)` equals applying
    /// `c1` then `c2`. Componentwise this is `(R₁R₂, S₁S₂, T₁T₂)`.
    pub fn compose(&self, then: &EquivCertificate) -> Result<EquivCertificate, Error> {
        Ok(EquivCertificate {
            r: self.r.matmul(&then.r)?,
            s: self.s.matmul(&then.s)?,
            t: self.t.matmul(&then.t)?,
        })
    }

    /// The certificate undoing this one.
    pub fn inverse(&self) -> Result<EquivCertificate, Error> {
        Ok(EquivCertificate {
            r: self.r.inverse()?,
            s: self.s.inverse()?,
            t: self.t.inverse()?,
        })
    }
}

/// One elementary move of a reduction, kept for audit: the certificate it
/// contributed and which components act.
#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub name: &'static str,
    /// Which certificate components are non-identity: a subset of "RST".
    pub mode: String,
    pub cert: EquivCertificate,
}

impl ReductionStep {
    pub fn new(name: &'static str, cert: EquivCertificate) -> Self {
        let spec = cert.spec();
        let mut mode = String::new();
        if cert.r != ExactMatrix::identity(spec, cert.r.rows()) {
            mode.push('R');
        }
        if cert.s != ExactMatrix::identity(spec, cert.s.rows()) {
            mode.push('S');
        }
        if cert.t != ExactMatrix::identity(spec, cert.t.rows()) {
            mode.push('T');
        }
        ReductionStep { name, mode, cert }
    }
}
