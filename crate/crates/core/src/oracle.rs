//! Brute-force ground truth over small finite fields: orbit enumeration
//! under the equivalence group action and exhaustive classification of
//! the full tensor space. Entirely independent of the canonicalizer.
//!
//! Tensors are encoded as base-p integers; orbits are breadth-first
//! closures of a tensor under generators of GL acting on each mode
//! separately, which visits only the orbit instead of the (much larger)
//! full group.

use std::collections::{HashSet, VecDeque};

use crate::error::Error;
use crate::exactmat::ExactMatrix;
use crate::field::FieldSpec;
use crate::spatial::SpatialMatrix;

/// Ceiling for exhaustive enumeration; guards the CLI against runs that
/// cannot finish at desk scale.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// A generating set of GL(size, p): all transvections `I + λE_{uv}`
/// (u ≠ v, λ ≠ 0) and all one-slot diagonal scalings `diag(1,…,λ,…,1)`
/// with λ ∉ {0, 1}.
pub fn gl_generators(size: usize, spec: FieldSpec) -> Result<Vec<ExactMatrix>, Error> {
    let p = require_prime(spec)?;
    Ok(gl_generators_raw(size, p)
        .into_iter()
        .map(|g| {
            let mut m = ExactMatrix::zero(spec, size, size);
            for i in 0..size {
                for j in 0..size {
                    m[(i, j)] = spec.from_integer(g[i * size + j] as i64);
                }
            }
            m
        })
        .collect())
}

/// Row-major u64 generators, the representation the search runs on.
fn gl_generators_raw(size: usize, p: u64) -> Vec<Vec<u64>> {
    let mut gens = Vec::new();
    let identity = |gens: &mut Vec<Vec<u64>>| -> Vec<u64> {
        let _ = gens;
        let mut m = vec![0u64; size * size];
        for i in 0..size {
            m[i * size + i] = 1;
        }
        m
    };
    for u in 0..size {
        for v in 0..size {
            if u == v {
                continue;
            }
            for lambda in 1..p {
                let mut m = identity(&mut gens);
                m[u * size + v] = lambda;
                gens.push(m);
            }
        }
    }
    for u in 0..size {
        for lambda in 2..p {
            let mut m = identity(&mut gens);
            m[u * size + u] = lambda;
            gens.push(m);
        }
    }
    gens
}

fn require_prime(spec: FieldSpec) -> Result<u64, Error> {
    spec.modulus()
        .ok_or_else(|| Error::UnsupportedField(spec.to_string()))
}

/// Flat tensor values over GF(p), entry (i,j,k) at `(i·n + j)·q + k` —
/// the same layout as [`SpatialMatrix`], so encodings are comparable.
struct RawTensor {
    p: u64,
    dims: [usize; 3],
}

impl RawTensor {
    fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    fn space_size(&self) -> u128 {
        (self.p as u128).pow(self.len() as u32)
    }

    fn encode(&self, vals: &[u64]) -> u64 {
        let mut code = 0u64;
        for &v in vals.iter().rev() {
            code = code * self.p + v;
        }
        code
    }

    fn decode(&self, mut code: u64) -> Vec<u64> {
        let mut vals = vec![0u64; self.len()];
        for v in vals.iter_mut() {
            *v = code % self.p;
            code /= self.p;
        }
        vals
    }

    /// b = Σ_old a·g[old][new] along one mode; matches the action of a
    /// certificate with `g` in the corresponding slot and identities
    /// elsewhere.
    fn apply_mode(&self, vals: &[u64], axis: usize, g: &[u64]) -> Vec<u64> {
        let [m, n, q] = self.dims;
        let size = self.dims[axis];
        let mut out = vec![0u64; vals.len()];
        let index = |i: usize, j: usize, k: usize| (i * n + j) * q + k;
        for i in 0..m {
            for j in 0..n {
                for k in 0..q {
                    let old = match axis {
                        0 => i,
                        1 => j,
                        _ => k,
                    };
                    let a = vals[index(i, j, k)];
                    if a == 0 {
                        continue;
                    }
                    for new in 0..size {
                        let coeff = g[old * size + new];
                        if coeff == 0 {
                            continue;
                        }
                        let target = match axis {
                            0 => index(new, j, k),
                            1 => index(i, new, k),
                            _ => index(i, j, new),
                        };
                        out[target] = (out[target] + a * coeff) % self.p;
                    }
                }
            }
        }
        out
    }
}

fn raw_from_spatial(a: &SpatialMatrix) -> Result<(RawTensor, Vec<u64>), Error> {
    let p = require_prime(a.spec())?;
    let raw = RawTensor { p, dims: a.dims() };
    let [m, n, q] = a.dims();
    let mut vals = vec![0u64; raw.len()];
    for i in 0..m {
        for j in 0..n {
            for k in 0..q {
                vals[(i * n + j) * q + k] = a
                    .get(i, j, k)
                    .as_residue()
                    .expect("prime spec implies residues");
            }
        }
    }
    Ok((raw, vals))
}

fn spatial_from_raw(spec: FieldSpec, raw: &RawTensor, vals: &[u64]) -> SpatialMatrix {
    let entries = vals
        .iter()
        .map(|&v| spec.from_integer(v as i64))
        .collect();
    SpatialMatrix::new(spec, raw.dims, entries).expect("raw tensors are well-formed")
}

/// The base-p encoding of a tensor over GF(p), little-endian in the
/// entry order of [`SpatialMatrix`].
pub fn encode_tensor(a: &SpatialMatrix) -> Result<u64, Error> {
    let (raw, vals) = raw_from_spatial(a)?;
    Ok(raw.encode(&vals))
}

/// Inverse of [`encode_tensor`].
pub fn decode_tensor(spec: FieldSpec, dims: [usize; 3], code: u64) -> Result<SpatialMatrix, Error> {
    let p = require_prime(spec)?;
    let raw = RawTensor { p, dims };
    if code as u128 >= raw.space_size() {
        return Err(Error::shape(format!(
            "encoding {code} outside a space of {} tensors",
            raw.space_size()
        )));
    }
    Ok(spatial_from_raw(spec, &raw, &raw.decode(code)))
}

/// The full equivalence class of `a`, sorted by base-p encoding.
///
/// Guarded by [`DEFAULT_ENUMERATION_BUDGET`]: an orbit that grows past
/// the budget aborts with [`Error::BudgetExceeded`] instead of
/// exhausting memory.
pub fn orbit(a: &SpatialMatrix) -> Result<Vec<SpatialMatrix>, Error> {
    let spec = a.spec();
    let (raw, vals) = raw_from_spatial(a)?;
    let codes = orbit_codes(&raw, raw.encode(&vals), DEFAULT_ENUMERATION_BUDGET)?;
    Ok(codes
        .into_iter()
        .map(|code| spatial_from_raw(spec, &raw, &raw.decode(code)))
        .collect())
}

fn mode_generators(raw: &RawTensor) -> Vec<(usize, Vec<u64>)> {
    let mut gens = Vec::new();
    for axis in 0..3 {
        for g in gl_generators_raw(raw.dims[axis], raw.p) {
            gens.push((axis, g));
        }
    }
    gens
}

fn orbit_codes(raw: &RawTensor, start: u64, budget: u64) -> Result<Vec<u64>, Error> {
    let gens = mode_generators(raw);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start);
    queue.push_back(start);
    let mut codes = vec![start];
    while let Some(code) = queue.pop_front() {
        let vals = raw.decode(code);
        for (axis, g) in &gens {
            let neighbor = raw.encode(&raw.apply_mode(&vals, *axis, g));
            if seen.insert(neighbor) {
                if seen.len() as u64 > budget {
                    return Err(Error::BudgetExceeded {
                        needed: seen.len() as u128,
                        budget,
                    });
                }
                codes.push(neighbor);
                queue.push_back(neighbor);
            }
        }
    }
    codes.sort_unstable();
    Ok(codes)
}

/// One orbit of the classification: its smallest member and its size.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub representative: SpatialMatrix,
    pub size: u64,
}

/// Exhaustive partition of the tensor space over a small finite field.
#[derive(Clone, Debug)]
pub struct Classification {
    pub spec: FieldSpec,
    pub dims: [usize; 3],
    pub orbits: Vec<Orbit>,
    /// Total number of tensors, `p^(m·n·q)`.
    pub total: u64,
    /// Orbit index of every tensor, indexed by base-p encoding.
    pub assignment: Vec<u32>,
}

impl Classification {
    /// The orbit index of a tensor of the classified dimensions.
    pub fn orbit_index(&self, a: &SpatialMatrix) -> Result<u32, Error> {
        if a.dims() != self.dims || a.spec() != self.spec {
            return Err(Error::shape(format!(
                "tensor of dims {:?} against a classification of dims {:?}",
                a.dims(),
                self.dims
            )));
        }
        let (raw, vals) = raw_from_spatial(a)?;
        Ok(self.assignment[raw.encode(&vals) as usize])
    }
}

/// Partitions all `p^(m·n·q)` tensors into equivalence orbits by
/// breadth-first closure, seeding each orbit with the smallest encoding
/// not yet visited (which is therefore the orbit's minimum).
pub fn classify_all(
    spec: FieldSpec,
    dims: [usize; 3],
    budget: u64,
) -> Result<Classification, Error> {
    let p = require_prime(spec)?;
    let raw = RawTensor { p, dims };
    let space = raw.space_size();
    if space > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: space,
            budget,
        });
    }
    let total = space as u64;
    let gens = mode_generators(&raw);
    const UNVISITED: u32 = u32::MAX;
    let mut assignment = vec![UNVISITED; total as usize];
    let mut orbits = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..total {
        if assignment[seed as usize] != UNVISITED {
            continue;
        }
        let orbit_id = orbits.len() as u32;
        let mut size = 1u64;
        assignment[seed as usize] = orbit_id;
        queue.push_back(seed);
        while let Some(code) = queue.pop_front() {
            let vals = raw.decode(code);
            for (axis, g) in &gens {
                let neighbor = raw.encode(&raw.apply_mode(&vals, *axis, g));
                if assignment[neighbor as usize] == UNVISITED {
                    assignment[neighbor as usize] = orbit_id;
                    size += 1;
                    queue.push_back(neighbor);
                }
            }
        }
        orbits.push(Orbit {
            representative: spatial_from_raw(spec, &raw, &raw.decode(seed)),
            size,
        });
    }
    Ok(Classification {
        spec,
        dims,
        orbits,
        total,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonicalizer::{canonicalize, CanonicalLabel};
    use crate::spatial::EquivCertificate;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn size_one_generators_are_the_nontrivial_scalings() {
        let gens = gl_generators(1, gf(3)).unwrap();
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0][(0, 0)], gf(3).from_integer(2));
        assert!(gl_generators(2, FieldSpec::rationals()).is_err());
    }

    /// Closure of the generators under multiplication must be the whole
    /// general linear group.
    fn closure_size(size: usize, p: u64) -> usize {
        let spec = gf(p);
        let gens = gl_generators(size, spec).unwrap();
        let encode = |m: &ExactMatrix| -> u64 {
            let mut code = 0u64;
            for i in 0..size {
                for j in 0..size {
                    code = code * p + m[(i, j)].as_residue().unwrap();
                }
            }
            code
        };
        let mut seen = HashSet::new();
        let identity = ExactMatrix::identity(spec, size);
        seen.insert(encode(&identity));
        let mut queue = vec![identity];
        while let Some(m) = queue.pop() {
            for g in &gens {
                let next = &m * g;
                if seen.insert(encode(&next)) {
                    queue.push(next);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn generator_closures_have_full_group_order() {
        // |GL₂(p)| = (p²−1)(p²−p).
        assert_eq!(closure_size(2, 3), 48);
        assert_eq!(closure_size(2, 5), 480);
    }

    #[test]
    fn orbit_of_zero_is_a_singleton() {
        let zero = SpatialMatrix::zero(gf(3), [2, 2, 2]);
        let orb = orbit(&zero).unwrap();
        assert_eq!(orb.len(), 1);
        assert_eq!(orb[0], zero);
    }

    #[test]
    fn orbit_of_a_nonzero_scalar_is_all_nonzero_scalars() {
        let spec = gf(3);
        let mut t = SpatialMatrix::zero(spec, [1, 1, 1]);
        *t.get_mut(0, 0, 0) = spec.one();
        let orb = orbit(&t).unwrap();
        assert_eq!(orb.len(), 2);
        let values: Vec<u64> = orb
            .iter()
            .map(|x| x.get(0, 0, 0).as_residue().unwrap())
            .collect();
        assert_eq!(values, vec![1, 2]);
    }

    #[test]
    fn orbit_contains_certificate_transforms() {
        let spec = gf(3);
        let t = CanonicalLabel::A11(spec.one())
            .regular_tensor(spec)
            .unwrap();
        let cert = EquivCertificate::new(
            ExactMatrix::from_integers(spec, &[&[1, 2], &[1, 1]]),
            ExactMatrix::from_integers(spec, &[&[2, 1], &[0, 1]]),
            ExactMatrix::from_integers(spec, &[&[1, 1], &[2, 0]]),
        )
        .unwrap();
        let moved = t.apply_equivalence(&cert).unwrap();
        let orb = orbit(&t).unwrap();
        assert!(orb.contains(&moved));
        assert!(orb.contains(&t));
    }

    #[test]
    fn classification_of_scalars() {
        let c = classify_all(gf(3), [1, 1, 1], DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(c.total, 3);
        assert_eq!(c.orbits.len(), 2);
        let sizes: Vec<u64> = c.orbits.iter().map(|o| o.size).collect();
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn classification_of_1x2x2_has_three_classes() {
        let c = classify_all(gf(3), [1, 2, 2], DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(c.total, 81);
        assert_eq!(c.orbits.len(), 3);
        // Sizes frozen from an independent full-group enumeration.
        let mut sizes: Vec<u64> = c.orbits.iter().map(|o| o.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 32, 48]);
        // Representatives fall into the three admissible families.
        let labels: Vec<CanonicalLabel> = c
            .orbits
            .iter()
            .map(|o| canonicalize(&o.representative).unwrap().label)
            .collect();
        assert!(labels.contains(&CanonicalLabel::Zero));
        assert!(labels.contains(&CanonicalLabel::A9));
        assert!(labels.contains(&CanonicalLabel::A10b));
    }

    #[test]
    fn classification_of_2x2x2_matches_the_catalogue() {
        let spec = gf(3);
        let c = classify_all(spec, [2, 2, 2], DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(c.total, 6561);
        // Sizes frozen from an independent full-group enumeration.
        let mut sizes: Vec<u64> = c.orbits.iter().map(|o| o.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 128, 192, 192, 192, 864, 1536, 3456]);
        let expected = crate::canonicalizer::admissible_labels(spec, [2, 2, 2])
            .unwrap()
            .len();
        assert_eq!(c.orbits.len(), expected);
        // Orbit sizes divide |GL₂(3)|³.
        let group_order = 48u64 * 48 * 48;
        for o in &c.orbits {
            assert_eq!(group_order % o.size, 0, "orbit size {}", o.size);
        }
        // The smallest encoding of an orbit is its representative, so
        // representatives must be mutually inequivalent seeds.
        let mut reps = HashSet::new();
        for o in &c.orbits {
            assert!(reps.insert(c.orbit_index(&o.representative).unwrap()));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let result = classify_all(gf(5), [2, 2, 2], 100);
        assert!(matches!(result, Err(Error::BudgetExceeded { .. })));
    }
}
