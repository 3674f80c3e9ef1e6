//! Exact scalar arithmetic over ℚ and GF(p) for odd primes p, with square
//! detection and canonical square-class representatives.
//!
//! Rationals are arbitrary-precision fractions kept in lowest terms with a
//! positive denominator; prime-field values are residues in `[0, p)`.
//! Characteristic two is rejected at [`FieldSpec`] construction: the
//! classification divides by two.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Squarefree extraction for a rational `n/d` factors `|n|` and `d`
/// separately (they are coprime); either integer exceeding `2⁶⁴` aborts
/// the operation — inputs of that size are outside the intended scale of
/// the tool.
pub const DEFAULT_FACTOR_BOUND_LOG2: u32 = 64;

/// The coefficient field: ℚ or GF(p) for an odd prime p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldSpec {
    kind: FieldKind,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum FieldKind {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    /// The field of rational numbers.
    pub fn rationals() -> Self {
        FieldSpec {
            kind: FieldKind::Rationals,
        }
    }

    /// GF(p). Fails for p = 2 (characteristic two) and for composite p.
    pub fn prime(p: u64) -> Result<Self, Error> {
        if p % 2 == 0 {
            return Err(Error::CharacteristicTwo(p));
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec {
            kind: FieldKind::Prime(p),
        })
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self.kind, FieldKind::Rationals)
    }

    /// The modulus for GF(p), `None` for ℚ.
    pub fn modulus(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Rationals => None,
            FieldKind::Prime(p) => Some(p),
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_integer(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_integer(1)
    }

    /// Coerces a signed integer into the field.
    pub fn from_integer(&self, n: i64) -> FieldElement {
        match self.kind {
            FieldKind::Rationals => FieldElement {
                spec: *self,
                value: Value::Rational(BigRational::from_integer(BigInt::from(n))),
            },
            FieldKind::Prime(p) => FieldElement {
                spec: *self,
                value: Value::Residue(n.rem_euclid(p as i64) as u64),
            },
        }
    }

    /// Coerces an arbitrary-precision integer into the field.
    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match self.kind {
            FieldKind::Rationals => FieldElement {
                spec: *self,
                value: Value::Rational(BigRational::from_integer(n.clone())),
            },
            FieldKind::Prime(p) => {
                let p_big = BigInt::from(p);
                let r = ((n % &p_big) + &p_big) % &p_big;
                let (_, digits) = r.to_u64_digits();
                FieldElement {
                    spec: *self,
                    value: Value::Residue(digits.first().copied().unwrap_or(0)),
                }
            }
        }
    }

    /// `num/den` in the field; for GF(p) this is `num · den⁻¹`.
    pub fn from_fraction(&self, num: i64, den: i64) -> Result<FieldElement, Error> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        match self.kind {
            FieldKind::Rationals => Ok(FieldElement {
                spec: *self,
                value: Value::Rational(BigRational::new(BigInt::from(num), BigInt::from(den))),
            }),
            FieldKind::Prime(_) => self.from_integer(num).div(&self.from_integer(den)),
        }
    }

    /// Wraps an exact rational; only valid for the ℚ spec.
    pub fn from_ratio(&self, r: BigRational) -> Result<FieldElement, Error> {
        match self.kind {
            FieldKind::Rationals => Ok(FieldElement {
                spec: *self,
                value: Value::Rational(r),
            }),
            FieldKind::Prime(p) => Err(Error::UnsupportedField(format!(
                "cannot wrap a rational in GF({p})"
            ))),
        }
    }

    /// All field elements, for exhaustive loops. `None` for ℚ.
    pub fn elements(&self) -> Option<impl Iterator<Item = FieldElement> + '_> {
        let p = self.modulus()?;
        let spec = *self;
        Some((0..p).map(move |r| FieldElement {
            spec,
            value: Value::Residue(r),
        }))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// An exact scalar: a reduced fraction over ℚ, or a residue in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    spec: FieldSpec,
    value: Value,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Value {
    Rational(BigRational),
    Residue(u64),
}

impl FieldElement {
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rational(r) => r.is_zero(),
            Value::Residue(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            Value::Rational(r) => r.is_one(),
            Value::Residue(r) => *r == 1,
        }
    }

    /// The reduced fraction, for ℚ elements.
    pub fn as_ratio(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rational(r) => Some(r),
            Value::Residue(_) => None,
        }
    }

    /// The residue in `[0, p)`, for GF(p) elements.
    pub fn as_residue(&self) -> Option<u64> {
        match &self.value {
            Value::Rational(_) => None,
            Value::Residue(r) => Some(*r),
        }
    }

    fn check_same_spec(&self, other: &FieldElement) {
        assert_eq!(
            self.spec, other.spec,
            "field mismatch: {} vs {}",
            self.spec, other.spec
        );
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<FieldElement, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let value = match &self.value {
            Value::Rational(r) => Value::Rational(r.recip()),
            Value::Residue(r) => {
                let p = self.spec.modulus().expect("residue implies prime spec");
                // Fermat: r^(p-2) mod p.
                Value::Residue(pow_mod(*r, p - 2, p))
            }
        };
        Ok(FieldElement {
            spec: self.spec,
            value,
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, Error> {
        self.check_same_spec(other);
        Ok(self * &other.inv()?)
    }

    /// Some square root of `self`, or `None` if `self` is not a square.
    ///
    /// Over GF(p) squareness is decided by the Euler criterion and the
    /// root is the smallest one (p is small by design, so exhaustive
    /// search is fine). Over ℚ both numerator and denominator must be
    /// perfect squares.
    pub fn is_square(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return Some(self.spec.zero());
        }
        match &self.value {
            Value::Rational(r) => {
                if r.is_negative() {
                    return None;
                }
                let num_root = exact_sqrt(r.numer())?;
                let den_root = exact_sqrt(r.denom())?;
                Some(FieldElement {
                    spec: self.spec,
                    value: Value::Rational(BigRational::new(num_root, den_root)),
                })
            }
            Value::Residue(r) => {
                let p = self.spec.modulus().expect("residue implies prime spec");
                if pow_mod(*r, (p - 1) / 2, p) != 1 {
                    return None;
                }
                let z = (1..p)
                    .find(|z| mul_mod(*z, *z, p) == *r)
                    .expect("Euler criterion promised a root");
                Some(FieldElement {
                    spec: self.spec,
                    value: Value::Residue(z),
                })
            }
        }
    }

    /// The canonical representative of the square class of `self`,
    /// returned as `(rep, z)` with `self = rep · z²` and `z ≠ 0`.
    ///
    /// * zero ↦ `(0, 1)`;
    /// * GF(p): `rep ∈ {1, ε}` where ε is the smallest non-residue;
    /// * ℚ: `rep` is the signed squarefree integer left after removing
    ///   the square part of `num·den` by trial division.
    pub fn square_class_rep(&self) -> Result<(FieldElement, FieldElement), Error> {
        self.square_class_rep_with_bound(&(BigInt::one() << DEFAULT_FACTOR_BOUND_LOG2))
    }

    /// [`Self::square_class_rep`] with an explicit factorization bound on
    /// `|num·den|` (only relevant over ℚ).
    pub fn square_class_rep_with_bound(
        &self,
        bound: &BigInt,
    ) -> Result<(FieldElement, FieldElement), Error> {
        if self.is_zero() {
            return Ok((self.spec.zero(), self.spec.one()));
        }
        match &self.value {
            Value::Residue(r) => {
                let p = self.spec.modulus().expect("residue implies prime spec");
                if let Some(z) = self.is_square() {
                    return Ok((self.spec.one(), z));
                }
                let eps = least_nonresidue(p);
                // a/ε is a residue: the product of two non-residues is a square.
                let t = mul_mod(*r, pow_mod(eps, p - 2, p), p);
                let z = (1..p)
                    .find(|z| mul_mod(*z, *z, p) == t)
                    .expect("quotient of non-residues is a square");
                Ok((
                    self.spec.from_integer(eps as i64),
                    self.spec.from_integer(z as i64),
                ))
            }
            Value::Rational(r) => {
                // a = s·n/d reduced, n = f₁k₁², d = f₂k₂² squarefree
                // splits. Then a = (s·f₁f₂)·(k₁/(k₂f₂))², and the two
                // integers can be factored independently because n and d
                // are coprime.
                let num = r.numer().abs();
                let den = r.denom().clone();
                for part in [&num, &den] {
                    if *part > *bound {
                        return Err(Error::FactorizationOverflow(
                            part.to_string(),
                            bound.to_string(),
                        ));
                    }
                }
                let (num_free, num_root) = squarefree_split(&num);
                let (den_free, den_root) = squarefree_split(&den);
                let mut signed = &num_free * &den_free;
                if r.is_negative() {
                    signed = -signed;
                }
                let rep = self.spec.from_bigint(&signed);
                let z = FieldElement {
                    spec: self.spec,
                    value: Value::Rational(BigRational::new(num_root, den_root * den_free)),
                };
                Ok((rep, z))
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rational(r) => write!(f, "{r}"),
            Value::Residue(r) => write!(f, "{r}"),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.check_same_spec(rhs);
                let value = match (&self.value, &rhs.value) {
                    (Value::Rational(a), Value::Rational(b)) => Value::Rational(a $op b),
                    (Value::Residue(a), Value::Residue(b)) => {
                        let p = self.spec.modulus().expect("residue implies prime spec");
                        Value::Residue(binop!(@mod $method, *a, *b, p))
                    }
                    _ => unreachable!("spec equality implies same representation"),
                };
                FieldElement { spec: self.spec, value }
            }
        }
        impl $trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
    (@mod add, $a:expr, $b:expr, $p:expr) => { add_mod($a, $b, $p) };
    (@mod sub, $a:expr, $b:expr, $p:expr) => { add_mod($a, $p - $b, $p) };
    (@mod mul, $a:expr, $b:expr, $p:expr) => { mul_mod($a, $b, $p) };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let value = match &self.value {
            Value::Rational(r) => Value::Rational(-r),
            Value::Residue(0) => Value::Residue(0),
            Value::Residue(r) => {
                let p = self.spec.modulus().expect("residue implies prime spec");
                Value::Residue(p - r)
            }
        };
        FieldElement {
            spec: self.spec,
            value,
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest quadratic non-residue modulo an odd prime p.
fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&r| pow_mod(r, (p - 1) / 2, p) != 1)
        .expect("odd prime fields have non-residues")
}

/// Exact integer square root of a non-negative integer, if one exists.
fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let root = n.sqrt();
    if &root * &root == *n {
        Some(root)
    } else {
        None
    }
}

/// Writes `n ≥ 1` as `f·k²` with `f` squarefree; returns `(f, k)`.
///
/// Trial division runs up to the cube root; the cofactor then has at most
/// two prime factors, so it is either a perfect square or squarefree.
fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    if let Ok(small) = u128::try_from(n.clone()) {
        let (f, k) = squarefree_split_u128(small);
        return (BigInt::from(f), BigInt::from(k));
    }
    let mut remaining = n.clone();
    let mut squarefree = BigInt::one();
    let mut root = BigInt::one();
    let mut d = BigInt::from(2);
    while &d * &d * &d <= remaining {
        let mut mult = 0u32;
        while (&remaining % &d).is_zero() {
            remaining /= &d;
            mult += 1;
        }
        for _ in 0..mult / 2 {
            root *= &d;
        }
        if mult % 2 == 1 {
            squarefree *= &d;
        }
        d += 1;
    }
    if !remaining.is_one() {
        match exact_sqrt(&remaining) {
            Some(r) => root *= r,
            None => squarefree *= &remaining,
        }
    }
    (squarefree, root)
}

fn squarefree_split_u128(n: u128) -> (u128, u128) {
    let mut remaining = n;
    let mut squarefree = 1u128;
    let mut root = 1u128;
    let mut d = 2u128;
    while d.saturating_mul(d).saturating_mul(d) <= remaining {
        if remaining % d == 0 {
            let mut mult = 0u32;
            while remaining % d == 0 {
                remaining /= d;
                mult += 1;
            }
            for _ in 0..mult / 2 {
                root *= d;
            }
            if mult % 2 == 1 {
                squarefree *= d;
            }
        }
        d += 1;
    }
    if remaining > 1 {
        let r = remaining.isqrt();
        if r * r == remaining {
            root *= r;
        } else {
            squarefree *= remaining;
        }
    }
    (squarefree, root)
}
