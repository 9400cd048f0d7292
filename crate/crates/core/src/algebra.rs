//! The ring `A = ⊕ R·eᵢ` over ℚ or a prime field, with dense coefficient vectors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest algebra dimension accepted from external input.
pub const MAX_DIM: usize = 1024;

/// Default bound on supports handed to [`IdempotentAlgebra::all_idempotents`].
pub const DEFAULT_IDEMPOTENT_CAP: usize = 20;

const MAX_PRIME: u64 = 1 << 31;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("support of size {size} exceeds the cap of {cap}")]
    SupportTooLarge { size: usize, cap: usize },
    #[error("index {index} is out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid base ring `{0}`; expected `Q` or `Fp:<prime>`")]
    BadBase(String),
    #[error("invalid scalar `{0}`")]
    BadScalar(String),
    #[error("dimension {0} is out of range")]
    BadDimension(usize),
}

/// Exact base ring: the rationals or `𝔽_p`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum BaseRing {
    #[default]
    Rationals,
    PrimeField(u64),
}

impl BaseRing {
    pub fn characteristic(self) -> u64 {
        match self {
            BaseRing::Rationals => 0,
            BaseRing::PrimeField(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            BaseRing::Rationals => Scalar::Rational(BigRational::zero()),
            BaseRing::PrimeField(_) => Scalar::Modular(0),
        }
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            BaseRing::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            BaseRing::PrimeField(p) => Scalar::Modular(v.rem_euclid(p as i64) as u64),
        }
    }

    pub fn add(self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (BaseRing::Rationals, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (BaseRing::PrimeField(p), Scalar::Modular(x), Scalar::Modular(y)) => {
                Scalar::Modular(((*x as u128 + *y as u128) % p as u128) as u64)
            }
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn neg(self, a: &Scalar) -> Scalar {
        match (self, a) {
            (BaseRing::Rationals, Scalar::Rational(x)) => Scalar::Rational(-x),
            (BaseRing::PrimeField(p), Scalar::Modular(x)) => Scalar::Modular((p - x % p) % p),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn sub(self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (BaseRing::Rationals, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (BaseRing::PrimeField(p), Scalar::Modular(x), Scalar::Modular(y)) => {
                Scalar::Modular(((*x as u128 * *y as u128) % p as u128) as u64)
            }
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn parse_scalar(self, s: &str) -> Result<Scalar, AlgebraError> {
        let bad = || AlgebraError::BadScalar(s.to_string());
        let t = s.trim();
        match self {
            BaseRing::Rationals => {
                let (num, den) = match t.split_once('/') {
                    Some((a, b)) => (a, b),
                    None => (t, "1"),
                };
                if num.len() > 4096 || den.len() > 4096 {
                    return Err(bad());
                }
                let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
                let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::Rational(BigRational::new(num, den)))
            }
            BaseRing::PrimeField(p) => {
                let v = i128::from_str(t).map_err(|_| bad())?;
                Ok(Scalar::Modular(v.rem_euclid(p as i128) as u64))
            }
        }
    }

    pub fn contains(self, s: &Scalar) -> bool {
        match (self, s) {
            (BaseRing::Rationals, Scalar::Rational(_)) => true,
            (BaseRing::PrimeField(p), Scalar::Modular(v)) => *v < p,
            _ => false,
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Rationals => write!(f, "Q"),
            BaseRing::PrimeField(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for BaseRing {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "Q" {
            return Ok(BaseRing::Rationals);
        }
        let bad = || AlgebraError::BadBase(s.to_string());
        let p: u64 = t.strip_prefix("Fp:").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if !(2..MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(bad());
        }
        Ok(BaseRing::PrimeField(p))
    }
}

impl Serialize for BaseRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BaseRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A coefficient in the base ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular(u64),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(x) => x.is_zero(),
            Scalar::Modular(v) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(x) => x.is_one(),
            Scalar::Modular(v) => *v == 1,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(x) if x.is_integer() => write!(f, "{}", x.numer()),
            Scalar::Rational(x) => {
                let sign = if x.is_negative() { "-" } else { "" };
                write!(f, "{sign}{}/{}", x.numer().abs(), x.denom())
            }
            Scalar::Modular(v) => write!(f, "{v}"),
        }
    }
}

/// `A = ⊕_{i<m} R·eᵢ` with pairwise orthogonal idempotents summing to one.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdempotentAlgebra {
    pub base: BaseRing,
    pub dim: usize,
}

impl IdempotentAlgebra {
    pub fn new(base: BaseRing, dim: usize) -> Result<Self, AlgebraError> {
        if dim > MAX_DIM {
            return Err(AlgebraError::BadDimension(dim));
        }
        Ok(IdempotentAlgebra { base, dim })
    }

    pub fn zero(&self) -> RingElement {
        RingElement { algebra: *self, coeffs: vec![self.base.zero(); self.dim] }
    }

    pub fn one(&self) -> RingElement {
        RingElement { algebra: *self, coeffs: vec![self.base.one(); self.dim] }
    }

    /// The minimal idempotent `e_i` (0-based).
    pub fn basis(&self, i: usize) -> Result<RingElement, AlgebraError> {
        if i >= self.dim {
            return Err(AlgebraError::IndexOutOfRange { index: i, dim: self.dim });
        }
        let mut x = self.zero();
        x.coeffs[i] = self.base.one();
        Ok(x)
    }

    /// `Σ_{i∈set} e_i`.
    pub fn indicator(&self, set: impl IntoIterator<Item = usize>) -> Result<RingElement, AlgebraError> {
        let mut x = self.zero();
        for i in set {
            if i >= self.dim {
                return Err(AlgebraError::IndexOutOfRange { index: i, dim: self.dim });
            }
            x.coeffs[i] = self.base.one();
        }
        Ok(x)
    }

    pub fn element(&self, coeffs: Vec<Scalar>) -> Result<RingElement, AlgebraError> {
        if coeffs.len() != self.dim || !coeffs.iter().all(|c| self.base.contains(c)) {
            return Err(AlgebraError::AlgebraMismatch);
        }
        Ok(RingElement { algebra: *self, coeffs })
    }

    pub fn from_integers(&self, coeffs: &[i64]) -> Result<RingElement, AlgebraError> {
        self.element(coeffs.iter().map(|&c| self.base.from_i64(c)).collect())
    }

    /// Every idempotent supported inside `support`, i.e. all 0/1 vectors there.
    pub fn all_idempotents(&self, support: &[usize], cap: usize) -> Result<Vec<RingElement>, AlgebraError> {
        let mut idx: Vec<usize> = support.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.len() > cap {
            return Err(AlgebraError::SupportTooLarge { size: idx.len(), cap });
        }
        if let Some(&i) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(AlgebraError::IndexOutOfRange { index: i, dim: self.dim });
        }
        let mut out = Vec::with_capacity(1 << idx.len());
        for mask in 0u64..(1u64 << idx.len()) {
            let chosen = idx.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i);
            out.push(self.indicator(chosen)?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    algebra: IdempotentAlgebra,
    coeffs: Vec<Scalar>,
}

impl RingElement {
    pub fn algebra(&self) -> IdempotentAlgebra {
        self.algebra
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Scalar {
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, c: Scalar) {
        assert!(self.algebra.base.contains(&c));
        self.coeffs[i] = c;
    }

    fn zip(&self, other: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self, AlgebraError> {
        if self.algebra != other.algebra {
            return Err(AlgebraError::AlgebraMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect();
        Ok(RingElement { algebra: self.algebra, coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        let base = self.algebra.base;
        self.zip(other, |a, b| base.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        let base = self.algebra.base;
        self.zip(other, |a, b| base.sub(a, b))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        let base = self.algebra.base;
        self.zip(other, |a, b| base.mul(a, b))
    }

    pub fn scale(&self, c: &Scalar) -> Result<Self, AlgebraError> {
        let base = self.algebra.base;
        if !base.contains(c) {
            return Err(AlgebraError::AlgebraMismatch);
        }
        let coeffs = self.coeffs.iter().map(|a| base.mul(a, c)).collect();
        Ok(RingElement { algebra: self.algebra, coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn is_idempotent(&self) -> bool {
        let base = self.algebra.base;
        self.coeffs.iter().all(|c| base.mul(c, c) == *c)
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    /// Coefficients as strings, the JSON element format.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }
}

/// `A ⊗_R A ≅ R^{m×m}`, with `eᵢ⊗eⱼ` at position `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSquare {
    algebra: IdempotentAlgebra,
    entries: Vec<Scalar>,
}

impl TensorSquare {
    pub fn zero(algebra: IdempotentAlgebra) -> Self {
        TensorSquare { algebra, entries: vec![algebra.base.zero(); algebra.dim * algebra.dim] }
    }

    /// `a ⊗ b`.
    pub fn pure(a: &RingElement, b: &RingElement) -> Result<Self, AlgebraError> {
        if a.algebra != b.algebra {
            return Err(AlgebraError::AlgebraMismatch);
        }
        let alg = a.algebra;
        let mut t = Self::zero(alg);
        for i in 0..alg.dim {
            for j in 0..alg.dim {
                t.entries[i * alg.dim + j] = alg.base.mul(&a.coeffs[i], &b.coeffs[j]);
            }
        }
        Ok(t)
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.algebra != other.algebra {
            return Err(AlgebraError::AlgebraMismatch);
        }
        let base = self.algebra.base;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| base.add(a, b)).collect();
        Ok(TensorSquare { algebra: self.algebra, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.algebra != other.algebra {
            return Err(AlgebraError::AlgebraMismatch);
        }
        let base = self.algebra.base;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| base.sub(a, b)).collect();
        Ok(TensorSquare { algebra: self.algebra, entries })
    }

    /// Product in `A ⊗ A`: `(a⊗b)(c⊗d) = ac⊗bd`, componentwise here.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.algebra != other.algebra {
            return Err(AlgebraError::AlgebraMismatch);
        }
        let base = self.algebra.base;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| base.mul(a, b)).collect();
        Ok(TensorSquare { algebra: self.algebra, entries })
    }

    /// The multiplication map `a⊗b ↦ ab`.
    pub fn multiply_out(&self) -> RingElement {
        let alg = self.algebra;
        let coeffs = (0..alg.dim).map(|i| self.entries[i * alg.dim + i].clone()).collect();
        RingElement { algebra: alg, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.algebra.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(m: usize) -> IdempotentAlgebra {
        IdempotentAlgebra::new(BaseRing::Rationals, m).unwrap()
    }

    #[test]
    fn orthogonal_basis() {
        let a = q(3);
        let e1 = a.basis(0).unwrap();
        let e2 = a.basis(1).unwrap();
        assert!(e1.mul(&e2).unwrap().is_zero());
        let s = e1.add(&e2).unwrap();
        assert_eq!(s.mul(&s).unwrap(), s);
        let sum = a.indicator(0..3).unwrap();
        assert_eq!(sum, a.one());
    }

    #[test]
    fn prime_field_arithmetic() {
        let a = IdempotentAlgebra::new("Fp:2".parse().unwrap(), 3).unwrap();
        let x = a.from_integers(&[1, 1, 0]).unwrap();
        let y = a.from_integers(&[0, 1, 1]).unwrap();
        assert_eq!(x.add(&y).unwrap(), a.from_integers(&[1, 0, 1]).unwrap());
        let f5 = IdempotentAlgebra::new("Fp:5".parse().unwrap(), 1).unwrap();
        let z = f5.from_integers(&[3]).unwrap();
        assert_eq!(z.mul(&z).unwrap(), f5.from_integers(&[4]).unwrap());
        assert_eq!(f5.from_integers(&[-1]).unwrap(), f5.from_integers(&[4]).unwrap());
    }

    #[test]
    fn mismatched_algebras() {
        let x = q(2).one();
        let y = q(3).one();
        assert_eq!(x.add(&y), Err(AlgebraError::AlgebraMismatch));
        let f = IdempotentAlgebra::new(BaseRing::PrimeField(3), 2).unwrap().one();
        assert_eq!(x.mul(&f), Err(AlgebraError::AlgebraMismatch));
    }

    #[test]
    fn idempotent_listing() {
        let a = q(4);
        assert_eq!(a.all_idempotents(&[], 20).unwrap(), vec![a.zero()]);
        let one = a.all_idempotents(&[0], 20).unwrap();
        assert_eq!(one, vec![a.zero(), a.basis(0).unwrap()]);
        let two = a.all_idempotents(&[0, 1], 20).unwrap();
        assert_eq!(two.len(), 4);
        assert!(two.iter().all(RingElement::is_idempotent));
        assert_eq!(a.all_idempotents(&[0, 1, 2], 2), Err(AlgebraError::SupportTooLarge { size: 3, cap: 2 }));
    }

    #[test]
    fn base_ring_parsing() {
        assert_eq!("Q".parse::<BaseRing>().unwrap(), BaseRing::Rationals);
        assert_eq!("Fp:7".parse::<BaseRing>().unwrap(), BaseRing::PrimeField(7));
        assert!("Fp:8".parse::<BaseRing>().is_err());
        assert!("Fp:1".parse::<BaseRing>().is_err());
        assert!("R".parse::<BaseRing>().is_err());
        let s = BaseRing::Rationals.parse_scalar("3/2").unwrap();
        assert_eq!(s.to_string(), "3/2");
        assert_eq!(BaseRing::Rationals.parse_scalar("-6/4").unwrap().to_string(), "-3/2");
        assert!(BaseRing::Rationals.parse_scalar("1/0").is_err());
        assert_eq!(BaseRing::PrimeField(5).parse_scalar("-1").unwrap(), Scalar::Modular(4));
    }

    #[test]
    fn tensor_square_identities() {
        let a = q(2);
        let e1 = a.basis(0).unwrap();
        let e2 = a.basis(1).unwrap();
        let t = TensorSquare::pure(&e1, &e1).unwrap().add(&TensorSquare::pure(&e2, &e2).unwrap()).unwrap();
        assert_eq!(t.multiply_out(), a.one());
        assert_eq!(t.mul(&t).unwrap(), t);
        let lhs = TensorSquare::pure(&e1, &a.one()).unwrap().sub(&TensorSquare::pure(&a.one(), &e1).unwrap());
        assert!(lhs.unwrap().mul(&t).unwrap().is_zero());
    }
}
