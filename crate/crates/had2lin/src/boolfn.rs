//! Boolean functions F₂ᵏ → {+1, −1} stored as packed truth tables.
//!
//! Point `x` is the integer whose bit `j` is coordinate `j`. The table bit at
//! position `x` is set exactly when `f(x) = −1`, which is also the text form:
//! character `x` of the bitstring is `'1'` for −1 and `'0'` for +1.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::gf2;
use crate::Rational;

pub const MAX_ARITY: u8 = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoolFnError {
    #[error("arity {0} outside 1..={MAX_ARITY}")]
    Arity(u8),
    #[error("table bits exceed 2^{0} points")]
    TableWidth(u8),
    #[error("point {point} outside F2^{k}")]
    Point { point: u32, k: u8 },
    #[error("invalid truth table {0:?}: expected a power-of-two length string of '0'/'1'")]
    Bitstring(String),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(u8, u8),
    #[error("hadamard matrix needs k >= 2, got {0}")]
    HadamardArity(u8),
}

/// Number of points of F₂ᵏ.
#[inline]
pub fn points(k: u8) -> u32 {
    1u32 << k
}

/// Mask with one bit per point of F₂ᵏ.
#[inline]
pub fn full_mask(k: u8) -> u32 {
    if k == 5 {
        u32::MAX
    } else {
        (1u32 << points(k)) - 1
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BoolFn {
    k: u8,
    bits: u32,
}

impl BoolFn {
    pub fn new(k: u8, bits: u32) -> Result<Self, BoolFnError> {
        check_arity(k)?;
        if bits & !full_mask(k) != 0 {
            return Err(BoolFnError::TableWidth(k));
        }
        Ok(BoolFn { k, bits })
    }

    /// Builds a function from its ±1 values in point order.
    pub fn from_signs(signs: &[i8]) -> Result<Self, BoolFnError> {
        let k = signs.len().trailing_zeros() as u8;
        if !signs.len().is_power_of_two() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(BoolFnError::Bitstring(format!("{signs:?}")));
        }
        let bits = signs
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &s)| acc | (((s == -1) as u32) << i));
        BoolFn::new(k, bits)
    }

    pub(crate) fn from_raw(k: u8, bits: u32) -> Self {
        debug_assert!(bits & !full_mask(k) == 0);
        BoolFn { k, bits }
    }

    pub fn constant(k: u8, negative: bool) -> Result<Self, BoolFnError> {
        check_arity(k)?;
        Ok(BoolFn { k, bits: if negative { full_mask(k) } else { 0 } })
    }

    /// The linear character x ↦ (−1)^{(α, x)}.
    pub fn chi(k: u8, alpha: u32) -> Result<Self, BoolFnError> {
        check_arity(k)?;
        if alpha >= points(k) {
            return Err(BoolFnError::Point { point: alpha, k });
        }
        Ok(BoolFn { k, bits: chi_mask(k, alpha) })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    /// Packed table; bit `x` is set iff `f(x) = −1`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn value(&self, x: u32) -> i8 {
        if self.is_negative_at(x) {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn is_negative_at(&self, x: u32) -> bool {
        (self.bits >> x) & 1 == 1
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..points(self.k)).map(|x| self.value(x)).collect()
    }

    pub fn negate(&self) -> BoolFn {
        BoolFn { k: self.k, bits: self.bits ^ full_mask(self.k) }
    }

    /// Number of points where the two functions differ.
    pub fn hamming(&self, other: &BoolFn) -> Result<u32, BoolFnError> {
        self.same_arity(other)?;
        Ok((self.bits ^ other.bits).count_ones())
    }

    /// Normalised Hamming distance.
    pub fn dist(&self, other: &BoolFn) -> Result<Rational, BoolFnError> {
        let h = self.hamming(other)?;
        Ok(Rational::new(BigInt::from(h), BigInt::from(points(self.k))))
    }

    pub fn fourier(&self) -> FourierTable {
        FourierTable { k: self.k, numer: walsh_hadamard(self.k, self.bits) }
    }

    pub fn affine_span(&self) -> AffineSubspace {
        AffineSubspace::span(self.fourier().support())
    }

    pub fn dimension(&self) -> usize {
        self.affine_span().dim()
    }

    /// True for the functions ±χ_α.
    pub fn is_affine(&self) -> bool {
        self.fourier().support().len() == 1
    }

    fn same_arity(&self, other: &BoolFn) -> Result<(), BoolFnError> {
        if self.k == other.k {
            Ok(())
        } else {
            Err(BoolFnError::ArityMismatch(self.k, other.k))
        }
    }
}

impl std::ops::Neg for BoolFn {
    type Output = BoolFn;
    fn neg(self) -> BoolFn {
        self.negate()
    }
}

impl fmt::Display for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..points(self.k))
            .map(|x| if self.is_negative_at(x) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl FromStr for BoolFn {
    type Err = BoolFnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.len();
        if !n.is_power_of_two() || !(2..=32).contains(&n) {
            return Err(BoolFnError::Bitstring(s.to_string()));
        }
        let mut bits = 0u32;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(BoolFnError::Bitstring(s.to_string())),
            }
        }
        BoolFn::new(n.trailing_zeros() as u8, bits)
    }
}

fn check_arity(k: u8) -> Result<(), BoolFnError> {
    if (1..=MAX_ARITY).contains(&k) {
        Ok(())
    } else {
        Err(BoolFnError::Arity(k))
    }
}

/// Packed table of χ_α.
pub(crate) fn chi_mask(k: u8, alpha: u32) -> u32 {
    (0..points(k)).fold(0u32, |acc, x| acc | (gf2::dot(alpha, x) << x))
}

/// Unnormalised transform: entry α is Σ_x χ_α(x) f(x).
fn walsh_hadamard(k: u8, bits: u32) -> Vec<i32> {
    let mut v: Vec<i32> = (0..points(k)).map(|x| 1 - 2 * ((bits >> x) & 1) as i32).collect();
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
    v
}

/// Exact Fourier coefficients, kept as integers over the common denominator 2ᵏ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierTable {
    k: u8,
    numer: Vec<i32>,
}

impl FourierTable {
    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn coefficient(&self, alpha: u32) -> Rational {
        Rational::new(BigInt::from(self.numer[alpha as usize]), BigInt::from(points(self.k)))
    }

    pub fn coefficients(&self) -> Vec<Rational> {
        (0..points(self.k)).map(|a| self.coefficient(a)).collect()
    }

    /// Coefficients scaled by 2ᵏ.
    pub fn numerators(&self) -> &[i32] {
        &self.numer
    }

    pub fn support(&self) -> Vec<u32> {
        (0..points(self.k)).filter(|&a| self.numer[a as usize] != 0).collect()
    }

    /// Evaluates Σ_α f̂_α χ_α; returns `None` if the result is not a ±1 table.
    pub fn invert(&self) -> Option<BoolFn> {
        let n = points(self.k) as i32;
        let mut bits = 0u32;
        for x in 0..points(self.k) {
            let s: i32 = (0..points(self.k))
                .map(|a| if gf2::dot(a, x) == 1 { -self.numer[a as usize] } else { self.numer[a as usize] })
                .sum();
            match s {
                s if s == n => {}
                s if s == -n => bits |= 1 << x,
                _ => return None,
            }
        }
        Some(BoolFn::from_raw(self.k, bits))
    }
}

/// An affine subspace α₀ + span(basis) of F₂ᵏ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSubspace {
    origin: u32,
    basis: Vec<u32>,
}

impl AffineSubspace {
    /// Affine span of a nonempty point set (the empty set spans the point 0).
    pub fn span(pts: Vec<u32>) -> AffineSubspace {
        let origin = pts.first().copied().unwrap_or(0);
        let basis = gf2::echelon_basis(pts.iter().map(|&p| p ^ origin));
        // Reduce the origin so equal subspaces compare equal.
        let origin = basis.iter().fold(origin, |o, &b| o.min(o ^ b));
        AffineSubspace { origin, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn origin(&self) -> u32 {
        self.origin
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    /// Point with coordinates `z` in the basis.
    pub fn point(&self, z: u32) -> u32 {
        self.basis
            .iter()
            .enumerate()
            .fold(self.origin, |acc, (i, &b)| if (z >> i) & 1 == 1 { acc ^ b } else { acc })
    }

    pub fn points(&self) -> Vec<u32> {
        (0..1u32 << self.dim()).map(|z| self.point(z)).collect()
    }

    pub fn contains(&self, p: u32) -> bool {
        self.basis.iter().fold(p ^ self.origin, |v, &b| v.min(v ^ b)) == 0
    }
}

/// Rows β ∈ F₂ᵏ, columns nonempty S ⊆ [k] in counting order; entry 1 iff χ_β(S) = −1.
pub fn hadamard_matrix(k: u8) -> Result<Vec<Vec<u8>>, BoolFnError> {
    if k < 2 {
        return Err(BoolFnError::HadamardArity(k));
    }
    check_arity(k)?;
    Ok((0..points(k))
        .map(|beta| (1..points(k)).map(|s| gf2::dot(beta, s) as u8).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn chi_examples() {
        assert_eq!(BoolFn::chi(2, 0).unwrap().to_string(), "0000");
        assert_eq!(BoolFn::chi(2, 3).unwrap().signs(), vec![1, -1, -1, 1]);
        assert_eq!(BoolFn::chi(1, 1).unwrap().signs(), vec![1, -1]);
    }

    #[test]
    fn fourier_of_single_minus_point() {
        let f: BoolFn = "1000".parse().unwrap();
        let c = f.fourier().coefficients();
        assert_eq!(c, vec![q(1, 2), q(-1, 2), q(-1, 2), q(-1, 2)]);
        assert_eq!(f.dimension(), 2);
    }

    #[test]
    fn constant_minus_one() {
        let f = BoolFn::constant(3, true).unwrap();
        let c = f.fourier().coefficients();
        assert_eq!(c[0], q(-1, 1));
        assert!(c[1..].iter().all(|v| *v == q(0, 1)));
        assert_eq!(f.dimension(), 0);
    }

    #[test]
    fn hadamard_k2() {
        let m = hadamard_matrix(2).unwrap();
        assert_eq!(m, vec![vec![0, 0, 0], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]]);
        assert!(hadamard_matrix(1).is_err());
    }

    #[test]
    fn bitstring_errors() {
        assert!("012".parse::<BoolFn>().is_err());
        assert!("0a".parse::<BoolFn>().is_err());
        assert!(BoolFn::new(2, 0x10).is_err());
        assert!(BoolFn::new(6, 0).is_err());
    }

    #[test]
    fn distances() {
        let f: BoolFn = "0110".parse().unwrap();
        assert_eq!(f.dist(&f).unwrap(), q(0, 1));
        assert_eq!(f.dist(&-f).unwrap(), q(1, 1));
        let a = BoolFn::chi(2, 0).unwrap();
        let b = BoolFn::chi(2, 1).unwrap();
        assert_eq!(a.dist(&b).unwrap(), q(1, 2));
        assert!(a.dist(&BoolFn::chi(3, 0).unwrap()).is_err());
    }
}
