//! Affine maps `f ↦ f(Ay + b)·(−1)^c·χ_β(y)` between function spaces.

mod orbits;

pub use orbits::{
    edge_orbits, function_orbits, placement_orbits, stabilizer, EdgeKey, Orbit, OrbitKind,
    OrbitLabel, SubOrbits, SymmetryTables, MAX_TABLE_ARITY,
};

use std::fmt;

use crate::boolfn::{chi_mask, full_mask, points, BoolFn, MAX_ARITY};
use crate::gf2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AffineError {
    #[error("matrix with {cols} columns over F2^{rows} does not have rank {rows}")]
    Rank { rows: u8, cols: u8 },
    #[error("arity pair ({0}, {1}) unsupported: need 1 <= k <= k' <= {MAX_ARITY}")]
    Arity(u8, u8),
    #[error("vector {0} does not fit the arity")]
    Vector(u32),
    #[error("function arity {found} does not match map domain {expected}")]
    Domain { expected: u8, found: u8 },
    #[error("cannot compose: inner map lands in F_{inner} but outer map starts at F_{outer}")]
    Compose { inner: u8, outer: u8 },
    #[error("map is not invertible: arities {0} -> {1}")]
    NotSquare(u8, u8),
    #[error("group of arity {0} is too large to materialise")]
    TooLarge(u8),
}

/// The map M_{A,b,β,c} from F_k to F_{k'}.
///
/// `A` is a k×k' matrix of rank k stored as its k' packed columns, so that
/// `Ay` is the XOR of the columns selected by the bits of `y`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AffineMap {
    k: u8,
    kp: u8,
    cols: [u8; MAX_ARITY as usize],
    b: u8,
    beta: u8,
    c: bool,
}

impl AffineMap {
    pub fn new(k: u8, kp: u8, cols: &[u8], b: u32, beta: u32, c: bool) -> Result<Self, AffineError> {
        if !(1..=kp).contains(&k) || kp > MAX_ARITY {
            return Err(AffineError::Arity(k, kp));
        }
        if cols.len() != kp as usize || cols.iter().any(|&v| v as u32 >= points(k)) {
            return Err(AffineError::Rank { rows: k, cols: kp });
        }
        if b >= points(k) {
            return Err(AffineError::Vector(b));
        }
        if beta >= points(kp) {
            return Err(AffineError::Vector(beta));
        }
        if gf2::rank(cols.iter().map(|&v| v as u32)) != k as usize {
            return Err(AffineError::Rank { rows: k, cols: kp });
        }
        Ok(Self::from_parts(k, kp, cols, b as u8, beta as u8, c))
    }

    pub(crate) fn from_parts(k: u8, kp: u8, cols: &[u8], b: u8, beta: u8, c: bool) -> Self {
        let mut packed = [0u8; MAX_ARITY as usize];
        packed[..cols.len()].copy_from_slice(cols);
        AffineMap { k, kp, cols: packed, b, beta, c }
    }

    pub fn identity(k: u8) -> Result<Self, AffineError> {
        let cols: Vec<u8> = (0..k).map(|i| 1u8 << i).collect();
        AffineMap::new(k, k, &cols, 0, 0, false)
    }

    pub fn domain(&self) -> u8 {
        self.k
    }

    pub fn codomain(&self) -> u8 {
        self.kp
    }

    pub fn columns(&self) -> &[u8] {
        &self.cols[..self.kp as usize]
    }

    pub fn shift(&self) -> u32 {
        self.b as u32
    }

    pub fn character(&self) -> u32 {
        self.beta as u32
    }

    pub fn sign(&self) -> bool {
        self.c
    }

    /// The affine point map y ↦ Ay + b from F₂^{k'} to F₂ᵏ.
    #[inline]
    pub fn point(&self, y: u32) -> u32 {
        gf2::mat_vec(self.columns(), y) ^ self.b as u32
    }

    pub fn apply(&self, f: &BoolFn) -> Result<BoolFn, AffineError> {
        if f.k() != self.k {
            return Err(AffineError::Domain { expected: self.k, found: f.k() });
        }
        Ok(BoolFn::from_raw(self.kp, self.apply_bits(f.bits())))
    }

    /// Applies the map to a packed table of arity `k`.
    #[inline]
    pub fn apply_bits(&self, bits: u32) -> u32 {
        let mut out = self.sign_mask();
        for y in 0..points(self.kp) {
            out ^= ((bits >> self.point(y)) & 1) << y;
        }
        out
    }

    /// Table of `(−1)^c χ_β` on F₂^{k'}.
    pub(crate) fn sign_mask(&self) -> u32 {
        let m = chi_mask(self.kp, self.beta as u32);
        if self.c {
            m ^ full_mask(self.kp)
        } else {
            m
        }
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap, AffineError> {
        if inner.kp != self.k {
            return Err(AffineError::Compose { inner: inner.kp, outer: self.k });
        }
        Ok(self.compose_unchecked(inner))
    }

    pub(crate) fn compose_unchecked(&self, inner: &AffineMap) -> AffineMap {
        let (a, b, beta, c) = (inner.columns(), inner.b as u32, inner.beta as u32, inner.c);
        let (ap, bp, betap, cp) = (self.columns(), self.b as u32, self.beta as u32, self.c);
        let cols: Vec<u8> = ap.iter().map(|&col| gf2::mat_vec(a, col as u32) as u8).collect();
        let new_b = gf2::mat_vec(a, bp) ^ b;
        let at_beta = transpose_apply(ap, self.k, beta);
        let new_c = c ^ cp ^ (gf2::dot(bp, beta) == 1);
        AffineMap::from_parts(inner.k, self.kp, &cols, new_b as u8, (at_beta ^ betap) as u8, new_c)
    }

    pub fn inverse(&self) -> Result<AffineMap, AffineError> {
        if self.k != self.kp {
            return Err(AffineError::NotSquare(self.k, self.kp));
        }
        let inv = gf2::invert(self.columns()).ok_or(AffineError::Rank { rows: self.k, cols: self.kp })?;
        let b = gf2::mat_vec(&inv, self.b as u32);
        let beta = transpose_apply(&inv, self.k, self.beta as u32);
        let c = self.c ^ (gf2::dot(b, self.beta as u32) == 1);
        Ok(AffineMap::from_parts(self.k, self.k, &inv, b as u8, beta as u8, c))
    }

    /// M# = M_{Aᵀ, β, b, c}, mapping F_{k'} back to F_k.
    pub fn sharp(&self) -> AffineMap {
        let t = gf2::transpose(self.columns(), self.k as usize);
        AffineMap::from_parts(self.kp, self.k, &t, self.beta, self.b, self.c)
    }

    /// Precomputed point permutation and sign mask for repeated application.
    pub fn point_map(&self) -> PointMap {
        let mut perm = [0u8; 32];
        for y in 0..points(self.kp) {
            perm[y as usize] = self.point(y) as u8;
        }
        PointMap { perm, n: points(self.kp) as u8, mask: self.sign_mask() }
    }
}

/// Computes Aᵀ v for A given by packed columns over F₂^{rows}.
fn transpose_apply(cols: &[u8], _rows: u8, v: u32) -> u32 {
    cols.iter()
        .enumerate()
        .fold(0u32, |acc, (j, &col)| acc | (gf2::dot(col as u32, v) << j))
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A=[")?;
        for (j, col) in self.columns().iter().enumerate() {
            if j > 0 {
                write!(f, " ")?;
            }
            write!(f, "{:0w$b}", col, w = self.k as usize)?;
        }
        write!(f, "] b={:0w$b} beta={:0wp$b} c={}", self.b, self.beta, self.c as u8, w = self.k as usize, wp = self.kp as usize)
    }
}

/// A map reduced to a point permutation plus an XOR mask.
#[derive(Clone, Copy, Debug)]
pub struct PointMap {
    perm: [u8; 32],
    n: u8,
    mask: u32,
}

impl PointMap {
    #[inline]
    pub fn apply_bits(&self, bits: u32) -> u32 {
        permuted(bits, &self.perm[..self.n as usize]) ^ self.mask
    }
}

#[inline]
fn permuted(bits: u32, perm: &[u8]) -> u32 {
    perm.iter()
        .enumerate()
        .fold(0u32, |acc, (y, &x)| acc | (((bits >> x) & 1) << y))
}

/// All invertible k×k matrices over F₂ as packed columns, in counting order.
pub fn general_linear(k: u8) -> Vec<Vec<u8>> {
    full_rank_matrices(k, k)
}

/// All k×k' matrices of rank k as packed columns.
pub fn full_rank_matrices(k: u8, kp: u8) -> Vec<Vec<u8>> {
    let q = points(k) as u64;
    let total = q.pow(kp as u32);
    (0..total)
        .filter_map(|code| {
            let cols: Vec<u8> = (0..kp).map(|j| ((code / q.pow(j as u32)) % q) as u8).collect();
            (gf2::rank(cols.iter().map(|&c| c as u32)) == k as usize).then_some(cols)
        })
        .collect()
}

/// Order of M_{k→k'}.
pub fn lift_count(k: u8, kp: u8) -> u64 {
    let n = points(kp) as u64;
    let mats: u64 = (0..k as u32).map(|i| n - (1u64 << i)).product();
    mats * points(k) as u64 * n * 2
}

pub fn group_order(k: u8) -> u64 {
    lift_count(k, k)
}

/// Every map in M_{k→k'}, each exactly once.
pub fn enumerate_lifts(k: u8, kp: u8) -> Result<impl Iterator<Item = AffineMap>, AffineError> {
    if !(1..=kp).contains(&k) || kp > MAX_ARITY {
        return Err(AffineError::Arity(k, kp));
    }
    let mats = full_rank_matrices(k, kp);
    let (nb, nbeta) = (points(k), points(kp));
    Ok(mats.into_iter().flat_map(move |cols| {
        (0..nb).flat_map(move |b| {
            let cols = cols.clone();
            (0..nbeta).flat_map(move |beta| {
                let cols = cols.clone();
                [false, true]
                    .into_iter()
                    .map(move |c| AffineMap::from_parts(k, kp, &cols, b as u8, beta as u8, c))
            })
        })
    }))
}

/// The whole group M_{k→k}.
pub fn enumerate_group(k: u8) -> Result<Vec<AffineMap>, AffineError> {
    if k > 4 {
        return Err(AffineError::TooLarge(k));
    }
    Ok(enumerate_lifts(k, k)?.collect())
}

/// A generating set of M_{k→k}: elementary transvections, unit shifts, unit characters and the global sign.
pub fn group_generators(k: u8) -> Vec<AffineMap> {
    let id: Vec<u8> = (0..k).map(|i| 1u8 << i).collect();
    let mut gens = Vec::new();
    for i in 0..k as usize {
        for j in 0..k as usize {
            if i != j {
                let mut cols = id.clone();
                cols[j] ^= 1 << i;
                gens.push(AffineMap::from_parts(k, k, &cols, 0, 0, false));
            }
        }
    }
    for i in 0..k {
        gens.push(AffineMap::from_parts(k, k, &id, 1 << i, 0, false));
        gens.push(AffineMap::from_parts(k, k, &id, 0, 1 << i, false));
    }
    gens.push(AffineMap::from_parts(k, k, &id, 0, 0, true));
    gens
}
