//! Symmetric gadgets: a probability distribution over unordered pairs of
//! functions, stored as one per-edge capacity per edge orbit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::affine::{enumerate_lifts, lift_count, AffineError, EdgeKey, SymmetryTables};
use crate::boolfn::{chi_mask, full_mask, points, BoolFn, BoolFnError};
use crate::scalar::parse_rational;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: pair {given} is not a canonical orbit label; use {canonical}")]
    NonCanonical { line: usize, given: String, canonical: String },
    #[error("line {line}: orbit {canonical} listed twice with different weights")]
    Inconsistent { line: usize, canonical: String },
    #[error("weights total {0}, expected 1")]
    Total(Rational),
    #[error("negative weight on orbit {0}")]
    Negative(String),
    #[error("pair {0} is not an edge (the functions must differ and not be negations)")]
    NotAnEdge(String),
    #[error("true soundness is only computed for k = 2, got k = {0}")]
    OracleArity(u8),
}

/// A gadget symmetric under the whole affine group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    k: u8,
    weights: BTreeMap<EdgeKey, Rational>,
}

fn pair_label(k: u8, (a, b): EdgeKey) -> String {
    format!("{} {}", BoolFn::from_raw(k, a), BoolFn::from_raw(k, b))
}

impl Gadget {
    /// Builds a gadget from per-edge capacities on canonical orbit keys.
    /// Zero entries are dropped; the total mass must be exactly one.
    pub fn new(k: u8, weights: BTreeMap<EdgeKey, Rational>) -> Result<Gadget, GadgetError> {
        let g = Gadget::unnormalized(k, weights)?;
        let total = g.total_mass()?;
        if !total.is_one() {
            return Err(GadgetError::Total(total));
        }
        Ok(g)
    }

    /// Like [`Gadget::new`] without the unit-mass check.
    pub fn unnormalized(k: u8, weights: BTreeMap<EdgeKey, Rational>) -> Result<Gadget, GadgetError> {
        let t = SymmetryTables::shared(k)?;
        let mut out = BTreeMap::new();
        for (key, w) in weights {
            if t.edge_orbit_size(key).is_none() {
                let canon = t.canonical_edge(key.0, key.1);
                if key.0 == key.1 || key.0 ^ key.1 == full_mask(k) {
                    return Err(GadgetError::NotAnEdge(pair_label(k, key)));
                }
                return Err(GadgetError::NonCanonical {
                    line: 0,
                    given: pair_label(k, key),
                    canonical: pair_label(k, canon),
                });
            }
            if w < Rational::zero() {
                return Err(GadgetError::Negative(pair_label(k, key)));
            }
            if !w.is_zero() {
                out.insert(key, w);
            }
        }
        Ok(Gadget { k, weights: out })
    }

    /// Averages an arbitrary edge weighting over the group and rescales it
    /// to unit mass. Every edge `(u, v)` may be listed in any orientation.
    pub fn symmetrize(k: u8, raw: &[(u32, u32, Rational)]) -> Result<Gadget, GadgetError> {
        let t = SymmetryTables::shared(k)?;
        let mut mass: BTreeMap<EdgeKey, Rational> = BTreeMap::new();
        for (u, v, w) in raw {
            if u == v || u ^ v == full_mask(k) {
                return Err(GadgetError::NotAnEdge(pair_label(k, (*u, *v))));
            }
            if *w < Rational::zero() {
                return Err(GadgetError::Negative(pair_label(k, (*u, *v))));
            }
            *mass.entry(t.canonical_edge(*u, *v)).or_insert_with(Rational::zero) += w;
        }
        let total: Rational = mass.values().sum();
        if total.is_zero() {
            return Err(GadgetError::Total(total));
        }
        let weights = mass
            .into_iter()
            .map(|(key, m)| {
                let size = t.edge_orbit_size(key).expect("canonical key");
                (key, m / (&total * Rational::from_integer(size.into())))
            })
            .collect();
        Gadget::new(k, weights)
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    /// Per-edge capacity of each orbit in the support.
    pub fn weights(&self) -> &BTreeMap<EdgeKey, Rational> {
        &self.weights
    }

    pub fn weight(&self, key: EdgeKey) -> Rational {
        self.weights.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Capacity of the edge between `u` and `v` in either orientation.
    pub fn capacity(&self, u: u32, v: u32) -> Result<Rational, GadgetError> {
        if u == v || u ^ v == full_mask(self.k) {
            return Ok(Rational::zero());
        }
        let t = SymmetryTables::shared(self.k)?;
        Ok(self.weight(t.canonical_edge(u, v)))
    }

    pub fn support(&self) -> Vec<EdgeKey> {
        self.weights.keys().copied().collect()
    }

    /// size × weight for every orbit in the support.
    pub fn orbit_masses(&self) -> Result<BTreeMap<EdgeKey, Rational>, GadgetError> {
        let t = SymmetryTables::shared(self.k)?;
        Ok(self
            .weights
            .iter()
            .map(|(&key, w)| {
                let size = t.edge_orbit_size(key).expect("validated on construction");
                (key, w * Rational::from_integer(size.into()))
            })
            .collect())
    }

    pub fn total_mass(&self) -> Result<Rational, GadgetError> {
        Ok(self.orbit_masses()?.values().sum())
    }

    /// 1 − E[dist] over the edge distribution.
    pub fn completeness(&self) -> Result<Rational, GadgetError> {
        let n = Rational::from_integer(points(self.k).into());
        let mut avg = Rational::zero();
        for ((a, b), m) in self.orbit_masses()? {
            avg += m * Rational::from_integer((a ^ b).count_ones().into()) / &n;
        }
        Ok(Rational::one() - avg)
    }

    /// The full lift to arity `kp`: the average over every M in M_{k→k'}
    /// of the pushed-forward edge distribution.
    pub fn lift(&self, kp: u8) -> Result<Gadget, GadgetError> {
        let src = SymmetryTables::shared(self.k)?;
        let dst = SymmetryTables::shared(kp)?;
        if kp < self.k {
            return Err(AffineError::Arity(self.k, kp).into());
        }
        let maps: Vec<_> = enumerate_lifts(self.k, kp)?.collect();
        let keys = self.support();
        // For each source orbit, how many maps send its canonical edge into each target orbit.
        let counts: Vec<BTreeMap<EdgeKey, u64>> = keys
            .iter()
            .map(|&(a, b)| {
                maps.par_iter()
                    .fold(BTreeMap::new, |mut acc: BTreeMap<EdgeKey, u64>, m| {
                        *acc.entry(dst.canonical_edge(m.apply_bits(a), m.apply_bits(b))).or_insert(0) += 1;
                        acc
                    })
                    .reduce(BTreeMap::new, |mut x, y| {
                        for (k, v) in y {
                            *x.entry(k).or_insert(0) += v;
                        }
                        x
                    })
            })
            .collect();
        let order = Rational::from_integer(lift_count(self.k, kp).into());
        let mut mass: BTreeMap<EdgeKey, Rational> = BTreeMap::new();
        for (key, hits) in keys.iter().zip(counts) {
            let size = src.edge_orbit_size(*key).expect("validated");
            let orbit_mass = &self.weights[key] * Rational::from_integer(size.into());
            for (target, n) in hits {
                *mass.entry(target).or_insert_with(Rational::zero) +=
                    &orbit_mass * Rational::from_integer(n.into()) / &order;
            }
        }
        let weights = mass
            .into_iter()
            .map(|(key, m)| {
                let size = dst.edge_orbit_size(key).expect("canonical key");
                (key, m / Rational::from_integer(size.into()))
            })
            .collect();
        Gadget::unnormalized(kp, weights)
    }

    /// Text form: `k <k>` then `<f1> <f2> <p>/<q>` per orbit, ordered by
    /// raw Hamming length and then by label.
    pub fn to_text(&self) -> String {
        let mut keys = self.support();
        keys.sort_by_key(|&(a, b)| ((a ^ b).count_ones(), a, b));
        let mut out = format!("k {}\n", self.k);
        for key in keys {
            let w = &self.weights[&key];
            let _ = writeln!(out, "{} {}/{}", pair_label(self.k, key), w.numer(), w.denom());
        }
        out
    }

    /// Parses a gadget file whose lines may name any member of an orbit.
    /// Lines in the same orbit must agree on the weight. The total mass
    /// must still be one.
    pub fn parse_lenient(text: &str) -> Result<Gadget, GadgetError> {
        parse(text, false)
    }
}

impl FromStr for Gadget {
    type Err = GadgetError;

    /// Strict parse: every pair must be the canonical label of its orbit.
    fn from_str(text: &str) -> Result<Gadget, GadgetError> {
        parse(text, true)
    }
}

fn parse(text: &str, strict: bool) -> Result<Gadget, GadgetError> {
    let mut k = None;
    let mut weights: BTreeMap<EdgeKey, Rational> = BTreeMap::new();
    let mut tables = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: String| GadgetError::Parse { line: line_no, msg };
        let Some(kk) = k else {
            match fields.as_slice() {
                ["k", v] => {
                    let v: u8 = v.parse().map_err(|_| bad(format!("bad arity {v:?}")))?;
                    tables = Some(SymmetryTables::shared(v)?);
                    k = Some(v);
                    continue;
                }
                _ => return Err(bad("expected header `k <int>`".into())),
            }
        };
        let t = tables.as_ref().expect("set with k");
        let [f1, f2, w] = fields.as_slice() else {
            return Err(bad("expected `<f1> <f2> <p>/<q>`".into()));
        };
        let a: BoolFn = f1.parse()?;
        let b: BoolFn = f2.parse()?;
        if a.k() != kk || b.k() != kk {
            return Err(bad(format!("functions must have arity {kk}")));
        }
        let w = parse_rational(w).ok_or_else(|| bad(format!("malformed rational {w:?}")))?;
        let key = (a.bits(), b.bits());
        if a == b || a == b.negate() {
            return Err(GadgetError::NotAnEdge(pair_label(kk, key)));
        }
        let canon = t.canonical_edge(key.0, key.1);
        if strict && canon != key {
            return Err(GadgetError::NonCanonical {
                line: line_no,
                given: pair_label(kk, key),
                canonical: pair_label(kk, canon),
            });
        }
        if let Some(prev) = weights.get(&canon) {
            if *prev != w {
                return Err(GadgetError::Inconsistent { line: line_no, canonical: pair_label(kk, canon) });
            }
            if strict {
                return Err(bad(format!("orbit {} listed twice", pair_label(kk, canon))));
            }
        }
        weights.insert(canon, w);
    }
    let k = k.ok_or(GadgetError::Parse { line: 0, msg: "empty gadget file".into() })?;
    Gadget::new(k, weights)
}

/// Exact soundness of a k = 2 gadget: the expectation over folded primary
/// assignments of the best folded completion.
///
/// Variables come in folded pairs {f, −f}; the primary pairs are ±χ_α for
/// every α, including the constant pair, and every other pair is free.
pub fn true_soundness(g: &Gadget) -> Result<Rational, GadgetError> {
    if g.k() != 2 {
        return Err(GadgetError::OracleArity(g.k()));
    }
    let k = 2u8;
    let full = full_mask(k);
    let t = SymmetryTables::shared(k)?;
    // One representative per folded pair: the member with f(0) = +1.
    let reps: Vec<u32> = (0..=full).filter(|f| f & 1 == 0).collect();
    let pair_of = |f: u32| -> (usize, bool) {
        let r = if f & 1 == 0 { f } else { f ^ full };
        (reps.iter().position(|&x| x == r).expect("rep"), f & 1 == 1)
    };
    let primary: Vec<usize> = (0..points(k)).map(|a| pair_of(chi_mask(k, a)).0).collect();
    let free: Vec<usize> = (0..reps.len()).filter(|i| !primary.contains(i)).collect();
    let mut edges: Vec<(usize, bool, usize, bool, Rational)> = Vec::new();
    for (&key, w) in g.weights() {
        t.for_each_edge(key, |u, v| {
            let (pu, nu) = pair_of(u);
            let (pv, nv) = pair_of(v);
            edges.push((pu, nu, pv, nv, w.clone()));
        });
    }
    let mut total = Rational::zero();
    for p in 0u32..(1 << primary.len()) {
        let mut best = Rational::zero();
        for q in 0u32..(1 << free.len()) {
            let mut sign = vec![false; reps.len()];
            for (i, &v) in primary.iter().enumerate() {
                sign[v] = (p >> i) & 1 == 1;
            }
            for (i, &v) in free.iter().enumerate() {
                sign[v] = (q >> i) & 1 == 1;
            }
            let val: Rational = edges
                .iter()
                .filter(|(pu, nu, pv, nv, _)| (sign[*pu] ^ nu) == (sign[*pv] ^ nv))
                .map(|e| &e.4)
                .sum();
            if val > best {
                best = val;
            }
        }
        total += best;
    }
    Ok(total / Rational::from_integer(BigInt::from(1u32 << primary.len())))
}
