//! Full lifts of gadget flows to higher arity and their total leakage.
//!
//! The witness is first expanded to every placement of arity k: inside a
//! representative's graph each orbit pair's flow is spread over its edges
//! in proportion to capacity, and other placements of the class receive
//! the image under a group element carrying the representative onto them.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::network::{class_nodes, node_kind, NodeKind};
use super::{SoundnessError, Witness};
use crate::affine::{enumerate_lifts, AffineMap, PointMap, SymmetryTables, MAX_TABLE_ARITY};
use crate::boolfn::{points, MAX_ARITY};
use crate::gadget::Gadget;
use crate::Rational;

/// Largest witness arity that is expanded to all placements.
pub const MAX_EXPAND_ARITY: u8 = 3;

/// Directed flow of a witness on every placement of its arity.
#[derive(Debug, Clone)]
pub struct ExpandedFlow {
    k: u8,
    flows: Vec<Vec<(u32, u32, Rational)>>,
}

impl ExpandedFlow {
    pub fn new(g: &Gadget, w: &Witness) -> Result<ExpandedFlow, SoundnessError> {
        let k = g.k();
        if w.k != k {
            return Err(SoundnessError::Witness(format!("witness arity {} differs from gadget arity {k}", w.k)));
        }
        if k > MAX_EXPAND_ARITY {
            return Err(SoundnessError::Arity(k));
        }
        let t = SymmetryTables::shared(k)?;
        let cn = class_nodes(k)?;
        let mut flows = vec![Vec::new(); 1usize << points(k)];
        for block in &w.blocks {
            let g0 = block.placement.bits();
            let c = t.class_of(g0);
            if t.rep(c) != g0 {
                return Err(SoundnessError::Witness(format!("block {} is not a class representative", block.placement)));
            }
            let orbits = &cn[c].orbits;
            let mut base: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
            for (a, b, amount) in &block.flows {
                let (oa, ob) = (orbits.orbit_of(a.bits()), orbits.orbit_of(b.bits()));
                let mut caps = Vec::new();
                for &u in orbits.members(oa) {
                    for &v in orbits.members(ob) {
                        let cap = g.capacity(u, v)?;
                        if !cap.is_zero() {
                            caps.push((u, v, cap));
                        }
                    }
                }
                let total: Rational = caps.iter().map(|(_, _, c)| c).sum();
                if total.is_zero() {
                    if amount.is_zero() {
                        continue;
                    }
                    return Err(SoundnessError::Witness(format!("flow {a} -> {b} in block {} has no capacity", block.placement)));
                }
                for (u, v, cap) in caps {
                    *base.entry((u, v)).or_insert_with(Rational::zero) += amount * cap / &total;
                }
            }
            for &gm in t.class_members(c) {
                let m = t.to_rep(gm).sharp().point_map();
                flows[gm as usize] =
                    base.iter().map(|(&(u, v), x)| (m.apply_bits(u), m.apply_bits(v), x.clone())).collect();
            }
        }
        Ok(ExpandedFlow { k, flows })
    }

    pub fn arity(&self) -> u8 {
        self.k
    }

    /// Directed flows on the graph of placement `g`.
    pub fn flows(&self, g: u32) -> &[(u32, u32, Rational)] {
        &self.flows[g as usize]
    }

    /// Net outflow fout − fin of every node under placement `g`.
    pub fn net_outflow(&self, g: u32) -> BTreeMap<u32, Rational> {
        let mut net: BTreeMap<u32, Rational> = BTreeMap::new();
        for (u, v, x) in self.flows(g) {
            *net.entry(*u).or_insert_with(Rational::zero) += x;
            *net.entry(*v).or_insert_with(Rational::zero) -= x;
        }
        net.retain(|_, x| !x.is_zero());
        net
    }

    /// Net outflow of the sources of `g`.
    pub fn value(&self, g: u32) -> Rational {
        self.net_outflow(g)
            .into_iter()
            .filter(|(f, _)| node_kind(self.k, g, *f) == NodeKind::Source)
            .map(|(_, x)| x)
            .sum()
    }
}

/// The full lift of an expanded flow to arity k', evaluated per placement.
pub struct LiftedFlow {
    k: u8,
    kp: u8,
    /// Each map of M_{k→k'} with the point map of its sharp.
    maps: Vec<(AffineMap, PointMap)>,
    expanded: ExpandedFlow,
    /// Net outflows of non-terminal nodes, scaled to integers by `scale`.
    interior: Vec<Vec<(u32, BigInt)>>,
    values: Vec<BigInt>,
    scale: BigInt,
}

/// Lifts the witness flow of `g` to arity `kp`.
pub fn lift_flow(g: &Gadget, w: &Witness, kp: u8) -> Result<LiftedFlow, SoundnessError> {
    let expanded = ExpandedFlow::new(g, w)?;
    let k = expanded.k;
    if kp < k || kp > MAX_ARITY {
        return Err(SoundnessError::Arity(kp));
    }
    let maps: Vec<(AffineMap, PointMap)> = enumerate_lifts(k, kp)?.map(|m| (m, m.sharp().point_map())).collect();
    let n = 1usize << points(k);
    let nets: Vec<BTreeMap<u32, Rational>> = (0..n as u32).map(|g| expanded.net_outflow(g)).collect();
    let scale = nets
        .iter()
        .flat_map(|m| m.values())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let int = |x: &Rational| (x * Rational::from_integer(scale.clone())).to_integer();
    let mut interior = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for (gi, net) in nets.iter().enumerate() {
        let mut inner = Vec::new();
        let mut value = BigInt::zero();
        for (&f, x) in net {
            match node_kind(k, gi as u32, f) {
                NodeKind::Interior => inner.push((f, int(x))),
                NodeKind::Source => value += int(x),
                NodeKind::Sink => {}
            }
        }
        interior.push(inner);
        values.push(value);
    }
    Ok(LiftedFlow { k, kp, maps, expanded, interior, values, scale })
}

impl LiftedFlow {
    pub fn arity(&self) -> u8 {
        self.k
    }

    pub fn target_arity(&self) -> u8 {
        self.kp
    }

    fn denominator(&self) -> BigInt {
        &self.scale * BigInt::from(self.maps.len())
    }

    fn scattered_leaks(&self, gp: u32) -> HashMap<u32, BigInt> {
        let mut acc: HashMap<u32, BigInt> = HashMap::new();
        for (m, sharp) in &self.maps {
            let g = sharp.apply_bits(gp);
            for (f, x) in &self.interior[g as usize] {
                *acc.entry(m.apply_bits(*f)).or_insert_with(BigInt::zero) += x;
            }
        }
        acc
    }

    /// Directed flows of the lifted flow on the graph of placement `gp`.
    pub fn flows_at(&self, gp: u32) -> BTreeMap<(u32, u32), Rational> {
        let mut acc: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        for (m, sharp) in &self.maps {
            let g = sharp.apply_bits(gp);
            for (u, v, x) in self.expanded.flows(g) {
                *acc.entry((m.apply_bits(*u), m.apply_bits(*v))).or_insert_with(Rational::zero) += x;
            }
        }
        let n = Rational::from_integer(self.maps.len().into());
        acc.into_iter().map(|(e, x)| (e, x / &n)).collect()
    }

    /// Signed leak fout − fin at every non-terminal node of placement `gp`
    /// where it is nonzero.
    pub fn leaks_at(&self, gp: u32) -> BTreeMap<u32, Rational> {
        let d = self.denominator();
        self.scattered_leaks(gp)
            .into_iter()
            .filter(|(_, x)| !x.is_zero())
            .map(|(f, x)| (f, Rational::new(x, d.clone())))
            .collect()
    }

    /// Σ |leak| over the non-terminal nodes of placement `gp`.
    pub fn total_leak_at(&self, gp: u32) -> Rational {
        let sum: BigInt = self.scattered_leaks(gp).values().map(|x| x.abs()).sum();
        Rational::new(sum, self.denominator())
    }

    /// Net outflow of the sources of placement `gp`.
    pub fn value_at(&self, gp: u32) -> Rational {
        let sum: BigInt = self.maps.iter().map(|(_, s)| &self.values[s.apply_bits(gp) as usize]).sum();
        Rational::new(sum, self.denominator())
    }

    fn class_average(&self, per: impl Fn(u32) -> Rational + Sync) -> Result<Rational, SoundnessError> {
        if self.kp > MAX_TABLE_ARITY {
            return Err(SoundnessError::Arity(self.kp));
        }
        let t = SymmetryTables::shared(self.kp)?;
        let total = Rational::from_integer(BigInt::one() << points(self.kp));
        let sum: Rational = (0..t.num_classes())
            .into_par_iter()
            .map(|c| per(t.rep(c)) * Rational::from_integer(t.class_size(c).into()))
            .sum();
        Ok(sum / total)
    }

    /// E over placements of arity k' of the lifted flow's value.
    pub fn expected_value(&self) -> Result<Rational, SoundnessError> {
        self.class_average(|gp| self.value_at(gp))
    }

    /// Exact L_{k'}: E over placements of Σ |leak| at non-terminal nodes.
    pub fn total_leakage(&self) -> Result<Rational, SoundnessError> {
        self.class_average(|gp| self.total_leak_at(gp))
    }

    /// Monte Carlo estimate of L_{k'} from `samples` uniform placements.
    pub fn sample_leakage(&self, samples: usize, seed: u64) -> Leakage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = points(self.kp);
        let draws: Vec<u32> = (0..samples)
            .map(|_| if n == 32 { rng.gen() } else { rng.gen_range(0..1u32 << n) })
            .collect();
        let xs: Vec<f64> = draws
            .par_iter()
            .map(|&gp| crate::scalar::to_f64(&self.total_leak_at(gp)))
            .collect();
        let mean = xs.iter().sum::<f64>() / samples.max(1) as f64;
        let var = if samples > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64
        } else {
            0.0
        };
        Leakage::Estimate { mean, std_dev: var.sqrt(), samples }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Leakage {
    Exact(Rational),
    Estimate { mean: f64, std_dev: f64, samples: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakReport {
    pub k: u8,
    pub kp: u8,
    pub leakage: Leakage,
}

impl LeakReport {
    /// 2^{2^k + k} / √(2^{k'} − 2^k) as a float, for display.
    pub fn bound(&self) -> f64 {
        let num = 2f64.powi((points(self.k) + self.k as u32) as i32);
        num / ((points(self.kp) - points(self.k)) as f64).sqrt()
    }

    /// Whether the leakage is within the bound; exact for exact values.
    pub fn within_bound(&self) -> bool {
        match &self.leakage {
            Leakage::Exact(l) => {
                if self.kp == self.k {
                    return true;
                }
                let lhs = l * l * Rational::from_integer((points(self.kp) - points(self.k)).into());
                let rhs = Rational::from_integer(BigInt::one() << (2 * (points(self.k) + self.k as u32)));
                lhs <= rhs
            }
            Leakage::Estimate { mean, .. } => *mean <= self.bound(),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match &self.leakage {
            Leakage::Exact(l) => l.to_f64().unwrap_or(f64::NAN),
            Leakage::Estimate { mean, .. } => *mean,
        }
    }
}

/// L_{k'} of the lifted witness flow: exact up to arity 4, sampled above.
pub fn measure_leakage(g: &Gadget, w: &Witness, kp: u8, samples: usize, seed: u64) -> Result<LeakReport, SoundnessError> {
    let lifted = lift_flow(g, w, kp)?;
    let leakage = if kp <= MAX_TABLE_ARITY {
        Leakage::Exact(lifted.total_leakage()?)
    } else {
        lifted.sample_leakage(samples, seed)
    };
    Ok(LeakReport { k: g.k(), kp, leakage })
}
