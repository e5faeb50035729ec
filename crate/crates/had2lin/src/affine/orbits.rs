//! Orbits of the group M_{k→k} on functions, placements and unordered edges.
//!
//! Canonical forms use the integer order of packed tables: a function orbit is
//! labelled by its smallest member and an edge orbit by the smallest ordered
//! pair `(f1, f2)` over all members and both orientations.

use std::collections::{BTreeMap, VecDeque};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use super::{general_linear, group_generators, group_order, AffineError, AffineMap, PointMap};
use crate::boolfn::{chi_mask, full_mask, points, BoolFn};

/// Canonical ordered pair of packed tables labelling an edge orbit.
pub type EdgeKey = (u32, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitKind {
    Function,
    Placement,
    Edge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitLabel {
    Function(BoolFn),
    Placement(BoolFn),
    Edge(BoolFn, BoolFn),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub canonical: OrbitLabel,
    pub size: u64,
}

impl Orbit {
    pub fn kind(&self) -> OrbitKind {
        match self.canonical {
            OrbitLabel::Function(_) => OrbitKind::Function,
            OrbitLabel::Placement(_) => OrbitKind::Placement,
            OrbitLabel::Edge(..) => OrbitKind::Edge,
        }
    }

    /// Raw Hamming count of an edge orbit representative.
    pub fn hamming(&self) -> Option<u32> {
        match self.canonical {
            OrbitLabel::Edge(a, b) => Some((a.bits() ^ b.bits()).count_ones()),
            _ => None,
        }
    }
}

/// Orbits of a stabilizer subgroup acting on all functions.
#[derive(Clone, Debug)]
pub struct SubOrbits {
    orbit_of: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl SubOrbits {
    /// Partitions all functions of arity `k` under the given maps.
    pub(crate) fn compute(k: u8, maps: &[PointMap]) -> SubOrbits {
        let n = 1usize << points(k);
        let mut orbit_of = vec![u32::MAX; n];
        let mut members = Vec::new();
        for f in 0..n {
            if orbit_of[f] != u32::MAX {
                continue;
            }
            let id = members.len() as u32;
            let mut orbit = Vec::new();
            for m in maps {
                let g = m.apply_bits(f as u32) as usize;
                if orbit_of[g] == u32::MAX {
                    orbit_of[g] = id;
                    orbit.push(g as u32);
                }
            }
            if orbit_of[f] == u32::MAX {
                orbit_of[f] = id;
                orbit.push(f as u32);
            }
            orbit.sort_unstable();
            members.push(orbit);
        }
        SubOrbits { orbit_of, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn orbit_of(&self, f: u32) -> usize {
        self.orbit_of[f as usize] as usize
    }

    /// Smallest member of the orbit containing `f`.
    pub fn min_of(&self, f: u32) -> u32 {
        self.members[self.orbit_of(f)][0]
    }

    pub fn members(&self, orbit: usize) -> &[u32] {
        &self.members[orbit]
    }
}

/// Function classes, transversals, stabilizers and stabilizer orbits for one arity.
#[derive(Debug)]
pub struct SymmetryTables {
    k: u8,
    class_of: Vec<u32>,
    reps: Vec<u32>,
    class_members: Vec<Vec<u32>>,
    from_rep: Vec<AffineMap>,
    to_rep: Vec<AffineMap>,
    stabilizers: Vec<Vec<AffineMap>>,
    stab_orbits: Vec<SubOrbits>,
    edge_sizes: OnceLock<BTreeMap<EdgeKey, u64>>,
}

/// Largest arity for which full tables are materialised.
pub const MAX_TABLE_ARITY: u8 = 4;

impl SymmetryTables {
    pub fn new(k: u8) -> Result<SymmetryTables, AffineError> {
        if !(1..=MAX_TABLE_ARITY).contains(&k) {
            return Err(AffineError::TooLarge(k));
        }
        let n = 1usize << points(k);
        let gens = group_generators(k);
        let gen_maps: Vec<PointMap> = gens.iter().map(|g| g.point_map()).collect();
        let id = AffineMap::identity(k)?;
        let mut class_of = vec![u32::MAX; n];
        let mut from_rep = vec![id; n];
        let mut reps = Vec::new();
        let mut class_members = Vec::new();
        for f in 0..n {
            if class_of[f] != u32::MAX {
                continue;
            }
            let ci = reps.len() as u32;
            reps.push(f as u32);
            class_of[f] = ci;
            let mut members = vec![f as u32];
            let mut queue = VecDeque::from([f]);
            while let Some(u) = queue.pop_front() {
                for (g, gm) in gens.iter().zip(&gen_maps) {
                    let v = gm.apply_bits(u as u32) as usize;
                    if class_of[v] == u32::MAX {
                        class_of[v] = ci;
                        from_rep[v] = g.compose_unchecked(&from_rep[u]);
                        members.push(v as u32);
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            class_members.push(members);
        }
        let to_rep: Vec<AffineMap> = from_rep
            .iter()
            .map(|m| m.inverse().expect("group elements are invertible"))
            .collect();
        let affine_index = affine_mask_index(k);
        let mats = general_linear(k);
        let stabilizers: Vec<Vec<AffineMap>> = reps
            .par_iter()
            .map(|&r| stabilizer_of(k, r, &mats, &affine_index))
            .collect();
        let stab_orbits: Vec<SubOrbits> = stabilizers
            .par_iter()
            .map(|stab| {
                let maps: Vec<PointMap> = stab.iter().map(|m| m.point_map()).collect();
                SubOrbits::compute(k, &maps)
            })
            .collect();
        Ok(SymmetryTables {
            k,
            class_of,
            reps,
            class_members,
            from_rep,
            to_rep,
            stabilizers,
            stab_orbits,
            edge_sizes: OnceLock::new(),
        })
    }

    /// Shared tables for arity `k`, built once per process.
    pub fn shared(k: u8) -> Result<Arc<SymmetryTables>, AffineError> {
        static CACHE: [OnceLock<Arc<SymmetryTables>>; MAX_TABLE_ARITY as usize] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        if !(1..=MAX_TABLE_ARITY).contains(&k) {
            return Err(AffineError::TooLarge(k));
        }
        let cell = &CACHE[k as usize - 1];
        if let Some(t) = cell.get() {
            return Ok(t.clone());
        }
        let t = Arc::new(SymmetryTables::new(k)?);
        Ok(cell.get_or_init(|| t).clone())
    }

    pub fn arity(&self) -> u8 {
        self.k
    }

    pub fn num_functions(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, f: u32) -> usize {
        self.class_of[f as usize] as usize
    }

    pub fn rep(&self, class: usize) -> u32 {
        self.reps[class]
    }

    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    pub fn class_size(&self, class: usize) -> u64 {
        self.class_members[class].len() as u64
    }

    pub fn class_members(&self, class: usize) -> &[u32] {
        &self.class_members[class]
    }

    /// A group element mapping the class representative of `f` to `f`.
    pub fn from_rep(&self, f: u32) -> &AffineMap {
        &self.from_rep[f as usize]
    }

    /// A group element mapping `f` to its class representative.
    pub fn to_rep(&self, f: u32) -> &AffineMap {
        &self.to_rep[f as usize]
    }

    /// Stabilizer of a class representative under the function action.
    pub fn rep_stabilizer(&self, class: usize) -> &[AffineMap] {
        &self.stabilizers[class]
    }

    /// Orbits of the representative's stabilizer on all functions.
    pub fn rep_stabilizer_orbits(&self, class: usize) -> &SubOrbits {
        &self.stab_orbits[class]
    }

    /// {M : M(f) = f}, obtained by conjugating the representative's stabilizer.
    pub fn function_stabilizer(&self, f: u32) -> Vec<AffineMap> {
        let u = self.from_rep(f);
        let t = self.to_rep(f);
        self.stabilizers[self.class_of(f)]
            .iter()
            .map(|s| u.compose_unchecked(&s.compose_unchecked(t)))
            .collect()
    }

    /// Canonical form of the ordered pair (a, b) under the simultaneous action.
    pub fn canonical_ordered(&self, a: u32, b: u32) -> EdgeKey {
        let ci = self.class_of(a);
        let t = self.to_rep[a as usize].apply_bits(b);
        (self.reps[ci], self.stab_orbits[ci].min_of(t))
    }

    /// Canonical label of the unordered pair {a, b}.
    pub fn canonical_edge(&self, a: u32, b: u32) -> EdgeKey {
        self.canonical_ordered(a, b).min(self.canonical_ordered(b, a))
    }

    /// Canonical form of a single function (its class representative).
    pub fn canonical_function(&self, f: u32) -> u32 {
        self.reps[self.class_of(f)]
    }

    /// Every unordered edge orbit, keyed canonically, with its size.
    pub fn edge_orbit_sizes(&self) -> &BTreeMap<EdgeKey, u64> {
        self.edge_sizes.get_or_init(|| self.compute_edge_sizes())
    }

    /// Size of the edge orbit with canonical key `key`, if it is one.
    pub fn edge_orbit_size(&self, key: EdgeKey) -> Option<u64> {
        self.edge_orbit_sizes().get(&key).copied()
    }

    fn compute_edge_sizes(&self) -> BTreeMap<EdgeKey, u64> {
        let full = full_mask(self.k);
        let mut out = BTreeMap::new();
        for (ci, &r) in self.reps.iter().enumerate() {
            let so = &self.stab_orbits[ci];
            for o in 0..so.len() {
                let s = so.members(o)[0];
                if s == r || s == r ^ full {
                    continue;
                }
                let ordered = (r, s);
                let reverse = self.canonical_ordered(s, r);
                let ordered_size = self.class_size(ci) * so.members(o).len() as u64;
                let size = if reverse == ordered { ordered_size / 2 } else { ordered_size };
                out.insert(ordered.min(reverse), size);
            }
        }
        out
    }

    /// Calls `visit(u, v)` once for every unordered edge in the orbit with
    /// canonical key `key`.
    pub fn for_each_edge(&self, key: EdgeKey, mut visit: impl FnMut(u32, u32)) {
        let (r, s) = key;
        let ci = self.class_of(r);
        let so = &self.stab_orbits[ci];
        let partners = so.members(so.orbit_of(s));
        let symmetric = self.canonical_ordered(s, r) == key;
        for &f1 in &self.class_members[ci] {
            let u = &self.from_rep[f1 as usize];
            for &p in partners {
                let f2 = u.apply_bits(p);
                if !symmetric || f1 < f2 {
                    visit(f1, f2);
                }
            }
        }
    }

    /// Order of the whole group.
    pub fn group_order(&self) -> u64 {
        group_order(self.k)
    }
}

/// Maps the table of each ±χ_β to `1 + 2β + c`; all other tables to 0.
fn affine_mask_index(k: u8) -> Vec<u16> {
    let mut idx = vec![0u16; 1usize << points(k)];
    for beta in 0..points(k) {
        let m = chi_mask(k, beta);
        idx[m as usize] = 1 + 2 * beta as u16;
        idx[(m ^ full_mask(k)) as usize] = 2 + 2 * beta as u16;
    }
    idx
}

fn stabilizer_of(k: u8, r: u32, mats: &[Vec<u8>], affine_index: &[u16]) -> Vec<AffineMap> {
    let mut out = Vec::new();
    for cols in mats {
        for b in 0..points(k) {
            let base = AffineMap::from_parts(k, k, cols, b as u8, 0, false);
            let diff = base.point_map().apply_bits(r) ^ r;
            let code = affine_index[diff as usize];
            if code != 0 {
                let code = code - 1;
                out.push(AffineMap::from_parts(k, k, cols, b as u8, (code >> 1) as u8, code & 1 == 1));
            }
        }
    }
    out
}

/// Orbits of all functions under f ↦ M(f).
pub fn function_orbits(k: u8) -> Result<Vec<Orbit>, AffineError> {
    let t = SymmetryTables::shared(k)?;
    Ok((0..t.num_classes())
        .map(|c| Orbit { canonical: OrbitLabel::Function(BoolFn::from_raw(k, t.rep(c))), size: t.class_size(c) })
        .collect())
}

/// Orbits of placements under g ↦ M#(g). Since # is a bijection of the
/// group onto itself these coincide with the function orbits.
pub fn placement_orbits(k: u8) -> Result<Vec<Orbit>, AffineError> {
    let t = SymmetryTables::shared(k)?;
    Ok((0..t.num_classes())
        .map(|c| Orbit { canonical: OrbitLabel::Placement(BoolFn::from_raw(k, t.rep(c))), size: t.class_size(c) })
        .collect())
}

/// Unordered edge orbits, sorted by raw Hamming count and then by label.
pub fn edge_orbits(k: u8) -> Result<Vec<Orbit>, AffineError> {
    let t = SymmetryTables::shared(k)?;
    Ok(edge_orbits_from(&t))
}

pub(crate) fn edge_orbits_from(t: &SymmetryTables) -> Vec<Orbit> {
    let k = t.arity();
    let mut v: Vec<Orbit> = t
        .edge_orbit_sizes()
        .iter()
        .map(|(&(a, b), &size)| Orbit {
            canonical: OrbitLabel::Edge(BoolFn::from_raw(k, a), BoolFn::from_raw(k, b)),
            size,
        })
        .collect();
    v.sort_by_key(|o| (o.hamming(), o.canonical));
    v
}

/// {M : M#(g) = g}.
pub fn stabilizer(g: &BoolFn) -> Result<Vec<AffineMap>, AffineError> {
    let t = SymmetryTables::shared(g.k())?;
    Ok(t.function_stabilizer(g.bits()).iter().map(|m| m.sharp()).collect())
}
