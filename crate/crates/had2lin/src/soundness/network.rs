//! The orbit-compressed flow network shared by evaluation, construction
//! and verification.
//!
//! For each placement class with representative g₀ the nodes of the g₀
//! graph are grouped into orbits of {M# : M#(g₀) = g₀}. In relaxed mode
//! every (class, orbit) is its own node. In infinity-relaxed mode an
//! interior node (f, g) of dimension below k is identified with every
//! (f', g') that some group element carries onto the same canonical
//! function with the same restriction of the placement to its affine span.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use num_traits::Zero;
use rayon::prelude::*;

use super::{Mode, SoundnessError};
use crate::affine::{AffineMap, EdgeKey, SubOrbits, SymmetryTables, MAX_TABLE_ARITY};
use crate::boolfn::{chi_mask, full_mask, points, AffineSubspace, BoolFn};
use crate::flow::max_flow_edges;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Source,
    Sink,
    Interior,
}

/// Identity of a class-level node orbit after merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum MergeKey {
    Own { class: usize, orbit: usize },
    Restricted { class: usize, orbit: u32 },
}

/// Node orbits of one placement class.
#[derive(Debug)]
pub struct ClassNodes {
    pub rep: u32,
    pub size: u64,
    pub orbits: SubOrbits,
    pub kinds: Vec<NodeKind>,
    pub(crate) merge: Vec<MergeKey>,
}

impl ClassNodes {
    /// Smallest member of each orbit, used as its label.
    pub fn label(&self, orbit: usize) -> u32 {
        self.orbits.members(orbit)[0]
    }
}

/// Sink table for α under placement g: g(α)·χ_α.
pub fn sink_bits(k: u8, g: u32, alpha: u32) -> u32 {
    let chi = chi_mask(k, alpha);
    if (g >> alpha) & 1 == 1 {
        chi ^ full_mask(k)
    } else {
        chi
    }
}

pub fn node_kind(k: u8, g: u32, f: u32) -> NodeKind {
    let full = full_mask(k);
    for alpha in 0..points(k) {
        let s = sink_bits(k, g, alpha);
        if f == s {
            return NodeKind::Sink;
        }
        if f == s ^ full {
            return NodeKind::Source;
        }
    }
    NodeKind::Interior
}

/// Orbits of a representative's stabilizer on restrictions of placements
/// to the affine span of its Fourier support.
struct RestrictionTable {
    span: AffineSubspace,
    orbit_of: Vec<u32>,
}

impl RestrictionTable {
    fn new(t: &SymmetryTables, class: usize) -> RestrictionTable {
        let k = t.arity();
        let r = BoolFn::from_raw(k, t.rep(class));
        let span = r.affine_span();
        let d = span.dim();
        let mut coord = vec![u8::MAX; points(k) as usize];
        for z in 0..1u32 << d {
            coord[span.point(z) as usize] = z as u8;
        }
        let mut actions: HashSet<(Vec<u8>, u32)> = HashSet::new();
        for s in t.rep_stabilizer(class) {
            let sh = s.sharp();
            let mask = sh_mask(&sh);
            let mut perm = Vec::with_capacity(1 << d);
            let mut m = 0u32;
            for z in 0..1u32 << d {
                let a = span.point(z);
                perm.push(coord[sh.point(a) as usize]);
                m |= ((mask >> a) & 1) << z;
            }
            actions.insert((perm, m));
        }
        let n = 1usize << (1usize << d);
        let mut orbit_of = vec![u32::MAX; n];
        let mut next = 0;
        for h in 0..n {
            if orbit_of[h] != u32::MAX {
                continue;
            }
            orbit_of[h] = next;
            let mut stack = vec![h as u32];
            while let Some(u) = stack.pop() {
                for (perm, m) in &actions {
                    let v = perm.iter().enumerate().fold(0u32, |acc, (z, &p)| acc | (((u >> p) & 1) << z)) ^ m;
                    if orbit_of[v as usize] == u32::MAX {
                        orbit_of[v as usize] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        RestrictionTable { span, orbit_of }
    }

    fn orbit(&self, g: u32) -> u32 {
        let h = (0..1u32 << self.span.dim()).fold(0u32, |acc, z| acc | (((g >> self.span.point(z)) & 1) << z));
        self.orbit_of[h as usize]
    }
}

fn sh_mask(m: &AffineMap) -> u32 {
    // Table of the sign/character factor, i.e. the map applied to the all-(+1) function.
    m.apply_bits(0)
}

fn build_class_nodes(k: u8) -> Result<Vec<ClassNodes>, SoundnessError> {
    let t = SymmetryTables::shared(k)?;
    let restrictions: Vec<OnceLock<RestrictionTable>> = (0..t.num_classes()).map(|_| OnceLock::new()).collect();
    let classes: Vec<ClassNodes> = (0..t.num_classes())
        .into_par_iter()
        .map(|c| {
            let g0 = t.rep(c);
            let maps: Vec<_> = t.rep_stabilizer(c).iter().map(|s| s.sharp().point_map()).collect();
            let orbits = SubOrbits::compute(k, &maps);
            let mut kinds = Vec::with_capacity(orbits.len());
            let mut merge = Vec::with_capacity(orbits.len());
            for o in 0..orbits.len() {
                let f = orbits.members(o)[0];
                let kind = node_kind(k, g0, f);
                debug_assert!(orbits.members(o).iter().all(|&x| node_kind(k, g0, x) == kind));
                kinds.push(kind);
                let dim = BoolFn::from_raw(k, f).dimension();
                let key = if kind != NodeKind::Interior || dim == k as usize {
                    MergeKey::Own { class: c, orbit: o }
                } else {
                    let rc = t.class_of(f);
                    let sh = t.to_rep(f).sharp();
                    let gp = sh.inverse().expect("group element").apply_bits(g0);
                    let table = restrictions[rc].get_or_init(|| RestrictionTable::new(&t, rc));
                    MergeKey::Restricted { class: rc, orbit: table.orbit(gp) }
                };
                merge.push(key);
            }
            ClassNodes { rep: g0, size: t.class_size(c), orbits, kinds, merge }
        })
        .collect();
    Ok(classes)
}

/// Node orbits of every placement class, built once per arity.
pub fn class_nodes(k: u8) -> Result<Arc<Vec<ClassNodes>>, SoundnessError> {
    static CACHE: [OnceLock<Arc<Vec<ClassNodes>>>; MAX_TABLE_ARITY as usize] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    SymmetryTables::shared(k)?;
    let cell = &CACHE[k as usize - 1];
    if let Some(v) = cell.get() {
        return Ok(v.clone());
    }
    let v = Arc::new(build_class_nodes(k)?);
    Ok(cell.get_or_init(|| v).clone())
}

/// An unordered pair of class-level orbits with the number of edges of
/// each edge orbit running between them.
#[derive(Debug, Clone)]
pub struct ClassPair {
    pub a: usize,
    pub b: usize,
    pub counts: Vec<(usize, u64)>,
}

#[derive(Debug, Clone)]
pub struct NetPair {
    pub x: usize,
    pub y: usize,
    pub part: usize,
    /// Capacity of the pair as a linear form in the per-edge weights.
    pub coef: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeInfo {
    pub kind: NodeKind,
    pub part: usize,
}

/// Result of a max-flow on the compressed network.
#[derive(Debug, Clone)]
pub struct NetworkFlow {
    pub value: Rational,
    pub part_values: Vec<Rational>,
    /// Signed flow from `x` to `y` of each pair.
    pub pair_flow: Vec<Rational>,
    pub source_side: Vec<bool>,
}

/// Compressed network over a fixed list of edge orbits.
#[derive(Debug, Clone)]
pub struct Network {
    k: u8,
    mode: Mode,
    keys: Vec<EdgeKey>,
    sizes: Vec<u64>,
    classes: Arc<Vec<ClassNodes>>,
    class_weights: Vec<Rational>,
    class_pairs: Vec<Vec<ClassPair>>,
    node_of: Vec<Vec<usize>>,
    nodes: Vec<NodeInfo>,
    pairs: Vec<NetPair>,
    parts: usize,
}

impl Network {
    pub fn new(k: u8, mode: Mode, keys: &[EdgeKey]) -> Result<Network, SoundnessError> {
        let t = SymmetryTables::shared(k)?;
        let mut sizes = Vec::with_capacity(keys.len());
        for &key in keys {
            sizes.push(t.edge_orbit_size(key).ok_or(SoundnessError::UnknownOrbit(key))?);
        }
        let classes = class_nodes(k)?;
        let total = Rational::from_integer((1u64 << points(k)).into());
        let class_weights: Vec<Rational> =
            classes.iter().map(|c| Rational::from_integer(c.size.into()) / &total).collect();

        let class_pairs: Vec<Vec<ClassPair>> = classes
            .par_iter()
            .map(|cn| {
                let mut acc: BTreeMap<(usize, usize), Vec<(usize, u64)>> = BTreeMap::new();
                for (e, &key) in keys.iter().enumerate() {
                    let mut codes = Vec::new();
                    t.for_each_edge(key, |u, v| {
                        let (a, b) = (cn.orbits.orbit_of(u), cn.orbits.orbit_of(v));
                        if a != b {
                            codes.push(((a.min(b) as u64) << 32) | a.max(b) as u64);
                        }
                    });
                    codes.sort_unstable();
                    for run in codes.chunk_by(|x, y| x == y) {
                        let (a, b) = ((run[0] >> 32) as usize, (run[0] & 0xffff_ffff) as usize);
                        acc.entry((a, b)).or_default().push((e, run.len() as u64));
                    }
                }
                acc.into_iter().map(|((a, b), counts)| ClassPair { a, b, counts }).collect()
            })
            .collect();

        let mut nodes = Vec::new();
        let mut node_of = Vec::with_capacity(classes.len());
        let mut merged: HashMap<MergeKey, usize> = HashMap::new();
        for (c, cn) in classes.iter().enumerate() {
            let mut ids = Vec::with_capacity(cn.orbits.len());
            for o in 0..cn.orbits.len() {
                let key = match mode {
                    Mode::Relaxed => MergeKey::Own { class: c, orbit: o },
                    Mode::InfinityRelaxed => cn.merge[o],
                };
                let part = match mode {
                    Mode::Relaxed => c,
                    Mode::InfinityRelaxed => 0,
                };
                let id = *merged.entry(key).or_insert_with(|| {
                    nodes.push(NodeInfo { kind: cn.kinds[o], part });
                    nodes.len() - 1
                });
                ids.push(id);
            }
            node_of.push(ids);
        }

        let mut pair_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs: Vec<NetPair> = Vec::new();
        let mut coef_acc: Vec<BTreeMap<usize, Rational>> = Vec::new();
        for (c, cps) in class_pairs.iter().enumerate() {
            for cp in cps {
                let (x, y) = (node_of[c][cp.a], node_of[c][cp.b]);
                if x == y {
                    continue;
                }
                let key = (x.min(y), x.max(y));
                let i = *pair_index.entry(key).or_insert_with(|| {
                    pairs.push(NetPair { x: key.0, y: key.1, part: nodes[key.0].part, coef: Vec::new() });
                    coef_acc.push(BTreeMap::new());
                    pairs.len() - 1
                });
                for &(e, n) in &cp.counts {
                    *coef_acc[i].entry(e).or_insert_with(Rational::zero) +=
                        &class_weights[c] * Rational::from_integer(n.into());
                }
            }
        }
        for (p, acc) in pairs.iter_mut().zip(coef_acc) {
            p.coef = acc.into_iter().collect();
        }
        let parts = match mode {
            Mode::Relaxed => classes.len(),
            Mode::InfinityRelaxed => 1,
        };
        Ok(Network {
            k,
            mode,
            keys: keys.to_vec(),
            sizes,
            classes,
            class_weights,
            class_pairs,
            node_of,
            nodes,
            pairs,
            parts,
        })
    }

    pub fn arity(&self) -> u8 {
        self.k
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn keys(&self) -> &[EdgeKey] {
        &self.keys
    }

    pub fn orbit_sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Raw Hamming length of each edge orbit.
    pub fn lengths(&self) -> Vec<u32> {
        self.keys.iter().map(|(a, b)| (a ^ b).count_ones()).collect()
    }

    pub fn classes(&self) -> &[ClassNodes] {
        &self.classes
    }

    pub fn class_weight(&self, c: usize) -> &Rational {
        &self.class_weights[c]
    }

    pub fn class_pairs(&self, c: usize) -> &[ClassPair] {
        &self.class_pairs[c]
    }

    /// Network node carrying class `c`, orbit `o`.
    pub fn node_of(&self, c: usize, o: usize) -> usize {
        self.node_of[c][o]
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn pairs(&self) -> &[NetPair] {
        &self.pairs
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    /// Maps per-edge weights of a gadget onto this network's orbit list.
    pub fn weights_from(&self, support: &BTreeMap<EdgeKey, Rational>) -> Result<Vec<Rational>, SoundnessError> {
        for key in support.keys() {
            if !self.keys.contains(key) {
                return Err(SoundnessError::UnknownOrbit(*key));
            }
        }
        Ok(self.keys.iter().map(|k| support.get(k).cloned().unwrap_or_else(Rational::zero)).collect())
    }

    pub fn pair_capacity(&self, p: usize, x: &[Rational]) -> Rational {
        self.pairs[p].coef.iter().map(|(e, a)| a * &x[*e]).sum()
    }

    /// Unweighted capacity between two orbits of class `c`.
    pub fn class_pair_capacity(&self, cp: &ClassPair, x: &[Rational]) -> Rational {
        cp.counts
            .iter()
            .map(|&(e, n)| Rational::from_integer(n.into()) * &x[e])
            .sum()
    }

    pub fn max_flow(&self, x: &[Rational]) -> NetworkFlow {
        let mut edges = Vec::new();
        let mut which = Vec::new();
        for (i, p) in self.pairs.iter().enumerate() {
            let cap = self.pair_capacity(i, x);
            if !cap.is_zero() {
                edges.push((p.x, p.y, cap));
                which.push(i);
            }
        }
        let sources: Vec<usize> = (0..self.nodes.len()).filter(|&v| self.nodes[v].kind == NodeKind::Source).collect();
        let sinks: Vec<usize> = (0..self.nodes.len()).filter(|&v| self.nodes[v].kind == NodeKind::Sink).collect();
        let r = max_flow_edges(self.nodes.len(), &edges, &sources, &sinks);
        let mut pair_flow = vec![Rational::zero(); self.pairs.len()];
        for (j, &i) in which.iter().enumerate() {
            pair_flow[i] = r.edge_flow[j].clone();
        }
        let mut part_values = vec![Rational::zero(); self.parts];
        for (p, f) in self.pairs.iter().zip(&pair_flow) {
            if self.nodes[p.x].kind == NodeKind::Source {
                part_values[p.part] += f;
            }
            if self.nodes[p.y].kind == NodeKind::Source {
                part_values[p.part] -= f;
            }
        }
        let mut source_side = r.source_side;
        source_side.truncate(self.nodes.len());
        NetworkFlow { value: r.value, part_values, pair_flow, source_side }
    }

    /// Capacity of the cut `side` restricted to one part, as a linear form
    /// in the per-edge weights.
    pub fn cut_form(&self, side: &[bool], part: usize) -> Vec<Rational> {
        let mut a = vec![Rational::zero(); self.keys.len()];
        for p in &self.pairs {
            if p.part == part && side[p.x] != side[p.y] {
                for (e, c) in &p.coef {
                    a[*e] += c;
                }
            }
        }
        a
    }

    /// Splits a network flow into per-class directed flows between orbits,
    /// proportionally to class-level capacity inside each merged pair.
    pub fn class_flows(&self, x: &[Rational], nf: &NetworkFlow) -> Vec<BTreeMap<(usize, usize), Rational>> {
        let index: HashMap<(usize, usize), usize> =
            self.pairs.iter().enumerate().map(|(i, p)| ((p.x, p.y), i)).collect();
        let caps: Vec<Rational> = (0..self.pairs.len()).map(|i| self.pair_capacity(i, x)).collect();
        let mut out = vec![BTreeMap::new(); self.classes.len()];
        for (c, cps) in self.class_pairs.iter().enumerate() {
            for cp in cps {
                let (x0, y0) = (self.node_of[c][cp.a], self.node_of[c][cp.b]);
                if x0 == y0 {
                    continue;
                }
                let i = index[&(x0.min(y0), x0.max(y0))];
                let f = &nf.pair_flow[i];
                if f.is_zero() {
                    continue;
                }
                let share = f * self.class_pair_capacity(cp, x) / &caps[i];
                // Orient from a to b.
                let share = if x0 < y0 { share } else { -share };
                if share > Rational::zero() {
                    out[c].insert((cp.a, cp.b), share);
                } else if share < Rational::zero() {
                    out[c].insert((cp.b, cp.a), -share);
                }
            }
        }
        out
    }
}
