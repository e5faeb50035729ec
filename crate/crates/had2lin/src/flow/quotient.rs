use std::collections::BTreeMap;

use super::{Flow, FlowError, FlowGraph};
use crate::scalar::Scalar;

/// A quotient graph together with the node-to-orbit map.
#[derive(Debug, Clone)]
pub struct Quotient<T> {
    pub graph: FlowGraph<T>,
    pub orbit_of: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
}

/// Quotient of `g` by the group generated by the given node permutations.
///
/// Each generator is checked to map sources to sources, sinks to sinks and
/// to preserve every capacity.
pub fn quotient<T: Scalar>(g: &FlowGraph<T>, generators: &[Vec<usize>]) -> Result<Quotient<T>, FlowError> {
    let n = g.node_count();
    for (gi, p) in generators.iter().enumerate() {
        let mut seen = vec![false; n];
        if p.len() != n || p.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(FlowError::NotPermutation { generator: gi });
        }
        for &s in g.sources() {
            if !g.sources().contains(&p[s]) {
                return Err(FlowError::NotSymmetric { generator: gi, u: s, v: p[s], reason: "source leaves the source set" });
            }
        }
        for &t in g.sinks() {
            if !g.sinks().contains(&p[t]) {
                return Err(FlowError::NotSymmetric { generator: gi, u: t, v: p[t], reason: "sink leaves the sink set" });
            }
        }
        for (u, v, c) in g.edges() {
            if g.capacity(p[u], p[v]) != *c {
                return Err(FlowError::NotSymmetric { generator: gi, u, v, reason: "capacity changes" });
            }
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in generators {
        for (u, &v) in p.iter().enumerate() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut id_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut orbit_of = vec![0; n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        let id = *id_of_root.entry(r).or_insert_with(|| {
            orbits.push(Vec::new());
            orbits.len() - 1
        });
        orbit_of[v] = id;
        orbits[id].push(v);
    }
    let mut q = FlowGraph::new(orbits.len());
    for (u, v, c) in g.edges() {
        q.add_capacity(orbit_of[u], orbit_of[v], c.clone())?;
    }
    for &s in g.sources() {
        q.add_source(orbit_of[s])?;
    }
    for &t in g.sinks() {
        q.add_sink(orbit_of[t])?;
    }
    Ok(Quotient { graph: q, orbit_of, orbits })
}

/// Spreads a quotient flow over the original edges in proportion to their
/// capacities.
pub fn uncompress_flow<T: Scalar>(wq: &Flow<T>, g: &FlowGraph<T>, q: &Quotient<T>) -> Result<Flow<T>, FlowError> {
    for (a, b, x) in wq.entries() {
        if *x > T::zero() && (a == b || q.graph.capacity(a, b).is_zero()) {
            return Err(FlowError::ZeroCapacityOrbit(a, b));
        }
    }
    let mut w = Flow::new();
    for (u, v, c) in g.edges() {
        let (a, b) = (q.orbit_of[u], q.orbit_of[v]);
        if a == b || c.is_zero() {
            continue;
        }
        let total = q.graph.capacity(a, b);
        let fwd = wq.get(a, b);
        if !fwd.is_zero() {
            w.add(u, v, fwd * c.clone() / total.clone())?;
        }
        let back = wq.get(b, a);
        if !back.is_zero() {
            w.add(v, u, back * c.clone() / total)?;
        }
    }
    Ok(w)
}
