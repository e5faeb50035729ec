//! Flow graphs with symmetric capacities and source/sink node sets.
//!
//! The value of a flow is the net outflow of the source set. Capacities are
//! undirected: `w(u, v) + w(v, u) ≤ C(u, v)`.

mod leaky;
pub(crate) mod network;
mod quotient;

pub use leaky::{leaks, repair_leaky};
pub use quotient::{quotient, uncompress_flow, Quotient};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::scalar::{scale_to_integers, FlowInt, Scalar, ScaledInts};
use crate::Rational;
use network::Network;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error("node {0} out of range")]
    Node(usize),
    #[error("negative capacity on ({0}, {1})")]
    NegativeCapacity(usize, usize),
    #[error("node {0} is both a source and a sink")]
    TerminalOverlap(usize),
    #[error("flow on ({u}, {v}) exceeds the capacity")]
    Capacity { u: usize, v: usize },
    #[error("negative flow entry on ({0}, {1})")]
    NegativeFlow(usize, usize),
    #[error("generator {generator} is not a permutation of the nodes")]
    NotPermutation { generator: usize },
    #[error("generator {generator} breaks symmetry at ({u}, {v}): {reason}")]
    NotSymmetric { generator: usize, u: usize, v: usize, reason: &'static str },
    #[error("quotient flow on orbits ({0}, {1}) has no underlying capacity")]
    ZeroCapacityOrbit(usize, usize),
}

/// A capacitated graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowGraph<T> {
    n: usize,
    capacities: BTreeMap<(usize, usize), T>,
    sources: BTreeSet<usize>,
    sinks: BTreeSet<usize>,
}

impl<T: Scalar> FlowGraph<T> {
    pub fn new(n: usize) -> Self {
        FlowGraph { n, capacities: BTreeMap::new(), sources: BTreeSet::new(), sinks: BTreeSet::new() }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Adds `cap` to C(u, v) = C(v, u). Self-loops are kept for bookkeeping
    /// but never carry flow.
    pub fn add_capacity(&mut self, u: usize, v: usize, cap: T) -> Result<(), FlowError> {
        self.check(u)?;
        self.check(v)?;
        if cap < T::zero() {
            return Err(FlowError::NegativeCapacity(u, v));
        }
        let key = (u.min(v), u.max(v));
        let e = self.capacities.entry(key).or_insert_with(T::zero);
        *e = e.clone() + cap;
        Ok(())
    }

    pub fn capacity(&self, u: usize, v: usize) -> T {
        self.capacities.get(&(u.min(v), u.max(v))).cloned().unwrap_or_else(T::zero)
    }

    /// Unordered pairs `(u ≤ v)` with their capacities.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.capacities.iter().map(|(&(u, v), c)| (u, v, c))
    }

    pub fn add_source(&mut self, v: usize) -> Result<(), FlowError> {
        self.check(v)?;
        if self.sinks.contains(&v) {
            return Err(FlowError::TerminalOverlap(v));
        }
        self.sources.insert(v);
        Ok(())
    }

    pub fn add_sink(&mut self, v: usize) -> Result<(), FlowError> {
        self.check(v)?;
        if self.sources.contains(&v) {
            return Err(FlowError::TerminalOverlap(v));
        }
        self.sinks.insert(v);
        Ok(())
    }

    pub fn sources(&self) -> &BTreeSet<usize> {
        &self.sources
    }

    pub fn sinks(&self) -> &BTreeSet<usize> {
        &self.sinks
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.sources.contains(&v) || self.sinks.contains(&v)
    }

    pub fn total_capacity(&self) -> T {
        self.capacities.values().fold(T::zero(), |a, c| a + c.clone())
    }

    fn check(&self, v: usize) -> Result<(), FlowError> {
        if v < self.n {
            Ok(())
        } else {
            Err(FlowError::Node(v))
        }
    }

    /// DIMACS-style dump with optional node labels in comment lines.
    pub fn to_dimacs(&self, labels: Option<&[String]>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p max {} {}", self.n, self.capacities.len());
        for v in &self.sources {
            let _ = writeln!(s, "n {} s", v + 1);
        }
        for v in &self.sinks {
            let _ = writeln!(s, "n {} t", v + 1);
        }
        if let Some(labels) = labels {
            for (i, l) in labels.iter().enumerate() {
                let _ = writeln!(s, "c label {} {}", i + 1, l);
            }
        }
        for (&(u, v), c) in &self.capacities {
            let _ = writeln!(s, "a {} {} {}", u + 1, v + 1, c);
        }
        s
    }
}

/// Directed, nonnegative flow amounts on ordered node pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow<T> {
    amounts: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> Default for Flow<T> {
    fn default() -> Self {
        Flow { amounts: BTreeMap::new() }
    }
}

impl<T: Scalar> Flow<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets w(u, v); zero removes the entry.
    pub fn set(&mut self, u: usize, v: usize, amount: T) -> Result<(), FlowError> {
        if amount < T::zero() {
            return Err(FlowError::NegativeFlow(u, v));
        }
        if amount.is_zero() {
            self.amounts.remove(&(u, v));
        } else {
            self.amounts.insert((u, v), amount);
        }
        Ok(())
    }

    pub fn add(&mut self, u: usize, v: usize, amount: T) -> Result<(), FlowError> {
        let cur = self.get(u, v);
        self.set(u, v, cur + amount)
    }

    pub fn get(&self, u: usize, v: usize) -> T {
        self.amounts.get(&(u, v)).cloned().unwrap_or_else(T::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.amounts.iter().map(|(&(u, v), a)| (u, v, a))
    }

    pub fn inflow(&self, v: usize) -> T {
        self.amounts.iter().filter(|((_, b), _)| *b == v).fold(T::zero(), |s, (_, a)| s + a.clone())
    }

    pub fn outflow(&self, v: usize) -> T {
        self.amounts.iter().filter(|((a, _), _)| *a == v).fold(T::zero(), |s, (_, x)| s + x.clone())
    }

    /// Net inflow at every node.
    pub fn net_inflow(&self, n: usize) -> Vec<T> {
        let mut net = vec![T::zero(); n];
        for (&(u, v), a) in &self.amounts {
            net[v] = net[v].clone() + a.clone();
            net[u] = net[u].clone() - a.clone();
        }
        net
    }

    /// Net outflow of the source set.
    pub fn value(&self, g: &FlowGraph<T>) -> T {
        let net = self.net_inflow(g.n);
        g.sources.iter().fold(T::zero(), |s, &v| s - net[v].clone())
    }

    /// Checks w(u, v) + w(v, u) ≤ C(u, v) everywhere.
    pub fn check_capacity(&self, g: &FlowGraph<T>) -> Result<(), FlowError> {
        for (&(u, v), a) in &self.amounts {
            if u >= g.n || v >= g.n {
                return Err(FlowError::Node(u.max(v)));
            }
            if *a < T::zero() {
                return Err(FlowError::NegativeFlow(u, v));
            }
            if u == v {
                return Err(FlowError::Capacity { u, v });
            }
            if u < v || !self.amounts.contains_key(&(v, u)) {
                let both = a.clone() + self.get(v, u);
                if both > g.capacity(u, v) {
                    return Err(FlowError::Capacity { u, v });
                }
            }
        }
        Ok(())
    }

    /// Capacity constraint plus conservation at every non-terminal node.
    pub fn is_feasible(&self, g: &FlowGraph<T>) -> bool {
        self.check_capacity(g).is_ok()
            && self
                .net_inflow(g.n)
                .iter()
                .enumerate()
                .all(|(v, x)| g.is_terminal(v) || x.is_zero())
    }
}

/// Optimal value, a feasible witness, and the source side of a minimum cut.
#[derive(Debug, Clone)]
pub struct MaxFlow<T> {
    pub value: T,
    pub flow: Flow<T>,
    pub source_side: Vec<bool>,
}

/// Exact maximum flow: capacities are cleared to integers by their common
/// denominator and solved by Dinic's algorithm.
pub fn max_flow(g: &FlowGraph<Rational>) -> MaxFlow<Rational> {
    let edges: Vec<(usize, usize, Rational)> = g
        .capacities
        .iter()
        .filter(|((u, v), c)| u != v && !c.is_zero())
        .map(|(&(u, v), c)| (u, v, c.clone()))
        .collect();
    let sources: Vec<usize> = g.sources.iter().copied().collect();
    let sinks: Vec<usize> = g.sinks.iter().copied().collect();
    let r = max_flow_edges(g.n, &edges, &sources, &sinks);
    let mut flow = Flow::new();
    for (i, (u, v, _)) in edges.iter().enumerate() {
        let f = &r.edge_flow[i];
        if f > &Rational::zero() {
            flow.amounts.insert((*u, *v), f.clone());
        } else if f < &Rational::zero() {
            flow.amounts.insert((*v, *u), -f.clone());
        }
    }
    MaxFlow { value: r.value, flow, source_side: r.source_side }
}

/// Result of a max-flow over an explicit edge list.
#[derive(Debug, Clone)]
pub(crate) struct EdgeFlow {
    pub value: Rational,
    /// Net flow from the first to the second endpoint of each input edge.
    pub edge_flow: Vec<Rational>,
    pub source_side: Vec<bool>,
}

pub(crate) fn max_flow_edges(
    n: usize,
    edges: &[(usize, usize, Rational)],
    sources: &[usize],
    sinks: &[usize],
) -> EdgeFlow {
    let caps: Vec<Rational> = edges.iter().map(|e| e.2.clone()).collect();
    let (scaled, d) = scale_to_integers(&caps);
    let d = Rational::from_integer(d);
    let (value, flows, side) = match scaled {
        ScaledInts::Small(ints) => run_dinic(n, edges, &ints, sources, sinks),
        ScaledInts::Big(ints) => run_dinic(n, edges, &ints, sources, sinks),
    };
    EdgeFlow {
        value: Rational::from_integer(value) / &d,
        edge_flow: flows.into_iter().map(|f| Rational::from_integer(f) / &d).collect(),
        source_side: side,
    }
}

fn run_dinic<T: FlowInt>(
    n: usize,
    edges: &[(usize, usize, Rational)],
    caps: &[T],
    sources: &[usize],
    sinks: &[usize],
) -> (BigInt, Vec<BigInt>, Vec<bool>) {
    let mut net: Network<T> = Network::new(n + 2);
    let (s, t) = (n, n + 1);
    let mut big = T::zero();
    let mut arcs = Vec::with_capacity(edges.len());
    for ((u, v, _), c) in edges.iter().zip(caps) {
        arcs.push(net.add_undirected(*u, *v, c.clone()));
        big += c.clone();
    }
    let mut inf = big;
    inf += T::one();
    for &v in sources {
        net.add_arc_pair(s, v, inf.clone(), T::zero());
    }
    for &v in sinks {
        net.add_arc_pair(v, t, inf.clone(), T::zero());
    }
    let value = net.max_flow(s, t).to_bigint();
    let flows = arcs
        .iter()
        .map(|&a| {
            let (pos, neg) = net.net_flow(a);
            pos.to_bigint() - neg.to_bigint()
        })
        .collect();
    let mut side = net.source_side(s);
    side.truncate(n);
    (value, flows, side)
}
