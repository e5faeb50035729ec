use std::collections::BTreeMap;

use super::{Flow, FlowError, FlowGraph};
use crate::scalar::Scalar;

/// Signed leak `fin − fout` at every non-terminal node.
pub fn leaks<T: Scalar>(w: &Flow<T>, g: &FlowGraph<T>) -> Result<BTreeMap<usize, T>, FlowError> {
    w.check_capacity(g)?;
    let net = w.net_inflow(g.node_count());
    Ok(net
        .into_iter()
        .enumerate()
        .filter(|(v, _)| !g.is_terminal(*v))
        .collect())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum End {
    Terminal,
    Leak,
}

/// Turns a leaky flow into a feasible one losing at most Σ|leak| in value.
///
/// Every leak is routed to an auxiliary terminal, the resulting balanced flow
/// is decomposed into paths and cycles, and only paths joining two genuine
/// terminals are kept.
pub fn repair_leaky<T: Scalar>(w: &Flow<T>, g: &FlowGraph<T>) -> Result<Flow<T>, FlowError> {
    let n = g.node_count();
    let net = leaks(w, g).map(|_| w.net_inflow(n))?;
    if net.iter().enumerate().all(|(v, x)| g.is_terminal(v) || x.is_zero()) {
        return Ok(w.clone());
    }
    let mut arcs: BTreeMap<(usize, usize), T> = BTreeMap::new();
    for (u, v, a) in w.entries() {
        // Cancel opposite directions first; only the net amount matters.
        let back = w.get(v, u);
        if *a > back {
            arcs.insert((u, v), a.clone() - back);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in arcs.keys() {
        adj[u].push(v);
    }
    // Supply (net outflow) and demand (net inflow) at each node.
    let mut supply: Vec<(usize, T, End)> = Vec::new();
    let mut demand: Vec<T> = vec![T::zero(); n];
    let mut demand_kind: Vec<End> = vec![End::Terminal; n];
    for (v, x) in net.iter().enumerate() {
        let kind = if g.is_terminal(v) { End::Terminal } else { End::Leak };
        if *x < T::zero() {
            supply.push((v, -x.clone(), kind));
        } else if *x > T::zero() {
            demand[v] = x.clone();
            demand_kind[v] = kind;
        }
    }
    let mut out = Flow::new();
    let mut cursor = vec![0usize; n];
    for (start, mut avail, start_kind) in supply {
        while avail > T::zero() {
            // Walk along positive arcs until a node with remaining demand.
            let mut walk = vec![start];
            let mut pos: BTreeMap<usize, usize> = BTreeMap::from([(start, 0)]);
            loop {
                let u = *walk.last().expect("walk is never empty");
                if demand[u] > T::zero() {
                    break;
                }
                let next = loop {
                    let c = cursor[u];
                    if c >= adj[u].len() {
                        break None;
                    }
                    let v = adj[u][c];
                    if arcs.get(&(u, v)).is_some_and(|a| *a > T::zero()) {
                        break Some(v);
                    }
                    cursor[u] += 1;
                };
                let Some(v) = next else {
                    unreachable!("balanced flow always continues from a node with inflow")
                };
                if let Some(&i) = pos.get(&v) {
                    // Cancel the cycle walk[i..] -> v.
                    let cyc: Vec<usize> = walk[i..].to_vec();
                    let mut m: Option<T> = None;
                    for j in 0..cyc.len() {
                        let (a, b) = (cyc[j], if j + 1 < cyc.len() { cyc[j + 1] } else { v });
                        let x = arcs[&(a, b)].clone();
                        m = Some(match m {
                            Some(y) if y < x => y,
                            _ => x,
                        });
                    }
                    let m = m.expect("cycle has an arc");
                    for j in 0..cyc.len() {
                        let (a, b) = (cyc[j], if j + 1 < cyc.len() { cyc[j + 1] } else { v });
                        let e = arcs.get_mut(&(a, b)).expect("cycle arc exists");
                        *e = e.clone() - m.clone();
                    }
                    for &x in &walk[i + 1..] {
                        pos.remove(&x);
                    }
                    walk.truncate(i + 1);
                } else {
                    pos.insert(v, walk.len());
                    walk.push(v);
                }
            }
            let end = *walk.last().expect("walk is never empty");
            let mut m = if demand[end] < avail { demand[end].clone() } else { avail.clone() };
            for j in 0..walk.len() - 1 {
                let x = &arcs[&(walk[j], walk[j + 1])];
                if *x < m {
                    m = x.clone();
                }
            }
            for j in 0..walk.len() - 1 {
                let e = arcs.get_mut(&(walk[j], walk[j + 1])).expect("path arc exists");
                *e = e.clone() - m.clone();
            }
            avail = avail - m.clone();
            demand[end] = demand[end].clone() - m.clone();
            if start_kind == End::Terminal && demand_kind[end] == End::Terminal {
                for j in 0..walk.len() - 1 {
                    out.add(walk[j], walk[j + 1], m.clone())?;
                }
            }
        }
    }
    Ok(out)
}
