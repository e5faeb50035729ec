//! Gadget construction by exact cutting planes.
//!
//! The optimal gadget maximises the total flow F(x) = Σ_parts mincut_p(x)
//! over per-edge weights x. A master LP over (x, t) bounds each part's
//! flow t_p by the cuts found so far; each round the exact max-flow at the
//! master optimum either certifies it or yields violated minimum cuts.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{One, Zero};

use super::network::{Network, NodeKind};
use super::{Mode, SoundnessError, Witness};
use crate::affine::{EdgeKey, SymmetryTables};
use crate::boolfn::points;
use crate::gadget::Gadget;
use crate::scalar::to_f64;
use crate::simplex::{LinearProgram, LpOutcome, Relation, Sense, SolveOptions, WarmLp};
use crate::Rational;

/// A constructed gadget with its certificate.
#[derive(Debug, Clone)]
pub struct Construction {
    pub mode: Mode,
    pub gadget: Gadget,
    pub witness: Witness,
    pub completeness: Rational,
    pub soundness: Rational,
    /// Cutting-plane rounds and cuts used.
    pub rounds: usize,
    pub cuts: usize,
}

#[derive(Debug, Clone)]
pub struct Extremal {
    pub construction: Construction,
    /// The best ratio (1 − s)/(1 − c), attained at every optimal gadget.
    pub ratio: Rational,
}

enum Target {
    /// Σ size·dist·x = 1 − c, maximise flow.
    Completeness(Rational),
    /// Flow ≥ ρ·Σ size·dist·x, maximise Σ size·dist·x.
    MinCompleteness(Rational),
}

/// Cuts accumulated for one network; they stay valid for every weighting.
pub(crate) struct CutPool<'n> {
    net: &'n Network,
    sizes: Vec<Rational>,
    dists: Vec<Rational>,
    cuts: Vec<(usize, Vec<Rational>)>,
}

pub(crate) struct Solved {
    pub x: Vec<Rational>,
    pub flow: super::network::NetworkFlow,
    pub rounds: usize,
}

impl<'n> CutPool<'n> {
    pub(crate) fn new(net: &'n Network) -> CutPool<'n> {
        let n = Rational::from_integer(points(net.arity()).into());
        let sizes = net.orbit_sizes().iter().map(|&s| Rational::from_integer(s.into())).collect();
        let dists = net.lengths().iter().map(|&h| Rational::from_integer(h.into()) / &n).collect();
        let mut pool = CutPool { net, sizes, dists, cuts: Vec::new() };
        let sources: Vec<bool> = net.nodes().iter().map(|v| v.kind == NodeKind::Source).collect();
        let non_sinks: Vec<bool> = net.nodes().iter().map(|v| v.kind != NodeKind::Sink).collect();
        for p in 0..net.parts() {
            pool.cuts.push((p, net.cut_form(&sources, p)));
            pool.cuts.push((p, net.cut_form(&non_sinks, p)));
        }
        pool
    }

    fn master(&self, target: &Target) -> LinearProgram<Rational> {
        let n = self.sizes.len();
        let parts = self.net.parts();
        let sense = Sense::Maximize;
        let mut lp = LinearProgram::new(sense);
        for e in 0..n {
            lp.add_variable(format!("x{e}")).expect("fresh");
        }
        for p in 0..parts {
            lp.add_variable(format!("t{p}")).expect("fresh");
        }
        for (i, (p, a)) in self.cuts.iter().enumerate() {
            let row = self.cut_row(*p, a);
            lp.add_row(format!("cut{i}"), row, Relation::Le, Rational::zero()).expect("valid");
        }
        let mass: Vec<(usize, Rational)> = self.sizes.iter().cloned().enumerate().collect();
        let length: Vec<(usize, Rational)> =
            self.sizes.iter().zip(&self.dists).map(|(s, d)| s * d).enumerate().collect();
        lp.add_row("mass", mass, Relation::Eq, Rational::one()).expect("valid");
        match target {
            Target::Completeness(c) => {
                lp.add_row("length", length, Relation::Eq, Rational::one() - c).expect("valid");
                lp.set_objective((0..parts).map(|p| (n + p, Rational::one())).collect()).expect("valid");
            }
            Target::MinCompleteness(rho) => {
                let mut row: Vec<(usize, Rational)> = length.iter().map(|(e, v)| (*e, rho * v)).collect();
                row.extend((0..parts).map(|p| (n + p, -Rational::one())));
                lp.add_row("ratio", row, Relation::Le, Rational::zero()).expect("valid");
                lp.set_objective(length).expect("valid");
            }
        }
        lp
    }

    fn cut_row(&self, p: usize, a: &[Rational]) -> Vec<(usize, Rational)> {
        let mut row: Vec<(usize, Rational)> = vec![(self.sizes.len() + p, Rational::one())];
        row.extend(a.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(e, v)| (e, -v.clone())));
        row
    }

    fn solve(&mut self, target: &Target) -> Result<Solved, SoundnessError> {
        let n = self.sizes.len();
        let mut master = WarmLp::new(self.master(target), SolveOptions::default());
        let mut rounds = 0;
        loop {
            rounds += 1;
            let started = Instant::now();
            let sol = match master.solve() {
                LpOutcome::Optimal(s) => s,
                LpOutcome::Infeasible => {
                    return Err(match target {
                        Target::Completeness(c) => SoundnessError::Infeasible(c.clone()),
                        Target::MinCompleteness(_) => SoundnessError::Solver("ratio stage infeasible".into()),
                    })
                }
                other => return Err(SoundnessError::Solver(format!("{other:?}"))),
            };
            let x = sol.values[..n].to_vec();
            let t = &sol.values[n..];
            let solved_at = started.elapsed();
            let flow = self.net.max_flow(&x);
            log::debug!(
                "round {rounds}: {} cuts, bound {}, flow {}, master {:?}, max-flow {:?}",
                self.cuts.len(),
                to_f64(&sol.value),
                to_f64(&flow.value),
                solved_at,
                started.elapsed() - solved_at
            );
            let mut added = false;
            for p in 0..self.net.parts() {
                if flow.part_values[p] < t[p] {
                    let a = self.net.cut_form(&flow.source_side, p);
                    let i = self.cuts.len();
                    master
                        .add_le_row(format!("cut{i}"), self.cut_row(p, &a), Rational::zero())
                        .map_err(|e| SoundnessError::Solver(e.to_string()))?;
                    self.cuts.push((p, a));
                    added = true;
                }
            }
            if !added {
                return Ok(Solved { x, flow, rounds });
            }
        }
    }

    pub(crate) fn cut_count(&self) -> usize {
        self.cuts.len()
    }
}

/// 1 − 2^{−k}, the largest completeness of a gadget.
pub fn top_completeness(k: u8) -> Rational {
    Rational::one() - Rational::new(1.into(), points(k).into())
}

/// Edge orbits to optimise over: all of them, the unit-length ones at the
/// top completeness, or the given restriction.
pub(crate) fn orbit_list(
    k: u8,
    c: Option<&Rational>,
    restriction: Option<&[EdgeKey]>,
) -> Result<Vec<EdgeKey>, SoundnessError> {
    let t = SymmetryTables::shared(k)?;
    let top = top_completeness(k);
    let all: Vec<EdgeKey> = match restriction {
        Some(r) => {
            for key in r {
                if t.edge_orbit_size(*key).is_none() {
                    return Err(SoundnessError::UnknownOrbit(*key));
                }
            }
            r.to_vec()
        }
        None => t.edge_orbit_sizes().keys().copied().collect(),
    };
    if c == Some(&top) {
        return Ok(t
            .edge_orbit_sizes()
            .keys()
            .copied()
            .filter(|(a, b)| (a ^ b).count_ones() == 1)
            .collect());
    }
    if restriction.is_none() && k >= 4 {
        return Err(SoundnessError::Solver(
            "k = 4 below the top completeness needs a restriction list".into(),
        ));
    }
    Ok(all)
}

fn finish(
    net: &Network,
    pool: &CutPool<'_>,
    solved: Solved,
) -> Result<Construction, SoundnessError> {
    let weights: BTreeMap<EdgeKey, Rational> = net.keys().iter().copied().zip(solved.x.iter().cloned()).collect();
    let gadget = Gadget::new(net.arity(), weights)?;
    let completeness = gadget.completeness()?;
    let soundness = Rational::one() - &solved.flow.value;
    let witness = Witness::from_flow(net, &solved.x, &solved.flow, Some(completeness.clone()), Some(soundness.clone()));
    Ok(Construction {
        mode: net.mode(),
        gadget,
        witness,
        completeness,
        soundness,
        rounds: solved.rounds,
        cuts: pool.cut_count(),
    })
}

/// The gadget of completeness `c` with the least (relaxed or
/// infinity-relaxed) soundness over the allowed orbits.
pub fn construct_gadget(
    k: u8,
    c: &Rational,
    mode: Mode,
    restriction: Option<&[EdgeKey]>,
) -> Result<Construction, SoundnessError> {
    let half = Rational::new(1.into(), 2.into());
    let top = top_completeness(k);
    if *c < half || *c > top {
        return Err(SoundnessError::Infeasible(c.clone()));
    }
    let keys = orbit_list(k, Some(c), restriction)?;
    let net = Network::new(k, mode, &keys)?;
    let mut pool = CutPool::new(&net);
    let solved = pool.solve(&Target::Completeness(c.clone()))?;
    finish(&net, &pool, solved)
}

/// Constructs the same optimum for several completeness values, sharing
/// cuts between them.
pub(crate) fn construct_many(
    k: u8,
    cs: &[Rational],
    mode: Mode,
    restriction: Option<&[EdgeKey]>,
) -> Result<Vec<Rational>, SoundnessError> {
    let keys = orbit_list(k, None, restriction)?;
    let net = Network::new(k, mode, &keys)?;
    let mut pool = CutPool::new(&net);
    let mut out = Vec::with_capacity(cs.len());
    for c in cs {
        let solved = pool.solve(&Target::Completeness(c.clone()))?;
        out.push(Rational::one() - &solved.flow.value);
    }
    Ok(out)
}

/// Among gadgets attaining the best ratio (1 − s)/(1 − c), the one of least
/// completeness. The best ratio is read off at completeness 1 − 2^{−k}.
pub fn min_completeness_extremal_gadget(
    k: u8,
    mode: Mode,
    restriction: Option<&[EdgeKey]>,
) -> Result<Extremal, SoundnessError> {
    let top = top_completeness(k);
    let first = construct_gadget(k, &top, mode, None)?;
    let ratio = (Rational::one() - &first.soundness) / (Rational::one() - &top);
    let keys = match restriction {
        Some(r) => orbit_list(k, None, Some(r))?,
        None => orbit_list(k, None, None)?,
    };
    let net = Network::new(k, mode, &keys)?;
    let mut pool = CutPool::new(&net);
    let solved = pool.solve(&Target::MinCompleteness(ratio.clone()))?;
    let construction = finish(&net, &pool, solved)?;
    let attained = (Rational::one() - &construction.soundness) / (Rational::one() - &construction.completeness);
    if attained != ratio {
        return Err(SoundnessError::Solver(format!("second stage ratio {attained} differs from {ratio}")));
    }
    Ok(Extremal { construction, ratio })
}
