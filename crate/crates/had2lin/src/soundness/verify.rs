//! Five-step verification of a gadget against a quotient-level flow
//! witness. Only substitution and summation; no linear program is solved.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::network::{node_kind, sink_bits, Network, NodeKind};
use super::{Mode, Witness};
use crate::affine::SymmetryTables;
use crate::boolfn::{full_mask, BoolFn};
use crate::gadget::Gadget;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    Capacity,
    Symmetry,
    Extension,
    Conservation,
    Values,
}

impl Step {
    pub const ALL: [Step; 5] = [Step::Capacity, Step::Symmetry, Step::Extension, Step::Conservation, Step::Values];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Step::Capacity => "capacity",
            Step::Symmetry => "symmetry",
            Step::Extension => "extension",
            Step::Conservation => "conservation",
            Step::Values => "values",
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} ({})", self.number(), self.name())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("unusable input: {0}")]
    Input(String),
    #[error("placement {placement}: flow {a} -> {b}: {msg}")]
    Flow { placement: String, a: String, b: String, msg: String },
    #[error("placement {placement}: flow {a} <-> {b} totals {flow}, capacity is {capacity}")]
    Capacity { placement: String, a: String, b: String, flow: Rational, capacity: Rational },
    #[error("gadget is not a symmetric distribution: {0}")]
    Symmetry(String),
    #[error("placement {placement}: {msg}")]
    Extension { placement: String, msg: String },
    #[error("node {node}: inflow and outflow differ by {imbalance}")]
    Conservation { node: String, imbalance: Rational },
    #[error("claimed {field} {claimed} but the witness gives {computed}")]
    Values { field: &'static str, claimed: Rational, computed: Rational },
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepStatus {
    Passed,
    Failed(VerifyError),
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub mode: Mode,
    pub steps: Vec<(Step, StepStatus)>,
    pub completeness: Option<Rational>,
    pub soundness: Option<Rational>,
}

impl VerifyReport {
    pub fn accepted(&self) -> bool {
        self.steps.iter().all(|(_, s)| *s == StepStatus::Passed)
    }

    pub fn first_failure(&self) -> Option<(Step, &VerifyError)> {
        self.steps.iter().find_map(|(step, s)| match s {
            StepStatus::Failed(e) => Some((*step, e)),
            _ => None,
        })
    }
}

struct Run {
    status: BTreeMap<Step, StepStatus>,
}

impl Run {
    /// Records the outcome of a step; returns false once anything failed.
    fn record(&mut self, step: Step, r: Result<(), VerifyError>) -> bool {
        let ok = r.is_ok();
        self.status.insert(step, r.map_or_else(StepStatus::Failed, |_| StepStatus::Passed));
        ok
    }
}

/// Verifies the gadget file `gadget_text` against `witness` in `mode`.
///
/// The gadget is checked for symmetry first since every other step reads
/// its capacities; later steps are skipped after the first failure.
pub fn verify(gadget_text: &str, witness: &Witness, mode: Mode) -> Result<VerifyReport, VerifyError> {
    if witness.mode != mode {
        return Err(VerifyError::Input(format!("witness is for mode {}, asked to verify {mode}", witness.mode)));
    }
    let mut run = Run { status: BTreeMap::new() };
    let mut completeness = None;
    let mut soundness = None;
    'steps: {
        let gadget = match Gadget::parse_lenient(gadget_text) {
            Ok(g) => g,
            Err(e) => {
                run.record(Step::Symmetry, Err(VerifyError::Symmetry(e.to_string())));
                break 'steps;
            }
        };
        run.record(Step::Symmetry, Ok(()));
        if gadget.k() != witness.k {
            return Err(VerifyError::Input(format!("gadget arity {} but witness arity {}", gadget.k(), witness.k)));
        }
        let checker = Checker::new(&gadget, witness, mode)?;
        if !run.record(Step::Capacity, checker.capacity()) {
            break 'steps;
        }
        if !run.record(Step::Extension, checker.extension()) {
            break 'steps;
        }
        if !run.record(Step::Conservation, checker.conservation()) {
            break 'steps;
        }
        let c = gadget.completeness().map_err(|e| VerifyError::Input(e.to_string()))?;
        let s = Rational::one() - checker.value();
        let mut values = Ok(());
        if let Some(claimed) = witness.completeness.as_ref().filter(|v| **v != c) {
            values = Err(VerifyError::Values { field: "completeness", claimed: claimed.clone(), computed: c.clone() });
        } else if let Some(claimed) = witness.soundness.as_ref().filter(|v| **v != s) {
            values = Err(VerifyError::Values { field: "soundness", claimed: claimed.clone(), computed: s.clone() });
        }
        if run.record(Step::Values, values) {
            completeness = Some(c);
            soundness = Some(s);
        }
    }
    let steps = Step::ALL
        .iter()
        .map(|&step| (step, run.status.remove(&step).unwrap_or(StepStatus::Skipped)))
        .collect();
    Ok(VerifyReport { mode, steps, completeness, soundness })
}

struct Checker<'a> {
    k: u8,
    witness: &'a Witness,
    net: Network,
    x: Vec<Rational>,
    /// Block index of each placement class.
    block_of: Vec<Option<usize>>,
}

impl<'a> Checker<'a> {
    fn new(gadget: &Gadget, witness: &'a Witness, mode: Mode) -> Result<Checker<'a>, VerifyError> {
        let k = gadget.k();
        let input = |e: super::SoundnessError| VerifyError::Input(e.to_string());
        let net = Network::new(k, mode, &gadget.support()).map_err(input)?;
        let x = net.weights_from(gadget.weights()).map_err(input)?;
        let t = SymmetryTables::shared(k).map_err(|e| VerifyError::Input(e.to_string()))?;
        let mut block_of = vec![None; t.num_classes()];
        for (i, b) in witness.blocks.iter().enumerate() {
            if b.placement.k() != k {
                return Err(VerifyError::Input(format!("block {} has the wrong arity", b.placement)));
            }
            let c = t.class_of(b.placement.bits());
            if t.rep(c) == b.placement.bits() && block_of[c].is_none() {
                block_of[c] = Some(i);
            }
        }
        Ok(Checker { k, witness, net, x, block_of })
    }

    fn label(&self, f: u32) -> String {
        BoolFn::from_raw(self.k, f).to_string()
    }

    /// Orbit indices of each flow line of a block, checked for canonical labels.
    fn resolve(&self, c: usize, bi: usize) -> Result<Vec<(usize, usize, &'a Rational)>, VerifyError> {
        let cn = &self.net.classes()[c];
        let block = &self.witness.blocks[bi];
        let mut out = Vec::with_capacity(block.flows.len());
        for (a, b, w) in &block.flows {
            let bad = |msg: &str| VerifyError::Flow {
                placement: block.placement.to_string(),
                a: a.to_string(),
                b: b.to_string(),
                msg: msg.into(),
            };
            if a.k() != self.k || b.k() != self.k {
                return Err(bad("wrong arity"));
            }
            let (oa, ob) = (cn.orbits.orbit_of(a.bits()), cn.orbits.orbit_of(b.bits()));
            if cn.label(oa) != a.bits() || cn.label(ob) != b.bits() {
                return Err(bad("labels must be the smallest member of their node orbit"));
            }
            if *w < Rational::zero() {
                return Err(bad("negative flow"));
            }
            if self.net.node_of(c, oa) == self.net.node_of(c, ob) {
                return Err(bad("both ends are the same node"));
            }
            out.push((oa, ob, w));
        }
        Ok(out)
    }

    fn capacity(&self) -> Result<(), VerifyError> {
        for (c, bi) in self.block_of.iter().enumerate() {
            let Some(bi) = *bi else { continue };
            let placement = self.witness.blocks[bi].placement.to_string();
            let caps: HashMap<(usize, usize), Rational> = self
                .net
                .class_pairs(c)
                .iter()
                .map(|cp| ((cp.a, cp.b), self.net.class_pair_capacity(cp, &self.x)))
                .collect();
            let mut used: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
            for (a, b, w) in self.resolve(c, bi)? {
                *used.entry((a.min(b), a.max(b))).or_insert_with(Rational::zero) += w;
            }
            let cn = &self.net.classes()[c];
            for ((a, b), flow) in used {
                let capacity = caps.get(&(a, b)).cloned().unwrap_or_else(Rational::zero);
                if flow > capacity {
                    return Err(VerifyError::Capacity {
                        placement,
                        a: self.label(cn.label(a)),
                        b: self.label(cn.label(b)),
                        flow,
                        capacity,
                    });
                }
            }
        }
        Ok(())
    }

    /// Every class has a block, and for every placement g the map carrying
    /// its representative's graph onto g's sends terminals to terminals of
    /// the same kind.
    fn extension(&self) -> Result<(), VerifyError> {
        let t = SymmetryTables::shared(self.k).map_err(|e| VerifyError::Input(e.to_string()))?;
        let mut seen = vec![false; t.num_classes()];
        for b in &self.witness.blocks {
            let c = t.class_of(b.placement.bits());
            if t.rep(c) != b.placement.bits() {
                return Err(VerifyError::Extension {
                    placement: b.placement.to_string(),
                    msg: format!("not a class representative; the representative is {}", self.label(t.rep(c))),
                });
            }
            if std::mem::replace(&mut seen[c], true) {
                return Err(VerifyError::Extension { placement: b.placement.to_string(), msg: "duplicate block".into() });
            }
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(VerifyError::Extension { placement: self.label(t.rep(c)), msg: "no block for this class".into() });
        }
        let k = self.k;
        let full = full_mask(k);
        let bad = (0..t.num_functions() as u32).into_par_iter().find_any(|&g| {
            let g0 = t.rep(t.class_of(g));
            let m = t.to_rep(g).sharp();
            (0..1u32 << k).any(|alpha| {
                let s = sink_bits(k, g0, alpha);
                node_kind(k, g, m.apply_bits(s)) != NodeKind::Sink
                    || node_kind(k, g, m.apply_bits(s ^ full)) != NodeKind::Source
            })
        });
        match bad {
            Some(g) => Err(VerifyError::Extension {
                placement: self.label(g),
                msg: "transported terminals do not match this placement".into(),
            }),
            None => Ok(()),
        }
    }

    /// Net outflow of every node orbit, per class.
    fn net_outflows(&self) -> Vec<BTreeMap<usize, Rational>> {
        let mut out = vec![BTreeMap::new(); self.block_of.len()];
        for (c, bi) in self.block_of.iter().enumerate() {
            let Some(bi) = *bi else { continue };
            for (a, b, w) in self.resolve(c, bi).expect("checked in the capacity step") {
                *out[c].entry(a).or_insert_with(Rational::zero) += w;
                *out[c].entry(b).or_insert_with(Rational::zero) -= w;
            }
        }
        out
    }

    fn conservation(&self) -> Result<(), VerifyError> {
        let nets = self.net_outflows();
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut name: HashMap<usize, String> = HashMap::new();
        for (c, net) in nets.iter().enumerate() {
            let cn = &self.net.classes()[c];
            for (&o, v) in net {
                if cn.kinds[o] != NodeKind::Interior || v.is_zero() {
                    continue;
                }
                let node = self.net.node_of(c, o);
                *merged.entry(node).or_insert_with(Rational::zero) += self.net.class_weight(c) * v;
                name.entry(node).or_insert_with(|| format!("{} under {}", self.label(cn.label(o)), self.label(cn.rep)));
            }
        }
        match merged.into_iter().find(|(_, v)| !v.is_zero()) {
            Some((node, v)) => Err(VerifyError::Conservation { node: name[&node].clone(), imbalance: v }),
            None => Ok(()),
        }
    }

    /// E over placements of the net outflow of the sources.
    fn value(&self) -> Rational {
        let mut total = Rational::zero();
        for (c, net) in self.net_outflows().iter().enumerate() {
            let cn = &self.net.classes()[c];
            let v: Rational = net.iter().filter(|(o, _)| cn.kinds[**o] == NodeKind::Source).map(|(_, v)| v).sum();
            total += self.net.class_weight(c) * v;
        }
        total
    }
}
