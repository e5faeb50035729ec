//! Relaxed and infinity-relaxed soundness: evaluation, construction,
//! lifting of flows and the completeness/soundness curve.

mod construct;
mod curve;
mod lift;
mod lp;
pub mod network;
mod restriction;
mod verify;
mod witness;

pub use construct::{construct_gadget, min_completeness_extremal_gadget, top_completeness, Construction, Extremal};
pub use curve::{curve, curve_csv, CurvePoint};
pub use lift::{lift_flow, measure_leakage, ExpandedFlow, LeakReport, Leakage, LiftedFlow, MAX_EXPAND_ARITY};
pub use lp::build_construction_lp;
pub use network::{Network, NodeKind};
pub use restriction::Restriction;
pub use verify::{verify, Step, StepStatus, VerifyError, VerifyReport};
pub use witness::{Witness, WitnessBlock};

use std::fmt;
use std::str::FromStr;

use num_traits::One;

use crate::affine::{AffineError, EdgeKey};
use crate::gadget::{Gadget, GadgetError};
use crate::simplex::LpError;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Relaxed,
    InfinityRelaxed,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Relaxed => "rs",
            Mode::InfinityRelaxed => "rsinf",
        })
    }
}

impl FromStr for Mode {
    type Err = SoundnessError;

    fn from_str(s: &str) -> Result<Mode, SoundnessError> {
        match s {
            "rs" => Ok(Mode::Relaxed),
            "rsinf" => Ok(Mode::InfinityRelaxed),
            _ => Err(SoundnessError::Mode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SoundnessError {
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("unknown mode {0:?}; expected rs or rsinf")]
    Mode(String),
    #[error("packed pair {0:?} is not a canonical edge orbit")]
    UnknownOrbit(EdgeKey),
    #[error("completeness {0} is not reachable with the allowed edge orbits")]
    Infeasible(Rational),
    #[error("linear program did not finish: {0}")]
    Solver(String),
    #[error("witness: {0}")]
    Witness(String),
    #[error("restriction list: {0}")]
    Restriction(String),
    #[error("arity {0} is out of range for this operation")]
    Arity(u8),
}

/// Soundness value of a gadget with the flow that certifies it.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub mode: Mode,
    pub completeness: Rational,
    pub soundness: Rational,
    pub witness: Witness,
}

impl Evaluation {
    /// (1 − s)/(1 − c), or `None` at completeness one.
    pub fn ratio(&self) -> Option<Rational> {
        let d = Rational::one() - &self.completeness;
        (d != Rational::from_integer(0.into())).then(|| (Rational::one() - &self.soundness) / d)
    }
}

pub fn evaluate(g: &Gadget, mode: Mode) -> Result<Evaluation, SoundnessError> {
    let net = Network::new(g.k(), mode, &g.support())?;
    let x = net.weights_from(g.weights())?;
    let nf = net.max_flow(&x);
    let soundness = Rational::one() - &nf.value;
    let completeness = g.completeness()?;
    let witness = Witness::from_flow(&net, &x, &nf, Some(completeness.clone()), Some(soundness.clone()));
    Ok(Evaluation { mode, completeness, soundness, witness })
}

/// rs(G) with a per-class flow witness.
pub fn relaxed_soundness(g: &Gadget) -> Result<Evaluation, SoundnessError> {
    evaluate(g, Mode::Relaxed)
}

/// rs∞(G) with a per-class flow witness.
pub fn infinity_relaxed_soundness(g: &Gadget) -> Result<Evaluation, SoundnessError> {
    evaluate(g, Mode::InfinityRelaxed)
}
