//! Per-class flow witnesses and their text form.

use std::fmt::Write as _;
use std::str::FromStr;

use super::network::{Network, NetworkFlow, NodeKind};
use super::{Mode, SoundnessError};
use crate::boolfn::BoolFn;
use crate::scalar::parse_rational;
use crate::Rational;

/// Directed flow between node-orbit labels in the graph of one placement
/// class representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessBlock {
    pub placement: BoolFn,
    pub flows: Vec<(BoolFn, BoolFn, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub k: u8,
    pub mode: Mode,
    /// Claimed values, checked by verification when present.
    pub completeness: Option<Rational>,
    pub soundness: Option<Rational>,
    pub blocks: Vec<WitnessBlock>,
}

impl Witness {
    pub(crate) fn from_flow(
        net: &Network,
        x: &[Rational],
        nf: &NetworkFlow,
        completeness: Option<Rational>,
        soundness: Option<Rational>,
    ) -> Witness {
        let k = net.arity();
        let flows = net.class_flows(x, nf);
        let blocks = net
            .classes()
            .iter()
            .zip(flows)
            .map(|(cn, fl)| WitnessBlock {
                placement: BoolFn::from_raw(k, cn.rep),
                flows: fl
                    .into_iter()
                    // Flow between two sources or two sinks carries no value.
                    .filter(|((a, b), _)| cn.kinds[*a] == NodeKind::Interior || cn.kinds[*a] != cn.kinds[*b])
                    .map(|((a, b), w)| (BoolFn::from_raw(k, cn.label(a)), BoolFn::from_raw(k, cn.label(b)), w))
                    .collect(),
            })
            .collect();
        Witness { k, mode: net.mode(), completeness, soundness, blocks }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("k {}\nmode {}\n", self.k, self.mode);
        if let Some(c) = &self.completeness {
            let _ = writeln!(out, "completeness {}/{}", c.numer(), c.denom());
        }
        if let Some(s) = &self.soundness {
            let _ = writeln!(out, "soundness {}/{}", s.numer(), s.denom());
        }
        for b in &self.blocks {
            let _ = writeln!(out, "g {}", b.placement);
            for (f1, f2, w) in &b.flows {
                let _ = writeln!(out, "{f1} {f2} {}/{}", w.numer(), w.denom());
            }
        }
        out
    }
}

impl FromStr for Witness {
    type Err = SoundnessError;

    fn from_str(text: &str) -> Result<Witness, SoundnessError> {
        let mut k = None;
        let mut mode = None;
        let mut completeness = None;
        let mut soundness = None;
        let mut blocks: Vec<WitnessBlock> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| SoundnessError::Witness(format!("line {}: {msg}", i + 1));
            let rat = |s: &str| parse_rational(s).ok_or_else(|| bad(&format!("malformed rational {s:?}")));
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["k", v] if blocks.is_empty() => k = Some(v.parse::<u8>().map_err(|_| bad("bad arity"))?),
                ["mode", m] if blocks.is_empty() => mode = Some(m.parse::<Mode>()?),
                ["completeness", v] if blocks.is_empty() => completeness = Some(rat(v)?),
                ["soundness", v] if blocks.is_empty() => soundness = Some(rat(v)?),
                ["g", g] => {
                    let g: BoolFn = g.parse().map_err(|e| bad(&format!("{e}")))?;
                    blocks.push(WitnessBlock { placement: g, flows: Vec::new() });
                }
                [f1, f2, w] => {
                    let block = blocks.last_mut().ok_or_else(|| bad("flow line before any `g` block"))?;
                    let f1: BoolFn = f1.parse().map_err(|e| bad(&format!("{e}")))?;
                    let f2: BoolFn = f2.parse().map_err(|e| bad(&format!("{e}")))?;
                    block.flows.push((f1, f2, rat(w)?));
                }
                _ => return Err(bad("unrecognised line")),
            }
        }
        let k = k
            .or_else(|| blocks.first().map(|b| b.placement.k()))
            .ok_or_else(|| SoundnessError::Witness("missing arity".into()))?;
        let mode = mode.ok_or_else(|| SoundnessError::Witness("missing `mode` line".into()))?;
        Ok(Witness { k, mode, completeness, soundness, blocks })
    }
}
