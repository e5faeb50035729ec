//! Lists of edge orbits allowed to carry weight, in the orbit listing
//! format `<f1> <f2> [<hamming> <size>]` under a `k <int>` header.

use std::str::FromStr;

use super::SoundnessError;
use crate::affine::{EdgeKey, SymmetryTables};
use crate::boolfn::BoolFn;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    k: u8,
    keys: Vec<EdgeKey>,
}

impl Restriction {
    pub fn new(k: u8, keys: Vec<EdgeKey>) -> Result<Restriction, SoundnessError> {
        let t = SymmetryTables::shared(k)?;
        for &key in &keys {
            if t.edge_orbit_size(key).is_none() {
                return Err(SoundnessError::UnknownOrbit(key));
            }
        }
        Ok(Restriction { k, keys })
    }

    /// The list shipped with the crate for arity `k`, if any.
    pub fn shipped(k: u8) -> Option<Restriction> {
        let text = match k {
            2 => include_str!("../../fixtures/restrict_k2.txt"),
            3 => include_str!("../../fixtures/restrict_k3.txt"),
            4 => include_str!("../../fixtures/restrict_k4.txt"),
            _ => return None,
        };
        Some(text.parse().expect("shipped restriction lists are valid"))
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn keys(&self) -> &[EdgeKey] {
        &self.keys
    }
}

impl FromStr for Restriction {
    type Err = SoundnessError;

    fn from_str(text: &str) -> Result<Restriction, SoundnessError> {
        let mut k = None;
        let mut keys = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| SoundnessError::Restriction(format!("line {}: {msg}", i + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["k", v] if k.is_none() && keys.is_empty() => {
                    k = Some(v.parse::<u8>().map_err(|_| bad(format!("bad arity {v:?}")))?)
                }
                [f1, f2, ..] => {
                    let a: BoolFn = f1.parse().map_err(|e| bad(format!("{e}")))?;
                    let b: BoolFn = f2.parse().map_err(|e| bad(format!("{e}")))?;
                    if a.k() != b.k() || k.is_some_and(|k| k != a.k()) {
                        return Err(bad("arity mismatch".into()));
                    }
                    k.get_or_insert(a.k());
                    keys.push((a.bits(), b.bits()));
                }
                _ => return Err(bad("unrecognised line".into())),
            }
        }
        let k = k.ok_or_else(|| SoundnessError::Restriction("no orbit lines".into()))?;
        Restriction::new(k, keys)
    }
}
