//! The completeness/soundness trade-off curve of infinity-relaxed gadgets.

use std::fmt::Write as _;

use num_traits::{One, Zero};

use super::construct::{construct_many, top_completeness};
use super::{Mode, Restriction, SoundnessError};
use crate::boolfn::points;
use crate::scalar::{decimal_round, decimal_round_up};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePoint {
    pub c: Rational,
    pub s: Rational,
    /// True above 1 − 2^{−k}, where s is the linear extension to (1, 1).
    pub extended: bool,
}

/// s(c) on the grid 1/2, 1/2 + step, … ≤ 1. Grid points up to 1 − 2^{−k}
/// are solved over the allowed orbits in infinity-relaxed mode; beyond
/// that, s(c) = 1 + 2^k (s(1 − 2^{−k}) − 1)(1 − c).
pub fn curve(k: u8, step: &Rational, restriction: Option<&Restriction>) -> Result<Vec<CurvePoint>, SoundnessError> {
    if *step <= Rational::zero() {
        return Err(SoundnessError::Solver(format!("grid step {step} must be positive")));
    }
    let top = top_completeness(k);
    let half = Rational::new(1.into(), 2.into());
    let mut grid = Vec::new();
    let mut c = half;
    while c <= Rational::one() {
        grid.push(c.clone());
        c += step;
    }
    let mut solved: Vec<Rational> = grid.iter().filter(|c| **c <= top).cloned().collect();
    let top_on_grid = solved.last() == Some(&top);
    if !top_on_grid {
        solved.push(top.clone());
    }
    let keys = restriction.map(|r| r.keys());
    let mut s = construct_many(k, &solved, Mode::InfinityRelaxed, keys)?;
    let s_top = s.last().cloned().expect("top completeness is always solved");
    if !top_on_grid {
        s.pop();
    }
    let n = Rational::from_integer(points(k).into());
    let mut out: Vec<CurvePoint> =
        solved.into_iter().zip(s).map(|(c, s)| CurvePoint { c, s, extended: false }).collect();
    for c in grid.into_iter().filter(|c| *c > top) {
        let s = Rational::one() + &n * (&s_top - Rational::one()) * (Rational::one() - &c);
        out.push(CurvePoint { c, s, extended: true });
    }
    Ok(out)
}

/// CSV with columns `c_exact,s_exact,c_decimal,s_decimal_roundup4`.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("c_exact,s_exact,c_decimal,s_decimal_roundup4\n");
    for p in points {
        let _ = writeln!(
            out,
            "{}/{},{}/{},{},{}",
            p.c.numer(),
            p.c.denom(),
            p.s.numer(),
            p.s.denom(),
            decimal_round(&p.c, 6),
            decimal_round_up(&p.s, 4)
        );
    }
    out
}
