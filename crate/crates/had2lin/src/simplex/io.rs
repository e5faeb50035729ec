//! CPLEX-LP text export with integer rows, and exact solution import.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{LinearProgram, LpError, Relation, Sense};
use crate::scalar::{common_denominator, parse_rational};
use crate::Rational;

/// Integer multiples of `coeffs` with the smallest positive scale.
fn integer_row<'a>(values: impl Iterator<Item = &'a Rational> + Clone) -> (Vec<BigInt>, Rational) {
    let d = common_denominator(values.clone());
    let ints: Vec<BigInt> = values.map(|v| v.numer() * (&d / v.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    let g = if g.is_zero() { BigInt::one() } else { g };
    let ints = ints.into_iter().map(|v| v / &g).collect();
    (ints, Rational::new(d, g))
}

fn term(out: &mut String, first: &mut bool, c: &BigInt, name: &str) {
    let sign = if c.is_negative() { "-" } else if *first { "" } else { "+" };
    let mag = c.abs();
    if *first {
        let _ = write!(out, " {sign}{}{name}", if mag.is_one() { String::new() } else { format!("{mag} ") });
    } else {
        let _ = write!(out, " {sign} {}{name}", if mag.is_one() { String::new() } else { format!("{mag} ") });
    }
    *first = false;
}

/// Writes `lp` in CPLEX LP format. Every row and the objective are scaled by
/// a positive factor so that all numbers are integers; the objective factor
/// is recorded in a comment.
pub fn export_lp(lp: &LinearProgram<Rational>) -> String {
    let mut out = String::new();
    let obj_vals: Vec<Rational> = lp.objective().iter().map(|(_, c)| c.clone()).collect();
    let (obj_ints, obj_scale) = integer_row(obj_vals.iter());
    let _ = writeln!(out, "\\ objective scaled by {obj_scale}");
    let _ = writeln!(out, "{}", match lp.sense() {
        Sense::Maximize => "Maximize",
        Sense::Minimize => "Minimize",
    });
    let mut line = String::from(" obj:");
    let mut first = true;
    for ((j, _), c) in lp.objective().iter().zip(&obj_ints) {
        term(&mut line, &mut first, c, lp.variable_name(*j));
    }
    if first {
        line.push_str(" 0");
    }
    let _ = writeln!(out, "{line}");
    let _ = writeln!(out, "Subject To");
    for r in lp.rows() {
        let vals = r.coeffs.iter().map(|(_, c)| c).chain(std::iter::once(&r.rhs));
        let (ints, _) = integer_row(vals);
        let mut line = format!(" {}:", r.name);
        let mut first = true;
        for ((j, _), c) in r.coeffs.iter().zip(&ints) {
            term(&mut line, &mut first, c, lp.variable_name(*j));
        }
        if first {
            line.push_str(" 0 x_zero_row");
        }
        let rel = match r.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, "{line} {rel} {}", ints.last().expect("rhs present"));
    }
    let _ = writeln!(out, "End");
    out
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.125` exactly.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    if let Some(r) = parse_rational(s) {
        return Some(r);
    }
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let n = BigInt::parse_bytes(format!("{int}{frac}0").as_bytes(), 10)? / 10;
    let scale = frac.len() as i32 - exp;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        Rational::new(n, ten.pow(scale as u32))
    } else {
        Rational::from_integer(n * ten.pow((-scale) as u32))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

/// Reads `<variable> <value>` lines and accepts them only if they satisfy
/// every row exactly. Variables not listed are zero.
pub fn import_solution(text: &str, lp: &LinearProgram<Rational>) -> Result<Vec<Rational>, LpError> {
    let mut x = vec![Rational::zero(); lp.num_variables()];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(name), Some(val), None) = (it.next(), it.next(), it.next()) else {
            return Err(LpError::Parse { line: i + 1, msg: "expected `<variable> <value>`".into() });
        };
        let j = lp.variable(name).ok_or_else(|| LpError::UnknownVariable(name.to_string()))?;
        x[j] = parse_decimal(val).ok_or_else(|| LpError::Parse { line: i + 1, msg: format!("bad number {val:?}") })?;
    }
    lp.check_feasible(&x)?;
    Ok(x)
}

/// Formats an assignment as `<variable> <p>/<q>` lines, skipping zeros.
pub fn format_solution(lp: &LinearProgram<Rational>, x: &[Rational]) -> String {
    let mut out = String::new();
    for (j, v) in x.iter().enumerate() {
        if !v.is_zero() {
            let _ = writeln!(out, "{} {}", lp.variable_name(j), v);
        }
    }
    out
}
