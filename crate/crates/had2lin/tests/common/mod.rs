#![allow(dead_code)]

use std::collections::BTreeSet;

use had2lin::boolfn::{points, BoolFn};
use had2lin::flow::{max_flow, Flow, FlowGraph};
use had2lin::gadget::Gadget;
use had2lin::scalar::{parse_rational, rational};
use had2lin::soundness::{top_completeness, verify, Mode, Step, Witness};
use had2lin::Rational;
use num_traits::{One, Zero};
use rand::Rng;

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    rational(rng.gen_range(1..20), rng.gen_range(1..8))
}

pub fn random_graph(rng: &mut impl Rng, n: usize) -> FlowGraph<Rational> {
    let mut g = FlowGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.4) {
                g.add_capacity(u, v, random_rational(rng)).unwrap();
            }
        }
    }
    let ns = rng.gen_range(1..=2);
    let nt = rng.gen_range(1..=2);
    for v in 0..ns {
        g.add_source(v).unwrap();
    }
    for v in n - nt..n {
        g.add_sink(v).unwrap();
    }
    g
}

/// Capacity-respecting flow with random directions; usually leaky.
pub fn random_leaky_flow(rng: &mut impl Rng, g: &FlowGraph<Rational>) -> Flow<Rational> {
    let mut w = Flow::new();
    for (u, v, c) in g.edges() {
        if u == v || !rng.gen_bool(0.7) {
            continue;
        }
        let share = c.clone() * rational(rng.gen_range(0..=6), 6);
        let (a, b) = if rng.gen() { (u, v) } else { (v, u) };
        if !share.is_zero() {
            w.set(a, b, share).unwrap();
        }
    }
    w
}

/// A graph on `base × m` nodes invariant under the cyclic shift of copies:
/// each unordered pair draws one capacity for its whole shift orbit.
pub fn cyclic_graph(rng: &mut impl Rng, base: usize, m: usize) -> (FlowGraph<Rational>, Vec<usize>) {
    let n = base * m;
    let shift: Vec<usize> = (0..n).map(|v| (v / m) * m + (v % m + 1) % m).collect();
    let mut g = FlowGraph::new(n);
    let mut seen = BTreeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if seen.contains(&(u, v)) {
                continue;
            }
            let c = if rng.gen_bool(0.3) { Some(random_rational(rng)) } else { None };
            let (mut a, mut b) = (u, v);
            for _ in 0..m {
                let key = (a.min(b), a.max(b));
                if seen.insert(key) {
                    if let Some(c) = &c {
                        g.add_capacity(key.0, key.1, c.clone()).unwrap();
                    }
                }
                (a, b) = (shift[a], shift[b]);
            }
        }
    }
    for i in 0..m {
        g.add_source(i).unwrap();
        g.add_sink((base - 1) * m + i).unwrap();
    }
    (g, shift)
}

/// rs by one max-flow per placement on the full function graph.
pub fn relaxed_soundness_uncompressed(g: &Gadget) -> Rational {
    let k = g.k();
    let n = 1u32 << points(k);
    let full = n - 1;
    let mut total = Rational::zero();
    for place in 0..n {
        let mut graph = FlowGraph::new(n as usize);
        for u in 0..n {
            for v in u + 1..n {
                if u ^ v != full {
                    let c = g.capacity(u, v).unwrap();
                    if !c.is_zero() {
                        graph.add_capacity(u as usize, v as usize, c).unwrap();
                    }
                }
            }
        }
        for alpha in 0..points(k) {
            let chi = BoolFn::chi(k, alpha).unwrap().bits();
            let sink = if place >> alpha & 1 == 1 { chi ^ full } else { chi };
            graph.add_sink(sink as usize).unwrap();
            graph.add_source((sink ^ full) as usize).unwrap();
        }
        total += max_flow(&graph).value;
    }
    Rational::one() - total / Rational::from_integer(n.into())
}

/// 1/2, 1/2 + 1/step, … up to the top completeness of arity k.
pub fn grid(k: u8, step: i64) -> Vec<Rational> {
    let top = top_completeness(k);
    let mut out = Vec::new();
    let mut c = rational(1, 2);
    while c <= top {
        out.push(c.clone());
        c += rational(1, step);
    }
    out
}

fn failing_step(gadget: &str, w: &Witness, mode: Mode) -> Option<Step> {
    verify(gadget, w, mode).ok()?.first_failure().map(|(s, _)| s)
}

fn with_line(text: &str, i: usize, line: String) -> String {
    text.lines().enumerate().map(|(j, l)| if j == i { line.clone() } else { l.to_string() }).collect::<Vec<_>>().join("\n")
}

/// Single-field changes of the gadget file or the witness that verification
/// fails to reject, plus a note if the untouched pair is not accepted.
/// Every `stride`-th flow line is tampered with.
pub fn undetected_tampering(gadget: &Gadget, w: &Witness, mode: Mode, stride: usize) -> Vec<String> {
    let mut missed = Vec::new();
    let text = gadget.to_text();
    match verify(&text, w, mode) {
        Ok(r) if r.accepted() && r.soundness.as_ref() == w.soundness.as_ref() => {}
        Ok(r) => missed.push(format!("original rejected: {:?}", r.first_failure())),
        Err(e) => missed.push(format!("original unusable: {e}")),
    }

    let flows = w.blocks.iter().enumerate().flat_map(|(bi, b)| (0..b.flows.len()).map(move |fi| (bi, fi)));
    for (bi, fi) in flows.step_by(stride.max(1)) {
        if w.blocks[bi].flows[fi].2.is_zero() {
            continue;
        }
        for factor in [rational(1, 2), rational(3, 2), Rational::zero()] {
            let mut t = w.clone();
            t.blocks[bi].flows[fi].2 *= &factor;
            if failing_step(&text, &t, mode).is_none() {
                missed.push(format!("block {bi} flow {fi} scaled by {factor}"));
            }
        }
    }

    let mut t = w.clone();
    t.soundness = t.soundness.map(|s| s - rational(1, 1000));
    if failing_step(&text, &t, mode) != Some(Step::Values) {
        missed.push("soundness claim".into());
    }
    let mut t = w.clone();
    t.completeness = t.completeness.map(|c| c + rational(1, 1000));
    if failing_step(&text, &t, mode) != Some(Step::Values) {
        missed.push("completeness claim".into());
    }

    for (i, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let weight = parse_rational(f[2]).unwrap() * rational(1, 2);
        let tampered = with_line(&text, i, format!("{} {} {}/{}", f[0], f[1], weight.numer(), weight.denom()));
        if failing_step(&tampered, w, mode) != Some(Step::Symmetry) {
            missed.push(format!("halved weight on gadget line {i}"));
        }
    }
    missed
}
