use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use had2lin::affine::{edge_orbits, placement_orbits, OrbitLabel};
use had2lin::gadget::{self, Gadget};
use had2lin::scalar::decimal_round_up;
use had2lin::simplex::export_lp as lp_text;
use had2lin::soundness::{
    self as sound, build_construction_lp, construct_gadget, curve_csv, lift_flow, measure_leakage,
    min_completeness_extremal_gadget, top_completeness, Construction, Leakage, Mode, Restriction, StepStatus,
    Witness,
};
use had2lin::Rational;
use serde_json::{json, Value};

use crate::output::{frac, read, write_atomic, Outcome, Staged};

/// The restriction to use for arity `k`: the given file, or the shipped
/// list when arity 4 needs one.
fn restriction(k: u8, path: Option<&Path>, needed: bool) -> anyhow::Result<Option<Restriction>> {
    if let Some(p) = path {
        let r: Restriction = read(p)?.parse().with_context(|| format!("in {}", p.display()))?;
        if r.k() != k {
            bail!("{} lists orbits of arity {}, not {k}", p.display(), r.k());
        }
        return Ok(Some(r));
    }
    if k == 4 && needed {
        let r = Restriction::shipped(4).expect("arity 4 list is shipped");
        eprintln!(
            "note: using the shipped list of {} edge orbits; gadgets below completeness 15/16 may be sub-optimal",
            r.keys().len()
        );
        return Ok(Some(r));
    }
    Ok(None)
}

fn gadget_file(path: &Path) -> anyhow::Result<Gadget> {
    read(path)?.parse().with_context(|| format!("in {}", path.display()))
}

fn witness_file(path: &Path) -> anyhow::Result<Witness> {
    read(path)?.parse().with_context(|| format!("in {}", path.display()))
}

fn ratio(c: &Rational, s: &Rational) -> Option<Rational> {
    let d = Rational::from_integer(1.into()) - c;
    (d != Rational::from_integer(0.into())).then(|| (Rational::from_integer(1.into()) - s) / d)
}

fn opt_frac(r: &Option<Rational>) -> Value {
    r.as_ref().map_or(Value::Null, |r| Value::String(frac(r)))
}

pub fn orbits(k: u8, placements: bool) -> anyhow::Result<Outcome> {
    let mut text = String::new();
    let mut rows = Vec::new();
    if placements {
        for o in placement_orbits(k)? {
            if let OrbitLabel::Placement(g) = o.canonical {
                let _ = writeln!(text, "{g} {}", o.size);
                rows.push(json!({ "placement": g.to_string(), "size": o.size }));
            }
        }
    } else {
        for o in edge_orbits(k)? {
            if let OrbitLabel::Edge(a, b) = o.canonical {
                let h = o.hamming().unwrap_or_default();
                let _ = writeln!(text, "{a} {b} {h} {}", o.size);
                rows.push(json!({ "f1": a.to_string(), "f2": b.to_string(), "hamming": h, "size": o.size }));
            }
        }
    }
    Ok(Outcome::new(text, json!({ "k": k, "orbits": rows })))
}

fn construction_outcome(
    built: &Construction,
    best_ratio: Option<&Rational>,
    out: &Option<PathBuf>,
    witness: &Option<PathBuf>,
) -> anyhow::Result<Outcome> {
    let mut staged = Staged::default();
    if let Some(p) = out {
        staged.add(p, &built.gadget.to_text())?;
    }
    if let Some(p) = witness {
        staged.add(p, &built.witness.to_text())?;
    }
    staged.commit()?;
    let r = ratio(&built.completeness, &built.soundness);
    let mut text = format!(
        "mode {}\ncompleteness {}\nsoundness {}\n",
        built.mode,
        frac(&built.completeness),
        frac(&built.soundness)
    );
    if let Some(r) = &r {
        let _ = writeln!(text, "ratio {}", frac(r));
    }
    let _ = writeln!(text, "orbits {}\nrounds {}\ncuts {}", built.gadget.weights().len(), built.rounds, built.cuts);
    if out.is_none() {
        text.push_str(&built.gadget.to_text());
    }
    let json = json!({
        "mode": built.mode.to_string(),
        "k": built.gadget.k(),
        "completeness": frac(&built.completeness),
        "soundness": frac(&built.soundness),
        "ratio": opt_frac(&r),
        "best_ratio": opt_frac(&best_ratio.cloned()),
        "rounds": built.rounds,
        "cuts": built.cuts,
        "gadget": built.gadget.to_text(),
    });
    Ok(Outcome::new(text, json))
}

pub fn construct(
    k: u8,
    mode: Mode,
    restrict: Option<&Path>,
    c: &Rational,
    out: &Option<PathBuf>,
    witness: &Option<PathBuf>,
) -> anyhow::Result<Outcome> {
    let r = restriction(k, restrict, *c < top_completeness(k))?;
    let t = Instant::now();
    let built = construct_gadget(k, c, mode, r.as_ref().map(|r| r.keys()))?;
    log::info!("constructed in {:?}", t.elapsed());
    construction_outcome(&built, None, out, witness)
}

pub fn extremal(
    k: u8,
    mode: Mode,
    restrict: Option<&Path>,
    out: &Option<PathBuf>,
    witness: &Option<PathBuf>,
) -> anyhow::Result<Outcome> {
    let r = restriction(k, restrict, true)?;
    let t = Instant::now();
    let e = min_completeness_extremal_gadget(k, mode, r.as_ref().map(|r| r.keys()))?;
    log::info!("extremal gadget in {:?}", t.elapsed());
    construction_outcome(&e.construction, Some(&e.ratio), out, witness)
}

pub fn evaluate(gadget: &Path, mode: Mode, witness: Option<&Path>) -> anyhow::Result<Outcome> {
    let g = gadget_file(gadget)?;
    let t = Instant::now();
    let e = sound::evaluate(&g, mode)?;
    log::info!("evaluated in {:?}", t.elapsed());
    if let Some(p) = witness {
        write_atomic(p, &e.witness.to_text())?;
    }
    let r = e.ratio();
    let mut text = format!("mode {mode}\ncompleteness {}\nsoundness {}\n", frac(&e.completeness), frac(&e.soundness));
    if let Some(r) = &r {
        let _ = writeln!(text, "ratio {}", frac(r));
    }
    let json = json!({
        "mode": mode.to_string(),
        "completeness": frac(&e.completeness),
        "soundness": frac(&e.soundness),
        "ratio": opt_frac(&r),
    });
    Ok(Outcome::new(text, json))
}

pub fn verify(gadget: &Path, witness: &Path, mode: Mode) -> anyhow::Result<Outcome> {
    let text = read(gadget)?;
    let w = witness_file(witness)?;
    let report = sound::verify(&text, &w, mode)?;
    let mut out = String::new();
    let mut steps = Vec::new();
    for (step, status) in &report.steps {
        let (state, detail) = match status {
            StepStatus::Passed => ("passed", None),
            StepStatus::Failed(e) => ("failed", Some(e.to_string())),
            StepStatus::Skipped => ("skipped", None),
        };
        match &detail {
            Some(d) => {
                let _ = writeln!(out, "{step}: {state}: {d}");
            }
            None => {
                let _ = writeln!(out, "{step}: {state}");
            }
        }
        steps.push(json!({ "step": step.number(), "name": step.name(), "status": state, "detail": detail }));
    }
    let accepted = report.accepted();
    if let Some(c) = &report.completeness {
        let _ = writeln!(out, "completeness {}", frac(c));
    }
    if let Some(s) = &report.soundness {
        let _ = writeln!(out, "soundness {}", frac(s));
    }
    let _ = writeln!(out, "{}", if accepted { "accepted" } else { "rejected" });
    let json = json!({
        "mode": mode.to_string(),
        "accepted": accepted,
        "steps": steps,
        "completeness": opt_frac(&report.completeness),
        "soundness": opt_frac(&report.soundness),
    });
    Ok(Outcome { text: out, json, ok: accepted })
}

pub fn curve(k: u8, step: &Rational, restrict: Option<&Path>, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let r = restriction(k, restrict, true)?;
    let t = Instant::now();
    let points = sound::curve(k, step, r.as_ref())?;
    log::info!("{} curve points in {:?}", points.len(), t.elapsed());
    let csv = curve_csv(&points);
    let rows: Vec<Value> = points
        .iter()
        .map(|p| json!({ "c": frac(&p.c), "s": frac(&p.s), "s_roundup4": decimal_round_up(&p.s, 4), "extended": p.extended }))
        .collect();
    let text = match out {
        Some(p) => {
            write_atomic(p, &csv)?;
            format!("wrote {} points to {}\n", points.len(), p.display())
        }
        None => csv,
    };
    Ok(Outcome::new(text, json!({ "k": k, "points": rows })))
}

pub struct LiftArgs<'a> {
    pub gadget: &'a Path,
    pub to_k: u8,
    pub witness: Option<&'a Path>,
    pub mode: Mode,
    pub measure_leak: bool,
    pub samples: usize,
    pub seed: u64,
    pub evaluate: bool,
    pub out: Option<&'a Path>,
}

pub fn lift(a: LiftArgs<'_>) -> anyhow::Result<Outcome> {
    let g = gadget_file(a.gadget)?;
    let mut text = format!("lift {} -> {}\n", g.k(), a.to_k);
    let mut json = json!({ "k": g.k(), "to_k": a.to_k });
    let lifted = if a.out.is_some() || a.evaluate || a.to_k <= had2lin::affine::MAX_TABLE_ARITY {
        Some(g.lift(a.to_k)?)
    } else {
        None
    };
    if let Some(l) = &lifted {
        let c = l.completeness()?;
        let _ = writeln!(text, "completeness {}\norbits {}", frac(&c), l.weights().len());
        json["completeness"] = json!(frac(&c));
        json["orbits"] = json!(l.weights().len());
        if let Some(p) = a.out {
            write_atomic(p, &l.to_text())?;
        }
        if a.evaluate {
            let rs = sound::relaxed_soundness(l)?.soundness;
            let _ = writeln!(text, "rs {}", frac(&rs));
            json["rs"] = json!(frac(&rs));
        }
    }
    if a.measure_leak {
        let w = match a.witness {
            Some(p) => witness_file(p)?,
            None => sound::evaluate(&g, a.mode)?.witness,
        };
        let t = Instant::now();
        let report = measure_leakage(&g, &w, a.to_k, a.samples, a.seed)?;
        log::info!("leakage in {:?}", t.elapsed());
        match &report.leakage {
            Leakage::Exact(l) => {
                let _ = writeln!(text, "leakage {} ({:.6})", frac(l), report.as_f64());
                json["leakage"] = json!({ "exact": frac(l), "value": report.as_f64() });
                let value = lift_flow(&g, &w, a.to_k)?.expected_value()?;
                let _ = writeln!(text, "lifted value {}", frac(&value));
                json["lifted_value"] = json!(frac(&value));
            }
            Leakage::Estimate { mean, std_dev, samples } => {
                let _ = writeln!(text, "leakage estimate {mean:.6} ± {std_dev:.6} from {samples} sampled placements");
                json["leakage"] = json!({ "estimate": mean, "std_dev": std_dev, "samples": samples });
            }
        }
        let _ = writeln!(text, "bound {:.6}\nwithin bound {}", report.bound(), report.within_bound());
        json["bound"] = json!(report.bound());
        json["within_bound"] = json!(report.within_bound());
    }
    Ok(Outcome::new(text, json))
}

pub fn true_soundness(gadget: &Path) -> anyhow::Result<Outcome> {
    let g = gadget_file(gadget)?;
    let s = gadget::true_soundness(&g)?;
    let c = g.completeness()?;
    Ok(Outcome::new(
        format!("completeness {}\nsoundness {}\n", frac(&c), frac(&s)),
        json!({ "completeness": frac(&c), "soundness": frac(&s) }),
    ))
}

pub fn export_lp(k: u8, mode: Mode, restrict: Option<&Path>, c: &Rational, out: &Path) -> anyhow::Result<Outcome> {
    let r = restriction(k, restrict, *c < top_completeness(k))?;
    let lp = build_construction_lp(k, c, mode, r.as_ref().map(|r| r.keys()))?;
    write_atomic(out, &lp_text(&lp))?;
    let size = lp.size();
    Ok(Outcome::new(
        format!("constraints {}\nvariables {}\nnonzeros {}\n", size.rows, size.variables, size.nonzeros),
        json!({ "constraints": size.rows, "variables": size.variables, "nonzeros": size.nonzeros }),
    ))
}
