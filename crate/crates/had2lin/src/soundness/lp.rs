//! The joint gadget-and-flow linear program on the compressed network.

use num_traits::{One, Zero};

use super::construct::orbit_list;
use super::network::{Network, NodeKind};
use super::{Mode, SoundnessError};
use crate::affine::EdgeKey;
use crate::boolfn::{points, BoolFn};
use crate::simplex::{LinearProgram, Relation, Sense};
use crate::Rational;

/// Maximise the total flow out of the sources subject to capacity rows per
/// node-orbit pair, conservation at every interior node, unit mass and the
/// completeness target. Variables: one weight per edge orbit and one flow
/// per direction of each node-orbit pair.
pub fn build_construction_lp(
    k: u8,
    c: &Rational,
    mode: Mode,
    restriction: Option<&[EdgeKey]>,
) -> Result<LinearProgram<Rational>, SoundnessError> {
    let half = Rational::new(1.into(), 2.into());
    let top = Rational::one() - Rational::new(1.into(), points(k).into());
    if *c < half || *c > top {
        return Err(SoundnessError::Infeasible(c.clone()));
    }
    let keys = orbit_list(k, Some(c), restriction)?;
    let net = Network::new(k, mode, &keys)?;
    Ok(joint_lp(&net, c))
}

pub(crate) fn joint_lp(net: &Network, c: &Rational) -> LinearProgram<Rational> {
    let k = net.arity();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x: Vec<usize> = net
        .keys()
        .iter()
        .map(|&(a, b)| {
            lp.add_variable(format!("x_{}_{}", BoolFn::from_raw(k, a), BoolFn::from_raw(k, b)))
                .expect("edge orbits are distinct")
        })
        .collect();
    let mut fwd = Vec::with_capacity(net.pairs().len());
    let mut back = Vec::with_capacity(net.pairs().len());
    for (i, p) in net.pairs().iter().enumerate() {
        fwd.push(lp.add_variable(format!("w{i}_{}_{}", p.x, p.y)).expect("fresh"));
        back.push(lp.add_variable(format!("w{i}_{}_{}", p.y, p.x)).expect("fresh"));
    }
    for (i, p) in net.pairs().iter().enumerate() {
        let mut row = vec![(fwd[i], Rational::one()), (back[i], Rational::one())];
        row.extend(p.coef.iter().map(|(e, a)| (x[*e], -a.clone())));
        lp.add_row(format!("cap{i}"), row, Relation::Le, Rational::zero()).expect("valid");
    }
    let mut balance: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); net.nodes().len()];
    for (i, p) in net.pairs().iter().enumerate() {
        balance[p.x].push((fwd[i], -Rational::one()));
        balance[p.x].push((back[i], Rational::one()));
        balance[p.y].push((fwd[i], Rational::one()));
        balance[p.y].push((back[i], -Rational::one()));
    }
    let mut objective = Vec::new();
    for (v, row) in balance.into_iter().enumerate() {
        match net.nodes()[v].kind {
            NodeKind::Interior => {
                if !row.is_empty() {
                    lp.add_row(format!("bal{v}"), row, Relation::Eq, Rational::zero()).expect("valid");
                }
            }
            NodeKind::Source => objective.extend(row.into_iter().map(|(j, a)| (j, -a))),
            NodeKind::Sink => {}
        }
    }
    let n = Rational::from_integer(points(k).into());
    let sizes: Vec<Rational> = net.orbit_sizes().iter().map(|&s| Rational::from_integer(s.into())).collect();
    let mass = x.iter().zip(&sizes).map(|(&j, s)| (j, s.clone())).collect();
    let length = x
        .iter()
        .zip(&sizes)
        .zip(net.lengths())
        .map(|((&j, s), h)| (j, s * Rational::from_integer(h.into()) / &n))
        .collect();
    lp.add_row("mass", mass, Relation::Eq, Rational::one()).expect("valid");
    lp.add_row("length", length, Relation::Eq, Rational::one() - c).expect("valid");
    lp.set_objective(objective).expect("valid");
    lp
}
