use super::{solve, LinearProgram, LpOutcome, Relation, Sense, Solution};
use crate::scalar::Scalar;

/// Solves `lp` by running the simplex method on its dual and reading the
/// primal point off the dual multipliers. The tableau then has one row per
/// primal variable, which pays off when rows greatly outnumber columns.
///
/// The recovered point is checked exactly; if the check fails, or the dual
/// is infeasible, the primal is solved directly instead.
pub fn solve_via_dual<T: Scalar>(lp: &LinearProgram<T>) -> LpOutcome<T> {
    let s = match lp.sense() {
        Sense::Maximize => T::one(),
        Sense::Minimize => -T::one(),
    };
    let n = lp.num_variables();
    let mut dual = LinearProgram::new(Sense::Minimize);
    // Each primal row contributes one dual variable per sign it may take.
    let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    let mut obj = Vec::new();
    let mut slots: Vec<Vec<(usize, T)>> = Vec::with_capacity(lp.rows().len());
    for (i, r) in lp.rows().iter().enumerate() {
        let signs: Vec<T> = match r.relation {
            Relation::Le => vec![T::one()],
            Relation::Ge => vec![-T::one()],
            Relation::Eq => vec![T::one(), -T::one()],
        };
        let mut mine = Vec::new();
        for (t, sigma) in signs.into_iter().enumerate() {
            let y = dual.add_variable(format!("y{i}_{t}")).expect("fresh name");
            for (j, a) in &r.coeffs {
                cols[*j].push((y, sigma.clone() * a.clone()));
            }
            obj.push((y, sigma.clone() * r.rhs.clone()));
            mine.push((y, sigma));
        }
        slots.push(mine);
    }
    let mut cost = vec![T::zero(); n];
    for (j, c) in lp.objective() {
        cost[*j] = s.clone() * c.clone();
    }
    for (j, col) in cols.into_iter().enumerate() {
        dual.add_row(format!("x{j}"), col, Relation::Ge, cost[j].clone()).expect("valid indices");
    }
    dual.set_objective(obj).expect("valid indices");
    match solve(&dual) {
        LpOutcome::Optimal(d) => {
            let values = d.duals;
            let value = lp.objective_value(&values);
            if lp.check_feasible(&values).is_err() || value != s.clone() * d.value {
                return solve(lp);
            }
            let duals = slots
                .iter()
                .map(|mine| {
                    mine.iter().fold(T::zero(), |acc, (y, sigma)| {
                        acc + s.clone() * sigma.clone() * d.values[*y].clone()
                    })
                })
                .collect();
            LpOutcome::Optimal(Solution { value, values, duals })
        }
        LpOutcome::Unbounded => LpOutcome::Infeasible,
        LpOutcome::Infeasible => solve(lp),
        LpOutcome::GaveUp { pivots } => LpOutcome::GaveUp { pivots },
    }
}
