//! Two-phase primal simplex on a dense tableau, with dual simplex
//! re-optimisation after rows are appended.

use super::{LinearProgram, LpError, LpOutcome, Relation, Sense, Solution};
use crate::scalar::Scalar;

/// Entering-column choice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Most negative reduced cost; falls back to Bland's rule after a run
    /// of degenerate pivots, so termination is still guaranteed.
    #[default]
    Dantzig,
    /// Lowest-index improving column throughout.
    Bland,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub max_pivots: Option<usize>,
    pub rule: PivotRule,
}

const DEGENERATE_STREAK: usize = 50;

pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> LpOutcome<T> {
    solve_with(lp, SolveOptions::default())
}

pub fn solve_with<T: Scalar>(lp: &LinearProgram<T>, opts: SolveOptions) -> LpOutcome<T> {
    let mut w = WarmLp::new(lp.clone(), opts);
    w.solve()
}

enum Step {
    Optimal,
    Unbounded,
    Infeasible,
    GaveUp,
}

#[derive(Clone)]
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    /// Reduced costs of the current objective.
    obj: Vec<T>,
    /// Minus the current objective value.
    obj_rhs: T,
    basis: Vec<usize>,
    artificial: Vec<bool>,
    /// Phase-two cost of each column, in minimisation form.
    cost: Vec<T>,
    /// Column that started as the unit vector of each row.
    ident: Vec<usize>,
    flipped: Vec<bool>,
    pivots: usize,
    limit: Option<usize>,
    rule: PivotRule,
}

impl<T: Scalar> Tableau<T> {
    fn width(&self) -> usize {
        self.obj.len()
    }

    fn push_column(&mut self, cost: T, artificial: bool) -> usize {
        for row in &mut self.rows {
            row.push(T::zero());
        }
        self.obj.push(T::zero());
        self.cost.push(cost);
        self.artificial.push(artificial);
        self.width() - 1
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let p = self.rows[r][q].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / p.clone();
            }
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        let nz: Vec<usize> = (0..self.width()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][q].is_zero() {
                continue;
            }
            let f = self.rows[i][q].clone();
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
            }
            self.rhs[i] = self.rhs[i].clone() - f * pivot_rhs.clone();
        }
        if !self.obj[q].is_zero() {
            let f = self.obj[q].clone();
            for &j in &nz {
                self.obj[j] = self.obj[j].clone() - f.clone() * pivot_row[j].clone();
            }
            self.obj_rhs = self.obj_rhs.clone() - f * pivot_rhs;
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    fn out_of_budget(&self) -> bool {
        self.limit.is_some_and(|l| self.pivots >= l)
    }

    /// Primal simplex over the columns allowed by `eligible`.
    fn optimise(&mut self, eligible: &dyn Fn(&Self, usize) -> bool) -> Step {
        let mut bland = self.rule == PivotRule::Bland;
        let mut streak = 0;
        loop {
            let entering = if bland {
                (0..self.width()).find(|&j| eligible(self, j) && self.obj[j] < T::zero())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.width() {
                    if eligible(self, j) && self.obj[j] < T::zero() && best.is_none_or(|b| self.obj[j] < self.obj[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(q) = entering else {
                return Step::Optimal;
            };
            if self.out_of_budget() {
                return Step::GaveUp;
            }
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if *a > T::zero() {
                    let ratio = self.rhs[i].clone() / a.clone();
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = best else {
                return Step::Unbounded;
            };
            if ratio.is_zero() {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, q);
        }
    }

    /// Dual simplex from a dual-feasible basis until the right-hand side is
    /// nonnegative. Leaving rows are taken by most negative value, entering
    /// columns by the smallest ratio with ties to the lowest index.
    fn dual_optimise(&mut self) -> Step {
        loop {
            let mut leave: Option<usize> = None;
            for i in 0..self.rows.len() {
                if self.rhs[i] < T::zero() && leave.is_none_or(|l| self.rhs[i] < self.rhs[l]) {
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return Step::Optimal;
            };
            if self.out_of_budget() {
                return Step::GaveUp;
            }
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.width() {
                let a = &self.rows[r][j];
                if self.artificial[j] || *a >= T::zero() {
                    continue;
                }
                let ratio = self.obj[j].clone() / (-a.clone());
                if best.as_ref().is_none_or(|(_, b)| ratio < *b) {
                    best = Some((j, ratio));
                }
            }
            let Some((q, _)) = best else {
                return Step::Infeasible;
            };
            self.pivot(r, q);
        }
    }

    /// Installs the phase-two objective.
    fn price(&mut self) {
        let w = self.width();
        let mut obj = self.cost.clone();
        let mut obj_rhs = T::zero();
        for i in 0..self.rows.len() {
            let cb = self.cost[self.basis[i]].clone();
            if !cb.is_zero() {
                for (j, o) in obj.iter_mut().enumerate().take(w) {
                    *o = o.clone() - cb.clone() * self.rows[i][j].clone();
                }
                obj_rhs = obj_rhs - cb * self.rhs[i].clone();
            }
        }
        self.obj = obj;
        self.obj_rhs = obj_rhs;
    }
}

/// A linear program kept together with its last optimal tableau, so that
/// rows can be appended and the optimum recovered by a few dual pivots.
#[derive(Clone)]
pub struct WarmLp<T> {
    lp: LinearProgram<T>,
    opts: SolveOptions,
    tab: Option<Tableau<T>>,
}

impl<T: Scalar> WarmLp<T> {
    pub fn new(lp: LinearProgram<T>, opts: SolveOptions) -> WarmLp<T> {
        WarmLp { lp, opts, tab: None }
    }

    pub fn lp(&self) -> &LinearProgram<T> {
        &self.lp
    }

    /// Appends `coeffs · x ≤ rhs`. The stored basis stays dual feasible.
    pub fn add_le_row(&mut self, name: impl Into<String>, coeffs: Vec<(usize, T)>, rhs: T) -> Result<(), LpError> {
        let i = self.lp.add_row(name, coeffs, Relation::Le, rhs)?;
        if let Some(mut t) = self.tab.take() {
            let s = t.push_column(T::zero(), false);
            let mut row = vec![T::zero(); t.width()];
            let r = &self.lp.rows()[i];
            for (j, a) in &r.coeffs {
                row[*j] = a.clone();
            }
            row[s] = T::one();
            let mut rhs = r.rhs.clone();
            for k in 0..t.rows.len() {
                let f = row[t.basis[k]].clone();
                if !f.is_zero() {
                    for (j, v) in row.iter_mut().enumerate() {
                        let a = &t.rows[k][j];
                        if !a.is_zero() {
                            *v = v.clone() - f.clone() * a.clone();
                        }
                    }
                    rhs = rhs - f * t.rhs[k].clone();
                }
            }
            t.rows.push(row);
            t.rhs.push(rhs);
            t.basis.push(s);
            t.ident.push(s);
            t.flipped.push(false);
            self.tab = Some(t);
        }
        Ok(())
    }

    pub fn solve(&mut self) -> LpOutcome<T> {
        if let Some(mut t) = self.tab.take() {
            t.pivots = 0;
            match t.dual_optimise() {
                Step::Optimal => {}
                Step::Infeasible => return LpOutcome::Infeasible,
                Step::GaveUp => return LpOutcome::GaveUp { pivots: t.pivots },
                Step::Unbounded => unreachable!("dual pivots never report unboundedness"),
            }
            return self.finish(t);
        }
        let mut t = self.initial();
        if t.artificial.iter().any(|&a| a) {
            match t.optimise(&|_, _| true) {
                Step::GaveUp => return LpOutcome::GaveUp { pivots: t.pivots },
                Step::Optimal => {}
                Step::Unbounded | Step::Infeasible => unreachable!("phase one is bounded below by zero"),
            }
            if !t.obj_rhs.is_zero() {
                return LpOutcome::Infeasible;
            }
            for i in 0..t.rows.len() {
                if t.artificial[t.basis[i]] {
                    if let Some(q) = (0..t.width()).find(|&j| !t.artificial[j] && !t.rows[i][j].is_zero()) {
                        t.pivot(i, q);
                    }
                }
            }
        }
        t.price();
        self.finish(t)
    }

    fn initial(&self) -> Tableau<T> {
        let lp = &self.lp;
        let n = lp.num_variables();
        let m = lp.rows().len();
        let mut t = Tableau {
            rows: vec![Vec::new(); m],
            rhs: Vec::with_capacity(m),
            obj: Vec::new(),
            obj_rhs: T::zero(),
            basis: vec![0; m],
            artificial: Vec::new(),
            cost: Vec::new(),
            ident: vec![0; m],
            flipped: vec![false; m],
            pivots: 0,
            limit: self.opts.max_pivots,
            rule: self.opts.rule,
        };
        let mut cost = vec![T::zero(); n];
        for (j, c) in lp.objective() {
            cost[*j] = match lp.sense() {
                Sense::Minimize => c.clone(),
                Sense::Maximize => -c.clone(),
            };
        }
        for c in cost {
            t.push_column(c, false);
        }
        for (i, r) in lp.rows().iter().enumerate() {
            // Normalise to a nonnegative right-hand side.
            let flip = r.rhs < T::zero();
            let rel = match (r.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (rel, _) => rel,
            };
            let sign = if flip { -T::one() } else { T::one() };
            t.flipped[i] = flip;
            let mut row = vec![T::zero(); t.width()];
            for (j, c) in &r.coeffs {
                row[*j] = sign.clone() * c.clone();
            }
            t.rows[i] = row;
            t.rhs.push(sign * r.rhs.clone());
            if rel != Relation::Eq {
                let s = t.push_column(T::zero(), false);
                t.rows[i][s] = if rel == Relation::Le { T::one() } else { -T::one() };
                if rel == Relation::Le {
                    t.basis[i] = s;
                    t.ident[i] = s;
                }
            }
        }
        for i in 0..m {
            let flip = t.flipped[i];
            let rel = lp.rows()[i].relation;
            let needs_art = !matches!((rel, flip), (Relation::Le, false) | (Relation::Ge, true));
            if needs_art {
                let a = t.push_column(T::zero(), true);
                t.rows[i][a] = T::one();
                t.basis[i] = a;
                t.ident[i] = a;
            }
        }
        // Phase-one objective: sum of artificials, priced out.
        let w = t.width();
        let mut obj = vec![T::zero(); w];
        let mut obj_rhs = T::zero();
        for j in 0..w {
            if t.artificial[j] {
                obj[j] = T::one();
            }
        }
        for i in 0..m {
            if t.artificial[t.basis[i]] {
                for (j, o) in obj.iter_mut().enumerate() {
                    *o = o.clone() - t.rows[i][j].clone();
                }
                obj_rhs = obj_rhs - t.rhs[i].clone();
            }
        }
        t.obj = obj;
        t.obj_rhs = obj_rhs;
        t
    }

    fn finish(&mut self, mut t: Tableau<T>) -> LpOutcome<T> {
        match t.optimise(&|t, j| !t.artificial[j]) {
            Step::GaveUp => return LpOutcome::GaveUp { pivots: t.pivots },
            Step::Unbounded => return LpOutcome::Unbounded,
            Step::Infeasible => unreachable!("primal pivots never report infeasibility"),
            Step::Optimal => {}
        }
        log::trace!("simplex: {} rows, {} columns, {} pivots", t.rows.len(), t.width(), t.pivots);
        let lp = &self.lp;
        let n = lp.num_variables();
        let mut values = vec![T::zero(); n];
        for i in 0..t.rows.len() {
            if t.basis[i] < n {
                values[t.basis[i]] = t.rhs[i].clone();
            }
        }
        let value = lp.objective_value(&values);
        let duals = (0..t.rows.len())
            .map(|i| {
                // y_i = c_j − d_j for the column that started as e_i (cost 0).
                let y = -t.obj[t.ident[i]].clone();
                let y = if t.flipped[i] { -y } else { y };
                match lp.sense() {
                    Sense::Minimize => y,
                    Sense::Maximize => -y,
                }
            })
            .collect();
        self.tab = Some(t);
        LpOutcome::Optimal(Solution { value, values, duals })
    }
}
