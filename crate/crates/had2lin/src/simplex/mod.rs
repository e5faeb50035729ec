//! Linear programs over an ordered field with nonnegative variables.

mod dual;
mod io;
mod solver;

pub use dual::solve_via_dual;
pub use io::{export_lp, format_solution, import_solution, parse_decimal};
pub use solver::{solve, solve_with, PivotRule, SolveOptions, WarmLp};

use std::collections::HashMap;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("duplicate variable {0:?}")]
    DuplicateVariable(String),
    #[error("variable index {0} out of range")]
    VariableIndex(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("assignment violates row {row:?}")]
    RowViolated { row: String },
    #[error("variable {0:?} is negative")]
    NegativeValue(String),
    #[error("variable {0:?} missing from the solution")]
    MissingValue(String),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row<T> {
    pub name: String,
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

impl<T: Scalar> Row<T> {
    pub fn lhs(&self, x: &[T]) -> T {
        self.coeffs.iter().fold(T::zero(), |s, (j, a)| s + a.clone() * x[*j].clone())
    }

    pub fn is_satisfied(&self, x: &[T]) -> bool {
        let l = self.lhs(x);
        match self.relation {
            Relation::Le => l <= self.rhs,
            Relation::Eq => l == self.rhs,
            Relation::Ge => l >= self.rhs,
        }
    }
}

/// Row, column and nonzero counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpSize {
    pub rows: usize,
    pub variables: usize,
    pub nonzeros: usize,
}

/// All variables are implicitly nonnegative.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    names: Vec<String>,
    index: HashMap<String, usize>,
    rows: Vec<Row<T>>,
    objective: Vec<(usize, T)>,
    sense: Sense,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(sense: Sense) -> Self {
        LinearProgram { names: Vec::new(), index: HashMap::new(), rows: Vec::new(), objective: Vec::new(), sense }
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> Result<usize, LpError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(LpError::DuplicateVariable(name));
        }
        self.index.insert(name.clone(), self.names.len());
        self.names.push(name);
        Ok(self.names.len() - 1)
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn variable_name(&self, j: usize) -> &str {
        &self.names[j]
    }

    pub fn variable_names(&self) -> &[String] {
        &self.names
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    /// Adds a row; coefficients on the same variable are merged and zeros dropped.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, T)>,
        relation: Relation,
        rhs: T,
    ) -> Result<usize, LpError> {
        let coeffs = self.merge(coeffs)?;
        self.rows.push(Row { name: name.into(), coeffs, relation, rhs });
        Ok(self.rows.len() - 1)
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, T)>) -> Result<(), LpError> {
        self.objective = self.merge(coeffs)?;
        Ok(())
    }

    fn merge(&self, coeffs: Vec<(usize, T)>) -> Result<Vec<(usize, T)>, LpError> {
        let mut acc: std::collections::BTreeMap<usize, T> = std::collections::BTreeMap::new();
        for (j, a) in coeffs {
            if j >= self.names.len() {
                return Err(LpError::VariableIndex(j));
            }
            let e = acc.entry(j).or_insert_with(T::zero);
            *e = e.clone() + a;
        }
        Ok(acc.into_iter().filter(|(_, a)| !a.is_zero()).collect())
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn objective(&self) -> &[(usize, T)] {
        &self.objective
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn size(&self) -> LpSize {
        LpSize {
            rows: self.rows.len(),
            variables: self.names.len(),
            nonzeros: self.rows.iter().map(|r| r.coeffs.len()).sum(),
        }
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective.iter().fold(T::zero(), |s, (j, c)| s + c.clone() * x[*j].clone())
    }

    /// Exact check of nonnegativity and every row.
    pub fn check_feasible(&self, x: &[T]) -> Result<(), LpError> {
        if x.len() != self.names.len() {
            return Err(LpError::MissingValue(self.names.get(x.len()).cloned().unwrap_or_default()));
        }
        for (j, v) in x.iter().enumerate() {
            if *v < T::zero() {
                return Err(LpError::NegativeValue(self.names[j].clone()));
            }
        }
        for r in &self.rows {
            if !r.is_satisfied(x) {
                return Err(LpError::RowViolated { row: r.name.clone() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub value: T,
    pub values: Vec<T>,
    /// Row multipliers with Σ rhsᵢ·yᵢ = value; their signs make `y` feasible
    /// for the dual of the stated sense.
    pub duals: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(Solution<T>),
    Infeasible,
    Unbounded,
    /// The pivot budget ran out before optimality was proven.
    GaveUp { pivots: usize },
}

impl<T> LpOutcome<T> {
    pub fn optimal(self) -> Option<Solution<T>> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}
