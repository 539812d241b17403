//! Propositional layer: literals, CNF, a CDCL solver, projected model
//! enumeration and lexicographic optimization over cardinality bounds.

mod dimacs;
mod optimize;
mod solver;

use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub use optimize::{optimize, Objective, OptimizeError, OptimizeOutcome, Optimizer, Sense};
pub use solver::{SolveResult, Solver, SolverConfig, Stats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A variable with a polarity, packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lit(u32);

impl Lit {
    pub fn new(v: Var, positive: bool) -> Lit {
        Lit(v.0 << 1 | u32::from(!positive))
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_dimacs(d: i64) -> Lit {
        assert!(d != 0, "0 is not a DIMACS literal");
        Lit::new(Var(d.unsigned_abs() as u32 - 1), d > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0) + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    /// Truth value under a total assignment indexed by variable.
    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var().index()] == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Anything that can allocate variables and accept clauses.
pub trait ClauseSink {
    fn new_var(&mut self) -> Var;
    fn add_clause(&mut self, lits: &[Lit]);
}

/// A formula in conjunctive normal form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new() -> Self {
        Cnf::default()
    }

    pub fn ensure_vars(&mut self, n: usize) {
        self.num_vars = self.num_vars.max(n);
    }

    /// Index of the first clause falsified by `model`, if any.
    pub fn first_falsified(&self, model: &[bool]) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| !c.iter().any(|l| l.eval(model)))
    }

    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        model.len() >= self.num_vars && self.first_falsified(model).is_none()
    }
}

impl ClauseSink for Cnf {
    fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars as u32 - 1)
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            self.ensure_vars(l.var().index() + 1);
        }
        self.clauses.push(lits.to_vec());
    }
}

/// Outcome of a one-shot solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Vec<bool>),
    /// Subset of the assumptions that is inconsistent with the formula.
    Unsat(Vec<Lit>),
    Unknown,
}

/// Solves `cnf` under `assumptions` with a fresh solver. Models are
/// checked clause by clause before being returned.
pub fn solve(cnf: &Cnf, assumptions: &[Lit]) -> Outcome {
    solve_with(cnf, assumptions, SolverConfig::default())
}

pub fn solve_with(cnf: &Cnf, assumptions: &[Lit], config: SolverConfig) -> Outcome {
    let mut s = Solver::with_config(config);
    s.add_cnf(cnf);
    for a in assumptions {
        s.reserve_vars(a.var().index() + 1);
    }
    match s.solve(assumptions) {
        SolveResult::Sat => {
            let model = s.model().to_vec();
            assert!(cnf.is_satisfied_by(&model), "solver returned a non-model");
            Outcome::Sat(model)
        }
        SolveResult::Unsat => Outcome::Unsat(s.core().to_vec()),
        SolveResult::Unknown => Outcome::Unknown,
    }
}

/// Up to `limit` models of `cnf`, pairwise distinct on `projection`, each
/// restricted to the projection variables in the given order.
pub fn enumerate_models(cnf: &Cnf, projection: &[Var], limit: usize) -> Vec<Vec<bool>> {
    let mut s = Solver::new();
    s.add_cnf(cnf);
    for v in projection {
        s.reserve_vars(v.index() + 1);
    }
    let mut out = Vec::new();
    while out.len() < limit && s.solve(&[]) == SolveResult::Sat {
        assert!(cnf.is_satisfied_by(s.model()), "solver returned a non-model");
        let proj: Vec<bool> = projection.iter().map(|v| s.model()[v.index()]).collect();
        let block: Vec<Lit> = projection
            .iter()
            .zip(&proj)
            .map(|(&v, &b)| Lit::new(v, !b))
            .collect();
        out.push(proj);
        if block.is_empty() {
            break;
        }
        s.add_clause(&block);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_packing() {
        let v = Var(7);
        assert_eq!(v.pos().var(), v);
        assert!(v.pos().is_positive());
        assert!(!v.neg().is_positive());
        assert_eq!(!v.pos(), v.neg());
        assert_eq!(Lit::from_dimacs(-8), v.neg());
        assert_eq!(v.pos().to_dimacs(), 8);
    }

    #[test]
    fn trivial_instances() {
        let (x, y) = (Var(0), Var(1));
        let mut cnf = Cnf::new();
        cnf.add_clause(&[x.pos(), y.pos()]);
        cnf.add_clause(&[x.neg()]);
        match solve(&cnf, &[]) {
            Outcome::Sat(m) => assert!(!m[0] && m[1]),
            other => panic!("{other:?}"),
        }
        let mut cnf = Cnf::new();
        cnf.add_clause(&[x.pos()]);
        cnf.add_clause(&[x.neg()]);
        assert_eq!(solve(&cnf, &[]), Outcome::Unsat(vec![]));
    }

    #[test]
    fn enumeration_examples() {
        let (x, y) = (Var(0), Var(1));
        let mut cnf = Cnf::new();
        cnf.add_clause(&[x.pos(), y.pos()]);
        assert_eq!(enumerate_models(&cnf, &[x, y], 10).len(), 3);
        cnf.add_clause(&[x.neg()]);
        cnf.add_clause(&[y.neg()]);
        assert!(enumerate_models(&cnf, &[x, y], 10).is_empty());
    }
}
