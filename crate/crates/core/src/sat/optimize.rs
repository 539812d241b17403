//! Lexicographic optimization of cardinality objectives by repeated
//! bound tightening.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Cnf, Lit, SolveResult, Solver};
use crate::ir::Counter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

/// Number of true literals, minimized or maximized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub name: String,
    pub lits: Vec<Lit>,
    pub sense: Sense,
}

impl Objective {
    pub fn new(name: &str, lits: Vec<Lit>, sense: Sense) -> Self {
        Objective {
            name: name.into(),
            lits,
            sense,
        }
    }

    pub fn value(&self, model: &[bool]) -> usize {
        self.lits.iter().filter(|l| l.eval(model)).count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OptimizeError {
    #[error("the constraints are unsatisfiable")]
    Unsat,
    #[error("solver budget exhausted before any model was found")]
    Unknown,
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub model: Vec<bool>,
    /// Final value of each objective.
    pub values: Vec<usize>,
    /// False when a budget cut the search short.
    pub optimal: bool,
    /// Assumptions pinning each optimized objective to its value.
    pub bounds: Vec<Lit>,
    /// (objective index, value) for every incumbent, in discovery order.
    pub trace: Vec<(usize, usize)>,
}

/// Drives a solver through a list of objectives in priority order.
pub struct Optimizer<'a> {
    solver: &'a mut Solver,
    assumptions: Vec<Lit>,
    verify: Option<&'a Cnf>,
}

impl<'a> Optimizer<'a> {
    pub fn new(solver: &'a mut Solver) -> Self {
        Optimizer {
            solver,
            assumptions: Vec::new(),
            verify: None,
        }
    }

    /// Assumptions held during every call.
    pub fn assuming(mut self, lits: &[Lit]) -> Self {
        self.assumptions = lits.to_vec();
        self
    }

    /// Every model is checked against `cnf` before it is accepted.
    pub fn verifying(mut self, cnf: &'a Cnf) -> Self {
        self.verify = Some(cnf);
        self
    }

    fn call(&mut self, extra: &[Lit]) -> SolveResult {
        let mut a = self.assumptions.clone();
        a.extend_from_slice(extra);
        let r = self.solver.solve(&a);
        if r == SolveResult::Sat {
            if let Some(cnf) = self.verify {
                assert!(cnf.is_satisfied_by(self.solver.model()), "solver returned a non-model");
            }
        }
        r
    }

    pub fn run(mut self, objectives: &[Objective]) -> Result<OptimizeOutcome, OptimizeError> {
        match self.call(&[]) {
            SolveResult::Sat => {}
            SolveResult::Unsat => return Err(OptimizeError::Unsat),
            SolveResult::Unknown => return Err(OptimizeError::Unknown),
        }
        let mut model = self.solver.model().to_vec();
        let mut bounds = Vec::new();
        let mut trace = Vec::new();
        let mut optimal = true;
        for (k, obj) in objectives.iter().enumerate() {
            let mut v = obj.value(&model);
            trace.push((k, v));
            let n = obj.lits.len();
            let cap = match obj.sense {
                Sense::Min => v + 1,
                Sense::Max => n,
            };
            let ctr = Counter::new(&mut *self.solver, &obj.lits, cap);
            if optimal {
                loop {
                    let target = match obj.sense {
                        Sense::Min if v > 0 => ctr.at_most(v - 1),
                        Sense::Max if v < n => ctr.at_least(v + 1),
                        _ => break,
                    }
                    .expect("nontrivial bound");
                    let mut extra = bounds.clone();
                    extra.push(target);
                    match self.call(&extra) {
                        SolveResult::Sat => {
                            model = self.solver.model().to_vec();
                            let w = obj.value(&model);
                            debug_assert!(match obj.sense {
                                Sense::Min => w < v,
                                Sense::Max => w > v,
                            });
                            log::debug!("objective {} improved to {w}", obj.name);
                            v = w;
                            trace.push((k, v));
                        }
                        SolveResult::Unsat => break,
                        SolveResult::Unknown => {
                            optimal = false;
                            break;
                        }
                    }
                }
            }
            let pin = match obj.sense {
                Sense::Min => ctr.at_most(v),
                Sense::Max => ctr.at_least(v),
            };
            bounds.extend(pin);
        }
        let values = objectives.iter().map(|o| o.value(&model)).collect();
        Ok(OptimizeOutcome {
            model,
            values,
            optimal,
            bounds,
            trace,
        })
    }
}

/// Lexicographic optimum of `objectives` over the models of `cnf`.
pub fn optimize(cnf: &Cnf, objectives: &[Objective]) -> Result<OptimizeOutcome, OptimizeError> {
    let mut s = Solver::new();
    s.add_cnf(cnf);
    for o in objectives {
        for l in &o.lits {
            s.reserve_vars(l.var().index() + 1);
        }
    }
    Optimizer::new(&mut s).verifying(cnf).run(objectives)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{ClauseSink, Var};

    #[test]
    fn minimize_with_disjunction() {
        let mut cnf = Cnf::new();
        let v: Vec<Lit> = (0..3).map(|_| cnf.new_var().pos()).collect();
        cnf.add_clause(&[v[0], v[1]]);
        let out = optimize(&cnf, &[Objective::new("true", v.clone(), Sense::Min)]).unwrap();
        assert_eq!(out.values, [1]);
        assert!(out.optimal);
    }

    #[test]
    fn unsat_is_an_error() {
        let mut cnf = Cnf::new();
        let x = cnf.new_var();
        cnf.add_clause(&[x.pos()]);
        cnf.add_clause(&[x.neg()]);
        assert_eq!(
            optimize(&cnf, &[Objective::new("x", vec![x.pos()], Sense::Min)]).unwrap_err(),
            OptimizeError::Unsat
        );
    }

    #[test]
    fn trace_is_monotone() {
        let mut cnf = Cnf::new();
        let v: Vec<Var> = (0..8).map(|_| cnf.new_var()).collect();
        for w in v.windows(2) {
            cnf.add_clause(&[w[0].pos(), w[1].pos()]);
        }
        let lits: Vec<Lit> = v.iter().map(|x| x.pos()).collect();
        let out = optimize(&cnf, &[Objective::new("n", lits, Sense::Min)]).unwrap();
        assert_eq!(out.values, [4]);
        assert!(out.trace.windows(2).all(|w| w[1].1 < w[0].1));
    }
}
