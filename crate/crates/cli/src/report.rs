//! JSON written by `infer`. Field meanings are listed in the README.

use mgsat::inference::{CostValues, InferenceConfig, RunResult};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub sentences: usize,
    pub config: InferenceConfig,
    pub optimal: bool,
    pub problem: ProblemSize,
    pub solver: SolverWork,
    pub solutions: Vec<SolutionEntry>,
}

#[derive(Debug, Serialize)]
pub struct ProblemSize {
    pub variables: usize,
    pub clauses: usize,
}

#[derive(Debug, Serialize)]
pub struct SolverWork {
    pub calls: u64,
    pub conflicts: u64,
    pub decisions: u64,
}

#[derive(Debug, Serialize)]
pub struct SolutionEntry {
    pub lexicon: String,
    pub values: CostValues,
    pub derivations: Vec<String>,
}

/// Wall-clock figures, kept apart so that `report.json` is reproducible.
#[derive(Debug, Serialize)]
pub struct Timing {
    pub encode_ms: u128,
    pub solve_ms: u128,
}

impl Report {
    pub fn new(res: &RunResult, config: &InferenceConfig, sentences: usize, solutions: Vec<SolutionEntry>) -> Self {
        let s = &res.stats;
        Report {
            schema: SCHEMA_VERSION,
            sentences,
            config: config.clone(),
            optimal: res.optimal,
            problem: ProblemSize {
                variables: s.variables,
                clauses: s.clauses,
            },
            solver: SolverWork {
                calls: s.solver_calls,
                conflicts: s.conflicts,
                decisions: s.decisions,
            },
            solutions,
        }
    }
}
