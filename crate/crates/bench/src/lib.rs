//! Workloads shared by the criterion benches.

use mgsat::sat::{ClauseSink, Cnf, Lit, Var};

/// Pigeonhole instance: `n + 1` pigeons in `n` holes, always UNSAT.
pub fn pigeonhole(n: usize) -> Cnf {
    let mut cnf = Cnf::new();
    let p: Vec<Vec<Var>> = (0..=n).map(|_| (0..n).map(|_| cnf.new_var()).collect()).collect();
    for row in &p {
        cnf.add_clause(&row.iter().map(|v| v.pos()).collect::<Vec<Lit>>());
    }
    for (a, pa) in p.iter().enumerate() {
        for pb in &p[a + 1..] {
            for (x, y) in pa.iter().zip(pb) {
                cnf.add_clause(&[x.neg(), y.neg()]);
            }
        }
    }
    cnf
}

#[cfg(test)]
mod tests {
    use super::*;
    use mgsat::sat::{SolveResult, Solver};

    #[test]
    fn pigeonhole_is_unsat() {
        let mut s = Solver::new();
        s.add_cnf(&pigeonhole(4));
        assert_eq!(s.solve(&[]), SolveResult::Unsat);
    }
}
