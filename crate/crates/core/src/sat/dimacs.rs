//! DIMACS CNF reading and writing.

use std::fmt::Write;

use thiserror::Error;

use super::{Cnf, Lit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Reads a DIMACS file. Comment lines start with `c`; clauses may span
/// lines and end with `0`.
pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut cnf = Cnf::new();
    let mut declared: Option<(usize, usize)> = None;
    let mut current: Vec<Lit> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |msg: String| DimacsError::Syntax { line: i + 1, msg };
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v.parse().map_err(|_| err(format!("bad variable count {v:?}")))?;
                    let c = c.parse().map_err(|_| err(format!("bad clause count {c:?}")))?;
                    declared = Some((v, c));
                    cnf.ensure_vars(v);
                }
                _ => return Err(err("malformed problem line".into())),
            }
            continue;
        }
        if declared.is_none() {
            return Err(err("clause before problem line".into()));
        }
        for tok in line.split_whitespace() {
            let d: i64 = tok.parse().map_err(|_| err(format!("bad literal {tok:?}")))?;
            if d == 0 {
                cnf.clauses.push(std::mem::take(&mut current));
            } else {
                let l = Lit::from_dimacs(d);
                cnf.ensure_vars(l.var().index() + 1);
                current.push(l);
            }
        }
    }
    if !current.is_empty() {
        cnf.clauses.push(current);
    }
    Ok(cnf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::ClauseSink;

    #[test]
    fn round_trip() {
        let mut cnf = Cnf::new();
        cnf.add_clause(&[Lit::from_dimacs(1), Lit::from_dimacs(-3)]);
        cnf.add_clause(&[Lit::from_dimacs(2)]);
        let text = write_dimacs(&cnf);
        assert_eq!(text, "p cnf 3 2\n1 -3 0\n2 0\n");
        assert_eq!(parse_dimacs(&text).unwrap(), cnf);
        let spread = "c comment\np cnf 3 2\n1\n-3 0 2 0\n";
        assert_eq!(parse_dimacs(spread).unwrap(), cnf);
    }

    #[test]
    fn errors() {
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf x 1\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 a 0\n").is_err());
    }
}
