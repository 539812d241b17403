//! SMT-LIB2 and DIMACS renderings of a grounded problem.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{GroupRange, Problem, VarOrigin};
use crate::sat::{write_dimacs, Lit, Objective, Sense, Var};

fn symbol(raw: &str) -> String {
    let s: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.starts_with(|c: char| c.is_ascii_digit()) || s.is_empty() {
        format!("_{s}")
    } else {
        s
    }
}

fn ctor(p: &Problem, sort: usize, elem: usize) -> String {
    format!("{}__{}", symbol(&p.sorts[sort].name), symbol(&p.sorts[sort].elements[elem]))
}

fn atom(p: &Problem, v: Var) -> String {
    match &p.origins[v.index()] {
        VarOrigin::Cell { table, args, value } => {
            let t = &p.tables[table.0];
            let app = if args.is_empty() {
                format!("t_{}", symbol(&t.name))
            } else {
                let a: Vec<String> = t
                    .domain
                    .iter()
                    .zip(args)
                    .map(|(s, &i)| ctor(p, s.0, i))
                    .collect();
                format!("(t_{} {})", symbol(&t.name), a.join(" "))
            };
            format!("(= {app} {})", ctor(p, t.codomain.0, *value))
        }
        _ => format!("b{}", v.0),
    }
}

fn lit(p: &Problem, l: Lit) -> String {
    let a = atom(p, l.var());
    if l.is_positive() {
        a
    } else {
        format!("(not {a})")
    }
}

/// Sorts become enumerated datatypes, tables uninterpreted functions and
/// every other variable a boolean constant. Each clause is one assertion.
pub fn export_smtlib(p: &Problem) -> String {
    let mut out = String::new();
    out.push_str("(set-logic ALL)\n");
    for (i, s) in p.sorts.iter().enumerate() {
        let ctors: Vec<String> = (0..s.size()).map(|e| format!("({})", ctor(p, i, e))).collect();
        let _ = writeln!(out, "(declare-datatypes ((S_{} 0)) (({})))", symbol(&s.name), ctors.join(" "));
    }
    for t in &p.tables {
        let dom: Vec<String> = t.domain.iter().map(|s| format!("S_{}", symbol(&p.sorts[s.0].name))).collect();
        let _ = writeln!(
            out,
            "(declare-fun t_{} ({}) S_{})",
            symbol(&t.name),
            dom.join(" "),
            symbol(&p.sorts[t.codomain.0].name)
        );
    }
    for (i, o) in p.origins.iter().enumerate() {
        match o {
            VarOrigin::Cell { .. } => {}
            VarOrigin::Named(n) => {
                let _ = writeln!(out, "(declare-const b{i} Bool) ; {n}");
            }
            VarOrigin::Aux => {
                let _ = writeln!(out, "(declare-const b{i} Bool)");
            }
        }
    }
    for c in &p.cnf.clauses {
        match c.as_slice() {
            [] => out.push_str("(assert false)\n"),
            [l] => {
                let _ = writeln!(out, "(assert {})", lit(p, *l));
            }
            ls => {
                let parts: Vec<String> = ls.iter().map(|&l| lit(p, l)).collect();
                let _ = writeln!(out, "(assert (or {}))", parts.join(" "));
            }
        }
    }
    out.push_str("(check-sat)\n");
    out
}

/// [`export_smtlib`] followed by lexicographic `minimize`/`maximize`
/// commands, one per objective in priority order.
pub fn export_smtlib_optimize(p: &Problem, objectives: &[Objective]) -> String {
    let mut out = export_smtlib(p);
    out.truncate(out.len() - "(check-sat)\n".len());
    out.push_str("(set-option :opt.priority lex)\n");
    for o in objectives {
        let terms: Vec<String> = o.lits.iter().map(|&l| format!("(ite {} 1 0)", lit(p, l))).collect();
        let sum = match terms.len() {
            0 => "0".to_string(),
            1 => terms[0].clone(),
            _ => format!("(+ {})", terms.join(" ")),
        };
        let cmd = match o.sense {
            Sense::Min => "minimize",
            Sense::Max => "maximize",
        };
        let _ = writeln!(out, "({cmd} {sum}) ; {}", o.name);
    }
    out.push_str("(check-sat)\n(get-objectives)\n");
    out
}

/// Sidecar description of one DIMACS variable (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VarMapEntry {
    Cell {
        var: usize,
        table: String,
        args: Vec<String>,
        value: String,
    },
    Bool {
        var: usize,
        name: String,
    },
    Aux {
        var: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub variables: Vec<VarMapEntry>,
    pub groups: Vec<GroupRange>,
}

/// DIMACS text plus a JSON map from variables to table cells and from
/// groups to clause ranges.
pub fn export_dimacs(p: &Problem) -> (String, String) {
    let variables = p
        .origins
        .iter()
        .enumerate()
        .map(|(i, o)| match o {
            VarOrigin::Cell { table, args, value } => {
                let t = &p.tables[table.0];
                VarMapEntry::Cell {
                    var: i + 1,
                    table: t.name.clone(),
                    args: t
                        .domain
                        .iter()
                        .zip(args)
                        .map(|(s, &a)| p.sorts[s.0].elements[a].clone())
                        .collect(),
                    value: p.sorts[t.codomain.0].elements[*value].clone(),
                }
            }
            VarOrigin::Named(n) => VarMapEntry::Bool {
                var: i + 1,
                name: n.clone(),
            },
            VarOrigin::Aux => VarMapEntry::Aux { var: i + 1 },
        })
        .collect();
    let sidecar = Sidecar {
        variables,
        groups: p.manifest(),
    };
    (
        write_dimacs(&p.cnf),
        serde_json::to_string_pretty(&sidecar).expect("serializable"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Formula, Term};

    #[test]
    fn smtlib_shape() {
        let mut p = Problem::new();
        let s = p.add_sort("S", &["a", "b"]).unwrap();
        let f = p.add_table("f", &[s], s);
        p.assert(&Formula::Eq(Term::App(f, vec![Term::Const(s, 0)]), Term::Const(s, 1)))
            .unwrap();
        let text = export_smtlib(&p);
        assert!(text.contains("(declare-datatypes ((S_S 0)) (((S__a) (S__b))))"));
        assert!(text.contains("(declare-fun t_f (S_S) S_S)"));
        assert!(text.contains("(assert (= (t_f S__a) S__b))"));
        assert!(text.ends_with("(check-sat)\n"));
        assert_eq!(export_smtlib(&Problem::new()), "(set-logic ALL)\n(check-sat)\n");
    }

    #[test]
    fn objectives_are_appended() {
        let mut p = Problem::new();
        let a = p.named_var("a").pos();
        let b = p.named_var("b").pos();
        let text = export_smtlib_optimize(&p, &[Objective::new("n", vec![a, !b], Sense::Max)]);
        assert!(text.contains("(maximize (+ (ite b0 1 0) (ite (not b1) 1 0))) ; n"));
        assert!(text.ends_with("(check-sat)\n(get-objectives)\n"));
    }

    #[test]
    fn sidecar_lists_cells() {
        let mut p = Problem::new();
        let s = p.add_sort("S", &["a", "b"]).unwrap();
        p.add_table("f", &[s], s);
        let (cnf, map) = export_dimacs(&p);
        assert!(cnf.starts_with("p cnf 4 "));
        let side: Sidecar = serde_json::from_str(&map).unwrap();
        assert_eq!(
            side.variables[1],
            VarMapEntry::Cell {
                var: 2,
                table: "f".into(),
                args: vec!["a".into()],
                value: "b".into()
            }
        );
    }
}
