//! Finite-domain constraint layer: sorts, function tables with one-hot
//! cells, quantifier-free formulas and cardinality constraints, ground to
//! CNF as they are added. Clauses are tagged with named groups so that
//! exports can list each group's clause ranges and rebuilds can leave
//! groups out.

mod card;
mod export;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sat::{ClauseSink, Cnf, Lit, Solver, Var};

pub use card::{at_most_one, exactly_one, Counter};
pub use export::{export_dimacs, export_smtlib, export_smtlib_optimize, Sidecar, VarMapEntry};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IrError {
    #[error("ill-sorted atom {atom}: {detail}")]
    IllSorted { atom: String, detail: String },
    #[error("cardinality bound {bound} outside 0..={len}")]
    BadBound { bound: usize, len: usize },
    #[error("sort {0} is empty")]
    EmptySort(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SortId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TableId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sort {
    pub name: String,
    pub elements: Vec<String>,
}

impl Sort {
    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

/// An uninterpreted function over finite sorts. Each cell (domain tuple)
/// owns one variable per codomain element; exactly one is true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuncTable {
    pub name: String,
    pub domain: Vec<SortId>,
    pub codomain: SortId,
    /// Per cell, its codomain variables.
    cells: Vec<Vec<Var>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Const(SortId, usize),
    App(TableId, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Var(Var),
    Lit(Lit),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CardSense {
    AtMost,
    AtLeast,
    Exactly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cardinality {
    pub lits: Vec<Lit>,
    pub bound: usize,
    pub sense: CardSense,
}

/// What a CNF variable stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarOrigin {
    Cell { table: TableId, args: Vec<usize>, value: usize },
    Named(String),
    Aux,
}

/// One named clause group and the clause index ranges it occupies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRange {
    pub name: String,
    pub ranges: Vec<(usize, usize)>,
    pub clauses: usize,
}

/// Group holding the one-hot clauses of function cells; never disabled.
pub const TABLE_GROUP: &str = "tables";

#[derive(Debug, Clone, Default)]
pub struct Problem {
    sorts: Vec<Sort>,
    tables: Vec<FuncTable>,
    origins: Vec<VarOrigin>,
    cnf: Cnf,
    clause_groups: Vec<u32>,
    group_names: Vec<String>,
    group: u32,
    disabled: BTreeSet<String>,
    true_lit: Option<Lit>,
    flushed: usize,
}

impl ClauseSink for Problem {
    fn new_var(&mut self) -> Var {
        self.origins.push(VarOrigin::Aux);
        self.cnf.new_var()
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        if self.is_disabled(&self.group_names[self.group as usize]) {
            return;
        }
        self.cnf.add_clause(lits);
        self.clause_groups.push(self.group);
    }
}

impl Problem {
    pub fn new() -> Self {
        let mut p = Problem {
            group_names: vec!["base".into(), TABLE_GROUP.into()],
            ..Problem::default()
        };
        p.set_group("base");
        p
    }

    /// A problem that silently drops clauses of the named groups.
    pub fn with_disabled<I: IntoIterator<Item = String>>(groups: I) -> Self {
        let mut p = Problem::new();
        p.disabled = groups.into_iter().filter(|g| g != TABLE_GROUP).collect();
        p
    }

    /// A group `base@tag` is also disabled by disabling `base`.
    pub fn is_disabled(&self, group: &str) -> bool {
        self.disabled.contains(group) || group.split_once('@').is_some_and(|(base, _)| self.disabled.contains(base))
    }

    /// Subsequent clauses belong to `name`.
    pub fn set_group(&mut self, name: &str) {
        self.group = match self.group_names.iter().position(|g| g == name) {
            Some(i) => i as u32,
            None => {
                self.group_names.push(name.to_string());
                self.group_names.len() as u32 - 1
            }
        };
    }

    pub fn group(&self) -> &str {
        &self.group_names[self.group as usize]
    }

    pub fn cnf(&self) -> &Cnf {
        &self.cnf
    }

    pub fn num_vars(&self) -> usize {
        self.cnf.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.cnf.clauses.len()
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn sort(&self, s: SortId) -> &Sort {
        &self.sorts[s.0]
    }

    pub fn tables(&self) -> &[FuncTable] {
        &self.tables
    }

    pub fn table(&self, t: TableId) -> &FuncTable {
        &self.tables[t.0]
    }

    pub fn origin(&self, v: Var) -> &VarOrigin {
        &self.origins[v.index()]
    }

    pub fn add_sort(&mut self, name: &str, elements: &[&str]) -> Result<SortId, IrError> {
        if elements.is_empty() {
            return Err(IrError::EmptySort(name.into()));
        }
        self.sorts.push(Sort {
            name: name.into(),
            elements: elements.iter().map(|e| e.to_string()).collect(),
        });
        Ok(SortId(self.sorts.len() - 1))
    }

    /// A sort whose elements are `prefix0 .. prefix{n-1}`.
    pub fn add_range_sort(&mut self, name: &str, prefix: &str, n: usize) -> Result<SortId, IrError> {
        let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        self.add_sort(name, &refs)
    }

    /// Allocates auxiliary variables until there are at least `n`, so that
    /// variables created elsewhere (say, inside a solver) are not reused.
    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    pub fn named_var(&mut self, name: &str) -> Var {
        let v = self.cnf.new_var();
        self.origins.push(VarOrigin::Named(name.into()));
        v
    }

    pub fn add_table(&mut self, name: &str, domain: &[SortId], codomain: SortId) -> TableId {
        let id = TableId(self.tables.len());
        let n_cells: usize = domain.iter().map(|s| self.sorts[s.0].size()).product();
        let size = self.sorts[codomain.0].size();
        let mut cells = Vec::with_capacity(n_cells);
        let saved = self.group;
        self.set_group(TABLE_GROUP);
        for c in 0..n_cells {
            let args = self.unrank(domain, c);
            let vars: Vec<Var> = (0..size)
                .map(|value| {
                    let v = self.cnf.new_var();
                    self.origins.push(VarOrigin::Cell {
                        table: id,
                        args: args.clone(),
                        value,
                    });
                    v
                })
                .collect();
            let lits: Vec<Lit> = vars.iter().map(|v| v.pos()).collect();
            exactly_one(self, &lits);
            cells.push(vars);
        }
        self.group = saved;
        self.tables.push(FuncTable {
            name: name.into(),
            domain: domain.to_vec(),
            codomain,
            cells,
        });
        id
    }

    fn rank(&self, domain: &[SortId], args: &[usize]) -> usize {
        domain
            .iter()
            .zip(args)
            .fold(0, |acc, (s, &a)| acc * self.sorts[s.0].size() + a)
    }

    fn unrank(&self, domain: &[SortId], mut c: usize) -> Vec<usize> {
        let mut args = vec![0; domain.len()];
        for (i, s) in domain.iter().enumerate().rev() {
            let n = self.sorts[s.0].size();
            args[i] = c % n;
            c /= n;
        }
        args
    }

    /// The literal "`table(args) = value`".
    pub fn cell(&self, table: TableId, args: &[usize], value: usize) -> Lit {
        let t = &self.tables[table.0];
        t.cells[self.rank(&t.domain, args)][value].pos()
    }

    /// Decodes a cell under a model; `None` if the one-hot invariant fails.
    pub fn cell_value(&self, table: TableId, args: &[usize], model: &[bool]) -> Option<usize> {
        let t = &self.tables[table.0];
        let vars = &t.cells[self.rank(&t.domain, args)];
        let on: Vec<usize> = (0..vars.len()).filter(|&i| model[vars[i].index()]).collect();
        match on.as_slice() {
            [v] => Some(*v),
            _ => None,
        }
    }

    pub fn true_lit(&mut self) -> Lit {
        if let Some(l) = self.true_lit {
            return l;
        }
        let v = self.named_var("true");
        let saved = self.group;
        self.set_group(TABLE_GROUP);
        self.add_clause(&[v.pos()]);
        self.group = saved;
        self.true_lit = Some(v.pos());
        v.pos()
    }

    fn term_sort(&self, t: &Term) -> Result<SortId, IrError> {
        match t {
            Term::Const(s, i) => {
                if *i >= self.sorts[s.0].size() {
                    return Err(self.ill(t, "constant index out of range"));
                }
                Ok(*s)
            }
            Term::App(tb, args) => {
                let table = &self.tables[tb.0];
                if args.len() != table.domain.len() {
                    return Err(self.ill(t, &format!("{} expects {} arguments", table.name, table.domain.len())));
                }
                for (a, want) in args.iter().zip(&table.domain) {
                    let got = self.term_sort(a)?;
                    if got != *want {
                        return Err(self.ill(
                            t,
                            &format!("argument of sort {} where {} is expected", self.sorts[got.0].name, self.sorts[want.0].name),
                        ));
                    }
                }
                Ok(table.codomain)
            }
        }
    }

    fn ill(&self, t: &Term, detail: &str) -> IrError {
        IrError::IllSorted {
            atom: self.show_term(t),
            detail: detail.into(),
        }
    }

    pub fn show_term(&self, t: &Term) -> String {
        match t {
            Term::Const(s, i) => self
                .sorts
                .get(s.0)
                .and_then(|s| s.elements.get(*i))
                .cloned()
                .unwrap_or_else(|| format!("#{i}")),
            Term::App(tb, args) => {
                let name = self.tables.get(tb.0).map_or("?", |t| t.name.as_str());
                let args: Vec<String> = args.iter().map(|a| self.show_term(a)).collect();
                format!("{name}({})", args.join(", "))
            }
        }
    }

    /// One literal per codomain element, exactly one of which holds.
    fn term_lits(&mut self, t: &Term) -> Vec<Lit> {
        match t {
            Term::Const(s, i) => {
                let tl = self.true_lit();
                (0..self.sorts[s.0].size())
                    .map(|k| if k == *i { tl } else { !tl })
                    .collect()
            }
            Term::App(tb, args) => {
                let table = self.tables[tb.0].clone();
                if let Some(consts) = args
                    .iter()
                    .map(|a| match a {
                        Term::Const(_, i) => Some(*i),
                        _ => None,
                    })
                    .collect::<Option<Vec<usize>>>()
                {
                    let c = self.rank(&table.domain, &consts);
                    return table.cells[c].iter().map(|v| v.pos()).collect();
                }
                let arg_lits: Vec<Vec<Lit>> = args.iter().map(|a| self.term_lits(a)).collect();
                let size = self.sorts[table.codomain.0].size();
                let mut by_value: Vec<Vec<Lit>> = vec![Vec::new(); size];
                for (c, cell) in table.cells.iter().enumerate() {
                    let tuple = self.unrank(&table.domain, c);
                    let cond: Vec<Lit> = tuple.iter().enumerate().map(|(i, &u)| arg_lits[i][u]).collect();
                    for (v, var) in cell.iter().enumerate() {
                        let mut conj = cond.clone();
                        conj.push(var.pos());
                        let l = self.and_lit(&conj);
                        by_value[v].push(l);
                    }
                }
                by_value.iter().map(|ls| self.or_lit(ls)).collect()
            }
        }
    }

    /// A fresh literal equivalent to the conjunction of `lits`.
    pub fn and_lit(&mut self, lits: &[Lit]) -> Lit {
        match lits {
            [] => self.true_lit(),
            [l] => *l,
            _ => {
                let x = self.new_var().pos();
                for &l in lits {
                    self.add_clause(&[!x, l]);
                }
                let mut c: Vec<Lit> = lits.iter().map(|&l| !l).collect();
                c.push(x);
                self.add_clause(&c);
                x
            }
        }
    }

    /// A fresh literal equivalent to the disjunction of `lits`.
    pub fn or_lit(&mut self, lits: &[Lit]) -> Lit {
        match lits {
            [] => !self.true_lit(),
            [l] => *l,
            _ => !self.and_lit(&lits.iter().map(|&l| !l).collect::<Vec<_>>()),
        }
    }

    /// Tseitin literal for a formula.
    pub fn lit_of(&mut self, f: &Formula) -> Result<Lit, IrError> {
        Ok(match f {
            Formula::Const(true) => self.true_lit(),
            Formula::Const(false) => !self.true_lit(),
            Formula::Var(v) => v.pos(),
            Formula::Lit(l) => *l,
            Formula::Eq(a, b) => {
                let (sa, sb) = (self.term_sort(a)?, self.term_sort(b)?);
                if sa != sb {
                    return Err(IrError::IllSorted {
                        atom: format!("{} = {}", self.show_term(a), self.show_term(b)),
                        detail: format!("{} compared with {}", self.sorts[sa.0].name, self.sorts[sb.0].name),
                    });
                }
                match (a, b) {
                    (Term::Const(_, i), Term::Const(_, j)) => return self.lit_of(&Formula::Const(i == j)),
                    (t, Term::Const(_, i)) | (Term::Const(_, i), t) => return Ok(self.term_lits(t)[*i]),
                    _ => {}
                }
                let (la, lb) = (self.term_lits(a), self.term_lits(b));
                let pairs: Vec<Lit> = la
                    .iter()
                    .zip(&lb)
                    .map(|(&x, &y)| self.and_lit(&[x, y]))
                    .collect();
                self.or_lit(&pairs)
            }
            Formula::Not(g) => !self.lit_of(g)?,
            Formula::And(gs) => {
                let ls = gs.iter().map(|g| self.lit_of(g)).collect::<Result<Vec<_>, _>>()?;
                self.and_lit(&ls)
            }
            Formula::Or(gs) => {
                let ls = gs.iter().map(|g| self.lit_of(g)).collect::<Result<Vec<_>, _>>()?;
                self.or_lit(&ls)
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.lit_of(a)?, self.lit_of(b)?);
                self.or_lit(&[!x, y])
            }
            Formula::Iff(a, b) => {
                let (x, y) = (self.lit_of(a)?, self.lit_of(b)?);
                let z = self.new_var().pos();
                self.add_clause(&[!z, !x, y]);
                self.add_clause(&[!z, x, !y]);
                self.add_clause(&[z, x, y]);
                self.add_clause(&[z, !x, !y]);
                z
            }
        })
    }

    /// Asserts a formula in the current group.
    pub fn assert(&mut self, f: &Formula) -> Result<(), IrError> {
        match f {
            Formula::Const(true) => Ok(()),
            Formula::And(gs) => gs.iter().try_for_each(|g| self.assert(g)),
            Formula::Or(gs) => {
                let ls = gs.iter().map(|g| self.lit_of(g)).collect::<Result<Vec<_>, _>>()?;
                self.add_clause(&ls);
                Ok(())
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.lit_of(a)?, self.lit_of(b)?);
                self.add_clause(&[!x, y]);
                Ok(())
            }
            _ => {
                let l = self.lit_of(f)?;
                self.add_clause(&[l]);
                Ok(())
            }
        }
    }

    pub fn add_cardinality(&mut self, c: &Cardinality) -> Result<(), IrError> {
        let n = c.lits.len();
        if c.bound > n {
            return Err(IrError::BadBound { bound: c.bound, len: n });
        }
        let cap = match c.sense {
            CardSense::AtLeast => c.bound,
            _ => c.bound + 1,
        };
        let ctr = Counter::new(self, &c.lits, cap);
        if matches!(c.sense, CardSense::AtMost | CardSense::Exactly) {
            if let Some(l) = ctr.at_most(c.bound) {
                self.add_clause(&[l]);
            }
        }
        if matches!(c.sense, CardSense::AtLeast | CardSense::Exactly) {
            if let Some(l) = ctr.at_least(c.bound) {
                self.add_clause(&[l]);
            }
        }
        Ok(())
    }

    /// Clause index ranges per group, in group creation order.
    pub fn manifest(&self) -> Vec<GroupRange> {
        let mut out: Vec<GroupRange> = self
            .group_names
            .iter()
            .map(|n| GroupRange {
                name: n.clone(),
                ranges: Vec::new(),
                clauses: 0,
            })
            .collect();
        for (i, &g) in self.clause_groups.iter().enumerate() {
            let gr = &mut out[g as usize];
            gr.clauses += 1;
            match gr.ranges.last_mut() {
                Some(r) if r.1 == i => r.1 = i + 1,
                _ => gr.ranges.push((i, i + 1)),
            }
        }
        out
    }

    pub fn clause_group(&self, clause: usize) -> &str {
        &self.group_names[self.clause_groups[clause] as usize]
    }

    /// Sends clauses added since the previous flush to `solver`.
    pub fn flush_into(&mut self, solver: &mut Solver) {
        solver.reserve_vars(self.cnf.num_vars);
        for c in &self.cnf.clauses[self.flushed..] {
            solver.add_clause(c);
        }
        self.flushed = self.cnf.clauses.len();
    }
}

/// Grounds formulas, function tables and cardinality constraints in one
/// step. Tables are already one-hot constrained inside `problem`.
pub fn ground(problem: &mut Problem, formulas: &[Formula], cards: &[Cardinality]) -> Result<Cnf, IrError> {
    for f in formulas {
        problem.assert(f)?;
    }
    for c in cards {
        problem.add_cardinality(c)?;
    }
    Ok(problem.cnf().clone())
}
