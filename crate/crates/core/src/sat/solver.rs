//! Conflict-driven clause learning with two watched literals, first-UIP
//! learning, VSIDS branching, phase saving, Luby restarts and LBD-based
//! learnt clause deletion. Incremental: clauses may be added between calls
//! and each call takes its own assumptions.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{ClauseSink, Cnf, Lit, Var};

const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// The conflict budget ran out.
    Unknown,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub seed: u64,
    /// Probability of a random branching decision.
    pub random_branch_freq: f64,
    /// Conflicts allowed per `solve` call; `None` is unlimited.
    pub conflict_budget: Option<u64>,
    /// Conflicts in the first restart interval, scaled by the Luby sequence.
    pub restart_base: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0x5eed,
            random_branch_freq: 0.005,
            conflict_budget: None,
            restart_base: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub solves: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learnt_literals: u64,
    pub deleted_clauses: u64,
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

/// Max-heap of variables keyed by activity.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

impl VarHeap {
    const ABSENT: u32 = u32::MAX;

    fn grow(&mut self, n: usize) {
        self.pos.resize(n, Self::ABSENT);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != Self::ABSENT
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as u32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = self.heap.len() as u32;
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v as usize] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.pos[top as usize] = Self::ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

pub struct Solver {
    config: SolverConfig,
    rng: StdRng,
    ok: bool,
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    /// Per literal code: 1 true, -1 false, 0 unassigned.
    vals: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<u8>,
    model: Vec<bool>,
    core: Vec<Lit>,
    max_learnts: f64,
    wasted: usize,
    stats: Stats,
    deadline: Option<Instant>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver::with_config(SolverConfig::default())
    }

    pub fn with_config(config: SolverConfig) -> Self {
        Solver {
            config,
            rng: StdRng::seed_from_u64(config.seed),
            ok: true,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            vals: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            model: Vec::new(),
            core: Vec::new(),
            max_learnts: 0.0,
            wasted: 0,
            stats: Stats::default(),
            deadline: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.level.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len() - self.learnts.len()
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.config.conflict_budget = budget;
    }

    /// Calls still running at `deadline` return `Unknown`.
    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    fn past_deadline(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// False once the clause set is known to be unsatisfiable without
    /// assumptions.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    pub fn add_cnf(&mut self, cnf: &Cnf) {
        self.reserve_vars(cnf.num_vars);
        for c in &cnf.clauses {
            self.add_clause(c);
        }
    }

    /// Assignment found by the last successful `solve`, indexed by variable.
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    pub fn model_value(&self, l: Lit) -> bool {
        l.eval(&self.model)
    }

    /// Assumptions responsible for the last `Unsat` answer.
    pub fn core(&self) -> &[Lit] {
        &self.core
    }

    /// Shrinks the last core by deletion until dropping any single member
    /// makes the remaining assumptions satisfiable. Leaves the model of the
    /// last satisfiable probe behind.
    pub fn minimize_core(&mut self) -> Vec<Lit> {
        let mut core = self.core.clone();
        let mut i = 0;
        while i < core.len() {
            let rest: Vec<Lit> = core[..i].iter().chain(&core[i + 1..]).copied().collect();
            if self.solve(&rest) == SolveResult::Unsat {
                let smaller = self.core.clone();
                core.retain(|l| smaller.contains(l));
            } else {
                i += 1;
            }
        }
        self.core = core.clone();
        core
    }

    fn value(&self, l: Lit) -> i8 {
        self.vals[l.code()]
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        debug_assert_eq!(self.value(l), 0);
        let v = l.var().index();
        self.vals[l.code()] = 1;
        self.vals[(!l).code()] = -1;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, cref: u32) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[(!a).code()].push(Watch { cref, blocker: b });
        self.watches[(!b).code()].push(Watch { cref, blocker: a });
    }

    fn push_clause(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        self.attach(cref);
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.vals[w.blocker.code()] == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize];
                if c.deleted {
                    continue;
                }
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                let nw = Watch {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && self.vals[first.code()] == 1 {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.lits.len() {
                    if self.vals[c.lits[k].code()] != -1 {
                        c.lits.swap(1, k);
                        self.watches[(!c.lits[1]).code()].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.vals[first.code()] == -1 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn redundant(&self, l: Lit) -> bool {
        let r = self.reason[l.var().index()];
        r != NO_REASON
            && self.clauses[r as usize].lits[1..].iter().all(|q| {
                let v = q.var().index();
                self.seen[v] != 0 || self.level[v] == 0
            })
    }

    /// First-UIP conflict analysis; returns the learnt clause (asserting
    /// literal first, highest remaining level second) and its backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::new(Var(0), true)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if self.seen[v] == 0 && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = 1;
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] != 0 {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[lit.var().index()];
            self.seen[lit.var().index()] = 0;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.expect("uip");

        let keep: Vec<bool> = learnt[1..].iter().map(|&l| !self.redundant(l)).collect();
        let all = learnt.clone();
        let mut out = vec![learnt[0]];
        out.extend(learnt[1..].iter().zip(&keep).filter(|(_, &k)| k).map(|(&l, _)| l));
        for l in &all {
            self.seen[l.var().index()] = 0;
        }
        self.stats.learnt_literals += out.len() as u64;

        let mut bt = 0;
        if out.len() > 1 {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var().index()] > self.level[out[max_i].var().index()] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            bt = self.level[out[1].var().index()];
        }
        (out, bt)
    }

    /// Assumptions implied false together with `p`: walks the implication
    /// graph back to the assumption decisions.
    fn analyze_final(&mut self, p: Lit) {
        self.core.clear();
        self.core.push(!p);
        if self.decision_level() == 0 {
            return;
        }
        self.seen[p.var().index()] = 1;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let x = self.trail[i].var().index();
            if self.seen[x] == 0 {
                continue;
            }
            let r = self.reason[x];
            if r == NO_REASON {
                if self.level[x] > 0 {
                    self.core.push(self.trail[i]);
                }
            } else {
                for k in 1..self.clauses[r as usize].lits.len() {
                    let v = self.clauses[r as usize].lits[k].var().index();
                    if self.level[v] > 0 {
                        self.seen[v] = 1;
                    }
                }
            }
            self.seen[x] = 0;
        }
        self.seen[p.var().index()] = 0;
        self.core.sort();
        self.core.dedup();
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var().index()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.vals[l.code()] = 0;
            self.vals[(!l).code()] = 0;
            self.reason[v] = NO_REASON;
            self.phase[v] = l.is_positive();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.config.random_branch_freq > 0.0
            && !self.heap.heap.is_empty()
            && self.rng.gen_bool(self.config.random_branch_freq.min(1.0))
        {
            let v = self.heap.heap[self.rng.gen_range(0..self.heap.heap.len())] as usize;
            if self.vals[Var(v as u32).pos().code()] == 0 {
                return Some(Lit::new(Var(v as u32), self.phase[v]));
            }
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.vals[Var(v).pos().code()] == 0 {
                return Some(Lit::new(Var(v), self.phase[v as usize]));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let l = self.clauses[cref as usize].lits[0];
        self.vals[l.code()] == 1 && self.reason[l.var().index()] == cref
    }

    fn reduce_db(&mut self) {
        let mut ls = std::mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
        });
        let half = ls.len() / 2;
        let mut kept = Vec::with_capacity(ls.len());
        for (i, &cref) in ls.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lbd > 2 && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                self.wasted += c.lits.len();
                c.lits = vec![c.lits[0], c.lits[1]];
                self.stats.deleted_clauses += 1;
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
        if self.wasted > 100_000 {
            self.collect_garbage();
        }
    }

    /// Drops deleted clauses and renumbers the rest.
    fn collect_garbage(&mut self) {
        let mut map = vec![NO_REASON; self.clauses.len()];
        let mut fresh = Vec::with_capacity(self.clauses.len());
        for (i, c) in std::mem::take(&mut self.clauses).into_iter().enumerate() {
            if !c.deleted {
                map[i] = fresh.len() as u32;
                fresh.push(c);
            }
        }
        self.clauses = fresh;
        for r in &mut self.reason {
            if *r != NO_REASON {
                *r = map[*r as usize];
            }
        }
        for l in &mut self.learnts {
            *l = map[*l as usize];
        }
        for ws in &mut self.watches {
            ws.retain_mut(|w| {
                let m = map[w.cref as usize];
                w.cref = m;
                m != NO_REASON
            });
        }
        self.wasted = 0;
    }

    fn search(&mut self, assumptions: &[Lit], nof_conflicts: u64, budget_end: Option<u64>) -> Option<SolveResult> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    self.core.clear();
                    return Some(SolveResult::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let asserting = learnt[0];
                    let cref = self.push_clause(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(asserting, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if budget_end.is_some_and(|e| self.stats.conflicts >= e)
                    || (conflicts.is_multiple_of(256) && self.past_deadline())
                {
                    self.cancel_until(0);
                    return Some(SolveResult::Unknown);
                }
            } else {
                if conflicts >= nof_conflicts {
                    self.cancel_until(0);
                    return None;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let p = assumptions[self.decision_level() as usize];
                    match self.value(p) {
                        1 => self.trail_lim.push(self.trail.len()),
                        -1 => {
                            self.analyze_final(!p);
                            return Some(SolveResult::Unsat);
                        }
                        _ => {
                            next = Some(p);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(p) => p,
                    None => {
                        self.stats.decisions += 1;
                        match self.pick_branch() {
                            Some(p) => p,
                            None => return Some(SolveResult::Sat),
                        }
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, NO_REASON);
            }
        }
    }

    /// Solves under `assumptions`. On `Sat` the model is available through
    /// [`Solver::model`]; on `Unsat` [`Solver::core`] holds a subset of the
    /// assumptions that is already inconsistent.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.stats.solves += 1;
        self.core.clear();
        for a in assumptions {
            self.reserve_vars(a.var().index() + 1);
        }
        if !self.ok {
            return SolveResult::Unsat;
        }
        self.max_learnts = (self.num_clauses() as f64 / 3.0).max(5000.0);
        let budget_end = self.config.conflict_budget.map(|b| self.stats.conflicts + b);
        let mut round = 0;
        let result = loop {
            let limit = (luby(2.0, round) * self.config.restart_base as f64) as u64;
            if let Some(r) = self.search(assumptions, limit, budget_end) {
                break r;
            }
            if self.past_deadline() {
                break SolveResult::Unknown;
            }
            self.stats.restarts += 1;
            round += 1;
        };
        if result == SolveResult::Sat {
            self.model = (0..self.num_vars())
                .map(|v| self.vals[Var(v as u32).pos().code()] == 1)
                .collect();
        }
        self.cancel_until(0);
        result
    }
}

impl ClauseSink for Solver {
    fn new_var(&mut self) -> Var {
        let v = self.num_vars();
        self.vals.extend([0, 0]);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.phase.push(false);
        self.seen.push(0);
        let noise = if self.config.random_branch_freq > 0.0 {
            self.rng.gen::<f64>() * 1e-5
        } else {
            0.0
        };
        self.activity.push(noise);
        self.heap.grow(v + 1);
        self.heap.insert(v as u32, &self.activity);
        Var(v as u32)
    }

    /// Adds a clause at decision level zero. Satisfied clauses and false
    /// literals are dropped; an empty result makes the solver inconsistent.
    fn add_clause(&mut self, lits: &[Lit]) {
        if !self.ok {
            return;
        }
        self.cancel_until(0);
        for l in lits {
            self.reserve_vars(l.var().index() + 1);
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        if c.iter().any(|&l| self.value(l) == 1) {
            return;
        }
        c.retain(|&l| self.value(l) != -1);
        match c.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.push_clause(c, false, 0);
            }
        }
    }
}
