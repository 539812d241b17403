//! Sequential counters.

use crate::sat::{ClauseSink, Lit};

#[derive(Clone, Copy)]
enum B {
    T,
    F,
    L(Lit),
}

fn emit<S: ClauseSink + ?Sized>(sink: &mut S, lits: &[B]) {
    let mut out = Vec::with_capacity(lits.len());
    for &b in lits {
        match b {
            B::T => return,
            B::F => {}
            B::L(l) => out.push(l),
        }
    }
    sink.add_clause(&out);
}

fn not(b: B) -> B {
    match b {
        B::T => B::F,
        B::F => B::T,
        B::L(l) => B::L(!l),
    }
}

/// Unary count of a literal list: `at_least(k)` is true exactly when at
/// least `k` of the inputs are true, for every `k` up to the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counter {
    inputs: usize,
    ge: Vec<Lit>,
}

impl Counter {
    /// Counts `lits` exactly up to `cap`; beyond it only `at_least(cap)`
    /// is informative.
    pub fn new<S: ClauseSink + ?Sized>(sink: &mut S, lits: &[Lit], cap: usize) -> Counter {
        let cap = cap.min(lits.len());
        // prev[k] = "at least k of the first i inputs"; prev[0] is true.
        let mut prev: Vec<B> = vec![B::T];
        prev.extend(std::iter::repeat_n(B::F, cap));
        for (i, &x) in lits.iter().enumerate() {
            let mut cur = vec![B::T];
            for k in 1..=cap {
                if k > i + 1 {
                    cur.push(B::F);
                    continue;
                }
                let s = B::L(sink.new_var().pos());
                let (same, below) = (prev[k], prev[k - 1]);
                emit(sink, &[not(same), s]);
                emit(sink, &[B::L(!x), not(below), s]);
                emit(sink, &[not(s), same, B::L(x)]);
                emit(sink, &[not(s), same, below]);
                cur.push(s);
            }
            prev = cur;
        }
        let ge = prev[1..]
            .iter()
            .map(|b| match b {
                B::L(l) => *l,
                _ => unreachable!("every capped output is a variable"),
            })
            .collect();
        Counter {
            inputs: lits.len(),
            ge,
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn cap(&self) -> usize {
        self.ge.len()
    }

    /// `None` when the statement is trivially true (`k == 0`).
    /// Panics if `k` exceeds the cap.
    pub fn at_least(&self, k: usize) -> Option<Lit> {
        if k == 0 {
            return None;
        }
        assert!(k <= self.cap(), "bound {k} beyond counter cap {}", self.cap());
        Some(self.ge[k - 1])
    }

    /// `None` when trivially true (`k` at or above the input count).
    pub fn at_most(&self, k: usize) -> Option<Lit> {
        if k >= self.inputs {
            return None;
        }
        self.at_least(k + 1).map(|l| !l)
    }

    /// Count read from a model, saturating at the cap.
    pub fn value(&self, model: &[bool]) -> usize {
        self.ge.iter().take_while(|l| l.eval(model)).count()
    }
}

/// At most one of `lits`: pairwise for short lists, a counter otherwise.
pub fn at_most_one<S: ClauseSink + ?Sized>(sink: &mut S, lits: &[Lit]) {
    if lits.len() <= 6 {
        for i in 0..lits.len() {
            for j in i + 1..lits.len() {
                sink.add_clause(&[!lits[i], !lits[j]]);
            }
        }
    } else {
        let c = Counter::new(sink, lits, 2);
        sink.add_clause(&[c.at_most(1).expect("more than one input")]);
    }
}

pub fn exactly_one<S: ClauseSink + ?Sized>(sink: &mut S, lits: &[Lit]) {
    sink.add_clause(lits);
    at_most_one(sink, lits);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{enumerate_models, Cnf, Var};

    fn count_models(n: usize, build: impl Fn(&mut Cnf, &[Lit])) -> usize {
        let mut cnf = Cnf::new();
        let xs: Vec<Lit> = (0..n).map(|_| cnf.new_var().pos()).collect();
        build(&mut cnf, &xs);
        let proj: Vec<Var> = xs.iter().map(|l| l.var()).collect();
        enumerate_models(&cnf, &proj, 1 << 20).len()
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn exactly_one_of_three() {
        assert_eq!(count_models(3, exactly_one), 3);
        assert_eq!(count_models(9, exactly_one), 9);
    }

    #[test]
    fn at_most_two_of_four() {
        let n = count_models(4, |c, xs| {
            let k = Counter::new(c, xs, 3);
            c.add_clause(&[k.at_most(2).unwrap()]);
        });
        assert_eq!(n, 11);
    }

    #[test]
    fn counter_outputs_are_exact() {
        for n in 0..=6 {
            for k in 0..=n {
                let at_least = count_models(n, |c, xs| {
                    let ctr = Counter::new(c, xs, n);
                    if let Some(l) = ctr.at_least(k) {
                        c.add_clause(&[l]);
                    }
                });
                assert_eq!(at_least, (k..=n).map(|j| binom(n, j)).sum::<usize>());
                let at_most = count_models(n, |c, xs| {
                    let ctr = Counter::new(c, xs, k + 1);
                    if let Some(l) = ctr.at_most(k) {
                        c.add_clause(&[l]);
                    }
                });
                assert_eq!(at_most, (0..=k).map(|j| binom(n, j)).sum::<usize>());
            }
        }
    }
}
