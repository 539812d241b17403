//! Sequential consumption of a corpus, lexicographic cost optimization,
//! sampling of optimal lexicons and axiom ablation.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{vocabulary, AnnotatedSentence};
use crate::encoder::{EncodeError, EncoderConfig, Encoding, DEFINITION_GROUPS, LEXICON_GROUPS, SENTENCE_GROUPS};
use crate::mg::{print_lexicon_text, DerivationTree, Lexicon};
use crate::parser::{validate, ParseOptions};
use crate::sat::{ClauseSink, Lit, Objective, OptimizeError, Optimizer, Sense, SolveResult, Solver, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostTerm {
    /// Minimize the number of lexical items.
    Entries,
    /// Minimize lexicon features (without `C`) plus leaf features of every
    /// derivation (with `C`).
    Features,
    /// Maximize the number of distinct selector categories.
    SelectorCategories,
}

impl CostTerm {
    pub fn name(self) -> &'static str {
        match self {
            CostTerm::Entries => "entries",
            CostTerm::Features => "features",
            CostTerm::SelectorCategories => "selector-categories",
        }
    }

    pub fn sense(self) -> Sense {
        match self {
            CostTerm::SelectorCategories => Sense::Max,
            _ => Sense::Min,
        }
    }
}

/// Objectives in priority order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CostSpec(pub Vec<CostTerm>);

impl Default for CostSpec {
    fn default() -> Self {
        CostSpec(vec![CostTerm::Entries, CostTerm::Features, CostTerm::SelectorCategories])
    }
}

impl CostSpec {
    pub fn entries_only() -> Self {
        CostSpec(vec![CostTerm::Entries])
    }

    pub fn none() -> Self {
        CostSpec(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InferenceConfig {
    pub encoder: EncoderConfig,
    pub costs: CostSpec,
    /// Number of optimal lexicons to return.
    pub samples: usize,
    pub seed: u64,
    /// Conflicts allowed per solver call.
    pub conflict_budget: Option<u64>,
    /// Wall-clock limit for the whole run, in seconds.
    pub time_budget: Option<u64>,
    /// Axiom groups left out of the encoding.
    pub disabled_groups: Vec<String>,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            encoder: EncoderConfig::default(),
            costs: CostSpec::default(),
            samples: 1,
            seed: 0x5eed,
            conflict_budget: None,
            time_budget: None,
            disabled_groups: Vec::new(),
        }
    }
}

impl InferenceConfig {
    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            bounds: self.encoder.bounds,
            relation_match: self.encoder.relation_match,
            covert_root: self.encoder.covert_root,
            ..ParseOptions::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("corpus inconsistent under bounds: sentence #{} ({text:?}) admits no lexicon together with the sentences before it", .index + 1)]
    /// `index` is 0-based; the message numbers sentences from 1.
    Inconsistent { index: usize, text: String },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("solver budget exhausted before a model was found")]
    Budget,
    #[error("unknown axiom group {0:?}")]
    UnknownGroup(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// Objective values of one model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostValues {
    pub entries: usize,
    pub lexicon_features: usize,
    pub parse_features: usize,
    pub selector_categories: usize,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub lexicon: Lexicon,
    /// One per sentence; empty when axiom groups are disabled and the
    /// model does not decode to valid derivations.
    pub derivations: Vec<DerivationTree>,
    pub values: CostValues,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub solutions: Vec<Solution>,
    /// False when a budget stopped the optimization early.
    pub optimal: bool,
    pub stats: RunStats,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub variables: usize,
    pub clauses: usize,
    pub conflicts: u64,
    pub decisions: u64,
    pub solver_calls: u64,
    pub encode_ms: u128,
    pub solve_ms: u128,
}

/// Encoding of the sentences consumed so far, attached to an incremental
/// solver.
pub struct InferenceState {
    enc: Encoding,
    solver: Solver,
    config: InferenceConfig,
    deadline: Option<Instant>,
}

impl InferenceState {
    pub fn new(vocab: &[String], config: InferenceConfig) -> Result<Self, InferenceError> {
        let enc = Encoding::new(vocab, config.encoder.clone(), config.disabled_groups.clone())?;
        let mut solver = Solver::with_config(SolverConfig {
            seed: config.seed,
            conflict_budget: config.conflict_budget,
            ..SolverConfig::default()
        });
        let deadline = config.time_budget.map(|s| Instant::now() + Duration::from_secs(s));
        solver.set_deadline(deadline);
        let mut st = InferenceState {
            enc,
            solver,
            config,
            deadline,
        };
        st.flush();
        Ok(st)
    }

    /// A state over the vocabulary of `corpus` with no sentence consumed.
    pub fn for_corpus(corpus: &[AnnotatedSentence], config: InferenceConfig) -> Result<Self, InferenceError> {
        InferenceState::new(&vocabulary(corpus), config)
    }

    pub fn encoding(&self) -> &Encoding {
        &self.enc
    }

    pub fn config(&self) -> &InferenceConfig {
        &self.config
    }

    pub fn solver_stats(&self) -> crate::sat::Stats {
        self.solver.stats()
    }

    pub fn consumed(&self) -> Vec<AnnotatedSentence> {
        self.enc.sentences().cloned().collect()
    }

    fn flush(&mut self) {
        self.enc.problem_mut().reserve_vars(self.solver.num_vars());
        self.enc.problem_mut().flush_into(&mut self.solver);
    }

    fn call(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.solver.solve(assumptions)
    }

    /// Adds one sentence to the state.
    pub fn consume(&mut self, s: &AnnotatedSentence) -> Result<(), InferenceError> {
        self.flush();
        self.enc.encode_sentence(s)?;
        self.flush();
        Ok(())
    }

    /// Consumes sentences one at a time, checking satisfiability after
    /// each; the first sentence that makes the state UNSAT is reported.
    pub fn consume_all(&mut self, corpus: &[AnnotatedSentence]) -> Result<(), InferenceError> {
        for s in corpus {
            self.consume(s)?;
            match self.call(&[]) {
                SolveResult::Sat => {}
                SolveResult::Unsat => {
                    return Err(InferenceError::Inconsistent {
                        index: self.enc.num_sentences() - 1,
                        text: s.text.clone(),
                    })
                }
                SolveResult::Unknown => return Err(InferenceError::Budget),
            }
        }
        Ok(())
    }

    pub fn is_satisfiable(&mut self) -> Result<bool, InferenceError> {
        match self.call(&[]) {
            SolveResult::Sat => Ok(true),
            SolveResult::Unsat => Ok(false),
            SolveResult::Unknown => Err(InferenceError::Budget),
        }
    }

    /// True iff `lex` is a solution of the current state.
    pub fn assert_lexicon(&mut self, lex: &Lexicon) -> Result<bool, InferenceError> {
        let pins = self.enc.pin_lexicon(lex)?;
        match self.call(&pins) {
            SolveResult::Sat => Ok(true),
            SolveResult::Unsat => Ok(false),
            SolveResult::Unknown => Err(InferenceError::Budget),
        }
    }

    /// True iff some model has at most `k` lexical items.
    pub fn entries_at_most(&mut self, k: usize) -> Result<bool, InferenceError> {
        self.admits(&[(CostTerm::Entries, k)])
    }

    /// True iff some model reaches every given value: at most `k` for
    /// minimized terms, at least `k` for maximized ones.
    pub fn admits(&mut self, bounds: &[(CostTerm, usize)]) -> Result<bool, InferenceError> {
        self.flush();
        let mut assume = Vec::new();
        for &(term, k) in bounds {
            let obj = self.objective(term);
            let ctr = crate::ir::Counter::new(&mut self.solver, &obj.lits, k + 1);
            let lit = match obj.sense {
                Sense::Min => ctr.at_most(k),
                Sense::Max if k > obj.lits.len() => return Ok(false),
                Sense::Max => ctr.at_least(k),
            };
            assume.extend(lit);
        }
        match self.call(&assume) {
            SolveResult::Sat => Ok(true),
            SolveResult::Unsat => Ok(false),
            SolveResult::Unknown => Err(InferenceError::Budget),
        }
    }

    pub fn objective(&self, term: CostTerm) -> Objective {
        let lits = match term {
            CostTerm::Entries => self.enc.entry_lits(),
            CostTerm::Features => {
                let mut l = self.enc.lexicon_feature_lits();
                l.extend(self.enc.parse_feature_lits());
                l
            }
            CostTerm::SelectorCategories => self.enc.selector_category_lits(),
        };
        Objective::new(term.name(), lits, term.sense())
    }

    pub fn values(&self, model: &[bool]) -> CostValues {
        let count = |ls: Vec<Lit>| ls.iter().filter(|l| l.eval(model)).count();
        CostValues {
            entries: count(self.enc.entry_lits()),
            lexicon_features: count(self.enc.lexicon_feature_lits()),
            parse_features: count(self.enc.parse_feature_lits()),
            selector_categories: count(self.enc.selector_category_lits()),
        }
    }

    fn solution(&self, model: &[bool]) -> Result<Solution, InferenceError> {
        let lexicon = self.enc.decode_lexicon(model)?;
        let decoded: Result<Vec<_>, _> = (0..self.enc.num_sentences())
            .map(|i| self.enc.decode_parse(model, i))
            .collect();
        // with axiom groups removed a model need not describe MG derivations
        let derivations = match decoded {
            Ok(d) => d,
            Err(_) if !self.config.disabled_groups.is_empty() => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Solution {
            lexicon,
            derivations,
            values: self.values(model),
        })
    }

    /// Optimizes the configured costs, then samples up to
    /// `config.samples` distinct optimal lexicons.
    pub fn optimize(&mut self) -> Result<RunResult, InferenceError> {
        let started = Instant::now();
        self.flush();
        let objectives: Vec<Objective> = self.config.costs.0.iter().map(|&t| self.objective(t)).collect();
        let out = Optimizer::new(&mut self.solver).run(&objectives).map_err(|e| match e {
            OptimizeError::Unsat => InferenceError::Inconsistent {
                index: self.enc.num_sentences().saturating_sub(1),
                text: self.enc.sentences().last().map(|s| s.text.clone()).unwrap_or_default(),
            },
            OptimizeError::Unknown => InferenceError::Budget,
        })?;
        let first = self.solution(&out.model)?;
        let mut solutions = vec![first];
        if self.config.samples > 1 {
            let more = self.sample_models(self.config.samples, &out.bounds, Some(&out.model))?;
            for m in more {
                solutions.push(self.solution(&m)?);
            }
        }
        let st = self.solver.stats();
        Ok(RunResult {
            solutions,
            optimal: out.optimal,
            stats: RunStats {
                variables: self.enc.problem().num_vars(),
                clauses: self.enc.problem().num_clauses(),
                conflicts: st.conflicts,
                decisions: st.decisions,
                solver_calls: st.solves,
                encode_ms: 0,
                solve_ms: started.elapsed().as_millis(),
            },
        })
    }

    /// Models with pairwise distinct lexicons, under `assumptions`. When
    /// `seen` is given its lexicon counts as already sampled.
    fn sample_models(
        &mut self,
        n: usize,
        assumptions: &[Lit],
        seen: Option<&[bool]>,
    ) -> Result<Vec<Vec<bool>>, InferenceError> {
        self.flush();
        let act = self.enc.problem_mut().new_var().pos();
        self.flush();
        let key: Vec<Lit> = self.enc.lexicon_vars().into_iter().map(|v| v.pos()).collect();
        let mut printed = BTreeSet::new();
        let block = |solver: &mut Solver, model: &[bool]| {
            let mut c: Vec<Lit> = key.iter().map(|&l| if l.eval(model) { !l } else { l }).collect();
            c.push(!act);
            solver.add_clause(&c);
        };
        let mut out = Vec::new();
        if let Some(m) = seen {
            printed.insert(print_lexicon_text(&self.enc.decode_lexicon(m)?));
            block(&mut self.solver, m);
        }
        let mut assume = assumptions.to_vec();
        assume.push(act);
        let target = n - usize::from(seen.is_some());
        // without slot ordering one lexicon has many slot assignments
        let mut tries = 0;
        while out.len() < target && tries < 64 * n.max(1) {
            tries += 1;
            match self.solver.solve(&assume) {
                SolveResult::Sat => {
                    let m = self.solver.model().to_vec();
                    block(&mut self.solver, &m);
                    if printed.insert(print_lexicon_text(&self.enc.decode_lexicon(&m)?)) {
                        out.push(m);
                    }
                }
                SolveResult::Unsat => break,
                SolveResult::Unknown => break,
            }
        }
        self.solver.add_clause(&[!act]);
        Ok(out)
    }

    /// Up to `n` distinct lexicons of the current state.
    pub fn sample_lexicons(&mut self, n: usize) -> Result<Vec<Lexicon>, InferenceError> {
        self.sample_pinned(n, &[])
    }

    /// Up to `n` distinct lexicons among those satisfying `assumptions`.
    pub fn sample_pinned(&mut self, n: usize, assumptions: &[Lit]) -> Result<Vec<Lexicon>, InferenceError> {
        if n == 0 {
            return Ok(Vec::new());
        }
        self.sample_models(n, assumptions, None)?
            .iter()
            .map(|m| self.enc.decode_lexicon(m).map_err(Into::into))
            .collect()
    }

    pub fn deadline(&self) -> Option<Instant> {
        self.deadline
    }
}

/// Every lexicon validates every sentence with the agenda parser and every
/// derivation re-linearizes to its sentence.
pub fn self_check(result: &RunResult, corpus: &[AnnotatedSentence], opts: ParseOptions) -> Result<(), InferenceError> {
    for (k, sol) in result.solutions.iter().enumerate() {
        for (i, s) in corpus.iter().enumerate() {
            if !validate(&sol.lexicon, s, opts) {
                return Err(InferenceError::SelfCheck(format!(
                    "lexicon {k} does not validate sentence {i} ({:?})",
                    s.text
                )));
            }
            let surface = sol.derivations[i]
                .surface()
                .map_err(|e| InferenceError::SelfCheck(e.to_string()))?;
            if surface != s.tokens {
                return Err(InferenceError::SelfCheck(format!("derivation {i} of lexicon {k} has the wrong yield")));
            }
        }
    }
    Ok(())
}

/// Consumes `corpus` in order and optimizes.
pub fn run(corpus: &[AnnotatedSentence], config: &InferenceConfig) -> Result<RunResult, InferenceError> {
    if corpus.is_empty() {
        return Err(InferenceError::EmptyCorpus);
    }
    let t0 = Instant::now();
    let mut st = InferenceState::for_corpus(corpus, config.clone())?;
    st.consume_all(corpus)?;
    let encode_ms = t0.elapsed().as_millis();
    let mut res = st.optimize()?;
    res.stats.encode_ms = encode_ms;
    Ok(res)
}

/// Outcome of one configuration in an ablation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationRun {
    pub satisfiable: bool,
    pub values: Option<CostValues>,
    pub optimal: bool,
    pub lexicon: Option<String>,
    /// The optimal model decodes to valid derivations of every sentence.
    pub derivations_valid: bool,
    /// The optimal lexicon validates every sentence with the parser.
    pub lexicon_validates: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationReport {
    pub group: String,
    pub baseline: AblationRun,
    pub ablated: AblationRun,
}

/// Checks that `group` names an ablatable axiom group for a corpus of
/// `n` sentences: a sentence group (all sentences), `group@i`, or a
/// lexicon group.
pub fn check_group(group: &str, n: usize) -> Result<(), InferenceError> {
    let unknown = || InferenceError::UnknownGroup(group.to_string());
    let (base, idx) = match group.split_once('@') {
        Some((b, i)) => (b, Some(i.parse::<usize>().map_err(|_| unknown())?)),
        None => (group, None),
    };
    if DEFINITION_GROUPS.contains(&base) {
        return Err(unknown());
    }
    let ok = match idx {
        Some(i) => SENTENCE_GROUPS.contains(&base) && i < n,
        None => SENTENCE_GROUPS.contains(&base) || LEXICON_GROUPS.contains(&base),
    };
    if ok {
        Ok(())
    } else {
        Err(unknown())
    }
}

fn ablation_run(corpus: &[AnnotatedSentence], config: &InferenceConfig) -> Result<AblationRun, InferenceError> {
    match run(corpus, config) {
        Ok(r) => {
            let sol = &r.solutions[0];
            let opts = config.parse_options();
            Ok(AblationRun {
                satisfiable: true,
                values: Some(sol.values),
                optimal: r.optimal,
                lexicon: Some(print_lexicon_text(&sol.lexicon)),
                derivations_valid: sol.derivations.len() == corpus.len(),
                lexicon_validates: corpus.iter().all(|s| validate(&sol.lexicon, s, opts)),
            })
        }
        Err(InferenceError::Inconsistent { .. }) => Ok(AblationRun {
            satisfiable: false,
            values: None,
            optimal: true,
            lexicon: None,
            derivations_valid: false,
            lexicon_validates: false,
        }),
        Err(e) => Err(e),
    }
}

/// Optimum with and without one axiom group.
pub fn ablate(corpus: &[AnnotatedSentence], config: &InferenceConfig, group: &str) -> Result<AblationReport, InferenceError> {
    check_group(group, corpus.len())?;
    let baseline = ablation_run(corpus, config)?;
    let mut cfg = config.clone();
    cfg.disabled_groups.push(group.to_string());
    let ablated = ablation_run(corpus, &cfg)?;
    Ok(AblationReport {
        group: group.to_string(),
        baseline,
        ablated,
    })
}

#[cfg(test)]
mod tests;
