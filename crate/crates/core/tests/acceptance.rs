//! Acceptance criteria. Each prints one PASS/FAIL line; the target fails
//! when any criterion does.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use mgsat::corpus::vocabulary;
use mgsat::fixtures::{lexicon_b, lexicon_c, table1};
use mgsat::inference::{self, CostSpec, InferenceConfig, InferenceState};
use mgsat::ir::{export_smtlib, CardSense, Cardinality, Formula, Problem};
use mgsat::mg::{HeadMove, MergeKind};
use mgsat::parser::{parse, validate, ParseOptions};
use mgsat::sat::{enumerate_models, solve, Cnf, Lit, Outcome, Var};
use mgsat::{AnnotatedSentence, DerivationTree, Lexicon};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("published lexicons validate the corpus", c1_oracle_parsing),
        ("question derivation event order", c2_question_derivation),
        ("Lexicon-B question without was/eating merge", c3_contrast),
        ("encoding regression", c4_encoding_regression),
        ("declarative prefix inference", c5_desk_scale),
        ("full experiment values", c6_full_experiment),
        ("solver property suite", c7_solver_suite),
        ("parser/encoder agreement", c8_agreement),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {} PASS ({name}; {secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL ({name}; {secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn corpus() -> Vec<AnnotatedSentence> {
    table1()
}

fn admissible(t: &DerivationTree, opts: ParseOptions) -> bool {
    !opts.covert_root || t.leaf(t.head_leaf(t.root())).is_some_and(|l| l.item.phon.is_covert())
}

fn trees(lex: &Lexicon, s: &AnnotatedSentence) -> Vec<DerivationTree> {
    let opts = ParseOptions::default();
    parse(lex, &s.tokens, s.kind, opts)
        .into_iter()
        .filter(|t| admissible(t, opts))
        .collect()
}

fn word(t: &DerivationTree, id: usize) -> String {
    t.leaf(t.head_leaf(id)).unwrap().item.phon.to_string()
}

fn c1_oracle_parsing() -> Verdict {
    let t0 = Instant::now();
    let opts = ParseOptions::default();
    let mut lines = Vec::new();
    let mut total = 0;
    for (name, lex) in [("B", lexicon_b()), ("C", lexicon_c())] {
        let failing: Vec<usize> = corpus()
            .iter()
            .enumerate()
            .filter(|(_, s)| !validate(&lex, s, opts))
            .map(|(i, _)| i + 1)
            .collect();
        total += 11 - failing.len();
        lines.push(format!("{name} {}/11 (failing {failing:?})", 11 - failing.len()));
    }
    let elapsed = t0.elapsed();
    let detail = format!("{total}/22 validations, {}; {:.2}s", lines.join(", "), elapsed.as_secs_f64());
    if total == 22 && elapsed < Duration::from_secs(10) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c2_question_derivation() -> Verdict {
    let s = &corpus()[6];
    let want = vec![
        "merge eating what",
        "merge eating sally",
        "merge was eating",
        "move was sally",
        "merge+hm eps_intr was",
        "move eps_intr what",
    ];
    let all = trees(&lexicon_c(), s);
    let sequences: Vec<Vec<String>> = all
        .iter()
        .map(|t| {
            t.events()
                .iter()
                .map(|e| {
                    let kind = match (e.kind, e.head_move) {
                        (MergeKind::Internal, _) => "move",
                        (MergeKind::External, HeadMove::None) => "merge",
                        (MergeKind::External, _) => "merge+hm",
                    };
                    format!("{kind} {} {}", word(t, e.head), word(t, e.dependent))
                })
                .collect()
        })
        .collect();
    match sequences.iter().position(|q| *q == want) {
        Some(k) => Ok(format!("derivation {} of {} matches: {}", k + 1, all.len(), want.join(", "))),
        None => Err(format!("no derivation matches; got {sequences:?}")),
    }
}

fn c3_contrast() -> Verdict {
    let s = &corpus()[6];
    let all = trees(&lexicon_b(), s);
    if all.is_empty() {
        return Err("Lexicon-B has no derivation of the sentence".into());
    }
    let lacking = all
        .iter()
        .filter(|t| {
            !t.events().iter().any(|e| {
                let pair = (word(t, e.head), word(t, e.dependent));
                e.kind == MergeKind::External
                    && matches!((pair.0.as_str(), pair.1.as_str()), ("was", "eating") | ("eating", "was"))
            })
        })
        .count();
    let detail = format!("{} derivation(s), {lacking} without an external merge of was and eating", all.len());
    if lacking > 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn z3_available() -> bool {
    Command::new("z3").arg("--version").output().is_ok_and(|o| o.status.success())
}

fn z3(smt: &str) -> String {
    let mut child = Command::new("z3")
        .arg("-in")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(smt.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or_default().trim().to_string()
}

fn pinned_problem(st: &InferenceState, lex: &Lexicon) -> Problem {
    let mut p = st.encoding().problem().clone();
    let pins = st.encoding().pin_lexicon(lex).unwrap();
    p.set_group("pin");
    for l in pins {
        p.assert(&Formula::Lit(l)).unwrap();
    }
    p
}

fn c4_encoding_regression() -> Verdict {
    let t0 = Instant::now();
    let corpus = corpus();
    let (b, c) = (lexicon_b(), lexicon_c());
    let broken = c.without(&c.items()[8]);
    let mut st = InferenceState::for_corpus(&corpus, InferenceConfig::default()).unwrap();
    let mut broken_unsat_at = None;
    let mut external = Vec::new();
    let z3_ok = z3_available();
    for (i, s) in corpus.iter().enumerate() {
        st.consume(s).unwrap();
        let verdicts: Vec<bool> = [&c, &b, &broken].iter().map(|l| st.assert_lexicon(l).unwrap()).collect();
        if !verdicts[2] && broken_unsat_at.is_none() {
            broken_unsat_at = Some(i + 1);
        }
        if i < 3 && z3_ok {
            for (lex, &builtin) in [&c, &b, &broken].iter().zip(&verdicts) {
                let ext = z3(&export_smtlib(&pinned_problem(&st, lex)));
                let want = if builtin { "sat" } else { "unsat" };
                external.push(ext == want);
            }
        }
    }
    let c_sat = st.assert_lexicon(&c).unwrap();
    let b_sat = st.assert_lexicon(&b).unwrap();
    let elapsed = t0.elapsed();
    let agree = external.iter().filter(|&&x| x).count();
    let ext_detail = if z3_ok {
        format!("z3 agrees on {agree}/{} prefix checks", external.len())
    } else {
        "z3 not found, external check skipped".to_string()
    };
    let detail = format!(
        "C {}, B {} on the full state; C without `{}` UNSAT from prefix {:?}; {ext_detail}; {:.1}s",
        if c_sat { "SAT" } else { "UNSAT" },
        if b_sat { "SAT" } else { "UNSAT" },
        c.items()[8],
        broken_unsat_at,
        elapsed.as_secs_f64()
    );
    let ok = c_sat && b_sat && broken_unsat_at.is_some() && agree == external.len() && elapsed < Duration::from_secs(600);
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c5_desk_scale() -> Verdict {
    let all = corpus();
    let prefix = vec![all[0].clone(), all[4].clone(), all[8].clone()];
    let config = InferenceConfig {
        costs: CostSpec::entries_only(),
        samples: 5,
        ..InferenceConfig::default()
    };
    let res = inference::run(&prefix, &config).map_err(|e| e.to_string())?;
    let opts = config.parse_options();
    for sol in &res.solutions {
        if let Some(s) = prefix.iter().find(|s| !validate(&sol.lexicon, s, opts)) {
            return Err(format!("sampled lexicon fails {:?}", s.text));
        }
    }
    let c = res.solutions[0].values.entries;
    let mut st = InferenceState::new(&vocabulary(&prefix), config.clone()).unwrap();
    st.consume_all(&prefix).unwrap();
    let at_c = st.entries_at_most(c).unwrap();
    let below = st.entries_at_most(c - 1).unwrap();
    let detail = format!(
        "optimum {c} entries, {} sample(s) validate; entries<={c} {}, entries<={} {}",
        res.solutions.len(),
        if at_c { "SAT" } else { "UNSAT" },
        c - 1,
        if below { "SAT" } else { "UNSAT" }
    );
    if at_c && !below && res.optimal {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c6_full_experiment() -> Verdict {
    let corpus = corpus();
    let config = InferenceConfig {
        time_budget: Some(2 * 3600),
        ..InferenceConfig::default()
    };
    let res = inference::run(&corpus, &config).map_err(|e| e.to_string())?;
    inference::self_check(&res, &corpus, config.parse_options()).map_err(|e| e.to_string())?;
    let v = res.solutions[0].values;
    let detail = format!(
        "{} / {} / {} / {} (optimal: {})",
        v.entries, v.lexicon_features, v.parse_features, v.selector_categories, res.optimal
    );
    if res.optimal && v.entries == 15 && v.lexicon_features == 33 && v.parse_features == 125 && v.selector_categories >= 4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

/// Clause check written independently of `Cnf`.
fn verify(clauses: &[Vec<(usize, bool)>], model: &[bool]) -> bool {
    clauses.iter().all(|c| c.iter().any(|&(v, pos)| model[v] == pos))
}

fn c7_solver_suite() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0xacce);
    let mut mismatches = 0;
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..500 {
        let n = rng.gen_range(3..=12);
        let m = (n as f64 * rng.gen_range(3.0..6.0)) as usize;
        let clauses: Vec<Vec<(usize, bool)>> = (0..m)
            .map(|_| (0..3).map(|_| (rng.gen_range(0..n), rng.gen_bool(0.5))).collect())
            .collect();
        let mut cnf = Cnf::new();
        cnf.ensure_vars(n);
        for c in &clauses {
            let lits: Vec<Lit> = c.iter().map(|&(v, p)| Lit::new(Var(v as u32), p)).collect();
            mgsat::sat::ClauseSink::add_clause(&mut cnf, &lits);
        }
        let expected = assignments(n).any(|a| verify(&clauses, &a));
        match solve(&cnf, &[]) {
            Outcome::Sat(model) => {
                sat += 1;
                mismatches += usize::from(!expected || !verify(&clauses, &model));
            }
            Outcome::Unsat(_) => {
                unsat += 1;
                mismatches += usize::from(expected);
            }
            Outcome::Unknown => mismatches += 1,
        }
    }
    let mut card_mismatches = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let bound = rng.gen_range(0..=n);
        let sense = [CardSense::AtMost, CardSense::AtLeast, CardSense::Exactly][rng.gen_range(0..3)];
        let polarity: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
        let mut p = Problem::new();
        let xs: Vec<Var> = (0..n).map(|i| p.named_var(&format!("x{i}"))).collect();
        let lits: Vec<Lit> = xs.iter().zip(&polarity).map(|(&v, &pos)| Lit::new(v, pos)).collect();
        p.add_cardinality(&Cardinality { lits, bound, sense }).unwrap();
        let holds = |a: &[bool]| {
            let k = (0..n).filter(|&i| a[i] == polarity[i]).count();
            match sense {
                CardSense::AtMost => k <= bound,
                CardSense::AtLeast => k >= bound,
                CardSense::Exactly => k == bound,
            }
        };
        let expected = assignments(n).filter(|a| holds(a)).count();
        let got = enumerate_models(p.cnf(), &xs, 1 << 9);
        let all_valid = got.iter().all(|m| holds(m));
        card_mismatches += usize::from(got.len() != expected || !all_valid);
    }
    let detail = format!(
        "3-CNF: {} agree ({sat} sat, {unsat} unsat); cardinality: {}/100 counts agree",
        500 - mismatches,
        100 - card_mismatches
    );
    if mismatches == 0 && card_mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c8_agreement() -> Verdict {
    let corpus = corpus();
    let opts = ParseOptions::default();
    let mut st = InferenceState::for_corpus(&corpus, InferenceConfig::default()).unwrap();
    let (mut pairs, mut failures) = (0, Vec::new());
    'outer: for (k, s) in corpus.iter().enumerate() {
        st.consume(s).unwrap();
        for lex in st.sample_lexicons(3).unwrap() {
            for t in &corpus[..=k] {
                if pairs == 50 {
                    break 'outer;
                }
                pairs += 1;
                if !validate(&lex, t, opts) {
                    failures.push(format!("prefix {} / {:?}", k + 1, t.text));
                }
            }
        }
    }
    let detail = format!("{}/{pairs} decoded pairs validate", pairs - failures.len());
    if pairs == 50 && failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; failing: {failures:?}"))
    }
}
