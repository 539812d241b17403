use super::*;
use crate::fixtures;
use crate::mg::{Category, Feature, LexicalItem};

fn corpus() -> Vec<AnnotatedSentence> {
    fixtures::table1()
}

fn state(sents: &[AnnotatedSentence], config: InferenceConfig) -> InferenceState {
    let mut st = InferenceState::for_corpus(&corpus(), config).unwrap();
    st.consume_all(sents).unwrap();
    st
}

fn rename(lex: &Lexicon, perm: &[u8]) -> Lexicon {
    let map = |c: Category| Category(perm[c.index()]);
    lex.items()
        .iter()
        .map(|it| {
            let feats = it
                .feats
                .iter()
                .map(|f| match *f {
                    Feature::Selector(c, h) => Feature::Selector(map(c), h),
                    Feature::Selectee(c) => Feature::Selectee(map(c)),
                    other => other,
                })
                .collect();
            LexicalItem::new(it.phon.clone(), feats).unwrap()
        })
        .collect()
}

#[test]
fn samples_are_distinct_and_valid() {
    let s = &corpus()[..1];
    let mut st = state(s, InferenceConfig::default());
    let lexes = st.sample_lexicons(4).unwrap();
    assert_eq!(lexes.len(), 4);
    let printed: BTreeSet<String> = lexes.iter().map(print_lexicon_text).collect();
    assert_eq!(printed.len(), 4);
    for lex in &lexes {
        assert!(validate(lex, &s[0], ParseOptions::default()));
    }
}

#[test]
fn first_unsatisfiable_sentence_is_named() {
    let mut config = InferenceConfig::default();
    config.encoder.max_items = 5;
    let mut st = InferenceState::for_corpus(&corpus(), config).unwrap();
    match st.consume_all(&corpus()[..2]) {
        Err(InferenceError::Inconsistent { index, text }) => {
            assert_eq!(index, 1);
            assert_eq!(text, corpus()[1].text);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn optimum_is_certified_by_unsat() {
    let s = &corpus()[..1];
    let res = run(s, &InferenceConfig::default()).unwrap();
    assert!(res.optimal);
    let v = res.solutions[0].values;
    let mut st = state(s, InferenceConfig::default());
    assert!(st.entries_at_most(v.entries).unwrap());
    assert!(!st.entries_at_most(v.entries - 1).unwrap());
    self_check(&res, s, ParseOptions::default()).unwrap();
}

#[test]
fn each_objective_is_lexicographically_optimal() {
    let s = &corpus()[..2];
    let res = run(s, &InferenceConfig::default()).unwrap();
    let v = res.solutions[0].values;
    let (e, f, c) = (v.entries, v.lexicon_features + v.parse_features, v.selector_categories);
    let mut st = state(s, InferenceConfig::default());
    use CostTerm::*;
    assert!(st.admits(&[(Entries, e), (Features, f), (SelectorCategories, c)]).unwrap());
    assert!(!st.admits(&[(Entries, e - 1)]).unwrap());
    assert!(!st.admits(&[(Entries, e), (Features, f - 1)]).unwrap());
    assert!(!st.admits(&[(Entries, e), (Features, f), (SelectorCategories, c + 1)]).unwrap());
}

#[test]
fn pinned_lexicon_c_is_the_only_sample() {
    let mut st = state(&corpus()[..3], InferenceConfig::default());
    let lex = fixtures::lexicon_c();
    let pins = st.encoding().pin_lexicon(&lex).unwrap();
    let got = st.sample_pinned(10, &pins).unwrap();
    assert_eq!(got, vec![lex]);
}

#[test]
fn category_renaming_preserves_solutions() {
    let mut st = state(&corpus(), InferenceConfig::default());
    let lex = fixtures::lexicon_c();
    for perm in [[1u8, 0, 2, 3, 4], [4, 3, 2, 1, 0], [2, 0, 1, 4, 3]] {
        assert!(st.assert_lexicon(&rename(&lex, &perm)).unwrap());
    }
}

#[test]
fn later_states_refine_earlier_ones() {
    let mut late = state(&corpus()[..2], InferenceConfig::default());
    let mut early = state(&corpus()[..1], InferenceConfig::default());
    for lex in late.sample_lexicons(5).unwrap() {
        assert!(early.assert_lexicon(&lex).unwrap());
    }
}

#[test]
fn group_names_are_checked() {
    assert!(check_group("smc", 3).is_ok());
    assert!(check_group("relations@2", 3).is_ok());
    assert!(check_group("symmetry", 3).is_ok());
    for bad in ["relations@3", "definitions", "tables", "nonsense", "smc@x"] {
        assert!(matches!(check_group(bad, 3), Err(InferenceError::UnknownGroup(_))), "{bad}");
    }
}

#[test]
fn dropping_typing_never_raises_the_optimum() {
    let s = &corpus()[..2];
    let rep = ablate(s, &InferenceConfig::default(), "typing").unwrap();
    let (b, a) = (rep.baseline.values.unwrap(), rep.ablated.values.unwrap());
    assert!(a.entries <= b.entries);
    if a.entries == b.entries {
        assert!(a.lexicon_features + a.parse_features <= b.lexicon_features + b.parse_features);
    }
}

#[test]
fn empty_corpus_is_an_error() {
    assert!(matches!(run(&[], &InferenceConfig::default()), Err(InferenceError::EmptyCorpus)));
}

#[test]
fn budget_exhaustion_is_reported() {
    let config = InferenceConfig {
        conflict_budget: Some(1),
        ..InferenceConfig::default()
    };
    match run(&corpus(), &config) {
        Err(InferenceError::Budget) => {}
        Ok(r) => assert!(!r.optimal),
        Err(e) => panic!("{e}"),
    }
}
