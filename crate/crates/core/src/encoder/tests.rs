use super::*;
use crate::corpus::{vocabulary, SentenceType};
use crate::fixtures;
use crate::mg::{parse_lexicon_text, print_lexicon_text};
use crate::parser::{validate, ParseOptions};
use crate::sat::{SolveResult, Solver};

fn corpus() -> Vec<AnnotatedSentence> {
    fixtures::table1()
}

fn encode(sents: &[AnnotatedSentence], config: EncoderConfig) -> Encoding {
    let vocab = vocabulary(&corpus());
    let mut enc = Encoding::new(&vocab, config, Vec::<String>::new()).unwrap();
    for s in sents {
        enc.encode_sentence(s).unwrap();
    }
    enc
}

fn solve(enc: &Encoding, assumptions: &[Lit]) -> Option<Vec<bool>> {
    let mut solver = Solver::new();
    solver.add_cnf(enc.problem().cnf());
    match solver.solve(assumptions) {
        SolveResult::Sat => {
            assert!(enc.problem().cnf().is_satisfied_by(solver.model()));
            Some(solver.model().to_vec())
        }
        SolveResult::Unsat => None,
        SolveResult::Unknown => panic!("no budget was set"),
    }
}

fn agrees_with_parser(lex: &Lexicon, s: &AnnotatedSentence) {
    let enc = encode(std::slice::from_ref(s), EncoderConfig::default());
    let pins = enc.pin_lexicon(lex).unwrap();
    let got = solve(&enc, &pins);
    let want = validate(lex, s, ParseOptions::default());
    assert_eq!(got.is_some(), want, "{:?}", s.text);
    if let Some(m) = got {
        assert_eq!(&enc.decode_lexicon(&m).unwrap(), lex);
        let tree = enc.decode_parse(&m, 0).unwrap();
        assert_eq!(tree.surface().unwrap(), s.tokens);
    }
}

#[test]
fn single_sentence_yields_a_valid_lexicon() {
    let s = &corpus()[0];
    let enc = encode(std::slice::from_ref(s), EncoderConfig::default());
    let m = solve(&enc, &[]).expect("satisfiable");
    let lex = enc.decode_lexicon(&m).unwrap();
    assert!(validate(&lex, s, ParseOptions::default()), "{}", print_lexicon_text(&lex));
    let tree = enc.decode_parse(&m, 0).unwrap();
    assert_eq!(tree.surface().unwrap(), s.tokens);
}

#[test]
fn pinned_lexicons_match_the_parser_per_sentence() {
    for lex in [fixtures::lexicon_a(), fixtures::lexicon_b(), fixtures::lexicon_c()] {
        for s in &corpus() {
            agrees_with_parser(&lex, s);
        }
    }
}

#[test]
fn lexicon_c_covers_the_corpus() {
    let enc = encode(&corpus(), EncoderConfig::default());
    let pins = enc.pin_lexicon(&fixtures::lexicon_c()).unwrap();
    let m = solve(&enc, &pins).expect("satisfiable");
    for i in 0..enc.num_sentences() {
        enc.decode_parse(&m, i).unwrap();
    }
}

#[test]
fn strict_matching_rejects_lexicon_a() {
    let config = EncoderConfig {
        relation_match: RelationMatch::Strict,
        ..EncoderConfig::default()
    };
    let enc = encode(&corpus()[..1], config);
    let pins = enc.pin_lexicon(&fixtures::lexicon_a()).unwrap();
    assert!(solve(&enc, &pins).is_none());
    let pins = enc.pin_lexicon(&fixtures::lexicon_c()).unwrap();
    assert!(solve(&enc, &pins).is_some());
}

#[test]
fn no_covert_budget_is_unsat() {
    let config = EncoderConfig {
        bounds: Bounds {
            covert_budget: 0,
            ..Bounds::default()
        },
        ..EncoderConfig::default()
    };
    let enc = encode(&corpus()[..1], config);
    assert!(solve(&enc, &[]).is_none());
}

#[test]
fn a_lone_noun_derives_nothing() {
    let lex = parse_lexicon_text("pizza::~x0").unwrap();
    let enc = encode(&corpus(), EncoderConfig::default());
    let pins = enc.pin_lexicon(&lex).unwrap();
    assert!(solve(&enc, &pins).is_none());
}

#[test]
fn disabled_typing_admits_the_other_complementizer() {
    let s = &corpus()[0];
    let swapped = AnnotatedSentence {
        kind: match s.kind {
            SentenceType::Decl => SentenceType::Intr,
            SentenceType::Intr => SentenceType::Decl,
        },
        ..s.clone()
    };
    let lex = fixtures::lexicon_c();
    let vocab = vocabulary(&corpus());
    let mut strict = Encoding::new(&vocab, EncoderConfig::default(), Vec::<String>::new()).unwrap();
    strict.encode_sentence(&swapped).unwrap();
    let pins = strict.pin_lexicon(&lex).unwrap();
    assert!(solve(&strict, &pins).is_none());
    let mut loose = Encoding::new(&vocab, EncoderConfig::default(), ["typing".to_string()]).unwrap();
    loose.encode_sentence(&swapped).unwrap();
    let pins = loose.pin_lexicon(&lex).unwrap();
    assert!(solve(&loose, &pins).is_some());
}

#[test]
fn unknown_tokens_are_rejected() {
    let mut enc = encode(&[], EncoderConfig::default());
    let s = AnnotatedSentence::new("john ate", SentenceType::Decl, &[]).unwrap();
    assert!(matches!(enc.encode_sentence(&s), Err(EncodeError::UnknownToken { .. })));
}

#[test]
fn pin_order_is_independent_of_input_order() {
    let enc = encode(&[], EncoderConfig::default());
    let lex = fixtures::lexicon_c();
    let reversed = Lexicon::new(lex.items().iter().rev().cloned());
    assert_eq!(enc.pin_lexicon(&lex).unwrap(), enc.pin_lexicon(&reversed).unwrap());
}

#[test]
fn manifest_names_every_group() {
    let enc = encode(&corpus()[..2], EncoderConfig::default());
    let names: Vec<String> = enc.problem().manifest().into_iter().map(|g| g.name).collect();
    for g in SENTENCE_GROUPS {
        assert!(names.contains(&format!("{g}@1")), "{g}");
    }
    for g in LEXICON_GROUPS {
        assert!(names.iter().any(|n| n == g), "{g}");
    }
}
