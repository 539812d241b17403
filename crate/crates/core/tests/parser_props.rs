//! Feature and parser properties over generated inputs.

use mgsat::fixtures::{lexicon_a, lexicon_b, lexicon_c, table1};
use mgsat::mg::{check_external_merge, check_internal_merge, parse_lexicon_text, print_lexicon_text, Category, Feature, HeadMove};
use mgsat::parser::{extract_relations, parse, ParseOptions};
use mgsat::{Lexicon, SentenceType};
use proptest::prelude::*;

fn arb_feature() -> impl Strategy<Value = Feature> {
    let cat = (0u8..6).prop_map(Category);
    let hm = prop_oneof![Just(HeadMove::None), Just(HeadMove::Left), Just(HeadMove::Right)];
    prop_oneof![
        (cat.clone(), hm).prop_map(|(c, h)| Feature::Selector(c, h)),
        cat.clone().prop_map(Feature::Licensor),
        cat.clone().prop_map(Feature::Selectee),
        cat.prop_map(Feature::Licensee),
        Just(Feature::Complete),
    ]
}

/// Lexicon-C plus items drawn from all three published lexicons.
fn pool() -> Vec<String> {
    let mut lines: Vec<String> = [lexicon_a(), lexicon_b(), lexicon_c()]
        .iter()
        .flat_map(|l| print_lexicon_text(l).lines().map(str::to_string).collect::<Vec<_>>())
        .collect();
    lines.sort();
    lines.dedup();
    lines
}

fn arb_lexicon() -> impl Strategy<Value = Lexicon> {
    let n = pool().len();
    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=10).prop_map(|idx| {
        let pool = pool();
        let mut text = print_lexicon_text(&lexicon_c());
        for i in idx {
            text.push_str(&pool[i]);
            text.push('\n');
        }
        parse_lexicon_text(&text).unwrap()
    })
}

proptest! {
    #[test]
    fn merge_kinds_are_exclusive(a in arb_feature(), b in arb_feature()) {
        prop_assert!(!(check_external_merge(&a, &b) && check_internal_merge(&a, &b)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parses_are_sound(lex in arb_lexicon(), sentence in 0usize..11, flip in any::<bool>()) {
        let s = &table1()[sentence];
        let kind = match (s.kind, flip) {
            (k, false) => k,
            (SentenceType::Decl, true) => SentenceType::Intr,
            (SentenceType::Intr, true) => SentenceType::Decl,
        };
        let opts = ParseOptions::default();
        for t in parse(&lex, &s.tokens, kind, opts) {
            prop_assert!(t.replay().is_ok());
            prop_assert_eq!(t.surface().unwrap(), s.tokens.clone());
            let rels = extract_relations(&t).unwrap();
            prop_assert_eq!(rels.sentence_type, Some(kind));
            prop_assert!(t.leaves().all(|(_, l)| lex.contains(&l.item)));
            prop_assert!(t.head_moves().len() <= opts.bounds.max_head_moves);
        }
    }

    #[test]
    fn repeated_parses_are_identical(lex in arb_lexicon(), sentence in 0usize..11) {
        let s = &table1()[sentence];
        let opts = ParseOptions::default();
        let keys = || parse(&lex, &s.tokens, s.kind, opts).iter().map(|t| t.canonical_key()).collect::<Vec<_>>();
        prop_assert_eq!(keys(), keys());
    }
}
