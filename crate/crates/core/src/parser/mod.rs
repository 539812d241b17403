//! Operational MG semantics: chart parsing, relation extraction and
//! validation of lexicons against annotated sentences.

mod chart;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chart::{Chart, ParseOptions};

use crate::corpus::{AnnotatedSentence, Relation, RelationKind, RelationMatch, SentenceType};
use crate::mg::{DerivationTree, Lexicon, MergeKind, MgError, PhoneticForm};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error(transparent)]
    Mg(#[from] MgError),
}

/// Relations read off a derivation, over overt token positions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSet {
    /// (mover, landing head)
    pub agrees: BTreeSet<(usize, usize)>,
    /// (argument, predicate)
    pub args: BTreeSet<(usize, usize)>,
    pub sentence_type: Option<SentenceType>,
}

impl RelationSet {
    pub fn contains(&self, r: &Relation, mode: RelationMatch) -> bool {
        match mode {
            RelationMatch::Strict => match r.kind {
                RelationKind::Agree => self.agrees.contains(&(r.a, r.b)),
                RelationKind::Arg => self.args.contains(&(r.a, r.b)),
            },
            RelationMatch::Local => [(r.a, r.b), (r.b, r.a)]
                .iter()
                .any(|p| self.agrees.contains(p) || self.args.contains(p)),
        }
    }

    /// Every annotated relation is present and the sentence type matches.
    pub fn satisfies(&self, s: &AnnotatedSentence, mode: RelationMatch) -> bool {
        self.sentence_type == Some(s.kind) && s.relations.iter().all(|r| self.contains(r, mode))
    }

    pub fn len(&self) -> usize {
        self.agrees.len() + self.args.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// All derivations of `tokens` (up to the configured cap) whose root is
/// `C`, whose overt yield is exactly `tokens`, and which contain the
/// complementizer matching `kind`.
pub fn parse(lex: &Lexicon, tokens: &[String], kind: SentenceType, opts: ParseOptions) -> Vec<DerivationTree> {
    if tokens.is_empty() || lex.is_empty() {
        return Vec::new();
    }
    Chart::build(lex, tokens, kind, opts).derivations()
}

/// Surface position of each overt leaf, from the derived yield.
fn positions(tree: &DerivationTree) -> Result<Vec<Option<usize>>, MgError> {
    let replay = tree.replay()?;
    let mut pos = vec![None; tree.nodes().len()];
    let mut next = 0;
    for &leaf in &replay.order {
        if !tree.leaf(leaf).expect("leaf").item.phon.is_covert() {
            pos[leaf] = Some(next);
            next += 1;
        }
    }
    Ok(pos)
}

/// Reads argument structure and agreement off a complete derivation.
///
/// `arg(a, p)`: the phrase headed by overt leaf `a` is externally merged
/// into a projection of overt leaf `p`. `agree(x, y)`: the phrase headed
/// by `x` internally merges into a projection of `y`.
pub fn extract_relations(tree: &DerivationTree) -> Result<RelationSet, MgError> {
    let covert_type = |t: &DerivationTree| {
        t.leaves().find_map(|(_, l)| match l.item.phon {
            PhoneticForm::CovertDecl => Some(SentenceType::Decl),
            PhoneticForm::CovertIntr => Some(SentenceType::Intr),
            PhoneticForm::Overt(_) => None,
        })
    };
    if tree.nodes().len() == 1 {
        return Ok(RelationSet {
            sentence_type: covert_type(tree),
            ..RelationSet::default()
        });
    }
    let pos = positions(tree)?;
    let mut rels = RelationSet {
        sentence_type: covert_type(tree),
        ..RelationSet::default()
    };
    for ev in tree.events() {
        let (Some(dep), Some(head)) = (pos[ev.dependent], pos[ev.head]) else {
            continue;
        };
        match ev.kind {
            MergeKind::External => rels.args.insert((dep, head)),
            MergeKind::Internal => rels.agrees.insert((dep, head)),
        };
    }
    Ok(rels)
}

/// True iff some derivation of the sentence carries all its annotated
/// relations and its sentence type.
pub fn validate(lex: &Lexicon, s: &AnnotatedSentence, opts: ParseOptions) -> bool {
    find_witness(lex, s, opts).is_some()
}

/// A derivation that validates `s`, if any.
pub fn find_witness(lex: &Lexicon, s: &AnnotatedSentence, opts: ParseOptions) -> Option<DerivationTree> {
    parse(lex, &s.tokens, s.kind, opts).into_iter().find(|t| {
        let head = t.leaf(t.head_leaf(t.root())).expect("head is a leaf");
        if opts.covert_root && !head.item.phon.is_covert() {
            return false;
        }
        extract_relations(t)
            .map(|r| r.satisfies(s, opts.relation_match))
            .unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mg::{parse_lexicon_text, HeadMove};

    fn toks(s: &str) -> Vec<String> {
        crate::corpus::tokenize(s)
    }

    fn names(t: &DerivationTree, set: &BTreeSet<(usize, usize)>) -> Vec<(String, String)> {
        let surf = t.surface().unwrap();
        set.iter().map(|&(a, b)| (surf[a].clone(), surf[b].clone())).collect()
    }

    #[test]
    fn lexicon_c_parses_i1() {
        let lex = fixtures::lexicon_c();
        let ds = parse(&lex, &toks("john has eaten pizza"), SentenceType::Decl, ParseOptions::default());
        assert!(!ds.is_empty());
        for d in &ds {
            assert_eq!(d.surface().unwrap(), toks("john has eaten pizza"));
        }
    }

    #[test]
    fn empty_lexicon_has_no_parse() {
        let ds = parse(&Lexicon::default(), &toks("john has eaten pizza"), SentenceType::Decl, ParseOptions::default());
        assert!(ds.is_empty());
        let corpus = fixtures::table1();
        assert!(!validate(&Lexicon::default(), &corpus[0], ParseOptions::default()));
    }

    #[test]
    fn question_relations() {
        let lex = fixtures::lexicon_c();
        let ds = parse(&lex, &toks("what was sally eating"), SentenceType::Intr, ParseOptions::default());
        assert!(!ds.is_empty());
        let d = &ds[0];
        let rels = extract_relations(d).unwrap();
        assert_eq!(rels.sentence_type, Some(SentenceType::Intr));
        let args = names(d, &rels.args);
        assert!(args.contains(&("what".into(), "eating".into())));
        assert!(args.contains(&("sally".into(), "eating".into())));
        assert_eq!(names(d, &rels.agrees), [("sally".to_string(), "was".to_string())]);
        assert_eq!(d.head_moves().len(), 1);
        assert_eq!(d.head_moves()[0].direction, HeadMove::Left);
    }

    #[test]
    fn passive_relations() {
        let lex = fixtures::lexicon_c();
        let ds = parse(&lex, &toks("pizza was eaten"), SentenceType::Decl, ParseOptions::default());
        let rels: Vec<_> = ds.iter().map(|d| (d, extract_relations(d).unwrap())).collect();
        assert!(rels.iter().any(|(d, r)| {
            names(d, &r.args).contains(&("pizza".into(), "eaten".into()))
                && names(d, &r.agrees) == [("pizza".to_string(), "was".to_string())]
        }));
    }

    #[test]
    fn yes_no_question_surface() {
        let lex = fixtures::lexicon_c();
        let ds = parse(&lex, &toks("was pizza eaten"), SentenceType::Intr, ParseOptions::default());
        assert!(!ds.is_empty());
        assert!(ds.iter().all(|d| d.surface().unwrap() == toks("was pizza eaten")));
    }

    #[test]
    fn wrong_order_and_wrong_type_fail() {
        let lex = fixtures::lexicon_c();
        assert!(parse(&lex, &toks("pizza eaten was"), SentenceType::Decl, ParseOptions::default()).is_empty());
        assert!(parse(&lex, &toks("john has eaten pizza"), SentenceType::Intr, ParseOptions::default()).is_empty());
    }

    #[test]
    fn complement_linearizes_right() {
        let lex = parse_lexicon_text("eaten::=x0,~x1\npizza::~x0\neps_decl::=x1,C\n").unwrap();
        let ds = parse(&lex, &toks("eaten pizza"), SentenceType::Decl, ParseOptions::default());
        assert_eq!(ds.len(), 1);
        assert!(parse(&lex, &toks("pizza eaten"), SentenceType::Decl, ParseOptions::default()).is_empty());
    }

    #[test]
    fn derivation_cap_is_respected() {
        let lex = fixtures::lexicon_c();
        let opts = ParseOptions {
            max_derivations: 1,
            ..ParseOptions::default()
        };
        let ds = parse(&lex, &toks("what was sally eating"), SentenceType::Intr, opts);
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn lexicon_c_validates_table1() {
        let lex = fixtures::lexicon_c();
        for s in fixtures::table1() {
            assert!(validate(&lex, &s, ParseOptions::default()), "{}", s.text);
        }
    }

    #[test]
    fn parses_are_sound() {
        let lex = fixtures::lexicon_c();
        for s in fixtures::table1() {
            for d in parse(&lex, &s.tokens, s.kind, ParseOptions::default()) {
                let r = d.replay().unwrap();
                assert!(r.phrasal_moves <= 3 && r.head_moves <= 1);
                assert_eq!(d.surface().unwrap(), s.tokens);
            }
        }
    }

    #[test]
    fn lexicon_a_needs_local_matching() {
        let lex = fixtures::lexicon_a();
        let local = ParseOptions {
            relation_match: RelationMatch::Local,
            ..ParseOptions::default()
        };
        for s in fixtures::table1() {
            assert!(validate(&lex, &s, local), "{}", s.text);
        }
        assert!(!validate(&lex, &fixtures::table1()[0], ParseOptions::default()));
    }

    #[test]
    fn lexicon_c_validates_under_every_reading() {
        let lex = fixtures::lexicon_c();
        let loose = ParseOptions {
            relation_match: RelationMatch::Local,
            covert_root: false,
            ..ParseOptions::default()
        };
        for s in fixtures::table1() {
            assert!(validate(&lex, &s, loose), "{}", s.text);
        }
        let strict = ParseOptions::default();
        for s in fixtures::table1() {
            assert!(validate(&lex, &s, strict), "{}", s.text);
        }
    }
}
