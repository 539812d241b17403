//! Published example lexicons and the annotated eleven-sentence corpus,
//! transcribed as text fixtures.

/// A large inferred lexicon (21 items).
pub const LEXICON_A: &str = "\
eaten::<=x2,+l,~x1
eaten::=x2,+l,~x2
eating::<=x2,+l,~x1
eating::=x2,+l,~x2
has::~x0,-l
has::=x2,+r,~x1
john::=x0,~x2
john::~x2,-l,-r
pizza::=x2,~x2
pizza::=x2,+l,~x2
sally::~x2,-l,-r
sally::=x2,+l,~x2
was::~x2,-l,-l
was::=x2,+r,~x1
what::=x1,~x1
what::=x2,+l,~x1
who::~x2,-l,-r
eps_decl::<=x2,C
eps_decl::=x1,C
eps_intr::=x1,C
eps_intr::<=x1,C
";

/// An entry-minimal lexicon, exactly as printed (15 lines; the two `was`
/// lines are identical).
pub const LEXICON_B: &str = "\
eaten::=x2,~x2
eaten::=x2,+r,~x2
eating::=x2,~x2
has::=x1,+l,~x2
has::=x2,+l,~x2
has::~x2,-r,-r
john::=x2,+r,~x2
pizza::=x2,+r,~x2
sally::=x2,+r,~x2
was::=x2,+l,~x2
was::=x2,+l,~x2
what::~x2,-r,-l
who::=x2,+r,~x0
eps_decl::<=x2,C
eps_intr::=x2,C
eps_intr::<=x0,C
";

/// The lexicon optimal under all three cost functions (15 items).
pub const LEXICON_C: &str = "\
eaten::=x3,~x4
eaten::=x0,=x0,~x1
eating::=x0,=x0,~x4
has::=x1,+l,~x2
john::~x0,-l
pizza::~x0
pizza::~x3,-l
sally::~x0,-l
was::=x4,+l,~x2
what::~x0,-r
what::~x3,-l,-r
who::~x0,-l,-r
eps_decl::=x2,C
eps_intr::<=x2,C
eps_intr::<=x2,+r,C
";

/// The annotated input sequence, one JSON record per line.
pub const TABLE1_JSONL: &str = r#"{"text": "John has eaten pizza.", "type": "decl", "relations": [{"kind": "agree", "a": "John", "b": "has"}, {"kind": "arg", "a": "John", "b": "eaten"}, {"kind": "arg", "a": "pizza", "b": "eaten"}]}
{"text": "Has Sally eaten pizza?", "type": "intr", "relations": [{"kind": "agree", "a": "Sally", "b": "has"}, {"kind": "arg", "a": "Sally", "b": "eaten"}, {"kind": "arg", "a": "pizza", "b": "eaten"}]}
{"text": "What has John eaten?", "type": "intr", "relations": [{"kind": "agree", "a": "John", "b": "has"}, {"kind": "arg", "a": "John", "b": "eaten"}, {"kind": "arg", "a": "What", "b": "eaten"}]}
{"text": "Who has eaten pizza?", "type": "intr", "relations": [{"kind": "agree", "a": "Who", "b": "has"}, {"kind": "arg", "a": "Who", "b": "eaten"}, {"kind": "arg", "a": "pizza", "b": "eaten"}]}
{"text": "Sally was eating pizza.", "type": "decl", "relations": [{"kind": "agree", "a": "Sally", "b": "was"}, {"kind": "arg", "a": "Sally", "b": "eating"}, {"kind": "arg", "a": "pizza", "b": "eating"}]}
{"text": "Was John eating pizza?", "type": "intr", "relations": [{"kind": "agree", "a": "John", "b": "was"}, {"kind": "arg", "a": "John", "b": "eating"}, {"kind": "arg", "a": "pizza", "b": "eating"}]}
{"text": "What was Sally eating?", "type": "intr", "relations": [{"kind": "agree", "a": "Sally", "b": "was"}, {"kind": "arg", "a": "Sally", "b": "eating"}, {"kind": "arg", "a": "What", "b": "eating"}]}
{"text": "Who was eating pizza?", "type": "intr", "relations": [{"kind": "agree", "a": "Who", "b": "was"}, {"kind": "arg", "a": "Who", "b": "eating"}, {"kind": "arg", "a": "pizza", "b": "eating"}]}
{"text": "Pizza was eaten.", "type": "decl", "relations": [{"kind": "agree", "a": "pizza", "b": "was"}, {"kind": "arg", "a": "pizza", "b": "eaten"}]}
{"text": "Was pizza eaten?", "type": "intr", "relations": [{"kind": "agree", "a": "pizza", "b": "was"}, {"kind": "arg", "a": "pizza", "b": "eaten"}]}
{"text": "What was eaten?", "type": "intr", "relations": [{"kind": "agree", "a": "What", "b": "was"}, {"kind": "arg", "a": "What", "b": "eaten"}]}
"#;

pub fn lexicon_a() -> crate::mg::Lexicon {
    crate::mg::parse_lexicon_text(LEXICON_A).expect("fixture parses")
}

pub fn lexicon_b() -> crate::mg::Lexicon {
    crate::mg::parse_lexicon_text(LEXICON_B).expect("fixture parses")
}

pub fn lexicon_c() -> crate::mg::Lexicon {
    crate::mg::parse_lexicon_text(LEXICON_C).expect("fixture parses")
}

pub fn table1() -> Vec<crate::corpus::AnnotatedSentence> {
    crate::corpus::parse_corpus_jsonl(TABLE1_JSONL).expect("fixture parses")
}
