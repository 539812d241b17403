//! Annotated sentences and the line-delimited JSON corpus format.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentenceType {
    Decl,
    Intr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Agree,
    Arg,
}

/// How an annotated relation is matched against a derivation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationMatch {
    /// The two heads are the two arguments of one merge step, of either
    /// kind and in either order.
    Local,
    /// `arg(a, p)`: `a`'s phrase externally merged into `p`'s projection.
    /// `agree(x, y)`: `x`'s phrase internally merged into `y`'s projection.
    #[default]
    Strict,
}

/// A relation between two token positions of a sentence.
///
/// For `Arg`, `a` is the argument and `b` the predicate; for `Agree`, `a`
/// is the phrase that moves and `b` the head it lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub text: String,
    pub tokens: Vec<String>,
    pub kind: SentenceType,
    pub relations: Vec<Relation>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Record { line: usize, msg: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub text: String,
    #[serde(rename = "type")]
    pub kind: SentenceType,
    #[serde(default)]
    pub relations: Vec<RecordRelation>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordRelation {
    pub kind: RelationKind,
    pub a: String,
    pub b: String,
}

/// Splits on whitespace, strips surrounding punctuation and lowercases.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

impl AnnotatedSentence {
    /// Builds a sentence, resolving relation tokens to positions. Each
    /// annotated token must occur exactly once in the sentence.
    pub fn new(
        text: &str,
        kind: SentenceType,
        relations: &[(RelationKind, &str, &str)],
    ) -> Result<Self, String> {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return Err("empty sentence".into());
        }
        let locate = |w: &str| -> Result<usize, String> {
            let w = w.to_lowercase();
            let hits: Vec<usize> = tokens
                .iter()
                .enumerate()
                .filter(|(_, t)| **t == w)
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [i] => Ok(*i),
                [] => Err(format!("annotation token {w:?} does not occur in {text:?}")),
                _ => Err(format!("annotation token {w:?} is ambiguous in {text:?}")),
            }
        };
        let mut rels = Vec::new();
        for &(kind, a, b) in relations {
            let (a, b) = (locate(a)?, locate(b)?);
            if a == b {
                return Err(format!("relation between a token and itself in {text:?}"));
            }
            rels.push(Relation { kind, a, b });
        }
        rels.sort();
        rels.dedup();
        Ok(AnnotatedSentence {
            text: text.to_string(),
            tokens,
            kind,
            relations: rels,
        })
    }

    pub fn from_record(rec: &CorpusRecord) -> Result<Self, String> {
        let rels: Vec<(RelationKind, &str, &str)> = rec
            .relations
            .iter()
            .map(|r| (r.kind, r.a.as_str(), r.b.as_str()))
            .collect();
        AnnotatedSentence::new(&rec.text, rec.kind, &rels)
    }

    pub fn to_record(&self) -> CorpusRecord {
        CorpusRecord {
            text: self.text.clone(),
            kind: self.kind,
            relations: self
                .relations
                .iter()
                .map(|r| RecordRelation {
                    kind: r.kind,
                    a: self.tokens[r.a].clone(),
                    b: self.tokens[r.b].clone(),
                })
                .collect(),
        }
    }

    pub fn describe_relation(&self, r: &Relation) -> String {
        let name = match r.kind {
            RelationKind::Agree => "agree",
            RelationKind::Arg => "arg",
        };
        format!("{name}({}, {})", self.tokens[r.a], self.tokens[r.b])
    }
}

/// Parses line-delimited JSON records; blank lines are skipped.
pub fn parse_corpus_jsonl(text: &str) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| CorpusError::Record { line: i + 1, msg };
        let rec: CorpusRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        out.push(AnnotatedSentence::from_record(&rec).map_err(err)?);
    }
    Ok(out)
}

pub fn corpus_to_jsonl(corpus: &[AnnotatedSentence]) -> String {
    let mut out = String::new();
    for s in corpus {
        out.push_str(&serde_json::to_string(&s.to_record()).expect("serializable"));
        out.push('\n');
    }
    out
}

/// All overt word forms of a corpus, in first-occurrence order.
pub fn vocabulary(corpus: &[AnnotatedSentence]) -> Vec<String> {
    let mut vocab: Vec<String> = Vec::new();
    for s in corpus {
        for t in &s.tokens {
            if !vocab.contains(t) {
                vocab.push(t.clone());
            }
        }
    }
    vocab
}
