//! Minimalist Grammar value types: features, lexical items, lexicons and
//! derivation trees.

pub mod derivation;
pub mod feature;
pub mod lexicon;
pub mod text;

use thiserror::Error;

pub use derivation::{DerivationTree, HeadMoveLink, Leaf, MergeEvent, MergeKind, Node, NodeId, Replay};
pub use feature::{check_external_merge, check_internal_merge, Category, Feature, FeatureKind, HeadMove};
pub use lexicon::{LexicalItem, Lexicon, PhoneticForm};
pub use text::{parse_item, parse_lexicon_text, print_lexicon_text};

#[derive(Debug, Error)]
pub enum MgError {
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<MgError>,
    },
    #[error("malformed lexical item: {0}")]
    Malformed(String),
    #[error("unknown category symbol in {0:?}")]
    UnknownCategory(String),
    #[error("invalid overt token {0:?}")]
    BadToken(String),
    #[error("feature order: {0}")]
    FeatureOrder(String),
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
}
