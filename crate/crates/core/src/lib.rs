//! Minimalist Grammar parsing and lexicon inference by SAT solving.
//!
//! The crate has two views of MG derivations. [`parser`] is operational:
//! an agenda-driven chart parser. [`encoder`] is axiomatic: bounded
//! derivations compiled into propositional constraints that share one
//! lexicon, solved by the CDCL solver in [`sat`]. [`inference`] drives
//! the encoder over a corpus and optimizes lexicon cost.

pub mod bounds;
pub mod corpus;
pub mod encoder;
pub mod fixtures;
pub mod inference;
pub mod ir;
pub mod mg;
pub mod parser;
pub mod sat;

pub use bounds::Bounds;
pub use corpus::{AnnotatedSentence, Relation, RelationKind, RelationMatch, SentenceType};
pub use mg::{DerivationTree, Feature, LexicalItem, Lexicon, PhoneticForm};
