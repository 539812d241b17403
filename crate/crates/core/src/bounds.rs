use serde::{Deserialize, Serialize};

/// Size limits shared by the parser and the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    /// Internal merges per derivation.
    pub max_phrasal_moves: usize,
    /// Head movements per derivation.
    pub max_head_moves: usize,
    /// Features per lexical item, `C` not counted.
    pub max_feats: usize,
    /// Covert complementizer leaves per derivation.
    pub covert_budget: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_phrasal_moves: 3,
            max_head_moves: 1,
            max_feats: 3,
            covert_budget: 1,
        }
    }
}
