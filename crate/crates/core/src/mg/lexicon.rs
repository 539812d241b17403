use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::feature::{Feature, FeatureKind};
use super::MgError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhoneticForm {
    Overt(String),
    CovertDecl,
    CovertIntr,
}

impl PhoneticForm {
    /// Builds an overt form, lowercasing the token.
    pub fn overt(token: &str) -> Result<Self, MgError> {
        if token.is_empty() || token.contains(char::is_whitespace) || token.contains("::") {
            return Err(MgError::BadToken(token.to_string()));
        }
        Ok(PhoneticForm::Overt(token.to_lowercase()))
    }

    pub fn is_covert(&self) -> bool {
        !matches!(self, PhoneticForm::Overt(_))
    }

    pub fn as_overt(&self) -> Option<&str> {
        match self {
            PhoneticForm::Overt(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for PhoneticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhoneticForm::Overt(s) => f.write_str(s),
            PhoneticForm::CovertDecl => f.write_str("eps_decl"),
            PhoneticForm::CovertIntr => f.write_str("eps_intr"),
        }
    }
}

/// A phonetic form paired with a feature sequence.
///
/// Features follow the canonical order: selectors and licensors, then at
/// most one selectee, then licensees, then optionally `C`. Licensees
/// require a selectee.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LexicalItem {
    pub phon: PhoneticForm,
    pub feats: Vec<Feature>,
}

impl LexicalItem {
    pub fn new(phon: PhoneticForm, feats: Vec<Feature>) -> Result<Self, MgError> {
        check_feature_order(&feats)?;
        Ok(LexicalItem { phon, feats })
    }

    /// Number of features, not counting `C`.
    pub fn feature_count(&self) -> usize {
        self.feats.iter().filter(|f| **f != Feature::Complete).count()
    }

    pub fn has_complete(&self) -> bool {
        self.feats.last() == Some(&Feature::Complete)
    }

    pub fn selectee(&self) -> Option<Feature> {
        self.feats.iter().copied().find(|f| f.kind() == FeatureKind::Selectee)
    }
}

fn check_feature_order(feats: &[Feature]) -> Result<(), MgError> {
    let bad = |msg: &str| Err(MgError::FeatureOrder(msg.to_string()));
    // 0 = positive, 1 = after selectee/licensees, 2 = after C
    let mut stage = 0;
    let mut seen_selectee = false;
    let mut counted = 0;
    for f in feats {
        match f.kind() {
            FeatureKind::Selector | FeatureKind::Licensor => {
                if stage > 0 {
                    return bad("selector or licensor after selectee");
                }
                counted += 1;
            }
            FeatureKind::Selectee => {
                if stage > 0 {
                    return bad("more than one selectee, or selectee after licensee");
                }
                stage = 1;
                seen_selectee = true;
                counted += 1;
            }
            FeatureKind::Licensee => {
                if !seen_selectee {
                    return bad("licensee without a preceding selectee");
                }
                if stage == 2 {
                    return bad("feature after C");
                }
                counted += 1;
            }
            FeatureKind::Complete => {
                if stage == 2 {
                    return bad("C occurs more than once");
                }
                stage = 2;
            }
        }
        if stage == 2 && f.kind() != FeatureKind::Complete {
            return bad("feature after C");
        }
    }
    if counted == 0 {
        return bad("item needs at least one feature besides C");
    }
    Ok(())
}

impl fmt::Display for LexicalItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::", self.phon)?;
        for (i, feat) in self.feats.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{feat}")?;
        }
        Ok(())
    }
}

/// A finite set of lexical items, kept in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lexicon {
    items: Vec<LexicalItem>,
}

impl Lexicon {
    pub fn new(items: impl IntoIterator<Item = LexicalItem>) -> Self {
        let set: BTreeSet<LexicalItem> = items.into_iter().collect();
        Lexicon {
            items: set.into_iter().collect(),
        }
    }

    pub fn items(&self) -> &[LexicalItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, item: &LexicalItem) -> bool {
        self.items.binary_search(item).is_ok()
    }

    /// Selectional plus licensing features over all items, `C` excluded.
    pub fn feature_count(&self) -> usize {
        self.items.iter().map(LexicalItem::feature_count).sum()
    }

    /// Number of distinct selector categories in the lexicon.
    pub fn distinct_selectors(&self) -> usize {
        self.items
            .iter()
            .flat_map(|it| it.feats.iter())
            .filter_map(|f| match f {
                Feature::Selector(c, _) => Some(*c),
                _ => None,
            })
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn without(&self, item: &LexicalItem) -> Lexicon {
        Lexicon::new(self.items.iter().filter(|it| *it != item).cloned())
    }
}

impl FromIterator<LexicalItem> for Lexicon {
    fn from_iter<T: IntoIterator<Item = LexicalItem>>(iter: T) -> Self {
        Lexicon::new(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mg::feature::{Category, HeadMove};

    #[test]
    fn ordering_rules() {
        let p = PhoneticForm::overt("who").unwrap();
        let l = Feature::Licensee(Category(0));
        let r = Feature::Licensee(Category(1));
        assert!(LexicalItem::new(p.clone(), vec![l, r]).is_err());
        assert!(LexicalItem::new(p.clone(), vec![Feature::Selectee(Category(0)), l, r]).is_ok());
        assert!(LexicalItem::new(
            p.clone(),
            vec![Feature::Selectee(Category(0)), Feature::Selectee(Category(1))]
        )
        .is_err());
        assert!(LexicalItem::new(p.clone(), vec![Feature::Complete]).is_err());
        assert!(LexicalItem::new(p.clone(), vec![Feature::sel(2), Feature::Complete, l]).is_err());
        assert!(LexicalItem::new(
            p.clone(),
            vec![Feature::sel(2), Feature::Complete, Feature::Complete]
        )
        .is_err());
        let hm = Feature::Selector(Category(2), HeadMove::Left);
        assert!(LexicalItem::new(PhoneticForm::CovertIntr, vec![hm, Feature::Complete]).is_ok());
    }

    #[test]
    fn overt_forms_are_lowercased_and_checked() {
        assert_eq!(
            PhoneticForm::overt("John").unwrap(),
            PhoneticForm::Overt("john".into())
        );
        assert!(PhoneticForm::overt("").is_err());
        assert!(PhoneticForm::overt("a b").is_err());
        assert!(PhoneticForm::overt("a::b").is_err());
    }

    #[test]
    fn lexicon_dedups() {
        let it = LexicalItem::new(
            PhoneticForm::overt("pizza").unwrap(),
            vec![Feature::Selectee(Category(0))],
        )
        .unwrap();
        let lex = Lexicon::new(vec![it.clone(), it.clone()]);
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.feature_count(), 1);
    }
}
