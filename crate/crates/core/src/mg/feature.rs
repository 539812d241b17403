use std::fmt;

use serde::{Deserialize, Serialize};

/// Index into a bounded category inventory.
///
/// The same newtype is used for selectional categories (rendered `x0`,
/// `x1`, ...) and for licensing categories (rendered as letters, `l` and
/// `r` first). Which inventory an index belongs to is decided by the
/// feature kind that carries it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Category(pub u8);

/// Licensing category names, in index order.
pub const LICENSING_NAMES: &str = "lrabcdefghijkmnopqstuvwxyz";

impl Category {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn selectional_name(self) -> String {
        format!("x{}", self.0)
    }

    pub fn licensing_name(self) -> char {
        LICENSING_NAMES
            .chars()
            .nth(self.index())
            .expect("licensing category out of range")
    }

    pub fn from_licensing_name(c: char) -> Option<Self> {
        LICENSING_NAMES.find(c).map(|i| Category(i as u8))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HeadMove {
    None,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    Selector,
    Licensor,
    Selectee,
    Licensee,
    Complete,
}

/// A syntactic feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Feature {
    /// `=x`, `<=x`, `=>x`
    Selector(Category, HeadMove),
    /// `+f`
    Licensor(Category),
    /// `~x`
    Selectee(Category),
    /// `-f`
    Licensee(Category),
    /// `C`
    Complete,
}

impl Feature {
    pub fn sel(cat: u8) -> Self {
        Feature::Selector(Category(cat), HeadMove::None)
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            Feature::Selector(..) => FeatureKind::Selector,
            Feature::Licensor(_) => FeatureKind::Licensor,
            Feature::Selectee(_) => FeatureKind::Selectee,
            Feature::Licensee(_) => FeatureKind::Licensee,
            Feature::Complete => FeatureKind::Complete,
        }
    }

    pub fn category(&self) -> Option<Category> {
        match *self {
            Feature::Selector(c, _)
            | Feature::Licensor(c)
            | Feature::Selectee(c)
            | Feature::Licensee(c) => Some(c),
            Feature::Complete => None,
        }
    }

    pub fn head_move(&self) -> HeadMove {
        match *self {
            Feature::Selector(_, hm) => hm,
            _ => HeadMove::None,
        }
    }

    /// Selectors and licensors: the features a projecting head consumes.
    pub fn is_positive(&self) -> bool {
        matches!(self, Feature::Selector(..) | Feature::Licensor(_))
    }
}

/// External merge: a selector checks a selectee of the same category.
pub fn check_external_merge(a: &Feature, b: &Feature) -> bool {
    match (a, b) {
        (Feature::Selector(x, _), Feature::Selectee(y)) => x == y,
        _ => false,
    }
}

/// Internal merge: a licensor checks a licensee of the same category.
pub fn check_internal_merge(a: &Feature, b: &Feature) -> bool {
    match (a, b) {
        (Feature::Licensor(x), Feature::Licensee(y)) => x == y,
        _ => false,
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Feature::Selector(c, HeadMove::None) => write!(f, "={}", c.selectional_name()),
            Feature::Selector(c, HeadMove::Left) => write!(f, "<={}", c.selectional_name()),
            Feature::Selector(c, HeadMove::Right) => write!(f, "=>{}", c.selectional_name()),
            Feature::Licensor(c) => write!(f, "+{}", c.licensing_name()),
            Feature::Selectee(c) => write!(f, "~{}", c.selectional_name()),
            Feature::Licensee(c) => write!(f, "-{}", c.licensing_name()),
            Feature::Complete => write!(f, "C"),
        }
    }
}
