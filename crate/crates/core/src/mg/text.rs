//! Line-oriented lexicon text format: `phon::f1,f2,...`.

use super::feature::{Category, Feature, HeadMove};
use super::lexicon::{LexicalItem, Lexicon, PhoneticForm};
use super::MgError;

pub fn parse_lexicon_text(text: &str) -> Result<Lexicon, MgError> {
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let item = parse_item(line).map_err(|e| MgError::Line {
            line: idx + 1,
            source: Box::new(e),
        })?;
        items.push(item);
    }
    Ok(Lexicon::new(items))
}

pub fn parse_item(line: &str) -> Result<LexicalItem, MgError> {
    let (phon, feats) = line
        .split_once("::")
        .ok_or_else(|| MgError::Malformed(format!("missing '::' in {line:?}")))?;
    let phon = match phon.trim() {
        "eps_decl" => PhoneticForm::CovertDecl,
        "eps_intr" => PhoneticForm::CovertIntr,
        p => PhoneticForm::overt(p)?,
    };
    let feats = feats
        .split(',')
        .map(|f| parse_feature(f.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    LexicalItem::new(phon, feats)
}

pub fn parse_feature(s: &str) -> Result<Feature, MgError> {
    let unknown = || MgError::UnknownCategory(s.to_string());
    if s == "C" {
        return Ok(Feature::Complete);
    }
    let selectional = |rest: &str| -> Result<Category, MgError> {
        let n = rest.strip_prefix('x').ok_or_else(unknown)?;
        if n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        n.parse::<u8>().map(Category).map_err(|_| unknown())
    };
    let licensing = |rest: &str| -> Result<Category, MgError> {
        let mut chars = rest.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Category::from_licensing_name(c).ok_or_else(unknown),
            _ => Err(unknown()),
        }
    };
    if let Some(rest) = s.strip_prefix("<=") {
        Ok(Feature::Selector(selectional(rest)?, HeadMove::Left))
    } else if let Some(rest) = s.strip_prefix("=>") {
        Ok(Feature::Selector(selectional(rest)?, HeadMove::Right))
    } else if let Some(rest) = s.strip_prefix('=') {
        Ok(Feature::Selector(selectional(rest)?, HeadMove::None))
    } else if let Some(rest) = s.strip_prefix('~') {
        Ok(Feature::Selectee(selectional(rest)?))
    } else if let Some(rest) = s.strip_prefix('+') {
        Ok(Feature::Licensor(licensing(rest)?))
    } else if let Some(rest) = s.strip_prefix('-') {
        Ok(Feature::Licensee(licensing(rest)?))
    } else {
        Err(MgError::Malformed(format!("unrecognised feature {s:?}")))
    }
}

/// Canonical text: one item per line, items sorted by (phon, features).
pub fn print_lexicon_text(lex: &Lexicon) -> String {
    let mut out = String::new();
    for item in lex.items() {
        out.push_str(&item.to_string());
        out.push('\n');
    }
    out
}
