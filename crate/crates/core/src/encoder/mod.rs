//! Propositional encoding of "some lexicon of bounded size derives every
//! sentence of a corpus with its annotations".
//!
//! The lexicon is a row of item slots. Each slot carries a phonetic form
//! (or `unused`) and a grid of feature cells, one per position. Each
//! sentence gets one leaf per token plus a covert leaf; every leaf picks a
//! slot and copies its grid. A derivation is described by where each
//! leaf's phrase is selected (`par`) and where each licensee is checked
//! (`land`), both over (head leaf, feature position) pairs.

mod sentence;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::Bounds;
use crate::corpus::{AnnotatedSentence, RelationMatch};
use crate::ir::{IrError, Problem, SortId, TableId};
use crate::mg::{Category, DerivationTree, Feature, HeadMove, LexicalItem, Lexicon, PhoneticForm};
use crate::sat::{ClauseSink, Lit, Var};

use sentence::SentenceVars;

pub(crate) const K_NONE: usize = 0;
pub(crate) const K_SEL: usize = 1;
pub(crate) const K_LIC: usize = 2;
pub(crate) const K_SELEE: usize = 3;
pub(crate) const K_LICENSEE: usize = 4;
const KINDS: usize = 5;

pub(crate) const HM_NONE: usize = 0;
pub(crate) const HM_LEFT: usize = 1;
pub(crate) const HM_RIGHT: usize = 2;
const HMS: usize = 3;

/// Axiom groups of each sentence, in the order they are emitted. A group
/// name `g` disables `g@i` for every sentence `i`.
pub const SENTENCE_GROUPS: &[&str] = &[
    "insertion",
    "tree",
    "headedness",
    "features",
    "completion",
    "headmove",
    "bounds",
    "smc",
    "linearization",
    "typing",
    "relations",
];

/// Lexicon-level groups.
pub const LEXICON_GROUPS: &[&str] = &["lexicon", "symmetry"];

/// Groups holding only auxiliary definitions; they cannot be ablated.
pub const DEFINITION_GROUPS: &[&str] = &["tables", "definitions"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncoderConfig {
    pub bounds: Bounds,
    /// Number of lexical item slots.
    pub max_items: usize,
    /// Selectional categories `x0..`.
    pub categories: usize,
    /// Licensing categories `l, r, ..`.
    pub licensing_categories: usize,
    pub relation_match: RelationMatch,
    /// The covert complementizer heads every derivation.
    pub covert_root: bool,
    /// Used slots form a prefix in strictly decreasing order.
    pub slot_symmetry: bool,
    /// Selectional categories in use form a prefix `x0..xk`.
    pub category_symmetry: bool,
    /// Reserved: labelling with a fixed universal category inventory.
    pub universal_categories: bool,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            bounds: Bounds::default(),
            max_items: 24,
            categories: 5,
            licensing_categories: 2,
            relation_match: RelationMatch::Strict,
            covert_root: true,
            slot_symmetry: true,
            category_symmetry: false,
            universal_categories: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("token {token:?} is not in the encoder vocabulary")]
    UnknownToken { token: String },
    #[error("lexical item {item} does not fit the encoder bounds: {why}")]
    ItemOutOfBounds { item: String, why: String },
    #[error("lexicon has {items} items but only {slots} slots")]
    TooManyItems { items: usize, slots: usize },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("no sentence with index {0}")]
    NoSentence(usize),
    #[error("model does not decode to a valid derivation: {0}")]
    Decode(String),
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// Flat description of one lexical item in slot coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ItemCode {
    phon: usize,
    kind: Vec<usize>,
    cat: Vec<usize>,
    lcat: Vec<usize>,
    hm: Vec<usize>,
    has_c: bool,
}

pub(crate) struct Grid {
    pub kind: TableId,
    pub cat: TableId,
    pub lcat: TableId,
    pub hm: TableId,
    pub has_c: Vec<Var>,
}

pub(crate) struct Sorts {
    pub slot: SortId,
    pub pos: SortId,
    pub phon: SortId,
    pub kind: SortId,
    pub cat: SortId,
    pub lcat: SortId,
    pub hm: SortId,
}

/// Grounded lexicon slots plus every sentence encoded so far.
pub struct Encoding {
    config: EncoderConfig,
    vocab: Vec<String>,
    problem: Problem,
    sorts: Sorts,
    phon: TableId,
    slots: Grid,
    used_selector: Vec<Lit>,
    sentences: Vec<SentenceVars>,
}

impl Encoding {
    /// Lexicon tables over a fixed vocabulary. Clauses of `disabled`
    /// groups are dropped as they are generated.
    pub fn new(
        vocab: &[String],
        config: EncoderConfig,
        disabled: impl IntoIterator<Item = String>,
    ) -> Result<Self, EncodeError> {
        if config.universal_categories {
            return Err(EncodeError::Unsupported(
                "universal category labelling is not implemented".into(),
            ));
        }
        if config.bounds.covert_budget > 1 {
            return Err(EncodeError::Unsupported(format!(
                "covert budget {} (the encoder supports 0 or 1)",
                config.bounds.covert_budget
            )));
        }
        if config.bounds.max_feats == 0 || config.categories == 0 || config.licensing_categories == 0 {
            return Err(EncodeError::Unsupported("feature, category and licensing bounds must be positive".into()));
        }
        let mut vocab: Vec<String> = vocab.to_vec();
        vocab.sort();
        vocab.dedup();
        let mut p = Problem::with_disabled(disabled);
        let n_pos = config.bounds.max_feats;
        let mut phon_names: Vec<String> = vocab.clone();
        phon_names.extend(["eps_decl".into(), "eps_intr".into(), "unused".into()]);
        let phon_refs: Vec<&str> = phon_names.iter().map(String::as_str).collect();
        let lic_names: Vec<String> = (0..config.licensing_categories)
            .map(|i| Category(i as u8).licensing_name().to_string())
            .collect();
        let lic_refs: Vec<&str> = lic_names.iter().map(String::as_str).collect();
        let sorts = Sorts {
            slot: p.add_range_sort("Slot", "s", config.max_items)?,
            pos: p.add_range_sort("Pos", "p", n_pos)?,
            phon: p.add_sort("Phon", &phon_refs)?,
            kind: p.add_sort("Kind", &["none", "sel", "lic", "selee", "licensee"])?,
            cat: p.add_range_sort("Cat", "x", config.categories)?,
            lcat: p.add_sort("LCat", &lic_refs)?,
            hm: p.add_sort("HM", &["none", "left", "right"])?,
        };
        let phon = p.add_table("phon", &[sorts.slot], sorts.phon);
        let slots = Grid {
            kind: p.add_table("kind", &[sorts.slot, sorts.pos], sorts.kind),
            cat: p.add_table("cat", &[sorts.slot, sorts.pos], sorts.cat),
            lcat: p.add_table("lcat", &[sorts.slot, sorts.pos], sorts.lcat),
            hm: p.add_table("hm", &[sorts.slot, sorts.pos], sorts.hm),
            has_c: (0..config.max_items).map(|s| p.named_var(&format!("hasC(s{s})"))).collect(),
        };
        let mut enc = Encoding {
            config,
            vocab,
            problem: p,
            sorts,
            phon,
            slots,
            used_selector: Vec::new(),
            sentences: Vec::new(),
        };
        enc.slot_axioms();
        if enc.config.slot_symmetry {
            enc.slot_order();
        }
        enc.selector_usage();
        Ok(enc)
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn problem_mut(&mut self) -> &mut Problem {
        &mut self.problem
    }

    pub fn sentences(&self) -> impl Iterator<Item = &AnnotatedSentence> {
        self.sentences.iter().map(|s| &s.sentence)
    }

    pub fn num_sentences(&self) -> usize {
        self.sentences.len()
    }

    fn positions(&self) -> usize {
        self.config.bounds.max_feats
    }

    fn decl(&self) -> usize {
        self.vocab.len()
    }

    fn intr(&self) -> usize {
        self.vocab.len() + 1
    }

    fn unused(&self) -> usize {
        self.vocab.len() + 2
    }

    fn phon_lit(&self, s: usize, v: usize) -> Lit {
        self.problem.cell(self.phon, &[s], v)
    }

    /// Slot `s` holds an item.
    pub fn used_lit(&self, s: usize) -> Lit {
        !self.phon_lit(s, self.unused())
    }

    fn kind_lit(&self, s: usize, q: usize, k: usize) -> Lit {
        self.problem.cell(self.slots.kind, &[s, q], k)
    }

    fn slot_axioms(&mut self) {
        let n_pos = self.positions();
        self.problem.set_group("lexicon");
        for s in 0..self.config.max_items {
            let unused = self.phon_lit(s, self.unused());
            let has_c = self.slots.has_c[s].pos();
            let k = |e: &Self, q: usize, v: usize| e.kind_lit(s, q, v);
            let mut clauses: Vec<Vec<Lit>> = vec![vec![!unused, !has_c], vec![unused, !k(self, 0, K_NONE)]];
            clauses.push(vec![!k(self, 0, K_LICENSEE)]);
            for q in 0..n_pos {
                let cat0 = self.problem.cell(self.slots.cat, &[s, q], 0);
                let lcat0 = self.problem.cell(self.slots.lcat, &[s, q], 0);
                let hm0 = self.problem.cell(self.slots.hm, &[s, q], HM_NONE);
                clauses.push(vec![!unused, k(self, q, K_NONE)]);
                clauses.push(vec![k(self, q, K_SEL), k(self, q, K_SELEE), cat0]);
                clauses.push(vec![k(self, q, K_LIC), k(self, q, K_LICENSEE), lcat0]);
                clauses.push(vec![k(self, q, K_SEL), hm0]);
                if q + 1 < n_pos {
                    let next = |v| k(self, q + 1, v);
                    clauses.push(vec![!k(self, q, K_NONE), next(K_NONE)]);
                    for pre in [K_SELEE, K_LICENSEE] {
                        clauses.push(vec![!k(self, q, pre), next(K_LICENSEE), next(K_NONE)]);
                    }
                    for pre in [K_SEL, K_LIC] {
                        clauses.push(vec![!k(self, q, pre), !next(K_LICENSEE)]);
                    }
                }
            }
            for c in clauses {
                self.problem.add_clause(&c);
            }
        }
    }

    /// Key literals of slot `s`, in the order used by the slot ordering.
    fn key_lits(&self, s: usize) -> Vec<Lit> {
        let mut out: Vec<Lit> = (0..self.unused()).map(|v| self.phon_lit(s, v)).collect();
        for q in 0..self.positions() {
            out.extend((0..KINDS).map(|v| self.kind_lit(s, q, v)));
            out.extend((0..self.config.categories).map(|v| self.problem.cell(self.slots.cat, &[s, q], v)));
            out.extend((0..self.config.licensing_categories).map(|v| self.problem.cell(self.slots.lcat, &[s, q], v)));
            out.extend((0..HMS).map(|v| self.problem.cell(self.slots.hm, &[s, q], v)));
        }
        out.push(self.slots.has_c[s].pos());
        out
    }

    fn key_bits(&self, code: &ItemCode) -> Vec<bool> {
        let mut out: Vec<bool> = (0..self.unused()).map(|v| code.phon == v).collect();
        for q in 0..self.positions() {
            out.extend((0..KINDS).map(|v| code.kind[q] == v));
            out.extend((0..self.config.categories).map(|v| code.cat[q] == v));
            out.extend((0..self.config.licensing_categories).map(|v| code.lcat[q] == v));
            out.extend((0..HMS).map(|v| code.hm[q] == v));
        }
        out.push(code.has_c);
        out
    }

    /// Used slots come first, each strictly greater than the next.
    fn slot_order(&mut self) {
        self.problem.set_group("symmetry");
        for s in 0..self.config.max_items.saturating_sub(1) {
            let (x, y) = (self.key_lits(s), self.key_lits(s + 1));
            let next_used = self.used_lit(s + 1);
            let cur_used = self.used_lit(s);
            self.problem.add_clause(&[!next_used, cur_used]);
            // e: the keys agree on every bit so far (and slot s+1 is used)
            let mut e = next_used;
            for (&xk, &yk) in x.iter().zip(&y) {
                self.problem.add_clause(&[!e, xk, !yk]);
                let e2 = self.problem.new_var().pos();
                self.problem.add_clause(&[!e, !xk, !yk, e2]);
                self.problem.add_clause(&[!e, xk, yk, e2]);
                e = e2;
            }
            self.problem.add_clause(&[!e]);
        }
    }

    fn selector_usage(&mut self) {
        self.problem.set_group("definitions");
        let mut per_cat = vec![Vec::new(); self.config.categories];
        for s in 0..self.config.max_items {
            for q in 0..self.positions() {
                let sel = self.kind_lit(s, q, K_SEL);
                for (c, lits) in per_cat.iter_mut().enumerate() {
                    let cat = self.problem.cell(self.slots.cat, &[s, q], c);
                    lits.push(self.problem.and_lit(&[sel, cat]));
                }
            }
        }
        self.used_selector = per_cat.iter().map(|l| self.problem.or_lit(l)).collect();
        if self.config.category_symmetry {
            self.problem.set_group("symmetry");
            let mut used_cat = Vec::new();
            for c in 0..self.config.categories {
                let mut lits = Vec::new();
                for s in 0..self.config.max_items {
                    for q in 0..self.positions() {
                        let cat = self.problem.cell(self.slots.cat, &[s, q], c);
                        for k in [K_SEL, K_SELEE] {
                            let kl = self.kind_lit(s, q, k);
                            lits.push(self.problem.and_lit(&[kl, cat]));
                        }
                    }
                }
                used_cat.push(self.problem.or_lit(&lits));
            }
            for w in used_cat.windows(2) {
                self.problem.add_clause(&[!w[1], w[0]]);
            }
        }
    }

    /// One literal per slot: the slot holds an item.
    pub fn entry_lits(&self) -> Vec<Lit> {
        (0..self.config.max_items).map(|s| self.used_lit(s)).collect()
    }

    /// Non-`C` feature cells of the lexicon slots.
    pub fn lexicon_feature_lits(&self) -> Vec<Lit> {
        let mut out = Vec::new();
        for s in 0..self.config.max_items {
            for q in 0..self.positions() {
                out.push(!self.kind_lit(s, q, K_NONE));
            }
        }
        out
    }

    /// Feature cells of every leaf of every encoded sentence, `C` included.
    pub fn parse_feature_lits(&self) -> Vec<Lit> {
        self.sentences
            .iter()
            .flat_map(|sv| sv.feature_lits(&self.problem, self.positions()))
            .collect()
    }

    /// One literal per selectional category: some selector uses it.
    pub fn selector_category_lits(&self) -> Vec<Lit> {
        self.used_selector.clone()
    }

    /// Variables that determine the lexicon.
    pub fn lexicon_vars(&self) -> Vec<Var> {
        (0..self.config.max_items)
            .flat_map(|s| self.key_lits(s))
            .map(|l| l.var())
            .collect()
    }

    /// Adds the axioms for one more sentence; returns its index.
    pub fn encode_sentence(&mut self, s: &AnnotatedSentence) -> Result<usize, EncodeError> {
        for t in &s.tokens {
            if self.vocab.binary_search(t).is_err() {
                return Err(EncodeError::UnknownToken { token: t.clone() });
            }
        }
        let idx = self.sentences.len();
        let sv = sentence::encode(self, s, idx)?;
        self.sentences.push(sv);
        Ok(idx)
    }

    fn code_of(&self, item: &LexicalItem) -> Result<ItemCode, EncodeError> {
        let out_of_bounds = |why: String| EncodeError::ItemOutOfBounds {
            item: item.to_string(),
            why,
        };
        let phon = match &item.phon {
            PhoneticForm::Overt(w) => self
                .vocab
                .binary_search(w)
                .map_err(|_| EncodeError::UnknownToken { token: w.clone() })?,
            PhoneticForm::CovertDecl => self.decl(),
            PhoneticForm::CovertIntr => self.intr(),
        };
        let n_pos = self.positions();
        if item.feature_count() > n_pos {
            return Err(out_of_bounds(format!("more than {n_pos} features")));
        }
        let mut code = ItemCode {
            phon,
            kind: vec![K_NONE; n_pos],
            cat: vec![0; n_pos],
            lcat: vec![0; n_pos],
            hm: vec![HM_NONE; n_pos],
            has_c: item.has_complete(),
        };
        let check = |c: Category, lic: bool| -> Result<usize, EncodeError> {
            let limit = if lic {
                self.config.licensing_categories
            } else {
                self.config.categories
            };
            if c.index() >= limit {
                Err(out_of_bounds(format!("category index {} not below {limit}", c.index())))
            } else {
                Ok(c.index())
            }
        };
        for (q, f) in item.feats.iter().filter(|f| **f != Feature::Complete).enumerate() {
            match *f {
                Feature::Selector(c, h) => {
                    code.kind[q] = K_SEL;
                    code.cat[q] = check(c, false)?;
                    code.hm[q] = match h {
                        HeadMove::None => HM_NONE,
                        HeadMove::Left => HM_LEFT,
                        HeadMove::Right => HM_RIGHT,
                    };
                }
                Feature::Licensor(c) => {
                    code.kind[q] = K_LIC;
                    code.lcat[q] = check(c, true)?;
                }
                Feature::Selectee(c) => {
                    code.kind[q] = K_SELEE;
                    code.cat[q] = check(c, false)?;
                }
                Feature::Licensee(c) => {
                    code.kind[q] = K_LICENSEE;
                    code.lcat[q] = check(c, true)?;
                }
                Feature::Complete => unreachable!(),
            }
        }
        Ok(code)
    }

    /// Assumption literals fixing the slots to exactly `lex`.
    pub fn pin_lexicon(&self, lex: &Lexicon) -> Result<Vec<Lit>, EncodeError> {
        if lex.len() > self.config.max_items {
            return Err(EncodeError::TooManyItems {
                items: lex.len(),
                slots: self.config.max_items,
            });
        }
        let mut keyed: Vec<(Vec<bool>, ItemCode)> = lex
            .items()
            .iter()
            .map(|it| self.code_of(it).map(|c| (self.key_bits(&c), c)))
            .collect::<Result<_, _>>()?;
        keyed.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out = Vec::new();
        for s in 0..self.config.max_items {
            let Some((_, code)) = keyed.get(s) else {
                out.push(self.phon_lit(s, self.unused()));
                continue;
            };
            out.push(self.phon_lit(s, code.phon));
            for q in 0..self.positions() {
                out.push(self.kind_lit(s, q, code.kind[q]));
                out.push(self.problem.cell(self.slots.cat, &[s, q], code.cat[q]));
                out.push(self.problem.cell(self.slots.lcat, &[s, q], code.lcat[q]));
                out.push(self.problem.cell(self.slots.hm, &[s, q], code.hm[q]));
            }
            out.push(Lit::new(self.slots.has_c[s], code.has_c));
        }
        Ok(out)
    }

    pub(crate) fn grid_item(
        &self,
        grid: &Grid,
        row: usize,
        phon: PhoneticForm,
        model: &[bool],
    ) -> Result<LexicalItem, EncodeError> {
        let p = &self.problem;
        let val = |t: TableId, q: usize| {
            p.cell_value(t, &[row, q], model)
                .ok_or_else(|| EncodeError::Decode(format!("cell {row},{q} is not one-hot")))
        };
        let mut feats = Vec::new();
        for q in 0..self.positions() {
            let cat = Category(val(grid.cat, q)? as u8);
            let lcat = Category(val(grid.lcat, q)? as u8);
            let f = match val(grid.kind, q)? {
                K_NONE => break,
                K_SEL => Feature::Selector(
                    cat,
                    match val(grid.hm, q)? {
                        HM_LEFT => HeadMove::Left,
                        HM_RIGHT => HeadMove::Right,
                        _ => HeadMove::None,
                    },
                ),
                K_LIC => Feature::Licensor(lcat),
                K_SELEE => Feature::Selectee(cat),
                _ => Feature::Licensee(lcat),
            };
            feats.push(f);
        }
        if model[grid.has_c[row].index()] {
            feats.push(Feature::Complete);
        }
        LexicalItem::new(phon, feats).map_err(|e| EncodeError::Decode(e.to_string()))
    }

    fn phon_form(&self, v: usize) -> Option<PhoneticForm> {
        if v < self.vocab.len() {
            Some(PhoneticForm::Overt(self.vocab[v].clone()))
        } else if v == self.decl() {
            Some(PhoneticForm::CovertDecl)
        } else if v == self.intr() {
            Some(PhoneticForm::CovertIntr)
        } else {
            None
        }
    }

    /// Items of the used slots.
    pub fn decode_lexicon(&self, model: &[bool]) -> Result<Lexicon, EncodeError> {
        let mut items = Vec::new();
        for s in 0..self.config.max_items {
            let v = self
                .problem
                .cell_value(self.phon, &[s], model)
                .ok_or_else(|| EncodeError::Decode(format!("phon of slot {s} is not one-hot")))?;
            if let Some(phon) = self.phon_form(v) {
                items.push(self.grid_item(&self.slots, s, phon, model)?);
            }
        }
        Ok(Lexicon::new(items))
    }

    /// The derivation of sentence `i` described by the model, checked by
    /// replaying it.
    pub fn decode_parse(&self, model: &[bool], i: usize) -> Result<DerivationTree, EncodeError> {
        let sv = self.sentences.get(i).ok_or(EncodeError::NoSentence(i))?;
        let tree = sv.decode(self, model)?;
        tree.replay().map_err(|e| EncodeError::Decode(e.to_string()))?;
        let surface = tree.surface().map_err(|e| EncodeError::Decode(e.to_string()))?;
        if surface != sv.sentence.tokens {
            return Err(EncodeError::Decode(format!(
                "derived yield {:?} differs from {:?}",
                surface.join(" "),
                sv.sentence.tokens.join(" ")
            )));
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests;
