//! Agenda-driven chart parser over span-indexed MG expressions.
//!
//! An expression keeps the spans of its specifiers, head and complement
//! apart until it is selected, so that the head can still be raised by a
//! head-moving selector. Movers carry a single span fixed at the point
//! where they were first merged.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use crate::bounds::Bounds;
use crate::corpus::{RelationMatch, SentenceType};
use crate::mg::{DerivationTree, Feature, HeadMove, Lexicon, NodeId, PhoneticForm};

type Span = Option<(u8, u8)>;
type Movers = Vec<(NodeId, Vec<Feature>)>;

fn cat(a: Span, b: Span) -> Option<Span> {
    match (a, b) {
        (None, x) | (x, None) => Some(x),
        (Some((i, j)), Some((k, l))) => (j == k).then_some(Some((i, l))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Mover {
    span: Span,
    lex: u16,
    pos: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Item {
    spec: Span,
    head: Span,
    comp: Span,
    lex: u16,
    pos: u8,
    movers: Vec<Mover>,
    moves: u8,
    head_moves: u8,
    covert: u8,
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Axiom { position: Option<u8> },
    Merge { selector: usize, selectee: usize },
    Move { source: usize },
}

/// Parser configuration beyond the grammar bounds.
#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub bounds: Bounds,
    /// Upper limit on enumerated derivations.
    pub max_derivations: usize,
    pub relation_match: RelationMatch,
    /// Only derivations headed by the covert complementizer count.
    pub covert_root: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            bounds: Bounds::default(),
            max_derivations: 10_000,
            relation_match: RelationMatch::Strict,
            covert_root: true,
        }
    }
}

pub struct Chart<'a> {
    lex: &'a Lexicon,
    opts: ParseOptions,
    n: usize,
    items: Vec<Item>,
    index: HashMap<Item, usize>,
    backs: Vec<Vec<Back>>,
    selectors: HashMap<u8, Vec<usize>>,
    selectees: HashMap<u8, Vec<usize>>,
}

#[derive(Debug, Clone)]
enum DTree {
    Leaf { lex: u16, position: Option<u8> },
    External { selector: Rc<DTree>, selectee: Rc<DTree> },
    Internal { source: Rc<DTree> },
}

impl<'a> Chart<'a> {
    fn feat(&self, lex: u16, pos: u8) -> Option<Feature> {
        self.lex.items()[lex as usize].feats.get(pos as usize).copied()
    }

    fn item_len(&self, lex: u16) -> u8 {
        self.lex.items()[lex as usize].feats.len() as u8
    }

    fn pending_licensees(&self, movers: &[Mover]) -> usize {
        movers
            .iter()
            .map(|m| (self.item_len(m.lex) - m.pos) as usize)
            .sum()
    }

    fn smc_ok(&self, movers: &[Mover]) -> bool {
        for (i, a) in movers.iter().enumerate() {
            for b in &movers[i + 1..] {
                if self.feat(a.lex, a.pos) == self.feat(b.lex, b.pos) {
                    return false;
                }
            }
        }
        true
    }

    fn add(&mut self, item: Item, back: Back, agenda: &mut VecDeque<usize>) {
        if let Some(&id) = self.index.get(&item) {
            self.backs[id].push(back);
            return;
        }
        let id = self.items.len();
        self.index.insert(item.clone(), id);
        self.items.push(item);
        self.backs.push(vec![back]);
        agenda.push_back(id);
    }

    fn merge(&self, a: usize, b: usize) -> Option<Item> {
        let (x, y) = (&self.items[a], &self.items[b]);
        let (Feature::Selector(c1, hm), Some(Feature::Selectee(c2))) =
            (self.feat(x.lex, x.pos)?, self.feat(y.lex, y.pos))
        else {
            return None;
        };
        if c1 != c2 {
            return None;
        }
        let bounds = &self.opts.bounds;
        let lexical = x.pos == 0;
        if hm != HeadMove::None && !lexical {
            return None;
        }
        let covert = x.covert + y.covert;
        let head_moves = x.head_moves + y.head_moves + u8::from(hm != HeadMove::None);
        let moves = x.moves + y.moves;
        if covert as usize > bounds.covert_budget || head_moves as usize > bounds.max_head_moves {
            return None;
        }
        let (head, material) = match hm {
            HeadMove::None => (x.head, cat(cat(y.spec, y.head)?, y.comp)?),
            HeadMove::Left => (cat(y.head, x.head)?, cat(y.spec, y.comp)?),
            HeadMove::Right => (cat(x.head, y.head)?, cat(y.spec, y.comp)?),
        };
        let mut movers: Vec<Mover> = x.movers.iter().chain(&y.movers).cloned().collect();
        let (mut spec, mut comp) = (x.spec, x.comp);
        if y.pos + 1 < self.item_len(y.lex) {
            movers.push(Mover {
                span: material,
                lex: y.lex,
                pos: y.pos + 1,
            });
        } else if lexical {
            comp = material;
        } else {
            spec = cat(material, x.spec)?;
        }
        movers.sort();
        if !self.smc_ok(&movers)
            || moves as usize + self.pending_licensees(&movers) > bounds.max_phrasal_moves
        {
            return None;
        }
        Some(Item {
            spec,
            head,
            comp,
            lex: x.lex,
            pos: x.pos + 1,
            movers,
            moves,
            head_moves,
            covert,
        })
    }

    fn apply_move(&self, a: usize) -> Option<Item> {
        let x = &self.items[a];
        let Feature::Licensor(f) = self.feat(x.lex, x.pos)? else {
            return None;
        };
        let idx = x
            .movers
            .iter()
            .position(|m| self.feat(m.lex, m.pos) == Some(Feature::Licensee(f)))?;
        let mut movers = x.movers.clone();
        let mut spec = x.spec;
        let m = movers.remove(idx);
        if m.pos + 1 < self.item_len(m.lex) {
            movers.push(Mover {
                pos: m.pos + 1,
                ..m
            });
            movers.sort();
            if !self.smc_ok(&movers) {
                return None;
            }
        } else {
            spec = cat(m.span, spec)?;
        }
        Some(Item {
            spec,
            movers,
            pos: x.pos + 1,
            moves: x.moves + 1,
            ..x.clone()
        })
    }

    pub fn build(lex: &'a Lexicon, tokens: &[String], kind: SentenceType, opts: ParseOptions) -> Self {
        let mut chart = Chart {
            lex,
            opts,
            n: tokens.len(),
            items: Vec::new(),
            index: HashMap::new(),
            backs: Vec::new(),
            selectors: HashMap::new(),
            selectees: HashMap::new(),
        };
        let mut agenda = VecDeque::new();
        for (i, it) in lex.items().iter().enumerate() {
            if it.feature_count() > opts.bounds.max_feats {
                continue;
            }
            let base = Item {
                spec: None,
                head: None,
                comp: None,
                lex: i as u16,
                pos: 0,
                movers: Vec::new(),
                moves: 0,
                head_moves: 0,
                covert: 0,
            };
            match &it.phon {
                PhoneticForm::Overt(w) => {
                    for (t, tok) in tokens.iter().enumerate() {
                        if tok == w {
                            let item = Item {
                                head: Some((t as u8, t as u8 + 1)),
                                ..base.clone()
                            };
                            chart.add(item, Back::Axiom { position: Some(t as u8) }, &mut agenda);
                        }
                    }
                }
                PhoneticForm::CovertDecl | PhoneticForm::CovertIntr => {
                    let wanted = match kind {
                        SentenceType::Decl => PhoneticForm::CovertDecl,
                        SentenceType::Intr => PhoneticForm::CovertIntr,
                    };
                    if it.phon == wanted && opts.bounds.covert_budget > 0 {
                        let item = Item { covert: 1, ..base };
                        chart.add(item, Back::Axiom { position: None }, &mut agenda);
                    }
                }
            }
        }
        while let Some(id) = agenda.pop_front() {
            let it = chart.items[id].clone();
            match chart.feat(it.lex, it.pos) {
                Some(Feature::Selector(c, _)) => {
                    chart.selectors.entry(c.0).or_default().push(id);
                    let partners = chart.selectees.get(&c.0).cloned().unwrap_or_default();
                    for b in partners {
                        if let Some(new) = chart.merge(id, b) {
                            chart.add(new, Back::Merge { selector: id, selectee: b }, &mut agenda);
                        }
                    }
                }
                Some(Feature::Selectee(c)) => {
                    chart.selectees.entry(c.0).or_default().push(id);
                    let partners = chart.selectors.get(&c.0).cloned().unwrap_or_default();
                    for a in partners {
                        if let Some(new) = chart.merge(a, id) {
                            chart.add(new, Back::Merge { selector: a, selectee: id }, &mut agenda);
                        }
                    }
                }
                Some(Feature::Licensor(_)) => {
                    if let Some(new) = chart.apply_move(id) {
                        chart.add(new, Back::Move { source: id }, &mut agenda);
                    }
                }
                _ => {}
            }
        }
        chart
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    fn is_goal(&self, it: &Item) -> bool {
        if self.feat(it.lex, it.pos) != Some(Feature::Complete) || !it.movers.is_empty() || it.covert == 0 {
            return false;
        }
        let whole = cat(it.spec, it.head).and_then(|s| cat(s, it.comp));
        whole == Some(Some((0, self.n as u8)))
    }

    fn goals(&self) -> Vec<usize> {
        (0..self.items.len()).filter(|&i| self.is_goal(&self.items[i])).collect()
    }

    pub fn recognized(&self) -> bool {
        !self.goals().is_empty()
    }

    fn trees_of(&self, id: usize, memo: &mut HashMap<usize, Rc<Vec<Rc<DTree>>>>, cap: usize) -> Rc<Vec<Rc<DTree>>> {
        if let Some(v) = memo.get(&id) {
            return v.clone();
        }
        let mut out: Vec<Rc<DTree>> = Vec::new();
        for back in &self.backs[id] {
            if out.len() >= cap {
                break;
            }
            match *back {
                Back::Axiom { position } => out.push(Rc::new(DTree::Leaf {
                    lex: self.items[id].lex,
                    position,
                })),
                Back::Merge { selector, selectee } => {
                    let xs = self.trees_of(selector, memo, cap);
                    let ys = self.trees_of(selectee, memo, cap);
                    'outer: for x in xs.iter() {
                        for y in ys.iter() {
                            if out.len() >= cap {
                                break 'outer;
                            }
                            out.push(Rc::new(DTree::External {
                                selector: x.clone(),
                                selectee: y.clone(),
                            }));
                        }
                    }
                }
                Back::Move { source } => {
                    let xs = self.trees_of(source, memo, cap);
                    for x in xs.iter() {
                        if out.len() >= cap {
                            break;
                        }
                        out.push(Rc::new(DTree::Internal { source: x.clone() }));
                    }
                }
            }
        }
        let v = Rc::new(out);
        memo.insert(id, v.clone());
        v
    }

    /// Enumerates complete derivations, at most `max_derivations`.
    pub fn derivations(&self) -> Vec<DerivationTree> {
        let cap = self.opts.max_derivations;
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for g in self.goals() {
            for t in self.trees_of(g, &mut memo, cap).iter() {
                if out.len() >= cap {
                    return out;
                }
                let tree = self.to_tree(t);
                if seen.insert(tree.canonical_key()) {
                    out.push(tree);
                }
            }
        }
        out
    }

    fn to_tree(&self, t: &DTree) -> DerivationTree {
        let mut b = DerivationTree::builder();
        let (root, _, _) = self.build_node(t, &mut b);
        b.finish(root)
    }

    /// Returns (node, remaining features of the projecting head, movers).
    fn build_node(
        &self,
        t: &DTree,
        b: &mut crate::mg::derivation::TreeBuilder,
    ) -> (NodeId, Vec<Feature>, Movers) {
        match t {
            DTree::Leaf { lex, position } => {
                let item = self.lex.items()[*lex as usize].clone();
                let feats = item.feats.clone();
                let id = b.leaf(item, position.map(|p| p as usize));
                (id, feats, Vec::new())
            }
            DTree::External { selector, selectee } => {
                let (x, xf, xm) = self.build_node(selector, b);
                let (y, yf, ym) = self.build_node(selectee, b);
                let hm = xf[0].head_move();
                let id = b.external(x, y, hm);
                let mut movers = xm;
                movers.extend(ym);
                if yf.len() > 1 {
                    movers.push((y, yf[1..].to_vec()));
                }
                (id, xf[1..].to_vec(), movers)
            }
            DTree::Internal { source } => {
                let (x, xf, mut xm) = self.build_node(source, b);
                let Feature::Licensor(f) = xf[0] else {
                    unreachable!("move item starts with a licensor")
                };
                let idx = xm
                    .iter()
                    .position(|(_, fs)| fs[0] == Feature::Licensee(f))
                    .expect("chart move has a matching mover");
                let (node, mut rest) = xm.remove(idx);
                let id = b.internal(x, node);
                rest.remove(0);
                if !rest.is_empty() {
                    xm.push((node, rest));
                }
                (id, xf[1..].to_vec(), xm)
            }
        }
    }
}
