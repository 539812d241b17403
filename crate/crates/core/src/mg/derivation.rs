//! Derivation trees: binary merge records with heads, movement links and
//! head movement, plus the derived-tree yield computed from them.
//!
//! Internal merge nodes have two children like external ones; the
//! dependent of an internal merge is the moved phrase, which is also
//! dominated at its first-merge site, so the structure is a DAG with a
//! single root.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::feature::{Feature, HeadMove};
use super::lexicon::{LexicalItem, PhoneticForm};
use super::MgError;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leaf {
    pub item: LexicalItem,
    /// Token index for overt leaves whose surface position is known.
    pub position: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MergeKind {
    External,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Leaf(Leaf),
    Merge {
        kind: MergeKind,
        /// Projecting child.
        head: NodeId,
        /// Selected phrase (external) or moved phrase (internal).
        dependent: NodeId,
        head_move: HeadMove,
    },
}

/// One merge step, named by the head leaves of its two arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MergeEvent {
    pub kind: MergeKind,
    pub head: NodeId,
    pub dependent: NodeId,
    pub head_move: HeadMove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeadMoveLink {
    pub host: NodeId,
    pub raised: NodeId,
    pub direction: HeadMove,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivationTree {
    nodes: Vec<Node>,
    root: NodeId,
}

/// Result of replaying a derivation: every merge checked, yield computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    /// All leaves in derived (surface) order, covert ones included.
    pub order: Vec<NodeId>,
    /// Remaining features at every node.
    pub remaining: Vec<Vec<Feature>>,
    pub phrasal_moves: usize,
    pub head_moves: usize,
}

#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn leaf(&mut self, item: LexicalItem, position: Option<usize>) -> NodeId {
        self.nodes.push(Node::Leaf(Leaf { item, position }));
        self.nodes.len() - 1
    }

    pub fn external(&mut self, head: NodeId, dependent: NodeId, head_move: HeadMove) -> NodeId {
        self.nodes.push(Node::Merge {
            kind: MergeKind::External,
            head,
            dependent,
            head_move,
        });
        self.nodes.len() - 1
    }

    pub fn internal(&mut self, head: NodeId, mover: NodeId) -> NodeId {
        self.nodes.push(Node::Merge {
            kind: MergeKind::Internal,
            head,
            dependent: mover,
            head_move: HeadMove::None,
        });
        self.nodes.len() - 1
    }

    pub fn finish(self, root: NodeId) -> DerivationTree {
        DerivationTree {
            nodes: self.nodes,
            root,
        }
    }
}

#[derive(Clone, Default)]
struct State {
    feats: Vec<Feature>,
    lexical: bool,
    spec: Vec<NodeId>,
    head: Vec<NodeId>,
    comp: Vec<NodeId>,
    /// (moved phrase node, remaining features, pronounced material)
    movers: Vec<(NodeId, Vec<Feature>, Vec<NodeId>)>,
    phrasal_moves: usize,
    head_moves: usize,
}

impl DerivationTree {
    pub fn builder() -> TreeBuilder {
        TreeBuilder::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn leaf(&self, id: NodeId) -> Option<&Leaf> {
        match &self.nodes[id] {
            Node::Leaf(l) => Some(l),
            Node::Merge { .. } => None,
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = (NodeId, &Leaf)> {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match n {
            Node::Leaf(l) => Some((i, l)),
            Node::Merge { .. } => None,
        })
    }

    /// The leaf reached by following projecting children.
    pub fn head_leaf(&self, mut id: NodeId) -> NodeId {
        while let Node::Merge { head, .. } = self.nodes[id] {
            id = head;
        }
        id
    }

    /// Merge steps in bottom-up order: for each merge node, the steps of
    /// its projecting child, then those of an externally merged
    /// dependent, then the node itself.
    pub fn events(&self) -> Vec<MergeEvent> {
        let mut out = Vec::new();
        self.collect_events(self.root, &mut out);
        out
    }

    fn collect_events(&self, id: NodeId, out: &mut Vec<MergeEvent>) {
        if let Node::Merge {
            kind,
            head,
            dependent,
            head_move,
        } = self.nodes[id]
        {
            self.collect_events(head, out);
            if kind == MergeKind::External {
                self.collect_events(dependent, out);
            }
            out.push(MergeEvent {
                kind,
                head: self.head_leaf(head),
                dependent: self.head_leaf(dependent),
                head_move,
            });
        }
    }

    /// (landing node, moved subtree root) for every internal merge.
    pub fn move_links(&self) -> Vec<(NodeId, NodeId)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n {
                Node::Merge {
                    kind: MergeKind::Internal,
                    dependent,
                    ..
                } => Some((i, *dependent)),
                _ => None,
            })
            .collect()
    }

    pub fn head_moves(&self) -> Vec<HeadMoveLink> {
        self.nodes
            .iter()
            .filter_map(|n| match *n {
                Node::Merge {
                    kind: MergeKind::External,
                    head,
                    dependent,
                    head_move,
                } if head_move != HeadMove::None => Some(HeadMoveLink {
                    host: self.head_leaf(head),
                    raised: self.head_leaf(dependent),
                    direction: head_move,
                }),
                _ => None,
            })
            .collect()
    }

    /// Replays every merge, checking features, the Shortest Move
    /// Constraint and completion, and computes the derived yield.
    pub fn replay(&self) -> Result<Replay, MgError> {
        let err = |m: String| Err(MgError::InvalidDerivation(m));
        let n = self.nodes.len();
        if self.root >= n {
            return err("root out of range".into());
        }
        let mut parents = vec![0usize; n];
        for node in &self.nodes {
            if let Node::Merge {
                kind,
                head,
                dependent,
                ..
            } = *node
            {
                if head >= n || dependent >= n {
                    return err("child out of range".into());
                }
                parents[head] += 1;
                if kind == MergeKind::External {
                    parents[dependent] += 1;
                }
            }
        }
        let roots: Vec<_> = (0..n).filter(|&i| parents[i] == 0).collect();
        if roots != [self.root] {
            return err(format!("expected single root {}, found {:?}", self.root, roots));
        }
        if parents.iter().any(|&p| p > 1) {
            return err("node with two first-merge parents".into());
        }

        let mut states: Vec<Option<State>> = vec![None; n];
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if states[id].is_some() {
                continue;
            }
            if let Node::Merge { head, dependent, .. } = &self.nodes[id] {
                if !expanded {
                    stack.push((id, true));
                    stack.push((*dependent, false));
                    stack.push((*head, false));
                    continue;
                }
            }
            let st = self.step(id, &states)?;
            states[id] = Some(st);
        }
        let root = states[self.root].take().expect("root visited");
        if root.feats != [Feature::Complete] {
            return err(format!(
                "root features {:?} are not exactly C",
                root.feats.iter().map(|f| f.to_string()).collect::<Vec<_>>()
            ));
        }
        if !root.movers.is_empty() {
            return err("movers left unchecked at the root".into());
        }
        let mut surface = root.spec.clone();
        surface.extend(&root.head);
        surface.extend(&root.comp);
        let remaining = (0..n)
            .map(|i| {
                if i == self.root {
                    root.feats.clone()
                } else {
                    states[i].as_ref().map(|s| s.feats.clone()).unwrap_or_default()
                }
            })
            .collect();
        Ok(Replay {
            order: surface,
            remaining,
            phrasal_moves: root.phrasal_moves,
            head_moves: root.head_moves,
        })
    }

    fn step(&self, id: NodeId, states: &[Option<State>]) -> Result<State, MgError> {
        let fail = |m: String| MgError::InvalidDerivation(format!("node {id}: {m}"));
        let get = |i: NodeId| {
            states[i]
                .as_ref()
                .ok_or_else(|| fail(format!("child {i} not built before its parent")))
        };
        match &self.nodes[id] {
            Node::Leaf(leaf) => Ok(State {
                feats: leaf.item.feats.clone(),
                lexical: true,
                head: vec![id],
                ..State::default()
            }),
            Node::Merge {
                kind: MergeKind::External,
                head,
                dependent,
                head_move,
            } => {
                let h = get(*head)?;
                let d = get(*dependent)?;
                let (sel, seltee) = match (h.feats.first(), d.feats.first()) {
                    (Some(a), Some(b)) => (*a, *b),
                    _ => return Err(fail("merge with exhausted features".into())),
                };
                if !super::feature::check_external_merge(&sel, &seltee) {
                    return Err(fail(format!("{sel} cannot select {seltee}")));
                }
                if sel.head_move() != *head_move {
                    return Err(fail("head movement flag disagrees with selector".into()));
                }
                let mut out = State {
                    feats: h.feats[1..].to_vec(),
                    lexical: false,
                    spec: h.spec.clone(),
                    head: h.head.clone(),
                    comp: h.comp.clone(),
                    movers: h.movers.clone(),
                    phrasal_moves: h.phrasal_moves + d.phrasal_moves,
                    head_moves: h.head_moves + d.head_moves,
                };
                let mut material: Vec<NodeId> = d.spec.clone();
                if *head_move == HeadMove::None {
                    material.extend(&d.head);
                } else {
                    if !h.lexical {
                        return Err(fail("head movement from a specifier".into()));
                    }
                    out.head_moves += 1;
                    if *head_move == HeadMove::Left {
                        out.head = d.head.iter().chain(&h.head).copied().collect();
                    } else {
                        out.head = h.head.iter().chain(&d.head).copied().collect();
                    }
                }
                material.extend(&d.comp);
                let rest = d.feats[1..].to_vec();
                out.movers.extend(d.movers.iter().cloned());
                if rest.is_empty() {
                    if h.lexical {
                        out.comp = material;
                    } else {
                        out.spec = material.into_iter().chain(out.spec).collect();
                    }
                } else {
                    out.movers.push((*dependent, rest, material));
                }
                check_smc(&out.movers).map_err(fail)?;
                Ok(out)
            }
            Node::Merge {
                kind: MergeKind::Internal,
                head,
                dependent,
                ..
            } => {
                let h = get(*head)?;
                let lic = match h.feats.first() {
                    Some(f @ Feature::Licensor(_)) => *f,
                    _ => return Err(fail("internal merge without a licensor".into())),
                };
                let idx = h
                    .movers
                    .iter()
                    .position(|(node, _, _)| node == dependent)
                    .ok_or_else(|| fail(format!("node {dependent} is not a pending mover")))?;
                let (_, ref feats, _) = h.movers[idx];
                if !super::feature::check_internal_merge(&lic, &feats[0]) {
                    return Err(fail(format!("{lic} cannot attract {}", feats[0])));
                }
                let mut out = h.clone();
                out.lexical = false;
                out.feats.remove(0);
                out.phrasal_moves += 1;
                let (node, mut rest, material) = out.movers.remove(idx);
                rest.remove(0);
                if rest.is_empty() {
                    out.spec = material.into_iter().chain(out.spec).collect();
                } else {
                    out.movers.insert(idx, (node, rest, material));
                }
                check_smc(&out.movers).map_err(fail)?;
                Ok(out)
            }
        }
    }

    /// Derived-tree yield: every leaf's phonetic form in surface order.
    pub fn linearize(&self) -> Result<Vec<PhoneticForm>, MgError> {
        let replay = self.replay()?;
        Ok(replay
            .order
            .iter()
            .map(|&i| self.leaf(i).expect("yield holds leaves").item.phon.clone())
            .collect())
    }

    /// Overt words in surface order.
    pub fn surface(&self) -> Result<Vec<String>, MgError> {
        Ok(self
            .linearize()?
            .into_iter()
            .filter_map(|p| p.as_overt().map(str::to_string))
            .collect())
    }

    /// Total feature instances over all leaves, `C` included.
    pub fn leaf_feature_total(&self) -> usize {
        self.leaves().map(|(_, l)| l.item.feats.len()).sum()
    }

    fn label(&self, id: NodeId, replay: Option<&Replay>) -> String {
        let leaf = self.leaf(self.head_leaf(id)).expect("head is a leaf");
        let feats = &leaf.item.feats;
        let consumed = replay
            .map(|r| feats.len().saturating_sub(r.remaining[id].len()))
            .unwrap_or(0);
        let mut s = format!("{}::", leaf.item.phon);
        for (i, f) in feats.iter().enumerate() {
            if i == consumed {
                s.push('*');
            } else if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{f}");
        }
        if consumed == feats.len() {
            s.push('*');
        }
        s
    }

    /// Indented text rendering; internal node labels show the head's
    /// features with `*` between consumed and pending ones.
    pub fn render(&self) -> String {
        let replay = self.replay().ok();
        let mut out = String::new();
        self.render_node(self.root, 0, replay.as_ref(), &mut out);
        out
    }

    fn render_node(&self, id: NodeId, depth: usize, replay: Option<&Replay>, out: &mut String) {
        let pad = "  ".repeat(depth);
        match &self.nodes[id] {
            Node::Leaf(leaf) => {
                let _ = writeln!(out, "{pad}{}", leaf.item);
            }
            Node::Merge {
                kind,
                head,
                dependent,
                head_move,
            } => {
                let tag = match (kind, head_move) {
                    (MergeKind::Internal, _) => "move",
                    (MergeKind::External, HeadMove::None) => "merge",
                    (MergeKind::External, HeadMove::Left) => "merge+hm<",
                    (MergeKind::External, HeadMove::Right) => "merge+hm>",
                };
                let _ = writeln!(out, "{pad}[{tag}] {}", self.label(id, replay));
                self.render_node(*head, depth + 1, replay, out);
                match kind {
                    MergeKind::External => self.render_node(*dependent, depth + 1, replay, out),
                    MergeKind::Internal => {
                        let mover = self.leaf(self.head_leaf(*dependent)).expect("leaf");
                        let _ = writeln!(out, "{pad}  (moved: {} phrase)", mover.item.phon);
                    }
                }
            }
        }
    }

    /// Graphviz rendering; movement links are dashed.
    pub fn to_dot(&self) -> String {
        let replay = self.replay().ok();
        let mut out = String::from("digraph derivation {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let label = match node {
                Node::Leaf(l) => l.item.to_string(),
                Node::Merge { .. } => self.label(i, replay.as_ref()),
            };
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Merge {
                kind,
                head,
                dependent,
                ..
            } = node
            {
                let _ = writeln!(out, "  n{i} -> n{head} [style=bold];");
                match kind {
                    MergeKind::External => {
                        let _ = writeln!(out, "  n{i} -> n{dependent};");
                    }
                    MergeKind::Internal => {
                        let _ = writeln!(out, "  n{i} -> n{dependent} [style=dashed];");
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Structural key independent of node numbering, used to deduplicate.
    pub fn canonical_key(&self) -> String {
        let mut memo = HashMap::new();
        self.key_of(self.root, &mut memo)
    }

    fn key_of(&self, id: NodeId, memo: &mut HashMap<NodeId, String>) -> String {
        if let Some(k) = memo.get(&id) {
            return k.clone();
        }
        let k = match &self.nodes[id] {
            Node::Leaf(l) => format!("{}@{:?}", l.item, l.position),
            Node::Merge {
                kind: MergeKind::External,
                head,
                dependent,
                head_move,
            } => format!(
                "E{:?}({},{})",
                head_move,
                self.key_of(*head, memo),
                self.key_of(*dependent, memo)
            ),
            Node::Merge {
                kind: MergeKind::Internal,
                head,
                dependent,
                ..
            } => {
                let mover = self.head_leaf(*dependent);
                format!("I({},^{})", self.key_of(*head, memo), self.key_of(mover, memo))
            }
        };
        memo.insert(id, k.clone());
        k
    }
}

fn check_smc(movers: &[(NodeId, Vec<Feature>, Vec<NodeId>)]) -> Result<(), String> {
    for (i, a) in movers.iter().enumerate() {
        for b in &movers[i + 1..] {
            if a.1[0] == b.1[0] {
                return Err(format!("two movers share first feature {}", a.1[0]));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mg::text::parse_item;

    fn item(s: &str) -> LexicalItem {
        parse_item(s).unwrap()
    }

    /// Hand-built derivation of "what was sally eating".
    pub(crate) fn what_was_sally_eating() -> DerivationTree {
        let mut b = DerivationTree::builder();
        let eating = b.leaf(item("eating::=x0,=x0,~x4"), Some(3));
        let what = b.leaf(item("what::~x0,-r"), Some(0));
        let sally = b.leaf(item("sally::~x0,-l"), Some(2));
        let was = b.leaf(item("was::=x4,+l,~x2"), Some(1));
        let c = b.leaf(item("eps_intr::<=x2,+r,C"), None);
        let n1 = b.external(eating, what, HeadMove::None);
        let n2 = b.external(n1, sally, HeadMove::None);
        let n3 = b.external(was, n2, HeadMove::None);
        let n4 = b.internal(n3, sally);
        let n5 = b.external(c, n4, HeadMove::Left);
        let n6 = b.internal(n5, what);
        b.finish(n6)
    }

    #[test]
    fn question_linearizes() {
        let t = what_was_sally_eating();
        assert_eq!(t.surface().unwrap(), ["what", "was", "sally", "eating"]);
        let r = t.replay().unwrap();
        assert_eq!(r.phrasal_moves, 2);
        assert_eq!(r.head_moves, 1);
        assert_eq!(t.head_moves().len(), 1);
        assert_eq!(t.move_links().len(), 2);
        assert_eq!(t.leaf_feature_total(), 12 + 1);
    }

    #[test]
    fn complement_goes_right() {
        let mut b = DerivationTree::builder();
        let eaten = b.leaf(item("eaten::=x0,C"), Some(0));
        let pizza = b.leaf(item("pizza::~x0"), Some(1));
        let n = b.external(eaten, pizza, HeadMove::None);
        let t = b.finish(n);
        assert_eq!(t.surface().unwrap(), ["eaten", "pizza"]);
        assert!(t.render().contains("eaten::=x0*C"));
    }

    #[test]
    fn rejects_bad_trees() {
        let mut b = DerivationTree::builder();
        let eaten = b.leaf(item("eaten::=x1,C"), None);
        let pizza = b.leaf(item("pizza::~x0"), None);
        let n = b.external(eaten, pizza, HeadMove::None);
        assert!(b.finish(n).replay().is_err());

        // leftover licensee
        let mut b = DerivationTree::builder();
        let eaten = b.leaf(item("eaten::=x0,C"), None);
        let pizza = b.leaf(item("pizza::~x0,-l"), None);
        let n = b.external(eaten, pizza, HeadMove::None);
        assert!(b.finish(n).replay().is_err());

        // SMC: two -l movers
        let mut b = DerivationTree::builder();
        let v = b.leaf(item("v::=x0,=x0,+l,+l,C"), None);
        let a = b.leaf(item("a::~x0,-l"), None);
        let c = b.leaf(item("c::~x0,-l"), None);
        let n1 = b.external(v, a, HeadMove::None);
        let n2 = b.external(n1, c, HeadMove::None);
        let n3 = b.internal(n2, a);
        let n4 = b.internal(n3, c);
        let err = b.finish(n4).replay().unwrap_err();
        assert!(err.to_string().contains("share"));
    }

    #[test]
    fn events_follow_bottom_up_order() {
        let t = what_was_sally_eating();
        let ev = t.events();
        let names: Vec<(MergeKind, String, String)> = ev
            .iter()
            .map(|e| {
                (
                    e.kind,
                    t.leaf(e.head).unwrap().item.phon.to_string(),
                    t.leaf(e.dependent).unwrap().item.phon.to_string(),
                )
            })
            .collect();
        let exp = [
            (MergeKind::External, "eating", "what"),
            (MergeKind::External, "eating", "sally"),
            (MergeKind::External, "was", "eating"),
            (MergeKind::Internal, "was", "sally"),
            (MergeKind::External, "eps_intr", "was"),
            (MergeKind::Internal, "eps_intr", "what"),
        ];
        assert_eq!(names.len(), exp.len());
        for (got, want) in names.iter().zip(exp) {
            assert_eq!((got.0, got.1.as_str(), got.2.as_str()), want);
        }
        assert!(t.to_dot().contains("style=dashed"));
    }
}
