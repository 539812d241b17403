//! Axioms for one annotated sentence.

// tables are indexed by (leaf, position) throughout
#![allow(clippy::needless_range_loop)]

use std::collections::HashMap;

use super::{
    EncodeError, Encoding, Grid, HM_LEFT, HM_NONE, HM_RIGHT, K_LIC, K_LICENSEE, K_NONE, K_SEL, K_SELEE,
};
use crate::corpus::{AnnotatedSentence, RelationKind, RelationMatch, SentenceType};
use crate::ir::{at_most_one, Counter, Problem, TableId};
use crate::mg::{DerivationTree, HeadMove, NodeId};
use crate::sat::{ClauseSink, Lit};

pub(crate) struct SentenceVars {
    pub sentence: AnnotatedSentence,
    leaves: usize,
    n_pos: usize,
    covert: Option<usize>,
    choice: TableId,
    grid: Grid,
    par: TableId,
    land: TableId,
}

impl SentenceVars {
    /// `j`'s phrase is selected by position `q` of `i`.
    fn ext(&self, p: &Problem, j: usize, i: usize, q: usize) -> Lit {
        p.cell(self.par, &[j], i * self.n_pos + q)
    }

    fn root(&self, p: &Problem, j: usize) -> Lit {
        p.cell(self.par, &[j], self.leaves * self.n_pos)
    }

    /// Licensee `r` of `j` is checked by position `q` of `h`.
    fn mv(&self, p: &Problem, j: usize, r: usize, h: usize, q: usize) -> Lit {
        p.cell(self.land, &[j, r], h * self.n_pos + q)
    }

    fn unchecked(&self, p: &Problem, j: usize, r: usize) -> Lit {
        p.cell(self.land, &[j, r], self.leaves * self.n_pos)
    }

    fn kind(&self, p: &Problem, j: usize, q: usize, k: usize) -> Lit {
        p.cell(self.grid.kind, &[j, q], k)
    }

    pub fn feature_lits(&self, p: &Problem, n_pos: usize) -> Vec<Lit> {
        let mut out = Vec::new();
        for j in 0..self.leaves {
            for q in 0..n_pos {
                out.push(!self.kind(p, j, q, K_NONE));
            }
            out.push(self.grid.has_c[j].pos());
        }
        out
    }

    pub fn decode(&self, enc: &Encoding, model: &[bool]) -> Result<DerivationTree, EncodeError> {
        let p = &enc.problem;
        let bad = |m: String| EncodeError::Decode(m);
        let value = |t: TableId, args: &[usize]| {
            p.cell_value(t, args, model)
                .ok_or_else(|| bad(format!("cell {args:?} of table {} is not one-hot", p.table(t).name)))
        };
        let mut b = DerivationTree::builder();
        let mut leaf_nodes = Vec::new();
        for j in 0..self.leaves {
            let slot = value(self.choice, &[j])?;
            let phon = enc
                .phon_form(value(enc.phon, &[slot])?)
                .ok_or_else(|| bad(format!("leaf {j} uses an empty slot")))?;
            let item = enc.grid_item(&self.grid, j, phon, model)?;
            let pos = (Some(j) != self.covert).then_some(j);
            leaf_nodes.push(b.leaf(item, pos));
        }
        let top = self.leaves * self.n_pos;
        let pars: Vec<usize> = (0..self.leaves).map(|j| value(self.par, &[j])).collect::<Result<_, _>>()?;
        let root = pars
            .iter()
            .position(|&v| v == top)
            .ok_or_else(|| bad("no root leaf".into()))?;
        let mut lands = HashMap::new();
        for j in 0..self.leaves {
            for r in 0..self.n_pos {
                let v = value(self.land, &[j, r])?;
                if v != top {
                    lands.insert(v, j);
                }
            }
        }
        let mut built: Vec<Option<NodeId>> = vec![None; self.leaves];
        let mut visiting = vec![false; self.leaves];
        // iterative post-order over the head tree
        let mut stack = vec![(root, 0usize, leaf_nodes[root])];
        visiting[root] = true;
        while let Some((h, q, cur)) = stack.pop() {
            let k = if q < self.n_pos {
                value(self.grid.kind, &[h, q])?
            } else {
                K_NONE
            };
            match k {
                K_SEL => {
                    let slot = h * self.n_pos + q;
                    let child = pars
                        .iter()
                        .position(|&v| v == slot)
                        .ok_or_else(|| bad(format!("selector {q} of leaf {h} is unsaturated")))?;
                    if let Some(node) = built[child] {
                        let hm = match value(self.grid.hm, &[h, q])? {
                            HM_LEFT => HeadMove::Left,
                            HM_RIGHT => HeadMove::Right,
                            _ => HeadMove::None,
                        };
                        let next = b.external(cur, node, hm);
                        stack.push((h, q + 1, next));
                    } else {
                        if visiting[child] {
                            return Err(bad(format!("leaf {child} selects itself")));
                        }
                        visiting[child] = true;
                        stack.push((h, q, cur));
                        stack.push((child, 0, leaf_nodes[child]));
                    }
                }
                K_LIC => {
                    let j = *lands
                        .get(&(h * self.n_pos + q))
                        .ok_or_else(|| bad(format!("licensor {q} of leaf {h} is unchecked")))?;
                    let mover = built[j].ok_or_else(|| bad(format!("leaf {j} moves before it is built")))?;
                    let next = b.internal(cur, mover);
                    stack.push((h, q + 1, next));
                }
                _ => built[h] = Some(cur),
            }
        }
        let top_node = built[root].ok_or_else(|| bad("root was not built".into()))?;
        if built.iter().any(Option::is_none) {
            return Err(bad("some leaf is not part of the derivation".into()));
        }
        Ok(b.finish(top_node))
    }
}

fn def_or(p: &mut Problem, x: Lit, ds: &[Lit]) {
    for &d in ds {
        p.add_clause(&[!d, x]);
    }
    let mut c = ds.to_vec();
    c.push(!x);
    p.add_clause(&c);
}

fn at_most(p: &mut Problem, lits: &[Lit], k: usize) {
    let ctr = Counter::new(p, lits, k + 1);
    if let Some(l) = ctr.at_most(k) {
        p.add_clause(&[l]);
    }
}

type V2 = Vec<Vec<Lit>>;
type V3 = Vec<Vec<Vec<Lit>>>;
type V4 = Vec<Vec<Vec<Vec<Lit>>>>;

pub(crate) fn encode(enc: &mut Encoding, s: &AnnotatedSentence, idx: usize) -> Result<SentenceVars, EncodeError> {
    let n_pos = enc.positions();
    let n_slots = enc.config.max_items;
    let n_tok = s.tokens.len();
    let covert = (enc.config.bounds.covert_budget > 0).then_some(n_tok);
    let n = n_tok + usize::from(covert.is_some());
    let (decl, intr) = (enc.decl(), enc.intr());
    let tok_phon: Vec<usize> = s
        .tokens
        .iter()
        .map(|t| enc.vocab.binary_search(t).expect("checked by caller"))
        .collect();
    let phon = enc.phon;
    let slots = Grid {
        kind: enc.slots.kind,
        cat: enc.slots.cat,
        lcat: enc.slots.lcat,
        hm: enc.slots.hm,
        has_c: enc.slots.has_c.clone(),
    };
    let (n_cat, n_lcat) = (enc.config.categories, enc.config.licensing_categories);
    let max_moves = enc.config.bounds.max_phrasal_moves;
    let max_hm = enc.config.bounds.max_head_moves;
    let matching = enc.config.relation_match;
    let covert_root = enc.config.covert_root;
    let sorts = &enc.sorts;
    let p = &mut enc.problem;

    let mut leaf_names: Vec<String> = s.tokens.iter().enumerate().map(|(j, t)| format!("{j}_{t}")).collect();
    if covert.is_some() {
        leaf_names.push("eps".into());
    }
    let leaf_refs: Vec<&str> = leaf_names.iter().map(String::as_str).collect();
    let leaf_sort = p.add_sort(&format!("Leaf{idx}"), &leaf_refs)?;
    let mut targets: Vec<String> = (0..n)
        .flat_map(|i| (0..n_pos).map(move |q| format!("h{i}q{q}")))
        .collect();
    targets.push("root".into());
    let refs: Vec<&str> = targets.iter().map(String::as_str).collect();
    let par_sort = p.add_sort(&format!("Par{idx}"), &refs)?;
    *targets.last_mut().expect("nonempty") = "none".into();
    let refs: Vec<&str> = targets.iter().map(String::as_str).collect();
    let land_sort = p.add_sort(&format!("Land{idx}"), &refs)?;

    let sv = SentenceVars {
        sentence: s.clone(),
        leaves: n,
        n_pos,
        covert,
        choice: p.add_table(&format!("choice{idx}"), &[leaf_sort], sorts.slot),
        grid: Grid {
            kind: p.add_table(&format!("kind{idx}"), &[leaf_sort, sorts.pos], sorts.kind),
            cat: p.add_table(&format!("cat{idx}"), &[leaf_sort, sorts.pos], sorts.cat),
            lcat: p.add_table(&format!("lcat{idx}"), &[leaf_sort, sorts.pos], sorts.lcat),
            hm: p.add_table(&format!("hm{idx}"), &[leaf_sort, sorts.pos], sorts.hm),
            has_c: (0..n).map(|j| p.named_var(&format!("hasC{idx}({j})"))).collect(),
        },
        par: p.add_table(&format!("par{idx}"), &[leaf_sort], par_sort),
        land: p.add_table(&format!("land{idx}"), &[leaf_sort, sorts.pos], land_sort),
    };
    let g = |name: &str| format!("{name}@{idx}");
    let leaves = 0..n;
    let kind = |p: &Problem, j, q, k| sv.kind(p, j, q, k);
    let cat = |p: &Problem, j, q, c| p.cell(sv.grid.cat, &[j, q], c);
    let lcat = |p: &Problem, j, q, c| p.cell(sv.grid.lcat, &[j, q], c);
    let hm = |p: &Problem, j, q, h| p.cell(sv.grid.hm, &[j, q], h);
    let has_c = |j: usize| sv.grid.has_c[j].pos();

    // lexical insertion: each leaf is a copy of one slot with its form
    p.set_group(&g("insertion"));
    for j in leaves.clone() {
        for slot in 0..n_slots {
            let ch = p.cell(sv.choice, &[j], slot);
            if Some(j) == covert {
                let c = [!ch, p.cell(phon, &[slot], decl), p.cell(phon, &[slot], intr)];
                p.add_clause(&c);
            } else {
                let c = [!ch, p.cell(phon, &[slot], tok_phon[j])];
                p.add_clause(&c);
            }
            for q in 0..n_pos {
                for (src, dst, size) in [
                    (slots.kind, sv.grid.kind, 5),
                    (slots.cat, sv.grid.cat, n_cat),
                    (slots.lcat, sv.grid.lcat, n_lcat),
                    (slots.hm, sv.grid.hm, 3),
                ] {
                    for v in 0..size {
                        let c = [!ch, !p.cell(src, &[slot, q], v), p.cell(dst, &[j, q], v)];
                        p.add_clause(&c);
                    }
                }
            }
            let sc = slots.has_c[slot].pos();
            p.add_clause(&[!ch, !sc, has_c(j)]);
            p.add_clause(&[!ch, sc, !has_c(j)]);
        }
    }

    // auxiliary definitions
    p.set_group(&g("definitions"));
    let ff = !p.true_lit();
    let licensee = |p: &Problem, j, r| kind(p, j, r, K_LICENSEE);
    // dom[h][j]: j's phrase sits inside h's projection; br[h][j][q]: in
    // the branch h selects at position q.
    let dom: V2 = (0..n).map(|_| (0..n).map(|_| p.new_var().pos()).collect()).collect();
    let mut br: V3 = vec![vec![Vec::new(); n]; n];
    for h in leaves.clone() {
        for j in leaves.clone() {
            for q in 0..n_pos {
                let mut terms = vec![sv.ext(p, j, h, q)];
                for i in leaves.clone().filter(|&i| i != h && i != j) {
                    let e = sv.ext(p, i, h, q);
                    terms.push(p.and_lit(&[e, dom[i][j]]));
                }
                let l = p.or_lit(&terms);
                br[h][j].push(l);
            }
            let bs = br[h][j].clone();
            def_or(p, dom[h][j], &bs);
        }
    }
    // inph[j][h][q]: j is inside h's projection before step q of h
    let mut inph: V3 = vec![vec![vec![ff; n_pos + 1]; n]; n];
    for j in leaves.clone() {
        for h in leaves.clone().filter(|&h| h != j) {
            for q in 1..=n_pos {
                inph[j][h][q] = p.or_lit(&br[h][j][..q]);
            }
        }
    }
    let mut landed: V3 = vec![vec![vec![ff; n]; n_pos]; n];
    for j in leaves.clone() {
        for r in 1..n_pos {
            for h in leaves.clone().filter(|&h| h != j) {
                let ms: Vec<Lit> = (0..n_pos).map(|q| sv.mv(p, j, r, h, q)).collect();
                landed[j][r][h] = p.or_lit(&ms);
            }
        }
    }
    // before[j][r][h][q]: licensee r of j was checked before step q of h
    let mut before: V4 = vec![vec![vec![vec![ff; n_pos + 1]; n]; n_pos]; n];
    for j in leaves.clone() {
        for r in 1..n_pos {
            for h in leaves.clone().filter(|&h| h != j) {
                for q in 1..=n_pos {
                    let mut terms: Vec<Lit> = (0..q).map(|q2| sv.mv(p, j, r, h, q2)).collect();
                    for h2 in leaves.clone().filter(|&h2| h2 != h && h2 != j) {
                        terms.push(p.and_lit(&[landed[j][r][h2], inph[h2][h][q]]));
                    }
                    before[j][r][h][q] = p.or_lit(&terms);
                }
            }
        }
    }
    // pending[j][r][h][q]: licensee r of j is j's next unchecked feature
    // while j's phrase is a mover inside h's projection before step q
    let mut pending: V4 = vec![vec![vec![vec![ff; n_pos + 1]; n]; n_pos]; n];
    for j in leaves.clone() {
        for r in 1..n_pos {
            for h in leaves.clone().filter(|&h| h != j) {
                for q in 1..=n_pos {
                    let prev = [kind(p, j, r - 1, K_SELEE), before[j][r - 1][h][q]];
                    let prev = p.or_lit(&prev);
                    let c = [licensee(p, j, r), inph[j][h][q], prev, !before[j][r][h][q]];
                    pending[j][r][h][q] = p.and_lit(&c);
                }
            }
        }
    }
    // head movement: raised[j][i] means j's head joins i's
    let mut raised: V2 = vec![vec![ff; n]; n];
    for j in leaves.clone() {
        for i in leaves.clone().filter(|&i| i != j) {
            let c = [sv.ext(p, j, i, 0), !hm(p, i, 0, HM_NONE)];
            raised[j][i] = p.and_lit(&c);
        }
    }
    // hmd[f][a]: a's head ends up inside the head complex of f
    let hmd: V2 = (0..n).map(|_| (0..n).map(|_| p.new_var().pos()).collect()).collect();
    for f in leaves.clone() {
        for a in leaves.clone() {
            if f == a {
                p.add_clause(&[!hmd[f][a]]);
                continue;
            }
            let mut terms = vec![raised[a][f]];
            for i in leaves.clone().filter(|&i| i != f && i != a) {
                terms.push(p.and_lit(&[raised[i][f], hmd[i][a]]));
            }
            def_or(p, hmd[f][a], &terms);
        }
    }
    let top: Vec<Lit> = leaves
        .clone()
        .map(|a| {
            let c: Vec<Lit> = leaves.clone().filter(|&i| i != a).map(|i| !raised[a][i]).collect();
            p.and_lit(&c)
        })
        .collect();
    // own[a][f]: a is pronounced in the head position of f
    let mut own: V2 = vec![vec![ff; n]; n];
    for a in leaves.clone() {
        for f in leaves.clone() {
            own[a][f] = if a == f {
                top[a]
            } else {
                p.and_lit(&[hmd[f][a], top[f]])
            };
        }
    }
    // derived structure: dpar[k][h][q] means k's phrase is finally
    // pronounced in the material of step q of h
    let no_lic: Vec<Lit> = leaves
        .clone()
        .map(|j| {
            let c: Vec<Lit> = (0..n_pos).map(|r| !licensee(p, j, r)).collect();
            p.and_lit(&c)
        })
        .collect();
    let last: V2 = leaves
        .clone()
        .map(|j| {
            (0..n_pos)
                .map(|r| {
                    if r + 1 < n_pos {
                        let c = [licensee(p, j, r), !licensee(p, j, r + 1)];
                        p.and_lit(&c)
                    } else {
                        licensee(p, j, r)
                    }
                })
                .collect()
        })
        .collect();
    let mut dpar: V3 = vec![vec![vec![ff; n_pos]; n]; n];
    for k in leaves.clone() {
        for h in leaves.clone().filter(|&h| h != k) {
            for q in 0..n_pos {
                let e = sv.ext(p, k, h, q);
                let mut terms = vec![p.and_lit(&[no_lic[k], e])];
                for r in 1..n_pos {
                    let m = sv.mv(p, k, r, h, q);
                    terms.push(p.and_lit(&[last[k][r], m]));
                }
                dpar[k][h][q] = p.or_lit(&terms);
            }
        }
    }
    // dd[h][k][q]: k is pronounced inside the material of step q of h
    let dd: V3 = (0..n)
        .map(|_| (0..n).map(|_| (0..n_pos).map(|_| p.new_var().pos()).collect()).collect())
        .collect();
    let dd_any: V2 = (0..n).map(|_| (0..n).map(|_| p.new_var().pos()).collect()).collect();
    for h in leaves.clone() {
        for k in leaves.clone() {
            if h == k {
                for q in 0..n_pos {
                    p.add_clause(&[!dd[h][k][q]]);
                }
                p.add_clause(&[!dd_any[h][k]]);
                continue;
            }
            for q in 0..n_pos {
                let mut terms = vec![dpar[k][h][q]];
                for i in leaves.clone().filter(|&i| i != h && i != k) {
                    terms.push(p.and_lit(&[dpar[i][h][q], dd_any[i][k]]));
                }
                def_or(p, dd[h][k][q], &terms);
            }
            def_or(p, dd_any[h][k], &dd[h][k]);
        }
    }
    // precedes[a][b]: conditions under which head a is pronounced before
    // head b, both being top heads
    let mut precedes: Vec<Vec<Vec<Lit>>> = vec![vec![Vec::new(); n]; n];
    for a in leaves.clone() {
        for b in leaves.clone().filter(|&b| b != a) {
            let mut terms = vec![dd[a][b][0]];
            terms.extend((1..n_pos).map(|q| dd[b][a][q]));
            for z in leaves.clone().filter(|&z| z != a && z != b) {
                for qa in 1..n_pos {
                    for qb in 0..qa {
                        terms.push(p.and_lit(&[dd[z][a][qa], dd[z][b][qb]]));
                    }
                }
            }
            precedes[a][b] = terms;
        }
    }

    p.set_group(&g("tree"));
    for j in leaves.clone() {
        for q in 0..n_pos {
            let c = [!sv.ext(p, j, j, q)];
            p.add_clause(&c);
        }
        p.add_clause(&[!dom[j][j]]);
        let c = [!has_c(j), sv.root(p, j)];
        p.add_clause(&c);
        for i in leaves.clone() {
            for q in 0..n_pos {
                let c = [!sv.ext(p, j, i, q), kind(p, i, q, K_SEL)];
                p.add_clause(&c);
            }
        }
    }
    let roots: Vec<Lit> = leaves.clone().map(|j| sv.root(p, j)).collect();
    at_most_one(p, &roots);

    p.set_group(&g("headedness"));
    for j in leaves.clone() {
        let root = sv.root(p, j);
        let mut has_selee = vec![root];
        for q in 0..n_pos {
            let c = [!root, !kind(p, j, q, K_SELEE)];
            p.add_clause(&c);
            let c = [!root, !kind(p, j, q, K_LICENSEE)];
            p.add_clause(&c);
            has_selee.push(kind(p, j, q, K_SELEE));
        }
        p.add_clause(&has_selee);
    }

    p.set_group(&g("features"));
    for j in leaves.clone() {
        for i in leaves.clone().filter(|&i| i != j) {
            for q in 0..n_pos {
                let e = sv.ext(p, j, i, q);
                for r in 0..n_pos {
                    for c in 0..n_cat {
                        let cl = [!e, !kind(p, j, r, K_SELEE), !cat(p, j, r, c), cat(p, i, q, c)];
                        p.add_clause(&cl);
                    }
                }
            }
        }
        for r in 0..n_pos {
            for h in leaves.clone() {
                for q in 0..n_pos {
                    let m = sv.mv(p, j, r, h, q);
                    if h == j || r == 0 {
                        p.add_clause(&[!m]);
                        continue;
                    }
                    let c = [!m, kind(p, h, q, K_LIC)];
                    p.add_clause(&c);
                    p.add_clause(&[!m, pending[j][r][h][q]]);
                    for f in 0..n_lcat {
                        let c = [!m, !lcat(p, j, r, f), lcat(p, h, q, f)];
                        p.add_clause(&c);
                    }
                }
            }
        }
    }

    p.set_group(&g("completion"));
    for j in leaves.clone() {
        let c = [!sv.root(p, j), has_c(j)];
        p.add_clause(&c);
        for q in 0..n_pos {
            let sel: Vec<Lit> = leaves.clone().map(|c| sv.ext(p, c, j, q)).collect();
            let mut c = sel.clone();
            c.push(!kind(p, j, q, K_SEL));
            p.add_clause(&c);
            at_most_one(p, &sel);
            let mut movers = Vec::new();
            for m in leaves.clone() {
                for r in 0..n_pos {
                    movers.push(sv.mv(p, m, r, j, q));
                }
            }
            let mut c = movers.clone();
            c.push(!kind(p, j, q, K_LIC));
            p.add_clause(&c);
            at_most_one(p, &movers);
            let (lee, unchecked) = (licensee(p, j, q), sv.unchecked(p, j, q));
            p.add_clause(&[!lee, !unchecked]);
            p.add_clause(&[lee, unchecked]);
        }
    }
    p.add_clause(&roots);

    p.set_group(&g("headmove"));
    for j in leaves.clone() {
        for i in leaves.clone() {
            for q in 1..n_pos {
                let c = [!sv.ext(p, j, i, q), hm(p, i, q, HM_NONE)];
                p.add_clause(&c);
            }
        }
    }

    p.set_group(&g("bounds"));
    let moves: Vec<Lit> = leaves
        .clone()
        .flat_map(|j| (1..n_pos).map(move |r| (j, r)))
        .map(|(j, r)| !sv.unchecked(p, j, r))
        .collect();
    at_most(p, &moves, max_moves);
    let raises: Vec<Lit> = raised.iter().flatten().copied().filter(|&l| l != ff).collect();
    at_most(p, &raises, max_hm);

    p.set_group(&g("smc"));
    for h in leaves.clone() {
        for q in 1..=n_pos {
            let live: Vec<(usize, usize, Lit)> = leaves
                .clone()
                .flat_map(|j| (1..n_pos).map(move |r| (j, r)))
                .filter(|&(j, r)| pending[j][r][h][q] != ff)
                .map(|(j, r)| (j, r, pending[j][r][h][q]))
                .collect();
            for (x, &(j1, r1, l1)) in live.iter().enumerate() {
                for &(j2, r2, l2) in &live[x + 1..] {
                    if j1 == j2 {
                        continue;
                    }
                    for f in 0..n_lcat {
                        let c = [!l1, !l2, !lcat(p, j1, r1, f), !lcat(p, j2, r2, f)];
                        p.add_clause(&c);
                    }
                }
            }
        }
    }

    p.set_group(&g("linearization"));
    for a in 0..n_tok {
        for b in a + 1..n_tok {
            let c = [!hmd[b][a], hm(p, b, 0, HM_LEFT)];
            p.add_clause(&c);
            let c = [!hmd[a][b], hm(p, a, 0, HM_RIGHT)];
            p.add_clause(&c);
            for fa in leaves.clone() {
                for fb in leaves.clone().filter(|&fb| fb != fa) {
                    let mut c = vec![!own[a][fa], !own[b][fb]];
                    c.extend_from_slice(&precedes[fa][fb]);
                    p.add_clause(&c);
                }
            }
        }
    }

    p.set_group(&g("typing"));
    match covert {
        Some(j) => {
            let want = match s.kind {
                SentenceType::Decl => decl,
                SentenceType::Intr => intr,
            };
            for slot in 0..n_slots {
                let c = [!p.cell(sv.choice, &[j], slot), p.cell(phon, &[slot], want)];
                p.add_clause(&c);
            }
            if covert_root {
                let c = [sv.root(p, j)];
                p.add_clause(&c);
            }
        }
        None => p.add_clause(&[]),
    }

    p.set_group(&g("relations"));
    for rel in &s.relations {
        let (a, b) = (rel.a, rel.b);
        let ext_any = |p: &Problem, x, y| (0..n_pos).map(|q| sv.ext(p, x, y, q)).collect::<Vec<_>>();
        let mv_any = |p: &Problem, x, y| {
            (1..n_pos)
                .flat_map(|r| (0..n_pos).map(move |q| (r, q)))
                .map(|(r, q)| sv.mv(p, x, r, y, q))
                .collect::<Vec<_>>()
        };
        let c = match (matching, rel.kind) {
            (RelationMatch::Strict, RelationKind::Arg) => ext_any(p, a, b),
            (RelationMatch::Strict, RelationKind::Agree) => mv_any(p, a, b),
            (RelationMatch::Local, _) => {
                let mut c = ext_any(p, a, b);
                c.extend(ext_any(p, b, a));
                c.extend(mv_any(p, a, b));
                c.extend(mv_any(p, b, a));
                c
            }
        };
        p.add_clause(&c);
    }
    p.set_group("base");
    Ok(sv)
}
