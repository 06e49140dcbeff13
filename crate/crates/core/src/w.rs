//! Trees with operad-labelled vertices and edge lengths in `[0, 1]`, the
//! three relations that quotient them, the induced operad composition, and
//! the associahedron face combinatorics that the length-1 strata generate.
//!
//! An edge of length 0 collapses, composing the labels of its endpoints; a
//! unit-labelled valence-1 vertex between edges of lengths `s` and `t`
//! dissolves into a single edge of length `s + t - st`; vertex labels are
//! normalized against simultaneous reordering of subtrees. Length 1 marks a
//! fully degenerate (composite) edge, which is why grafting assigns new
//! edges length 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::operad::{OperadError, OperadOps};
use crate::perm::Perm;
use crate::poset::GradedPoset;
use crate::scalar::Scalar;
use crate::tree::{enumerate_trees, Tree, TreeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WError {
    LengthOutOfRange(String),
    MalformedTree(String),
    Operad(String),
}

impl fmt::Display for WError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WError::LengthOutOfRange(msg) => write!(f, "length out of range: {msg}"),
            WError::MalformedTree(msg) => write!(f, "malformed tree: {msg}"),
            WError::Operad(msg) => write!(f, "label composition failed: {msg}"),
        }
    }
}

impl std::error::Error for WError {}

impl From<OperadError> for WError {
    fn from(e: OperadError) -> WError {
        WError::Operad(e.to_string())
    }
}

/// `s + t - st`: the length of the edge obtained by dissolving a unit
/// vertex between edges of lengths `s` and `t`. Equivalently
/// `1 - (1-s)(1-t)`, so residual scales `1 - length` multiply.
pub fn merge_lengths<S: Scalar>(s: &S, t: &S) -> Result<S, WError> {
    for v in [s, t] {
        if *v < S::zero() || *v > S::one() {
            return Err(WError::LengthOutOfRange(format!("{v}")));
        }
    }
    Ok(s.clone() + t.clone() - s.clone() * t.clone())
}

/// An edge into a vertex: internal edges carry a length, twig edges do not.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WEdge<L, S> {
    pub length: Option<S>,
    pub node: WNode<L, S>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum WNode<L, S> {
    Twig(usize),
    Vertex { label: L, children: Vec<WEdge<L, S>> },
}

/// A vertex-labelled, edge-length-labelled tree: one point of the space the
/// W-construction quotients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WTree<L, S> {
    pub root: WNode<L, S>,
}

impl<L: Clone, S: Clone> WNode<L, S> {
    pub fn arity(&self) -> usize {
        match self {
            WNode::Twig(_) => 1,
            WNode::Vertex { children, .. } => {
                children.iter().map(|e| e.node.arity()).sum()
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            WNode::Twig(_) => 0,
            WNode::Vertex { children, .. } => {
                1 + children.iter().map(|e| e.node.vertex_count()).sum::<usize>()
            }
        }
    }

    fn relabel_twigs(&self, f: &impl Fn(usize) -> usize) -> WNode<L, S> {
        match self {
            WNode::Twig(i) => WNode::Twig(f(*i)),
            WNode::Vertex { label, children } => WNode::Vertex {
                label: label.clone(),
                children: children
                    .iter()
                    .map(|e| WEdge { length: e.length.clone(), node: e.node.relabel_twigs(f) })
                    .collect(),
            },
        }
    }

    /// The underlying shape, forgetting labels and lengths.
    pub fn shape(&self) -> Tree {
        match self {
            WNode::Twig(i) => Tree::Leaf(*i),
            WNode::Vertex { children, .. } => {
                Tree::Node(children.iter().map(|e| e.node.shape()).collect())
            }
        }
    }
}

impl<L: Clone, S: Clone> WTree<L, S> {
    /// The trivial tree: an edge with no vertices, the unit of the operad.
    pub fn trivial() -> WTree<L, S> {
        WTree { root: WNode::Twig(1) }
    }

    /// A single vertex labelled `label` with twigs `1..=arity`.
    pub fn corolla(label: L, arity: usize) -> WTree<L, S> {
        WTree {
            root: WNode::Vertex {
                label,
                children: (1..=arity)
                    .map(|i| WEdge { length: None, node: WNode::Twig(i) })
                    .collect(),
            },
        }
    }

    pub fn arity(&self) -> usize {
        self.root.arity()
    }

    pub fn shape(&self) -> Tree {
        self.root.shape()
    }
}

/// Structural validation: twig labels form a bijection, lengths sit in
/// `[0, 1]` and appear exactly on internal edges, and label arities match
/// vertex valences.
pub fn validate_wtree<O, S>(op: &O, t: &WTree<O::Elem, S>) -> Result<(), WError>
where
    O: OperadOps,
    S: Scalar,
{
    let shape = t.shape();
    shape
        .validate(1)
        .map_err(|e| WError::MalformedTree(e.to_string()))?;
    fn rec<O: OperadOps, S: Scalar>(op: &O, node: &WNode<O::Elem, S>) -> Result<(), WError> {
        if let WNode::Vertex { label, children } = node {
            let v = children.len();
            if !op.is_element(v, label) {
                return Err(WError::MalformedTree(format!(
                    "label {label:?} is not an arity-{v} element"
                )));
            }
            for e in children {
                match (&e.length, &e.node) {
                    (None, WNode::Twig(_)) => {}
                    (Some(l), WNode::Vertex { .. }) => {
                        if *l < S::zero() || *l > S::one() {
                            return Err(WError::LengthOutOfRange(format!("{l}")));
                        }
                    }
                    (Some(_), WNode::Twig(_)) => {
                        return Err(WError::MalformedTree("twig edge with a length".into()))
                    }
                    (None, WNode::Vertex { .. }) => {
                        return Err(WError::MalformedTree("internal edge missing length".into()))
                    }
                }
                rec(op, &e.node)?;
            }
        }
        Ok(())
    }
    rec(op, &t.root)
}

/// Rewrites to the canonical representative of the class of `t`: length-0
/// edges collapsed, unit valence-1 vertices dissolved, and subtree order
/// normalized against the labels' Σ-action. The result is a fixed point and
/// does not depend on the order the relations fire.
pub fn normalize_wtree<O, S>(op: &O, t: &WTree<O::Elem, S>) -> Result<WTree<O::Elem, S>, WError>
where
    O: OperadOps,
    S: Scalar + Ord,
{
    let mut node = t.root.clone();
    loop {
        let (next, changed) = rewrite_once(op, node)?;
        node = next;
        if !changed {
            break;
        }
    }
    let node = sigma_canonical(op, &node);
    Ok(WTree { root: node })
}

/// One pass of relations 2 and 3; reports whether anything fired.
fn rewrite_once<O, S>(op: &O, node: WNode<O::Elem, S>) -> Result<(WNode<O::Elem, S>, bool), WError>
where
    O: OperadOps,
    S: Scalar,
{
    // unit vertex at the root: the root edge absorbs its parent edge
    if let WNode::Vertex { label, children } = &node {
        if children.len() == 1 && *label == op.unit() {
            return Ok((children[0].node.clone(), true));
        }
    }
    rewrite_in(op, node)
}

fn rewrite_in<O, S>(op: &O, node: WNode<O::Elem, S>) -> Result<(WNode<O::Elem, S>, bool), WError>
where
    O: OperadOps,
    S: Scalar,
{
    let WNode::Vertex { label, children } = node else {
        return Ok((node, false));
    };
    // relation 2: collapse a length-0 edge into this vertex
    let zero_at = children.iter().position(|e| {
        matches!(&e.length, Some(l) if *l == S::zero())
    });
    if let Some(i) = zero_at {
        let WNode::Vertex { label: child_label, children: grand } = children[i].node.clone()
        else {
            unreachable!("lengths only sit on internal edges");
        };
        let v = children.len();
        let args: Vec<(usize, O::Elem)> = (0..v)
            .map(|j| {
                if j == i {
                    (grand.len(), child_label.clone())
                } else {
                    (1, op.unit())
                }
            })
            .collect();
        let composed = op.compose(v, &label, &args)?;
        let mut new_children = Vec::with_capacity(v + grand.len() - 1);
        for (j, c) in children.into_iter().enumerate() {
            if j == i {
                new_children.extend(grand.clone());
            } else {
                new_children.push(c);
            }
        }
        return Ok((WNode::Vertex { label: composed, children: new_children }, true));
    }
    // relation 3: dissolve a unit valence-1 child vertex
    for (i, e) in children.iter().enumerate() {
        let WNode::Vertex { label: child_label, children: grand } = &e.node else {
            continue;
        };
        if grand.len() != 1 || *child_label != op.unit() {
            continue;
        }
        let s = e.length.clone().expect("internal edge");
        let inner = &grand[0];
        let new_edge = match (&inner.length, &inner.node) {
            (Some(t), WNode::Vertex { .. }) => {
                WEdge { length: Some(merge_lengths(&s, t)?), node: inner.node.clone() }
            }
            (None, WNode::Twig(_)) => WEdge { length: None, node: inner.node.clone() },
            _ => unreachable!("validated edges"),
        };
        let mut new_children = children.clone();
        new_children[i] = new_edge;
        return Ok((WNode::Vertex { label, children: new_children }, true));
    }
    // recurse
    let mut changed = false;
    let mut new_children = Vec::with_capacity(children.len());
    for e in children {
        let (n, c) = rewrite_in(op, e.node)?;
        changed |= c;
        new_children.push(WEdge { length: e.length, node: n });
    }
    Ok((WNode::Vertex { label, children: new_children }, changed))
}

/// Relation 1: pick the minimal (label, children) pair over simultaneous
/// reorderings of the subtrees at every vertex.
fn sigma_canonical<O, S>(op: &O, node: &WNode<O::Elem, S>) -> WNode<O::Elem, S>
where
    O: OperadOps,
    S: Scalar + Ord,
{
    match node {
        WNode::Twig(i) => WNode::Twig(*i),
        WNode::Vertex { label, children } => {
            let children: Vec<WEdge<O::Elem, S>> = children
                .iter()
                .map(|e| WEdge { length: e.length.clone(), node: sigma_canonical(op, &e.node) })
                .collect();
            let v = children.len();
            let mut best: Option<(O::Elem, Vec<WEdge<O::Elem, S>>)> = None;
            for sigma in Perm::all(v) {
                let l = op.act(v, label, &sigma);
                let inv = sigma.inverse();
                let cs: Vec<WEdge<O::Elem, S>> =
                    (0..v).map(|p| children[inv.apply(p)].clone()).collect();
                let cand = (l, cs);
                if best.as_ref().map_or(true, |b| cand < *b) {
                    best = Some(cand);
                }
            }
            let (label, children) = best.expect("nonempty orbit");
            WNode::Vertex { label, children }
        }
    }
}

/// Operad composition of the W-construction: graft, give the new internal
/// edges length 1, renumber twigs blockwise, and normalize.
pub fn w_compose<O, S>(
    op: &O,
    a: &WTree<O::Elem, S>,
    args: &[WTree<O::Elem, S>],
) -> Result<WTree<O::Elem, S>, WError>
where
    O: OperadOps,
    S: Scalar + Ord,
{
    let k = a.arity();
    if args.len() != k {
        return Err(WError::MalformedTree(format!(
            "arity {k} element composed with {} arguments",
            args.len()
        )));
    }
    let mut offsets = Vec::with_capacity(k);
    let mut acc = 0usize;
    for b in args {
        offsets.push(acc);
        acc += b.arity();
    }
    fn graft<L: Clone, S: Clone>(
        node: &WNode<L, S>,
        args: &[WTree<L, S>],
        offsets: &[usize],
        one: &S,
    ) -> WNode<L, S> {
        match node {
            WNode::Twig(i) => {
                let guest = &args[*i - 1];
                guest.root.relabel_twigs(&|j| j + offsets[*i - 1])
            }
            WNode::Vertex { label, children } => WNode::Vertex {
                label: label.clone(),
                children: children
                    .iter()
                    .map(|e| {
                        let grafted = graft(&e.node, args, offsets, one);
                        let length = match (&e.node, &grafted) {
                            // a twig that became a vertex is a new internal
                            // edge: length 1
                            (WNode::Twig(_), WNode::Vertex { .. }) => Some(one.clone()),
                            (WNode::Twig(_), WNode::Twig(_)) => None,
                            _ => e.length.clone(),
                        };
                        WEdge { length, node: grafted }
                    })
                    .collect(),
            },
        }
    }
    let grafted = match &a.root {
        WNode::Twig(i) => args[*i - 1].root.clone(),
        root @ WNode::Vertex { .. } => graft(root, args, &offsets, &S::one()),
    };
    normalize_wtree(op, &WTree { root: grafted })
}

/// The face poset of the `k`-th associahedron: planar trees on `{1..k}`
/// with every vertex of valence at least two, ordered by edge collapse and
/// graded by internal-edge count (the codimension of the face).
pub fn face_poset(k: usize) -> Result<GradedPoset<Tree>, TreeError> {
    if k < 2 {
        return Err(TreeError::InvalidTree("face poset needs k >= 2".into()));
    }
    let trees = enumerate_trees(k, true, 2, 4 * k)?;
    let index: std::collections::HashMap<String, usize> = trees
        .iter()
        .enumerate()
        .map(|(i, t)| (t.code(true), i))
        .collect();
    let n = trees.len();
    // reachability by collapsing one edge at a time
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    // process by increasing edge count: a collapse target has strictly
    // fewer edges, so its row is already complete
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| trees[i].internal_edge_count());
    for &i in &order {
        for path in trees[i].internal_edge_paths() {
            let collapsed = trees[i].collapse_edge(&path).expect("internal edge");
            let j = index[&collapsed.code(true)];
            for target in 0..n {
                if leq[j][target] {
                    leq[i][target] = true;
                }
            }
            leq[i][j] = true;
        }
    }
    let grade: Vec<usize> = trees.iter().map(Tree::internal_edge_count).collect();
    Ok(GradedPoset::new(trees, grade, leq))
}

/// Face counts by dimension, where dimension = (top grade) - (codimension).
pub fn f_vector<T: Clone>(p: &GradedPoset<T>) -> Vec<usize> {
    let max = p.max_grade();
    let by_grade = p.count_by_grade();
    (0..=max).map(|d| by_grade[max - d]).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WTreeJson<L> {
    Twig { twig: usize },
    Vertex { label: L, children: Vec<WEdgeJson<L>> },
}

#[derive(Serialize, Deserialize)]
struct WEdgeJson<L> {
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Option<String>,
    node: WTreeJson<L>,
}

impl<L: Clone + Serialize, S: Scalar> Serialize for WTree<L, S> {
    fn serialize<Sz: serde::Serializer>(&self, ser: Sz) -> Result<Sz::Ok, Sz::Error> {
        fn conv<L: Clone, S: Scalar>(node: &WNode<L, S>) -> WTreeJson<L> {
            match node {
                WNode::Twig(i) => WTreeJson::Twig { twig: *i },
                WNode::Vertex { label, children } => WTreeJson::Vertex {
                    label: label.clone(),
                    children: children
                        .iter()
                        .map(|e| WEdgeJson {
                            length: e.length.as_ref().map(Scalar::to_ratio_string),
                            node: conv(&e.node),
                        })
                        .collect(),
                },
            }
        }
        conv(&self.root).serialize(ser)
    }
}

impl<'de, L: Clone + Deserialize<'de>, S: Scalar> Deserialize<'de> for WTree<L, S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        fn conv<L: Clone, S: Scalar, E: serde::de::Error>(
            json: WTreeJson<L>,
        ) -> Result<WNode<L, S>, E> {
            Ok(match json {
                WTreeJson::Twig { twig } => WNode::Twig(twig),
                WTreeJson::Vertex { label, children } => WNode::Vertex {
                    label,
                    children: children
                        .into_iter()
                        .map(|e| {
                            let length = match e.length {
                                None => None,
                                Some(s) => Some(S::parse_ratio(&s).ok_or_else(|| {
                                    E::custom(format!("bad length {s:?}"))
                                })?),
                            };
                            Ok(WEdge { length, node: conv(e.node)? })
                        })
                        .collect::<Result<_, E>>()?,
                },
            })
        }
        Ok(WTree { root: conv(WTreeJson::deserialize(de)?)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{free_operad, FreeOperad, GenTree, SetOperad};
    use crate::sigma::SigmaSet;
    use crate::Rat;

    fn rat(p: i64, q: i64) -> Rat {
        Rat::from_ratio(p, q)
    }

    fn two_gen_operad() -> FreeOperad {
        // two binary generators with the regular action
        let mut names = vec![Vec::new(), Vec::new(), Vec::new()];
        names[2] = vec!["a".into(), "a'".into(), "b".into(), "b'".into()];
        let mut gen_action = vec![Vec::new(), Vec::new(), Vec::new()];
        gen_action[2] = vec![vec![1, 0, 3, 2]];
        let gens = SigmaSet::from_parts(names, gen_action).unwrap();
        free_operad(gens, 12, 8)
    }

    fn vertex<L: Clone>(label: L, children: Vec<WEdge<L, Rat>>) -> WNode<L, Rat> {
        WNode::Vertex { label, children }
    }

    fn internal<L: Clone>(len: Rat, node: WNode<L, Rat>) -> WEdge<L, Rat> {
        WEdge { length: Some(len), node }
    }

    fn twig<L: Clone>(i: usize) -> WEdge<L, Rat> {
        WEdge { length: None, node: WNode::Twig(i) }
    }

    #[test]
    fn merge_lengths_laws_exhaustive_small() {
        // unit, absorbing, commutativity, associativity on a grid
        let grid: Vec<Rat> = (0..=6).map(|p| rat(p, 6)).collect();
        for s in &grid {
            assert_eq!(merge_lengths(&rat(0, 1), s).unwrap(), *s);
            assert_eq!(merge_lengths(&rat(1, 1), s).unwrap(), rat(1, 1));
            for t in &grid {
                let st = merge_lengths(s, t).unwrap();
                assert_eq!(st, merge_lengths(t, s).unwrap());
                assert!(st >= rat(0, 1) && st <= rat(1, 1));
                // 1 - (1-s)(1-t)
                let alt = rat(1, 1)
                    - (rat(1, 1) - s.clone()) * (rat(1, 1) - t.clone());
                assert_eq!(st, alt);
                for u in &grid {
                    let left = merge_lengths(&st, u).unwrap();
                    let right = merge_lengths(s, &merge_lengths(t, u).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
        assert_eq!(merge_lengths(&rat(1, 2), &rat(1, 2)).unwrap(), rat(3, 4));
        assert!(merge_lengths(&rat(3, 2), &rat(1, 2)).is_err());
    }

    #[test]
    fn zero_length_edge_collapses_and_composes() {
        let op = two_gen_operad();
        let a = op.elems(2)[0].clone();
        let b = op.elems(2)[2].clone();
        // a over b at slot 2, edge length 0
        let t = WTree {
            root: vertex(
                a.clone(),
                vec![
                    twig(1),
                    internal(rat(0, 1), vertex(b.clone(), vec![twig(2), twig(3)])),
                ],
            ),
        };
        let n = normalize_wtree(&op, &t).unwrap();
        let composed = op
            .compose(2, &a, &[(1, GenTree::Leaf(1)), (2, b.clone())])
            .unwrap();
        let expected = normalize_wtree(&op, &WTree::corolla(composed, 3)).unwrap();
        assert_eq!(n, expected);
        assert_eq!(n.root.vertex_count(), 1);
    }

    #[test]
    fn unit_vertex_merges_lengths() {
        let op = two_gen_operad();
        let a = op.elems(2)[0].clone();
        let b = op.elems(2)[2].clone();
        // a --1/2-- ι --1/2-- b
        let t = WTree {
            root: vertex(
                a.clone(),
                vec![
                    twig(1),
                    internal(
                        rat(1, 2),
                        vertex(
                            GenTree::Leaf(1),
                            vec![internal(rat(1, 2), vertex(b.clone(), vec![twig(2), twig(3)]))],
                        ),
                    ),
                ],
            ),
        };
        let n = normalize_wtree(&op, &t).unwrap();
        let expected = normalize_wtree(
            &op,
            &WTree {
                root: vertex(
                    a,
                    vec![twig(1), internal(rat(3, 4), vertex(b, vec![twig(2), twig(3)]))],
                ),
            },
        )
        .unwrap();
        assert_eq!(n, expected);
    }

    #[test]
    fn normal_tree_is_fixed_point() {
        let op = two_gen_operad();
        let a = op.elems(2)[0].clone();
        let b = op.elems(2)[2].clone();
        let t = WTree {
            root: vertex(
                a,
                vec![twig(1), internal(rat(1, 3), vertex(b, vec![twig(2), twig(3)]))],
            ),
        };
        let n = normalize_wtree(&op, &t).unwrap();
        assert_eq!(normalize_wtree(&op, &n).unwrap(), n);
    }

    /// All application orders of relations 2 and 3 end at the same place.
    #[test]
    fn normalization_is_confluent() {
        let op = two_gen_operad();
        let a = op.elems(2)[0].clone();
        let b = op.elems(2)[2].clone();
        let lengths = [rat(0, 1), rat(1, 2), rat(1, 1)];
        // trees with up to 3 internal edges, including unit vertices
        let mut cases: Vec<WTree<GenTree, Rat>> = Vec::new();
        for l1 in &lengths {
            for l2 in &lengths {
                cases.push(WTree {
                    root: vertex(
                        a.clone(),
                        vec![
                            internal(l1.clone(), vertex(b.clone(), vec![twig(1), twig(2)])),
                            internal(l2.clone(), vertex(a.clone(), vec![twig(3), twig(4)])),
                        ],
                    ),
                });
                for l3 in &lengths {
                    cases.push(WTree {
                        root: vertex(
                            a.clone(),
                            vec![
                                twig(1),
                                internal(
                                    l1.clone(),
                                    vertex(
                                        GenTree::Leaf(1),
                                        vec![internal(
                                            l2.clone(),
                                            vertex(
                                                b.clone(),
                                                vec![
                                                    internal(
                                                        l3.clone(),
                                                        vertex(
                                                            a.clone(),
                                                            vec![twig(2), twig(3)],
                                                        ),
                                                    ),
                                                    twig(4),
                                                ],
                                            ),
                                        )],
                                    ),
                                ),
                            ],
                        ),
                    });
                }
            }
        }
        for case in &cases {
            let target = normalize_wtree(&op, case).unwrap();
            explore_all_orders(&op, case.root.clone(), &target);
        }
    }

    /// Recursively applies every applicable single rewrite at every
    /// position and checks all maximal paths reach `target`.
    fn explore_all_orders(op: &FreeOperad, node: WNode<GenTree, Rat>, target: &WTree<GenTree, Rat>) {
        let mut nexts = all_single_rewrites(op, &node);
        // the root-edge unit rule only applies at the true root
        if let WNode::Vertex { label, children } = &node {
            if children.len() == 1 && *label == op.unit() {
                nexts.push(children[0].node.clone());
            }
        }
        if nexts.is_empty() {
            let final_form = WTree { root: sigma_canonical(op, &node) };
            assert_eq!(&final_form, target);
            return;
        }
        for n in nexts {
            explore_all_orders(op, n, target);
        }
    }

    /// Every tree obtainable from `node` by firing exactly one relation-2
    /// or relation-3 instance strictly below the root edge.
    fn all_single_rewrites(op: &FreeOperad, node: &WNode<GenTree, Rat>) -> Vec<WNode<GenTree, Rat>> {
        let mut out = Vec::new();
        let WNode::Vertex { label, children } = node else {
            return out;
        };
        for (i, e) in children.iter().enumerate() {
            if let (Some(l), WNode::Vertex { label: cl, children: grand }) = (&e.length, &e.node) {
                if *l == rat(0, 1) {
                    let mut args: Vec<(usize, GenTree)> = Vec::new();
                    for (j, _) in children.iter().enumerate() {
                        if j == i {
                            args.push((grand.len(), cl.clone()));
                        } else {
                            args.push((1, op.unit()));
                        }
                    }
                    let composed = op.compose(children.len(), label, &args).unwrap();
                    let mut cs = Vec::new();
                    for (j, c) in children.iter().enumerate() {
                        if j == i {
                            cs.extend(grand.clone());
                        } else {
                            cs.push(c.clone());
                        }
                    }
                    out.push(WNode::Vertex { label: composed, children: cs });
                }
                if grand.len() == 1 && *cl == op.unit() {
                    let inner = &grand[0];
                    let new_edge = match (&inner.length, &inner.node) {
                        (Some(t), WNode::Vertex { .. }) => WEdge {
                            length: Some(merge_lengths(l, t).unwrap()),
                            node: inner.node.clone(),
                        },
                        (None, WNode::Twig(_)) => {
                            WEdge { length: None, node: inner.node.clone() }
                        }
                        _ => unreachable!(),
                    };
                    let mut cs = children.clone();
                    cs[i] = new_edge;
                    out.push(WNode::Vertex { label: label.clone(), children: cs });
                }
            }
            // rewrites inside the subtree
            for sub in all_single_rewrites(op, &e.node) {
                let mut cs = children.clone();
                cs[i] = WEdge { length: e.length.clone(), node: sub };
                out.push(WNode::Vertex { label: label.clone(), children: cs });
            }
        }
        out
    }

    #[test]
    fn compose_with_trivials_is_identity() {
        let op = two_gen_operad();
        let a = op.elems(2)[0].clone();
        let t: WTree<GenTree, Rat> = normalize_wtree(&op, &WTree::corolla(a, 2)).unwrap();
        let composed =
            w_compose(&op, &t, &[WTree::trivial(), WTree::trivial()]).unwrap();
        assert_eq!(composed, t);
        let via_unit = w_compose(&op, &WTree::trivial(), &[t.clone()]).unwrap();
        assert_eq!(via_unit, t);
    }

    #[test]
    fn composition_creates_length_one_edges() {
        let op = two_gen_operad();
        let a = op.elems(2)[0].clone();
        let b = op.elems(2)[2].clone();
        let start: WTree<GenTree, Rat> = WTree::corolla(a, 2);
        let t = w_compose(&op, &start, &[WTree::trivial(), WTree::corolla(b, 2)])
            .unwrap();
        assert_eq!(t.arity(), 3);
        assert_eq!(t.root.vertex_count(), 2);
        let WNode::Vertex { children, .. } = &t.root else { panic!() };
        let lengths: Vec<_> = children.iter().filter_map(|e| e.length.clone()).collect();
        assert_eq!(lengths, vec![rat(1, 1)]);
    }

    #[test]
    fn setting_new_edge_to_zero_recovers_label_composition() {
        let op = two_gen_operad();
        let a = op.elems(2)[0].clone();
        let b = op.elems(2)[2].clone();
        let composed = w_compose(
            &op,
            &WTree::corolla(a.clone(), 2),
            &[WTree::trivial(), WTree::corolla(b.clone(), 2)],
        )
        .unwrap();
        // set the unique internal edge length to 0 and renormalize
        let WNode::Vertex { label, children } = composed.root else { panic!() };
        let children = children
            .into_iter()
            .map(|e| WEdge {
                length: e.length.map(|_| rat(0, 1)),
                node: e.node,
            })
            .collect();
        let zeroed = WTree { root: WNode::Vertex { label, children } };
        let n = normalize_wtree(&op, &zeroed).unwrap();
        let direct = op
            .compose(2, &a, &[(1, GenTree::Leaf(1)), (2, b)])
            .unwrap();
        assert_eq!(n, normalize_wtree(&op, &WTree::corolla(direct, 3)).unwrap());
    }

    #[test]
    fn w_operad_laws_on_random_instances() {
        let op = two_gen_operad();
        let mut rng = crate::rng::SplitMix64::new(5);
        let lengths = [rat(1, 3), rat(1, 2), rat(2, 3), rat(1, 1)];
        let random_wtree = |rng: &mut crate::rng::SplitMix64, arity: usize| -> WTree<GenTree, Rat> {
            if arity == 1 && rng.below(3) == 0 {
                return WTree::trivial();
            }
            // a random right comb with binary labels
            let mut t = WTree::corolla(op.elems(2)[rng.index(4)].clone(), 2);
            while t.arity() < arity {
                let ext = WTree::corolla(op.elems(2)[rng.index(4)].clone(), 2);
                let slot = 1 + rng.index(t.arity());
                let mut args: Vec<WTree<GenTree, Rat>> =
                    (0..t.arity()).map(|_| WTree::trivial()).collect();
                args[slot - 1] = ext;
                t = w_compose(&op, &t, &args).unwrap();
            }
            if arity == 1 {
                return WTree::trivial();
            }
            // randomize edge lengths
            fn randomize(
                node: WNode<GenTree, Rat>,
                rng: &mut crate::rng::SplitMix64,
                lengths: &[Rat],
            ) -> WNode<GenTree, Rat> {
                match node {
                    WNode::Twig(i) => WNode::Twig(i),
                    WNode::Vertex { label, children } => WNode::Vertex {
                        label,
                        children: children
                            .into_iter()
                            .map(|e| WEdge {
                                length: e.length.map(|_| lengths[rng.index(lengths.len())].clone()),
                                node: randomize(e.node, rng, lengths),
                            })
                            .collect(),
                    },
                }
            }
            WTree { root: randomize(t.root, rng, &lengths) }
        };
        for _ in 0..60 {
            let k = 2 + rng.index(2);
            let a = random_wtree(&mut rng, k);
            let k = a.arity();
            let b_arities: Vec<usize> = (0..k).map(|_| 1 + rng.index(2)).collect();
            let bs: Vec<WTree<GenTree, Rat>> =
                b_arities.iter().map(|&ar| random_wtree(&mut rng, ar)).collect();
            let m: usize = bs.iter().map(WTree::arity).sum();
            let c_arities: Vec<usize> = (0..m).map(|_| 1 + rng.index(2)).collect();
            let cs: Vec<WTree<GenTree, Rat>> =
                c_arities.iter().map(|&ar| random_wtree(&mut rng, ar)).collect();
            // associativity
            let ab = w_compose(&op, &a, &bs).unwrap();
            let lhs = w_compose(&op, &ab, &cs).unwrap();
            let mut pos = 0;
            let mut inner = Vec::new();
            for b in &bs {
                let chunk = &cs[pos..pos + b.arity()];
                pos += b.arity();
                inner.push(w_compose(&op, b, chunk).unwrap());
            }
            let rhs = w_compose(&op, &a, &inner).unwrap();
            assert_eq!(lhs, rhs);
            // units
            let triv: Vec<WTree<GenTree, Rat>> =
                (0..k).map(|_| WTree::trivial()).collect();
            assert_eq!(w_compose(&op, &a, &triv).unwrap(), normalize_wtree(&op, &a).unwrap());
        }
    }

    #[test]
    fn face_poset_small_cases() {
        let p3 = face_poset(3).unwrap();
        assert_eq!(p3.len(), 3);
        assert_eq!(f_vector(&p3), vec![2, 1]);
        let p2 = face_poset(2).unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!(f_vector(&p2), vec![1]);
        let p4 = face_poset(4).unwrap();
        assert_eq!(p4.len(), 11);
        assert_eq!(f_vector(&p4), vec![5, 5, 1]);
        assert_eq!(p4.count_by_grade(), vec![1, 5, 5]);
        let p5 = face_poset(5).unwrap();
        assert_eq!(f_vector(&p5), vec![14, 21, 9, 1]);
    }

    #[test]
    fn face_poset_euler_characteristic_is_one() {
        for k in 2..=6 {
            let f = f_vector(&face_poset(k).unwrap());
            let chi: i64 = f
                .iter()
                .enumerate()
                .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
                .sum();
            assert_eq!(chi, 1, "k = {k}");
        }
    }

    /// The closed boundary faces of the cubical presentation of the
    /// one-point W-construction, ordered by containment of strata, form
    /// exactly the collapse poset of planar trees.
    #[test]
    fn strata_of_point_operad_match_face_poset() {
        for k in [3usize, 4] {
            let p = face_poset(k).unwrap();
            let trees = p.elements().to_vec();
            // strata: (tree, subset of internal edges frozen at length 1)
            let mut strata: Vec<(usize, Vec<bool>)> = Vec::new();
            for (ti, t) in trees.iter().enumerate() {
                let e = t.internal_edge_count();
                for mask in 0..(1u32 << e) {
                    strata.push((ti, (0..e).map(|b| mask & (1 << b) != 0).collect()));
                }
            }
            // a stratum lies in the closed face of `f` when collapsing all
            // its non-frozen edges (and possibly some frozen ones) lands on
            // f: the surviving copy of f must sit entirely at length 1
            let in_face = |stratum: &(usize, Vec<bool>), f: &Tree| -> bool {
                let t = &trees[stratum.0];
                let paths = t.internal_edge_paths();
                let frozen: Vec<usize> = (0..paths.len()).filter(|&i| stratum.1[i]).collect();
                let free: Vec<usize> = (0..paths.len()).filter(|&i| !stratum.1[i]).collect();
                for mask in 0..(1u32 << frozen.len()) {
                    let mut chosen: Vec<usize> = free.clone();
                    chosen.extend(
                        (0..frozen.len()).filter(|&b| mask & (1 << b) != 0).map(|b| frozen[b]),
                    );
                    // collapse in descending path order so earlier paths stay valid
                    let mut chosen_paths: Vec<Vec<usize>> =
                        chosen.iter().map(|&i| paths[i].clone()).collect();
                    chosen_paths.sort_by(|a, b| b.len().cmp(&a.len()).then(b.cmp(a)));
                    let mut current = t.clone();
                    for path in &chosen_paths {
                        current = current.collapse_edge(path).unwrap();
                    }
                    if current == *f {
                        return true;
                    }
                }
                false
            };
            // containment order on closed faces equals the collapse order
            for (i, fi) in trees.iter().enumerate() {
                for (j, fj) in trees.iter().enumerate() {
                    let contained = strata
                        .iter()
                        .filter(|s| in_face(s, fi))
                        .all(|s| in_face(s, fj));
                    assert_eq!(
                        contained,
                        p.is_leq(i, j),
                        "faces {} vs {}",
                        fi.code(true),
                        fj.code(true)
                    );
                }
            }
        }
    }

    #[test]
    fn wtree_json_round_trip() {
        let op = two_gen_operad();
        let b = op.elems(2)[2].clone();
        let t: WTree<GenTree, Rat> = WTree {
            root: vertex(
                op.elems(2)[0].clone(),
                vec![twig(1), internal(rat(2, 3), vertex(b, vec![twig(2), twig(3)]))],
            ),
        };
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"2/3\""));
        let back: WTree<GenTree, Rat> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
