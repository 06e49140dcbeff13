//! Rooted trees with ordered children and leaf labels: the index language
//! shared by the operad, W-construction, and configuration modules.
//!
//! A tree on `{1..k}` has its `k` twigs (leaf edges) labelled bijectively by
//! `1..=k`. The trivial tree is a bare twig with no vertices. Trees are
//! immutable values; every operation returns a fresh tree.
//!
//! Internal edges are addressed by the path of child indices (0-based) from
//! the root vertex down to the child subtree hanging under the edge.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    /// A twig carrying its 1-based label.
    Leaf(usize),
    /// A vertex with an ordered list of incoming subtrees.
    Node(Vec<Tree>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeError {
    SlotOutOfRange { slot: usize, arity: usize },
    NotAnInternalEdge,
    InvalidTree(String),
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::SlotOutOfRange { slot, arity } => {
                write!(f, "slot {slot} out of range 1..={arity}")
            }
            TreeError::NotAnInternalEdge => write!(f, "edge is a twig or the root edge"),
            TreeError::InvalidTree(msg) => write!(f, "invalid tree: {msg}"),
        }
    }
}

impl std::error::Error for TreeError {}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code(true))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code(true))
    }
}

impl Tree {
    /// The trivial tree: a single twig labelled 1, no vertices.
    pub fn trivial() -> Tree {
        Tree::Leaf(1)
    }

    /// The corolla: one vertex with twigs `1..=k`.
    pub fn corolla(k: usize) -> Tree {
        Tree::Node((1..=k).map(Tree::Leaf).collect())
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Tree::Leaf(_))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(cs) => cs.iter().map(Tree::leaf_count).sum(),
        }
    }

    /// Leaf labels in planar (left-to-right) order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Tree::Leaf(i) => out.push(*i),
            Tree::Node(cs) => cs.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(cs) => 1 + cs.iter().map(Tree::vertex_count).sum::<usize>(),
        }
    }

    pub fn internal_edge_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(cs) => cs
                .iter()
                .map(|c| match c {
                    Tree::Leaf(_) => 0,
                    Tree::Node(_) => 1 + c.internal_edge_count(),
                })
                .sum(),
        }
    }

    /// Checks that the leaf labels are a bijection with `1..=k` and, when
    /// `min_valence` is 2, that every vertex has at least two children.
    pub fn validate(&self, min_valence: usize) -> Result<(), TreeError> {
        let leaves = self.leaves();
        let k = leaves.len();
        let set: BTreeSet<usize> = leaves.iter().copied().collect();
        if set.len() != k || leaves.iter().any(|&l| l < 1 || l > k) {
            return Err(TreeError::InvalidTree(format!(
                "twig labels {leaves:?} are not a bijection with 1..={k}"
            )));
        }
        self.check_valence(min_valence)
    }

    fn check_valence(&self, min_valence: usize) -> Result<(), TreeError> {
        match self {
            Tree::Leaf(_) => Ok(()),
            Tree::Node(cs) => {
                if cs.len() < min_valence {
                    return Err(TreeError::InvalidTree(format!(
                        "vertex of valence {} below minimum {min_valence}",
                        cs.len()
                    )));
                }
                cs.iter().try_for_each(|c| c.check_valence(min_valence))
            }
        }
    }

    fn shift_leaves(&self, f: &impl Fn(usize) -> usize) -> Tree {
        match self {
            Tree::Leaf(i) => Tree::Leaf(f(*i)),
            Tree::Node(cs) => Tree::Node(cs.iter().map(|c| c.shift_leaves(f)).collect()),
        }
    }

    /// Relabels twigs by a map on labels (used by the symmetric-group action).
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Tree {
        self.shift_leaves(&f)
    }

    /// Grafts `guest` (on `{1..m}`) onto twig `slot` of `self` (on `{1..k}`),
    /// producing a tree on `{1..k+m-1}`. The guest's twigs take labels
    /// `slot..slot+m-1` and host twigs above `slot` shift up by `m - 1`.
    pub fn graft(&self, slot: usize, guest: &Tree) -> Result<Tree, TreeError> {
        let k = self.leaf_count();
        if slot < 1 || slot > k {
            return Err(TreeError::SlotOutOfRange { slot, arity: k });
        }
        let m = guest.leaf_count();
        let shifted_guest = guest.shift_leaves(&|i| i + slot - 1);
        Ok(self.replace_leaf(slot, &shifted_guest, m))
    }

    fn replace_leaf(&self, slot: usize, shifted_guest: &Tree, m: usize) -> Tree {
        match self {
            Tree::Leaf(i) => {
                if *i == slot {
                    shifted_guest.clone()
                } else if *i > slot {
                    Tree::Leaf(*i + m - 1)
                } else {
                    Tree::Leaf(*i)
                }
            }
            Tree::Node(cs) => Tree::Node(
                cs.iter()
                    .map(|c| c.replace_leaf(slot, shifted_guest, m))
                    .collect(),
            ),
        }
    }

    /// Canonical code: equal codes iff isomorphic (as ordered trees when
    /// `respect_order`, as unordered trees otherwise), matching twig labels.
    pub fn code(&self, respect_order: bool) -> String {
        match self {
            Tree::Leaf(i) => i.to_string(),
            Tree::Node(cs) => {
                let mut codes: Vec<String> = cs.iter().map(|c| c.code(respect_order)).collect();
                if !respect_order {
                    codes.sort();
                }
                format!("({})", codes.join(","))
            }
        }
    }

    /// The canonical ordered representative of the unordered isomorphism
    /// class: children sorted recursively by unordered code.
    pub fn unordered_canonical(&self) -> Tree {
        match self {
            Tree::Leaf(i) => Tree::Leaf(*i),
            Tree::Node(cs) => {
                let mut children: Vec<Tree> =
                    cs.iter().map(Tree::unordered_canonical).collect();
                children.sort_by_key(|c| c.code(false));
                Tree::Node(children)
            }
        }
    }

    /// Paths (0-based child indices from the root vertex) of all internal
    /// edges, in depth-first order.
    pub fn internal_edge_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if let Tree::Node(cs) = self {
            for (i, c) in cs.iter().enumerate() {
                if let Tree::Node(_) = c {
                    out.push(vec![i]);
                    for mut sub in c.internal_edge_paths() {
                        let mut path = vec![i];
                        path.append(&mut sub);
                        out.push(path);
                    }
                }
            }
        }
        out
    }

    /// Contracts the internal edge at `path`, merging its two end vertices
    /// and splicing the child's children in place.
    pub fn collapse_edge(&self, path: &[usize]) -> Result<Tree, TreeError> {
        let (&last, prefix) = path.split_last().ok_or(TreeError::NotAnInternalEdge)?;
        let mut t = self.clone();
        let parent = t.node_at_mut(prefix).ok_or(TreeError::NotAnInternalEdge)?;
        let Tree::Node(cs) = parent else {
            return Err(TreeError::NotAnInternalEdge);
        };
        if last >= cs.len() {
            return Err(TreeError::NotAnInternalEdge);
        }
        let Tree::Node(grand) = cs[last].clone() else {
            return Err(TreeError::NotAnInternalEdge);
        };
        cs.splice(last..=last, grand);
        Ok(t)
    }

    fn node_at_mut(&mut self, path: &[usize]) -> Option<&mut Tree> {
        let mut cur = self;
        for &i in path {
            match cur {
                Tree::Node(cs) => cur = cs.get_mut(i)?,
                Tree::Leaf(_) => return None,
            }
        }
        match cur {
            Tree::Node(_) => Some(cur),
            Tree::Leaf(_) => None,
        }
    }

    pub fn subtree_at(&self, path: &[usize]) -> Option<&Tree> {
        let mut cur = self;
        for &i in path {
            match cur {
                Tree::Node(cs) => cur = cs.get(i)?,
                Tree::Leaf(_) => return None,
            }
        }
        Some(cur)
    }

    /// Graphviz rendering of the tree, twigs shown as labelled boxes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  rankdir=BT;\n");
        let mut counter = 0usize;
        self.dot_node(&mut out, &mut counter, None);
        out.push_str("}\n");
        out
    }

    fn dot_node(&self, out: &mut String, counter: &mut usize, parent: Option<usize>) {
        let id = *counter;
        *counter += 1;
        match self {
            Tree::Leaf(i) => {
                out.push_str(&format!("  n{id} [shape=box,label=\"{i}\"];\n"));
            }
            Tree::Node(cs) => {
                out.push_str(&format!("  n{id} [shape=circle,label=\"\"];\n"));
                for c in cs {
                    let child_id = *counter;
                    c.dot_node(out, counter, Some(id));
                    let _ = child_id;
                }
            }
        }
        if let Some(p) = parent {
            out.push_str(&format!("  n{id} -> n{p};\n"));
        }
    }
}

/// Enumerates one representative per isomorphism class of trees on `{1..k}`,
/// in deterministic canonical-code order.
///
/// With `planar = true` the classes are ordered trees whose twigs read
/// `1..=k` left to right (the associahedron faces); with `planar = false`
/// they are unordered trees with arbitrary twig labelling. `max_vertices`
/// caps the vertex count, which only binds when `min_valence == 1`.
pub fn enumerate_trees(
    k: usize,
    planar: bool,
    min_valence: usize,
    max_vertices: usize,
) -> Result<Vec<Tree>, TreeError> {
    if k == 0 {
        return Err(TreeError::InvalidTree("k must be at least 1".into()));
    }
    let mut out: Vec<Tree> = if planar {
        planar_trees(1, k, min_valence, max_vertices)
    } else {
        let labels: Vec<usize> = (1..=k).collect();
        unordered_trees(&labels, min_valence, max_vertices)
            .into_iter()
            .map(|t| t.unordered_canonical())
            .collect()
    };
    let respect = planar;
    out.sort_by_key(|t| t.code(respect));
    out.dedup();
    Ok(out)
}

fn planar_trees(first: usize, len: usize, min_valence: usize, budget: usize) -> Vec<Tree> {
    let mut out = Vec::new();
    if len == 1 {
        out.push(Tree::Leaf(first));
    }
    if budget == 0 {
        return out;
    }
    let lo = min_valence.max(1);
    for v in lo..=len.max(lo) {
        if v == 1 && len >= 1 && min_valence <= 1 {
            // unary vertex over the same segment
            for sub in planar_trees(first, len, min_valence, budget - 1) {
                out.push(Tree::Node(vec![sub]));
            }
            continue;
        }
        if v < 2 || v > len {
            continue;
        }
        for split in compositions(len, v) {
            let mut parts: Vec<Vec<Tree>> = Vec::with_capacity(v);
            let mut start = first;
            for &s in &split {
                parts.push(planar_trees(start, s, min_valence, budget - 1));
                start += s;
            }
            for combo in cartesian(&parts) {
                let t = Tree::Node(combo);
                if t.vertex_count() <= budget {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Compositions of `n` into exactly `parts` positive parts.
fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(n: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if n >= 1 {
                cur.push(n);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for first in 1..=n.saturating_sub(parts - 1) {
            cur.push(first);
            rec(n - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    if parts >= 1 {
        rec(n, parts, &mut cur, &mut out);
    }
    out
}

fn cartesian(parts: &[Vec<Tree>]) -> Vec<Vec<Tree>> {
    let mut out: Vec<Vec<Tree>> = vec![Vec::new()];
    for p in parts {
        let mut next = Vec::with_capacity(out.len() * p.len());
        for prefix in &out {
            for item in p {
                let mut row = prefix.clone();
                row.push(item.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

fn unordered_trees(labels: &[usize], min_valence: usize, budget: usize) -> Vec<Tree> {
    let mut out = Vec::new();
    if labels.len() == 1 {
        out.push(Tree::Leaf(labels[0]));
    }
    if budget == 0 {
        return out;
    }
    if min_valence <= 1 {
        for sub in unordered_trees(labels, min_valence, budget - 1) {
            out.push(Tree::Node(vec![sub]));
        }
    }
    for v in 2.max(min_valence)..=labels.len() {
        for blocks in set_partitions(labels, v) {
            let parts: Vec<Vec<Tree>> = blocks
                .iter()
                .map(|b| unordered_trees(b, min_valence, budget - 1))
                .collect();
            for combo in cartesian(&parts) {
                let t = Tree::Node(combo);
                if t.vertex_count() <= budget {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Partitions of `items` into exactly `blocks` nonempty blocks, each block
/// sorted, blocks ordered by least element.
pub(crate) fn set_partitions_pub(items: &[usize], blocks: usize) -> Vec<Vec<Vec<usize>>> {
    set_partitions(items, blocks)
}

fn set_partitions(items: &[usize], blocks: usize) -> Vec<Vec<Vec<usize>>> {
    let n = items.len();
    if blocks == 0 || blocks > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    fn rec(
        items: &[usize],
        i: usize,
        used: usize,
        blocks: usize,
        assignment: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        let n = items.len();
        if i == n {
            if used == blocks {
                let mut part = vec![Vec::new(); blocks];
                for (j, &b) in assignment.iter().enumerate() {
                    part[b].push(items[j]);
                }
                out.push(part);
            }
            return;
        }
        // restricted growth strings enumerate partitions exactly once
        for b in 0..=used.min(blocks - 1) {
            assignment[i] = b;
            let next_used = used.max(b + 1);
            if next_used + (n - i - 1) >= blocks {
                rec(items, i + 1, next_used, blocks, assignment, out);
            }
        }
    }
    rec(items, 0, 0, blocks, &mut assignment, &mut out);
    out
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TreeJson {
    Leaf { leaf: usize },
    Node { children: Vec<TreeJson> },
}

impl From<&Tree> for TreeJson {
    fn from(t: &Tree) -> TreeJson {
        match t {
            Tree::Leaf(i) => TreeJson::Leaf { leaf: *i },
            Tree::Node(cs) => TreeJson::Node {
                children: cs.iter().map(TreeJson::from).collect(),
            },
        }
    }
}

impl From<TreeJson> for Tree {
    fn from(t: TreeJson) -> Tree {
        match t {
            TreeJson::Leaf { leaf } => Tree::Leaf(leaf),
            TreeJson::Node { children } => {
                Tree::Node(children.into_iter().map(Tree::from).collect())
            }
        }
    }
}

impl Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        TreeJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Tree {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let t: Tree = TreeJson::deserialize(de)?.into();
        if t.leaf_count() == 0 && !matches!(t, Tree::Node(_)) {
            return Err(D::Error::custom("empty tree"));
        }
        Ok(t)
    }
}
