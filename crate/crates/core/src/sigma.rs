//! Finite symmetric sequences (Σ-sets) and their monoidal tensor.
//!
//! A Σ-set is an arity-indexed family of finite sets, each with a right
//! action of the symmetric group on its arity. The tensor implements
//!
//! ```text
//! (A ⊗ B)(n) = ⨿_k A(k) ×_{Σ_k} ( ⨿_{π ∈ Map(n,k)} ⊗_i B_{π⁻¹(i)} )
//! ```
//!
//! where `Map(n,k)` is the set of maps `{1..n} → {1..k}` and `B_S` is
//! identified with `B_{#S}` through the order-preserving bijection. All
//! coequalizers of finite sets are computed as union-find quotients over
//! explicit generators.
//!
//! Group actions are stored on adjacent transpositions only; the Coxeter
//! relations are what `validate` checks, and they are exactly what makes the
//! extension to all of `Σ_n` well defined.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::perm::Perm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaError {
    ArityOutOfRange { arity: usize, max_arity: usize },
    Invalid(String),
}

impl fmt::Display for SigmaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaError::ArityOutOfRange { arity, max_arity } => {
                write!(f, "arity {arity} exceeds truncation bound {max_arity}")
            }
            SigmaError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for SigmaError {}

/// A truncated Σ-set: finite sets `X(0), .., X(max_arity)` with right
/// symmetric-group actions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaSet {
    names: Vec<Vec<String>>,
    /// `gen_action[n][g][x]` = `x · s_g` where `s_g` swaps `g` and `g + 1`.
    gen_action: Vec<Vec<Vec<usize>>>,
}

impl SigmaSet {
    /// Builds a Σ-set with trivial actions from per-arity sizes.
    pub fn trivial(sizes: &[usize]) -> SigmaSet {
        let names = sizes
            .iter()
            .enumerate()
            .map(|(n, &s)| (0..s).map(|i| format!("x{n}_{i}")).collect())
            .collect();
        SigmaSet::trivial_named(names)
    }

    pub fn trivial_named(names: Vec<Vec<String>>) -> SigmaSet {
        let gen_action = names
            .iter()
            .enumerate()
            .map(|(n, elems)| {
                let id: Vec<usize> = (0..elems.len()).collect();
                vec![id; n.saturating_sub(1)]
            })
            .collect();
        SigmaSet { names, gen_action }
    }

    /// The Σ-set concentrated in one arity carrying the right regular
    /// action of its symmetric group ("one free generator" in that arity).
    pub fn regular(arity: usize) -> SigmaSet {
        let perms = Perm::all(arity);
        let index: HashMap<Perm, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut names = vec![Vec::new(); arity + 1];
        names[arity] = perms.iter().map(|p| format!("g{p}")).collect();
        let mut gen_action = vec![Vec::new(); arity + 1];
        gen_action[arity] = (0..arity.saturating_sub(1))
            .map(|g| {
                let t = Perm::adjacent_transposition(arity, g);
                perms.iter().map(|p| index[&p.compose(&t)]).collect()
            })
            .collect();
        for (n, row) in gen_action.iter_mut().enumerate() {
            if n != arity {
                *row = vec![Vec::new(); n.saturating_sub(1)];
            }
        }
        SigmaSet { names, gen_action }
    }

    /// The unit Σ-set: one element in arity 1, nothing elsewhere.
    pub fn unit() -> SigmaSet {
        SigmaSet::trivial_named(vec![vec![], vec!["e".to_string()]])
    }

    pub fn from_parts(
        names: Vec<Vec<String>>,
        gen_action: Vec<Vec<Vec<usize>>>,
    ) -> Result<SigmaSet, SigmaError> {
        let s = SigmaSet { names, gen_action };
        let violations = s.validate();
        if violations.is_empty() {
            Ok(s)
        } else {
            Err(SigmaError::Invalid(violations.join("; ")))
        }
    }

    pub fn max_arity(&self) -> usize {
        self.names.len().saturating_sub(1)
    }

    pub fn size(&self, n: usize) -> usize {
        self.names.get(n).map_or(0, Vec::len)
    }

    pub fn name(&self, n: usize, x: usize) -> &str {
        &self.names[n][x]
    }

    pub fn names_at(&self, n: usize) -> &[String] {
        self.names.get(n).map_or(&[], Vec::as_slice)
    }

    /// Right action `x · sigma`.
    pub fn act(&self, n: usize, x: usize, sigma: &Perm) -> usize {
        assert_eq!(sigma.degree(), n, "permutation degree must match arity");
        let mut cur = x;
        for g in sigma.adjacent_factors() {
            cur = self.gen_action[n][g][cur];
        }
        cur
    }

    /// Checks the stored tables present a genuine Σ_n-action in every arity:
    /// involutivity, far commutation, and the braid relation.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for n in 0..=self.max_arity() {
            let gens = &self.gen_action[n];
            if gens.len() != n.saturating_sub(1) {
                out.push(format!("arity {n}: expected {} generator tables", n.saturating_sub(1)));
                continue;
            }
            let size = self.size(n);
            for (g, table) in gens.iter().enumerate() {
                if table.len() != size || table.iter().any(|&y| y >= size) {
                    out.push(format!("arity {n}: generator {g} table malformed"));
                    return out;
                }
                for x in 0..size {
                    if table[table[x]] != x {
                        out.push(format!("arity {n}: s_{g} not an involution at element {x}"));
                    }
                }
            }
            for g in 0..gens.len() {
                for h in g + 2..gens.len() {
                    for x in 0..size {
                        if gens[h][gens[g][x]] != gens[g][gens[h][x]] {
                            out.push(format!(
                                "arity {n}: s_{g}, s_{h} fail to commute at element {x}"
                            ));
                        }
                    }
                }
                if g + 1 < gens.len() {
                    let (a, b) = (g, g + 1);
                    for x in 0..size {
                        let lhs = gens[a][gens[b][gens[a][x]]];
                        let rhs = gens[b][gens[a][gens[b][x]]];
                        if lhs != rhs {
                            out.push(format!(
                                "arity {n}: braid relation fails for s_{a}, s_{b} at element {x}"
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

/// A point of `⨿_k A(k) × (⨿_π ⊗_i B_fiber)` before coequalizing: the raw
/// data underneath a tensor class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawTensor {
    /// Number of `A`-slots.
    pub k: usize,
    /// Element of `A(k)`.
    pub x: usize,
    /// The structure map `{0..n-1} → {0..k-1}`.
    pub pi: Vec<usize>,
    /// `ys[i]` is an element of `B(#fiber_i)` placed on `pi⁻¹(i)` through
    /// the order-preserving bijection.
    pub ys: Vec<usize>,
}

impl RawTensor {
    pub fn arity(&self) -> usize {
        self.pi.len()
    }

    pub fn fiber(&self, slot: usize) -> Vec<usize> {
        (0..self.pi.len()).filter(|&q| self.pi[q] == slot).collect()
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &i in &self.pi {
            sizes[i] += 1;
        }
        sizes
    }

    pub fn display(&self, a: &SigmaSet, b: &SigmaSet) -> String {
        let sizes = self.fiber_sizes();
        let parts: Vec<String> = self
            .ys
            .iter()
            .zip(sizes.iter())
            .map(|(&y, &f)| b.name(f, y).to_string())
            .collect();
        let pi1: Vec<usize> = self.pi.iter().map(|&i| i + 1).collect();
        format!("{}⟨{}⟩@{:?}", a.name(self.k, self.x), parts.join(","), pi1)
    }
}

/// One arity of a computed tensor `A ⊗ B`: orbit representatives plus
/// dictionaries from every raw point to its class.
#[derive(Clone, Debug)]
pub struct TensorSet {
    pub arity: usize,
    b: SigmaSet,
    reps: Vec<RawTensor>,
    class_of: HashMap<RawTensor, usize>,
}

impl TensorSet {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, class: usize) -> &RawTensor {
        &self.reps[class]
    }

    pub fn reps(&self) -> &[RawTensor] {
        &self.reps
    }

    pub fn class_of(&self, raw: &RawTensor) -> Option<usize> {
        self.class_of.get(raw).copied()
    }

    /// Induced right Σ_n-action on classes.
    pub fn act(&self, class: usize, tau: &Perm) -> usize {
        let raw = raw_act(&self.b, &self.reps[class], tau);
        self.class_of[&raw]
    }
}

/// The right Σ_n-action on raw tensor points: precompose the structure map
/// and carry each label along the order-preserving fiber identifications.
pub fn raw_act(b: &SigmaSet, raw: &RawTensor, tau: &Perm) -> RawTensor {
    let n = raw.arity();
    assert_eq!(tau.degree(), n);
    let pi: Vec<usize> = (0..n).map(|q| raw.pi[tau.apply(q)]).collect();
    let mut ys = Vec::with_capacity(raw.k);
    for i in 0..raw.k {
        let old_fiber = raw.fiber(i);
        let new_fiber: Vec<usize> = (0..n).filter(|&q| pi[q] == i).collect();
        let f = old_fiber.len();
        debug_assert_eq!(new_fiber.len(), f);
        // position q of the new fiber holds what position tau(q) held
        let images: Vec<usize> = new_fiber
            .iter()
            .map(|&q| old_fiber.iter().position(|&p| p == tau.apply(q)).unwrap())
            .collect();
        let phi = Perm::from_images(images).expect("fiber shuffle is a bijection");
        ys.push(b.act(f, raw.ys[i], &phi));
    }
    RawTensor { k: raw.k, x: raw.x, pi, ys }
}

/// All raw points of `(A ⊗ B)(n)`.
pub fn raw_tensor_points(a: &SigmaSet, b: &SigmaSet, n: usize) -> Vec<RawTensor> {
    let mut out = Vec::new();
    for k in 0..=a.max_arity() {
        if a.size(k) == 0 {
            continue;
        }
        if k == 0 {
            if n == 0 {
                for x in 0..a.size(0) {
                    out.push(RawTensor { k: 0, x, pi: vec![], ys: vec![] });
                }
            }
            continue;
        }
        for pi in all_maps(n, k) {
            let mut sizes = vec![0usize; k];
            for &i in &pi {
                sizes[i] += 1;
            }
            if sizes.iter().any(|&f| b.size(f) == 0) {
                continue;
            }
            for x in 0..a.size(k) {
                let mut stack = vec![Vec::<usize>::new()];
                for &f in &sizes {
                    let mut next = Vec::new();
                    for prefix in &stack {
                        for y in 0..b.size(f) {
                            let mut row = prefix.clone();
                            row.push(y);
                            next.push(row);
                        }
                    }
                    stack = next;
                }
                for ys in stack {
                    out.push(RawTensor { k, x, pi: pi.clone(), ys });
                }
            }
        }
    }
    out.sort();
    out
}

fn all_maps(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * k);
        for prefix in &out {
            for v in 0..k {
                let mut row = prefix.clone();
                row.push(v);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Computes `(A ⊗ B)(n)`: orbit representatives of the coequalized raw
/// points plus the induced Σ_n-action.
pub fn sigma_tensor(a: &SigmaSet, b: &SigmaSet, n: usize) -> TensorSet {
    let raws = raw_tensor_points(a, b, n);
    let index: HashMap<RawTensor, usize> =
        raws.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let mut uf = UnionFind::new(raws.len());
    for (ri, raw) in raws.iter().enumerate() {
        // balance relation (x·σ, π, ys) ~ (x, σ∘π, ys∘σ⁻¹) over generators
        for g in 0..raw.k.saturating_sub(1) {
            let sigma = Perm::adjacent_transposition(raw.k, g);
            let left = RawTensor {
                k: raw.k,
                x: a.act(raw.k, raw.x, &sigma),
                pi: raw.pi.clone(),
                ys: raw.ys.clone(),
            };
            let mut pi = raw.pi.clone();
            for v in pi.iter_mut() {
                *v = sigma.apply(*v);
            }
            let mut ys = raw.ys.clone();
            ys.swap(g, g + 1);
            let right = RawTensor { k: raw.k, x: raw.x, pi, ys };
            uf.union(index[&left], index[&right]);
            let _ = ri;
        }
    }
    let mut class_rep: HashMap<usize, RawTensor> = HashMap::new();
    for (i, raw) in raws.iter().enumerate() {
        let root = uf.find(i);
        match class_rep.get(&root) {
            Some(existing) if existing <= raw => {}
            _ => {
                class_rep.insert(root, raw.clone());
            }
        }
    }
    let mut reps: Vec<RawTensor> = class_rep.values().cloned().collect();
    reps.sort();
    let rep_index: HashMap<RawTensor, usize> =
        reps.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let mut class_of = HashMap::with_capacity(raws.len());
    for (i, raw) in raws.iter().enumerate() {
        let root = uf.find(i);
        class_of.insert(raw.clone(), rep_index[&class_rep[&root]]);
    }
    TensorSet { arity: n, b: b.clone(), reps, class_of }
}

/// Assembles `A ⊗ B` truncated at `max_arity` into a Σ-set, returning the
/// per-arity dictionaries alongside.
pub fn tensor_as_sigma(a: &SigmaSet, b: &SigmaSet, max_arity: usize) -> (SigmaSet, Vec<TensorSet>) {
    let tensors: Vec<TensorSet> = (0..=max_arity).map(|n| sigma_tensor(a, b, n)).collect();
    let names: Vec<Vec<String>> = tensors
        .iter()
        .map(|t| t.reps.iter().map(|r| r.display(a, b)).collect())
        .collect();
    let gen_action: Vec<Vec<Vec<usize>>> = tensors
        .iter()
        .enumerate()
        .map(|(n, t)| {
            (0..n.saturating_sub(1))
                .map(|g| {
                    let s = Perm::adjacent_transposition(n, g);
                    (0..t.len()).map(|c| t.act(c, &s)).collect()
                })
                .collect()
        })
        .collect();
    (SigmaSet { names, gen_action }, tensors)
}

/// Quotients a Σ-set by the Σ-closure of the given per-arity relation
/// pairs. Returns the quotient and, per arity, the projection onto class
/// indices.
pub fn quotient_sigma(
    x: &SigmaSet,
    relations: &[(usize, usize, usize)],
) -> (SigmaSet, Vec<Vec<usize>>) {
    let max = x.max_arity();
    let mut ufs: Vec<UnionFind> = (0..=max).map(|n| UnionFind::new(x.size(n))).collect();
    let mut queue: Vec<(usize, usize, usize)> = relations.to_vec();
    while let Some((n, i, j)) = queue.pop() {
        if ufs[n].union(i, j) {
            // close under the action generators
            for g in 0..n.saturating_sub(1) {
                let gi = x.gen_action_entry(n, g, i);
                let gj = x.gen_action_entry(n, g, j);
                queue.push((n, gi, gj));
            }
        }
    }
    let mut projections = Vec::with_capacity(max + 1);
    let mut names = Vec::with_capacity(max + 1);
    let mut gen_action = Vec::with_capacity(max + 1);
    for n in 0..=max {
        let size = x.size(n);
        let mut class_index: HashMap<usize, usize> = HashMap::new();
        let mut proj = vec![0usize; size];
        let mut class_names: Vec<String> = Vec::new();
        for e in 0..size {
            let root = ufs[n].find(e);
            let next = class_index.len();
            let idx = *class_index.entry(root).or_insert(next);
            if idx == class_names.len() {
                class_names.push(format!("[{}]", x.name(n, e)));
            }
            proj[e] = idx;
        }
        let classes = class_names.len();
        let mut tables: Vec<Vec<usize>> = vec![vec![usize::MAX; classes]; n.saturating_sub(1)];
        for e in 0..size {
            for g in 0..n.saturating_sub(1) {
                let img = proj[x.gen_action_entry(n, g, e)];
                let cur = &mut tables[g][proj[e]];
                debug_assert!(*cur == usize::MAX || *cur == img, "quotient not Σ-closed");
                *cur = img;
            }
        }
        names.push(class_names);
        gen_action.push(tables);
        projections.push(proj);
    }
    (SigmaSet { names, gen_action }, projections)
}

impl SigmaSet {
    fn gen_action_entry(&self, n: usize, g: usize, x: usize) -> usize {
        self.gen_action[n][g][x]
    }
}

/// Plain union-find with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the union merged two distinct classes.
    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.size[a] += self.size[b];
        self.parent[b] = a;
        true
    }
}
