//! Set-level operads, truncated at a maximum arity so that every law is
//! checkable by finite enumeration.
//!
//! The composition and equivariance conventions are fixed once, here, and
//! verified exhaustively on the operad of symmetric groups (where both
//! sides of every law are concrete permutations):
//!
//! * right actions precompose positions (`x · σ`);
//! * `μ(a; b₁..b_k)` feeds block `j` through `b_j` and then moves whole
//!   blocks by `a`, so on permutations `μ(a; b⃗) = block(a) ∘ (b₁ ⊕ .. ⊕ b_k)`;
//! * `μ(a·σ; b_{σ(1)}, .., b_{σ(k)}) = μ(a; b⃗) · block(σ; i_{σ(1)}, .., i_{σ(k)})`;
//! * `μ(a; b₁τ₁, .., b_kτ_k) = μ(a; b⃗) · (τ₁ ⊕ .. ⊕ τ_k)`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::perm::Perm;
use crate::rng::SplitMix64;
use crate::sigma::SigmaSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperadError {
    ArityOverflow { needed: usize, max_arity: usize },
    ArityMismatch { expected: usize, got: usize },
    MissingEntry(String),
    NonEquivariantAction(String),
    BoundExceeded(String),
    Invalid(String),
}

impl fmt::Display for OperadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperadError::ArityOverflow { needed, max_arity } => {
                write!(f, "composition needs arity {needed}, operad truncated at {max_arity}")
            }
            OperadError::ArityMismatch { expected, got } => {
                write!(f, "expected {expected} arguments, got {got}")
            }
            OperadError::MissingEntry(msg) => write!(f, "missing table entry: {msg}"),
            OperadError::NonEquivariantAction(msg) => {
                write!(f, "group action is not equivariant: {msg}")
            }
            OperadError::BoundExceeded(msg) => write!(f, "bound exceeded: {msg}"),
            OperadError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for OperadError {}

/// The composition structure of a truncated operad: unit, symmetric
/// actions, and composition. Implementors need not have enumerable element
/// sets (the little-discs operad does not).
pub trait OperadOps {
    type Elem: Clone + Eq + Ord + std::hash::Hash + fmt::Debug;

    fn max_arity(&self) -> usize;
    fn unit(&self) -> Self::Elem;
    /// Right Σ-action in the given arity.
    fn act(&self, arity: usize, e: &Self::Elem, sigma: &Perm) -> Self::Elem;
    /// `μ(a; args)`, where `args[j] = (arity_j, b_j)`.
    fn compose(
        &self,
        arity: usize,
        a: &Self::Elem,
        args: &[(usize, Self::Elem)],
    ) -> Result<Self::Elem, OperadError>;
    /// Is `e` a valid element of the given arity?
    fn is_element(&self, arity: usize, e: &Self::Elem) -> bool;
}

/// A truncated operad in finite sets: composition structure plus an
/// enumeration of every arity.
pub trait SetOperad: OperadOps {
    fn elems(&self, arity: usize) -> Vec<Self::Elem>;

    fn display(&self, arity: usize, e: &Self::Elem) -> String {
        let _ = arity;
        format!("{e:?}")
    }
}

/// The operad of monoid multiplications: `Ass(n) = Σ_n` with the right
/// regular action and block composition.
#[derive(Clone, Debug)]
pub struct AssocOperad {
    max_arity: usize,
    nullary: bool,
}

impl AssocOperad {
    pub fn new(max_arity: usize) -> AssocOperad {
        AssocOperad { max_arity, nullary: true }
    }

    /// The variant without the empty multiplication in arity 0.
    pub fn without_nullary(max_arity: usize) -> AssocOperad {
        AssocOperad { max_arity, nullary: false }
    }
}

impl OperadOps for AssocOperad {
    type Elem = Perm;

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn unit(&self) -> Perm {
        Perm::identity(1)
    }

    fn is_element(&self, arity: usize, e: &Perm) -> bool {
        e.degree() == arity && arity <= self.max_arity && (arity > 0 || self.nullary)
    }

    fn act(&self, arity: usize, e: &Perm, sigma: &Perm) -> Perm {
        debug_assert_eq!(e.degree(), arity);
        e.compose(sigma)
    }

    fn compose(&self, arity: usize, a: &Perm, args: &[(usize, Perm)]) -> Result<Perm, OperadError> {
        if args.len() != arity {
            return Err(OperadError::ArityMismatch { expected: arity, got: args.len() });
        }
        let total: usize = args.iter().map(|(i, _)| i).sum();
        if total > self.max_arity {
            return Err(OperadError::ArityOverflow { needed: total, max_arity: self.max_arity });
        }
        let sizes: Vec<usize> = args.iter().map(|(i, _)| *i).collect();
        let parts: Vec<Perm> = args.iter().map(|(_, b)| b.clone()).collect();
        Ok(a.block(&sizes).compose(&Perm::direct_sum(&parts)))
    }
}

impl SetOperad for AssocOperad {
    fn elems(&self, arity: usize) -> Vec<Perm> {
        if arity > self.max_arity || (arity == 0 && !self.nullary) {
            Vec::new()
        } else {
            Perm::all(arity)
        }
    }

    fn display(&self, _arity: usize, e: &Perm) -> String {
        format!("{e}")
    }
}

/// The terminal operad: one point in every arity.
#[derive(Clone, Debug)]
pub struct ComOperad {
    max_arity: usize,
    nullary: bool,
}

impl ComOperad {
    pub fn new(max_arity: usize) -> ComOperad {
        ComOperad { max_arity, nullary: true }
    }

    pub fn without_nullary(max_arity: usize) -> ComOperad {
        ComOperad { max_arity, nullary: false }
    }
}

impl OperadOps for ComOperad {
    type Elem = ();

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn unit(&self) {}

    fn is_element(&self, arity: usize, _e: &()) -> bool {
        arity <= self.max_arity && (arity > 0 || self.nullary)
    }

    fn act(&self, _arity: usize, _e: &(), _sigma: &Perm) {}

    fn compose(&self, arity: usize, _a: &(), args: &[(usize, ())]) -> Result<(), OperadError> {
        if args.len() != arity {
            return Err(OperadError::ArityMismatch { expected: arity, got: args.len() });
        }
        let total: usize = args.iter().map(|(i, _)| i).sum();
        if total > self.max_arity {
            return Err(OperadError::ArityOverflow { needed: total, max_arity: self.max_arity });
        }
        Ok(())
    }
}

impl SetOperad for ComOperad {
    fn elems(&self, arity: usize) -> Vec<()> {
        if arity > self.max_arity || (arity == 0 && !self.nullary) {
            Vec::new()
        } else {
            vec![()]
        }
    }

    fn display(&self, _arity: usize, _e: &()) -> String {
        "*".to_string()
    }
}

/// An element of a free operad: a tree whose vertices carry generators.
/// Twigs are 1-based like [`crate::tree::Tree`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum GenTree {
    Leaf(usize),
    Node { gen: usize, children: Vec<GenTree> },
}

impl GenTree {
    pub fn arity(&self) -> usize {
        match self {
            GenTree::Leaf(_) => 1,
            GenTree::Node { children, .. } => children.iter().map(GenTree::arity).sum(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            GenTree::Leaf(_) => 0,
            GenTree::Node { children, .. } => {
                1 + children.iter().map(GenTree::vertex_count).sum::<usize>()
            }
        }
    }

    pub fn shape(&self) -> crate::tree::Tree {
        match self {
            GenTree::Leaf(i) => crate::tree::Tree::Leaf(*i),
            GenTree::Node { children, .. } => {
                crate::tree::Tree::Node(children.iter().map(GenTree::shape).collect())
            }
        }
    }

    fn relabel(&self, f: &impl Fn(usize) -> usize) -> GenTree {
        match self {
            GenTree::Leaf(i) => GenTree::Leaf(f(*i)),
            GenTree::Node { gen, children } => GenTree::Node {
                gen: *gen,
                children: children.iter().map(|c| c.relabel(f)).collect(),
            },
        }
    }
}

/// The free operad on a Σ-set of generators: vertex-labelled trees modulo
/// reordering children against the generator's Σ-action, composed by
/// grafting. Everything is bounded by a vertex budget and an arity
/// truncation; compositions that would leave the bounds are reported.
#[derive(Clone, Debug)]
pub struct FreeOperad {
    gens: SigmaSet,
    max_vertices: usize,
    max_arity: usize,
}

impl FreeOperad {
    pub fn new(gens: SigmaSet, max_vertices: usize, max_arity: usize) -> FreeOperad {
        FreeOperad { gens, max_vertices, max_arity }
    }

    pub fn generators(&self) -> &SigmaSet {
        &self.gens
    }

    /// Canonical representative: at every vertex, the minimal
    /// (label, children) pair over simultaneous reorderings.
    pub fn canon(&self, t: &GenTree) -> GenTree {
        match t {
            GenTree::Leaf(i) => GenTree::Leaf(*i),
            GenTree::Node { gen, children } => {
                let children: Vec<GenTree> = children.iter().map(|c| self.canon(c)).collect();
                let v = children.len();
                let mut best: Option<(usize, Vec<GenTree>)> = None;
                for sigma in Perm::all(v) {
                    let g = self.gens.act(v, *gen, &sigma);
                    // child moved from position p to position sigma(p)
                    let inv = sigma.inverse();
                    let cs: Vec<GenTree> =
                        (0..v).map(|p| children[inv.apply(p)].clone()).collect();
                    let cand = (g, cs);
                    if best.as_ref().map_or(true, |b| cand < *b) {
                        best = Some(cand);
                    }
                }
                let (gen, children) = best.expect("nonempty orbit");
                GenTree::Node { gen, children }
            }
        }
    }
}

impl OperadOps for FreeOperad {
    type Elem = GenTree;

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn unit(&self) -> GenTree {
        GenTree::Leaf(1)
    }

    fn is_element(&self, arity: usize, e: &GenTree) -> bool {
        arity <= self.max_arity && e.arity() == arity && self.elems(arity).contains(e)
    }

    fn act(&self, arity: usize, e: &GenTree, sigma: &Perm) -> GenTree {
        debug_assert_eq!(e.arity(), arity);
        // right action on twig labels: the twig carrying label σ(j) now
        // carries label j (position-of-label precomposes with σ)
        let inv = sigma.inverse();
        self.canon(&e.relabel(&|i| inv.apply(i - 1) + 1))
    }

    fn compose(
        &self,
        arity: usize,
        a: &GenTree,
        args: &[(usize, GenTree)],
    ) -> Result<GenTree, OperadError> {
        if args.len() != arity {
            return Err(OperadError::ArityMismatch { expected: arity, got: args.len() });
        }
        let total: usize = args.iter().map(|(i, _)| i).sum();
        if total > self.max_arity {
            return Err(OperadError::ArityOverflow { needed: total, max_arity: self.max_arity });
        }
        let mut offsets = Vec::with_capacity(arity);
        let mut acc = 0usize;
        for (i, _) in args {
            offsets.push(acc);
            acc += i;
        }
        let grafted = graft_gen(a, &|slot| {
            let (_, b) = &args[slot - 1];
            b.relabel(&|i| i + offsets[slot - 1])
        });
        if grafted.vertex_count() > self.max_vertices {
            return Err(OperadError::BoundExceeded(format!(
                "composite has {} vertices, budget {}",
                grafted.vertex_count(),
                self.max_vertices
            )));
        }
        Ok(self.canon(&grafted))
    }
}

impl SetOperad for FreeOperad {
    fn elems(&self, arity: usize) -> Vec<GenTree> {
        if arity > self.max_arity {
            return Vec::new();
        }
        let labels: Vec<usize> = (1..=arity).collect();
        let mut out = self.enumerate(&labels, self.max_vertices);
        out = out.into_iter().map(|t| self.canon(&t)).collect();
        out.sort();
        out.dedup();
        out
    }

    fn display(&self, _arity: usize, e: &GenTree) -> String {
        self.render(e)
    }
}

fn graft_gen(a: &GenTree, subst: &impl Fn(usize) -> GenTree) -> GenTree {
    match a {
        GenTree::Leaf(i) => subst(*i),
        GenTree::Node { gen, children } => GenTree::Node {
            gen: *gen,
            children: children.iter().map(|c| graft_gen(c, subst)).collect(),
        },
    }
}

impl FreeOperad {
    fn enumerate(&self, labels: &[usize], budget: usize) -> Vec<GenTree> {
        let mut out = Vec::new();
        if labels.len() == 1 {
            out.push(GenTree::Leaf(labels[0]));
        }
        if budget == 0 {
            return out;
        }
        for v in 1..=labels.len().max(self.gens.max_arity()) {
            if self.gens.size(v) == 0 || v > self.gens.max_arity() {
                continue;
            }
            if v == 1 {
                for sub in self.enumerate(labels, budget - 1) {
                    for g in 0..self.gens.size(1) {
                        out.push(GenTree::Node { gen: g, children: vec![sub.clone()] });
                    }
                }
                continue;
            }
            if v > labels.len() {
                continue;
            }
            for blocks in crate::tree::set_partitions_pub(labels, v) {
                let parts: Vec<Vec<GenTree>> =
                    blocks.iter().map(|b| self.enumerate(b, budget - 1)).collect();
                let mut stack: Vec<Vec<GenTree>> = vec![Vec::new()];
                for p in &parts {
                    let mut next = Vec::new();
                    for prefix in &stack {
                        for item in p {
                            let mut row = prefix.clone();
                            row.push(item.clone());
                            next.push(row);
                        }
                    }
                    stack = next;
                }
                for children in stack {
                    let base = GenTree::Node { gen: 0, children };
                    if base.vertex_count() > budget {
                        continue;
                    }
                    if let GenTree::Node { children, .. } = base {
                        for g in 0..self.gens.size(v) {
                            out.push(GenTree::Node { gen: g, children: children.clone() });
                        }
                    }
                }
            }
        }
        out
    }

    fn render(&self, t: &GenTree) -> String {
        match t {
            GenTree::Leaf(i) => i.to_string(),
            GenTree::Node { gen, children } => {
                let parts: Vec<String> = children.iter().map(|c| self.render(c)).collect();
                format!("{}({})", self.gens.name(children.len(), *gen), parts.join(","))
            }
        }
    }
}

/// Builds the free operad on a Σ-set of generators. The composition is
/// grafting and the trivial tree is the unit.
pub fn free_operad(gens: SigmaSet, max_vertices: usize, max_arity: usize) -> FreeOperad {
    FreeOperad::new(gens, max_vertices, max_arity)
}

/// An operad stored as explicit finite tables: elements are indices into
/// the underlying Σ-set, compositions are looked up.
#[derive(Clone, Debug)]
pub struct TableOperad {
    sigma: SigmaSet,
    unit: usize,
    comp: HashMap<(usize, usize, Vec<(usize, usize)>), usize>,
}

impl TableOperad {
    /// Tabulates every in-bounds composition of another operad.
    pub fn tabulate<O: SetOperad>(o: &O) -> TableOperad {
        let max = o.max_arity();
        let elems: Vec<Vec<O::Elem>> = (0..=max).map(|n| o.elems(n)).collect();
        let index = |n: usize, e: &O::Elem| -> usize {
            elems[n].iter().position(|x| x == e).expect("element enumerated")
        };
        let names: Vec<Vec<String>> = (0..=max)
            .map(|n| elems[n].iter().map(|e| o.display(n, e)).collect())
            .collect();
        let gen_action: Vec<Vec<Vec<usize>>> = (0..=max)
            .map(|n| {
                (0..n.saturating_sub(1))
                    .map(|g| {
                        let s = Perm::adjacent_transposition(n, g);
                        elems[n].iter().map(|e| index(n, &o.act(n, e, &s))).collect()
                    })
                    .collect()
            })
            .collect();
        let sigma = SigmaSet::from_parts(names, gen_action).expect("tabulated action is valid");
        let mut comp = HashMap::new();
        let arities: Vec<usize> = (0..=max).filter(|&n| !elems[n].is_empty()).collect();
        for k in arities.iter().copied() {
            for shape in arity_tuples(&arities, k, max) {
                for (ai, a) in elems[k].iter().enumerate() {
                    let mut stacks: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
                    for &i in &shape {
                        let mut next = Vec::new();
                        for prefix in &stacks {
                            for bi in 0..elems[i].len() {
                                let mut row = prefix.clone();
                                row.push((i, bi));
                                next.push(row);
                            }
                        }
                        stacks = next;
                    }
                    for args_idx in stacks {
                        let args: Vec<(usize, O::Elem)> = args_idx
                            .iter()
                            .map(|&(i, bi)| (i, elems[i][bi].clone()))
                            .collect();
                        let r = o.compose(k, a, &args).expect("in-bounds composition");
                        let total: usize = shape.iter().sum();
                        comp.insert((k, ai, args_idx), index(total, &r));
                    }
                }
            }
        }
        TableOperad { sigma, unit: index(1, &o.unit()), comp }
    }

    pub fn sigma(&self) -> &SigmaSet {
        &self.sigma
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn size(&self, n: usize) -> usize {
        self.sigma.size(n)
    }

    /// Overwrites one table entry (fault injection in tests, patching when
    /// loading external tables).
    pub fn set_entry(&mut self, k: usize, a: usize, args: Vec<(usize, usize)>, result: usize) {
        self.comp.insert((k, a, args), result);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, Vec<(usize, usize)>), &usize)> {
        self.comp.iter()
    }
}

impl OperadOps for TableOperad {
    type Elem = usize;

    fn max_arity(&self) -> usize {
        self.sigma.max_arity()
    }

    fn unit(&self) -> usize {
        self.unit
    }

    fn is_element(&self, arity: usize, e: &usize) -> bool {
        *e < self.sigma.size(arity)
    }

    fn act(&self, arity: usize, e: &usize, sigma: &Perm) -> usize {
        self.sigma.act(arity, *e, sigma)
    }

    fn compose(
        &self,
        arity: usize,
        a: &usize,
        args: &[(usize, usize)],
    ) -> Result<usize, OperadError> {
        if args.len() != arity {
            return Err(OperadError::ArityMismatch { expected: arity, got: args.len() });
        }
        let total: usize = args.iter().map(|(i, _)| i).sum();
        if total > self.max_arity() {
            return Err(OperadError::ArityOverflow { needed: total, max_arity: self.max_arity() });
        }
        self.comp
            .get(&(arity, *a, args.to_vec()))
            .copied()
            .ok_or_else(|| OperadError::MissingEntry(format!("({arity}, {a}, {args:?})")))
    }
}

impl SetOperad for TableOperad {
    fn elems(&self, arity: usize) -> Vec<usize> {
        (0..self.sigma.size(arity)).collect()
    }

    fn display(&self, arity: usize, e: &usize) -> String {
        self.sigma.name(arity, *e).to_string()
    }
}

#[derive(Serialize, Deserialize)]
struct TableOperadJson {
    sigma: SigmaSet,
    unit: usize,
    compositions: Vec<CompEntry>,
}

#[derive(Serialize, Deserialize)]
struct CompEntry {
    arity: usize,
    op: usize,
    args: Vec<(usize, usize)>,
    result: usize,
}

impl Serialize for TableOperad {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut compositions: Vec<CompEntry> = self
            .comp
            .iter()
            .map(|((arity, op, args), &result)| CompEntry {
                arity: *arity,
                op: *op,
                args: args.clone(),
                result,
            })
            .collect();
        compositions.sort_by(|a, b| {
            (a.arity, a.op, &a.args).cmp(&(b.arity, b.op, &b.args))
        });
        TableOperadJson { sigma: self.sigma.clone(), unit: self.unit, compositions }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TableOperad {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let json = TableOperadJson::deserialize(de)?;
        let comp = json
            .compositions
            .into_iter()
            .map(|e| ((e.arity, e.op, e.args), e.result))
            .collect();
        Ok(TableOperad { sigma: json.sigma, unit: json.unit, comp })
    }
}

/// A finite group as a multiplication table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteGroup {
    pub names: Vec<String>,
    pub mult: Vec<Vec<usize>>,
    pub identity: usize,
}

impl FiniteGroup {
    pub fn cyclic(m: usize) -> FiniteGroup {
        FiniteGroup {
            names: (0..m).map(|i| format!("t{i}")).collect(),
            mult: (0..m).map(|i| (0..m).map(|j| (i + j) % m).collect()).collect(),
            identity: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn validate(&self) -> Vec<String> {
        let n = self.order();
        let mut out = Vec::new();
        if self.mult.len() != n || self.mult.iter().any(|r| r.len() != n) {
            out.push("multiplication table has wrong shape".into());
            return out;
        }
        for i in 0..n {
            if self.mult[self.identity][i] != i || self.mult[i][self.identity] != i {
                out.push(format!("identity fails at {i}"));
            }
            if !(0..n).any(|j| self.mult[i][j] == self.identity) {
                out.push(format!("element {i} has no right inverse"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mult[self.mult[a][b]][c] != self.mult[a][self.mult[b][c]] {
                        out.push(format!("associativity fails at ({a},{b},{c})"));
                    }
                }
            }
        }
        out
    }
}

/// An action of a finite group on every arity of a table operad, commuting
/// with the symmetric-group actions and with composition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteGroupAction {
    pub group: FiniteGroup,
    /// `tables[n][g][x]` = `g · x` on `F(n)`.
    pub tables: Vec<Vec<Vec<usize>>>,
}

impl FiniteGroupAction {
    pub fn trivial(group: FiniteGroup, f: &TableOperad) -> FiniteGroupAction {
        let tables = (0..=f.max_arity())
            .map(|n| {
                let id: Vec<usize> = (0..f.size(n)).collect();
                vec![id; group.order()]
            })
            .collect();
        FiniteGroupAction { group, tables }
    }

    pub fn act(&self, n: usize, g: usize, x: usize) -> usize {
        self.tables[n][g][x]
    }

    /// Full validation against the operad: group axioms, action axioms,
    /// commutation with Σ, and equivariance of composition.
    pub fn validate(&self, f: &TableOperad) -> Vec<String> {
        let mut out = self.group.validate();
        let ord = self.group.order();
        for n in 0..=f.max_arity() {
            let size = f.size(n);
            if self.tables.get(n).map_or(true, |t| t.len() != ord)
                || self.tables[n].iter().any(|r| r.len() != size)
            {
                out.push(format!("action table malformed at arity {n}"));
                return out;
            }
            for x in 0..size {
                if self.act(n, self.group.identity, x) != x {
                    out.push(format!("identity acts nontrivially at arity {n}, element {x}"));
                }
                for g in 0..ord {
                    for h in 0..ord {
                        let lhs = self.act(n, g, self.act(n, h, x));
                        let rhs = self.act(n, self.group.mult[g][h], x);
                        if lhs != rhs {
                            out.push(format!("action not multiplicative at arity {n}"));
                        }
                    }
                }
                for g in 0..ord {
                    for t in 0..n.saturating_sub(1) {
                        let s = Perm::adjacent_transposition(n, t);
                        let lhs = f.sigma().act(n, self.act(n, g, x), &s);
                        let rhs = self.act(n, g, f.sigma().act(n, x, &s));
                        if lhs != rhs {
                            out.push(format!(
                                "G- and Σ-actions fail to commute at arity {n}, element {x}"
                            ));
                        }
                    }
                }
            }
        }
        // μ(g·x; g·y⃗) = g·μ(x; y⃗) on every stored entry
        for ((k, a, args), &r) in f.entries() {
            for g in 0..ord {
                let ga = self.act(*k, g, *a);
                let gargs: Vec<(usize, usize)> =
                    args.iter().map(|&(i, b)| (i, self.act(i, g, b))).collect();
                let total: usize = args.iter().map(|&(i, _)| i).sum();
                match f.compose(*k, &ga, &gargs) {
                    Ok(lhs) => {
                        if lhs != self.act(total, g, r) {
                            out.push(format!(
                                "composition not G-equivariant at ({k}, {a}, {args:?}), g = {g}"
                            ));
                        }
                    }
                    Err(e) => out.push(format!("acted composition missing: {e}")),
                }
            }
        }
        out
    }
}

/// Element of a semidirect product: a base element with one group
/// coordinate per input.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SdElem {
    pub x: usize,
    pub gs: Vec<usize>,
}

/// The semidirect product `F ⋊ G`: arity-`i` part `F(i) × G^i`, with the
/// group twisting the inputs before composition.
#[derive(Clone, Debug)]
pub struct SemidirectOperad {
    base: TableOperad,
    action: FiniteGroupAction,
}

/// Forms `F ⋊ G`, rejecting actions that are not equivariant for `μ`.
pub fn semidirect_product(
    f: &TableOperad,
    action: &FiniteGroupAction,
) -> Result<SemidirectOperad, OperadError> {
    let violations = action.validate(f);
    if !violations.is_empty() {
        return Err(OperadError::NonEquivariantAction(violations.join("; ")));
    }
    Ok(SemidirectOperad { base: f.clone(), action: action.clone() })
}

impl SemidirectOperad {
    pub fn base(&self) -> &TableOperad {
        &self.base
    }
}

impl OperadOps for SemidirectOperad {
    type Elem = SdElem;

    fn max_arity(&self) -> usize {
        self.base.max_arity()
    }

    fn unit(&self) -> SdElem {
        SdElem { x: self.base.unit_index(), gs: vec![self.action.group.identity] }
    }

    fn is_element(&self, arity: usize, e: &SdElem) -> bool {
        e.x < self.base.size(arity)
            && e.gs.len() == arity
            && e.gs.iter().all(|&g| g < self.action.group.order())
    }

    fn act(&self, arity: usize, e: &SdElem, sigma: &Perm) -> SdElem {
        // coordinates travel with the inputs they decorate
        let gs: Vec<usize> = (0..arity).map(|p| e.gs[sigma.apply(p)]).collect();
        SdElem { x: self.base.sigma().act(arity, e.x, sigma), gs }
    }

    fn compose(
        &self,
        arity: usize,
        a: &SdElem,
        args: &[(usize, SdElem)],
    ) -> Result<SdElem, OperadError> {
        if args.len() != arity {
            return Err(OperadError::ArityMismatch { expected: arity, got: args.len() });
        }
        let base_args: Vec<(usize, usize)> = args
            .iter()
            .enumerate()
            .map(|(j, (i, b))| (*i, self.action.act(*i, a.gs[j], b.x)))
            .collect();
        let x = self.base.compose(arity, &a.x, &base_args)?;
        let mut gs = Vec::new();
        for (j, (i, b)) in args.iter().enumerate() {
            let _ = i;
            for &h in &b.gs {
                gs.push(self.action.group.mult[a.gs[j]][h]);
            }
        }
        Ok(SdElem { x, gs })
    }
}

impl SetOperad for SemidirectOperad {
    fn elems(&self, arity: usize) -> Vec<SdElem> {
        let ord = self.action.group.order();
        let mut out = Vec::new();
        for x in 0..self.base.size(arity) {
            let mut stacks: Vec<Vec<usize>> = vec![Vec::new()];
            for _ in 0..arity {
                let mut next = Vec::new();
                for prefixin in &stacks {
                    for g in 0..ord {
                        let mut row = prefixin.clone();
                        row.push(g);
                        next.push(row);
                    }
                }
                stacks = next;
            }
            for gs in stacks {
                out.push(SdElem { x, gs });
            }
        }
        out
    }

    fn display(&self, arity: usize, e: &SdElem) -> String {
        let gs: Vec<&str> =
            e.gs.iter().map(|&g| self.action.group.names[g].as_str()).collect();
        format!("({}; {})", self.base.display(arity, &e.x), gs.join(","))
    }
}

/// One failed law instance, rendered for humans.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomViolation {
    pub law: String,
    pub instance: String,
}

/// Outcome of a law check: violations are data, not errors.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub total_instances: u128,
    pub checked_instances: u64,
    pub sampled: bool,
    pub violation_count: u64,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violation_count == 0
    }
}

const MAX_STORED_VIOLATIONS: usize = 64;

struct LawSpace {
    law: &'static str,
    /// (k, inner arities, outer arities) shapes with per-shape counts.
    shapes: Vec<Shape>,
}

#[derive(Clone)]
struct Shape {
    k: usize,
    inner: Vec<usize>,
    outer: Vec<usize>,
    count: u128,
}

/// Checks unit, associativity, and both equivariance laws on all in-bounds
/// instances, or on a seeded sample when the instance count exceeds
/// `budget`.
pub fn check_operad_axioms<O: SetOperad>(o: &O, budget: u64, seed: u64) -> AxiomReport {
    let max = o.max_arity();
    let elems: Vec<Vec<O::Elem>> = (0..=max).map(|n| o.elems(n)).collect();
    let sizes: Vec<u128> = elems.iter().map(|v| v.len() as u128).collect();
    let arities: Vec<usize> = (0..=max).filter(|&n| !elems[n].is_empty()).collect();

    let mut laws: Vec<LawSpace> = Vec::new();

    // unit laws: one shape per arity
    let unit_shapes: Vec<Shape> = arities
        .iter()
        .map(|&k| Shape { k, inner: vec![], outer: vec![], count: sizes[k] })
        .collect();
    laws.push(LawSpace { law: "unit-right", shapes: unit_shapes.clone() });
    laws.push(LawSpace { law: "unit-left", shapes: unit_shapes });

    // associativity: (k, inner, outer)
    let mut assoc_shapes = Vec::new();
    for &k in &arities {
        for inner in arity_tuples(&arities, k, max) {
            let m: usize = inner.iter().sum();
            let inner_count: u128 = inner.iter().map(|&i| sizes[i]).product();
            if sizes[k] * inner_count == 0 {
                continue;
            }
            for outer in arity_tuples(&arities, m, max) {
                let outer_count: u128 = outer.iter().map(|&j| sizes[j]).product();
                let count = sizes[k] * inner_count * outer_count;
                if count > 0 {
                    assoc_shapes.push(Shape { k, inner: inner.clone(), outer, count });
                }
            }
        }
    }
    laws.push(LawSpace { law: "associativity", shapes: assoc_shapes });

    // equivariance: block law (σ ∈ Σ_k) and slot law (τ_j ∈ Σ_{i_j})
    let mut outer_eq = Vec::new();
    let mut inner_eq = Vec::new();
    for &k in &arities {
        for inner in arity_tuples(&arities, k, max) {
            let inner_count: u128 = inner.iter().map(|&i| sizes[i]).product();
            let base = sizes[k] * inner_count;
            if base == 0 {
                continue;
            }
            let kfact = factorial(k);
            outer_eq.push(Shape { k, inner: inner.clone(), outer: vec![], count: base * kfact });
            let tfact: u128 = inner.iter().map(|&i| factorial(i)).product();
            inner_eq.push(Shape { k, inner, outer: vec![], count: base * tfact });
        }
    }
    laws.push(LawSpace { law: "equivariance-block", shapes: outer_eq });
    laws.push(LawSpace { law: "equivariance-slot", shapes: inner_eq });

    let total: u128 = laws.iter().flat_map(|l| l.shapes.iter()).map(|s| s.count).sum();
    let exhaustive = total <= budget as u128;

    let mut report = AxiomReport {
        total_instances: total,
        checked_instances: 0,
        sampled: !exhaustive,
        violation_count: 0,
        violations: Vec::new(),
    };

    if exhaustive {
        for law in &laws {
            for shape in &law.shapes {
                check_shape_exhaustive(o, &elems, law.law, shape, &mut report);
            }
        }
    } else {
        let mut rng = SplitMix64::new(seed);
        for _ in 0..budget {
            // pick a law shape weighted by instance count, then one instance
            let mut target = rng.below(total.min(u64::MAX as u128) as u64) as u128;
            'outer: for law in &laws {
                for shape in &law.shapes {
                    if target < shape.count {
                        check_shape_sampled(o, &elems, law.law, shape, &mut rng, &mut report);
                        break 'outer;
                    }
                    target -= shape.count;
                }
            }
        }
    }
    report
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Ordered tuples over `arities` of length `k` with total at most `max`.
pub(crate) fn arity_tuples(arities: &[usize], k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for prefix in &out {
            let used: usize = prefix.iter().sum();
            for &i in arities {
                if used + i <= max {
                    let mut row = prefix.clone();
                    row.push(i);
                    next.push(row);
                }
            }
        }
        out = next;
    }
    out
}

fn check_shape_exhaustive<O: SetOperad>(
    o: &O,
    elems: &[Vec<O::Elem>],
    law: &str,
    shape: &Shape,
    report: &mut AxiomReport,
) {
    // iterate by unranking indices 0..count: mixed-radix over element choices
    for idx in 0..shape.count {
        check_instance(o, elems, law, shape, idx, report);
    }
}

fn check_shape_sampled<O: SetOperad>(
    o: &O,
    elems: &[Vec<O::Elem>],
    law: &str,
    shape: &Shape,
    rng: &mut SplitMix64,
    report: &mut AxiomReport,
) {
    let idx = if shape.count <= u64::MAX as u128 {
        rng.below(shape.count as u64) as u128
    } else {
        rng.next_u64() as u128
    };
    check_instance(o, elems, law, shape, idx % shape.count, report);
}

/// Decodes instance `idx` of a law shape (mixed radix) and checks it.
fn check_instance<O: SetOperad>(
    o: &O,
    elems: &[Vec<O::Elem>],
    law: &str,
    shape: &Shape,
    idx: u128,
    report: &mut AxiomReport,
) {
    report.checked_instances += 1;
    let mut rest = idx;
    let mut draw = |radix: u128| -> usize {
        let v = (rest % radix) as usize;
        rest /= radix;
        v
    };
    let k = shape.k;
    let a = elems[k][draw(elems[k].len() as u128)].clone();

    let fail = |report: &mut AxiomReport, instance: String| {
        report.violation_count += 1;
        if report.violations.len() < MAX_STORED_VIOLATIONS {
            report.violations.push(AxiomViolation { law: law.to_string(), instance });
        }
    };

    match law {
        "unit-right" => {
            let args: Vec<(usize, O::Elem)> = vec![(1, o.unit()); k];
            match o.compose(k, &a, &args) {
                Ok(r) if r == a => {}
                Ok(r) => fail(
                    report,
                    format!("μ({}; ι..ι) = {} ≠ itself", o.display(k, &a), o.display(k, &r)),
                ),
                Err(e) => fail(report, format!("μ({}; ι..ι) errored: {e}", o.display(k, &a))),
            }
        }
        "unit-left" => match o.compose(1, &o.unit(), &[(k, a.clone())]) {
            Ok(r) if r == a => {}
            Ok(r) => fail(
                report,
                format!("μ(ι; {}) = {} ≠ itself", o.display(k, &a), o.display(k, &r)),
            ),
            Err(e) => fail(report, format!("μ(ι; {}) errored: {e}", o.display(k, &a))),
        },
        "associativity" => {
            let bs: Vec<(usize, O::Elem)> = shape
                .inner
                .iter()
                .map(|&i| (i, elems[i][draw(elems[i].len() as u128)].clone()))
                .collect();
            let cs: Vec<(usize, O::Elem)> = shape
                .outer
                .iter()
                .map(|&j| (j, elems[j][draw(elems[j].len() as u128)].clone()))
                .collect();
            let ab = o.compose(k, &a, &bs);
            let m: usize = shape.inner.iter().sum();
            let lhs = ab.and_then(|ab| o.compose(m, &ab, &cs));
            // split cs into blocks matching the arities of bs
            let mut rhs_args = Vec::with_capacity(k);
            let mut pos = 0usize;
            let mut rhs_ok = true;
            for (i, b) in &bs {
                let block = &cs[pos..pos + i];
                pos += i;
                match o.compose(*i, b, block) {
                    Ok(bc) => rhs_args.push((block.iter().map(|(j, _)| j).sum::<usize>(), bc)),
                    Err(_) => {
                        rhs_ok = false;
                        break;
                    }
                }
            }
            let rhs = if rhs_ok { o.compose(k, &a, &rhs_args) } else { Err(OperadError::Invalid("inner composition failed".into())) };
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => {}
                (l, r) => fail(
                    report,
                    format!(
                        "assoc fails at a = {}, inner arities {:?}, outer {:?}: {l:?} vs {r:?}",
                        o.display(k, &a),
                        shape.inner,
                        shape.outer
                    ),
                ),
            }
        }
        "equivariance-block" => {
            let bs: Vec<(usize, O::Elem)> = shape
                .inner
                .iter()
                .map(|&i| (i, elems[i][draw(elems[i].len() as u128)].clone()))
                .collect();
            let perms = Perm::all(k);
            let sigma = perms[draw(perms.len() as u128)].clone();
            let a_sigma = o.act(k, &a, &sigma);
            let permuted: Vec<(usize, O::Elem)> =
                (0..k).map(|j| bs[sigma.apply(j)].clone()).collect();
            let lhs = o.compose(k, &a_sigma, &permuted);
            let rhs = o.compose(k, &a, &bs).map(|r| {
                let m: usize = shape.inner.iter().sum();
                let permuted_sizes: Vec<usize> =
                    (0..k).map(|j| shape.inner[sigma.apply(j)]).collect();
                o.act(m, &r, &sigma.block(&permuted_sizes))
            });
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => {}
                (l, r) => fail(
                    report,
                    format!(
                        "block equivariance fails at a = {}, σ = {sigma}, arities {:?}: {l:?} vs {r:?}",
                        o.display(k, &a),
                        shape.inner
                    ),
                ),
            }
        }
        "equivariance-slot" => {
            let bs: Vec<(usize, O::Elem)> = shape
                .inner
                .iter()
                .map(|&i| (i, elems[i][draw(elems[i].len() as u128)].clone()))
                .collect();
            let taus: Vec<Perm> = shape
                .inner
                .iter()
                .map(|&i| {
                    let perms = Perm::all(i);
                    perms[draw(perms.len() as u128)].clone()
                })
                .collect();
            let acted: Vec<(usize, O::Elem)> = bs
                .iter()
                .zip(taus.iter())
                .map(|((i, b), t)| (*i, o.act(*i, b, t)))
                .collect();
            let lhs = o.compose(k, &a, &acted);
            let rhs = o.compose(k, &a, &bs).map(|r| {
                let m: usize = shape.inner.iter().sum();
                o.act(m, &r, &Perm::direct_sum(&taus))
            });
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => {}
                (l, r) => fail(
                    report,
                    format!(
                        "slot equivariance fails at a = {}, τ = {taus:?}, arities {:?}: {l:?} vs {r:?}",
                        o.display(k, &a),
                        shape.inner
                    ),
                ),
            }
        }
        other => panic!("unknown law {other}"),
    }
}
