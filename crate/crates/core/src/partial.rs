//! Discrete partial (abelian) monoids and their bounded completions.
//!
//! A partial monoid is a pointed finite carrier with a partially defined
//! sum. "Strong associativity" is the defining coherence: `(a+b)+c` is
//! defined iff `a+(b+c)` is, and then they agree. Completions are computed
//! by confluence-checked rewriting on bounded words: adjacent summable
//! letters merge, and letters equal to the base point are deleted. The
//! rewriting bound is by total letter weight (weight 1 by default, so plain
//! word length; graded carriers like the wedge of two copies of the
//! naturals set the weight to the height so that every in-bounds word
//! reduces fully).

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::homology::{in_row_span, smith_normal_form, Matrix, SmithNormalForm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartialError {
    Invalid(String),
    NotAbelian(String),
    NotTotal(String),
    AmbiguousSum(String),
}

impl fmt::Display for PartialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartialError::Invalid(msg) => write!(f, "{msg}"),
            PartialError::NotAbelian(msg) => write!(f, "not abelian: {msg}"),
            PartialError::NotTotal(msg) => write!(f, "not total: {msg}"),
            PartialError::AmbiguousSum(msg) => write!(f, "ambiguous sum: {msg}"),
        }
    }
}

impl std::error::Error for PartialError {}

/// A finite pointed set with a partial sum.
#[derive(Clone, Debug)]
pub struct PartialMonoid {
    names: Vec<String>,
    zero: usize,
    abelian: bool,
    /// `(a, b) -> a + b` on the summable pairs.
    sums: HashMap<(usize, usize), usize>,
    /// Filtration weight per element: 0 for the base point, at least 1
    /// elsewhere, subadditive under the sum.
    weights: Vec<u64>,
}

impl PartialMonoid {
    pub fn from_parts(
        names: Vec<String>,
        zero: usize,
        abelian: bool,
        sums: HashMap<(usize, usize), usize>,
        weights: Option<Vec<u64>>,
    ) -> PartialMonoid {
        let weights = weights.unwrap_or_else(|| {
            (0..names.len()).map(|i| if i == zero { 0 } else { 1 }).collect()
        });
        PartialMonoid { names, zero, abelian, sums, weights }
    }

    /// The wedge of two truncated copies of the naturals: elements `(p, 0)`
    /// and `(0, q)` up to the given height, summable within a branch when
    /// the result stays in range. Weights grade by height.
    pub fn n_vee_n(height: u64) -> PartialMonoid {
        let mut names = vec!["0".to_string()];
        let mut weights = vec![0u64];
        // left branch first, then right
        for p in 1..=height {
            names.push(format!("({p},0)"));
            weights.push(p);
        }
        for q in 1..=height {
            names.push(format!("(0,{q})"));
            weights.push(q);
        }
        let left = |p: u64| p as usize;
        let right = |q: u64| (height + q) as usize;
        let mut sums = HashMap::new();
        for a in 0..names.len() {
            sums.insert((a, 0), a);
            sums.insert((0, a), a);
        }
        for p in 1..=height {
            for p2 in 1..=height {
                if p + p2 <= height {
                    sums.insert((left(p), left(p2)), left(p + p2));
                    sums.insert((right(p), right(p2)), right(p + p2));
                }
            }
        }
        PartialMonoid { names, zero: 0, abelian: true, sums, weights }
    }

    /// The cyclic group of order `m` as a total abelian monoid.
    pub fn cyclic(m: usize) -> PartialMonoid {
        assert!(m >= 1);
        let names = (0..m).map(|i| i.to_string()).collect();
        let mut sums = HashMap::new();
        for a in 0..m {
            for b in 0..m {
                sums.insert((a, b), (a + b) % m);
            }
        }
        let weights = (0..m).map(|i| if i == 0 { 0 } else { 1 }).collect();
        PartialMonoid { names, zero: 0, abelian: true, sums, weights }
    }

    /// A pointed set: `n` points beyond the base point, only unit sums
    /// defined.
    pub fn pointed(n: usize) -> PartialMonoid {
        let mut names = vec!["0".to_string()];
        names.extend((1..=n).map(|i| format!("x{i}")));
        let mut sums = HashMap::new();
        for a in 0..=n {
            sums.insert((a, 0), a);
            sums.insert((0, a), a);
        }
        let weights = (0..=n).map(|i| if i == 0 { 0 } else { 1 }).collect();
        PartialMonoid { names, zero: 0, abelian: true, sums, weights }
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn weight(&self, a: usize) -> u64 {
        self.weights[a]
    }

    pub fn sum(&self, a: usize, b: usize) -> Option<usize> {
        self.sums.get(&(a, b)).copied()
    }

    pub fn is_summable(&self, a: usize, b: usize) -> bool {
        self.sums.contains_key(&(a, b))
    }

    pub fn summable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let mut pairs: Vec<(usize, usize, usize)> =
            self.sums.iter().map(|(&(a, b), &s)| (a, b, s)).collect();
        pairs.sort_unstable();
        pairs.into_iter()
    }

    /// Exhaustive check of the partial-monoid axioms; violations are
    /// returned as data.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.size();
        if self.zero >= n {
            out.push("base point out of range".into());
            return out;
        }
        if self.weights.len() != n {
            out.push("weight table has wrong length".into());
            return out;
        }
        if self.weights[self.zero] != 0 {
            out.push("base point must have weight 0".into());
        }
        for a in 0..n {
            if a != self.zero && self.weights[a] == 0 {
                out.push(format!("element {} needs positive weight", self.names[a]));
            }
        }
        for (&(a, b), &s) in &self.sums {
            if a >= n || b >= n || s >= n {
                out.push(format!("sum entry ({a},{b})->{s} out of range"));
                return out;
            }
            if self.weights[s] > self.weights[a] + self.weights[b] {
                out.push(format!(
                    "weight not subadditive at {} + {}",
                    self.names[a], self.names[b]
                ));
            }
        }
        for a in 0..n {
            match self.sum(a, self.zero) {
                Some(s) if s == a => {}
                _ => out.push(format!("unit axiom fails at {} + 0", self.names[a])),
            }
            match self.sum(self.zero, a) {
                Some(s) if s == a => {}
                _ => out.push(format!("unit axiom fails at 0 + {}", self.names[a])),
            }
        }
        if self.abelian {
            for (&(a, b), &s) in &self.sums {
                match self.sum(b, a) {
                    Some(t) if t == s => {}
                    _ => out.push(format!(
                        "commutativity fails at {} + {}",
                        self.names[a], self.names[b]
                    )),
                }
            }
        }
        // strong associativity: (a+b)+c defined iff a+(b+c), and equal
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let left = self.sum(a, b).and_then(|ab| self.sum(ab, c));
                    let right = self.sum(b, c).and_then(|bc| self.sum(a, bc));
                    match (left, right) {
                        (Some(l), Some(r)) if l == r => {}
                        (None, None) => {}
                        _ => out.push(format!(
                            "strong associativity fails at ({}, {}, {})",
                            self.names[a], self.names[b], self.names[c]
                        )),
                    }
                }
            }
        }
        out
    }

    /// Folds a multiset of labels to a single element when the partial sums
    /// allow it, searching over merge orders. `Ok(None)` means the letters
    /// do not sum; an error reports a genuinely ambiguous fold.
    pub fn fold_labels(&self, labels: &[usize]) -> Result<Option<usize>, PartialError> {
        if !self.abelian {
            return Err(PartialError::NotAbelian(
                "label folding searches unordered merges".into(),
            ));
        }
        let mut letters: Vec<usize> =
            labels.iter().copied().filter(|&a| a != self.zero).collect();
        letters.sort_unstable();
        if letters.len() <= 1 {
            return Ok(Some(letters.first().copied().unwrap_or(self.zero)));
        }
        let mut results: Vec<usize> = Vec::new();
        let mut seen: Vec<Vec<usize>> = Vec::new();
        let mut stack = vec![letters];
        while let Some(word) = stack.pop() {
            if seen.contains(&word) {
                continue;
            }
            seen.push(word.clone());
            if word.len() <= 1 {
                let v = word.first().copied().unwrap_or(self.zero);
                if !results.contains(&v) {
                    results.push(v);
                }
                continue;
            }
            for i in 0..word.len() {
                for j in 0..word.len() {
                    if i == j {
                        continue;
                    }
                    if let Some(s) = self.sum(word[i], word[j]) {
                        let mut next: Vec<usize> = word
                            .iter()
                            .enumerate()
                            .filter(|&(t, _)| t != i && t != j)
                            .map(|(_, &v)| v)
                            .collect();
                        if s != self.zero {
                            next.push(s);
                        }
                        next.sort_unstable();
                        stack.push(next);
                    }
                }
            }
        }
        match results.len() {
            0 => Ok(None),
            1 => Ok(Some(results[0])),
            _ => Err(PartialError::AmbiguousSum(format!(
                "labels fold to {:?}",
                results.iter().map(|&r| self.name(r)).collect::<Vec<_>>()
            ))),
        }
    }
}

/// A word over the nonzero carrier; kept sorted in abelian mode.
pub type Word = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfluenceWitness {
    pub word: Vec<String>,
    pub first: Vec<String>,
    pub second: Vec<String>,
}

/// The bounded completion of a partial monoid: all words of total weight at
/// most the bound, rewritten by merging summable letters.
#[derive(Clone, Debug)]
pub struct Completion {
    abelian: bool,
    max_weight: u64,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    class_of: Vec<usize>,
    class_count: usize,
    /// Irreducible words in deterministic order.
    pub normal_forms: Vec<Word>,
    pub confluence_violations: Vec<ConfluenceWitness>,
}

impl Completion {
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// The class of a word, if it is within the weight bound.
    pub fn class_of(&self, w: &Word) -> Option<usize> {
        let w = canonical_word(w, self.abelian);
        self.index.get(&w).map(|&i| self.class_of[i])
    }

    /// Product in the completion: concatenation followed by reduction,
    /// defined while the weight bound holds.
    pub fn multiply(&self, a: &PartialMonoid, u: &Word, v: &Word) -> Option<usize> {
        let mut w: Word = u.iter().chain(v.iter()).copied().collect();
        w = canonical_word(&w, self.abelian);
        let weight: u64 = w.iter().map(|&l| a.weight(l)).sum();
        if weight > self.max_weight {
            return None;
        }
        self.class_of(&w)
    }
}

fn canonical_word(w: &Word, abelian: bool) -> Word {
    let mut w = w.clone();
    if abelian {
        w.sort_unstable();
    }
    w
}

/// Every single-step reduct of `w`: merge a summable pair (any unordered
/// pair in abelian mode, adjacent letters otherwise), deleting base points.
fn reducts(a: &PartialMonoid, w: &Word, abelian: bool) -> Vec<Word> {
    let mut out = Vec::new();
    if abelian {
        for i in 0..w.len() {
            for j in 0..w.len() {
                if i == j {
                    continue;
                }
                if let Some(s) = a.sum(w[i], w[j]) {
                    let mut next: Word = w
                        .iter()
                        .enumerate()
                        .filter(|&(t, _)| t != i && t != j)
                        .map(|(_, &v)| v)
                        .collect();
                    if s != a.zero() {
                        next.push(s);
                    }
                    next.sort_unstable();
                    if !out.contains(&next) {
                        out.push(next);
                    }
                }
            }
        }
    } else {
        for i in 0..w.len().saturating_sub(1) {
            if let Some(s) = a.sum(w[i], w[i + 1]) {
                let mut next = Vec::with_capacity(w.len() - 1);
                next.extend_from_slice(&w[..i]);
                if s != a.zero() {
                    next.push(s);
                }
                next.extend_from_slice(&w[i + 2..]);
                if !out.contains(&next) {
                    out.push(next);
                }
            }
        }
    }
    out
}

/// Computes the bounded completion. Words are bounded by total weight;
/// since weights are subadditive, rewriting never escapes the bound.
pub fn complete_monoid(a: &PartialMonoid, max_weight: u64) -> Result<Completion, PartialError> {
    let violations = a.validate();
    if !violations.is_empty() {
        return Err(PartialError::Invalid(violations.join("; ")));
    }
    let abelian = a.is_abelian();
    // enumerate words of total weight <= max_weight over nonzero letters
    let letters: Vec<usize> = (0..a.size()).filter(|&x| x != a.zero()).collect();
    let mut words: Vec<Word> = Vec::new();
    let mut frontier: Vec<Word> = vec![Vec::new()];
    words.push(Vec::new());
    while let Some(w) = frontier.pop() {
        let used: u64 = w.iter().map(|&l| a.weight(l)).sum();
        for &l in &letters {
            if abelian {
                // keep words sorted to enumerate multisets once
                if let Some(&last) = w.last() {
                    if l < last {
                        continue;
                    }
                }
            }
            if used + a.weight(l) <= max_weight {
                let mut next = w.clone();
                next.push(l);
                words.push(next.clone());
                frontier.push(next);
            }
        }
    }
    words.sort();
    words.dedup();
    let index: HashMap<Word, usize> =
        words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();

    let mut uf = crate::sigma::UnionFind::new(words.len());
    let all_reducts: Vec<Vec<usize>> = words
        .iter()
        .map(|w| {
            reducts(a, w, abelian)
                .into_iter()
                .map(|r| *index.get(&r).expect("reduct stays in bounds"))
                .collect()
        })
        .collect();
    for (i, rs) in all_reducts.iter().enumerate() {
        for &r in rs {
            uf.union(i, r);
        }
    }
    let mut class_of = vec![0usize; words.len()];
    let mut roots: HashMap<usize, usize> = HashMap::new();
    for i in 0..words.len() {
        let root = uf.find(i);
        let next = roots.len();
        class_of[i] = *roots.entry(root).or_insert(next);
    }
    let normal_forms: Vec<Word> = words
        .iter()
        .enumerate()
        .filter(|&(i, _)| all_reducts[i].is_empty())
        .map(|(_, w)| w.clone())
        .collect();

    // reachable normal forms per word (memoized over the terminating DAG)
    let mut reach: Vec<Option<Vec<usize>>> = vec![None; words.len()];
    fn reachable(
        i: usize,
        all_reducts: &[Vec<usize>],
        reach: &mut Vec<Option<Vec<usize>>>,
    ) -> Vec<usize> {
        if let Some(r) = &reach[i] {
            return r.clone();
        }
        let mut out: Vec<usize> = Vec::new();
        if all_reducts[i].is_empty() {
            out.push(i);
        } else {
            for &r in &all_reducts[i] {
                for nf in reachable(r, all_reducts, reach) {
                    if !out.contains(&nf) {
                        out.push(nf);
                    }
                }
            }
        }
        out.sort_unstable();
        reach[i] = Some(out.clone());
        out
    }
    let mut confluence_violations = Vec::new();
    for i in 0..words.len() {
        let nfs = reachable(i, &all_reducts, &mut reach);
        if nfs.len() >= 2 {
            let render = |w: &Word| w.iter().map(|&l| a.name(l).to_string()).collect();
            confluence_violations.push(ConfluenceWitness {
                word: render(&words[i]),
                first: render(&words[nfs[0]]),
                second: render(&words[nfs[1]]),
            });
        }
    }

    Ok(Completion {
        abelian,
        max_weight,
        class_count: roots.len(),
        words,
        index,
        class_of,
        normal_forms,
        confluence_violations,
    })
}

/// A total finite monoid (multiplication table form), the input the bar
/// complex accepts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteMonoid {
    unit: usize,
    table: Vec<Vec<usize>>,
}

impl FiniteMonoid {
    pub fn from_table(unit: usize, table: Vec<Vec<usize>>) -> FiniteMonoid {
        FiniteMonoid { unit, table }
    }

    pub fn cyclic(m: usize) -> FiniteMonoid {
        FiniteMonoid {
            unit: 0,
            table: (0..m).map(|i| (0..m).map(|j| (i + j) % m).collect()).collect(),
        }
    }

    /// Converts a total partial monoid; errors if any sum is missing.
    pub fn from_partial(a: &PartialMonoid) -> Result<FiniteMonoid, PartialError> {
        let n = a.size();
        let mut table = vec![vec![0usize; n]; n];
        for x in 0..n {
            for y in 0..n {
                match a.sum(x, y) {
                    Some(s) => table[x][y] = s,
                    None => {
                        return Err(PartialError::NotTotal(format!(
                            "{} + {} undefined",
                            a.name(x),
                            a.name(y)
                        )))
                    }
                }
            }
        }
        Ok(FiniteMonoid { unit: a.zero(), table })
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// `None` when the table is associative with a two-sided unit.
    pub fn associativity_defect(&self) -> Option<String> {
        let n = self.size();
        if self.unit >= n {
            return Some("unit out of range".into());
        }
        for a in 0..n {
            if self.mul(a, self.unit) != a || self.mul(self.unit, a) != a {
                return Some(format!("unit fails at {a}"));
            }
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Some(format!("associativity fails at ({a},{b},{c})"));
                    }
                }
            }
        }
        None
    }
}

/// The Grothendieck group of the completion: the free abelian group on the
/// nonzero carrier modulo one relation per summable pair. Label multisets
/// map into it, and rewriting is invisible there.
pub struct GrothendieckGroup {
    size: usize,
    zero: usize,
    snf: SmithNormalForm<BigInt>,
}

impl GrothendieckGroup {
    pub fn new(a: &PartialMonoid) -> GrothendieckGroup {
        let n = a.size();
        let coord = |x: usize| -> Option<usize> {
            if x == a.zero() {
                None
            } else if x < a.zero() {
                Some(x)
            } else {
                Some(x - 1)
            }
        };
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (x, y, s) in a.summable_pairs() {
            let mut row = vec![BigInt::zero(); n - 1];
            if let Some(i) = coord(x) {
                row[i] += 1;
            }
            if let Some(i) = coord(y) {
                row[i] += 1;
            }
            if let Some(i) = coord(s) {
                row[i] -= 1;
            }
            if row.iter().any(|v| !v.is_zero()) {
                rows.push(row);
            }
        }
        if rows.is_empty() {
            rows.push(vec![BigInt::zero(); n - 1]);
        }
        let snf = smith_normal_form(&Matrix::from_rows(rows));
        GrothendieckGroup { size: n, zero: a.zero(), snf }
    }

    /// The image vector of a label multiset.
    pub fn vector_of(&self, labels: &[usize]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.size - 1];
        for &l in labels {
            if l == self.zero {
                continue;
            }
            let i = if l < self.zero { l } else { l - 1 };
            v[i] += 1;
        }
        v
    }

    /// Do two label multisets have the same image?
    pub fn same_class(&self, u: &[usize], v: &[usize]) -> bool {
        let a = self.vector_of(u);
        let b = self.vector_of(v);
        let diff: Vec<BigInt> = a.into_iter().zip(b).map(|(x, y)| x - y).collect();
        in_row_span(&self.snf, &diff)
    }
}

#[derive(Serialize, Deserialize)]
struct PartialMonoidJson {
    names: Vec<String>,
    zero: usize,
    abelian: bool,
    /// summable pairs as `[a, b, sum]` triples
    sums: Vec<(usize, usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<u64>>,
}

impl Serialize for PartialMonoid {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PartialMonoidJson {
            names: self.names.clone(),
            zero: self.zero,
            abelian: self.abelian,
            sums: self.summable_pairs().collect(),
            weights: Some(self.weights.clone()),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PartialMonoid {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let json = PartialMonoidJson::deserialize(de)?;
        let sums = json.sums.into_iter().map(|(a, b, s)| ((a, b), s)).collect();
        let m = PartialMonoid::from_parts(json.names, json.zero, json.abelian, sums, json.weights);
        let violations = m.validate();
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(serde::de::Error::custom(violations.join("; ")))
        }
    }
}
