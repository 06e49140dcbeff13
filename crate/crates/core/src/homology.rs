//! Integer chain complexes and their homology via Smith normal form.
//!
//! The reduction is fraction-free (integer row and column operations only)
//! with pivoting on the entry of least absolute value; intermediate entries
//! can still grow, which is why the default scalar is `BigInt`.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::poset::GradedPoset;
use crate::scalar::IntScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomologyError {
    ShapeMismatch(String),
    NotAComplex { degree: usize },
    NotAssociative(String),
}

impl fmt::Display for HomologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomologyError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            HomologyError::NotAComplex { degree } => {
                write!(f, "boundary of boundary is nonzero in degree {degree}")
            }
            HomologyError::NotAssociative(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for HomologyError {}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: fmt::Debug> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|j| format!("{:?}", self.data[i * self.cols + j])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<R: IntScalar> Matrix<R> {
    pub fn zero(rows: usize, cols: usize) -> Matrix<R> {
        Matrix { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix<R> {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = R::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Matrix<R> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Matrix<R> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| R::from_i64(v).unwrap()).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Matrix<R>) -> Matrix<R> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out: Matrix<R> = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = self[(i, k)].clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + add;
                }
            }
        }
        out
    }

    pub fn apply_row_vector(&self, v: &[R]) -> Vec<R> {
        // v (1 x rows) * self
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                let mut acc = R::zero();
                for i in 0..self.rows {
                    acc = acc + v[i].clone() * self[(i, j)].clone();
                }
                acc
            })
            .collect()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &R) {
        for j in 0..self.cols {
            let add = factor.clone() * self[(source, j)].clone();
            self[(target, j)] = self[(target, j)].clone() + add;
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &R) {
        for i in 0..self.rows {
            let add = factor.clone() * self[(i, source)].clone();
            self[(i, target)] = self[(i, target)].clone() + add;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)].clone();
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> R {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return R::one();
        }
        let mut m = self.clone();
        let mut sign = false;
        let mut prev = R::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return R::zero();
                };
                m.swap_rows(k, swap);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[(k, k)].clone() * m[(i, j)].clone()
                        - m[(i, k)].clone() * m[(k, j)].clone();
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division is exact");
                    m[(i, j)] = q;
                }
            }
            prev = m[(k, k)].clone();
        }
        let det = m[(n - 1, n - 1)].clone();
        if sign {
            -det
        } else {
            det
        }
    }
}

impl<R> std::ops::Index<(usize, usize)> for Matrix<R> {
    type Output = R;
    fn index(&self, (i, j): (usize, usize)) -> &R {
        &self.data[i * self.cols + j]
    }
}

impl<R> std::ops::IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        &mut self.data[i * self.cols + j]
    }
}

impl<R: IntScalar> Serialize for Matrix<R> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        rows.serialize(ser)
    }
}

impl<'de, R: IntScalar> Deserialize<'de> for Matrix<R> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        // accept both integer arrays and string entries
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Int(i64),
            Str(String),
        }
        let rows: Vec<Vec<Entry>> = Vec::deserialize(de)?;
        let parsed: Result<Vec<Vec<R>>, D::Error> = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e {
                        Entry::Int(v) => {
                            R::from_i64(v).ok_or_else(|| D::Error::custom("integer out of range"))
                        }
                        Entry::Str(s) => s
                            .trim()
                            .parse::<i128>()
                            .ok()
                            .and_then(R::from_i128)
                            .ok_or_else(|| D::Error::custom(format!("bad integer {s:?}"))),
                    })
                    .collect()
            })
            .collect();
        let parsed = parsed?;
        let cols = parsed.first().map_or(0, Vec::len);
        if parsed.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged matrix"));
        }
        Ok(Matrix::from_rows(parsed))
    }
}

/// `left * input * right = diagonal`, with unimodular transforms and the
/// divisibility chain `d_1 | d_2 | ..`.
#[derive(Clone, Debug)]
pub struct SmithNormalForm<R> {
    pub diagonal: Matrix<R>,
    pub left: Matrix<R>,
    pub right: Matrix<R>,
    pub divisors: Vec<R>,
}

impl<R: IntScalar> SmithNormalForm<R> {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

pub fn smith_normal_form<R: IntScalar>(input: &Matrix<R>) -> SmithNormalForm<R> {
    let mut m = input.clone();
    let mut left = Matrix::identity(m.rows());
    let mut right = Matrix::identity(m.cols());
    let steps = m.rows().min(m.cols());
    for t in 0..steps {
        loop {
            // minimal-absolute-value pivot in the remaining block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m.rows() {
                for j in t..m.cols() {
                    if m[(i, j)].is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => m[(i, j)].abs() < m[(pi, pj)].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                // block is zero: done with all remaining pivots
                return finish(m, left, right, t);
            };
            m.swap_rows(t, pi);
            left.swap_rows(t, pi);
            m.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..m.rows() {
                if m[(i, t)].is_zero() {
                    continue;
                }
                let q = -div_round(&m[(i, t)], &m[(t, t)]);
                m.add_row_multiple(i, t, &q);
                left.add_row_multiple(i, t, &q);
                if !m[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..m.cols() {
                if m[(t, j)].is_zero() {
                    continue;
                }
                let q = -div_round(&m[(t, j)], &m[(t, t)]);
                m.add_col_multiple(j, t, &q);
                right.add_col_multiple(j, t, &q);
                if !m[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility: fold in any entry the pivot does not divide
            let offender = (t + 1..m.rows())
                .flat_map(|i| (t + 1..m.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| !m[(i, j)].clone().mod_floor(&m[(t, t)]).is_zero());
            match offender {
                Some((i, _)) => {
                    m.add_row_multiple(t, i, &R::one());
                    left.add_row_multiple(t, i, &R::one());
                }
                None => break,
            }
        }
    }
    finish(m, left, right, steps)
}

fn div_round<R: IntScalar>(a: &R, b: &R) -> R {
    // quotient minimizing |a - q b|
    let (q, r) = a.div_rem(b);
    let two_r = r.clone() + r.clone();
    if two_r.abs() > b.abs() {
        if (r > R::zero()) == (*b > R::zero()) {
            q + R::one()
        } else {
            q - R::one()
        }
    } else {
        q
    }
}

fn finish<R: IntScalar>(
    mut m: Matrix<R>,
    mut left: Matrix<R>,
    right: Matrix<R>,
    rank_bound: usize,
) -> SmithNormalForm<R> {
    let mut divisors = Vec::new();
    for t in 0..rank_bound.min(m.rows()).min(m.cols()) {
        if m[(t, t)].is_zero() {
            break;
        }
        if m[(t, t)] < R::zero() {
            m.negate_row(t);
            left.negate_row(t);
        }
        divisors.push(m[(t, t)].clone());
    }
    SmithNormalForm { diagonal: m, left, right, divisors }
}

/// Is `v` an integer combination of the rows of `relations`?
pub fn in_row_span<R: IntScalar>(snf: &SmithNormalForm<R>, v: &[R]) -> bool {
    // rows(M) = rows(L M) and L M = D R⁻¹, so v ∈ rows(M) iff vR lies in
    // rows(D)
    let w = snf.right.apply_row_vector(v);
    for (j, entry) in w.iter().enumerate() {
        match snf.divisors.get(j) {
            Some(d) => {
                if !entry.clone().mod_floor(d).is_zero() {
                    return false;
                }
            }
            None => {
                if !entry.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// One homology group: free rank plus torsion coefficients, each dividing
/// the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<String>,
}

impl HomologyGroup {
    pub fn free(betti: usize) -> HomologyGroup {
        HomologyGroup { betti, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    pub groups: Vec<HomologyGroup>,
}

impl fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.groups.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A bounded chain complex of finitely generated free abelian groups:
/// `boundaries[q]` maps degree `q` to degree `q - 1` and `∂∂ = 0` is
/// checked at construction.
#[derive(Clone, Debug)]
pub struct ChainComplex<R> {
    ranks: Vec<usize>,
    boundaries: Vec<Matrix<R>>,
}

impl<R: IntScalar> ChainComplex<R> {
    pub fn new(ranks: Vec<usize>, boundaries: Vec<Matrix<R>>) -> Result<ChainComplex<R>, HomologyError> {
        if boundaries.len() != ranks.len() {
            return Err(HomologyError::ShapeMismatch(format!(
                "{} ranks but {} boundary maps",
                ranks.len(),
                boundaries.len()
            )));
        }
        for q in 0..ranks.len() {
            let expected_rows = if q == 0 { 0 } else { ranks[q - 1] };
            if boundaries[q].rows() != expected_rows || boundaries[q].cols() != ranks[q] {
                return Err(HomologyError::ShapeMismatch(format!(
                    "boundary {q} has shape {}x{}, expected {}x{}",
                    boundaries[q].rows(),
                    boundaries[q].cols(),
                    expected_rows,
                    ranks[q]
                )));
            }
        }
        for q in 1..ranks.len() {
            if !boundaries[q - 1].mul(&boundaries[q]).is_zero_matrix() {
                return Err(HomologyError::NotAComplex { degree: q });
            }
        }
        Ok(ChainComplex { ranks, boundaries })
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len().saturating_sub(1)
    }

    pub fn rank(&self, q: usize) -> usize {
        self.ranks.get(q).copied().unwrap_or(0)
    }

    pub fn boundary(&self, q: usize) -> Option<&Matrix<R>> {
        self.boundaries.get(q)
    }

    /// Alternating sum of the ranks.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(q, &r)| if q % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    /// `H_q = ker ∂_q / im ∂_{q+1}` in every degree, via Smith normal form.
    pub fn homology(&self) -> HomologyResult {
        let snfs: Vec<SmithNormalForm<R>> =
            self.boundaries.iter().map(smith_normal_form).collect();
        let groups = (0..self.ranks.len())
            .map(|q| {
                let rank_in = if q + 1 < self.ranks.len() { snfs[q + 1].rank() } else { 0 };
                let rank_out = snfs[q].rank();
                let betti = self.ranks[q] - rank_out - rank_in;
                let torsion: Vec<String> = if q + 1 < self.ranks.len() {
                    snfs[q + 1]
                        .divisors
                        .iter()
                        .filter(|d| !d.is_one())
                        .map(|d| d.to_string())
                        .collect()
                } else {
                    Vec::new()
                };
                HomologyGroup { betti, torsion }
            })
            .collect();
        HomologyResult { groups }
    }
}

#[derive(Serialize, Deserialize)]
struct ChainComplexJson {
    ranks: Vec<usize>,
    boundaries: Vec<Matrix<num_bigint::BigInt>>,
}

impl Serialize for ChainComplex<num_bigint::BigInt> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ChainComplexJson { ranks: self.ranks.clone(), boundaries: self.boundaries.clone() }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ChainComplex<num_bigint::BigInt> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let json = ChainComplexJson::deserialize(de)?;
        // matrices with no rows (or no columns) lose their other dimension
        // in the nested-array encoding; rebuild them from the ranks
        let boundaries = json
            .boundaries
            .into_iter()
            .enumerate()
            .map(|(q, m)| {
                let rows = if q == 0 { 0 } else { json.ranks[q - 1] };
                let cols = json.ranks.get(q).copied().unwrap_or(0);
                if m.rows() == 0 || m.cols() == 0 {
                    Matrix::zero(rows, cols)
                } else {
                    m
                }
            })
            .collect();
        ChainComplex::new(json.ranks, boundaries).map_err(serde::de::Error::custom)
    }
}

/// The order complex of a finite poset: simplices are strictly increasing
/// chains, with the usual alternating-face boundary.
pub fn order_complex<T: Clone, R: IntScalar>(p: &GradedPoset<T>) -> ChainComplex<R> {
    let chains = p.chains();
    let max_len = chains.iter().map(Vec::len).max().unwrap_or(0);
    let mut by_degree: Vec<Vec<Vec<usize>>> = vec![Vec::new(); max_len];
    for c in chains {
        by_degree[c.len() - 1].push(c);
    }
    for d in &mut by_degree {
        d.sort();
    }
    let index: Vec<std::collections::HashMap<Vec<usize>, usize>> = by_degree
        .iter()
        .map(|d| d.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect())
        .collect();
    let ranks: Vec<usize> = by_degree.iter().map(Vec::len).collect();
    let mut boundaries = Vec::with_capacity(ranks.len());
    for q in 0..ranks.len() {
        if q == 0 {
            boundaries.push(Matrix::zero(0, ranks[0]));
            continue;
        }
        let mut m: Matrix<R> = Matrix::zero(ranks[q - 1], ranks[q]);
        for (col, chain) in by_degree[q].iter().enumerate() {
            for drop in 0..chain.len() {
                let mut face = chain.clone();
                face.remove(drop);
                let row = index[q - 1][&face];
                let sign = if drop % 2 == 0 { R::one() } else { -R::one() };
                m[(row, col)] = m[(row, col)].clone() + sign;
            }
        }
        boundaries.push(m);
    }
    ChainComplex::new(ranks, boundaries).expect("order complex is a complex")
}

/// Homology of the classifying space of a finite monoid through degree
/// `q_max`, from the normalized bar complex. The complex is built one
/// degree further so the top reported group sees its incoming boundary.
pub fn bar_homology(
    monoid: &crate::partial::FiniteMonoid,
    q_max: usize,
) -> Result<HomologyResult, HomologyError> {
    let c: ChainComplex<num_bigint::BigInt> = bar_complex(monoid, q_max + 1)?;
    let mut h = c.homology();
    h.groups.truncate(q_max + 1);
    Ok(h)
}

/// The normalized bar complex of a finite monoid through degree `q_max`:
/// degree `q` is free on `(A ∖ {e})^q` and any bracket that produces the
/// unit is dropped.
pub fn bar_complex<R: IntScalar>(
    monoid: &crate::partial::FiniteMonoid,
    q_max: usize,
) -> Result<ChainComplex<R>, HomologyError> {
    if let Some(msg) = monoid.associativity_defect() {
        return Err(HomologyError::NotAssociative(msg));
    }
    let letters: Vec<usize> = (0..monoid.size()).filter(|&a| a != monoid.unit()).collect();
    let pos: std::collections::HashMap<usize, usize> =
        letters.iter().copied().enumerate().map(|(i, a)| (a, i)).collect();
    let n = letters.len();
    let ranks: Vec<usize> = (0..=q_max).map(|q| n.pow(q as u32)).collect();
    let unrank = |q: usize, mut idx: usize| -> Vec<usize> {
        let mut word = vec![0usize; q];
        for slot in (0..q).rev() {
            word[slot] = letters[idx % n];
            idx /= n;
        }
        word
    };
    let rank_of = |word: &[usize]| -> usize {
        word.iter().fold(0usize, |acc, a| acc * n + pos[a])
    };
    let mut boundaries = Vec::with_capacity(q_max + 1);
    boundaries.push(Matrix::zero(0, 1));
    for q in 1..=q_max {
        let mut m: Matrix<R> = Matrix::zero(ranks[q - 1], ranks[q]);
        for col in 0..ranks[q] {
            let word = unrank(q, col);
            let mut add = |face: Vec<usize>, sign_pos: bool| {
                if face.iter().any(|&a| a == monoid.unit()) {
                    return; // normalized: degenerate faces vanish
                }
                let row = rank_of(&face);
                let delta = if sign_pos { R::one() } else { -R::one() };
                m[(row, col)] = m[(row, col)].clone() + delta;
            };
            // drop the first letter
            add(word[1..].to_vec(), true);
            // multiply adjacent letters
            for i in 0..q - 1 {
                let mut face = Vec::with_capacity(q - 1);
                face.extend_from_slice(&word[..i]);
                face.push(monoid.mul(word[i], word[i + 1]));
                face.extend_from_slice(&word[i + 2..]);
                add(face, (i + 1) % 2 == 0);
            }
            // drop the last letter
            add(word[..q - 1].to_vec(), q % 2 == 0);
        }
        boundaries.push(m);
    }
    ChainComplex::new(ranks, boundaries)
}
