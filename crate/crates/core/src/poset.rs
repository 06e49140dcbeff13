//! Finite graded posets: the face posets produced by the W-construction
//! and consumed by the homology backend.

use std::fmt;

/// A finite poset with a grade function, stored as an explicit relation
/// matrix. Grades decrease strictly along the order in the face-poset
/// convention used here (`t ≤ t'` when `t'` is a coarsening), so the unique
/// grade-0 elements sit at the top.
#[derive(Clone, Debug)]
pub struct GradedPoset<T> {
    elements: Vec<T>,
    grade: Vec<usize>,
    leq: Vec<Vec<bool>>,
}

impl<T: Clone> GradedPoset<T> {
    pub fn new(elements: Vec<T>, grade: Vec<usize>, leq: Vec<Vec<bool>>) -> GradedPoset<T> {
        let n = elements.len();
        assert_eq!(grade.len(), n);
        assert_eq!(leq.len(), n);
        assert!(leq.iter().all(|row| row.len() == n));
        let p = GradedPoset { elements, grade, leq };
        debug_assert!(p.check_partial_order());
        p
    }

    fn check_partial_order(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            if !self.leq[i][i] {
                return false;
            }
            for j in 0..n {
                if self.leq[i][j] && self.leq[j][i] && i != j {
                    return false;
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &T {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn grade(&self, i: usize) -> usize {
        self.grade[i]
    }

    pub fn is_leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn max_grade(&self) -> usize {
        self.grade.iter().copied().max().unwrap_or(0)
    }

    pub fn count_by_grade(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.max_grade() + 1];
        for &g in &self.grade {
            counts[g] += 1;
        }
        counts
    }

    /// Covering pairs `(i, j)` with `i < j` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq[i][j] {
                    continue;
                }
                let between = (0..n).any(|k| {
                    k != i && k != j && self.leq[i][k] && self.leq[k][j]
                });
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The subposet on the elements whose indices satisfy `keep`.
    pub fn filtered(&self, keep: impl Fn(usize) -> bool) -> GradedPoset<T> {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        let elements = idx.iter().map(|&i| self.elements[i].clone()).collect();
        let grade = idx.iter().map(|&i| self.grade[i]).collect();
        let leq = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.leq[i][j]).collect())
            .collect();
        GradedPoset { elements, grade, leq }
    }

    /// Drops the unique maximal element (grade 0 in the face-poset
    /// convention); for a polytope face poset this is the boundary.
    pub fn boundary(&self) -> GradedPoset<T> {
        let tops: Vec<usize> = (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| !self.leq[i][j] || i == j))
            .collect();
        assert_eq!(tops.len(), 1, "boundary needs a unique top element");
        self.filtered(|i| i != tops[0])
    }

    /// Relabels the elements by a permutation of indices (`new[p] =
    /// old[perm[p]]`); used to test isomorphism invariance.
    pub fn permuted(&self, perm: &[usize]) -> GradedPoset<T> {
        let n = self.len();
        assert_eq!(perm.len(), n);
        let elements = perm.iter().map(|&i| self.elements[i].clone()).collect();
        let grade = perm.iter().map(|&i| self.grade[i]).collect();
        let leq = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.leq[i][j]).collect())
            .collect();
        GradedPoset { elements, grade, leq }
    }

    /// All strictly increasing chains, as index vectors, shortest first.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().unwrap();
            for j in 0..n {
                if j != last && self.leq[last][j] {
                    let mut next = chain.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
            out.push(chain);
        }
        out.sort_by_key(|c| (c.len(), c.clone()));
        out
    }

}

impl<T: fmt::Display + Clone> GradedPoset<T> {
    /// Hasse diagram in Graphviz format, ranked by grade.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for (i, e) in self.elements.iter().enumerate() {
            out.push_str(&format!("  n{i} [shape=box,label=\"{e}\"];\n"));
        }
        for (i, j) in self.covers() {
            out.push_str(&format!("  n{i} -> n{j};\n"));
        }
        out.push_str("}\n");
        out
    }
}
