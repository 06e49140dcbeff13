//! Permutations in one-line notation, plus the block operations that
//! symmetric-group actions on operads need.
//!
//! Conventions, fixed once and used everywhere:
//! * a permutation is a bijection of `{0, .., n-1}`; `apply(i)` is the image
//!   of `i` ("item at position `i` moves to position `apply(i)`");
//! * `compose` is function composition: `(s.compose(t)).apply(i) = s.apply(t.apply(i))`;
//! * right actions are by precomposition: `x · s` reads positions through `s`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A permutation of `{0, .., n-1}` in one-line notation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<usize>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    /// Builds a permutation from its one-line notation (0-indexed images).
    /// Returns `None` if the word is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return None;
            }
            seen[v] = true;
        }
        Some(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Perm(inv)
    }

    /// The transposition of `i` and `i + 1` inside `{0, .., n-1}`.
    pub fn adjacent_transposition(n: usize, i: usize) -> Perm {
        assert!(i + 1 < n);
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, i + 1);
        Perm(v)
    }

    /// All permutations of degree `n` in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm(current.clone()));
            // next lexicographic permutation
            let mut i = n.wrapping_sub(1);
            loop {
                if i == 0 || i == usize::MAX {
                    return out;
                }
                if current[i - 1] < current[i] {
                    break;
                }
                i -= 1;
            }
            let mut j = n - 1;
            while current[j] <= current[i - 1] {
                j -= 1;
            }
            current.swap(i - 1, j);
            current[i..].reverse();
        }
    }

    /// Writes `self` as a composition `t_1 ∘ t_2 ∘ ... ∘ t_r` of adjacent
    /// transpositions, returning the swap positions in composition order.
    pub fn adjacent_factors(&self) -> Vec<usize> {
        // Bubble-sort the one-line word back to the identity; the recorded
        // swaps, read in reverse, compose to `self`.
        let mut w = self.0.clone();
        let n = w.len();
        let mut swaps = Vec::new();
        loop {
            let mut done = true;
            for i in 0..n.saturating_sub(1) {
                if w[i] > w[i + 1] {
                    w.swap(i, i + 1);
                    swaps.push(i);
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        swaps.reverse();
        debug_assert_eq!(*self, {
            let mut p = Perm::identity(n);
            for &i in &swaps {
                p = p.compose(&Perm::adjacent_transposition(n, i));
            }
            p
        });
        swaps
    }

    /// The block permutation induced by `self` on consecutive blocks of the
    /// given sizes: source block `j` (of size `sizes[j]`) is moved, in one
    /// piece and in order, to target slot `self.apply(j)`.
    pub fn block(&self, sizes: &[usize]) -> Perm {
        let k = self.degree();
        assert_eq!(sizes.len(), k, "one size per block");
        let inv = self.inverse();
        let total: usize = sizes.iter().sum();
        // target offset of slot p = sizes of the source blocks landing before it
        let mut target_offset = vec![0usize; k];
        let mut acc = 0;
        for p in 0..k {
            target_offset[p] = acc;
            acc += sizes[inv.apply(p)];
        }
        let mut src_offset = vec![0usize; k];
        acc = 0;
        for j in 0..k {
            src_offset[j] = acc;
            acc += sizes[j];
        }
        let mut images = vec![0usize; total];
        for j in 0..k {
            for o in 0..sizes[j] {
                images[src_offset[j] + o] = target_offset[self.apply(j)] + o;
            }
        }
        Perm(images)
    }

    /// Direct sum: acts as `parts[j]` inside the `j`-th consecutive block.
    pub fn direct_sum(parts: &[Perm]) -> Perm {
        let total: usize = parts.iter().map(|p| p.degree()).sum();
        let mut images = Vec::with_capacity(total);
        let mut offset = 0;
        for p in parts {
            images.extend(p.0.iter().map(|&v| v + offset));
            offset += p.degree();
        }
        Perm(images)
    }
}

impl Serialize for Perm {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        // 1-based one-line notation in JSON
        let v: Vec<usize> = self.0.iter().map(|&i| i + 1).collect();
        v.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let v: Vec<usize> = Vec::deserialize(de)?;
        if v.iter().any(|&i| i == 0) {
            return Err(serde::de::Error::custom("one-line notation is 1-based"));
        }
        Perm::from_images(v.into_iter().map(|i| i - 1).collect())
            .ok_or_else(|| serde::de::Error::custom("not a permutation"))
    }
}
