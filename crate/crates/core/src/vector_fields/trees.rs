use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use super::derivatives::{iterated_lie_derivative, word_ops};
use super::feedback::Shape;
use super::field::{ScalarField, VectorField};
use super::FieldError;
use crate::free_algebra::MultiIndex;

pub const MAX_TREE_ORDER: usize = 6;
pub const MAX_EXPANSION_ORDER: usize = 4;

/// Rooted tree on `{0, 1, …, ℓ}` with root 0 and `parent(k) < k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IncreasingTree {
    parent: Vec<usize>,
}

impl IncreasingTree {
    /// `parents[k - 1]` is the parent of node `k`.
    pub fn from_parents(parents: Vec<usize>) -> Option<Self> {
        if parents.iter().enumerate().all(|(i, &p)| p <= i) {
            Some(IncreasingTree { parent: parents })
        } else {
            None
        }
    }

    pub fn order(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, k: usize) -> Option<usize> {
        k.checked_sub(1).and_then(|i| self.parent.get(i).copied())
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    /// Children of node `k` in increasing order.
    pub fn children(&self, k: usize) -> Vec<usize> {
        (1..=self.order()).filter(|&c| self.parent[c - 1] == k).collect()
    }
}

impl fmt::Display for IncreasingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.parent.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p)?;
        }
        f.write_str("]")
    }
}

/// All `ℓ!` increasing trees on `{0, …, ℓ}` for `1 ≤ ℓ ≤ 6`.
pub fn increasing_trees(order: usize) -> Result<Vec<IncreasingTree>, FieldError> {
    if !(1..=MAX_TREE_ORDER).contains(&order) {
        return Err(FieldError::OrderRange(order, 1, MAX_TREE_ORDER));
    }
    let mut out = alloc::vec![Vec::new()];
    for k in 1..=order {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..k).map(move |q| {
                    let mut p = p.clone();
                    p.push(q);
                    p
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(|parent| IncreasingTree { parent }).collect())
}

/// Set partitions of `{0, …, q−1}`, blocks sorted, generated from
/// restricted growth strings.
pub fn set_partitions(q: usize) -> Vec<Vec<Vec<usize>>> {
    if q == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut a = alloc::vec![0usize; q];
    loop {
        let blocks = a.iter().max().map_or(0, |m| m + 1);
        let mut p = alloc::vec![Vec::new(); blocks];
        for (i, &b) in a.iter().enumerate() {
            p[b].push(i);
        }
        out.push(p);
        let mut i = q - 1;
        loop {
            if i == 0 {
                return out;
            }
            let m = a[..i].iter().max().copied().unwrap_or(0);
            if a[i] <= m {
                a[i] += 1;
                for v in &mut a[i + 1..] {
                    *v = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// One summand of the tree expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeTerm {
    pub tree: IncreasingTree,
    pub value: f64,
}

struct Expansion<'a> {
    e: &'a [VectorField],
    shapes: &'a [Shape],
    psi: &'a ScalarField,
    t: f64,
    x: &'a [f64],
    psi_value: f64,
    psi_words: BTreeMap<Vec<usize>, f64>,
}

impl Expansion<'_> {
    /// `e_{j_q}(⋯ e_{j_1} β)` for `seq = [j_1, …, j_q]`.
    fn word(&self, seq: &[usize], beta: &ScalarField) -> Result<f64, FieldError> {
        let outer_first: Vec<usize> = seq.iter().rev().copied().collect();
        let ops = word_ops(self.e, &outer_first)?;
        iterated_lie_derivative(&ops, beta, self.t, self.x)
    }

    fn psi_word(&mut self, seq: Vec<usize>) -> Result<f64, FieldError> {
        if let Some(v) = self.psi_words.get(&seq) {
            return Ok(*v);
        }
        let v = self.word(&seq, self.psi)?;
        self.psi_words.insert(seq, v);
        Ok(v)
    }

    /// `e_seq(h ∘ ψ)` by the partition form of Faà di Bruno.
    fn shaped(&mut self, seq: &[usize], shape: Shape) -> Result<f64, FieldError> {
        if seq.is_empty() {
            return Ok(shape.value(self.psi_value));
        }
        let mut total = 0.0;
        for p in set_partitions(seq.len()) {
            let d = shape.derivative(self.psi_value, p.len());
            if d == 0.0 {
                continue;
            }
            let mut prod = d;
            for block in &p {
                prod *= self.psi_word(block.iter().map(|&i| seq[i]).collect())?;
            }
            total += prod;
        }
        Ok(total)
    }
}

/// Per-tree summands of `f_I α` for `f_i = h_i(ψ) e_i`, valid where `ψ > 0`.
pub fn tree_expansion_terms(
    e: &[VectorField],
    shapes: &[Shape],
    psi: &ScalarField,
    alpha: &ScalarField,
    index: &MultiIndex,
    t: f64,
    x: &[f64],
) -> Result<Vec<TreeTerm>, FieldError> {
    let l = index.len();
    if !(1..=MAX_EXPANSION_ORDER).contains(&l) {
        return Err(FieldError::OrderRange(l, 1, MAX_EXPANSION_ORDER));
    }
    if shapes.len() != e.len() {
        return Err(FieldError::Channels(e.len(), shapes.len()));
    }
    let psi_value = psi.eval(t, x);
    if !(psi_value > 0.0) {
        return Err(FieldError::ZeroOutput);
    }
    // i_k in the expansion is the k-th letter counted from the right
    let letters = index.letters();
    let i = |k: usize| letters[l - k];
    let mut ex = Expansion { e, shapes, psi, t, x, psi_value, psi_words: BTreeMap::new() };
    let mut out = Vec::new();
    for tree in increasing_trees(l)? {
        let root: Vec<usize> = tree.children(0).into_iter().map(i).collect();
        let mut value = ex.word(&root, alpha)?;
        for k in 1..=l {
            if value == 0.0 {
                break;
            }
            let seq: Vec<usize> = tree.children(k).into_iter().map(i).collect();
            let shape = ex.shapes[i(k) - 1];
            value *= ex.shaped(&seq, shape)?;
        }
        out.push(TreeTerm { tree, value });
    }
    Ok(out)
}

/// Sum of `tree_expansion_terms`.
pub fn tree_expansion_lie_derivative(
    e: &[VectorField],
    shapes: &[Shape],
    psi: &ScalarField,
    alpha: &ScalarField,
    index: &MultiIndex,
    t: f64,
    x: &[f64],
) -> Result<f64, FieldError> {
    Ok(tree_expansion_terms(e, shapes, psi, alpha, index, t, x)?.iter().map(|s| s.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts() {
        let fact = [1, 1, 2, 6, 24, 120, 720];
        for l in 1..=6 {
            assert_eq!(increasing_trees(l).unwrap().len(), fact[l]);
        }
        assert!(increasing_trees(0).is_err());
        assert!(increasing_trees(7).is_err());
    }

    #[test]
    fn bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52];
        for q in 0..6 {
            assert_eq!(set_partitions(q).len(), bell[q]);
        }
    }

    #[test]
    fn children_sorted() {
        let t = IncreasingTree::from_parents(alloc::vec![0, 1, 1]).unwrap();
        assert_eq!(t.children(0), alloc::vec![1]);
        assert_eq!(t.children(1), alloc::vec![2, 3]);
        assert!(IncreasingTree::from_parents(alloc::vec![1]).is_none());
    }
}
