//! Weyl group of SL(n): permutations of coordinates, chamber folding, and the
//! parabolic subgroups fixing the faces cut out by a set of simple roots.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::vector::CartanVector;
use crate::error::{Error, Result};

/// A permutation acting on Cartan vectors by `(w . v)[i] = v[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    perm: Vec<usize>,
}

impl WeylElement {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::invalid(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(WeylElement { perm })
    }

    pub fn identity(n: usize) -> Self {
        WeylElement {
            perm: (0..n).collect(),
        }
    }

    /// The reflection in the wall of the simple root alpha_i (1-based): swaps i and i+1.
    pub fn reflection(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::invalid(format!("root index {i} out of range for SL({n})")));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i - 1, i);
        Ok(WeylElement { perm })
    }

    /// The longest element, reversing all coordinates.
    pub fn longest(n: usize) -> Self {
        WeylElement {
            perm: (0..n).rev().collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn act(&self, v: &CartanVector) -> CartanVector {
        CartanVector::from_raw(self.act_slice(v.coords()))
    }

    pub(crate) fn act_slice(&self, v: &[f64]) -> Vec<f64> {
        self.perm.iter().map(|&p| v[p]).collect()
    }

    /// `self.compose(other)` acts as `self` after `other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement {
            perm: self.perm.iter().map(|&i| other.perm[i]).collect(),
        }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        WeylElement { perm: inv }
    }
}

pub fn weyl_action(w: &WeylElement, v: &CartanVector) -> CartanVector {
    w.act(v)
}

/// Sorts coordinates into non-increasing order and returns a witness `w` with
/// `w . v` equal to the sorted vector. Ties keep their order, so dominant input
/// gets the identity witness.
pub fn fold_to_chamber(v: &CartanVector) -> (CartanVector, WeylElement) {
    let c = v.coords();
    let mut perm: Vec<usize> = (0..c.len()).collect();
    perm.sort_by(|&a, &b| c[b].total_cmp(&c[a]));
    let w = WeylElement { perm };
    (w.act(v), w)
}

/// A non-empty set of simple roots alpha_i = e_i - e_{i+1}, indexed 1..n-1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaSubset {
    n: usize,
    indices: BTreeSet<usize>,
}

impl ThetaSubset {
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("theta subsets need n >= 2"));
        }
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(Error::invalid("theta must be non-empty"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i >= n) {
            return Err(Error::invalid(format!(
                "simple root index {bad} out of range 1..={}",
                n - 1
            )));
        }
        Ok(ThetaSubset { n, indices })
    }

    /// All simple roots.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, 1..n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.n - 1
    }

    /// theta together with its image under the opposition involution,
    /// which sends alpha_i to alpha_{n-i}.
    pub fn with_opposition(&self) -> ThetaSubset {
        let indices = self
            .indices
            .iter()
            .flat_map(|&i| [i, self.n - i])
            .collect();
        ThetaSubset { n: self.n, indices }
    }

    /// Coordinate blocks on which vectors of the face a_theta are constant.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        let mut blocks = Vec::new();
        let mut start = 0;
        for &i in &self.indices {
            blocks.push(start..i);
            start = i;
        }
        blocks.push(start..self.n);
        blocks
    }

    /// All elements of the parabolic Weyl subgroup W_theta generated by the
    /// reflections in the roots outside theta (block-preserving permutations).
    pub fn weyl_subgroup(&self) -> Vec<WeylElement> {
        let mut elements = vec![(0..self.n).collect::<Vec<usize>>()];
        for block in self.blocks() {
            if block.len() < 2 {
                continue;
            }
            let perms = permutations(block.clone());
            let mut next = Vec::with_capacity(elements.len() * perms.len());
            for base in &elements {
                for p in &perms {
                    let mut e = base.clone();
                    for (offset, &target) in p.iter().enumerate() {
                        e[block.start + offset] = target;
                    }
                    next.push(e);
                }
            }
            elements = next;
        }
        elements.into_iter().map(|perm| WeylElement { perm }).collect()
    }
}

fn permutations(items: Range<usize>) -> Vec<Vec<usize>> {
    let items: Vec<usize> = items.collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(items.len());
    let mut used = vec![false; items.len()];
    fn rec(
        items: &[usize],
        used: &mut [bool],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == items.len() {
            out.push(current.clone());
            return;
        }
        for i in 0..items.len() {
            if !used[i] {
                used[i] = true;
                current.push(items[i]);
                rec(items, used, current, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(&items, &mut used, &mut current, &mut out);
    out
}
