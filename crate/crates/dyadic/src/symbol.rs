//! Symbol sequences `{a_I}` indexed by tree nodes and their calculus: Schur
//! product, sweep, subtree averages, and the `ℓ∞` / Carleson-measure norms.
//!
//! Paraproduct symbols live on Haar levels (`level < D`, where `h_I` exists);
//! the container also admits leaf-level entries because subtree aggregates
//! naturally produce values on every node.

use crate::tree::{DyadicIndex, Tree};
use crate::{Error, Result, Scalar};

/// Scalar sequence over the nodes of a depth-`D` tree; missing entries are
/// exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    depth: usize,
    values: Vec<Scalar>,
}

impl Symbol {
    pub fn zero(depth: usize) -> Self {
        let tree = Tree::new(depth).expect("valid depth");
        Self { depth, values: vec![Scalar::ZERO; tree.node_count()] }
    }

    pub fn from_entries(depth: usize, entries: &[(DyadicIndex, Scalar)]) -> Result<Self> {
        let tree = Tree::new(depth)?;
        let mut s = Self::zero(depth);
        let mut seen = vec![false; tree.node_count()];
        for (i, v) in entries {
            if i.level() > depth {
                return Err(Error::PathTooDeep { len: i.level(), depth });
            }
            let id = tree.node_id(*i);
            if seen[id] {
                return Err(Error::DuplicatePath { path: i.path() });
            }
            seen[id] = true;
            s.values[id] = *v;
        }
        Ok(s)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tree(&self) -> Tree {
        Tree::new(self.depth).expect("valid depth")
    }

    pub fn get(&self, i: DyadicIndex) -> Scalar {
        self.values[self.tree().node_id(i)]
    }

    pub fn set(&mut self, i: DyadicIndex, v: Scalar) -> Result<()> {
        if i.level() > self.depth {
            return Err(Error::PathTooDeep { len: i.level(), depth: self.depth });
        }
        let id = self.tree().node_id(i);
        self.values[id] = v;
        Ok(())
    }

    pub(crate) fn get_id(&self, id: usize) -> Scalar {
        self.values[id]
    }

    pub(crate) fn set_id(&mut self, id: usize, v: Scalar) {
        self.values[id] = v;
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Scalar::ZERO)
    }

    /// Nonzero entries in heap order.
    pub fn entries(&self) -> Vec<(DyadicIndex, Scalar)> {
        let tree = self.tree();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Scalar::ZERO)
            .map(|(id, v)| (tree.index_of(id), *v))
            .collect()
    }

    /// True when all nonzero entries sit at Haar levels, where paraproduct
    /// symbols live.
    pub fn is_haar_supported(&self) -> bool {
        let tree = self.tree();
        self.values[tree.haar_count()..].iter().all(|v| *v == Scalar::ZERO)
    }

    pub fn conj(&self) -> Symbol {
        Symbol { depth: self.depth, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn add(&self, other: &Symbol) -> Result<Symbol> {
        self.check_depth(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Symbol { depth: self.depth, values })
    }

    pub fn scale(&self, c: Scalar) -> Symbol {
        Symbol { depth: self.depth, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Entrywise moduli squared `|a_I|^2`, used by testing-condition sums.
    pub fn abs_squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    fn check_depth(&self, other: &Symbol) -> Result<()> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch { left: self.depth, right: other.depth });
        }
        Ok(())
    }

    /// Schur product `(b ∘ d)_I = b_I d_I` (no conjugation).
    pub fn schur(&self, other: &Symbol) -> Result<Symbol> {
        self.check_depth(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Symbol { depth: self.depth, values })
    }

    /// The sweep: Haar coefficients of `Σ_J a_J h_J^1`, via the closed form
    /// `Ŝ(a)_I = |I|^{-1/2} (Σ_{J ⊆ I_+} a_J − Σ_{J ⊆ I_-} a_J)` in one
    /// bottom-up pass. Entries live on Haar nodes.
    pub fn sweep(&self) -> Symbol {
        let tree = self.tree();
        let sums = tree.subtree_sums_c(&self.values);
        let mut out = Symbol::zero(self.depth);
        for id in 0..tree.haar_count() {
            let i = tree.index_of(id);
            let v = (sums[2 * id + 2] - sums[2 * id + 1]) / Scalar::from(i.measure().sqrt());
            out.values[id] = v;
        }
        out
    }

    /// `E(a)_J = |J|^{-1} Σ_{I ⊆ J} a_I` on every node (inclusive sum).
    pub fn subtree_averages(&self) -> Symbol {
        let tree = self.tree();
        let sums = tree.subtree_sums_c(&self.values);
        let values = sums
            .iter()
            .enumerate()
            .map(|(id, s)| s / Scalar::from(tree.index_of(id).measure()))
            .collect();
        Symbol { depth: self.depth, values }
    }

    /// `sup_I |a_I|` over all nodes.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Carleson-measure norm: `sqrt(max_I |I|^{-1} Σ_{J ⊆ I} |a_J|^2)`, the
    /// maximum over Haar-level nodes, inner sum over the whole subtree.
    pub fn cm_norm(&self) -> f64 {
        let tree = self.tree();
        let sq: Vec<f64> = self.abs_squared();
        let sums = tree.subtree_sums(&sq);
        let max = (0..tree.haar_count())
            .map(|id| sums[id] / tree.index_of(id).measure())
            .fold(0.0, f64::max);
        max.sqrt()
    }
}
