//! The `2^D`-dimensional model of `L^2([0,1))`: step functions constant on
//! dyadic leaves, Haar analysis/synthesis, pairings against `h_I^0 = h_I` and
//! `h_I^1 = 1_I / |I|`, and the projections `Q_I`.
//!
//! Haar functions are never materialized; they act through [`analyze`],
//! [`pair`] and [`HaarCoefficients::synthesize`]. The constant function joins
//! the basis through the `mean` slot, so `{h_I} ∪ {1}` is an orthonormal
//! basis of the model space and upward Haar expansions terminate exactly at
//! the root.

use crate::symbol::Symbol;
use crate::tree::{DyadicIndex, Tree};
use crate::{Error, Result, Scalar};

/// An element of the model space: one complex value per depth-`D` leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    depth: usize,
    leaves: Vec<Scalar>,
}

/// The dual view of a [`StepFunction`]: mean slot (coefficient of the
/// constant `1_{[0,1)}`) plus Haar coefficients on nodes of level `< D`.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarCoefficients {
    pub mean: Scalar,
    pub coeffs: Symbol,
}

impl StepFunction {
    pub fn zero(depth: usize) -> Self {
        Self { depth, leaves: vec![Scalar::ZERO; 1 << depth] }
    }

    pub fn constant(depth: usize, value: Scalar) -> Self {
        Self { depth, leaves: vec![value; 1 << depth] }
    }

    pub fn from_leaves(depth: usize, leaves: Vec<Scalar>) -> Result<Self> {
        if leaves.len() != 1 << depth {
            return Err(Error::LeafCountMismatch { len: leaves.len(), expected: 1 << depth });
        }
        Ok(Self { depth, leaves })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tree(&self) -> Tree {
        Tree::new(self.depth).expect("valid depth")
    }

    pub fn leaves(&self) -> &[Scalar] {
        &self.leaves
    }

    pub fn leaves_mut(&mut self) -> &mut [Scalar] {
        &mut self.leaves
    }

    /// `⟨f, g⟩ = ∫ f conj(g)`, leaf quadrature.
    pub fn inner(&self, other: &StepFunction) -> Scalar {
        debug_assert_eq!(self.depth, other.depth);
        let w = (2.0f64).powi(-(self.depth as i32));
        self.leaves
            .iter()
            .zip(&other.leaves)
            .map(|(a, b)| a * b.conj())
            .sum::<Scalar>()
            * w
    }

    pub fn norm(&self) -> f64 {
        let w = (2.0f64).powi(-(self.depth as i32));
        (self.leaves.iter().map(|a| a.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    pub fn add(&self, other: &StepFunction) -> StepFunction {
        debug_assert_eq!(self.depth, other.depth);
        let leaves = self.leaves.iter().zip(&other.leaves).map(|(a, b)| a + b).collect();
        Self { depth: self.depth, leaves }
    }

    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        debug_assert_eq!(self.depth, other.depth);
        let leaves = self.leaves.iter().zip(&other.leaves).map(|(a, b)| a - b).collect();
        Self { depth: self.depth, leaves }
    }

    pub fn scale(&self, c: Scalar) -> StepFunction {
        Self { depth: self.depth, leaves: self.leaves.iter().map(|a| a * c).collect() }
    }

    /// Subtree integrals `∫_I f` for every node, one bottom-up pass.
    pub fn subtree_integrals(&self) -> Vec<Scalar> {
        let tree = self.tree();
        let w = (2.0f64).powi(-(self.depth as i32));
        let mut vals = vec![Scalar::ZERO; tree.node_count()];
        for (k, v) in self.leaves.iter().enumerate() {
            vals[tree.haar_count() + k] = v * w;
        }
        tree.subtree_sums_c(&vals)
    }

    /// Average of `f` over the interval `I`.
    pub fn average_on(&self, i: DyadicIndex) -> Scalar {
        let tree = self.tree();
        debug_assert!(tree.contains(i));
        let span = 1usize << (self.depth - i.level());
        let start = (i.offset() as usize) << (self.depth - i.level());
        let w = (2.0f64).powi(-(self.depth as i32));
        let integral: Scalar = self.leaves[start..start + span].iter().sum::<Scalar>() * w;
        integral / Scalar::from(i.measure())
    }

    /// Haar analysis: mean slot plus `f̂(I) = ⟨f, h_I⟩` on all Haar nodes.
    pub fn analyze(&self) -> HaarCoefficients {
        let tree = self.tree();
        let integrals = self.subtree_integrals();
        let mut coeffs = Symbol::zero(self.depth);
        for id in 0..tree.haar_count() {
            let i = tree.index_of(id);
            let c = (integrals[2 * id + 2] - integrals[2 * id + 1]) / Scalar::from(i.measure().sqrt());
            coeffs.set_id(id, c);
        }
        HaarCoefficients { mean: integrals[0], coeffs }
    }

    /// Orthonormal coordinates `[mean, f̂(I) in heap order]`, length `2^D`.
    pub fn to_coords(&self) -> Vec<Scalar> {
        let hc = self.analyze();
        let tree = self.tree();
        let mut out = Vec::with_capacity(1 << self.depth);
        out.push(hc.mean);
        out.extend((0..tree.haar_count()).map(|id| hc.coeffs.get_id(id)));
        out
    }

    pub fn from_coords(depth: usize, coords: &[Scalar]) -> StepFunction {
        assert_eq!(coords.len(), 1 << depth);
        let mut coeffs = Symbol::zero(depth);
        for (id, c) in coords[1..].iter().enumerate() {
            coeffs.set_id(id, *c);
        }
        HaarCoefficients { mean: coords[0], coeffs }.synthesize()
    }
}

impl HaarCoefficients {
    pub fn depth(&self) -> usize {
        self.coeffs.depth()
    }

    /// Inverse of [`StepFunction::analyze`].
    pub fn synthesize(&self) -> StepFunction {
        let depth = self.depth();
        let tree = Tree::new(depth).expect("valid depth");
        // accumulate the running value of mean + sum of c_I h_I down the tree
        let mut acc = vec![Scalar::ZERO; tree.node_count()];
        acc[0] = self.mean;
        for id in 0..tree.haar_count() {
            let i = tree.index_of(id);
            let step = self.coeffs.get_id(id) / Scalar::from(i.measure().sqrt());
            acc[2 * id + 1] = acc[id] - step;
            acc[2 * id + 2] = acc[id] + step;
        }
        let leaves = acc[tree.haar_count()..].to_vec();
        StepFunction { depth, leaves }
    }
}

/// `⟨f, h_I^beta⟩`: `beta = 0` is the Haar coefficient (Haar levels only),
/// `beta = 1` the interval average.
pub fn pair(f: &StepFunction, i: DyadicIndex, beta: u8) -> Result<Scalar> {
    let tree = f.tree();
    debug_assert!(tree.contains(i));
    match beta {
        0 => {
            if !tree.is_haar(i) {
                return Err(Error::LeafHasNoHaar { path: i.path(), level: i.level() });
            }
            let integrals = f.subtree_integrals();
            let id = tree.node_id(i);
            Ok((integrals[2 * id + 2] - integrals[2 * id + 1]) / Scalar::from(i.measure().sqrt()))
        }
        1 => Ok(f.average_on(i)),
        _ => panic!("beta must be 0 or 1"),
    }
}

/// `Q_I f`: keeps Haar coefficients `f̂(J)` for `J ⊆ I`, zero mean.
pub fn project_q(f: &StepFunction, i: DyadicIndex) -> StepFunction {
    let tree = f.tree();
    let hc = f.analyze();
    let mut masked = Symbol::zero(f.depth());
    for id in 0..tree.haar_count() {
        if tree.index_of(id).is_contained_in(&i) {
            masked.set_id(id, hc.coeffs.get_id(id));
        }
    }
    HaarCoefficients { mean: Scalar::ZERO, coeffs: masked }.synthesize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::ROOT;

    fn c(re: f64) -> Scalar {
        Scalar::new(re, 0.0)
    }

    #[test]
    fn analyze_left_indicator() {
        // f = 1 on [0,1/2), 0 on [1/2,1)
        let f = StepFunction::from_leaves(1, vec![c(1.0), c(0.0)]).unwrap();
        let hc = f.analyze();
        assert!((hc.mean - c(0.5)).norm() < 1e-15);
        assert!((hc.coeffs.get(ROOT) - c(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn constants_are_haar_orthogonal() {
        let f = StepFunction::constant(4, c(1.0));
        let hc = f.analyze();
        assert_eq!(hc.mean, c(1.0));
        assert!(hc.coeffs.linf_norm() == 0.0);
    }

    #[test]
    fn haar_function_is_orthonormal() {
        // f = h_root sampled on leaves at D = 2
        let f = StepFunction::from_leaves(2, vec![c(-1.0), c(-1.0), c(1.0), c(1.0)]).unwrap();
        let hc = f.analyze();
        assert!(hc.mean.norm() < 1e-15);
        assert!((hc.coeffs.get(ROOT) - c(1.0)).norm() < 1e-15);
        for id in 1..f.tree().haar_count() {
            assert!(hc.coeffs.get_id(id).norm() < 1e-15);
        }
    }

    #[test]
    fn synthesize_inverts_analyze() {
        let mut coeffs = Symbol::zero(1);
        coeffs.set(ROOT, c(1.0)).unwrap();
        let f = HaarCoefficients { mean: Scalar::ZERO, coeffs }.synthesize();
        assert_eq!(f.leaves(), &[c(-1.0), c(1.0)]);

        let g = HaarCoefficients { mean: c(1.0), coeffs: Symbol::zero(3) }.synthesize();
        assert!(g.leaves().iter().all(|v| (v - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn pair_examples() {
        let one = StepFunction::constant(3, c(1.0));
        let i = DyadicIndex::from_path("01").unwrap();
        assert!((pair(&one, i, 1).unwrap() - c(1.0)).norm() < 1e-15);
        assert!(pair(&one, i, 0).unwrap().norm() < 1e-15);

        let mut f = StepFunction::zero(3);
        for k in 0..4 {
            f.leaves_mut()[k] = c(1.0); // 1 on [0, 1/2)
        }
        let left = DyadicIndex::from_path("0").unwrap();
        assert!((pair(&f, left, 1).unwrap() - c(1.0)).norm() < 1e-15);
        assert!((pair(&f, ROOT, 1).unwrap() - c(0.5)).norm() < 1e-15);

        // beta = 0 at leaf level is rejected
        let leaf = DyadicIndex::from_path("010").unwrap();
        assert!(pair(&f, leaf, 0).is_err());
    }

    #[test]
    fn pair_average_equals_rooted_expansion() {
        // zero-mean f: ⟨f, h_I^1⟩ = Σ_{K ⊋ I} f̂(K) ⟨h_K, h_I^1⟩, where
        // ⟨h_K, h_I^1⟩ is the constant value of h_K on I
        let depth = 5;
        let tree = Tree::new(depth).unwrap();
        let leaves: Vec<Scalar> =
            (0..1 << depth).map(|k| Scalar::new((k as f64).sin(), (k as f64 * 0.7).cos())).collect();
        let mut f = StepFunction::from_leaves(depth, leaves).unwrap();
        let mean = f.analyze().mean;
        for v in f.leaves_mut() {
            *v -= mean;
        }
        let hc = f.analyze();
        for i in tree.nodes() {
            let avg = pair(&f, i, 1).unwrap();
            let mut expansion = Scalar::ZERO;
            let mut k = i;
            while let Some(up) = k.parent() {
                // value of h_up on the half containing k
                let sign = if k.offset() & 1 == 1 { 1.0 } else { -1.0 };
                expansion += hc.coeffs.get(up) * Scalar::from(sign / up.measure().sqrt());
                k = up;
            }
            assert!((avg - expansion).norm() < 1e-12, "node {}", i.path());
        }
    }

    #[test]
    fn project_q_masks_coefficients() {
        let left = DyadicIndex::from_path("0").unwrap();
        let right = DyadicIndex::from_path("1").unwrap();
        let mut coeffs = Symbol::zero(3);
        coeffs.set(left, c(1.0)).unwrap();
        coeffs.set(right, c(1.0)).unwrap();
        let f = HaarCoefficients { mean: Scalar::ZERO, coeffs }.synthesize();
        let p = project_q(&f, left).analyze();
        assert!(p.mean.norm() < 1e-15);
        assert!((p.coeffs.get(left) - c(1.0)).norm() < 1e-14);
        assert!(p.coeffs.get(right).norm() < 1e-14);

        // Q_root f = f minus its mean
        let g = StepFunction::from_leaves(1, vec![c(2.0), c(4.0)]).unwrap();
        let q = project_q(&g, ROOT);
        assert!((q.leaves()[0] - c(-1.0)).norm() < 1e-15);
        assert!((q.leaves()[1] - c(1.0)).norm() < 1e-15);

        // constants project to zero
        let one = StepFunction::constant(2, c(1.0));
        assert!(project_q(&one, left).norm() < 1e-15);
    }

    #[test]
    fn project_q_idempotent_and_self_adjoint() {
        let depth = 4;
        let f = StepFunction::from_leaves(
            depth,
            (0..16).map(|k| Scalar::new((k as f64).cos(), (k as f64).sin())).collect(),
        )
        .unwrap();
        let g = StepFunction::from_leaves(
            depth,
            (0..16).map(|k| Scalar::new((k as f64 * 1.3).sin(), -(k as f64))).collect(),
        )
        .unwrap();
        let i = DyadicIndex::from_path("01").unwrap();
        let qf = project_q(&f, i);
        assert!(project_q(&qf, i).sub(&qf).norm() < 1e-12);
        let lhs = qf.inner(&g);
        let rhs = f.inner(&project_q(&g, i));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn coords_round_trip() {
        let depth = 3;
        let f = StepFunction::from_leaves(
            depth,
            (0..8).map(|k| Scalar::new(k as f64, -(k as f64) * 0.5)).collect(),
        )
        .unwrap();
        let coords = f.to_coords();
        assert_eq!(coords.len(), 8);
        let g = StepFunction::from_coords(depth, &coords);
        assert!(f.sub(&g).norm() < 1e-12);
        // coordinates are orthonormal: ℓ² length equals L² norm
        let l2: f64 = coords.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!((l2 - f.norm()).abs() < 1e-12);
    }
}
