//! The four dyadic paraproducts `P_b^{(alpha,beta)} f = Σ_I b_I ⟨f, h_I^beta⟩ h_I^alpha`,
//! their compositions and exact decomposition identities, the dyadic shift,
//! the multiplier decomposition, and closed-form Gram entries.
//!
//! Conventions fixed here and verified by dense-matrix tests:
//!
//! * Dualization conjugates the symbol: `(P_b^{(a,b)})* = P_{conj(b)}^{(b,a)}`.
//!   Consequently the Gram entries of compositions carry the plain symbol
//!   `b_I` (not its conjugate) in the first slot.
//! * The `beta = 1` pairing reads the true interval average of the input
//!   (mean slot included). Truncation to `[0,1)` then shows up only as
//!   explicit correction operators returned alongside each decomposition,
//!   never silently dropped.

use crate::haar::{HaarCoefficients, StepFunction};
use crate::opnorm::LinearOperator;
use crate::symbol::Symbol;
use crate::tree::{nesting, DyadicIndex, Nesting, Tree};
use crate::{Error, Result, Scalar};

/// The type `(alpha, beta)` of a paraproduct; exponent 0 selects the Haar
/// function `h_I`, exponent 1 the averaging function `h_I^1 = 1_I / |I|`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct ParaproductType {
    pub alpha: u8,
    pub beta: u8,
}

impl ParaproductType {
    pub const ALL: [ParaproductType; 4] = [
        ParaproductType { alpha: 0, beta: 0 },
        ParaproductType { alpha: 0, beta: 1 },
        ParaproductType { alpha: 1, beta: 0 },
        ParaproductType { alpha: 1, beta: 1 },
    ];

    pub fn new(alpha: u8, beta: u8) -> Self {
        assert!(alpha <= 1 && beta <= 1, "paraproduct exponents are 0 or 1");
        Self { alpha, beta }
    }

    /// Type of the adjoint operator (exponents exchanged).
    pub fn swapped(self) -> Self {
        Self { alpha: self.beta, beta: self.alpha }
    }

    pub fn label(self) -> String {
        format!("P^({},{})", self.alpha, self.beta)
    }
}

/// Applies `P_b^{(alpha,beta)}` in `O(N)` via one bottom-up integral pass and
/// one top-down accumulation. Symbol entries at leaf level are ignored (no
/// `h_I` there).
pub fn apply_paraproduct(b: &Symbol, ty: ParaproductType, f: &StepFunction) -> StepFunction {
    let depth = b.depth();
    debug_assert_eq!(depth, f.depth());
    let tree = b.tree();
    let integrals = f.subtree_integrals();

    // input pairings ⟨f, h_I^beta⟩ times the symbol, per Haar node
    let mut coef = vec![Scalar::ZERO; tree.haar_count()];
    for id in 0..tree.haar_count() {
        let bi = b.get_id(id);
        if bi == Scalar::ZERO {
            continue;
        }
        let i = tree.index_of(id);
        let c = match ty.beta {
            0 => (integrals[2 * id + 2] - integrals[2 * id + 1]) / Scalar::from(i.measure().sqrt()),
            _ => integrals[id] / Scalar::from(i.measure()),
        };
        coef[id] = bi * c;
    }

    match ty.alpha {
        0 => {
            let mut coeffs = Symbol::zero(depth);
            for (id, c) in coef.iter().enumerate() {
                coeffs.set_id(id, *c);
            }
            HaarCoefficients { mean: Scalar::ZERO, coeffs }.synthesize()
        }
        _ => {
            // Σ coef_I h_I^1: accumulate coef_I / |I| down the tree
            let mut contrib = vec![Scalar::ZERO; tree.node_count()];
            for (id, c) in coef.iter().enumerate() {
                contrib[id] = c / Scalar::from(tree.index_of(id).measure());
            }
            let acc = tree.ancestor_sums_c(&contrib);
            StepFunction::from_leaves(depth, acc[tree.haar_count()..].to_vec()).expect("leaf count")
        }
    }
}

/// `P_b^{(alpha,beta)}` as a norm-oracle handle; the hand-coded adjoint is
/// `P_{conj(b)}^{(beta,alpha)}`.
pub fn paraproduct_operator(b: &Symbol, ty: ParaproductType) -> LinearOperator {
    let depth = b.depth();
    let b1 = b.clone();
    let b2 = b.conj();
    LinearOperator::on_step_functions_with_adjoint(
        depth,
        format!("{}_b", ty.label()),
        move |f| apply_paraproduct(&b1, ty, f),
        move |f| apply_paraproduct(&b2, ty.swapped(), f),
    )
}

/// Composition `P_b^{(t1)} ∘ P_d^{(t2)}` as an operator handle.
pub fn composition_operator(
    b: &Symbol,
    t1: ParaproductType,
    d: &Symbol,
    t2: ParaproductType,
) -> LinearOperator {
    paraproduct_operator(b, t1).compose(&paraproduct_operator(d, t2))
}

/// Symbol of the reduced composition `P_b^{(alpha,0)} ∘ P_d^{(0,delta)} =
/// P_{b∘d}^{(alpha,delta)}`; the dense-matrix equality is exercised in tests.
pub fn compose_reduce(b: &Symbol, d: &Symbol, _alpha: u8, _delta: u8) -> Result<Symbol> {
    b.schur(d)
}

/// The orthogonal projector onto constants, `f ↦ (∫ f) 1`.
pub fn mean_projector(depth: usize) -> LinearOperator {
    LinearOperator::on_step_functions_with_adjoint(
        depth,
        "mean projector",
        move |f| StepFunction::constant(depth, f.analyze().mean),
        move |f| StepFunction::constant(depth, f.analyze().mean),
    )
}

/// Decomposition of `P_a^{(1,1)}` into lower types plus the explicit
/// correction forced by the rooted truncation.
pub struct PsDecomposition {
    /// Sweep symbol feeding the `(1,0)` and `(0,1)` parts.
    pub sweep_part: Symbol,
    /// Subtree-average symbol feeding the `(0,0)` part (inclusive sums).
    pub e_part: Symbol,
    /// Exact remainder: `P_a^{(1,1)} - P_sweep^{(1,0)} - P_sweep^{(0,1)} - P_e^{(0,0)}`.
    pub correction: LinearOperator,
}

/// Splits `P_a^{(1,1)} = P_{Ŝ(a)}^{(1,0)} + P_{Ŝ(a)}^{(0,1)} + P_{E(a)}^{(0,0)} + R`.
///
/// On `[0,1)` the upward expansion `h_I^1 = Σ_{K ⊋ I} ĥ_I^1(K) h_K + 1`
/// terminates at the root, and with the inclusive averages `E(a)` the exact
/// remainder works out to
/// `R = (Σ_I a_I) (mean projector) - P_m^{(0,0)}` with `m_I = a_I / |I|`:
/// the root term from the expansion plus the diagonal shift between the
/// inclusive and strict subtree sums.
pub fn ps_decompose(a: &Symbol) -> PsDecomposition {
    let depth = a.depth();
    let tree = a.tree();
    let sweep_part = a.sweep();
    let e_part = a.subtree_averages();

    let total: Scalar = (0..tree.haar_count()).map(|id| a.get_id(id)).sum();
    let mut diag = Symbol::zero(depth);
    for id in 0..tree.haar_count() {
        diag.set_id(id, a.get_id(id) / Scalar::from(tree.index_of(id).measure()));
    }
    let correction = mean_projector(depth)
        .scale(total)
        .sub(&paraproduct_operator(&diag, ParaproductType::new(0, 0)));
    PsDecomposition { sweep_part, e_part, correction: relabel(correction, "rooted correction") }
}

fn relabel(op: LinearOperator, label: &str) -> LinearOperator {
    // rebuild with a readable label
    let dim = op.dim();
    let o2 = op.clone();
    let mut out = LinearOperator::new(dim, label, move |x| op.apply(x));
    if o2.has_adjoint() {
        out = out.with_adjoint(move |x| o2.apply_adjoint(x).expect("adjoint"));
    }
    out
}

/// The dyadic shift on Haar coefficients: `h_I ↦ h_{I_-} - h_{I_+}` for
/// `level(I) <= D-2`, zero at the finest Haar level (the children Haar
/// functions do not exist in the truncation) and on the mean slot. The half
/// variant keeps only the `h_{I_-} ⊗ h_I` piece.
pub fn shift_apply(f: &StepFunction, half: bool) -> StepFunction {
    let tree = f.tree();
    let hc = f.analyze();
    let mut out = Symbol::zero(f.depth());
    for id in 0..tree.haar_count() {
        let c = hc.coeffs.get_id(id);
        if c == Scalar::ZERO {
            continue;
        }
        let left = 2 * id + 1;
        let right = 2 * id + 2;
        if left >= tree.haar_count() {
            continue;
        }
        out.set_id(left, out.get_id(left) + c);
        if !half {
            out.set_id(right, out.get_id(right) - c);
        }
    }
    HaarCoefficients { mean: Scalar::ZERO, coeffs: out }.synthesize()
}

/// Adjoint of [`shift_apply`]: `h_J ↦ ±h_{parent(J)}` on non-root Haar nodes.
pub fn shift_adjoint_apply(f: &StepFunction, half: bool) -> StepFunction {
    let tree = f.tree();
    let hc = f.analyze();
    let mut out = Symbol::zero(f.depth());
    for id in 1..tree.haar_count() {
        let c = hc.coeffs.get_id(id);
        if c == Scalar::ZERO {
            continue;
        }
        let parent = (id - 1) / 2;
        let is_left = id == 2 * parent + 1;
        if is_left {
            out.set_id(parent, out.get_id(parent) + c);
        } else if !half {
            out.set_id(parent, out.get_id(parent) - c);
        }
    }
    HaarCoefficients { mean: Scalar::ZERO, coeffs: out }.synthesize()
}

pub fn shift_operator(depth: usize, half: bool) -> LinearOperator {
    LinearOperator::on_step_functions_with_adjoint(
        depth,
        if half { "half shift" } else { "shift" },
        move |f| shift_apply(f, half),
        move |f| shift_adjoint_apply(f, half),
    )
}

/// Pointwise multiplication `M_b f` on leaves.
pub fn pointwise_multiply(b: &StepFunction, f: &StepFunction) -> StepFunction {
    debug_assert_eq!(b.depth(), f.depth());
    let leaves = b.leaves().iter().zip(f.leaves()).map(|(x, y)| x * y).collect();
    StepFunction::from_leaves(f.depth(), leaves).expect("leaf count")
}

pub fn multiplier_operator(b: &StepFunction) -> LinearOperator {
    let depth = b.depth();
    let b1 = b.clone();
    let b2 = StepFunction::from_leaves(depth, b.leaves().iter().map(|v| v.conj()).collect())
        .expect("leaf count");
    LinearOperator::on_step_functions_with_adjoint(
        depth,
        "multiplier",
        move |f| pointwise_multiply(&b1, f),
        move |f| pointwise_multiply(&b2, f),
    )
}

/// Paraproduct pieces of a pointwise multiplier.
pub struct MultiplierDecomposition {
    /// Haar coefficients of the multiplier (feeds the `(0,1)` part).
    pub p01: Symbol,
    /// Same symbol for the `(1,0)` part.
    pub p10: Symbol,
    /// Interval averages of the multiplier (feeds the `(0,0)` part).
    pub p00: Symbol,
    /// Rank-one root remainder `f ↦ ⟨b⟩_root (∫ f) 1`.
    pub remainder: LinearOperator,
}

/// Splits `M_b = P_{b̂}^{(0,1)} + P_{b̂}^{(1,0)} + P_{⟨b⟩}^{(0,0)} + ⟨b⟩_root E_0`
/// exactly on the truncated space. The multiplier must be strictly positive
/// on leaves (it models `w^{±1/2}`).
pub fn mult_decompose(w_half: &StepFunction) -> Result<MultiplierDecomposition> {
    for (k, v) in w_half.leaves().iter().enumerate() {
        if v.im != 0.0 || v.re <= 0.0 {
            return Err(Error::NonpositiveLeaf { index: k, value: v.re });
        }
    }
    let depth = w_half.depth();
    let tree = w_half.tree();
    let hc = w_half.analyze();
    let integrals = w_half.subtree_integrals();
    let mut averages = Symbol::zero(depth);
    for (id, integral) in integrals.iter().enumerate().take(tree.haar_count()) {
        averages.set_id(id, integral / Scalar::from(tree.index_of(id).measure()));
    }
    let remainder = relabel(mean_projector(depth).scale(hc.mean), "root remainder");
    Ok(MultiplierDecomposition { p01: hc.coeffs.clone(), p10: hc.coeffs, p00: averages, remainder })
}

/// The two composition families with closed-form Gram matrices.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CompositionKind {
    /// Type `(0,1,1,0)`: `P_b^{(0,1)} ∘ P_d^{(1,0)}`, positive kernel
    /// `|I ∩ J| / (|I| |J|)`.
    Positive,
    /// Type `(0,1,0,0)`: `P_b^{(0,1)} ∘ P_d^{(0,0)}`, signed kernel
    /// `ĥ_I^1(J)`-style.
    Singular,
}

impl CompositionKind {
    /// The composed operator on step functions.
    pub fn operator(self, b: &Symbol, d: &Symbol) -> LinearOperator {
        match self {
            CompositionKind::Positive => composition_operator(
                b,
                ParaproductType::new(0, 1),
                d,
                ParaproductType::new(1, 0),
            ),
            CompositionKind::Singular => composition_operator(
                b,
                ParaproductType::new(0, 1),
                d,
                ParaproductType::new(0, 0),
            ),
        }
    }
}

/// Closed-form Gram entry `⟨(composition) h_J, h_I⟩` in the Haar basis.
/// Both indices must be Haar-level nodes.
///
/// * `Positive`: `b_I d_J / |I|` if `J ⊆ I`, `b_I d_J / |J|` if `I ⊆ J`,
///   `0` when disjoint.
/// * `Singular`: `∓ b_I d_J / sqrt(|J|)` for `I ⊆ J_∓`, `0` when `J ⊆ I`
///   or disjoint.
pub fn gram_entry(
    b: &Symbol,
    d: &Symbol,
    kind: CompositionKind,
    i: DyadicIndex,
    j: DyadicIndex,
) -> Scalar {
    let bi = b.get(i);
    let dj = d.get(j);
    match kind {
        CompositionKind::Positive => match nesting(j, i) {
            Nesting::Equal | Nesting::InsideLeft | Nesting::InsideRight => {
                bi * dj / Scalar::from(i.measure())
            }
            Nesting::Contains => bi * dj / Scalar::from(j.measure()),
            Nesting::Disjoint => Scalar::ZERO,
        },
        CompositionKind::Singular => match nesting(i, j) {
            Nesting::InsideLeft => -bi * dj / Scalar::from(j.measure().sqrt()),
            Nesting::InsideRight => bi * dj / Scalar::from(j.measure().sqrt()),
            _ => Scalar::ZERO,
        },
    }
}

/// Dense Gram matrix of the closed form, indexed by Haar nodes in heap order.
pub fn gram_matrix(b: &Symbol, d: &Symbol, kind: CompositionKind) -> nalgebra::DMatrix<Scalar> {
    let tree = b.tree();
    let n = tree.haar_count();
    nalgebra::DMatrix::from_fn(n, n, |i, j| {
        gram_entry(b, d, kind, tree.index_of(i), tree.index_of(j))
    })
}

/// `⟨op h_J, h_I⟩` computed through the operator itself (oracle side of the
/// Gram closed forms).
pub fn operator_pairing(
    op: &LinearOperator,
    depth: usize,
    i: DyadicIndex,
    j: DyadicIndex,
) -> Scalar {
    let tree = Tree::new(depth).expect("valid depth");
    let mut coords = vec![Scalar::ZERO; 1 << depth];
    coords[1 + tree.node_id(j)] = Scalar::ONE;
    let out = op.apply(&coords);
    out[1 + tree.node_id(i)]
}
