//! Operator-norm oracles.
//!
//! [`LinearOperator`] is a uniform handle for norm estimation and dense
//! materialization: an apply callback on orthonormal coordinates plus an
//! optional hand-coded adjoint. The dense path materializes the matrix and
//! extracts the largest singular value; the power path iterates `T*T`
//! matrix-free with seeded random restarts.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::haar::StepFunction;
use crate::{Error, Result, Scalar};

type ApplyFn = Arc<dyn Fn(&[Scalar]) -> Vec<Scalar> + Send + Sync>;

/// Default ceiling on the dimension of densely materialized operators.
pub const DENSE_CEILING: usize = 4096;

/// Seed for the power-iteration restart streams.
pub const POWER_SEED: u64 = 0x0dd5_c0de;

/// A linear map on `C^dim` given by callbacks; coordinates are understood to
/// be orthonormal for the space the operator acts on.
#[derive(Clone)]
pub struct LinearOperator {
    dim: usize,
    label: String,
    apply: ApplyFn,
    adjoint: Option<ApplyFn>,
}

impl std::fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearOperator")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("has_adjoint", &self.adjoint.is_some())
            .finish()
    }
}

impl LinearOperator {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        apply: impl Fn(&[Scalar]) -> Vec<Scalar> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, label: label.into(), apply: Arc::new(apply), adjoint: None }
    }

    pub fn with_adjoint(
        mut self,
        adjoint: impl Fn(&[Scalar]) -> Vec<Scalar> + Send + Sync + 'static,
    ) -> Self {
        self.adjoint = Some(Arc::new(adjoint));
        self
    }

    /// Wraps a map on step functions; coordinates are `[mean, Haar coeffs]`.
    pub fn on_step_functions(
        depth: usize,
        label: impl Into<String>,
        f: impl Fn(&StepFunction) -> StepFunction + Send + Sync + 'static,
    ) -> Self {
        Self::new(1 << depth, label, move |x| {
            f(&StepFunction::from_coords(depth, x)).to_coords()
        })
    }

    pub fn on_step_functions_with_adjoint(
        depth: usize,
        label: impl Into<String>,
        f: impl Fn(&StepFunction) -> StepFunction + Send + Sync + 'static,
        fa: impl Fn(&StepFunction) -> StepFunction + Send + Sync + 'static,
    ) -> Self {
        Self::on_step_functions(depth, label, f).with_adjoint(move |x| {
            fa(&StepFunction::from_coords(depth, x)).to_coords()
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, "identity", |x| x.to_vec()).with_adjoint(|x| x.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_adjoint(&self) -> bool {
        self.adjoint.is_some()
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        debug_assert_eq!(x.len(), self.dim);
        (self.apply)(x)
    }

    pub fn apply_adjoint(&self, x: &[Scalar]) -> Option<Vec<Scalar>> {
        self.adjoint.as_ref().map(|a| a(x))
    }

    /// `self ∘ other` (apply `other` first). Adjoint composes in reverse.
    pub fn compose(&self, other: &LinearOperator) -> LinearOperator {
        assert_eq!(self.dim, other.dim);
        let (f, g) = (self.apply.clone(), other.apply.clone());
        let label = format!("{} . {}", self.label, other.label);
        let mut out = LinearOperator::new(self.dim, label, move |x| f(&g(x)));
        if let (Some(fa), Some(ga)) = (self.adjoint.clone(), other.adjoint.clone()) {
            out.adjoint = Some(Arc::new(move |x| ga(&fa(x))));
        }
        out
    }

    /// Pointwise sum of operators on the same space.
    pub fn sum(ops: Vec<LinearOperator>, label: impl Into<String>) -> LinearOperator {
        assert!(!ops.is_empty());
        let dim = ops[0].dim;
        assert!(ops.iter().all(|o| o.dim == dim));
        let all_adjoints = ops.iter().all(|o| o.adjoint.is_some());
        let applies: Vec<ApplyFn> = ops.iter().map(|o| o.apply.clone()).collect();
        let adjoints: Vec<ApplyFn> =
            if all_adjoints { ops.iter().map(|o| o.adjoint.clone().unwrap()).collect() } else { vec![] };
        let add = move |fs: &[ApplyFn], x: &[Scalar]| {
            let mut acc = vec![Scalar::ZERO; x.len()];
            for f in fs {
                for (a, v) in acc.iter_mut().zip(f(x)) {
                    *a += v;
                }
            }
            acc
        };
        let mut out = LinearOperator::new(dim, label, move |x| add(&applies, x));
        if all_adjoints {
            let add = move |fs: &[ApplyFn], x: &[Scalar]| {
                let mut acc = vec![Scalar::ZERO; x.len()];
                for f in fs {
                    for (a, v) in acc.iter_mut().zip(f(x)) {
                        *a += v;
                    }
                }
                acc
            };
            out.adjoint = Some(Arc::new(move |x| add(&adjoints, x)));
        }
        out
    }

    pub fn scale(&self, c: Scalar) -> LinearOperator {
        let f = self.apply.clone();
        let label = format!("{c} * {}", self.label);
        let mut out = LinearOperator::new(self.dim, label, move |x| {
            f(x).into_iter().map(|v| v * c).collect()
        });
        if let Some(fa) = self.adjoint.clone() {
            let cc = c.conj();
            out.adjoint = Some(Arc::new(move |x| fa(x).into_iter().map(|v| v * cc).collect()));
        }
        out
    }

    pub fn sub(&self, other: &LinearOperator) -> LinearOperator {
        LinearOperator::sum(
            vec![self.clone(), other.scale(Scalar::from(-1.0))],
            format!("{} - {}", self.label, other.label),
        )
    }

    pub fn from_matrix(m: DMatrix<Scalar>) -> LinearOperator {
        assert_eq!(m.nrows(), m.ncols());
        let dim = m.nrows();
        let mh = m.adjoint();
        let matvec = move |m: &DMatrix<Scalar>, x: &[Scalar]| {
            (m * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec()
        };
        let m2 = m.clone();
        LinearOperator::new(dim, "matrix", move |x| matvec(&m2, x))
            .with_adjoint(move |x| matvec(&mh, x))
    }
}

/// How a norm estimate was produced.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NormMethod {
    Dense,
    Power,
}

/// Result of a norm computation. `residual` is the final relative change of
/// the power iteration (0 on the dense path); `converged` is false when the
/// iteration cap was reached first.
#[derive(Clone, Copy, Debug)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Materializes `op` as a dense matrix, column `k` = `op` applied to the
/// `k`-th basis vector.
pub fn dense_materialize(op: &LinearOperator) -> Result<DMatrix<Scalar>> {
    dense_materialize_with_ceiling(op, DENSE_CEILING)
}

pub fn dense_materialize_with_ceiling(op: &LinearOperator, ceiling: usize) -> Result<DMatrix<Scalar>> {
    let n = op.dim();
    if n > ceiling {
        return Err(Error::DenseCeiling { dim: n, ceiling });
    }
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![Scalar::ZERO; n];
    for k in 0..n {
        e[k] = Scalar::ONE;
        let col = op.apply(&e);
        e[k] = Scalar::ZERO;
        for (i, v) in col.into_iter().enumerate() {
            m[(i, k)] = v;
        }
    }
    Ok(m)
}

/// Largest singular value of a complex matrix, through the symmetric
/// eigenproblem of the realified Gram matrix `R^T R`.
pub fn matrix_norm(m: &DMatrix<Scalar>) -> f64 {
    let r = realify(m);
    let gram = r.transpose() * &r;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(0.0f64, f64::max).max(0.0).sqrt()
}

/// Real `2n x 2n` image of a complex `n x n` matrix; it has the same singular
/// values (each doubled in multiplicity).
pub fn realify(m: &DMatrix<Scalar>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            r[(i, j)] = v.re;
            r[(i, j + n)] = -v.im;
            r[(i + n, j)] = v.im;
            r[(i + n, j + n)] = v.re;
        }
    }
    r
}

/// Operator norm with automatic method choice: dense up to the ceiling,
/// matrix-free power iteration beyond it.
pub fn operator_norm(op: &LinearOperator, tol: f64) -> Result<NormEstimate> {
    assert!(tol > 0.0);
    if op.dim() <= DENSE_CEILING {
        operator_norm_dense(op)
    } else {
        Ok(operator_norm_power(op, tol, POWER_SEED))
    }
}

pub fn operator_norm_dense(op: &LinearOperator) -> Result<NormEstimate> {
    let m = dense_materialize(op)?;
    Ok(NormEstimate {
        value: matrix_norm(&m),
        method: NormMethod::Dense,
        iterations: 0,
        residual: 0.0,
        converged: true,
    })
}

const POWER_RESTARTS: u64 = 5;
const POWER_MAX_ITERS: usize = 2000;

/// Power iteration on `T*T` with `POWER_RESTARTS` seeded restarts, reporting
/// the maximum. The adjoint is the hand-coded one when present, otherwise a
/// dense conjugate transpose (requires `dim` within the dense ceiling).
pub fn operator_norm_power(op: &LinearOperator, tol: f64, seed: u64) -> NormEstimate {
    assert!(tol > 0.0);
    let dense_adjoint = if op.has_adjoint() {
        None
    } else {
        let m = dense_materialize(op).expect("power iteration needs an adjoint or a dense fallback");
        Some(m.adjoint())
    };
    let apply_adjoint = |x: &[Scalar]| -> Vec<Scalar> {
        match (&dense_adjoint, op.apply_adjoint(x)) {
            (_, Some(v)) => v,
            (Some(mh), None) => (mh * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec(),
            (None, None) => unreachable!(),
        }
    };

    let mut best = 0.0f64;
    let mut total_iters = 0;
    let mut worst_residual = 0.0f64;
    let mut all_converged = true;
    for restart in 0..POWER_RESTARTS {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(restart + 1);
        let mut x: Vec<Scalar> = (0..op.dim())
            .map(|_| Scalar::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        normalize(&mut x);
        let mut sigma = 0.0f64;
        let mut residual = f64::INFINITY;
        let mut converged = false;
        for it in 0..POWER_MAX_ITERS {
            total_iters = it + 1;
            let y = op.apply(&x);
            let next = norm2(&y);
            let mut z = apply_adjoint(&y);
            residual = (next - sigma).abs() / next.max(f64::MIN_POSITIVE);
            sigma = next;
            if sigma == 0.0 {
                converged = true;
                residual = 0.0;
                break;
            }
            if residual < tol {
                converged = true;
                break;
            }
            normalize(&mut z);
            x = z;
        }
        if !converged {
            all_converged = false;
        }
        worst_residual = worst_residual.max(residual.min(1.0));
        best = best.max(sigma);
    }
    NormEstimate {
        value: best,
        method: NormMethod::Power,
        iterations: total_iters,
        residual: worst_residual,
        converged: all_converged,
    }
}

fn norm2(x: &[Scalar]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [Scalar]) {
    let n = norm2(x);
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= Scalar::from(n);
        }
    }
}

/// Row-major CSV with `"re,im"` cells (RFC 4180 quoting).
pub fn matrix_to_csv(m: &DMatrix<Scalar>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> =
            (0..m.ncols()).map(|j| format!("\"{},{}\"", m[(i, j)].re, m[(i, j)].im)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Max entrywise modulus of the difference of two dense matrices.
pub fn max_abs_diff(a: &DMatrix<Scalar>, b: &DMatrix<Scalar>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
