//! The exact-identity suite: every algebraic identity the library promises
//! to machine precision, executed on random data and reported as residuals.

use anyhow::{ensure, Result};
use dyadic::opnorm::{dense_materialize, max_abs_diff, LinearOperator};
use dyadic::paraproduct::{
    composition_operator, gram_matrix, mult_decompose, multiplier_operator, paraproduct_operator,
    ps_decompose, CompositionKind, ParaproductType,
};
use dyadic::transplant::build_transplant;
use dyadic::tree::Tree;
use dyadic::Scalar;

use crate::config::ExperimentConfig;
use crate::ensemble::{random_positive_weight, random_symbol_with, trial_rng};
use crate::report::ReportRecord;

/// Number of records one trial contributes.
pub const IDENTITY_CHECKS_PER_TRIAL: usize = 12;

/// Runs every exact identity at `cfg.depth <= 6`; a record passes when its
/// residual is at most `cfg.tolerance`.
pub fn run_identity_suite(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    cfg.validate()?;
    ensure!(cfg.depth <= 6, "identity suite uses dense oracles; depth {} > 6", cfg.depth);
    let mut records = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial);
        let b = random_symbol_with(cfg.symbol_kind, cfg.depth, &mut rng);
        let d = random_symbol_with(cfg.symbol_kind, cfg.depth, &mut rng);
        let a = random_symbol_with(cfg.symbol_kind, cfg.depth, &mut rng);
        let mu = random_positive_weight(cfg.depth, &mut rng, 0.25);
        let nu = random_positive_weight(cfg.depth, &mut rng, 0.25);

        let mut push = |name: &str, residual: f64, extra: &[(&str, f64)]| {
            let mut rec = ReportRecord::new(name, trial)
                .with("residual", residual)
                .passing(residual <= cfg.tolerance);
            for (k, v) in extra {
                rec = rec.with(k, *v);
            }
            records.push(rec);
        };

        // composition reduction, all four (alpha, 0, 0, delta) types
        let bd = b.schur(&d)?;
        for (alpha, delta) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            let composed = composition_operator(
                &b,
                ParaproductType::new(alpha, 0),
                &d,
                ParaproductType::new(0, delta),
            );
            let reduced = paraproduct_operator(&bd, ParaproductType::new(alpha, delta));
            let residual = max_abs_diff(
                &dense_materialize(&composed)?,
                &dense_materialize(&reduced)?,
            );
            push(&format!("comp_reduce_{alpha}{delta}"), residual, &[]);
        }

        // Pott-Smith split with its rooted correction
        let parts = ps_decompose(&a);
        let reassembled = LinearOperator::sum(
            vec![
                paraproduct_operator(&parts.sweep_part, ParaproductType::new(1, 0)),
                paraproduct_operator(&parts.sweep_part, ParaproductType::new(0, 1)),
                paraproduct_operator(&parts.e_part, ParaproductType::new(0, 0)),
                parts.correction,
            ],
            "ps sum",
        );
        let residual = max_abs_diff(
            &dense_materialize(&paraproduct_operator(&a, ParaproductType::new(1, 1)))?,
            &dense_materialize(&reassembled)?,
        );
        push("ps_decomposition", residual, &[]);

        // multiplier decomposition with its root remainder
        let w_leaves: Vec<Scalar> =
            (0..1usize << cfg.depth).map(|_| Scalar::from(0.5 + rng_abs(&mut rng))).collect();
        let w = dyadic::haar::StepFunction::from_leaves(cfg.depth, w_leaves)?;
        let parts = mult_decompose(&w)?;
        let sum = LinearOperator::sum(
            vec![
                paraproduct_operator(&parts.p01, ParaproductType::new(0, 1)),
                paraproduct_operator(&parts.p10, ParaproductType::new(1, 0)),
                paraproduct_operator(&parts.p00, ParaproductType::new(0, 0)),
                parts.remainder,
            ],
            "mult sum",
        );
        let residual = max_abs_diff(
            &dense_materialize(&multiplier_operator(&w))?,
            &dense_materialize(&sum)?,
        );
        push("multiplier_decomposition", residual, &[]);

        // closed-form Gram entries against operator pairings
        let tree = Tree::new(cfg.depth)?;
        for (kind, name) in [
            (CompositionKind::Positive, "gram_pairing_positive"),
            (CompositionKind::Singular, "gram_pairing_singular"),
        ] {
            let dense = dense_materialize(&kind.operator(&b, &d))?;
            let gram = gram_matrix(&b, &d, kind);
            let mut residual = 0.0f64;
            for i in 0..tree.haar_count() {
                for j in 0..tree.haar_count() {
                    residual = residual.max((dense[(1 + i, 1 + j)] - gram[(i, j)]).norm());
                }
                // output is mean free and constants are annihilated
                residual = residual.max(dense[(0, 1 + i)].norm());
            }
            residual = residual.max(dense[(0, 0)].norm());
            push(name, residual, &[]);
        }

        // transplanted Gram matrices match with one uniform constant
        let t = dense_materialize(&build_transplant(CompositionKind::Positive, &b, &d))?;
        let gram = gram_matrix(&b, &d, CompositionKind::Positive);
        let mut residual = 0.0f64;
        let mut constant = f64::NAN;
        for i in tree.haar_nodes() {
            for j in tree.haar_nodes() {
                let (r, c) = (tree.node_id(i), tree.node_id(j));
                if j.is_contained_in(&i) {
                    if constant.is_nan() && gram[(r, c)].norm() > 1e-6 {
                        constant = (t[(r, c)] / gram[(r, c)]).re;
                    }
                    if !constant.is_nan() {
                        residual = residual
                            .max((t[(r, c)] - gram[(r, c)] * Scalar::from(constant)).norm());
                    }
                } else {
                    residual = residual.max(t[(r, c)].norm());
                }
            }
        }
        push("transplant_gram_positive", residual, &[("constant", constant)]);

        let t = dense_materialize(&build_transplant(CompositionKind::Singular, &b, &d))?;
        let gram = gram_matrix(&b, &d, CompositionKind::Singular);
        let mut residual = 0.0f64;
        let mut constant = f64::NAN;
        for i in tree.haar_nodes() {
            for j in tree.haar_nodes() {
                let (r, c) = (tree.node_id(i), tree.node_id(j));
                if constant.is_nan() && gram[(r, c)].norm() > 1e-6 {
                    constant = (t[(r, c)] / gram[(r, c)]).re;
                }
                if !constant.is_nan() {
                    residual =
                        residual.max((t[(r, c)] - gram[(r, c)] * Scalar::from(constant)).norm());
                }
            }
        }
        push("transplant_gram_singular", residual, &[("constant", constant)]);

        // weighted-basis B block vanishes identically
        let ntv = dyadic::transplant::ntv_verify(&mu, &nu);
        let diag = ntv.diagnostics.expect("positive weights");
        push("ntv_b_block", diag.b_block_max, &[("a_block_max", diag.a_block_max)]);

        // adjoints exchange exponents and conjugate the symbol
        let mut residual = 0.0f64;
        for ty in ParaproductType::ALL {
            let direct = dense_materialize(&paraproduct_operator(&b, ty))?;
            let swapped = dense_materialize(&paraproduct_operator(&b.conj(), ty.swapped()))?;
            residual = residual.max(max_abs_diff(&direct.adjoint(), &swapped));
        }
        push("adjoint_convention", residual, &[]);
    }
    Ok(records)
}

fn rng_abs(rng: &mut rand_chacha::ChaCha12Rng) -> f64 {
    use rand::Rng;
    rng.random::<f64>()
}

/// Identity checks never need symbols beyond the configured kind; used by
/// tests that count records.
pub fn expected_record_count(cfg: &ExperimentConfig) -> usize {
    cfg.trials as usize * IDENTITY_CHECKS_PER_TRIAL
}
