//! Weighted-basis experiments for the signed `U` operator between two
//! tile-constant measures: forward/backward testing constants against the
//! brute-force norm, with the weighted-basis block diagnostics.

use anyhow::{ensure, Result};
use dyadic::transplant::ntv_verify;

use crate::config::ExperimentConfig;
use crate::ensemble::{random_positive_weight, trial_rng};
use crate::report::ReportRecord;

/// Reported-ratio ceiling for `norm / (c1 + c2)`.
pub const BASIS_RATIO_CEILING: f64 = 50.0;

/// Testing constants are exact restrictions of the norm; the slack covers
/// the two floating-point routes.
pub const BASIS_NECESSITY_SLACK: f64 = 1e-6;

/// Weights are drawn bounded away from zero: the weighted Haar basis divides
/// by child square masses.
pub const WEIGHT_FLOOR: f64 = 0.25;

pub fn run_ntv_suite(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    cfg.validate()?;
    ensure!(cfg.depth <= 7, "weighted-basis suite uses a dense oracle; depth {} > 7", cfg.depth);
    let mut records = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial);
        let mu = random_positive_weight(cfg.depth, &mut rng, WEIGHT_FLOOR);
        let nu = random_positive_weight(cfg.depth, &mut rng, WEIGHT_FLOOR);
        let out = ntv_verify(&mu, &nu);
        let r = out.report;
        let diag = out.diagnostics.expect("weights are strictly positive");
        let bound = r.brute_norm * (1.0 + BASIS_NECESSITY_SLACK);
        records.push(
            ReportRecord::new("t1-bases", trial)
                .with("c1", r.c1)
                .with("c2", r.c2)
                .with("norm", r.brute_norm)
                .with("ratio_upper", r.ratio_upper)
                .with("b_block_max", diag.b_block_max)
                .with("a_block_max", diag.a_block_max)
                .with("c_block_max", diag.c_block_max)
                .passing(r.c1 <= bound && r.c2 <= bound)
                .passing(diag.b_block_max == 0.0)
                .passing(r.ratio_upper <= BASIS_RATIO_CEILING),
        );
    }
    Ok(records)
}
