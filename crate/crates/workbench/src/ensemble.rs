//! Seeded random ensembles. Each trial owns an independent ChaCha stream
//! derived from `(seed, trial)`, so drawing order inside a trial never leaks
//! across trials.

use dyadic::symbol::Symbol;
use dyadic::transplant::TreeWeight;
use dyadic::tree::Tree;
use dyadic::Scalar;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{ExperimentConfig, SymbolKind};

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}

fn normal(rng: &mut ChaCha12Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_normal(rng: &mut ChaCha12Rng) -> Scalar {
    Scalar::new(normal(rng), normal(rng))
}

/// Draws one symbol of the configured kind; deterministic in `(seed, trial)`.
pub fn random_symbol(cfg: &ExperimentConfig, trial: u64) -> Symbol {
    let mut rng = trial_rng(cfg.seed, trial);
    random_symbol_with(cfg.symbol_kind, cfg.depth, &mut rng)
}

pub fn random_symbol_with(kind: SymbolKind, depth: usize, rng: &mut ChaCha12Rng) -> Symbol {
    let tree = Tree::new(depth).expect("valid depth");
    let mut s = Symbol::zero(depth);
    match kind {
        SymbolKind::Gaussian => {
            for i in tree.haar_nodes() {
                s.set(i, complex_normal(rng)).unwrap();
            }
        }
        SymbolKind::Sparse => {
            let k = tree.node_count() / 8;
            let k = k.min(tree.haar_count());
            let picks = sample(rng, tree.haar_count(), k);
            // sample order is deterministic but unsorted; draw values in
            // index order to keep the stream stable
            let mut ids: Vec<usize> = picks.into_iter().collect();
            ids.sort_unstable();
            for id in ids {
                s.set(tree.index_of(id), complex_normal(rng)).unwrap();
            }
        }
        SymbolKind::Lacunary => {
            for level in 0..depth {
                let offset = rng.random_range(0..(1u64 << level));
                s.set(dyadic::tree::DyadicIndex::new(level, offset), complex_normal(rng)).unwrap();
            }
        }
        SymbolKind::CarlesonNormalized => {
            for i in tree.haar_nodes() {
                s.set(i, complex_normal(rng)).unwrap();
            }
            let cm = s.cm_norm();
            if cm > 0.0 {
                s = s.scale(Scalar::from(1.0 / cm));
            }
        }
    }
    s
}

/// Nonnegative real symbol `a_I = g_I^2`, `g` standard normal.
pub fn random_nonnegative_symbol(depth: usize, rng: &mut ChaCha12Rng) -> Symbol {
    let tree = Tree::new(depth).expect("valid depth");
    let mut s = Symbol::zero(depth);
    for i in tree.haar_nodes() {
        let g = normal(rng);
        s.set(i, Scalar::from(g * g)).unwrap();
    }
    s
}

/// Uniform `[0,1)` weight with a fraction of entries zeroed out.
pub fn random_weight(depth: usize, rng: &mut ChaCha12Rng, zero_fraction: f64) -> TreeWeight {
    let tree = Tree::new(depth).expect("valid depth");
    let mut w = TreeWeight::zero(depth);
    for i in tree.nodes() {
        let v = if rng.random::<f64>() < zero_fraction { 0.0 } else { rng.random::<f64>() };
        w.set(i, v).unwrap();
    }
    w
}

/// Weight bounded away from zero, `floor + [0,1)`.
pub fn random_positive_weight(depth: usize, rng: &mut ChaCha12Rng, floor: f64) -> TreeWeight {
    let tree = Tree::new(depth).expect("valid depth");
    let mut w = TreeWeight::zero(depth);
    for i in tree.nodes() {
        w.set(i, floor + rng.random::<f64>()).unwrap();
    }
    w
}
