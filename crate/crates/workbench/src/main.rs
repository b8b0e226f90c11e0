//! Command-line driver. Experiments are configured by a flat JSON file
//! (`--config`) with individual flags taking precedence; the process exits 0
//! exactly when every record passes.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use workbench::config::{ExperimentConfig, SymbolKind};
use workbench::report::{self, ReportFormat, ReportRecord};
use workbench::suites::{a2, bases, equivalence, identities, tree_testing};

#[derive(Parser)]
#[command(
    name = "workbench",
    about = "Numerical workbench for dyadic Haar paraproducts: identity suites, norm-equivalence experiments, and the A2 weight scan"
)]
struct Cli {
    /// Flat JSON config file; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    depth: Option<usize>,

    #[arg(long, global = true)]
    trials: Option<u64>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Symbol ensemble: gaussian, sparse, lacunary, carleson_normalized.
    #[arg(long, global = true)]
    kind: Option<SymbolKind>,

    #[arg(long, global = true)]
    tolerance: Option<f64>,

    #[arg(long, global = true)]
    ceiling: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct EmitArgs {
    /// Write the records to this path.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format: csv or jsonl.
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact-identity suite (composition reduction, decompositions,
    /// Gram matchings, adjoint conventions).
    Identities {
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Run one randomized norm-equivalence experiment.
    Equivalence {
        /// Which statement to test: t1, t2, t3, t4, c6, p7.
        #[arg(long)]
        theorem: equivalence::Theorem,
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Tree two-weight testing constants against the brute-force norm.
    TreeTesting {
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Weighted-basis testing for the signed U operator between two
    /// tile-constant measures.
    T1Bases {
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Scan the conjugated dyadic shift across power weights x^alpha.
    A2Scan {
        /// Comma-separated exponents in (-1, 1).
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "-0.9,-0.5,0,0.5,0.9"
        )]
        alphas: Vec<f64>,
        /// Conjugate the full shift instead of its default half.
        #[arg(long)]
        full_shift: bool,
        #[command(flatten)]
        emit: EmitArgs,
    },
    /// Run every dense-oracle suite with the current config and write the
    /// combined records (the A2 scan has its own subcommand).
    Emit {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(depth) = cli.depth {
        cfg.depth = depth;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(kind) = cli.kind {
        cfg.symbol_kind = kind;
    }
    if let Some(tolerance) = cli.tolerance {
        cfg.tolerance = tolerance;
    }
    if let Some(ceiling) = cli.ceiling {
        cfg.ceiling = ceiling;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summarize(records: &[ReportRecord]) -> bool {
    let mut pass = 0usize;
    for r in records {
        if r.pass {
            pass += 1;
        } else {
            let details: Vec<String> =
                r.constants.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
            println!("FAIL {} trial {}: {}", r.experiment, r.trial, details.join(" "));
        }
    }
    println!("{pass}/{} records pass", records.len());
    pass == records.len()
}

fn run_full_suite(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let mut records = identities::run_identity_suite(cfg)?;
    for theorem in equivalence::Theorem::ALL {
        records.extend(equivalence::run_equivalence(theorem, cfg)?);
    }
    records.extend(tree_testing::run_tree_testing(cfg)?);
    let mut bases_cfg = *cfg;
    bases_cfg.depth = cfg.depth.min(7);
    records.extend(bases::run_ntv_suite(&bases_cfg)?);
    Ok(records)
}

fn main() -> ExitCode {
    match run() {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let cfg = effective_config(&cli)?;
    let (records, emit) = match &cli.command {
        Command::Identities { emit } => (identities::run_identity_suite(&cfg)?, Some(emit)),
        Command::Equivalence { theorem, emit } => {
            (equivalence::run_equivalence(*theorem, &cfg)?, Some(emit))
        }
        Command::TreeTesting { emit } => (tree_testing::run_tree_testing(&cfg)?, Some(emit)),
        Command::T1Bases { emit } => (bases::run_ntv_suite(&cfg)?, Some(emit)),
        Command::A2Scan { alphas, full_shift, emit } => {
            let out = a2::a2_scan(alphas, &cfg, *full_shift)?;
            if let Some(p) = out.exponent {
                println!("fitted exponent: {p:.4}");
            }
            (out.records, Some(emit))
        }
        Command::Emit { out, format } => {
            let records = run_full_suite(&cfg)?;
            report::emit(&records, *format, out)
                .with_context(|| format!("emitting {}", out.display()))?;
            println!("wrote {} records to {}", records.len(), out.display());
            (records, None)
        }
    };
    if let Some(emit_args) = emit {
        if let Some(path) = &emit_args.out {
            report::emit(&records, emit_args.format, path)?;
            println!("wrote {} records to {}", records.len(), path.display());
        }
    }
    Ok(summarize(&records))
}
