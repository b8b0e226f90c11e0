//! JSON wire formats.
//!
//! * `StepFunction`: `{"depth": D, "leaves": [[re, im], ...]}` in
//!   left-to-right leaf order.
//! * `Symbol`: `{"depth": D, "entries": [{"path": "01", "re": x, "im": y}]}`.
//! * `TreeWeight`: `{"depth": D, "entries": [{"path": "01", "value": v}]}`.
//!
//! Parsers validate depth bounds, path alphabets, duplicate entries, leaf
//! counts, and finiteness; weights must be nonnegative. Parsing is total on
//! arbitrary bytes (errors, never panics), which the fuzz targets lean on.

use serde::{Deserialize, Serialize};

use crate::haar::StepFunction;
use crate::symbol::Symbol;
use crate::transplant::TreeWeight;
use crate::tree::DyadicIndex;
use crate::{Error, Result, Scalar};

/// Parse-side cap on the depth field: deeper trees allocate 2^(D+1) nodes,
/// which untrusted input must not be able to request.
pub const MAX_IO_DEPTH: usize = 20;

#[derive(Serialize, Deserialize)]
struct StepFunctionJson {
    depth: usize,
    leaves: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct SymbolEntryJson {
    path: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    depth: usize,
    entries: Vec<SymbolEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct WeightEntryJson {
    path: String,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct TreeWeightJson {
    depth: usize,
    entries: Vec<WeightEntryJson>,
}

fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 || depth > MAX_IO_DEPTH {
        return Err(Error::BadDepth { depth, max: MAX_IO_DEPTH });
    }
    Ok(())
}

pub fn step_function_to_json(f: &StepFunction) -> String {
    let doc = StepFunctionJson {
        depth: f.depth(),
        leaves: f.leaves().iter().map(|v| [v.re, v.im]).collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn step_function_from_json(text: &str) -> Result<StepFunction> {
    let doc: StepFunctionJson = serde_json::from_str(text)?;
    check_depth(doc.depth)?;
    if doc.leaves.len() != 1 << doc.depth {
        return Err(Error::LeafCountMismatch { len: doc.leaves.len(), expected: 1 << doc.depth });
    }
    for v in &doc.leaves {
        if !v[0].is_finite() || !v[1].is_finite() {
            return Err(Error::NonFinite);
        }
    }
    StepFunction::from_leaves(doc.depth, doc.leaves.iter().map(|v| Scalar::new(v[0], v[1])).collect())
}

pub fn symbol_to_json(s: &Symbol) -> String {
    let doc = SymbolJson {
        depth: s.depth(),
        entries: s
            .entries()
            .into_iter()
            .map(|(i, v)| SymbolEntryJson { path: i.path(), re: v.re, im: v.im })
            .collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn symbol_from_json(text: &str) -> Result<Symbol> {
    let doc: SymbolJson = serde_json::from_str(text)?;
    check_depth(doc.depth)?;
    let mut entries = Vec::with_capacity(doc.entries.len());
    for e in &doc.entries {
        if !e.re.is_finite() || !e.im.is_finite() {
            return Err(Error::NonFinite);
        }
        let i = DyadicIndex::from_path(&e.path)?;
        if i.level() > doc.depth {
            return Err(Error::PathTooDeep { len: i.level(), depth: doc.depth });
        }
        entries.push((i, Scalar::new(e.re, e.im)));
    }
    Symbol::from_entries(doc.depth, &entries)
}

pub fn tree_weight_to_json(w: &TreeWeight) -> String {
    let tree = w.tree();
    let doc = TreeWeightJson {
        depth: w.depth(),
        entries: (0..tree.node_count())
            .filter(|id| w.values()[*id] != 0.0)
            .map(|id| WeightEntryJson { path: tree.index_of(id).path(), value: w.values()[id] })
            .collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn tree_weight_from_json(text: &str) -> Result<TreeWeight> {
    let doc: TreeWeightJson = serde_json::from_str(text)?;
    check_depth(doc.depth)?;
    let mut w = TreeWeight::zero(doc.depth);
    let mut seen = std::collections::HashSet::new();
    for e in &doc.entries {
        let i = DyadicIndex::from_path(&e.path)?;
        if i.level() > doc.depth {
            return Err(Error::PathTooDeep { len: i.level(), depth: doc.depth });
        }
        if !seen.insert(i) {
            return Err(Error::DuplicatePath { path: e.path.clone() });
        }
        if !e.value.is_finite() {
            return Err(Error::NonFinite);
        }
        w.set(i, e.value)?;
    }
    Ok(w)
}
