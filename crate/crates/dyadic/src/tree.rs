//! The finite rooted dyadic tree over `[0,1)`.
//!
//! A node at `level` with `offset` (counting from the left) is the interval
//! `[offset * 2^-level, (offset+1) * 2^-level)`. Nodes are stored in heap
//! order, `id = 2^level - 1 + offset`, so parent/child moves are bit
//! arithmetic. Levels run `0..=depth`; nodes at `level == depth` are leaves
//! and carry no Haar function.

use crate::{Error, Result};

/// Deepest tree supported; `2^(MAX_DEPTH+1)` nodes must stay addressable.
pub const MAX_DEPTH: usize = 24;

/// One node of the dyadic tree, addressed by `(level, offset)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct DyadicIndex {
    level: u32,
    offset: u64,
}

pub const ROOT: DyadicIndex = DyadicIndex { level: 0, offset: 0 };

impl DyadicIndex {
    pub fn new(level: usize, offset: u64) -> Self {
        assert!(level <= MAX_DEPTH, "level {level} too deep");
        assert!(offset < 1u64 << level, "offset {offset} out of range at level {level}");
        Self { level: level as u32, offset }
    }

    /// Parses a path string: `""` is the root, `'0'`/`'1'` descend left/right.
    pub fn from_path(path: &str) -> Result<Self> {
        if path.len() > MAX_DEPTH {
            return Err(Error::PathTooDeep { len: path.len(), depth: MAX_DEPTH });
        }
        let mut offset = 0u64;
        for c in path.chars() {
            match c {
                '0' => offset <<= 1,
                '1' => offset = (offset << 1) | 1,
                _ => return Err(Error::BadPathChar { found: c }),
            }
        }
        Ok(Self { level: path.len() as u32, offset })
    }

    pub fn path(&self) -> String {
        (0..self.level)
            .rev()
            .map(|bit| if self.offset >> bit & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn level(&self) -> usize {
        self.level as usize
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// Dyadic length `|I| = 2^-level`.
    pub fn measure(&self) -> f64 {
        (2.0f64).powi(-(self.level as i32))
    }

    pub fn is_root(&self) -> bool {
        self.level == 0
    }

    pub fn parent(&self) -> Option<DyadicIndex> {
        (self.level > 0).then(|| DyadicIndex { level: self.level - 1, offset: self.offset >> 1 })
    }

    pub fn sibling(&self) -> Option<DyadicIndex> {
        (self.level > 0).then_some(DyadicIndex { level: self.level, offset: self.offset ^ 1 })
    }

    /// True when `self` is contained in `other` (inclusive).
    pub fn is_contained_in(&self, other: &DyadicIndex) -> bool {
        self.level >= other.level && (self.offset >> (self.level - other.level)) == other.offset
    }

    /// Left child `I_-`; the tree depth decides whether it exists.
    fn child(&self, right: bool) -> DyadicIndex {
        DyadicIndex { level: self.level + 1, offset: (self.offset << 1) | right as u64 }
    }
}

/// Navigation moves understood by [`Tree::navigate`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Parent,
    LeftChild,
    RightChild,
    Sibling,
}

/// How two dyadic intervals sit relative to each other.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Nesting {
    Equal,
    /// First strictly inside the left half of the second.
    InsideLeft,
    /// First strictly inside the right half of the second.
    InsideRight,
    /// Second strictly inside the first.
    Contains,
    Disjoint,
}

/// Classifies `i` against `j`.
pub fn nesting(i: DyadicIndex, j: DyadicIndex) -> Nesting {
    if i == j {
        Nesting::Equal
    } else if i.is_contained_in(&j) {
        let side = i.offset >> (i.level - j.level - 1) & 1;
        if side == 0 {
            Nesting::InsideLeft
        } else {
            Nesting::InsideRight
        }
    } else if j.is_contained_in(&i) {
        Nesting::Contains
    } else {
        Nesting::Disjoint
    }
}

/// The dyadic tree truncated at `depth >= 1`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Tree {
    depth: usize,
}

impl Tree {
    pub fn new(depth: usize) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::BadDepth { depth, max: MAX_DEPTH });
        }
        Ok(Self { depth })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Total node count `2^(depth+1) - 1`.
    pub fn node_count(&self) -> usize {
        (1 << (self.depth + 1)) - 1
    }

    /// Nodes carrying a Haar function: levels `0..depth`, count `2^depth - 1`.
    pub fn haar_count(&self) -> usize {
        (1 << self.depth) - 1
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.depth
    }

    pub fn contains(&self, i: DyadicIndex) -> bool {
        i.level() <= self.depth
    }

    pub fn is_leaf(&self, i: DyadicIndex) -> bool {
        i.level() == self.depth
    }

    pub fn is_haar(&self, i: DyadicIndex) -> bool {
        i.level() < self.depth
    }

    /// Heap id: `2^level - 1 + offset`. Haar nodes occupy `0..haar_count()`.
    pub fn node_id(&self, i: DyadicIndex) -> usize {
        debug_assert!(self.contains(i));
        (1usize << i.level()) - 1 + i.offset() as usize
    }

    pub fn index_of(&self, id: usize) -> DyadicIndex {
        debug_assert!(id < self.node_count());
        let level = (id + 1).ilog2() as usize;
        DyadicIndex::new(level, (id + 1 - (1 << level)) as u64)
    }

    pub fn left_child(&self, i: DyadicIndex) -> Option<DyadicIndex> {
        (!self.is_leaf(i)).then(|| i.child(false))
    }

    pub fn right_child(&self, i: DyadicIndex) -> Option<DyadicIndex> {
        (!self.is_leaf(i)).then(|| i.child(true))
    }

    pub fn navigate(&self, i: DyadicIndex, rel: Relation) -> Option<DyadicIndex> {
        debug_assert!(self.contains(i));
        match rel {
            Relation::Parent => i.parent(),
            Relation::LeftChild => self.left_child(i),
            Relation::RightChild => self.right_child(i),
            Relation::Sibling => i.sibling(),
        }
    }

    /// All nodes in heap (level-major, left-to-right) order.
    pub fn nodes(&self) -> impl Iterator<Item = DyadicIndex> + '_ {
        (0..self.node_count()).map(|id| self.index_of(id))
    }

    pub fn haar_nodes(&self) -> impl Iterator<Item = DyadicIndex> + '_ {
        (0..self.haar_count()).map(|id| self.index_of(id))
    }

    pub fn leaves(&self) -> impl Iterator<Item = DyadicIndex> + '_ {
        (self.haar_count()..self.node_count()).map(|id| self.index_of(id))
    }

    /// Bottom-up inclusive subtree reduction: `out[I] = combine over {J : J ⊆ I}`
    /// of `values[J]`, in one `O(N)` pass. `combine` must be associative.
    pub fn aggregate<T: Copy>(&self, values: &[T], combine: impl Fn(T, T) -> T) -> Vec<T> {
        assert_eq!(values.len(), self.node_count());
        let mut out = values.to_vec();
        for id in (0..self.haar_count()).rev() {
            let l = out[2 * id + 1];
            let r = out[2 * id + 2];
            out[id] = combine(combine(out[id], l), r);
        }
        out
    }

    /// Inclusive subtree sums of an `f64` sequence.
    pub fn subtree_sums(&self, values: &[f64]) -> Vec<f64> {
        self.aggregate(values, |a, b| a + b)
    }

    /// Strict subtree sums: `out[I] = sum over {J : J ⊊ I}`; zero at leaves.
    pub fn subtree_sums_strict(&self, values: &[f64]) -> Vec<f64> {
        let incl = self.subtree_sums(values);
        (0..self.node_count())
            .map(|id| if id < self.haar_count() { incl[2 * id + 1] + incl[2 * id + 2] } else { 0.0 })
            .collect()
    }

    /// Complex counterpart of [`Tree::subtree_sums`].
    pub fn subtree_sums_c(&self, values: &[crate::Scalar]) -> Vec<crate::Scalar> {
        self.aggregate(values, |a, b| a + b)
    }

    /// Top-down accumulation: `out[I] = sum over ancestors-or-self J ⊇ I` of
    /// `values[J]`.
    pub fn ancestor_sums_c(&self, values: &[crate::Scalar]) -> Vec<crate::Scalar> {
        assert_eq!(values.len(), self.node_count());
        let mut out = values.to_vec();
        for id in 1..self.node_count() {
            let parent = (id - 1) / 2;
            out[id] = out[id] + out[parent];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    #[test]
    fn paths_round_trip() {
        for p in ["", "0", "1", "01", "10", "0110"] {
            assert_eq!(DyadicIndex::from_path(p).unwrap().path(), p);
        }
        assert!(matches!(DyadicIndex::from_path("02"), Err(Error::BadPathChar { found: '2' })));
    }

    #[test]
    fn navigation_matches_path_arithmetic() {
        let tree = Tree::new(3).unwrap();
        let i = DyadicIndex::from_path("01").unwrap();
        assert_eq!(tree.navigate(i, Relation::Parent).unwrap().path(), "0");
        assert_eq!(tree.navigate(ROOT, Relation::Parent), None);
        let one = DyadicIndex::from_path("1").unwrap();
        assert_eq!(tree.navigate(one, Relation::LeftChild).unwrap().path(), "10");
        assert_eq!(tree.navigate(i, Relation::Sibling).unwrap().path(), "00");
        // children stop existing at the leaf level
        let leaf = DyadicIndex::from_path("010").unwrap();
        assert_eq!(tree.navigate(leaf, Relation::LeftChild), None);
        // left-child then parent is the identity whenever defined
        for i in tree.haar_nodes() {
            let down = tree.navigate(i, Relation::LeftChild).unwrap();
            assert_eq!(tree.navigate(down, Relation::Parent), Some(i));
        }
    }

    #[test]
    fn measures() {
        assert_eq!(ROOT.measure(), 1.0);
        assert_eq!(DyadicIndex::from_path("01").unwrap().measure(), 0.25);
        assert_eq!(DyadicIndex::from_path("000").unwrap().measure(), 0.125);
        let tree = Tree::new(4).unwrap();
        for i in tree.haar_nodes() {
            let l = tree.left_child(i).unwrap();
            let r = tree.right_child(i).unwrap();
            assert_eq!(l.measure() + r.measure(), i.measure());
        }
    }

    #[test]
    fn heap_ids_are_consistent() {
        let tree = Tree::new(5).unwrap();
        for (expect, i) in tree.nodes().enumerate() {
            assert_eq!(tree.node_id(i), expect);
            assert_eq!(tree.index_of(expect), i);
        }
        assert_eq!(tree.node_count(), 63);
        assert_eq!(tree.haar_count(), 31);
    }

    fn symbol_values(tree: &Tree, entries: &[(&str, f64)]) -> Vec<Scalar> {
        let mut v = vec![Scalar::ZERO; tree.node_count()];
        for (p, x) in entries {
            v[tree.node_id(DyadicIndex::from_path(p).unwrap())] = Scalar::new(*x, 0.0);
        }
        v
    }

    #[test]
    fn aggregate_examples() {
        let tree = Tree::new(1).unwrap();
        // single support at "0"
        let a = symbol_values(&tree, &[("0", 1.0)]);
        let s = tree.subtree_sums_c(&a);
        assert_eq!(s[tree.node_id(ROOT)].re, 1.0);
        assert_eq!(s[tree.node_id(DyadicIndex::from_path("0").unwrap())].re, 1.0);
        assert_eq!(s[tree.node_id(DyadicIndex::from_path("1").unwrap())].re, 0.0);

        // constant 1 on the 3-node tree counts subtree sizes
        let ones = vec![Scalar::ONE; tree.node_count()];
        let s = tree.subtree_sums_c(&ones);
        assert_eq!(s[0].re, 3.0);
        assert_eq!(s[1].re, 1.0);
        assert_eq!(s[2].re, 1.0);
    }

    #[test]
    fn aggregate_matches_enumeration() {
        // oracle: brute-force sum over explicitly enumerated subtrees
        let tree = Tree::new(3).unwrap();
        let a = symbol_values(&tree, &[("00", 2.0), ("01", 3.0)]);
        let s = tree.subtree_sums_c(&a);
        for i in tree.nodes() {
            let brute: Scalar = tree
                .nodes()
                .filter(|j| j.is_contained_in(&i))
                .map(|j| a[tree.node_id(j)])
                .sum();
            assert_eq!(s[tree.node_id(i)], brute);
        }
        assert_eq!(s[tree.node_id(DyadicIndex::from_path("0").unwrap())].re, 5.0);
        assert_eq!(s[tree.node_id(ROOT)].re, 5.0);
        assert_eq!(s[tree.node_id(DyadicIndex::from_path("1").unwrap())].re, 0.0);
    }

    #[test]
    fn strict_sums_drop_own_value() {
        let tree = Tree::new(6).unwrap();
        let vals: Vec<f64> = (0..tree.node_count()).map(|i| (i as f64).sin()).collect();
        let incl = tree.subtree_sums(&vals);
        let strict = tree.subtree_sums_strict(&vals);
        for id in 0..tree.node_count() {
            assert!((incl[id] - vals[id] - strict[id]).abs() < 1e-12);
        }
    }

    #[test]
    fn nesting_classification() {
        let i = DyadicIndex::from_path("00").unwrap();
        let j = DyadicIndex::from_path("0").unwrap();
        assert_eq!(nesting(i, j), Nesting::InsideLeft);
        assert_eq!(nesting(j, i), Nesting::Contains);
        assert_eq!(nesting(i, i), Nesting::Equal);
        assert_eq!(nesting(i, DyadicIndex::from_path("1").unwrap()), Nesting::Disjoint);
        assert_eq!(
            nesting(DyadicIndex::from_path("011").unwrap(), j),
            Nesting::InsideRight
        );
    }
}
