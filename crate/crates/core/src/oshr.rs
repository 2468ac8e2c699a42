//! The OSHR tree (suffix links reversed over internal nodes), node
//! classification, reference contexts and base suffixes.
//!
//! All per-node tables are slotted by the dense internal index of the
//! suffix tree ([`SuffixTree::internal_index`]).

use std::collections::BTreeMap;

use crate::csr::Csr;
use crate::suffix_tree::{NodeId, SuffixTree, ROOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OshrClass {
    /// At least one suffix link points at the node.
    Internal,
    /// No incoming suffix link.
    Leaf,
}

/// Preorder span of a node's OSHR subtree. Containment of spans is
/// exactly suffix-link reachability: `v` is in the OSHR subtree of `i`
/// iff `i = sl^k(v)` for some `k >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OtInterval {
    pub left: u32,
    pub right: u32,
}

impl OtInterval {
    #[inline]
    pub fn contains(&self, other: OtInterval) -> bool {
        self.left <= other.left && other.left <= self.right
    }
}

pub struct OshrTree {
    children: Csr<NodeId>,
    intervals: Vec<OtInterval>,
    postorder: Vec<NodeId>,
}

impl OshrTree {
    pub fn build(st: &SuffixTree) -> OshrTree {
        let m = st.internal_count();
        let mut pairs: Vec<(u32, NodeId)> = st
            .internal_nodes()
            .iter()
            .filter(|&&v| v != ROOT)
            .map(|&v| (dense(st, st.suffix_link(v)) as u32, v))
            .collect();
        pairs.sort_unstable();
        let children = Csr::from_pairs(m, pairs);

        let mut intervals = vec![OtInterval { left: 0, right: 0 }; m];
        let mut postorder = Vec::with_capacity(m);
        let mut next_pre = 0u32;
        let mut stack: Vec<(NodeId, bool)> = vec![(ROOT, false)];
        while let Some((v, done)) = stack.pop() {
            let k = dense(st, v);
            if done {
                intervals[k].right = next_pre - 1;
                postorder.push(v);
                continue;
            }
            intervals[k].left = next_pre;
            next_pre += 1;
            stack.push((v, true));
            for &c in children.get(k).iter().rev() {
                stack.push((c, false));
            }
        }
        assert_eq!(
            postorder.len(),
            m,
            "suffix links must form a single tree over the internal nodes"
        );
        OshrTree {
            children,
            intervals,
            postorder,
        }
    }

    pub fn parent(&self, st: &SuffixTree, v: NodeId) -> Option<NodeId> {
        (v != ROOT).then(|| st.suffix_link(v))
    }

    /// Nodes whose suffix link is `v`, ascending by id.
    pub fn children(&self, st: &SuffixTree, v: NodeId) -> &[NodeId] {
        self.children.get(dense(st, v))
    }

    pub fn class(&self, st: &SuffixTree, v: NodeId) -> OshrClass {
        if self.children(st, v).is_empty() {
            OshrClass::Leaf
        } else {
            OshrClass::Internal
        }
    }

    #[inline]
    pub fn interval(&self, st: &SuffixTree, v: NodeId) -> OtInterval {
        self.intervals[dense(st, v)]
    }

    /// True when `v` is in the OSHR subtree of `i`.
    #[inline]
    pub fn contains(&self, st: &SuffixTree, i: NodeId, v: NodeId) -> bool {
        self.interval(st, i).contains(self.interval(st, v))
    }

    pub fn postorder(&self) -> &[NodeId] {
        &self.postorder
    }

    pub fn len(&self) -> usize {
        self.postorder.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[inline]
pub(crate) fn dense(st: &SuffixTree, v: NodeId) -> usize {
    st.internal_index(v).expect("internal node expected")
}

/// A consecutive leaf pair `(x, x + 1)` whose parents are not joined by a
/// suffix link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceContext {
    pub suffix_x: u32,
    pub leaf_a: NodeId,
    pub parent_b: NodeId,
    pub leaf_c: NodeId,
    pub parent_d: NodeId,
}

pub fn reference_leaf_contexts(st: &SuffixTree) -> Vec<ReferenceContext> {
    let n = st.text().n();
    let mut out = Vec::new();
    for x in 0..n {
        let leaf_a = st.leaf_unchecked(x);
        let leaf_c = st.leaf_unchecked(x + 1);
        let parent_b = st.parent(leaf_a).unwrap();
        let parent_d = st.parent(leaf_c).unwrap();
        if st.suffix_link(parent_b) != parent_d {
            out.push(ReferenceContext {
                suffix_x: x as u32,
                leaf_a,
                parent_b,
                leaf_c,
                parent_d,
            });
        }
    }
    out
}

/// Ancestors of leaf C strictly below `sl(B)` down to `D` inclusive,
/// top-down.
pub fn skipped_nodes(st: &SuffixTree, ctx: &ReferenceContext) -> Vec<NodeId> {
    let top = st.suffix_link(ctx.parent_b);
    let top_depth = st.depth(top);
    let mut out = Vec::new();
    let mut w = ctx.parent_d;
    while st.depth(w) > top_depth {
        out.push(w);
        w = st.parent(w).unwrap();
    }
    assert_eq!(w, top, "sl(B) must be a proper ancestor of D");
    out.reverse();
    out
}

/// Reference internal nodes per internal node `w`: every internal `r`
/// (not the root) with `sl(parent(r)) != parent(sl(r))` such that `w` lies
/// strictly between `sl(parent(r))` and `sl(r)`.
pub fn reference_internal_nodes(st: &SuffixTree) -> Csr<NodeId> {
    let mut pairs = Vec::new();
    for &r in st.internal_nodes() {
        if r == ROOT {
            continue;
        }
        let top = st.suffix_link(st.parent(r).unwrap());
        let target = st.suffix_link(r);
        let mut w = st.parent(target).unwrap_or(ROOT);
        if target == ROOT || w == top {
            continue;
        }
        while w != top {
            pairs.push((dense(st, w) as u32, r));
            w = st.parent(w).expect("sl(parent(r)) is an ancestor of sl(r)");
        }
    }
    Csr::from_pairs(st.internal_count(), pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseSuffix {
    pub suffix: u32,
    pub ref_leaf: NodeId,
}

/// Base suffixes derived from reference leaves: suffix `x + 1` stored at
/// every skipped node of context `x`.
pub fn base_suffixes(st: &SuffixTree, contexts: &[ReferenceContext]) -> Csr<BaseSuffix> {
    let mut pairs = Vec::new();
    for ctx in contexts {
        for w in skipped_nodes(st, ctx) {
            let b = BaseSuffix {
                suffix: ctx.suffix_x + 1,
                ref_leaf: ctx.leaf_a,
            };
            pairs.push((dense(st, w) as u32, b));
        }
    }
    Csr::from_pairs(st.internal_count(), pairs)
}

/// Everything derived from suffix links that index construction needs.
pub struct OshrLink {
    pub tree: OshrTree,
    pub contexts: Vec<ReferenceContext>,
    pub reference_internal: Csr<NodeId>,
    pub base_suffixes: Csr<BaseSuffix>,
}

impl OshrLink {
    pub fn build(st: &SuffixTree) -> OshrLink {
        let tree = OshrTree::build(st);
        let contexts = reference_leaf_contexts(st);
        let reference_internal = reference_internal_nodes(st);
        let base_suffixes = base_suffixes(st, &contexts);
        OshrLink {
            tree,
            contexts,
            reference_internal,
            base_suffixes,
        }
    }

    pub fn reference_internal_of(&self, st: &SuffixTree, w: NodeId) -> &[NodeId] {
        self.reference_internal.get(dense(st, w))
    }

    pub fn base_suffixes_at(&self, st: &SuffixTree, w: NodeId) -> &[BaseSuffix] {
        self.base_suffixes.get(dense(st, w))
    }

    pub fn stats(&self, st: &SuffixTree) -> OshrStats {
        let sigma = st.text().alphabet().size();
        let mut internal = 0;
        let mut leaf = 0;
        let mut histogram = BTreeMap::new();
        let mut over_sigma = 0;
        for (k, &v) in st.internal_nodes().iter().enumerate() {
            match self.tree.class(st, v) {
                OshrClass::Internal => internal += 1,
                OshrClass::Leaf => leaf += 1,
            }
            let count = self.base_suffixes.get(k).len();
            *histogram.entry(count).or_insert(0) += 1;
            if count > sigma {
                over_sigma += 1;
            }
        }
        OshrStats {
            oshr_internal: internal,
            oshr_leaf: leaf,
            contexts: self.contexts.len(),
            base_suffixes: self.base_suffixes.total(),
            base_suffix_histogram: histogram,
            nodes_over_sigma: over_sigma,
            nodes_with_reference_internal: (0..st.internal_count())
                .filter(|&k| !self.reference_internal.get(k).is_empty())
                .count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OshrStats {
    pub oshr_internal: usize,
    pub oshr_leaf: usize,
    pub contexts: usize,
    pub base_suffixes: usize,
    /// Number of internal nodes storing exactly `k` base suffixes.
    pub base_suffix_histogram: BTreeMap<usize, usize>,
    /// Nodes storing more than Σ base suffixes (the bound is reported, not enforced).
    pub nodes_over_sigma: usize,
    pub nodes_with_reference_internal: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Text;

    fn tree(s: &str) -> SuffixTree {
        SuffixTree::build(Text::with_sentinel(s.as_bytes().to_vec()).unwrap())
    }

    fn node(st: &SuffixTree, label: &str) -> NodeId {
        st.internal_nodes()
            .iter()
            .copied()
            .find(|&v| st.label(v) == label.as_bytes())
            .unwrap()
    }

    #[test]
    fn banana_chain() {
        let st = tree("BANANA");
        let oshr = OshrTree::build(&st);
        let (a, na, ana) = (node(&st, "A"), node(&st, "NA"), node(&st, "ANA"));
        assert_eq!(oshr.parent(&st, ana), Some(na));
        assert_eq!(oshr.parent(&st, na), Some(a));
        assert_eq!(oshr.parent(&st, a), Some(ROOT));
        assert_eq!(oshr.parent(&st, ROOT), None);
        for v in [ROOT, a, na] {
            assert_eq!(oshr.class(&st, v), OshrClass::Internal);
        }
        assert_eq!(oshr.class(&st, ana), OshrClass::Leaf);
        // Preorder spans along the chain.
        assert_eq!(oshr.interval(&st, ROOT), OtInterval { left: 0, right: 3 });
        assert_eq!(oshr.interval(&st, a), OtInterval { left: 1, right: 3 });
        assert_eq!(oshr.interval(&st, na), OtInterval { left: 2, right: 3 });
        assert_eq!(oshr.interval(&st, ana), OtInterval { left: 3, right: 3 });
        assert!(oshr.contains(&st, a, ana));
        assert!(!oshr.contains(&st, ana, a));
        assert_eq!(oshr.postorder(), &[ana, na, a, ROOT]);
    }

    #[test]
    fn lone_root() {
        let st = tree("AB");
        let oshr = OshrTree::build(&st);
        assert_eq!(oshr.len(), 1);
        assert_eq!(oshr.class(&st, ROOT), OshrClass::Leaf);
    }

    #[test]
    fn banana_contexts() {
        let st = tree("BANANA");
        let ctxs = reference_leaf_contexts(&st);
        let xs: Vec<u32> = ctxs.iter().map(|c| c.suffix_x).collect();
        assert_eq!(xs, vec![0, 2]);
        assert_eq!(ctxs[0].parent_b, ROOT);
        assert_eq!(ctxs[0].parent_d, node(&st, "ANA"));
        assert_eq!(ctxs[1].parent_b, node(&st, "NA"));

        let labels = |c: &ReferenceContext| -> Vec<Vec<u8>> {
            skipped_nodes(&st, c)
                .iter()
                .map(|&w| st.label(w).to_vec())
                .collect()
        };
        assert_eq!(labels(&ctxs[0]), vec![b"A".to_vec(), b"ANA".to_vec()]);
        assert_eq!(labels(&ctxs[1]), vec![b"ANA".to_vec()]);
    }

    #[test]
    fn unary_text_has_one_context() {
        let st = tree("AAAA");
        let ctxs = reference_leaf_contexts(&st);
        assert_eq!(ctxs.len(), 1);
        assert_eq!(ctxs[0].suffix_x, 0);
        assert_eq!(ctxs[0].parent_b, ctxs[0].parent_d);
        let skipped: Vec<&[u8]> = skipped_nodes(&st, &ctxs[0])
            .iter()
            .map(|&w| st.label(w))
            .collect();
        assert_eq!(skipped, vec![b"AAA".as_slice()]);
        let refint = reference_internal_nodes(&st);
        assert_eq!(refint.total(), 0);
    }

    #[test]
    fn banana_reference_internal_is_empty() {
        let st = tree("BANANA");
        assert_eq!(reference_internal_nodes(&st).total(), 0);
    }

    #[test]
    fn banana_base_suffixes() {
        let st = tree("BANANA");
        let link = OshrLink::build(&st);
        let at = |label: &str| -> Vec<u32> {
            link.base_suffixes_at(&st, node(&st, label))
                .iter()
                .map(|b| b.suffix)
                .collect()
        };
        assert_eq!(at("A"), vec![1]);
        assert_eq!(at("ANA"), vec![1, 3]);
        assert_eq!(at("NA"), Vec::<u32>::new());
        assert_eq!(at(""), Vec::<u32>::new());
    }
}
