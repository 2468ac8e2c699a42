//! Index construction: special-node detection, the three sub-indexes and
//! the merged, sorted per-node entry lists.

use std::collections::{BTreeMap, HashSet};

use sha2::{Digest, Sha256};

use crate::csr::Csr;
use crate::error::{Error, Result};
use crate::oshr::{dense, BaseSuffix, OshrClass, OshrLink, OtInterval};
use crate::suffix_tree::{NodeId, SuffixTree, NIL, ROOT};
use crate::text::Text;

/// Pattern lengths an index is built to answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LengthMode {
    All,
    Exact(u32),
    AtMost(u32),
    Range(u32, u32),
}

impl LengthMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LengthMode::Range(lo, hi) if lo > hi => {
                Err(Error::Config(format!("length range {lo}..={hi} is empty")))
            }
            LengthMode::Exact(0) | LengthMode::AtMost(0) => {
                Err(Error::Config("pattern length must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn admits(&self, len: usize) -> bool {
        let len = len as u64;
        match *self {
            LengthMode::All => true,
            LengthMode::Exact(l) => len == l as u64,
            LengthMode::AtMost(l) => len <= l as u64,
            LengthMode::Range(lo, hi) => lo as u64 <= len && len <= hi as u64,
        }
    }

    /// Whether any admitted length falls in `(lo, hi]`.
    fn meets(&self, lo: usize, hi: usize) -> bool {
        if hi <= lo {
            return false;
        }
        let (lo, hi) = (lo as u64 + 1, hi as u64);
        let (a, b) = match *self {
            LengthMode::All => return true,
            LengthMode::Exact(l) => (l as u64, l as u64),
            LengthMode::AtMost(l) => (1, l as u64),
            LengthMode::Range(x, y) => (x as u64, y as u64),
        };
        a.max(lo) <= b.min(hi)
    }
}

/// How skipped nodes are split into Hanadi and Srivastava nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// Hanadi = OSHR internal; Srivastava = OSHR leaf with a reference internal node.
    DefinitionLiteral,
    /// Hanadi = OSHR leaf without a reference internal node; Srivastava as above.
    FigureCaption,
    /// Every skipped node is indexed: the union of the two readings above.
    Union,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BuildConfig {
    pub length_mode: LengthMode,
    pub classification: Classification,
    pub exclusion_rule: bool,
    /// Re-key special entries at the deepest node reachable by extending the
    /// key's label to the left along the reference leaf's predecessors.
    pub extend_keys: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            length_mode: LengthMode::All,
            classification: Classification::Union,
            exclusion_rule: true,
            extend_keys: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    BasePath = 0,
    Hanadi = 1,
    Srivastava = 2,
}

impl Origin {
    pub const ALL: [Origin; 3] = [Origin::BasePath, Origin::Hanadi, Origin::Srivastava];

    pub fn from_u8(b: u8) -> Option<Origin> {
        Origin::ALL.get(b as usize).copied()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Origin::BasePath => "base_path",
            Origin::Hanadi => "hanadi",
            Origin::Srivastava => "srivastava",
        }
    }
}

/// One record in a host node's list: "the host's label occurs right below
/// `key_node`, starting at text position `occ`".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OtEntry {
    pub interval: OtInterval,
    pub key_node: NodeId,
    pub occ: u32,
    pub origin: Origin,
    /// Bottom node of the base path for base-path entries, `u32::MAX` otherwise.
    pub aux: u32,
}

/// A Hanadi or Srivastava node together with the reference leaf naming it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialRef {
    pub ref_suffix: u32,
    pub ref_rank: u32,
    pub node: NodeId,
    pub origin: Origin,
}

/// Special nodes listed per reference leaf, left to right by leaf rank.
#[derive(Debug, Clone, Default)]
pub struct SpecialNodes {
    pub refs: Vec<SpecialRef>,
}

impl SpecialNodes {
    /// References whose reference leaf lies under `v`.
    pub fn under(&self, st: &SuffixTree, v: NodeId) -> &[SpecialRef] {
        let (l, r) = st.interval(v);
        let a = self.refs.partition_point(|s| (s.ref_rank as usize) < l);
        let b = self.refs.partition_point(|s| (s.ref_rank as usize) <= r);
        &self.refs[a..b]
    }

    /// Special nodes of one origin, each with its reference-leaf suffixes.
    pub fn by_node(&self, origin: Origin) -> BTreeMap<NodeId, Vec<u32>> {
        let mut out: BTreeMap<NodeId, Vec<u32>> = BTreeMap::new();
        for s in self.refs.iter().filter(|s| s.origin == origin) {
            out.entry(s.node).or_default().push(s.ref_suffix);
        }
        for v in out.values_mut() {
            v.sort_unstable();
        }
        out
    }
}

pub fn detect_special_nodes(
    st: &SuffixTree,
    link: &OshrLink,
    classification: Classification,
) -> SpecialNodes {
    let mut refs = Vec::new();
    for ctx in &link.contexts {
        for w in crate::oshr::skipped_nodes(st, ctx) {
            let class = link.tree.class(st, w);
            let has_ref_internal = !link.reference_internal_of(st, w).is_empty();
            let origin = match (classification, class, has_ref_internal) {
                (_, OshrClass::Leaf, true) => Some(Origin::Srivastava),
                (Classification::DefinitionLiteral, OshrClass::Internal, _) => Some(Origin::Hanadi),
                (Classification::FigureCaption, OshrClass::Leaf, false) => Some(Origin::Hanadi),
                (Classification::Union, _, _) => Some(Origin::Hanadi),
                _ => None,
            };
            if let Some(origin) = origin {
                refs.push(SpecialRef {
                    ref_suffix: ctx.suffix_x,
                    ref_rank: st.leaf_rank(ctx.leaf_a) as u32,
                    node: w,
                    origin,
                });
            }
        }
    }
    refs.sort_by_key(|s| (s.ref_rank, st.depth(s.node)));
    SpecialNodes { refs }
}

/// Root-walk of `text[pos..pos + len)`: the nodes at string depths in
/// `(0, len]` along it. The string must end exactly on a node.
pub fn last_extent_path(st: &SuffixTree, pos: usize, len: usize) -> Result<Vec<NodeId>> {
    let (bottom, exact) = st.locate_substring(pos, len);
    if !exact {
        return Err(Error::Internal(format!(
            "last extent path of length {len} at {pos} ends mid-edge"
        )));
    }
    let mut out = Vec::new();
    let mut w = bottom;
    while w != ROOT {
        out.push(w);
        w = st.parent(w).unwrap();
    }
    out.reverse();
    Ok(out)
}

/// Entry counts gathered while building.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexStats {
    /// Entries per origin in the final lists.
    pub entries: [u64; 3],
    /// Entries per origin as inserted, before de-duplication and pruning.
    pub inserted: [u64; 3],
    pub special_refs: u64,
    pub base_paths: u64,
    pub skipped_indexed_paths: u64,
    pub excluded_by_rule: u64,
    pub base_suffixes: u64,
}

impl IndexStats {
    pub fn total(&self) -> u64 {
        self.entries.iter().sum()
    }
}

/// The merged index: per internal node a sorted entry list, plus the base
/// suffixes derived from reference leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtIndex {
    pub config: BuildConfig,
    pub(crate) text_len: u64,
    /// Alphabet size of the text, sentinel excluded.
    pub(crate) sigma: u32,
    pub(crate) text_hash: [u8; 32],
    pub(crate) entries: Csr<OtEntry>,
    pub(crate) base_suffixes: Csr<BaseSuffix>,
    pub stats: IndexStats,
}

pub fn text_hash(text: &Text) -> [u8; 32] {
    Sha256::digest(text.bytes()).into()
}

impl OtIndex {
    pub fn entries_at(&self, st: &SuffixTree, host: NodeId) -> &[OtEntry] {
        self.entries.get(dense(st, host))
    }

    pub fn base_suffixes_at(&self, st: &SuffixTree, host: NodeId) -> &[BaseSuffix] {
        self.base_suffixes.get(dense(st, host))
    }

    /// Host lists in dense internal-node order.
    pub fn host_lists(&self) -> impl Iterator<Item = (usize, &[OtEntry])> + '_ {
        self.entries.iter()
    }

    pub fn base_suffix_lists(&self) -> impl Iterator<Item = (usize, &[BaseSuffix])> + '_ {
        self.base_suffixes.iter()
    }

    pub fn total_entries(&self) -> usize {
        self.entries.total()
    }

    pub fn max_host_len(&self) -> usize {
        self.entries.iter().map(|(_, l)| l.len()).max().unwrap_or(0)
    }

    /// Text length including the sentinel.
    pub fn text_len(&self) -> u64 {
        self.text_len
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    /// Internal nodes of the tree the index was built on, root included.
    pub fn node_slots(&self) -> usize {
        self.entries.slots()
    }

    pub fn text_hash(&self) -> &[u8; 32] {
        &self.text_hash
    }

    /// Fails with [`Error::HashMismatch`] unless built over `text`.
    pub fn check_text(&self, text: &Text) -> Result<()> {
        if self.text_len != text.len() as u64 || self.text_hash != text_hash(text) {
            return Err(Error::HashMismatch);
        }
        Ok(())
    }
}

struct Builder<'a> {
    st: &'a SuffixTree,
    link: &'a OshrLink,
    cfg: BuildConfig,
    max_internal_depth: usize,
    pairs: Vec<(u32, OtEntry)>,
    indexed_paths: HashSet<(NodeId, NodeId)>,
    stats: IndexStats,
}

impl Builder<'_> {
    /// Adds `entry` to every node on the root-walk of `text[pos..pos+len)`
    /// whose served pattern lengths `(max(parent depth, lo), depth]` meet
    /// the configured length mode.
    fn place(&mut self, pos: usize, len: usize, lo: usize, entry: OtEntry) -> Result<()> {
        let st = self.st;
        let (bottom, exact) = st.locate_substring(pos, len);
        if !exact {
            return Err(Error::Internal(format!(
                "indexed path of length {len} at {pos} ends mid-edge"
            )));
        }
        let mut w = bottom;
        while st.depth(w) > lo {
            let p = st.parent(w).unwrap();
            if self.cfg.length_mode.meets(st.depth(p).max(lo), st.depth(w)) {
                self.pairs.push((dense(st, w) as u32, entry));
                self.stats.inserted[entry.origin as usize] += 1;
            }
            w = p;
        }
        Ok(())
    }

    /// Deepest node `u` with `sl^k(u) = v` whose label is a left extension of
    /// `label(v)` along the text ending at suffix `x`.
    fn extend_key(&self, v: NodeId, x: usize) -> NodeId {
        let st = self.st;
        let dv = st.depth(v);
        let fits = |k: usize| -> Option<NodeId> {
            let (u, exact) = st.locate_substring(x - k, dv + k);
            (exact && st.is_internal(u)).then_some(u)
        };
        let mut lo = 0usize;
        let mut hi = x.min(self.max_internal_depth.saturating_sub(dv));
        let mut best = v;
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            match fits(mid) {
                Some(u) => {
                    best = u;
                    lo = mid;
                }
                None => hi = mid - 1,
            }
        }
        best
    }

    fn index_special(&mut self, v: NodeId, special: &SpecialRef) -> Result<()> {
        let st = self.st;
        let h = special.node;
        let slv = st.suffix_link(v);
        let ds = st.depth(slv);
        let dh = st.depth(h);
        if ds >= dh {
            return Ok(());
        }
        let x = special.ref_suffix as usize;
        let lo = st.depth(st.parent(h).unwrap()) - ds;
        // The root links to itself, so its label cannot be extended at x.
        let key = if self.cfg.extend_keys && v != ROOT {
            self.extend_key(v, x)
        } else {
            v
        };
        let entry = OtEntry {
            interval: self.link.tree.interval(st, key),
            key_node: key,
            occ: (x + 1 + ds) as u32,
            origin: special.origin,
            aux: NIL,
        };
        self.place(x + 1 + ds, dh - ds, lo, entry)?;
        self.indexed_paths.insert((slv, h));
        Ok(())
    }

    fn index_base_path(&mut self, v: NodeId, b: NodeId) -> Result<()> {
        let st = self.st;
        let dv = st.depth(v);
        let pos = st.label_pos(b) + dv;
        let lo = st.depth(st.parent(b).unwrap()) - dv;
        let entry = OtEntry {
            interval: self.link.tree.interval(st, v),
            key_node: v,
            occ: pos as u32,
            origin: Origin::BasePath,
            aux: b,
        };
        self.place(pos, st.depth(b) - dv, lo, entry)
    }
}

/// Per internal node, the sorted set of depths `d` such that some node
/// linking into it has an ancestor of string depth `d + 1`. A path `(v, b)`
/// is suffix-link derivable iff `depth(v)` is in the set of `b`.
fn derivable_depths(st: &SuffixTree, sources: impl Iterator<Item = (NodeId, NodeId)>) -> Csr<u32> {
    let mut pairs = Vec::new();
    for (slot_node, from) in sources {
        let slot = dense(st, slot_node) as u32;
        let mut a = from;
        while a != ROOT {
            pairs.push((slot, st.depth(a) as u32 - 1));
            a = st.parent(a).unwrap();
        }
    }
    let mut csr = Csr::from_pairs(st.internal_count(), pairs);
    csr.retain_slots(|_, list| {
        list.sort_unstable();
        list.dedup();
    });
    csr
}

/// Internal descendants `b != v` of `v` forming base paths with `v`,
/// before the `Indexed_Paths` and exclusion filters.
pub fn enumerate_base_paths(st: &SuffixTree, v: NodeId) -> Vec<NodeId> {
    let derivable = derivable_depths(
        st,
        st.internal_nodes()
            .iter()
            .filter(|&&b| b != ROOT)
            .map(|&b| (st.suffix_link(b), b)),
    );
    let sizes = internal_subtree_sizes(st);
    base_paths_of(st, &derivable, &sizes, v).collect()
}

fn base_paths_of<'a>(
    st: &'a SuffixTree,
    derivable: &'a Csr<u32>,
    sizes: &'a [u32],
    v: NodeId,
) -> impl Iterator<Item = NodeId> + 'a {
    let k = dense(st, v);
    let dv = st.depth(v) as u32;
    st.internal_nodes()[k + 1..k + sizes[k] as usize]
        .iter()
        .copied()
        .filter(move |&b| derivable.get(dense(st, b)).binary_search(&dv).is_err())
}

/// Number of internal nodes in each internal node's subtree (itself included),
/// slotted by dense index.
pub fn internal_subtree_sizes(st: &SuffixTree) -> Vec<u32> {
    let ids = st.internal_nodes();
    let mut sizes = vec![1u32; ids.len()];
    for k in (1..ids.len()).rev() {
        let p = st.parent(ids[k]).unwrap();
        sizes[dense(st, p)] += sizes[k];
    }
    sizes
}

pub fn build_index(st: &SuffixTree, link: &OshrLink, cfg: BuildConfig) -> Result<OtIndex> {
    cfg.length_mode.validate()?;
    let special = detect_special_nodes(st, link, cfg.classification);
    let derivable = derivable_depths(
        st,
        st.internal_nodes()
            .iter()
            .filter(|&&b| b != ROOT)
            .map(|&b| (st.suffix_link(b), b)),
    );
    let excluded = derivable_depths(
        st,
        st.internal_nodes().iter().flat_map(|&w| {
            link.reference_internal_of(st, w)
                .iter()
                .map(move |&r| (w, r))
        }),
    );
    let sizes = internal_subtree_sizes(st);
    let max_internal_depth = st
        .internal_nodes()
        .iter()
        .map(|&v| st.depth(v))
        .max()
        .unwrap_or(0);

    let mut b = Builder {
        st,
        link,
        cfg,
        max_internal_depth,
        pairs: Vec::new(),
        indexed_paths: HashSet::new(),
        stats: IndexStats::default(),
    };

    for &v in link.tree.postorder() {
        for s in special.under(st, v) {
            b.stats.special_refs += 1;
            b.index_special(v, s)?;
        }
        let dv = st.depth(v) as u32;
        for bottom in base_paths_of(st, &derivable, &sizes, v) {
            if b.indexed_paths.contains(&(v, bottom)) {
                b.stats.skipped_indexed_paths += 1;
                continue;
            }
            if cfg.exclusion_rule && excluded.get(dense(st, bottom)).binary_search(&dv).is_ok() {
                b.stats.excluded_by_rule += 1;
                continue;
            }
            b.stats.base_paths += 1;
            b.index_base_path(v, bottom)?;
        }
    }

    let mut entries = Csr::from_pairs(st.internal_count(), std::mem::take(&mut b.pairs));
    entries.retain_slots(|_, list| {
        list.sort_by_key(|e| (e.interval, e.origin, e.occ));
        list.dedup_by_key(|e| e.key_node);
        // An entry whose span contains the next one is implied by it: any
        // start node above the outer key is also above the inner one.
        let keep: Vec<bool> = (0..list.len())
            .map(|j| {
                list.get(j + 1)
                    .is_none_or(|next| next.interval.left > list[j].interval.right)
            })
            .collect();
        let mut flags = keep.into_iter();
        list.retain(|_| flags.next().unwrap());
    });
    let mut stats = b.stats;
    for e in entries.items() {
        stats.entries[e.origin as usize] += 1;
    }
    stats.base_suffixes = link.base_suffixes.total() as u64;

    Ok(OtIndex {
        config: cfg,
        text_len: st.text().len() as u64,
        sigma: st.text().alphabet().size() as u32,
        text_hash: text_hash(st.text()),
        entries,
        base_suffixes: link.base_suffixes.clone(),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn length_mode_windows() {
        assert!(LengthMode::All.meets(0, 1));
        assert!(!LengthMode::All.meets(2, 2));
        assert!(LengthMode::Exact(3).meets(2, 5));
        assert!(!LengthMode::Exact(3).meets(3, 5));
        assert!(LengthMode::AtMost(3).meets(0, 9));
        assert!(!LengthMode::AtMost(3).meets(3, 9));
        assert!(LengthMode::Range(4, 6).meets(5, 9));
        assert!(!LengthMode::Range(4, 6).meets(6, 9));
        assert!(LengthMode::Range(5, 4).validate().is_err());
    }

    #[test]
    fn banana_special_nodes() {
        let st = tree("BANANA");
        let link = OshrLink::build(&st);
        let lit = detect_special_nodes(&st, &link, Classification::DefinitionLiteral);
        let hanadi = lit.by_node(Origin::Hanadi);
        assert_eq!(hanadi.len(), 1);
        assert_eq!(hanadi[&node(&st, "A")], vec![0]);
        assert!(lit.by_node(Origin::Srivastava).is_empty());

        let fig = detect_special_nodes(&st, &link, Classification::FigureCaption);
        let hanadi = fig.by_node(Origin::Hanadi);
        assert_eq!(
            hanadi.keys().copied().collect::<Vec<_>>(),
            vec![node(&st, "ANA")]
        );
        assert!(fig.by_node(Origin::Srivastava).is_empty());
    }

    #[test]
    fn no_contexts_no_specials() {
        let st = tree("AB");
        let link = OshrLink::build(&st);
        for c in [
            Classification::DefinitionLiteral,
            Classification::FigureCaption,
            Classification::Union,
        ] {
            assert!(detect_special_nodes(&st, &link, c).refs.is_empty());
        }
    }

    #[test]
    fn extent_paths() {
        let st = tree("BANANA");
        let t = st.text().bytes();
        let labels = |pos, len| -> Vec<Vec<u8>> {
            last_extent_path(&st, pos, len)
                .unwrap()
                .iter()
                .map(|&w| st.label(w).to_vec())
                .collect()
        };
        assert_eq!(labels(1, 1), vec![b"A".to_vec()]);
        assert_eq!(&t[2..4], b"NA");
        assert_eq!(labels(2, 2), vec![b"NA".to_vec()]);
        assert!(last_extent_path(&st, 1, 2).is_err());

        let st = tree("MISSISSIPPI");
        let path = last_extent_path(&st, 2, 3).unwrap();
        let labels: Vec<&[u8]> = path.iter().map(|&w| st.label(w)).collect();
        assert_eq!(labels, vec![&b"S"[..], &b"SSI"[..]]);
    }

    #[test]
    fn banana_base_paths() {
        let st = tree("BANANA");
        let a = node(&st, "A");
        let ana = node(&st, "ANA");
        assert_eq!(enumerate_base_paths(&st, a), vec![ana]);
        let mut under_root = enumerate_base_paths(&st, ROOT);
        under_root.sort_unstable();
        let mut expected = vec![a, ana];
        expected.sort_unstable();
        assert_eq!(under_root, expected);
        assert!(enumerate_base_paths(&st, ana).is_empty());
    }

    #[test]
    fn banana_literal_index() {
        let st = tree("BANANA");
        let link = OshrLink::build(&st);
        let cfg = BuildConfig {
            classification: Classification::DefinitionLiteral,
            extend_keys: false,
            ..BuildConfig::default()
        };
        let idx = build_index(&st, &link, cfg).unwrap();
        let (a, na, ana) = (node(&st, "A"), node(&st, "NA"), node(&st, "ANA"));

        let at_a = idx.entries_at(&st, a);
        assert_eq!(at_a.len(), 1);
        assert_eq!(
            (at_a[0].key_node, at_a[0].occ, at_a[0].origin),
            (ROOT, 1, Origin::Hanadi)
        );

        let at_na = idx.entries_at(&st, na);
        assert_eq!(at_na.len(), 1);
        assert_eq!(
            (at_na[0].key_node, at_na[0].occ, at_na[0].origin),
            (a, 4, Origin::BasePath)
        );
        assert_eq!(at_na[0].aux, ana);

        let at_ana = idx.entries_at(&st, ana);
        assert_eq!(at_ana.len(), 1);
        assert_eq!(
            (at_ana[0].key_node, at_ana[0].origin),
            (ROOT, Origin::BasePath)
        );
        assert_eq!(idx.stats.skipped_indexed_paths, 1);
    }

    #[test]
    fn exact_length_hosts_first_deep_node() {
        let st = tree("MISSISSIPPI");
        let link = OshrLink::build(&st);
        let cfg = BuildConfig {
            length_mode: LengthMode::Exact(2),
            ..BuildConfig::default()
        };
        let idx = build_index(&st, &link, cfg).unwrap();
        for (k, list) in idx.host_lists() {
            if list.is_empty() {
                continue;
            }
            let host = st.internal_nodes()[k];
            assert!(st.depth(host) >= 2);
            assert!(st.depth(st.parent(host).unwrap()) < 2);
        }
    }
}
