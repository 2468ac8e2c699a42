//! Pattern-under-node search over a built [`OtIndex`], plus the plain
//! walking baseline it is measured against.

use crate::build::{Origin, OtIndex};
use crate::error::{Error, Result};
use crate::oshr::OshrTree;
use crate::suffix_tree::{NodeId, SuffixTree, WalkCounter, WalkOutcome, ROOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    /// The start node is the root (or the pattern is empty).
    RootTrivial,
    /// The pattern occurs once; decided from subtree intervals alone.
    LeafCase,
    /// Decided by scanning the base suffixes at the end node.
    BaseSuffix,
    /// Decided by binary search in the end node's entry list.
    BinarySearch,
    /// The pattern does not occur in the text at all.
    NotInText,
    /// Answered by walking below the start node.
    Walk,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::RootTrivial => "root",
            Route::LeafCase => "leaf",
            Route::BaseSuffix => "base_suffix",
            Route::BinarySearch => "binary_search",
            Route::NotInText => "not_in_text",
            Route::Walk => "walk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryResult {
    pub found: bool,
    /// Suffix index `j` whose leaf lies under the start node `i` with the
    /// pattern at `j + depth(i)`.
    pub witness: Option<usize>,
    pub route: Route,
    /// Binary-search probes spent.
    pub probes: u32,
    /// Length of the list that was binary searched.
    pub list_len: u32,
    /// The base-suffix scan answered after the binary search missed.
    pub fallback_hit: bool,
    /// Sub-index of the entry that answered a binary-search hit.
    pub origin: Option<Origin>,
}

impl QueryResult {
    fn miss(route: Route) -> QueryResult {
        QueryResult {
            found: false,
            witness: None,
            route,
            probes: 0,
            list_len: 0,
            fallback_hit: false,
            origin: None,
        }
    }

    fn hit(route: Route, witness: usize) -> QueryResult {
        QueryResult {
            found: true,
            witness: Some(witness),
            ..QueryResult::miss(route)
        }
    }
}

/// True when leaf `j` lies under `i` and the text spells `pattern` at `j + depth(i)`.
pub fn verify_witness(st: &SuffixTree, pattern: &[u8], i: NodeId, j: usize) -> bool {
    let t = st.text().bytes();
    let at = j + st.depth(i);
    j < t.len()
        && st.suffix_under(i, j)
        && at + pattern.len() <= t.len()
        && &t[at..at + pattern.len()] == pattern
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Scan base suffixes even when the entry list is non-empty and the
    /// binary search came up empty.
    pub base_suffix_fallback: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            base_suffix_fallback: true,
        }
    }
}

/// Root walk of a pattern, shared by every start node it is asked under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Located {
    pub len: usize,
    pub walk: WalkOutcome,
}

pub struct Searcher<'a> {
    st: &'a SuffixTree,
    oshr: &'a OshrTree,
    idx: &'a OtIndex,
    opts: SearchOptions,
}

impl<'a> Searcher<'a> {
    pub fn new(st: &'a SuffixTree, oshr: &'a OshrTree, idx: &'a OtIndex) -> Searcher<'a> {
        Searcher {
            st,
            oshr,
            idx,
            opts: SearchOptions::default(),
        }
    }

    pub fn with_options(mut self, opts: SearchOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn locate_from_root(&self, pattern: &[u8]) -> Located {
        let mut c = WalkCounter::default();
        Located {
            len: pattern.len(),
            walk: self.st.walk_from(ROOT, pattern, &mut c),
        }
    }

    /// Full pipeline with argument checks and an unconditional witness check.
    pub fn search(&self, pattern: &[u8], i: NodeId) -> Result<QueryResult> {
        if !self.st.is_internal(i) {
            return Err(Error::NotInternal(i));
        }
        if !pattern.is_empty() && !self.idx.config.length_mode.admits(pattern.len()) {
            return Err(Error::PatternLength(pattern.len()));
        }
        let located = self.locate_from_root(pattern);
        let res = self.search_located(&located, i);
        if let Some(j) = res.witness {
            if !verify_witness(self.st, pattern, i, j) {
                return Err(Error::Internal(format!(
                    "witness {j} fails verification under node {i}"
                )));
            }
        }
        Ok(res)
    }

    pub fn search_located(&self, loc: &Located, i: NodeId) -> QueryResult {
        let st = self.st;
        if loc.walk.matched < loc.len {
            return QueryResult::miss(Route::NotInText);
        }
        let e = loc.walk.locus_below;
        if i == ROOT || loc.len == 0 {
            return QueryResult::hit(Route::RootTrivial, st.label_pos(e));
        }
        if let Some(z) = st.suffix_index(e) {
            return self.leaf_case(z, i);
        }
        let list_len = self.idx.entries_at(st, e).len();
        if list_len == 0 {
            return self.base_suffix_case(e, i);
        }
        let res = self.binary_search_case(e, i);
        if res.found || !self.opts.base_suffix_fallback {
            return res;
        }
        let fb = self.base_suffix_case(e, i);
        QueryResult {
            probes: res.probes,
            list_len: res.list_len,
            fallback_hit: fb.found,
            route: if fb.found {
                Route::BaseSuffix
            } else {
                Route::BinarySearch
            },
            ..fb
        }
    }

    /// The pattern occurs once, at suffix `z`.
    pub fn leaf_case(&self, z: usize, i: NodeId) -> QueryResult {
        let d = self.st.depth(i);
        if z >= d && self.st.suffix_under(i, z - d) {
            QueryResult::hit(Route::LeafCase, z - d)
        } else {
            QueryResult::miss(Route::LeafCase)
        }
    }

    pub fn base_suffix_case(&self, e: NodeId, i: NodeId) -> QueryResult {
        let d = self.st.depth(i);
        for b in self.idx.base_suffixes_at(self.st, e) {
            let s = b.suffix as usize;
            if s >= d && self.st.suffix_under(i, s - d) {
                return QueryResult::hit(Route::BaseSuffix, s - d);
            }
        }
        QueryResult::miss(Route::BaseSuffix)
    }

    /// First entry whose OT interval starts at or after `i`'s; a hit when it
    /// also starts inside `i`'s interval.
    pub fn binary_search_case(&self, e: NodeId, i: NodeId) -> QueryResult {
        let list = self.idx.entries_at(self.st, e);
        let span = self.oshr.interval(self.st, i);
        let (mut lo, mut hi) = (0usize, list.len());
        let mut probes = 0u32;
        while lo < hi {
            probes += 1;
            let mid = lo + (hi - lo) / 2;
            if list[mid].interval.left < span.left {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let mut res = match list.get(lo) {
            Some(entry) if entry.interval.left <= span.right => QueryResult {
                origin: Some(entry.origin),
                ..QueryResult::hit(Route::BinarySearch, entry.occ as usize - self.st.depth(i))
            },
            _ => QueryResult::miss(Route::BinarySearch),
        };
        res.probes = probes;
        res.list_len = list.len() as u32;
        res
    }
}

/// Baseline: walk the pattern below `i` symbol by symbol.
pub fn walk_search_baseline(
    st: &SuffixTree,
    pattern: &[u8],
    i: NodeId,
    counter: &mut WalkCounter,
) -> QueryResult {
    let w = st.walk_from(i, pattern, counter);
    if w.matched == pattern.len() {
        QueryResult::hit(Route::Walk, st.label_pos(w.locus_below))
    } else {
        QueryResult::miss(Route::Walk)
    }
}

/// `ceil(log2(m)) + 1`, the probe budget for a list of length `m`.
pub fn probe_bound(m: usize) -> u32 {
    if m <= 1 {
        return 1;
    }
    (usize::BITS - (m - 1).leading_zeros()) + 1
}
