//! Ukkonen suffix tree over a sentinel-terminated [`Text`].
//!
//! Nodes live in one arena. Edges store `(start, end)` positions into the
//! text; children of a node form a singly linked list kept sorted by first
//! symbol (sentinel first), which fixes the left-to-right leaf order.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::text::Text;

pub type NodeId = u32;

/// The root always occupies slot zero of the arena.
pub const ROOT: NodeId = 0;

pub(crate) const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    start: u32,
    end: u32,
    parent: u32,
    link: u32,
    first_child: u32,
    next_sibling: u32,
    depth: u32,
    suffix: u32,
}

impl Node {
    fn new(start: u32, end: u32, parent: u32, suffix: u32) -> Node {
        Node {
            start,
            end,
            parent,
            link: ROOT,
            first_child: NIL,
            next_sibling: NIL,
            depth: 0,
            suffix,
        }
    }
}

/// Result of greedily matching a pattern downward from some node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOutcome {
    /// Number of pattern symbols matched.
    pub matched: usize,
    /// Node at, or immediately below, the end of the match.
    pub locus_below: NodeId,
    /// True when the match ends exactly on `locus_below`.
    pub exact_node: bool,
}

/// Operation counters for walks.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct WalkCounter {
    pub comparisons: u64,
    pub child_lookups: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeStats {
    /// Leaves including the sentinel-only leaf.
    pub leaves: usize,
    /// Internal nodes including the root.
    pub internal_nodes: usize,
    /// Internal-node count per string depth.
    pub internal_by_depth: BTreeMap<usize, usize>,
}

impl TreeStats {
    pub fn leaves_without_sentinel(&self) -> usize {
        self.leaves - 1
    }

    pub fn internal_without_root(&self) -> usize {
        self.internal_nodes - 1
    }
}

pub struct SuffixTree {
    text: Text,
    nodes: Vec<Node>,
    leaf_of_suffix: Vec<u32>,
    /// Leaf suffix index by left-to-right rank.
    leaf_order: Vec<u32>,
    st_left: Vec<u32>,
    st_right: Vec<u32>,
    /// Internal nodes in preorder.
    internal_ids: Vec<NodeId>,
    /// Dense index into `internal_ids`, `NIL` for leaves.
    internal_index: Vec<u32>,
}

impl SuffixTree {
    pub fn build(text: Text) -> SuffixTree {
        let t = text.bytes();
        let len = t.len();
        assert!(
            len < (NIL - 1) as usize,
            "text too long for 32-bit positions"
        );

        let mut nodes: Vec<Node> = Vec::with_capacity(2 * len + 1);
        nodes.push(Node::new(0, 0, NIL, NIL));

        let mut active_node = ROOT;
        let mut active_edge = 0usize;
        let mut active_len = 0usize;
        let mut remainder = 0usize;

        for i in 0..len {
            remainder += 1;
            let mut last_new = NIL;
            while remainder > 0 {
                if active_len == 0 {
                    active_edge = i;
                }
                let suffix = (i + 1 - remainder) as u32;
                match find_child(&nodes, &text, active_node, t[active_edge]) {
                    None => {
                        let leaf = nodes.len() as u32;
                        nodes.push(Node::new(i as u32, NIL, active_node, suffix));
                        insert_child(&mut nodes, &text, active_node, leaf);
                        if last_new != NIL {
                            nodes[last_new as usize].link = active_node;
                            last_new = NIL;
                        }
                    }
                    Some(next) => {
                        let nx = &nodes[next as usize];
                        let edge_end = if nx.end == NIL {
                            i + 1
                        } else {
                            nx.end as usize
                        };
                        let edge_len = edge_end - nx.start as usize;
                        if active_len >= edge_len {
                            active_edge += edge_len;
                            active_len -= edge_len;
                            active_node = next;
                            continue;
                        }
                        if t[nx.start as usize + active_len] == t[i] {
                            if last_new != NIL && active_node != ROOT {
                                nodes[last_new as usize].link = active_node;
                            }
                            active_len += 1;
                            break;
                        }
                        let split_start = nx.start;
                        let split = nodes.len() as u32;
                        nodes.push(Node::new(
                            split_start,
                            split_start + active_len as u32,
                            active_node,
                            NIL,
                        ));
                        replace_child(&mut nodes, active_node, next, split);
                        nodes[next as usize].start += active_len as u32;
                        nodes[next as usize].parent = split;
                        insert_child(&mut nodes, &text, split, next);
                        let leaf = nodes.len() as u32;
                        nodes.push(Node::new(i as u32, NIL, split, suffix));
                        insert_child(&mut nodes, &text, split, leaf);
                        if last_new != NIL {
                            nodes[last_new as usize].link = split;
                        }
                        last_new = split;
                    }
                }
                remainder -= 1;
                if active_node == ROOT && active_len > 0 {
                    active_len -= 1;
                    active_edge = i + 1 - remainder;
                } else if active_node != ROOT {
                    active_node = nodes[active_node as usize].link;
                }
            }
        }
        debug_assert_eq!(remainder, 0);

        for node in nodes.iter_mut() {
            if node.end == NIL {
                node.end = len as u32;
            }
        }
        nodes[ROOT as usize].link = ROOT;

        let mut tree = SuffixTree {
            text,
            leaf_of_suffix: vec![NIL; len],
            leaf_order: Vec::with_capacity(len),
            st_left: vec![0; nodes.len()],
            st_right: vec![0; nodes.len()],
            internal_ids: Vec::new(),
            internal_index: vec![NIL; nodes.len()],
            nodes,
        };
        tree.finish();
        tree
    }

    /// One preorder pass: string depths, leaf ranks, subtree intervals.
    fn finish(&mut self) {
        let mut stack: Vec<(NodeId, bool)> = vec![(ROOT, false)];
        let mut children = Vec::new();
        while let Some((v, done)) = stack.pop() {
            let vi = v as usize;
            if done {
                self.st_right[vi] = self.leaf_order.len() as u32 - 1;
                continue;
            }
            if v != ROOT {
                let p = self.nodes[vi].parent as usize;
                let edge = self.nodes[vi].end - self.nodes[vi].start;
                self.nodes[vi].depth = self.nodes[p].depth + edge;
            }
            self.st_left[vi] = self.leaf_order.len() as u32;
            let suffix = self.nodes[vi].suffix;
            if suffix != NIL {
                self.leaf_of_suffix[suffix as usize] = v;
                self.leaf_order.push(suffix);
                self.st_right[vi] = self.st_left[vi];
                debug_assert_eq!(
                    self.nodes[vi].depth as usize,
                    self.text.len() - suffix as usize
                );
                continue;
            }
            self.internal_index[vi] = self.internal_ids.len() as u32;
            self.internal_ids.push(v);
            stack.push((v, true));
            children.clear();
            children.extend(self.children(v));
            for &c in children.iter().rev() {
                stack.push((c, false));
            }
        }
    }

    pub fn text(&self) -> &Text {
        &self.text
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_order.len()
    }

    pub fn internal_count(&self) -> usize {
        self.internal_ids.len()
    }

    /// Internal nodes (root first) in preorder.
    pub fn internal_nodes(&self) -> &[NodeId] {
        &self.internal_ids
    }

    /// Dense position of an internal node in [`Self::internal_nodes`].
    #[inline]
    pub fn internal_index(&self, v: NodeId) -> Option<usize> {
        match self.internal_index[v as usize] {
            NIL => None,
            k => Some(k as usize),
        }
    }

    #[inline]
    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v as usize].suffix != NIL
    }

    #[inline]
    pub fn is_internal(&self, v: NodeId) -> bool {
        !self.is_leaf(v)
    }

    #[inline]
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        match self.nodes[v as usize].parent {
            NIL => None,
            p => Some(p),
        }
    }

    /// String depth: total label length from the root.
    #[inline]
    pub fn depth(&self, v: NodeId) -> usize {
        self.nodes[v as usize].depth as usize
    }

    /// Suffix link of an internal node; the root links to itself.
    #[inline]
    pub fn suffix_link(&self, v: NodeId) -> NodeId {
        debug_assert!(self.is_internal(v));
        self.nodes[v as usize].link
    }

    #[inline]
    pub fn suffix_index(&self, v: NodeId) -> Option<usize> {
        match self.nodes[v as usize].suffix {
            NIL => None,
            s => Some(s as usize),
        }
    }

    /// Edge label positions `(start, end)` of the edge entering `v`.
    pub fn edge(&self, v: NodeId) -> (usize, usize) {
        let n = &self.nodes[v as usize];
        (n.start as usize, n.end as usize)
    }

    /// Children in ascending first-symbol order.
    pub fn children(&self, v: NodeId) -> Children<'_> {
        Children {
            nodes: &self.nodes,
            next: self.nodes[v as usize].first_child,
        }
    }

    /// Suffix index of the leftmost leaf below `v`; `label(v)` starts there.
    #[inline]
    pub fn label_pos(&self, v: NodeId) -> usize {
        self.leaf_order[self.st_left[v as usize] as usize] as usize
    }

    pub fn label(&self, v: NodeId) -> &[u8] {
        let p = self.label_pos(v);
        &self.text.bytes()[p..p + self.depth(v)]
    }

    pub fn leaf_of_suffix(&self, s: usize) -> Result<NodeId> {
        self.leaf_of_suffix
            .get(s)
            .copied()
            .ok_or(Error::SuffixOutOfRange(s, self.text.len()))
    }

    #[inline]
    pub(crate) fn leaf_unchecked(&self, s: usize) -> NodeId {
        self.leaf_of_suffix[s]
    }

    #[inline]
    pub fn leaf_rank(&self, leaf: NodeId) -> usize {
        debug_assert!(self.is_leaf(leaf));
        self.st_left[leaf as usize] as usize
    }

    /// Suffix index of the leaf at a given left-to-right rank.
    pub fn suffix_at_rank(&self, rank: usize) -> usize {
        self.leaf_order[rank] as usize
    }

    /// Min/max leaf rank inside the subtree of `v`.
    #[inline]
    pub fn interval(&self, v: NodeId) -> (usize, usize) {
        (
            self.st_left[v as usize] as usize,
            self.st_right[v as usize] as usize,
        )
    }

    /// True when `v` lies in the subtree of `anc` (or equals it).
    #[inline]
    pub fn contains(&self, anc: NodeId, v: NodeId) -> bool {
        let a = anc as usize;
        let v = v as usize;
        self.st_left[a] <= self.st_left[v] && self.st_right[v] <= self.st_right[a]
    }

    /// True when the leaf of suffix `s` lies under `anc`.
    #[inline]
    pub fn suffix_under(&self, anc: NodeId, s: usize) -> bool {
        let r = self.st_left[self.leaf_of_suffix[s] as usize];
        self.st_left[anc as usize] <= r && r <= self.st_right[anc as usize]
    }

    /// The ancestor-or-self of `v` with string depth exactly `depth`.
    pub fn node_at_depth_on_path(&self, v: NodeId, depth: usize) -> Option<NodeId> {
        let mut cur = v;
        while self.depth(cur) > depth {
            cur = self.nodes[cur as usize].parent;
        }
        (self.depth(cur) == depth).then_some(cur)
    }

    #[inline]
    pub fn first_symbol(&self, v: NodeId) -> u8 {
        self.text.bytes()[self.nodes[v as usize].start as usize]
    }

    #[inline]
    pub fn child(&self, v: NodeId, symbol: u8) -> Option<NodeId> {
        find_child(&self.nodes, &self.text, v, symbol)
    }

    /// Greedy match of `pattern` below `start`.
    pub fn walk_from(
        &self,
        start: NodeId,
        pattern: &[u8],
        counter: &mut WalkCounter,
    ) -> WalkOutcome {
        let t = self.text.bytes();
        let mut cur = start;
        let mut matched = 0usize;
        loop {
            if matched == pattern.len() {
                return WalkOutcome {
                    matched,
                    locus_below: cur,
                    exact_node: true,
                };
            }
            counter.child_lookups += 1;
            let Some(next) = self.child(cur, pattern[matched]) else {
                counter.comparisons += 1;
                return WalkOutcome {
                    matched,
                    locus_below: cur,
                    exact_node: true,
                };
            };
            let base = self.label_pos(next);
            let edge_len = self.depth(next) - self.depth(cur);
            let text_off = base + self.depth(cur);
            // First symbol already agreed through the child lookup.
            counter.comparisons += 1;
            matched += 1;
            let mut k = 1;
            while k < edge_len && matched < pattern.len() {
                counter.comparisons += 1;
                if t[text_off + k] != pattern[matched] {
                    return WalkOutcome {
                        matched,
                        locus_below: next,
                        exact_node: false,
                    };
                }
                k += 1;
                matched += 1;
            }
            if k < edge_len {
                return WalkOutcome {
                    matched,
                    locus_below: next,
                    exact_node: false,
                };
            }
            cur = next;
        }
    }

    /// Locates the node spelling `text[pos..pos + len)` with skip/count
    /// descent, or the node just below if that string ends mid-edge.
    pub fn locate_substring(&self, pos: usize, len: usize) -> (NodeId, bool) {
        let t = self.text.bytes();
        let mut cur = ROOT;
        while self.depth(cur) < len {
            cur = self
                .child(cur, t[pos + self.depth(cur)])
                .expect("substring of the text must be present");
        }
        (cur, self.depth(cur) == len)
    }

    pub fn stats(&self) -> TreeStats {
        let mut internal_by_depth = BTreeMap::new();
        for &v in &self.internal_ids {
            *internal_by_depth.entry(self.depth(v)).or_insert(0) += 1;
        }
        TreeStats {
            leaves: self.leaf_count(),
            internal_nodes: self.internal_count(),
            internal_by_depth,
        }
    }

    /// Internal nodes at an exact string depth, in preorder.
    pub fn internal_at_depth(&self, depth: usize) -> Vec<NodeId> {
        self.internal_ids
            .iter()
            .copied()
            .filter(|&v| self.depth(v) == depth)
            .collect()
    }
}

pub struct Children<'a> {
    nodes: &'a [Node],
    next: u32,
}

impl Iterator for Children<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        if self.next == NIL {
            return None;
        }
        let c = self.next;
        self.next = self.nodes[c as usize].next_sibling;
        Some(c)
    }
}

fn find_child(nodes: &[Node], text: &Text, v: NodeId, symbol: u8) -> Option<NodeId> {
    let t = text.bytes();
    let key = text.symbol_key(symbol);
    let mut c = nodes[v as usize].first_child;
    while c != NIL {
        let first = t[nodes[c as usize].start as usize];
        if first == symbol {
            return Some(c);
        }
        if text.symbol_key(first) > key {
            return None;
        }
        c = nodes[c as usize].next_sibling;
    }
    None
}

fn insert_child(nodes: &mut [Node], text: &Text, v: NodeId, child: NodeId) {
    let t = text.bytes();
    let key = text.symbol_key(t[nodes[child as usize].start as usize]);
    let mut prev = NIL;
    let mut c = nodes[v as usize].first_child;
    while c != NIL && text.symbol_key(t[nodes[c as usize].start as usize]) < key {
        prev = c;
        c = nodes[c as usize].next_sibling;
    }
    nodes[child as usize].next_sibling = c;
    if prev == NIL {
        nodes[v as usize].first_child = child;
    } else {
        nodes[prev as usize].next_sibling = child;
    }
}

fn replace_child(nodes: &mut [Node], v: NodeId, old: NodeId, new: NodeId) {
    nodes[new as usize].next_sibling = nodes[old as usize].next_sibling;
    nodes[old as usize].next_sibling = NIL;
    let mut c = nodes[v as usize].first_child;
    if c == old {
        nodes[v as usize].first_child = new;
        return;
    }
    while nodes[c as usize].next_sibling != old {
        c = nodes[c as usize].next_sibling;
    }
    nodes[c as usize].next_sibling = new;
}
