//! Structural invariants of the suffix tree, checked against naive scans.

use otindex::{SuffixTree, Text, WalkCounter, ROOT};
use proptest::prelude::*;

fn text_strategy() -> impl Strategy<Value = Vec<u8>> {
    (1usize..=4).prop_flat_map(|sigma| {
        proptest::collection::vec(proptest::sample::select(b"ACGT"[..sigma].to_vec()), 1..120)
    })
}

fn naive_occurs(t: &[u8], p: &[u8]) -> bool {
    p.is_empty() || t.windows(p.len()).any(|w| w == p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn one_leaf_per_suffix(body in text_strategy()) {
        let st = SuffixTree::build(Text::with_sentinel(body.clone()).unwrap());
        prop_assert_eq!(st.leaf_count(), body.len() + 1);
        for s in 0..=body.len() {
            let leaf = st.leaf_of_suffix(s).unwrap();
            prop_assert_eq!(st.suffix_index(leaf), Some(s));
            prop_assert_eq!(st.label(leaf), &st.text().bytes()[s..]);
        }
    }

    #[test]
    fn suffix_links_drop_first_symbol(body in text_strategy()) {
        let st = SuffixTree::build(Text::with_sentinel(body).unwrap());
        prop_assert_eq!(st.suffix_link(ROOT), ROOT);
        for &v in st.internal_nodes().iter().skip(1) {
            let w = st.suffix_link(v);
            prop_assert!(st.is_internal(w));
            prop_assert_eq!(st.depth(w) + 1, st.depth(v));
            prop_assert_eq!(st.label(w), &st.label(v)[1..]);
        }
    }

    #[test]
    fn internal_nodes_branch(body in text_strategy()) {
        let st = SuffixTree::build(Text::with_sentinel(body).unwrap());
        for &v in st.internal_nodes() {
            prop_assert!(st.children(v).count() >= 2 || (v == ROOT && st.text().len() == 1));
        }
    }

    #[test]
    fn subtree_holds_exactly_the_matching_suffixes(body in text_strategy()) {
        let st = SuffixTree::build(Text::with_sentinel(body).unwrap());
        let t = st.text().bytes();
        for &v in st.internal_nodes() {
            let label = st.label(v);
            for s in 0..t.len() {
                prop_assert_eq!(st.suffix_under(v, s), t[s..].starts_with(label));
            }
        }
    }

    #[test]
    fn root_walk_matches_naive_search(
        body in text_strategy(),
        pattern in proptest::collection::vec(proptest::sample::select(b"ACGT".to_vec()), 0..8),
    ) {
        let st = SuffixTree::build(Text::with_sentinel(body.clone()).unwrap());
        let mut c = WalkCounter::default();
        let w = st.walk_from(ROOT, &pattern, &mut c);
        prop_assert_eq!(w.matched == pattern.len(), naive_occurs(&body, &pattern));
        if w.matched == pattern.len() {
            prop_assert!(st.label(w.locus_below).starts_with(&pattern));
        }
    }

    #[test]
    fn locate_substring_finds_the_locus(body in text_strategy(), a in 0usize..120, len in 1usize..20) {
        let st = SuffixTree::build(Text::with_sentinel(body.clone()).unwrap());
        let a = a % body.len();
        let len = len.min(body.len() - a);
        let (v, exact) = st.locate_substring(a, len);
        prop_assert!(st.label(v).starts_with(&body[a..a + len]));
        prop_assert_eq!(exact, st.depth(v) == len);
        let p = st.parent(v).unwrap();
        prop_assert!(st.depth(p) < len);
    }
}
