//! Index invariants on random texts, checked against brute force.

use otindex::oracle::{brute_answers, check_records};
use otindex::query::{probe_bound, verify_witness, Searcher};
use otindex::{
    build_index, format, BuildConfig, Classification, LengthMode, OshrLink, SuffixTree, Text, ROOT,
};
use proptest::prelude::*;

fn text_strategy() -> impl Strategy<Value = Vec<u8>> {
    (2usize..=4).prop_flat_map(|sigma| {
        proptest::collection::vec(proptest::sample::select(b"ACGT"[..sigma].to_vec()), 1..90)
    })
}

fn config_strategy() -> impl Strategy<Value = BuildConfig> {
    (
        prop_oneof![
            Just(Classification::DefinitionLiteral),
            Just(Classification::FigureCaption),
            Just(Classification::Union),
        ],
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(
            |(classification, exclusion_rule, extend_keys)| BuildConfig {
                length_mode: LengthMode::All,
                classification,
                exclusion_rule,
                extend_keys,
            },
        )
}

fn tree(body: Vec<u8>) -> SuffixTree {
    SuffixTree::build(Text::with_sentinel(body).unwrap())
}

/// True when `i` is reached from `v` by following suffix links.
fn link_reaches(st: &SuffixTree, mut v: u32, i: u32) -> bool {
    loop {
        if v == i {
            return true;
        }
        if v == ROOT {
            return false;
        }
        v = st.suffix_link(v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn oshr_span_containment_is_link_reachability(body in text_strategy()) {
        let st = tree(body);
        let link = OshrLink::build(&st);
        for &i in st.internal_nodes() {
            for &v in st.internal_nodes() {
                prop_assert_eq!(link.tree.contains(&st, i, v), link_reaches(&st, v, i));
            }
        }
    }

    #[test]
    fn stored_records_are_sound(body in text_strategy(), cfg in config_strategy()) {
        let st = tree(body);
        let link = OshrLink::build(&st);
        let idx = build_index(&st, &link, cfg).unwrap();
        let r = check_records(&st, &link.tree, &idx);
        prop_assert!(r.is_clean(), "{:?}", r);
    }

    #[test]
    fn every_config_is_sound(body in text_strategy(), cfg in config_strategy()) {
        let st = tree(body);
        let link = OshrLink::build(&st);
        let idx = build_index(&st, &link, cfg).unwrap();
        let s = Searcher::new(&st, &link.tree, &idx);
        for &v in st.internal_nodes().iter().chain(std::iter::once(&0)) {
            let p = st.label(v).to_vec();
            for cut in 1..=p.len() {
                let loc = s.locate_from_root(&p[..cut]);
                for &i in st.internal_nodes() {
                    let r = s.search_located(&loc, i);
                    if let Some(j) = r.witness {
                        prop_assert!(verify_witness(&st, &p[..cut], i, j));
                    }
                    prop_assert!(r.probes <= probe_bound(r.list_len as usize));
                }
            }
        }
    }

    #[test]
    fn default_config_matches_brute_force(body in text_strategy()) {
        let st = tree(body);
        let link = OshrLink::build(&st);
        let idx = build_index(&st, &link, BuildConfig::default()).unwrap();
        let s = Searcher::new(&st, &link.tree, &idx);
        let t = st.text().bytes().to_vec();
        for a in 0..t.len() {
            for len in 1..=6.min(t.len() - a) {
                let p = &t[a..a + len];
                let yes = brute_answers(&st, p);
                let loc = s.locate_from_root(p);
                for (k, &i) in st.internal_nodes().iter().enumerate() {
                    let found = s.search_located(&loc, i).found;
                    prop_assert_eq!(found, yes.binary_search(&(k as u32)).is_ok(),
                        "pattern {:?} under {:?}", p, st.label(i));
                }
            }
        }
    }

    /// Each list holds exactly the deepest start nodes (in the suffix-link
    /// tree) under which the host's label occurs.
    #[test]
    fn default_lists_are_minimal(body in text_strategy()) {
        let st = tree(body);
        let link = OshrLink::build(&st);
        let idx = build_index(&st, &link, BuildConfig::default()).unwrap();
        for &e in st.internal_nodes().iter().skip(1) {
            let yes = brute_answers(&st, st.label(e));
            let mut deepest: Vec<u32> = yes
                .iter()
                .map(|&k| st.internal_nodes()[k as usize])
                .filter(|&v| {
                    link.tree.children(&st, v).iter().all(|&c| {
                        yes.binary_search(&(st.internal_index(c).unwrap() as u32)).is_err()
                    })
                })
                .collect();
            let mut keys: Vec<u32> = idx.entries_at(&st, e).iter().map(|x| x.key_node).collect();
            deepest.sort_unstable();
            keys.sort_unstable();
            prop_assert_eq!(keys, deepest);
        }
    }

    #[test]
    fn serialization_round_trips(body in text_strategy(), cfg in config_strategy()) {
        let st = tree(body);
        let link = OshrLink::build(&st);
        let idx = build_index(&st, &link, cfg).unwrap();
        let bytes = format::serialize(&idx);
        prop_assert_eq!(&format::load(&bytes, &st, &link.tree).unwrap(), &idx);
    }

    #[test]
    fn deserialize_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..300)) {
        let _ = format::deserialize(&bytes);
        let mut framed = b"OTIX\x01".to_vec();
        framed.extend_from_slice(&bytes);
        let _ = format::deserialize(&framed);
    }

    #[test]
    fn length_modes_agree_with_full_index(body in text_strategy(), len in 1u32..6) {
        let st = tree(body);
        let link = OshrLink::build(&st);
        let full = build_index(&st, &link, BuildConfig::default()).unwrap();
        let cfg = BuildConfig { length_mode: LengthMode::Exact(len), ..BuildConfig::default() };
        let exact = build_index(&st, &link, cfg).unwrap();
        prop_assert!(exact.total_entries() <= full.total_entries());
        let a = Searcher::new(&st, &link.tree, &full);
        let b = Searcher::new(&st, &link.tree, &exact);
        let t = st.text().bytes().to_vec();
        for start in 0..t.len().saturating_sub(len as usize - 1) {
            let p = &t[start..start + len as usize];
            for &i in st.internal_nodes() {
                prop_assert_eq!(a.search(p, i).unwrap().found, b.search(p, i).unwrap().found);
            }
        }
    }
}
