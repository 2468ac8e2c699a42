#![no_main]
use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;

use otindex::format::load;
use otindex::{OshrTree, Searcher, SuffixTree, Text};

const TEXT: &[u8] = b"MISSISSIPPI";

fn tree() -> &'static (SuffixTree, OshrTree) {
    static TREE: OnceLock<(SuffixTree, OshrTree)> = OnceLock::new();
    TREE.get_or_init(|| {
        let st = SuffixTree::build(Text::with_sentinel(TEXT.to_vec()).unwrap());
        let oshr = OshrTree::build(&st);
        (st, oshr)
    })
}

// Anything `load` accepts must be safe to query.
fuzz_target!(|data: &[u8]| {
    let (st, oshr) = tree();
    if let Ok(idx) = load(data, st, oshr) {
        let searcher = Searcher::new(st, oshr, &idx);
        for p in [&b"I"[..], b"S", b"SI", b"SSI", b"P", b"PI", b"ISS"] {
            let loc = searcher.locate_from_root(p);
            for &i in st.internal_nodes() {
                let _ = searcher.search_located(&loc, i);
            }
        }
    }
});
