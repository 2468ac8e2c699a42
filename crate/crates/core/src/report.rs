//! Table-shaped TSV summaries of trees and indexes.

use std::fmt::Write;

use crate::build::OtIndex;
use crate::oshr::OshrLink;
use crate::suffix_tree::SuffixTree;

/// Reference sub-index sizes for the WS1 bacterium genome, for comparison only.
pub const WS1_REFERENCE: [(&str, u64); 4] = [
    ("Size of index of base paths", 1_470_339),
    ("Size of index of Hanadi nodes", 1_212_706),
    ("Size of index of Srivastava nodes", 219_229),
    ("Total size of three indexes", 2_902_274),
];

fn row(out: &mut String, name: &str, value: impl std::fmt::Display) {
    writeln!(out, "{name}\t{value}").unwrap();
}

/// Alphabet, leaf and internal-node counts with and without the sentinel
/// and root, then internal nodes per string depth.
pub fn tree_stats_tsv(st: &SuffixTree) -> String {
    let stats = st.stats();
    let sigma = st.text().alphabet().size();
    let mut out = String::from("row\tvalue\n");
    row(&mut out, "No. of alphabets", sigma);
    row(&mut out, "No. of alphabets (with sentinel)", sigma + 1);
    row(
        &mut out,
        "No. of nuc/leaf nodes",
        stats.leaves_without_sentinel(),
    );
    row(
        &mut out,
        "No. of nuc/leaf nodes (with sentinel leaf)",
        stats.leaves,
    );
    row(
        &mut out,
        "No. of Internal nodes",
        stats.internal_without_root(),
    );
    row(
        &mut out,
        "No. of Internal nodes (with root)",
        stats.internal_nodes,
    );
    for (d, c) in &stats.internal_by_depth {
        row(&mut out, &format!("No of nodes at depth {d}"), c);
    }
    out
}

/// Sub-index sizes of a built index. Counts that need the tree are derived
/// from the stored text length and node count.
pub fn index_stats_tsv(idx: &OtIndex) -> String {
    let s = &idx.stats;
    let n = idx.text_len() - 1;
    let sigma = idx.sigma() as u64;
    let mut out = String::from("row\tvalue\n");
    row(&mut out, "No. of alphabets", sigma);
    row(&mut out, "No. of alphabets (with sentinel)", sigma + 1);
    row(&mut out, "No. of nuc/leaf nodes", n);
    row(
        &mut out,
        "No. of nuc/leaf nodes (with sentinel leaf)",
        n + 1,
    );
    row(&mut out, "No. of Internal nodes", idx.node_slots() - 1);
    row(
        &mut out,
        "No. of Internal nodes (with root)",
        idx.node_slots(),
    );
    row(&mut out, "Size of index of base paths", s.entries[0]);
    row(&mut out, "Size of index of Hanadi nodes", s.entries[1]);
    row(&mut out, "Size of index of Srivastava nodes", s.entries[2]);
    row(&mut out, "Total size of three indexes", s.total());
    row(&mut out, "Base suffixes", s.base_suffixes);
    row(&mut out, "Largest node list", idx.max_host_len());
    row(
        &mut out,
        "Total over sigma*n",
        format!("{:.4}", s.total() as f64 / (sigma * n).max(1) as f64),
    );
    row(&mut out, "Base paths indexed", s.base_paths);
    row(
        &mut out,
        "Base paths already indexed by special nodes",
        s.skipped_indexed_paths,
    );
    row(
        &mut out,
        "Base paths excluded by reference internal nodes",
        s.excluded_by_rule,
    );
    row(&mut out, "Special node references", s.special_refs);
    for (name, v) in WS1_REFERENCE {
        row(&mut out, &format!("{name} (WS1 reference)"), v);
    }
    out
}

pub fn oshr_stats_tsv(st: &SuffixTree, link: &OshrLink) -> String {
    let s = link.stats(st);
    let mut out = String::from("row\tvalue\n");
    row(&mut out, "OSHR internal nodes", s.oshr_internal);
    row(&mut out, "OSHR leaf nodes", s.oshr_leaf);
    row(&mut out, "Reference leaf contexts", s.contexts);
    row(&mut out, "Base suffixes", s.base_suffixes);
    row(
        &mut out,
        "Nodes with a reference internal node",
        s.nodes_with_reference_internal,
    );
    row(
        &mut out,
        "Nodes with more than sigma base suffixes",
        s.nodes_over_sigma,
    );
    for (k, c) in &s.base_suffix_histogram {
        row(&mut out, &format!("Nodes with {k} base suffixes"), c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::{build_index, BuildConfig};
    use crate::text::Text;

    #[test]
    fn banana_rows() {
        let st = SuffixTree::build(Text::with_sentinel(b"BANANA".to_vec()).unwrap());
        let t = tree_stats_tsv(&st);
        assert!(t.contains("No. of alphabets\t3\n"));
        assert!(t.contains("No. of nuc/leaf nodes\t6\n"));
        assert!(t.contains("No. of Internal nodes\t3\n"));
        assert!(t.contains("No of nodes at depth 2\t1\n"));

        let link = OshrLink::build(&st);
        let idx = build_index(&st, &link, BuildConfig::default()).unwrap();
        let t = index_stats_tsv(&idx);
        assert!(t.contains("No. of Internal nodes\t3\n"));
        assert!(t.contains(&format!(
            "Total size of three indexes\t{}\n",
            idx.total_entries()
        )));

        let t = oshr_stats_tsv(&st, &link);
        assert!(t.contains("OSHR internal nodes\t3\n"));
        assert!(t.contains("OSHR leaf nodes\t1\n"));
    }
}
