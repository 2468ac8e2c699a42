//! Depth-stratified benchmark of indexed search against walking below the
//! start node.

use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::build::{internal_subtree_sizes, LengthMode, OtIndex};
use crate::error::{Error, Result};
use crate::oshr::{dense, OshrTree};
use crate::query::{probe_bound, walk_search_baseline, Searcher};
use crate::suffix_tree::{NodeId, SuffixTree, WalkCounter};

pub const PATTERN_LENGTHS: [usize; 10] = [7, 10, 12, 15, 20, 25, 30, 35, 40, 50];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternProtocol {
    pub lengths: Vec<usize>,
    pub per_length: usize,
}

impl Default for PatternProtocol {
    fn default() -> Self {
        PatternProtocol {
            lengths: PATTERN_LENGTHS.to_vec(),
            per_length: 100,
        }
    }
}

/// Start positions of the patterns of length `len`: `10 * i * len` for
/// `i = 1..=per_length`, as long as the pattern fits in `n` symbols.
pub fn pattern_positions(n: usize, len: usize, per_length: usize) -> Vec<usize> {
    (1..=per_length)
        .map(|i| 10 * i * len)
        .take_while(|&p| p + len <= n)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchPattern {
    pub pos: usize,
    pub bytes: Vec<u8>,
}

/// Extracted patterns before the skip rule, grouped by length in protocol
/// order.
pub fn extract_patterns(body: &[u8], protocol: &PatternProtocol) -> Vec<BenchPattern> {
    let mut out = Vec::new();
    for &len in &protocol.lengths {
        for pos in pattern_positions(body.len(), len, protocol.per_length) {
            out.push(BenchPattern {
                pos,
                bytes: body[pos..pos + len].to_vec(),
            });
        }
    }
    out
}

/// Drops patterns whose root walk ends at a leaf, i.e. that occur once.
pub fn apply_skip_rule(st: &SuffixTree, patterns: Vec<BenchPattern>) -> Vec<BenchPattern> {
    patterns
        .into_iter()
        .filter(|p| {
            let mut c = WalkCounter::default();
            let w = st.walk_from(crate::ROOT, &p.bytes, &mut c);
            w.matched == p.bytes.len() && st.is_internal(w.locus_below)
        })
        .collect()
}

/// Up to `cap` internal nodes at string depth `depth`, sampled without
/// replacement from ChaCha8 seeded with `seed + depth`, in preorder.
pub fn sample_starting_nodes(st: &SuffixTree, depth: usize, cap: usize, seed: u64) -> Vec<NodeId> {
    let all = st.internal_at_depth(depth);
    if all.len() <= cap {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(depth as u64));
    let mut picked = sample(&mut rng, all.len(), cap).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|k| all[k]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthRow {
    pub depth: usize,
    pub nodes_at_depth: usize,
    pub patterns: usize,
    pub starting_nodes: usize,
    /// Internal nodes strictly below the starting nodes.
    pub complexity: u64,
    pub ot_time_s: f64,
    pub walk_time_s: f64,
    pub ot_probes: u64,
    pub walk_comparisons: u64,
    pub queries: u64,
    pub found: u64,
    pub probe_violations: u64,
    pub max_probes: u32,
    pub max_list_len: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<DepthRow>,
    pub patterns_extracted: usize,
    pub patterns_used: usize,
}

pub const TSV_HEADER: &str =
    "depth\tnodes_at_depth\tpatterns\tstarting_nodes\tcomplexity\tot_time_s\twalk_time_s\tot_probes\twalk_comparisons";

impl BenchReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from(TSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{}\t{}\n",
                r.depth,
                r.nodes_at_depth,
                r.patterns,
                r.starting_nodes,
                r.complexity,
                r.ot_time_s,
                r.walk_time_s,
                r.ot_probes,
                r.walk_comparisons
            ));
        }
        s
    }

    pub fn probe_violations(&self) -> u64 {
        self.rows.iter().map(|r| r.probe_violations).sum()
    }

    /// Coefficient of variation of the per-query indexed time over depths
    /// `>= from`; small values mean the time is flat in depth.
    pub fn ot_time_cv(&self, from: usize) -> Option<f64> {
        let xs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.depth >= from && r.queries > 0)
            .map(|r| r.ot_time_s / r.queries as f64)
            .collect();
        if xs.len() < 2 {
            return None;
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        Some(var.sqrt() / mean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub seed: u64,
    pub cap: usize,
    pub max_depth: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            seed: 1,
            cap: 1000,
            max_depth: 20,
        }
    }
}

pub fn run_bench(
    st: &SuffixTree,
    oshr: &OshrTree,
    idx: &OtIndex,
    patterns: &[BenchPattern],
    patterns_extracted: usize,
    opts: &BenchOptions,
) -> Result<BenchReport> {
    if idx.config.length_mode != LengthMode::All {
        return Err(Error::Config(
            "the benchmark needs an index built for all pattern lengths".into(),
        ));
    }
    let searcher = Searcher::new(st, oshr, idx);
    let sizes = internal_subtree_sizes(st);
    let stats = st.stats();
    let mut rows = Vec::new();

    for depth in 1..=opts.max_depth {
        let nodes = sample_starting_nodes(st, depth, opts.cap, opts.seed);
        let mut row = DepthRow {
            depth,
            nodes_at_depth: stats.internal_by_depth.get(&depth).copied().unwrap_or(0),
            patterns: patterns.len(),
            starting_nodes: nodes.len(),
            complexity: nodes.iter().map(|&v| sizes[dense(st, v)] as u64 - 1).sum(),
            ot_time_s: 0.0,
            walk_time_s: 0.0,
            ot_probes: 0,
            walk_comparisons: 0,
            queries: 0,
            found: 0,
            probe_violations: 0,
            max_probes: 0,
            max_list_len: 0,
        };

        // Untimed pass: agreement, counters.
        for p in patterns {
            let loc = searcher.locate_from_root(&p.bytes);
            for &i in &nodes {
                let ot = searcher.search_located(&loc, i);
                let mut c = WalkCounter::default();
                let walk = walk_search_baseline(st, &p.bytes, i, &mut c);
                if ot.found != walk.found {
                    return Err(Error::Disagreement(format!(
                        "pattern at {} (length {}) under node {} at depth {}: indexed {}, walk {}",
                        p.pos,
                        p.bytes.len(),
                        i,
                        depth,
                        ot.found,
                        walk.found
                    )));
                }
                row.queries += 1;
                row.found += ot.found as u64;
                row.ot_probes += ot.probes as u64;
                row.walk_comparisons += c.comparisons;
                row.max_probes = row.max_probes.max(ot.probes);
                row.max_list_len = row.max_list_len.max(ot.list_len);
                if ot.probes > probe_bound(ot.list_len as usize) {
                    row.probe_violations += 1;
                }
            }
        }

        let t = Instant::now();
        let mut sink = 0u64;
        for p in patterns {
            let loc = searcher.locate_from_root(&p.bytes);
            for &i in &nodes {
                sink += searcher.search_located(&loc, i).found as u64;
            }
        }
        row.ot_time_s = t.elapsed().as_secs_f64();

        let t = Instant::now();
        for p in patterns {
            for &i in &nodes {
                let mut c = WalkCounter::default();
                sink += walk_search_baseline(st, &p.bytes, i, &mut c).found as u64;
            }
        }
        row.walk_time_s = t.elapsed().as_secs_f64();
        std::hint::black_box(sink);

        rows.push(row);
    }
    Ok(BenchReport {
        rows,
        patterns_extracted,
        patterns_used: patterns.len(),
    })
}

/// Pearson correlation between an internal node's string depth and the
/// length of its entry list, over non-root internal nodes.
pub fn list_size_depth_correlation(st: &SuffixTree, idx: &OtIndex) -> Option<f64> {
    let pts: Vec<(f64, f64)> = st
        .internal_nodes()
        .iter()
        .skip(1)
        .map(|&v| (st.depth(v) as f64, idx.entries_at(st, v).len() as f64))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pts {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::{build_index, BuildConfig};
    use crate::oshr::OshrLink;
    use crate::text::Text;

    #[test]
    fn length_twelve_positions() {
        assert_eq!(&pattern_positions(10_000, 12, 100)[..3], &[120, 240, 360]);
    }

    #[test]
    fn short_text_yields_fewer() {
        assert_eq!(pattern_positions(1000, 50, 100), vec![500]);
        assert_eq!(pattern_positions(1050, 50, 100), vec![500, 1000]);
        assert!(pattern_positions(60, 7, 100).is_empty());
    }

    #[test]
    fn per_length_cap() {
        assert_eq!(pattern_positions(1_000_000, 7, 100).len(), 100);
    }

    #[test]
    fn skip_rule_drops_unique_patterns() {
        let body = b"ACGTTGCAACGTAAAACCCCGGGG".repeat(40);
        let st = SuffixTree::build(Text::with_sentinel(body.clone()).unwrap());
        let pats = vec![
            BenchPattern {
                pos: 0,
                bytes: b"ACGT".to_vec(),
            },
            BenchPattern {
                pos: 0,
                bytes: body[..body.len() - 1].to_vec(),
            },
        ];
        let kept = apply_skip_rule(&st, pats);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].bytes, b"ACGT");
    }

    #[test]
    fn sampling_caps_and_is_deterministic() {
        let body = crate::oracle::genome_like(3, 5000);
        let st = SuffixTree::build(Text::with_sentinel(body).unwrap());
        let all = st.internal_at_depth(3);
        assert_eq!(sample_starting_nodes(&st, 3, 1000, 1), all);
        let few = sample_starting_nodes(&st, 3, 5, 1);
        assert_eq!(few.len(), 5);
        assert_eq!(few, sample_starting_nodes(&st, 3, 5, 1));
        assert!(sample_starting_nodes(&st, 10_000, 5, 1).is_empty());
    }

    #[test]
    fn small_bench_runs() {
        let body = crate::oracle::genome_like(5, 30_000);
        let st = SuffixTree::build(Text::with_sentinel(body.clone()).unwrap());
        let link = OshrLink::build(&st);
        let idx = build_index(&st, &link, BuildConfig::default()).unwrap();
        let proto = PatternProtocol::default();
        let raw = extract_patterns(&body, &proto);
        let n_raw = raw.len();
        let pats = apply_skip_rule(&st, raw);
        let opts = BenchOptions {
            cap: 50,
            max_depth: 6,
            ..BenchOptions::default()
        };
        let r = run_bench(&st, &link.tree, &idx, &pats, n_raw, &opts).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert_eq!(r.probe_violations(), 0);
        assert!(r.to_tsv().starts_with(TSV_HEADER));
    }
}
