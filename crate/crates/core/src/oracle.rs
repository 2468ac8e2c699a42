//! Brute-force ground truth and the differential auditor.
//!
//! Ground truth is computed by scanning the text; the only thing taken from
//! the suffix tree is the list of questions (internal nodes and their labels,
//! candidate patterns).

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::build::{build_index, BuildConfig, Classification, LengthMode, Origin, OtIndex};
use crate::error::{Error, Result};
use crate::oshr::{dense, OshrLink, OshrTree};
use crate::query::{probe_bound, verify_witness, walk_search_baseline, Route, Searcher};
use crate::suffix_tree::{SuffixTree, WalkCounter};
use crate::text::Text;

pub const DEFAULT_CAP: usize = 512;

const SYMBOLS: &[u8; 4] = b"ACGT";

/// Uniform i.i.d. text over the first `sigma` symbols of `ACGT`.
pub fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: usize) -> Vec<u8> {
    (0..n).map(|_| SYMBOLS[rng.gen_range(0..sigma)]).collect()
}

/// The audit corpus: `count` texts with `n` uniform in `[16, max_n]` and
/// `sigma` uniform in `{2, 3, 4}`, drawn from ChaCha8 seeded with `seed`.
pub fn corpus(seed: u64, count: usize, max_n: usize) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_n = max_n.max(16);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(16..=max_n);
            let sigma = rng.gen_range(2..=4);
            random_text(&mut rng, n, sigma)
        })
        .collect()
}

/// Repeat-rich DNA-like text: an order-3 Markov background with biased
/// transitions, interleaved with mutated copies of earlier segments.
pub fn genome_like(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = [[0f64; 4]; 64];
    for row in table.iter_mut() {
        let mut acc = 0.0;
        for w in row.iter_mut() {
            acc += rng.gen_range(0.2..1.0);
            *w = acc;
        }
        for w in row.iter_mut() {
            *w /= acc;
        }
    }
    let mut out: Vec<u8> = Vec::with_capacity(len);
    let mut ctx = 0usize;
    while out.len() < len {
        if out.len() > 1000 && rng.gen_bool(0.002) {
            let copy_len = rng.gen_range(50..2000).min(len - out.len());
            let from = rng.gen_range(0..out.len() - copy_len.min(out.len() - 1));
            for k in 0..copy_len {
                let mut b = out[from + k];
                if rng.gen_bool(0.02) {
                    b = SYMBOLS[rng.gen_range(0..4)];
                }
                out.push(b);
                if out.len() == len {
                    break;
                }
            }
            continue;
        }
        let u: f64 = rng.gen();
        let s = table[ctx].iter().position(|&w| u < w).unwrap_or(3);
        out.push(SYMBOLS[s]);
        ctx = ((ctx << 2) | s) & 63;
    }
    out
}

/// Questions and brute-force answers for one text.
pub struct GroundTruth {
    /// Candidate patterns, sorted and distinct.
    pub patterns: Vec<Vec<u8>>,
    /// For each pattern, the dense indices of the internal nodes `i` such
    /// that `label(i) + p` occurs in the text, ascending.
    pub yes: Vec<Vec<u32>>,
}

/// Candidate patterns: labels of all non-root nodes, the first and last
/// cut on every edge, and every substring up to `max_len` when `n <= 128`.
pub fn candidate_patterns(st: &SuffixTree, max_len: usize) -> Vec<Vec<u8>> {
    let t = st.text().bytes();
    let mut set: HashSet<&[u8]> = HashSet::new();
    for v in 1..st.node_count() as u32 {
        let p = st.label_pos(v);
        let d = st.depth(v);
        let dp = st.depth(st.parent(v).unwrap());
        set.insert(&t[p..p + d]);
        set.insert(&t[p..p + dp + 1]);
        if d - 1 > dp {
            set.insert(&t[p..p + d - 1]);
        }
    }
    if st.text().n() <= 128 {
        for a in 0..t.len() {
            for len in 1..=max_len.min(t.len() - a) {
                set.insert(&t[a..a + len]);
            }
        }
    }
    let mut out: Vec<Vec<u8>> = set.into_iter().map(|p| p.to_vec()).collect();
    out.sort_unstable();
    out
}

pub fn brute_truth(st: &SuffixTree, max_len: usize, cap: usize) -> Result<GroundTruth> {
    let n = st.text().n();
    if n > cap {
        return Err(Error::OracleCap(n, cap));
    }
    let patterns = candidate_patterns(st, max_len);
    let yes = patterns.iter().map(|p| brute_answers(st, p)).collect();
    Ok(GroundTruth { patterns, yes })
}

/// Dense indices of internal nodes `i` with `label(i) + p` in the text.
pub fn brute_answers(st: &SuffixTree, p: &[u8]) -> Vec<u32> {
    let t = st.text().bytes();
    let mut by_label: HashMap<&[u8], u32> = HashMap::new();
    let mut depths = Vec::new();
    for (k, &v) in st.internal_nodes().iter().enumerate() {
        by_label.insert(st.label(v), k as u32);
        depths.push(st.depth(v));
    }
    depths.sort_unstable();
    depths.dedup();
    let mut out = Vec::new();
    if p.len() <= t.len() {
        for q in 0..=t.len() - p.len() {
            if &t[q..q + p.len()] != p {
                continue;
            }
            for &d in depths.iter().take_while(|&&d| d <= q) {
                if let Some(&k) = by_label.get(&t[q - d..q]) {
                    out.push(k);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Text-level checks of every stored record.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SoundnessReport {
    pub entries_checked: u64,
    pub entry_violations: u64,
    pub base_suffixes_checked: u64,
    pub base_suffix_violations: u64,
}

impl SoundnessReport {
    pub fn is_clean(&self) -> bool {
        self.entry_violations == 0 && self.base_suffix_violations == 0
    }
}

/// An entry at host `e` is sound when its interval is its key's OSHR span,
/// the text at `occ` spells `label(e)`, and the suffix `occ - depth(key)`
/// lies under the key. A base suffix `s` at `w` is sound when the text at
/// `s` spells `label(w)`.
pub fn check_records(st: &SuffixTree, oshr: &OshrTree, idx: &OtIndex) -> SoundnessReport {
    let t = st.text().bytes();
    let mut r = SoundnessReport::default();
    for (k, &e) in st.internal_nodes().iter().enumerate() {
        let label = st.label(e);
        for entry in idx.entries_at(st, e) {
            r.entries_checked += 1;
            let occ = entry.occ as usize;
            let key = entry.key_node;
            let ok = st.is_internal(key)
                && entry.interval == oshr.interval(st, key)
                && occ >= st.depth(key)
                && occ + label.len() <= t.len()
                && &t[occ..occ + label.len()] == label
                && st.suffix_under(key, occ - st.depth(key))
                && &t[occ - st.depth(key)..occ] == st.label(key);
            if !ok {
                r.entry_violations += 1;
            }
        }
        debug_assert_eq!(dense(st, e), k);
        for b in idx.base_suffixes_at(st, e) {
            r.base_suffixes_checked += 1;
            let s = b.suffix as usize;
            if !(s + label.len() <= t.len() && &t[s..s + label.len()] == label) {
                r.base_suffix_violations += 1;
            }
        }
    }
    r
}

/// Named build configurations audited together.
pub fn config_matrix(which: &str) -> Result<Vec<(String, BuildConfig)>> {
    let mk = |classification, exclusion_rule, extend_keys| BuildConfig {
        length_mode: LengthMode::All,
        classification,
        exclusion_rule,
        extend_keys,
    };
    let all = vec![
        (
            "literal".to_string(),
            mk(Classification::DefinitionLiteral, true, false),
        ),
        (
            "caption".to_string(),
            mk(Classification::FigureCaption, true, false),
        ),
        ("union".to_string(), mk(Classification::Union, true, false)),
        (
            "literal+ext".to_string(),
            mk(Classification::DefinitionLiteral, true, true),
        ),
        (
            "caption+ext".to_string(),
            mk(Classification::FigureCaption, true, true),
        ),
        (
            "union+ext".to_string(),
            mk(Classification::Union, true, true),
        ),
        (
            "union+ext-excl".to_string(),
            mk(Classification::Union, false, true),
        ),
    ];
    if which == "all" {
        return Ok(all);
    }
    let mut out = Vec::new();
    for name in which.split(',') {
        match all.iter().find(|(n, _)| n == name.trim()) {
            Some(c) => out.push(c.clone()),
            None => {
                return Err(Error::Config(format!(
                    "unknown audit configuration {name:?}"
                )))
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Miss,
    Spurious,
    BadWitness,
}

impl FailureKind {
    pub fn name(&self) -> &'static str {
        match self {
            FailureKind::Miss => "miss",
            FailureKind::Spurious => "spurious",
            FailureKind::BadWitness => "bad_witness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: FailureKind,
    /// Text body without the sentinel.
    pub text: String,
    pub pattern: String,
    pub node_label: String,
    pub route: Route,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RouteTally {
    pub hits: u64,
    pub misses: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub name: String,
    pub config: BuildConfig,
    pub texts: u64,
    pub queries: u64,
    pub positives: u64,
    /// Witnesses that fail direct verification.
    pub soundness_violations: u64,
    pub spurious_hits: u64,
    pub misses: u64,
    /// Misses that would occur with the base-suffix fallback disabled.
    pub misses_without_fallback: u64,
    pub fallback_hits: u64,
    pub by_route: BTreeMap<Route, RouteTally>,
    pub hits_by_origin: [u64; 3],
    pub records: SoundnessReport,
    pub probe_violations: u64,
    pub max_probes: u32,
    pub entries: u64,
    pub entries_by_origin: [u64; 3],
    /// Texts whose entry total exceeds `2 * sigma * n`.
    pub size_bound_violations: u64,
    /// Largest `entries / (sigma * n)` seen.
    pub max_size_ratio: f64,
    /// Texts on which the entry counts are not BasePath >= Hanadi >= Srivastava.
    pub ordering_deviations: u64,
    /// Nodes holding more than sigma base suffixes.
    pub nodes_over_sigma: u64,
    /// Texts with at least one miss.
    pub texts_with_misses: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl AuditReport {
    fn new(name: &str, config: BuildConfig) -> AuditReport {
        AuditReport {
            name: name.to_string(),
            config,
            texts: 0,
            queries: 0,
            positives: 0,
            soundness_violations: 0,
            spurious_hits: 0,
            misses: 0,
            misses_without_fallback: 0,
            fallback_hits: 0,
            by_route: BTreeMap::new(),
            hits_by_origin: [0; 3],
            records: SoundnessReport::default(),
            probe_violations: 0,
            max_probes: 0,
            entries: 0,
            entries_by_origin: [0; 3],
            size_bound_violations: 0,
            max_size_ratio: 0.0,
            ordering_deviations: 0,
            nodes_over_sigma: 0,
            texts_with_misses: 0,
            counterexamples: Vec::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.misses == 0
    }

    pub fn is_sound(&self) -> bool {
        self.spurious_hits == 0 && self.soundness_violations == 0 && self.records.is_clean()
    }

    /// Folds `other` into `self`; counterexamples are concatenated.
    pub fn merge(&mut self, other: &AuditReport) {
        self.texts += other.texts;
        self.queries += other.queries;
        self.positives += other.positives;
        self.soundness_violations += other.soundness_violations;
        self.spurious_hits += other.spurious_hits;
        self.misses += other.misses;
        self.misses_without_fallback += other.misses_without_fallback;
        self.fallback_hits += other.fallback_hits;
        for (route, t) in &other.by_route {
            let mine = self.by_route.entry(*route).or_default();
            mine.hits += t.hits;
            mine.misses += t.misses;
        }
        for k in 0..3 {
            self.hits_by_origin[k] += other.hits_by_origin[k];
            self.entries_by_origin[k] += other.entries_by_origin[k];
        }
        self.records.entries_checked += other.records.entries_checked;
        self.records.entry_violations += other.records.entry_violations;
        self.records.base_suffixes_checked += other.records.base_suffixes_checked;
        self.records.base_suffix_violations += other.records.base_suffix_violations;
        self.probe_violations += other.probe_violations;
        self.max_probes = self.max_probes.max(other.max_probes);
        self.entries += other.entries;
        self.size_bound_violations += other.size_bound_violations;
        self.max_size_ratio = self.max_size_ratio.max(other.max_size_ratio);
        self.ordering_deviations += other.ordering_deviations;
        self.nodes_over_sigma += other.nodes_over_sigma;
        self.texts_with_misses += other.texts_with_misses;
        self.counterexamples
            .extend(other.counterexamples.iter().cloned());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    /// Longest exhaustive substring pattern for short texts.
    pub max_len: usize,
    pub cap: usize,
    /// Counterexamples kept per configuration.
    pub max_counterexamples: usize,
    pub minimize: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            max_len: 12,
            cap: DEFAULT_CAP,
            max_counterexamples: 8,
            minimize: true,
        }
    }
}

/// Per-text results shared by every configuration.
pub struct TextAudit {
    pub reports: Vec<AuditReport>,
    /// Pairs on which the walking baseline disagrees with the oracle.
    pub walk_disagreements: u64,
}

struct Prepared {
    st: SuffixTree,
    link: OshrLink,
    truth: GroundTruth,
}

fn prepare(body: &[u8], opts: &AuditOptions) -> Result<Prepared> {
    let st = SuffixTree::build(Text::with_sentinel(body.to_vec())?);
    let link = OshrLink::build(&st);
    let truth = brute_truth(&st, opts.max_len, opts.cap)?;
    Ok(Prepared { st, link, truth })
}

fn render(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

/// Runs one configuration over a prepared text. Returns the report and the
/// first failure seen, if any.
fn audit_prepared(
    prep: &Prepared,
    name: &str,
    cfg: BuildConfig,
) -> Result<(AuditReport, Option<Counterexample>)> {
    let st = &prep.st;
    let idx = build_index(st, &prep.link, cfg)?;
    let searcher = Searcher::new(st, &prep.link.tree, &idx);
    let mut r = AuditReport::new(name, cfg);
    r.texts = 1;
    let mut first = None;
    let internal = st.internal_nodes();
    let mut yes_mark = vec![false; internal.len()];

    for (p, yes) in prep.truth.patterns.iter().zip(&prep.truth.yes) {
        if !cfg.length_mode.admits(p.len()) {
            continue;
        }
        for &k in yes {
            yes_mark[k as usize] = true;
        }
        let loc = searcher.locate_from_root(p);
        for (k, &i) in internal.iter().enumerate() {
            let res = searcher.search_located(&loc, i);
            let truth = yes_mark[k];
            r.queries += 1;
            r.positives += truth as u64;
            let tally = r.by_route.entry(res.route).or_default();
            let failure = match (res.found, truth) {
                (true, _) if !verify_witness(st, p, i, res.witness.unwrap()) => {
                    r.soundness_violations += 1;
                    Some(FailureKind::BadWitness)
                }
                (true, false) => {
                    r.spurious_hits += 1;
                    Some(FailureKind::Spurious)
                }
                (false, true) => {
                    tally.misses += 1;
                    r.misses += 1;
                    r.misses_without_fallback += 1;
                    Some(FailureKind::Miss)
                }
                (true, true) => {
                    tally.hits += 1;
                    if res.fallback_hit {
                        r.fallback_hits += 1;
                        r.misses_without_fallback += 1;
                    }
                    if let Some(o) = res.origin {
                        r.hits_by_origin[o as usize] += 1;
                    }
                    None
                }
                (false, false) => None,
            };
            if res.probes > 0 || res.list_len > 0 {
                r.max_probes = r.max_probes.max(res.probes);
                if res.probes > probe_bound(res.list_len as usize) {
                    r.probe_violations += 1;
                }
            }
            if let (Some(kind), None) = (failure, &first) {
                first = Some(Counterexample {
                    kind,
                    text: render(st.text().body()),
                    pattern: render(p),
                    node_label: render(st.label(i)),
                    route: res.route,
                });
            }
        }
        for &k in yes {
            yes_mark[k as usize] = false;
        }
    }

    r.records = check_records(st, &prep.link.tree, &idx);
    r.entries = idx.total_entries() as u64;
    r.entries_by_origin = idx.stats.entries;
    let sigma = st.text().alphabet().size().max(1);
    let n = st.text().n().max(1);
    if r.entries > 2 * (sigma * n) as u64 {
        r.size_bound_violations = 1;
    }
    r.max_size_ratio = r.entries as f64 / (sigma * n) as f64;
    let [bp, ha, sr] = idx.stats.entries;
    if !(bp >= ha && ha >= sr) {
        r.ordering_deviations = 1;
    }
    r.nodes_over_sigma = prep.link.stats(st).nodes_over_sigma as u64;
    r.texts_with_misses = (r.misses > 0) as u64;
    Ok((r, first))
}

fn fails(
    body: &[u8],
    name: &str,
    cfg: BuildConfig,
    kind: FailureKind,
    opts: &AuditOptions,
) -> bool {
    let Ok(prep) = prepare(body, opts) else {
        return false;
    };
    match audit_prepared(&prep, name, cfg) {
        Ok((_, Some(c))) => c.kind == kind,
        _ => false,
    }
}

/// Shrinks a failing text by bisecting its length from either end, then
/// trimming single symbols, while the failure persists.
pub fn minimize(
    body: &[u8],
    name: &str,
    cfg: BuildConfig,
    kind: FailureKind,
    opts: &AuditOptions,
) -> Vec<u8> {
    let mut cur = body.to_vec();
    loop {
        let before = cur.len();
        let mut step = cur.len() / 2;
        while step >= 1 {
            if cur.len() > step && fails(&cur[..cur.len() - step], name, cfg, kind, opts) {
                cur.truncate(cur.len() - step);
            } else if cur.len() > step && fails(&cur[step..], name, cfg, kind, opts) {
                cur.drain(..step);
            } else {
                step /= 2;
            }
        }
        let mut k = 0;
        while k < cur.len() {
            let mut shorter = cur.clone();
            shorter.remove(k);
            if !shorter.is_empty() && fails(&shorter, name, cfg, kind, opts) {
                cur = shorter;
            } else {
                k += 1;
            }
        }
        if cur.len() == before {
            return cur;
        }
    }
}

/// Audits one text under every configuration.
pub fn audit_text(
    body: &[u8],
    configs: &[(String, BuildConfig)],
    opts: &AuditOptions,
) -> Result<TextAudit> {
    let prep = prepare(body, opts)?;
    let st = &prep.st;

    let mut walk_disagreements = 0;
    let internal = st.internal_nodes();
    for (p, yes) in prep.truth.patterns.iter().zip(&prep.truth.yes) {
        let mut next = yes.iter().peekable();
        for (k, &i) in internal.iter().enumerate() {
            let truth = next.next_if(|&&y| y as usize == k).is_some();
            let mut c = WalkCounter::default();
            let res = walk_search_baseline(st, p, i, &mut c);
            let ok = res.found == truth && res.witness.is_none_or(|j| verify_witness(st, p, i, j));
            if !ok {
                walk_disagreements += 1;
            }
        }
    }

    let mut reports = Vec::with_capacity(configs.len());
    for (name, cfg) in configs {
        let (mut r, first) = audit_prepared(&prep, name, *cfg)?;
        if let Some(mut c) = first {
            if opts.minimize {
                let small = minimize(body, name, *cfg, c.kind, opts);
                let sp = prepare(&small, opts)?;
                if let (_, Some(c2)) = audit_prepared(&sp, name, *cfg)? {
                    c = c2;
                }
            }
            if opts.max_counterexamples > 0 {
                r.counterexamples.push(c);
            }
        }
        reports.push(r);
    }
    Ok(TextAudit {
        reports,
        walk_disagreements,
    })
}

#[derive(Debug, Clone)]
pub struct CorpusAudit {
    pub reports: Vec<AuditReport>,
    pub walk_disagreements: u64,
}

impl CorpusAudit {
    /// Spurious hits or bad witnesses anywhere.
    pub fn unsound(&self) -> bool {
        self.reports.iter().any(|r| !r.is_sound())
    }

    pub fn any_complete(&self) -> bool {
        self.reports.iter().any(|r| r.is_complete())
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from(
            "config\ttexts\tqueries\tpositives\tspurious\tbad_witness\tmisses\tmisses_no_fallback\tfallback_hits\ttexts_with_misses\thits_base_path\thits_hanadi\thits_srivastava\tentries\tentries_base_path\tentries_hanadi\tentries_srivastava\tmax_entries_over_sigma_n\tsize_bound_violations\tordering_deviations\tentry_violations\tbase_suffix_violations\tprobe_violations\tmax_probes\n",
        );
        for r in &self.reports {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.4}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.name,
                r.texts,
                r.queries,
                r.positives,
                r.spurious_hits,
                r.soundness_violations,
                r.misses,
                r.misses_without_fallback,
                r.fallback_hits,
                r.texts_with_misses,
                r.hits_by_origin[0],
                r.hits_by_origin[1],
                r.hits_by_origin[2],
                r.entries,
                r.entries_by_origin[0],
                r.entries_by_origin[1],
                r.entries_by_origin[2],
                r.max_size_ratio,
                r.size_bound_violations,
                r.ordering_deviations,
                r.records.entry_violations,
                r.records.base_suffix_violations,
                r.probe_violations,
                r.max_probes,
            ));
        }
        s
    }
}

/// Audits every text and merges the per-configuration reports.
pub fn audit_corpus(
    texts: &[Vec<u8>],
    configs: &[(String, BuildConfig)],
    opts: &AuditOptions,
) -> Result<CorpusAudit> {
    let mut reports: Vec<AuditReport> = configs
        .iter()
        .map(|(n, c)| AuditReport::new(n, *c))
        .collect();
    let mut walk_disagreements = 0;
    for body in texts {
        let one = audit_text(body, configs, opts)?;
        walk_disagreements += one.walk_disagreements;
        for (acc, r) in reports.iter_mut().zip(&one.reports) {
            let keep = opts
                .max_counterexamples
                .saturating_sub(acc.counterexamples.len());
            let mut r = r.clone();
            r.counterexamples.truncate(keep);
            acc.merge(&r);
        }
    }
    Ok(CorpusAudit {
        reports,
        walk_disagreements,
    })
}

/// Origin names in sub-index order, for report headers.
pub fn origin_names() -> [&'static str; 3] {
    Origin::ALL.map(|o| o.name())
}
