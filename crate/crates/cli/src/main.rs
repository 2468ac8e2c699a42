use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use otindex::bench::{
    apply_skip_rule, extract_patterns, list_size_depth_correlation, run_bench, BenchOptions,
    PatternProtocol,
};
use otindex::oracle::{audit_corpus, config_matrix, corpus, genome_like, AuditOptions};
use otindex::report::{index_stats_tsv, oshr_stats_tsv, tree_stats_tsv};
use otindex::{
    build_index, format, preprocess_fasta, walk_search_baseline, BuildConfig, Classification,
    LengthMode, NodeId, OshrLink, OshrTree, SearchOptions, Searcher, SuffixTree, Text, WalkCounter,
    ROOT,
};

#[derive(Parser)]
#[command(
    name = "otindex",
    version,
    about = "Pattern search under suffix-tree nodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassificationArg {
    Literal,
    Caption,
    Union,
}

#[derive(Subcommand)]
enum Command {
    /// Strip FASTA headers and line breaks, uppercase the sequence.
    Preprocess { input: PathBuf, output: PathBuf },
    /// Suffix-tree statistics of a text.
    Stats { text: PathBuf },
    /// Suffix-link tree statistics of a text.
    OshrStats { text: PathBuf },
    /// Build an index over a text.
    Build {
        text: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// all, exact:N, atmost:N or range:A-B
        #[arg(long, default_value = "all")]
        length_mode: String,
        #[arg(long, value_enum, default_value = "union")]
        classification: ClassificationArg,
        /// Keep base paths that a reference internal node would exclude.
        #[arg(long)]
        no_exclusion: bool,
        /// Key special entries at the node they were detected from.
        #[arg(long)]
        no_key_extension: bool,
    },
    /// Sub-index sizes of a built index.
    IndexStats { index: PathBuf },
    /// Search for a pattern under an internal node.
    Query {
        index: PathBuf,
        text: PathBuf,
        #[arg(long)]
        pattern: String,
        /// Node id, or the node's path label ("" for the root).
        #[arg(long)]
        node: String,
        /// Also answer by walking below the node.
        #[arg(long)]
        baseline: bool,
        /// Skip the base-suffix scan after a failed binary search.
        #[arg(long)]
        no_fallback: bool,
    },
    /// Differential audit against brute force on random texts.
    Audit {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        texts: usize,
        #[arg(long, default_value_t = 512)]
        max_n: usize,
        /// "all" or a comma-separated list of configuration names.
        #[arg(long, default_value = "all")]
        configs: String,
        /// Longest exhaustive substring pattern on texts of length <= 128.
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long)]
        no_minimize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Depth-stratified timing of indexed search against walking.
    Bench {
        index: PathBuf,
        text: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        #[arg(long, default_value_t = 20)]
        max_depth: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a synthetic repeat-rich DNA sequence as FASTA.
    Synth {
        output: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_length_mode(s: &str) -> Result<LengthMode> {
    let num = |v: &str| -> Result<u32> { v.parse().with_context(|| format!("bad length {v:?}")) };
    let mode = match s.split_once(':') {
        None if s == "all" => LengthMode::All,
        Some(("exact", v)) => LengthMode::Exact(num(v)?),
        Some(("atmost", v)) => LengthMode::AtMost(num(v)?),
        Some(("range", v)) => {
            let (a, b) = v.split_once('-').context("range needs A-B")?;
            LengthMode::Range(num(a)?, num(b)?)
        }
        _ => bail!("unknown length mode {s:?}"),
    };
    mode.validate()?;
    Ok(mode)
}

fn read_text(path: &Path) -> Result<Text> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Text::with_sentinel(bytes)?)
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

struct Loaded {
    st: SuffixTree,
    oshr: OshrTree,
    idx: otindex::OtIndex,
}

fn load(index: &Path, text: &Path) -> Result<Loaded> {
    let st = SuffixTree::build(read_text(text)?);
    let oshr = OshrTree::build(&st);
    let bytes = fs::read(index).with_context(|| format!("reading {}", index.display()))?;
    let idx = format::load(&bytes, &st, &oshr)?;
    Ok(Loaded { st, oshr, idx })
}

fn resolve_node(st: &SuffixTree, spec: &str) -> Result<NodeId> {
    if !spec.is_empty() && spec.bytes().all(|b| b.is_ascii_digit()) {
        let id: NodeId = spec.parse()?;
        if (id as usize) < st.node_count() && st.is_internal(id) {
            return Ok(id);
        }
        bail!("{id} is not an internal node");
    }
    let mut c = WalkCounter::default();
    let w = st.walk_from(ROOT, spec.as_bytes(), &mut c);
    let exact = w.matched == spec.len() && st.depth(w.locus_below) == spec.len();
    if exact && st.is_internal(w.locus_below) {
        Ok(w.locus_below)
    } else {
        bail!("no internal node is labelled {spec:?}")
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Preprocess { input, output } => {
            let raw = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            write_out(&output, &preprocess_fasta(&raw)?)?;
        }
        Command::Stats { text } => {
            let st = SuffixTree::build(read_text(&text)?);
            print!("{}", tree_stats_tsv(&st));
        }
        Command::OshrStats { text } => {
            let st = SuffixTree::build(read_text(&text)?);
            let link = OshrLink::build(&st);
            print!("{}", oshr_stats_tsv(&st, &link));
        }
        Command::Build {
            text,
            output,
            length_mode,
            classification,
            no_exclusion,
            no_key_extension,
        } => {
            let cfg = BuildConfig {
                length_mode: parse_length_mode(&length_mode)?,
                classification: match classification {
                    ClassificationArg::Literal => Classification::DefinitionLiteral,
                    ClassificationArg::Caption => Classification::FigureCaption,
                    ClassificationArg::Union => Classification::Union,
                },
                exclusion_rule: !no_exclusion,
                extend_keys: !no_key_extension,
            };
            let st = SuffixTree::build(read_text(&text)?);
            let link = OshrLink::build(&st);
            let idx = build_index(&st, &link, cfg)?;
            write_out(&output, &format::serialize(&idx))?;
            eprintln!(
                "{} entries written to {}",
                idx.total_entries(),
                output.display()
            );
        }
        Command::IndexStats { index } => {
            let bytes = fs::read(&index).with_context(|| format!("reading {}", index.display()))?;
            print!("{}", index_stats_tsv(&format::deserialize(&bytes)?));
        }
        Command::Query {
            index,
            text,
            pattern,
            node,
            baseline,
            no_fallback,
        } => {
            let l = load(&index, &text)?;
            let i = resolve_node(&l.st, &node)?;
            let searcher = Searcher::new(&l.st, &l.oshr, &l.idx).with_options(SearchOptions {
                base_suffix_fallback: !no_fallback,
            });
            let p = pattern.as_bytes();
            let r = searcher.search(p, i)?;
            let label = l.st.text().render(l.st.label(i));
            println!(
                "method\tpattern\tnode\tnode_label\tfound\twitness\troute\tprobes\tcomparisons"
            );
            let witness = |w: Option<usize>| w.map_or("-".to_string(), |j| j.to_string());
            println!(
                "index\t{pattern}\t{i}\t{label}\t{}\t{}\t{}\t{}\t-",
                r.found,
                witness(r.witness),
                r.route.name(),
                r.probes
            );
            if baseline {
                let mut c = WalkCounter::default();
                let w = walk_search_baseline(&l.st, p, i, &mut c);
                println!(
                    "walk\t{pattern}\t{i}\t{label}\t{}\t{}\twalk\t-\t{}",
                    w.found,
                    witness(w.witness),
                    c.comparisons
                );
                if w.found != r.found {
                    bail!("indexed search and walk disagree");
                }
            }
        }
        Command::Audit {
            seed,
            texts,
            max_n,
            configs,
            max_len,
            no_minimize,
            output,
        } => {
            let configs = config_matrix(&configs)?;
            let mut corpus_texts = vec![b"BANANA".to_vec(), b"MISSISSIPPI".to_vec()];
            corpus_texts.extend(corpus(seed, texts, max_n));
            let opts = AuditOptions {
                max_len,
                cap: max_n.max(otindex::oracle::DEFAULT_CAP),
                minimize: !no_minimize,
                ..AuditOptions::default()
            };
            let report = audit_corpus(&corpus_texts, &configs, &opts)?;
            let tsv = report.to_tsv();
            match &output {
                Some(path) => write_out(path, tsv.as_bytes())?,
                None => print!("{tsv}"),
            }
            let mut err = std::io::stderr().lock();
            writeln!(err, "{} texts, seed {seed}", corpus_texts.len())?;
            writeln!(
                err,
                "walk baseline disagreements with brute force: {}",
                report.walk_disagreements
            )?;
            for r in &report.reports {
                writeln!(
                    err,
                    "{:<16} spurious {:>6}  bad witnesses {:>4}  misses {:>8} ({} without fallback)  entries/(sigma n) <= {:.3}",
                    r.name,
                    r.spurious_hits,
                    r.soundness_violations,
                    r.misses,
                    r.misses_without_fallback,
                    r.max_size_ratio
                )?;
                for c in &r.counterexamples {
                    writeln!(
                        err,
                        "    {}: text {:?} pattern {:?} under {:?} ({})",
                        c.kind.name(),
                        c.text,
                        c.pattern,
                        c.node_label,
                        c.route.name()
                    )?;
                }
            }
            if report.unsound() || report.walk_disagreements > 0 {
                writeln!(err, "FAIL: unsound answers")?;
                return Ok(ExitCode::from(2));
            }
            if !report.any_complete() {
                writeln!(err, "FAIL: every configuration misses occurrences")?;
                return Ok(ExitCode::from(3));
            }
        }
        Command::Bench {
            index,
            text,
            seed,
            cap,
            max_depth,
            output,
        } => {
            let l = load(&index, &text)?;
            let body = l.st.text().body();
            let raw = extract_patterns(body, &PatternProtocol::default());
            let extracted = raw.len();
            let patterns = apply_skip_rule(&l.st, raw);
            let opts = BenchOptions {
                seed,
                cap,
                max_depth,
            };
            let report = run_bench(&l.st, &l.oshr, &l.idx, &patterns, extracted, &opts)?;
            write_out(&output, report.to_tsv().as_bytes())?;
            let mut err = std::io::stderr().lock();
            writeln!(
                err,
                "patterns: {extracted} extracted, {} used",
                patterns.len()
            )?;
            writeln!(err, "probe bound violations: {}", report.probe_violations())?;
            if let Some(r) = list_size_depth_correlation(&l.st, &l.idx) {
                writeln!(err, "depth vs list size correlation: {r:.4}")?;
            }
            if let Some(cv) = report.ot_time_cv(5) {
                writeln!(
                    err,
                    "indexed time per query, depths >= 5, coefficient of variation: {cv:.4}"
                )?;
            }
            writeln!(err, "timing columns are hardware dependent")?;
        }
        Command::Synth { output, len, seed } => {
            let seq = genome_like(seed, len);
            let mut fasta = format!(">synthetic seed={seed} len={len}\n").into_bytes();
            for line in seq.chunks(70) {
                fasta.extend_from_slice(line);
                fasta.push(b'\n');
            }
            write_out(&output, &fasta)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
