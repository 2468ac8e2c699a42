pub mod bench;
pub mod build;
pub mod csr;
pub mod error;
pub mod format;
pub mod oracle;
pub mod oshr;
pub mod query;
pub mod report;
pub mod suffix_tree;
pub mod text;

pub use build::{build_index, BuildConfig, Classification, LengthMode, Origin, OtEntry, OtIndex};
pub use error::{Error, Result};
pub use oshr::{OshrLink, OshrTree};
pub use query::{walk_search_baseline, QueryResult, Route, SearchOptions, Searcher};
pub use suffix_tree::{NodeId, SuffixTree, WalkCounter, WalkOutcome, ROOT};
pub use text::{preprocess_fasta, Alphabet, Text};
