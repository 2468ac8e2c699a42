use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sequence")]
    EmptySequence,
    #[error("alphabet exhausted: every byte value occurs in the text")]
    AlphabetExhausted,
    #[error("suffix index {0} out of range (text length {1})")]
    SuffixOutOfRange(usize, usize),
    #[error("node {0} is not an internal node")]
    NotInternal(u32),
    #[error("pattern length {0} outside index configuration")]
    PatternLength(usize),
    #[error("invalid build configuration: {0}")]
    Config(String),
    #[error("text of {0} symbols exceeds the oracle cap of {1}")]
    OracleCap(usize, usize),
    #[error("bad magic: not an OTIX index file")]
    BadMagic,
    #[error("unsupported index version {found} (expected {expected})")]
    VersionMismatch { found: u8, expected: u8 },
    #[error("text hash mismatch: index was built for a different text")]
    HashMismatch,
    #[error("truncated index file: needed {needed} bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error("corrupt index file: {0}")]
    Corrupt(String),
    #[error("index construction bug: {0}")]
    Internal(String),
    #[error("methods disagree: {0}")]
    Disagreement(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
