//! Genome text ingestion: FASTA stripping, sentinel termination and
//! alphabet metadata.

use std::fmt;

use crate::error::{Error, Result};

/// Strips FASTA headers and line breaks and uppercases ASCII letters.
///
/// A header is any line whose first byte (after carriage returns are
/// dropped) is `>`. The result is the concatenation of all remaining lines.
pub fn preprocess_fasta(raw: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(raw.len());
    for line in raw.split(|&b| b == b'\n') {
        let mut kept = line.iter().copied().filter(|&b| b != b'\r').peekable();
        if kept.peek() == Some(&b'>') {
            continue;
        }
        out.extend(kept.map(|b| b.to_ascii_uppercase()));
    }
    if out.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(out)
}

/// A sentinel-terminated text. The sentinel occurs exactly once, at the end.
#[derive(Clone, PartialEq, Eq)]
pub struct Text {
    bytes: Vec<u8>,
    sentinel: u8,
}

impl Text {
    /// Appends the smallest byte value absent from `body` as the sentinel.
    pub fn with_sentinel(body: impl Into<Vec<u8>>) -> Result<Text> {
        let mut bytes = body.into();
        if bytes.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut seen = [false; 256];
        for &b in &bytes {
            seen[b as usize] = true;
        }
        let sentinel = seen
            .iter()
            .position(|&s| !s)
            .ok_or(Error::AlphabetExhausted)? as u8;
        bytes.push(sentinel);
        Ok(Text { bytes, sentinel })
    }

    /// Convenience for FASTA or plain input: preprocess then terminate.
    pub fn from_fasta(raw: &[u8]) -> Result<Text> {
        Text::with_sentinel(preprocess_fasta(raw)?)
    }

    /// All symbols including the trailing sentinel.
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// The original symbols, without the sentinel.
    pub fn body(&self) -> &[u8] {
        &self.bytes[..self.n()]
    }

    /// Number of original symbols.
    pub fn n(&self) -> usize {
        self.bytes.len() - 1
    }

    /// Length including the sentinel (`n + 1`).
    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sentinel(&self) -> u8 {
        self.sentinel
    }

    /// Sort key placing the sentinel before every other symbol.
    #[inline]
    pub fn symbol_key(&self, b: u8) -> u16 {
        if b == self.sentinel {
            0
        } else {
            b as u16 + 1
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        let mut seen = [false; 256];
        for &b in self.body() {
            seen[b as usize] = true;
        }
        let symbols = (0..=255u8).filter(|&b| seen[b as usize]).collect();
        Alphabet { symbols }
    }

    /// Renders a slice of this text with the sentinel shown as `$`.
    pub fn render(&self, slice: &[u8]) -> String {
        slice
            .iter()
            .map(|&b| {
                if b == self.sentinel {
                    '$'
                } else if b.is_ascii_graphic() {
                    b as char
                } else {
                    '?'
                }
            })
            .collect()
    }
}

impl fmt::Debug for Text {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 64 {
            write!(f, "Text({:?})", self.render(&self.bytes))
        } else {
            write!(f, "Text(n = {})", self.n())
        }
    }
}

/// Distinct non-sentinel symbols of a text, in byte order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    pub symbols: Vec<u8>,
}

impl Alphabet {
    /// Σ, excluding the sentinel.
    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    /// Σ counting the sentinel as a symbol.
    pub fn size_with_sentinel(&self) -> usize {
        self.symbols.len() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_headers_and_uppercases() {
        assert_eq!(preprocess_fasta(b">h1\nacgT\nACG\n").unwrap(), b"ACGTACG");
        assert_eq!(preprocess_fasta(b"ACGT").unwrap(), b"ACGT");
        assert_eq!(preprocess_fasta(b">h\r\nac\r\ngt\r\n").unwrap(), b"ACGT");
    }

    #[test]
    fn header_only_input_is_empty() {
        assert!(matches!(
            preprocess_fasta(b">h1\n>h2\n"),
            Err(Error::EmptySequence)
        ));
        assert!(matches!(preprocess_fasta(b""), Err(Error::EmptySequence)));
    }

    #[test]
    fn multi_contig_records_concatenate() {
        assert_eq!(
            preprocess_fasta(b">c1\nAC\n>c2\nGT\n").unwrap(),
            b"ACGT".to_vec()
        );
    }

    #[test]
    fn sentinel_appended() {
        let t = Text::with_sentinel(b"ACGT".to_vec()).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.len(), 5);
        assert_eq!(t.sentinel(), 0);
        assert_eq!(t.render(t.bytes()), "ACGT$");
        let t = Text::with_sentinel(b"BANANA".to_vec()).unwrap();
        assert_eq!(t.n(), 6);
        assert_eq!(t.render(t.bytes()), "BANANA$");
    }

    #[test]
    fn sentinel_skips_used_bytes() {
        let t = Text::with_sentinel(vec![0u8, 1, 3]).unwrap();
        assert_eq!(t.sentinel(), 2);
        assert!(t.symbol_key(2) < t.symbol_key(0));
    }

    #[test]
    fn full_byte_range_is_rejected() {
        let all: Vec<u8> = (0..=255u8).collect();
        assert!(matches!(
            Text::with_sentinel(all),
            Err(Error::AlphabetExhausted)
        ));
    }

    #[test]
    fn alphabet_counts() {
        let t = Text::with_sentinel(b"ACGTACG".to_vec()).unwrap();
        let a = t.alphabet();
        assert_eq!(a.symbols, b"ACGT".to_vec());
        assert_eq!(a.size(), 4);
        assert_eq!(a.size_with_sentinel(), 5);
        let t = Text::with_sentinel(b"0110100".to_vec()).unwrap();
        assert_eq!(t.alphabet().size(), 2);
    }

    proptest! {
        #[test]
        fn preprocess_is_idempotent(raw in proptest::collection::vec(any::<u8>(), 0..200)) {
            if let Ok(once) = preprocess_fasta(&raw) {
                let twice = preprocess_fasta(&once).unwrap();
                prop_assert_eq!(once, twice);
            }
        }

        #[test]
        fn sentinel_keeps_prefix(body in proptest::collection::vec(b'A'..=b'Z', 1..200)) {
            let t = Text::with_sentinel(body.clone()).unwrap();
            prop_assert_eq!(t.len(), body.len() + 1);
            prop_assert_eq!(t.body(), &body[..]);
            prop_assert_eq!(t.bytes().iter().filter(|&&b| b == t.sentinel()).count(), 1);
        }
    }
}
