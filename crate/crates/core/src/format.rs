//! The `.otix` binary layout.
//!
//! Little-endian throughout:
//!
//! ```text
//! magic "OTIX" | version u8 | text_hash [32] | text_len u64 | sigma u32
//! config: length tag u8, a u32, b u32, classification u8, exclusion u8, extend u8
//! stats: 11 x u64
//! entries: slots u64, offsets (slots + 1) x u64, records x 21 bytes
//!          (left u32, right u32, key u32, occ u32, origin u8, aux u32)
//! base suffixes: slots u64, offsets (slots + 1) x u64, records x 8 bytes
//!          (suffix u32, ref_leaf u32)
//! ```
//!
//! The suffix tree is not stored; it is rebuilt from the text, and
//! [`load`] ties the two together through the text hash.

use crate::build::{BuildConfig, Classification, IndexStats, LengthMode, Origin, OtEntry, OtIndex};
use crate::csr::Csr;
use crate::error::{Error, Result};
use crate::oshr::{BaseSuffix, OshrTree, OtInterval};
use crate::suffix_tree::SuffixTree;

pub const MAGIC: &[u8; 4] = b"OTIX";
pub const VERSION: u8 = 1;

const ENTRY_BYTES: usize = 21;
const BASE_BYTES: usize = 8;

pub fn serialize(idx: &OtIndex) -> Vec<u8> {
    let mut out = Vec::with_capacity(
        128 + idx.entries.offsets().len() * 8
            + idx.entries.total() * ENTRY_BYTES
            + idx.base_suffixes.offsets().len() * 8
            + idx.base_suffixes.total() * BASE_BYTES,
    );
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&idx.text_hash);
    out.extend_from_slice(&idx.text_len.to_le_bytes());
    out.extend_from_slice(&idx.sigma.to_le_bytes());

    let (tag, a, b) = match idx.config.length_mode {
        LengthMode::All => (0u8, 0u32, 0u32),
        LengthMode::Exact(l) => (1, l, 0),
        LengthMode::AtMost(l) => (2, l, 0),
        LengthMode::Range(lo, hi) => (3, lo, hi),
    };
    out.push(tag);
    out.extend_from_slice(&a.to_le_bytes());
    out.extend_from_slice(&b.to_le_bytes());
    out.push(match idx.config.classification {
        Classification::DefinitionLiteral => 0,
        Classification::FigureCaption => 1,
        Classification::Union => 2,
    });
    out.push(idx.config.exclusion_rule as u8);
    out.push(idx.config.extend_keys as u8);

    let s = &idx.stats;
    for v in s.entries.iter().chain(&s.inserted).chain(&[
        s.special_refs,
        s.base_paths,
        s.skipped_indexed_paths,
        s.excluded_by_rule,
        s.base_suffixes,
    ]) {
        out.extend_from_slice(&v.to_le_bytes());
    }

    write_offsets(&mut out, idx.entries.offsets());
    for e in idx.entries.items() {
        out.extend_from_slice(&e.interval.left.to_le_bytes());
        out.extend_from_slice(&e.interval.right.to_le_bytes());
        out.extend_from_slice(&e.key_node.to_le_bytes());
        out.extend_from_slice(&e.occ.to_le_bytes());
        out.push(e.origin as u8);
        out.extend_from_slice(&e.aux.to_le_bytes());
    }
    write_offsets(&mut out, idx.base_suffixes.offsets());
    for b in idx.base_suffixes.items() {
        out.extend_from_slice(&b.suffix.to_le_bytes());
        out.extend_from_slice(&b.ref_leaf.to_le_bytes());
    }
    out
}

fn write_offsets(out: &mut Vec<u8>, offsets: &[u64]) {
    out.extend_from_slice(&(offsets.len() as u64 - 1).to_le_bytes());
    for o in offsets {
        out.extend_from_slice(&o.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Truncated {
                offset: self.pos,
                needed: n,
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn flag(&mut self, what: &str) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(Error::Corrupt(format!("{what} flag {b}"))),
        }
    }

    /// Reads a slot count and its offsets, checking that the records they
    /// announce can fit in what is left of the buffer.
    fn offsets(&mut self, record: usize) -> Result<Vec<u64>> {
        let slots = self.u64()?;
        let remaining = (self.buf.len() - self.pos) as u64;
        let needed = slots.checked_add(1).and_then(|k| k.checked_mul(8));
        match needed {
            Some(bytes) if bytes <= remaining => {}
            _ => {
                return Err(Error::Truncated {
                    offset: self.pos,
                    needed: needed.unwrap_or(u64::MAX).min(usize::MAX as u64) as usize,
                })
            }
        }
        let offsets = (0..=slots)
            .map(|_| self.u64())
            .collect::<Result<Vec<u64>>>()?;
        if offsets[0] != 0 || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Corrupt("offsets are not monotone from zero".into()));
        }
        let total = *offsets.last().unwrap();
        let bytes = total.checked_mul(record as u64);
        let remaining = (self.buf.len() - self.pos) as u64;
        match bytes {
            Some(b) if b <= remaining => Ok(offsets),
            _ => Err(Error::Truncated {
                offset: self.pos,
                needed: bytes.unwrap_or(u64::MAX).min(usize::MAX as u64) as usize,
            }),
        }
    }
}

/// Parses an index without reference to its text. Checks the layout only;
/// use [`load`] before querying.
pub fn deserialize(buf: &[u8]) -> Result<OtIndex> {
    let mut r = Reader { buf, pos: 0 };
    if buf.len() < MAGIC.len() || &buf[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    r.pos = MAGIC.len();
    let version = r.u8()?;
    if version != VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: VERSION,
        });
    }
    let text_hash: [u8; 32] = r.take(32)?.try_into().unwrap();
    let text_len = r.u64()?;
    let sigma = r.u32()?;

    let tag = r.u8()?;
    let (a, b) = (r.u32()?, r.u32()?);
    let length_mode = match tag {
        0 => LengthMode::All,
        1 => LengthMode::Exact(a),
        2 => LengthMode::AtMost(a),
        3 => LengthMode::Range(a, b),
        t => return Err(Error::Corrupt(format!("length mode tag {t}"))),
    };
    length_mode
        .validate()
        .map_err(|e| Error::Corrupt(e.to_string()))?;
    let classification = match r.u8()? {
        0 => Classification::DefinitionLiteral,
        1 => Classification::FigureCaption,
        2 => Classification::Union,
        c => return Err(Error::Corrupt(format!("classification tag {c}"))),
    };
    let exclusion_rule = r.flag("exclusion")?;
    let extend_keys = r.flag("key extension")?;
    let config = BuildConfig {
        length_mode,
        classification,
        exclusion_rule,
        extend_keys,
    };

    let mut s = [0u64; 11];
    for v in s.iter_mut() {
        *v = r.u64()?;
    }
    let stats = IndexStats {
        entries: [s[0], s[1], s[2]],
        inserted: [s[3], s[4], s[5]],
        special_refs: s[6],
        base_paths: s[7],
        skipped_indexed_paths: s[8],
        excluded_by_rule: s[9],
        base_suffixes: s[10],
    };

    let offsets = r.offsets(ENTRY_BYTES)?;
    let total = *offsets.last().unwrap() as usize;
    let mut items = Vec::with_capacity(total);
    for _ in 0..total {
        let interval = OtInterval {
            left: r.u32()?,
            right: r.u32()?,
        };
        let key_node = r.u32()?;
        let occ = r.u32()?;
        let o = r.u8()?;
        let origin = Origin::from_u8(o).ok_or_else(|| Error::Corrupt(format!("origin {o}")))?;
        let aux = r.u32()?;
        items.push(OtEntry {
            interval,
            key_node,
            occ,
            origin,
            aux,
        });
    }
    let entries = Csr::from_parts(offsets, items).expect("offsets checked");

    let offsets = r.offsets(BASE_BYTES)?;
    let total = *offsets.last().unwrap() as usize;
    let mut items = Vec::with_capacity(total);
    for _ in 0..total {
        items.push(BaseSuffix {
            suffix: r.u32()?,
            ref_leaf: r.u32()?,
        });
    }
    let base_suffixes = Csr::from_parts(offsets, items).expect("offsets checked");

    if r.pos != buf.len() {
        return Err(Error::Corrupt(format!(
            "{} trailing bytes",
            buf.len() - r.pos
        )));
    }
    if entries.slots() != base_suffixes.slots() {
        return Err(Error::Corrupt(
            "entry and base-suffix tables disagree on node count".into(),
        ));
    }
    if stats.total() != entries.total() as u64 {
        return Err(Error::Corrupt(
            "entry count does not match the stored statistics".into(),
        ));
    }
    Ok(OtIndex {
        config,
        text_len,
        sigma,
        text_hash,
        entries,
        base_suffixes,
        stats,
    })
}

/// Parses an index and binds it to the tree of the text it was built on.
/// Fails with [`Error::HashMismatch`] for any other text, and with
/// [`Error::Corrupt`] if a record does not fit the tree.
pub fn load(buf: &[u8], st: &SuffixTree, oshr: &OshrTree) -> Result<OtIndex> {
    let idx = deserialize(buf)?;
    idx.check_text(st.text())?;
    validate_against(&idx, st, oshr)?;
    Ok(idx)
}

/// Structural checks that keep queries in bounds: every key is an internal
/// node carrying its own OSHR span, and every position fits the text.
pub fn validate_against(idx: &OtIndex, st: &SuffixTree, oshr: &OshrTree) -> Result<()> {
    if idx.node_slots() != st.internal_count() {
        return Err(Error::Corrupt(format!(
            "index has {} node slots, tree has {} internal nodes",
            idx.node_slots(),
            st.internal_count()
        )));
    }
    let len = st.text().len();
    for (k, &host) in st.internal_nodes().iter().enumerate() {
        let dh = st.depth(host);
        let list = idx.entries.get(k);
        for e in list {
            let ok = (e.key_node as usize) < st.node_count()
                && st.is_internal(e.key_node)
                && oshr.interval(st, e.key_node) == e.interval
                && e.occ as usize >= st.depth(e.key_node)
                && e.occ as usize + dh <= len;
            if !ok {
                return Err(Error::Corrupt(format!(
                    "entry at node slot {k} does not fit the tree"
                )));
            }
        }
        if list
            .windows(2)
            .any(|w| w[0].interval.left >= w[1].interval.left)
        {
            return Err(Error::Corrupt(format!(
                "entry list at node slot {k} is not sorted"
            )));
        }
        for b in idx.base_suffixes.get(k) {
            if b.suffix as usize + dh > len {
                return Err(Error::Corrupt(format!(
                    "base suffix at node slot {k} out of range"
                )));
            }
        }
    }
    Ok(())
}
