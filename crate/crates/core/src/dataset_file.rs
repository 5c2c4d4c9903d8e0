//! `DAMP` binary container for a [`PatternSet`].
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "DAMP"
//! 4       2     format version (u16)
//! 6       4     N, neurons per pattern (u32)
//! 10      4     S, pattern count (u32)
//! 14      1     source tag: 0 rademacher, 1 image_pool, 2 external
//! 15      8     seed (u64)
//! 23      8     skew_p (f64, NaN when absent)
//! 31      8     target_hd (f64, NaN when absent)
//! 39      ...   S patterns of ceil(N/8) bytes; bit i -> byte i/8, bit i%8 (LSB first)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::patterns::{Pattern, PatternSet, Source};

pub const MAGIC: &[u8; 4] = b"DAMP";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 39;

fn opt_to_f64(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn f64_to_opt(v: f64) -> Option<f64> {
    if v.is_nan() {
        None
    } else {
        Some(v)
    }
}

/// Packs a pattern into `ceil(N/8)` LSB-first bytes.
pub fn pattern_to_bytes(p: &Pattern) -> Vec<u8> {
    let n_bytes = p.n_neurons().div_ceil(8);
    let mut out = Vec::with_capacity(n_bytes);
    for (w, word) in p.words().iter().enumerate() {
        for b in 0..8 {
            if w * 8 + b < n_bytes {
                out.push((word >> (8 * b)) as u8);
            }
        }
    }
    out
}

/// Inverse of [`pattern_to_bytes`]. Bits past `n` in the last byte are ignored.
pub fn pattern_from_bytes(bytes: &[u8], n: usize) -> Result<Pattern> {
    if bytes.len() != n.div_ceil(8) {
        return Err(Error::Length {
            expected: n.div_ceil(8),
            actual: bytes.len(),
        });
    }
    let mut words = vec![0u64; crate::patterns::words_for(n)];
    for (i, &byte) in bytes.iter().enumerate() {
        words[i / 8] |= (byte as u64) << (8 * (i % 8));
    }
    Pattern::from_words(words, n)
}

pub fn write_pattern_set<W: Write>(set: &PatternSet, mut w: W) -> std::io::Result<()> {
    let n = u32::try_from(set.n_neurons()).expect("N fits in u32");
    let s = u32::try_from(set.len()).expect("S fits in u32");
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&s.to_le_bytes())?;
    w.write_all(&[set.source.tag()])?;
    w.write_all(&set.seed.to_le_bytes())?;
    w.write_all(&opt_to_f64(set.skew_p).to_le_bytes())?;
    w.write_all(&opt_to_f64(set.target_hd).to_le_bytes())?;
    for p in set.patterns() {
        w.write_all(&pattern_to_bytes(p))?;
    }
    w.flush()
}

pub fn to_bytes(set: &PatternSet) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + set.len() * set.n_neurons().div_ceil(8));
    write_pattern_set(set, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn from_bytes(bytes: &[u8]) -> Result<PatternSet> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Length {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected \"DAMP\"",
            &bytes[0..4]
        )));
    }
    let u16_at = |o: usize| u16::from_le_bytes(bytes[o..o + 2].try_into().unwrap());
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());

    let version = u16_at(4);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {version}"
        )));
    }
    let n = u32_at(6) as usize;
    let s = u32_at(10) as usize;
    if n == 0 || s == 0 {
        return Err(Error::Format(format!("empty dataset (N={n}, S={s})")));
    }
    let source = Source::from_tag(bytes[14])?;
    let seed = u64_at(15);
    let skew_p = f64_to_opt(f64::from_bits(u64_at(23)));
    let target_hd = f64_to_opt(f64::from_bits(u64_at(31)));

    let stride = n.div_ceil(8);
    let body = &bytes[HEADER_LEN..];
    let expected = s * stride;
    if body.len() != expected {
        return Err(Error::Length {
            expected: HEADER_LEN + expected,
            actual: bytes.len(),
        });
    }
    let patterns = body
        .chunks_exact(stride)
        .map(|chunk| pattern_from_bytes(chunk, n))
        .collect::<Result<Vec<_>>>()?;

    let mut set = PatternSet::new(patterns, source)?.with_seed(seed);
    set.skew_p = skew_p;
    set.target_hd = target_hd;
    Ok(set)
}

pub fn save(set: &PatternSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_pattern_set(set, BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<PatternSet> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    from_bytes(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_bit_exact() {
        let p = Pattern::from_bools((0..10).map(|i| i == 0 || i == 9));
        let set = PatternSet::new(vec![p], Source::ImagePool)
            .unwrap()
            .with_seed(0x0102_0304_0506_0708)
            .with_target_hd(30.0);
        let b = to_bytes(&set);
        assert_eq!(&b[0..4], b"DAMP");
        assert_eq!(&b[4..6], &[1, 0]);
        assert_eq!(&b[6..10], &[10, 0, 0, 0]);
        assert_eq!(&b[10..14], &[1, 0, 0, 0]);
        assert_eq!(b[14], 1);
        assert_eq!(&b[15..23], &[8, 7, 6, 5, 4, 3, 2, 1]);
        assert!(f64::from_le_bytes(b[23..31].try_into().unwrap()).is_nan());
        assert_eq!(f64::from_le_bytes(b[31..39].try_into().unwrap()), 30.0);
        // bit 0 -> byte 0 LSB, bit 9 -> byte 1 bit 1
        assert_eq!(&b[39..], &[0b0000_0001, 0b0000_0010]);
        assert_eq!(b.len(), HEADER_LEN + 2);
    }

    #[test]
    fn roundtrip_preserves_metadata() {
        let pats = vec![
            Pattern::from_bools((0..784).map(|i| i % 7 == 1)),
            Pattern::plus_ones(784),
        ];
        let set = PatternSet::new(pats, Source::Rademacher)
            .unwrap()
            .with_seed(42)
            .with_skew_p(0.75);
        let back = from_bytes(&to_bytes(&set)).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(from_bytes(b"DAM"), Err(Error::Length { .. })));
        let set = PatternSet::new(vec![Pattern::plus_ones(9)], Source::External).unwrap();
        let mut b = to_bytes(&set);
        b[0] = b'X';
        assert!(matches!(from_bytes(&b), Err(Error::Format(_))));
        let mut b = to_bytes(&set);
        b.pop();
        assert!(matches!(from_bytes(&b), Err(Error::Length { .. })));
        let mut b = to_bytes(&set);
        b[14] = 9;
        assert!(matches!(from_bytes(&b), Err(Error::Format(_))));
    }
}
