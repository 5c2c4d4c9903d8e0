//! Bipolar patterns stored bit-packed, and the separation metrics defined on them.
//!
//! A [`Pattern`] holds `N` neurons with values in `{+1, -1}`. Bit `i` set means
//! neuron `i` is `+1`. Bits live in little-endian order inside `u64` words and
//! padding bits past `N` in the last word are always zero, so whole-word
//! popcounts never need masking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Number of `u64` words needed for `n` bits.
pub fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    words: Vec<u64>,
    n_neurons: usize,
}

impl std::fmt::Debug for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.n_neurons <= 64 {
            let s: String = (0..self.n_neurons)
                .map(|i| if self.bit(i) { '+' } else { '-' })
                .collect();
            write!(f, "Pattern({s})")
        } else {
            write!(
                f,
                "Pattern(n={}, ones={})",
                self.n_neurons,
                self.count_plus()
            )
        }
    }
}

impl Pattern {
    /// All-`-1` pattern of `n` neurons.
    pub fn minus_ones(n: usize) -> Self {
        Pattern {
            words: vec![0; words_for(n)],
            n_neurons: n,
        }
    }

    /// All-`+1` pattern of `n` neurons.
    pub fn plus_ones(n: usize) -> Self {
        let mut p = Pattern {
            words: vec![u64::MAX; words_for(n)],
            n_neurons: n,
        };
        p.clear_padding();
        p
    }

    /// Builds a pattern from `+1`/`-1` values. Any other value is a format error.
    pub fn from_bipolar(values: &[i8]) -> Result<Self> {
        let mut p = Pattern::minus_ones(values.len());
        for (i, &v) in values.iter().enumerate() {
            match v {
                1 => p.set(i, true),
                -1 => {}
                other => {
                    return Err(Error::Format(format!(
                        "bipolar value at {i} must be +1 or -1, got {other}"
                    )))
                }
            }
        }
        Ok(p)
    }

    /// Builds a pattern where `true` maps to `+1`.
    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut p = Pattern::minus_ones(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                p.set(i, true);
            }
        }
        p
    }

    /// Builds a pattern from raw words; bits past `n` are cleared.
    pub fn from_words(mut words: Vec<u64>, n: usize) -> Result<Self> {
        if words.len() != words_for(n) {
            return Err(Error::Dimension {
                expected: words_for(n),
                actual: words.len(),
            });
        }
        if let Some(last) = words.last_mut() {
            let rem = n % WORD_BITS;
            if rem != 0 {
                *last &= (1u64 << rem) - 1;
            }
        }
        Ok(Pattern {
            words,
            n_neurons: n,
        })
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `true` when neuron `i` is `+1`. Panics if `i >= N`.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.n_neurons, "neuron {i} out of range");
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// Value of neuron `i` as `+1` or `-1`.
    #[inline]
    pub fn value(&self, i: usize) -> i8 {
        if self.bit(i) {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, i: usize, plus: bool) {
        assert!(i < self.n_neurons, "neuron {i} out of range");
        let mask = 1u64 << (i % WORD_BITS);
        if plus {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Copy of this pattern with neuron `i` negated.
    pub fn with_flipped(&self, i: usize) -> Self {
        let mut p = self.clone();
        p.set(i, !self.bit(i));
        p
    }

    pub fn to_bipolar(&self) -> Vec<i8> {
        (0..self.n_neurons).map(|i| self.value(i)).collect()
    }

    /// Global sign flip.
    pub fn complement(&self) -> Self {
        let mut p = Pattern {
            words: self.words.iter().map(|w| !w).collect(),
            n_neurons: self.n_neurons,
        };
        p.clear_padding();
        p
    }

    /// Number of `+1` neurons.
    pub fn count_plus(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn clear_padding(&mut self) {
        let rem = self.n_neurons % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn check_same_len(&self, other: &Pattern) -> Result<()> {
        if self.n_neurons != other.n_neurons {
            return Err(Error::Dimension {
                expected: self.n_neurons,
                actual: other.n_neurons,
            });
        }
        Ok(())
    }

    /// Hamming distance without the length check. Callers guarantee equal `N`.
    #[inline]
    pub(crate) fn hd_unchecked(&self, other: &Pattern) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &Pattern, b: &Pattern) -> Result<usize> {
    a.check_same_len(b)?;
    Ok(a.hd_unchecked(b))
}

/// Inner product `sum_i a_i * b_i`, computed as `N - 2 * HD`.
pub fn overlap(a: &Pattern, b: &Pattern) -> Result<i64> {
    let hd = hamming_distance(a, b)?;
    Ok(a.n_neurons as i64 - 2 * hd as i64)
}

/// Mean Hamming distance over all unordered pairs of `patterns`.
pub fn mean_pairwise_hd_of(patterns: &[Pattern]) -> Result<f64> {
    if patterns.len() < 2 {
        return Err(Error::InsufficientPatterns {
            needed: 2,
            actual: patterns.len(),
        });
    }
    let n = patterns[0].n_neurons;
    for p in patterns {
        if p.n_neurons != n {
            return Err(Error::Dimension {
                expected: n,
                actual: p.n_neurons,
            });
        }
    }
    let mut total: u64 = 0;
    for (i, a) in patterns.iter().enumerate() {
        for b in &patterns[i + 1..] {
            total += a.hd_unchecked(b) as u64;
        }
    }
    let pairs = (patterns.len() * (patterns.len() - 1) / 2) as f64;
    Ok(total as f64 / pairs)
}

/// Mean Hamming distance over all unordered pairs in the set.
pub fn mean_pairwise_hd(set: &PatternSet) -> Result<f64> {
    mean_pairwise_hd_of(set.patterns())
}

/// Where a pattern set came from. The discriminant is the on-disk source tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Rademacher = 0,
    ImagePool = 1,
    External = 2,
}

impl Source {
    pub fn tag(self) -> u8 {
        self as u8
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Source::Rademacher),
            1 => Ok(Source::ImagePool),
            2 => Ok(Source::External),
            t => Err(Error::Format(format!("unknown source tag {t}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Rademacher => "rademacher",
            Source::ImagePool => "image_pool",
            Source::External => "external",
        }
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher" => Ok(Source::Rademacher),
            "image_pool" => Ok(Source::ImagePool),
            "external" => Ok(Source::External),
            other => Err(Error::Format(format!("unknown source {other:?}"))),
        }
    }
}

/// Ordered, non-empty collection of equal-length patterns plus provenance.
///
/// Order matters: capacity measurement stores prefixes of this list.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
    pub source: Source,
    pub target_hd: Option<f64>,
    pub seed: u64,
    pub skew_p: Option<f64>,
}

impl PatternSet {
    pub fn new(patterns: Vec<Pattern>, source: Source) -> Result<Self> {
        let first = patterns.first().ok_or(Error::InsufficientPatterns {
            needed: 1,
            actual: 0,
        })?;
        let n = first.n_neurons;
        if n == 0 {
            return Err(Error::Spec("patterns must have at least one neuron".into()));
        }
        if let Some(bad) = patterns.iter().find(|p| p.n_neurons != n) {
            return Err(Error::Dimension {
                expected: n,
                actual: bad.n_neurons,
            });
        }
        Ok(PatternSet {
            patterns,
            source,
            target_hd: None,
            seed: 0,
            skew_p: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_target_hd(mut self, target: f64) -> Self {
        self.target_hd = Some(target);
        self
    }

    pub fn with_skew_p(mut self, p: f64) -> Self {
        self.skew_p = Some(p);
        self
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn into_patterns(self) -> Vec<Pattern> {
        self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    /// Always false; a set holds at least one pattern.
    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn n_neurons(&self) -> usize {
        self.patterns[0].n_neurons
    }

    /// The first `k` patterns in stored order.
    pub fn prefix(&self, k: usize) -> Result<&[Pattern]> {
        if k == 0 || k > self.patterns.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.patterns.len(),
            });
        }
        Ok(&self.patterns[..k])
    }
}
