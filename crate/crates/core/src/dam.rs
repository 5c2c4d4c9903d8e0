//! Dense Associative Memory with a rectified-polynomial interaction.
//!
//! Patterns are stored directly; there are no trained weights. For a state
//! `sigma` and stored memories `xi^mu`, neuron `i` updates to
//!
//! ```text
//! sign( sum_mu F_n(<xi^mu, sigma with sigma_i = +1>) - F_n(<xi^mu, sigma with sigma_i = -1>) )
//! ```
//!
//! where `F_n(x) = x^n` for `x > 0` and `0` otherwise. Retrieval of a stored
//! pattern means it is a fixed point: no neuron changes under this update.
//!
//! Overlaps are integers in `[-N, N]`, and `784^38` has 110 decimal digits, so
//! the reference path is exact big-integer arithmetic. A float path compares
//! the same sums after normalizing overlaps by `N`; when the two sums are
//! within a relative margin it abstains and the exact path decides.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::{Pattern, PatternSet};

pub const DEFAULT_FAST_MARGIN: f64 = 1e-6;

/// Largest integer magnitude below which f64 arithmetic on integers is exact.
const F64_EXACT: f64 = 9_007_199_254_740_992.0; // 2^53

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericPath {
    ExactInteger,
    /// Float comparison that defers to the exact path when undecided.
    #[default]
    FastFloatWithExactFallback,
}

impl std::str::FromStr for NumericPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_integer" | "exact-integer" => Ok(NumericPath::ExactInteger),
            "fast" | "fast_float" | "fast-float" | "fast_float_with_exact_fallback" => {
                Ok(NumericPath::FastFloatWithExactFallback)
            }
            other => Err(Error::Spec(format!("unknown numeric path {other:?}"))),
        }
    }
}

/// What a zero local field means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieMode {
    /// Keep the current value.
    #[default]
    Retain,
    /// Count the neuron as not retrieved.
    Strict,
}

impl std::str::FromStr for TieMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "retain" => Ok(TieMode::Retain),
            "strict" => Ok(TieMode::Strict),
            other => Err(Error::Spec(format!("unknown tie mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamConfig {
    pub n_neurons: usize,
    pub degree: u32,
    pub numeric_path: NumericPath,
    pub tie_mode: TieMode,
    /// Relative gap under which the float path abstains.
    pub fast_margin: f64,
}

impl DamConfig {
    pub fn new(n_neurons: usize, degree: u32) -> Result<Self> {
        let c = DamConfig {
            n_neurons,
            degree,
            numeric_path: NumericPath::default(),
            tie_mode: TieMode::default(),
            fast_margin: DEFAULT_FAST_MARGIN,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn exact(mut self) -> Self {
        self.numeric_path = NumericPath::ExactInteger;
        self
    }

    pub fn with_path(mut self, path: NumericPath) -> Self {
        self.numeric_path = path;
        self
    }

    pub fn with_tie_mode(mut self, mode: TieMode) -> Self {
        self.tie_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::Spec("degree must be >= 1".into()));
        }
        if self.n_neurons < 2 {
            return Err(Error::Spec("need at least 2 neurons".into()));
        }
        if self.fast_margin.is_nan() || self.fast_margin < 0.0 {
            return Err(Error::Spec("fast margin must be non-negative".into()));
        }
        Ok(())
    }
}

/// `x^n` for `x > 0`, else `0`. Exact.
pub fn rect_poly(x: i64, n: u32) -> BigUint {
    if x <= 0 {
        BigUint::zero()
    } else {
        BigUint::from(x as u64).pow(n)
    }
}

/// Stored memories `xi^1..xi^K` and the model configuration.
#[derive(Debug, Clone)]
pub struct StoredMemory {
    patterns: Vec<Pattern>,
    config: DamConfig,
}

impl StoredMemory {
    pub fn new(patterns: Vec<Pattern>, config: DamConfig) -> Result<Self> {
        config.validate()?;
        if patterns.is_empty() {
            return Err(Error::InsufficientPatterns {
                needed: 1,
                actual: 0,
            });
        }
        for p in &patterns {
            if p.n_neurons() != config.n_neurons {
                return Err(Error::Dimension {
                    expected: config.n_neurons,
                    actual: p.n_neurons(),
                });
            }
        }
        Ok(StoredMemory { patterns, config })
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn config(&self) -> &DamConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    fn check_state(&self, state: &Pattern) -> Result<()> {
        if state.n_neurons() != self.config.n_neurons {
            return Err(Error::Dimension {
                expected: self.config.n_neurons,
                actual: state.n_neurons(),
            });
        }
        Ok(())
    }

    fn overlaps(&self, state: &Pattern) -> Vec<i64> {
        let n = self.config.n_neurons as i64;
        self.patterns
            .iter()
            .map(|m| n - 2 * m.hd_unchecked(state) as i64)
            .collect()
    }

    /// Whether float arithmetic on raw integer powers is exact for this memory.
    fn float_is_exact(&self) -> bool {
        let n = self.config.n_neurons as f64;
        n.powi(self.config.degree as i32) * (self.patterns.len() as f64) < F64_EXACT
    }

    /// Float evaluation of `F_n`; normalized by `N^n` unless the raw value is
    /// exactly representable. Returns `None` if a positive argument underflows.
    fn float_power(&self, x: i64, raw: bool) -> Option<f64> {
        if x <= 0 {
            return Some(0.0);
        }
        let v = if raw {
            (x as f64).powi(self.config.degree as i32)
        } else {
            (x as f64 / self.config.n_neurons as f64).powi(self.config.degree as i32)
        };
        (v > f64::MIN_POSITIVE).then_some(v)
    }
}

/// Outcome of the float comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastDecision {
    Decided(Ordering),
    Abstain,
}

/// Compares two non-negative float sums, abstaining when they are too close
/// to order reliably.
fn decide(a: f64, b: f64, exact: bool, margin: f64) -> FastDecision {
    if exact || (a == 0.0 && b == 0.0) {
        return FastDecision::Decided(a.partial_cmp(&b).expect("finite sums"));
    }
    if (a - b).abs() <= margin * a.max(b) {
        FastDecision::Abstain
    } else {
        FastDecision::Decided(a.partial_cmp(&b).expect("finite sums"))
    }
}

/// Overlaps of the two branches `sigma_i = +1` and `sigma_i = -1` for each memory.
fn branch_overlaps(memory: &StoredMemory, state: &Pattern, i: usize) -> Vec<(i64, i64)> {
    let s = state.value(i) as i64;
    memory
        .overlaps(state)
        .into_iter()
        .zip(&memory.patterns)
        .map(|(o, m)| {
            let x = m.value(i) as i64;
            let base = o - x * s;
            (base + x, base - x)
        })
        .collect()
}

fn check_index(memory: &StoredMemory, state: &Pattern, i: usize) -> Result<()> {
    memory.check_state(state)?;
    if i >= state.n_neurons() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: state.n_neurons(),
        });
    }
    Ok(())
}

/// Sign of neuron `i`'s local field, exact.
pub fn exact_field_sign(memory: &StoredMemory, state: &Pattern, i: usize) -> Result<Ordering> {
    check_index(memory, state, i)?;
    let n = memory.config.degree;
    let (mut plus, mut minus) = (BigUint::zero(), BigUint::zero());
    for (p, m) in branch_overlaps(memory, state, i) {
        plus += rect_poly(p, n);
        minus += rect_poly(m, n);
    }
    Ok(plus.cmp(&minus))
}

/// Sign of neuron `i`'s local field from float sums, or an abstention.
pub fn fast_field_sign(memory: &StoredMemory, state: &Pattern, i: usize) -> Result<FastDecision> {
    check_index(memory, state, i)?;
    let raw = memory.float_is_exact();
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for (p, m) in branch_overlaps(memory, state, i) {
        match (memory.float_power(p, raw), memory.float_power(m, raw)) {
            (Some(fp), Some(fm)) => {
                plus += fp;
                minus += fm;
            }
            _ => return Ok(FastDecision::Abstain),
        }
    }
    Ok(decide(plus, minus, raw, memory.config.fast_margin))
}

/// Sign of neuron `i`'s local field using the configured numeric path.
pub fn field_sign(memory: &StoredMemory, state: &Pattern, i: usize) -> Result<Ordering> {
    match memory.config.numeric_path {
        NumericPath::ExactInteger => exact_field_sign(memory, state, i),
        NumericPath::FastFloatWithExactFallback => match fast_field_sign(memory, state, i)? {
            FastDecision::Decided(o) => Ok(o),
            FastDecision::Abstain => exact_field_sign(memory, state, i),
        },
    }
}

/// Value of neuron `i` after one update. A zero field keeps `state[i]`.
pub fn update_sign(memory: &StoredMemory, state: &Pattern, i: usize) -> Result<i8> {
    Ok(match field_sign(memory, state, i)? {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => state.value(i),
    })
}

/// Per-candidate power cache. For a candidate `sigma` with overlaps `O_mu`,
/// the branch overlaps for any neuron are `O_mu` (current value) and
/// `O_mu - 2` or `O_mu + 2` (flipped value), so three powers per memory cover
/// all `N` neurons.
struct CandidatePowers {
    overlaps: Vec<i64>,
    /// Per memory, bit `i` set when `xi^mu_i == sigma_i`.
    agree: Vec<Vec<u64>>,
}

impl CandidatePowers {
    fn new(memory: &StoredMemory, candidate: &Pattern) -> Self {
        let n = candidate.n_neurons();
        let rem = n % 64;
        let agree = memory
            .patterns
            .iter()
            .map(|m| {
                let mut words: Vec<u64> = m
                    .words()
                    .iter()
                    .zip(candidate.words())
                    .map(|(a, b)| !(a ^ b))
                    .collect();
                if rem != 0 {
                    *words.last_mut().unwrap() &= (1u64 << rem) - 1;
                }
                words
            })
            .collect();
        CandidatePowers {
            overlaps: memory.overlaps(candidate),
            agree,
        }
    }

    #[inline]
    fn agrees(&self, mu: usize, i: usize) -> bool {
        (self.agree[mu][i / 64] >> (i % 64)) & 1 == 1
    }
}

struct ExactPowers {
    keep: BigUint,
    /// `F(O - 2)` per memory, used where the memory agrees with the candidate.
    flip_agree: Vec<BigUint>,
    /// `F(O + 2)` per memory, used where it disagrees.
    flip_disagree: Vec<BigUint>,
}

impl ExactPowers {
    fn new(cp: &CandidatePowers, degree: u32) -> Self {
        ExactPowers {
            keep: cp.overlaps.iter().map(|&o| rect_poly(o, degree)).sum(),
            flip_agree: cp
                .overlaps
                .iter()
                .map(|&o| rect_poly(o - 2, degree))
                .collect(),
            flip_disagree: cp
                .overlaps
                .iter()
                .map(|&o| rect_poly(o + 2, degree))
                .collect(),
        }
    }

    /// `keep - flip_i` compared to zero.
    fn margin_sign(&self, cp: &CandidatePowers, i: usize) -> Ordering {
        let mut flip = BigUint::zero();
        for mu in 0..cp.overlaps.len() {
            if cp.agrees(mu, i) {
                flip += &self.flip_agree[mu];
            } else {
                flip += &self.flip_disagree[mu];
            }
        }
        self.keep.cmp(&flip)
    }
}

struct FloatPowers {
    keep: f64,
    flip_agree: Vec<f64>,
    flip_disagree: Vec<f64>,
    raw: bool,
}

impl FloatPowers {
    fn new(memory: &StoredMemory, cp: &CandidatePowers) -> Option<Self> {
        let raw = memory.float_is_exact();
        let f = |x| memory.float_power(x, raw);
        let mut keep = 0.0;
        let mut flip_agree = Vec::with_capacity(cp.overlaps.len());
        let mut flip_disagree = Vec::with_capacity(cp.overlaps.len());
        for &o in &cp.overlaps {
            keep += f(o)?;
            flip_agree.push(f(o - 2)?);
            flip_disagree.push(f(o + 2)?);
        }
        Some(FloatPowers {
            keep,
            flip_agree,
            flip_disagree,
            raw,
        })
    }

    fn margin_sign(&self, cp: &CandidatePowers, i: usize, margin: f64) -> FastDecision {
        let mut flip = 0.0;
        for mu in 0..cp.overlaps.len() {
            flip += if cp.agrees(mu, i) {
                self.flip_agree[mu]
            } else {
                self.flip_disagree[mu]
            };
        }
        decide(self.keep, flip, self.raw, margin)
    }
}

/// Whether a neuron with the given `keep - flip` sign stays put.
fn stable(sign: Ordering, tie: TieMode) -> bool {
    match sign {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => tie == TieMode::Retain,
    }
}

/// True iff no neuron of `candidate` changes under one update.
///
/// Starting from the candidate, checking that no neuron flips is independent
/// of the visiting order, and equals any single asynchronous sweep that
/// encounters no flip.
pub fn is_fixed_point(memory: &StoredMemory, candidate: &Pattern) -> Result<bool> {
    memory.check_state(candidate)?;
    let cfg = memory.config;
    let cp = CandidatePowers::new(memory, candidate);
    let n = candidate.n_neurons();

    let float = match cfg.numeric_path {
        NumericPath::ExactInteger => None,
        NumericPath::FastFloatWithExactFallback => FloatPowers::new(memory, &cp),
    };
    let mut exact: Option<ExactPowers> = None;
    if float.is_none() {
        exact = Some(ExactPowers::new(&cp, cfg.degree));
    }

    for i in 0..n {
        let sign = match float
            .as_ref()
            .map(|f| f.margin_sign(&cp, i, cfg.fast_margin))
        {
            Some(FastDecision::Decided(s)) => s,
            _ => exact
                .get_or_insert_with(|| ExactPowers::new(&cp, cfg.degree))
                .margin_sign(&cp, i),
        };
        if !stable(sign, cfg.tie_mode) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff each of the first `k` patterns is a fixed point of the DAM that
/// stores exactly those `k` patterns.
pub fn check_prefix_retrieval(patterns: &PatternSet, k: usize, config: &DamConfig) -> Result<bool> {
    let prefix = patterns.prefix(k)?;
    let memory = StoredMemory::new(prefix.to_vec(), *config)?;
    for candidate in prefix {
        if !is_fixed_point(&memory, candidate)? {
            return Ok(false);
        }
    }
    Ok(true)
}
