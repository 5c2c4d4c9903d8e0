//! Naive reference implementations used as test oracles.
//!
//! Everything here works on plain `Vec<i8>` bipolar vectors and recomputes
//! overlaps and powers from scratch, sharing no code with the library's
//! bit-packed, cached paths.

#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;

use damcap::Pattern;

pub fn naive_hd(a: &[i8], b: &[i8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn naive_overlap(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x as i64 * y as i64).sum()
}

/// `x^n` for `x > 0` by repeated multiplication.
pub fn naive_rect_poly(x: i64, n: u32) -> BigInt {
    if x <= 0 {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for _ in 0..n {
        acc *= x;
    }
    acc
}

/// Local field of neuron `i`: both branch states are materialized in full.
pub fn naive_field(memories: &[Vec<i8>], state: &[i8], i: usize, n: u32) -> BigInt {
    let mut plus = state.to_vec();
    plus[i] = 1;
    let mut minus = state.to_vec();
    minus[i] = -1;
    memories
        .iter()
        .map(|m| {
            naive_rect_poly(naive_overlap(m, &plus), n)
                - naive_rect_poly(naive_overlap(m, &minus), n)
        })
        .sum()
}

/// New value of neuron `i`; zero field keeps the current value.
pub fn naive_update(memories: &[Vec<i8>], state: &[i8], i: usize, n: u32) -> i8 {
    let f = naive_field(memories, state, i, n);
    match f.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => state[i],
    }
}

/// One asynchronous sweep in index order starting from `candidate`; true iff
/// the final state equals the candidate (normalized inner product 1).
pub fn naive_sweep_fixed_point(memories: &[Vec<i8>], candidate: &[i8], n: u32) -> bool {
    let mut state = candidate.to_vec();
    for i in 0..state.len() {
        state[i] = naive_update(memories, &state, i, n);
    }
    naive_overlap(&state, candidate) == candidate.len() as i64
}

pub fn naive_prefix_retrieval(patterns: &[Vec<i8>], k: usize, n: u32) -> bool {
    let mem = &patterns[..k];
    mem.iter().all(|c| naive_sweep_fixed_point(mem, c, n))
}

pub fn random_bipolar<R: Rng>(rng: &mut R, n: usize) -> Vec<i8> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect()
}

pub fn to_pattern(v: &[i8]) -> Pattern {
    Pattern::from_bipolar(v).unwrap()
}

/// Every bipolar vector of length `n` (n small).
pub fn all_bipolar(n: usize) -> Vec<Vec<i8>> {
    (0..1u32 << n)
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

/// Pearson correlation, computed directly.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
