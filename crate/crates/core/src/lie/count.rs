use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;

use super::{BracketRule, LieError};
use crate::shift::PeriodicConfig;

pub const DEFAULT_PERIODIC_CAP: u128 = 1 << 34;

#[derive(Debug, Clone, Copy)]
pub struct PeriodicCountOptions {
    /// Largest number of pairs `q^(2N)` the enumeration may visit.
    pub cap: u128,
}

impl Default for PeriodicCountOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_PERIODIC_CAP,
        }
    }
}

/// One basis vector per free coordinate of an `n`-periodic point: every
/// (cell, vector track), plus the constant factor when there is one.
pub(crate) fn periodic_basis(rule: &BracketRule, n: usize) -> Vec<PeriodicConfig> {
    let field = rule.field();
    let tracks = rule.tracks();
    let mut out = Vec::new();
    for i in 0..n as i64 {
        for t in 0..rule.vector_tracks() {
            let mut b = PeriodicConfig::zero(field, n, tracks);
            b.set(i, t, 1);
            out.push(b);
        }
    }
    if rule.has_constant_factor() {
        let mut b = PeriodicConfig::zero(field, n, tracks);
        for i in 0..n as i64 {
            b.set(i, tracks - 1, 1);
        }
        out.push(b);
    }
    out
}

/// Counts ordered pairs of `n`-periodic points whose bracket is zero, by
/// visiting every pair. For each `x` the map `y -> [x, y]` is linear; `y`
/// runs through a Gray code (or an odometer for odd `q`) so each step adds
/// one precomputed column. `x` with an all-zero map skip the inner loop.
pub fn periodic_zero_pairs(
    rule: &BracketRule,
    n: usize,
    opts: PeriodicCountOptions,
) -> Result<BigUint, LieError> {
    if n == 0 {
        return Err(LieError::Shape("period must be at least 1".into()));
    }
    let field = rule.field();
    let q = field.modulus() as u128;
    let basis = periodic_basis(rule, n);
    let dim = basis.len() as u32;
    let size = q
        .checked_pow(2 * dim)
        .filter(|&s| s <= opts.cap)
        .ok_or(LieError::CapExceeded {
            size: q.checked_pow(2 * dim).unwrap_or(u128::MAX),
            cap: opts.cap,
        })?;
    let per_x = q.pow(dim);
    debug_assert_eq!(per_x * per_x, size);

    // columns[i][j] = [b_i, b_j] flattened
    let columns: Vec<Vec<Vec<u32>>> = basis
        .iter()
        .map(|bi| {
            basis
                .iter()
                .map(|bj| rule.eval_periodic_unchecked(bi, bj).values().to_vec())
                .collect()
        })
        .collect();
    let out_len = n * rule.tracks();
    let dim = dim as usize;

    let total: u128 = (0..per_x as u64)
        .into_par_iter()
        .map(|xi| {
            let mut digits = vec![0u32; dim];
            let mut rest = xi;
            for dgt in digits.iter_mut() {
                *dgt = (rest % q as u64) as u32;
                rest /= q as u64;
            }
            let m: Vec<Vec<u32>> = (0..dim)
                .map(|j| {
                    let mut col = vec![0u32; out_len];
                    for (i, &xv) in digits.iter().enumerate() {
                        if xv == 0 {
                            continue;
                        }
                        for (c, &v) in col.iter_mut().zip(&columns[i][j]) {
                            *c = field.add(*c, field.mul(xv, v));
                        }
                    }
                    col
                })
                .collect();
            if m.iter().all(|c| c.iter().all(|&v| v == 0)) {
                return per_x;
            }
            if q == 2 && out_len <= 128 {
                count_kernel_binary(&m)
            } else {
                count_kernel_odometer(field, &m, out_len)
            }
        })
        .sum();
    Ok(BigUint::from(total))
}

fn count_kernel_binary(m: &[Vec<u32>]) -> u128 {
    let masks: Vec<u128> = m
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .fold(0u128, |acc, (i, &v)| acc | ((v as u128) << i))
        })
        .collect();
    let dim = masks.len();
    let mut acc = 0u128;
    let mut zeros = 1u128;
    for step in 1u64..(1u64 << dim) {
        acc ^= masks[step.trailing_zeros() as usize];
        zeros += u128::from(acc == 0);
    }
    zeros
}

fn count_kernel_odometer(field: crate::field::PrimeField, m: &[Vec<u32>], out_len: usize) -> u128 {
    let q = field.modulus();
    let dim = m.len();
    let mut digits = vec![0u32; dim];
    let mut acc = vec![0u32; out_len];
    let mut nonzero = 0usize;
    let mut zeros = 1u128;
    loop {
        let mut j = 0;
        loop {
            if j == dim {
                return zeros;
            }
            // adding column j moves digit j up by one, wrapping included
            for (a, &v) in acc.iter_mut().zip(&m[j]) {
                let before = *a != 0;
                *a = field.add(*a, v);
                let after = *a != 0;
                if before != after {
                    if after {
                        nonzero += 1;
                    } else {
                        nonzero -= 1;
                    }
                }
            }
            digits[j] += 1;
            if digits[j] == q {
                digits[j] = 0;
                j += 1;
            } else {
                break;
            }
        }
        zeros += u128::from(nonzero == 0);
    }
}

/// `(24^m + 40^m)^(n/m)` with `m = n / gcd(k, n)`.
pub fn closed_form_count(k: u64, n: u64) -> BigUint {
    assert!(n >= 1, "period must be at least 1");
    let m = n / k.gcd(&n);
    let base = BigUint::from(24u32).pow(m as u32) + BigUint::from(40u32).pow(m as u32);
    base.pow((n / m) as u32)
}

/// Reference values: `24^n` for `k = 0` (brute force gives `40^n` instead),
/// the closed form otherwise.
pub fn listed_count(k: u64, n: u64) -> BigUint {
    if k == 0 {
        BigUint::from(24u32).pow(n as u32)
    } else {
        closed_form_count(k, n)
    }
}
