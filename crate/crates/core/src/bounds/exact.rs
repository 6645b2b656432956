//! Exact factorial quotients through prime factorizations.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::{Error, Result};

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut m = p * p;
        while m <= n {
            composite[m] = true;
            m += p;
        }
    }
    primes
}

/// Exponent of `p` in `n!`.
fn legendre(n: u64, p: u64) -> i64 {
    let mut e = 0;
    let mut q = n;
    while q > 0 {
        q /= p;
        e += q as i64;
    }
    e
}

/// Product of the items by balanced pairing.
pub(crate) fn product(mut items: Vec<BigUint>) -> BigUint {
    if items.is_empty() {
        return BigUint::one();
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a * b,
                None => a,
            });
        }
        items = next;
    }
    items.pop().expect("one item left")
}

/// `n! / prod(d!)` for any `n` and divisors `denominators`, failing when the
/// quotient is not an integer.
pub(crate) fn factorial_quotient(n: u64, denominators: &[u64]) -> Result<BigUint> {
    let primes = primes_up_to(denominators.iter().copied().chain([n]).max().unwrap_or(0));
    let mut powers = Vec::new();
    for p in primes {
        let e = legendre(n, p) - denominators.iter().map(|&d| legendre(d, p)).sum::<i64>();
        if e < 0 {
            return Err(Error::NonIntegralDivision(format!("{n}! / {denominators:?}")));
        }
        if e > 0 {
            powers.push(BigUint::from(p).pow(e as u32));
        }
    }
    Ok(product(powers))
}

pub fn factorial(n: u64) -> BigUint {
    factorial_quotient(n, &[]).expect("no denominators")
}

/// `n! / prod(parts!)`; the parts must sum to `n`.
pub fn multinomial(n: u64, parts: &[u64]) -> Result<BigUint> {
    let sum: u64 = parts.iter().sum();
    if sum != n {
        return Err(Error::OutOfRange(format!("multinomial parts sum to {sum}, not {n}")));
    }
    factorial_quotient(n, parts)
}

/// `C(n, r)`, zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::default();
    }
    factorial_quotient(n, &[r, n - r]).expect("binomials are integral")
}

/// `C(n, r)` with a signed upper index: `C(n, 0) = 1`, and zero whenever
/// `n < r` or `n < 0` with `r > 0`.
pub(crate) fn binomial_signed(n: i64, r: u64) -> BigUint {
    if r == 0 {
        return BigUint::one();
    }
    if n < 0 {
        return BigUint::default();
    }
    binomial(n as u64, r)
}
