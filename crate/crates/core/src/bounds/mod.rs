//! Exact upper and lower bounds on the number of stable configurations.
//!
//! Every value is an exact [`BigUint`]; quotients of factorials go through
//! prime factorizations and fail loudly if a division would not be exact.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

mod exact;

pub use self::exact::{binomial, factorial, multinomial};
use self::exact::{binomial_signed, product};

/// Significant digits used when a report is rendered without an explicit
/// precision.
pub const DEFAULT_SIG_DIGITS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Naive,
    ZigzagT,
    ZigzagZ,
    BinaryZetaT,
    BinaryGammaZ,
    LowerBinary,
    LowerGeneral,
    LemmaRecursiveT,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Naive => "naive",
            BoundKind::ZigzagT => "zigzag_T",
            BoundKind::ZigzagZ => "zigzag_Z",
            BoundKind::BinaryZetaT => "binary_zeta_T",
            BoundKind::BinaryGammaZ => "binary_gamma_Z",
            BoundKind::LowerBinary => "lower_binary",
            BoundKind::LowerGeneral => "lower_general",
            BoundKind::LemmaRecursiveT => "lemma_recursive_T",
        }
    }
}

/// Which count a bound is about: subtree orderings `T` or stable
/// configurations `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    T,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub k: u32,
    pub ell: u32,
    pub value: BigUint,
}

impl BoundReport {
    pub fn sci(&self) -> Scientific {
        Scientific::round(&self.value, DEFAULT_SIG_DIGITS)
    }
}

/// Decimal rounding `d.ddd × 10^exponent` of an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scientific {
    /// Significant digits, no leading zero unless the value is zero.
    pub digits: String,
    pub exponent: u64,
}

impl Scientific {
    /// Rounds half to even at `sig` significant digits.
    pub fn round(value: &BigUint, sig: usize) -> Scientific {
        assert!(sig >= 1);
        let s = value.to_str_radix(10);
        let exponent = s.len() as u64 - 1;
        if s.len() <= sig {
            return Scientific { digits: s, exponent };
        }
        let (head, rest) = s.split_at(sig);
        let rest = rest.as_bytes();
        let round_up = match rest[0] {
            b'6'..=b'9' => true,
            b'5' => rest[1..].iter().any(|&d| d != b'0') || (head.as_bytes()[sig - 1] - b'0') % 2 == 1,
            _ => false,
        };
        let mut digits: Vec<u8> = head.bytes().collect();
        let mut exponent = exponent;
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    // 99..9 rolled over
                    digits.insert(0, b'1');
                    digits.pop();
                    exponent += 1;
                    break;
                }
                i -= 1;
                if digits[i] == b'9' {
                    digits[i] = b'0';
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
        Scientific { digits: String::from_utf8(digits).expect("ascii digits"), exponent }
    }

    /// The mantissa as a decimal string, such as `3.2146`.
    pub fn mantissa(&self) -> String {
        let (first, rest) = self.digits.split_at(1);
        if rest.is_empty() {
            String::from(first)
        } else {
            format!("{first}.{rest}")
        }
    }
}

impl fmt::Display for Scientific {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}e{}", self.mantissa(), self.exponent)
    }
}

fn require(ok: bool, what: &str, ell: u32) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{what} is not defined for ell = {ell}")))
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArity(k));
    }
    Ok(())
}

/// `N_{k,ell} = (k^ell - 1)/(k - 1)`.
pub fn n_chips(k: u32, ell: u32) -> BigUint {
    let k = BigUint::from(k);
    (k.pow(ell) - 1u32) / (k - 1u32)
}

/// `N_{k,ell}` as a machine integer, for use as a factorial argument.
fn n_small(k: u32, ell: u32) -> Result<u64> {
    u64::try_from(n_chips(k, ell)).map_err(|_| Error::OutOfRange(format!("N_{{{k},{ell}}} exceeds u64")))
}

/// Euler zigzag number `A_n`, the number of alternating permutations of
/// `1..=n`, by the boustrophedon recurrence.
pub fn euler_zigzag(n: u32) -> BigUint {
    let mut row = alloc::vec![BigUint::one()];
    for m in 1..=n as usize {
        let mut next = Vec::with_capacity(m + 1);
        next.push(BigUint::zero());
        for j in 1..=m {
            let v = &next[j - 1] + &row[m - j];
            next.push(v);
        }
        row = next;
    }
    row.pop().expect("row is nonempty")
}

/// `(N_{k,ell} - 2)!`.
pub fn naive_bound(k: u32, ell: u32) -> Result<BoundReport> {
    check_k(k)?;
    require(ell > 2, "the naive bound", ell)?;
    let n = n_small(k, ell)?;
    Ok(BoundReport { kind: BoundKind::Naive, k, ell, value: factorial(n - 2) })
}

/// Part sizes of the multinomial inside `beta(k, ell)`: the non-zigzag
/// chips of the two largest subtrees, then whole smaller subtrees.
pub fn beta_parts(k: u32, ell: u32) -> Result<Vec<u64>> {
    check_k(k)?;
    require(ell >= 3, "beta", ell)?;
    let ku = k as usize;
    let mut parts = Vec::new();
    for level in [ell - 1, ell - 2] {
        let n = n_small(k, level)?;
        parts.push(n - 1);
        parts.extend(core::iter::repeat_n(n, ku - 2));
    }
    for level in (1..=ell - 3).rev() {
        parts.extend(core::iter::repeat_n(n_small(k, level)?, ku - 1));
    }
    Ok(parts)
}

/// `C(N-2, ell) * A_ell * n!/prod(parts!)` with the parts from
/// [`beta_parts`].
fn beta_without_zigzag(k: u32, ell: u32) -> Result<BigUint> {
    let n = n_small(k, ell)?;
    let parts = beta_parts(k, ell)?;
    let rest = n - u64::from(ell) - 2;
    debug_assert_eq!(parts.iter().sum::<u64>(), rest);
    Ok(binomial(n - 2, u64::from(ell)) * multinomial(rest, &parts)?)
}

pub fn beta(k: u32, ell: u32) -> Result<BigUint> {
    Ok(beta_without_zigzag(k, ell)? * euler_zigzag(ell))
}

/// `(k-1)^{(k-1)k^{ell-3}} * beta_ell * prod_{i=1}^{ell-3} beta_{ell-i}^{(k-1)k^{i-1}}`,
/// an upper bound on both `T_{k,ell}` and `Z_{k,ell}`.
pub fn zigzag_bound(k: u32, ell: u32, target: Target) -> Result<BoundReport> {
    check_k(k)?;
    require(ell >= 3, "the zigzag bound", ell)?;
    let km1 = k - 1;
    let mut factors = alloc::vec![BigUint::from(km1).pow(km1 * k.pow(ell - 3)), beta(k, ell)?];
    for i in 1..=ell - 3 {
        factors.push(beta(k, ell - i)?.pow(km1 * k.pow(i - 1)));
    }
    let kind = match target {
        Target::T => BoundKind::ZigzagT,
        Target::Z => BoundKind::ZigzagZ,
    };
    Ok(BoundReport { kind, k, ell, value: product(factors) })
}

/// One step of the recursive subtree bound: `beta_ell * prod_{i=1}^{ell-1} T_i^{k-1}`,
/// where `t_values[i - 1]` bounds `T_{k,i}`.
pub fn lemma_recursive_t(k: u32, ell: u32, t_values: &[BigUint]) -> Result<BoundReport> {
    check_k(k)?;
    require(ell >= 3, "the recursive bound", ell)?;
    let needed = (ell - 1) as usize;
    if t_values.len() < needed {
        return Err(Error::MissingTLevel(t_values.len() as u32 + 1));
    }
    let mut factors = alloc::vec![beta(k, ell)?];
    factors.extend(t_values[..needed].iter().map(|t| t.pow(k - 1)));
    Ok(BoundReport { kind: BoundKind::LemmaRecursiveT, k, ell, value: product(factors) })
}

/// `A_ell C(2^ell - 3, ell)` times the multinomial over the binary subtree
/// remainders.
pub fn zeta(ell: u32) -> Result<BigUint> {
    binary_factor(ell, 3, 2)
}

/// Like [`zeta`] with two more chips pinned (`2^ell - 5`).
pub fn gamma(ell: u32) -> Result<BigUint> {
    binary_factor(ell, 5, 3)
}

fn binary_factor(ell: u32, pinned: u64, top_gap: u64) -> Result<BigUint> {
    require(ell >= 4, "the binary zeta/gamma factor", ell)?;
    let full = 1u64 << ell;
    let mut parts = alloc::vec![(1u64 << (ell - 1)) - top_gap, (1u64 << (ell - 2)) - top_gap];
    parts.extend((1..=ell - 3).rev().map(|j| (1u64 << j) - 1));
    let rest = full - u64::from(ell) - pinned;
    Ok(euler_zigzag(ell) * binomial(full - pinned, u64::from(ell)) * multinomial(rest, &parts)?)
}

/// `10^{2^{ell-4}} * lead * prod_{i=4}^{ell-1} zeta_i^{2^{ell-1-i}}` with
/// `lead = zeta_ell` for `T` and `gamma_ell` for `Z`.
pub fn binary_zigzag_bound(ell: u32, target: Target) -> Result<BoundReport> {
    require(ell >= 4, "the binary zigzag bound", ell)?;
    let (lead, kind) = match target {
        Target::T => (zeta(ell)?, BoundKind::BinaryZetaT),
        Target::Z => (gamma(ell)?, BoundKind::BinaryGammaZ),
    };
    let mut factors = alloc::vec![BigUint::from(10u32).pow(1 << (ell - 4)), lead];
    for i in 4..ell {
        factors.push(zeta(i)?.pow(1 << (ell - 1 - i)));
    }
    Ok(BoundReport { kind, k: 2, ell, value: product(factors) })
}

/// Number of root-level choices in the lower-bound construction at `level`:
/// `sum_{i=0}^{floor(k/2)} C(a, i) C(b + i, i)` with
/// `a = (N-1)floor(k/2)/k - 1 - floor(k/2)` and
/// `b = (N-1)ceil(k/2)/k - 1 - 2 ceil(k/2)`, `N = N_{k,level}`.
pub fn eta(k: u32, level: u32) -> Result<BigUint> {
    check_k(k)?;
    require(level >= 2, "eta", level)?;
    let (a, b) = eta_ranges(k, level)?;
    let half = u64::from(k / 2);
    Ok((0..=half).map(|i| binomial_signed(a, i) * binomial_signed(b + i as i64, i)).sum())
}

/// The `(a, b)` upper indices of [`eta`].
pub(crate) fn eta_ranges(k: u32, level: u32) -> Result<(i64, i64)> {
    let n = n_small(k, level)?;
    let m = i64::try_from(n - 1).map_err(|_| Error::OutOfRange(format!("N_{{{k},{level}}}")))?;
    let (k, floor, ceil) = (i64::from(k), i64::from(k / 2), i64::from(k - k / 2));
    Ok((m * floor / k - 1 - floor, m * ceil / k - 1 - 2 * ceil))
}

/// `prod_{j=3}^{ell} eta(k, j)^{k^{ell-j}}`.
pub fn lower_bound_general(k: u32, ell: u32) -> Result<BoundReport> {
    check_k(k)?;
    require(ell >= 3, "the general lower bound", ell)?;
    let factors = (3..=ell).map(|j| Ok(eta(k, j)?.pow(k.pow(ell - j)))).collect::<Result<Vec<_>>>()?;
    Ok(BoundReport { kind: BoundKind::LowerGeneral, k, ell, value: product(factors) })
}

/// `6^{2^{ell-3}} * prod_{j=4}^{ell} (1 + ((N_{2,j}-1)/2 - 2)^2)^{2^{ell-j}}`.
pub fn lower_bound_binary(ell: u32) -> Result<BoundReport> {
    require(ell >= 3, "the binary lower bound", ell)?;
    let mut factors = alloc::vec![BigUint::from(6u32).pow(1 << (ell - 3))];
    for j in 4..=ell {
        let half = (n_chips(2, j) - 1u32) / 2u32 - 2u32;
        factors.push((&half * &half + 1u32).pow(1 << (ell - j)));
    }
    Ok(BoundReport { kind: BoundKind::LowerBinary, k: 2, ell, value: product(factors) })
}

/// Whether the zigzag bound is below `(N_{k,ell} - 3)!`.
pub fn asymptotic_check(k: u32, ell: u32) -> Result<bool> {
    check_k(k)?;
    require(ell >= 4, "the asymptotic comparison", ell)?;
    let zig = zigzag_bound(k, ell, Target::Z)?.value;
    Ok(zig < factorial(n_small(k, ell)? - 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn big(s: &str) -> BigUint {
        s.parse().unwrap()
    }

    /// Plain factorial, independent of the prime-exponent path.
    fn fact(n: u64) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, i| acc * i)
    }

    fn sci(v: &BigUint, digits: usize) -> String {
        Scientific::round(v, digits).to_string()
    }

    /// Brute-force count of alternating permutations (both directions).
    fn alternating(n: usize) -> u64 {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], up: Option<bool>, count: &mut u64) {
            let n = used.len();
            if prefix.len() == n {
                *count += 1;
                return;
            }
            for x in 0..n {
                if used[x] {
                    continue;
                }
                let next_up = match prefix.last() {
                    None => None,
                    Some(&last) => {
                        let rising = x > last;
                        if up.is_some_and(|u| u == rising) {
                            continue;
                        }
                        Some(rising)
                    }
                };
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, next_up, count);
                prefix.pop();
                used[x] = false;
            }
        }
        let mut count = 0;
        rec(&mut Vec::new(), &mut vec![false; n], None, &mut count);
        // each alternating permutation is counted together with its complement
        if n >= 2 {
            count / 2
        } else {
            count
        }
    }

    #[test]
    fn chip_counts() {
        assert_eq!(n_chips(2, 3), BigUint::from(7u32));
        assert_eq!(n_chips(4, 3), BigUint::from(21u32));
        assert_eq!(n_chips(3, 0), BigUint::zero());
    }

    #[test]
    fn zigzag_numbers_match_brute_force() {
        let known = [1u64, 1, 1, 2, 5, 16, 61, 272, 1385];
        for n in 0..=8 {
            assert_eq!(euler_zigzag(n), BigUint::from(known[n as usize]));
            if n >= 1 {
                assert_eq!(alternating(n as usize), known[n as usize], "n={n}");
            }
        }
    }

    #[test]
    fn naive_values() {
        assert_eq!(naive_bound(4, 3).unwrap().value, big("121645100408832000"));
        assert_eq!(naive_bound(2, 3).unwrap().value, BigUint::from(120u32));
        assert_eq!(sci(&naive_bound(4, 4).unwrap().value, 2), "3.9e124");
        assert!(matches!(naive_bound(4, 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn beta_matches_factorial_oracle() {
        for (k, ell) in [(2, 3), (2, 4), (3, 3), (4, 3), (3, 4)] {
            let n = n_small(k, ell).unwrap();
            let parts = beta_parts(k, ell).unwrap();
            let denom = parts.iter().fold(BigUint::one(), |acc, p| acc * fact(*p));
            let ell64 = u64::from(ell);
            let oracle =
                fact(n - 2) / (fact(ell64) * fact(n - 2 - ell64)) * fact(n - ell64 - 2) / denom * euler_zigzag(ell);
            assert_eq!(beta(k, ell).unwrap(), oracle, "k={k} ell={ell}");
        }
        assert_eq!(beta(4, 3).unwrap(), big("117327450240"));
        assert_eq!(beta(2, 3).unwrap(), BigUint::from(20u32));
        assert_eq!(beta_parts(2, 4).unwrap(), vec![6, 2, 1]);
    }

    #[test]
    fn beta_parts_sum() {
        for k in 2..=6 {
            for ell in 3..=10 {
                let sum: u64 = beta_parts(k, ell).unwrap().iter().sum();
                assert_eq!(sum, n_small(k, ell).unwrap() - u64::from(ell) - 2, "k={k} ell={ell}");
            }
        }
    }

    #[test]
    fn zigzag_values() {
        assert_eq!(zigzag_bound(4, 3, Target::Z).unwrap().value, big("3167841156480"));
        assert_eq!(zigzag_bound(2, 4, Target::Z).unwrap().value, BigUint::from(18_018_000u32));
        assert_eq!(zigzag_bound(2, 3, Target::T).unwrap().value, BigUint::from(20u32));
        assert_eq!(sci(&zigzag_bound(4, 4, Target::Z).unwrap().value, 5), "3.2146e99");
        assert_eq!(sci(&zigzag_bound(4, 5, Target::Z).unwrap().value, 5), "1.9761e601");
        assert_eq!(sci(&zigzag_bound(2, 5, Target::Z).unwrap().value, 2), "1.1e24");
    }

    #[test]
    fn closed_form_equals_unrolled_recursion() {
        for k in 2..=4u32 {
            let mut t = vec![BigUint::one(), BigUint::from(k - 1)];
            for ell in 3..=6 {
                let step = lemma_recursive_t(k, ell, &t).unwrap().value;
                assert_eq!(step, zigzag_bound(k, ell, Target::T).unwrap().value, "k={k} ell={ell}");
                t.push(step);
            }
        }
        assert_eq!(lemma_recursive_t(2, 3, &[BigUint::one(), BigUint::one()]).unwrap().value, BigUint::from(20u32));
        assert_eq!(lemma_recursive_t(2, 4, &[BigUint::one()]), Err(Error::MissingTLevel(2)));
    }

    #[test]
    fn binary_factors() {
        assert_eq!(gamma(4).unwrap(), BigUint::from(69_300u32));
        assert_eq!(zeta(4).unwrap(), BigUint::from(5u32 * 715 * 252));
        assert_eq!(binary_zigzag_bound(4, Target::Z).unwrap().value, BigUint::from(693_000u32));
        assert_eq!(sci(&binary_zigzag_bound(5, Target::Z).unwrap().value, 2), "2.9e22");
        assert_eq!(sci(&binary_zigzag_bound(7, Target::Z).unwrap().value, 2), "1.5e170");
        let g5 = gamma(5).unwrap() * zeta(4).unwrap() * 100u32;
        assert_eq!(binary_zigzag_bound(5, Target::Z).unwrap().value, g5);
        assert!(zeta(3).is_err());
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(4, 3).unwrap(), BigUint::from(484u32));
        assert_eq!(eta(2, 3).unwrap(), BigUint::from(2u32));
        assert_eq!(eta(4, 4).unwrap(), BigUint::from(1u32 + 39 * 38 + 741 * 741));
        assert_eq!(eta(2, 4).unwrap(), BigUint::from(26u32));
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(lower_bound_general(4, 3).unwrap().value, BigUint::from(484u32));
        assert_eq!(sci(&lower_bound_general(4, 4).unwrap().value, 3), "3.02e16");
        assert_eq!(sci(&lower_bound_general(4, 5).unwrap().value, 2), "1.6e74");
        assert_eq!(lower_bound_binary(3).unwrap().value, BigUint::from(6u32));
        assert_eq!(lower_bound_binary(4).unwrap().value, BigUint::from(936u32));
        assert_eq!(lower_bound_binary(5).unwrap().value, BigUint::from(148_936_320u32));
    }

    #[test]
    fn order_relations() {
        for k in 2..=5 {
            for ell in 3..=8 {
                let lo = lower_bound_general(k, ell).unwrap().value;
                let hi = zigzag_bound(k, ell, Target::Z).unwrap().value;
                assert!(lo <= hi, "k={k} ell={ell}");
            }
        }
        for ell in 3..=10 {
            assert!(lower_bound_binary(ell).unwrap().value >= lower_bound_general(2, ell).unwrap().value);
        }
    }

    #[test]
    fn zigzag_beats_naive() {
        for (k, ell) in [(2, 4), (3, 4), (4, 4), (2, 7), (5, 5)] {
            assert_eq!(asymptotic_check(k, ell), Ok(true), "k={k} ell={ell}");
        }
        assert!(BigUint::from(18_018_000u32) < fact(12));
    }

    #[test]
    fn scientific_rounding() {
        assert_eq!(sci(&BigUint::from(125u32), 2), "1.2e2");
        assert_eq!(sci(&BigUint::from(135u32), 2), "1.4e2");
        assert_eq!(sci(&BigUint::from(1251u32), 2), "1.3e3");
        assert_eq!(sci(&BigUint::from(9996u32), 3), "1.00e4");
        assert_eq!(sci(&BigUint::from(42u32), 5), "4.2e1");
        assert_eq!(sci(&BigUint::from(7u32), 5), "7e0");
        assert_eq!(sci(&BigUint::zero(), 3), "0e0");
    }
}
