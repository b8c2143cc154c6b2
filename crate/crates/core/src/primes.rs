//! Trial-division arithmetic on 64-bit integers.
//!
//! Everything here is deterministic: primality and factorization use trial
//! division against a lazily built table of small primes, continuing with a
//! 6k±1 wheel past the end of the table. Prime indices (`p_1 = 2`,
//! `p_2 = 3`, ...) come from the table when possible and from a
//! Lucy-Hedgehog prime count otherwise.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Upper end of the sieved prime table.
pub const TABLE_LIMIT: u64 = 1 << 23;

/// Largest prime whose index we are willing to compute with a prime count.
pub const PRIME_INDEX_LIMIT: u64 = 1 << 40;

/// Default trial-division bound used by the counting routines.
pub const DEFAULT_TRIAL_BOUND: u64 = 10_000_000;

/// Prime factorization as `(prime, exponent)` pairs with increasing primes.
pub type Factors = Vec<(u64, u32)>;

fn table() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| sieve(TABLE_LIMIT))
}

/// All primes `<= limit`, by the sieve of Eratosthenes.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Trial divisors in increasing order: the prime table, then 6k±1.
fn trial_divisors() -> impl Iterator<Item = u64> {
    let tab = table();
    let last = *tab.last().unwrap();
    // first 6k-1 strictly above the table
    let start = (last / 6 + 1) * 6 - 1;
    let wheel = (0u64..).flat_map(move |i| {
        let a = start + 6 * i;
        [a, a + 2]
    });
    tab.iter().copied().chain(wheel.filter(move |&d| d > last))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n <= TABLE_LIMIT {
        return table().binary_search(&n).is_ok();
    }
    let root = n.isqrt();
    for d in trial_divisors() {
        if d > root {
            return true;
        }
        if n % d == 0 {
            return false;
        }
    }
    unreachable!()
}

/// Complete factorization; always succeeds (trial division to `sqrt(n)`).
pub fn factorize(n: u64) -> Factors {
    factorize_bounded(n, u64::MAX).expect("unbounded trial division cannot fail")
}

/// Factorization using trial divisors no larger than `bound`.
///
/// A cofactor left over once the divisors pass `bound` is accepted as prime
/// only when it is smaller than `(bound + 1)^2`.
pub fn factorize_bounded(n: u64, bound: u64) -> Result<Factors> {
    let mut out = Factors::new();
    if n <= 1 {
        return Ok(out);
    }
    let mut m = n;
    for d in trial_divisors() {
        if d.saturating_mul(d) > m {
            break;
        }
        if d > bound {
            let b1 = bound.saturating_add(1);
            if b1.checked_mul(b1).is_none_or(|sq| m < sq) {
                break;
            }
            return Err(Error::FactorizationLimit {
                n,
                cofactor: m,
                bound,
            });
        }
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
    }
    if m > 1 {
        out.push((m, 1));
    }
    Ok(out)
}

pub fn omega(n: u64) -> usize {
    factorize(n).len()
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Number of divisors from a factorization.
pub fn divisor_count(factors: &[(u64, u32)]) -> u64 {
    factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

/// The `k`-th prime, 1-based (`nth_prime(1) == 2`).
pub fn nth_prime(k: usize) -> Option<u64> {
    if k == 0 {
        return None;
    }
    table().get(k - 1).copied()
}

/// Product of the first `k` primes, or `None` once it overflows a `u64`.
pub fn primorial(k: usize) -> Option<u64> {
    (1..=k).try_fold(1u64, |acc, i| acc.checked_mul(nth_prime(i)?))
}

/// Primorials that fit strictly below `2^63`: `[2, 6, 30, ..., 2*3*...*47]`.
pub fn primorials() -> Vec<u64> {
    (1..)
        .map_while(primorial)
        .take_while(|&p| p < 1 << 63)
        .collect()
}

/// Index of the prime `p` in the sequence of primes, 1-based.
pub fn prime_index(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p <= TABLE_LIMIT {
        let i = table().binary_search(&p).expect("table prime");
        return Ok(i as u64 + 1);
    }
    if p > PRIME_INDEX_LIMIT {
        return Err(Error::ResourceLimit {
            what: "prime index lookup",
            requested: p,
            limit: PRIME_INDEX_LIMIT,
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<u64, u64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&i) = cache.lock().unwrap().get(&p) {
        return Ok(i);
    }
    let i = prime_count(p);
    cache.lock().unwrap().insert(p, i);
    Ok(i)
}

/// pi(n), the number of primes `<= n` (Lucy-Hedgehog, O(n^{3/4})).
pub fn prime_count(n: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    let r = n.isqrt() as usize;
    // small[v] tracks the count at v, large[i] the count at n / i
    let mut small: Vec<u64> = (0..=r as u64).map(|v| v.saturating_sub(1)).collect();
    let mut large: Vec<u64> = (0..=r as u64)
        .map(|i| if i == 0 { 0 } else { n / i - 1 })
        .collect();
    for p in 2..=r {
        if small[p] == small[p - 1] {
            continue;
        }
        let sp = small[p - 1];
        let p2 = (p as u64) * (p as u64);
        let imax = (r as u64).min(n / p2) as usize;
        for i in 1..=imax {
            let d = i * p;
            let cnt = if d <= r {
                large[d]
            } else {
                small[(n / d as u64) as usize]
            };
            large[i] -= cnt - sp;
        }
        for v in (p2 as usize..=r).rev() {
            small[v] -= small[v / p] - sp;
        }
    }
    large[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn primality_matches_naive() {
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial_is_prime(n), "n = {n}");
        }
        // past the table
        for n in TABLE_LIMIT - 200..TABLE_LIMIT + 2000 {
            assert_eq!(is_prime(n), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn factorization_multiplies_back() {
        for n in 1..20_000u64 {
            let f = factorize(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.iter().all(|&(p, _)| trial_is_prime(p)));
            assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
        }
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(factorize(1).is_empty());
    }

    #[test]
    fn large_semiprime_and_bound() {
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        assert_eq!(factorize(p * q), vec![(p, 1), (q, 1)]);
        assert!(matches!(
            factorize_bounded(p * q, 1000),
            Err(Error::FactorizationLimit { .. })
        ));
        // a single large prime factor is fine under a small bound
        assert_eq!(
            factorize_bounded(8 * p, 1000).unwrap(),
            vec![(2, 3), (p, 1)]
        );
    }

    #[test]
    fn prime_count_matches_table() {
        for &n in &[0u64, 1, 2, 3, 10, 100, 1000, 7919, 104_729, 1_000_000] {
            let expect = table().iter().take_while(|&&p| p <= n).count() as u64;
            assert_eq!(prime_count(n), expect, "n = {n}");
        }
        assert_eq!(prime_count(10_000_000), 664_579);
    }

    #[test]
    fn prime_index_past_table() {
        let p = (TABLE_LIMIT + 1..).find(|&n| is_prime(n)).unwrap();
        let n_table = table().len() as u64;
        assert_eq!(prime_index(p).unwrap(), n_table + 1);
        assert_eq!(prime_index(2).unwrap(), 1);
        assert_eq!(prime_index(3).unwrap(), 2);
        assert!(prime_index(4).is_err());
    }

    #[test]
    fn primorial_sequence_stops_before_overflow() {
        let ps = primorials();
        assert_eq!(ps.len(), 15);
        assert_eq!(ps[..4], [2, 6, 30, 210]);
        assert_eq!(*ps.last().unwrap(), 614_889_782_588_491_410);
        // next one is 2*...*53 = 32589158477190044730 > u64::MAX
        assert_eq!(primorial(16), None);
    }

    #[test]
    fn omega_and_squarefree() {
        assert_eq!(omega(1), 0);
        assert_eq!(omega(360), 3);
        assert_eq!(omega(210), 4);
        assert!(is_squarefree(1));
        assert!(!is_squarefree(12));
        assert!(is_squarefree(30));
    }
}
