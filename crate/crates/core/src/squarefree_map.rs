//! Squarefree integers as finite prime sets.
//!
//! `phi(q)` is the set of primes dividing a squarefree `q`; its inverse is
//! the product map. Under `phi`, ordered factorizations of `q` into `h`
//! factors are exactly the ordered `h`-tuples of pairwise disjoint prime
//! sets covering `phi(q)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes;

/// Sorted set of distinct primes whose product fits in a `u64`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn new(mut primes_in: Vec<u64>) -> Result<Self> {
        primes_in.sort_unstable();
        if primes_in.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("prime set has a repeated element"));
        }
        if let Some(&p) = primes_in.iter().find(|&&p| !primes::is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        primes_in
            .iter()
            .try_fold(1u64, |acc, &p| acc.checked_mul(p))
            .ok_or(Error::Overflow("prime set product"))?;
        Ok(PrimeSet(primes_in))
    }

    pub fn empty() -> Self {
        PrimeSet(Vec::new())
    }

    pub fn primes(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_disjoint(&self, other: &PrimeSet) -> bool {
        self.0.iter().all(|p| other.0.binary_search(p).is_err())
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(s: PrimeSet) -> Self {
        s.0
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

pub fn phi(q: u64) -> Result<PrimeSet> {
    if q == 0 {
        return Err(Error::invalid("phi is defined on positive integers"));
    }
    let f = primes::factorize(q);
    if f.iter().any(|&(_, e)| e > 1) {
        return Err(Error::NotSquarefree(q));
    }
    Ok(PrimeSet(f.into_iter().map(|(p, _)| p).collect()))
}

pub fn phi_inverse(s: &PrimeSet) -> u64 {
    // the product is checked when the set is built
    s.0.iter().product()
}

pub fn omega(n: u64) -> usize {
    primes::omega(n)
}

/// Default cap on the number of emitted partitions.
pub const DEFAULT_PARTITION_CAP: u64 = 1 << 20;

pub fn factorizations_as_partitions(q: u64, h: usize) -> Result<Vec<Vec<PrimeSet>>> {
    factorizations_as_partitions_capped(q, h, DEFAULT_PARTITION_CAP)
}

/// Every ordered `h`-tuple of disjoint prime sets with union `phi(q)`.
///
/// Tuples are ordered lexicographically by the slot-assignment word: the
/// slot of the smallest prime is the most significant letter.
pub fn factorizations_as_partitions_capped(
    q: u64,
    h: usize,
    cap: u64,
) -> Result<Vec<Vec<PrimeSet>>> {
    if h < 2 {
        return Err(Error::invalid(format!("h = {h} < 2")));
    }
    let s = phi(q)?;
    let k = s.len() as u32;
    let total = (h as u64)
        .checked_pow(k)
        .filter(|&t| t <= cap)
        .ok_or(Error::ResourceLimit {
            what: "ordered prime-set partitions",
            requested: (h as u64).saturating_pow(k),
            limit: cap,
        })?;
    let mut out = Vec::with_capacity(total as usize);
    let mut word = vec![0usize; k as usize];
    for _ in 0..total {
        let mut blocks = vec![Vec::new(); h];
        for (i, &slot) in word.iter().enumerate() {
            blocks[slot].push(s.0[i]);
        }
        out.push(blocks.into_iter().map(PrimeSet).collect());
        // increment, last letter fastest
        for letter in word.iter_mut().rev() {
            *letter += 1;
            if *letter < h {
                break;
            }
            *letter = 0;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> PrimeSet {
        PrimeSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(30).unwrap(), set(&[2, 3, 5]));
        assert_eq!(phi(1).unwrap(), PrimeSet::empty());
        assert_eq!(phi(12), Err(Error::NotSquarefree(12)));
        assert!(phi(0).is_err());
    }

    #[test]
    fn phi_inverse_examples() {
        assert_eq!(phi_inverse(&set(&[2, 3, 5])), 30);
        assert_eq!(phi_inverse(&PrimeSet::empty()), 1);
        assert_eq!(phi_inverse(&set(&[2, 3, 7, 11, 13])), 2 * 3 * 7 * 11 * 13);
        assert_eq!(2 * 3 * 7 * 11 * 13, 6006);
    }

    #[test]
    fn prime_set_validation() {
        assert_eq!(PrimeSet::new(vec![4]), Err(Error::NotPrime(4)));
        assert!(PrimeSet::new(vec![3, 3]).is_err());
        assert_eq!(set(&[5, 2, 3]).primes(), &[2, 3, 5]);
        // 2*3*...*53 does not fit
        let first16: Vec<u64> = (1..=16).map(|i| primes::nth_prime(i).unwrap()).collect();
        assert_eq!(
            PrimeSet::new(first16),
            Err(Error::Overflow("prime set product"))
        );
    }

    #[test]
    fn partitions_of_six() {
        let parts = factorizations_as_partitions(6, 2).unwrap();
        let e = PrimeSet::empty;
        assert_eq!(
            parts,
            vec![
                vec![set(&[2, 3]), e()],
                vec![set(&[2]), set(&[3])],
                vec![set(&[3]), set(&[2])],
                vec![e(), set(&[2, 3])],
            ]
        );
    }

    #[test]
    fn partition_counts() {
        let one = factorizations_as_partitions(1, 4).unwrap();
        assert_eq!(one, vec![vec![PrimeSet::empty(); 4]]);
        // slot-assignment oracle: 3 primes, 3 slots
        let oracle = (0..3)
            .flat_map(|a| (0..3).flat_map(move |b| (0..3).map(move |c| [a, b, c])))
            .count();
        assert_eq!(factorizations_as_partitions(30, 3).unwrap().len(), oracle);
        assert_eq!(oracle, 27);
        assert!(factorizations_as_partitions(12, 2).is_err());
        assert!(matches!(
            factorizations_as_partitions_capped(30030, 3, 100),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(1), 0);
        assert_eq!(omega(360), 3);
        assert_eq!(omega(210), 4);
    }

    #[test]
    fn round_trip_all_squarefree() {
        for q in 1..=100_000u64 {
            if let Ok(s) = phi(q) {
                assert_eq!(phi_inverse(&s), q);
            }
        }
    }

    #[test]
    fn partition_count_and_coprimality() {
        for q in 1..=10_000u64 {
            if !primes::is_squarefree(q) {
                continue;
            }
            let k = omega(q) as u32;
            for h in 2..=3usize {
                let parts = factorizations_as_partitions(q, h).unwrap();
                assert_eq!(parts.len() as u64, (h as u64).pow(k));
                for tuple in &parts {
                    let b: Vec<u64> = tuple.iter().map(phi_inverse).collect();
                    assert_eq!(b.iter().product::<u64>(), q);
                    for i in 0..h {
                        for j in i + 1..h {
                            assert_eq!(gcd(b[i], b[j]), 1);
                        }
                    }
                }
                let mut sorted = parts.clone();
                sorted.dedup();
                assert_eq!(sorted.len(), parts.len());
            }
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    proptest! {
        #[test]
        fn phi_of_product_round_trips(idx in prop::collection::btree_set(1usize..200, 0..6)) {
            let ps: Vec<u64> = idx.iter().map(|&i| primes::nth_prime(i).unwrap()).collect();
            let s = PrimeSet::new(ps).unwrap();
            prop_assert_eq!(phi(phi_inverse(&s)).unwrap(), s);
        }
    }
}
