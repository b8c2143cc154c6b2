//! Ordered disjoint covers of a finite set by blocks from per-slot families.
//!
//! For families `(A_1, ..., A_h)` and a finite set `S`, the cover count is
//! the number of ordered tuples `(X_1, ..., X_h)` with `X_i ∈ A_i`, pairwise
//! disjoint, and union `S`. With every family equal this is the single-family
//! count; with families of fixed block sizes it is a multinomial coefficient.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer_sets::{MultiplicativeSystem, SetDescription};
use crate::primes;
use crate::repcount;
use crate::squarefree_map;

/// A decidable family of finite subsets of a universe of `u64` labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum FamilyDescription {
    Explicit {
        subsets: Vec<Vec<u64>>,
    },
    /// Every subset whose size is listed.
    ByCardinality {
        sizes: Vec<usize>,
    },
    /// `{ phi(b) : b ∈ Q ∩ set }` restricted to subsets of `universe`
    /// (a list of primes).
    ImageOfSet {
        set: SetDescription,
        universe: Vec<u64>,
    },
}

impl FamilyDescription {
    pub fn explicit(subsets: Vec<Vec<u64>>) -> Self {
        let subsets = subsets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        FamilyDescription::Explicit { subsets }
    }

    pub fn by_cardinality(sizes: impl IntoIterator<Item = usize>) -> Self {
        FamilyDescription::ByCardinality {
            sizes: sizes.into_iter().collect(),
        }
    }

    pub fn image_of_set(set: SetDescription, universe: Vec<u64>) -> Result<Self> {
        set.validate()?;
        if let Some(&p) = universe.iter().find(|&&p| !primes::is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        Ok(FamilyDescription::ImageOfSet { set, universe })
    }

    /// Membership of a subset given as a sorted, duplicate-free slice.
    pub fn contains(&self, subset: &[u64]) -> Result<bool> {
        match self {
            FamilyDescription::Explicit { subsets } => {
                Ok(subsets.iter().any(|s| s.as_slice() == subset))
            }
            FamilyDescription::ByCardinality { sizes } => Ok(sizes.contains(&subset.len())),
            FamilyDescription::ImageOfSet { set, universe } => {
                if !subset.iter().all(|p| universe.contains(p)) {
                    return Ok(false);
                }
                let Some(product) = subset.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p))
                else {
                    return Ok(false);
                };
                let factors: Vec<(u64, u32)> = subset.iter().map(|&p| (p, 1)).collect();
                set.contains_factored(product, &factors)
            }
        }
    }
}

impl fmt::Display for FamilyDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyDescription::Explicit { subsets } => {
                write!(f, "explicit({} sets)", subsets.len())
            }
            FamilyDescription::ByCardinality { sizes } => write!(f, "card{sizes:?}"),
            FamilyDescription::ImageOfSet { set, .. } => write!(f, "phi(Q & {set})"),
        }
    }
}

/// Largest `|S|` accepted by default for `h` families: the biggest `n`
/// with `h^n <= 1.6e6`, so the slot-assignment check stays cheap
/// (20 for `h = 2`, 13 for `h = 3`).
pub fn default_cover_cap(h: usize) -> usize {
    let h = h.max(2) as u64;
    let mut n = 0;
    let mut pow = 1u64;
    while pow * h <= 1_600_000 {
        pow *= h;
        n += 1;
    }
    n
}

/// Precomputed membership of every subset of `S` for every slot family.
struct Covers {
    h: usize,
    full: u64,
    member: Vec<Vec<bool>>,
    /// memo[slot][mask], u64::MAX = unknown; slots 1..h-1
    memo: Vec<Vec<u64>>,
}

impl Covers {
    fn new(elements: &[u64], families: &[FamilyDescription], max_size: usize) -> Result<Self> {
        let h = families.len();
        if h < 2 {
            return Err(Error::invalid(format!("need h >= 2 families, got {h}")));
        }
        let n = elements.len();
        if n > max_size.min(63) {
            return Err(Error::ResourceLimit {
                what: "cover ground set size",
                requested: n as u64,
                limit: max_size.min(63) as u64,
            });
        }
        let size = 1usize << n;
        let mut member: Vec<Vec<bool>> = Vec::with_capacity(h);
        let mut scratch = Vec::with_capacity(n);
        for (i, fam) in families.iter().enumerate() {
            if let Some(prev) = families[..i].iter().position(|f| f == fam) {
                let row = member[prev].clone();
                member.push(row);
                continue;
            }
            let mut row = Vec::with_capacity(size);
            for mask in 0..size {
                scratch.clear();
                scratch.extend((0..n).filter(|b| mask >> b & 1 == 1).map(|b| elements[b]));
                row.push(fam.contains(&scratch)?);
            }
            member.push(row);
        }
        let memo = (0..h)
            .map(|slot| {
                if slot == 0 || slot == h - 1 {
                    Vec::new()
                } else {
                    vec![u64::MAX; size]
                }
            })
            .collect();
        Ok(Covers {
            h,
            full: (size - 1) as u64,
            member,
            memo,
        })
    }

    /// Covers of `mask` using slots `slot..h`.
    fn count_from(&mut self, slot: usize, mask: u64) -> Result<u64> {
        if slot == self.h - 1 {
            return Ok(self.member[slot][mask as usize] as u64);
        }
        if slot > 0 && self.memo[slot][mask as usize] != u64::MAX {
            return Ok(self.memo[slot][mask as usize]);
        }
        let mut acc = 0u64;
        let mut sub = mask;
        loop {
            if self.member[slot][sub as usize] {
                let rest = self.count_from(slot + 1, mask ^ sub)?;
                acc = acc
                    .checked_add(rest)
                    .ok_or(Error::Overflow("cover count"))?;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        if slot > 0 {
            self.memo[slot][mask as usize] = acc;
        }
        Ok(acc)
    }

    fn list_from(
        &mut self,
        slot: usize,
        mask: u64,
        prefix: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        cap: usize,
    ) -> Result<()> {
        if slot == self.h - 1 {
            if self.member[slot][mask as usize] {
                prefix.push(mask);
                out.push(prefix.clone());
                prefix.pop();
            }
            return Ok(());
        }
        let mut sub = mask;
        loop {
            if out.len() >= cap {
                return Ok(());
            }
            if self.member[slot][sub as usize] && self.count_from(slot + 1, mask ^ sub)? > 0 {
                prefix.push(sub);
                self.list_from(slot + 1, mask ^ sub, prefix, out, cap)?;
                prefix.pop();
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        Ok(())
    }
}

fn normalize(s: &[u64]) -> Result<Vec<u64>> {
    let mut v = s.to_vec();
    v.sort_unstable();
    let before = v.len();
    v.dedup();
    if v.len() != before {
        return Err(Error::invalid("ground set has repeated elements"));
    }
    Ok(v)
}

/// Number of ordered covers of `s` by one block from each family.
pub fn count_ordered_covers(s: &[u64], families: &[FamilyDescription]) -> Result<u64> {
    count_ordered_covers_capped(s, families, default_cover_cap(families.len()))
}

pub fn count_ordered_covers_capped(
    s: &[u64],
    families: &[FamilyDescription],
    max_size: usize,
) -> Result<u64> {
    let s = normalize(s)?;
    let mut covers = Covers::new(&s, families, max_size)?;
    let full = covers.full;
    covers.count_from(0, full)
}

/// The first `cap` ordered covers. Blocks are sorted; the first block
/// ranges over subsets of `s` in decreasing bitmask order (bit `i` is the
/// `i`-th smallest element), and so on recursively.
pub fn list_ordered_covers(
    s: &[u64],
    families: &[FamilyDescription],
    cap: usize,
) -> Result<Vec<Vec<Vec<u64>>>> {
    let s = normalize(s)?;
    let mut covers = Covers::new(&s, families, default_cover_cap(families.len()))?;
    let mut masks = Vec::new();
    let full = covers.full;
    covers.list_from(0, full, &mut Vec::new(), &mut masks, cap)?;
    Ok(masks
        .into_iter()
        .map(|tuple| {
            tuple
                .into_iter()
                .map(|m| {
                    (0..s.len())
                        .filter(|b| m >> b & 1 == 1)
                        .map(|b| s[b])
                        .collect()
                })
                .collect()
        })
        .collect())
}

fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow("binomial coefficient"));
        }
    }
    Ok(acc as u64)
}

/// `n! / (k_1! ⋯ k_h!)`, exact, with `Σ k_i = n`.
pub fn multinomial(n: u64, ks: &[u64]) -> Result<u64> {
    let sum = ks
        .iter()
        .try_fold(0u64, |a, &k| a.checked_add(k))
        .ok_or(Error::Overflow("multinomial part sum"))?;
    if sum != n {
        return Err(Error::invalid(format!("parts sum to {sum}, expected {n}")));
    }
    let mut acc = 1u64;
    let mut seen = 0u64;
    for &k in ks {
        seen += k;
        acc = acc
            .checked_mul(binomial(seen, k)?)
            .ok_or(Error::Overflow("multinomial coefficient"))?;
    }
    Ok(acc)
}

/// The per-slot families `A_i = phi(Q ∩ B_i)` over a prime universe.
pub fn image_families(
    system: &MultiplicativeSystem,
    universe: &[u64],
) -> Result<Vec<FamilyDescription>> {
    system
        .parts()
        .iter()
        .map(|b| FamilyDescription::image_of_set(b.clone(), universe.to_vec()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub q: u64,
    pub system_count: u64,
    pub cover_count: u64,
    pub equal: bool,
}

/// Counts `g(q)` directly and as covers of `phi(q)` by the image families.
pub fn verify_correspondence(
    system: &MultiplicativeSystem,
    q: u64,
    universe: &[u64],
) -> Result<Correspondence> {
    let s = squarefree_map::phi(q)?;
    if let Some(&p) = s.primes().iter().find(|p| !universe.contains(p)) {
        return Err(Error::invalid(format!(
            "prime {p} of {q} is outside the universe"
        )));
    }
    let families = image_families(system, universe)?;
    let cover_count = count_ordered_covers(s.primes(), &families)?;
    let system_count = repcount::representation_count(system, q)?;
    Ok(Correspondence {
        q,
        system_count,
        cover_count,
        equal: system_count == cover_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integer_sets::PrimeClass;
    use proptest::prelude::*;

    /// Slot-assignment oracle: assign each element to one of h slots.
    fn oracle(s: &[u64], families: &[FamilyDescription]) -> u64 {
        let h = families.len();
        let n = s.len() as u32;
        let mut total = 0;
        for word in 0..(h as u64).pow(n) {
            let mut blocks = vec![Vec::new(); h];
            let mut w = word;
            for &x in s {
                blocks[(w % h as u64) as usize].push(x);
                w /= h as u64;
            }
            if blocks
                .iter()
                .zip(families)
                .all(|(b, f)| f.contains(b).unwrap())
            {
                total += 1;
            }
        }
        total
    }

    #[test]
    fn cover_examples() {
        let all = FamilyDescription::by_cardinality(0..=3);
        assert_eq!(
            count_ordered_covers(&[1, 2, 3], &[all.clone(), all]).unwrap(),
            8
        );

        let fams = [
            FamilyDescription::by_cardinality([2]),
            FamilyDescription::by_cardinality([1]),
            FamilyDescription::by_cardinality([1]),
        ];
        assert_eq!(count_ordered_covers(&[1, 2, 3, 4], &fams).unwrap(), 12);

        let with_empty = FamilyDescription::by_cardinality([0, 2]);
        assert_eq!(
            count_ordered_covers(&[], &[with_empty.clone(), with_empty]).unwrap(),
            1
        );
        let no_empty = FamilyDescription::by_cardinality([1]);
        assert_eq!(
            count_ordered_covers(&[], &[no_empty.clone(), no_empty]).unwrap(),
            0
        );
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(4, &[2, 1, 1]).unwrap(), 12);
        assert_eq!(multinomial(7, &[7, 0, 0]).unwrap(), 1);
        assert_eq!(multinomial(0, &[0, 0]).unwrap(), 1);
        // enumeration oracle: 3-subsets of a 6-set
        let three_subsets = (0u32..64).filter(|m| m.count_ones() == 3).count() as u64;
        assert_eq!(multinomial(6, &[3, 3]).unwrap(), three_subsets);
        assert_eq!(three_subsets, 20);
        assert!(multinomial(5, &[2, 2]).is_err());
        assert_eq!(multinomial(66, &[33, 33]).unwrap(), 7219428434016265740);
        assert_eq!(
            multinomial(68, &[34, 34]),
            Err(Error::Overflow("binomial coefficient"))
        );
    }

    #[test]
    fn caps() {
        assert_eq!(default_cover_cap(2), 20);
        assert_eq!(default_cover_cap(3), 13);
        let s: Vec<u64> = (0..14).collect();
        let f = FamilyDescription::by_cardinality(0..=14);
        assert!(matches!(
            count_ordered_covers(&s, &[f.clone(), f.clone(), f]),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn full_size_counts() {
        // h = 2 at the cap: every subset/complement pair
        let s: Vec<u64> = (0..20).collect();
        let f = FamilyDescription::by_cardinality(0..=20);
        assert_eq!(count_ordered_covers(&s, &[f.clone(), f]).unwrap(), 1 << 20);
        let s: Vec<u64> = (0..13).collect();
        let f = FamilyDescription::by_cardinality(0..=13);
        assert_eq!(
            count_ordered_covers(&s, &[f.clone(), f.clone(), f]).unwrap(),
            3u64.pow(13)
        );
    }

    #[test]
    fn listing_matches_count() {
        let fams = [
            FamilyDescription::by_cardinality([1, 2]),
            FamilyDescription::explicit(vec![vec![3], vec![], vec![1, 4]]),
            FamilyDescription::by_cardinality([0, 1, 2, 3]),
        ];
        let s = [1, 2, 3, 4];
        let listed = list_ordered_covers(&s, &fams, 1000).unwrap();
        assert_eq!(
            listed.len() as u64,
            count_ordered_covers(&s, &fams).unwrap()
        );
        for t in &listed {
            let mut all: Vec<u64> = t.concat();
            all.sort_unstable();
            assert_eq!(all, s);
            for (b, f) in t.iter().zip(&fams) {
                assert!(f.contains(b).unwrap());
            }
        }
        assert_eq!(
            list_ordered_covers(&s, &fams, 2).unwrap(),
            listed[..2].to_vec()
        );
    }

    #[test]
    fn multinomial_realization() {
        for n in 0..=10u64 {
            let s: Vec<u64> = (100..100 + n).collect();
            for k1 in 0..=n {
                for k2 in 0..=n - k1 {
                    let ks = [k1, k2, n - k1 - k2];
                    let fams: Vec<_> = ks
                        .iter()
                        .map(|&k| FamilyDescription::by_cardinality([k as usize]))
                        .collect();
                    assert_eq!(
                        count_ordered_covers(&s, &fams).unwrap(),
                        multinomial(n, &ks).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn amplification_bounds() {
        for n in 2..=12u64 {
            for k1 in 0..=n {
                let two = [k1, n - k1];
                if two.iter().all(|&k| k < n) {
                    assert!(multinomial(n, &two).unwrap() >= n);
                }
                for k2 in 0..=n - k1 {
                    let three = [k1, k2, n - k1 - k2];
                    if three.iter().all(|&k| k < n) {
                        assert!(multinomial(n, &three).unwrap() >= n);
                    }
                }
            }
            assert!(multinomial(2 * n, &[n, n]).unwrap() >= n);
        }
    }

    #[test]
    fn correspondence_examples() {
        let fundamental = MultiplicativeSystem::new(vec![
            SetDescription::smooth_over(PrimeClass::index_residue(2, 0)),
            SetDescription::smooth_over(PrimeClass::index_residue(2, 1)),
        ])
        .unwrap();
        let c = verify_correspondence(&fundamental, 30, &[2, 3, 5, 7]).unwrap();
        assert_eq!((c.system_count, c.cover_count, c.equal), (1, 1, true));

        let np = MultiplicativeSystem::new(vec![
            SetDescription::AllNaturals,
            SetDescription::PrimesWithOne,
        ])
        .unwrap();
        for p in [2u64, 3, 5, 7, 11, 97] {
            let c = verify_correspondence(&np, p, &[p]).unwrap();
            assert_eq!((c.system_count, c.cover_count, c.equal), (2, 2, true));
        }

        let nn = MultiplicativeSystem::basis(SetDescription::AllNaturals, 2).unwrap();
        let c = verify_correspondence(&nn, 6, &[2, 3]).unwrap();
        assert_eq!((c.system_count, c.cover_count), (4, 4));
        let fams = image_families(&nn, &[2, 3]).unwrap();
        assert_eq!(oracle(&[2, 3], &fams), 4);

        assert!(verify_correspondence(&nn, 12, &[2, 3]).is_err());
        assert!(verify_correspondence(&nn, 30, &[2, 3]).is_err());
    }

    fn arb_family(universe: Vec<u64>) -> impl Strategy<Value = FamilyDescription> {
        let u2 = universe.clone();
        prop_oneof![
            prop::collection::vec(0usize..=6, 1..4).prop_map(FamilyDescription::by_cardinality),
            prop::collection::vec(prop::sample::subsequence(universe, 0..=4), 0..12)
                .prop_map(FamilyDescription::explicit),
            prop::sample::select(vec![
                SetDescription::AllNaturals,
                SetDescription::PrimesWithOne,
                SetDescription::singleton([1, 6, 35, 2]),
            ])
            .prop_map(move |b| FamilyDescription::image_of_set(b, u2.clone()).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]
        #[test]
        fn matches_slot_assignment_oracle(
            len in 0usize..=6,
            fams in prop::collection::vec(arb_family(vec![2, 3, 5, 7, 11, 13]), 2..=3),
        ) {
            let s: Vec<u64> = [2u64, 3, 5, 7, 11, 13][..len].to_vec();
            prop_assert_eq!(count_ordered_covers(&s, &fams).unwrap(), oracle(&s, &fams));
        }
    }
}
