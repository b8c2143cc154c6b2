//! Symbolic integer sets with decidable membership.
//!
//! A [`SetDescription`] is a closed vocabulary of predicates over the
//! positive integers. Every kind can answer membership for any `u64` and can
//! enumerate its members up to a bound. Descriptions serialize with a `kind`
//! tag so they can be written in config files:
//!
//! ```toml
//! kind = "Union"
//! members = [{ kind = "Primes" }, { kind = "Singleton", values = [1] }]
//! ```

use std::cell::OnceCell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{self, Factors};

/// A set of primes, used to build smooth-number sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum PrimeClass {
    /// Primes `p_j` (with `p_1 = 2`) whose index satisfies `j ≡ residue (mod modulus)`.
    IndexResidue {
        modulus: u64,
        residue: u64,
    },
    ExplicitList {
        primes: Vec<u64>,
    },
    /// Primes of `universe` that are not in `class`.
    Complement {
        class: Box<PrimeClass>,
        universe: Vec<u64>,
    },
}

impl PrimeClass {
    pub fn index_residue(modulus: u64, residue: u64) -> Self {
        PrimeClass::IndexResidue { modulus, residue }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PrimeClass::IndexResidue { modulus, residue } => {
                if *modulus < 2 {
                    return Err(Error::invalid(format!(
                        "IndexResidue modulus {modulus} < 2"
                    )));
                }
                if residue >= modulus {
                    return Err(Error::invalid(format!(
                        "IndexResidue residue {residue} not below modulus {modulus}"
                    )));
                }
            }
            PrimeClass::ExplicitList { primes } => check_primes(primes)?,
            PrimeClass::Complement { class, universe } => {
                class.validate()?;
                check_primes(universe)?;
            }
        }
        Ok(())
    }

    /// Membership of a prime `p` (the caller guarantees primality).
    pub fn contains_prime(&self, p: u64) -> Result<bool> {
        Ok(match self {
            PrimeClass::IndexResidue { modulus, residue } => {
                primes::prime_index(p)? % modulus == *residue
            }
            PrimeClass::ExplicitList { primes } => primes.contains(&p),
            PrimeClass::Complement { class, universe } => {
                universe.contains(&p) && !class.contains_prime(p)?
            }
        })
    }
}

fn check_primes(ps: &[u64]) -> Result<()> {
    match ps.iter().find(|&&p| !primes::is_prime(p)) {
        Some(&p) => Err(Error::NotPrime(p)),
        None => Ok(()),
    }
}

/// Symbolic description of a set of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SetDescription {
    AllNaturals,
    /// An explicit finite list. May contain 0, which only matters for
    /// additive counting.
    Singleton {
        values: Vec<u64>,
    },
    /// `{ base^e : lo <= e <= hi }`; `hi = None` means unbounded.
    PowersOf {
        base: u64,
        lo: u32,
        #[serde(default)]
        hi: Option<u32>,
    },
    Primes,
    PrimesWithOne,
    Squarefree,
    /// Positive integers all of whose prime factors lie in `class`; contains 1.
    SmoothOver {
        class: PrimeClass,
    },
    Union {
        members: Vec<SetDescription>,
    },
    /// Intersection of the members; the empty intersection is all of N.
    Intersection {
        members: Vec<SetDescription>,
    },
}

/// Lazily factored integer shared by the membership predicates.
struct Subject<'a> {
    n: u64,
    known: Option<&'a [(u64, u32)]>,
    cache: OnceCell<Factors>,
}

impl<'a> Subject<'a> {
    fn factors(&self) -> &[(u64, u32)] {
        match self.known {
            Some(f) => f,
            None => self.cache.get_or_init(|| primes::factorize(self.n)),
        }
    }
}

impl SetDescription {
    pub fn singleton(values: impl IntoIterator<Item = u64>) -> Self {
        SetDescription::Singleton {
            values: values.into_iter().collect(),
        }
    }

    pub fn powers_of(base: u64, lo: u32, hi: Option<u32>) -> Self {
        SetDescription::PowersOf { base, lo, hi }
    }

    pub fn smooth_over(class: PrimeClass) -> Self {
        SetDescription::SmoothOver { class }
    }

    pub fn union(members: Vec<SetDescription>) -> Self {
        SetDescription::Union { members }
    }

    pub fn intersection(members: Vec<SetDescription>) -> Self {
        SetDescription::Intersection { members }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SetDescription::PowersOf { base, lo, hi } => {
                if *base < 2 {
                    return Err(Error::invalid(format!("PowersOf base {base} < 2")));
                }
                if let Some(hi) = hi {
                    if hi < lo {
                        return Err(Error::invalid(format!(
                            "PowersOf range [{lo}, {hi}] is empty"
                        )));
                    }
                }
                Ok(())
            }
            SetDescription::SmoothOver { class } => class.validate(),
            SetDescription::Union { members } | SetDescription::Intersection { members } => {
                members.iter().try_for_each(|m| m.validate())
            }
            _ => Ok(()),
        }
    }

    /// Membership of `n`. Only `Singleton` can contain 0.
    pub fn contains(&self, n: u64) -> Result<bool> {
        self.eval(&Subject {
            n,
            known: None,
            cache: OnceCell::new(),
        })
    }

    /// Membership of `n` when its factorization is already known.
    pub fn contains_factored(&self, n: u64, factors: &[(u64, u32)]) -> Result<bool> {
        self.eval(&Subject {
            n,
            known: Some(factors),
            cache: OnceCell::new(),
        })
    }

    fn eval(&self, s: &Subject<'_>) -> Result<bool> {
        let n = s.n;
        Ok(match self {
            SetDescription::AllNaturals => n >= 1,
            SetDescription::Singleton { values } => values.contains(&n),
            SetDescription::PowersOf { base, lo, hi } => match power_exponent(n, *base) {
                Some(e) => e >= *lo && hi.is_none_or(|hi| e <= hi),
                None => false,
            },
            SetDescription::Primes => match s.known {
                Some(f) => f.len() == 1 && f[0].1 == 1,
                None => primes::is_prime(n),
            },
            SetDescription::PrimesWithOne => {
                n == 1
                    || match s.known {
                        Some(f) => f.len() == 1 && f[0].1 == 1,
                        None => primes::is_prime(n),
                    }
            }
            SetDescription::Squarefree => n >= 1 && s.factors().iter().all(|&(_, e)| e == 1),
            SetDescription::SmoothOver { class } => {
                if n == 0 {
                    return Ok(false);
                }
                for &(p, _) in s.factors() {
                    if !class.contains_prime(p)? {
                        return Ok(false);
                    }
                }
                true
            }
            SetDescription::Union { members } => {
                for m in members {
                    if m.eval(s)? {
                        return Ok(true);
                    }
                }
                false
            }
            SetDescription::Intersection { members } => {
                if n == 0 && members.is_empty() {
                    return Ok(false);
                }
                for m in members {
                    if !m.eval(s)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    /// Members in `[1, limit]`, ascending, under the default limits.
    pub fn enumerate_up_to(&self, limit: u64) -> Result<Vec<u64>> {
        self.enumerate_up_to_with(limit, &EnumerateLimits::default())
    }

    pub fn enumerate_up_to_with(&self, limit: u64, limits: &EnumerateLimits) -> Result<Vec<u64>> {
        let out = self.enumerate_raw(limit, limits)?;
        if out.len() > limits.max_elements {
            return Err(Error::ResourceLimit {
                what: "enumerated elements",
                requested: out.len() as u64,
                limit: limits.max_elements as u64,
            });
        }
        Ok(out)
    }

    fn enumerate_raw(&self, limit: u64, limits: &EnumerateLimits) -> Result<Vec<u64>> {
        let scan = |what| {
            if limit > limits.max_scan {
                Err(Error::ResourceLimit {
                    what,
                    requested: limit,
                    limit: limits.max_scan,
                })
            } else {
                Ok(())
            }
        };
        Ok(match self {
            SetDescription::AllNaturals => {
                if limit > limits.max_elements as u64 {
                    return Err(Error::ResourceLimit {
                        what: "enumerated elements",
                        requested: limit,
                        limit: limits.max_elements as u64,
                    });
                }
                (1..=limit).collect()
            }
            SetDescription::Singleton { values } => {
                let mut v: Vec<u64> = values
                    .iter()
                    .copied()
                    .filter(|&x| x >= 1 && x <= limit)
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            SetDescription::PowersOf { base, lo, hi } => {
                let mut v = Vec::new();
                let mut e = 0u32;
                let mut x = 1u64;
                while x <= limit && hi.is_none_or(|hi| e <= hi) {
                    if e >= *lo {
                        v.push(x);
                    }
                    match x.checked_mul(*base) {
                        Some(y) => x = y,
                        None => break,
                    }
                    e += 1;
                }
                v
            }
            SetDescription::Primes => {
                scan("prime sieve bound")?;
                primes::sieve(limit)
            }
            SetDescription::PrimesWithOne => {
                scan("prime sieve bound")?;
                let mut v = if limit >= 1 { vec![1] } else { vec![] };
                v.extend(primes::sieve(limit));
                v
            }
            SetDescription::Squarefree => {
                scan("squarefree sieve bound")?;
                squarefree_sieve(limit)
            }
            SetDescription::SmoothOver { .. } => {
                scan("membership scan bound")?;
                let mut v = Vec::new();
                for n in 1..=limit {
                    if self.contains(n)? {
                        v.push(n);
                    }
                }
                v
            }
            SetDescription::Union { members } => {
                let mut v = Vec::new();
                for m in members {
                    v.extend(m.enumerate_raw(limit, limits)?);
                    if v.len() > limits.max_elements.saturating_mul(members.len()) {
                        break;
                    }
                }
                v.sort_unstable();
                v.dedup();
                v
            }
            SetDescription::Intersection { members } => match members.split_first() {
                None => SetDescription::AllNaturals.enumerate_raw(limit, limits)?,
                Some((first, rest)) => {
                    let mut v = Vec::new();
                    for x in first.enumerate_raw(limit, limits)? {
                        let mut keep = true;
                        for m in rest {
                            if !m.contains(x)? {
                                keep = false;
                                break;
                            }
                        }
                        if keep {
                            v.push(x);
                        }
                    }
                    v
                }
            },
        })
    }
}

impl fmt::Display for SetDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDescription::AllNaturals => write!(f, "N"),
            SetDescription::Singleton { values } => {
                let items: Vec<String> = values.iter().map(u64::to_string).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            SetDescription::PowersOf { base, lo, hi } => match hi {
                Some(hi) => write!(f, "{{{base}^k: {lo}<=k<={hi}}}"),
                None => write!(f, "{{{base}^k: k>={lo}}}"),
            },
            SetDescription::Primes => write!(f, "P"),
            SetDescription::PrimesWithOne => write!(f, "P+{{1}}"),
            SetDescription::Squarefree => write!(f, "Q"),
            SetDescription::SmoothOver { class } => match class {
                PrimeClass::IndexResidue { modulus, residue } => {
                    write!(f, "Smooth(j={residue} mod {modulus})")
                }
                PrimeClass::ExplicitList { primes } => write!(f, "Smooth({primes:?})"),
                PrimeClass::Complement { .. } => write!(f, "Smooth(complement)"),
            },
            SetDescription::Union { members } => {
                let items: Vec<String> = members.iter().map(|m| m.to_string()).collect();
                write!(f, "({})", items.join(" | "))
            }
            SetDescription::Intersection { members } => {
                let items: Vec<String> = members.iter().map(|m| m.to_string()).collect();
                write!(f, "({})", items.join(" & "))
            }
        }
    }
}

/// Caps on [`SetDescription::enumerate_up_to_with`].
#[derive(Debug, Clone, Copy)]
pub struct EnumerateLimits {
    /// Maximum number of returned elements.
    pub max_elements: usize,
    /// Largest bound accepted for kinds enumerated by scanning or sieving.
    pub max_scan: u64,
}

impl Default for EnumerateLimits {
    fn default() -> Self {
        EnumerateLimits {
            max_elements: 10_000_000,
            max_scan: 100_000_000,
        }
    }
}

/// `Some(e)` when `n == base^e`.
fn power_exponent(mut n: u64, base: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut e = 0;
    while n % base == 0 {
        n /= base;
        e += 1;
    }
    (n == 1).then_some(e)
}

fn squarefree_sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut bad = vec![false; limit + 1];
    for p in primes::sieve((limit as u64).isqrt()) {
        let sq = (p * p) as usize;
        for j in (sq..=limit).step_by(sq) {
            bad[j] = true;
        }
    }
    (1..=limit).filter(|&n| !bad[n]).map(|n| n as u64).collect()
}

/// Ordered `h`-tuple of integer sets, `h >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct MultiplicativeSystem {
    parts: Vec<SetDescription>,
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    parts: Vec<SetDescription>,
}

impl TryFrom<SystemRepr> for MultiplicativeSystem {
    type Error = Error;
    fn try_from(r: SystemRepr) -> Result<Self> {
        MultiplicativeSystem::new(r.parts)
    }
}

impl From<MultiplicativeSystem> for SystemRepr {
    fn from(s: MultiplicativeSystem) -> Self {
        SystemRepr { parts: s.parts }
    }
}

impl MultiplicativeSystem {
    pub fn new(parts: Vec<SetDescription>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::invalid(format!(
                "a multiplicative system needs h >= 2 parts, got {}",
                parts.len()
            )));
        }
        for p in &parts {
            p.validate()?;
        }
        Ok(MultiplicativeSystem { parts })
    }

    /// `(B, B, ..., B)` with `h` copies.
    pub fn basis(set: SetDescription, h: usize) -> Result<Self> {
        Self::new(vec![set; h])
    }

    pub fn parts(&self) -> &[SetDescription] {
        &self.parts
    }

    pub fn order(&self) -> usize {
        self.parts.len()
    }

    /// Whether every part contains 1.
    pub fn all_parts_contain_one(&self) -> Result<bool> {
        for p in &self.parts {
            if !p.contains(1)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for MultiplicativeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", items.join(", "))
    }
}
