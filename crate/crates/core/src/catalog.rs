//! Named constructions with known representation functions.
//!
//! Each construction realises one pair `(liminf g, limsup g)`; together
//! they give every pair in the table produced by [`mh_table`]:
//! `(1, t)` for finite `t`, `(1, ∞)`, and `(s, ∞)` for `2 <= s <= h`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::integer_sets::{MultiplicativeSystem, PrimeClass, SetDescription};
use crate::primes;
use crate::repcount::{self, WindowStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ConstructionName {
    /// `B_i` = integers whose prime factors have index `≡ i (mod h)`.
    FundamentalSystem { h: usize },
    /// `B_1 = N`, `B_2 = {2^k : k < t}`, the rest `{1}`.
    LiminfOneLimsupT { h: usize, t: u64 },
    /// `B_1 = N`, `B_2` = all powers of 2, the rest `{1}`.
    LiminfOneLimsupInf { h: usize },
    /// `B_1 = N`, `B_2..B_s` = primes and 1, the rest `{1}`.
    LiminfSLimsupInf { h: usize, s: usize },
}

impl ConstructionName {
    pub fn order(&self) -> usize {
        match *self {
            ConstructionName::FundamentalSystem { h }
            | ConstructionName::LiminfOneLimsupT { h, .. }
            | ConstructionName::LiminfOneLimsupInf { h }
            | ConstructionName::LiminfSLimsupInf { h, .. } => h,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.order();
        if h < 2 {
            return Err(Error::invalid(format!("h = {h} < 2")));
        }
        match *self {
            ConstructionName::LiminfOneLimsupT { t: 0, .. } => {
                Err(Error::invalid("t must be at least 1"))
            }
            ConstructionName::LiminfOneLimsupT { t, .. } if t > 64 => {
                // 2^(t-1) must be representable
                Err(Error::invalid(format!("t = {t} exceeds 64")))
            }
            ConstructionName::LiminfSLimsupInf { s, .. } if s < 2 || s > h => {
                Err(Error::invalid(format!("s = {s} outside 2..={h}")))
            }
            _ => Ok(()),
        }
    }

    pub fn claimed(&self) -> (u64, Limsup) {
        match *self {
            ConstructionName::FundamentalSystem { .. } => (1, Limsup::Finite(1)),
            ConstructionName::LiminfOneLimsupT { t, .. } => (1, Limsup::Finite(t)),
            ConstructionName::LiminfOneLimsupInf { .. } => (1, Limsup::Infinite),
            ConstructionName::LiminfSLimsupInf { s, .. } => (s as u64, Limsup::Infinite),
        }
    }
}

impl fmt::Display for ConstructionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConstructionName::FundamentalSystem { h } => write!(f, "fundamental:h={h}"),
            ConstructionName::LiminfOneLimsupT { h, t } => write!(f, "one-t:h={h},t={t}"),
            ConstructionName::LiminfOneLimsupInf { h } => write!(f, "one-inf:h={h}"),
            ConstructionName::LiminfSLimsupInf { h, s } => write!(f, "s-inf:h={h},s={s}"),
        }
    }
}

/// Parses the shorthand printed by `Display`, e.g. `s-inf:h=3,s=2`.
impl FromStr for ConstructionName {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (kind, params) = text.split_once(':').unwrap_or((text, ""));
        if !["fundamental", "one-t", "one-inf", "s-inf"].contains(&kind) {
            return Err(Error::invalid(format!("unknown construction {kind:?}")));
        }
        let mut h = None;
        let mut t = None;
        let mut s = None;
        for kv in params.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {kv:?}")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|e| Error::invalid(format!("{key}: {e}")))?;
            let slot = match key.trim() {
                "h" => &mut h,
                "t" => &mut t,
                "s" => &mut s,
                other => return Err(Error::invalid(format!("unknown parameter {other:?}"))),
            };
            *slot = Some(value);
        }
        let need = |v: Option<u64>, key: &str| {
            v.ok_or_else(|| Error::invalid(format!("{kind} needs {key}=")))
        };
        let h = need(h, "h")? as usize;
        let name = match kind {
            "fundamental" => ConstructionName::FundamentalSystem { h },
            "one-t" => ConstructionName::LiminfOneLimsupT {
                h,
                t: need(t, "t")?,
            },
            "one-inf" => ConstructionName::LiminfOneLimsupInf { h },
            "s-inf" => ConstructionName::LiminfSLimsupInf {
                h,
                s: need(s, "s")? as usize,
            },
            other => return Err(Error::invalid(format!("unknown construction {other:?}"))),
        };
        name.validate()?;
        Ok(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Limsup {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Limsup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limsup::Finite(t) => write!(f, "{t}"),
            Limsup::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Limsup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Limsup::Finite(t) => s.serialize_u64(*t),
            Limsup::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedConstruction {
    pub name: ConstructionName,
    pub system: MultiplicativeSystem,
    pub claimed: (u64, Limsup),
}

pub fn build(name: ConstructionName) -> Result<NamedConstruction> {
    name.validate()?;
    let h = name.order();
    let one = || SetDescription::singleton([1]);
    let parts: Vec<SetDescription> = match name {
        ConstructionName::FundamentalSystem { .. } => (0..h as u64)
            .map(|i| SetDescription::smooth_over(PrimeClass::index_residue(h as u64, i)))
            .collect(),
        ConstructionName::LiminfOneLimsupT { t, .. } => {
            let mut v = vec![
                SetDescription::AllNaturals,
                SetDescription::powers_of(2, 0, Some((t - 1) as u32)),
            ];
            v.resize_with(h, one);
            v
        }
        ConstructionName::LiminfOneLimsupInf { .. } => {
            let mut v = vec![
                SetDescription::AllNaturals,
                SetDescription::powers_of(2, 0, None),
            ];
            v.resize_with(h, one);
            v
        }
        ConstructionName::LiminfSLimsupInf { s, .. } => {
            let mut v = vec![SetDescription::AllNaturals];
            v.resize(s, SetDescription::PrimesWithOne);
            v.resize_with(h, one);
            v
        }
    };
    Ok(NamedConstruction {
        name,
        system: MultiplicativeSystem::new(parts)?,
        claimed: name.claimed(),
    })
}

fn binom(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow("binomial"))
}

/// The known value of `g(n)` for a construction, computed from the
/// factorization of `n` alone.
pub fn closed_form(name: &ConstructionName, n: u64) -> Result<u64> {
    name.validate()?;
    if n == 0 {
        return Err(Error::invalid("g is defined on positive integers"));
    }
    let ell = n.trailing_zeros() as u64 + 1;
    Ok(match *name {
        ConstructionName::FundamentalSystem { .. } => 1,
        ConstructionName::LiminfOneLimsupT { t, .. } => ell.min(t),
        ConstructionName::LiminfOneLimsupInf { .. } => ell,
        ConstructionName::LiminfSLimsupInf { s, .. } => {
            // Choose which j of the s-1 prime slots hold a prime, then count
            // words of j primes whose product divides n.
            let slots = s as u64 - 1;
            let factors = primes::factorize_bounded(n, primes::DEFAULT_TRIAL_BOUND)?;
            let mut words = vec![0u64; slots as usize + 1];
            words[0] = 1;
            for &(_, e) in &factors {
                let mut next = vec![0u64; words.len()];
                for (j, &w) in words.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    for c in 0..=(e as usize).min(slots as usize - j) {
                        let add = w
                            .checked_mul(binom((j + c) as u64, c as u64)?)
                            .ok_or(Error::Overflow("closed form"))?;
                        next[j + c] = next[j + c]
                            .checked_add(add)
                            .ok_or(Error::Overflow("closed form"))?;
                    }
                }
                words = next;
            }
            let mut total = 0u64;
            for (j, &w) in words.iter().enumerate() {
                let term = binom(slots, j as u64)?
                    .checked_mul(w)
                    .ok_or(Error::Overflow("closed form"))?;
                total = total
                    .checked_add(term)
                    .ok_or(Error::Overflow("closed form"))?;
            }
            total
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyRow {
    pub n: u64,
    pub closed_form: u64,
    pub brute_force: u64,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// A monotone witness sequence suggesting `limsup g = ∞`. It is evidence
/// only; no finite computation certifies the limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evidence {
    /// `"primorial"` or `"power-of-2"`.
    pub sequence: &'static str,
    /// `(k, n_k, g(n_k))`
    pub points: Vec<(u64, u64, u64)>,
    pub strictly_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub construction: ConstructionName,
    pub claimed: (u64, Limsup),
    pub scan_bound: u64,
    pub rows: Vec<VerifyRow>,
    pub mismatches: usize,
    pub window: WindowStats,
    pub evidence: Option<Evidence>,
}

impl VerifyReport {
    /// Closed form agrees everywhere and any evidence sequence increases.
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.evidence.as_ref().is_none_or(|e| e.strictly_increasing)
    }

    pub fn to_text(&self) -> String {
        let (s, t) = self.claimed;
        let mut out = format!(
            "construction: {}\nclaimed: (liminf, limsup) = ({s}, {t})\nscan: n = 1..={}\n\
             closed form vs brute force: {} of {} agree\n",
            self.construction,
            self.scan_bound,
            self.rows.len() - self.mismatches,
            self.rows.len(),
        );
        for r in self.rows.iter().filter(|r| !r.matches).take(20) {
            out += &format!(
                "  MISMATCH n={} closed_form={} brute_force={}\n",
                r.n, r.closed_form, r.brute_force
            );
        }
        let w = &self.window;
        out += &format!(
            "window evidence [{}, {}]: min {} at n={}, max {} at n={}\n",
            w.lo, w.hi, w.min_count, w.argmin, w.max_count, w.argmax
        );
        if let Some(e) = &self.evidence {
            out += &format!(
                "EVIDENCE ({} sequence, strictly increasing: {}):\n",
                e.sequence, e.strictly_increasing
            );
            for &(k, n, g) in &e.points {
                out += &format!("  k={k} n={n} g={g}\n");
            }
        }
        out += if self.passed() {
            "result: PASS\n"
        } else {
            "result: FAIL\n"
        };
        out
    }
}

fn evidence(c: &NamedConstruction) -> Result<Option<Evidence>> {
    let (sequence, ns): (&'static str, Vec<(u64, u64)>) = match c.name {
        ConstructionName::LiminfOneLimsupInf { .. } => {
            ("power-of-2", (0..63).map(|k| (k, 1u64 << k)).collect())
        }
        ConstructionName::LiminfSLimsupInf { .. } => (
            "primorial",
            primes::primorials()
                .into_iter()
                .enumerate()
                .map(|(i, n)| (i as u64 + 1, n))
                .collect(),
        ),
        _ => return Ok(None),
    };
    let points = ns
        .into_iter()
        .map(|(k, n)| Ok((k, n, repcount::representation_count(&c.system, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let strictly_increasing = points.windows(2).all(|w| w[0].2 < w[1].2);
    Ok(Some(Evidence {
        sequence,
        points,
        strictly_increasing,
    }))
}

/// Compares the closed form with the counter on every `n <= scan_bound`.
/// Mismatches are recorded in the report rather than raised.
pub fn verify(c: &NamedConstruction, scan_bound: u64) -> Result<VerifyReport> {
    if scan_bound < 2 {
        return Err(Error::invalid(format!("scan bound {scan_bound} < 2")));
    }
    let counts = repcount::scan_counts(&c.system, 1, scan_bound)?;
    let rows = counts
        .iter()
        .map(|&(n, brute_force)| {
            let closed = closed_form(&c.name, n)?;
            Ok(VerifyRow {
                n,
                closed_form: closed,
                brute_force,
                matches: closed == brute_force,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatches = rows.iter().filter(|r| !r.matches).count();
    Ok(VerifyReport {
        construction: c.name,
        claimed: c.claimed,
        scan_bound,
        mismatches,
        window: repcount::stats_of(2, scan_bound, &counts[1..]),
        evidence: evidence(c)?,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MhRow {
    pub s: u64,
    pub t: Limsup,
    pub construction: ConstructionName,
}

/// Realisable `(liminf, limsup)` pairs for order `h`, listing finite `t`
/// up to `t_cutoff`.
pub fn mh_table(h: usize, t_cutoff: u64) -> Result<Vec<MhRow>> {
    if h < 2 {
        return Err(Error::invalid(format!("h = {h} < 2")));
    }
    let mut rows = Vec::new();
    for t in 1..=t_cutoff {
        let construction = ConstructionName::LiminfOneLimsupT { h, t };
        construction.validate()?;
        rows.push(MhRow {
            s: 1,
            t: Limsup::Finite(t),
            construction,
        });
    }
    rows.push(MhRow {
        s: 1,
        t: Limsup::Infinite,
        construction: ConstructionName::LiminfOneLimsupInf { h },
    });
    for s in 2..=h {
        rows.push(MhRow {
            s: s as u64,
            t: Limsup::Infinite,
            construction: ConstructionName::LiminfSLimsupInf { h, s },
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn divisors(n: u64) -> Vec<u64> {
        (1..=n).filter(|d| n % d == 0).collect()
    }

    /// Direct enumeration of ordered tuples over divisors of n.
    fn naive(system: &MultiplicativeSystem, n: u64) -> u64 {
        fn go(parts: &[SetDescription], n: u64) -> u64 {
            match parts {
                [] => (n == 1) as u64,
                [first, rest @ ..] => divisors(n)
                    .into_iter()
                    .filter(|&d| first.contains(d).unwrap())
                    .map(|d| go(rest, n / d))
                    .sum(),
            }
        }
        go(system.parts(), n)
    }

    fn all_names() -> Vec<ConstructionName> {
        let mut v = Vec::new();
        for h in 2..=4 {
            v.push(ConstructionName::FundamentalSystem { h });
            v.push(ConstructionName::LiminfOneLimsupInf { h });
            for t in [1, 2, 3, 5] {
                v.push(ConstructionName::LiminfOneLimsupT { h, t });
            }
            for s in 2..=h {
                v.push(ConstructionName::LiminfSLimsupInf { h, s });
            }
        }
        v
    }

    #[test]
    fn claimed_pairs() {
        let c = build(ConstructionName::FundamentalSystem { h: 2 }).unwrap();
        assert_eq!(c.claimed, (1, Limsup::Finite(1)));
        let c = build(ConstructionName::LiminfOneLimsupT { h: 2, t: 3 }).unwrap();
        assert_eq!(c.claimed, (1, Limsup::Finite(3)));
        let c = build(ConstructionName::LiminfSLimsupInf { h: 3, s: 2 }).unwrap();
        assert_eq!(c.claimed, (2, Limsup::Infinite));
        assert_eq!(c.system.parts()[1], SetDescription::PrimesWithOne);
        assert_eq!(c.system.parts()[2], SetDescription::singleton([1]));
    }

    #[test]
    fn parameter_ranges() {
        for bad in [
            ConstructionName::FundamentalSystem { h: 1 },
            ConstructionName::LiminfOneLimsupT { h: 2, t: 0 },
            ConstructionName::LiminfSLimsupInf { h: 3, s: 1 },
            ConstructionName::LiminfSLimsupInf { h: 3, s: 4 },
        ] {
            assert!(build(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn shorthand_round_trip() {
        for name in all_names() {
            assert_eq!(name.to_string().parse::<ConstructionName>().unwrap(), name);
        }
        assert!("one-t:h=2".parse::<ConstructionName>().is_err());
        assert!("nope:h=2".parse::<ConstructionName>().is_err());
        assert!("s-inf:h=2,s=3".parse::<ConstructionName>().is_err());
    }

    #[test]
    fn closed_forms_match_naive_enumeration() {
        for name in all_names() {
            let c = build(name).unwrap();
            for n in 1..=600 {
                assert_eq!(
                    closed_form(&name, n).unwrap(),
                    naive(&c.system, n),
                    "{name} n={n}"
                );
            }
        }
    }

    #[test]
    fn verify_examples() {
        let c = build(ConstructionName::LiminfOneLimsupT { h: 2, t: 2 }).unwrap();
        let r = verify(&c, 10_000).unwrap();
        assert_eq!(r.mismatches, 0);
        assert_eq!((r.window.min_count, r.window.max_count), (1, 2));
        assert!(r.evidence.is_none() && r.passed());

        let c = build(ConstructionName::FundamentalSystem { h: 3 }).unwrap();
        let r = verify(&c, 10_000).unwrap();
        assert!(r.rows.iter().all(|row| row.brute_force == 1));
        assert!(r.passed());

        let c = build(ConstructionName::LiminfSLimsupInf { h: 2, s: 2 }).unwrap();
        let r = verify(&c, 2_000).unwrap();
        assert!(r.passed());
        let e = r.evidence.unwrap();
        assert_eq!(e.points.len(), 15);
        for &(k, _, g) in &e.points {
            assert!(g >= k);
        }
        for k in 1..=100 {
            let p = primes::nth_prime(k).unwrap();
            assert_eq!(repcount::representation_count(&c.system, p).unwrap(), 2);
        }
    }

    #[test]
    fn one_inf_evidence_uses_powers_of_two() {
        let c = build(ConstructionName::LiminfOneLimsupInf { h: 3 }).unwrap();
        let r = verify(&c, 1_000).unwrap();
        let e = r.evidence.unwrap();
        assert_eq!(e.sequence, "power-of-2");
        assert!(e.strictly_increasing);
        assert_eq!(e.points.last().unwrap(), &(62, 1 << 62, 63));
    }

    #[test]
    fn verify_rejects_tiny_bound() {
        let c = build(ConstructionName::FundamentalSystem { h: 2 }).unwrap();
        assert!(verify(&c, 1).is_err());
    }

    #[test]
    fn window_min_at_most_h() {
        for name in all_names() {
            let c = build(name).unwrap();
            if c.system.all_parts_contain_one().unwrap() {
                let w = repcount::window_stats(&c.system, 2, 3_000).unwrap();
                assert!(w.min_count <= name.order() as u64, "{name}");
            }
        }
    }

    #[test]
    fn table_rows() {
        let rows = mh_table(2, 3).unwrap();
        assert_eq!(rows.len(), 5);
        let pairs: Vec<(u64, Limsup)> =
            mh_table(3, 1).unwrap().iter().map(|r| (r.s, r.t)).collect();
        assert_eq!(
            pairs,
            vec![
                (1, Limsup::Finite(1)),
                (1, Limsup::Infinite),
                (2, Limsup::Infinite),
                (3, Limsup::Infinite)
            ]
        );
        assert!(mh_table(1, 3).is_err());
        for row in mh_table(4, 4).unwrap() {
            assert_eq!(build(row.construction).unwrap().claimed, (row.s, row.t));
        }
    }
}
