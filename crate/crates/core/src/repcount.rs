//! Ordered representation counts.
//!
//! `g(n)` for a system `(B_1, ..., B_h)` is computed over the divisor
//! lattice of `n`: factor `n` once, index each divisor by its exponent
//! vector, decide membership of every divisor in every part, then run a
//! suffix DP
//!
//! ```text
//! f[h-1][m] = [m ∈ B_h]
//! f[s][m]   = Σ_{d | m, d ∈ B_{s+1}} f[s+1][m / d]
//! ```
//!
//! so `g(n) = f[0][n]`. Witness tuples are then listed in lexicographic
//! order by walking the lattice with the DP as a pruning oracle.
//!
//! Window statistics stand in for liminf/limsup: they are exact over a
//! finite range and say nothing about the tail.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer_sets::{MultiplicativeSystem, SetDescription};
use crate::primes;

pub const DEFAULT_TUPLE_CAP: usize = 64;

/// Largest admissible argument: `n < 2^63`.
pub const MAX_N: u64 = (1 << 63) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Maximum number of tuples listed in a [`RepWitness`]; the count stays exact.
    pub tuple_cap: usize,
    /// Trial-division bound used to factor `n`.
    pub trial_bound: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            tuple_cap: DEFAULT_TUPLE_CAP,
            trial_bound: primes::DEFAULT_TRIAL_BOUND,
        }
    }
}

/// An integer with its representation count and (a prefix of) the
/// representing tuples in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepWitness {
    pub n: u64,
    pub count: u64,
    pub tuples: Vec<Vec<u64>>,
    pub truncated: bool,
}

/// Exact extremes of `g` over `[lo, hi]`; ties go to the smallest `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowStats {
    pub lo: u64,
    pub hi: u64,
    pub min_count: u64,
    pub argmin: u64,
    pub max_count: u64,
    pub argmax: u64,
}

/// Divisor lattice of `n` in mixed-radix exponent coordinates.
struct Lattice {
    primes: Vec<u64>,
    exps: Vec<u32>,
    strides: Vec<usize>,
    /// divisor value by code
    values: Vec<u64>,
}

impl Lattice {
    fn new(factors: &[(u64, u32)]) -> Self {
        let primes: Vec<u64> = factors.iter().map(|&(p, _)| p).collect();
        let exps: Vec<u32> = factors.iter().map(|&(_, e)| e).collect();
        let mut strides = Vec::with_capacity(exps.len());
        let mut size = 1usize;
        for &e in &exps {
            strides.push(size);
            size *= e as usize + 1;
        }
        let mut values = vec![1u64; size];
        for (i, (&p, &e)) in primes.iter().zip(&exps).enumerate() {
            let radix = e as usize + 1;
            for code in 0..size {
                let a = (code / strides[i]) % radix;
                values[code] *= p.pow(a as u32);
            }
        }
        Lattice {
            primes,
            exps,
            strides,
            values,
        }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    fn top(&self) -> usize {
        self.len() - 1
    }

    fn digit(&self, code: usize, i: usize) -> u32 {
        ((code / self.strides[i]) % (self.exps[i] as usize + 1)) as u32
    }

    fn factors_of(&self, code: usize) -> Vec<(u64, u32)> {
        (0..self.primes.len())
            .filter_map(|i| {
                let a = self.digit(code, i);
                (a > 0).then_some((self.primes[i], a))
            })
            .collect()
    }

    /// Calls `f(d)` for every divisor code `d` of the divisor `m`.
    fn for_each_subdivisor(&self, m: usize, mut f: impl FnMut(usize)) {
        let k = self.primes.len();
        let limits: Vec<u32> = (0..k).map(|i| self.digit(m, i)).collect();
        let mut digits = vec![0u32; k];
        let mut code = 0usize;
        loop {
            f(code);
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                if digits[i] < limits[i] {
                    digits[i] += 1;
                    code += self.strides[i];
                    break;
                }
                code -= digits[i] as usize * self.strides[i];
                digits[i] = 0;
                i += 1;
            }
        }
    }
}

struct Table {
    lattice: Lattice,
    /// member[slot][code]
    member: Vec<Vec<bool>>,
    /// suffix[slot][code] for slot >= 1
    suffix: Vec<Vec<u64>>,
    count: u64,
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::invalid(format!("n = {n} outside [1, 2^63)")));
    }
    Ok(())
}

fn build_table(parts: &[SetDescription], n: u64, trial_bound: u64) -> Result<Table> {
    check_n(n)?;
    let factors = primes::factorize_bounded(n, trial_bound)?;
    let lattice = Lattice::new(&factors);
    let h = parts.len();
    let size = lattice.len();

    let mut member: Vec<Vec<bool>> = Vec::with_capacity(h);
    for (slot, part) in parts.iter().enumerate() {
        // identical parts share their membership row
        if let Some(prev) = parts[..slot].iter().position(|p| p == part) {
            let row = member[prev].clone();
            member.push(row);
            continue;
        }
        let mut row = Vec::with_capacity(size);
        for code in 0..size {
            row.push(part.contains_factored(lattice.values[code], &lattice.factors_of(code))?);
        }
        member.push(row);
    }

    let mut suffix: Vec<Vec<u64>> = vec![Vec::new(); h];
    suffix[h - 1] = member[h - 1].iter().map(|&b| b as u64).collect();
    let mut overflow = false;
    for slot in (1..h - 1).rev() {
        let next = &suffix[slot + 1];
        let mut row = vec![0u64; size];
        for (m, cell) in row.iter_mut().enumerate() {
            let mut acc = 0u64;
            lattice.for_each_subdivisor(m, |d| {
                if member[slot][d] {
                    match acc.checked_add(next[m - d]) {
                        Some(v) => acc = v,
                        None => overflow = true,
                    }
                }
            });
            *cell = acc;
        }
        suffix[slot] = row;
    }
    let top = lattice.top();
    let mut count = 0u64;
    lattice.for_each_subdivisor(top, |d| {
        if member[0][d] {
            match count.checked_add(suffix[1][top - d]) {
                Some(v) => count = v,
                None => overflow = true,
            }
        }
    });
    if overflow {
        return Err(Error::Overflow("representation count"));
    }
    Ok(Table {
        lattice,
        member,
        suffix,
        count,
    })
}

impl Table {
    fn list(&self, cap: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        if cap == 0 || self.count == 0 {
            return out;
        }
        let mut sorted: Vec<(u64, usize)> = self
            .lattice
            .values
            .iter()
            .enumerate()
            .map(|(c, &v)| (v, c))
            .collect();
        sorted.sort_unstable();
        let mut prefix = Vec::with_capacity(self.member.len());
        self.walk(0, self.lattice.top(), &sorted, &mut prefix, &mut out, cap);
        out
    }

    fn walk(
        &self,
        slot: usize,
        m: usize,
        sorted: &[(u64, usize)],
        prefix: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        cap: usize,
    ) {
        let h = self.member.len();
        let mv = self.lattice.values[m];
        if slot == h - 1 {
            if self.member[slot][m] {
                prefix.push(mv);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for &(dv, dc) in sorted {
            if dv > mv || out.len() >= cap {
                break;
            }
            if mv % dv != 0 || !self.member[slot][dc] || self.suffix[slot + 1][m - dc] == 0 {
                continue;
            }
            prefix.push(dv);
            self.walk(slot + 1, m - dc, sorted, prefix, out, cap);
            prefix.pop();
        }
    }
}

/// `g(n)` with witness tuples, under default options.
pub fn count_system_reps(system: &MultiplicativeSystem, n: u64) -> Result<RepWitness> {
    count_system_reps_with(system, n, &CountOptions::default())
}

pub fn count_system_reps_with(
    system: &MultiplicativeSystem,
    n: u64,
    opts: &CountOptions,
) -> Result<RepWitness> {
    let table = build_table(system.parts(), n, opts.trial_bound)?;
    let tuples = table.list(opts.tuple_cap);
    Ok(RepWitness {
        n,
        count: table.count,
        truncated: (tuples.len() as u64) < table.count,
        tuples,
    })
}

/// `g_{B,h}(n)`: representations as an ordered product of `h` elements of `B`.
pub fn count_basis_reps(set: &SetDescription, h: usize, n: u64) -> Result<RepWitness> {
    let system = MultiplicativeSystem::basis(set.clone(), h)?;
    count_system_reps(&system, n)
}

/// `g(n)` without listing tuples.
pub fn representation_count(system: &MultiplicativeSystem, n: u64) -> Result<u64> {
    Ok(build_table(system.parts(), n, primes::DEFAULT_TRIAL_BOUND)?.count)
}

/// `r_{A,h}(n)`: ordered `h`-tuples of elements of `A` summing to `n`.
///
/// `A` is read as a set of nonnegative integers, so 0 counts only when the
/// description lists it explicitly.
pub fn count_additive_reps(set: &SetDescription, h: usize, n: u64) -> Result<u64> {
    if h < 2 {
        return Err(Error::invalid(format!("h = {h} < 2")));
    }
    let mut elems = Vec::new();
    if set.contains(0)? {
        elems.push(0u64);
    }
    if n >= 1 {
        elems.extend(set.enumerate_up_to(n)?);
    }
    let width = usize::try_from(n)
        .ok()
        .and_then(|n| n.checked_add(1))
        .ok_or(Error::Overflow("additive table width"))?;
    // ways[s] = number of ordered j-tuples summing to s
    let mut ways = vec![0u64; width];
    for &a in &elems {
        ways[a as usize] = 1;
    }
    for _ in 1..h {
        let mut next = vec![0u64; width];
        for (s, slot) in next.iter_mut().enumerate() {
            let mut acc = 0u64;
            for &a in elems.iter().take_while(|&&a| a as usize <= s) {
                acc = acc
                    .checked_add(ways[s - a as usize])
                    .ok_or(Error::Overflow("additive representation count"))?;
            }
            *slot = acc;
        }
        ways = next;
    }
    Ok(ways[n as usize])
}

const SCAN_CHUNK: u64 = 1 << 14;

/// `(n, g(n))` for every `n` in `[lo, hi]`, in order.
///
/// Chunks are counted in parallel; the result does not depend on the split.
pub fn scan_counts(system: &MultiplicativeSystem, lo: u64, hi: u64) -> Result<Vec<(u64, u64)>> {
    if lo == 0 || lo > hi {
        return Err(Error::invalid(format!(
            "scan range [{lo}, {hi}] is empty or contains 0"
        )));
    }
    let mut out = Vec::with_capacity((hi - lo + 1).min(1 << 24) as usize);
    let mut start = lo;
    loop {
        let end = hi.min(start.saturating_add(SCAN_CHUNK - 1));
        let chunk: Vec<Result<u64>> = (start..=end)
            .into_par_iter()
            .map(|n| representation_count(system, n))
            .collect();
        for (n, r) in (start..=end).zip(chunk) {
            out.push((n, r?));
        }
        if end == hi {
            break;
        }
        start = end + 1;
    }
    Ok(out)
}

/// Exact min and max of `g` over `[lo, hi]` (window evidence, not a limit).
pub fn window_stats(system: &MultiplicativeSystem, lo: u64, hi: u64) -> Result<WindowStats> {
    if lo < 2 || lo > hi {
        return Err(Error::invalid(format!(
            "window [{lo}, {hi}] needs 2 <= lo <= hi"
        )));
    }
    let counts = scan_counts(system, lo, hi)?;
    Ok(stats_of(lo, hi, &counts))
}

pub(crate) fn stats_of(lo: u64, hi: u64, counts: &[(u64, u64)]) -> WindowStats {
    let (mut argmin, mut min_count) = counts[0];
    let (mut argmax, mut max_count) = counts[0];
    for &(n, c) in &counts[1..] {
        if c < min_count {
            min_count = c;
            argmin = n;
        }
        if c > max_count {
            max_count = c;
            argmax = n;
        }
    }
    WindowStats {
        lo,
        hi,
        min_count,
        argmin,
        max_count,
        argmax,
    }
}
