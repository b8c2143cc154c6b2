//! Exact Ramsey extraction on finite ground sets.
//!
//! A [`Coloring`] assigns a color to every `k`-subset of a finite ground
//! set. [`find_homogeneous`] looks for an `m`-subset all of whose
//! `k`-subsets share one color; [`iterated_chain`] repeats this level by
//! level, each search confined to the previous level's subset, giving a
//! decreasing chain `X_0 ⊇ X_1 ⊇ … ⊇ X_K` with `[X_k]^k` monochromatic.
//! [`product_coloring`] merges several colorings of the same `k`-subsets
//! into one whose classes are the intersections of classes, and
//! [`doubly_iterated_chain`] runs the chain over those products.
//!
//! On a finite ground set none of this is guaranteed to succeed, so
//! "no such subset" is an ordinary answer, distinct from running out of
//! search budget.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set_partitions::FamilyDescription;

/// Default node budget for the depth-first searches.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest number of `k`-subsets a coloring may have.
pub const MAX_SUBSETS: u64 = 1 << 24;

fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}

/// Colex rank of a sorted list of ground positions.
fn rank(positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .map(|(j, &c)| binom(c, j + 1) as usize)
        .sum()
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
    }
}

/// A total coloring of the `k`-subsets of a finite ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    ground: Vec<u64>,
    k: usize,
    palette: u32,
    /// color by colex rank of the subset's ground positions
    colors: Vec<u32>,
}

impl Coloring {
    /// Builds a coloring by evaluating `f` on every `k`-subset (given as
    /// sorted ground values). Colors must be below `palette`.
    pub fn from_fn(
        ground: Vec<u64>,
        k: usize,
        palette: u32,
        mut f: impl FnMut(&[u64]) -> u32,
    ) -> Result<Self> {
        let ground = sorted_ground(ground)?;
        if palette == 0 {
            return Err(Error::invalid("a coloring needs at least one color"));
        }
        let total = binom(ground.len(), k);
        if total > MAX_SUBSETS {
            return Err(Error::ResourceLimit {
                what: "k-subsets in a coloring",
                requested: total,
                limit: MAX_SUBSETS,
            });
        }
        let mut colors = vec![0u32; total as usize];
        let mut bad = None;
        let mut values = Vec::with_capacity(k);
        for_each_combination(ground.len(), k, |pos| {
            values.clear();
            values.extend(pos.iter().map(|&p| ground[p]));
            let c = f(&values);
            if c >= palette {
                bad = Some(c);
            }
            colors[rank(pos)] = c;
        });
        if let Some(c) = bad {
            return Err(Error::invalid(format!(
                "color {c} outside palette of {palette}"
            )));
        }
        Ok(Coloring {
            ground,
            k,
            palette,
            colors,
        })
    }

    pub fn constant(ground: Vec<u64>, k: usize, color: u32) -> Result<Self> {
        Self::from_fn(ground, k, color + 1, |_| color)
    }

    /// Uniformly random colors from `0..palette`.
    pub fn random<R: Rng + ?Sized>(
        ground: Vec<u64>,
        k: usize,
        palette: u32,
        rng: &mut R,
    ) -> Result<Self> {
        if palette == 0 {
            return Err(Error::invalid("a coloring needs at least one color"));
        }
        Self::from_fn(ground, k, palette, |_| rng.gen_range(0..palette))
    }

    /// Color 1 on `k`-subsets in `family`, 0 elsewhere.
    pub fn indicator(ground: Vec<u64>, k: usize, family: &FamilyDescription) -> Result<Self> {
        let mut err = None;
        let c = Self::from_fn(ground, k, 2, |s| match family.contains(s) {
            Ok(b) => b as u32,
            Err(e) => {
                err = Some(e);
                0
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(c),
        }
    }

    pub fn ground(&self) -> &[u64] {
        &self.ground
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of available colors (`r + 1`).
    pub fn palette(&self) -> u32 {
        self.palette
    }

    /// Color of a `k`-subset given by ground values (any order).
    pub fn color_of(&self, subset: &[u64]) -> Option<u32> {
        if subset.len() != self.k {
            return None;
        }
        let mut pos: Vec<usize> = subset
            .iter()
            .map(|v| self.ground.binary_search(v).ok())
            .collect::<Option<_>>()?;
        pos.sort_unstable();
        if pos.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(self.colors[rank(&pos)])
    }

    fn color_at(&self, positions: &[usize]) -> u32 {
        self.colors[rank(positions)]
    }

    /// Text form: `ground:`, `k:`, `colors:` headers then one
    /// `elements : color` line per subset in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let ground: Vec<String> = self.ground.iter().map(u64::to_string).collect();
        writeln!(out, "ground: {}", ground.join(" ")).unwrap();
        writeln!(out, "k: {}", self.k).unwrap();
        writeln!(out, "colors: {}", self.palette).unwrap();
        for_each_combination(self.ground.len(), self.k, |pos| {
            let elems: Vec<String> = pos.iter().map(|&p| self.ground[p].to_string()).collect();
            writeln!(out, "{} : {}", elems.join(" "), self.color_at(pos)).unwrap();
        });
        out
    }

    /// Parses the text form. `colors:` is optional (default: largest color
    /// + 1); `#` starts a comment. Every `k`-subset must appear exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut ground: Option<Vec<u64>> = None;
        let mut k: Option<usize> = None;
        let mut palette: Option<u32> = None;
        let mut entries: Vec<(usize, Vec<u64>, u32)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| perr(line_no, format!("expected ':' in {line:?}")))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            let nums = |s: &str| -> Result<Vec<u64>> {
                s.split_whitespace()
                    .map(|t| {
                        t.parse::<u64>()
                            .map_err(|e| perr(line_no, format!("{t:?}: {e}")))
                    })
                    .collect()
            };
            match lhs {
                "ground" => ground = Some(nums(rhs)?),
                "k" => k = Some(rhs.parse().map_err(|e| perr(line_no, format!("k: {e}")))?),
                "colors" => {
                    palette = Some(
                        rhs.parse()
                            .map_err(|e| perr(line_no, format!("colors: {e}")))?,
                    )
                }
                _ => {
                    let color = rhs
                        .parse::<u32>()
                        .map_err(|e| perr(line_no, format!("color {rhs:?}: {e}")))?;
                    entries.push((line_no, nums(lhs)?, color));
                }
            }
        }
        let ground = ground.ok_or_else(|| perr(0, "missing 'ground:' line".into()))?;
        let k = k.ok_or_else(|| perr(0, "missing 'k:' line".into()))?;
        let ground = sorted_ground(ground)?;
        let total = binom(ground.len(), k);
        if total > MAX_SUBSETS {
            return Err(Error::ResourceLimit {
                what: "k-subsets in a coloring",
                requested: total,
                limit: MAX_SUBSETS,
            });
        }
        let mut colors: Vec<Option<u32>> = vec![None; total as usize];
        for (line_no, elems, color) in &entries {
            if elems.len() != k {
                return Err(perr(
                    *line_no,
                    format!("expected {k} elements, got {}", elems.len()),
                ));
            }
            let mut pos = Vec::with_capacity(k);
            for e in elems {
                let p = ground
                    .binary_search(e)
                    .map_err(|_| perr(*line_no, format!("{e} is not in the ground set")))?;
                pos.push(p);
            }
            pos.sort_unstable();
            if pos.windows(2).any(|w| w[0] == w[1]) {
                return Err(perr(*line_no, "repeated element in subset".into()));
            }
            let slot = &mut colors[rank(&pos)];
            if slot.is_some() {
                return Err(perr(*line_no, "subset listed twice".into()));
            }
            *slot = Some(*color);
        }
        let missing = colors.iter().filter(|c| c.is_none()).count();
        if missing > 0 {
            return Err(perr(
                0,
                format!("coloring is not total: {missing} of {total} subsets missing"),
            ));
        }
        let colors: Vec<u32> = colors.into_iter().map(Option::unwrap).collect();
        let max = colors.iter().copied().max().map_or(0, |m| m + 1);
        let palette = palette.unwrap_or(max.max(1));
        if max > palette {
            return Err(perr(
                0,
                format!("color {} outside declared palette of {palette}", max - 1),
            ));
        }
        Ok(Coloring {
            ground,
            k,
            palette,
            colors,
        })
    }
}

fn sorted_ground(mut ground: Vec<u64>) -> Result<Vec<u64>> {
    ground.sort_unstable();
    if ground.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("ground set has repeated elements"));
    }
    Ok(ground)
}

/// A monochromatic subset together with its color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homogeneous {
    pub subset: Vec<u64>,
    pub color: u32,
}

struct Search<'a> {
    c: &'a Coloring,
    domain: &'a [usize],
    m: usize,
    color: u32,
    nodes: u64,
    budget: u64,
    chosen: Vec<usize>,
    scratch: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, from: usize) -> Result<bool> {
        if self.chosen.len() == self.m {
            return Ok(true);
        }
        let need = self.m - self.chosen.len();
        for i in from..self.domain.len() {
            if self.domain.len() - i < need {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExhausted { nodes: self.budget });
            }
            let x = self.domain[i];
            if self.extends(x) {
                self.chosen.push(x);
                if self.run(i + 1)? {
                    return Ok(true);
                }
                self.chosen.pop();
            }
        }
        Ok(false)
    }

    /// Every k-subset of `chosen + x` that contains `x` has the target color.
    fn extends(&mut self, x: usize) -> bool {
        let k = self.c.k;
        if k == 0 || self.chosen.len() + 1 < k {
            return true;
        }
        let chosen = &self.chosen;
        let scratch = &mut self.scratch;
        let c = self.c;
        let color = self.color;
        let mut ok = true;
        // chosen is increasing and x exceeds all of it
        for_each_combination(chosen.len(), k - 1, |pick| {
            if !ok {
                return;
            }
            scratch.clear();
            scratch.extend(pick.iter().map(|&j| chosen[j]));
            scratch.push(x);
            if c.color_at(scratch) != color {
                ok = false;
            }
        });
        ok
    }
}

/// Least-color-first, then lexicographically least, homogeneous `m`-subset.
pub fn find_homogeneous(c: &Coloring, m: usize) -> Result<Option<Homogeneous>> {
    find_homogeneous_within(c, c.ground(), m, DEFAULT_BUDGET)
}

/// Searches for a homogeneous `m`-subset of `within` (a subset of the
/// ground set). Colors are tried in increasing order; for each, the
/// depth-first search extends candidates in ground order and prunes as soon
/// as a new `k`-subset has another color, so the first hit is the
/// lexicographically least subset of that color.
pub fn find_homogeneous_within(
    c: &Coloring,
    within: &[u64],
    m: usize,
    budget: u64,
) -> Result<Option<Homogeneous>> {
    let mut domain: Vec<usize> = within
        .iter()
        .map(|v| {
            c.ground
                .binary_search(v)
                .map_err(|_| Error::invalid(format!("{v} is not in the ground set")))
        })
        .collect::<Result<_>>()?;
    domain.sort_unstable();
    domain.dedup();
    if m > c.ground.len() {
        return Err(Error::invalid(format!(
            "target size {m} exceeds the ground set size {}",
            c.ground.len()
        )));
    }
    if c.k > m {
        return Err(Error::invalid(format!(
            "k = {} exceeds target size {m}",
            c.k
        )));
    }
    if m > domain.len() {
        return Ok(None);
    }
    let mut nodes = 0;
    for color in 0..c.palette {
        if c.k == 0 && c.colors[0] != color {
            continue;
        }
        let mut search = Search {
            c,
            domain: &domain,
            m,
            color,
            nodes,
            budget,
            chosen: Vec::with_capacity(m),
            scratch: Vec::with_capacity(c.k),
        };
        if search.run(0)? {
            return Ok(Some(Homogeneous {
                subset: search.chosen.iter().map(|&p| c.ground[p]).collect(),
                color,
            }));
        }
        nodes = search.nodes;
    }
    Ok(None)
}

/// Independent check: enumerates every `k`-subset of `subset` and returns
/// the common color, if there is one. `None` also when `subset` has fewer
/// than `k` elements or leaves the ground set.
pub fn homogeneous_color(c: &Coloring, subset: &[u64]) -> Option<u32> {
    let mut colors = Vec::new();
    let mut ok = true;
    for_each_combination(subset.len(), c.k, |pick| {
        let vals: Vec<u64> = pick.iter().map(|&i| subset[i]).collect();
        match c.color_of(&vals) {
            Some(col) => colors.push(col),
            None => ok = false,
        }
    });
    if !ok || colors.is_empty() {
        return None;
    }
    colors.iter().all(|&x| x == colors[0]).then_some(colors[0])
}

/// Decreasing chain `X_0 ⊇ X_1 ⊇ …` with a color per level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousChain<E> {
    pub subsets: Vec<Vec<u64>>,
    pub epsilons: Vec<E>,
}

fn check_levels(colorings: &[Coloring], sizes: &[usize]) -> Result<()> {
    if colorings.is_empty() {
        return Err(Error::invalid("need at least the level-0 coloring"));
    }
    if colorings.len() != sizes.len() {
        return Err(Error::invalid(format!(
            "{} colorings but {} target sizes",
            colorings.len(),
            sizes.len()
        )));
    }
    for (k, c) in colorings.iter().enumerate() {
        if c.k != k {
            return Err(Error::invalid(format!(
                "coloring at level {k} colors {}-subsets",
                c.k
            )));
        }
        if c.ground != colorings[0].ground {
            return Err(Error::invalid(format!(
                "coloring at level {k} has a different ground set"
            )));
        }
        if sizes[k] < k {
            return Err(Error::invalid(format!(
                "size {} at level {k} is below k",
                sizes[k]
            )));
        }
    }
    if sizes.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::invalid("target sizes must be weakly decreasing"));
    }
    Ok(())
}

/// Iterated extraction: `X_0` is the ground set, and `X_k` is a
/// homogeneous `sizes[k]`-subset of `X_{k-1}` under `colorings[k]`.
/// `None` when some level has no such subset.
pub fn iterated_chain(
    colorings: &[Coloring],
    sizes: &[usize],
) -> Result<Option<HomogeneousChain<u32>>> {
    iterated_chain_with_budget(colorings, sizes, DEFAULT_BUDGET)
}

pub fn iterated_chain_with_budget(
    colorings: &[Coloring],
    sizes: &[usize],
    budget: u64,
) -> Result<Option<HomogeneousChain<u32>>> {
    check_levels(colorings, sizes)?;
    let ground = colorings[0].ground.clone();
    if ground.len() < sizes[0] {
        return Ok(None);
    }
    let mut subsets = vec![ground];
    // [X]^0 = {∅}
    let mut epsilons = vec![colorings[0].colors[0]];
    for k in 1..colorings.len() {
        let prev = subsets.last().unwrap();
        match find_homogeneous_within(&colorings[k], prev, sizes[k], budget)? {
            Some(found) => {
                subsets.push(found.subset);
                epsilons.push(found.color);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(HomogeneousChain { subsets, epsilons }))
}

/// Checks containment and, for every `k <= n`, that all `k`-subsets of
/// `X_n` have color `ε_k`.
pub fn verify_chain(colorings: &[Coloring], chain: &HomogeneousChain<u32>) -> bool {
    let levels = chain.subsets.len();
    if levels != colorings.len() || chain.epsilons.len() != levels {
        return false;
    }
    for n in 1..levels {
        if !chain.subsets[n]
            .iter()
            .all(|x| chain.subsets[n - 1].contains(x))
        {
            return false;
        }
    }
    for n in 0..levels {
        for k in 0..=n {
            let xn = &chain.subsets[n];
            if xn.len() < k {
                continue;
            }
            if homogeneous_color(&colorings[k], xn) != Some(chain.epsilons[k]) {
                return false;
            }
        }
    }
    true
}

/// Product of colorings sharing a ground set and `k`. Product colors are
/// row-major indices into `J_1 × … × J_r` with the first factor slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductColoring {
    pub coloring: Coloring,
    pub radices: Vec<u32>,
}

impl ProductColoring {
    pub fn encode(&self, digits: &[u32]) -> u32 {
        digits
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&d, &r)| acc * r + d)
    }

    pub fn decode(&self, mut index: u32) -> Vec<u32> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = index % r;
            index /= r;
        }
        out
    }
}

pub fn product_coloring(colorings: &[Coloring]) -> Result<ProductColoring> {
    let first = colorings
        .first()
        .ok_or_else(|| Error::invalid("product of an empty family of colorings"))?;
    for c in colorings {
        if c.ground != first.ground || c.k != first.k {
            return Err(Error::invalid(
                "product factors must share ground set and k",
            ));
        }
    }
    let radices: Vec<u32> = colorings.iter().map(|c| c.palette).collect();
    let palette = radices
        .iter()
        .try_fold(1u32, |acc, &r| acc.checked_mul(r))
        .ok_or(Error::Overflow("product palette"))?;
    let colors = (0..first.colors.len())
        .map(|i| {
            colorings
                .iter()
                .fold(0u32, |acc, c| acc * c.palette + c.colors[i])
        })
        .collect();
    Ok(ProductColoring {
        coloring: Coloring {
            ground: first.ground.clone(),
            k: first.k,
            palette,
            colors,
        },
        radices,
    })
}

/// Iterated extraction over product colorings: `per_level[k]` holds the
/// factor colorings of `k`-subsets. Level colors decode back to one color
/// per factor.
pub fn doubly_iterated_chain(
    per_level: &[Vec<Coloring>],
    sizes: &[usize],
) -> Result<Option<HomogeneousChain<Vec<u32>>>> {
    let mut products = Vec::with_capacity(per_level.len());
    for (k, factors) in per_level.iter().enumerate() {
        if factors.is_empty() {
            return Err(Error::invalid(format!("empty index set at level {k}")));
        }
        products.push(product_coloring(factors)?);
    }
    let merged: Vec<Coloring> = products.iter().map(|p| p.coloring.clone()).collect();
    Ok(
        iterated_chain(&merged, sizes)?.map(|chain| HomogeneousChain {
            epsilons: chain
                .epsilons
                .iter()
                .zip(&products)
                .map(|(&e, p)| p.decode(e))
                .collect(),
            subsets: chain.subsets,
        }),
    )
}

/// Checks a doubly iterated chain against every factor coloring.
pub fn verify_doubly_chain(
    per_level: &[Vec<Coloring>],
    chain: &HomogeneousChain<Vec<u32>>,
) -> bool {
    let levels = chain.subsets.len();
    if levels != per_level.len() || chain.epsilons.len() != levels {
        return false;
    }
    per_level.iter().enumerate().all(|(k, factors)| {
        factors.len() == chain.epsilons[k].len()
            && factors.iter().enumerate().all(|(i, c)| {
                (k..levels).all(|n| {
                    let xn = &chain.subsets[n];
                    xn.len() < k || homogeneous_color(c, xn) == Some(chain.epsilons[k][i])
                })
            })
    }) && (1..levels).all(|n| {
        chain.subsets[n]
            .iter()
            .all(|x| chain.subsets[n - 1].contains(x))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parity(n: u64) -> Coloring {
        Coloring::from_fn((1..=n).collect(), 1, 2, |s| (s[0] % 2) as u32).unwrap()
    }

    fn pentagon() -> Coloring {
        // C_5 edges color 0, diagonals color 1
        Coloring::from_fn((1..=5).collect(), 2, 2, |s| {
            let d = s[1] - s[0];
            if d == 1 || d == 4 {
                0
            } else {
                1
            }
        })
        .unwrap()
    }

    /// Exhaustive oracle over all m-subsets.
    fn brute_force(c: &Coloring, m: usize) -> Option<Homogeneous> {
        let mut best: Option<Homogeneous> = None;
        for_each_combination(c.ground().len(), m, |pos| {
            let vals: Vec<u64> = pos.iter().map(|&p| c.ground()[p]).collect();
            if let Some(color) = homogeneous_color(c, &vals) {
                let cand = Homogeneous {
                    subset: vals,
                    color,
                };
                let better = match &best {
                    None => true,
                    Some(b) => (cand.color, &cand.subset) < (b.color, &b.subset),
                };
                if better {
                    best = Some(cand);
                }
            }
        });
        best
    }

    #[test]
    fn rank_is_a_bijection() {
        for n in 0..9 {
            for k in 0..=n {
                let mut seen = vec![false; binom(n, k) as usize];
                for_each_combination(n, k, |p| {
                    let r = rank(p);
                    assert!(!seen[r]);
                    seen[r] = true;
                });
                assert!(seen.iter().all(|&b| b));
            }
        }
    }

    #[test]
    fn parity_gives_evens() {
        let found = find_homogeneous(&parity(10), 5).unwrap().unwrap();
        assert_eq!(found.subset, vec![2, 4, 6, 8, 10]);
        assert_eq!(found.color, 0);
        assert_eq!(find_homogeneous(&parity(10), 6).unwrap(), None);
    }

    #[test]
    fn pentagon_has_no_triangle() {
        // all 10 triangles of K_5 checked directly
        let c = pentagon();
        let mut mono = 0;
        for_each_combination(5, 3, |pos| {
            let vals: Vec<u64> = pos.iter().map(|&p| p as u64 + 1).collect();
            if homogeneous_color(&c, &vals).is_some() {
                mono += 1;
            }
        });
        assert_eq!(mono, 0);
        assert_eq!(find_homogeneous(&c, 3).unwrap(), None);
        assert!(find_homogeneous(&c, 2).unwrap().is_some());
    }

    #[test]
    fn every_k6_coloring_has_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let c = Coloring::random((1..=6).collect(), 2, 2, &mut rng).unwrap();
            let found = find_homogeneous(&c, 3).unwrap().expect("R(3,3) = 6");
            assert_eq!(homogeneous_color(&c, &found.subset), Some(found.color));
        }
    }

    #[test]
    fn search_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let n = 4 + trial % 5;
            let k = trial % 4;
            let m = (k.max(1) + trial % 3).min(n as usize);
            let c = Coloring::random(
                (1..=n as u64).collect(),
                k,
                2 + (trial % 2) as u32,
                &mut rng,
            )
            .unwrap();
            let got = find_homogeneous(&c, m).unwrap();
            assert_eq!(got, brute_force(&c, m), "trial {trial}");
        }
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let c = pentagon();
        assert!(matches!(
            find_homogeneous_within(&c, c.ground(), 3, 3),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn precondition_errors() {
        let c = pentagon();
        assert!(find_homogeneous(&c, 6).is_err());
        assert!(find_homogeneous(&c, 1).is_err());
        assert!(find_homogeneous_within(&c, &[9], 2, 100).is_err());
    }

    #[test]
    fn k_zero_reads_empty_set_color() {
        let c = Coloring::from_fn((1..=4).collect(), 0, 3, |_| 2).unwrap();
        let found = find_homogeneous(&c, 3).unwrap().unwrap();
        assert_eq!(
            found,
            Homogeneous {
                subset: vec![1, 2, 3],
                color: 2
            }
        );
    }

    #[test]
    fn chain_examples() {
        let ground: Vec<u64> = (1..=10).collect();
        let c0 = Coloring::constant(ground.clone(), 0, 1).unwrap();
        let chain = iterated_chain(&[c0.clone()], &[10]).unwrap().unwrap();
        assert_eq!(chain.subsets, vec![ground.clone()]);
        assert_eq!(chain.epsilons, vec![1]);

        let chain = iterated_chain(&[c0.clone(), parity(10)], &[10, 5])
            .unwrap()
            .unwrap();
        assert_eq!(chain.subsets[1], vec![2, 4, 6, 8, 10]);
        assert!(verify_chain(&[c0, parity(10)], &chain));

        let g6: Vec<u64> = (1..=6).collect();
        let levels = vec![
            Coloring::constant(g6.clone(), 0, 0).unwrap(),
            Coloring::constant(g6.clone(), 1, 0).unwrap(),
            Coloring::constant(g6.clone(), 2, 1).unwrap(),
        ];
        let chain = iterated_chain(&levels, &[6, 6, 3]).unwrap().unwrap();
        assert_eq!(chain.subsets[2], vec![1, 2, 3]);
        assert_eq!(chain.epsilons[2], 1);
        assert!(verify_chain(&levels, &chain));
    }

    #[test]
    fn chain_failure_and_validation() {
        let g: Vec<u64> = (1..=5).collect();
        let levels = vec![
            Coloring::constant(g.clone(), 0, 0).unwrap(),
            Coloring::constant(g.clone(), 1, 0).unwrap(),
            pentagon(),
        ];
        assert_eq!(iterated_chain(&levels, &[5, 5, 3]).unwrap(), None);
        assert!(iterated_chain(&levels, &[5, 3, 4]).is_err());
        assert!(iterated_chain(&levels[..2], &[5, 5, 3]).is_err());
        assert!(iterated_chain(&[levels[1].clone()], &[5]).is_err());
    }

    #[test]
    fn chain_soundness_on_random_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g: Vec<u64> = (1..=12).collect();
        let mut found = 0;
        for _ in 0..50 {
            let levels: Vec<Coloring> = (0..=3)
                .map(|k| Coloring::random(g.clone(), k, 2, &mut rng).unwrap())
                .collect();
            if let Some(chain) = iterated_chain(&levels, &[12, 6, 4, 3]).unwrap() {
                assert!(verify_chain(&levels, &chain));
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn product_encoding() {
        let g: Vec<u64> = (1..=4).collect();
        let a = Coloring::from_fn(g.clone(), 1, 2, |_| 0).unwrap();
        let b = Coloring::from_fn(g.clone(), 1, 2, |_| 1).unwrap();
        let p = product_coloring(&[a.clone(), b]).unwrap();
        assert_eq!(p.coloring.palette(), 4);
        assert_eq!(p.coloring.color_of(&[3]), Some(1));
        assert_eq!(p.decode(1), vec![0, 1]);
        assert_eq!(p.encode(&[1, 0]), 2);

        let single = product_coloring(&[a.clone()]).unwrap();
        assert_eq!(single.coloring, a);
        assert!(product_coloring(&[]).is_err());
        let other_k = Coloring::constant(g, 2, 0).unwrap();
        assert!(product_coloring(&[a, other_k]).is_err());
    }

    #[test]
    fn product_palette_overflow() {
        let g: Vec<u64> = (1..=2).collect();
        let big = Coloring::from_fn(g, 1, 1 << 20, |_| 0).unwrap();
        assert_eq!(
            product_coloring(&[big.clone(), big]).unwrap_err(),
            Error::Overflow("product palette")
        );
    }

    #[test]
    fn doubly_iterated_examples() {
        let g: Vec<u64> = (1..=6).collect();
        let constant_levels: Vec<Vec<Coloring>> = (0..=2)
            .map(|k| {
                vec![
                    Coloring::constant(g.clone(), k, 0).unwrap(),
                    Coloring::constant(g.clone(), k, 1).unwrap(),
                ]
            })
            .collect();
        let chain = doubly_iterated_chain(&constant_levels, &[6, 6, 6])
            .unwrap()
            .unwrap();
        assert!(chain.subsets.iter().all(|s| *s == g));
        assert_eq!(chain.epsilons, vec![vec![0, 1]; 3]);
        assert!(verify_doubly_chain(&constant_levels, &chain));

        let fam1 = FamilyDescription::by_cardinality([1]);
        let fam2 = FamilyDescription::by_cardinality([2]);
        let levels: Vec<Vec<Coloring>> = (0..=2)
            .map(|k| {
                vec![
                    Coloring::indicator(g.clone(), k, &fam1).unwrap(),
                    Coloring::indicator(g.clone(), k, &fam2).unwrap(),
                ]
            })
            .collect();
        let chain = doubly_iterated_chain(&levels, &[6, 6, 3]).unwrap().unwrap();
        assert!(chain.subsets[2].len() >= 3);
        assert_eq!(chain.epsilons[1], vec![1, 0]);
        assert_eq!(chain.epsilons[2], vec![0, 1]);
        assert!(verify_doubly_chain(&levels, &chain));

        let mut broken = levels.clone();
        broken[1].clear();
        assert!(doubly_iterated_chain(&broken, &[6, 6, 3]).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let c = pentagon();
        let text = c.to_text();
        assert_eq!(Coloring::parse(&text).unwrap(), c);

        let missing = "ground: 1 2 3\nk: 2\n1 2 : 0\n1 3 : 1\n";
        assert!(matches!(Coloring::parse(missing), Err(Error::Parse { .. })));
        let dup = "ground: 1 2\nk: 1\n1 : 0\n1 : 1\n2 : 0\n";
        assert!(matches!(
            Coloring::parse(dup),
            Err(Error::Parse { line: 4, .. })
        ));
        let stray = "ground: 1 2\nk: 1\n1 : 0\n3 : 0\n";
        assert!(matches!(
            Coloring::parse(stray),
            Err(Error::Parse { line: 4, .. })
        ));
        let k0 = "# empty set only\nground: 4 5\nk: 0\n : 3\n";
        let c0 = Coloring::parse(k0).unwrap();
        assert_eq!((c0.palette(), c0.color_of(&[])), (4, Some(3)));
    }
}
