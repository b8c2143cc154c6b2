//! Hunting for integers with many representations.
//!
//! Candidates come from a deterministic stream; batches are counted in
//! parallel and the first qualifying candidate in stream order wins, so the
//! result does not depend on thread scheduling.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer_sets::MultiplicativeSystem;
use crate::primes;
use crate::repcount::{self, RepWitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Primorials, then squarefree integers by number of prime factors.
    SquarefreeRich,
    /// 2, 3, 4, ...
    ExhaustiveScan,
    /// Alternates the two streams above, skipping repeats.
    #[default]
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_candidates: u64,
    pub max_n: u64,
    #[serde(default)]
    pub strategy: Strategy,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_candidates: 1_000_000,
            max_n: 10_000_000,
            strategy: Strategy::Hybrid,
        }
    }
}

/// Squarefree integers with exactly `omega` prime factors, increasing.
///
/// Heap entries are index tuples `i_1 < … < i_ω` into the primes. A
/// tuple's children increment one position `j <= last`, where `last` is
/// the position its parent incremented; every tuple then has exactly one
/// parent, and children are larger than parents.
struct FixedOmega {
    max_n: u64,
    heap: BinaryHeap<Reverse<(u64, Vec<usize>, usize)>>,
}

impl FixedOmega {
    fn new(omega: usize, max_n: u64) -> Self {
        let mut heap = BinaryHeap::new();
        let base: Vec<usize> = (0..omega).collect();
        if let Some(v) = product(&base).filter(|&v| v <= max_n) {
            heap.push(Reverse((v, base, omega - 1)));
        }
        FixedOmega { max_n, heap }
    }
}

fn product(idx: &[usize]) -> Option<u64> {
    idx.iter()
        .try_fold(1u64, |acc, &i| acc.checked_mul(primes::nth_prime(i + 1)?))
}

impl Iterator for FixedOmega {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let Reverse((value, idx, last)) = self.heap.pop()?;
        for j in 0..=last {
            if j + 1 < idx.len() && idx[j] + 1 == idx[j + 1] {
                continue;
            }
            let mut child = idx.clone();
            child[j] += 1;
            if let Some(v) = product(&child).filter(|&v| v <= self.max_n) {
                self.heap.push(Reverse((v, child, j)));
            }
        }
        Some(value)
    }
}

fn squarefree_rich(max_n: u64) -> impl Iterator<Item = u64> + Send {
    let prims: Vec<u64> = primes::primorials()
        .into_iter()
        .filter(|&p| p <= max_n)
        .collect();
    let groups = prims.len();
    let first = prims.clone().into_iter();
    let rest = (1..=groups).flat_map(move |omega| {
        let primorial = prims[omega - 1];
        FixedOmega::new(omega, max_n).filter(move |&v| v != primorial)
    });
    first.chain(rest)
}

/// Deterministic candidate stream; every value lies in `[2, max_n]` and
/// none repeats.
pub fn candidate_stream(strategy: Strategy, max_n: u64) -> Box<dyn Iterator<Item = u64> + Send> {
    let max_n = max_n.min(repcount::MAX_N);
    match strategy {
        Strategy::SquarefreeRich => Box::new(squarefree_rich(max_n)),
        Strategy::ExhaustiveScan => Box::new(2..=max_n),
        Strategy::Hybrid => {
            let mut rich = squarefree_rich(max_n).fuse();
            let mut scan = (2..=max_n).fuse();
            let mut seen = HashSet::new();
            let mut turn = false;
            Box::new(std::iter::from_fn(move || loop {
                turn = !turn;
                let next = if turn {
                    rich.next().or_else(|| scan.next())
                } else {
                    scan.next().or_else(|| rich.next())
                };
                match next {
                    None => return None,
                    Some(v) if seen.insert(v) => return Some(v),
                    Some(_) => continue,
                }
            }))
        }
    }
}

/// What a found witness is guaranteed to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guarantee {
    /// Exhaustive scan: no smaller `n >= 2` qualifies.
    GlobalMinimum,
    /// Only the earliest qualifying candidate of the stream.
    FirstInStreamOrder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum WitnessOutcome {
    Found {
        witness: RepWitness,
        candidates_tried: u64,
        guarantee: Guarantee,
    },
    NotFound {
        candidates_tried: u64,
        max_count_seen: u64,
        /// First candidate reaching `max_count_seen`.
        argmax: Option<u64>,
    },
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&RepWitness> {
        match self {
            WitnessOutcome::Found { witness, .. } => Some(witness),
            WitnessOutcome::NotFound { .. } => None,
        }
    }
}

const BATCH: usize = 4096;

/// First candidate (in stream order) with `g(n) >= target`.
pub fn find_witness(
    system: &MultiplicativeSystem,
    target: u64,
    budget: &SearchBudget,
) -> Result<WitnessOutcome> {
    if target == 0 {
        return Err(Error::invalid("target must be at least 1"));
    }
    if budget.max_candidates == 0 {
        return Err(Error::invalid("max_candidates must be at least 1"));
    }
    let mut stream =
        candidate_stream(budget.strategy, budget.max_n).take(budget.max_candidates as usize);
    let mut tried = 0u64;
    let mut max_seen = 0u64;
    let mut argmax = None;
    loop {
        let batch: Vec<u64> = stream.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            return Ok(WitnessOutcome::NotFound {
                candidates_tried: tried,
                max_count_seen: max_seen,
                argmax,
            });
        }
        let counts: Vec<Result<u64>> = batch
            .par_iter()
            .map(|&n| repcount::representation_count(system, n))
            .collect();
        for (&n, count) in batch.iter().zip(counts) {
            let count = count?;
            tried += 1;
            if count > max_seen || argmax.is_none() {
                max_seen = count;
                argmax = Some(n);
            }
            if count >= target {
                let witness = repcount::count_system_reps(system, n)?;
                if witness.count < target {
                    return Err(Error::invalid(format!(
                        "re-verification of n = {n} gave {} < {target}",
                        witness.count
                    )));
                }
                let guarantee = match budget.strategy {
                    Strategy::ExhaustiveScan => Guarantee::GlobalMinimum,
                    _ => Guarantee::FirstInStreamOrder,
                };
                return Ok(WitnessOutcome::Found {
                    witness,
                    candidates_tried: tried,
                    guarantee,
                });
            }
        }
    }
}
