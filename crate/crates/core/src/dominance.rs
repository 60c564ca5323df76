//! Pareto dominance and fast non-dominated sorting.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::problems::Sense;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dominance {
    /// At least as good everywhere and strictly better somewhere.
    Strict,
    /// At least as good everywhere, equal everywhere.
    Weak,
    None,
}

impl Dominance {
    pub fn is_weak(self) -> bool {
        self != Dominance::None
    }

    pub fn is_strict(self) -> bool {
        self == Dominance::Strict
    }
}

/// How `a` relates to `b` under the per-objective `senses`.
pub fn dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> Result<Dominance> {
    if a.len() != b.len() || a.len() != senses.len() {
        return Err(Error::param(format!(
            "dimension mismatch: {} vs {} values, {} senses",
            a.len(),
            b.len(),
            senses.len()
        )));
    }
    Ok(dominance_unchecked(a, b, senses))
}

fn dominance_unchecked(a: &[f64], b: &[f64], senses: &[Sense]) -> Dominance {
    let mut better = false;
    for ((&x, &y), &s) in a.iter().zip(b).zip(senses) {
        let (x, y) = match s {
            Sense::Minimize => (x, y),
            Sense::Maximize => (-x, -y),
        };
        if x > y {
            return Dominance::None;
        }
        if x < y {
            better = true;
        }
    }
    if better {
        Dominance::Strict
    } else {
        Dominance::Weak
    }
}

/// Partition of a population into dominance ranks. Members are indices into
/// the sorted population, ascending within each front.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedFronts {
    fronts: Vec<Vec<usize>>,
}

impl RankedFronts {
    pub fn fronts(&self) -> &[Vec<usize>] {
        &self.fronts
    }

    pub fn into_fronts(self) -> Vec<Vec<usize>> {
        self.fronts
    }

    pub fn len(&self) -> usize {
        self.fronts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fronts.is_empty()
    }

    pub fn first(&self) -> &[usize] {
        &self.fronts[0]
    }

    /// Rank (1-based) of every member.
    pub fn ranks(&self) -> Vec<usize> {
        let total = self.fronts.iter().map(Vec::len).sum();
        let mut ranks = vec![0; total];
        for (r, front) in self.fronts.iter().enumerate() {
            for &i in front {
                ranks[i] = r + 1;
            }
        }
        ranks
    }

    /// Splits at the critical front for a survivor budget `budget`: the
    /// first rank `i*` (1-based) whose cumulative size reaches the budget.
    pub fn split_at_budget(&self, budget: usize) -> Result<CriticalSplit<'_>> {
        if budget == 0 {
            return Err(Error::param("survivor budget must be positive"));
        }
        let mut taken = 0;
        for (i, front) in self.fronts.iter().enumerate() {
            if taken + front.len() >= budget {
                return Ok(CriticalSplit {
                    critical_rank: i + 1,
                    accepted: &self.fronts[..i],
                    critical: front,
                    slots: budget - taken,
                });
            }
            taken += front.len();
        }
        Err(Error::param(format!(
            "population of {taken} cannot fill a budget of {budget}"
        )))
    }
}

/// Fronts before the critical one plus the critical front itself.
#[derive(Clone, Copy, Debug)]
pub struct CriticalSplit<'a> {
    /// 1-based index `i*` of the critical front.
    pub critical_rank: usize,
    pub accepted: &'a [Vec<usize>],
    pub critical: &'a [usize],
    /// Number of members still to take from the critical front.
    pub slots: usize,
}

impl CriticalSplit<'_> {
    pub fn accepted_count(&self) -> usize {
        self.accepted.iter().map(Vec::len).sum()
    }
}

/// Deb et al.'s domination-count sort.
///
/// Dominance only depends on objective values, so the quadratic pass runs
/// over distinct vectors and duplicates inherit the rank of their value.
pub fn fast_nondominated_sort<V: AsRef<[f64]>>(
    pop: &[V],
    senses: &[Sense],
) -> Result<RankedFronts> {
    if pop.is_empty() {
        return Err(Error::param("cannot sort an empty population"));
    }
    let m = senses.len();
    if let Some(bad) = pop.iter().position(|v| v.as_ref().len() != m) {
        return Err(Error::param(format!(
            "individual {bad} has {} objectives, expected {m}",
            pop[bad].as_ref().len()
        )));
    }

    let mut distinct: Vec<&[f64]> = Vec::new();
    let mut slot_of: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut value_of = Vec::with_capacity(pop.len());
    for v in pop {
        let v = v.as_ref();
        let key: Vec<u64> = v.iter().map(|x| (x + 0.0).to_bits()).collect();
        let slot = *slot_of.entry(key).or_insert_with(|| {
            distinct.push(v);
            distinct.len() - 1
        });
        value_of.push(slot);
    }

    let d = distinct.len();
    let mut dominated_by_count = vec![0usize; d];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); d];
    for p in 0..d {
        for q in p + 1..d {
            match dominance_unchecked(distinct[p], distinct[q], senses) {
                Dominance::Strict => {
                    dominates_list[p].push(q);
                    dominated_by_count[q] += 1;
                }
                _ => {
                    if dominance_unchecked(distinct[q], distinct[p], senses) == Dominance::Strict {
                        dominates_list[q].push(p);
                        dominated_by_count[p] += 1;
                    }
                }
            }
        }
    }

    let mut rank_of_value = vec![0usize; d];
    let mut current: Vec<usize> = (0..d).filter(|&p| dominated_by_count[p] == 0).collect();
    let mut rank = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            rank_of_value[p] = rank;
            for &q in &dominates_list[p] {
                dominated_by_count[q] -= 1;
                if dominated_by_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        current = next;
        rank += 1;
    }

    let mut fronts = vec![Vec::new(); rank];
    for (i, &slot) in value_of.iter().enumerate() {
        fronts[rank_of_value[slot]].push(i);
    }
    Ok(RankedFronts { fronts })
}
