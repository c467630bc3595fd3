//! Balanced multiway number partitioning.
//!
//! [`gnp`] is the longest-processing-time greedy heuristic, [`rgnp`] calls it
//! repeatedly until every set holds exactly `k_B` numbers, and
//! [`exhaustive_balanced`] is a brute-force oracle for small instances.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::states::shannon_entropy;

/// Largest instance accepted by [`exhaustive_balanced`].
pub const EXHAUSTIVE_MAX_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionInput {
    numbers: Vec<f64>,
    k: usize,
    per_set: Option<usize>,
}

impl PartitionInput {
    /// Free-size partition into `k` sets.
    pub fn new(numbers: Vec<f64>, k: usize) -> Result<Self> {
        check_numbers(&numbers)?;
        if k == 0 {
            return Err(Error::InvalidInput("set count must be positive".into()));
        }
        Ok(Self { numbers, k, per_set: None })
    }

    /// Balanced partition into `k_a` sets of exactly `k_b` numbers.
    pub fn balanced(numbers: Vec<f64>, k_a: usize, k_b: usize) -> Result<Self> {
        check_numbers(&numbers)?;
        if k_a == 0 || k_b == 0 || numbers.len() != k_a * k_b {
            return Err(Error::NotRectangular { len: numbers.len(), k_a, k_b });
        }
        Ok(Self { numbers, k: k_a, per_set: Some(k_b) })
    }

    pub fn numbers(&self) -> &[f64] {
        &self.numbers
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn per_set(&self) -> Option<usize> {
        self.per_set
    }
}

fn check_numbers(numbers: &[f64]) -> Result<()> {
    if numbers.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput("numbers must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Sets of numbers, each sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub sets: Vec<Vec<f64>>,
}

impl Partition {
    pub fn sums(&self) -> Vec<f64> {
        self.sets.iter().map(|s| s.iter().sum()).collect()
    }

    pub fn max_sum(&self) -> f64 {
        self.sums().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_sum(&self) -> f64 {
        self.sums().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Shannon entropy (bits) of the normalized set sums.
    pub fn entropy_of_sums(&self) -> f64 {
        entropy_of_sums(&self.sums())
    }
}

/// Same shape as [`Partition`], holding positions into the input list instead of values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPartition {
    pub sets: Vec<Vec<usize>>,
}

impl IndexPartition {
    pub fn to_values(&self, numbers: &[f64]) -> Partition {
        Partition { sets: self.sets.iter().map(|s| s.iter().map(|&i| numbers[i]).collect()).collect() }
    }
}

fn entropy_of_sums(sums: &[f64]) -> f64 {
    let total: f64 = sums.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let probs: Vec<f64> = sums.iter().map(|s| s / total).collect();
    shannon_entropy(&probs)
}

/// Descending by value, ties by lower position first.
fn desc(numbers: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&i, &j| numbers[j].total_cmp(&numbers[i]).then(i.cmp(&j))
}

fn sort_desc(items: &mut [usize], numbers: &[f64]) {
    items.sort_by(desc(numbers));
}

/// Greedy partition of `items` (positions into `numbers`) into `k` sets.
fn gnp_items(numbers: &[f64], items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut order = items.to_vec();
    sort_desc(&mut order, numbers);
    let mut sets: Vec<Vec<usize>> = order[..k].iter().map(|&i| vec![i]).collect();
    let mut sums: Vec<f64> = order[..k].iter().map(|&i| numbers[i]).collect();
    for &i in &order[k..] {
        let mut target = 0;
        for (j, &s) in sums.iter().enumerate().skip(1) {
            if s < sums[target] {
                target = j;
            }
        }
        sets[target].push(i);
        sums[target] += numbers[i];
    }
    // appended numbers arrive in descending order already; sort anyway for clarity
    for s in sets.iter_mut() {
        sort_desc(s, numbers);
    }
    sets
}

/// Greedy number partitioning, as positions into the input.
pub fn gnp_indices(input: &PartitionInput) -> Result<IndexPartition> {
    let n = input.numbers.len();
    if n < input.k {
        return Err(Error::TooFewNumbers { len: n, k: input.k });
    }
    let items: Vec<usize> = (0..n).collect();
    Ok(IndexPartition { sets: gnp_items(&input.numbers, &items, input.k) })
}

/// Greedy number partitioning: seed `k` sets with the `k` largest numbers, then
/// append each remaining number to the set whose sum is currently smallest
/// (lowest set index on ties).
pub fn gnp(input: &PartitionInput) -> Result<Partition> {
    Ok(gnp_indices(input)?.to_values(&input.numbers))
}

/// Recurrent greedy partitioning, as positions into the input.
///
/// Sets are returned ordered by descending sum (stable).
pub fn rgnp_indices(input: &PartitionInput) -> Result<IndexPartition> {
    let k_a = input.k;
    let k_b = input
        .per_set
        .ok_or(Error::NotRectangular { len: input.numbers.len(), k_a, k_b: 0 })?;
    let numbers = &input.numbers;
    let cap = 10 * k_a;

    let mut todo: Vec<usize> = (0..numbers.len()).collect();
    let mut done: Vec<Vec<usize>> = Vec::with_capacity(k_a);
    let mut iterations = 0;
    // Runs at least once. Each pass finalizes at least one set because the pool
    // always holds exactly k₋·k_B numbers.
    loop {
        let k_minus = k_a - done.len();
        if k_minus == 0 {
            break;
        }
        if iterations == cap {
            return Err(Error::IterationCapExceeded { cap });
        }
        iterations += 1;

        let sets = gnp_items(numbers, &todo, k_minus);
        todo.clear();
        let mut oversized = 0;
        for mut set in sets {
            match set.len().cmp(&k_b) {
                Ordering::Less => todo.extend(set),
                Ordering::Equal => done.push(set),
                Ordering::Greater => {
                    todo.extend(set.drain(k_b..));
                    done.push(set);
                    oversized += 1;
                }
            }
        }
        if oversized == 0 && todo.is_empty() {
            break;
        }
    }

    let sums: Vec<f64> = done.iter().map(|s| s.iter().map(|&i| numbers[i]).sum()).collect();
    let mut order: Vec<usize> = (0..done.len()).collect();
    order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
    Ok(IndexPartition { sets: order.into_iter().map(|i| core::mem::take(&mut done[i])).collect() })
}

/// Recurrent greedy number partitioning into `k_A` sets of exactly `k_B` numbers.
pub fn rgnp(input: &PartitionInput) -> Result<Partition> {
    Ok(rgnp_indices(input)?.to_values(&input.numbers))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BalancedObjective {
    /// Minimize the largest set sum.
    MinMaxSum,
    /// Maximize the Shannon entropy of the normalized set sums.
    MaxEntropyOfSums,
}

/// Brute-force balanced partition, as positions into the input.
///
/// Ties (objective values within `1e-13`) go to the lexicographically smallest
/// descending-sorted vector of set sums. Sets are ordered by descending sum.
pub fn exhaustive_balanced_indices(input: &PartitionInput, objective: BalancedObjective) -> Result<IndexPartition> {
    let n = input.numbers.len();
    if n > EXHAUSTIVE_MAX_LEN {
        return Err(Error::InstanceTooLarge { len: n, max: EXHAUSTIVE_MAX_LEN });
    }
    let k_a = input.k;
    let k_b = input.per_set.ok_or(Error::NotRectangular { len: n, k_a, k_b: 0 })?;

    let mut search = Search {
        numbers: &input.numbers,
        k_a,
        k_b,
        objective,
        groups: vec![Vec::with_capacity(k_b); k_a],
        open: 0,
        best: None,
    };
    search.descend(0);
    let (_, _, mut sets) = search.best.expect("at least one balanced partition exists");
    let sums: Vec<f64> = sets.iter().map(|s| s.iter().map(|&i| input.numbers[i]).sum()).collect();
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
    for s in sets.iter_mut() {
        sort_desc(s, &input.numbers);
    }
    Ok(IndexPartition { sets: order.into_iter().map(|i| core::mem::take(&mut sets[i])).collect() })
}

/// Brute-force balanced partition oracle for up to 16 numbers.
pub fn exhaustive_balanced(input: &PartitionInput, objective: BalancedObjective) -> Result<Partition> {
    Ok(exhaustive_balanced_indices(input, objective)?.to_values(&input.numbers))
}

struct Search<'a> {
    numbers: &'a [f64],
    k_a: usize,
    k_b: usize,
    objective: BalancedObjective,
    groups: Vec<Vec<usize>>,
    open: usize,
    /// (score to maximize, descending sums, groups)
    best: Option<(f64, Vec<f64>, Vec<Vec<usize>>)>,
}

impl Search<'_> {
    /// Places item `i`; a new group is only opened in the first empty slot so
    /// each unordered grouping is visited once.
    fn descend(&mut self, i: usize) {
        if i == self.numbers.len() {
            self.consider();
            return;
        }
        for g in 0..self.open {
            if self.groups[g].len() < self.k_b {
                self.groups[g].push(i);
                self.descend(i + 1);
                self.groups[g].pop();
            }
        }
        if self.open < self.k_a {
            let g = self.open;
            self.open += 1;
            self.groups[g].push(i);
            self.descend(i + 1);
            self.groups[g].pop();
            self.open -= 1;
        }
    }

    fn consider(&mut self) {
        let mut sums: Vec<f64> =
            self.groups.iter().map(|g| g.iter().map(|&i| self.numbers[i]).sum()).collect();
        let score = match self.objective {
            BalancedObjective::MinMaxSum => -sums.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            BalancedObjective::MaxEntropyOfSums => entropy_of_sums(&sums),
        };
        sums.sort_by(|a, b| b.total_cmp(a));
        let better = match &self.best {
            None => true,
            Some((best, best_sums, _)) => {
                if score > best + 1e-13 {
                    true
                } else if score >= best - 1e-13 {
                    lex_less(&sums, best_sums)
                } else {
                    false
                }
            }
        };
        if better {
            self.best = Some((score, sums, self.groups.clone()));
        }
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    false
}
