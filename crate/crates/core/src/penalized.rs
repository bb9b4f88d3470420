//! Joint capacity-and-matching optimization with deviation penalties.
//!
//! [`solve_penalized`] maximizes `matching welfare - sum_j beta_j * |k_j -
//! initial_j|` over all capacity vectors of a fixed total, by exact
//! enumeration of compositions with a memoized inner matching solve. Desk
//! scale instances enumerate in full, so table reproductions are exact
//! optima, not heuristics; [`local_search_penalized`] is the opt-in fast path
//! when the feasible set is too large.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matching::solve_matching;
use crate::types::{CapacityVector, Matching, PenaltyConfig, WeightMatrix, WelfareReport};
use crate::welfare::{evaluate, WELFARE_TOL};

/// Upper bound on the number of compositions [`enumerate_capacities`] will
/// agree to stream.
pub const MAX_COMPOSITIONS: u128 = 1_000_000;

/// `C(k_total + m - 1, m - 1)`, the number of nonnegative integer `m`-vectors
/// summing to `k_total`. Saturates far above [`MAX_COMPOSITIONS`].
pub fn composition_count(m: usize, k_total: u32) -> u128 {
    let mut count: u128 = 1;
    for i in 1..m as u128 {
        // Exact at every step: the running product is itself a binomial.
        count = count.saturating_mul(u128::from(k_total) + i) / i;
    }
    count
}

/// Streams every nonnegative integer vector of length `m` summing to
/// `k_total`, in lexicographic order.
pub fn enumerate_capacities(m: usize, k_total: u32) -> Result<Compositions> {
    if m == 0 {
        return Err(Error::Validation(
            "cannot enumerate capacities for zero providers".into(),
        ));
    }
    let count = composition_count(m, k_total);
    if count > MAX_COMPOSITIONS {
        return Err(Error::SizeGuard(format!(
            "capacity feasible set has {count} compositions (limit {MAX_COMPOSITIONS}); \
             use local_search_penalized instead"
        )));
    }
    let mut first = vec![0u32; m];
    first[m - 1] = k_total;
    Ok(Compositions { next: Some(first) })
}

#[derive(Debug)]
pub struct Compositions {
    next: Option<Vec<u32>>,
}

impl Iterator for Compositions {
    type Item = CapacityVector;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        let mut following = current.clone();
        self.next = advance(&mut following).then_some(following);
        Some(CapacityVector::new(current))
    }
}

/// Step to the lexicographic successor in place; false when exhausted.
fn advance(v: &mut [u32]) -> bool {
    let m = v.len();
    let mut suffix = 0u32;
    for p in (0..m - 1).rev() {
        suffix += v[p + 1];
        if suffix > 0 {
            v[p] += 1;
            for q in &mut v[p + 1..m - 1] {
                *q = 0;
            }
            v[m - 1] = suffix - 1;
            return true;
        }
    }
    false
}

/// Memoizing wrapper around the inner matching solve. Capacities above `n`
/// buy nothing, so keys are capped at `n` before lookup.
struct InnerSolver<'a> {
    weights: &'a WeightMatrix,
    memo: HashMap<Vec<u32>, f64>,
}

impl<'a> InnerSolver<'a> {
    fn new(weights: &'a WeightMatrix) -> Self {
        Self {
            weights,
            memo: HashMap::new(),
        }
    }

    fn capped(&self, caps: &[u32]) -> Vec<u32> {
        let n = self.weights.n_seekers() as u32;
        caps.iter().map(|&k| k.min(n)).collect()
    }

    fn welfare(&mut self, caps: &[u32]) -> f64 {
        let key = self.capped(caps);
        if let Some(&welfare) = self.memo.get(&key) {
            return welfare;
        }
        let (_, report) = solve_matching(self.weights, &CapacityVector::new(key.clone()))
            .expect("capacity vector length matches the weight matrix");
        self.memo.insert(key, report.social_welfare);
        report.social_welfare
    }

    /// Matching realizing the memoized welfare for `caps`.
    fn matching(&self, caps: &[u32]) -> Matching {
        let (matching, _) = solve_matching(self.weights, &CapacityVector::new(self.capped(caps)))
            .expect("capacity vector length matches the weight matrix");
        matching
    }
}

fn penalty_for(caps: &[u32], penalty: &PenaltyConfig) -> f64 {
    caps.iter()
        .zip(penalty.initial_capacities().as_slice())
        .zip(penalty.betas())
        .map(|((&k, &initial), &beta)| beta * (i64::from(k) - i64::from(initial)).unsigned_abs() as f64)
        .sum()
}

fn deviation(caps: &[u32], initial: &[u32]) -> u64 {
    caps.iter()
        .zip(initial)
        .map(|(&k, &i)| (i64::from(k) - i64::from(i)).unsigned_abs())
        .sum()
}

fn check_dimensions(weights: &WeightMatrix, penalty: &PenaltyConfig) -> Result<()> {
    if penalty.initial_capacities().len() != weights.n_providers() {
        return Err(Error::Validation(format!(
            "penalty config covers {} providers, weight matrix has {}",
            penalty.initial_capacities().len(),
            weights.n_providers()
        )));
    }
    Ok(())
}

fn finish(
    weights: &WeightMatrix,
    penalty: &PenaltyConfig,
    inner: &InnerSolver<'_>,
    caps: Vec<u32>,
) -> Result<(CapacityVector, Matching, WelfareReport)> {
    let matching = inner.matching(&caps);
    let chosen = CapacityVector::new(caps);
    let report = evaluate(weights, &matching, &chosen, Some(penalty))?;
    Ok((chosen, matching, report))
}

/// Exact optimum of the penalized redistribution problem.
///
/// Enumerates every capacity vector summing to `k_total` (the total-capacity
/// equality binds the output; the initial capacities need not sum to
/// `k_total`). Objective ties within 1e-9 break toward the smallest total
/// deviation from the initial capacities, then the lexicographically smallest
/// vector, so the result does not depend on enumeration order.
pub fn solve_penalized(
    weights: &WeightMatrix,
    penalty: &PenaltyConfig,
    k_total: u32,
) -> Result<(CapacityVector, Matching, WelfareReport)> {
    check_dimensions(weights, penalty)?;
    let m = weights.n_providers();
    let mut inner = InnerSolver::new(weights);

    let mut best_objective = f64::NEG_INFINITY;
    for caps in enumerate_capacities(m, k_total)? {
        let objective = inner.welfare(caps.as_slice()) - penalty_for(caps.as_slice(), penalty);
        if objective > best_objective {
            best_objective = objective;
        }
    }

    let initial = penalty.initial_capacities().as_slice();
    let mut winner: Option<(u64, Vec<u32>)> = None;
    for caps in enumerate_capacities(m, k_total)? {
        let objective = inner.welfare(caps.as_slice()) - penalty_for(caps.as_slice(), penalty);
        if objective < best_objective - WELFARE_TOL {
            continue;
        }
        let key = (deviation(caps.as_slice(), initial), caps.as_slice().to_vec());
        if winner.as_ref().is_none_or(|best| key < *best) {
            winner = Some(key);
        }
    }

    let (_, caps) = winner.expect("at least one composition exists");
    finish(weights, penalty, &inner, caps)
}

/// Hill-climbing fast path over unit capacity transfers.
///
/// From `start` (which must already sum to `k_total`), repeatedly applies the
/// best single-unit transfer between two providers until no transfer improves
/// the objective by more than 1e-9. Transfer ties prefer the smallest total
/// deviation from the initial capacities, then the lowest `(from, to)` pair.
pub fn local_search_penalized(
    weights: &WeightMatrix,
    penalty: &PenaltyConfig,
    k_total: u32,
    start: &CapacityVector,
) -> Result<(CapacityVector, Matching, WelfareReport)> {
    check_dimensions(weights, penalty)?;
    let m = weights.n_providers();
    if start.len() != m {
        return Err(Error::Validation(format!(
            "start vector has {} providers, weight matrix has {}",
            start.len(),
            m
        )));
    }
    if start.total() != u64::from(k_total) {
        return Err(Error::Validation(format!(
            "start vector totals {}, expected the capacity budget {}",
            start.total(),
            k_total
        )));
    }

    let initial = penalty.initial_capacities().as_slice();
    let mut inner = InnerSolver::new(weights);
    let mut current = start.as_slice().to_vec();
    let mut current_objective =
        inner.welfare(&current) - penalty_for(&current, penalty);

    struct Transfer {
        objective: f64,
        deviation: u64,
        pair: (usize, usize),
        caps: Vec<u32>,
    }

    loop {
        let mut candidates: Vec<Transfer> = Vec::new();
        for from in 0..m {
            if current[from] == 0 {
                continue;
            }
            for to in 0..m {
                if to == from {
                    continue;
                }
                let mut moved = current.clone();
                moved[from] -= 1;
                moved[to] += 1;
                candidates.push(Transfer {
                    objective: inner.welfare(&moved) - penalty_for(&moved, penalty),
                    deviation: deviation(&moved, initial),
                    pair: (from, to),
                    caps: moved,
                });
            }
        }
        let best = candidates
            .iter()
            .map(|c| c.objective)
            .fold(f64::NEG_INFINITY, f64::max);
        if best <= current_objective + WELFARE_TOL {
            break;
        }
        let chosen = candidates
            .into_iter()
            .filter(|c| c.objective >= best - WELFARE_TOL)
            .min_by(|a, b| (a.deviation, a.pair).cmp(&(b.deviation, b.pair)))
            .expect("an improving transfer exists");
        current = chosen.caps;
        current_objective = chosen.objective;
    }

    finish(weights, penalty, &inner, current)
}
