//! Greedy optimal capacity distribution for a fixed total budget, and the
//! welfare curve swept over budgets.
//!
//! For a budget `K`, welfare is bounded above by the sum of the `K` largest
//! per-seeker best weights, and handing each of those seekers' preferred
//! providers one slot attains the bound. So the optimizer is a maxima pass,
//! one sort, and a count; no search required.

use crate::matching::solve_matching;
use crate::types::{CapacityVector, WeightMatrix};

/// Capacity vector maximizing matching welfare subject to a total budget.
///
/// Each of the `min(k_total, n)` seekers with the largest best-edge weights
/// contributes one slot to its preferred provider. Ties sort by ascending
/// seeker index, and row ties prefer the lowest provider index, so the result
/// is deterministic; welfare is tie-independent either way. Budget beyond `n`
/// buys no welfare and is parked on provider 0 to keep the total exact.
pub fn optimal_capacity(weights: &WeightMatrix, k_total: u32) -> CapacityVector {
    let n = weights.n_seekers();
    let m = weights.n_providers();
    let mut best_edges: Vec<(usize, f64)> = (0..n).map(|i| weights.row_argmax(i)).collect();
    // Stable sort keeps equal weights in ascending seeker order.
    best_edges.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("weights are finite"));

    let selected = (k_total as usize).min(n);
    let mut caps = vec![0u32; m];
    for &(provider, _) in &best_edges[..selected] {
        caps[provider] += 1;
    }
    caps[0] += k_total - selected as u32;
    CapacityVector::new(caps)
}

/// One point of the welfare curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub k_total: u32,
    pub capacity: CapacityVector,
    pub welfare: f64,
}

/// Optimal-allocation welfare for every budget `0..=k_max`.
///
/// The curve is nondecreasing with nonincreasing increments, meets the
/// individual-welfare bound at `k_total = n`, and stays there.
pub fn welfare_curve(weights: &WeightMatrix, k_max: u32) -> Vec<CurvePoint> {
    (0..=k_max)
        .map(|k_total| {
            let capacity = optimal_capacity(weights, k_total);
            let (_, report) = solve_matching(weights, &capacity)
                .expect("capacity vector is built for this matrix");
            CurvePoint {
                k_total,
                capacity,
                welfare: report.social_welfare,
            }
        })
        .collect()
}
