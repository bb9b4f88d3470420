//! Welfare accounting: individual welfare, social welfare, gap, and penalty.

use crate::error::{Error, Result};
use crate::types::{CapacityVector, Matching, PenaltyConfig, WeightMatrix, WelfareReport};

/// Absolute tolerance for all welfare comparisons across the crate.
pub const WELFARE_TOL: f64 = 1e-9;

/// Sum of per-seeker best edge weights: the capacity-free upper bound on any
/// matching's welfare.
pub fn individual_welfare(weights: &WeightMatrix) -> f64 {
    (0..weights.n_seekers())
        .map(|i| weights.row_argmax(i).1)
        .sum()
}

/// Score a matching under a capacity vector, with an optional penalty model.
///
/// Fails if the matching is infeasible for `capacities` or if any dimension
/// disagrees with the weight matrix.
pub fn evaluate(
    weights: &WeightMatrix,
    matching: &Matching,
    capacities: &CapacityVector,
    penalty: Option<&PenaltyConfig>,
) -> Result<WelfareReport> {
    let n = weights.n_seekers();
    let m = weights.n_providers();
    if matching.len() != n {
        return Err(Error::Validation(format!(
            "matching covers {} seekers, weight matrix has {}",
            matching.len(),
            n
        )));
    }
    if capacities.len() != m {
        return Err(Error::Validation(format!(
            "capacity vector has {} providers, weight matrix has {}",
            capacities.len(),
            m
        )));
    }
    let loads = matching.loads(m)?;
    for (j, (&load, &cap)) in loads.iter().zip(capacities.as_slice()).enumerate() {
        if load > cap {
            return Err(Error::Validation(format!(
                "capacity constraint violated at provider {j}: load {load} exceeds capacity {cap}"
            )));
        }
    }

    // `+ 0.0` turns the empty sum's -0.0 into +0.0.
    let social_welfare: f64 = matching
        .iter()
        .filter_map(|(i, assigned)| assigned.map(|j| weights.at(i, j)))
        .sum::<f64>()
        + 0.0;
    let individual = individual_welfare(weights);

    let (penalty_value, capacity_delta) = match penalty {
        Some(p) => {
            if p.betas().len() != m {
                return Err(Error::Validation(format!(
                    "penalty config covers {} providers, weight matrix has {}",
                    p.betas().len(),
                    m
                )));
            }
            let delta: Vec<i64> = capacities
                .as_slice()
                .iter()
                .zip(p.initial_capacities().as_slice())
                .map(|(&used, &initial)| i64::from(used) - i64::from(initial))
                .collect();
            let value = delta
                .iter()
                .zip(p.betas())
                .map(|(&d, &beta)| beta * d.unsigned_abs() as f64)
                .sum();
            (value, delta)
        }
        None => (0.0, vec![0; m]),
    };

    Ok(WelfareReport {
        individual_welfare: individual,
        social_welfare,
        welfare_gap: individual - social_welfare,
        penalty: penalty_value,
        objective: social_welfare - penalty_value,
        matched_count: matching.matched_count(),
        capacity_used: capacities.clone(),
        capacity_delta,
    })
}
