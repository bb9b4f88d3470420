//! Recourse costs for linear providers: the cheapest feature change that
//! flips a rejecting classifier, under mutability and box constraints.
//!
//! Only linear models get a native solver; recourse costs for arbitrary
//! models are expected to arrive as precomputed cost matrices.

use crate::error::{Error, Result};
use crate::types::CostMatrix;

/// Margin added to the decision boundary so the flipped side is a closed set
/// with an attained minimum.
pub const DECISION_MARGIN: f64 = 1e-6;

/// Distance measure for action cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    Linf,
}

/// A provider's linear decision model: accepts when `weights . x + bias >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProvider {
    weights: Vec<f64>,
    bias: f64,
    id: String,
}

impl LinearProvider {
    pub fn new(weights: Vec<f64>, bias: f64, id: impl Into<String>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
            return Err(Error::Validation(
                "provider weights and bias must be finite".into(),
            ));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::Validation(
                "provider weight vector must have at least one nonzero entry".into(),
            ));
        }
        Ok(Self {
            weights,
            bias,
            id: id.into(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, features: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(features)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias
    }

    pub fn accepts(&self, features: &[f64]) -> bool {
        self.score(features) >= 0.0
    }
}

/// Feature bounds and mutability flags for the action set.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionConstraints {
    lower: Vec<f64>,
    upper: Vec<f64>,
    mutable: Vec<bool>,
}

impl ActionConstraints {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, mutable: Vec<bool>) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != mutable.len() {
            return Err(Error::Validation(format!(
                "constraint vectors disagree on dimension: lower {}, upper {}, mutable {}",
                lower.len(),
                upper.len(),
                mutable.len()
            )));
        }
        for (k, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() {
                return Err(Error::Validation(format!("bound for feature {k} is NaN")));
            }
            if lo > hi {
                return Err(Error::Validation(format!(
                    "feature {k} has lower bound {lo} above upper bound {hi}"
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            mutable,
        })
    }

    /// No bounds, every feature mutable.
    pub fn unbounded(dimension: usize) -> Self {
        Self {
            lower: vec![f64::NEG_INFINITY; dimension],
            upper: vec![f64::INFINITY; dimension],
            mutable: vec![true; dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }
}

/// A minimal-cost action and its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct RecourseAction {
    pub action: Vec<f64>,
    pub cost: f64,
}

/// Per-coordinate slack toward a higher score: how far the coordinate can
/// move in the useful direction, and at what rate the score improves.
struct Lever {
    coordinate: usize,
    direction: f64,
    rate: f64,
    extent: f64,
}

fn levers(
    features: &[f64],
    provider: &LinearProvider,
    constraints: &ActionConstraints,
) -> Result<Vec<Lever>> {
    let mut levers = Vec::new();
    for (k, &w) in provider.weights.iter().enumerate() {
        if !constraints.mutable[k] || w == 0.0 {
            continue;
        }
        let low = constraints.lower[k] - features[k];
        let high = constraints.upper[k] - features[k];
        if low > 0.0 || high < 0.0 {
            return Err(Error::Validation(format!(
                "feature {k} = {} lies outside its bounds [{}, {}]",
                features[k], constraints.lower[k], constraints.upper[k]
            )));
        }
        let (direction, extent) = if w > 0.0 { (1.0, high) } else { (-1.0, -low) };
        levers.push(Lever {
            coordinate: k,
            direction,
            rate: w.abs(),
            extent,
        });
    }
    Ok(levers)
}

/// Cheapest action flipping `provider`'s decision on `features`.
///
/// The seeker must currently be rejected. L1 costs allocate greedily to the
/// steepest usable coordinate first; Linf costs bisect on the smallest box
/// radius whose best reachable score crosses the margin.
pub fn min_cost_action(
    features: &[f64],
    provider: &LinearProvider,
    constraints: &ActionConstraints,
    norm: Norm,
) -> Result<RecourseAction> {
    let d = provider.dimension();
    if features.len() != d || constraints.dimension() != d {
        return Err(Error::Validation(format!(
            "dimension mismatch: {} features, {}-dimensional provider '{}', {}-dimensional constraints",
            features.len(),
            d,
            provider.id(),
            constraints.dimension()
        )));
    }
    let score = provider.score(features);
    if score >= 0.0 {
        return Err(Error::Validation(format!(
            "provider '{}' already accepts this seeker (score {score})",
            provider.id()
        )));
    }
    let needed = -score + DECISION_MARGIN;
    let levers = levers(features, provider, constraints)?;
    let reachable: f64 = levers.iter().map(|l| l.rate * l.extent).sum();
    // reachable is +inf as soon as one usable coordinate is unbounded.
    if reachable < needed {
        return Err(Error::Infeasible(format!(
            "provider '{}' is unreachable: best attainable score change {reachable} \
             is below the required {needed}",
            provider.id()
        )));
    }

    let mut action = vec![0.0; d];
    let cost = match norm {
        Norm::L1 => {
            let mut order: Vec<&Lever> = levers.iter().collect();
            order.sort_by(|a, b| {
                b.rate
                    .partial_cmp(&a.rate)
                    .expect("rates are finite")
                    .then(a.coordinate.cmp(&b.coordinate))
            });
            let mut remaining = needed;
            let mut total = 0.0;
            for lever in order {
                if remaining <= 0.0 {
                    break;
                }
                let step = lever.extent.min(remaining / lever.rate);
                action[lever.coordinate] = lever.direction * step;
                remaining -= lever.rate * step;
                total += step;
            }
            total
        }
        Norm::Linf => {
            let gain = |radius: f64| -> f64 {
                levers.iter().map(|l| l.rate * l.extent.min(radius)).sum()
            };
            // Bracket: double from the unconstrained radius until the gain
            // crosses; feasibility above guarantees this terminates.
            let rate_sum: f64 = levers.iter().map(|l| l.rate).sum();
            let mut high = needed / rate_sum;
            while gain(high) < needed {
                high *= 2.0;
            }
            let mut low = 0.0;
            for _ in 0..100 {
                let mid = 0.5 * (low + high);
                if gain(mid) >= needed {
                    high = mid;
                } else {
                    low = mid;
                }
            }
            for lever in &levers {
                action[lever.coordinate] = lever.direction * lever.extent.min(high);
            }
            high
        }
    };
    Ok(RecourseAction { action, cost })
}

/// A recourse seeker: a labeled feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Seeker {
    pub id: String,
    pub features: Vec<f64>,
}

impl Seeker {
    pub fn new(id: impl Into<String>, features: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            features,
        }
    }
}

/// Full cost matrix of minimal actions for every seeker/provider pair.
///
/// Every seeker must be rejected by every provider; pairs violating that are
/// listed in the error. A pair with no feasible recourse is an error too,
/// since downstream matching assumes a complete matrix.
pub fn build_cost_matrix(
    seekers: &[Seeker],
    providers: &[LinearProvider],
    constraints: &ActionConstraints,
    norm: Norm,
) -> Result<CostMatrix> {
    if seekers.is_empty() || providers.is_empty() {
        return Err(Error::Validation(
            "need at least one seeker and one provider".into(),
        ));
    }
    let d = constraints.dimension();
    for seeker in seekers {
        if seeker.features.len() != d {
            return Err(Error::Validation(format!(
                "seeker '{}' has {} features, expected {d}",
                seeker.id,
                seeker.features.len()
            )));
        }
    }
    for provider in providers {
        if provider.dimension() != d {
            return Err(Error::Validation(format!(
                "provider '{}' has {} weights, expected {d}",
                provider.id(),
                provider.dimension()
            )));
        }
    }

    let accepted: Vec<String> = seekers
        .iter()
        .flat_map(|s| {
            providers
                .iter()
                .filter(|p| p.accepts(&s.features))
                .map(|p| format!("({}, {})", s.id, p.id()))
        })
        .collect();
    if !accepted.is_empty() {
        return Err(Error::Validation(format!(
            "every seeker must be rejected by every provider; already accepted: {}",
            accepted.join(", ")
        )));
    }

    let mut rows = Vec::with_capacity(seekers.len());
    for seeker in seekers {
        let mut row = Vec::with_capacity(providers.len());
        for provider in providers {
            let result = min_cost_action(&seeker.features, provider, constraints, norm)?;
            row.push(result.cost);
        }
        rows.push(row);
    }
    CostMatrix::new(
        rows,
        seekers.iter().map(|s| s.id.clone()).collect(),
        providers.iter().map(|p| p.id().to_string()).collect(),
    )
}
