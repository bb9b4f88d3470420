//! Domain types shared by every solver layer.
//!
//! All types validate their invariants at construction and are immutable
//! afterwards, so they can be shared freely across threads.

use crate::error::{Error, Result};

fn default_ids(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

fn check_ids(kind: &str, ids: &[String], expected: usize) -> Result<()> {
    if ids.len() != expected {
        return Err(Error::Validation(format!(
            "{kind} id list has {} entries, expected {}",
            ids.len(),
            expected
        )));
    }
    for (i, id) in ids.iter().enumerate() {
        if ids[..i].contains(id) {
            return Err(Error::Validation(format!("duplicate {kind} id '{id}'")));
        }
    }
    Ok(())
}

fn check_grid(rows: &[Vec<f64>]) -> Result<(usize, usize)> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Validation("matrix has no seeker rows".into()));
    }
    let m = rows[0].len();
    if m == 0 {
        return Err(Error::Validation("matrix has no provider columns".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Validation(format!(
                "row {} has {} entries, expected {}",
                i,
                row.len(),
                m
            )));
        }
    }
    Ok((n, m))
}

/// Dense matrix of nonnegative recourse costs, seekers by rows and providers
/// by columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n_seekers: usize,
    n_providers: usize,
    costs: Vec<f64>,
    seeker_ids: Vec<String>,
    provider_ids: Vec<String>,
}

impl CostMatrix {
    pub fn new(
        rows: Vec<Vec<f64>>,
        seeker_ids: Vec<String>,
        provider_ids: Vec<String>,
    ) -> Result<Self> {
        let (n, m) = check_grid(&rows)?;
        check_ids("seeker", &seeker_ids, n)?;
        check_ids("provider", &provider_ids, m)?;
        let mut costs = Vec::with_capacity(n * m);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, c) in row.into_iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::Validation(format!(
                        "cost entry ({i}, {j}) = {c} must be finite and nonnegative"
                    )));
                }
                costs.push(c);
            }
        }
        Ok(Self {
            n_seekers: n,
            n_providers: m,
            costs,
            seeker_ids,
            provider_ids,
        })
    }

    /// Construct with generated labels `s1..sn` / `p1..pm`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let (n, m) = check_grid(&rows)?;
        Self::new(rows, default_ids("s", n), default_ids("p", m))
    }

    pub fn n_seekers(&self) -> usize {
        self.n_seekers
    }

    pub fn n_providers(&self) -> usize {
        self.n_providers
    }

    pub fn at(&self, seeker: usize, provider: usize) -> f64 {
        self.costs[seeker * self.n_providers + provider]
    }

    pub fn row(&self, seeker: usize) -> &[f64] {
        let start = seeker * self.n_providers;
        &self.costs[start..start + self.n_providers]
    }

    pub fn seeker_ids(&self) -> &[String] {
        &self.seeker_ids
    }

    pub fn provider_ids(&self) -> &[String] {
        &self.provider_ids
    }
}

/// Dense matrix of edge weights in `(0, 1]`, produced from a [`CostMatrix`]
/// by the exponential transform or ingested directly.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n_seekers: usize,
    n_providers: usize,
    weights: Vec<f64>,
    gamma: f64,
    seeker_ids: Vec<String>,
    provider_ids: Vec<String>,
    underflow_clamped: usize,
}

impl WeightMatrix {
    pub fn new(
        rows: Vec<Vec<f64>>,
        gamma: f64,
        seeker_ids: Vec<String>,
        provider_ids: Vec<String>,
    ) -> Result<Self> {
        let (n, m) = check_grid(&rows)?;
        check_ids("seeker", &seeker_ids, n)?;
        check_ids("provider", &provider_ids, m)?;
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Validation(format!(
                "gamma = {gamma} must be positive and finite"
            )));
        }
        let mut weights = Vec::with_capacity(n * m);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, w) in row.into_iter().enumerate() {
                if !w.is_finite() || w <= 0.0 || w > 1.0 {
                    return Err(Error::Validation(format!(
                        "weight entry ({i}, {j}) = {w} must lie in (0, 1]"
                    )));
                }
                weights.push(w);
            }
        }
        Ok(Self {
            n_seekers: n,
            n_providers: m,
            weights,
            gamma,
            seeker_ids,
            provider_ids,
            underflow_clamped: 0,
        })
    }

    /// Construct with generated labels `s1..sn` / `p1..pm`.
    pub fn from_rows(rows: Vec<Vec<f64>>, gamma: f64) -> Result<Self> {
        let (n, m) = check_grid(&rows)?;
        Self::new(rows, gamma, default_ids("s", n), default_ids("p", m))
    }

    pub(crate) fn with_clamp_count(mut self, clamped: usize) -> Self {
        self.underflow_clamped = clamped;
        self
    }

    pub fn n_seekers(&self) -> usize {
        self.n_seekers
    }

    pub fn n_providers(&self) -> usize {
        self.n_providers
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn at(&self, seeker: usize, provider: usize) -> f64 {
        self.weights[seeker * self.n_providers + provider]
    }

    pub fn row(&self, seeker: usize) -> &[f64] {
        let start = seeker * self.n_providers;
        &self.weights[start..start + self.n_providers]
    }

    /// Best edge of a seeker row: `(provider, weight)`, ties to the lowest
    /// provider index.
    pub fn row_argmax(&self, seeker: usize) -> (usize, f64) {
        let row = self.row(seeker);
        let mut best = 0;
        for (j, &w) in row.iter().enumerate().skip(1) {
            if w > row[best] {
                best = j;
            }
        }
        (best, row[best])
    }

    pub fn seeker_ids(&self) -> &[String] {
        &self.seeker_ids
    }

    pub fn provider_ids(&self) -> &[String] {
        &self.provider_ids
    }

    /// Number of entries clamped to the smallest positive normal value
    /// because the exponential transform underflowed. Zero unless the matrix
    /// came out of [`crate::weights::to_weights`] with extreme costs.
    pub fn underflow_clamped(&self) -> usize {
        self.underflow_clamped
    }
}

/// Per-provider slot counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityVector {
    caps: Vec<u32>,
}

impl CapacityVector {
    pub fn new(caps: Vec<u32>) -> Self {
        Self { caps }
    }

    pub fn zeros(m: usize) -> Self {
        Self { caps: vec![0; m] }
    }

    pub fn len(&self) -> usize {
        self.caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    pub fn get(&self, provider: usize) -> u32 {
        self.caps[provider]
    }

    pub fn total(&self) -> u64 {
        self.caps.iter().map(|&k| u64::from(k)).sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.caps
    }
}

impl From<Vec<u32>> for CapacityVector {
    fn from(caps: Vec<u32>) -> Self {
        Self::new(caps)
    }
}

/// Partial assignment of seekers to providers; at most one provider per
/// seeker by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    assignment: Vec<Option<usize>>,
}

impl Matching {
    pub fn new(assignment: Vec<Option<usize>>) -> Self {
        Self { assignment }
    }

    pub fn empty(n_seekers: usize) -> Self {
        Self {
            assignment: vec![None; n_seekers],
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn provider_of(&self, seeker: usize) -> Option<usize> {
        self.assignment[seeker]
    }

    pub fn matched_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Option<usize>)> + '_ {
        self.assignment.iter().enumerate().map(|(i, &a)| (i, a))
    }

    /// Per-provider load, validating provider indices along the way.
    pub fn loads(&self, n_providers: usize) -> Result<Vec<u32>> {
        let mut loads = vec![0u32; n_providers];
        for (i, assigned) in self.assignment.iter().enumerate() {
            if let Some(j) = *assigned {
                if j >= n_providers {
                    return Err(Error::Validation(format!(
                        "seeker {i} assigned to provider index {j}, but only {n_providers} providers exist"
                    )));
                }
                loads[j] += 1;
            }
        }
        Ok(loads)
    }
}

/// Penalty model for capacity redistribution: per-provider sensitivities and
/// the initial capacities deviations are measured against.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyConfig {
    betas: Vec<f64>,
    initial_capacities: CapacityVector,
}

impl PenaltyConfig {
    pub fn new(betas: Vec<f64>, initial_capacities: CapacityVector) -> Result<Self> {
        if betas.len() != initial_capacities.len() {
            return Err(Error::Validation(format!(
                "penalty config has {} betas but {} initial capacities",
                betas.len(),
                initial_capacities.len()
            )));
        }
        for (j, &b) in betas.iter().enumerate() {
            if !b.is_finite() || b < 0.0 {
                return Err(Error::Validation(format!(
                    "beta for provider {j} = {b} must be finite and nonnegative"
                )));
            }
        }
        Ok(Self {
            betas,
            initial_capacities,
        })
    }

    /// Identical sensitivity for every provider.
    pub fn uniform(beta: f64, initial_capacities: CapacityVector) -> Result<Self> {
        let m = initial_capacities.len();
        Self::new(vec![beta; m], initial_capacities)
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn initial_capacities(&self) -> &CapacityVector {
        &self.initial_capacities
    }
}

/// Welfare accounting for one matching under one capacity vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareReport {
    /// Sum of row maxima: what seekers would collect with unlimited capacity.
    pub individual_welfare: f64,
    /// Total matched edge weight.
    pub social_welfare: f64,
    /// `individual_welfare - social_welfare`.
    pub welfare_gap: f64,
    /// `sum_j beta_j * |capacity_used_j - initial_j|`; zero without a penalty config.
    pub penalty: f64,
    /// `social_welfare - penalty`.
    pub objective: f64,
    pub matched_count: usize,
    /// Capacity vector in force for the matching.
    pub capacity_used: CapacityVector,
    /// Signed per-provider change `capacity_used - initial`; zeros without a
    /// penalty config.
    pub capacity_delta: Vec<i64>,
}
