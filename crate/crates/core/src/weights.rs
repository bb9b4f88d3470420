//! Exponential cost-to-weight transform.

use crate::error::{Error, Result};
use crate::types::{CostMatrix, WeightMatrix};

/// Map recourse costs to edge weights `w = exp(-gamma * c)`.
///
/// The transform is strictly decreasing in cost, so it preserves each row's
/// preference ordering for every positive `gamma`. Costs extreme enough that
/// the exponential underflows to zero are clamped to the smallest positive
/// normal value; the count of clamped entries is recorded on the result (a
/// weight of exactly zero would make "matched" indistinguishable from
/// "unmatched" in the objective).
pub fn to_weights(costs: &CostMatrix, gamma: f64) -> Result<WeightMatrix> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Validation(format!(
            "gamma = {gamma} must be positive and finite"
        )));
    }
    let mut clamped = 0usize;
    let rows: Vec<Vec<f64>> = (0..costs.n_seekers())
        .map(|i| {
            costs
                .row(i)
                .iter()
                .map(|&c| {
                    let w = (-gamma * c).exp();
                    if w > 0.0 {
                        w
                    } else {
                        clamped += 1;
                        f64::MIN_POSITIVE
                    }
                })
                .collect()
        })
        .collect();
    let matrix = WeightMatrix::new(
        rows,
        gamma,
        costs.seeker_ids().to_vec(),
        costs.provider_ids().to_vec(),
    )?;
    Ok(matrix.with_clamp_count(clamped))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_cost_maps_to_one() {
        let c = CostMatrix::from_rows(vec![vec![0.0]]).unwrap();
        for gamma in [0.5, 1.0, 10.0, 600.0] {
            let w = to_weights(&c, gamma).unwrap();
            assert_eq!(w.at(0, 0), 1.0);
        }
    }

    #[test]
    fn known_point_round_trips() {
        // c recovered from w = 0.611 at gamma = 10 must map back within 5e-4.
        let c = CostMatrix::from_rows(vec![vec![0.0493]]).unwrap();
        let w = to_weights(&c, 10.0).unwrap();
        assert!((w.at(0, 0) - 0.611).abs() < 5e-4, "got {}", w.at(0, 0));
    }

    #[test]
    fn lower_cost_gets_strictly_higher_weight() {
        let c = CostMatrix::from_rows(vec![vec![0.2, 0.7]]).unwrap();
        let w = to_weights(&c, 3.0).unwrap();
        assert!(w.at(0, 0) > w.at(0, 1));
    }

    #[test]
    fn invalid_gamma_is_rejected() {
        let c = CostMatrix::from_rows(vec![vec![1.0]]).unwrap();
        for gamma in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(to_weights(&c, gamma).is_err(), "gamma = {gamma}");
        }
    }

    #[test]
    fn underflow_is_clamped_and_counted() {
        let c = CostMatrix::from_rows(vec![vec![0.1, 5000.0]]).unwrap();
        let w = to_weights(&c, 1.0).unwrap();
        assert_eq!(w.at(0, 1), f64::MIN_POSITIVE);
        assert_eq!(w.underflow_clamped(), 1);
        assert!(w.at(0, 1) > 0.0);
    }

    #[test]
    fn labels_survive_the_transform() {
        let c = CostMatrix::new(
            vec![vec![0.1, 0.2]],
            vec!["alice".into()],
            vec!["bank-a".into(), "bank-b".into()],
        )
        .unwrap();
        let w = to_weights(&c, 2.0).unwrap();
        assert_eq!(w.seeker_ids(), ["alice".to_string()]);
        assert_eq!(w.provider_ids()[1], "bank-b");
    }
}
