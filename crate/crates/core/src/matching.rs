//! Exact capacitated maximum-weight bipartite matching.
//!
//! The solver reformulates the matching as a min-cost max-flow problem:
//! source -> seeker arcs of capacity 1, seeker -> provider arcs of capacity 1
//! and cost `-w_ij`, provider -> sink arcs of capacity `k_j`. The constraint
//! matrix is totally unimodular, so the integral flow optimum is the matching
//! optimum and no MILP machinery is needed. Because every weight is positive,
//! the welfare-optimal matching always matches `min(n, sum k_j)` seekers.
//!
//! [`brute_force_matching`] is the independent oracle for small instances; it
//! never touches the flow path.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::types::{CapacityVector, Matching, WeightMatrix, WelfareReport};
use crate::welfare::evaluate;

/// Weights are scaled by 2^20 and rounded to integer arc costs, keeping the
/// shortest-path potentials exact; reported welfare is recomputed from the
/// original real weights over the chosen edges.
const WEIGHT_SCALE: f64 = (1u64 << 20) as f64;

const INF_COST: i64 = i64::MAX / 4;

struct Arc {
    to: usize,
    rev: usize,
    cap: i64,
    residual: i64,
    cost: i64,
}

/// Residual network for the matching reformulation. Node layout: 0 is the
/// source, `1..=n` the seekers, `n+1..=n+m` the providers, `n+m+1` the sink.
struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
    source: usize,
    sink: usize,
    /// `(node, arc index)` of the seeker->provider arc for each `(i, j)` pair.
    matching_arcs: Vec<(usize, usize)>,
    n_seekers: usize,
    n_providers: usize,
}

impl FlowNetwork {
    fn build(weights: &WeightMatrix, capacities: &CapacityVector) -> Self {
        let n = weights.n_seekers();
        let m = weights.n_providers();
        let nodes = n + m + 2;
        let mut network = Self {
            adj: (0..nodes).map(|_| Vec::new()).collect(),
            source: 0,
            sink: n + m + 1,
            matching_arcs: Vec::with_capacity(n * m),
            n_seekers: n,
            n_providers: m,
        };
        for i in 0..n {
            network.add_arc(0, 1 + i, 1, 0);
        }
        for i in 0..n {
            for j in 0..m {
                let cost = -(weights.at(i, j) * WEIGHT_SCALE).round() as i64;
                let arc_ref = network.add_arc(1 + i, 1 + n + j, 1, cost);
                network.matching_arcs.push(arc_ref);
            }
        }
        for j in 0..m {
            network.add_arc(1 + n + j, n + m + 1, i64::from(capacities.get(j)), 0);
        }
        network
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> (usize, usize) {
        let fwd = self.adj[from].len();
        let rev = self.adj[to].len();
        self.adj[from].push(Arc {
            to,
            rev,
            cap,
            residual: cap,
            cost,
        });
        self.adj[to].push(Arc {
            to: from,
            rev: fwd,
            cap: 0,
            residual: 0,
            cost: -cost,
        });
        (from, fwd)
    }

    /// Shortest distances from the source over residual arcs, tolerating the
    /// negative seeker->provider costs. Used once to seed the potentials.
    fn bellman_ford(&self) -> Vec<i64> {
        let nodes = self.adj.len();
        let mut dist = vec![INF_COST; nodes];
        dist[self.source] = 0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u] == INF_COST {
                    continue;
                }
                for arc in &self.adj[u] {
                    if arc.residual > 0 && dist[u] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[u] + arc.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    /// Dijkstra over reduced costs `cost + phi[u] - phi[v]`, which the
    /// potential maintenance keeps nonnegative. Returns distances and the
    /// predecessor arc of each reached node.
    fn shortest_path(&self, phi: &[i64]) -> (Vec<i64>, Vec<Option<(usize, usize)>>) {
        let nodes = self.adj.len();
        let mut dist = vec![INF_COST; nodes];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nodes];
        let mut heap = BinaryHeap::new();
        dist[self.source] = 0;
        heap.push(Reverse((0i64, self.source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for (idx, arc) in self.adj[u].iter().enumerate() {
                if arc.residual <= 0 {
                    continue;
                }
                let reduced = d + arc.cost + phi[u] - phi[arc.to];
                debug_assert!(arc.cost + phi[u] - phi[arc.to] >= 0, "negative reduced cost");
                if reduced < dist[arc.to] {
                    dist[arc.to] = reduced;
                    prev[arc.to] = Some((u, idx));
                    heap.push(Reverse((reduced, arc.to)));
                }
            }
        }
        (dist, prev)
    }

    /// Successive shortest paths until the sink is unreachable; returns the
    /// number of units pushed (the matched count).
    fn run(&mut self) -> i64 {
        let mut phi = self.bellman_ford();
        if phi[self.sink] == INF_COST {
            return 0;
        }
        let mut flow = 0;
        loop {
            let (dist, prev) = self.shortest_path(&phi);
            if prev[self.sink].is_none() {
                break;
            }
            // Capping the update at dist[sink] keeps reduced costs
            // nonnegative even for nodes the search did not settle.
            let sink_dist = dist[self.sink];
            for (p, &d) in phi.iter_mut().zip(&dist) {
                *p += d.min(sink_dist);
            }

            let mut bottleneck = i64::MAX;
            let mut v = self.sink;
            while let Some((u, idx)) = prev[v] {
                bottleneck = bottleneck.min(self.adj[u][idx].residual);
                v = u;
            }
            let mut v = self.sink;
            while let Some((u, idx)) = prev[v] {
                let rev = self.adj[u][idx].rev;
                self.adj[u][idx].residual -= bottleneck;
                self.adj[v][rev].residual += bottleneck;
                v = u;
            }
            flow += bottleneck;
        }
        flow
    }

    fn extract_matching(&self) -> Matching {
        let m = self.n_providers;
        let assignment = (0..self.n_seekers)
            .map(|i| {
                (0..m).find(|&j| {
                    let (node, idx) = self.matching_arcs[i * m + j];
                    let arc = &self.adj[node][idx];
                    arc.residual < arc.cap
                })
            })
            .collect();
        Matching::new(assignment)
    }

    /// Net outflow per node under the current flow; used by tests to check
    /// conservation. Reverse arcs have `cap == 0` and are skipped.
    #[cfg(test)]
    fn node_balance(&self) -> Vec<i64> {
        let mut balance = vec![0i64; self.adj.len()];
        for (u, arcs) in self.adj.iter().enumerate() {
            for arc in arcs {
                if arc.cap > 0 {
                    let flow = arc.cap - arc.residual;
                    balance[u] += flow;
                    balance[arc.to] -= flow;
                }
            }
        }
        balance
    }
}

/// Maximum-weight matching under per-provider capacities.
///
/// The returned matching is feasible for `capacities` and maximizes total
/// matched weight; the report is the full welfare accounting for it. Any
/// welfare-equal optimum may be returned when several exist.
pub fn solve_matching(
    weights: &WeightMatrix,
    capacities: &CapacityVector,
) -> Result<(Matching, WelfareReport)> {
    let n = weights.n_seekers();
    let m = weights.n_providers();
    if capacities.len() != m {
        return Err(Error::Validation(format!(
            "capacity vector has {} providers, weight matrix has {}",
            capacities.len(),
            m
        )));
    }
    if capacities.total() == 0 {
        let matching = Matching::empty(n);
        let report = evaluate(weights, &matching, capacities, None)?;
        return Ok((matching, report));
    }
    let mut network = FlowNetwork::build(weights, capacities);
    let flow = network.run();
    debug_assert_eq!(flow as u64, (n as u64).min(capacities.total()));
    let matching = network.extract_matching();
    let report = evaluate(weights, &matching, capacities, None)?;
    Ok((matching, report))
}

/// Exhaustive matching oracle: tries every assignment of each seeker to one
/// provider or none. Guarded to `n <= 8`, `m <= 5`; the candidate space is
/// `(m+1)^n`.
pub fn brute_force_matching(
    weights: &WeightMatrix,
    capacities: &CapacityVector,
) -> Result<(Matching, f64)> {
    let n = weights.n_seekers();
    let m = weights.n_providers();
    if n > 8 || m > 5 {
        return Err(Error::SizeGuard(format!(
            "brute force limited to 8 seekers and 5 providers, got {n}x{m}"
        )));
    }
    if capacities.len() != m {
        return Err(Error::Validation(format!(
            "capacity vector has {} providers, weight matrix has {}",
            capacities.len(),
            m
        )));
    }

    struct Search<'a> {
        weights: &'a WeightMatrix,
        caps: &'a [u32],
        assignment: Vec<Option<usize>>,
        loads: Vec<u32>,
        best_welfare: f64,
        best_assignment: Vec<Option<usize>>,
    }

    impl Search<'_> {
        fn descend(&mut self, seeker: usize, welfare: f64) {
            if seeker == self.assignment.len() {
                if welfare > self.best_welfare {
                    self.best_welfare = welfare;
                    self.best_assignment.clone_from(&self.assignment);
                }
                return;
            }
            self.assignment[seeker] = None;
            self.descend(seeker + 1, welfare);
            for j in 0..self.loads.len() {
                if self.loads[j] < self.caps[j] {
                    self.loads[j] += 1;
                    self.assignment[seeker] = Some(j);
                    self.descend(seeker + 1, welfare + self.weights.at(seeker, j));
                    self.assignment[seeker] = None;
                    self.loads[j] -= 1;
                }
            }
        }
    }

    let mut search = Search {
        weights,
        caps: capacities.as_slice(),
        assignment: vec![None; n],
        loads: vec![0; m],
        best_welfare: 0.0,
        best_assignment: vec![None; n],
    };
    search.descend(0, 0.0);
    Ok((Matching::new(search.best_assignment), search.best_welfare))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_hand_enumeration() {
        let w = WeightMatrix::from_rows(vec![vec![0.9, 0.1], vec![0.8, 0.7]], 1.0).unwrap();
        let k = CapacityVector::new(vec![1, 1]);
        let (matching, welfare) = brute_force_matching(&w, &k).unwrap();
        assert_eq!(matching.provider_of(0), Some(0));
        assert_eq!(matching.provider_of(1), Some(1));
        assert!((welfare - 1.6).abs() < 1e-12);

        let (_, report) = solve_matching(&w, &k).unwrap();
        assert!((report.social_welfare - 1.6).abs() < 1e-9);
    }

    #[test]
    fn single_seeker_picks_the_better_provider() {
        let w = WeightMatrix::from_rows(vec![vec![0.3, 0.6]], 1.0).unwrap();
        let k = CapacityVector::new(vec![1, 1]);
        let (matching, welfare) = brute_force_matching(&w, &k).unwrap();
        assert_eq!(matching.provider_of(0), Some(1));
        assert!((welfare - 0.6).abs() < 1e-12);
    }

    #[test]
    fn zero_capacity_yields_empty_matching() {
        let w = WeightMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]], 1.0).unwrap();
        let (matching, report) = solve_matching(&w, &CapacityVector::zeros(2)).unwrap();
        assert_eq!(matching.matched_count(), 0);
        assert_eq!(report.social_welfare, 0.0);
    }

    #[test]
    fn matches_min_of_seekers_and_capacity() {
        let w = WeightMatrix::from_rows(vec![vec![0.2], vec![0.4], vec![0.9]], 1.0).unwrap();
        let (matching, report) = solve_matching(&w, &CapacityVector::new(vec![2])).unwrap();
        assert_eq!(matching.matched_count(), 2);
        // The two heaviest seekers win the two slots.
        assert!((report.social_welfare - 1.3).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let w = WeightMatrix::from_rows(vec![vec![0.5, 0.5]], 1.0).unwrap();
        assert!(solve_matching(&w, &CapacityVector::new(vec![1])).is_err());
        assert!(brute_force_matching(&w, &CapacityVector::new(vec![1, 1, 1])).is_err());
    }

    #[test]
    fn brute_force_size_guard() {
        let w = WeightMatrix::from_rows(vec![vec![0.5]; 9], 1.0).unwrap();
        let err = brute_force_matching(&w, &CapacityVector::new(vec![1])).unwrap_err();
        assert!(matches!(err, Error::SizeGuard(_)));
    }

    #[test]
    fn flow_conserves_at_internal_nodes() {
        let w = WeightMatrix::from_rows(
            vec![vec![0.9, 0.2, 0.4], vec![0.3, 0.8, 0.5], vec![0.6, 0.6, 0.7]],
            1.0,
        )
        .unwrap();
        let mut network = FlowNetwork::build(&w, &CapacityVector::new(vec![1, 2, 0]));
        let flow = network.run();
        assert_eq!(flow, 3);
        let balance = network.node_balance();
        for (node, &b) in balance.iter().enumerate() {
            if node == network.source {
                assert_eq!(b, flow);
            } else if node == network.sink {
                assert_eq!(b, -flow);
            } else {
                assert_eq!(b, 0, "node {node} unbalanced");
            }
        }
    }

    #[test]
    fn solver_agrees_with_oracle_on_fixed_instances() {
        let cases: Vec<(Vec<Vec<f64>>, Vec<u32>)> = vec![
            (
                vec![vec![0.9, 0.1], vec![0.8, 0.7], vec![0.2, 0.3]],
                vec![1, 1],
            ),
            (
                vec![vec![0.5, 0.5, 0.5], vec![0.5, 0.5, 0.5]],
                vec![0, 1, 1],
            ),
            (
                vec![vec![0.95, 0.9], vec![0.94, 0.1], vec![0.93, 0.11]],
                vec![2, 1],
            ),
            (vec![vec![0.4], vec![0.6], vec![0.8]], vec![0]),
        ];
        for (rows, caps) in cases {
            let w = WeightMatrix::from_rows(rows, 1.0).unwrap();
            let k = CapacityVector::new(caps);
            let (_, report) = solve_matching(&w, &k).unwrap();
            let (_, oracle) = brute_force_matching(&w, &k).unwrap();
            assert!(
                (report.social_welfare - oracle).abs() <= 1e-9,
                "solver {} vs oracle {}",
                report.social_welfare,
                oracle
            );
        }
    }
}
