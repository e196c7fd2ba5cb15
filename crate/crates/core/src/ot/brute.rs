//! Exhaustive vertex enumeration for small transportation problems.
//!
//! Every basic feasible solution is a spanning tree of the bipartite graph
//! whose flows are forced by repeatedly peeling a leaf: the leaf ships its
//! whole residual to its unique neighbour. Trees are enumerated once each by
//! always peeling the smallest-index leaf (the Prüfer order, last column as
//! the root). Nodes skipped over while they still carry edges must reappear
//! as a neighbour before they may be peeled themselves. Partial solutions
//! are pruned against the incumbent with a transport lower bound.

use crate::boundary::BoundaryMeasurePair;
use crate::error::{Error, Result};

use super::{cost_matrix, CostNorm, TransportPlan};

pub const BRUTE_FORCE_LIMIT: usize = 6;

struct Search<'a> {
    m: usize,
    n: usize,
    c: &'a [Vec<f64>],
    tol: f64,
    residual: Vec<f64>,
    present: Vec<bool>,
    pending: Vec<bool>,
    flows: Vec<(usize, usize, f64)>,
    best: f64,
    best_flows: Vec<(usize, usize, f64)>,
}

impl Search<'_> {
    fn cell_cost(&self, a: usize, b: usize) -> f64 {
        if a < self.m {
            self.c[a][b - self.m]
        } else {
            self.c[b][a - self.m]
        }
    }

    fn lower_bound(&self) -> f64 {
        let (m, n) = (self.m, self.n);
        let mut rows = 0.0;
        for i in (0..m).filter(|&i| self.present[i]) {
            let min = (0..n)
                .filter(|&j| self.present[m + j])
                .map(|j| self.c[i][j])
                .fold(f64::INFINITY, f64::min);
            if min.is_finite() {
                rows += self.residual[i] * min;
            }
        }
        let mut cols = 0.0;
        for j in (0..n).filter(|&j| self.present[m + j]) {
            let min = (0..m)
                .filter(|&i| self.present[i])
                .map(|i| self.c[i][j])
                .fold(f64::INFINITY, f64::min);
            if min.is_finite() {
                cols += self.residual[m + j] * min;
            }
        }
        f64::max(rows, cols)
    }

    fn run(&mut self, cost: f64, remaining: usize) {
        let nodes = self.m + self.n;
        if remaining == 1 {
            if self.pending.iter().all(|&p| !p) && self.residual[nodes - 1].abs() <= self.tol && cost < self.best {
                self.best = cost;
                self.best_flows = self.flows.clone();
            }
            return;
        }
        let pending_count = self.pending.iter().filter(|&&p| p).count();
        if pending_count > remaining - 1 {
            return;
        }
        if cost + self.lower_bound() >= self.best - self.tol * self.best.abs().max(1.0) * 1e-3 {
            return;
        }
        let mut skipped: Vec<usize> = Vec::new();
        for leaf in 0..nodes - 1 {
            if !self.present[leaf] {
                continue;
            }
            if self.pending[leaf] {
                continue;
            }
            let rl = self.residual[leaf];
            let side = if leaf < self.m { self.m..nodes } else { 0..self.m };
            let mut partners: Vec<usize> = side
                .filter(|&w| self.present[w] && self.residual[w] >= rl - self.tol)
                .collect();
            partners.sort_by(|&a, &b| self.cell_cost(leaf, a).total_cmp(&self.cell_cost(leaf, b)));
            for &k in &skipped {
                self.pending[k] = true;
            }
            for w in partners {
                let was_pending = self.pending[w];
                let rw = self.residual[w];
                self.pending[w] = false;
                self.residual[w] = (rw - rl).max(0.0);
                self.residual[leaf] = 0.0;
                self.present[leaf] = false;
                let (i, j) = if leaf < self.m { (leaf, w - self.m) } else { (w, leaf - self.m) };
                self.flows.push((i, j, rl));
                self.run(cost + rl * self.cell_cost(leaf, w), remaining - 1);
                self.flows.pop();
                self.present[leaf] = true;
                self.residual[leaf] = rl;
                self.residual[w] = rw;
                self.pending[w] = was_pending;
            }
            for &k in &skipped {
                self.pending[k] = false;
            }
            skipped.push(leaf);
        }
    }
}

/// Optimal cost and one optimal vertex plan by exhaustive enumeration of
/// basic feasible solutions. Limited to [`BRUTE_FORCE_LIMIT`] atoms per side.
pub fn brute_force_oracle(mu: &BoundaryMeasurePair, cost: &CostNorm) -> Result<(f64, TransportPlan)> {
    let (m, n) = (mu.positive().len(), mu.negative().len());
    if m > BRUTE_FORCE_LIMIT || n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            limit: BRUTE_FORCE_LIMIT,
            sources: m,
            targets: n,
        });
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("each side needs at least one atom".into()));
    }
    let c = cost_matrix(mu, cost);
    let residual: Vec<f64> = mu
        .positive()
        .iter()
        .chain(mu.negative())
        .map(|a| a.mass)
        .collect();
    let mut search = Search {
        m,
        n,
        c: &c,
        tol: 1e-12 * mu.total_mass(),
        residual,
        present: vec![true; m + n],
        pending: vec![false; m + n],
        flows: Vec::new(),
        best: f64::INFINITY,
        best_flows: Vec::new(),
    };
    search.run(0.0, m + n);
    if !search.best.is_finite() {
        return Err(Error::NumericFailure("no basic feasible solution found".into()));
    }
    let plan = TransportPlan::from_flows(mu, cost, search.best_flows.clone(), 0.0);
    Ok((plan.cost, plan))
}
