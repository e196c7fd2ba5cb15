//! Discrete Kantorovich problem between boundary atom measures.

mod brute;
mod simplex;

use std::fmt;
use std::sync::Arc;

use crate::boundary::{AtomTag, BoundaryMeasurePair};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, Vec2};

pub use brute::{brute_force_oracle, BRUTE_FORCE_LIMIT};

type NormFn = Arc<dyn Fn(Vec2) -> f64 + Send + Sync>;

/// Transport cost `c(x − y)` given by a norm on the plane.
#[derive(Clone)]
pub enum CostNorm {
    Euclidean,
    /// A user-supplied strictly convex norm, evaluated on point differences.
    Pluggable(NormFn),
}

impl fmt::Debug for CostNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostNorm::Euclidean => write!(f, "Euclidean"),
            CostNorm::Pluggable(_) => write!(f, "Pluggable(..)"),
        }
    }
}

impl Default for CostNorm {
    fn default() -> Self {
        CostNorm::Euclidean
    }
}

impl CostNorm {
    /// Wraps `f` after spot-checking the norm axioms and strict convexity on
    /// a fixed sample of vectors.
    pub fn pluggable(f: impl Fn(Vec2) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let c = CostNorm::Pluggable(Arc::new(f));
        c.check_axioms()?;
        Ok(c)
    }

    /// `ℓ^p` norm, strictly convex for `1 < p < ∞`.
    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("ℓ^p cost needs 1 < p < ∞, got {p}")));
        }
        Self::pluggable(move |v| (v.x.abs().powf(p) + v.y.abs().powf(p)).powf(1.0 / p))
    }

    pub fn eval(&self, d: Vec2) -> f64 {
        match self {
            CostNorm::Euclidean => d.norm(),
            CostNorm::Pluggable(f) => f(d),
        }
    }

    pub fn cost(&self, x: Vec2, y: Vec2) -> f64 {
        self.eval(x - y)
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, CostNorm::Euclidean)
    }

    pub fn check_axioms(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("cost is not a strictly convex norm: {what}")));
        if self.eval(Vec2::ZERO).abs() > 1e-12 {
            return bad("c(0) ≠ 0");
        }
        let dirs: Vec<Vec2> = (0..24)
            .map(|k| Vec2::from_angle(k as f64 * std::f64::consts::PI / 12.0 + 0.1) * (0.3 + 0.1 * (k % 5) as f64))
            .collect();
        for &u in &dirs {
            let cu = self.eval(u);
            if !(cu > 0.0 && cu.is_finite()) {
                return bad("positivity");
            }
            for t in [-3.0, -0.5, 0.25, 2.0, 7.5] {
                let lhs = self.eval(u * t);
                if (lhs - t.abs() * cu).abs() > 1e-9 * t.abs() * cu {
                    return bad("homogeneity");
                }
            }
            for &v in &dirs {
                let cv = self.eval(v);
                let cuv = self.eval(u + v);
                if cuv > cu + cv + 1e-9 * (cu + cv) {
                    return bad("triangle inequality");
                }
                let parallel = u.cross(v).abs() <= 1e-6 * u.norm() * v.norm();
                if !parallel && cuv >= cu + cv - 1e-9 * (cu + cv) {
                    return bad("strict convexity");
                }
            }
        }
        Ok(())
    }
}

/// One segment of a transport plan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanPair {
    pub source: BoundaryPoint,
    pub target: BoundaryPoint,
    pub mass: f64,
    pub source_tag: AtomTag,
    pub target_tag: AtomTag,
    /// Index into `mu.positive()`.
    pub source_index: usize,
    /// Index into `mu.negative()`.
    pub target_index: usize,
}

impl PlanPair {
    pub fn length(&self) -> f64 {
        self.source.xy.dist(self.target.xy)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportPlan {
    pub pairs: Vec<PlanPair>,
    pub cost: f64,
    /// (Σ per-source masses, Σ per-target masses).
    pub marginals_checksum: (f64, f64),
    /// Transportation duals `(u, v)` with `u_i + v_j = c_ij` on the basis, if
    /// the plan came from the simplex.
    pub solver_duals: Option<(Vec<f64>, Vec<f64>)>,
}

impl TransportPlan {
    pub fn empty() -> Self {
        TransportPlan {
            pairs: Vec::new(),
            cost: 0.0,
            marginals_checksum: (0.0, 0.0),
            solver_duals: None,
        }
    }

    /// Builds a plan from `(source index, target index, mass)` triples,
    /// dropping masses at or below `drop_below`.
    pub fn from_flows(
        mu: &BoundaryMeasurePair,
        cost: &CostNorm,
        flows: impl IntoIterator<Item = (usize, usize, f64)>,
        drop_below: f64,
    ) -> Self {
        let mut pairs: Vec<PlanPair> = flows
            .into_iter()
            .filter(|&(_, _, m)| m > drop_below)
            .map(|(i, j, m)| {
                let s = &mu.positive()[i];
                let t = &mu.negative()[j];
                PlanPair {
                    source: s.point,
                    target: t.point,
                    mass: m,
                    source_tag: s.tag,
                    target_tag: t.tag,
                    source_index: i,
                    target_index: j,
                }
            })
            .collect();
        pairs.sort_by_key(|p| (p.source_index, p.target_index));
        let total_cost = pairs.iter().map(|p| p.mass * cost.cost(p.source.xy, p.target.xy)).sum();
        let m: f64 = pairs.iter().map(|p| p.mass).sum();
        TransportPlan {
            pairs,
            cost: total_cost,
            marginals_checksum: (m, m),
            solver_duals: None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.pairs.iter().map(|p| p.mass).sum()
    }

    /// Cost recomputed from the pairs under `cost`.
    pub fn recompute_cost(&self, cost: &CostNorm) -> f64 {
        self.pairs.iter().map(|p| p.mass * cost.cost(p.source.xy, p.target.xy)).sum()
    }
}

pub fn cost_matrix(mu: &BoundaryMeasurePair, cost: &CostNorm) -> Vec<Vec<f64>> {
    mu.positive()
        .iter()
        .map(|s| mu.negative().iter().map(|t| cost.cost(s.point.xy, t.point.xy)).collect())
        .collect()
}

/// Exactly optimal basic plan of the transportation LP with costs
/// `c(x_i − y_j)`, by network simplex (see the pivot rules in `simplex`).
pub fn solve_kantorovich(mu: &BoundaryMeasurePair, cost: &CostNorm) -> Result<TransportPlan> {
    if mu.positive().is_empty() || mu.negative().is_empty() {
        return Err(Error::InvalidInput("each side needs at least one atom".into()));
    }
    let supply: Vec<f64> = mu.positive().iter().map(|a| a.mass).collect();
    let demand: Vec<f64> = mu.negative().iter().map(|a| a.mass).collect();
    let p: f64 = supply.iter().sum();
    let n: f64 = demand.iter().sum();
    if (p - n).abs() > 1e-12 * p.max(n) {
        return Err(Error::Unbalanced { positive: p, negative: n });
    }
    let c = cost_matrix(mu, cost);
    let sol = simplex::transport_simplex(&supply, &demand, &c)?;
    let mut plan = TransportPlan::from_flows(mu, cost, sol.flows, 1e-14 * p);
    plan.solver_duals = Some((sol.u, sol.v));
    Ok(plan)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlanReport {
    /// Largest per-atom marginal defect.
    pub max_marginal_residual: f64,
    /// Pairs of segments meeting away from a common endpoint.
    pub crossing_count: usize,
    /// Largest distance from a crossing point to the nearest segment endpoint.
    pub max_crossing_violation: f64,
    /// Pairs of collinear segments overlapping in more than a point.
    pub collinear_overlaps: usize,
    pub pair_count: usize,
}

/// Marginal and non-crossing diagnostics for a plan against its measures.
pub fn plan_diagnostics(plan: &TransportPlan, mu: &BoundaryMeasurePair) -> PlanReport {
    let mut out_src = vec![0.0; mu.positive().len()];
    let mut out_dst = vec![0.0; mu.negative().len()];
    for p in &plan.pairs {
        if let Some(x) = out_src.get_mut(p.source_index) {
            *x += p.mass;
        }
        if let Some(x) = out_dst.get_mut(p.target_index) {
            *x += p.mass;
        }
    }
    let mut residual: f64 = 0.0;
    for (a, m) in mu.positive().iter().zip(&out_src) {
        residual = residual.max((a.mass - m).abs());
    }
    for (a, m) in mu.negative().iter().zip(&out_dst) {
        residual = residual.max((a.mass - m).abs());
    }
    let segs: Vec<(Vec2, Vec2)> = plan.pairs.iter().map(|p| (p.source.xy, p.target.xy)).collect();
    let (crossing_count, max_crossing_violation, collinear_overlaps) = count_crossings(&segs, 1e-9);
    PlanReport {
        max_marginal_residual: residual,
        crossing_count,
        max_crossing_violation,
        collinear_overlaps,
        pair_count: plan.pairs.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentContact {
    None,
    SharedEndpoint,
    Crossing { point: Vec2, depth: f64 },
    CollinearOverlap,
}

pub fn segment_contact(a: (Vec2, Vec2), b: (Vec2, Vec2), tol: f64) -> SegmentContact {
    let (p, p2) = a;
    let (q, q2) = b;
    let r = p2 - p;
    let s = q2 - q;
    let scale = r.norm().max(s.norm()).max(1e-300);
    let denom = r.cross(s);
    let qp = q - p;
    if denom.abs() <= tol * scale * scale {
        if qp.cross(r).abs() > tol * scale * scale {
            return SegmentContact::None;
        }
        let rr = r.norm_sq().max(1e-300);
        let t0 = qp.dot(r) / rr;
        let t1 = (q2 - p).dot(r) / rr;
        let (lo, hi) = (t0.min(t1).max(0.0), t0.max(t1).min(1.0));
        return if (hi - lo) * r.norm() > tol * scale {
            SegmentContact::CollinearOverlap
        } else if hi - lo >= -tol {
            SegmentContact::SharedEndpoint
        } else {
            SegmentContact::None
        };
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    let eps = tol;
    if t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps {
        return SegmentContact::None;
    }
    let x = p + r * t;
    let shared = [p, p2]
        .iter()
        .any(|&e| e.dist(x) <= tol * scale && (e.dist(q) <= tol * scale || e.dist(q2) <= tol * scale));
    if shared {
        return SegmentContact::SharedEndpoint;
    }
    let depth = [p, p2, q, q2].iter().map(|e| e.dist(x)).fold(f64::INFINITY, f64::min);
    SegmentContact::Crossing { point: x, depth }
}

pub fn count_crossings(segs: &[(Vec2, Vec2)], tol: f64) -> (usize, f64, usize) {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut overlaps = 0;
    let boxes: Vec<(Vec2, Vec2)> = segs
        .iter()
        .map(|&(a, b)| (Vec2::new(a.x.min(b.x), a.y.min(b.y)), Vec2::new(a.x.max(b.x), a.y.max(b.y))))
        .collect();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (lo1, hi1) = boxes[i];
            let (lo2, hi2) = boxes[j];
            let pad = 1e-9 * (1.0 + hi1.x.abs().max(hi1.y.abs()));
            if lo1.x > hi2.x + pad || lo2.x > hi1.x + pad || lo1.y > hi2.y + pad || lo2.y > hi1.y + pad {
                continue;
            }
            match segment_contact(segs[i], segs[j], tol) {
                SegmentContact::Crossing { depth, .. } => {
                    count += 1;
                    worst = worst.max(depth);
                }
                SegmentContact::CollinearOverlap => overlaps += 1,
                _ => {}
            }
        }
    }
    (count, worst, overlaps)
}
