//! Transport density `σγ`, Beckmann field `pγ`, boundary mass and the split
//! of a plan by atom tags.

use rayon::prelude::*;

use crate::boundary::AtomTag;
use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Vec2};
use crate::grid::GridSpec;
use crate::ot::{CostNorm, PlanPair, TransportPlan};

/// Per-cell measures of `σγ` and `pγ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    pub grid: GridSpec,
    pub sigma: Vec<f64>,
    pub p_vec: Vec<Vec2>,
    /// Mass of `σγ` carried by segments lying on `∂Ω`.
    pub boundary_mass: f64,
}

impl DensityGrid {
    pub fn zeros(grid: GridSpec) -> Self {
        DensityGrid {
            grid,
            sigma: vec![0.0; grid.len()],
            p_vec: vec![Vec2::ZERO; grid.len()],
            boundary_mass: 0.0,
        }
    }

    pub fn interior_mass(&self) -> f64 {
        self.sigma.iter().sum()
    }

    /// `Σ sigma + boundary_mass`, the total mass of `σγ` on the closure.
    pub fn total_mass(&self) -> f64 {
        self.interior_mass() + self.boundary_mass
    }

    /// Largest `|p_vec| − sigma` over cells.
    pub fn max_p_excess(&self) -> f64 {
        self.sigma
            .iter()
            .zip(&self.p_vec)
            .map(|(s, p)| p.norm() - s)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Density value `sigma / h²` of cell `k`.
    pub fn density(&self, k: usize) -> f64 {
        self.sigma[k] / (self.grid.h * self.grid.h)
    }
}

/// Walks the grid cells crossed by `a → b`, yielding `(cell, t0, t1)`
/// parameter intervals. Cells are half-open; the far grid edges belong to the
/// last row and column.
pub fn walk_segment(grid: &GridSpec, a: Vec2, b: Vec2) -> Result<Vec<(usize, f64, f64)>> {
    for p in [a, b] {
        if !grid.contains(p) {
            return Err(Error::GridTooSmall { x: p.x, y: p.y });
        }
    }
    let mut ts = vec![0.0, 1.0];
    let crossings = |lo: f64, p0: f64, p1: f64, ts: &mut Vec<f64>| {
        if p0 == p1 {
            return;
        }
        let (mn, mx) = (p0.min(p1), p0.max(p1));
        let k0 = ((mn - lo) / grid.h).ceil() as i64;
        let k1 = ((mx - lo) / grid.h).floor() as i64;
        for k in k0..=k1 {
            let line = lo + k as f64 * grid.h;
            let t = (line - p0) / (p1 - p0);
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    };
    crossings(grid.origin.x, a.x, b.x, &mut ts);
    crossings(grid.origin.y, a.y, b.y, &mut ts);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut out = Vec::with_capacity(ts.len());
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let mid = a.lerp(b, 0.5 * (t0 + t1));
        let (ix, iy) = grid
            .locate(mid)
            .ok_or(Error::GridTooSmall { x: mid.x, y: mid.y })?;
        out.push((grid.index(ix, iy), t0, t1));
    }
    Ok(out)
}

fn on_boundary(p: &PlanPair, domain: Option<&ConvexDomain>) -> Option<usize> {
    let d = domain?;
    d.segment_on_edge(p.source.xy, p.target.xy, 1e-9 * d.diameter())
}

const CHUNK: usize = 64;

/// Rasterises `σγ = Σ m·H¹⌞[x, y]` and `pγ = Σ m·(y − x)/|y − x|·H¹⌞[x, y]`
/// onto `grid`. Segments lying on a flat piece of `∂Ω` are accounted in
/// `boundary_mass` instead. Chunks of pairs are walked in parallel and merged
/// in pair order, so the sums match a sequential pass bit for bit.
pub fn rasterize_density(plan: &TransportPlan, grid: &GridSpec, domain: Option<&ConvexDomain>) -> Result<DensityGrid> {
    type Contribution = (usize, f64, Vec2);
    let chunks: Vec<Result<(Vec<Contribution>, f64)>> = plan
        .pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut contrib = Vec::new();
            let mut bmass = 0.0;
            for p in chunk {
                let (a, b) = (p.source.xy, p.target.xy);
                let len = a.dist(b);
                if on_boundary(p, domain).is_some() {
                    for q in [a, b] {
                        if !grid.contains(q) {
                            return Err(Error::GridTooSmall { x: q.x, y: q.y });
                        }
                    }
                    bmass += p.mass * len;
                    continue;
                }
                let dir = b - a;
                for (cell, t0, t1) in walk_segment(grid, a, b)? {
                    let dt = t1 - t0;
                    contrib.push((cell, p.mass * len * dt, dir * (p.mass * dt)));
                }
            }
            Ok((contrib, bmass))
        })
        .collect();
    let mut out = DensityGrid::zeros(*grid);
    for chunk in chunks {
        let (contrib, bmass) = chunk?;
        for (cell, s, pv) in contrib {
            out.sigma[cell] += s;
            out.p_vec[cell] += pv;
        }
        out.boundary_mass += bmass;
    }
    Ok(out)
}

/// `Σ m · H¹([x, y] ∩ ∂Ω)`.
pub fn boundary_mass(plan: &TransportPlan, domain: &ConvexDomain) -> f64 {
    boundary_mass_by_edge(plan, domain).iter().sum()
}

/// Boundary mass per polygon edge (empty for discs).
pub fn boundary_mass_by_edge(plan: &TransportPlan, domain: &ConvexDomain) -> Vec<f64> {
    let mut out = vec![0.0; domain.vertices().map_or(0, <[Vec2]>::len)];
    for p in &plan.pairs {
        if let Some(e) = on_boundary(p, Some(domain)) {
            out[e] += p.mass * p.length();
        }
    }
    out
}

/// The plan split by `(source tag, target tag)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SbvSplit {
    /// Atomic → Atomic.
    pub gamma1: TransportPlan,
    /// Atomic → Diffuse.
    pub gamma2: TransportPlan,
    /// Diffuse → Atomic.
    pub gamma3: TransportPlan,
    /// Diffuse → Diffuse.
    pub gamma4: TransportPlan,
}

impl SbvSplit {
    pub fn fragments(&self) -> [&TransportPlan; 4] {
        [&self.gamma1, &self.gamma2, &self.gamma3, &self.gamma4]
    }

    pub fn costs(&self) -> [f64; 4] {
        self.fragments().map(|g| g.cost)
    }

    /// Segments of the jump-to-jump part.
    pub fn singular_segments(&self) -> Vec<(Vec2, Vec2, f64)> {
        self.gamma1
            .pairs
            .iter()
            .map(|p| (p.source.xy, p.target.xy, p.mass))
            .collect()
    }
}

pub fn sbv_split(plan: &TransportPlan, cost: &CostNorm) -> SbvSplit {
    let pick = |s: AtomTag, t: AtomTag| {
        let pairs: Vec<PlanPair> = plan
            .pairs
            .iter()
            .filter(|p| p.source_tag == s && p.target_tag == t)
            .copied()
            .collect();
        let c = pairs.iter().fold(0.0, |acc, p| acc + p.mass * cost.cost(p.source.xy, p.target.xy));
        let m = pairs.iter().fold(0.0, |acc, p| acc + p.mass);
        TransportPlan {
            pairs,
            cost: c,
            marginals_checksum: (m, m),
            solver_duals: None,
        }
    };
    use AtomTag::{Atomic, Diffuse};
    SbvSplit {
        gamma1: pick(Atomic, Atomic),
        gamma2: pick(Atomic, Diffuse),
        gamma3: pick(Diffuse, Atomic),
        gamma4: pick(Diffuse, Diffuse),
    }
}

/// A union of closed balls removed from norm computations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExcludedRegion {
    pub balls: Vec<(Vec2, f64)>,
}

impl ExcludedRegion {
    pub fn ball(center: Vec2, radius: f64) -> Self {
        ExcludedRegion {
            balls: vec![(center, radius)],
        }
    }

    /// Whether the box `[lo, lo + h]²` meets the region.
    pub fn meets_cell(&self, lo: Vec2, h: f64) -> bool {
        self.balls.iter().any(|&(c, r)| {
            let dx = (lo.x - c.x).max(0.0).max(c.x - (lo.x + h));
            let dy = (lo.y - c.y).max(0.0).max(c.y - (lo.y + h));
            dx * dx + dy * dy <= r * r
        })
    }
}

/// `(‖σ‖_{Lᵖ}, ‖σ‖_{L∞})` of the density `sigma / h²`, skipping cells that
/// meet `excluded`.
pub fn density_norms(grid: &DensityGrid, p: f64, excluded: Option<&ExcludedRegion>) -> Result<(f64, f64)> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("Lᵖ exponent must be at least 1, got {p}")));
    }
    let g = grid.grid;
    let area = g.h * g.h;
    let mut acc = 0.0;
    let mut sup: f64 = 0.0;
    for k in 0..g.len() {
        if let Some(ex) = excluded {
            let (ix, iy) = g.coords(k);
            if ex.meets_cell(g.cell_lower(ix, iy), g.h) {
                continue;
            }
        }
        let d = grid.sigma[k] / area;
        acc += d.powf(p) * area;
        sup = sup.max(d);
    }
    Ok((acc.powf(1.0 / p), sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryMeasurePair;
    use crate::ot::solve_kantorovich;
    use std::f64::consts::PI;

    fn grid4() -> GridSpec {
        GridSpec::new(Vec2::new(-1.0, -1.0), 0.5, 4, 4).unwrap()
    }

    fn axis_plan() -> (BoundaryMeasurePair, TransportPlan) {
        let d = ConvexDomain::unit_disc();
        let mu = BoundaryMeasurePair::from_arc_masses(&d, &[(PI, 1.0)], &[(0.0, 1.0)]).unwrap();
        let plan = solve_kantorovich(&mu, &CostNorm::Euclidean).unwrap();
        (mu, plan)
    }

    #[test]
    fn single_axis_segment() {
        let (_, plan) = axis_plan();
        // grid offset so the segment runs through cell interiors
        let g = GridSpec::new(Vec2::new(-1.0, -0.25), 0.5, 4, 1).unwrap();
        let dg = rasterize_density(&plan, &g, None).unwrap();
        let k = g.index(2, 0);
        assert!((dg.sigma[k] - 0.5).abs() < 1e-15);
        assert!((dg.p_vec[k] - Vec2::new(0.5, 0.0)).norm() < 1e-15);
        assert!((dg.total_mass() - 2.0).abs() < 1e-15);
        let (l1, _) = density_norms(&dg, 1.0, None).unwrap();
        assert!((l1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn segment_on_grid_line_is_counted_once() {
        let (_, plan) = axis_plan();
        let dg = rasterize_density(&plan, &grid4(), None).unwrap();
        assert!((dg.interior_mass() - 2.0).abs() < 1e-15);
        // half-open cells: y = 0 belongs to row 2
        assert!(dg.sigma[grid4().index(0, 2)] > 0.0);
        assert_eq!(dg.sigma[grid4().index(0, 1)], 0.0);
    }

    #[test]
    fn antiparallel_pairs_cancel_in_p() {
        let d = ConvexDomain::unit_disc();
        let mu = BoundaryMeasurePair::from_arc_masses(&d, &[(PI, 1.0)], &[(0.0, 1.0)]).unwrap();
        let mut plan = solve_kantorovich(&mu, &CostNorm::Euclidean).unwrap();
        let mut back = plan.pairs[0];
        std::mem::swap(&mut back.source, &mut back.target);
        plan.pairs.push(back);
        let g = GridSpec::new(Vec2::new(-1.0, -0.25), 0.5, 4, 1).unwrap();
        let dg = rasterize_density(&plan, &g, None).unwrap();
        let k = g.index(1, 0);
        assert!((dg.sigma[k] - 1.0).abs() < 1e-15);
        assert!(dg.p_vec[k].norm() < 1e-15);
        assert!(dg.max_p_excess() <= 1e-12);
    }

    #[test]
    fn grid_too_small() {
        let (_, plan) = axis_plan();
        let g = GridSpec::new(Vec2::new(-0.5, -0.5), 0.25, 4, 4).unwrap();
        assert!(matches!(rasterize_density(&plan, &g, None), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn walking_diagonal_through_corners() {
        let g = grid4();
        let cells = walk_segment(&g, Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0)).unwrap();
        let ids: Vec<usize> = cells.iter().map(|c| c.0).collect();
        assert_eq!(ids, vec![g.index(0, 0), g.index(1, 1), g.index(2, 2), g.index(3, 3)]);
        let total: f64 = cells.iter().map(|c| c.2 - c.1).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_top_edge_boundary_mass() {
        let sq = ConvexDomain::square(Vec2::ZERO, 1.0).unwrap();
        let l = sq.boundary_length();
        let top_right = sq.arc_coordinate(Vec2::new(1.0, 1.0));
        let top_left = sq.arc_coordinate(Vec2::new(-1.0, 1.0));
        assert!(l > 0.0);
        let mu = BoundaryMeasurePair::from_arc_masses(&sq, &[(top_right, 1.0)], &[(top_left, 1.0)]).unwrap();
        let plan = solve_kantorovich(&mu, &CostNorm::Euclidean).unwrap();
        assert!((boundary_mass(&plan, &sq) - 2.0).abs() < 1e-12);
        let by_edge = boundary_mass_by_edge(&plan, &sq);
        assert_eq!(by_edge.iter().filter(|&&m| m > 0.0).count(), 1);
        let g = GridSpec::covering(&sq, 16).unwrap();
        let dg = rasterize_density(&plan, &g, Some(&sq)).unwrap();
        assert!((dg.boundary_mass - 2.0).abs() < 1e-12);
        assert_eq!(dg.interior_mass(), 0.0);
    }

    #[test]
    fn disc_chords_have_no_boundary_mass() {
        let (_, plan) = axis_plan();
        assert_eq!(boundary_mass(&plan, &ConvexDomain::unit_disc()), 0.0);
    }

    #[test]
    fn split_of_pure_jump_plan() {
        let (_, plan) = axis_plan();
        let s = sbv_split(&plan, &CostNorm::Euclidean);
        assert_eq!(s.gamma1.pairs.len(), 1);
        assert!(s.gamma2.pairs.is_empty() && s.gamma3.pairs.is_empty() && s.gamma4.pairs.is_empty());
        assert_eq!(s.costs().iter().sum::<f64>(), plan.cost);
    }

    #[test]
    fn zero_grid_norms() {
        let dg = DensityGrid::zeros(grid4());
        assert_eq!(density_norms(&dg, 2.0, None).unwrap(), (0.0, 0.0));
        assert!(density_norms(&dg, 0.5, None).is_err());
    }

    #[test]
    fn excluded_ball_meets_cells() {
        let ex = ExcludedRegion::ball(Vec2::new(0.0, -1.0), 0.3);
        assert!(ex.meets_cell(Vec2::new(-0.1, -1.1), 0.2));
        assert!(!ex.meets_cell(Vec2::new(0.5, 0.5), 0.2));
    }
}
