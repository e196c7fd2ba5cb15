//! Stability experiments, the polygon monotonicity check and reference data.

mod brothers;
mod suite;

pub use brothers::{brothers_g1, brothers_g2, brothers_reference, BrothersCase, BrothersValue, BROTHERS_U1_TV, BROTHERS_U2_TV};
pub use suite::{random_small_measures, random_suite, Preset, SuiteInstance, DEFAULT_NODES};

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{discretize, rescale_to_tv, tangential_derivative, total_variation_boundary, BoundaryBV, BoundaryMeasurePair, PieceShape};
use crate::error::{Error, Result};
use crate::fields::{boundary_mass, boundary_mass_by_edge};
use crate::geometry::{ConvexDomain, DomainKind, Vec2};
use crate::grid::GridSpec;
use crate::ot::{solve_kantorovich, CostNorm, TransportPlan};
use crate::reconstruct::{reconstruct, PlanarSolution};

/// Measure, optimal plan and reconstruction for one datum.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub mu: BoundaryMeasurePair,
    pub plan: TransportPlan,
    pub solution: PlanarSolution,
}

/// Discretises `∂τ g` and solves the Euclidean transport problem.
pub fn solve_datum(domain: &ConvexDomain, g: &BoundaryBV, n_diffuse: usize) -> Result<(BoundaryMeasurePair, TransportPlan)> {
    let mu = discretize(&tangential_derivative(g), domain, n_diffuse)?;
    let plan = solve_kantorovich(&mu, &CostNorm::Euclidean)?;
    Ok((mu, plan))
}

pub fn run_pipeline(domain: &ConvexDomain, g: &BoundaryBV, n_diffuse: usize) -> Result<Pipeline> {
    let (mu, plan) = solve_datum(domain, g, n_diffuse)?;
    let solution = reconstruct(&plan, &mu, domain, g)?;
    Ok(Pipeline { mu, plan, solution })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilityOptions {
    /// Side of the square evaluation grid.
    pub eval_grid: usize,
    /// Relative slack of the non-increasing verdicts.
    pub slack: f64,
    pub n_diffuse: usize,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            eval_grid: 256,
            slack: 0.1,
            n_diffuse: 1,
        }
    }
}

/// What the approximations are compared against in `run_data_stability`.
pub enum StabilityReference<'a> {
    /// The reconstruction at the finest level of the schedule.
    Finest,
    /// A closed-form solution and its total variation. Points where `u`
    /// fails (case boundaries) are skipped.
    Exact {
        u: &'a (dyn Fn(Vec2) -> Result<f64> + Sync),
        total_variation: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityKind {
    Data,
    Domain,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRecord {
    /// Quantisation level `n`, or the dilation `ε`.
    pub step: f64,
    /// `|Dg_n|` of the datum actually solved.
    pub datum_variation: f64,
    pub cost: f64,
    /// Total variation of `u_n`, restricted to Ω for domain runs.
    pub total_variation: f64,
    pub l1_distance: f64,
    pub tv_gap: f64,
    /// Evaluation points entering the L¹ sum.
    pub evaluated_points: usize,
}

/// Exactness checks of a domain approximation step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityDefects {
    pub step: f64,
    /// `| |Dg_n|(∂Ω_n) − |Dg|(∂Ω) |`.
    pub variation: f64,
    /// Largest distance between a projected atom of `f_n` and the matching atom of `f`.
    pub pushforward_position: f64,
    pub pushforward_mass: f64,
    pub atom_counts_match: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilityVerdicts {
    pub l1_non_increasing: bool,
    pub tv_gap_non_increasing: bool,
    /// Strictly decreasing until the distance reaches zero.
    pub l1_strictly_decreasing: bool,
    /// Last TV gap divided by the reference total variation.
    pub final_tv_gap_relative: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilityTolerances {
    pub slack: f64,
    pub zero_floor: f64,
    pub identity: f64,
    pub eval_grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub kind: StabilityKind,
    /// `finest`, `exact` or `direct`.
    pub reference: String,
    pub reference_total_variation: f64,
    pub records: Vec<StabilityRecord>,
    pub identities: Vec<IdentityDefects>,
    pub verdicts: StabilityVerdicts,
    pub tolerances: StabilityTolerances,
}

const ZERO_FLOOR: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-12;

impl StabilityReport {
    pub fn identities_hold(&self) -> bool {
        let tv = self.reference_total_variation.max(1.0);
        self.identities.iter().all(|d| {
            d.atom_counts_match
                && d.variation <= IDENTITY_TOL * tv
                && d.pushforward_position <= IDENTITY_TOL * tv
                && d.pushforward_mass <= IDENTITY_TOL * tv
        })
    }
}

fn non_increasing(seq: &[f64], slack: f64) -> bool {
    seq.windows(2).all(|w| w[1] <= (1.0 + slack) * w[0] + ZERO_FLOOR)
}

fn strictly_decreasing(seq: &[f64]) -> bool {
    seq.windows(2).all(|w| w[1] < w[0] || (w[0] <= ZERO_FLOOR && w[1] <= ZERO_FLOOR))
}

fn verdicts(records: &[StabilityRecord], reference_tv: f64, slack: f64) -> StabilityVerdicts {
    let l1: Vec<f64> = records.iter().map(|r| r.l1_distance).collect();
    let gaps: Vec<f64> = records.iter().map(|r| r.tv_gap).collect();
    let last = gaps.last().copied().unwrap_or(0.0);
    StabilityVerdicts {
        l1_non_increasing: non_increasing(&l1, slack),
        tv_gap_non_increasing: non_increasing(&gaps, slack),
        l1_strictly_decreasing: strictly_decreasing(&l1),
        final_tv_gap_relative: if reference_tv > 0.0 { last / reference_tv } else { last },
    }
}

/// Values of `u` at the evaluation grid cell centres inside Ω; `None`
/// outside Ω and where `u` is undefined.
fn sample_on_grid(grid: &GridSpec, domain: &ConvexDomain, u: impl Fn(Vec2) -> Result<f64> + Sync) -> Vec<Option<f64>> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (ix, iy) = grid.coords(k);
            let p = grid.cell_center(ix, iy);
            if domain.signed_distance(p) >= 0.0 {
                return None;
            }
            u(p).ok()
        })
        .collect()
}

fn l1_distance(a: &[Option<f64>], b: &[Option<f64>], h: f64) -> (f64, usize) {
    let mut sum = 0.0;
    let mut count = 0;
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            sum += (x - y).abs();
            count += 1;
        }
    }
    (sum * h * h, count)
}

fn check_schedule_increasing(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "schedule must be a nonempty increasing list of positive levels, got {schedule:?}"
        )));
    }
    Ok(())
}

/// Data stability: each level `n` quantises `g` to `n` values, rescales it to
/// the total variation of `g`, solves and reconstructs, and compares with the
/// reference on a fixed grid clipped to Ω.
pub fn run_data_stability(
    domain: &ConvexDomain,
    g: &BoundaryBV,
    schedule: &[usize],
    reference: StabilityReference<'_>,
    options: StabilityOptions,
) -> Result<StabilityReport> {
    check_schedule_increasing(schedule)?;
    let grid = GridSpec::covering(domain, options.eval_grid)?;
    let tv = total_variation_boundary(g);

    struct Level {
        samples: Vec<Option<f64>>,
        datum_variation: f64,
        cost: f64,
        total_variation: f64,
    }
    let levels: Vec<Level> = schedule
        .par_iter()
        .map(|&n| -> Result<Level> {
            if tv == 0.0 {
                let c = g.value(0.0);
                return Ok(Level {
                    samples: sample_on_grid(&grid, domain, |_| Ok(c)),
                    datum_variation: 0.0,
                    cost: 0.0,
                    total_variation: 0.0,
                });
            }
            let gn = rescale_to_tv(&g.quantized(n)?, tv)?;
            let run = run_pipeline(domain, &gn, options.n_diffuse)?;
            Ok(Level {
                samples: sample_on_grid(&grid, domain, |p| run.solution.evaluate(p)),
                datum_variation: total_variation_boundary(&gn),
                cost: run.plan.cost,
                total_variation: run.solution.total_variation(),
            })
        })
        .collect::<Result<_>>()?;

    let (label, ref_samples, ref_tv) = match reference {
        StabilityReference::Finest => {
            let last = levels.last().expect("schedule is nonempty");
            ("finest", last.samples.clone(), last.total_variation)
        }
        StabilityReference::Exact { u, total_variation } => ("exact", sample_on_grid(&grid, domain, u), total_variation),
    };
    let records: Vec<StabilityRecord> = schedule
        .iter()
        .zip(&levels)
        .map(|(&n, lv)| {
            let (l1, count) = l1_distance(&lv.samples, &ref_samples, grid.h);
            StabilityRecord {
                step: n as f64,
                datum_variation: lv.datum_variation,
                cost: lv.cost,
                total_variation: lv.total_variation,
                l1_distance: l1,
                tv_gap: (lv.total_variation - ref_tv).abs(),
                evaluated_points: count,
            }
        })
        .collect();
    Ok(StabilityReport {
        kind: StabilityKind::Data,
        reference: label.into(),
        reference_total_variation: ref_tv,
        verdicts: verdicts(&records, ref_tv, options.slack),
        records,
        identities: Vec::new(),
        tolerances: StabilityTolerances {
            slack: options.slack,
            zero_floor: ZERO_FLOOR,
            identity: IDENTITY_TOL,
            eval_grid: options.eval_grid,
        },
    })
}

/// Length of the part of the segment `[a, b]` inside the domain.
fn clipped_length(domain: &ConvexDomain, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    match domain.kind() {
        DomainKind::Disc { center, radius } => {
            let f = a - *center;
            let qa = d.norm_sq();
            if qa == 0.0 {
                return 0.0;
            }
            let qb = 2.0 * f.dot(d);
            let qc = f.norm_sq() - radius * radius;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc <= 0.0 {
                return 0.0;
            }
            let r = disc.sqrt();
            t0 = t0.max((-qb - r) / (2.0 * qa));
            t1 = t1.min((-qb + r) / (2.0 * qa));
        }
        DomainKind::Polygon { .. } => {
            for (p, q) in domain.edges() {
                // inside: cross(q − p, x − p) ≥ 0
                let e = q - p;
                let num = e.cross(a - p);
                let den = e.cross(d);
                if den == 0.0 {
                    if num < 0.0 {
                        return 0.0;
                    }
                } else if den > 0.0 {
                    t0 = t0.max(-num / den);
                } else {
                    t1 = t1.min(-num / den);
                }
            }
        }
    }
    (t1 - t0).max(0.0) * d.norm()
}

/// Total variation of `sol` inside `domain`, chords clipped to it.
pub fn restricted_total_variation(sol: &PlanarSolution, domain: &ConvexDomain) -> f64 {
    sol.chord_jumps()
        .iter()
        .zip(&sol.arrangement.chords)
        .map(|(j, c)| j.abs() * clipped_length(domain, c.from, c.to))
        .sum()
}

/// Outer domain approximation: for each `ε`, solves on `(1+ε)Ω` with the
/// radially transported datum, restricts `u_n` to Ω and compares it with the
/// direct solution on Ω. Also records the variation and pushforward
/// identities of every step.
pub fn run_domain_approx(domain: &ConvexDomain, g: &BoundaryBV, eps_schedule: &[f64], options: StabilityOptions) -> Result<StabilityReport> {
    if !domain.is_strictly_convex() || !matches!(domain.kind(), DomainKind::Disc { .. }) {
        return Err(Error::NotStrictlyConvex);
    }
    if eps_schedule.is_empty()
        || eps_schedule.iter().any(|e| !(e.is_finite() && *e >= 0.0))
        || eps_schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidInput(format!(
            "epsilon schedule must be a nonempty decreasing list of nonnegative numbers, got {eps_schedule:?}"
        )));
    }
    let grid = GridSpec::covering(domain, options.eval_grid)?;
    let tv = total_variation_boundary(g);
    let direct = run_pipeline(domain, g, options.n_diffuse)?;
    let direct_samples = sample_on_grid(&grid, domain, |p| direct.solution.evaluate(p));
    let ref_tv = direct.solution.total_variation();

    let steps: Vec<(StabilityRecord, IdentityDefects)> = eps_schedule
        .par_iter()
        .map(|&eps| -> Result<_> {
            let outer = domain.scaled(1.0 + eps)?;
            let gn = g.reparametrized(outer.boundary_length())?;
            let datum_variation = total_variation_boundary(&gn);
            let mu_n = discretize(&tangential_derivative(&gn), &outer, options.n_diffuse)?;

            let pairs = [(mu_n.positive(), direct.mu.positive()), (mu_n.negative(), direct.mu.negative())];
            let atom_counts_match = pairs.iter().all(|(a, b)| a.len() == b.len());
            let (mut pos_defect, mut mass_defect) = (0.0f64, 0.0f64);
            for (outer_atoms, atoms) in pairs {
                for (an, a) in outer_atoms.iter().zip(atoms) {
                    let projected = domain.project_to_boundary(an.point.xy)?.xy;
                    pos_defect = pos_defect.max(projected.dist(a.point.xy));
                    mass_defect = mass_defect.max((an.mass - a.mass).abs());
                }
            }

            let plan = solve_kantorovich(&mu_n, &CostNorm::Euclidean)?;
            let sol = reconstruct(&plan, &mu_n, &outer, &gn)?;
            let samples = sample_on_grid(&grid, domain, |p| sol.evaluate(p));
            let (l1, count) = l1_distance(&samples, &direct_samples, grid.h);
            let restricted_tv = restricted_total_variation(&sol, domain);
            Ok((
                StabilityRecord {
                    step: eps,
                    datum_variation,
                    cost: plan.cost,
                    total_variation: restricted_tv,
                    l1_distance: l1,
                    tv_gap: (restricted_tv - ref_tv).abs(),
                    evaluated_points: count,
                },
                IdentityDefects {
                    step: eps,
                    variation: (datum_variation - tv).abs(),
                    pushforward_position: pos_defect,
                    pushforward_mass: mass_defect,
                    atom_counts_match,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let (records, identities): (Vec<_>, Vec<_>) = steps.into_iter().unzip();
    Ok(StabilityReport {
        kind: StabilityKind::Domain,
        reference: "direct".into(),
        reference_total_variation: ref_tv,
        verdicts: verdicts(&records, ref_tv, options.slack),
        records,
        identities,
        tolerances: StabilityTolerances {
            slack: options.slack,
            zero_floor: ZERO_FLOOR,
            identity: IDENTITY_TOL,
            eval_grid: options.eval_grid,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MonotoneOutcome {
    /// The plan leaves the boundary alone and `u` was reconstructed.
    Solved { total_variation: f64 },
    /// The plan charges edge `edge` with mass `mass`.
    NoSolution { edge: usize, mass: f64 },
    /// The pipeline stopped early.
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneVerdict {
    pub discontinuous_vertices: Vec<usize>,
    pub non_monotone_edges: Vec<usize>,
    pub boundary_mass: f64,
    pub boundary_mass_by_edge: Vec<f64>,
    pub outcome: MonotoneOutcome,
}

impl MonotoneVerdict {
    /// Continuous at the vertices and monotone along every edge.
    pub fn hypothesis_holds(&self) -> bool {
        self.discontinuous_vertices.is_empty() && self.non_monotone_edges.is_empty()
    }

    pub fn solution_exists(&self) -> bool {
        matches!(self.outcome, MonotoneOutcome::Solved { .. })
    }

    pub fn message(&self) -> String {
        match &self.outcome {
            MonotoneOutcome::Solved { total_variation } => format!(
                "least gradient solution reconstructed (total variation {total_variation:.6}, boundary mass {:.1})",
                self.boundary_mass
            ),
            MonotoneOutcome::NoSolution { edge, mass } => {
                format!("no least gradient solution: boundary mass {mass:.1} on edge l{edge}")
            }
            MonotoneOutcome::Failed { reason } => format!("pipeline failed: {reason}"),
        }
    }
}

/// Values of `g` along `[s0, s1]` in order: the good representatives at the
/// ends and every node, piece end and one-sided limit in between.
fn edge_profile(g: &BoundaryBV, s0: f64, s1: f64) -> Vec<f64> {
    let tol = 1e-12 * g.length();
    let inside = |s: f64| s > s0 + tol && s < s1 - tol;
    let mut pts: Vec<(f64, f64)> = vec![(s0, g.value(s0))];
    for p in g.pieces() {
        if p.to <= s0 || p.from >= s1 {
            continue;
        }
        let mid = 0.5 * (p.from.max(s0) + p.to.min(s1));
        pts.push((mid, p.value_at(mid)));
        let nodes: Vec<f64> = match &p.shape {
            PieceShape::Constant(_) => vec![p.from, p.to],
            PieceShape::Samples(vs) => {
                let n = vs.len();
                (0..n).map(|k| p.from + (p.to - p.from) * k as f64 / (n - 1) as f64).collect()
            }
        };
        for s in nodes {
            if inside(s) {
                if (s - p.from).abs() <= tol || (s - p.to).abs() <= tol {
                    pts.push((s, g.left_limit(s)));
                    pts.push((s, g.right_limit(s)));
                } else {
                    pts.push((s, p.value_at(s)));
                }
            }
        }
    }
    pts.push((s1, g.value(s1)));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.into_iter().map(|p| p.1).collect()
}

fn is_monotone(vals: &[f64], tol: f64) -> bool {
    let up = vals.windows(2).all(|w| w[1] >= w[0] - tol);
    let down = vals.windows(2).all(|w| w[1] <= w[0] + tol);
    up || down
}

/// Checks continuity at the vertices and monotonicity along each edge, then
/// solves anyway: a plan charging an edge means no solution exists.
pub fn check_monotone_polygon(domain: &ConvexDomain, g: &BoundaryBV, n_diffuse: usize) -> Result<MonotoneVerdict> {
    if !matches!(domain.kind(), DomainKind::Polygon { .. }) {
        return Err(Error::InvalidDomain("monotonicity check needs a polygon".into()));
    }
    let (lo, hi) = g.value_range();
    let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let starts = domain.vertex_coordinates().to_vec();
    let l = domain.boundary_length();
    let discontinuous_vertices = starts
        .iter()
        .enumerate()
        .filter(|(_, &s)| (g.right_limit(s) - g.left_limit(s)).abs() > tol)
        .map(|(i, _)| i)
        .collect();
    let non_monotone_edges = (0..starts.len())
        .filter(|&i| {
            let s1 = starts.get(i + 1).copied().unwrap_or(l);
            !is_monotone(&edge_profile(g, starts[i], s1), tol)
        })
        .collect();

    let mut verdict = MonotoneVerdict {
        discontinuous_vertices,
        non_monotone_edges,
        boundary_mass: 0.0,
        boundary_mass_by_edge: vec![0.0; starts.len()],
        outcome: MonotoneOutcome::Failed { reason: String::new() },
    };
    let (mu, plan) = match solve_datum(domain, g, n_diffuse) {
        Ok(r) => r,
        Err(Error::ZeroMeasure) => {
            verdict.outcome = MonotoneOutcome::Solved { total_variation: 0.0 };
            return Ok(verdict);
        }
        Err(e) => {
            verdict.outcome = MonotoneOutcome::Failed { reason: e.to_string() };
            return Ok(verdict);
        }
    };
    verdict.boundary_mass = boundary_mass(&plan, domain);
    verdict.boundary_mass_by_edge = boundary_mass_by_edge(&plan, domain);
    if verdict.boundary_mass > 0.0 {
        let (edge, mass) = verdict
            .boundary_mass_by_edge
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |best, (i, m)| if m > best.1 { (i, m) } else { best });
        verdict.outcome = MonotoneOutcome::NoSolution { edge, mass };
        return Ok(verdict);
    }
    verdict.outcome = match reconstruct(&plan, &mu, domain, g) {
        Ok(sol) => MonotoneOutcome::Solved {
            total_variation: sol.total_variation(),
        },
        Err(e) => MonotoneOutcome::Failed { reason: e.to_string() },
    };
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quick() -> StabilityOptions {
        StabilityOptions {
            eval_grid: 64,
            ..StabilityOptions::default()
        }
    }

    #[test]
    fn constant_datum_is_stable() {
        let d = ConvexDomain::unit_disc();
        let g = BoundaryBV::constant(2.0 * PI, 0.7);
        let r = run_data_stability(&d, &g, &[2, 4, 8], StabilityReference::Finest, quick()).unwrap();
        assert!(r.records.iter().all(|x| x.l1_distance == 0.0 && x.tv_gap == 0.0));
        assert!(r.verdicts.l1_non_increasing && r.verdicts.l1_strictly_decreasing);
    }

    #[test]
    fn step_datum_is_a_fixed_point() {
        let (d, g) = Preset::Sharp.build(DEFAULT_NODES).unwrap();
        let r = run_data_stability(&d, &g, &[3, 5, 9], StabilityReference::Finest, quick()).unwrap();
        for rec in &r.records {
            assert_eq!(rec.l1_distance, 0.0);
            assert!((rec.total_variation - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_validated() {
        let (d, g) = Preset::Sharp.build(DEFAULT_NODES).unwrap();
        assert!(run_data_stability(&d, &g, &[4, 2], StabilityReference::Finest, quick()).is_err());
        assert!(run_domain_approx(&d, &g, &[0.1, 0.2], quick()).is_err());
    }

    #[test]
    fn domain_approx_identity_step() {
        let (d, g) = Preset::Sharp.build(DEFAULT_NODES).unwrap();
        let r = run_domain_approx(&d, &g, &[0.3, 0.1, 0.0], quick()).unwrap();
        assert!(r.identities_hold());
        for rec in &r.records {
            assert_eq!(rec.l1_distance, 0.0);
            assert!((rec.total_variation - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polygon_refused_by_domain_approx() {
        let (d, g) = Preset::SquareLinear.build(2).unwrap();
        assert!(matches!(run_domain_approx(&d, &g, &[0.1], quick()), Err(Error::NotStrictlyConvex)));
    }

    #[test]
    fn monotone_dichotomy() {
        let (d, g) = Preset::SquareTopEdge.build(2).unwrap();
        let v = check_monotone_polygon(&d, &g, 4).unwrap();
        assert!(!v.hypothesis_holds());
        assert_eq!(v.non_monotone_edges, vec![1]);
        assert!((v.boundary_mass - 2.0).abs() < 1e-12);
        assert!(v.message().contains("no least gradient solution: boundary mass 2.0 on edge l"));

        let (d, g) = Preset::SquareLinear.build(2).unwrap();
        let v = check_monotone_polygon(&d, &g, 8).unwrap();
        assert!(v.hypothesis_holds());
        assert_eq!(v.boundary_mass, 0.0);
        match v.outcome {
            MonotoneOutcome::Solved { total_variation } => assert!((total_variation - 4.0).abs() < 0.2, "{total_variation}"),
            other => panic!("{other:?}"),
        }

        let g = BoundaryBV::constant(8.0, 1.5);
        let v = check_monotone_polygon(&d, &g, 2).unwrap();
        assert!(v.hypothesis_holds() && v.solution_exists());
    }

    #[test]
    fn clipping() {
        let d = ConvexDomain::unit_disc();
        let len = clipped_length(&d, Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0));
        assert!((len - 2.0).abs() < 1e-15);
        let sq = ConvexDomain::square(Vec2::ZERO, 1.0).unwrap();
        let len = clipped_length(&sq, Vec2::new(-3.0, 0.5), Vec2::new(0.0, 0.5));
        assert!((len - 1.0).abs() < 1e-15);
        assert_eq!(clipped_length(&sq, Vec2::new(2.0, 2.0), Vec2::new(3.0, 2.0)), 0.0);
    }
}
