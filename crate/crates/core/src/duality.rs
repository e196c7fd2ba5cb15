//! Kantorovich potentials, their 1-Lipschitz extension and the rotated
//! dual field `z = R_{π/2} ∇φ`.

use rayon::prelude::*;

use crate::boundary::BoundaryMeasurePair;
use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Vec2};
use crate::grid::GridSpec;
use crate::ot::{cost_matrix, CostNorm, TransportPlan};

/// Potential values at the atoms, normalised so the first source is 0.
/// Saturation reads `φ(x) − φ(y) = c(x − y)` on the plan support.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub source_points: Vec<Vec2>,
    pub source_values: Vec<f64>,
    pub target_points: Vec<Vec2>,
    pub target_values: Vec<f64>,
}

impl Potential {
    /// All `(location, value)` pairs, sources first.
    pub fn atoms(&self) -> impl Iterator<Item = (Vec2, f64)> + '_ {
        self.source_points
            .iter()
            .copied()
            .zip(self.source_values.iter().copied())
            .chain(self.target_points.iter().copied().zip(self.target_values.iter().copied()))
    }

    /// Value at an atom location (1e−12 match), if any.
    pub fn value_at(&self, p: Vec2) -> Option<f64> {
        self.atoms()
            .find(|(q, _)| q.dist(p) <= 1e-12 * (1.0 + p.norm()))
            .map(|(_, v)| v)
    }

    pub fn shifted(&self, c: f64) -> Potential {
        Potential {
            source_points: self.source_points.clone(),
            source_values: self.source_values.iter().map(|v| v + c).collect(),
            target_points: self.target_points.clone(),
            target_values: self.target_values.iter().map(|v| v + c).collect(),
        }
    }

    /// Largest violation of `|φ(a) − φ(b)| ≤ c(a − b)` over all atom pairs.
    pub fn lipschitz_violation(&self, cost: &CostNorm) -> f64 {
        let atoms: Vec<(Vec2, f64)> = self.atoms().collect();
        atoms
            .par_iter()
            .enumerate()
            .map(|(k, &(a, fa))| {
                atoms[k + 1..]
                    .iter()
                    .map(|&(b, fb)| (fa - fb).abs() - cost.cost(a, b))
                    .fold(0.0f64, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Dual potentials certifying `plan`: shortest-path distances on the
/// residual graph (forward arcs `i → j` of cost `c_ij`, backward arcs on the
/// support of cost `−c_ij`), followed by a double c-transform.
pub fn dual_potentials(plan: &TransportPlan, mu: &BoundaryMeasurePair, cost: &CostNorm) -> Result<Potential> {
    let (m, n) = (mu.positive().len(), mu.negative().len());
    let source_points: Vec<Vec2> = mu.positive().iter().map(|a| a.point.xy).collect();
    let target_points: Vec<Vec2> = mu.negative().iter().map(|a| a.point.xy).collect();
    if m == 0 || n == 0 {
        return Ok(Potential {
            source_values: vec![0.0; m],
            target_values: vec![0.0; n],
            source_points,
            target_points,
        });
    }
    let c = cost_matrix(mu, cost);
    let cmax = c.iter().flatten().fold(1.0f64, |a, &b| a.max(b));
    let eps = 1e-13 * cmax;
    let mut support: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in &plan.pairs {
        if p.source_index >= m || p.target_index >= n {
            return Err(Error::NotOptimal("plan refers to atoms outside the measure".into()));
        }
        support[p.target_index].push(p.source_index);
    }
    // d[0..m] sources, d[m..] targets; the virtual root reaches all at 0.
    let mut d = vec![0.0f64; m + n];
    let mut converged = false;
    for _ in 0..=(m + n + 1) {
        let mut changed = false;
        for j in 0..n {
            let best = (0..m).map(|i| d[i] + c[i][j]).fold(f64::INFINITY, f64::min);
            if best < d[m + j] - eps {
                d[m + j] = best;
                changed = true;
            }
        }
        for (j, srcs) in support.iter().enumerate() {
            for &i in srcs {
                let cand = d[m + j] - c[i][j];
                if cand < d[i] - eps {
                    d[i] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotOptimal("negative cycle in the residual graph".into()));
    }
    let mut u: Vec<f64> = d[..m].iter().map(|x| -x).collect();
    let mut v: Vec<f64> = d[m..].iter().map(|x| -x).collect();
    // c-transforms: sources φ_i = min_j φ_j + c_ij, targets φ_j = max_i φ_i − c_ij
    for i in 0..m {
        u[i] = (0..n).map(|j| v[j] + c[i][j]).fold(f64::INFINITY, f64::min);
    }
    for j in 0..n {
        v[j] = (0..m).map(|i| u[i] - c[i][j]).fold(f64::NEG_INFINITY, f64::max);
    }
    let shift = u[0];
    u.iter_mut().for_each(|x| *x -= shift);
    v.iter_mut().for_each(|x| *x -= shift);
    let slack_tol = 1e-9 * cmax;
    for p in &plan.pairs {
        let defect = (u[p.source_index] - v[p.target_index] - c[p.source_index][p.target_index]).abs();
        if defect > slack_tol {
            return Err(Error::NotOptimal(format!(
                "complementary slackness fails by {defect:.3e} on pair {} → {}",
                p.source_index, p.target_index
            )));
        }
    }
    Ok(Potential {
        source_points,
        source_values: u,
        target_points,
        target_values: v,
    })
}

/// `|cost − ∫ φ d(f⁺ − f⁻)|`.
pub fn duality_report(plan: &TransportPlan, phi: &Potential, mu: &BoundaryMeasurePair) -> f64 {
    let dual: f64 = mu
        .positive()
        .iter()
        .zip(&phi.source_values)
        .map(|(a, v)| a.mass * v)
        .sum::<f64>()
        - mu.negative().iter().zip(&phi.target_values).map(|(a, v)| a.mass * v).sum::<f64>();
    (plan.cost - dual).abs()
}

/// Largest `|φ(x) − φ(y) − c(x − y)|` over the plan pairs.
pub fn saturation_defect(plan: &TransportPlan, phi: &Potential, cost: &CostNorm) -> f64 {
    plan.pairs
        .iter()
        .map(|p| {
            (phi.source_values[p.source_index] - phi.target_values[p.target_index]
                - cost.cost(p.source.xy, p.target.xy))
            .abs()
        })
        .fold(0.0, f64::max)
}

/// Infimal convolution `φ̂(z) = min_a φ(a) + c(z − a)` over atoms.
#[derive(Clone, Debug)]
pub struct ExtendedPotential {
    atoms: Vec<(Vec2, f64)>,
    cost: CostNorm,
}

impl ExtendedPotential {
    pub fn eval(&self, z: Vec2) -> f64 {
        self.atoms
            .iter()
            .map(|&(a, v)| v + self.cost.eval(z - a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn atoms(&self) -> &[(Vec2, f64)] {
        &self.atoms
    }
}

pub fn extend_potential(phi: &Potential, cost: &CostNorm) -> ExtendedPotential {
    ExtendedPotential {
        atoms: phi.atoms().collect(),
        cost: cost.clone(),
    }
}

/// Cell-centred samples of a scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

pub fn sample_field(grid: &GridSpec, f: impl Fn(Vec2) -> f64 + Sync) -> ScalarGrid {
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (ix, iy) = grid.coords(k);
            f(grid.cell_center(ix, iy))
        })
        .collect();
    ScalarGrid { grid: *grid, values }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZField {
    pub grid: GridSpec,
    pub z: Vec<Vec2>,
    /// Cells whose centre lies in the closed domain.
    pub inside: Vec<bool>,
    /// Cells inside the domain with `‖z‖ > 1 + 1e−6` (kinks of φ̂).
    pub flagged: Vec<usize>,
    pub max_norm: f64,
    /// Largest `|div z|` over inside cells with all four neighbours inside.
    pub max_divergence: f64,
    pub mean_divergence: f64,
}

impl ZField {
    pub fn at_cell(&self, ix: usize, iy: usize) -> Vec2 {
        self.z[self.grid.index(ix, iy)]
    }
}

/// `z = R_{π/2} ∇φ̂` by central differences at cell centres (one-sided on
/// the grid rim), with its norm and discrete divergence diagnostics.
pub fn dual_field_z(phi_hat: &ScalarGrid, domain: Option<&ConvexDomain>) -> ZField {
    let g = phi_hat.grid;
    let f = &phi_hat.values;
    let h = g.h;
    let at = |ix: usize, iy: usize| f[g.index(ix, iy)];
    let deriv = |ix: usize, n: usize, step: &dyn Fn(usize) -> f64| -> f64 {
        if n == 1 {
            0.0
        } else if ix == 0 {
            (step(1) - step(0)) / h
        } else if ix == n - 1 {
            (step(n - 1) - step(n - 2)) / h
        } else {
            (step(ix + 1) - step(ix - 1)) / (2.0 * h)
        }
    };
    let z: Vec<Vec2> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (ix, iy) = g.coords(k);
            let dx = deriv(ix, g.nx, &|x| at(x, iy));
            let dy = deriv(iy, g.ny, &|y| at(ix, y));
            Vec2::new(dx, dy).rot90()
        })
        .collect();
    let inside: Vec<bool> = match domain {
        Some(d) => g.centers().map(|p| d.signed_distance(p) <= 0.0).collect(),
        None => vec![true; g.len()],
    };
    let mut flagged = Vec::new();
    let mut max_norm: f64 = 0.0;
    for k in 0..g.len() {
        if inside[k] {
            let nrm = z[k].norm();
            max_norm = max_norm.max(nrm);
            if nrm > 1.0 + 1e-6 {
                flagged.push(k);
            }
        }
    }
    let mut max_div: f64 = 0.0;
    let mut sum_div = 0.0;
    let mut count = 0usize;
    for iy in 1..g.ny.saturating_sub(1) {
        for ix in 1..g.nx.saturating_sub(1) {
            let ks = [
                g.index(ix, iy),
                g.index(ix - 1, iy),
                g.index(ix + 1, iy),
                g.index(ix, iy - 1),
                g.index(ix, iy + 1),
            ];
            if !ks.iter().all(|&k| inside[k]) {
                continue;
            }
            let div = (z[ks[2]].x - z[ks[1]].x + z[ks[4]].y - z[ks[3]].y) / (2.0 * h);
            max_div = max_div.max(div.abs());
            sum_div += div.abs();
            count += 1;
        }
    }
    ZField {
        grid: g,
        z,
        inside,
        flagged,
        max_norm,
        max_divergence: max_div,
        mean_divergence: if count > 0 { sum_div / count as f64 } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::solve_kantorovich;
    use std::f64::consts::PI;

    fn sharp() -> (BoundaryMeasurePair, TransportPlan) {
        let mu = BoundaryMeasurePair::from_arc_masses(&ConvexDomain::unit_disc(), &[(0.0, 1.0)], &[(PI, 1.0)]).unwrap();
        let plan = solve_kantorovich(&mu, &CostNorm::Euclidean).unwrap();
        (mu, plan)
    }

    #[test]
    fn sharp_potentials() {
        let (mu, plan) = sharp();
        let phi = dual_potentials(&plan, &mu, &CostNorm::Euclidean).unwrap();
        assert_eq!(phi.source_values, vec![0.0]);
        assert!((phi.target_values[0] + 2.0).abs() < 1e-15);
        assert!(duality_report(&plan, &phi, &mu) < 1e-15);
        let ext = extend_potential(&phi, &CostNorm::Euclidean);
        assert!((ext.eval(Vec2::ZERO) + 1.0).abs() < 1e-15);
        assert!((ext.eval(Vec2::new(-1.0, 0.0)) + 2.0).abs() < 1e-15);
        for t in [-0.9, -0.3, 0.2, 0.7] {
            assert!((ext.eval(Vec2::new(t, 0.0)) + (1.0 - t)).abs() < 1e-15);
        }
    }

    #[test]
    fn asymmetric_potentials() {
        let d = ConvexDomain::unit_disc();
        let mu = BoundaryMeasurePair::from_arc_masses(
            &d,
            &[(0.0, 1.0)],
            &[(90f64.to_radians(), 0.4), (210f64.to_radians(), 0.6)],
        )
        .unwrap();
        let plan = solve_kantorovich(&mu, &CostNorm::Euclidean).unwrap();
        let phi = dual_potentials(&plan, &mu, &CostNorm::Euclidean).unwrap();
        assert_eq!(phi.source_values[0], 0.0);
        assert!((phi.target_values[0] + 2f64.sqrt()).abs() < 1e-12);
        assert!((phi.target_values[1] + 2.0 * 105f64.to_radians().sin()).abs() < 1e-12);
        assert!(duality_report(&plan, &phi, &mu) < 1e-12);
        assert!(phi.lipschitz_violation(&CostNorm::Euclidean) <= 1e-12);
    }

    #[test]
    fn suboptimal_plan_is_rejected() {
        let d = ConvexDomain::unit_disc();
        let mu = BoundaryMeasurePair::from_arc_masses(
            &d,
            &[(0.0, 1.0), (PI / 2.0, 1.0)],
            &[(PI, 1.0), (1.5 * PI, 1.0)],
        )
        .unwrap();
        let crossing = TransportPlan::from_flows(&mu, &CostNorm::Euclidean, vec![(0, 0, 1.0), (1, 1, 1.0)], 0.0);
        assert!(matches!(
            dual_potentials(&crossing, &mu, &CostNorm::Euclidean),
            Err(Error::NotOptimal(_))
        ));
    }

    #[test]
    fn constant_field_has_zero_z() {
        let g = GridSpec::new(Vec2::new(-1.0, -1.0), 0.1, 20, 20).unwrap();
        let s = sample_field(&g, |_| 3.0);
        let z = dual_field_z(&s, None);
        assert_eq!(z.max_norm, 0.0);
        assert_eq!(z.max_divergence, 0.0);
    }

    #[test]
    fn sharp_field_on_the_ray() {
        let (mu, plan) = sharp();
        let phi = dual_potentials(&plan, &mu, &CostNorm::Euclidean).unwrap();
        let ext = extend_potential(&phi, &CostNorm::Euclidean);
        let d = ConvexDomain::unit_disc();
        let g = GridSpec::covering(&d, 65).unwrap();
        let s = sample_field(&g, |p| ext.eval(p));
        let z = dual_field_z(&s, Some(&d));
        // the middle row straddles the ray y = 0
        let (_, iy) = g.locate(Vec2::new(0.0, 0.0)).unwrap();
        for ix in 20..45 {
            let v = z.at_cell(ix, iy);
            assert!((v.norm() - 1.0).abs() < 1e-6, "{v:?}");
            assert!(v.x.abs() < 1e-6);
        }
    }

    #[test]
    fn brothers_potential_region() {
        let r = 2f64.sqrt() / 2.0;
        let phi1 = |p: Vec2| -p.y + r;
        let g = GridSpec::new(Vec2::new(0.2, -0.1), 0.01, 20, 20).unwrap();
        let s = sample_field(&g, phi1);
        let z = dual_field_z(&s, None);
        for v in &z.z {
            assert!((v.x - 1.0).abs() < 1e-9 && v.y.abs() < 1e-9);
        }
    }
}
