//! Named datasets and seeded random instances.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boundary::{Atom, AtomTag, BoundaryBV, BoundaryMeasurePair};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, ConvexDomain, Vec2};

use super::brothers::{brothers_g1, brothers_g2};

/// Sample count used for the smooth presets on the unit circle.
pub const DEFAULT_NODES: usize = 7201;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Unit disc, `g = χ_{y>0}`: a single chord from `(1,0)` to `(−1,0)`.
    Sharp,
    /// Unit disc, `g = cos 2θ`.
    Cos2Theta,
    /// Unit disc, the discontinuous Brothers datum.
    BrothersG2,
    /// Square `[−1,1]²`, `g = 1` on the top edge and 0 elsewhere.
    SquareTopEdge,
    /// Square `[−1,1]²`, `g(x, y) = x`.
    SquareLinear,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Sharp,
        Preset::Cos2Theta,
        Preset::BrothersG2,
        Preset::SquareTopEdge,
        Preset::SquareLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Sharp => "sharp",
            Preset::Cos2Theta => "cos2theta",
            Preset::BrothersG2 => "brothers-g2",
            Preset::SquareTopEdge => "square-top-edge",
            Preset::SquareLinear => "square-linear",
        }
    }

    pub fn from_name(name: &str) -> Result<Preset> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown preset `{name}`")))
    }

    /// Domain and datum; `nodes` is the sample count of smooth data.
    pub fn build(self, nodes: usize) -> Result<(ConvexDomain, BoundaryBV)> {
        let disc = ConvexDomain::unit_disc();
        let square = || ConvexDomain::square(Vec2::ZERO, 1.0);
        Ok(match self {
            Preset::Sharp => (disc, BoundaryBV::piecewise_constant(2.0 * PI, &[(0.0, 1.0), (PI, 0.0)])?),
            Preset::Cos2Theta => (disc, brothers_g1(nodes)?),
            Preset::BrothersG2 => (disc, brothers_g2(nodes.div_ceil(4).max(2))?),
            Preset::SquareTopEdge => (square()?, BoundaryBV::piecewise_constant(8.0, &[(0.0, 0.0), (2.0, 1.0), (4.0, 0.0)])?),
            Preset::SquareLinear => {
                let d = square()?;
                let breaks = d.vertex_coordinates().to_vec();
                let g = BoundaryBV::from_fn(8.0, &breaks, 2, |_, s| d.boundary_param(s).xy.x)?;
                (d, g)
            }
        })
    }
}

/// A randomly generated problem: domain, datum and diffuse resolution.
#[derive(Clone, Debug)]
pub struct SuiteInstance {
    pub index: usize,
    pub domain: ConvexDomain,
    pub g: BoundaryBV,
    pub n_diffuse: usize,
}

fn random_domain(rng: &mut ChaCha8Rng) -> Result<ConvexDomain> {
    let center = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let radius = rng.gen_range(0.5..2.0);
    if rng.gen_bool(0.5) {
        return ConvexDomain::disc(center, radius);
    }
    // Vertices on a circle with bounded angular gaps, so the centre stays inside.
    let k = rng.gen_range(3..=8usize);
    let base = 2.0 * PI / k as f64;
    let phase = rng.gen_range(0.0..2.0 * PI);
    let vertices = (0..k)
        .map(|i| {
            let t = phase + base * (i as f64 + rng.gen_range(-0.3..0.3));
            center + Vec2::from_angle(t) * radius
        })
        .collect();
    ConvexDomain::polygon(vertices)
}

/// Sorted random positions in `(0, length)`, one per equal slot.
fn spread_positions(rng: &mut ChaCha8Rng, count: usize, length: f64) -> Vec<f64> {
    let slot = length / count as f64;
    (0..count)
        .map(|i| slot * (i as f64 + rng.gen_range(0.1..0.9)))
        .collect()
}

fn random_instance(rng: &mut ChaCha8Rng, index: usize) -> Result<SuiteInstance> {
    let domain = random_domain(rng)?;
    let l = domain.boundary_length();
    let jumps = rng.gen_range(2..=10usize);
    let mut breaks = vec![0.0];
    breaks.extend(spread_positions(rng, jumps - 1, l));
    let levels: Vec<f64> = (0..breaks.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let smooth = rng.gen_bool(0.5);
    let (g, n_diffuse) = if smooth {
        let amp = rng.gen_range(0.1..0.8);
        let freq = rng.gen_range(1..=2) as f64;
        let shift = rng.gen_range(0.0..2.0 * PI);
        let g = BoundaryBV::from_fn(l, &breaks, 65, |k, s| levels[k] + amp * (2.0 * PI * freq * s / l + shift).cos())?;
        (g, rng.gen_range(1..=3usize))
    } else {
        let steps: Vec<(f64, f64)> = breaks.iter().copied().zip(levels.iter().copied()).collect();
        (BoundaryBV::piecewise_constant(l, &steps)?, 1)
    };
    Ok(SuiteInstance {
        index,
        domain,
        g,
        n_diffuse,
    })
}

/// `count` reproducible instances on random discs and convex polygons.
/// Data are step functions with 2 to 10 jumps, half of them with a smooth
/// oscillation added; the discretised measures have at most 40 atoms per side.
pub fn random_suite(seed: u64, count: usize) -> Result<Vec<SuiteInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_instance(&mut rng, i)).collect()
}

/// `count` small balanced measures (1 to `max_atoms` atoms per side) on
/// random domains.
pub fn random_small_measures(seed: u64, count: usize, max_atoms: usize) -> Result<Vec<(ConvexDomain, BoundaryMeasurePair)>> {
    if max_atoms == 0 {
        return Err(Error::InvalidInput("need at least one atom per side".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let domain = random_domain(&mut rng)?;
            let l = domain.boundary_length();
            let m = rng.gen_range(1..=max_atoms);
            let n = rng.gen_range(1..=max_atoms);
            let mut side = |count: usize| -> Vec<(BoundaryPoint, f64)> {
                (0..count)
                    .map(|_| (domain.boundary_param(rng.gen_range(0.0..l)), rng.gen_range(0.1..1.0)))
                    .collect()
            };
            let pos = side(m);
            let neg = side(n);
            let total: f64 = pos.iter().map(|a| a.1).sum();
            let neg_total: f64 = neg.iter().map(|a| a.1).sum();
            let atom = |(point, mass): (BoundaryPoint, f64)| Atom {
                point,
                mass,
                tag: AtomTag::Atomic,
            };
            let positive = pos.into_iter().map(atom).collect();
            let negative = neg.into_iter().map(|(p, w)| atom((p, w * total / neg_total))).collect();
            Ok((domain, BoundaryMeasurePair::new(positive, negative)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{discretize, tangential_derivative};

    #[test]
    fn presets_build() {
        for p in Preset::ALL {
            let (d, g) = p.build(721).unwrap();
            assert!((g.length() - d.boundary_length()).abs() < 1e-12);
            assert_eq!(Preset::from_name(p.name()).unwrap(), p);
        }
        assert!(Preset::from_name("nope").is_err());
    }

    #[test]
    fn suite_is_reproducible_and_small() {
        let a = random_suite(7, 40).unwrap();
        let b = random_suite(7, 40).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.g, y.g);
            let mu = discretize(&tangential_derivative(&x.g), &x.domain, x.n_diffuse).unwrap();
            assert!(mu.positive().len() <= 40 && mu.negative().len() <= 40);
        }
    }

    #[test]
    fn small_measures_respect_bound() {
        for (_, mu) in random_small_measures(3, 50, 6).unwrap() {
            assert!((1..=6).contains(&mu.positive().len()));
            assert!((1..=6).contains(&mu.negative().len()));
        }
    }
}
