//! Closed-form solutions for the Brothers data on the unit disc.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use serde::Serialize;

use crate::boundary::BoundaryBV;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

const CASE_TOL: f64 = 1e-12;

/// Total variation of the continuous solution `u1`, equal to the transport
/// cost of `∂τ g1`.
pub const BROTHERS_U1_TV: f64 = 16.0 / (3.0 * std::f64::consts::SQRT_2);

/// Total variation shared by every `u_λ`: the continuous part of `u1` plus
/// the four jumps on the sides of the central square.
pub const BROTHERS_U2_TV: f64 = BROTHERS_U1_TV + 4.0 * std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BrothersCase {
    /// Solution for `g1 = x² − y²`.
    U1,
    /// The Euler–Lagrange field `z̄ = −z` for `g1`, with the diagonal choice
    /// in the central square.
    Z1,
    /// Kantorovich potential for `∂τ g1`, minimum value zero.
    Phi1,
    /// The solution `u_λ` for the discontinuous datum `g2`, `λ ∈ [−1, 1]`.
    U2(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BrothersValue {
    Scalar(f64),
    Vector(Vec2),
}

impl BrothersValue {
    pub fn scalar(self) -> Option<f64> {
        match self {
            BrothersValue::Scalar(v) => Some(v),
            BrothersValue::Vector(_) => None,
        }
    }

    pub fn vector(self) -> Option<Vec2> {
        match self {
            BrothersValue::Vector(v) => Some(v),
            BrothersValue::Scalar(_) => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Quadrant {
    Right,
    Top,
    Left,
    Bottom,
}

fn quadrant(p: Vec2) -> Result<Quadrant> {
    if (p.x.abs() - p.y.abs()).abs() <= CASE_TOL {
        return Err(Error::OnCaseBoundary { x: p.x, y: p.y });
    }
    Ok(if p.x.abs() > p.y.abs() {
        if p.x > 0.0 {
            Quadrant::Right
        } else {
            Quadrant::Left
        }
    } else if p.y > 0.0 {
        Quadrant::Top
    } else {
        Quadrant::Bottom
    })
}

/// 0 in the central square, 1 in the side caps `|x| > √2/2`, 2 in the caps
/// `|y| > √2/2`.
fn band(p: Vec2) -> Result<u8> {
    if (p.x.abs() - FRAC_1_SQRT_2).abs() <= CASE_TOL || (p.y.abs() - FRAC_1_SQRT_2).abs() <= CASE_TOL {
        return Err(Error::OnCaseBoundary { x: p.x, y: p.y });
    }
    Ok(if p.x.abs() > FRAC_1_SQRT_2 {
        1
    } else if p.y.abs() > FRAC_1_SQRT_2 {
        2
    } else {
        0
    })
}

pub fn brothers_reference(which: BrothersCase, p: Vec2) -> Result<BrothersValue> {
    if !(p.x.is_finite() && p.y.is_finite()) || p.norm() > 1.0 + CASE_TOL {
        return Err(Error::OutsideDomain { x: p.x, y: p.y });
    }
    let r = FRAC_1_SQRT_2;
    Ok(match which {
        BrothersCase::U1 => BrothersValue::Scalar(match band(p)? {
            1 => 2.0 * p.x * p.x - 1.0,
            2 => 1.0 - 2.0 * p.y * p.y,
            _ => 0.0,
        }),
        BrothersCase::U2(lambda) => {
            if !(-1.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidInput(format!("lambda must lie in [-1, 1], got {lambda}")));
            }
            BrothersValue::Scalar(match band(p)? {
                1 => 2.0 * p.x * p.x,
                2 => -2.0 * p.y * p.y,
                _ => lambda,
            })
        }
        BrothersCase::Phi1 => BrothersValue::Scalar(match quadrant(p)? {
            Quadrant::Right => -p.y + r,
            Quadrant::Top => -p.x + r,
            Quadrant::Left => p.y + r,
            Quadrant::Bottom => p.x + r,
        }),
        BrothersCase::Z1 => BrothersValue::Vector(match quadrant(p)? {
            Quadrant::Right => Vec2::new(1.0, 0.0),
            Quadrant::Top => Vec2::new(0.0, -1.0),
            Quadrant::Left => Vec2::new(-1.0, 0.0),
            Quadrant::Bottom => Vec2::new(0.0, 1.0),
        }),
    })
}

/// `g1(θ) = cos 2θ` sampled at `nodes` points on the unit circle.
pub fn brothers_g1(nodes: usize) -> Result<BoundaryBV> {
    BoundaryBV::from_fn(2.0 * PI, &[0.0], nodes, |_, s| (2.0 * s).cos())
}

/// `g2 = x² − y² ± 1`: `+1` on the caps around `θ = 0, π`, `−1` around
/// `θ = ±π/2`, with `nodes` samples per piece.
pub fn brothers_g2(nodes: usize) -> Result<BoundaryBV> {
    let breaks = [0.0, FRAC_PI_4, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4, 7.0 * FRAC_PI_4];
    BoundaryBV::from_fn(2.0 * PI, &breaks, nodes, |k, s| {
        let shift = if k % 2 == 0 { 1.0 } else { -1.0 };
        (2.0 * s).cos() + shift
    })
}
