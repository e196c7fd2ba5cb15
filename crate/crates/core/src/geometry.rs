//! Convex planar domains: discs and convex polygons.
//!
//! The boundary is parametrised by arc length `s ∈ [0, L)` measured
//! counterclockwise from a reference point (angle 0 for a disc, vertex 0 for
//! a polygon). Every boundary quantity elsewhere in the crate is expressed in
//! this coordinate, so disc and polygon code paths share the measure logic.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3d cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Counterclockwise rotation by π/2.
    #[inline]
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            self
        }
    }

    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Distance from `p` to the closed segment `[a, b]`, together with the
/// closest point.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> (f64, Vec2) {
    let d = b - a;
    let len2 = d.norm_sq();
    let t = if len2 > 0.0 {
        ((p - a).dot(d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = a + d * t;
    (p.dist(q), q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainKind {
    Disc { center: Vec2, radius: f64 },
    Polygon { vertices: Vec<Vec2> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvexityClass {
    StrictlyConvex,
    ConvexNotStrict,
}

/// A point of ∂Ω with its local frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    /// Arc-length coordinate in `[0, L)`.
    pub s: f64,
    pub xy: Vec2,
    /// Unit tangent, counterclockwise orientation.
    pub tangent: Vec2,
    pub inner_normal: Vec2,
}

/// An open bounded convex set Ω ⊂ ℝ², either a disc or a convex polygon.
///
/// Immutable after construction; the polygon's cumulative edge lengths are
/// cached so that `boundary_param` is a binary search.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexDomain {
    kind: DomainKind,
    perimeter: f64,
    /// `edge_start[i]` is the arc coordinate of vertex `i` (polygons only).
    edge_start: Vec<f64>,
}

impl ConvexDomain {
    pub fn disc(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.x.is_finite() || !center.y.is_finite()
        {
            return Err(Error::InvalidDomain(format!(
                "disc radius must be positive and finite, got {radius}"
            )));
        }
        Ok(ConvexDomain {
            kind: DomainKind::Disc { center, radius },
            perimeter: 2.0 * PI * radius,
            edge_start: Vec::new(),
        })
    }

    pub fn unit_disc() -> Self {
        Self::disc(Vec2::ZERO, 1.0).expect("unit disc is valid")
    }

    /// Convex polygon from counterclockwise vertices. Collinear consecutive
    /// vertices, clockwise order and reflex corners are rejected.
    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain(format!(
                "polygon needs at least 3 vertices, got {n}"
            )));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::InvalidDomain("non-finite polygon vertex".into()));
        }
        let scale = vertices
            .iter()
            .flat_map(|v| [v.x.abs(), v.y.abs()])
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut turning = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let e0 = b - a;
            let e1 = c - b;
            if e0.norm() <= 1e-14 * scale {
                return Err(Error::InvalidDomain(format!("repeated vertex at index {i}")));
            }
            let cr = e0.cross(e1);
            if cr.abs() <= 1e-12 * scale * scale {
                return Err(Error::InvalidDomain(format!(
                    "collinear vertices around index {}",
                    (i + 1) % n
                )));
            }
            if cr < 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "polygon is not convex and counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
            turning += cr.atan2(e0.dot(e1));
        }
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidDomain(
                "polygon winds more than once around its interior".into(),
            ));
        }
        let mut edge_start = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            edge_start.push(acc);
            acc += vertices[i].dist(vertices[(i + 1) % n]);
        }
        Ok(ConvexDomain {
            kind: DomainKind::Polygon { vertices },
            perimeter: acc,
            edge_start,
        })
    }

    /// Axis-aligned square `[cx − a, cx + a] × [cy − a, cy + a]` with vertex 0
    /// at the lower right corner.
    pub fn square(center: Vec2, half_side: f64) -> Result<Self> {
        let a = half_side;
        Self::polygon(vec![
            center + Vec2::new(a, -a),
            center + Vec2::new(a, a),
            center + Vec2::new(-a, a),
            center + Vec2::new(-a, -a),
        ])
    }

    pub fn from_kind(kind: DomainKind) -> Result<Self> {
        match kind {
            DomainKind::Disc { center, radius } => Self::disc(center, radius),
            DomainKind::Polygon { vertices } => Self::polygon(vertices),
        }
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn convexity_class(&self) -> ConvexityClass {
        match self.kind {
            DomainKind::Disc { .. } => ConvexityClass::StrictlyConvex,
            DomainKind::Polygon { .. } => ConvexityClass::ConvexNotStrict,
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.convexity_class() == ConvexityClass::StrictlyConvex
    }

    pub fn boundary_length(&self) -> f64 {
        self.perimeter
    }

    /// Disc centre or polygon vertex centroid; the fixed point of `scaled`.
    pub fn center(&self) -> Vec2 {
        match &self.kind {
            DomainKind::Disc { center, .. } => *center,
            DomainKind::Polygon { vertices } => {
                let sum = vertices.iter().fold(Vec2::ZERO, |a, &v| a + v);
                sum / vertices.len() as f64
            }
        }
    }

    pub fn vertices(&self) -> Option<&[Vec2]> {
        match &self.kind {
            DomainKind::Polygon { vertices } => Some(vertices),
            DomainKind::Disc { .. } => None,
        }
    }

    /// Polygon edges `(start, end)`; empty for a disc.
    pub fn edges(&self) -> Vec<(Vec2, Vec2)> {
        match &self.kind {
            DomainKind::Polygon { vertices } => (0..vertices.len())
                .map(|i| (vertices[i], vertices[(i + 1) % vertices.len()]))
                .collect(),
            DomainKind::Disc { .. } => Vec::new(),
        }
    }

    /// Arc coordinates of the polygon vertices (empty for a disc).
    pub fn vertex_coordinates(&self) -> &[f64] {
        &self.edge_start
    }

    /// Index of the polygon edge containing arc coordinate `s` (half-open).
    pub fn edge_index_at(&self, s: f64) -> Option<usize> {
        if self.edge_start.is_empty() {
            return None;
        }
        let s = self.wrap(s);
        let idx = self.edge_start.partition_point(|&e| e <= s);
        Some(idx.saturating_sub(1))
    }

    /// Reduce an arc coordinate into `[0, L)`.
    pub fn wrap(&self, s: f64) -> f64 {
        let l = self.perimeter;
        let mut r = s.rem_euclid(l);
        if r >= l {
            r = 0.0;
        }
        r
    }

    pub fn boundary_param(&self, s: f64) -> BoundaryPoint {
        let s = self.wrap(s);
        match &self.kind {
            DomainKind::Disc { center, radius } => {
                let theta = s / radius;
                let dir = Vec2::from_angle(theta);
                BoundaryPoint {
                    s,
                    xy: *center + dir * *radius,
                    tangent: dir.rot90(),
                    inner_normal: -dir,
                }
            }
            DomainKind::Polygon { vertices } => {
                let i = self.edge_index_at(s).unwrap_or(0);
                let a = vertices[i];
                let b = vertices[(i + 1) % vertices.len()];
                let tangent = (b - a).normalized();
                BoundaryPoint {
                    s,
                    xy: a + tangent * (s - self.edge_start[i]),
                    tangent,
                    inner_normal: tangent.rot90(),
                }
            }
        }
    }

    /// Arc coordinate of a point lying on (or projected onto) ∂Ω.
    pub fn arc_coordinate(&self, p: Vec2) -> f64 {
        match &self.kind {
            DomainKind::Disc { center, radius } => {
                let d = p - *center;
                self.wrap(d.y.atan2(d.x).rem_euclid(2.0 * PI) * radius)
            }
            DomainKind::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = (f64::INFINITY, 0.0);
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let (d, q) = point_segment_distance(p, a, b);
                    if d < best.0 {
                        best = (d, self.edge_start[i] + q.dist(a));
                    }
                }
                self.wrap(best.1)
            }
        }
    }

    /// Signed distance to ∂Ω: negative inside, positive outside.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        match &self.kind {
            DomainKind::Disc { center, radius } => p.dist(*center) - radius,
            DomainKind::Polygon { vertices } => {
                let n = vertices.len();
                let mut inside = true;
                let mut dmin = f64::INFINITY;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    if (b - a).cross(p - a) < 0.0 {
                        inside = false;
                    }
                    dmin = dmin.min(point_segment_distance(p, a, b).0);
                }
                if inside {
                    -dmin
                } else {
                    dmin
                }
            }
        }
    }

    /// Closed-set membership.
    pub fn contains(&self, p: Vec2) -> bool {
        self.signed_distance(p) <= 0.0
    }

    /// Closest point of the closed convex set Ω̄ to `p` (the identity inside).
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        if self.contains(p) {
            return p;
        }
        self.closest_boundary_point(p)
    }

    fn closest_boundary_point(&self, p: Vec2) -> Vec2 {
        match &self.kind {
            DomainKind::Disc { center, radius } => {
                let d = p - *center;
                let n = d.norm();
                if n == 0.0 {
                    *center + Vec2::new(*radius, 0.0)
                } else {
                    *center + d * (radius / n)
                }
            }
            DomainKind::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = (f64::INFINITY, vertices[0]);
                for i in 0..n {
                    let (d, q) = point_segment_distance(p, vertices[i], vertices[(i + 1) % n]);
                    if d < best.0 {
                        best = (d, q);
                    }
                }
                best.1
            }
        }
    }

    /// Orthogonal projection onto the closed convex set for a point outside
    /// or on ∂Ω. Interior points are rejected because their projection is the
    /// point itself, not a boundary point.
    pub fn project_to_boundary(&self, p: Vec2) -> Result<BoundaryPoint> {
        let sd = self.signed_distance(p);
        if sd < -1e-12 * self.diameter().max(1.0) {
            return Err(Error::InteriorPoint { x: p.x, y: p.y });
        }
        let q = self.closest_boundary_point(p);
        let s = self.arc_coordinate(q);
        let mut bp = self.boundary_param(s);
        bp.xy = q;
        Ok(bp)
    }

    pub fn diameter(&self) -> f64 {
        match &self.kind {
            DomainKind::Disc { radius, .. } => 2.0 * radius,
            DomainKind::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        d = d.max(a.dist(*b));
                    }
                }
                d
            }
        }
    }

    pub fn area(&self) -> f64 {
        match &self.kind {
            DomainKind::Disc { radius, .. } => PI * radius * radius,
            DomainKind::Polygon { vertices } => {
                let n = vertices.len();
                0.5 * (0..n)
                    .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
                    .sum::<f64>()
            }
        }
    }

    /// `(min, max)` corners of the axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match &self.kind {
            DomainKind::Disc { center, radius } => (
                *center - Vec2::new(*radius, *radius),
                *center + Vec2::new(*radius, *radius),
            ),
            DomainKind::Polygon { vertices } => {
                let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
                    hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
                }
                (lo, hi)
            }
        }
    }

    /// Homothety about `center()` by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<ConvexDomain> {
        let c = self.center();
        match &self.kind {
            DomainKind::Disc { center, radius } => Self::disc(*center, radius * factor),
            DomainKind::Polygon { vertices } => {
                Self::polygon(vertices.iter().map(|&v| c + (v - c) * factor).collect())
            }
        }
    }

    /// Counterclockwise arc length from `s0` to `s1` (in `[0, L)`).
    pub fn arc_length_between(&self, s0: f64, s1: f64) -> f64 {
        (s1 - s0).rem_euclid(self.perimeter)
    }

    /// `½∮ (x dy − y dx)` along the counterclockwise boundary arc from `s0` to
    /// `s1`. Summed with the chord terms of a closed loop this gives the exact
    /// enclosed area.
    pub fn arc_area_term(&self, s0: f64, s1: f64) -> f64 {
        let len = self.arc_length_between(s0, s1);
        match &self.kind {
            DomainKind::Disc { center, radius } => {
                let a = s0 / radius;
                let b = a + len / radius;
                let r = *radius;
                0.5 * (r * r * (b - a) + r * center.x * (b.sin() - a.sin())
                    - r * center.y * (b.cos() - a.cos()))
            }
            DomainKind::Polygon { .. } => {
                let pts = self.arc_polyline(s0, s1, f64::INFINITY);
                0.5 * pts.windows(2).map(|w| w[0].cross(w[1])).sum::<f64>()
            }
        }
    }

    /// Points along the counterclockwise arc from `s0` to `s1`, including
    /// both ends and every polygon corner in between; disc arcs are sampled
    /// with spacing at most `max_step`.
    pub fn arc_polyline(&self, s0: f64, s1: f64, max_step: f64) -> Vec<Vec2> {
        let len = self.arc_length_between(s0, s1);
        let start = self.boundary_param(s0).xy;
        let mut pts = vec![start];
        match &self.kind {
            DomainKind::Disc { .. } => {
                let steps = if max_step.is_finite() && max_step > 0.0 {
                    ((len / max_step).ceil() as usize).max(1)
                } else {
                    1
                };
                for k in 1..=steps {
                    pts.push(self.boundary_param(s0 + len * k as f64 / steps as f64).xy);
                }
            }
            DomainKind::Polygon { vertices } => {
                let n = vertices.len();
                let mut corners: Vec<(f64, Vec2)> = (0..n)
                    .map(|i| (self.arc_length_between(s0, self.edge_start[i]), vertices[i]))
                    .filter(|&(d, _)| d > 0.0 && d < len)
                    .collect();
                corners.sort_by(|a, b| a.0.total_cmp(&b.0));
                pts.extend(corners.into_iter().map(|(_, v)| v));
                pts.push(self.boundary_param(s0 + len).xy);
            }
        }
        pts
    }

    /// Dense closed polyline of the whole boundary.
    pub fn boundary_polyline(&self, max_step: f64) -> Vec<Vec2> {
        match &self.kind {
            DomainKind::Polygon { vertices } => vertices.clone(),
            DomainKind::Disc { .. } => {
                let steps = ((self.perimeter / max_step).ceil() as usize).max(8);
                (0..steps)
                    .map(|k| self.boundary_param(self.perimeter * k as f64 / steps as f64).xy)
                    .collect()
            }
        }
    }

    /// Distance from `p` to the boundary curve ∂Ω (not to the set).
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        self.signed_distance(p).abs()
    }

    /// Whether the segment `[a, b]` lies along a polygon edge, within
    /// `tol`. Returns the edge index.
    pub fn segment_on_edge(&self, a: Vec2, b: Vec2, tol: f64) -> Option<usize> {
        for (i, (p, q)) in self.edges().into_iter().enumerate() {
            let (da, _) = point_segment_distance(a, p, q);
            let (db, _) = point_segment_distance(b, p, q);
            if da <= tol && db <= tol {
                return Some(i);
            }
        }
        None
    }
}

/// Default sampling step for [`hausdorff_boundary_distance`].
pub const HAUSDORFF_STEP: f64 = 1e-3;

/// Symmetric Hausdorff distance between the boundary curves of two domains.
///
/// Each boundary is sampled with step `HAUSDORFF_STEP` (polygon corners are
/// always included) and the distance of every sample to the other curve is
/// evaluated exactly, so the result is accurate to O(step).
pub fn hausdorff_boundary_distance(a: &ConvexDomain, b: &ConvexDomain) -> f64 {
    hausdorff_boundary_distance_with_step(a, b, HAUSDORFF_STEP)
}

pub fn hausdorff_boundary_distance_with_step(a: &ConvexDomain, b: &ConvexDomain, step: f64) -> f64 {
    let one_sided = |from: &ConvexDomain, to: &ConvexDomain| -> f64 {
        let l = from.boundary_length();
        let n = ((l / step).ceil() as usize).max(16);
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let p = from.boundary_param(l * k as f64 / n as f64).xy;
            worst = worst.max(to.boundary_distance(p));
        }
        if let Some(vs) = from.vertices() {
            for &v in vs {
                worst = worst.max(to.boundary_distance(v));
            }
        }
        worst
    };
    one_sided(a, b).max(one_sided(b, a))
}
