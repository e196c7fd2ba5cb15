//! Least gradient function rebuilt from a transport plan.
//!
//! The plan's segments are non-crossing chords of Ω. Together with the
//! boundary arcs between consecutive chord endpoints they cut Ω into convex
//! faces; the solution is constant on each face. Faces touching ∂Ω take the
//! boundary value of `g`, enclosed faces the midpoint of their weighted-median
//! interval.

use std::collections::BTreeMap;

use crate::boundary::{AtomTag, BoundaryMeasurePair};
use crate::boundary::BoundaryBV;
use crate::error::{Error, Result};
use crate::fields::boundary_mass;
use crate::geometry::{point_segment_distance, BoundaryPoint, ConvexDomain, Vec2};
use crate::ot::{segment_contact, SegmentContact, TransportPlan};

/// Distance below which a point counts as lying on a chord.
pub const JUMP_SET_TOL: f64 = 1e-9;

/// A merged chord between two plan vertices (`a < b`).
#[derive(Clone, Debug, PartialEq)]
pub struct Chord {
    pub a: usize,
    pub b: usize,
    pub from: Vec2,
    pub to: Vec2,
    /// Mass sent `a → b` minus mass sent `b → a`.
    pub net_mass: f64,
    /// Total mass carried in either direction.
    pub mass: f64,
    pub length: f64,
    /// Face on the side of the ccw arc from `b` back to `a`.
    pub left_face: usize,
    /// Face on the side of the ccw arc from `a` to `b`.
    pub right_face: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Boundary arcs `(s0, s1)`, traversed counterclockwise.
    pub arcs: Vec<(f64, f64)>,
    /// Bounding chords with the sign of the face side:
    /// `+1` if the face lies left of `from → to`.
    pub chords: Vec<(usize, f64)>,
    /// Closed polyline approximating the face boundary (arcs sampled).
    pub outline: Vec<Vec2>,
    pub area: f64,
    bbox: (Vec2, Vec2),
}

impl Face {
    pub fn is_enclosed(&self) -> bool {
        self.arcs.is_empty()
    }
}

/// The planar subdivision of Ω cut out by the plan's chords.
#[derive(Clone, Debug, PartialEq)]
pub struct Arrangement {
    pub domain: ConvexDomain,
    pub vertices: Vec<BoundaryPoint>,
    pub chords: Vec<Chord>,
    pub faces: Vec<Face>,
}

#[derive(Clone, Copy, PartialEq)]
enum Edge {
    Arc(usize),
    ReverseArc(usize),
    Chord(usize, bool),
}

fn first_crossing(segs: &[(Vec2, Vec2)]) -> Option<(usize, usize)> {
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if let SegmentContact::Crossing { .. } = segment_contact(segs[i], segs[j], JUMP_SET_TOL) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Ω as a single face, its boundary split into two half arcs.
fn whole_domain(domain: &ConvexDomain, vertices: Vec<BoundaryPoint>) -> Arrangement {
    let l = domain.boundary_length();
    let outline = domain.boundary_polyline(domain.diameter() * 1e-2);
    Arrangement {
        domain: domain.clone(),
        vertices,
        chords: Vec::new(),
        faces: vec![Face {
            arcs: vec![(0.0, 0.5 * l), (0.5 * l, 0.0)],
            chords: Vec::new(),
            outline,
            area: domain.area(),
            bbox: domain.bounding_box(),
        }],
    }
}

/// Subdivides Ω by the chords of `plan`.
pub fn build_arrangement(plan: &TransportPlan, domain: &ConvexDomain) -> Result<Arrangement> {
    let l = domain.boundary_length();
    let bm = boundary_mass(plan, domain);
    if bm > 0.0 {
        return Err(Error::BoundarySupported { mass: bm });
    }
    let segs: Vec<(Vec2, Vec2)> = plan.pairs.iter().map(|p| (p.source.xy, p.target.xy)).collect();
    if let Some((first, second)) = first_crossing(&segs) {
        return Err(Error::CrossingSegments { first, second });
    }

    // vertices: distinct endpoints by arc coordinate, merged across s = 0
    let tol = 1e-9 * l;
    let mut coords: Vec<f64> = plan
        .pairs
        .iter()
        .flat_map(|p| [domain.wrap(p.source.s), domain.wrap(p.target.s)])
        .collect();
    coords.sort_by(f64::total_cmp);
    let mut vs: Vec<f64> = Vec::new();
    for s in coords {
        if vs.last().map_or(true, |&v| s - v > tol) {
            vs.push(s);
        }
    }
    if vs.len() > 1 && vs[0] + l - vs[vs.len() - 1] <= tol {
        vs.pop();
    }
    let k = vs.len();
    let vertices: Vec<BoundaryPoint> = vs.iter().map(|&s| domain.boundary_param(s)).collect();

    let vertex_of = |s: f64| -> usize {
        let s = domain.wrap(s);
        let mut best = (f64::INFINITY, 0);
        for (i, &v) in vs.iter().enumerate() {
            let d = (s - v).abs().min(l - (s - v).abs());
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    };

    let mut merged: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    for p in &plan.pairs {
        let (x, y) = (vertex_of(p.source.s), vertex_of(p.target.s));
        if x == y {
            continue;
        }
        let (a, b, sign) = if x < y { (x, y, 1.0) } else { (y, x, -1.0) };
        let e = merged.entry((a, b)).or_insert((0.0, 0.0));
        e.0 += sign * p.mass;
        e.1 += p.mass;
    }
    let mut chords: Vec<Chord> = merged
        .into_iter()
        .map(|((a, b), (net, mass))| {
            let (from, to) = (vertices[a].xy, vertices[b].xy);
            Chord {
                a,
                b,
                from,
                to,
                net_mass: net,
                mass,
                length: from.dist(to),
                left_face: usize::MAX,
                right_face: usize::MAX,
            }
        })
        .collect();

    if chords.is_empty() {
        return Ok(whole_domain(domain, vertices));
    }

    // outgoing half-edges per vertex keyed by ccw angular order
    let mut out: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); k];
    for v in 0..k {
        out[v].push((0, Edge::Arc(v)));
        out[v].push((k, Edge::ReverseArc((v + k - 1) % k)));
    }
    for (c, ch) in chords.iter().enumerate() {
        out[ch.a].push(((ch.b + k - ch.a) % k, Edge::Chord(c, true)));
        out[ch.b].push(((ch.a + k - ch.b) % k, Edge::Chord(c, false)));
    }
    for o in &mut out {
        o.sort_by_key(|e| e.0);
    }
    let ends: Vec<(usize, usize)> = chords.iter().map(|c| (c.a, c.b)).collect();
    let head = |e: Edge| -> usize {
        match e {
            Edge::Arc(v) => (v + 1) % k,
            Edge::ReverseArc(v) => v,
            Edge::Chord(c, true) => ends[c].1,
            Edge::Chord(c, false) => ends[c].0,
        }
    };
    let twin = |e: Edge| -> Edge {
        match e {
            Edge::Arc(v) => Edge::ReverseArc(v),
            Edge::ReverseArc(v) => Edge::Arc(v),
            Edge::Chord(c, fwd) => Edge::Chord(c, !fwd),
        }
    };
    let next = |e: Edge| -> Edge {
        let v = head(e);
        let t = twin(e);
        let pos = out[v].iter().position(|x| x.1 == t).expect("twin is an outgoing edge");
        out[v][(pos + out[v].len() - 1) % out[v].len()].1
    };

    let mut visited_arc = vec![false; k];
    let mut visited_chord = vec![[false; 2]; chords.len()];
    let mut faces = Vec::new();
    let mut starts: Vec<Edge> = (0..k).map(Edge::Arc).collect();
    for c in 0..chords.len() {
        starts.push(Edge::Chord(c, true));
        starts.push(Edge::Chord(c, false));
    }
    let step = domain.diameter() * 1e-2;
    for start in starts {
        let seen = match start {
            Edge::Arc(v) => visited_arc[v],
            Edge::Chord(c, fwd) => visited_chord[c][fwd as usize],
            Edge::ReverseArc(_) => true,
        };
        if seen {
            continue;
        }
        let mut e = start;
        let mut loop_edges = Vec::new();
        let mut outer = false;
        loop {
            match e {
                Edge::Arc(v) => visited_arc[v] = true,
                Edge::Chord(c, fwd) => visited_chord[c][fwd as usize] = true,
                Edge::ReverseArc(_) => outer = true,
            }
            loop_edges.push(e);
            e = next(e);
            if e == start || loop_edges.len() > 4 * (k + chords.len()) + 4 {
                break;
            }
        }
        if outer {
            continue;
        }
        let face_id = faces.len();
        let mut arcs = Vec::new();
        let mut fchords = Vec::new();
        let mut outline = Vec::new();
        let mut area = 0.0;
        for &e in &loop_edges {
            match e {
                Edge::Arc(v) => {
                    let (s0, s1) = (vs[v], vs[(v + 1) % k]);
                    arcs.push((s0, s1));
                    area += domain.arc_area_term(s0, s1);
                    let mut pts = domain.arc_polyline(s0, s1, step);
                    pts.pop();
                    outline.extend(pts);
                }
                Edge::Chord(c, fwd) => {
                    let ch = &mut chords[c];
                    let (p, q) = if fwd { (ch.from, ch.to) } else { (ch.to, ch.from) };
                    area += 0.5 * p.cross(q);
                    outline.push(p);
                    if fwd {
                        ch.left_face = face_id;
                    } else {
                        ch.right_face = face_id;
                    }
                    fchords.push((c, if fwd { 1.0 } else { -1.0 }));
                }
                Edge::ReverseArc(_) => unreachable!(),
            }
        }
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &outline {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let pad = 1e-3 * domain.diameter();
        faces.push(Face {
            arcs,
            chords: fchords,
            outline,
            area,
            bbox: (lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad)),
        });
    }
    Ok(Arrangement {
        domain: domain.clone(),
        vertices,
        chords,
        faces,
    })
}

impl Arrangement {
    pub fn area_sum(&self) -> f64 {
        self.faces.iter().map(|f| f.area).sum()
    }

    /// Face containing `p`, or the jump-set / outside refusals.
    pub fn locate(&self, p: Vec2) -> Result<usize> {
        if self.domain.signed_distance(p) > JUMP_SET_TOL {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
        for ch in &self.chords {
            if point_segment_distance(p, ch.from, ch.to).0 < JUMP_SET_TOL {
                return Err(Error::OnJumpSet { x: p.x, y: p.y });
            }
        }
        let mut fallback = None;
        for (i, f) in self.faces.iter().enumerate() {
            let (lo, hi) = f.bbox;
            if p.x < lo.x || p.y < lo.y || p.x > hi.x || p.y > hi.y {
                continue;
            }
            let mut worst = f64::INFINITY;
            for &(c, side) in &f.chords {
                let ch = &self.chords[c];
                let d = side * (ch.to - ch.from).cross(p - ch.from) / ch.length;
                worst = worst.min(d);
            }
            if worst > 0.0 {
                return Ok(i);
            }
            if fallback.map_or(true, |(_, w)| worst > w) {
                fallback = Some((i, worst));
            }
        }
        fallback
            .map(|(i, _)| i)
            .ok_or(Error::OutsideDomain { x: p.x, y: p.y })
    }

    /// Faces adjacent to face `f` across a chord, with the chord length.
    pub fn neighbours(&self, f: usize) -> Vec<(usize, f64)> {
        self.faces[f]
            .chords
            .iter()
            .map(|&(c, side)| {
                let ch = &self.chords[c];
                let other = if side > 0.0 { ch.right_face } else { ch.left_face };
                (other, ch.length)
            })
            .collect()
    }
}

/// Weighted-median interval: all `v` minimising `Σ w·|v − value|`.
pub fn weighted_median_interval(items: &[(f64, f64)]) -> Option<(f64, f64)> {
    let mut xs: Vec<(f64, f64)> = items.iter().copied().filter(|x| x.1 > 0.0).collect();
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = xs.iter().map(|x| x.1).sum();
    let half = 0.5 * total;
    let eps = 1e-12 * total;
    let mut cum = 0.0;
    let mut lo = xs[xs.len() - 1].0;
    for x in &xs {
        cum += x.1;
        if cum >= half - eps {
            lo = x.0;
            break;
        }
    }
    let mut cum = 0.0;
    let mut hi = xs[0].0;
    for x in xs.iter().rev() {
        cum += x.1;
        if cum >= half - eps {
            hi = x.0;
            break;
        }
    }
    Some((lo.min(hi), lo.max(hi)))
}

/// The reconstructed solution: an arrangement with one value per face.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSolution {
    pub arrangement: Arrangement,
    pub values: Vec<f64>,
    /// Feasible interval of each enclosed face (`None` for faces with arcs).
    pub intervals: Vec<Option<(f64, f64)>>,
}

/// The datum seen by the plan: the step function whose jumps are the plan
/// marginals, shifted to have the same boundary mean as `g`. Returned as
/// sorted `(s, cumulative mass)` steps and the shift.
fn lumped_trace(plan: &TransportPlan, domain: &ConvexDomain, g: &BoundaryBV) -> (Vec<(f64, f64)>, f64) {
    let l = domain.boundary_length();
    let mut atoms: Vec<(f64, f64)> = plan
        .pairs
        .iter()
        .flat_map(|p| [(p.source.s, p.mass), (p.target.s, -p.mass)])
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut steps = Vec::with_capacity(atoms.len());
    let mut acc = 0.0;
    let mut integral = 0.0;
    for (s, m) in atoms {
        acc += m;
        integral += m * (l - s);
        steps.push((s, acc));
    }
    let total = g.integral(0.0, 0.5 * l) + g.integral(0.5 * l, l);
    let shift = (total - integral) / l;
    (steps, shift)
}

fn lumped_value(steps: &[(f64, f64)], shift: f64, s: f64) -> f64 {
    let k = steps.partition_point(|st| st.0 <= s);
    shift + if k == 0 { 0.0 } else { steps[k - 1].1 }
}

/// Largest mass of a diffuse atom among the plan marginals.
fn plan_max_diffuse_mass(plan: &TransportPlan) -> f64 {
    let mut src: BTreeMap<usize, f64> = BTreeMap::new();
    let mut dst: BTreeMap<usize, f64> = BTreeMap::new();
    for p in &plan.pairs {
        if p.source_tag == AtomTag::Diffuse {
            *src.entry(p.source_index).or_default() += p.mass;
        }
        if p.target_tag == AtomTag::Diffuse {
            *dst.entry(p.target_index).or_default() += p.mass;
        }
    }
    src.values().chain(dst.values()).fold(0.0, |a, &b| a.max(b))
}

/// Assigns face values from the boundary datum and the plan.
///
/// Faces with boundary arcs take the value of the lumped datum on their arcs:
/// the primitive of the plan marginals, shifted to the boundary mean of `g`.
/// For atomic data this is `g` itself. The samples of `g` on the arcs of a
/// face must agree within twice the largest diffuse atom plus a rounding
/// margin. Enclosed faces take the midpoint of the weighted-median interval
/// of their neighbours' values, weights being chord lengths, working inward
/// from the boundary faces.
pub fn assign_face_values(arr: Arrangement, g: &BoundaryBV, plan: &TransportPlan) -> Result<PlanarSolution> {
    let l = arr.domain.boundary_length();
    if (g.length() - l).abs() > 1e-9 * l {
        return Err(Error::InvalidInput(format!(
            "datum lives on a boundary of length {} but the domain has perimeter {l}",
            g.length()
        )));
    }
    let (gmin, gmax) = g.value_range();
    let tol = 2.0 * plan_max_diffuse_mass(plan) + 1e-9 * (1.0 + gmin.abs().max(gmax.abs()));
    let (steps, shift) = lumped_trace(plan, &arr.domain, g);
    let n = arr.faces.len();
    let mut values: Vec<Option<f64>> = vec![None; n];
    for (i, f) in arr.faces.iter().enumerate() {
        if f.arcs.is_empty() {
            continue;
        }
        let mut total = 0.0;
        let mut len = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(s0, s1) in &f.arcs {
            let a = arr.domain.arc_length_between(s0, s1);
            let m = lumped_value(&steps, shift, arr.domain.wrap(s0 + 0.5 * a));
            total += m * a;
            len += a;
            for v in arc_trace_samples(g, s0, a) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if hi - lo > tol {
            return Err(Error::InconsistentTrace { face: i, spread: hi - lo });
        }
        values[i] = Some(if len > 0.0 { total / len } else { 0.5 * (lo + hi) });
    }
    let mut intervals = vec![None; n];
    loop {
        let mut progress = false;
        for i in 0..n {
            if values[i].is_some() {
                continue;
            }
            let items: Vec<(f64, f64)> = arr
                .neighbours(i)
                .into_iter()
                .filter_map(|(f, w)| values.get(f).copied().flatten().map(|v| (v, w)))
                .collect();
            if let Some((lo, hi)) = weighted_median_interval(&items) {
                intervals[i] = Some((lo, hi));
                values[i] = Some(0.5 * (lo + hi));
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    let values: Vec<f64> = values.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    Ok(PlanarSolution {
        arrangement: arr,
        values,
        intervals,
    })
}

/// One-sided values of `g` at the ends of the arc, its midpoint value and
/// both limits at every jump inside the arc.
fn arc_trace_samples(g: &BoundaryBV, s0: f64, len: f64) -> Vec<f64> {
    let l = g.length();
    let mut out = vec![g.right_limit(s0), g.left_limit(s0 + len), g.value(s0 + 0.5 * len)];
    let eps = 1e-12 * l;
    for j in g.jumps() {
        let off = (j.s - s0).rem_euclid(l);
        if off > eps && off < len - eps {
            out.push(j.left);
            out.push(j.right);
        }
    }
    out
}

/// Arrangement plus face values in one step. Refuses plans that charge the
/// boundary.
pub fn reconstruct(
    plan: &TransportPlan,
    mu: &BoundaryMeasurePair,
    domain: &ConvexDomain,
    g: &BoundaryBV,
) -> Result<PlanarSolution> {
    let arr = build_arrangement(plan, domain)?;
    if !mu.is_empty() && (plan.total_mass() - mu.total_mass()).abs() > 1e-9 * mu.total_mass() {
        return Err(Error::InvalidInput("plan does not transport the given measure".into()));
    }
    assign_face_values(arr, g, plan)
}

impl PlanarSolution {
    pub fn evaluate(&self, p: Vec2) -> Result<f64> {
        Ok(self.values[self.arrangement.locate(p)?])
    }

    /// `|value(left) − value(right)|` across each chord.
    pub fn chord_jumps(&self) -> Vec<f64> {
        self.arrangement
            .chords
            .iter()
            .map(|c| {
                let a = self.values.get(c.left_face).copied().unwrap_or(0.0);
                let b = self.values.get(c.right_face).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .collect()
    }

    /// `Σ |jump| · length` over chords.
    pub fn total_variation(&self) -> f64 {
        self.chord_jumps()
            .iter()
            .zip(&self.arrangement.chords)
            .map(|(j, c)| j * c.length)
            .sum()
    }

    pub fn enclosed_faces(&self) -> Vec<usize> {
        (0..self.arrangement.faces.len())
            .filter(|&i| self.arrangement.faces[i].is_enclosed())
            .collect()
    }
}

pub fn evaluate_u(sol: &PlanarSolution, p: Vec2) -> Result<f64> {
    sol.evaluate(p)
}

pub fn total_variation_solution(sol: &PlanarSolution) -> f64 {
    sol.total_variation()
}

/// `c + Σ m·χ(R(x → y))` over the plan pairs, `R(x → y)` being the part of Ω
/// between the chord and the counterclockwise arc from `x` to `y`.
pub fn explicit_superposition(plan: &TransportPlan, base: f64, p: Vec2) -> f64 {
    plan.pairs
        .iter()
        .filter(|q| (q.target.xy - q.source.xy).cross(p - q.source.xy) < 0.0)
        .map(|q| q.mass)
        .sum::<f64>()
        + base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::{solve_kantorovich, CostNorm};
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn sharp() -> (BoundaryMeasurePair, TransportPlan, BoundaryBV) {
        let g = BoundaryBV::piecewise_constant(TAU, &[(0.0, 1.0), (PI, 0.0)]).unwrap();
        let d = ConvexDomain::unit_disc();
        let f = crate::boundary::tangential_derivative(&g);
        let mu = crate::boundary::discretize(&f, &d, 1).unwrap();
        let plan = solve_kantorovich(&mu, &CostNorm::Euclidean).unwrap();
        (mu, plan, g)
    }

    #[test]
    fn one_chord_two_faces() {
        let (_, plan, _) = sharp();
        let arr = build_arrangement(&plan, &ConvexDomain::unit_disc()).unwrap();
        assert_eq!(arr.faces.len(), 2);
        assert!(arr.faces.iter().all(|f| f.arcs.len() == 1));
        assert!((arr.area_sum() - PI).abs() < 1e-12);
        for f in &arr.faces {
            assert!((f.area - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sharp_solution() {
        let (mu, plan, g) = sharp();
        let d = ConvexDomain::unit_disc();
        let sol = reconstruct(&plan, &mu, &d, &g).unwrap();
        assert_eq!(sol.evaluate(Vec2::new(0.0, 0.5)).unwrap(), 1.0);
        assert_eq!(sol.evaluate(Vec2::new(0.0, -0.5)).unwrap(), 0.0);
        assert!((sol.total_variation() - 2.0).abs() < 1e-12);
        assert!(matches!(sol.evaluate(Vec2::new(0.3, 0.0)), Err(Error::OnJumpSet { .. })));
        assert!(matches!(sol.evaluate(Vec2::new(2.0, 0.0)), Err(Error::OutsideDomain { .. })));
        // the superposition formula with base 0 reproduces u
        for p in [Vec2::new(0.2, 0.4), Vec2::new(-0.5, -0.1)] {
            assert_eq!(explicit_superposition(&plan, 0.0, p), sol.evaluate(p).unwrap());
        }
    }

    #[test]
    fn empty_plan_single_face() {
        let d = ConvexDomain::unit_disc();
        let arr = build_arrangement(&TransportPlan::empty(), &d).unwrap();
        assert_eq!(arr.faces.len(), 1);
        let sol = assign_face_values(arr, &BoundaryBV::constant(TAU, 3.5), &TransportPlan::empty()).unwrap();
        assert!((sol.evaluate(Vec2::new(0.1, 0.2)).unwrap() - 3.5).abs() < 1e-12);
        assert_eq!(sol.total_variation(), 0.0);
    }

    /// Jump part of the second Brothers datum: ±1 on the four quarter arcs
    /// centred at the axes, jumps at the diagonal points, each side of the
    /// inscribed square carrying mass 1.
    fn brothers_jump_part() -> (TransportPlan, BoundaryBV) {
        let q = PI / 4.0;
        let g = BoundaryBV::piecewise_constant(
            TAU,
            &[(0.0, 1.0), (q, -1.0), (3.0 * q, 1.0), (5.0 * q, -1.0), (7.0 * q, 1.0)],
        )
        .unwrap();
        let d = ConvexDomain::unit_disc();
        let mu = BoundaryMeasurePair::from_arc_masses(&d, &[(3.0 * q, 2.0), (7.0 * q, 2.0)], &[(q, 2.0), (5.0 * q, 2.0)])
            .unwrap();
        let plan = TransportPlan::from_flows(
            &mu,
            &CostNorm::Euclidean,
            vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)],
            0.0,
        );
        (plan, g)
    }

    #[test]
    fn brothers_square_is_enclosed() {
        let (plan, g) = brothers_jump_part();
        let d = ConvexDomain::unit_disc();
        assert!((plan.cost - 4.0 * 2f64.sqrt()).abs() < 1e-12);
        let arr = build_arrangement(&plan, &d).unwrap();
        assert_eq!(arr.faces.len(), 5);
        assert!((arr.area_sum() - PI).abs() < 1e-12);
        let sol = assign_face_values(arr, &g, &plan).unwrap();
        let enclosed = sol.enclosed_faces();
        assert_eq!(enclosed.len(), 1);
        assert_eq!(sol.intervals[enclosed[0]], Some((-1.0, 1.0)));
        assert_eq!(sol.values[enclosed[0]], 0.0);
        assert!((sol.arrangement.faces[enclosed[0]].area - 2.0).abs() < 1e-12);
        assert_eq!(sol.evaluate(Vec2::new(0.9, 0.0)).unwrap(), 1.0);
        assert_eq!(sol.evaluate(Vec2::new(0.0, 0.9)).unwrap(), -1.0);
        assert_eq!(sol.evaluate(Vec2::new(0.1, 0.1)).unwrap(), 0.0);
        assert!((sol.total_variation() - 4.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn crossing_plan_is_refused() {
        let d = ConvexDomain::unit_disc();
        let mu = BoundaryMeasurePair::from_arc_masses(&d, &[(0.0, 1.0), (PI / 2.0, 1.0)], &[(PI, 1.0), (1.5 * PI, 1.0)])
            .unwrap();
        let plan = TransportPlan::from_flows(&mu, &CostNorm::Euclidean, vec![(0, 0, 1.0), (1, 1, 1.0)], 0.0);
        assert!(matches!(build_arrangement(&plan, &d), Err(Error::CrossingSegments { .. })));
    }

    #[test]
    fn inconsistent_trace_is_reported() {
        let (_, plan, _) = sharp();
        let d = ConvexDomain::unit_disc();
        let arr = build_arrangement(&plan, &d).unwrap();
        let g = BoundaryBV::piecewise_constant(TAU, &[(0.0, 1.0), (1.0, 2.0), (PI, 0.0)]).unwrap();
        assert!(matches!(assign_face_values(arr, &g, &plan), Err(Error::InconsistentTrace { .. })));
    }

    #[test]
    fn median_intervals() {
        assert_eq!(weighted_median_interval(&[(1.0, 1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)]), Some((-1.0, 1.0)));
        assert_eq!(weighted_median_interval(&[(1.0, 3.0), (-1.0, 1.0)]), Some((1.0, 1.0)));
        assert_eq!(weighted_median_interval(&[(0.0, 1.0), (2.0, 1.0), (5.0, 1.0)]), Some((2.0, 2.0)));
        assert_eq!(weighted_median_interval(&[]), None);
    }

    #[test]
    fn fan_of_chords_from_one_atom() {
        let d = ConvexDomain::unit_disc();
        let mu = BoundaryMeasurePair::from_arc_masses(
            &d,
            &[(0.0, 1.0)],
            &[(2.0, 0.3), (3.0, 0.3), (4.0, 0.4)],
        )
        .unwrap();
        let plan = solve_kantorovich(&mu, &CostNorm::Euclidean).unwrap();
        let arr = build_arrangement(&plan, &d).unwrap();
        assert_eq!(arr.faces.len(), 4);
        assert!((arr.area_sum() - PI).abs() < 1e-12);
        let g = BoundaryBV::step_function(TAU, &mu.signed_atoms(), 0.0).unwrap();
        let sol = assign_face_values(arr, &g, &plan).unwrap();
        assert!((sol.total_variation() - plan.cost).abs() < 1e-12);
    }
}
