//! BV functions on ∂Ω and the boundary measures derived from them.
//!
//! A [`BoundaryBV`] is a finite list of pieces partitioning `[0, L)`. A piece
//! is either constant or the piecewise-linear interpolant of samples taken at
//! a uniform sub-grid (both endpoints included). Jumps sit at piece
//! endpoints and are derived from the one-sided limits of adjacent pieces;
//! the good representative at a jump is the mean of the two limits.
//!
//! The tangential derivative of such a datum is exact: one atom per jump and a
//! piecewise-constant density per sampled piece.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, ConvexDomain};

/// Relative tolerance below which two one-sided limits count as equal.
const CONTINUITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum PieceShape {
    Constant(f64),
    /// Values at `n ≥ 2` uniform nodes from `from` to `to` inclusive.
    Samples(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub from: f64,
    pub to: f64,
    pub shape: PieceShape,
}

impl Piece {
    pub fn constant(from: f64, to: f64, value: f64) -> Self {
        Piece {
            from,
            to,
            shape: PieceShape::Constant(value),
        }
    }

    pub fn samples(from: f64, to: f64, values: Vec<f64>) -> Self {
        Piece {
            from,
            to,
            shape: PieceShape::Samples(values),
        }
    }

    fn step(&self, n: usize) -> f64 {
        (self.to - self.from) / (n - 1) as f64
    }

    pub fn start_value(&self) -> f64 {
        match &self.shape {
            PieceShape::Constant(v) => *v,
            PieceShape::Samples(vs) => vs[0],
        }
    }

    pub fn end_value(&self) -> f64 {
        match &self.shape {
            PieceShape::Constant(v) => *v,
            PieceShape::Samples(vs) => vs[vs.len() - 1],
        }
    }

    /// Interpolated value at `s`, clamped to the piece.
    pub fn value_at(&self, s: f64) -> f64 {
        match &self.shape {
            PieceShape::Constant(v) => *v,
            PieceShape::Samples(vs) => {
                let h = self.step(vs.len());
                let t = ((s - self.from) / h).clamp(0.0, (vs.len() - 1) as f64);
                let k = (t.floor() as usize).min(vs.len() - 2);
                let f = t - k as f64;
                vs[k] + (vs[k + 1] - vs[k]) * f
            }
        }
    }

    pub fn variation(&self) -> f64 {
        match &self.shape {
            PieceShape::Constant(_) => 0.0,
            PieceShape::Samples(vs) => vs.windows(2).map(|w| (w[1] - w[0]).abs()).sum(),
        }
    }

    /// Exact integral of the piece over `[a, b] ∩ [from, to]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let a = a.max(self.from);
        let b = b.min(self.to);
        if b <= a {
            return 0.0;
        }
        match &self.shape {
            PieceShape::Constant(v) => v * (b - a),
            PieceShape::Samples(vs) => {
                let h = self.step(vs.len());
                let mut total = 0.0;
                for k in 0..vs.len() - 1 {
                    let lo = (self.from + k as f64 * h).max(a);
                    let hi = (self.from + (k + 1) as f64 * h).min(b);
                    if hi > lo {
                        total += 0.5 * (self.value_at(lo) + self.value_at(hi)) * (hi - lo);
                    }
                }
                total
            }
        }
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> Piece {
        let shape = match &self.shape {
            PieceShape::Constant(v) => PieceShape::Constant(f(*v)),
            PieceShape::Samples(vs) => PieceShape::Samples(vs.iter().map(|&v| f(v)).collect()),
        };
        Piece {
            from: self.from,
            to: self.to,
            shape,
        }
    }
}

/// A jump of the datum at arc coordinate `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub s: f64,
    pub left: f64,
    pub right: f64,
}

impl Jump {
    pub fn height(&self) -> f64 {
        self.right - self.left
    }

    /// Good representative: the mean of the one-sided limits.
    pub fn representative(&self) -> f64 {
        0.5 * (self.left + self.right)
    }
}

/// A BV function on the boundary of a domain of perimeter `length`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryBV {
    length: f64,
    pieces: Vec<Piece>,
    jumps: Vec<Jump>,
}

impl BoundaryBV {
    /// Validates that the pieces partition `[0, length)` and derives the jump
    /// list from the one-sided limits.
    pub fn new(length: f64, mut pieces: Vec<Piece>) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidDatum(format!("boundary length must be positive, got {length}")));
        }
        if pieces.is_empty() {
            return Err(Error::InvalidDatum("no pieces".into()));
        }
        let tol = 1e-9 * length;
        for (i, p) in pieces.iter().enumerate() {
            if !(p.to > p.from) {
                return Err(Error::InvalidDatum(format!("piece {i} has empty interval [{}, {})", p.from, p.to)));
            }
            match &p.shape {
                PieceShape::Constant(v) if !v.is_finite() => {
                    return Err(Error::InvalidDatum(format!("piece {i} has a non-finite value")));
                }
                PieceShape::Samples(vs) if vs.len() < 2 => {
                    return Err(Error::InvalidDatum(format!("piece {i} needs at least two samples")));
                }
                PieceShape::Samples(vs) if vs.iter().any(|v| !v.is_finite()) => {
                    return Err(Error::InvalidDatum(format!("piece {i} has a non-finite sample")));
                }
                _ => {}
            }
        }
        if pieces[0].from.abs() > tol {
            return Err(Error::InvalidDatum("first piece must start at 0".into()));
        }
        pieces[0].from = 0.0;
        for i in 1..pieces.len() {
            if (pieces[i].from - pieces[i - 1].to).abs() > tol {
                return Err(Error::InvalidDatum(format!(
                    "pieces {} and {i} are not contiguous ({} vs {})",
                    i - 1,
                    pieces[i - 1].to,
                    pieces[i].from
                )));
            }
            pieces[i].from = pieces[i - 1].to;
        }
        let last = pieces.len() - 1;
        if (pieces[last].to - length).abs() > tol {
            return Err(Error::InvalidDatum(format!(
                "pieces end at {} but the boundary length is {length}",
                pieces[last].to
            )));
        }
        pieces[last].to = length;

        let scale = pieces
            .iter()
            .map(|p| p.start_value().abs().max(p.end_value().abs()))
            .fold(1.0f64, f64::max);
        let mut jumps = Vec::new();
        let n = pieces.len();
        for i in 0..n {
            let prev = &pieces[(i + n - 1) % n];
            let cur = &pieces[i];
            let (left, right) = (prev.end_value(), cur.start_value());
            if (left - right).abs() > CONTINUITY_TOL * scale {
                jumps.push(Jump {
                    s: cur.from,
                    left,
                    right,
                });
            }
        }
        Ok(BoundaryBV {
            length,
            pieces,
            jumps,
        })
    }

    /// As [`BoundaryBV::new`], additionally checking an explicitly supplied
    /// jump list against the derived one.
    pub fn with_jumps(length: f64, pieces: Vec<Piece>, jumps: &[Jump]) -> Result<Self> {
        let g = Self::new(length, pieces)?;
        let tol = 1e-9 * length;
        for j in jumps {
            let s = j.s.rem_euclid(length);
            let found = g
                .jumps
                .iter()
                .find(|d| (d.s - s).abs() <= tol || (length - (d.s - s).abs()) <= tol);
            let ok = match found {
                Some(d) => {
                    let sc = 1.0 + d.left.abs() + d.right.abs();
                    (d.left - j.left).abs() <= 1e-9 * sc && (d.right - j.right).abs() <= 1e-9 * sc
                }
                None => (j.left - j.right).abs() <= 1e-12 * (1.0 + j.left.abs()),
            };
            if !ok {
                return Err(Error::InvalidDatum(format!(
                    "declared jump at s = {} ({} -> {}) does not match the piece limits",
                    j.s, j.left, j.right
                )));
            }
        }
        if g.jumps.len() > jumps.len() && !jumps.is_empty() {
            return Err(Error::InvalidDatum(format!(
                "pieces imply {} jumps but only {} were declared",
                g.jumps.len(),
                jumps.len()
            )));
        }
        Ok(g)
    }

    pub fn constant(length: f64, value: f64) -> Self {
        Self::new(length, vec![Piece::constant(0.0, length, value)]).expect("constant datum is valid")
    }

    /// Piecewise-constant datum: `steps[k] = (from_k, value_k)` with
    /// `from_0 = 0`; piece `k` ends where the next one starts.
    pub fn piecewise_constant(length: f64, steps: &[(f64, f64)]) -> Result<Self> {
        let pieces = steps
            .iter()
            .enumerate()
            .map(|(k, &(from, v))| {
                let to = steps.get(k + 1).map_or(length, |n| n.0);
                Piece::constant(from, to, v)
            })
            .collect();
        Self::new(length, pieces)
    }

    /// Sampled datum with pieces starting at `breaks` (first break 0). Piece
    /// `k` is sampled from `f(k, s)` at `nodes` uniform points including both
    /// endpoints, so `f(k, ·)` supplies the one-sided limits at the breaks.
    pub fn from_fn(length: f64, breaks: &[f64], nodes: usize, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidDatum("need at least two nodes per piece".into()));
        }
        let pieces = breaks
            .iter()
            .enumerate()
            .map(|(k, &from)| {
                let to = breaks.get(k + 1).copied().unwrap_or(length);
                let vals = (0..nodes)
                    .map(|j| {
                        let s = if j == nodes - 1 {
                            to
                        } else {
                            from + (to - from) * j as f64 / (nodes - 1) as f64
                        };
                        f(k, s)
                    })
                    .collect();
                Piece::samples(from, to, vals)
            })
            .collect();
        Self::new(length, pieces)
    }

    /// Piecewise-constant primitive of a list of signed atoms `(s, mass)`,
    /// taking the value `base` just after `s = 0`. The masses must sum to
    /// zero for the result to close up at `s = L`.
    pub fn step_function(length: f64, atoms: &[(f64, f64)], base: f64) -> Result<Self> {
        let mut sorted: Vec<(f64, f64)> = atoms
            .iter()
            .map(|&(s, m)| (s.rem_euclid(length), m))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let tol = 1e-12 * length;
        let mut steps = vec![(0.0, base)];
        let mut value = base;
        for (s, m) in sorted {
            if s <= tol {
                continue;
            }
            value += m;
            let last = steps.last_mut().expect("nonempty");
            if (s - last.0).abs() <= tol {
                last.1 = value;
            } else {
                steps.push((s, value));
            }
        }
        Self::piecewise_constant(length, &steps)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    fn piece_index(&self, s: f64) -> usize {
        let idx = self.pieces.partition_point(|p| p.from <= s);
        idx.saturating_sub(1)
    }

    fn jump_at(&self, s: f64) -> Option<&Jump> {
        let tol = 1e-12 * self.length;
        self.jumps.iter().find(|j| {
            let d = (j.s - s).abs();
            d <= tol || (self.length - d) <= tol
        })
    }

    /// The good representative at `s` (mean of one-sided limits at jumps).
    pub fn value(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        if let Some(j) = self.jump_at(s) {
            return j.representative();
        }
        self.pieces[self.piece_index(s)].value_at(s)
    }

    pub fn right_limit(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        if let Some(j) = self.jump_at(s) {
            return j.right;
        }
        self.pieces[self.piece_index(s)].value_at(s)
    }

    pub fn left_limit(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        if let Some(j) = self.jump_at(s) {
            return j.left;
        }
        self.pieces[self.piece_index(s)].value_at(s)
    }

    /// Integral of `g` over the counterclockwise arc from `s0` to `s1`.
    pub fn integral(&self, s0: f64, s1: f64) -> f64 {
        let l = self.length;
        let a = s0.rem_euclid(l);
        let len = (s1 - s0).rem_euclid(l);
        let over = |lo: f64, hi: f64| -> f64 { self.pieces.iter().map(|p| p.integral(lo, hi)).sum() };
        if a + len <= l {
            over(a, a + len)
        } else {
            over(a, l) + over(0.0, a + len - l)
        }
    }

    /// Mean value over the counterclockwise arc from `s0` to `s1`.
    pub fn mean_over_arc(&self, s0: f64, s1: f64) -> f64 {
        let len = (s1 - s0).rem_euclid(self.length);
        if len <= 1e-15 * self.length {
            return self.value(s0);
        }
        self.integral(s0, s1) / len
    }

    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.pieces {
            match &p.shape {
                PieceShape::Constant(v) => {
                    lo = lo.min(*v);
                    hi = hi.max(*v);
                }
                PieceShape::Samples(vs) => {
                    for &v in vs {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
        }
        (lo, hi)
    }

    /// Pointwise multiple `factor · g`.
    pub fn scaled(&self, factor: f64) -> BoundaryBV {
        let pieces = self.pieces.iter().map(|p| p.map_values(|v| v * factor)).collect();
        BoundaryBV::new(self.length, pieces).expect("scaling preserves validity")
    }

    /// `g + c`.
    pub fn shifted(&self, c: f64) -> BoundaryBV {
        let pieces = self.pieces.iter().map(|p| p.map_values(|v| v + c)).collect();
        BoundaryBV::new(self.length, pieces).expect("shifting preserves validity")
    }

    /// The same values on a boundary of a different length, with arc
    /// coordinates rescaled by `new_length / length`. For a homothetic copy of
    /// a disc this is `g ∘ π` with π the radial projection.
    pub fn reparametrized(&self, new_length: f64) -> Result<BoundaryBV> {
        let k = new_length / self.length;
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                from: p.from * k,
                to: p.to * k,
                shape: p.shape.clone(),
            })
            .collect();
        BoundaryBV::new(new_length, pieces)
    }

    /// `levels`-level value quantisation of the sampled pieces: the range of
    /// the sampled values is split into `levels` equal bins and each value is
    /// replaced by its bin midpoint. Constant pieces are kept verbatim, so
    /// piecewise-constant data are a fixed point.
    pub fn quantized(&self, levels: usize) -> Result<BoundaryBV> {
        if levels == 0 {
            return Err(Error::InvalidInput("quantisation needs at least one level".into()));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.pieces {
            if let PieceShape::Samples(vs) = &p.shape {
                for &v in vs {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        if !lo.is_finite() {
            return Ok(self.clone());
        }
        let width = (hi - lo) / levels as f64;
        let bin = |v: f64| -> usize {
            if width <= 0.0 {
                0
            } else {
                (((v - lo) / width).floor().max(0.0) as usize).min(levels - 1)
            }
        };
        let mid = |b: usize| lo + (b as f64 + 0.5) * width;

        let mut steps: Vec<(f64, f64)> = Vec::new();
        let mut push = |from: f64, value: f64| match steps.last_mut() {
            Some(last) if last.1 == value => {}
            Some(last) if last.0 == from => last.1 = value,
            _ => steps.push((from, value)),
        };
        for p in &self.pieces {
            match &p.shape {
                PieceShape::Constant(v) => push(p.from, *v),
                PieceShape::Samples(vs) => {
                    let h = p.step(vs.len());
                    let mut b = bin(vs[0]);
                    push(p.from, mid(b));
                    for k in 0..vs.len() - 1 {
                        let (v0, v1) = (vs[k], vs[k + 1]);
                        let b1 = bin(v1);
                        while b != b1 {
                            let next = if b1 > b { b + 1 } else { b - 1 };
                            let edge = lo + (if b1 > b { b + 1 } else { b }) as f64 * width;
                            let t = ((edge - v0) / (v1 - v0)).clamp(0.0, 1.0);
                            let s = p.from + (k as f64 + t) * h;
                            if s < p.to {
                                push(s, mid(next));
                            }
                            b = next;
                        }
                    }
                }
            }
        }
        BoundaryBV::piecewise_constant(self.length, &steps)
    }
}

/// An atom of a signed boundary measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedAtom {
    pub s: f64,
    pub mass: f64,
}

/// Piecewise-constant density on uniform sub-intervals of `[from, to]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityPiece {
    pub from: f64,
    pub to: f64,
    pub values: Vec<f64>,
}

impl DensityPiece {
    fn step(&self) -> f64 {
        (self.to - self.from) / self.values.len() as f64
    }

    pub fn density_at(&self, s: f64) -> f64 {
        let h = self.step();
        let k = (((s - self.from) / h).floor().max(0.0) as usize).min(self.values.len() - 1);
        self.values[k]
    }

    /// `(∫ f, ∫ s f)` over `[a, b] ∩ [from, to]`.
    pub fn moments(&self, a: f64, b: f64) -> (f64, f64) {
        let h = self.step();
        let a = a.max(self.from);
        let b = b.min(self.to);
        if b <= a {
            return (0.0, 0.0);
        }
        let k0 = (((a - self.from) / h).floor().max(0.0) as usize).min(self.values.len() - 1);
        let k1 = (((b - self.from) / h).ceil() as usize).min(self.values.len());
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        for k in k0..k1 {
            let lo = (self.from + k as f64 * h).max(a);
            let hi = (self.from + (k + 1) as f64 * h).min(b);
            if hi > lo {
                let d = self.values[k];
                m0 += d * (hi - lo);
                m1 += d * 0.5 * (hi * hi - lo * lo);
            }
        }
        (m0, m1)
    }

    pub fn abs_mass(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.step()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step()
    }
}

/// A signed measure on ∂Ω: atoms plus an absolutely continuous part.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedBoundaryMeasure {
    pub length: f64,
    pub atoms: Vec<SignedAtom>,
    pub densities: Vec<DensityPiece>,
}

impl SignedBoundaryMeasure {
    /// Total variation `|f|(∂Ω)`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass.abs()).sum::<f64>()
            + self.densities.iter().map(DensityPiece::abs_mass).sum::<f64>()
    }

    /// `f(∂Ω)`, zero for the derivative of a BV datum.
    pub fn net_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.densities.iter().map(DensityPiece::mass).sum::<f64>()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.mass == 0.0) && self.densities.iter().all(|d| d.values.iter().all(|&v| v == 0.0))
    }

    pub fn scaled(&self, c: f64) -> SignedBoundaryMeasure {
        SignedBoundaryMeasure {
            length: self.length,
            atoms: self.atoms.iter().map(|a| SignedAtom { s: a.s, mass: a.mass * c }).collect(),
            densities: self
                .densities
                .iter()
                .map(|d| DensityPiece {
                    from: d.from,
                    to: d.to,
                    values: d.values.iter().map(|v| v * c).collect(),
                })
                .collect(),
        }
    }

    /// Density of the absolutely continuous part at `s` (zero off the
    /// sampled pieces).
    pub fn density_at(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        self.densities
            .iter()
            .find(|d| d.from <= s && s < d.to)
            .map_or(0.0, |d| d.density_at(s))
    }
}

/// `∂τ g`: one atom of mass `right − left` per jump and the derivative of
/// the interpolant on every sampled piece.
pub fn tangential_derivative(g: &BoundaryBV) -> SignedBoundaryMeasure {
    let atoms = g
        .jumps
        .iter()
        .map(|j| SignedAtom {
            s: j.s,
            mass: j.height(),
        })
        .collect();
    let densities = g
        .pieces
        .iter()
        .filter_map(|p| match &p.shape {
            PieceShape::Constant(_) => None,
            PieceShape::Samples(vs) => {
                let h = p.step(vs.len());
                Some(DensityPiece {
                    from: p.from,
                    to: p.to,
                    values: vs.windows(2).map(|w| (w[1] - w[0]) / h).collect(),
                })
            }
        })
        .collect();
    SignedBoundaryMeasure {
        length: g.length,
        atoms,
        densities,
    }
}

/// `|Dg|(∂Ω)`: jump heights plus the partition sums over each sub-grid.
pub fn total_variation_boundary(g: &BoundaryBV) -> f64 {
    g.jumps.iter().map(|j| j.height().abs()).sum::<f64>() + g.pieces.iter().map(Piece::variation).sum::<f64>()
}

/// Scales `g` so that its total variation equals `target_tv`.
pub fn rescale_to_tv(g: &BoundaryBV, target_tv: f64) -> Result<BoundaryBV> {
    let tv = total_variation_boundary(g);
    if tv <= 0.0 {
        return Err(Error::ZeroVariation);
    }
    if !(target_tv > 0.0 && target_tv.is_finite()) {
        return Err(Error::InvalidInput(format!("target total variation must be positive, got {target_tv}")));
    }
    Ok(g.scaled(target_tv / tv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomTag {
    /// Originates from a jump of the datum.
    Atomic,
    /// Lumped from the absolutely continuous part.
    Diffuse,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub point: BoundaryPoint,
    pub mass: f64,
    pub tag: AtomTag,
}

/// Balanced positive atomic measures `(f⁺, f⁻)` on ∂Ω.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMeasurePair {
    positive: Vec<Atom>,
    negative: Vec<Atom>,
    total_mass: f64,
}

impl BoundaryMeasurePair {
    /// Validates positivity, mass balance (1e−12 relative) and that no
    /// location carries atoms of both signs.
    pub fn new(positive: Vec<Atom>, negative: Vec<Atom>) -> Result<Self> {
        if positive.iter().chain(&negative).any(|a| !(a.mass > 0.0 && a.mass.is_finite())) {
            return Err(Error::InvalidInput("atom masses must be positive and finite".into()));
        }
        let p: f64 = positive.iter().map(|a| a.mass).sum();
        let n: f64 = negative.iter().map(|a| a.mass).sum();
        if (p - n).abs() > 1e-12 * p.max(n) {
            return Err(Error::Unbalanced { positive: p, negative: n });
        }
        for a in &positive {
            for b in &negative {
                if a.point.xy.dist(b.point.xy) <= 1e-12 * (1.0 + a.point.xy.norm()) {
                    return Err(Error::InvalidInput(format!(
                        "positive and negative atoms share the location ({}, {})",
                        a.point.xy.x, a.point.xy.y
                    )));
                }
            }
        }
        Ok(BoundaryMeasurePair {
            positive,
            negative,
            total_mass: p,
        })
    }

    /// Atoms at arc coordinates on `domain`, all tagged [`AtomTag::Atomic`].
    pub fn from_arc_masses(domain: &ConvexDomain, positive: &[(f64, f64)], negative: &[(f64, f64)]) -> Result<Self> {
        let mk = |&(s, m): &(f64, f64)| Atom {
            point: domain.boundary_param(s),
            mass: m,
            tag: AtomTag::Atomic,
        };
        Self::new(positive.iter().map(mk).collect(), negative.iter().map(mk).collect())
    }

    pub fn positive(&self) -> &[Atom] {
        &self.positive
    }

    pub fn negative(&self) -> &[Atom] {
        &self.negative
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    /// Largest diffuse atom mass (zero if purely atomic).
    pub fn max_diffuse_mass(&self) -> f64 {
        self.positive
            .iter()
            .chain(&self.negative)
            .filter(|a| a.tag == AtomTag::Diffuse)
            .map(|a| a.mass)
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let f = |a: &Atom| Atom { mass: a.mass * c, ..*a };
        Self::new(self.positive.iter().map(f).collect(), self.negative.iter().map(f).collect())
    }

    /// Signed atoms `(s, ±mass)` of `f⁺ − f⁻`.
    pub fn signed_atoms(&self) -> Vec<(f64, f64)> {
        self.positive
            .iter()
            .map(|a| (a.point.s, a.mass))
            .chain(self.negative.iter().map(|a| (a.point.s, -a.mass)))
            .collect()
    }
}

/// Quantises a signed boundary measure into a balanced pair of atomic
/// measures.
///
/// Exact atoms pass through tagged `Atomic`. Each sign-constant run of every
/// density piece is split into `n_diffuse` equal cells whose mass is lumped
/// at the cell's mass centroid, tagged `Diffuse`; sign changes are always
/// cell boundaries. Cells lighter than `1e−14 · total` are dropped, coincident
/// atoms of opposite sign are netted, and the residual imbalance (which must
/// be below `1e−9` relative) is absorbed by the heaviest atom.
pub fn discretize(f: &SignedBoundaryMeasure, domain: &ConvexDomain, n_diffuse: usize) -> Result<BoundaryMeasurePair> {
    if n_diffuse == 0 {
        return Err(Error::InvalidInput("n_diffuse must be at least 1".into()));
    }
    let l = domain.boundary_length();
    if (f.length - l).abs() > 1e-9 * l {
        return Err(Error::InvalidInput(format!(
            "measure lives on a boundary of length {} but the domain has perimeter {l}",
            f.length
        )));
    }
    let total = f.total_variation();
    if f.is_zero() || total <= 0.0 {
        return Err(Error::ZeroMeasure);
    }
    let drop_below = 1e-14 * total;

    let mut cands: Vec<(f64, f64, AtomTag)> = f
        .atoms
        .iter()
        .filter(|a| a.mass != 0.0)
        .map(|a| (a.s.rem_euclid(l), a.mass, AtomTag::Atomic))
        .collect();

    for d in &f.densities {
        let h = d.step();
        let mut k = 0;
        while k < d.values.len() {
            let sign = d.values[k].signum();
            if d.values[k] == 0.0 {
                k += 1;
                continue;
            }
            let start = k;
            while k < d.values.len() && d.values[k] != 0.0 && d.values[k].signum() == sign {
                k += 1;
            }
            let a = d.from + start as f64 * h;
            let b = if k == d.values.len() { d.to } else { d.from + k as f64 * h };
            for c in 0..n_diffuse {
                let c0 = a + (b - a) * c as f64 / n_diffuse as f64;
                let c1 = if c + 1 == n_diffuse {
                    b
                } else {
                    a + (b - a) * (c + 1) as f64 / n_diffuse as f64
                };
                let (m0, m1) = d.moments(c0, c1);
                if m0.abs() < drop_below {
                    continue;
                }
                let centroid = (m1 / m0).clamp(c0, c1);
                cands.push((centroid.rem_euclid(l), m0, AtomTag::Diffuse));
            }
        }
    }

    let atoms = net_coincident(cands, l);
    let mut pos: Vec<(f64, f64, AtomTag)> = atoms.iter().copied().filter(|a| a.1 > 0.0).collect();
    let mut neg: Vec<(f64, f64, AtomTag)> = atoms
        .iter()
        .copied()
        .filter(|a| a.1 < 0.0)
        .map(|(s, m, t)| (s, -m, t))
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Unbalanced {
            positive: pos.iter().map(|a| a.1).sum(),
            negative: neg.iter().map(|a| a.1).sum(),
        });
    }
    let p: f64 = pos.iter().map(|a| a.1).sum();
    let n: f64 = neg.iter().map(|a| a.1).sum();
    let residual = p - n;
    if residual.abs() > 1e-9 * p.max(n) {
        return Err(Error::Unbalanced { positive: p, negative: n });
    }
    let heaviest = |v: &[(f64, f64, AtomTag)]| -> (usize, f64) {
        v.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, a)| if a.1 > acc.1 { (i, a.1) } else { acc })
    };
    let (ip, mp) = heaviest(&pos);
    let (ineg, mn) = heaviest(&neg);
    if mp >= mn {
        pos[ip].1 -= residual;
    } else {
        neg[ineg].1 += residual;
    }
    let mk = |&(s, m, tag): &(f64, f64, AtomTag)| Atom {
        point: domain.boundary_param(s),
        mass: m,
        tag,
    };
    let positive: Vec<Atom> = pos.iter().map(mk).collect();
    let negative: Vec<Atom> = neg.iter().map(mk).collect();
    let total_mass: f64 = positive.iter().map(|a| a.mass).sum();
    Ok(BoundaryMeasurePair {
        positive,
        negative,
        total_mass,
    })
}

/// Sorts candidate atoms by location and nets opposite-sign atoms that share
/// a location (within `1e−12 · L`, including across `s = 0`).
fn net_coincident(mut cands: Vec<(f64, f64, AtomTag)>, l: f64) -> Vec<(f64, f64, AtomTag)> {
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tol = 1e-12 * l;
    let mut groups: Vec<Vec<(f64, f64, AtomTag)>> = Vec::new();
    for c in cands {
        match groups.last_mut() {
            Some(g) if c.0 - g[0].0 <= tol => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    if groups.len() > 1 {
        let first = groups[0][0].0;
        let last = groups[groups.len() - 1][0].0;
        if first + l - last <= tol {
            let tail = groups.pop().expect("len > 1");
            groups[0].extend(tail);
        }
    }
    let mut out = Vec::new();
    for g in groups {
        let has_pos = g.iter().any(|a| a.1 > 0.0);
        let has_neg = g.iter().any(|a| a.1 < 0.0);
        if has_pos && has_neg {
            let net: f64 = g.iter().map(|a| a.1).sum();
            if net == 0.0 {
                continue;
            }
            let tag = g
                .iter()
                .filter(|a| a.1.signum() == net.signum())
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map_or(AtomTag::Atomic, |a| a.2);
            out.push((g[0].0, net, tag));
        } else {
            out.extend(g);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn cos2(nodes: usize) -> BoundaryBV {
        BoundaryBV::from_fn(TAU, &[0.0], nodes, |_, s| (2.0 * s).cos()).unwrap()
    }

    fn upper_half() -> BoundaryBV {
        BoundaryBV::piecewise_constant(TAU, &[(0.0, 1.0), (PI, 0.0)]).unwrap()
    }

    /// Composite Simpson rule, the quadrature oracle for the frozen values.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn constant_datum_has_zero_derivative() {
        let f = tangential_derivative(&BoundaryBV::constant(TAU, 5.0));
        assert!(f.is_zero());
        assert!(f.atoms.is_empty());
        assert_eq!(total_variation_boundary(&BoundaryBV::constant(TAU, 5.0)), 0.0);
    }

    #[test]
    fn cos2_derivative_density() {
        let g = cos2(4801);
        let f = tangential_derivative(&g);
        assert!(f.atoms.is_empty());
        for k in 0..37 {
            let s = 0.1 + k as f64 * 0.17;
            let expected = -2.0 * (2.0 * s).sin();
            assert!((f.density_at(s) - expected).abs() < 1e-2, "s={s}");
        }
        assert!(f.net_mass().abs() < 1e-12);
    }

    #[test]
    fn indicator_derivative_atoms() {
        let f = tangential_derivative(&upper_half());
        assert_eq!(f.atoms.len(), 2);
        let d = ConvexDomain::unit_disc();
        for a in &f.atoms {
            let p = d.boundary_param(a.s).xy;
            if a.mass > 0.0 {
                assert!(p.dist(Vec2::new(1.0, 0.0)) < 1e-15);
                assert_eq!(a.mass, 1.0);
            } else {
                assert!(p.dist(Vec2::new(-1.0, 0.0)) < 1e-15);
                assert_eq!(a.mass, -1.0);
            }
        }
    }

    #[test]
    fn good_representative_is_midpoint() {
        let g = upper_half();
        assert_eq!(g.value(PI), 0.5);
        assert_eq!(g.value(0.0), 0.5);
        assert_eq!(g.left_limit(PI), 1.0);
        assert_eq!(g.right_limit(PI), 0.0);
        assert_eq!(g.value(1.0), 1.0);
        assert_eq!(g.value(4.0), 0.0);
    }

    #[test]
    fn total_variations() {
        assert_eq!(total_variation_boundary(&upper_half()), 2.0);
        let oracle = simpson(|t| (2.0 * (2.0 * t).sin()).abs(), 0.0, PI / 2.0, 2000) * 4.0;
        assert!((oracle - 8.0).abs() < 1e-9);
        let tv = total_variation_boundary(&cos2(4001));
        assert!((tv - 8.0).abs() < 1e-9, "{tv}");
        // |Dg| equals the mass of |∂τ g|
        let g = cos2(1201);
        assert!((total_variation_boundary(&g) - tangential_derivative(&g).total_variation()).abs() < 1e-9);
    }

    #[test]
    fn rescale_examples() {
        let g = BoundaryBV::piecewise_constant(TAU, &[(0.0, 0.0), (1.0, 1.6), (3.0, 0.0)]).unwrap();
        assert!((total_variation_boundary(&g) - 3.2).abs() < 1e-15);
        let r = rescale_to_tv(&g, 4.0).unwrap();
        assert!((r.value(2.0) - 2.0).abs() < 1e-15);
        assert!((total_variation_boundary(&r) - 4.0).abs() < 1e-12 * 4.0);
        let same = rescale_to_tv(&g, 3.2).unwrap();
        assert_eq!(same, g);
        let three = rescale_to_tv(&upper_half(), 6.0).unwrap();
        let heights: Vec<f64> = three.jumps().iter().map(Jump::height).collect();
        assert!(heights.contains(&3.0) && heights.contains(&-3.0));
        assert!(matches!(rescale_to_tv(&BoundaryBV::constant(TAU, 1.0), 1.0), Err(Error::ZeroVariation)));
    }

    #[test]
    fn discretize_passes_atoms_through() {
        let d = ConvexDomain::unit_disc();
        for n in [1, 7] {
            let mu = discretize(&tangential_derivative(&upper_half()), &d, n).unwrap();
            assert_eq!(mu.positive().len(), 1);
            assert_eq!(mu.negative().len(), 1);
            assert_eq!(mu.positive()[0].tag, AtomTag::Atomic);
            assert!(mu.positive()[0].point.xy.dist(Vec2::new(1.0, 0.0)) < 1e-15);
            assert!(mu.negative()[0].point.xy.dist(Vec2::new(-1.0, 0.0)) < 1e-15);
            assert_eq!(mu.total_mass(), 1.0);
        }
    }

    #[test]
    fn discretize_cos2_cells() {
        let d = ConvexDomain::unit_disc();
        let nodes = 4 * 4 * 200 + 1;
        let mu = discretize(&tangential_derivative(&cos2(nodes)), &d, 4).unwrap();
        assert_eq!(mu.positive().len(), 8);
        assert_eq!(mu.negative().len(), 8);
        assert!((mu.total_mass() - 4.0).abs() < 1e-9);
        assert!(mu.positive().iter().all(|a| a.tag == AtomTag::Diffuse));
        // Oracle: quadrature of |f| over each cell of width π/8.
        let mut masses: Vec<f64> = (0..16)
            .map(|c| {
                let a = c as f64 * PI / 8.0;
                simpson(|t| (2.0 * (2.0 * t).sin()).abs(), a, a + PI / 8.0, 2000)
            })
            .collect();
        let mut got: Vec<f64> = mu.positive().iter().chain(mu.negative()).map(|a| a.mass).collect();
        masses.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (m, g) in masses.iter().zip(&got) {
            assert!((m - g).abs() < 1e-9, "{m} vs {g}");
        }
        // cells never straddle a sign change
        for a in mu.positive() {
            assert!(-2.0 * (2.0 * a.point.s).sin() > 0.0);
        }
    }

    #[test]
    fn discretize_zero_measure() {
        let d = ConvexDomain::unit_disc();
        let f = tangential_derivative(&BoundaryBV::constant(TAU, 2.0));
        assert!(matches!(discretize(&f, &d, 4), Err(Error::ZeroMeasure)));
    }

    #[test]
    fn discretize_mass_per_piece_and_balance() {
        let d = ConvexDomain::unit_disc();
        let g = BoundaryBV::from_fn(TAU, &[0.0, 1.0, 4.0], 301, |k, s| match k {
            0 => s * s,
            1 => (s * 1.3).sin() + 2.0,
            _ => 0.5 * s,
        })
        .unwrap();
        let f = tangential_derivative(&g);
        let mu = discretize(&f, &d, 9).unwrap();
        let pos: f64 = mu.positive().iter().map(|a| a.mass).sum();
        let neg: f64 = mu.negative().iter().map(|a| a.mass).sum();
        assert!((pos - neg).abs() <= 1e-12 * mu.total_mass());
        let diffuse: f64 = mu
            .positive()
            .iter()
            .chain(mu.negative())
            .filter(|a| a.tag == AtomTag::Diffuse)
            .map(|a| a.mass)
            .sum();
        let dens: f64 = f.densities.iter().map(DensityPiece::abs_mass).sum();
        assert!((diffuse - dens).abs() <= 1e-12 * dens.max(1.0));
    }

    #[test]
    fn centroid_lies_at_first_moment() {
        // density s on [0, 1]: centroid of [0, 1] is 2/3
        let p = DensityPiece {
            from: 0.0,
            to: 1.0,
            values: (0..1000).map(|k| (k as f64 + 0.5) / 1000.0).collect(),
        };
        let (m0, m1) = p.moments(0.0, 1.0);
        assert!((m0 - 0.5).abs() < 1e-12);
        assert!((m1 / m0 - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn step_function_roundtrip() {
        let g = BoundaryBV::step_function(TAU, &[(0.5, 2.0), (2.0, -0.5), (4.0, -1.5)], 0.0).unwrap();
        let f = tangential_derivative(&g);
        let mut atoms: Vec<(f64, f64)> = f.atoms.iter().map(|a| (a.s, a.mass)).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(atoms, vec![(0.5, 2.0), (2.0, -0.5), (4.0, -1.5)]);
    }

    #[test]
    fn quantization_fixed_point_and_levels() {
        assert_eq!(upper_half().quantized(8).unwrap(), upper_half());
        let q = cos2(2001).quantized(4).unwrap();
        let mut vals: Vec<f64> = q.pieces().iter().map(|p| p.start_value()).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        assert_eq!(vals, vec![-0.75, -0.25, 0.25, 0.75]);
        assert!(q.pieces().iter().all(|p| matches!(p.shape, PieceShape::Constant(_))));
        // crossings of cos 2θ through 0.5 at θ = π/6
        let jump = q
            .jumps()
            .iter()
            .find(|j| j.left == 0.75 && j.right == 0.25)
            .expect("first down-crossing");
        assert!((jump.s - PI / 6.0).abs() < 1e-5);
    }

    #[test]
    fn integral_and_mean() {
        let g = cos2(4001);
        assert!(g.integral(0.0, TAU).abs() < 1e-9);
        assert!((g.integral(0.0, PI / 4.0) - 0.5).abs() < 1e-6);
        assert!((g.mean_over_arc(TAU - 0.1, 0.1) - g.integral(TAU - 0.1, 0.1) / 0.2).abs() < 1e-12);
    }

    #[test]
    fn declared_jumps_are_checked() {
        let pieces = vec![Piece::constant(0.0, PI, 1.0), Piece::constant(PI, TAU, 0.0)];
        let ok = [Jump { s: PI, left: 1.0, right: 0.0 }, Jump { s: 0.0, left: 0.0, right: 1.0 }];
        assert!(BoundaryBV::with_jumps(TAU, pieces.clone(), &ok).is_ok());
        let bad = [Jump { s: PI, left: 1.0, right: 0.5 }];
        assert!(BoundaryBV::with_jumps(TAU, pieces, &bad).is_err());
    }

    #[test]
    fn invalid_partitions() {
        assert!(BoundaryBV::new(TAU, vec![Piece::constant(0.5, TAU, 1.0)]).is_err());
        assert!(BoundaryBV::new(TAU, vec![Piece::constant(0.0, 3.0, 1.0)]).is_err());
        assert!(BoundaryBV::new(TAU, vec![Piece::samples(0.0, TAU, vec![1.0])]).is_err());
        assert!(BoundaryBV::new(
            TAU,
            vec![Piece::constant(0.0, 3.0, 1.0), Piece::constant(3.5, TAU, 1.0)]
        )
        .is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn datum() -> impl Strategy<Value = BoundaryBV> {
            (
                prop::collection::vec(-3.0f64..3.0, 5..30),
                prop::collection::vec(-2.0f64..2.0, 2),
            )
                .prop_map(|(samples, consts)| {
                    let n = samples.len();
                    BoundaryBV::new(
                        TAU,
                        vec![
                            Piece::samples(0.0, 2.0, samples[..n / 2 + 2].to_vec()),
                            Piece::constant(2.0, 3.0, consts[0]),
                            Piece::samples(3.0, 5.0, samples[n / 2..].to_vec()),
                            Piece::constant(5.0, TAU, consts[1]),
                        ],
                    )
                    .unwrap()
                })
        }

        proptest! {
            #[test]
            fn derivative_ignores_constants(g in datum(), c in -10.0f64..10.0) {
                let a = tangential_derivative(&g);
                let b = tangential_derivative(&g.shifted(c));
                prop_assert_eq!(a.atoms.len(), b.atoms.len());
                for (x, y) in a.atoms.iter().zip(&b.atoms) {
                    prop_assert!((x.mass - y.mass).abs() <= 1e-12 * (1.0 + c.abs()));
                }
                for (x, y) in a.densities.iter().zip(&b.densities) {
                    for (u, v) in x.values.iter().zip(&y.values) {
                        prop_assert!((u - v).abs() <= 1e-9 * (1.0 + c.abs()));
                    }
                }
            }

            #[test]
            fn derivative_is_linear(g in datum(), c in 0.1f64..5.0) {
                let a = tangential_derivative(&g).scaled(c);
                let b = tangential_derivative(&g.scaled(c));
                prop_assert!((a.total_variation() - b.total_variation()).abs() <= 1e-9 * (1.0 + a.total_variation()));
            }

            #[test]
            fn tv_equals_derivative_mass(g in datum()) {
                let tv = total_variation_boundary(&g);
                prop_assert!((tv - tangential_derivative(&g).total_variation()).abs() <= 1e-9 * (1.0 + tv));
            }

            #[test]
            fn discretize_commutes_with_scaling(g in datum(), c in 0.1f64..5.0, n in 1usize..6) {
                let d = ConvexDomain::unit_disc();
                let f = tangential_derivative(&g);
                prop_assume!(f.total_variation() > 1e-6);
                let a = discretize(&f, &d, n).unwrap();
                let b = discretize(&f.scaled(c), &d, n).unwrap();
                prop_assert_eq!(a.positive().len(), b.positive().len());
                for (x, y) in a.positive().iter().zip(b.positive()) {
                    prop_assert!((x.mass * c - y.mass).abs() <= 1e-9 * (1.0 + y.mass));
                    prop_assert!(x.point.xy.dist(y.point.xy) <= 1e-12);
                }
                let pos: f64 = b.positive().iter().map(|a| a.mass).sum();
                let neg: f64 = b.negative().iter().map(|a| a.mass).sum();
                prop_assert!((pos - neg).abs() <= 1e-12 * b.total_mass());
            }
        }
    }
}
