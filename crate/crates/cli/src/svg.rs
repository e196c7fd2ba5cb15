//! Minimal SVG assembly: world-to-pixel mapping, colour scale and level lines.

use std::fmt::Write;

use leastgrad::geometry::Vec2;
use leastgrad::grid::GridSpec;

pub struct Svg {
    lo: Vec2,
    hi: Vec2,
    scale: f64,
    margin: f64,
    body: String,
}

impl Svg {
    /// A canvas showing the world box `[lo, hi]` at `px_per_unit`.
    pub fn new(lo: Vec2, hi: Vec2, px_per_unit: f64) -> Self {
        Svg {
            lo,
            hi,
            scale: px_per_unit,
            margin: 10.0,
            body: String::new(),
        }
    }

    fn px(&self, p: Vec2) -> (f64, f64) {
        (
            self.margin + (p.x - self.lo.x) * self.scale,
            self.margin + (self.hi.y - p.y) * self.scale,
        )
    }

    fn path_data(&self, pts: &[Vec2], close: bool) -> String {
        let mut d = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = self.px(p);
            let _ = write!(d, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
        }
        if close {
            d.push_str(" Z");
        }
        d
    }

    pub fn polygon(&mut self, pts: &[Vec2], class: &str, fill: &str, stroke: &str) {
        let d = self.path_data(pts, true);
        let _ = writeln!(
            self.body,
            r#"<path class="{class}" d="{d}" fill="{fill}" stroke="{stroke}" stroke-width="0.5"/>"#
        );
    }

    pub fn polyline(&mut self, pts: &[Vec2], class: &str, stroke: &str, width: f64) {
        let d = self.path_data(pts, false);
        let _ = writeln!(
            self.body,
            r#"<path class="{class}" d="{d}" fill="none" stroke="{stroke}" stroke-width="{width:.3}"/>"#
        );
    }

    pub fn line(&mut self, a: Vec2, b: Vec2, class: &str, stroke: &str, width: f64) {
        let (x1, y1) = self.px(a);
        let (x2, y2) = self.px(b);
        let _ = writeln!(
            self.body,
            r#"<line class="{class}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="{width:.3}"/>"#
        );
    }

    pub fn text(&mut self, at: Vec2, content: &str) {
        let (x, y) = self.px(at);
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.3}" y="{y:.3}" font-family="sans-serif" font-size="14">{content}</text>"#
        );
    }

    pub fn finish(self) -> String {
        let w = 2.0 * self.margin + (self.hi.x - self.lo.x) * self.scale;
        let h = 2.0 * self.margin + (self.hi.y - self.lo.y) * self.scale;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

/// Diverging blue–white–red colour for `v` in `[lo, hi]`.
pub fn diverging(v: f64, lo: f64, hi: f64) -> String {
    let t = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
    let (r, g, b) = if t < 0.5 {
        let u = t / 0.5;
        (40.0 + 215.0 * u, 90.0 + 165.0 * u, 200.0 + 55.0 * u)
    } else {
        let u = (t - 0.5) / 0.5;
        (255.0 - 35.0 * u, 255.0 - 195.0 * u, 255.0 - 215.0 * u)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

/// Level set `{f = level}` of cell-centred samples by marching squares.
/// NaN samples mark cells outside the domain; squares touching them are skipped.
pub fn level_lines(grid: &GridSpec, values: &[f64], level: f64) -> Vec<(Vec2, Vec2)> {
    let mut out = Vec::new();
    if grid.nx < 2 || grid.ny < 2 {
        return out;
    }
    for iy in 0..grid.ny - 1 {
        for ix in 0..grid.nx - 1 {
            let corners = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)];
            let f = corners.map(|(x, y)| values[grid.index(x, y)]);
            if f.iter().any(|v| v.is_nan()) {
                continue;
            }
            let p = corners.map(|(x, y)| grid.cell_center(x, y));
            let mut hits = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                let (fa, fb) = (f[a] - level, f[b] - level);
                if (fa < 0.0) != (fb < 0.0) {
                    let t = fa / (fa - fb);
                    hits.push(p[a].lerp(p[b], t));
                }
            }
            match hits.len() {
                2 => out.push((hits[0], hits[1])),
                4 => {
                    out.push((hits[0], hits[1]));
                    out.push((hits[2], hits[3]));
                }
                _ => {}
            }
        }
    }
    out
}
