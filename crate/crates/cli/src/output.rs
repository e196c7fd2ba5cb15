//! Machine-readable artifacts. Every JSON document has a typed schema that
//! round-trips through serde.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use leastgrad::boundary::AtomTag;
use leastgrad::duality::{Potential, ScalarGrid, ZField};
use leastgrad::fields::DensityGrid;
use leastgrad::geometry::{ConvexDomain, Vec2};
use leastgrad::ot::TransportPlan;
use leastgrad::reconstruct::PlanarSolution;
use serde::{Deserialize, Serialize};

fn xy(p: Vec2) -> [f64; 2] {
    [p.x, p.y]
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairJson {
    pub src: [f64; 2],
    pub dst: [f64; 2],
    pub mass: f64,
    pub src_tag: AtomTag,
    pub dst_tag: AtomTag,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PlanJson {
    pub pairs: Vec<PairJson>,
    pub cost: f64,
}

impl PlanJson {
    pub fn from_plan(plan: &TransportPlan) -> Self {
        PlanJson {
            pairs: plan
                .pairs
                .iter()
                .map(|p| PairJson {
                    src: xy(p.source.xy),
                    dst: xy(p.target.xy),
                    mass: p.mass,
                    src_tag: p.source_tag,
                    dst_tag: p.target_tag,
                })
                .collect(),
            cost: plan.cost,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FaceJson {
    pub vertices: Vec<[f64; 2]>,
    pub value: f64,
    pub enclosed: bool,
    pub interval: Option<[f64; 2]>,
    pub area: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChordJson {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub mass: f64,
    pub net_mass: f64,
    pub jump: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolutionJson {
    pub faces: Vec<FaceJson>,
    pub chords: Vec<ChordJson>,
    pub total_variation: f64,
}

impl SolutionJson {
    pub fn from_solution(sol: &PlanarSolution) -> Self {
        let arr = &sol.arrangement;
        SolutionJson {
            faces: arr
                .faces
                .iter()
                .enumerate()
                .map(|(i, f)| FaceJson {
                    vertices: f.outline.iter().map(|&p| xy(p)).collect(),
                    value: sol.values[i],
                    enclosed: f.is_enclosed(),
                    interval: sol.intervals[i].map(|(a, b)| [a, b]),
                    area: f.area,
                })
                .collect(),
            chords: arr
                .chords
                .iter()
                .zip(sol.chord_jumps())
                .map(|(c, j)| ChordJson {
                    from: xy(c.from),
                    to: xy(c.to),
                    mass: c.mass,
                    net_mass: c.net_mass,
                    jump: j,
                })
                .collect(),
            total_variation: sol.total_variation(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolveReport {
    pub cost: f64,
    pub total_variation: f64,
    /// `(diam/2)·|Dg|`.
    pub tv_bound: f64,
    pub datum_variation: f64,
    pub diameter: f64,
    pub atoms: [usize; 2],
    pub pairs: usize,
    pub faces: usize,
    pub enclosed_faces: usize,
    pub max_marginal_residual: f64,
    pub crossings: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PotentialValue {
    pub point: [f64; 2],
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PotentialsJson {
    pub sources: Vec<PotentialValue>,
    pub targets: Vec<PotentialValue>,
}

impl PotentialsJson {
    pub fn from_potential(phi: &Potential) -> Self {
        let side = |pts: &[Vec2], vals: &[f64]| {
            pts.iter()
                .zip(vals)
                .map(|(&p, &value)| PotentialValue { point: xy(p), value })
                .collect()
        };
        PotentialsJson {
            sources: side(&phi.source_points, &phi.source_values),
            targets: side(&phi.target_points, &phi.target_values),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DualReport {
    pub cost: f64,
    pub duality_gap: f64,
    pub saturation_defect: f64,
    pub lipschitz_violation: f64,
    pub grid: usize,
    pub flagged_cells: usize,
    pub max_norm: f64,
    pub max_divergence: f64,
    pub mean_divergence: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Fragments {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

impl Fragments {
    pub fn from_costs(c: [f64; 4]) -> Self {
        Fragments {
            g1: c[0],
            g2: c[1],
            g3: c[2],
            g4: c[3],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Norms {
    pub p: f64,
    pub lp: f64,
    pub linf: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DensityReport {
    pub cost: f64,
    pub interior_mass: f64,
    pub boundary_mass: f64,
    pub boundary_mass_by_edge: Vec<f64>,
    /// `|Σ sigma + boundary_mass − cost|`.
    pub mass_defect: f64,
    pub max_p_excess: f64,
    pub fragments: Fragments,
    pub norms: Norms,
    pub grid: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SbvReport {
    pub cost: f64,
    pub fragments: Fragments,
    pub pair_counts: [usize; 4],
    pub fragment_sum: f64,
    pub singular_segments: Vec<PairSegment>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairSegment {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub mass: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SuiteEntry {
    pub index: usize,
    pub domain: String,
    pub atoms: [usize; 2],
    pub cost: f64,
    pub duality_gap: f64,
    pub saturation_defect: f64,
    pub crossings: usize,
    pub mass_defect: f64,
    pub tv_bound: f64,
    /// `None` when the plan charges the boundary.
    pub total_variation: Option<f64>,
    pub outcome: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub instances: usize,
    pub reconstructed: usize,
    pub max_relative_gap: f64,
    pub max_saturation_defect: f64,
    pub total_crossings: usize,
    pub max_relative_mass_defect: f64,
    pub tv_bound_violations: usize,
    pub entries: Vec<SuiteEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DemoReport {
    pub n_diffuse: usize,
    pub g1_cost: f64,
    pub g1_total_variation: f64,
    pub u1_mean_abs_deviation: f64,
    pub g2_total_variation: f64,
    pub g2_singular_cost: f64,
    pub g2_enclosed_values: Vec<f64>,
}

pub fn domain_label(d: &ConvexDomain) -> String {
    match d.vertices() {
        Some(v) => format!("polygon({})", v.len()),
        None => "disc".into(),
    }
}

/// Writes artifacts below one output directory.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(self.path(name), text)
    }

    pub fn text(&self, name: &str, text: &str) -> std::io::Result<()> {
        fs::write(self.path(name), text)
    }
}

/// `x,y,value` for grid cells with finite values.
pub fn scalar_csv(field: &ScalarGrid, inside: &[bool]) -> String {
    let mut out = String::from("x,y,value\n");
    let g = &field.grid;
    for k in 0..g.len() {
        if !inside[k] {
            continue;
        }
        let (ix, iy) = g.coords(k);
        let c = g.cell_center(ix, iy);
        let _ = writeln!(out, "{},{},{}", c.x, c.y, field.values[k]);
    }
    out
}

pub fn z_csv(z: &ZField) -> String {
    let mut out = String::from("x,y,zx,zy\n");
    let g = &z.grid;
    for k in 0..g.len() {
        if !z.inside[k] {
            continue;
        }
        let (ix, iy) = g.coords(k);
        let c = g.cell_center(ix, iy);
        let _ = writeln!(out, "{},{},{},{}", c.x, c.y, z.z[k].x, z.z[k].y);
    }
    out
}

/// `x,y,sigma,px,py` with densities per unit area.
pub fn density_csv(d: &DensityGrid) -> String {
    let mut out = String::from("x,y,sigma,px,py\n");
    let g = &d.grid;
    let area = g.h * g.h;
    for k in 0..g.len() {
        let (ix, iy) = g.coords(k);
        let c = g.cell_center(ix, iy);
        let p = d.p_vec[k] * (1.0 / area);
        let _ = writeln!(out, "{},{},{},{},{}", c.x, c.y, d.density(k), p.x, p.y);
    }
    out
}
