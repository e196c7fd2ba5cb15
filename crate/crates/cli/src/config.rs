//! Run configuration: JSON schema, validation and problem assembly.

use std::f64::consts::PI;
use std::path::Path;

use leastgrad::boundary::BoundaryBV;
use leastgrad::geometry::{ConvexDomain, Vec2};
use leastgrad::harness::{Preset, DEFAULT_NODES};
use leastgrad::ot::CostNorm;
use serde::{Deserialize, Serialize};

pub const MIN_GRID: usize = 16;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc { center: [f64; 2], radius: f64 },
    Square { center: [f64; 2], half_side: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub amplitude: f64,
    /// Number of oscillations along the boundary.
    pub frequency: u32,
    #[serde(default)]
    pub phase: f64,
}

/// Boundary data in the arc-length coordinate of the domain.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumSpec {
    Constant {
        value: f64,
    },
    /// Piecewise constant: `[s, value]` pairs, the first at `s = 0`.
    Steps {
        steps: Vec<[f64; 2]>,
    },
    /// Sampled pieces starting at `breaks`, each with uniform samples
    /// including both ends.
    Samples {
        breaks: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
    /// `offset + Σ amplitude·cos(2π·frequency·s/L + phase)`.
    Trig {
        #[serde(default)]
        offset: f64,
        terms: Vec<TrigTerm>,
    },
    /// `a·x + b·y + c` at the boundary point; exact on polygons.
    Linear {
        a: f64,
        b: f64,
        #[serde(default)]
        c: f64,
    },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSpec {
    #[default]
    Euclidean,
    Lp(f64),
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Named domain and datum; replaces `domain` and `datum`.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub datum: Option<DatumSpec>,
    #[serde(default = "default_n_diffuse")]
    pub n_diffuse: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub cost: CostSpec,
    /// Sample count for smooth data.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Quantisation levels for data stability.
    #[serde(default)]
    pub schedule: Option<Vec<usize>>,
    /// Dilations for domain stability.
    #[serde(default)]
    pub eps_schedule: Option<Vec<f64>>,
    /// `finest`, `brothers-u1` or `brothers-u2`.
    #[serde(default)]
    pub reference: Option<String>,
    /// Exponent of the reported density norm.
    #[serde(default = "default_norm_p")]
    pub norm_p: f64,
    /// Number of instances for the random suite.
    #[serde(default)]
    pub suite_count: Option<usize>,
}

fn default_n_diffuse() -> usize {
    64
}
fn default_grid() -> usize {
    256
}
fn default_nodes() -> usize {
    DEFAULT_NODES
}
fn default_norm_p() -> f64 {
    2.0
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: None,
            domain: None,
            datum: None,
            n_diffuse: default_n_diffuse(),
            grid: default_grid(),
            cost: CostSpec::default(),
            nodes: default_nodes(),
            schedule: None,
            eps_schedule: None,
            reference: None,
            norm_p: default_norm_p(),
            suite_count: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub domain: ConvexDomain,
    pub g: BoundaryBV,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn from_json(text: &str) -> Result<RunConfig, String> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| format!("malformed config: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_diffuse < 1 {
            return Err(String::from("n_diffuse must be at least 1"));
        }
        if self.grid < MIN_GRID {
            return Err(format!("grid must be at least {MIN_GRID}, got {}", self.grid));
        }
        if self.nodes < 2 {
            return Err(String::from("nodes must be at least 2"));
        }
        if !(self.norm_p >= 1.0) {
            return Err(format!("norm_p must be at least 1, got {}", self.norm_p));
        }
        if let CostSpec::Lp(p) = self.cost {
            if !(p >= 1.0) {
                return Err(format!("lp cost needs p >= 1, got {p}"));
            }
        }
        if let Some(name) = &self.preset {
            Preset::from_name(name).map_err(|e| e.to_string())?;
            if self.domain.is_some() || self.datum.is_some() {
                return Err(String::from("give either a preset or a domain and datum, not both"));
            }
        }
        if let Some(r) = &self.reference {
            if !matches!(r.as_str(), "finest" | "brothers-u1" | "brothers-u2") {
                return Err(format!("unknown reference `{r}`"));
            }
        }
        if matches!(self.suite_count, Some(0)) {
            return Err(String::from("suite_count must be positive"));
        }
        Ok(())
    }

    pub fn cost_norm(&self) -> Result<CostNorm, String> {
        match self.cost {
            CostSpec::Euclidean => Ok(CostNorm::Euclidean),
            CostSpec::Lp(p) => CostNorm::lp(p).map_err(|e| e.to_string()),
        }
    }

    pub fn problem(&self) -> Result<Problem, String> {
        if let Some(name) = &self.preset {
            let preset = Preset::from_name(name).map_err(|e| e.to_string())?;
            let (domain, g) = preset.build(self.nodes).map_err(|e| e.to_string())?;
            return Ok(Problem { domain, g });
        }
        let (Some(domain), Some(datum)) = (&self.domain, &self.datum) else {
            return Err(String::from("config needs a preset or both a domain and a datum"));
        };
        let domain = build_domain(domain)?;
        let g = build_datum(datum, &domain, self.nodes)?;
        Ok(Problem { domain, g })
    }
}

fn v(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

fn build_domain(spec: &DomainSpec) -> Result<ConvexDomain, String> {
    let d = match spec {
        DomainSpec::Disc { center, radius } => ConvexDomain::disc(v(*center), *radius),
        DomainSpec::Square { center, half_side } => ConvexDomain::square(v(*center), *half_side),
        DomainSpec::Polygon { vertices } => ConvexDomain::polygon(vertices.iter().map(|&p| v(p)).collect()),
    };
    d.map_err(|e| e.to_string())
}

fn build_datum(spec: &DatumSpec, domain: &ConvexDomain, nodes: usize) -> Result<BoundaryBV, String> {
    let l = domain.boundary_length();
    let g = match spec {
        DatumSpec::Constant { value } => Ok(BoundaryBV::constant(l, *value)),
        DatumSpec::Steps { steps } => {
            let steps: Vec<(f64, f64)> = steps.iter().map(|s| (s[0], s[1])).collect();
            BoundaryBV::piecewise_constant(l, &steps)
        }
        DatumSpec::Samples { breaks, values } => {
            if breaks.len() != values.len() {
                return Err(format!("{} breaks but {} sample lists", breaks.len(), values.len()));
            }
            let pieces = breaks
                .iter()
                .enumerate()
                .map(|(k, &from)| {
                    let to = breaks.get(k + 1).copied().unwrap_or(l);
                    leastgrad::boundary::Piece::samples(from, to, values[k].clone())
                })
                .collect();
            BoundaryBV::new(l, pieces)
        }
        DatumSpec::Trig { offset, terms } => BoundaryBV::from_fn(l, &[0.0], nodes, |_, s| {
            offset
                + terms
                    .iter()
                    .map(|t| t.amplitude * (2.0 * PI * t.frequency as f64 * s / l + t.phase).cos())
                    .sum::<f64>()
        }),
        DatumSpec::Linear { a, b, c } => {
            let f = |s: f64| {
                let p = domain.boundary_param(s).xy;
                a * p.x + b * p.y + c
            };
            match domain.vertices() {
                Some(_) => BoundaryBV::from_fn(l, domain.vertex_coordinates(), 2, |_, s| f(s)),
                None => BoundaryBV::from_fn(l, &[0.0], nodes, |_, s| f(s)),
            }
        }
    };
    g.map_err(|e| e.to_string())
}
