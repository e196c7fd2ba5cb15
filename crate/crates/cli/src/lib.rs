//! Command-line front end: reads a JSON run configuration, runs the
//! pipeline and writes JSON, CSV and SVG artifacts.
//!
//! Exit codes: 0 on success, 1 when the mathematics refuses (no solution,
//! crossing plan, inconsistent trace), 2 for malformed input.

pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use leastgrad::boundary::{discretize, tangential_derivative, total_variation_boundary, BoundaryMeasurePair};
use leastgrad::duality::{dual_field_z, dual_potentials, duality_report, extend_potential, sample_field, saturation_defect};
use leastgrad::fields::{boundary_mass_by_edge, density_norms, rasterize_density, sbv_split};
use leastgrad::geometry::{ConvexDomain, Vec2};
use leastgrad::grid::GridSpec;
use leastgrad::harness::{
    brothers_g1, brothers_g2, brothers_reference, check_monotone_polygon, random_suite, run_data_stability, run_domain_approx,
    BrothersCase, MonotoneOutcome, StabilityOptions, StabilityReference, StabilityReport, BROTHERS_U1_TV, BROTHERS_U2_TV,
};
use leastgrad::ot::{plan_diagnostics, solve_kantorovich, CostNorm, TransportPlan};
use leastgrad::reconstruct::{reconstruct, PlanarSolution};

use config::{Problem, RunConfig};
use output::*;
use svg::{diverging, level_lines, Svg};

#[derive(Parser, Debug)]
#[command(name = "leastgrad", version, about = "Least gradient problems via boundary optimal transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Grid resolution (overrides the config).
    #[arg(long)]
    grid: Option<usize>,
    /// Diffuse atoms per sign run (overrides the config).
    #[arg(long)]
    diffuse: Option<usize>,
    /// Seed of the random suite.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal plan, reconstructed solution and total variation.
    Solve(Common),
    /// Kantorovich potential, rotated field z and duality gap.
    Dual(Common),
    /// Transport density grids, norms and boundary mass.
    Density(Common),
    /// Split of the plan by jump and diffuse endpoints.
    Sbv(Common),
    /// Stability experiments.
    Stability {
        #[command(subcommand)]
        which: StabilityCommand,
    },
    /// Hypothesis checks.
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
    /// Figures for the Brothers example.
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
    },
    /// Certificates over the seeded random suite.
    Suite(Common),
}

#[derive(Subcommand, Debug)]
enum StabilityCommand {
    /// Quantised data converging to the datum.
    Data(Common),
    /// Dilated discs shrinking to the domain.
    Domain(Common),
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Vertex continuity and edge monotonicity on a polygon.
    Monotone(Common),
}

#[derive(Subcommand, Debug)]
enum DemoCommand {
    Brothers(Common),
}

#[derive(Debug)]
pub enum Failure {
    /// Malformed input; exit code 2.
    Config(String),
    /// The problem is well posed but has no answer of the requested kind; exit code 1.
    Math(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Math(_) => 1,
        }
    }
}

impl From<leastgrad::Error> for Failure {
    fn from(e: leastgrad::Error) -> Self {
        if e.is_input_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Math(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("io: {e}"))
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Math(m) => eprintln!("error: {m}"),
            }
            f.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Solve(o) => cmd_solve(&o),
        Command::Dual(o) => cmd_dual(&o),
        Command::Density(o) => cmd_density(&o),
        Command::Sbv(o) => cmd_sbv(&o),
        Command::Stability {
            which: StabilityCommand::Data(o),
        } => cmd_stability_data(&o),
        Command::Stability {
            which: StabilityCommand::Domain(o),
        } => cmd_stability_domain(&o),
        Command::Check {
            which: CheckCommand::Monotone(o),
        } => cmd_check_monotone(&o),
        Command::Demo {
            which: DemoCommand::Brothers(o),
        } => cmd_demo_brothers(&o),
        Command::Suite(o) => cmd_suite(&o),
    }
}

fn load(o: &Common, required: bool) -> Result<RunConfig, Failure> {
    let mut cfg = match &o.config {
        Some(p) => RunConfig::from_path(p).map_err(Failure::Config)?,
        None if required => return Err(Failure::Config("--config is required".into())),
        None => RunConfig::default(),
    };
    if let Some(g) = o.grid {
        cfg.grid = g;
    }
    if let Some(d) = o.diffuse {
        cfg.n_diffuse = d;
    }
    cfg.validate().map_err(Failure::Config)?;
    Ok(cfg)
}

struct Setup {
    cfg: RunConfig,
    problem: Problem,
    cost: CostNorm,
    out: OutDir,
}

fn setup(o: &Common) -> Result<Setup, Failure> {
    let cfg = load(o, true)?;
    let problem = cfg.problem().map_err(Failure::Config)?;
    let cost = cfg.cost_norm().map_err(Failure::Config)?;
    let out = OutDir::create(&o.out)?;
    Ok(Setup { cfg, problem, cost, out })
}

/// Discretised measure and optimal plan; a constant datum gives the empty plan.
fn measure_and_plan(p: &Problem, n_diffuse: usize, cost: &CostNorm) -> Result<(BoundaryMeasurePair, TransportPlan), Failure> {
    match discretize(&tangential_derivative(&p.g), &p.domain, n_diffuse) {
        Ok(mu) => {
            let plan = solve_kantorovich(&mu, cost)?;
            Ok((mu, plan))
        }
        Err(leastgrad::Error::ZeroMeasure) => Ok((BoundaryMeasurePair::new(vec![], vec![])?, TransportPlan::empty())),
        Err(e) => Err(e.into()),
    }
}

fn canvas(domain: &ConvexDomain, extra_width: f64) -> Svg {
    let (lo, hi) = domain.bounding_box();
    let pad = 0.02 * (hi - lo).norm();
    let lo = lo - Vec2::new(pad, pad);
    let hi = hi + Vec2::new(pad + extra_width, pad);
    let span = (hi.x - lo.x).max(hi.y - lo.y);
    Svg::new(lo, hi, 480.0 / span.max(1e-12) * if extra_width > 0.0 { 2.0 } else { 1.0 })
}

fn draw_boundary(svg: &mut Svg, domain: &ConvexDomain, shift: Vec2) {
    let step = domain.boundary_length() / 720.0;
    let pts: Vec<Vec2> = domain.boundary_polyline(step).into_iter().map(|p| p + shift).collect();
    svg.polygon(&pts, "boundary", "none", "black");
}

fn draw_solution(svg: &mut Svg, domain: &ConvexDomain, sol: &PlanarSolution, shift: Vec2) {
    let (lo, hi) = sol.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    for (f, &v) in sol.arrangement.faces.iter().zip(&sol.values) {
        let pts: Vec<Vec2> = f.outline.iter().map(|&p| p + shift).collect();
        svg.polygon(&pts, "face", &diverging(v, lo, hi), "none");
    }
    let jumps = sol.chord_jumps();
    let jmax = jumps.iter().fold(0.0f64, |a, j| a.max(j.abs()));
    for (c, j) in sol.arrangement.chords.iter().zip(&jumps) {
        let w = if jmax > 0.0 { 0.3 + 2.0 * j.abs() / jmax } else { 0.3 };
        let shade = if jmax > 0.0 { (200.0 * (1.0 - j.abs() / jmax)) as u8 } else { 200 };
        let colour = format!("#{shade:02x}{shade:02x}{shade:02x}");
        svg.line(c.from + shift, c.to + shift, "chord", &colour, w);
    }
    draw_boundary(svg, domain, shift);
}

fn cmd_solve(o: &Common) -> Outcome {
    let s = setup(o)?;
    let (domain, g) = (&s.problem.domain, &s.problem.g);
    let (mu, plan) = measure_and_plan(&s.problem, s.cfg.n_diffuse, &s.cost)?;
    s.out.json("plan.json", &PlanJson::from_plan(&plan))?;
    let diag = plan_diagnostics(&plan, &mu);
    let sol = reconstruct(&plan, &mu, domain, g)?;
    s.out.json("solution.json", &SolutionJson::from_solution(&sol))?;
    let mut svg = canvas(domain, 0.0);
    draw_solution(&mut svg, domain, &sol, Vec2::ZERO);
    s.out.text("solution.svg", &svg.finish())?;
    let datum_variation = total_variation_boundary(g);
    let report = SolveReport {
        cost: plan.cost,
        total_variation: sol.total_variation(),
        tv_bound: 0.5 * domain.diameter() * datum_variation,
        datum_variation,
        diameter: domain.diameter(),
        atoms: [mu.positive().len(), mu.negative().len()],
        pairs: plan.pairs.len(),
        faces: sol.arrangement.faces.len(),
        enclosed_faces: sol.enclosed_faces().len(),
        max_marginal_residual: diag.max_marginal_residual,
        crossings: diag.crossing_count,
    };
    s.out.json("report.json", &report)?;
    println!(
        "cost {:.9}  total variation {:.9}  faces {}",
        report.cost, report.total_variation, report.faces
    );
    Ok(())
}

fn cmd_dual(o: &Common) -> Outcome {
    let s = setup(o)?;
    let domain = &s.problem.domain;
    let (mu, plan) = measure_and_plan(&s.problem, s.cfg.n_diffuse, &s.cost)?;
    let phi = dual_potentials(&plan, &mu, &s.cost)?;
    let gap = duality_report(&plan, &phi, &mu);
    let sat = saturation_defect(&plan, &phi, &s.cost);
    let ext = extend_potential(&phi, &s.cost);
    let grid = GridSpec::covering(domain, s.cfg.grid)?;
    let field = sample_field(&grid, |p| ext.eval(p));
    let z = dual_field_z(&field, Some(domain));
    s.out.json("potentials.json", &PotentialsJson::from_potential(&phi))?;
    s.out.text("phi.csv", &scalar_csv(&field, &z.inside))?;
    s.out.text("z.csv", &z_csv(&z))?;

    let masked: Vec<f64> = field
        .values
        .iter()
        .zip(&z.inside)
        .map(|(&v, &inside)| if inside { v } else { f64::NAN })
        .collect();
    let (lo, hi) = masked
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut svg = canvas(domain, 0.0);
    if hi > lo {
        for k in 1..20 {
            let level = lo + (hi - lo) * k as f64 / 20.0;
            for (a, b) in level_lines(&grid, &masked, level) {
                svg.line(a, b, "level", &diverging(level, lo, hi), 1.0);
            }
        }
    }
    for p in &plan.pairs {
        svg.line(p.source.xy, p.target.xy, "ray", "#999999", 0.3);
    }
    draw_boundary(&mut svg, domain, Vec2::ZERO);
    s.out.text("phi.svg", &svg.finish())?;

    let report = DualReport {
        cost: plan.cost,
        duality_gap: gap,
        saturation_defect: sat,
        lipschitz_violation: phi.lipschitz_violation(&s.cost),
        grid: s.cfg.grid,
        flagged_cells: z.flagged.len(),
        max_norm: z.max_norm,
        max_divergence: z.max_divergence,
        mean_divergence: z.mean_divergence,
    };
    s.out.json("report.json", &report)?;
    println!("cost {:.9}  duality gap {:.3e}  saturation defect {:.3e}", plan.cost, gap, sat);
    Ok(())
}

fn cmd_density(o: &Common) -> Outcome {
    let s = setup(o)?;
    let domain = &s.problem.domain;
    let (_, plan) = measure_and_plan(&s.problem, s.cfg.n_diffuse, &s.cost)?;
    let grid = GridSpec::covering(domain, s.cfg.grid)?;
    let dg = rasterize_density(&plan, &grid, Some(domain))?;
    let (lp, linf) = density_norms(&dg, s.cfg.norm_p, None)?;
    let split = sbv_split(&plan, &s.cost);
    s.out.text("density.csv", &density_csv(&dg))?;
    let report = DensityReport {
        cost: plan.cost,
        interior_mass: dg.interior_mass(),
        boundary_mass: dg.boundary_mass,
        boundary_mass_by_edge: boundary_mass_by_edge(&plan, domain),
        mass_defect: (dg.total_mass() - plan.cost).abs(),
        max_p_excess: if plan.pairs.is_empty() { 0.0 } else { dg.max_p_excess() },
        fragments: Fragments::from_costs(split.costs()),
        norms: Norms {
            p: s.cfg.norm_p,
            lp,
            linf,
        },
        grid: s.cfg.grid,
    };
    s.out.json("report.json", &report)?;
    println!(
        "cost {:.9}  interior mass {:.9}  boundary mass {:.9}",
        report.cost, report.interior_mass, report.boundary_mass
    );
    Ok(())
}

fn cmd_sbv(o: &Common) -> Outcome {
    let s = setup(o)?;
    let domain = &s.problem.domain;
    let (_, plan) = measure_and_plan(&s.problem, s.cfg.n_diffuse, &s.cost)?;
    let split = sbv_split(&plan, &s.cost);
    let costs = split.costs();
    let report = SbvReport {
        cost: plan.cost,
        fragments: Fragments::from_costs(costs),
        pair_counts: split.fragments().map(|f| f.pairs.len()),
        fragment_sum: costs.iter().sum(),
        singular_segments: split
            .singular_segments()
            .into_iter()
            .map(|(a, b, mass)| PairSegment {
                from: [a.x, a.y],
                to: [b.x, b.y],
                mass,
            })
            .collect(),
    };
    s.out.json("report.json", &report)?;
    let colours = ["#d62728", "#ff7f0e", "#2ca02c", "#1f77b4"];
    let names = ["g1", "g2", "g3", "g4"];
    let mut svg = canvas(domain, 0.0);
    for ((frag, colour), name) in split.fragments().iter().zip(colours).zip(names) {
        for p in &frag.pairs {
            svg.line(p.source.xy, p.target.xy, name, colour, 0.6);
        }
    }
    draw_boundary(&mut svg, domain, Vec2::ZERO);
    s.out.text("sbv.svg", &svg.finish())?;
    println!(
        "g1 {:.9}  g2 {:.9}  g3 {:.9}  g4 {:.9}  total {:.9}",
        costs[0], costs[1], costs[2], costs[3], plan.cost
    );
    Ok(())
}

fn stability_csv(r: &StabilityReport) -> String {
    let mut out = String::from("step,datum_variation,cost,total_variation,l1_distance,tv_gap,evaluated_points\n");
    for x in &r.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            x.step, x.datum_variation, x.cost, x.total_variation, x.l1_distance, x.tv_gap, x.evaluated_points
        ));
    }
    out
}

fn write_stability(out: &OutDir, r: &StabilityReport) -> Outcome {
    out.json("report.json", r)?;
    out.text("steps.csv", &stability_csv(r))?;
    for x in &r.records {
        println!("step {:>8}  L1 {:.6e}  TV gap {:.6e}", x.step, x.l1_distance, x.tv_gap);
    }
    Ok(())
}

fn cmd_stability_data(o: &Common) -> Outcome {
    let s = setup(o)?;
    let schedule = s.cfg.schedule.clone().unwrap_or_else(|| vec![8, 16, 32, 64]);
    let options = StabilityOptions {
        eval_grid: s.cfg.grid,
        n_diffuse: s.cfg.n_diffuse,
        ..StabilityOptions::default()
    };
    let u1 = |p: Vec2| brothers_reference(BrothersCase::U1, p).map(|v| v.scalar().unwrap_or(f64::NAN));
    let u2 = |p: Vec2| brothers_reference(BrothersCase::U2(0.0), p).map(|v| v.scalar().unwrap_or(f64::NAN));
    let reference = match s.cfg.reference.as_deref() {
        Some("brothers-u1") => StabilityReference::Exact {
            u: &u1,
            total_variation: BROTHERS_U1_TV,
        },
        Some("brothers-u2") => StabilityReference::Exact {
            u: &u2,
            total_variation: BROTHERS_U2_TV,
        },
        _ => StabilityReference::Finest,
    };
    let r = run_data_stability(&s.problem.domain, &s.problem.g, &schedule, reference, options)?;
    write_stability(&s.out, &r)
}

fn cmd_stability_domain(o: &Common) -> Outcome {
    let s = setup(o)?;
    let eps = s.cfg.eps_schedule.clone().unwrap_or_else(|| vec![0.2, 0.1, 0.05]);
    let options = StabilityOptions {
        eval_grid: s.cfg.grid,
        n_diffuse: s.cfg.n_diffuse,
        ..StabilityOptions::default()
    };
    let r = run_domain_approx(&s.problem.domain, &s.problem.g, &eps, options)?;
    write_stability(&s.out, &r)
}

fn cmd_check_monotone(o: &Common) -> Outcome {
    let s = setup(o)?;
    let verdict = check_monotone_polygon(&s.problem.domain, &s.problem.g, s.cfg.n_diffuse)?;
    s.out.json("report.json", &verdict)?;
    match verdict.outcome {
        MonotoneOutcome::Solved { .. } => {
            println!("{}", verdict.message());
            Ok(())
        }
        _ => Err(Failure::Math(verdict.message())),
    }
}

fn shifted_grid_values(grid: &GridSpec, shift: f64, f: impl Fn(Vec2) -> Option<f64>) -> Vec<f64> {
    (0..grid.len())
        .map(|k| {
            let (ix, iy) = grid.coords(k);
            let p = grid.cell_center(ix, iy);
            if p.norm() >= 1.0 {
                return f64::NAN;
            }
            f(p).map_or(f64::NAN, |v| v - shift)
        })
        .collect()
}

fn cmd_demo_brothers(o: &Common) -> Outcome {
    let mut cfg = load(o, false)?;
    if o.diffuse.is_none() && o.config.is_none() {
        cfg.n_diffuse = 180;
    }
    let out = OutDir::create(&o.out)?;
    let disc = ConvexDomain::unit_disc();
    let euclid = CostNorm::Euclidean;

    let g1 = Problem {
        domain: disc.clone(),
        g: brothers_g1(cfg.nodes)?,
    };
    let (mu1, plan1) = measure_and_plan(&g1, cfg.n_diffuse, &euclid)?;
    let sol1 = reconstruct(&plan1, &mu1, &disc, &g1.g)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (mut dev, mut count) = (0.0, 0usize);
    for i in 0..100 {
        for j in 0..100 {
            let p = Vec2::new(-1.0 + (i as f64 + 0.5) / 50.0, -1.0 + (j as f64 + 0.5) / 50.0);
            if p.norm() >= 1.0 || (p.x.abs() - r).abs() < 0.02 || (p.y.abs() - r).abs() < 0.02 {
                continue;
            }
            let exact = brothers_reference(BrothersCase::U1, p)?.scalar().unwrap_or(f64::NAN);
            if let Ok(v) = sol1.evaluate(p) {
                dev += (v - exact).abs();
                count += 1;
            }
        }
    }

    // Two potentials: the closed form and the solver's infimal convolution.
    let phi = dual_potentials(&plan1, &mu1, &euclid)?;
    let min_atom = phi.atoms().fold(f64::INFINITY, |a, (_, v)| a.min(v));
    let ext = extend_potential(&phi, &euclid);
    let grid = GridSpec::covering(&disc, cfg.grid)?;
    let closed = shifted_grid_values(&grid, 0.0, |p| {
        let nudged = p + Vec2::new(1e-9, 0.0);
        brothers_reference(BrothersCase::Phi1, p)
            .or_else(|_| brothers_reference(BrothersCase::Phi1, nudged))
            .ok()
            .and_then(|v| v.scalar())
    });
    let solved = shifted_grid_values(&grid, min_atom, |p| Some(ext.eval(p)));
    let gap = 2.3;
    let mut svg = canvas(&disc, gap);
    let top = 1.0 + r;
    for (panel, values) in [&closed, &solved].into_iter().enumerate() {
        let shift = Vec2::new(gap * panel as f64, 0.0);
        for k in 1..18 {
            let level = 0.1 * k as f64;
            for (a, b) in level_lines(&grid, values, level) {
                svg.line(a + shift, b + shift, "level", &diverging(level, 0.0, top), 1.0);
            }
        }
        draw_boundary(&mut svg, &disc, shift);
    }
    out.text("potentials.svg", &svg.finish())?;

    let g2 = Problem {
        domain: disc.clone(),
        g: brothers_g2(cfg.nodes.div_ceil(4).max(2))?,
    };
    let (mu2, plan2) = measure_and_plan(&g2, cfg.n_diffuse, &euclid)?;
    let sol2 = reconstruct(&plan2, &mu2, &disc, &g2.g)?;
    let mut svg = canvas(&disc, 0.0);
    draw_solution(&mut svg, &disc, &sol2, Vec2::ZERO);
    let corners = [Vec2::new(r, r), Vec2::new(-r, r), Vec2::new(-r, -r), Vec2::new(r, -r)];
    svg.polygon(&corners, "square", "none", "#000000");
    out.text("u_lambda.svg", &svg.finish())?;

    let split = sbv_split(&plan2, &euclid);
    let report = DemoReport {
        n_diffuse: cfg.n_diffuse,
        g1_cost: plan1.cost,
        g1_total_variation: sol1.total_variation(),
        u1_mean_abs_deviation: if count > 0 { dev / count as f64 } else { f64::NAN },
        g2_total_variation: sol2.total_variation(),
        g2_singular_cost: split.costs()[0],
        g2_enclosed_values: sol2.enclosed_faces().iter().map(|&f| sol2.values[f]).collect(),
    };
    out.json("report.json", &report)?;
    println!(
        "g1 cost {:.9}  mean |u - u1| {:.3e}  g2 singular cost {:.9}",
        report.g1_cost, report.u1_mean_abs_deviation, report.g2_singular_cost
    );
    Ok(())
}

fn cmd_suite(o: &Common) -> Outcome {
    let cfg = load(o, false)?;
    let seed = o.seed.unwrap_or(0);
    let count = cfg.suite_count.unwrap_or(200);
    let out = OutDir::create(&o.out)?;
    let euclid = CostNorm::Euclidean;
    let mut entries = Vec::with_capacity(count);
    for inst in random_suite(seed, count)? {
        let problem = Problem {
            domain: inst.domain.clone(),
            g: inst.g.clone(),
        };
        let (mu, plan) = measure_and_plan(&problem, inst.n_diffuse, &euclid)?;
        let phi = dual_potentials(&plan, &mu, &euclid)?;
        let grid = GridSpec::covering(&inst.domain, cfg.grid)?;
        let dg = rasterize_density(&plan, &grid, Some(&inst.domain))?;
        let tv_bound = 0.5 * inst.domain.diameter() * total_variation_boundary(&inst.g);
        let (total_variation, outcome) = match reconstruct(&plan, &mu, &inst.domain, &inst.g) {
            Ok(sol) => (Some(sol.total_variation()), "reconstructed".to_string()),
            Err(e) => (None, e.to_string()),
        };
        entries.push(SuiteEntry {
            index: inst.index,
            domain: domain_label(&inst.domain),
            atoms: [mu.positive().len(), mu.negative().len()],
            cost: plan.cost,
            duality_gap: duality_report(&plan, &phi, &mu),
            saturation_defect: saturation_defect(&plan, &phi, &euclid),
            crossings: plan_diagnostics(&plan, &mu).crossing_count,
            mass_defect: (dg.total_mass() - plan.cost).abs(),
            tv_bound,
            total_variation,
            outcome,
        });
    }
    let rel = |x: f64, c: f64| x / c.max(1.0);
    let report = SuiteReport {
        seed,
        instances: entries.len(),
        reconstructed: entries.iter().filter(|e| e.total_variation.is_some()).count(),
        max_relative_gap: entries.iter().map(|e| rel(e.duality_gap, e.cost)).fold(0.0, f64::max),
        max_saturation_defect: entries.iter().map(|e| e.saturation_defect).fold(0.0, f64::max),
        total_crossings: entries.iter().map(|e| e.crossings).sum(),
        max_relative_mass_defect: entries
            .iter()
            .map(|e| if e.cost > 0.0 { e.mass_defect / e.cost } else { e.mass_defect })
            .fold(0.0, f64::max),
        tv_bound_violations: entries
            .iter()
            .filter(|e| e.total_variation.is_some_and(|tv| tv > e.tv_bound + 1e-9))
            .count(),
        entries,
    };
    out.json("report.json", &report)?;
    println!(
        "{} instances  {} reconstructed  max gap {:.3e}  crossings {}  TV bound violations {}",
        report.instances, report.reconstructed, report.max_relative_gap, report.total_crossings, report.tv_bound_violations
    );
    Ok(())
}
