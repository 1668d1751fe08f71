use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use knotfold::io::{self, GridFile, PlanFile, VerdictFile};
use knotfold::knot::{grid_search, parse_gauss_code, random_knot_grid, GaussCode, GridDiagram, MAX_SEARCH_SIZE};
use knotfold::representation::{
    format_cut_list, plan_grid, rescale_for_cable, sample_curve, verify_plan, verify_samples, KnotPlan, PlanParams,
    Verdict,
};
use knotfold::sim::{run, SimConfig};
use knotfold::trajectory::{plan_motion, MotionConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{CheckArgs, GeometryArgs, KnotSource, PlanArgs, SearchArgs, SimulateArgs, VerifyArgs};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    NotFound(String),
    Incomplete(String),
    Mismatch(String),
    Inconclusive(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Invalid(_) => 1,
            CliError::NotFound(_) => 2,
            CliError::Incomplete(_) => 3,
            CliError::Mismatch(_) => 4,
            CliError::Inconclusive(_) => 5,
        })
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Invalid(m)
            | CliError::NotFound(m)
            | CliError::Incomplete(m)
            | CliError::Mismatch(m)
            | CliError::Inconclusive(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

type CliResult = Result<(), CliError>;

struct Resolved {
    name: Option<String>,
    grid: GridDiagram,
}

fn parse_code(text: &str) -> Result<GaussCode, CliError> {
    parse_gauss_code(text).map_err(invalid)
}

fn search(code: &GaussCode, n_max: usize) -> Result<GridDiagram, CliError> {
    if n_max > MAX_SEARCH_SIZE {
        return Err(CliError::Invalid(format!("--nmax {n_max} exceeds the search limit {MAX_SEARCH_SIZE}")));
    }
    let out = grid_search(code, n_max);
    eprintln!("searched {} candidates in {:.3} s", out.candidates_examined, out.elapsed.as_secs_f64());
    out.diagram.ok_or_else(|| {
        CliError::NotFound(format!("no grid diagram up to {n_max}x{n_max}; supply one with --grid"))
    })
}

fn resolve(source: &KnotSource, n_max: usize) -> Result<Resolved, CliError> {
    let given = [source.knot.is_some(), source.gauss.is_some(), source.grid.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(CliError::Invalid("give exactly one of --knot, --gauss, --grid".into()));
    }
    if let Some(name) = &source.knot {
        let file = io::load_asset(name).map_err(invalid)?;
        return Ok(Resolved { name: file.name.clone().or(Some(name.clone())), grid: file.grid() });
    }
    if let Some(text) = &source.gauss {
        let code = parse_code(text)?;
        return Ok(Resolved { name: None, grid: search(&code, n_max)? });
    }
    let path = source.grid.as_ref().expect("grid source");
    let file = io::read_grid(path).map_err(invalid)?;
    Ok(Resolved { name: file.name.clone(), grid: file.grid() })
}

fn plan_params(g: &GeometryArgs) -> PlanParams {
    PlanParams { z_p: g.zp, ..PlanParams::new(g.d, g.hmin) }
}

fn build(resolved: &Resolved, g: &GeometryArgs) -> Result<(PlanParams, KnotPlan), CliError> {
    let params = plan_params(g);
    match g.cable_length {
        Some(len) => {
            let r = rescale_for_cable(&resolved.grid, &params, len).map_err(invalid)?;
            eprintln!("rescaled by {:.6}: d = {:.6}, h_min = {:.6}", r.scale, r.params.d, r.params.h_min);
            Ok((r.params, r.plan))
        }
        None => plan_grid(&resolved.grid, &params).map(|p| (params, p)).map_err(invalid),
    }
}

fn create_out(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| CliError::Invalid(format!("{}: {e}", dir.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn print_plan(plan: &KnotPlan) {
    println!(
        "grid {n}x{n}, robots {}, segments {}, crossings {}",
        plan.n_robots(),
        plan.lengths.len(),
        plan.clearances.len(),
        n = plan.polyline.grid_size
    );
    println!(
        "d = {}, h_min = {}, h_max = {:.6}, z_p = {:.6}",
        plan.cell_width, plan.h_min, plan.h_max, plan.plane_height
    );
    println!("total cable length = {:.6}", plan.total_length);
    if let Some(c) = plan.min_clearance() {
        println!("min crossing clearance = {c:.6}");
    }
}

pub fn plan(args: &PlanArgs) -> CliResult {
    let resolved = resolve(&args.source, args.geometry.nmax)?;
    let started = Instant::now();
    let (params, plan) = build(&resolved, &args.geometry)?;
    let elapsed = started.elapsed();
    let report = verify_plan(&plan, args.geometry.samples).map_err(invalid)?;

    create_out(&args.out)?;
    let file = PlanFile::new(resolved.name.clone(), resolved.grid.clone(), params, plan.clone());
    io::write_plan(&args.out.join("plan.json"), &file).map_err(invalid)?;
    fs::write(args.out.join("cut_list.txt"), format_cut_list(&plan)).map_err(invalid)?;
    let grid = GridFile { name: resolved.name.clone(), gauss: Some(plan.target.clone()), ..GridFile::from_grid(&resolved.grid) };
    io::write_grid(&args.out.join("grid.json"), &grid).map_err(invalid)?;
    let samples = sample_curve(&plan.curve, args.geometry.samples, Some(plan.polyline.closing_anchor));
    io::write_samples_csv(create(&args.out.join("curve_samples.csv"))?, &samples).map_err(invalid)?;

    print_plan(&plan);
    println!("gauss code: {}", plan.target);
    println!("topology check: {:?}", report.verdict);
    println!("planning time = {:.6} s", elapsed.as_secs_f64());
    Ok(())
}

fn load_or_plan(args: &SimulateArgs) -> Result<(Option<String>, KnotPlan, PlanFile), CliError> {
    if let Some(path) = &args.plan {
        if args.source.knot.is_some() || args.source.gauss.is_some() || args.source.grid.is_some() {
            return Err(CliError::Invalid("--plan replaces --knot/--gauss/--grid".into()));
        }
        let file = io::read_plan(path).map_err(invalid)?;
        return Ok((file.name.clone(), file.plan.clone(), file));
    }
    let resolved = resolve(&args.source, args.geometry.nmax)?;
    let (params, plan) = build(&resolved, &args.geometry)?;
    let file = PlanFile::new(resolved.name.clone(), resolved.grid, params, plan.clone());
    Ok((resolved.name, plan, file))
}

pub fn simulate(args: &SimulateArgs) -> CliResult {
    let started = Instant::now();
    let (_, plan, file) = load_or_plan(args)?;
    let motion_cfg = MotionConfig { v_ref: args.vref, t_floor: args.t_floor, t_entry: args.t_entry, ..MotionConfig::default() };
    let motion = plan_motion(plan.targets(), &plan.lengths, plan.h_max, args.td, &motion_cfg).map_err(invalid)?;
    for w in &motion.schedule.warnings {
        eprintln!("warning: {w}");
    }
    let sim_cfg = SimConfig {
        dt: args.dt,
        kp: args.kp,
        kd: args.kd,
        eps_pos: args.eps_pos.unwrap_or(0.01 * plan.cell_width),
        max_time: args.max_time,
        record_every: args.record_every,
        samples: args.geometry.samples,
    };
    let trace = run(&plan, &motion, &sim_cfg).map_err(invalid)?;
    let verdict = VerdictFile::new(&plan, &trace, started.elapsed().as_secs_f64());

    create_out(&args.out)?;
    io::write_plan(&args.out.join("plan.json"), &file).map_err(invalid)?;
    io::write_trajectory(&args.out.join("trajectory.json"), &motion).map_err(invalid)?;
    io::write_trace_csv(create(&args.out.join("trace.csv"))?, &trace).map_err(invalid)?;
    io::write_margins_csv(create(&args.out.join("margins.csv"))?, &trace).map_err(invalid)?;
    io::write_verdict(&args.out.join("verdict.json"), &verdict).map_err(invalid)?;

    print_plan(&plan);
    println!("t_d = {:.6}, trajectory duration = {:.3} s", motion.schedule.t_d, motion.trajectory.duration());
    println!("simulated to t = {:.3} s in {} steps", trace.outcome.final_time, trace.outcome.steps);
    println!("cable violations after entry: {}", verdict.violations_after_entry.len());
    println!("target:    {}", plan.target.canonical());
    if let Some(code) = &verdict.extracted {
        println!("extracted: {}", code.canonical());
    }
    println!("status: {}", verdict.status);
    match verdict.status.as_str() {
        "match" => Ok(()),
        "mismatch" => Err(CliError::Mismatch("final cable does not match the target knot".into())),
        "inconclusive" => Err(CliError::Inconclusive("degenerate crossing in the final cable; raise --samples".into())),
        _ => Err(CliError::Incomplete(format!(
            "robots did not all reach their targets within {} s of simulated time",
            args.max_time
        ))),
    }
}

pub fn verify(args: &VerifyArgs) -> CliResult {
    let target = parse_code(&args.gauss)?;
    let file = File::open(&args.samples).map_err(|e| CliError::Invalid(format!("{}: {e}", args.samples.display())))?;
    let samples = io::read_samples_csv(file).map_err(invalid)?;
    let report = verify_samples(&samples, &target, 0);
    println!("target:    {}", target.canonical());
    match &report.extracted {
        Some(code) => println!("extracted: {}", code.canonical()),
        None => println!("extracted: (none)"),
    }
    match report.verdict {
        Verdict::Match => {
            println!("match");
            Ok(())
        }
        Verdict::Mismatch => Err(CliError::Mismatch("Gauss codes differ".into())),
        Verdict::Inconclusive => Err(CliError::Inconclusive(report.note.unwrap_or_else(|| "inconclusive".into()))),
    }
}

pub fn search_cmd(args: &SearchArgs) -> CliResult {
    let code = parse_code(&args.gauss)?;
    let grid = search(&code, args.nmax)?;
    create_out(&args.out)?;
    let file = GridFile {
        gauss: Some(code),
        provenance: Some(format!("search-derived: grid_search with N_max = {}", args.nmax)),
        ..GridFile::from_grid(&grid)
    };
    let path = args.out.join("grid.json");
    io::write_grid(&path, &file).map_err(invalid)?;
    println!("found {n}x{n} diagram, written to {}", path.display(), n = grid.n);
    print!("{grid}");
    Ok(())
}

pub fn check(args: &CheckArgs) -> CliResult {
    if args.nmax < 2 {
        return Err(CliError::Invalid("--nmax must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut failures = 0;
    for k in 0..args.count {
        let n = rng.gen_range(2..=args.nmax);
        let grid = random_knot_grid(n, &mut rng, 10_000).ok_or_else(|| CliError::Invalid("no knot drawn".into()))?;
        let params = PlanParams::new(rng.gen_range(0.5..=4.0), rng.gen_range(0.5..=3.0));
        let outcome = plan_grid(&grid, &params).map_err(|e| e.to_string()).and_then(|plan| {
            verify_plan(&plan, args.samples).map(|r| (plan, r)).map_err(|e| e.to_string())
        });
        match outcome {
            Ok((plan, report)) if report.is_match() => {
                println!("{k:>4}: {n}x{n}, {} crossings, min clearance {:.4}: ok", plan.clearances.len(), plan.min_clearance().unwrap_or(f64::NAN));
            }
            Ok((_, report)) => {
                failures += 1;
                println!("{k:>4}: {n}x{n}: {:?}\n{grid}", report.verdict);
            }
            Err(e) => {
                failures += 1;
                println!("{k:>4}: {n}x{n}: {e}\n{grid}");
            }
        }
    }
    println!("{} of {} diagrams preserved their topology", args.count - failures, args.count);
    if failures > 0 {
        return Err(CliError::Mismatch(format!("{failures} diagrams failed")));
    }
    Ok(())
}
