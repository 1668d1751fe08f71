//! Plans and simulates a bundled knot and prints a short report.
//!
//! Usage: `cargo run --release --example fold_report -- <knot> <d> <h_min> [t_d]`

use std::time::Instant;

use knotfold::io::load_asset;
use knotfold::representation::{plan_grid, verify_plan, PlanParams, DEFAULT_SAMPLES};
use knotfold::sim::{audit_margins, run, SimConfig};
use knotfold::trajectory::{plan_motion, MotionConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map(String::as_str).unwrap_or("overhand");
    let d: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let h_min: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1.34);
    let t_d: Option<f64> = args.get(4).and_then(|s| s.parse().ok());

    let grid = load_asset(name).expect("asset").grid();
    let started = Instant::now();
    let plan = plan_grid(&grid, &PlanParams::new(d, h_min)).expect("plan");
    let planned = started.elapsed();
    println!("{name}: N = {}, n = {}, crossings = {}", grid.n, plan.n_robots(), plan.clearances.len());
    println!("h_max = {:.6}, z_p = {:.6}, total length = {:.6}", plan.h_max, plan.plane_height, plan.total_length);
    println!("lengths = {:.3?}", plan.lengths);
    println!("clearances = {:.4?}", plan.clearances);
    println!("planning took {planned:?}");
    let report = verify_plan(&plan, DEFAULT_SAMPLES).expect("verify");
    println!("plan topology: {:?} (min gap {:?})", report.verdict, report.min_abs_gap);

    let motion = plan_motion(plan.targets(), &plan.lengths, plan.h_max, t_d, &MotionConfig::default()).expect("motion");
    println!(
        "t_d = {:.4}, trajectory {:.2} s, schedule [{:.2}, {:.2}]",
        motion.schedule.t_d,
        motion.trajectory.duration(),
        motion.schedule.begin(),
        motion.schedule.end()
    );
    let started = Instant::now();
    let trace = run(&plan, &motion, &SimConfig::for_cell_width(d)).expect("sim");
    let o = &trace.outcome;
    println!("simulation took {:?}, completed = {}, final t = {:.3}", started.elapsed(), o.completed, o.final_time);
    println!("max final error = {:.3e}", o.final_errors.iter().cloned().fold(0.0, f64::max));
    println!("max tracking error = {:.3e}", o.max_tracking_errors.iter().cloned().fold(0.0, f64::max));
    println!("violations = {}, after entry = {}", trace.violations.len(), trace.violations_after_entry().len());
    for v in trace.violations_after_entry().iter().take(10) {
        println!("  pair {} [{:.3}, {:.3}] worst {:.4}", v.pair, v.start, v.end, v.worst);
    }
    println!("floor contacts = {}", trace.floor_contacts.len());
    let audit = audit_margins(&trace);
    let worst = audit.pairs.iter().map(|p| p.min_margin).fold(f64::INFINITY, f64::min);
    println!("min margin = {worst:.4}, entry ends at {:.3}", o.entry_end);
    if let Some(t) = &o.topology {
        println!("final topology: {:?} extracted {:?}", t.verdict, t.extracted.as_ref().map(|c| c.to_string()));
    }
}
