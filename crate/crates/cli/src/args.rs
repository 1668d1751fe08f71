//! Command-line arguments. Every constant the planner or simulator needs is
//! a flag here, with its default in one place.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod defaults {
    /// Grid cell width (m).
    pub const D: f64 = 1.0;
    /// Sag of catenaries that pass over every crossing (m).
    pub const H_MIN: f64 = 1.0;
    /// Largest grid tried when searching for a diagram of a Gauss code.
    pub const N_MAX: usize = 7;
    /// Trajectory cruise speed (m/s).
    pub const V_REF: f64 = 1.0;
    /// Shortest quintic interval (s).
    pub const T_FLOOR: f64 = 0.5;
    /// Duration of the move from the floor to the trajectory start (s).
    pub const T_ENTRY: f64 = 3.0;
    pub const KP: f64 = 25.0;
    pub const KD: f64 = 10.0;
    pub const DT: f64 = 1e-3;
    /// Simulated time budget (s).
    pub const MAX_TIME: f64 = 1e4;
    pub const RECORD_EVERY: usize = 10;
    /// Samples per segment for topology checks.
    pub const SAMPLES: usize = 128;
    /// Randomized diagrams drawn by `check`.
    pub const CHECK_COUNT: usize = 50;
}

#[derive(Debug, Parser)]
#[command(name = "knotfold", version, about = "Plan and simulate knot folding with cable-carrying aerial robots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the multi-catenary plan and cable cut list for a knot.
    Plan(PlanArgs),
    /// Plan (or load a plan), generate the folding trajectory and simulate it.
    Simulate(SimulateArgs),
    /// Check the Gauss code of a sampled closed curve against a target.
    Verify(VerifyArgs),
    /// Search for the smallest grid diagram of a Gauss code.
    Search(SearchArgs),
    /// Plan and verify randomly drawn grid diagrams.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct KnotSource {
    /// Bundled knot: overhand, figure-eight or carrick.
    #[arg(long)]
    pub knot: Option<String>,
    /// Gauss code such as "1- 2+ 3- 1+ 2- 3+"; an empty string is the unknot.
    #[arg(long, allow_hyphen_values = true)]
    pub gauss: Option<String>,
    /// Grid diagram JSON file.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Grid cell width.
    #[arg(long = "d", default_value_t = defaults::D)]
    pub d: f64,
    /// Sag of catenaries that do not pass under a crossing.
    #[arg(long, default_value_t = defaults::H_MIN)]
    pub hmin: f64,
    /// Height of the target plane [default: 2.5·h_max].
    #[arg(long)]
    pub zp: Option<f64>,
    /// Rescale the grid so the plan uses a cable of this length.
    #[arg(long)]
    pub cable_length: Option<f64>,
    /// Largest grid tried when searching for a Gauss code's diagram.
    #[arg(long, default_value_t = defaults::N_MAX)]
    pub nmax: usize,
    /// Samples per catenary segment for topology checks.
    #[arg(long, default_value_t = defaults::SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub source: KnotSource,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: KnotSource,
    /// Plan JSON written by `knotfold plan` (replaces the knot source).
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Start delay between consecutive robots [default: mean segment length / v_ref].
    #[arg(long)]
    pub td: Option<f64>,
    #[arg(long, default_value_t = defaults::V_REF)]
    pub vref: f64,
    #[arg(long, default_value_t = defaults::T_FLOOR)]
    pub t_floor: f64,
    #[arg(long, default_value_t = defaults::T_ENTRY)]
    pub t_entry: f64,
    /// Proportional gain (1/s²).
    #[arg(long, default_value_t = defaults::KP)]
    pub kp: f64,
    /// Derivative gain (1/s).
    #[arg(long, default_value_t = defaults::KD)]
    pub kd: f64,
    /// Integration step (s).
    #[arg(long, default_value_t = defaults::DT)]
    pub dt: f64,
    /// Arrival tolerance [default: 0.01·d].
    #[arg(long)]
    pub eps_pos: Option<f64>,
    /// Simulated time budget (s).
    #[arg(long, default_value_t = defaults::MAX_TIME)]
    pub max_time: f64,
    /// Write every k-th step to the trace files.
    #[arg(long, default_value_t = defaults::RECORD_EVERY)]
    pub record_every: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// CSV of x,y,z samples of a closed curve (header optional).
    pub samples: PathBuf,
    /// Target Gauss code.
    #[arg(long, allow_hyphen_values = true)]
    pub gauss: String,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Gauss code to realize.
    #[arg(long, allow_hyphen_values = true)]
    pub gauss: String,
    /// Largest grid size to try (at most 7).
    #[arg(long, default_value_t = defaults::N_MAX)]
    pub nmax: usize,
    /// Output directory for grid.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Seed for the diagram generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of diagrams.
    #[arg(long, default_value_t = defaults::CHECK_COUNT)]
    pub count: usize,
    /// Largest grid size drawn.
    #[arg(long, default_value_t = 6)]
    pub nmax: usize,
    #[arg(long, default_value_t = defaults::SAMPLES)]
    pub samples: usize,
}
