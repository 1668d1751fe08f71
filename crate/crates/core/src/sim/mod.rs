//! Fixed-step simulation of double-integrator robots carrying the cable
//! through the folding schedule.

mod audit;
mod cable;

pub use audit::{audit_margins, MarginAudit, PairAudit};
pub use cable::{cable_state, hang, CableSegment, CableState, Overstretch, TAUT_TOL};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::representation::{verify_samples, KnotPlan, TopologyReport, DEFAULT_SAMPLES, MIN_SAMPLES};
use crate::trajectory::{eval_trajectory, FoldPlan, Kinematics};
use crate::Point3;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation setting {name} = {value}")]
    BadConfig { name: &'static str, value: f64 },
    #[error("plan has {plan} robots but the schedule has {schedule}")]
    Mismatch { plan: usize, schedule: usize },
    #[error("robot {robot} state became non-finite at t = {t}")]
    NonFinite { robot: usize, t: f64, trace: Box<SimTrace> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    Waiting,
    Entering,
    Tracking,
    Holding,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Waiting => "waiting",
            Phase::Entering => "entering",
            Phase::Tracking => "tracking",
            Phase::Holding => "holding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub position: Point3,
    pub velocity: Point3,
    pub phase: Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub kp: f64,
    pub kd: f64,
    /// Distance to the target within which a robot may hold.
    pub eps_pos: f64,
    /// Simulated time budget measured from the first entry move.
    pub max_time: f64,
    /// Keep every `record_every`-th step in the trace.
    pub record_every: usize,
    /// Sampling density for the final topology check.
    pub samples: usize,
}

impl SimConfig {
    /// Defaults for a grid of cell width `d`: `ε_pos = 0.01·d`.
    pub fn for_cell_width(d: f64) -> Self {
        SimConfig { dt: 1e-3, kp: 25.0, kd: 10.0, eps_pos: 0.01 * d, max_time: 1e4, record_every: 10, samples: DEFAULT_SAMPLES }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [("dt", self.dt), ("kp", self.kp), ("kd", self.kd), ("eps_pos", self.eps_pos), ("max_time", self.max_time)];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SimError::BadConfig { name, value });
            }
        }
        if self.record_every == 0 {
            return Err(SimError::BadConfig { name: "record_every", value: 0.0 });
        }
        if self.samples < MIN_SAMPLES {
            return Err(SimError::BadConfig { name: "samples", value: self.samples as f64 });
        }
        Ok(())
    }
}

/// Reference the robot tracks at global time `t`, by phase.
fn reference(i: usize, phase: Phase, t: f64, motion: &FoldPlan) -> Option<Kinematics> {
    let r = &motion.schedule.robots[i];
    match phase {
        Phase::Waiting => None,
        Phase::Entering => Some(r.entry.eval(t)),
        Phase::Tracking => Some(eval_trajectory(&motion.trajectory, (t - r.start).min(r.stop))),
        Phase::Holding => Some((r.target, Point3::zeros(), Point3::zeros())),
    }
}

/// Tracking law `u = k_p(γ - p) + k_d(γ̇ - ṗ) + γ̈`.
pub fn pd_feedforward(reference: Kinematics, position: Point3, velocity: Point3, kp: f64, kd: f64) -> Point3 {
    let (p, v, a) = reference;
    (p - position) * kp + (v - velocity) * kd + a
}

/// Command for robot `i` at global time `t`. Entering robots track their
/// entry move, tracking robots the shared trajectory at `t - t_d(n - i)`,
/// holding robots their target; waiting robots only damp velocity.
pub fn control(i: usize, state: &RobotState, t: f64, motion: &FoldPlan, cfg: &SimConfig) -> Point3 {
    match reference(i, state.phase, t, motion) {
        None => -state.velocity * cfg.kd,
        Some(r) => pd_feedforward(r, state.position, state.velocity, cfg.kp, cfg.kd),
    }
}

/// Semi-implicit Euler: velocity first, then position with the new velocity.
pub fn integrate(state: &mut RobotState, u: Point3, dt: f64) {
    state.velocity += u * dt;
    state.position += state.velocity * dt;
}

fn next_phase(i: usize, state: &RobotState, t: f64, motion: &FoldPlan, cfg: &SimConfig) -> Option<Phase> {
    let r = &motion.schedule.robots[i];
    match state.phase {
        Phase::Waiting if t >= r.entry_start() => Some(Phase::Entering),
        Phase::Entering if t >= r.start => Some(Phase::Tracking),
        Phase::Tracking if t - r.start >= r.stop && (state.position - r.target).norm() <= cfg.eps_pos => {
            Some(Phase::Holding)
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseChange {
    pub step: u64,
    pub t: f64,
    pub robot: usize,
    pub from: Phase,
    pub to: Phase,
}

/// A time interval during which a condition held for one cable segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub pair: usize,
    pub start: f64,
    pub end: f64,
    /// Worst overstretch (violations) or lowest cable height (floor contact).
    pub worst: f64,
}

/// One recorded step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: u64,
    pub t: f64,
    pub robots: Vec<RobotState>,
    pub controls: Vec<Point3>,
    /// `ℓ_i - ‖p_i - p_{i+1}‖` for each pair.
    pub margins: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    /// All robots reached `Holding` within the time budget.
    pub completed: bool,
    pub final_time: f64,
    pub steps: u64,
    /// Distance of each robot from its target at the end.
    pub final_errors: Vec<f64>,
    /// Largest tracking error of each robot while following the trajectory.
    pub max_tracking_errors: Vec<f64>,
    /// Smallest margin of each pair over every step.
    pub min_margins: Vec<f64>,
    /// End of the entry phase (last robot on the trajectory).
    pub entry_end: f64,
    pub topology: Option<TopologyReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub dt: f64,
    pub record_every: usize,
    pub rows: Vec<TraceRow>,
    pub events: Vec<PhaseChange>,
    pub violations: Vec<Interval>,
    pub floor_contacts: Vec<Interval>,
    pub outcome: SimOutcome,
}

impl SimTrace {
    /// Violations that begin or persist after the entry phase.
    pub fn violations_after_entry(&self) -> Vec<Interval> {
        self.violations.iter().copied().filter(|v| v.end > self.outcome.entry_end).collect()
    }
}

/// Tracks open intervals per pair.
struct IntervalLog {
    open: Vec<Option<Interval>>,
    closed: Vec<Interval>,
}

impl IntervalLog {
    fn new(pairs: usize) -> Self {
        IntervalLog { open: vec![None; pairs], closed: Vec::new() }
    }

    /// Records the state of `pair` at time `t`; `value` is `Some` while
    /// the condition holds. `worse` picks the more severe value.
    fn update(&mut self, pair: usize, t: f64, value: Option<f64>, worse: fn(f64, f64) -> f64) {
        match (&mut self.open[pair], value) {
            (Some(iv), Some(v)) => {
                iv.end = t;
                iv.worst = worse(iv.worst, v);
            }
            (slot @ None, Some(v)) => *slot = Some(Interval { pair, start: t, end: t, worst: v }),
            (slot @ Some(_), None) => self.closed.push(slot.take().expect("open interval")),
            (None, None) => {}
        }
    }

    fn finish(mut self) -> Vec<Interval> {
        self.closed.extend(self.open.into_iter().flatten());
        self.closed.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.pair.cmp(&b.pair)));
        self.closed
    }
}

/// Runs the folding schedule until every robot holds or time runs out,
/// then checks the topology of the final cable against the plan.
pub fn run(plan: &KnotPlan, motion: &FoldPlan, cfg: &SimConfig) -> Result<SimTrace, SimError> {
    cfg.validate()?;
    let n = plan.n_robots();
    if motion.schedule.n() != n {
        return Err(SimError::Mismatch { plan: n, schedule: motion.schedule.n() });
    }
    let lengths = &plan.lengths;
    let t0 = motion.schedule.begin();
    let max_steps = (cfg.max_time / cfg.dt).ceil() as u64;

    let mut robots: Vec<RobotState> = motion
        .schedule
        .robots
        .iter()
        .map(|r| RobotState { position: r.grasp, velocity: Point3::zeros(), phase: Phase::Waiting })
        .collect();
    let mut controls = vec![Point3::zeros(); n];
    let mut events = Vec::new();
    let mut violations = IntervalLog::new(n - 1);
    let mut floor = IntervalLog::new(n - 1);
    let mut rows = Vec::new();
    let mut max_tracking = vec![0.0f64; n];
    let mut min_margins = vec![f64::INFINITY; n - 1];
    let mut margins = vec![0.0; n - 1];

    let record = |step: u64, t: f64, robots: &[RobotState], controls: &[Point3], margins: &[f64], rows: &mut Vec<TraceRow>| {
        rows.push(TraceRow { step, t, robots: robots.to_vec(), controls: controls.to_vec(), margins: margins.to_vec() });
    };

    // phases at the initial time
    let mut step: u64 = 0;
    for (i, robot) in robots.iter_mut().enumerate() {
        advance_phase(i, robot, t0, step, motion, cfg, &mut events);
    }
    compute_margins(&robots, lengths, &mut margins);
    record(0, t0, &robots, &controls, &margins, &mut rows);

    let mut completed = robots.iter().all(|r| r.phase == Phase::Holding);
    while !completed && step < max_steps {
        let t = t0 + step as f64 * cfg.dt;
        for i in 0..n {
            controls[i] = control(i, &robots[i], t, motion, cfg);
        }
        step += 1;
        let t_next = t0 + step as f64 * cfg.dt;
        for i in 0..n {
            integrate(&mut robots[i], controls[i], cfg.dt);
            let s = robots[i];
            if !(s.position.iter().chain(s.velocity.iter()).all(|x| x.is_finite())) {
                record(step, t_next, &robots, &controls, &margins, &mut rows);
                let trace = finish_trace(cfg, rows, events, violations, floor, incomplete(n, step, t_next, &robots, motion));
                return Err(SimError::NonFinite { robot: i, t: t_next, trace: Box::new(trace) });
            }
            if s.phase == Phase::Tracking {
                let r = &motion.schedule.robots[i];
                let (p_ref, _, _) = eval_trajectory(&motion.trajectory, (t_next - r.start).min(r.stop));
                max_tracking[i] = max_tracking[i].max((p_ref - s.position).norm());
            }
            advance_phase(i, &mut robots[i], t_next, step, motion, cfg, &mut events);
        }
        compute_margins(&robots, lengths, &mut margins);
        for (pair, &m) in margins.iter().enumerate() {
            min_margins[pair] = min_margins[pair].min(m);
            violations.update(pair, t_next, (m < -TAUT_TOL).then_some(-m), f64::max);
        }
        completed = robots.iter().all(|r| r.phase == Phase::Holding);
        if step.is_multiple_of(cfg.record_every as u64) || completed {
            let cable = cable_state(&robots.iter().map(|r| r.position).collect::<Vec<_>>(), lengths);
            for (pair, seg) in cable.segments.iter().enumerate() {
                let low = seg.lowest();
                floor.update(pair, t_next, (low < 0.0).then_some(low), f64::min);
            }
            record(step, t_next, &robots, &controls, &margins, &mut rows);
        }
    }

    let t_end = t0 + step as f64 * cfg.dt;
    let mut outcome = incomplete(n, step, t_end, &robots, motion);
    outcome.completed = completed;
    outcome.max_tracking_errors = max_tracking;
    outcome.min_margins = min_margins;
    if completed {
        let positions: Vec<Point3> = robots.iter().map(|r| r.position).collect();
        let cable = cable_state(&positions, lengths);
        let samples = cable.samples(cfg.samples, Some(plan.polyline.closing_anchor));
        let mut report = verify_samples(&samples, &plan.target, cfg.samples);
        if report.verdict == crate::representation::Verdict::Inconclusive {
            let k = 2 * cfg.samples;
            report = verify_samples(&cable.samples(k, Some(plan.polyline.closing_anchor)), &plan.target, k);
        }
        outcome.topology = Some(report);
    }
    Ok(finish_trace(cfg, rows, events, violations, floor, outcome))
}

fn incomplete(n: usize, steps: u64, t: f64, robots: &[RobotState], motion: &FoldPlan) -> SimOutcome {
    SimOutcome {
        completed: false,
        final_time: t,
        steps,
        final_errors: robots.iter().zip(&motion.schedule.robots).map(|(s, r)| (s.position - r.target).norm()).collect(),
        max_tracking_errors: vec![0.0; n],
        min_margins: Vec::new(),
        entry_end: motion.schedule.entry_end(),
        topology: None,
    }
}

fn finish_trace(
    cfg: &SimConfig,
    rows: Vec<TraceRow>,
    events: Vec<PhaseChange>,
    violations: IntervalLog,
    floor: IntervalLog,
    outcome: SimOutcome,
) -> SimTrace {
    SimTrace {
        dt: cfg.dt,
        record_every: cfg.record_every,
        rows,
        events,
        violations: violations.finish(),
        floor_contacts: floor.finish(),
        outcome,
    }
}

fn advance_phase(
    i: usize,
    state: &mut RobotState,
    t: f64,
    step: u64,
    motion: &FoldPlan,
    cfg: &SimConfig,
    events: &mut Vec<PhaseChange>,
) {
    while let Some(to) = next_phase(i, state, t, motion, cfg) {
        events.push(PhaseChange { step, t, robot: i, from: state.phase, to });
        state.phase = to;
    }
}

fn compute_margins(robots: &[RobotState], lengths: &[f64], out: &mut [f64]) {
    for (k, w) in robots.windows(2).enumerate() {
        out[k] = lengths[k] - (w[0].position - w[1].position).norm();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_flight_step() {
        let mut s = RobotState { position: Point3::zeros(), velocity: Point3::new(1.0, 0.0, 0.0), phase: Phase::Waiting };
        integrate(&mut s, Point3::zeros(), 0.1);
        assert_eq!(s.position, Point3::new(0.1, 0.0, 0.0));
        assert_eq!(s.velocity, Point3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn constant_push_matches_discrete_sum() {
        let mut s = RobotState { position: Point3::zeros(), velocity: Point3::zeros(), phase: Phase::Waiting };
        let dt = 0.01;
        for _ in 0..100 {
            integrate(&mut s, Point3::new(0.0, 0.0, -1.0), dt);
        }
        // p_z = -dt²·Σk = -0.5·(1 + dt)
        assert!((s.velocity.z + 1.0).abs() < 1e-12);
        assert!((s.position.z + 0.5 * (1.0 + dt)).abs() < 1e-12);
    }

    #[test]
    fn coasting_keeps_speed() {
        let v0 = Point3::new(0.3, -0.4, 1.2);
        let mut s = RobotState { position: Point3::zeros(), velocity: v0, phase: Phase::Waiting };
        for _ in 0..1000 {
            integrate(&mut s, Point3::zeros(), 1e-3);
        }
        assert_eq!(s.velocity.norm_squared(), v0.norm_squared());
    }

    #[test]
    fn config_validation() {
        let cfg = SimConfig::for_cell_width(1.0);
        assert!(cfg.validate().is_ok());
        assert!(SimConfig { kp: 0.0, ..cfg }.validate().is_err());
        assert!(SimConfig { dt: -1.0, ..cfg }.validate().is_err());
        assert!(SimConfig { record_every: 0, ..cfg }.validate().is_err());
        assert!(SimConfig { samples: 4, ..cfg }.validate().is_err());
    }

    #[test]
    fn interval_log_merges_runs() {
        let mut log = IntervalLog::new(2);
        log.update(0, 1.0, Some(0.1), f64::max);
        log.update(0, 2.0, Some(0.3), f64::max);
        log.update(0, 3.0, None, f64::max);
        log.update(1, 3.0, Some(0.2), f64::max);
        let out = log.finish();
        assert_eq!(out.len(), 2);
        assert_eq!((out[0].start, out[0].end, out[0].worst), (1.0, 2.0, 0.3));
        assert_eq!((out[1].pair, out[1].start), (1, 3.0));
    }
}
