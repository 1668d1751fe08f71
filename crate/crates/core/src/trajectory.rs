//! Folding trajectory: floor grasp points, dipped waypoints, rest-to-rest
//! quintic interpolation and the delayed leader-follower schedule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Point3;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("{name} must be positive and finite, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("waypoint {index} would sit at z = {z} (at or below the floor); raise z_p")]
    BelowFloor { index: usize, z: f64 },
    #[error("robot count {robots} does not match {points} target points")]
    RobotMismatch { robots: usize, points: usize },
}

/// Kinematic defaults for the folding motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionConfig {
    /// Nominal cruise speed used to time each interval.
    pub v_ref: f64,
    /// Shortest interval duration.
    pub t_floor: f64,
    /// Duration of the move from the grasp point to the trajectory start.
    pub t_entry: f64,
    /// Schedules longer than this produce a warning.
    pub duration_cap: f64,
}

impl Default for MotionConfig {
    fn default() -> Self {
        MotionConfig { v_ref: 1.0, t_floor: 0.5, t_entry: 3.0, duration_cap: 3600.0 }
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), TrajectoryError> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(TrajectoryError::BadParameter { name, value });
    }
    Ok(())
}

/// Where each robot grabs the straight cable lying on the floor along +x.
pub fn grasp_points(lengths: &[f64]) -> Result<Vec<Point3>, TrajectoryError> {
    for &l in lengths {
        check_positive("segment length", l)?;
    }
    let mut x = 0.0;
    let mut out = Vec::with_capacity(lengths.len() + 1);
    out.push(Point3::zeros());
    for &l in lengths {
        x += l;
        out.push(Point3::new(x, 0.0, 0.0));
    }
    Ok(out)
}

/// Interleaves a dipped midpoint between consecutive targets:
/// `q_i = (p_i + p_{i+1})/2 - c_i·h_max·ẑ` with `c_i = 1.5` for odd `i`
/// and `0.5` for even `i` (1-based).
pub fn augment_waypoints(points: &[Point3], h_max: f64) -> Result<Vec<Point3>, TrajectoryError> {
    if points.len() < 2 {
        return Err(TrajectoryError::TooFewPoints { needed: 2, got: points.len() });
    }
    check_positive("h_max", h_max)?;
    let mut out = Vec::with_capacity(2 * points.len() - 1);
    out.push(points[0]);
    for (k, w) in points.windows(2).enumerate() {
        let i = k + 1;
        let dip = if i % 2 == 1 { 1.5 } else { 0.5 };
        let q = (w[0] + w[1]) * 0.5 - Point3::new(0.0, 0.0, dip * h_max);
        if !(q.z > 0.0) {
            return Err(TrajectoryError::BelowFloor { index: 2 * k + 1, z: q.z });
        }
        out.push(q);
        out.push(w[1]);
    }
    Ok(out)
}

/// Rest-to-rest minimum-jerk move `start → end` over `[t0, t0 + duration]`.
///
/// `coeffs[axis]` holds `c_0..c_5` of the polynomial in local time `t - t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuinticInterval {
    pub t0: f64,
    pub duration: f64,
    pub start: Point3,
    pub end: Point3,
    pub coeffs: [[f64; 6]; 3],
}

/// Position, velocity and acceleration.
pub type Kinematics = (Point3, Point3, Point3);

impl QuinticInterval {
    pub fn new(t0: f64, duration: f64, start: Point3, end: Point3) -> Self {
        let (t2, t3) = (duration * duration, duration * duration * duration);
        let mut coeffs = [[0.0; 6]; 3];
        for (axis, c) in coeffs.iter_mut().enumerate() {
            let delta = end[axis] - start[axis];
            *c = [start[axis], 0.0, 0.0, 10.0 * delta / t3, -15.0 * delta / (t3 * duration), 6.0 * delta / (t3 * t2)];
        }
        QuinticInterval { t0, duration, start, end, coeffs }
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.duration
    }

    /// Polynomial evaluation at global time `t`, clamped to the interval;
    /// the endpoints are returned exactly.
    pub fn eval(&self, t: f64) -> Kinematics {
        if t <= self.t0 {
            return (self.start, Point3::zeros(), Point3::zeros());
        }
        if t >= self.t1() {
            return (self.end, Point3::zeros(), Point3::zeros());
        }
        self.eval_polynomial(t - self.t0)
    }

    /// The polynomial at local time `u`, without clamping.
    pub fn eval_polynomial(&self, u: f64) -> Kinematics {
        let mut p = Point3::zeros();
        let mut v = Point3::zeros();
        let mut a = Point3::zeros();
        for axis in 0..3 {
            let c = &self.coeffs[axis];
            p[axis] = c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
            v[axis] = c[1] + u * (2.0 * c[2] + u * (3.0 * c[3] + u * (4.0 * c[4] + u * 5.0 * c[5])));
            a[axis] = 2.0 * c[2] + u * (6.0 * c[3] + u * (12.0 * c[4] + u * 20.0 * c[5]));
        }
        (p, v, a)
    }
}

/// Piecewise quintic through a waypoint sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Point3>,
    /// Time at which each waypoint is reached.
    pub times: Vec<f64>,
    pub intervals: Vec<QuinticInterval>,
    /// Waypoints dropped because they coincide with their predecessor.
    pub skipped: Vec<usize>,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        *self.times.last().expect("times")
    }

    pub fn eval(&self, t: f64) -> Kinematics {
        eval_trajectory(self, t)
    }
}

/// Interval `k` lasts `max(|Δp_k| / v_ref, t_floor)`.
pub fn quintic_spline(waypoints: &[Point3], v_ref: f64, t_floor: f64) -> Result<Trajectory, TrajectoryError> {
    if waypoints.len() < 2 {
        return Err(TrajectoryError::TooFewPoints { needed: 2, got: waypoints.len() });
    }
    check_positive("v_ref", v_ref)?;
    check_positive("t_floor", t_floor)?;
    let mut times = vec![0.0];
    let mut intervals = Vec::with_capacity(waypoints.len() - 1);
    let mut skipped = Vec::new();
    let mut t = 0.0;
    for (k, w) in waypoints.windows(2).enumerate() {
        let dist = (w[1] - w[0]).norm();
        if dist == 0.0 {
            skipped.push(k + 1);
            times.push(t);
            continue;
        }
        let duration = (dist / v_ref).max(t_floor);
        intervals.push(QuinticInterval::new(t, duration, w[0], w[1]));
        t += duration;
        times.push(t);
    }
    Ok(Trajectory { waypoints: waypoints.to_vec(), times, intervals, skipped })
}

/// `γ(t)` with hold semantics outside `[0, T]`.
pub fn eval_trajectory(traj: &Trajectory, t: f64) -> Kinematics {
    match traj.intervals.len() {
        0 => (traj.waypoints[0], Point3::zeros(), Point3::zeros()),
        m => {
            let k = traj.intervals.partition_point(|iv| iv.t1() < t).min(m - 1);
            traj.intervals[k].eval(t)
        }
    }
}

/// Timing of one robot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotSchedule {
    /// Global time at which the robot starts following the trajectory.
    pub start: f64,
    /// Trajectory time of the robot's target waypoint.
    pub stop: f64,
    pub grasp: Point3,
    pub target: Point3,
    /// Move from the grasp point to the trajectory start, ending at `start`.
    pub entry: QuinticInterval,
}

impl RobotSchedule {
    /// Global time at which the robot reaches its target.
    pub fn stop_time(&self) -> f64 {
        self.start + self.stop
    }

    pub fn entry_start(&self) -> f64 {
        self.entry.t0
    }
}

/// Leader-follower timing: robot `i` (1-based) starts at `t_d·(n - i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSchedule {
    pub t_d: f64,
    pub robots: Vec<RobotSchedule>,
    pub warnings: Vec<String>,
}

impl FoldSchedule {
    pub fn n(&self) -> usize {
        self.robots.len()
    }

    /// Earliest entry start.
    pub fn begin(&self) -> f64 {
        self.robots.iter().map(|r| r.entry_start()).fold(f64::INFINITY, f64::min)
    }

    /// Latest arrival at a target.
    pub fn end(&self) -> f64 {
        self.robots.iter().map(|r| r.stop_time()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// End of the last entry move.
    pub fn entry_end(&self) -> f64 {
        self.robots.iter().map(|r| r.start).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Default delay: time to cover the mean segment length at `v_ref`.
pub fn default_delay(lengths: &[f64], v_ref: f64) -> f64 {
    lengths.iter().sum::<f64>() / lengths.len().max(1) as f64 / v_ref
}

/// Robot `i` targets `targets[i]`, which is trajectory waypoint `2i`.
pub fn make_schedule(
    t_d: f64,
    traj: &Trajectory,
    targets: &[Point3],
    grasps: &[Point3],
    cfg: &MotionConfig,
) -> Result<FoldSchedule, TrajectoryError> {
    if !(t_d >= 0.0) || !t_d.is_finite() {
        return Err(TrajectoryError::BadParameter { name: "t_d", value: t_d });
    }
    check_positive("t_entry", cfg.t_entry)?;
    let n = targets.len();
    if grasps.len() != n || traj.waypoints.len() != 2 * n - 1 {
        return Err(TrajectoryError::RobotMismatch { robots: grasps.len(), points: n });
    }
    let origin = traj.waypoints[0];
    let robots: Vec<RobotSchedule> = (0..n)
        .map(|i| {
            let start = t_d * (n - 1 - i) as f64;
            RobotSchedule {
                start,
                stop: traj.times[2 * i],
                grasp: grasps[i],
                target: targets[i],
                entry: QuinticInterval::new(start - cfg.t_entry, cfg.t_entry, grasps[i], origin),
            }
        })
        .collect();
    let mut schedule = FoldSchedule { t_d, robots, warnings: Vec::new() };
    let total = schedule.end() - schedule.begin();
    if total > cfg.duration_cap {
        schedule
            .warnings
            .push(format!("schedule lasts {total:.1} s, above the {:.1} s cap", cfg.duration_cap));
    }
    Ok(schedule)
}

/// Waypoints, trajectory and schedule for a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub config: MotionConfig,
    pub trajectory: Trajectory,
    pub schedule: FoldSchedule,
}

/// Builds the folding motion for targets at height `z_p` with cable
/// segment lengths `lengths`. `t_d = None` selects [`default_delay`].
pub fn plan_motion(
    targets: &[Point3],
    lengths: &[f64],
    h_max: f64,
    t_d: Option<f64>,
    cfg: &MotionConfig,
) -> Result<FoldPlan, TrajectoryError> {
    check_positive("v_ref", cfg.v_ref)?;
    let waypoints = augment_waypoints(targets, h_max)?;
    let trajectory = quintic_spline(&waypoints, cfg.v_ref, cfg.t_floor)?;
    let grasps = grasp_points(lengths)?;
    let t_d = t_d.unwrap_or_else(|| default_delay(lengths, cfg.v_ref));
    let schedule = make_schedule(t_d, &trajectory, targets, &grasps, cfg)?;
    Ok(FoldPlan { config: *cfg, trajectory, schedule })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grasp_points_are_cumulative() {
        let g = grasp_points(&[2.0, 3.0]).unwrap();
        assert_eq!(g, vec![Point3::zeros(), Point3::new(2.0, 0.0, 0.0), Point3::new(5.0, 0.0, 0.0)]);
        assert_eq!(grasp_points(&[5.0]).unwrap()[1], Point3::new(5.0, 0.0, 0.0));
        assert!(grasp_points(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn dips_alternate() {
        let p = [Point3::new(-1.0, 0.0, 5.0), Point3::new(1.0, 0.0, 5.0), Point3::new(1.0, 2.0, 5.0)];
        let w = augment_waypoints(&p, 2.0).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w[1], Point3::new(0.0, 0.0, 2.0));
        assert_eq!(w[3], Point3::new(1.0, 1.0, 4.0));
        assert_eq!(w[4], p[2]);
        assert!(matches!(augment_waypoints(&p, 4.0), Err(TrajectoryError::BelowFloor { index: 1, .. })));
        assert!(augment_waypoints(&p[..1], 1.0).is_err());
    }

    #[test]
    fn minimum_jerk_midpoint_speed() {
        let a = Point3::new(0.0, 0.0, 1.0);
        let b = Point3::new(3.0, 4.0, 1.0);
        let iv = QuinticInterval::new(2.0, 2.0, a, b);
        let (p, v, _) = iv.eval(3.0);
        assert!((p - (a + b) * 0.5).norm() < 1e-12);
        assert!((v.norm() - 1.875 * 5.0 / 2.0).abs() < 1e-12);
        let (p0, v0, a0) = iv.eval(2.0);
        assert_eq!((p0, v0, a0), (a, Point3::zeros(), Point3::zeros()));
        // just inside the end: derivatives vanish to rounding
        let (p1, v1, a1) = iv.eval(4.0 - 1e-9);
        assert!((p1 - b).norm() < 1e-12 && v1.norm() < 1e-8 && a1.norm() < 1e-6);
    }

    #[test]
    fn spline_hits_waypoints() {
        let w = vec![
            Point3::new(0.0, 0.0, 3.0),
            Point3::new(1.0, 0.0, 1.0),
            Point3::new(1.0, 0.0, 1.0),
            Point3::new(2.0, 0.2, 3.0),
            Point3::new(2.1, 0.2, 3.0),
        ];
        let traj = quintic_spline(&w, 1.0, 0.5).unwrap();
        assert_eq!(traj.skipped, vec![2]);
        assert_eq!(traj.intervals.len(), 3);
        assert_eq!(traj.times.len(), w.len());
        // short last leg uses the floor duration
        assert!((traj.intervals[2].duration - 0.5).abs() < 1e-15);
        for (p, &t) in w.iter().zip(&traj.times) {
            let (q, v, a) = traj.eval(t);
            assert!((q - p).norm() < 1e-12);
            assert!(v.norm() < 1e-12 && a.norm() < 1e-12);
        }
        let (q, v, a) = traj.eval(-1.0);
        assert_eq!((q, v, a), (w[0], Point3::zeros(), Point3::zeros()));
        let (q, v, _) = traj.eval(traj.duration() + 5.0);
        assert_eq!((q, v), (w[4], Point3::zeros()));
    }

    #[test]
    fn finite_difference_derivatives() {
        let w = vec![Point3::new(0.0, 0.0, 3.0), Point3::new(1.0, 0.5, 1.0), Point3::new(2.0, 0.0, 3.0)];
        let traj = quintic_spline(&w, 0.7, 0.5).unwrap();
        let eps = 1e-5;
        for k in 1..200 {
            let t = traj.duration() * k as f64 / 200.0;
            // jerk jumps at the knots, so central differences of v are only O(eps) there
            if traj.intervals.iter().any(|iv| (iv.t0 - t).abs() < 2.0 * eps) {
                continue;
            }
            let (_, v, a) = traj.eval(t);
            let fd_v = (traj.eval(t + eps).0 - traj.eval(t - eps).0) / (2.0 * eps);
            let fd_a = (traj.eval(t + eps).1 - traj.eval(t - eps).1) / (2.0 * eps);
            assert!((fd_v - v).norm() < 1e-6);
            assert!((fd_a - a).norm() < 1e-5);
        }
    }

    #[test]
    fn schedule_timing() {
        let targets = [Point3::new(0.0, 0.0, 5.0), Point3::new(0.0, 2.0, 5.0), Point3::new(2.0, 2.0, 5.0)];
        let lengths = [3.0, 4.0];
        let plan = plan_motion(&targets, &lengths, 1.0, Some(1.5), &MotionConfig::default()).unwrap();
        let s = &plan.schedule;
        assert_eq!(s.n(), 3);
        assert_eq!(s.robots[2].start, 0.0);
        assert_eq!(s.robots[1].start, 1.5);
        assert_eq!(s.robots[0].start, 3.0);
        assert_eq!(s.robots[0].stop, 0.0);
        assert_eq!(s.robots[2].stop, plan.trajectory.duration());
        assert_eq!(s.robots[1].grasp, Point3::new(3.0, 0.0, 0.0));
        assert_eq!(s.begin(), -3.0);
        for r in &s.robots {
            assert_eq!(r.entry.t1(), r.start);
            assert_eq!(r.entry.end, targets[0]);
            assert_eq!(plan.trajectory.eval(r.stop).0, r.target);
        }
        assert_eq!(default_delay(&lengths, 2.0), 1.75);
        assert!(make_schedule(-1.0, &plan.trajectory, &targets, &[Point3::zeros(); 3], &MotionConfig::default()).is_err());
    }
}
