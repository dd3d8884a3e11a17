//! Geodesics of `(R^2, h)` by fixed-step RK4 and fan shooting.
//!
//! The state is `(x1, x2, y1, y2)` with `x' = y` and
//! `y_k' = -G^k_11 y1^2 - 2 G^k_12 y1 y2 - G^k_22 y2^2`. Initial velocities
//! have unit `h`-speed, so the parameter is arc length. A running arc-length
//! component `L' = ||y||_h` is carried along with the state so that it is
//! integrated at the same order as the position.
//!
//! A trace that comes within the hit radius of the goal is cut at its point
//! of closest approach to the goal (located between steps by cubic Hermite
//! interpolation), and the length reported is the arc length up to there.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Bounds, ManifoldModel, PlanarPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
}

impl GeodesicState {
    pub fn position(&self) -> PlanarPoint {
        PlanarPoint::new(self.x1, self.x2)
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.y1, self.y2]
    }

    fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.y1.is_finite() && self.y2.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    GoalHit,
    LeftWorkspace,
    MaxLength,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::GoalHit => "goal-hit",
            Termination::LeftWorkspace => "left-workspace",
            Termination::MaxLength => "max-length",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTrace {
    /// Initial heading in radians, measured in the plane.
    pub angle: f64,
    /// Recorded states; always includes the first and the final state.
    pub states: Vec<GeodesicState>,
    /// Cumulative `h`-length at each recorded state.
    pub arc_lengths: Vec<f64>,
    pub termination: Termination,
}

impl GeodesicTrace {
    pub fn arc_length(&self) -> f64 {
        *self.arc_lengths.last().expect("trace has at least one state")
    }

    pub fn final_state(&self) -> &GeodesicState {
        self.states.last().expect("trace has at least one state")
    }

    pub fn is_hit(&self) -> bool {
        self.termination == Termination::GoalHit
    }

    pub fn polyline(&self) -> Vec<PlanarPoint> {
        self.states.iter().map(GeodesicState::position).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicOptions {
    pub step: f64,
    pub max_length: f64,
    pub bounds: Bounds,
    pub goal: PlanarPoint,
    pub hit_radius: f64,
    /// Keep every n-th integration state in the trace.
    pub record_every: usize,
}

impl GeodesicOptions {
    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid(format!(
                "geodesic step must be positive, got {}",
                self.step
            )));
        }
        if !(self.hit_radius > 0.0 && self.hit_radius.is_finite()) {
            return Err(Error::invalid(format!(
                "hit radius must be positive, got {}",
                self.hit_radius
            )));
        }
        if !(self.max_length > 0.0) {
            return Err(Error::invalid(format!(
                "max length must be positive, got {}",
                self.max_length
            )));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be >= 1"));
        }
        if !self.goal.is_finite() {
            return Err(Error::invalid("goal must be finite"));
        }
        Ok(())
    }
}

/// Equally spaced initial headings `theta_min ..= theta_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanSpec {
    pub theta_min: f64,
    pub theta_max: f64,
    pub count: usize,
}

impl FanSpec {
    pub fn quarter(count: usize) -> Self {
        Self {
            theta_min: 0.0,
            theta_max: FRAC_PI_2,
            count,
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        let span = self.theta_max - self.theta_min;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.theta_min + span * i as f64 / last)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::invalid(format!(
                "fan count must be >= 2, got {}",
                self.count
            )));
        }
        if !(self.theta_min < self.theta_max) {
            return Err(Error::invalid(format!(
                "fan range must satisfy theta_min < theta_max, got [{}, {}]",
                self.theta_min, self.theta_max
            )));
        }
        Ok(())
    }
}

pub fn geodesic_rhs(model: &ManifoldModel, s: &GeodesicState) -> [f64; 4] {
    let c = model.christoffel_at(s.position());
    let (y1, y2) = (s.y1, s.y2);
    [
        y1,
        y2,
        -y1 * y1 * c.g1_11 - 2.0 * y1 * y2 * c.g1_12 - y2 * y2 * c.g1_22,
        -y1 * y1 * c.g2_11 - 2.0 * y1 * y2 * c.g2_12 - y2 * y2 * c.g2_22,
    ]
}

/// `(x1, x2, y1, y2, L)`
type Augmented = [f64; 5];

fn augmented_rhs(model: &ManifoldModel, z: &Augmented) -> Augmented {
    let s = GeodesicState {
        x1: z[0],
        x2: z[1],
        y1: z[2],
        y2: z[3],
    };
    let [a, b, c, d] = geodesic_rhs(model, &s);
    [a, b, c, d, model.tangent_norm(s.position(), s.velocity())]
}

fn rk4_step(model: &ManifoldModel, z: &Augmented, h: f64) -> Augmented {
    let shift = |base: &Augmented, k: &Augmented, f: f64| -> Augmented {
        std::array::from_fn(|i| base[i] + f * k[i])
    };
    let k1 = augmented_rhs(model, z);
    let k2 = augmented_rhs(model, &shift(z, &k1, 0.5 * h));
    let k3 = augmented_rhs(model, &shift(z, &k2, 0.5 * h));
    let k4 = augmented_rhs(model, &shift(z, &k3, h));
    std::array::from_fn(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn state_of(z: &Augmented) -> GeodesicState {
    GeodesicState {
        x1: z[0],
        x2: z[1],
        y1: z[2],
        y2: z[3],
    }
}

/// `(x - goal) . y`, half the derivative of the squared distance to the goal.
fn approach_rate(z: &Augmented, goal: PlanarPoint) -> f64 {
    (z[0] - goal.x1) * z[2] + (z[1] - goal.x2) * z[3]
}

/// Cubic Hermite interpolation of the augmented state over one step,
/// `tau in [0, 1]`. Positions and arc length use their derivatives at both
/// ends; velocities come from the derivative of the position cubic.
fn hermite(z0: &Augmented, d0: &Augmented, z1: &Augmented, d1: &Augmented, h: f64, tau: f64) -> Augmented {
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let (h00, h10, h01, h11) = (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + tau, -2.0 * t3 + 3.0 * t2, t3 - t2);
    let (g00, g10, g01, g11) = (6.0 * t2 - 6.0 * tau, 3.0 * t2 - 4.0 * tau + 1.0, -6.0 * t2 + 6.0 * tau, 3.0 * t2 - 2.0 * tau);
    let pos = |i: usize| h00 * z0[i] + h10 * h * d0[i] + h01 * z1[i] + h11 * h * d1[i];
    let vel = |i: usize| (g00 * z0[i] + g10 * h * d0[i] + g01 * z1[i] + g11 * h * d1[i]) / h;
    [pos(0), pos(1), vel(0), vel(1), pos(4)]
}

/// Locate the zero of the approach rate inside one step by bisection on the
/// Hermite interpolant. Requires rate(z0) < 0 <= rate(z1).
fn closest_approach(model: &ManifoldModel, z0: &Augmented, z1: &Augmented, h: f64, goal: PlanarPoint) -> Augmented {
    let d0 = augmented_rhs(model, z0);
    let d1 = augmented_rhs(model, z1);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if approach_rate(&hermite(z0, &d0, z1, &d1, h, mid), goal) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hermite(z0, &d0, z1, &d1, h, 0.5 * (lo + hi))
}

/// Integrate the geodesic leaving `start` with heading `angle`.
pub fn integrate_geodesic(
    model: &ManifoldModel,
    start: PlanarPoint,
    angle: f64,
    opts: &GeodesicOptions,
) -> Result<GeodesicTrace> {
    opts.validate()?;
    if !start.is_finite() || !angle.is_finite() {
        return Err(Error::invalid("geodesic start and angle must be finite"));
    }
    let dir = [angle.cos(), angle.sin()];
    let speed = model.tangent_norm(start, dir);
    let mut z: Augmented = [start.x1, start.x2, dir[0] / speed, dir[1] / speed, 0.0];

    let mut states = vec![state_of(&z)];
    let mut arc_lengths = vec![0.0];
    let goal = opts.goal;
    let hit_sq = opts.hit_radius * opts.hit_radius;
    let mut steps = 0usize;

    let termination = loop {
        let next = rk4_step(model, &z, opts.step);
        steps += 1;

        let rate_now = approach_rate(&z, goal);
        let rate_next = approach_rate(&next, goal);
        if rate_now < 0.0 && rate_next >= 0.0 {
            let closest = closest_approach(model, &z, &next, opts.step, goal);
            if PlanarPoint::new(closest[0], closest[1]).distance_sq(goal) < hit_sq {
                z = closest;
                break Termination::GoalHit;
            }
        }

        let s = state_of(&next);
        if !s.is_finite() || !opts.bounds.contains(s.position()) {
            z = next;
            break Termination::LeftWorkspace;
        }
        if next[4] > opts.max_length {
            z = next;
            break Termination::MaxLength;
        }
        z = next;
        if steps.is_multiple_of(opts.record_every) {
            states.push(state_of(&z));
            arc_lengths.push(z[4]);
        }
    };

    let last = state_of(&z);
    if states.last() != Some(&last) {
        states.push(last);
        arc_lengths.push(z[4]);
    }
    Ok(GeodesicTrace {
        angle,
        states,
        arc_lengths,
        termination,
    })
}

/// One geodesic per heading of the fan, in angle order.
pub fn shoot_fan(
    model: &ManifoldModel,
    start: PlanarPoint,
    fan: &FanSpec,
    opts: &GeodesicOptions,
) -> Result<Vec<GeodesicTrace>> {
    fan.validate()?;
    fan.angles()
        .into_par_iter()
        .map(|angle| integrate_geodesic(model, start, angle, opts))
        .collect()
}

/// The goal-hitting trace of least arc length.
pub fn shortest_geodesic(traces: &[GeodesicTrace]) -> Result<(&GeodesicTrace, f64)> {
    if traces.is_empty() {
        return Err(Error::invalid("no traces to choose from"));
    }
    traces
        .iter()
        .filter(|t| t.is_hit())
        .map(|t| (t, t.arc_length()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::NoGeodesicHit {
            traces: traces.len(),
        })
}

/// Which side of a trace the goal lies on: the sign of
/// `y x (goal - x)` at the trace's first closest approach to the goal (or at
/// its end if it never turns away from the goal).
fn goal_side(model: &ManifoldModel, start: PlanarPoint, angle: f64, opts: &GeodesicOptions) -> Result<f64> {
    let probe = GeodesicOptions {
        hit_radius: f64::MAX.sqrt(),
        ..*opts
    };
    let trace = integrate_geodesic(model, start, angle, &probe)?;
    let s = trace.final_state();
    let cross = s.y1 * (opts.goal.x2 - s.x2) - s.y2 * (opts.goal.x1 - s.x1);
    Ok(cross.signum())
}

/// Shooting refinement by bisection on the heading.
///
/// Between every pair of adjacent fan headings on which the goal switches
/// sides, bisect `iterations` times and integrate the converged heading.
/// Returns the refined traces that hit the goal disk, in angle order. This
/// recovers geodesics whose hit window is narrower than the fan spacing.
pub fn refine_fan(
    model: &ManifoldModel,
    start: PlanarPoint,
    fan: &FanSpec,
    iterations: usize,
    opts: &GeodesicOptions,
) -> Result<Vec<GeodesicTrace>> {
    fan.validate()?;
    opts.validate()?;
    let angles = fan.angles();
    let sides: Vec<f64> = angles
        .par_iter()
        .map(|&a| goal_side(model, start, a, opts))
        .collect::<Result<_>>()?;
    let brackets: Vec<(f64, f64, f64)> = (1..angles.len())
        .filter(|&i| sides[i - 1] != 0.0 && sides[i] != 0.0 && sides[i - 1] != sides[i])
        .map(|i| (angles[i - 1], angles[i], sides[i - 1]))
        .collect();
    let refined: Vec<Option<GeodesicTrace>> = brackets
        .into_par_iter()
        .map(|(mut lo, mut hi, lo_side)| {
            for _ in 0..iterations {
                let mid = 0.5 * (lo + hi);
                if goal_side(model, start, mid, opts)? == lo_side {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let trace = integrate_geodesic(model, start, 0.5 * (lo + hi), opts)?;
            Ok(trace.is_hit().then_some(trace))
        })
        .collect::<Result<_>>()?;
    Ok(refined.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{GaussianBump, ScalarField2D};
    use std::f64::consts::FRAC_PI_4;

    fn pt(x1: f64, x2: f64) -> PlanarPoint {
        PlanarPoint::new(x1, x2)
    }

    fn opts() -> GeodesicOptions {
        GeodesicOptions {
            step: 1e-3,
            max_length: 30.0,
            bounds: Bounds::square(-1.0, 11.0).unwrap(),
            goal: pt(10.0, 10.0),
            hit_radius: 0.5,
            record_every: 10,
        }
    }

    fn one_peak() -> ManifoldModel {
        ManifoldModel::from_bump_fields([ScalarField2D::new(vec![GaussianBump::isotropic(
            5.0,
            [5.0, 5.0],
            0.1,
        )
        .unwrap()])
        .unwrap()])
    }

    fn bell() -> ManifoldModel {
        ManifoldModel::from_bump_fields([ScalarField2D::new(vec![GaussianBump::isotropic(
            1.0,
            [0.0, 0.0],
            1.0,
        )
        .unwrap()])
        .unwrap()])
    }

    #[test]
    fn flat_rhs_is_pure_transport() {
        let s = GeodesicState { x1: 2.0, x2: -1.0, y1: 0.3, y2: 0.7 };
        assert_eq!(geodesic_rhs(&ManifoldModel::flat(), &s), [0.3, 0.7, 0.0, 0.0]);
    }

    #[test]
    fn bell_rhs_at_origin() {
        let s = GeodesicState { x1: 0.0, x2: 0.0, y1: 1.0, y2: 0.0 };
        assert_eq!(geodesic_rhs(&bell(), &s), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_velocity_rhs_vanishes() {
        let s = GeodesicState { x1: 4.2, x2: 3.3, y1: 0.0, y2: 0.0 };
        let r = geodesic_rhs(&one_peak(), &s);
        assert!(r.iter().all(|v| *v == 0.0), "{r:?}");
    }

    #[test]
    fn flat_diagonal_hits_goal() {
        let t = integrate_geodesic(&ManifoldModel::flat(), pt(0.0, 0.0), FRAC_PI_4, &opts()).unwrap();
        assert_eq!(t.termination, Termination::GoalHit);
        let len = t.arc_length();
        assert!((13.64..=14.15).contains(&len), "{len}");
        assert!(t.final_state().position().distance(pt(10.0, 10.0)) < 0.5);
    }

    #[test]
    fn flat_heading_east_leaves_workspace() {
        let t = integrate_geodesic(&ManifoldModel::flat(), pt(0.0, 0.0), 0.0, &opts()).unwrap();
        assert_eq!(t.termination, Termination::LeftWorkspace);
        let x = t.final_state().x1;
        assert!((x - 11.0).abs() < 2e-3, "{x}");
    }

    #[test]
    fn short_max_length_stops_trace() {
        let mut o = opts();
        o.max_length = 2.0;
        let t = integrate_geodesic(&one_peak(), pt(0.0, 0.0), 0.3, &o).unwrap();
        assert_eq!(t.termination, Termination::MaxLength);
        assert!(t.arc_length() > 2.0 && t.arc_length() < 2.0 + 2e-3);
    }

    #[test]
    fn one_peak_diagonal_stays_on_diagonal() {
        let t = integrate_geodesic(&one_peak(), pt(0.0, 0.0), FRAC_PI_4, &opts()).unwrap();
        for s in &t.states {
            assert!((s.x1 - s.x2).abs() < 1e-6, "{s:?}");
        }
    }

    #[test]
    fn arc_length_is_nondecreasing() {
        let t = integrate_geodesic(&one_peak(), pt(0.0, 0.0), 0.4, &opts()).unwrap();
        assert!(t.arc_lengths.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(t.arc_lengths.len(), t.states.len());
    }

    #[test]
    fn rejects_bad_options() {
        let m = ManifoldModel::flat();
        let mut o = opts();
        o.step = 0.0;
        assert!(integrate_geodesic(&m, pt(0.0, 0.0), 0.0, &o).is_err());
        let mut o = opts();
        o.hit_radius = -1.0;
        assert!(integrate_geodesic(&m, pt(0.0, 0.0), 0.0, &o).is_err());
    }

    #[test]
    fn flat_fan_of_three_has_one_hit() {
        let traces = shoot_fan(&ManifoldModel::flat(), pt(0.0, 0.0), &FanSpec::quarter(3), &opts()).unwrap();
        assert_eq!(traces.len(), 3);
        let hits: Vec<_> = traces.iter().filter(|t| t.is_hit()).collect();
        assert_eq!(hits.len(), 1);
        assert!((hits[0].angle - FRAC_PI_4).abs() < 1e-15);
        let (_, len) = shortest_geodesic(&traces).unwrap();
        assert!((len - 200f64.sqrt()).abs() < 0.51);
    }

    #[test]
    fn narrow_fan_hits_depend_on_width() {
        let m = ManifoldModel::flat();
        // Rays from the origin miss a radius-0.5 disk at distance 10*sqrt(2)
        // once the heading is off by more than asin(0.5 / 14.142) = 0.03536.
        let narrow = FanSpec { theta_min: FRAC_PI_4, theta_max: FRAC_PI_4 + 0.01, count: 2 };
        let hits = shoot_fan(&m, pt(0.0, 0.0), &narrow, &opts()).unwrap().iter().filter(|t| t.is_hit()).count();
        assert_eq!(hits, 2);
        let wide = FanSpec { theta_min: FRAC_PI_4, theta_max: FRAC_PI_4 + 0.05, count: 2 };
        let hits = shoot_fan(&m, pt(0.0, 0.0), &wide, &opts()).unwrap().iter().filter(|t| t.is_hit()).count();
        assert_eq!(hits, 1);
    }

    #[test]
    fn fan_validation() {
        let m = ManifoldModel::flat();
        let bad = FanSpec { theta_min: 1.0, theta_max: 1.0, count: 5 };
        assert!(shoot_fan(&m, pt(0.0, 0.0), &bad, &opts()).is_err());
        assert!(shoot_fan(&m, pt(0.0, 0.0), &FanSpec::quarter(1), &opts()).is_err());
    }

    #[test]
    fn shortest_without_hits_is_an_error() {
        let m = ManifoldModel::flat();
        let t = integrate_geodesic(&m, pt(0.0, 0.0), 0.0, &opts()).unwrap();
        assert!(matches!(shortest_geodesic(&[t]), Err(Error::NoGeodesicHit { traces: 1 })));
        assert!(shortest_geodesic(&[]).is_err());
    }

    #[test]
    fn refinement_finds_goal_through_the_gaps() {
        // A 5-ray fan on the flat plane misses the goal disk entirely; the
        // sides flip between the 2nd and 3rd ray and bisection lands on pi/4.
        let m = ManifoldModel::flat();
        let fan = FanSpec { theta_min: 0.0, theta_max: 1.4, count: 5 };
        let traces = shoot_fan(&m, pt(0.0, 0.0), &fan, &opts()).unwrap();
        assert!(traces.iter().all(|t| !t.is_hit()));
        let refined = refine_fan(&m, pt(0.0, 0.0), &fan, 40, &opts()).unwrap();
        assert_eq!(refined.len(), 1);
        assert!((refined[0].angle - FRAC_PI_4).abs() < 1e-9);
        assert!((refined[0].arc_length() - 200f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn refinement_on_curved_surface_passes_through_goal() {
        let m = one_peak();
        let refined = refine_fan(&m, pt(0.0, 0.0), &FanSpec::quarter(20), 40, &opts()).unwrap();
        assert!(!refined.is_empty());
        for t in &refined {
            assert!(t.final_state().position().distance(pt(10.0, 10.0)) < 1e-4);
        }
    }
}
