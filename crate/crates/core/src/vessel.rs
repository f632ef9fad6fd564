//! Kinematic vessel model and angle utilities.
//!
//! Frame: local north-east meters, course measured from north, clockwise
//! positive. Course and speed follow first-order lags toward the commanded
//! references; position is integrated with forward Euler substeps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pose and speed of a vessel at an instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselState {
    pub time: f64,
    pub north: f64,
    pub east: f64,
    /// Radians in (-pi, pi], 0 = north.
    pub course: f64,
    pub speed: f64,
}

impl VesselState {
    pub fn new(time: f64, north: f64, east: f64, course: f64, speed: f64) -> Self {
        Self {
            time,
            north,
            east,
            course,
            speed,
        }
    }

    /// Velocity as (north, east) components.
    pub fn velocity(&self) -> (f64, f64) {
        let (s, c) = self.course.sin_cos();
        (self.speed * c, self.speed * s)
    }

    pub fn distance_to(&self, other: &VesselState) -> f64 {
        (other.north - self.north).hypot(other.east - self.east)
    }

    pub fn is_finite(&self) -> bool {
        self.time.is_finite()
            && self.north.is_finite()
            && self.east.is_finite()
            && self.course.is_finite()
            && self.speed.is_finite()
    }
}

/// Autopilot references: the course and speed the vessel is steered toward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceCommand {
    pub course_ref: f64,
    pub speed_ref: f64,
}

impl GuidanceCommand {
    pub fn new(course_ref: f64, speed_ref: f64) -> Self {
        Self {
            course_ref,
            speed_ref,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub north: f64,
    pub east: f64,
    pub acceptance_radius: f64,
}

impl Waypoint {
    pub fn new(north: f64, east: f64, acceptance_radius: f64) -> Self {
        Self {
            north,
            east,
            acceptance_radius,
        }
    }
}

/// Parameters of the kinematic ownship model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VesselParams {
    /// Course lag time constant [s].
    pub course_time_constant: f64,
    /// Speed lag time constant [s].
    pub speed_time_constant: f64,
    /// Upper speed bound [m/s]; 17 m/s is roughly 34 knots.
    pub max_speed: f64,
    /// Longest Euler substep [s].
    pub max_substep: f64,
}

impl Default for VesselParams {
    fn default() -> Self {
        Self {
            course_time_constant: 3.0,
            speed_time_constant: 5.0,
            max_speed: 17.0,
            max_substep: 0.1,
        }
    }
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(angle: f64) -> Result<f64> {
    if !angle.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cannot wrap non-finite angle {angle}"
        )));
    }
    Ok(wrap(angle))
}

/// Infallible wrap for values already known to be finite.
pub(crate) fn wrap(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let r = angle.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Advances `state` by `dt` seconds while steering toward `cmd`.
pub fn propagate(
    state: &VesselState,
    cmd: &GuidanceCommand,
    dt: f64,
    params: &VesselParams,
) -> Result<VesselState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    if !cmd.course_ref.is_finite() || !cmd.speed_ref.is_finite() {
        return Err(Error::InvalidArgument("non-finite guidance command".into()));
    }
    let steps = ((dt / params.max_substep) - 1e-9).ceil().max(1.0) as usize;
    let h = dt / steps as f64;
    let speed_ref = cmd.speed_ref.clamp(0.0, params.max_speed);
    let course_gain = h / params.course_time_constant;
    let speed_gain = h / params.speed_time_constant;

    let mut s = *state;
    for _ in 0..steps {
        let (sin, cos) = s.course.sin_cos();
        s.north += s.speed * cos * h;
        s.east += s.speed * sin * h;
        s.course = wrap(s.course + wrap(cmd.course_ref - s.course) * course_gain);
        s.speed = (s.speed + (speed_ref - s.speed) * speed_gain).clamp(0.0, params.max_speed);
    }
    s.time = state.time + dt;
    Ok(s)
}
