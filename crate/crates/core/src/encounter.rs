//! Straight-line obstacle prediction, closest point of approach and COLREG
//! encounter classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vessel::{wrap, VesselState};

/// A target vessel moving on a straight line at constant speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleTrack {
    pub id: String,
    pub state: VesselState,
    pub length: f64,
    pub width: f64,
}

impl ObstacleTrack {
    /// A track with the default 8 m x 3 m hull.
    pub fn new(id: impl Into<String>, state: VesselState) -> Self {
        Self {
            id: id.into(),
            state,
            length: 8.0,
            width: 3.0,
        }
    }

    /// Constant-velocity extrapolation of the track to absolute `time`.
    pub fn at(&self, time: f64) -> ObstacleTrack {
        let mut out = self.clone();
        out.state = extrapolate(&self.state, time - self.state.time);
        out
    }
}

fn extrapolate(state: &VesselState, dt: f64) -> VesselState {
    let (vn, ve) = state.velocity();
    VesselState {
        time: state.time + dt,
        north: state.north + vn * dt,
        east: state.east + ve * dt,
        ..*state
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncounterType {
    HeadOn,
    CrossingGiveWay,
    CrossingStandOn,
    Overtaking,
    Safe,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpaResult {
    /// Minimum separation [m].
    pub distance: f64,
    /// Earliest time of minimum separation, relative to the evaluation instant [s].
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncounterParams {
    /// Separation below which a crossing is considered a risk [m].
    pub d_close: f64,
    /// Window over which crossing CPA is evaluated [s].
    pub cpa_horizon: f64,
    pub head_on_sector_deg: f64,
    pub crossing_aft_limit_deg: f64,
    pub reciprocal_course_deg: f64,
    pub overtaking_sector_deg: f64,
}

impl Default for EncounterParams {
    fn default() -> Self {
        Self {
            d_close: 750.0,
            cpa_horizon: 120.0,
            head_on_sector_deg: 22.5,
            crossing_aft_limit_deg: 112.5,
            reciprocal_course_deg: 157.5,
            overtaking_sector_deg: 45.0,
        }
    }
}

/// Samples a constant-velocity prediction every `dt` from the track's
/// current time, `floor(horizon / dt) + 1` states including t = 0.
pub fn predict_obstacle(track: &ObstacleTrack, horizon: f64, dt: f64) -> Result<Vec<VesselState>> {
    if !(horizon > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon and dt must be positive (horizon={horizon}, dt={dt})"
        )));
    }
    let n = sample_count(horizon, dt);
    Ok((0..n)
        .map(|k| extrapolate(&track.state, k as f64 * dt))
        .collect())
}

pub(crate) fn sample_count(horizon: f64, dt: f64) -> usize {
    (horizon / dt + 1e-9).floor() as usize + 1
}

/// Closed-form CPA of two constant-velocity tracks over `[0, horizon]`.
pub fn cpa(own: &VesselState, obstacle: &VesselState, horizon: f64) -> CpaResult {
    let rn = obstacle.north - own.north;
    let re = obstacle.east - own.east;
    let (on, oe) = own.velocity();
    let (bn, be) = obstacle.velocity();
    let (vn, ve) = (bn - on, be - oe);
    let v2 = vn * vn + ve * ve;
    let t = if v2 <= f64::EPSILON {
        0.0
    } else {
        (-(rn * vn + re * ve) / v2).clamp(0.0, horizon.max(0.0))
    };
    CpaResult {
        distance: (rn + vn * t).hypot(re + ve * t),
        time: t,
    }
}

/// Relative bearing of `target` as seen from `own`, in (-pi, pi].
pub fn relative_bearing(own: &VesselState, target: &VesselState) -> f64 {
    let bearing = (target.east - own.east).atan2(target.north - own.north);
    wrap(bearing - own.course)
}

/// Classifies the encounter from the ownship's point of view.
pub fn classify_encounter(
    own: &VesselState,
    obstacle: &VesselState,
    params: &EncounterParams,
) -> EncounterType {
    let beta = relative_bearing(own, obstacle).to_degrees();
    let dpsi = wrap(obstacle.course - own.course).to_degrees().abs();

    if beta.abs() <= params.head_on_sector_deg && dpsi >= params.reciprocal_course_deg {
        return EncounterType::HeadOn;
    }
    if beta.abs() <= params.overtaking_sector_deg
        && dpsi <= params.head_on_sector_deg
        && own.speed > obstacle.speed
    {
        return EncounterType::Overtaking;
    }
    let risky = || cpa(own, obstacle, params.cpa_horizon).distance < params.d_close;
    let fwd = params.head_on_sector_deg;
    let aft = params.crossing_aft_limit_deg;
    if beta > fwd && beta <= aft && risky() {
        EncounterType::CrossingGiveWay
    } else if beta < -fwd && beta >= -aft && risky() {
        EncounterType::CrossingStandOn
    } else {
        EncounterType::Safe
    }
}
