//! Lookahead-based line-of-sight waypoint guidance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vessel::{wrap, GuidanceCommand, VesselState, Waypoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuidanceParams {
    /// Lookahead distance [m].
    pub lookahead: f64,
}

impl Default for GuidanceParams {
    fn default() -> Self {
        Self { lookahead: 250.0 }
    }
}

/// Signed cross-track error of `state` relative to the segment `from -> to`.
/// Positive when the vessel is to starboard of the path direction.
pub fn cross_track_error(state: &VesselState, from: &Waypoint, to: &Waypoint) -> f64 {
    let bearing = (to.east - from.east).atan2(to.north - from.north);
    let (sin, cos) = bearing.sin_cos();
    -(state.north - from.north) * sin + (state.east - from.east) * cos
}

fn along_track(state: &VesselState, from: &Waypoint, to: &Waypoint) -> f64 {
    let bearing = (to.east - from.east).atan2(to.north - from.north);
    let (sin, cos) = bearing.sin_cos();
    (state.north - from.north) * cos + (state.east - from.east) * sin
}

/// Computes autopilot references for following `route`.
///
/// Returns the command and the (possibly advanced) active segment index.
/// Segment `k` runs from `route[k]` to `route[k + 1]`. Once the last segment
/// is active the vessel keeps tracking its extension.
pub fn los_guidance(
    state: &VesselState,
    route: &[Waypoint],
    active_index: usize,
    params: &GuidanceParams,
    cruise_speed: f64,
) -> Result<(GuidanceCommand, usize)> {
    if route.len() < 2 {
        return Err(Error::InvalidScenario(format!(
            "route needs at least 2 waypoints, got {}",
            route.len()
        )));
    }
    if active_index >= route.len() - 1 {
        return Err(Error::InvalidArgument(format!(
            "active index {active_index} out of range for {} waypoints",
            route.len()
        )));
    }

    let last_segment = route.len() - 2;
    let mut k = active_index;
    while k < last_segment {
        let (from, to) = (&route[k], &route[k + 1]);
        let dist = (to.north - state.north).hypot(to.east - state.east);
        let seg_len = (to.north - from.north).hypot(to.east - from.east);
        if dist <= to.acceptance_radius || along_track(state, from, to) >= seg_len {
            k += 1;
        } else {
            break;
        }
    }

    let (from, to) = (&route[k], &route[k + 1]);
    let bearing = (to.east - from.east).atan2(to.north - from.north);
    let e = cross_track_error(state, from, to);
    let course_ref = wrap(bearing + (-e / params.lookahead).atan());
    Ok((GuidanceCommand::new(course_ref, cruise_speed), k))
}
