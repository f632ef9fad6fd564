//! Simulation-based MPC.
//!
//! Every candidate is a constant course offset and speed multiplier applied
//! to the LOS autopilot references up to a return time, after which the
//! rollout tracks the unmodified references again. Each rollout is scored
//! with an additive seven-term cost and the cheapest one is selected.

mod cost;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use cost::{
    evaluate_costs, Component, CostBreakdown, CostMeasures, ObstacleCpa, TransitionBehavior,
};

use crate::config::SimConfig;
use crate::encounter::{predict_obstacle, sample_count, ObstacleTrack};
use crate::error::{Error, Result};
use crate::guidance::{los_guidance, GuidanceParams};
use crate::vessel::{propagate, GuidanceCommand, VesselParams, VesselState, Waypoint};

/// Planner constants. Angles in degrees unless the name says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub course_offsets_deg: Vec<f64>,
    /// Listed in evaluation order (descending).
    pub speed_multipliers: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub return_time: f64,
    pub replan_interval: f64,
    pub k_coll: f64,
    pub d_safe: f64,
    pub risk_exponent: f64,
    pub t_risk: f64,
    /// Distances below this are clamped inside the risk term.
    pub min_distance: f64,
    pub k_colreg: f64,
    /// Crossing ahead of a give-way target with less margin violates Rule 15 [s].
    pub crossing_margin: f64,
    pub k_trans: f64,
    pub k_speed: f64,
    pub k_course: f64,
    pub k_speed_change: f64,
    pub k_course_change: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            course_offsets_deg: (-6..=6).map(|k| k as f64 * 15.0).collect(),
            speed_multipliers: vec![1.0, 0.5, 0.0],
            horizon: 120.0,
            dt: 0.5,
            return_time: 60.0,
            replan_interval: 5.0,
            k_coll: 10.0,
            d_safe: 50.0,
            risk_exponent: 4.0,
            t_risk: 30.0,
            min_distance: 1.0,
            k_colreg: 50.0,
            crossing_margin: 30.0,
            k_trans: 5.0,
            k_speed: 8.0,
            k_course: 4.0,
            k_speed_change: 2.0,
            k_course_change: 2.0,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: String| {
            Err(Error::Validation {
                path: format!("planner.{path}"),
                message,
            })
        };
        if !self.course_offsets_deg.contains(&0.0) || !self.speed_multipliers.contains(&1.0) {
            return bad(
                "course_offsets_deg",
                "candidate grid must contain the nominal (0 deg, 1.0)".into(),
            );
        }
        if let Some(c) = self.course_offsets_deg.iter().find(|c| c.abs() > 90.0) {
            return bad("course_offsets_deg", format!("offset {c} outside [-90, 90]"));
        }
        if let Some(m) = self.speed_multipliers.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return bad("speed_multipliers", format!("multiplier {m} outside [0, 1]"));
        }
        if !(self.dt > 0.0) || !(self.horizon > 0.0) {
            return bad("horizon", "horizon and dt must be positive".into());
        }
        if !(self.return_time > 0.0) || self.return_time > self.horizon {
            return bad("return_time", "must lie in (0, horizon]".into());
        }
        if !(self.replan_interval > 0.0) || self.replan_interval >= self.horizon {
            return bad("replan_interval", "must lie in (0, horizon)".into());
        }
        if !(self.d_safe > 0.0) || !(self.t_risk > 0.0) || !(self.min_distance > 0.0) {
            return bad("d_safe", "risk distances and times must be positive".into());
        }
        Ok(())
    }
}

/// Constant offset applied to the autopilot references.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlOffset {
    /// Radians, positive to starboard.
    pub course_offset: f64,
    pub speed_multiplier: f64,
}

impl ControlOffset {
    pub const NOMINAL: ControlOffset = ControlOffset {
        course_offset: 0.0,
        speed_multiplier: 1.0,
    };

    pub fn new(course_offset: f64, speed_multiplier: f64) -> Self {
        Self {
            course_offset,
            speed_multiplier,
        }
    }

    pub fn from_degrees(course_deg: f64, speed_multiplier: f64) -> Self {
        Self::new(course_deg.to_radians(), speed_multiplier)
    }

    pub fn is_nominal(&self) -> bool {
        self.course_offset == 0.0 && self.speed_multiplier == 1.0
    }

    pub fn course_deg(&self) -> f64 {
        self.course_offset.to_degrees()
    }
}

/// Tie-break between equally costed candidates: smaller course magnitude,
/// then starboard before port, then the higher speed.
pub fn tie_break(a: &ControlOffset, b: &ControlOffset) -> Ordering {
    let side = |o: &ControlOffset| if o.course_offset < 0.0 { 1u8 } else { 0u8 };
    a.course_offset
        .abs()
        .total_cmp(&b.course_offset.abs())
        .then(side(a).cmp(&side(b)))
        .then(b.speed_multiplier.total_cmp(&a.speed_multiplier))
}

/// Returns true when candidate `a` should be preferred over `b`.
pub fn prefer(a_total: f64, a: &ControlOffset, b_total: f64, b: &ControlOffset) -> bool {
    match a_total.total_cmp(&b_total) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => tie_break(a, b) == Ordering::Less,
    }
}

/// The candidate grid, multiplier-major in the configured (descending)
/// order with course offsets ascending.
pub fn generate_candidates(config: &PlannerConfig) -> Vec<ControlOffset> {
    let mut courses = config.course_offsets_deg.clone();
    courses.sort_by(f64::total_cmp);
    config
        .speed_multipliers
        .iter()
        .flat_map(|&m| courses.iter().map(move |&c| ControlOffset::from_degrees(c, m)))
        .collect()
}

/// Sampling of a rollout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RolloutTiming {
    pub horizon: f64,
    pub return_time: f64,
    pub dt: f64,
}

impl From<&PlannerConfig> for RolloutTiming {
    fn from(c: &PlannerConfig) -> Self {
        Self {
            horizon: c.horizon,
            return_time: c.return_time,
            dt: c.dt,
        }
    }
}

/// Everything a rollout needs besides the initial state and the offset.
#[derive(Debug, Clone, Copy)]
pub struct RolloutModel<'a> {
    pub route: &'a [Waypoint],
    pub cruise_speed: f64,
    pub vessel: &'a VesselParams,
    pub guidance: &'a GuidanceParams,
}

/// One forward-simulated candidate trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRollout {
    pub offset: ControlOffset,
    /// States at `k * dt`, k = 0..=horizon/dt.
    pub states: Vec<VesselState>,
    /// `commands[k]` is held over `[k * dt, (k + 1) * dt)`.
    pub commands: Vec<GuidanceCommand>,
    /// Active route segment at each state.
    pub active_indices: Vec<usize>,
    pub horizon: f64,
    pub return_time: f64,
    pub dt: f64,
}

impl CandidateRollout {
    /// Index of the command in effect `elapsed` seconds into the rollout.
    pub fn command_index(&self, elapsed: f64) -> usize {
        let k = (elapsed / self.dt + 1e-9).floor().max(0.0) as usize;
        k.min(self.commands.len() - 1)
    }
}

pub fn rollout_candidate(
    own: &VesselState,
    active_index: usize,
    offset: ControlOffset,
    model: &RolloutModel<'_>,
    timing: &RolloutTiming,
) -> Result<CandidateRollout> {
    let RolloutTiming {
        horizon,
        return_time,
        dt,
    } = *timing;
    if !(dt > 0.0) || !(return_time > 0.0) || !(horizon >= return_time) {
        return Err(Error::InvalidArgument(format!(
            "rollout needs horizon >= return_time > 0 and dt > 0 (horizon={horizon}, return_time={return_time}, dt={dt})"
        )));
    }
    let n = sample_count(horizon, dt);
    let mut states = Vec::with_capacity(n);
    let mut commands = Vec::with_capacity(n - 1);
    let mut active_indices = Vec::with_capacity(n);

    let mut state = *own;
    let mut active = active_index;
    for k in 0..n {
        let (reference, idx) =
            los_guidance(&state, model.route, active, model.guidance, model.cruise_speed)?;
        active = idx;
        states.push(state);
        active_indices.push(active);
        if k + 1 == n {
            break;
        }
        let t = k as f64 * dt;
        let cmd = if t < return_time {
            GuidanceCommand::new(
                reference.course_ref + offset.course_offset,
                offset.speed_multiplier * reference.speed_ref,
            )
        } else {
            reference
        };
        state = propagate(&state, &cmd, dt, model.vessel)?;
        commands.push(cmd);
    }
    Ok(CandidateRollout {
        offset,
        states,
        commands,
        active_indices,
        horizon,
        return_time,
        dt,
    })
}

/// World state at a planning instant. Obstacles are given at `time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSnapshot {
    pub time: f64,
    pub ownship: VesselState,
    pub active_index: usize,
    pub obstacles: Vec<ObstacleTrack>,
}

/// Static planning context: the route being followed and the configuration.
#[derive(Debug, Clone, Copy)]
pub struct PlanContext<'a> {
    pub route: &'a [Waypoint],
    pub cruise_speed: f64,
    pub config: &'a SimConfig,
}

impl<'a> PlanContext<'a> {
    pub fn new(scenario: &'a crate::Scenario, config: &'a SimConfig) -> Self {
        Self {
            route: &scenario.route,
            cruise_speed: scenario.cruise_speed,
            config,
        }
    }

    pub fn model(&self) -> RolloutModel<'a> {
        RolloutModel {
            route: self.route,
            cruise_speed: self.cruise_speed,
            vessel: &self.config.vessel,
            guidance: &self.config.guidance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub time: f64,
    /// Index of the selected candidate.
    pub solution: usize,
    /// Index of the zero-offset candidate.
    pub nominal: usize,
    pub candidates: Vec<CandidateRollout>,
    pub breakdowns: Vec<CostBreakdown>,
    pub references: GuidanceCommand,
    pub previous_offset: ControlOffset,
}

impl PlanResult {
    pub fn solution_offset(&self) -> ControlOffset {
        self.candidates[self.solution].offset
    }

    pub fn solution_rollout(&self) -> &CandidateRollout {
        &self.candidates[self.solution]
    }

    pub fn offsets(&self) -> impl Iterator<Item = ControlOffset> + '_ {
        self.candidates.iter().map(|c| c.offset)
    }
}

/// Rolls out and costs every candidate, then picks the cheapest.
pub fn plan(
    ctx: &PlanContext<'_>,
    snapshot: &WorldSnapshot,
    previous_offset: ControlOffset,
) -> Result<PlanResult> {
    let cfg = &ctx.config.planner;
    let timing = RolloutTiming::from(cfg);
    let model = ctx.model();
    let offsets = generate_candidates(cfg);
    let nominal = offsets
        .iter()
        .position(ControlOffset::is_nominal)
        .ok_or_else(|| Error::Invariant("candidate grid lacks the nominal offset".into()))?;

    let predictions = snapshot
        .obstacles
        .iter()
        .map(|o| predict_obstacle(o, cfg.horizon, cfg.dt))
        .collect::<Result<Vec<_>>>()?;

    let mut candidates = Vec::with_capacity(offsets.len());
    let mut breakdowns = Vec::with_capacity(offsets.len());
    for offset in offsets {
        let rollout = rollout_candidate(
            &snapshot.ownship,
            snapshot.active_index,
            offset,
            &model,
            &timing,
        )?;
        breakdowns.push(evaluate_costs(ctx, snapshot, &rollout, &predictions, previous_offset)?);
        candidates.push(rollout);
    }

    let mut solution = 0;
    for k in 1..candidates.len() {
        if prefer(
            breakdowns[k].total,
            &candidates[k].offset,
            breakdowns[solution].total,
            &candidates[solution].offset,
        ) {
            solution = k;
        }
    }

    let (references, _) = los_guidance(
        &snapshot.ownship,
        ctx.route,
        snapshot.active_index,
        &ctx.config.guidance,
        ctx.cruise_speed,
    )?;

    Ok(PlanResult {
        time: snapshot.time,
        solution,
        nominal,
        candidates,
        breakdowns,
        references,
        previous_offset,
    })
}
