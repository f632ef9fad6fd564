//! Ahead-of-time simulation: look for the first future replan at which the
//! planner leaves the autopilot references, and explain it in advance.

use serde::{Deserialize, Serialize};

use super::{explain, event_trigger, select_foil, Characteristic, ContrastiveExplanation, FoilLabel, FoilSelection};
use crate::encounter::ObstacleTrack;
use crate::error::{Error, Result};
use crate::planner::{plan, ControlOffset, PlanContext, PlanResult, WorldSnapshot};
use crate::vessel::propagate;
use crate::guidance::los_guidance;

/// Mutable simulation world. Obstacle tracks are kept at their reference
/// time and extrapolated on demand, so every copy of the world computes
/// identical obstacle positions for a given clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub time: f64,
    pub ownship: crate::vessel::VesselState,
    pub active_index: usize,
    pub tracks: Vec<ObstacleTrack>,
    pub previous_offset: ControlOffset,
}

impl WorldState {
    pub fn initial(scenario: &crate::Scenario) -> Self {
        Self {
            time: 0.0,
            ownship: scenario.ownship_initial,
            active_index: 0,
            tracks: scenario.obstacles.clone(),
            previous_offset: ControlOffset::NOMINAL,
        }
    }

    pub fn obstacles(&self) -> Vec<ObstacleTrack> {
        self.tracks.iter().map(|t| t.at(self.time)).collect()
    }

    pub fn snapshot(&self) -> WorldSnapshot {
        WorldSnapshot {
            time: self.time,
            ownship: self.ownship,
            active_index: self.active_index,
            obstacles: self.obstacles(),
        }
    }

    /// One tick of the ownship executing `plan`'s solution (or, with
    /// `plan = None`, plain LOS tracking).
    pub fn step(&mut self, ctx: &PlanContext<'_>, plan: Option<&PlanResult>, tick: f64) -> Result<()> {
        let next_time = self.time + tick;
        match plan {
            Some(plan) => {
                let rollout = plan.solution_rollout();
                let k = rollout.command_index(self.time - plan.time);
                self.ownship = propagate(&self.ownship, &rollout.commands[k], tick, &ctx.config.vessel)?;
                let after = rollout.command_index(next_time - plan.time);
                self.active_index = rollout.active_indices[after.min(rollout.active_indices.len() - 1)];
            }
            None => {
                let (cmd, idx) = los_guidance(
                    &self.ownship,
                    ctx.route,
                    self.active_index,
                    &ctx.config.guidance,
                    ctx.cruise_speed,
                )?;
                self.ownship = propagate(&self.ownship, &cmd, tick, &ctx.config.vessel)?;
                self.active_index = idx;
            }
        }
        self.time = next_time;
        Ok(())
    }
}

/// Advances a copy of `world` by `duration`, following `plan`'s solution.
pub fn advance_world(
    ctx: &PlanContext<'_>,
    world: &WorldState,
    plan: &PlanResult,
    duration: f64,
    tick: f64,
) -> Result<WorldState> {
    let steps = (duration / tick).round() as usize;
    if steps == 0 || ((steps as f64) * tick - duration).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "duration {duration} is not a positive multiple of tick {tick}"
        )));
    }
    let mut w = world.clone();
    for _ in 0..steps {
        w.step(ctx, Some(plan), tick)?;
    }
    w.previous_offset = plan.solution_offset();
    Ok(w)
}

/// A predicted replan at which the planner first deviates from the
/// autopilot, with its explanations frozen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionPoint {
    pub trigger_time: f64,
    pub plan: PlanResult,
    pub foil: FoilSelection,
    pub versus_nominal: ContrastiveExplanation,
    pub versus_alternative: ContrastiveExplanation,
}

impl DecisionPoint {
    pub fn build(plan: PlanResult, characteristic: Characteristic) -> Result<Self> {
        let foil = select_foil(&plan, characteristic);
        let versus_nominal = explain(&plan, Some(foil.nominal_index), FoilLabel::OriginalRoute, None)?;
        let versus_alternative = explain(
            &plan,
            foil.alternative_index,
            FoilLabel::Alternative,
            Some(characteristic),
        )?;
        Ok(Self {
            trigger_time: plan.time,
            plan,
            foil,
            versus_nominal,
            versus_alternative,
        })
    }

    /// Re-selects the alternative foil; the nominal comparison is kept.
    pub fn with_characteristic(&self, characteristic: Characteristic) -> Result<Self> {
        let foil = select_foil(&self.plan, characteristic);
        let versus_alternative = explain(
            &self.plan,
            foil.alternative_index,
            FoilLabel::Alternative,
            Some(characteristic),
        )?;
        Ok(Self {
            foil,
            versus_alternative,
            ..self.clone()
        })
    }
}

/// Replans every replan interval on a private copy of the world until the
/// planner adds an offset, or `time_limit` seconds have been probed.
pub fn ahead_of_time_probe(
    ctx: &PlanContext<'_>,
    world: &WorldState,
    time_limit: f64,
    characteristic: Characteristic,
) -> Result<Option<DecisionPoint>> {
    let step = ctx.config.planner.replan_interval;
    let steps = (time_limit / step).round();
    if !(time_limit > 0.0) || (steps * step - time_limit).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "time limit {time_limit} must be a positive multiple of {step}"
        )));
    }
    let tick = ctx.config.session.tick;
    let mut w = world.clone();
    for i in 0..=steps as usize {
        let p = plan(ctx, &w.snapshot(), w.previous_offset)?;
        if event_trigger(&p) {
            return DecisionPoint::build(p, characteristic).map(Some);
        }
        if i == steps as usize {
            break;
        }
        w = advance_world(ctx, &w, &p, step, tick)?;
    }
    Ok(None)
}
