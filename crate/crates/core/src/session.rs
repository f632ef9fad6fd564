//! Live simulation sessions: fixed-step loop with periodic replanning,
//! supervisor decisions and the trace they produce.

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::explain::{ahead_of_time_probe, Characteristic, DecisionPoint, WorldState};
use crate::planner::{plan, ControlOffset, PlanContext, PlanResult};
use crate::scenario::Scenario;
use crate::trace::{
    DecisionPointRecord, ExplanationReason, ObstacleState, TraceEntry, TraceRecord, Verdict,
};
use crate::vessel::VesselState;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupervisorDecision {
    Pending,
    Accepted,
    Declined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Playback {
    Playing,
    Paused,
}

/// Serializable view of a session for clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub session_id: String,
    pub scenario_id: String,
    pub title: String,
    pub clock: f64,
    pub ownship: VesselState,
    pub obstacles: Vec<ObstacleState>,
    pub previous_offset: ControlOffset,
    pub solution: ControlOffset,
    pub supervisor_decision: SupervisorDecision,
    pub playback: Playback,
    pub characteristic: Characteristic,
    pub decision_point: Option<DecisionPointRecord>,
    pub last_seq: u64,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    scenario: Scenario,
    config: SimConfig,
    world: WorldState,
    plan: PlanResult,
    decision_point: Option<DecisionPoint>,
    decision: SupervisorDecision,
    playback: Playback,
    characteristic: Characteristic,
    trace: Vec<TraceEntry>,
}

impl Session {
    /// Starts a paused session at the scenario start and probes ahead for
    /// the decision point so its explanations exist before it is reached.
    pub fn create(id: impl Into<String>, scenario: Scenario, config: SimConfig) -> Result<Self> {
        config.validate()?;
        let id = id.into();
        let world = WorldState::initial(&scenario);
        let ctx = PlanContext::new(&scenario, &config);
        let first = plan(&ctx, &world.snapshot(), world.previous_offset)?;
        let decision_point = ahead_of_time_probe(
            &ctx,
            &world,
            config.session.probe_time_limit,
            scenario.foil_characteristic,
        )?;
        let characteristic = scenario.foil_characteristic;
        let mut session = Self {
            id: id.clone(),
            world,
            plan: first,
            decision_point,
            decision: SupervisorDecision::Pending,
            playback: Playback::Paused,
            characteristic,
            trace: Vec::new(),
            scenario,
            config,
        };
        session.emit(TraceRecord::Session {
            time: 0.0,
            session_id: id,
            scenario: session.scenario.document().clone(),
            config: session.config.clone(),
        });
        session.emit_tick();
        session.emit(TraceRecord::plan(&session.plan));
        if let Some(dp) = &session.decision_point {
            let record = TraceRecord::Explanation {
                time: session.world.time,
                reason: ExplanationReason::DecisionPoint,
                decision_point: Box::new(dp.into()),
            };
            session.emit(record);
        }
        Ok(session)
    }

    fn emit(&mut self, record: TraceRecord) -> TraceEntry {
        let entry = TraceEntry {
            seq: self.trace.len() as u64 + 1,
            record,
        };
        self.trace.push(entry.clone());
        entry
    }

    fn emit_tick(&mut self) -> TraceEntry {
        let record = TraceRecord::Tick {
            time: self.world.time,
            ownship: self.world.ownship,
            obstacles: self.obstacle_states(),
        };
        self.emit(record)
    }

    fn obstacle_states(&self) -> Vec<ObstacleState> {
        self.world
            .obstacles()
            .into_iter()
            .map(|o| ObstacleState {
                id: o.id,
                state: o.state,
            })
            .collect()
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn clock(&self) -> f64 {
        self.world.time
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn current_plan(&self) -> &PlanResult {
        &self.plan
    }

    pub fn decision_point(&self) -> Option<&DecisionPoint> {
        self.decision_point.as_ref()
    }

    pub fn supervisor_decision(&self) -> SupervisorDecision {
        self.decision
    }

    pub fn playback(&self) -> Playback {
        self.playback
    }

    pub fn characteristic(&self) -> Characteristic {
        self.characteristic
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn records_after(&self, seq: u64) -> &[TraceEntry] {
        let start = (seq as usize).min(self.trace.len());
        &self.trace[start..]
    }

    pub fn play(&mut self) {
        self.playback = Playback::Playing;
    }

    pub fn pause(&mut self) {
        self.playback = Playback::Paused;
    }

    /// Advances one simulation tick. Returns the records emitted.
    pub fn step(&mut self) -> Result<Vec<TraceEntry>> {
        let start = self.trace.len();
        if self.playback == Playback::Paused {
            let time = self.world.time;
            self.emit(TraceRecord::Warning {
                time,
                message: "session is paused; step ignored".into(),
            });
            return Ok(self.trace[start..].to_vec());
        }
        let tick = self.config.session.tick;
        let declined = self.decision == SupervisorDecision::Declined;
        {
            let ctx = PlanContext::new(&self.scenario, &self.config);
            let following = (!declined).then_some(&self.plan);
            self.world.step(&ctx, following, tick)?;
        }
        self.emit_tick();

        if self.world.time - self.plan.time >= self.config.planner.replan_interval - EPS {
            self.world.previous_offset = if declined {
                ControlOffset::NOMINAL
            } else {
                self.plan.solution_offset()
            };
            let ctx = PlanContext::new(&self.scenario, &self.config);
            self.plan = plan(&ctx, &self.world.snapshot(), self.world.previous_offset)?;
            let record = TraceRecord::plan(&self.plan);
            self.emit(record);
        }
        Ok(self.trace[start..].to_vec())
    }

    pub fn record_decision(&mut self, verdict: Verdict) -> Result<TraceEntry> {
        if self.decision != SupervisorDecision::Pending {
            return Err(Error::Conflict(format!(
                "decision already recorded ({:?})",
                self.decision
            )));
        }
        self.decision = match verdict {
            Verdict::Accepted => SupervisorDecision::Accepted,
            Verdict::Declined => SupervisorDecision::Declined,
        };
        let time = self.world.time;
        Ok(self.emit(TraceRecord::Decision { time, verdict }))
    }

    /// Re-selects the alternative foil on the frozen decision-point plan.
    pub fn set_foil_characteristic(&mut self, characteristic: Characteristic) -> Result<TraceEntry> {
        let dp = self
            .decision_point
            .as_ref()
            .ok_or_else(|| Error::Precondition("no decision point yet".into()))?;
        let updated = dp.with_characteristic(characteristic)?;
        let record = TraceRecord::Explanation {
            time: self.world.time,
            reason: ExplanationReason::FoilChanged,
            decision_point: Box::new((&updated).into()),
        };
        self.decision_point = Some(updated);
        self.characteristic = characteristic;
        Ok(self.emit(record))
    }

    /// Rewinds or fast-forwards by re-simulating from the scenario start.
    /// Any recorded decision is discarded.
    pub fn seek(&mut self, target: f64) -> Result<Vec<TraceEntry>> {
        if !target.is_finite() || target < 0.0 {
            return Err(Error::InvalidArgument(format!("cannot seek to {target}")));
        }
        let mut fresh = Session::create(self.id.clone(), self.scenario.clone(), self.config.clone())?;
        fresh.play();
        while fresh.world.time < target - EPS {
            fresh.step()?;
        }
        if self.characteristic != fresh.characteristic {
            if let Some(dp) = &fresh.decision_point {
                fresh.decision_point = Some(dp.with_characteristic(self.characteristic)?);
                fresh.characteristic = self.characteristic;
            }
        }
        let start = self.trace.len();
        self.world = fresh.world;
        self.plan = fresh.plan;
        self.decision_point = fresh.decision_point;
        self.decision = SupervisorDecision::Pending;
        let time = self.world.time;
        self.emit(TraceRecord::Seek { time, target });
        self.emit_tick();
        Ok(self.trace[start..].to_vec())
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            session_id: self.id.clone(),
            scenario_id: self.scenario.id.clone(),
            title: self.scenario.title.clone(),
            clock: self.world.time,
            ownship: self.world.ownship,
            obstacles: self.obstacle_states(),
            previous_offset: self.world.previous_offset,
            solution: self.plan.solution_offset(),
            supervisor_decision: self.decision,
            playback: self.playback,
            characteristic: self.characteristic,
            decision_point: self.decision_point.as_ref().map(Into::into),
            last_seq: self.trace.len() as u64,
        }
    }

    /// Smallest ownship-obstacle distance over all recorded ticks.
    pub fn min_separation(&self) -> f64 {
        self.trace
            .iter()
            .filter_map(|e| match &e.record {
                TraceRecord::Tick {
                    ownship, obstacles, ..
                } => obstacles
                    .iter()
                    .map(|o| ownship.distance_to(&o.state))
                    .reduce(f64::min),
                _ => None,
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Runs a scenario without supervision UI: the verdict is recorded as soon
/// as the clock reaches the decision point.
pub fn run_headless(
    scenario: Scenario,
    config: SimConfig,
    verdict: Verdict,
    duration: f64,
) -> Result<Session> {
    let id = format!("{}-headless", scenario.id);
    let mut session = Session::create(id, scenario, config)?;
    session.play();
    while session.clock() < duration - EPS {
        let due = session
            .decision_point
            .as_ref()
            .is_some_and(|dp| session.clock() >= dp.trigger_time - EPS);
        if due && session.decision == SupervisorDecision::Pending {
            session.record_decision(verdict)?;
        }
        session.step()?;
    }
    Ok(session)
}
