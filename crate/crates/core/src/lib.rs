//! Deterministic maritime collision-avoidance simulation with a
//! simulation-based MPC planner and contrastive explanations of its choices.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod config;
pub mod encounter;
pub mod error;
pub mod explain;
pub mod guidance;
pub mod planner;
pub mod scenario;
pub mod session;
pub mod trace;
pub mod vessel;

pub use config::{ServerConfig, SessionConfig, SimConfig};
pub use encounter::{classify_encounter, cpa, predict_obstacle, CpaResult, EncounterParams, EncounterType, ObstacleTrack};
pub use error::{Error, Result};
pub use explain::{
    ahead_of_time_probe, contrastive_set, event_trigger, render_explanation, select_contrastive_cost,
    select_foil, Characteristic, ContrastiveExplanation, DecisionPoint, FoilLabel, FoilSelection,
    WorldState,
};
pub use guidance::{los_guidance, GuidanceParams};
pub use planner::{
    evaluate_costs, generate_candidates, plan, rollout_candidate, CandidateRollout, Component,
    ControlOffset, CostBreakdown, CostMeasures, PlanContext, PlanResult, PlannerConfig, WorldSnapshot,
};
pub use scenario::{bundled_scenario, bundled_scenarios, load_scenario, Scenario};
pub use session::{run_headless, Playback, Session, SessionSnapshot, SupervisorDecision};
pub use trace::{TraceEntry, TraceRecord, Verdict};
pub use vessel::{propagate, wrap_angle, GuidanceCommand, VesselParams, VesselState, Waypoint};
