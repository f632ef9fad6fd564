//! Append-only session trace, stored as one JSON record per line.

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::explain::{Characteristic, ContrastiveExplanation, DecisionPoint};
use crate::planner::{ControlOffset, CostBreakdown, PlanResult};
use crate::scenario::ScenarioDocument;
use crate::vessel::VesselState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Declined,
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "accept" | "accepted" => Ok(Verdict::Accepted),
            "decline" | "declined" => Ok(Verdict::Declined),
            other => Err(format!("unknown verdict `{other}` (expected accept|decline)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleState {
    pub id: String,
    pub state: VesselState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateTotal {
    pub offset: ControlOffset,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateCosts {
    pub offset: ControlOffset,
    pub costs: CostBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectories {
    pub fact: Vec<VesselState>,
    pub nominal: Vec<VesselState>,
    pub alternative: Option<Vec<VesselState>>,
}

/// Serialized form of a decision point: every candidate's costs, the three
/// displayed trajectories and both explanations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionPointRecord {
    pub trigger_time: f64,
    pub characteristic: Characteristic,
    pub fact_index: usize,
    pub nominal_index: usize,
    pub alternative_index: Option<usize>,
    pub previous_offset: ControlOffset,
    pub candidates: Vec<CandidateCosts>,
    pub trajectories: Trajectories,
    pub versus_nominal: ContrastiveExplanation,
    pub versus_alternative: ContrastiveExplanation,
}

impl From<&DecisionPoint> for DecisionPointRecord {
    fn from(dp: &DecisionPoint) -> Self {
        let plan = &dp.plan;
        Self {
            trigger_time: dp.trigger_time,
            characteristic: dp.foil.characteristic,
            fact_index: dp.foil.fact_index,
            nominal_index: dp.foil.nominal_index,
            alternative_index: dp.foil.alternative_index,
            previous_offset: plan.previous_offset,
            candidates: plan
                .candidates
                .iter()
                .zip(&plan.breakdowns)
                .map(|(c, b)| CandidateCosts {
                    offset: c.offset,
                    costs: b.clone(),
                })
                .collect(),
            trajectories: Trajectories {
                fact: plan.candidates[dp.foil.fact_index].states.clone(),
                nominal: plan.candidates[dp.foil.nominal_index].states.clone(),
                alternative: dp
                    .foil
                    .alternative_index
                    .map(|i| plan.candidates[i].states.clone()),
            },
            versus_nominal: dp.versus_nominal.clone(),
            versus_alternative: dp.versus_alternative.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplanationReason {
    DecisionPoint,
    FoilChanged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceRecord {
    /// Header: everything needed to re-simulate the session.
    Session {
        time: f64,
        session_id: String,
        scenario: ScenarioDocument,
        config: SimConfig,
    },
    Tick {
        time: f64,
        ownship: VesselState,
        obstacles: Vec<ObstacleState>,
    },
    Plan {
        time: f64,
        solution_index: usize,
        solution: ControlOffset,
        candidates: Vec<CandidateTotal>,
        solution_breakdown: CostBreakdown,
    },
    Explanation {
        time: f64,
        reason: ExplanationReason,
        decision_point: Box<DecisionPointRecord>,
    },
    Decision {
        time: f64,
        verdict: Verdict,
    },
    Seek {
        time: f64,
        target: f64,
    },
    Warning {
        time: f64,
        message: String,
    },
}

impl TraceRecord {
    pub fn time(&self) -> f64 {
        match self {
            TraceRecord::Session { time, .. }
            | TraceRecord::Tick { time, .. }
            | TraceRecord::Plan { time, .. }
            | TraceRecord::Explanation { time, .. }
            | TraceRecord::Decision { time, .. }
            | TraceRecord::Seek { time, .. }
            | TraceRecord::Warning { time, .. } => *time,
        }
    }

    /// Event name used on the session event stream.
    pub fn event_name(&self) -> &'static str {
        match self {
            TraceRecord::Session { .. } => "session",
            TraceRecord::Tick { .. } => "state",
            TraceRecord::Plan { .. } => "plan",
            TraceRecord::Explanation { .. } => "explanation",
            TraceRecord::Decision { .. } => "decision-recorded",
            TraceRecord::Seek { .. } => "seek",
            TraceRecord::Warning { .. } => "warning",
        }
    }

    pub fn plan(plan: &PlanResult) -> Self {
        TraceRecord::Plan {
            time: plan.time,
            solution_index: plan.solution,
            solution: plan.solution_offset(),
            candidates: plan
                .candidates
                .iter()
                .zip(&plan.breakdowns)
                .map(|(c, b)| CandidateTotal {
                    offset: c.offset,
                    total: b.total,
                })
                .collect(),
            solution_breakdown: plan.breakdowns[plan.solution].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub seq: u64,
    #[serde(flatten)]
    pub record: TraceRecord,
}

pub fn to_jsonl(entries: &[TraceEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(e).expect("trace records serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_jsonl(text: &str) -> Result<Vec<TraceEntry>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| Error::Parse {
                path: format!("line {}", i + 1),
                message: e.to_string(),
            })
        })
        .collect()
}
