//! Post-hoc contrastive explanations for a finished plan.
//!
//! The fact is the planner's solution; foils are drawn from the same
//! candidate set, so a foil never costs less than the fact in total.

mod probe;
mod render;

use serde::{Deserialize, Serialize};

pub use probe::{ahead_of_time_probe, advance_world, DecisionPoint, WorldState};
pub use render::{render_explanation, FoilLabel, MeasureValue};

use crate::error::Result;
use crate::planner::{prefer, Component, ControlOffset, CostBreakdown, PlanResult};

/// Maneuver category used to pick the alternative foil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Characteristic {
    ReducedSpeed,
    PortTurn,
    StarboardTurn,
    CloserToRoute,
    FartherFromRoute,
}

impl Characteristic {
    pub const ALL: [Characteristic; 5] = [
        Characteristic::ReducedSpeed,
        Characteristic::PortTurn,
        Characteristic::StarboardTurn,
        Characteristic::CloserToRoute,
        Characteristic::FartherFromRoute,
    ];

    /// Constraint an alternative must satisfy relative to the fact.
    pub fn admits(self, alternative: &ControlOffset, fact: &ControlOffset) -> bool {
        match self {
            Characteristic::ReducedSpeed => alternative.speed_multiplier < fact.speed_multiplier,
            Characteristic::PortTurn => alternative.course_offset < 0.0,
            Characteristic::StarboardTurn => alternative.course_offset > 0.0,
            Characteristic::CloserToRoute => {
                alternative.course_offset.abs() < fact.course_offset.abs()
            }
            Characteristic::FartherFromRoute => {
                alternative.course_offset.abs() > fact.course_offset.abs()
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Characteristic::ReducedSpeed => "reduced speed",
            Characteristic::PortTurn => "port turn",
            Characteristic::StarboardTurn => "starboard turn",
            Characteristic::CloserToRoute => "closer to original route",
            Characteristic::FartherFromRoute => "farther from original route",
        }
    }
}

impl std::str::FromStr for Characteristic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown characteristic `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoilSelection {
    pub fact_index: usize,
    pub nominal_index: usize,
    /// None when no candidate other than the fact satisfies the constraint.
    pub alternative_index: Option<usize>,
    pub characteristic: Characteristic,
}

/// Picks the cheapest candidate satisfying `characteristic`, excluding the fact.
pub fn select_foil(plan: &PlanResult, characteristic: Characteristic) -> FoilSelection {
    let fact = plan.solution_offset();
    let mut best: Option<usize> = None;
    for (k, candidate) in plan.candidates.iter().enumerate() {
        if k == plan.solution || !characteristic.admits(&candidate.offset, &fact) {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => prefer(
                plan.breakdowns[k].total,
                &candidate.offset,
                plan.breakdowns[b].total,
                &plan.candidates[b].offset,
            ),
        };
        if better {
            best = Some(k);
        }
    }
    FoilSelection {
        fact_index: plan.solution,
        nominal_index: plan.nominal,
        alternative_index: best,
        characteristic,
    }
}

/// Components on which the fact is strictly cheaper than the foil.
pub fn contrastive_set(fact: &CostBreakdown, foil: &CostBreakdown) -> Vec<Component> {
    Component::ALL
        .into_iter()
        .filter(|&c| fact.value(c) < foil.value(c))
        .collect()
}

/// The component in `set` with the largest reduction relative to the foil.
/// Ties go to the earlier component in [`Component::ALL`].
pub fn select_contrastive_cost(
    set: &[Component],
    fact: &CostBreakdown,
    foil: &CostBreakdown,
) -> Option<Component> {
    let mut best: Option<(Component, f64)> = None;
    for &c in set {
        let diff = fact.value(c) - foil.value(c);
        match best {
            Some((b, d)) if diff > d || (diff == d && b <= c) => {}
            _ => best = Some((c, diff)),
        }
    }
    best.map(|(c, _)| c)
}

/// True once the planner deviates from the autopilot references.
pub fn event_trigger(plan: &PlanResult) -> bool {
    !plan.solution_offset().is_nominal()
}

/// A candidate as referenced from an explanation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRef {
    pub index: usize,
    pub offset: ControlOffset,
    pub costs: CostBreakdown,
}

impl TrajectoryRef {
    fn from_plan(plan: &PlanResult, index: usize) -> Self {
        Self {
            index,
            offset: plan.candidates[index].offset,
            costs: plan.breakdowns[index].clone(),
        }
    }
}

/// Why the fact was chosen over one foil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastiveExplanation {
    pub fact: TrajectoryRef,
    /// None when no alternative satisfies the requested characteristic.
    pub foil: Option<TrajectoryRef>,
    pub foil_label: FoilLabel,
    pub contrastive_set: Vec<Component>,
    pub selected_cost: Option<Component>,
    pub fact_measure: Option<MeasureValue>,
    pub foil_measure: Option<MeasureValue>,
    pub text: String,
}

/// Builds the explanation of `plan`'s solution against candidate `foil`.
pub fn explain(
    plan: &PlanResult,
    foil: Option<usize>,
    label: FoilLabel,
    characteristic: Option<Characteristic>,
) -> Result<ContrastiveExplanation> {
    let fact = TrajectoryRef::from_plan(plan, plan.solution);
    let Some(foil_index) = foil else {
        let what = characteristic.map_or("the requested characteristic", Characteristic::label);
        return Ok(ContrastiveExplanation {
            fact,
            foil: None,
            foil_label: label,
            contrastive_set: Vec::new(),
            selected_cost: None,
            fact_measure: None,
            foil_measure: None,
            text: format!("No alternative available for {what}"),
        });
    };
    let foil = TrajectoryRef::from_plan(plan, foil_index);
    let set = contrastive_set(&fact.costs, &foil.costs);
    let selected = select_contrastive_cost(&set, &fact.costs, &foil.costs);
    let text = render_explanation(
        selected,
        &fact.costs.measures,
        &foil.costs.measures,
        &fact.offset,
        &foil.offset,
        label,
    )?;
    let (fact_measure, foil_measure) = match selected {
        Some(c) => (
            MeasureValue::for_component(c, &fact.costs.measures, &foil.costs.measures, true),
            MeasureValue::for_component(c, &fact.costs.measures, &foil.costs.measures, false),
        ),
        None => (None, None),
    };
    Ok(ContrastiveExplanation {
        fact,
        foil: Some(foil),
        foil_label: label,
        contrastive_set: set,
        selected_cost: selected,
        fact_measure,
        foil_measure,
        text,
    })
}

#[cfg(test)]
mod tests;
