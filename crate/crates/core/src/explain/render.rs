use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::{Component, ControlOffset, CostMeasures, TransitionBehavior};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FoilLabel {
    #[serde(rename = "original route")]
    OriginalRoute,
    #[serde(rename = "alternative")]
    Alternative,
}

impl FoilLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            FoilLabel::OriginalRoute => "original route",
            FoilLabel::Alternative => "alternative",
        }
    }
}

/// The semantic measure shown for a selected cost component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureValue {
    Cpa {
        obstacle_id: String,
        distance: f64,
    },
    ColregRule(Option<u8>),
    Transition(TransitionBehavior),
    /// m/s below the reference speed.
    SpeedOffset(f64),
    CourseOffsetDeg(f64),
}

impl MeasureValue {
    /// Measure of `component` for the fact (`for_fact`) or the foil. The CPA
    /// is reported to the vessel that dominates the foil's collision risk.
    pub fn for_component(
        component: Component,
        fact: &CostMeasures,
        foil: &CostMeasures,
        for_fact: bool,
    ) -> Option<MeasureValue> {
        let own = if for_fact { fact } else { foil };
        match component {
            Component::DynamicObstacle => {
                let vessel = foil.cpa_obstacle_id.as_ref().or(fact.cpa_obstacle_id.as_ref())?;
                let distance = own.cpa_to(vessel)?;
                distance.is_finite().then(|| MeasureValue::Cpa {
                    obstacle_id: vessel.clone(),
                    distance,
                })
            }
            Component::Colreg => Some(MeasureValue::ColregRule(own.colreg_rule)),
            Component::Transition => Some(MeasureValue::Transition(own.transition_behavior)),
            Component::SpeedReference => Some(MeasureValue::SpeedOffset(own.speed_offset)),
            Component::CourseReference => Some(MeasureValue::CourseOffsetDeg(own.course_offset_deg)),
            Component::SpeedChange | Component::CourseChange => None,
        }
    }
}

fn whole(x: f64) -> i64 {
    let r = x.round() as i64;
    if r == 0 {
        0
    } else {
        r
    }
}

fn one_decimal(x: f64) -> String {
    let s = format!("{:.1}", (x * 10.0).round() / 10.0);
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

/// Fills the sentence template for the selected component.
pub fn render_explanation(
    selected: Option<Component>,
    fact: &CostMeasures,
    foil: &CostMeasures,
    fact_offset: &ControlOffset,
    foil_offset: &ControlOffset,
    label: FoilLabel,
) -> Result<String> {
    let label = label.as_str();
    let missing = |what: &str| Error::Invariant(format!("no {what} measure recorded"));
    let text = match selected {
        None => format!("The {label} scores no worse than the proposed maneuver on any objective"),
        Some(Component::DynamicObstacle) => {
            let vessel = foil
                .cpa_obstacle_id
                .as_ref()
                .or(fact.cpa_obstacle_id.as_ref())
                .ok_or_else(|| missing("CPA vessel"))?;
            let fact_cpa = fact.cpa_to(vessel).filter(|d| d.is_finite());
            let foil_cpa = foil.cpa_to(vessel).filter(|d| d.is_finite());
            let (Some(a), Some(b)) = (fact_cpa, foil_cpa) else {
                return Err(missing("CPA distance"));
            };
            format!(
                "Proposed maneuver keeps a CPA of {} m to {vessel}; the {label} gives {} m",
                whole(a),
                whole(b)
            )
        }
        Some(Component::Colreg) => {
            let rule = foil.colreg_rule.ok_or_else(|| missing("COLREG rule"))?;
            format!("Proposed maneuver complies with COLREG Rule {rule}; the {label} would violate it")
        }
        Some(Component::Transition) => format!(
            "Proposed maneuver avoids switching maneuver side; the {label} would reverse the previous maneuver"
        ),
        Some(Component::SpeedReference) => format!(
            "Proposed maneuver keeps speed closer to plan ({} vs {} m/s offset)",
            one_decimal(fact.speed_offset),
            one_decimal(foil.speed_offset)
        ),
        Some(Component::CourseReference) => format!(
            "Proposed maneuver stays closer to the planned course ({}° vs {}° offset)",
            whole(fact_offset.course_deg()),
            whole(foil_offset.course_deg())
        ),
        Some(Component::SpeedChange) => format!(
            "Proposed maneuver keeps speed more consistent with the previous plan than the {label}"
        ),
        Some(Component::CourseChange) => format!(
            "Proposed maneuver keeps course more consistent with the previous plan than the {label}"
        ),
    };
    Ok(text)
}
