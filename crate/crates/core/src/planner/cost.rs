use serde::{Deserialize, Serialize};

use super::{ControlOffset, CandidateRollout, PlanContext, WorldSnapshot};
use crate::encounter::{classify_encounter, EncounterType};
use crate::error::{Error, Result};
use crate::vessel::VesselState;

/// The seven additive cost components, in explanation priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    #[serde(rename = "f_DO")]
    DynamicObstacle,
    #[serde(rename = "f_CLRG")]
    Colreg,
    #[serde(rename = "f_Trans")]
    Transition,
    #[serde(rename = "f_Uref")]
    SpeedReference,
    #[serde(rename = "f_chiref")]
    CourseReference,
    #[serde(rename = "f_dU")]
    SpeedChange,
    #[serde(rename = "f_dchi")]
    CourseChange,
}

impl Component {
    pub const ALL: [Component; 7] = [
        Component::DynamicObstacle,
        Component::Colreg,
        Component::Transition,
        Component::SpeedReference,
        Component::CourseReference,
        Component::SpeedChange,
        Component::CourseChange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::DynamicObstacle => "f_DO",
            Component::Colreg => "f_CLRG",
            Component::Transition => "f_Trans",
            Component::SpeedReference => "f_Uref",
            Component::CourseReference => "f_chiref",
            Component::SpeedChange => "f_dU",
            Component::CourseChange => "f_dchi",
        }
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionBehavior {
    #[default]
    None,
    SideSwitch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleCpa {
    pub id: String,
    #[serde(with = "finite_or_null")]
    pub distance: f64,
}

/// Human-meaningful quantities recorded while the costs are computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMeasures {
    /// Smallest sampled separation to `cpa_obstacle_id`; infinite without obstacles.
    #[serde(with = "finite_or_null")]
    pub cpa_distance: f64,
    pub cpa_obstacle_id: Option<String>,
    /// Smallest sampled separation to every obstacle, in scenario order.
    pub obstacle_cpa: Vec<ObstacleCpa>,
    pub colreg_rule: Option<u8>,
    pub transition_behavior: TransitionBehavior,
    /// Speed reduction relative to the reference [m/s].
    pub speed_offset: f64,
    /// Course offset [deg].
    pub course_offset_deg: f64,
}

impl Default for CostMeasures {
    /// Measures of a zero-offset trajectory in an empty world.
    fn default() -> Self {
        Self {
            cpa_distance: f64::INFINITY,
            cpa_obstacle_id: None,
            obstacle_cpa: Vec::new(),
            colreg_rule: None,
            transition_behavior: TransitionBehavior::None,
            speed_offset: 0.0,
            course_offset_deg: 0.0,
        }
    }
}

impl CostMeasures {
    pub fn cpa_to(&self, id: &str) -> Option<f64> {
        self.obstacle_cpa
            .iter()
            .find(|c| c.id == id)
            .map(|c| c.distance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    #[serde(rename = "f_DO")]
    pub dynamic_obstacle: f64,
    #[serde(rename = "f_CLRG")]
    pub colreg: f64,
    #[serde(rename = "f_Trans")]
    pub transition: f64,
    #[serde(rename = "f_Uref")]
    pub speed_reference: f64,
    #[serde(rename = "f_chiref")]
    pub course_reference: f64,
    #[serde(rename = "f_dU")]
    pub speed_change: f64,
    #[serde(rename = "f_dchi")]
    pub course_change: f64,
    pub total: f64,
    pub measures: CostMeasures,
}

impl CostBreakdown {
    /// Builds a breakdown whose total is the component sum in priority order.
    pub fn from_components(values: [f64; 7], measures: CostMeasures) -> Self {
        let total = values.iter().fold(0.0, |acc, v| acc + v);
        let [dynamic_obstacle, colreg, transition, speed_reference, course_reference, speed_change, course_change] =
            values;
        Self {
            dynamic_obstacle,
            colreg,
            transition,
            speed_reference,
            course_reference,
            speed_change,
            course_change,
            total,
            measures,
        }
    }

    pub fn value(&self, component: Component) -> f64 {
        match component {
            Component::DynamicObstacle => self.dynamic_obstacle,
            Component::Colreg => self.colreg,
            Component::Transition => self.transition,
            Component::SpeedReference => self.speed_reference,
            Component::CourseReference => self.course_reference,
            Component::SpeedChange => self.speed_change,
            Component::CourseChange => self.course_change,
        }
    }

    pub fn values(&self) -> [f64; 7] {
        Component::ALL.map(|c| self.value(c))
    }

    pub fn component_sum(&self) -> f64 {
        self.values().iter().fold(0.0, |acc, v| acc + v)
    }
}

/// Scores one rollout against the predicted obstacle tracks.
///
/// `predictions[i]` must be sampled on the rollout's grid and belong to
/// `snapshot.obstacles[i]`.
pub fn evaluate_costs(
    ctx: &PlanContext<'_>,
    snapshot: &WorldSnapshot,
    rollout: &CandidateRollout,
    predictions: &[Vec<VesselState>],
    previous: ControlOffset,
) -> Result<CostBreakdown> {
    let cfg = &ctx.config.planner;
    if predictions.len() != snapshot.obstacles.len() {
        return Err(Error::InvalidArgument(format!(
            "{} predictions for {} obstacles",
            predictions.len(),
            snapshot.obstacles.len()
        )));
    }
    for p in predictions {
        let aligned = p.len() == rollout.states.len()
            && p
                .iter()
                .zip(&rollout.states)
                .all(|(a, b)| (a.time - b.time).abs() < 1e-9);
        if !aligned {
            return Err(Error::InvalidArgument(
                "obstacle prediction and rollout use different sampling grids".into(),
            ));
        }
    }

    let offset = rollout.offset;
    let own0 = &snapshot.ownship;

    // f_DO: worst risk over obstacles and samples
    let mut f_do = 0.0;
    let mut worst: Option<usize> = None;
    let mut obstacle_cpa = Vec::with_capacity(predictions.len());
    for (i, track) in predictions.iter().enumerate() {
        let mut cost_i: f64 = 0.0;
        let mut min_d = f64::INFINITY;
        for (k, (own, obs)) in rollout.states.iter().zip(track).enumerate() {
            let d = own.distance_to(obs);
            min_d = min_d.min(d);
            if d > cfg.d_safe {
                continue;
            }
            let t = k as f64 * rollout.dt;
            let (on, oe) = own.velocity();
            let (bn, be) = obs.velocity();
            let v_rel2 = (on - bn).powi(2) + (oe - be).powi(2);
            let risk = (cfg.d_safe / d.max(cfg.min_distance)).powf(cfg.risk_exponent)
                / (1.0 + t / cfg.t_risk);
            cost_i = cost_i.max(cfg.k_coll * v_rel2 * risk);
        }
        obstacle_cpa.push(ObstacleCpa {
            id: snapshot.obstacles[i].id.clone(),
            distance: min_d,
        });
        if cost_i > f_do {
            f_do = cost_i;
            worst = Some(i);
        }
    }
    // without any risk, report the closest obstacle
    let worst = worst.or_else(|| {
        (0..obstacle_cpa.len()).min_by(|&a, &b| obstacle_cpa[a].distance.total_cmp(&obstacle_cpa[b].distance))
    });

    // f_CLRG
    let mut colreg_rule = None;
    for (i, obstacle) in snapshot.obstacles.iter().enumerate() {
        if !(obstacle_cpa[i].distance < ctx.config.encounter.d_close) {
            continue;
        }
        let rule = match classify_encounter(own0, &obstacle.state, &ctx.config.encounter) {
            EncounterType::HeadOn if offset.course_offset < 0.0 => Some(14),
            EncounterType::CrossingGiveWay
                if crosses_ahead(&rollout.states, &obstacle.state, rollout.dt)
                    .is_some_and(|margin| margin < cfg.crossing_margin) =>
            {
                Some(15)
            }
            _ => None,
        };
        if rule.is_some() {
            colreg_rule = rule;
            break;
        }
    }
    let f_clrg = if colreg_rule.is_some() { cfg.k_colreg } else { 0.0 };

    let side_switch = offset.course_offset * previous.course_offset < 0.0;
    let f_trans = if side_switch { cfg.k_trans } else { 0.0 };
    let f_uref = cfg.k_speed * (1.0 - offset.speed_multiplier);
    let f_chiref = cfg.k_course * offset.course_offset.powi(2);
    let f_du = cfg.k_speed_change * (offset.speed_multiplier - previous.speed_multiplier).abs();
    let f_dchi = cfg.k_course_change * (offset.course_offset - previous.course_offset).powi(2);

    let measures = CostMeasures {
        cpa_distance: worst.map_or(f64::INFINITY, |i| obstacle_cpa[i].distance),
        cpa_obstacle_id: worst.map(|i| obstacle_cpa[i].id.clone()),
        obstacle_cpa,
        colreg_rule,
        transition_behavior: if side_switch {
            TransitionBehavior::SideSwitch
        } else {
            TransitionBehavior::None
        },
        speed_offset: (1.0 - offset.speed_multiplier) * ctx.cruise_speed,
        course_offset_deg: offset.course_offset.to_degrees(),
    };
    Ok(CostBreakdown::from_components(
        [f_do, f_clrg, f_trans, f_uref, f_chiref, f_du, f_dchi],
        measures,
    ))
}

/// If the ownship path crosses the obstacle's track line ahead of the
/// obstacle, returns how many seconds before the obstacle it gets there.
pub(crate) fn crosses_ahead(path: &[VesselState], obstacle: &VesselState, dt: f64) -> Option<f64> {
    if obstacle.speed <= 0.0 {
        return None;
    }
    let (sin, cos) = obstacle.course.sin_cos();
    let lateral = |s: &VesselState| cos * (s.east - obstacle.east) - sin * (s.north - obstacle.north);
    let along = |n: f64, e: f64| cos * (n - obstacle.north) + sin * (e - obstacle.east);

    for (k, pair) in path.windows(2).enumerate() {
        let (a, b) = (lateral(&pair[0]), lateral(&pair[1]));
        let crossed = (a < 0.0 && b >= 0.0)
            || (a > 0.0 && b <= 0.0)
            || (k == 0 && a == 0.0 && b != 0.0);
        if !crossed {
            continue;
        }
        let frac = a / (a - b);
        let n = pair[0].north + frac * (pair[1].north - pair[0].north);
        let e = pair[0].east + frac * (pair[1].east - pair[0].east);
        let own_time = (k as f64 + frac) * dt;
        let obstacle_time = along(n, e) / obstacle.speed;
        return (own_time < obstacle_time).then_some(obstacle_time - own_time);
    }
    None
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
