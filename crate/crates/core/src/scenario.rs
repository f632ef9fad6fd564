//! Scenario documents: parsing, validation and the bundled encounter set.

use serde::{Deserialize, Serialize};

use crate::encounter::ObstacleTrack;
use crate::error::{Error, Result};
use crate::explain::Characteristic;
use crate::vessel::{wrap, VesselParams, VesselState, Waypoint};

/// On-disk scenario layout. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub id: String,
    pub title: String,
    pub ownship: OwnshipDocument,
    pub route: Vec<Waypoint>,
    pub cruise_speed: f64,
    pub obstacles: Vec<ObstacleDocument>,
    pub foil_characteristic: Characteristic,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OwnshipDocument {
    pub north: f64,
    pub east: f64,
    pub course_deg: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleDocument {
    pub id: String,
    pub north: f64,
    pub east: f64,
    pub course_deg: f64,
    pub speed: f64,
    pub length: f64,
    pub width: f64,
}

/// A validated encounter situation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub title: String,
    pub ownship_initial: VesselState,
    pub route: Vec<Waypoint>,
    pub cruise_speed: f64,
    pub obstacles: Vec<ObstacleTrack>,
    pub foil_characteristic: Characteristic,
    pub description: String,
    document: ScenarioDocument,
}

impl Scenario {
    /// The document this scenario was built from.
    pub fn document(&self) -> &ScenarioDocument {
        &self.document
    }

    pub fn from_document(doc: ScenarioDocument, max_speed: f64) -> Result<Self> {
        validate(&doc, max_speed)?;
        let ownship_initial = VesselState::new(
            0.0,
            doc.ownship.north,
            doc.ownship.east,
            wrap(doc.ownship.course_deg.to_radians()),
            doc.ownship.speed,
        );
        let obstacles = doc
            .obstacles
            .iter()
            .map(|o| ObstacleTrack {
                id: o.id.clone(),
                state: VesselState::new(
                    0.0,
                    o.north,
                    o.east,
                    wrap(o.course_deg.to_radians()),
                    o.speed,
                ),
                length: o.length,
                width: o.width,
            })
            .collect();
        Ok(Self {
            id: doc.id.clone(),
            title: doc.title.clone(),
            ownship_initial,
            route: doc.route.clone(),
            cruise_speed: doc.cruise_speed,
            obstacles,
            foil_characteristic: doc.foil_characteristic,
            description: doc.description.clone(),
            document: doc,
        })
    }
}

/// Parses and validates a JSON scenario document with the default speed limit.
pub fn load_scenario(document: &str) -> Result<Scenario> {
    load_scenario_with(document, VesselParams::default().max_speed)
}

pub fn load_scenario_with(document: &str, max_speed: f64) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: ScenarioDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.to_string();
        // missing fields are reported against the parent; name the field itself
        let path = match missing_field(&message) {
            Some(field) if path == "." => field.to_string(),
            Some(field) => format!("{path}.{field}"),
            None => path,
        };
        Error::Parse { path, message }
    })?;
    Scenario::from_document(doc, max_speed)
}

fn missing_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        path: path.into(),
        message: message.into(),
    }
}

fn check_finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, "must be finite"))
    }
}

fn check_speed(path: &str, v: f64, max_speed: f64) -> Result<()> {
    check_finite(path, v)?;
    if v < 0.0 {
        return Err(invalid(path, format!("speed {v} is negative")));
    }
    if v > max_speed {
        return Err(invalid(path, format!("speed {v} exceeds maximum {max_speed}")));
    }
    Ok(())
}

fn validate(doc: &ScenarioDocument, max_speed: f64) -> Result<()> {
    if doc.id.trim().is_empty() {
        return Err(invalid("id", "must not be empty"));
    }
    let own = &doc.ownship;
    check_finite("ownship.north", own.north)?;
    check_finite("ownship.east", own.east)?;
    check_finite("ownship.course_deg", own.course_deg)?;
    check_speed("ownship.speed", own.speed, max_speed)?;

    if doc.route.len() < 2 {
        return Err(invalid("route", "needs at least 2 waypoints"));
    }
    for (i, w) in doc.route.iter().enumerate() {
        check_finite(&format!("route[{i}].north"), w.north)?;
        check_finite(&format!("route[{i}].east"), w.east)?;
        if !(w.acceptance_radius > 0.0) || !w.acceptance_radius.is_finite() {
            return Err(invalid(
                format!("route[{i}].acceptance_radius"),
                "must be positive",
            ));
        }
        if i > 0 {
            let p = &doc.route[i - 1];
            if p.north == w.north && p.east == w.east {
                return Err(invalid(format!("route[{i}]"), "duplicate of previous waypoint"));
            }
        }
    }

    check_speed("cruise_speed", doc.cruise_speed, max_speed)?;
    if doc.cruise_speed == 0.0 {
        return Err(invalid("cruise_speed", "must be positive"));
    }

    for (i, o) in doc.obstacles.iter().enumerate() {
        let p = |f: &str| format!("obstacles[{i}].{f}");
        if o.id.trim().is_empty() {
            return Err(invalid(p("id"), "must not be empty"));
        }
        if doc.obstacles[..i].iter().any(|other| other.id == o.id) {
            return Err(invalid(p("id"), format!("duplicate obstacle id `{}`", o.id)));
        }
        check_finite(&p("north"), o.north)?;
        check_finite(&p("east"), o.east)?;
        check_finite(&p("course_deg"), o.course_deg)?;
        check_speed(&p("speed"), o.speed, max_speed)?;
        for (name, v) in [("length", o.length), ("width", o.width)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(p(name), "must be positive"));
            }
        }
    }
    Ok(())
}

/// Scenarios shipped with the crate, as `(file name, JSON document)`.
pub const BUNDLED: [(&str, &str); 4] = [
    ("head_on_single.json", include_str!("../scenarios/head_on_single.json")),
    ("crossing_give_way.json", include_str!("../scenarios/crossing_give_way.json")),
    ("double_head_on.json", include_str!("../scenarios/double_head_on.json")),
    (
        "give_way_stand_on.json",
        include_str!("../scenarios/give_way_stand_on.json"),
    ),
];

/// Loads every bundled scenario.
pub fn bundled_scenarios() -> Vec<Scenario> {
    BUNDLED
        .iter()
        .map(|(name, doc)| {
            load_scenario(doc).unwrap_or_else(|e| panic!("bundled scenario {name} is invalid: {e}"))
        })
        .collect()
}

/// Looks up a bundled scenario by id.
pub fn bundled_scenario(id: &str) -> Option<Scenario> {
    bundled_scenarios().into_iter().find(|s| s.id == id)
}
