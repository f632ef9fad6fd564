//! Simulation configuration. Every constant has a default and can be
//! overridden from a JSON document.

use serde::{Deserialize, Serialize};

use crate::encounter::EncounterParams;
use crate::error::{Error, Result};
use crate::guidance::GuidanceParams;
use crate::planner::PlannerConfig;
use crate::vessel::VesselParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    /// Simulation tick [s].
    pub tick: f64,
    /// How far ahead the decision-point probe looks [s].
    pub probe_time_limit: f64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            tick: 0.5,
            probe_time_limit: 120.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub port: u16,
    pub scenario_dir: Option<String>,
    /// Simulated seconds per wall-clock second while playing.
    pub playback_rate: f64,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            port: 8080,
            scenario_dir: None,
            playback_rate: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub vessel: VesselParams,
    pub guidance: GuidanceParams,
    pub encounter: EncounterParams,
    pub planner: PlannerConfig,
    pub session: SessionConfig,
    pub server: ServerConfig,
}

impl SimConfig {
    pub fn from_json(document: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(document);
        let cfg: SimConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: &str| {
            Err(Error::Validation {
                path: path.into(),
                message: message.into(),
            })
        };
        let v = &self.vessel;
        if !(v.course_time_constant > 0.0) || !(v.speed_time_constant > 0.0) {
            return bad("vessel", "time constants must be positive");
        }
        if !(v.max_speed > 0.0) || !(v.max_substep > 0.0) {
            return bad("vessel", "max_speed and max_substep must be positive");
        }
        if !(self.guidance.lookahead > 0.0) {
            return bad("guidance.lookahead", "must be positive");
        }
        if !(self.session.tick > 0.0) {
            return bad("session.tick", "must be positive");
        }
        if !(self.session.probe_time_limit > 0.0) {
            return bad("session.probe_time_limit", "must be positive");
        }
        let ratio = self.planner.replan_interval / self.session.tick;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
            return bad("session.tick", "replan interval must be a multiple of the tick");
        }
        // a tick must never span two rollout commands
        let ratio = self.planner.dt / self.session.tick;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 - 1e-9 {
            return bad("session.tick", "planner dt must be a multiple of the tick");
        }
        if !(self.server.playback_rate > 0.0 && self.server.playback_rate.is_finite()) {
            return bad("server.playback_rate", "must be positive");
        }
        self.planner.validate()
    }
}
