//! Fixtures shared by the benchmarks.

use colav_core::{bundled_scenario, Scenario, Session, SimConfig, WorldState};

/// A bundled scenario with the world advanced to its decision point.
pub struct Fixture {
    pub scenario: Scenario,
    pub config: SimConfig,
    pub start: WorldState,
    pub at_trigger: WorldState,
}

pub fn fixture(id: &str) -> Fixture {
    let scenario = bundled_scenario(id).unwrap_or_else(|| panic!("no bundled scenario `{id}`"));
    let config = SimConfig::default();
    let mut session = Session::create("bench", scenario.clone(), config.clone()).expect("session");
    let trigger = session.decision_point().map_or(0.0, |dp| dp.trigger_time);
    session.play();
    while session.clock() < trigger - 1e-9 {
        session.step().expect("step");
    }
    Fixture {
        start: WorldState::initial(&scenario),
        at_trigger: session.world().clone(),
        scenario,
        config,
    }
}
