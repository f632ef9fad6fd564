//! Headless `run` and offline `audit`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use colav_core::audit::{audit_trace, AuditReport};
use colav_core::trace::{parse_jsonl, to_jsonl};
use colav_core::{run_headless, Error, Result, Scenario, Session, SimConfig, Verdict};

pub fn load_config(path: Option<&Path>) -> Result<SimConfig> {
    match path {
        None => Ok(SimConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            SimConfig::from_json(&text)
        }
    }
}

/// Runs the scenario, writes the JSONL trace and returns the session.
pub fn run(
    scenario: Scenario,
    config: SimConfig,
    verdict: Verdict,
    duration: f64,
    trace_path: &Path,
) -> Result<Session> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
    }
    let session = run_headless(scenario, config, verdict, duration)?;
    fs::write(trace_path, to_jsonl(session.trace()))
        .map_err(|e| Error::Io(format!("{}: {e}", trace_path.display())))?;
    Ok(session)
}

pub fn summarize(session: &Session) -> String {
    let mut out = String::new();
    let s = session.scenario();
    let _ = writeln!(out, "scenario      {} ({})", s.id, s.title);
    let _ = writeln!(out, "clock         {:.1} s", session.clock());
    match session.decision_point() {
        None => {
            let _ = writeln!(out, "decision      none (planner never left the route)");
        }
        Some(dp) => {
            let fact = dp.plan.solution_offset();
            let _ = writeln!(
                out,
                "decision      t = {:.1} s, course {:+.0} deg, speed x{}, {:?}",
                dp.trigger_time,
                fact.course_deg(),
                fact.speed_multiplier,
                session.supervisor_decision()
            );
            let _ = writeln!(out, "vs nominal    {}", dp.versus_nominal.text);
            let _ = writeln!(out, "vs {:<10} {}", short(dp.foil.characteristic), dp.versus_alternative.text);
        }
    }
    let _ = writeln!(out, "min distance  {:.1} m", session.min_separation());
    let _ = write!(out, "records       {}", session.trace().len());
    out
}

fn short(c: colav_core::Characteristic) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn audit_file(path: &Path) -> Result<AuditReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let entries = parse_jsonl(&text)?;
    Ok(audit_trace(&entries))
}
