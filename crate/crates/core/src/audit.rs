//! Offline verification of a recorded trace.
//!
//! The checks here re-derive the planner's argmin, the foil choice and the
//! contrastive selections by plain exhaustive scans over the stored numbers,
//! without calling the planner or explanation code. If the trace carries a
//! session header it is also re-simulated and compared record by record.

use std::fmt;

use crate::config::SimConfig;
use crate::explain::{Characteristic, ContrastiveExplanation};
use crate::planner::{Component, ControlOffset, CostBreakdown};
use crate::scenario::Scenario;
use crate::session::Session;
use crate::trace::{DecisionPointRecord, ExplanationReason, TraceEntry, TraceRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, failures: Vec<String>, checked: usize) {
        let passed = failures.is_empty();
        let detail = if passed {
            format!("{checked} checked")
        } else {
            format!("{} of {checked} failed; first: {}", failures.len(), failures[0])
        };
        self.checks.push(AuditCheck {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark} {:<28} {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Lexicographic preference key; smaller is preferred on equal totals.
fn preference(o: &ControlOffset) -> (f64, u8, f64) {
    let port = u8::from(o.course_offset < 0.0);
    (o.course_offset.abs(), port, -o.speed_multiplier)
}

fn key_less(a: (f64, u8, f64), b: (f64, u8, f64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
}

/// Exhaustive argmin over `(offset, total)` pairs, restricted by `keep`.
fn scan_argmin(items: &[(ControlOffset, f64)], keep: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in (0..items.len()).filter(|&i| keep(i)) {
        best = match best {
            None => Some(i),
            Some(b) => {
                let (oi, ti) = items[i];
                let (ob, tb) = items[b];
                if ti < tb || (ti == tb && key_less(preference(&oi), preference(&ob))) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

fn satisfies(c: Characteristic, alt: &ControlOffset, fact: &ControlOffset) -> bool {
    let (a, f) = (alt.course_offset, fact.course_offset);
    match c {
        Characteristic::ReducedSpeed => alt.speed_multiplier < fact.speed_multiplier,
        Characteristic::PortTurn => a < 0.0,
        Characteristic::StarboardTurn => a > 0.0,
        Characteristic::CloserToRoute => a.abs() < f.abs(),
        Characteristic::FartherFromRoute => a.abs() > f.abs(),
    }
}

fn component_values(b: &CostBreakdown) -> [(Component, f64); 7] {
    [
        (Component::DynamicObstacle, b.dynamic_obstacle),
        (Component::Colreg, b.colreg),
        (Component::Transition, b.transition),
        (Component::SpeedReference, b.speed_reference),
        (Component::CourseReference, b.course_reference),
        (Component::SpeedChange, b.speed_change),
        (Component::CourseChange, b.course_change),
    ]
}

/// Brute-force contrastive set and selected component.
pub fn brute_force_contrast(
    fact: &CostBreakdown,
    foil: &CostBreakdown,
) -> (Vec<Component>, Option<Component>) {
    let f = component_values(fact);
    let g = component_values(foil);
    let mut set = Vec::new();
    let mut best: Option<(f64, Component)> = None;
    // priority order is the array order, so only a strictly smaller
    // difference displaces an earlier component
    for i in 0..7 {
        if f[i].1 < g[i].1 {
            set.push(f[i].0);
            let d = f[i].1 - g[i].1;
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, f[i].0));
            }
        }
    }
    (set, best.map(|(_, c)| c))
}

fn check_breakdown(b: &CostBreakdown) -> Option<String> {
    let vals = component_values(b);
    if let Some((c, v)) = vals.iter().find(|(_, v)| !(*v >= 0.0)) {
        return Some(format!("{c} is negative or NaN ({v})"));
    }
    let mut sum = 0.0;
    for (_, v) in vals {
        sum += v;
    }
    (sum != b.total).then(|| format!("total {} != component sum {sum}", b.total))
}

fn check_explanation(
    dp: &DecisionPointRecord,
    e: &ContrastiveExplanation,
    expected_foil: Option<usize>,
) -> Vec<String> {
    let mut out = Vec::new();
    if e.fact.index != dp.fact_index || e.fact.costs != dp.candidates[dp.fact_index].costs {
        out.push("explanation fact differs from the decision-point fact".to_string());
    }
    match (&e.foil, expected_foil) {
        (None, None) => {
            if !e.contrastive_set.is_empty() || e.selected_cost.is_some() {
                out.push("empty foil with a non-empty contrastive set".into());
            }
            if !e.text.contains("No alternative available") {
                out.push(format!("missing no-alternative sentinel: {}", e.text));
            }
        }
        (Some(foil), Some(idx)) => {
            if foil.index != idx || foil.costs != dp.candidates[idx].costs {
                out.push(format!("foil {} does not match candidate {idx}", foil.index));
            }
            if foil.costs.total < e.fact.costs.total {
                out.push(format!(
                    "foil total {} below fact total {}",
                    foil.costs.total, e.fact.costs.total
                ));
            }
            let (set, selected) = brute_force_contrast(&e.fact.costs, &foil.costs);
            if set != e.contrastive_set {
                out.push(format!("contrastive set {:?} != {:?}", e.contrastive_set, set));
            }
            if selected != e.selected_cost {
                out.push(format!("selected {:?} != {:?}", e.selected_cost, selected));
            }
        }
        (got, want) => out.push(format!(
            "foil presence mismatch: recorded {:?}, expected {want:?}",
            got.as_ref().map(|f| f.index)
        )),
    }
    if e.text.is_empty() || e.text.contains('{') || e.text.contains('}') {
        out.push(format!("malformed text `{}`", e.text));
    }
    out
}

/// Runs every trace check.
pub fn audit_trace(entries: &[TraceEntry]) -> AuditReport {
    let mut report = AuditReport::default();

    let mut seq_fail = Vec::new();
    for w in entries.windows(2) {
        if w[1].seq <= w[0].seq {
            seq_fail.push(format!("seq {} follows {}", w[1].seq, w[0].seq));
        }
    }
    report.push("sequence monotone", seq_fail, entries.len());

    let mut argmin_fail = Vec::new();
    let mut additivity_fail = Vec::new();
    let mut plans = 0;
    for e in entries {
        if let TraceRecord::Plan {
            time,
            solution_index,
            solution,
            candidates,
            solution_breakdown,
        } = &e.record
        {
            plans += 1;
            let items: Vec<_> = candidates.iter().map(|c| (c.offset, c.total)).collect();
            let best = scan_argmin(&items, |_| true);
            if best != Some(*solution_index) {
                argmin_fail.push(format!("t={time}: recorded {solution_index}, re-scan {best:?}"));
            }
            if candidates.get(*solution_index).map(|c| c.offset) != Some(*solution) {
                argmin_fail.push(format!("t={time}: solution offset mismatch"));
            }
            if candidates.get(*solution_index).map(|c| c.total) != Some(solution_breakdown.total) {
                additivity_fail.push(format!("t={time}: solution total mismatch"));
            }
            if let Some(msg) = check_breakdown(solution_breakdown) {
                additivity_fail.push(format!("t={time}: {msg}"));
            }
        }
    }
    report.push("plan argmin", argmin_fail, plans);

    let mut explain_fail = Vec::new();
    let mut foil_fail = Vec::new();
    let mut explanations = 0;
    for e in entries {
        let TraceRecord::Explanation {
            time,
            reason,
            decision_point: dp,
        } = &e.record
        else {
            continue;
        };
        explanations += 1;
        let tag = format!("t={time}");
        for (i, c) in dp.candidates.iter().enumerate() {
            if let Some(msg) = check_breakdown(&c.costs) {
                additivity_fail.push(format!("{tag} candidate {i}: {msg}"));
            }
        }
        let items: Vec<_> = dp.candidates.iter().map(|c| (c.offset, c.costs.total)).collect();
        if scan_argmin(&items, |_| true) != Some(dp.fact_index) {
            foil_fail.push(format!("{tag}: fact is not the argmin"));
        }
        if dp.candidates.get(dp.nominal_index).map(|c| c.offset) != Some(ControlOffset::NOMINAL) {
            foil_fail.push(format!("{tag}: nominal index does not hold the zero offset"));
        }
        let fact = dp.candidates[dp.fact_index].offset;
        if *reason == ExplanationReason::DecisionPoint && fact == ControlOffset::NOMINAL {
            foil_fail.push(format!("{tag}: decision point without an offset"));
        }
        let expected_alt = scan_argmin(&items, |i| {
            i != dp.fact_index && satisfies(dp.characteristic, &items[i].0, &fact)
        });
        if expected_alt != dp.alternative_index {
            foil_fail.push(format!(
                "{tag}: alternative {:?}, exhaustive scan gives {expected_alt:?}",
                dp.alternative_index
            ));
        }
        for msg in check_explanation(dp, &dp.versus_nominal, Some(dp.nominal_index)) {
            explain_fail.push(format!("{tag} vs nominal: {msg}"));
        }
        for msg in check_explanation(dp, &dp.versus_alternative, expected_alt) {
            explain_fail.push(format!("{tag} vs alternative: {msg}"));
        }
    }
    report.push("cost additivity", additivity_fail, plans + explanations);
    report.push("foil selection", foil_fail, explanations);
    report.push("contrastive explanations", explain_fail, explanations * 2);

    if let Some(result) = replay(entries) {
        let (failures, checked) = result;
        report.push("replay", failures, checked);
    }
    report
}

/// Re-simulates the trace from its header and compares every record.
/// Returns None when the trace has no header.
fn replay(entries: &[TraceEntry]) -> Option<(Vec<String>, usize)> {
    let TraceRecord::Session {
        session_id,
        scenario,
        config,
        ..
    } = &entries.first()?.record
    else {
        return None;
    };
    let fail = |m: String| Some((vec![m], 0));
    let scenario = match Scenario::from_document(scenario.clone(), config.vessel.max_speed) {
        Ok(s) => s,
        Err(e) => return fail(format!("header scenario invalid: {e}")),
    };
    let config: SimConfig = config.clone();
    let mut session = match Session::create(session_id.clone(), scenario, config) {
        Ok(s) => s,
        Err(e) => return fail(format!("cannot recreate session: {e}")),
    };

    for entry in &entries[1..] {
        let result = match &entry.record {
            TraceRecord::Tick { time, .. } if *time > session.clock() => {
                session.play();
                session.step().map(|_| ())
            }
            TraceRecord::Decision { verdict, .. } => session.record_decision(*verdict).map(|_| ()),
            TraceRecord::Seek { target, .. } => session.seek(*target).map(|_| ()),
            TraceRecord::Explanation {
                reason: ExplanationReason::FoilChanged,
                decision_point,
                ..
            } => session
                .set_foil_characteristic(decision_point.characteristic)
                .map(|_| ()),
            TraceRecord::Warning { .. } => {
                session.pause();
                session.step().map(|_| ())
            }
            _ => Ok(()),
        };
        if let Err(e) = result {
            return fail(format!("seq {}: replay error {e}", entry.seq));
        }
    }

    let replayed = session.trace();
    let mut failures = Vec::new();
    if replayed.len() != entries.len() {
        failures.push(format!(
            "replay produced {} records, trace has {}",
            replayed.len(),
            entries.len()
        ));
    }
    for (a, b) in entries.iter().zip(replayed) {
        let (sa, sb) = (
            serde_json::to_string(a).unwrap_or_default(),
            serde_json::to_string(b).unwrap_or_default(),
        );
        if sa != sb {
            failures.push(format!("seq {} ({}) differs on replay", a.seq, a.record.event_name()));
        }
    }
    Some((failures, entries.len()))
}
