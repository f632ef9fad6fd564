//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use colav_core::audit::audit_trace;
use colav_core::trace::to_jsonl;
use colav_core::{
    ahead_of_time_probe, bundled_scenarios, contrastive_set, cpa, plan, propagate,
    select_contrastive_cost, select_foil, Characteristic, Component, ControlOffset, CostBreakdown,
    CostMeasures, GuidanceCommand, PlanContext, Scenario, Session, SimConfig, TraceRecord,
    VesselParams, VesselState, Verdict, WorldState,
};
use rand::prelude::*;

const RUN_SECONDS: f64 = 300.0;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn check(name: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail = format!("{detail}; took {elapsed:.2?}, limit {limit:.0?}");
        }
    }
    Outcome {
        name,
        passed,
        detail,
        elapsed,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Drives a session the way the headless CLI does: accept (or decline) at
/// the decision point, run to `RUN_SECONDS`.
fn scripted_run(scenario: &Scenario, verdict: Verdict) -> Session {
    colav_core::run_headless(scenario.clone(), SimConfig::default(), verdict, RUN_SECONDS)
        .expect("headless run")
}

fn colreg_behavior() -> Result<String, String> {
    let s = scenario("head_on_single");
    let cfg = SimConfig::default();
    let ctx = PlanContext::new(&s, &cfg);
    let dp = ahead_of_time_probe(&ctx, &WorldState::initial(&s), 120.0, Characteristic::PortTurn)
        .map_err(|e| e.to_string())?
        .ok_or("no decision point")?;
    let fact = &dp.plan.breakdowns[dp.plan.solution];
    let offset = dp.plan.solution_offset();
    ensure(offset.course_offset > 0.0, || {
        format!("solution course offset {:.0} deg is not starboard", offset.course_deg())
    })?;
    ensure(fact.colreg == 0.0, || format!("solution f_CLRG = {}", fact.colreg))?;
    let alt = dp.foil.alternative_index.ok_or("no port-turn foil")?;
    ensure(dp.plan.candidates[alt].offset.course_offset < 0.0, || "foil is not a port turn".into())?;
    let selected = dp.versus_alternative.selected_cost;
    ensure(
        matches!(selected, Some(Component::Colreg | Component::DynamicObstacle)),
        || format!("selected cost {selected:?}"),
    )?;
    Ok(format!(
        "trigger {:.0} s, solution ({:+.0} deg, {}), f_CLRG 0, port foil ({:+.0} deg) explained by {}",
        dp.trigger_time,
        offset.course_deg(),
        offset.speed_multiplier,
        dp.plan.candidates[alt].offset.course_deg(),
        selected.unwrap()
    ))
}

fn scenario(id: &str) -> Scenario {
    colav_core::bundled_scenario(id).expect("bundled scenario")
}

fn safety(runs: &[(String, Session)]) -> Result<String, String> {
    let d_safe = SimConfig::default().planner.d_safe;
    let mut parts = Vec::new();
    for (id, s) in runs {
        let d = s.min_separation();
        ensure(s.supervisor_decision() == colav_core::SupervisorDecision::Accepted, || {
            format!("{id}: decision not accepted")
        })?;
        ensure(d >= d_safe, || format!("{id}: min separation {d:.2} m < {d_safe} m"))?;
        parts.push(format!("{id} {d:.1} m"));
    }
    Ok(parts.join(", "))
}

fn argmin_rescan(runs: &[(String, Session)]) -> Result<String, String> {
    let mut checked = 0;
    for (id, s) in runs {
        for e in s.trace() {
            let TraceRecord::Plan {
                solution_index,
                candidates,
                ..
            } = &e.record
            else {
                continue;
            };
            let mut best = 0;
            for k in 1..candidates.len() {
                let (a, b) = (&candidates[k], &candidates[best]);
                let better = a.total < b.total
                    || (a.total == b.total && preference_less(&a.offset, &b.offset));
                if better {
                    best = k;
                }
            }
            ensure(best == *solution_index, || {
                format!("{id} seq {}: rescan {best} != recorded {solution_index}", e.seq)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} plan records"))
}

/// Smaller |course|, then starboard, then higher speed.
fn preference_less(a: &ControlOffset, b: &ControlOffset) -> bool {
    let key = |o: &ControlOffset| (o.course_offset.abs(), (o.course_offset < 0.0) as u8, -o.speed_multiplier);
    let (x, y) = (key(a), key(b));
    x.0 < y.0 || (x.0 == y.0 && (x.1 < y.1 || (x.1 == y.1 && x.2 < y.2)))
}

fn random_breakdown(rng: &mut StdRng) -> CostBreakdown {
    let mut v = [0.0; 7];
    for x in &mut v {
        *x = match rng.random_range(0..4) {
            0 => 0.0,
            1 => rng.random_range(0..4) as f64,
            2 => [5.0, 8.0, 50.0][rng.random_range(0..3)],
            _ => rng.random_range(0.0..100.0),
        };
    }
    CostBreakdown::from_components(v, CostMeasures::default())
}

fn contrast_oracle() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut nonempty = 0;
    for i in 0..1000 {
        let fact = random_breakdown(&mut rng);
        let foil = random_breakdown(&mut rng);
        let f = fact.values();
        let g = foil.values();
        let want: Vec<Component> = (0..7).filter(|&k| f[k] < g[k]).map(|k| Component::ALL[k]).collect();
        let mut want_sel: Option<usize> = None;
        for k in (0..7).filter(|&k| f[k] < g[k]) {
            if want_sel.is_none_or(|b| f[k] - g[k] < f[b] - g[b]) {
                want_sel = Some(k);
            }
        }
        let set = contrastive_set(&fact, &foil);
        ensure(set == want, || format!("pair {i}: set {set:?} != {want:?}"))?;
        let sel = select_contrastive_cost(&set, &fact, &foil);
        let want_sel = want_sel.map(|k| Component::ALL[k]);
        ensure(sel == want_sel, || format!("pair {i}: selected {sel:?} != {want_sel:?}"))?;
        nonempty += usize::from(!set.is_empty());
    }
    Ok(format!("1000 pairs, {nonempty} with a nonempty set"))
}

fn foil_minimality(runs: &[(String, Session)]) -> Result<String, String> {
    let mut checked = 0;
    let mut empty = 0;
    for (id, s) in runs {
        let dp = s.decision_point().ok_or_else(|| format!("{id}: no decision point"))?;
        let p = &dp.plan;
        let fact = p.solution_offset();
        for c in Characteristic::ALL {
            let foil = select_foil(p, c);
            let admissible: Vec<usize> = (0..p.candidates.len())
                .filter(|&k| k != p.solution && constraint(c, &p.candidates[k].offset, &fact))
                .collect();
            match foil.alternative_index {
                None => {
                    ensure(admissible.is_empty(), || format!("{id} {c:?}: none but admissible exist"))?;
                    let e = dp.with_characteristic(c).map_err(|e| e.to_string())?;
                    ensure(e.versus_alternative.foil.is_none(), || format!("{id} {c:?}: foil present"))?;
                    empty += 1;
                }
                Some(a) => {
                    ensure(admissible.contains(&a), || format!("{id} {c:?}: foil {a} violates constraint"))?;
                    for &k in &admissible {
                        let (ta, tk) = (p.breakdowns[a].total, p.breakdowns[k].total);
                        let ok = ta < tk || (ta == tk && (a == k || preference_less(&p.candidates[a].offset, &p.candidates[k].offset)));
                        ensure(ok, || format!("{id} {c:?}: candidate {k} beats foil {a}"))?;
                    }
                }
            }
            checked += 1;
        }
    }
    // a full stop leaves nothing slower, so the empty sentinel is always reachable
    let s = scenario("head_on_single");
    let cfg = SimConfig::default();
    let ctx = PlanContext::new(&s, &cfg);
    let p = plan(&ctx, &WorldState::initial(&s).snapshot(), ControlOffset::NOMINAL).map_err(|e| e.to_string())?;
    let mut stopped = p.clone();
    stopped.solution = p
        .offsets()
        .position(|o| o == ControlOffset::from_degrees(0.0, 0.0))
        .unwrap();
    let none_speed = select_foil(&stopped, Characteristic::ReducedSpeed).alternative_index;
    let none_closer = select_foil(&stopped, Characteristic::CloserToRoute).alternative_index;
    ensure(none_speed.is_none() && none_closer.is_none(), || "empty filter did not return none".into())?;
    Ok(format!("{checked} scenario x characteristic pairs, {empty} empty in runs, sentinel verified"))
}

fn constraint(c: Characteristic, alt: &ControlOffset, fact: &ControlOffset) -> bool {
    match c {
        Characteristic::ReducedSpeed => alt.speed_multiplier < fact.speed_multiplier,
        Characteristic::PortTurn => alt.course_offset < 0.0,
        Characteristic::StarboardTurn => alt.course_offset > 0.0,
        Characteristic::CloserToRoute => alt.course_offset.abs() < fact.course_offset.abs(),
        Characteristic::FartherFromRoute => alt.course_offset.abs() > fact.course_offset.abs(),
    }
}

fn trigger_minimality() -> Result<String, String> {
    let cfg = SimConfig::default();
    let mut parts = Vec::new();
    for s in bundled_scenarios() {
        let ctx = PlanContext::new(&s, &cfg);
        let start = WorldState::initial(&s);
        let dp = ahead_of_time_probe(&ctx, &start, 120.0, s.foil_characteristic)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{}: no trigger", s.id))?;
        // exhaustive scan: execute each plan tick by tick for 5 s, replan
        let mut w = start.clone();
        let mut before: Option<(WorldState, ControlOffset)> = None;
        let mut found = None;
        for _ in 0..=24 {
            let p = plan(&ctx, &w.snapshot(), w.previous_offset).map_err(|e| e.to_string())?;
            if !p.solution_offset().is_nominal() {
                found = Some(p.time);
                break;
            }
            before = Some((w.clone(), p.solution_offset()));
            for _ in 0..10 {
                w.step(&ctx, Some(&p), cfg.session.tick).map_err(|e| e.to_string())?;
            }
            w.previous_offset = p.solution_offset();
        }
        ensure(found == Some(dp.trigger_time), || {
            format!("{}: probe {} vs scan {found:?}", s.id, dp.trigger_time)
        })?;
        let (earlier, _) = before.ok_or_else(|| format!("{}: trigger at t = 0", s.id))?;
        let replanned = plan(&ctx, &earlier.snapshot(), earlier.previous_offset).map_err(|e| e.to_string())?;
        ensure(replanned.solution_offset().is_nominal(), || {
            format!("{}: replanning at {} is not nominal", s.id, earlier.time)
        })?;
        parts.push(format!("{} {:.0} s", s.id, dp.trigger_time));
    }
    Ok(parts.join(", "))
}

fn kinematics() -> Result<String, String> {
    let params = VesselParams::default();
    let mut rng = StdRng::seed_from_u64(0xc0a5);
    let mut worst_line: f64 = 0.0;
    for _ in 0..1000 {
        let s = VesselState::new(
            0.0,
            rng.random_range(-5000.0..5000.0),
            rng.random_range(-5000.0..5000.0),
            rng.random_range(-PI..PI),
            rng.random_range(0.0..17.0),
        );
        let dt = rng.random_range(0.01..=1.0);
        let next = propagate(&s, &GuidanceCommand::new(s.course, s.speed), dt, &params)
            .map_err(|e| e.to_string())?;
        let (vn, ve) = s.velocity();
        let err = (next.north - s.north - vn * dt).hypot(next.east - s.east - ve * dt);
        worst_line = worst_line.max(err);
    }
    ensure(worst_line < 1e-9, || format!("straight-line error {worst_line:e} m"))?;

    let mut worst_lag: f64 = 0.0;
    for target_deg in [30.0, 90.0, 150.0, -60.0, -120.0] {
        let target = f64::to_radians(target_deg);
        let s = VesselState::new(0.0, 0.0, 0.0, 0.0, 5.0);
        let out = propagate(&s, &GuidanceCommand::new(target, 5.0), 3.0, &params).map_err(|e| e.to_string())?;
        let exact = target * (1.0 - (-1.0f64).exp());
        worst_lag = worst_lag.max((out.course - exact).abs());
    }
    ensure(worst_lag < 1f64.to_radians(), || format!("lag error {:.3} deg", worst_lag.to_degrees()))?;

    let mut worst_cpa: f64 = 0.0;
    for _ in 0..500 {
        let mut st = || {
            VesselState::new(
                0.0,
                rng.random_range(-3000.0..3000.0),
                rng.random_range(-3000.0..3000.0),
                rng.random_range(-PI..PI),
                rng.random_range(0.0..15.0),
            )
        };
        let (a, b) = (st(), st());
        let c = cpa(&a, &b, 120.0);
        let (an, ae) = a.velocity();
        let (bn, be) = b.velocity();
        let mut brute = f64::INFINITY;
        for k in 0..=12_000 {
            let t = k as f64 * 0.01;
            let d = (a.north + an * t - b.north - bn * t).hypot(a.east + ae * t - b.east - be * t);
            brute = brute.min(d);
        }
        worst_cpa = worst_cpa.max((c.distance - brute).abs());
    }
    ensure(worst_cpa < 0.5, || format!("CPA error {worst_cpa:.3} m"))?;
    Ok(format!(
        "line {worst_line:.1e} m, lag {:.3} deg, CPA {worst_cpa:.1e} m",
        worst_lag.to_degrees()
    ))
}

fn determinism(runs: &[(String, Session)]) -> Result<String, String> {
    let mut bytes = 0;
    let mut audited = 0;
    for (id, first) in runs {
        let s = scenario(id);
        let second = scripted_run(&s, Verdict::Accepted);
        let (a, b) = (to_jsonl(first.trace()), to_jsonl(second.trace()));
        ensure(a == b, || format!("{id}: traces differ"))?;
        bytes += a.len();
        let report = audit_trace(first.trace());
        ensure(report.passed(), || format!("{id}: audit failed\n{report}"))?;
        audited += 1;
        let declined = scripted_run(&s, Verdict::Declined);
        let report = audit_trace(declined.trace());
        ensure(report.passed(), || format!("{id} (declined): audit failed\n{report}"))?;
        audited += 1;
    }
    Ok(format!("{} scenario pairs identical ({bytes} bytes), {audited} traces audited", runs.len()))
}

fn main() {
    let suite = Instant::now();
    let mut outcomes = Vec::new();

    outcomes.push(check("COLREG behavior", Some(Duration::from_secs(5)), colreg_behavior));

    let mut runs = Vec::new();
    outcomes.push(check("Safety", Some(Duration::from_secs(20)), || {
        for s in bundled_scenarios() {
            runs.push((s.id.clone(), scripted_run(&s, Verdict::Accepted)));
        }
        safety(&runs)
    }));
    outcomes.push(check("Argmin re-scan", None, || argmin_rescan(&runs)));
    outcomes.push(check("Contrast oracle", None, contrast_oracle));
    outcomes.push(check("Foil minimality", None, || foil_minimality(&runs)));
    outcomes.push(check("Trigger minimality", None, trigger_minimality));
    outcomes.push(check("Kinematics", Some(Duration::from_secs(10)), kinematics));
    outcomes.push(check("Determinism", None, || determinism(&runs)));

    let total = suite.elapsed();
    let within = total < Duration::from_secs(60);
    outcomes.push(Outcome {
        name: "Suite runtime",
        passed: within,
        detail: "headless, core crate only; limit 60 s".to_string(),
        elapsed: total,
    });

    for o in &outcomes {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!("{mark} {:<20} [{:>8.2?}] {}", o.name, o.elapsed, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
