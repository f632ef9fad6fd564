use super::*;
use crate::config::SimConfig;
use crate::planner::{generate_candidates, CandidateRollout, CostMeasures, PlanContext, PlannerConfig};
use crate::scenario::bundled_scenario;
use crate::vessel::GuidanceCommand;
use proptest::prelude::*;

fn breakdown(values: [f64; 7]) -> CostBreakdown {
    CostBreakdown::from_components(values, CostMeasures::default())
}

fn with(pairs: &[(Component, f64)]) -> CostBreakdown {
    let mut v = [0.0; 7];
    for &(c, x) in pairs {
        v[Component::ALL.iter().position(|&k| k == c).unwrap()] = x;
    }
    breakdown(v)
}

/// A plan over the default grid with the given totals; the solution is
/// the cheapest candidate under the planner's tie-break.
fn synthetic_plan(totals: &[f64]) -> PlanResult {
    let offsets = generate_candidates(&PlannerConfig::default());
    assert_eq!(offsets.len(), totals.len());
    let candidates: Vec<CandidateRollout> = offsets
        .iter()
        .map(|&offset| CandidateRollout {
            offset,
            states: Vec::new(),
            commands: Vec::new(),
            active_indices: Vec::new(),
            horizon: 120.0,
            return_time: 60.0,
            dt: 0.5,
        })
        .collect();
    let breakdowns: Vec<CostBreakdown> = totals
        .iter()
        .map(|&t| breakdown([0.0, 0.0, 0.0, 0.0, t, 0.0, 0.0]))
        .collect();
    let mut solution = 0;
    for k in 1..totals.len() {
        if crate::planner::prefer(totals[k], &offsets[k], totals[solution], &offsets[solution]) {
            solution = k;
        }
    }
    PlanResult {
        time: 0.0,
        solution,
        nominal: offsets.iter().position(ControlOffset::is_nominal).unwrap(),
        candidates,
        breakdowns,
        references: GuidanceCommand::new(0.0, 8.0),
        previous_offset: ControlOffset::NOMINAL,
    }
}

fn index_of(plan: &PlanResult, course_deg: f64, m: f64) -> usize {
    plan.offsets()
        .position(|o| o == ControlOffset::from_degrees(course_deg, m))
        .unwrap()
}

#[test]
fn port_turn_foil_is_cheapest_port_candidate() {
    let mut totals: Vec<f64> = (0..39).map(|k| 10.0 + k as f64).collect();
    let mut plan = synthetic_plan(&totals);
    let fact = index_of(&plan, 30.0, 1.0);
    let port = index_of(&plan, -45.0, 0.5);
    totals[fact] = 1.0;
    totals[port] = 3.0;
    plan = synthetic_plan(&totals);
    assert_eq!(plan.solution, fact);
    let foil = select_foil(&plan, Characteristic::PortTurn);
    assert_eq!(foil.alternative_index, Some(port));
    assert_eq!(foil.fact_index, fact);
    assert_eq!(foil.nominal_index, 6);
}

#[test]
fn foil_never_equals_fact() {
    let mut totals = vec![20.0; 39];
    let plan0 = synthetic_plan(&totals);
    let fact = index_of(&plan0, 15.0, 1.0);
    let next = index_of(&plan0, 60.0, 1.0);
    totals[fact] = 1.0;
    totals[next] = 2.0;
    let plan = synthetic_plan(&totals);
    let foil = select_foil(&plan, Characteristic::StarboardTurn);
    assert_eq!(foil.alternative_index, Some(next));
}

#[test]
fn empty_filter_yields_none() {
    let mut totals = vec![5.0; 39];
    let plan0 = synthetic_plan(&totals);
    totals[index_of(&plan0, 0.0, 0.0)] = 0.5;
    let plan = synthetic_plan(&totals);
    // nothing is slower than a full stop, nothing is closer than 0 deg
    assert_eq!(select_foil(&plan, Characteristic::ReducedSpeed).alternative_index, None);
    assert_eq!(select_foil(&plan, Characteristic::CloserToRoute).alternative_index, None);
    let e = explain(&plan, None, FoilLabel::Alternative, Some(Characteristic::ReducedSpeed)).unwrap();
    assert_eq!(e.text, "No alternative available for reduced speed");
    assert!(e.contrastive_set.is_empty());
    assert_eq!(e.selected_cost, None);
}

#[test]
fn characteristic_constraints() {
    let fact = ControlOffset::from_degrees(30.0, 1.0);
    let o = ControlOffset::from_degrees;
    assert!(Characteristic::ReducedSpeed.admits(&o(30.0, 0.5), &fact));
    assert!(!Characteristic::ReducedSpeed.admits(&o(0.0, 1.0), &fact));
    assert!(Characteristic::PortTurn.admits(&o(-15.0, 1.0), &fact));
    assert!(!Characteristic::PortTurn.admits(&o(0.0, 1.0), &fact));
    assert!(Characteristic::StarboardTurn.admits(&o(15.0, 0.0), &fact));
    assert!(Characteristic::CloserToRoute.admits(&o(-15.0, 1.0), &fact));
    assert!(!Characteristic::CloserToRoute.admits(&o(-30.0, 1.0), &fact));
    assert!(Characteristic::FartherFromRoute.admits(&o(-45.0, 1.0), &fact));
    assert_eq!("port_turn".parse::<Characteristic>(), Ok(Characteristic::PortTurn));
    assert!("sideways".parse::<Characteristic>().is_err());
}

#[test]
fn contrastive_set_examples() {
    use Component::*;
    let fact = with(&[(DynamicObstacle, 0.0), (CourseReference, 2.0)]);
    let foil = with(&[(DynamicObstacle, 5.0), (CourseReference, 0.0)]);
    assert_eq!(contrastive_set(&fact, &foil), vec![DynamicObstacle]);
    assert!(contrastive_set(&fact, &fact).is_empty());
    let all = breakdown([1.0; 7]);
    let more = breakdown([2.0; 7]);
    assert_eq!(contrastive_set(&all, &more), Component::ALL.to_vec());
}

#[test]
fn selected_cost_examples() {
    use Component::*;
    let fact = with(&[(DynamicObstacle, 0.0), (Colreg, 0.0)]);
    let foil = with(&[(DynamicObstacle, 5.0), (Colreg, 1.0)]);
    assert_eq!(
        select_contrastive_cost(&[DynamicObstacle, Colreg], &fact, &foil),
        Some(DynamicObstacle)
    );
    assert_eq!(select_contrastive_cost(&[Colreg], &fact, &foil), Some(Colreg));
    assert_eq!(select_contrastive_cost(&[], &fact, &foil), None);
    let tie_foil = with(&[(Colreg, 8.0), (SpeedReference, 8.0)]);
    let set = contrastive_set(&breakdown([0.0; 7]), &tie_foil);
    assert_eq!(set, vec![Colreg, SpeedReference]);
    assert_eq!(select_contrastive_cost(&set, &breakdown([0.0; 7]), &tie_foil), Some(Colreg));
    // order of the input set does not matter
    assert_eq!(
        select_contrastive_cost(&[SpeedReference, Colreg], &breakdown([0.0; 7]), &tie_foil),
        Some(Colreg)
    );
}

#[test]
fn trigger_fires_on_any_offset() {
    let mut totals = vec![5.0; 39];
    let plan0 = synthetic_plan(&totals);
    assert!(!event_trigger(&synthetic_plan(&[0.0; 39])));
    totals[index_of(&plan0, 0.0, 0.5)] = 0.1;
    assert!(event_trigger(&synthetic_plan(&totals)));
}

/// Brute-force contrastive oracle: every component compared separately,
/// the winner chosen by scanning in priority order with a strict test.
fn oracle(fact: &[f64; 7], foil: &[f64; 7]) -> (Vec<usize>, Option<usize>) {
    let set: Vec<usize> = (0..7).filter(|&i| fact[i] < foil[i]).collect();
    let mut best: Option<usize> = None;
    for &i in &set {
        if best.is_none_or(|b| fact[i] - foil[i] < fact[b] - foil[b]) {
            best = Some(i);
        }
    }
    (set, best)
}

fn component_values() -> impl Strategy<Value = [f64; 7]> {
    let v = prop_oneof![
        Just(0.0),
        Just(5.0),
        Just(50.0),
        (0u8..4).prop_map(|x| x as f64),
        0.0..100.0f64,
    ];
    prop::array::uniform7(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn contrast_matches_brute_force(fact in component_values(), foil in component_values()) {
        let (a, b) = (breakdown(fact), breakdown(foil));
        let set = contrastive_set(&a, &b);
        let (want_set, want_sel) = oracle(&fact, &foil);
        let got: Vec<usize> = set.iter().map(|c| Component::ALL.iter().position(|k| k == c).unwrap()).collect();
        prop_assert_eq!(got, want_set);
        let sel = select_contrastive_cost(&set, &a, &b);
        prop_assert_eq!(sel, want_sel.map(|i| Component::ALL[i]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn foil_is_minimal_among_admissible(totals in prop::collection::vec(
        prop_oneof![(0u8..6).prop_map(|x| x as f64), 0.0..20.0f64], 39)) {
        let plan = synthetic_plan(&totals);
        let fact = plan.solution_offset();
        for c in Characteristic::ALL {
            let foil = select_foil(&plan, c);
            let admissible: Vec<usize> = (0..39)
                .filter(|&k| k != plan.solution && c.admits(&plan.candidates[k].offset, &fact))
                .collect();
            match foil.alternative_index {
                None => prop_assert!(admissible.is_empty()),
                Some(a) => {
                    prop_assert!(admissible.contains(&a));
                    for &k in &admissible {
                        prop_assert!(totals[a] <= totals[k]);
                    }
                }
            }
        }
    }
}

#[test]
fn probe_trigger_matches_exhaustive_scan() {
    let s = bundled_scenario("head_on_single").unwrap();
    let cfg = SimConfig::default();
    let ctx = PlanContext::new(&s, &cfg);
    let world = WorldState::initial(&s);
    let dp = ahead_of_time_probe(&ctx, &world, 120.0, Characteristic::PortTurn)
        .unwrap()
        .expect("head-on must trigger");
    assert!(!dp.plan.solution_offset().is_nominal());
    assert!(dp.plan.solution_offset().course_offset > 0.0);

    // independent scan: tick-by-tick execution of each plan, replanning
    // every 5 s, stopping at the first non-nominal solution
    let mut w = world.clone();
    let mut scan_time = None;
    for _ in 0..=24 {
        let p = crate::planner::plan(&ctx, &w.snapshot(), w.previous_offset).unwrap();
        if !p.solution_offset().is_nominal() {
            scan_time = Some(p.time);
            break;
        }
        for _ in 0..10 {
            w.step(&ctx, Some(&p), 0.5).unwrap();
        }
        w.previous_offset = p.solution_offset();
    }
    assert_eq!(Some(dp.trigger_time), scan_time);
    assert_eq!(dp.foil.characteristic, Characteristic::PortTurn);
    let alt = dp.foil.alternative_index.unwrap();
    assert!(dp.plan.candidates[alt].offset.course_offset < 0.0);
}

#[test]
fn probe_without_conflict_returns_none() {
    let mut s = bundled_scenario("head_on_single").unwrap();
    s.obstacles.clear();
    let cfg = SimConfig::default();
    let ctx = PlanContext::new(&s, &cfg);
    let dp = ahead_of_time_probe(&ctx, &WorldState::initial(&s), 60.0, Characteristic::PortTurn).unwrap();
    assert!(dp.is_none());
    let err = ahead_of_time_probe(&ctx, &WorldState::initial(&s), 7.0, Characteristic::PortTurn);
    assert!(err.is_err());
}

#[test]
fn changing_characteristic_keeps_nominal_explanation() {
    let s = bundled_scenario("crossing_give_way").unwrap();
    let cfg = SimConfig::default();
    let ctx = PlanContext::new(&s, &cfg);
    let dp = ahead_of_time_probe(&ctx, &WorldState::initial(&s), 120.0, s.foil_characteristic)
        .unwrap()
        .unwrap();
    let other = dp.with_characteristic(Characteristic::PortTurn).unwrap();
    assert_eq!(other.versus_nominal, dp.versus_nominal);
    assert_eq!(other.plan, dp.plan);
    assert_eq!(other.foil.characteristic, Characteristic::PortTurn);
    assert_eq!(other.versus_alternative.foil_label, FoilLabel::Alternative);
    assert_eq!(dp.versus_nominal.foil.as_ref().unwrap().index, dp.plan.nominal);
}
