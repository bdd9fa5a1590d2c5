//! Property tests over seeded random instances.

mod common;

use common::{random_network, random_scenarios};
use nk_interdict::cutplane::make_cut;
use nk_interdict::enumerate::{enumerate_exact, EnumerateOptions};
use nk_interdict::inner::{expected_shed, solve_inner, InterdictionPlan};
use nk_interdict::netmodel::{parse_network_json, serialize_network_json, Component};
use nk_interdict::scenario::{mean_availability, normalize, parse_scenarios_json, Scenario, ScenarioSet};
use proptest::prelude::*;

fn plan_of(net: &nk_interdict::netmodel::Network, picks: &[usize]) -> InterdictionPlan {
    let comps: Vec<Component> = net.components().collect();
    let chosen: Vec<Component> = picks.iter().map(|&i| comps[i % comps.len()]).collect();
    InterdictionPlan::from_components(net, &chosen)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalize_sums_to_one_and_keeps_ratios(ws in prop::collection::vec(0.01f64..50.0, 1..12)) {
        let ss = ScenarioSet::new(
            ws.iter().enumerate().map(|(i, &w)| Scenario::nominal(format!("s{i}"), w)).collect(),
        );
        let n = normalize(&ss).unwrap();
        let total: f64 = n.scenarios.iter().map(|s| s.weight).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let raw: f64 = ws.iter().sum();
        for (s, w) in n.scenarios.iter().zip(&ws) {
            prop_assert!((s.weight - w / raw).abs() <= 1e-12);
        }
    }

    #[test]
    fn mean_availability_is_a_probability(seed in 0u64..10_000, n in 1usize..8) {
        let net = random_network(seed);
        let ss = random_scenarios(&net, n, seed);
        let a = mean_availability(&ss, &net);
        prop_assert!(a.lines.iter().chain(&a.gens).all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
    }

    // Only generator attacks are pure restrictions. Dropping a line also
    // drops its Ohm's-law coupling and can lower the shed.
    #[test]
    fn shed_is_bounded_and_grows_with_generator_attacks(seed in 0u64..10_000, picks in prop::collection::vec(0usize..64, 0..4)) {
        let net = random_network(seed);
        let ss = random_scenarios(&net, 3, seed);
        let d = net.total_demand();
        let mut prev = expected_shed(&net, &ss, &InterdictionPlan::empty()).unwrap();
        prop_assert!((-1e-9..=d + 1e-9).contains(&prev));
        let gens: Vec<Component> = picks.iter().map(|&i| Component::Gen(i % net.generators().len())).collect();
        for j in 1..=gens.len() {
            let plan = InterdictionPlan::from_components(&net, &gens[..j]);
            let v = expected_shed(&net, &ss, &plan).unwrap();
            prop_assert!(v >= prev - 1e-7 * (1.0 + prev), "{} then {}", prev, v);
            prop_assert!(v <= d + 1e-9);
            prev = v;
        }
    }

    #[test]
    fn line_attacks_keep_shed_in_range(seed in 0u64..10_000, picks in prop::collection::vec(0usize..64, 0..3)) {
        let net = random_network(seed);
        let ss = random_scenarios(&net, 3, seed);
        let v = expected_shed(&net, &ss, &plan_of(&net, &picks)).unwrap();
        prop_assert!((-1e-9..=net.total_demand() + 1e-9).contains(&v));
    }

    #[test]
    fn enumeration_is_monotone_in_budget(seed in 0u64..10_000) {
        let net = random_network(seed);
        let ss = random_scenarios(&net, 2, seed);
        let mut prev = 0.0;
        for k in 0..=2 {
            let v = enumerate_exact(&net, &ss, k, &EnumerateOptions::default()).unwrap().best_value;
            prop_assert!(v >= prev - 1e-9);
            prev = v;
        }
    }

    #[test]
    fn cut_is_tight_at_its_plan(seed in 0u64..10_000, picks in prop::collection::vec(0usize..64, 0..3)) {
        let net = random_network(seed);
        let sc = random_scenarios(&net, 1, seed).scenarios.remove(0);
        let plan = plan_of(&net, &picks);
        let disp = solve_inner(&net, &sc, &plan).unwrap();
        let cut = make_cut(&net, &sc, &plan, &disp, 1);
        prop_assert!((cut.value_at(&plan) - disp.shed_total_mw).abs() <= 1e-9 * (1.0 + disp.shed_total_mw));
        for (id, &a) in &cut.line_coeff {
            prop_assert!(a >= 0.0);
            if plan.attacked_lines.contains(id) || sc.off_lines.contains(id) {
                prop_assert_eq!(a, 0.0);
            }
        }
        for (id, &b) in &cut.gen_coeff {
            prop_assert!(b >= 0.0);
            if plan.attacked_gens.contains(id) || sc.off_gens.contains(id) {
                prop_assert_eq!(b, 0.0);
            }
        }
    }

    #[test]
    fn json_round_trips(seed in 0u64..10_000) {
        let net = random_network(seed);
        let back = parse_network_json(&serialize_network_json(&net)).unwrap();
        prop_assert_eq!(back.data(), net.data());
        let ss = random_scenarios(&net, 4, seed);
        let ss_back = parse_scenarios_json(&ss.to_json(), &net).unwrap();
        prop_assert_eq!(ss_back, ss);
    }
}
