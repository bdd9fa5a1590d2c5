//! The vendored RTS-GMLC case and scenario generation on it.

use std::path::Path;

use nk_interdict::inner::{solve_inner, InterdictionPlan};
use nk_interdict::netmodel::{load_network, with_spectral_coordinates};
use nk_interdict::scenario::{generate_scenarios, GenerationParams, Scenario};

fn case() -> nk_interdict::netmodel::Network {
    load_network(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/case_RTS_GMLC.m")).unwrap()
}

#[test]
fn case_dimensions() {
    let net = case();
    assert_eq!(net.buses().len(), 73);
    assert_eq!(net.lines().len(), 120);
    assert_eq!(net.generators().len(), 96);
    assert!((net.total_demand() - 8550.0).abs() < 1.0, "{}", net.total_demand());
    assert_eq!(net.reference_buses().len(), 1);
}

#[test]
fn nominal_case_serves_all_load() {
    let net = case();
    let d = solve_inner(&net, &Scenario::nominal("n", 1.0), &InterdictionPlan::empty()).unwrap();
    assert!(d.shed_total_mw.abs() < 1e-6, "{}", d.shed_total_mw);
    assert!((d.dual_value - d.shed_total_mw).abs() < 1e-6);
}

#[test]
fn spectral_layout_supports_generation() {
    let net = with_spectral_coordinates(&case()).unwrap();
    assert!(net.has_all_coords());
    let params = GenerationParams {
        n_scenarios: 30,
        ..Default::default()
    };
    let a = generate_scenarios(&net, &params).unwrap();
    let b = generate_scenarios(&net, &params).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 30);
    assert!(a.scenarios.iter().all(|s| (4..=6).contains(&s.num_off())));
}
