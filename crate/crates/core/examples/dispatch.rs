//! Minimum load shed on the three-bus network, before and after an attack.

use nk_interdict::inner::{solve_inner, InterdictionPlan};
use nk_interdict::netmodel::{parse_network_json, Component};
use nk_interdict::scenario::Scenario;

fn main() -> nk_interdict::Result<()> {
    let net = parse_network_json(include_str!("../data/t3.json"))?;
    let sc = Scenario::nominal("nominal", 1.0);
    let cases = [
        ("no attack", InterdictionPlan::empty()),
        ("cut l13", InterdictionPlan::from_components(&net, &[Component::Line(2)])),
        ("cut l12", InterdictionPlan::from_components(&net, &[Component::Line(0)])),
    ];
    for (label, plan) in cases {
        let d = solve_inner(&net, &sc, &plan)?;
        println!("{label}: shed {:.1} MW (dual objective {:.1})", d.shed_total_mw, d.dual_value);
        for (line, f) in net.lines().iter().zip(&d.flow_mw) {
            println!("  {} flow {:+.1} MW", line.id, f + 0.0);
        }
    }
    Ok(())
}
