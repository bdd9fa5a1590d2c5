//! Value of the stochastic solution and sample-average batches on a small
//! meshed grid with correlated line outages.

use nk_interdict::analysis::{compute_vss, saa_batches, Method, SolveSettings};
use nk_interdict::netmodel::{Bus, Generator, Line, Network, NetworkData};
use nk_interdict::scenario::{Scenario, ScenarioSet};

fn grid() -> Network {
    let demand = [0.0, 60.0, 0.0, 80.0, 50.0, 40.0];
    let buses = demand
        .iter()
        .enumerate()
        .map(|(b, &d)| Bus {
            id: format!("b{b}"),
            demand_mw: d,
            coord: None,
        })
        .collect();
    let arcs = [(0, 1, 70.0), (1, 3, 60.0), (0, 2, 90.0), (2, 3, 50.0), (2, 4, 60.0), (3, 5, 40.0), (4, 5, 40.0), (1, 4, 30.0)];
    let lines = arcs
        .iter()
        .enumerate()
        .map(|(i, &(a, b, t))| Line {
            id: format!("l{a}{b}"),
            from: format!("b{a}"),
            to: format!("b{b}"),
            susceptance: 10.0 + i as f64,
            thermal_mw: t,
            angle_diff_max_rad: None,
        })
        .collect();
    let generators = [("g0", "b0", 250.0), ("g2", "b2", 200.0), ("g5", "b5", 120.0)]
        .iter()
        .map(|&(id, bus, p)| Generator {
            id: id.into(),
            bus: bus.into(),
            pmax_mw: p,
        })
        .collect();
    Network::new(NetworkData {
        base_mva: 100.0,
        angle_bound_rad: std::f64::consts::FRAC_PI_3,
        buses,
        generators,
        lines,
    })
    .unwrap()
}

fn main() -> nk_interdict::Result<()> {
    let net = grid();
    let outages: [&[&str]; 8] = [
        &["l01", "l45"],
        &["l45"],
        &["l35"],
        &["l01", "l14"],
        &["l24", "l45"],
        &["l01"],
        &["l01", "l24"],
        &[],
    ];
    let scenarios = outages
        .iter()
        .enumerate()
        .map(|(i, off)| {
            let mut s = Scenario::nominal(format!("s{i}"), 1.0 / outages.len() as f64);
            s.off_lines.extend(off.iter().map(|l| l.to_string()));
            s
        })
        .collect();
    let ss = ScenarioSet::new(scenarios);
    let settings = SolveSettings::default();

    for k in 0..=3 {
        let r = compute_vss(&net, &ss, k, Method::Enumeration, &settings)?;
        println!(
            "k={k}: z {:.2} with {:?}, EEV {:.2} with {:?}, VSS {:.2} ({:.1}%)",
            r.z,
            r.plan.sorted_ids(),
            r.eev,
            r.evp_plan.sorted_ids(),
            r.vss,
            r.vss_pct
        );
    }

    let saa = saa_batches(&net, &ss, 2, 4, Method::Enumeration, 7, &settings)?;
    println!(
        "SAA k=2 over {} batches: values {:.2?}, mean {:.2} +- {:.2}, best plan {:?} worth {:.2} on the full set",
        saa.batch_values.len(),
        saa.batch_values,
        saa.mean,
        saa.ci95_halfwidth,
        saa.best_plan_overall.sorted_ids(),
        saa.full_set_value_of_best
    );
    Ok(())
}
