//! Cutting-plane solve on a small synthetic grid, checked against enumeration.

use nk_interdict::cutplane::{run_cutting_plane, trace_jsonl, CutplaneOptions};
use nk_interdict::enumerate::{enumerate_exact, EnumerateOptions};
use nk_interdict::netmodel::{Bus, Generator, Line, Network, NetworkData};
use nk_interdict::scenario::{Scenario, ScenarioSet};

fn ring(n: usize) -> Network {
    let buses = (0..n)
        .map(|b| Bus {
            id: format!("b{b}"),
            demand_mw: if b % 2 == 1 { 40.0 } else { 0.0 },
            coord: None,
        })
        .collect();
    let mut lines: Vec<Line> = (0..n)
        .map(|b| Line {
            id: format!("l{b}"),
            from: format!("b{b}"),
            to: format!("b{}", (b + 1) % n),
            susceptance: 10.0 + b as f64,
            thermal_mw: 45.0,
            angle_diff_max_rad: None,
        })
        .collect();
    lines.push(Line {
        id: "chord".into(),
        from: "b0".into(),
        to: format!("b{}", n / 2),
        susceptance: 8.0,
        thermal_mw: 30.0,
        angle_diff_max_rad: None,
    });
    let generators = [(0, 90.0), (2, 60.0), (4, 50.0)]
        .iter()
        .map(|&(b, p)| Generator {
            id: format!("g{b}"),
            bus: format!("b{b}"),
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
    let net = ring(6);
    let mut scenarios = vec![Scenario::nominal("s0", 0.5)];
    for (i, line) in ["l1", "l4", "chord"].iter().enumerate() {
        let mut s = Scenario::nominal(format!("s{}", i + 1), 0.5 / 3.0);
        s.off_lines.insert(line.to_string());
        scenarios.push(s);
    }
    let ss = ScenarioSet::new(scenarios);

    for k in 1..=3 {
        let r = run_cutting_plane(&net, &ss, k, &CutplaneOptions::default())?;
        let exact = enumerate_exact(&net, &ss, k, &EnumerateOptions::default())?;
        println!(
            "k={k}: {:?} z_lb {:.3} z_ub {:.3} ({:?} after {} iterations), exact {:.3}",
            r.plan.sorted_ids(),
            r.z_lb,
            r.z_ub,
            r.status,
            r.iterations,
            exact.best_value
        );
        if k == 3 {
            print!("{}", trace_jsonl(&r.history, true));
        }
    }
    Ok(())
}
