//! Budget-one cutting-plane run on RTS-GMLC with a reduced scenario count.
//! `cargo run --example rts -- 200` runs the full-size instance.

use std::path::Path;
use std::time::Instant;

use nk_interdict::cutplane::{run_cutting_plane, CutplaneOptions};
use nk_interdict::netmodel::{load_network, with_spectral_coordinates};
use nk_interdict::scenario::{generate_scenarios, GenerationParams};

fn main() -> nk_interdict::Result<()> {
    let n_scenarios = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(25);
    let case = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/case_RTS_GMLC.m");
    let net = with_spectral_coordinates(&load_network(&case)?)?;
    let params = GenerationParams {
        n_scenarios,
        ..Default::default()
    };
    let ss = generate_scenarios(&net, &params)?;

    let start = Instant::now();
    let r = run_cutting_plane(&net, &ss, 1, &CutplaneOptions::default())?;
    println!(
        "{n_scenarios} scenarios: plan {:?}, z_lb {:.3}, z_ub {:.3}, {:?} after {} iterations in {:.1?}",
        r.plan.sorted_ids(),
        r.z_lb,
        r.z_ub,
        r.status,
        r.iterations,
        start.elapsed()
    );
    let mut worst: Vec<_> = net
        .buses()
        .iter()
        .zip(&r.bus_shed_mw)
        .filter(|(_, &mw)| mw > 1e-6)
        .collect();
    worst.sort_by(|a, b| b.1.total_cmp(a.1));
    for (bus, mw) in worst.iter().take(5) {
        println!("  bus {}: {mw:.2} MW expected shed", bus.id);
    }
    Ok(())
}
