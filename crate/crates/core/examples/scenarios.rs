//! Geo-clustered outage scenarios on the RTS-GMLC case.

use std::path::Path;

use nk_interdict::netmodel::{load_network, with_spectral_coordinates};
use nk_interdict::scenario::{generate_scenarios, mean_availability, GenerationParams};

fn main() -> nk_interdict::Result<()> {
    let case = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/case_RTS_GMLC.m");
    let net = with_spectral_coordinates(&load_network(&case)?)?;
    println!(
        "{} buses, {} lines, {} generators, {:.0} MW demand",
        net.buses().len(),
        net.lines().len(),
        net.generators().len(),
        net.total_demand()
    );

    for cluster in 0..3 {
        let params = GenerationParams {
            cluster_index: cluster,
            n_scenarios: 50,
            ..Default::default()
        };
        let ss = match generate_scenarios(&net, &params) {
            Ok(ss) => ss,
            Err(e) => {
                println!("cluster {cluster}: {e}");
                continue;
            }
        };
        let avail = mean_availability(&ss, &net);
        let weakest = net
            .generators()
            .iter()
            .map(|g| (avail.gen(&net, &g.id).unwrap(), g.id.as_str()))
            .fold((1.0, ""), |a, b| if b.0 < a.0 { b } else { a });
        println!(
            "cluster {cluster}: first scenario disables {:?} {:?}; least available generator {} at {:.2}",
            ss.scenarios[0].off_lines, ss.scenarios[0].off_gens, weakest.1, weakest.0
        );
    }
    Ok(())
}
