//! Seeded random desk-scale instances shared by the integration tests.
#![allow(dead_code)]

use nk_interdict::netmodel::{Bus, Coord, Generator, Line, Network, NetworkData};
use nk_interdict::scenario::{Scenario, ScenarioSet};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const T3: &str = include_str!("../../data/t3.json");

pub fn t3() -> Network {
    nk_interdict::netmodel::parse_network_json(T3).unwrap()
}

/// Connected network with 4–8 buses, 4–10 lines and 2–4 generators.
/// Capacities are tight enough that congestion and shedding are common.
pub fn random_network(seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_bus = rng.random_range(4..=8usize);
    let n_line = rng.random_range(n_bus.max(4)..=10usize);
    let n_gen = rng.random_range(2..=4usize);
    let buses: Vec<Bus> = (0..n_bus)
        .map(|b| Bus {
            id: format!("b{b}"),
            demand_mw: if rng.random_bool(0.7) {
                rng.random_range(10.0..100.0f64).round()
            } else {
                0.0
            },
            coord: Some(Coord {
                lon: rng.random_range(-1.0..1.0),
                lat: rng.random_range(-1.0..1.0),
            }),
        })
        .collect();
    let mut buses = buses;
    if buses.iter().all(|b| b.demand_mw == 0.0) {
        buses[n_bus - 1].demand_mw = 50.0;
    }
    let total: f64 = buses.iter().map(|b| b.demand_mw).sum();

    let mut lines = Vec::new();
    let mut add_line = |from: usize, to: usize, rng: &mut ChaCha8Rng| {
        let id = format!("l{}", lines.len());
        lines.push(Line {
            id,
            from: format!("b{from}"),
            to: format!("b{to}"),
            susceptance: rng.random_range(5.0..20.0f64).round(),
            thermal_mw: rng.random_range(20.0..120.0f64).round(),
            angle_diff_max_rad: None,
        });
    };
    // Random spanning tree, then extra lines between random pairs.
    for b in 1..n_bus {
        let parent = rng.random_range(0..b);
        add_line(parent, b, &mut rng);
    }
    for _ in n_bus - 1..n_line {
        let pair = sample(&mut rng, n_bus, 2);
        add_line(pair.index(0), pair.index(1), &mut rng);
    }

    let generation = total * rng.random_range(1.0..1.6);
    let shares: Vec<f64> = (0..n_gen).map(|_| rng.random_range(0.5..1.5)).collect();
    let share_sum: f64 = shares.iter().sum();
    let generators = shares
        .iter()
        .enumerate()
        .map(|(g, s)| Generator {
            id: format!("g{g}"),
            bus: format!("b{}", rng.random_range(0..n_bus)),
            pmax_mw: (generation * s / share_sum).round(),
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

/// `n` scenarios, each switching off up to two random components, with
/// uniform weights.
pub fn random_scenarios(net: &Network, n: usize, seed: u64) -> ScenarioSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let comps: Vec<_> = net.components().collect();
    let scenarios = (0..n)
        .map(|s| {
            let mut sc = Scenario::nominal(format!("s{s}"), 1.0 / n as f64);
            let n_off = rng.random_range(0..=2usize.min(comps.len()));
            for i in sample(&mut rng, comps.len(), n_off) {
                match comps[i] {
                    nk_interdict::netmodel::Component::Line(l) => {
                        sc.off_lines.insert(net.lines()[l].id.clone());
                    }
                    nk_interdict::netmodel::Component::Gen(g) => {
                        sc.off_gens.insert(net.generators()[g].id.clone());
                    }
                }
            }
            sc
        })
        .collect();
    ScenarioSet::new(scenarios)
}

pub struct Instance {
    pub seed: u64,
    pub net: Network,
    pub ss: ScenarioSet,
    pub k: usize,
}

pub const SCENARIO_COUNTS: [usize; 4] = [1, 2, 4, 6];

/// Instance `i` cycles through every (|S|, k) pair.
pub fn instance(i: u64) -> Instance {
    let net = random_network(1000 + i);
    let n = SCENARIO_COUNTS[(i % 4) as usize];
    let ss = random_scenarios(&net, n, 2000 + i);
    Instance {
        seed: i,
        net,
        ss,
        k: (i % 3) as usize,
    }
}

pub fn corpus(n: u64) -> Vec<Instance> {
    (0..n).map(instance).collect()
}
