//! Outage scenarios: which lines and generators are off, with a probability
//! weight. Includes the geo-clustered Bernoulli generator.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{Coord, Network};

const KMEANS_MAX_ITERS: usize = 100;
const MAX_DRAWS_PER_SCENARIO: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub off_lines: BTreeSet<String>,
    #[serde(default)]
    pub off_gens: BTreeSet<String>,
    pub weight: f64,
}

impl Scenario {
    /// The scenario with nothing off.
    pub fn nominal(id: impl Into<String>, weight: f64) -> Self {
        Self {
            id: id.into(),
            off_lines: BTreeSet::new(),
            off_gens: BTreeSet::new(),
            weight,
        }
    }

    pub fn num_off(&self) -> usize {
        self.off_lines.len() + self.off_gens.len()
    }

    /// Per-position availability flags (ξ) for lines and generators.
    pub fn availability(&self, net: &Network) -> (Vec<bool>, Vec<bool>) {
        let mut lines = vec![true; net.lines().len()];
        let mut gens = vec![true; net.generators().len()];
        for id in &self.off_lines {
            if let Some(l) = net.line_index(id) {
                lines[l] = false;
            }
        }
        for id in &self.off_gens {
            if let Some(g) = net.gen_index(id) {
                gens[g] = false;
            }
        }
        (lines, gens)
    }

    pub fn validate(&self, net: &Network) -> Result<()> {
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return Err(Error::invariant("scenario", &self.id, "weight must be positive"));
        }
        for id in &self.off_lines {
            if net.line_index(id).is_none() {
                return Err(Error::invariant("scenario", &self.id, format!("unknown line `{id}`")));
            }
        }
        for id in &self.off_gens {
            if net.gen_index(id).is_none() {
                return Err(Error::invariant(
                    "scenario",
                    &self.id,
                    format!("unknown generator `{id}`"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    pub fn new(scenarios: Vec<Scenario>) -> Self {
        Self { scenarios }
    }

    /// A single nominal scenario of weight 1.
    pub fn nominal() -> Self {
        Self::new(vec![Scenario::nominal("s1", 1.0)])
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn validate(&self, net: &Network) -> Result<()> {
        let mut seen = BTreeSet::new();
        for s in &self.scenarios {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::invariant("scenario", &s.id, "duplicate id"));
            }
            s.validate(net)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario set always serializes")
    }
}

pub fn parse_scenarios_json(text: &str, net: &Network) -> Result<ScenarioSet> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let ss: ScenarioSet = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    ss.validate(net)?;
    Ok(ss)
}

pub fn load_scenarios(path: &std::path::Path, net: &Network) -> Result<ScenarioSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenarios_json(&text, net)
}

/// Rescales weights to sum to one.
pub fn normalize(ss: &ScenarioSet) -> Result<ScenarioSet> {
    if ss.is_empty() {
        return Err(Error::Model("cannot normalize an empty scenario set".into()));
    }
    if let Some(bad) = ss.scenarios.iter().find(|s| !(s.weight.is_finite() && s.weight > 0.0)) {
        return Err(Error::invariant("scenario", &bad.id, "weight must be positive"));
    }
    let total: f64 = ss.scenarios.iter().map(|s| s.weight).sum();
    let mut out = ss.clone();
    // Already normalized up to rounding: leave the weights untouched.
    if (total - 1.0).abs() <= 1e-12 {
        return Ok(out);
    }
    for s in &mut out.scenarios {
        s.weight /= total;
    }
    Ok(out)
}

/// Expected availability ξ̄ of every component, by table position.
#[derive(Clone, Debug, PartialEq)]
pub struct Availability {
    pub lines: Vec<f64>,
    pub gens: Vec<f64>,
}

impl Availability {
    pub fn line(&self, net: &Network, id: &str) -> Option<f64> {
        net.line_index(id).map(|l| self.lines[l])
    }

    pub fn gen(&self, net: &Network, id: &str) -> Option<f64> {
        net.gen_index(id).map(|g| self.gens[g])
    }
}

pub fn mean_availability(ss: &ScenarioSet, net: &Network) -> Availability {
    let mut lines = vec![0.0; net.lines().len()];
    let mut gens = vec![0.0; net.generators().len()];
    for s in &ss.scenarios {
        let (la, ga) = s.availability(net);
        for (acc, on) in lines.iter_mut().zip(la) {
            if on {
                *acc += s.weight;
            }
        }
        for (acc, on) in gens.iter_mut().zip(ga) {
            if on {
                *acc += s.weight;
            }
        }
    }
    for v in lines.iter_mut().chain(gens.iter_mut()) {
        *v = v.clamp(0.0, 1.0);
    }
    Availability { lines, gens }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationParams {
    pub n_clusters: usize,
    pub cluster_index: usize,
    pub n_scenarios: usize,
    pub outage_range: (usize, usize),
    /// Defaults to the window midpoint divided by the candidate count.
    #[serde(default)]
    pub bernoulli_p: Option<f64>,
    pub seed: u64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            n_clusters: 3,
            cluster_index: 0,
            n_scenarios: 200,
            outage_range: (4, 6),
            bernoulli_p: None,
            seed: 0,
        }
    }
}

/// Seeded k-means++ followed by Lloyd iterations. Clusters are returned
/// sorted by centroid (lon, then lat); the result maps each point to its
/// cluster.
pub fn kmeans(points: &[Coord], k: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    assert!(k >= 1 && k <= n, "need 1 <= k <= number of points");
    let dist2 = |a: &Coord, b: &Coord| (a.lon - b.lon).powi(2) + (a.lat - b.lat).powi(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![points[rng.random_range(0..n)]];
    while centers.len() < k {
        let d: Vec<f64> = points
            .iter()
            .map(|p| centers.iter().map(|c| dist2(p, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d.iter().sum();
        let next = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, di) in d.iter().enumerate() {
                if r < *di {
                    pick = i;
                    break;
                }
                r -= di;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[next]);
    }

    let mut assign = vec![usize::MAX; n];
    for _ in 0..KMEANS_MAX_ITERS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            for c in 1..k {
                if dist2(p, &centers[c]) < dist2(p, &centers[best]) {
                    best = c;
                }
            }
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let (mut sx, mut sy, mut cnt) = (0.0, 0.0, 0usize);
            for (p, &a) in points.iter().zip(&assign) {
                if a == c {
                    sx += p.lon;
                    sy += p.lat;
                    cnt += 1;
                }
            }
            if cnt > 0 {
                *center = Coord {
                    lon: sx / cnt as f64,
                    lat: sy / cnt as f64,
                };
            }
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        centers[a]
            .lon
            .total_cmp(&centers[b].lon)
            .then(centers[a].lat.total_cmp(&centers[b].lat))
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; k];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    assign.into_iter().map(|a| rank[a]).collect()
}

pub fn generate_scenarios(net: &Network, params: &GenerationParams) -> Result<ScenarioSet> {
    let GenerationParams {
        n_clusters,
        cluster_index,
        n_scenarios,
        outage_range: (lo, hi),
        bernoulli_p,
        seed,
    } = *params;
    if n_clusters == 0 || n_scenarios == 0 {
        return Err(Error::Generation("n_clusters and n_scenarios must be positive".into()));
    }
    if cluster_index >= n_clusters {
        return Err(Error::Generation(format!(
            "cluster_index {cluster_index} out of range for {n_clusters} clusters"
        )));
    }
    if lo < 1 || lo > hi {
        return Err(Error::Generation(format!("invalid outage range ({lo},{hi})")));
    }
    let coords: Vec<Coord> = net
        .buses()
        .iter()
        .map(|b| {
            b.coord
                .ok_or_else(|| Error::Generation(format!("bus `{}` has no coordinates", b.id)))
        })
        .collect::<Result<_>>()?;
    if n_clusters > coords.len() {
        return Err(Error::Generation(format!(
            "{n_clusters} clusters requested for {} buses",
            coords.len()
        )));
    }
    let assign = kmeans(&coords, n_clusters, seed);
    let in_cluster = |b: usize| assign[b] == cluster_index;

    let cand_gens: Vec<usize> = (0..net.generators().len())
        .filter(|&g| in_cluster(net.gen_bus(g)))
        .collect();
    let cand_lines: Vec<usize> = (0..net.lines().len())
        .filter(|&l| {
            let (a, b) = net.line_ends(l);
            in_cluster(a) && in_cluster(b)
        })
        .collect();
    let n_cand = cand_gens.len() + cand_lines.len();
    if n_cand < lo {
        return Err(Error::Generation(format!(
            "cluster {cluster_index} has {n_cand} candidate components, fewer than {lo}"
        )));
    }
    let p = match bernoulli_p {
        Some(p) if p > 0.0 && p < 1.0 => p,
        Some(p) => return Err(Error::Generation(format!("bernoulli_p {p} not in (0,1)"))),
        None => ((lo + hi) as f64 / 2.0 / n_cand as f64).min(1.0),
    };

    // The scenario stream is offset from the clustering stream so the two
    // stay independent under the same user seed.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let weight = 1.0 / n_scenarios as f64;
    let mut scenarios = Vec::with_capacity(n_scenarios);
    for s in 0..n_scenarios {
        let mut draws = 0;
        let marks = loop {
            draws += 1;
            if draws > MAX_DRAWS_PER_SCENARIO {
                return Err(Error::Generation(format!(
                    "no draw with {lo}..={hi} outages after {MAX_DRAWS_PER_SCENARIO} attempts"
                )));
            }
            let marks: Vec<bool> = (0..n_cand).map(|_| rng.random_bool(p)).collect();
            let count = marks.iter().filter(|&&m| m).count();
            if (lo..=hi).contains(&count) {
                break marks;
            }
        };
        let mut sc = Scenario::nominal(format!("s{}", s + 1), weight);
        for (i, _) in marks.iter().enumerate().filter(|(_, m)| **m) {
            if i < cand_gens.len() {
                sc.off_gens.insert(net.generators()[cand_gens[i]].id.clone());
            } else {
                sc.off_lines.insert(net.lines()[cand_lines[i - cand_gens.len()]].id.clone());
            }
        }
        scenarios.push(sc);
    }
    Ok(ScenarioSet::new(scenarios))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{Bus, Generator, Line, NetworkData};
    use proptest::prelude::*;

    fn grid(n: usize) -> Network {
        // n x n lattice with a generator on every bus.
        let mut buses = Vec::new();
        let mut generators = Vec::new();
        let mut lines = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let id = format!("b{r}_{c}");
                buses.push(Bus {
                    id: id.clone(),
                    demand_mw: 10.0,
                    coord: Some(Coord {
                        lon: c as f64,
                        lat: r as f64,
                    }),
                });
                generators.push(Generator {
                    id: format!("g{r}_{c}"),
                    bus: id.clone(),
                    pmax_mw: 20.0,
                });
                if c + 1 < n {
                    lines.push(Line {
                        id: format!("h{r}_{c}"),
                        from: id.clone(),
                        to: format!("b{r}_{}", c + 1),
                        susceptance: 10.0,
                        thermal_mw: 50.0,
                        angle_diff_max_rad: None,
                    });
                }
                if r + 1 < n {
                    lines.push(Line {
                        id: format!("v{r}_{c}"),
                        from: id.clone(),
                        to: format!("b{}_{c}", r + 1),
                        susceptance: 10.0,
                        thermal_mw: 50.0,
                        angle_diff_max_rad: None,
                    });
                }
            }
        }
        Network::new(NetworkData {
            base_mva: 100.0,
            angle_bound_rad: 1.0,
            buses,
            generators,
            lines,
        })
        .unwrap()
    }

    #[test]
    fn normalize_examples() {
        let mk = |ws: &[f64]| {
            ScenarioSet::new(
                ws.iter()
                    .enumerate()
                    .map(|(i, &w)| Scenario::nominal(format!("s{i}"), w))
                    .collect(),
            )
        };
        let n = normalize(&mk(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(n.scenarios.iter().all(|s| s.weight == 0.25));
        let n = normalize(&mk(&[2.0, 2.0])).unwrap();
        assert!(n.scenarios.iter().all(|s| s.weight == 0.5));
        assert_eq!(normalize(&mk(&[7.0])).unwrap().scenarios[0].weight, 1.0);
        assert!(normalize(&mk(&[])).is_err());
    }

    #[test]
    fn availability_examples() {
        let net = grid(2);
        let mut ss = ScenarioSet::new(
            (0..4).map(|i| Scenario::nominal(format!("s{i}"), 0.25)).collect(),
        );
        ss.scenarios[0].off_gens.insert("g0_0".into());
        for s in &mut ss.scenarios {
            s.off_lines.insert("h0_0".into());
        }
        let a = mean_availability(&ss, &net);
        assert_eq!(a.gen(&net, "g0_0"), Some(0.75));
        assert_eq!(a.gen(&net, "g1_1"), Some(1.0));
        assert_eq!(a.line(&net, "h0_0"), Some(0.0));
    }

    #[test]
    fn generation_respects_window_and_cluster() {
        let net = grid(5);
        let params = GenerationParams {
            n_clusters: 2,
            cluster_index: 1,
            n_scenarios: 50,
            outage_range: (4, 6),
            bernoulli_p: None,
            seed: 7,
        };
        let ss = generate_scenarios(&net, &params).unwrap();
        assert_eq!(ss.len(), 50);
        let coords: Vec<Coord> = net.buses().iter().map(|b| b.coord.unwrap()).collect();
        let assign = kmeans(&coords, 2, 7);
        for s in &ss.scenarios {
            assert!((4..=6).contains(&s.num_off()));
            for g in &s.off_gens {
                assert_eq!(assign[net.gen_bus(net.gen_index(g).unwrap())], 1);
            }
            for l in &s.off_lines {
                let (a, b) = net.line_ends(net.line_index(l).unwrap());
                assert_eq!((assign[a], assign[b]), (1, 1));
            }
        }
        let again = generate_scenarios(&net, &params).unwrap();
        assert_eq!(ss.to_json(), again.to_json());
    }

    #[test]
    fn small_cluster_is_rejected() {
        // One generator and four lines: five candidates.
        let mut net = grid(2).into_data();
        net.generators.truncate(1);
        let net = Network::new(net).unwrap();
        let params = GenerationParams {
            n_clusters: 1,
            outage_range: (4, 6),
            ..GenerationParams::default()
        };
        assert!(generate_scenarios(&net, &params).is_ok());
        let params = GenerationParams {
            outage_range: (7, 8),
            ..params
        };
        assert!(matches!(generate_scenarios(&net, &params), Err(Error::Generation(_))));
    }

    #[test]
    fn missing_coords_is_an_error() {
        let mut data = grid(2).into_data();
        data.buses[0].coord = None;
        let net = Network::new(data).unwrap();
        assert!(generate_scenarios(&net, &GenerationParams { n_clusters: 1, ..Default::default() }).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let net = grid(2);
        let text = r#"{"scenarios":[{"id":"a","off_lines":["h0_0"],"off_gens":[],"weight":1}]}"#;
        let ss = parse_scenarios_json(text, &net).unwrap();
        assert_eq!(parse_scenarios_json(&ss.to_json(), &net).unwrap(), ss);
        let bad = r#"{"scenarios":[{"id":"a","off_lines":["zz"],"weight":1}]}"#;
        assert!(parse_scenarios_json(bad, &net).unwrap_err().to_string().contains("zz"));
    }

    proptest! {
        #[test]
        fn availability_in_unit_interval(offs in proptest::collection::vec(0usize..8, 1..6)) {
            let net = grid(2);
            let ids: Vec<String> = net.components().map(|c| net.component_id(c).to_string()).collect();
            let scen: Vec<Scenario> = offs.iter().enumerate().map(|(i, &o)| {
                let mut s = Scenario::nominal(format!("s{i}"), 1.0);
                let id = ids[o % ids.len()].clone();
                if net.line_index(&id).is_some() { s.off_lines.insert(id); } else { s.off_gens.insert(id); }
                s
            }).collect();
            let ss = normalize(&ScenarioSet::new(scen)).unwrap();
            let sum: f64 = ss.scenarios.iter().map(|s| s.weight).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            let a = mean_availability(&ss, &net);
            prop_assert!(a.lines.iter().chain(&a.gens).all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
