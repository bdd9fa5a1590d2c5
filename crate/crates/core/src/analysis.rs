//! Value of the stochastic solution, sample-average batching, and the
//! tabular reports built from them.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::cutplane::{run_cutting_plane, CutplaneOptions};
use crate::enumerate::{enumerate_exact, is_tie, EnumerateOptions};
use crate::error::{Error, Result};
use crate::inner::{expected_shed, InterdictionPlan};
use crate::milp::MipOptions;
use crate::netmodel::Network;
use crate::scenario::{mean_availability, normalize, Scenario, ScenarioSet};
use crate::singlelevel::{solve_single_level, DualBoundPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    Cutplane,
    Milp,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" | "enumeration" => Ok(Self::Enumeration),
            "cutplane" => Ok(Self::Cutplane),
            "milp" => Ok(Self::Milp),
            _ => Err(Error::Model(format!("unknown method {s:?}"))),
        }
    }
}

/// Knobs for every solve path.
#[derive(Clone, Debug, Default)]
pub struct SolveSettings {
    pub enumerate: EnumerateOptions,
    pub cutplane: CutplaneOptions,
    pub mip: MipOptions,
    pub dual_bounds: DualBoundPolicy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solved {
    pub plan: InterdictionPlan,
    /// Exact expected shed of `plan`.
    pub value: f64,
    /// Upper bound, when the method provides one.
    pub bound: Option<f64>,
    pub time_sec: f64,
}

pub fn solve_with(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    method: Method,
    settings: &SolveSettings,
) -> Result<Solved> {
    let start = Instant::now();
    let (plan, value, bound) = match method {
        Method::Enumeration => {
            let r = enumerate_exact(net, ss, k, &settings.enumerate)?;
            (r.best_plan, r.best_value, Some(r.best_value))
        }
        Method::Cutplane => {
            let r = run_cutting_plane(net, ss, k, &settings.cutplane)?;
            (r.plan, r.z_lb, Some(r.z_ub))
        }
        Method::Milp => {
            let r = solve_single_level(net, ss, k, settings.dual_bounds, &settings.mip)?;
            let value = expected_shed(net, ss, &r.plan)?;
            (r.plan, value, Some(r.bound))
        }
    };
    Ok(Solved {
        plan,
        value,
        bound,
        time_sec: start.elapsed().as_secs_f64(),
    })
}

/// The expected-value network: every line limit and generator cap scaled by
/// its mean availability, plus the scenario switching off components that
/// are never available.
pub fn expected_value_instance(net: &Network, ss: &ScenarioSet) -> Result<(Network, Scenario)> {
    let avail = mean_availability(&normalize(ss)?, net);
    let mut data = net.data().clone();
    let mut sc = Scenario::nominal("evp", 1.0);
    for (l, line) in data.lines.iter_mut().enumerate() {
        let a = avail.lines[l];
        if a <= 0.0 {
            sc.off_lines.insert(line.id.clone());
        } else {
            line.thermal_mw = a * net.line_capacity_mw(l);
        }
    }
    for (g, gen) in data.generators.iter_mut().enumerate() {
        let a = avail.gens[g];
        if a <= 0.0 {
            sc.off_gens.insert(gen.id.clone());
        } else {
            gen.pmax_mw *= a;
        }
    }
    Ok((Network::new(data)?, sc))
}

pub fn solve_evp(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    method: Method,
    settings: &SolveSettings,
) -> Result<InterdictionPlan> {
    let (evp_net, sc) = expected_value_instance(net, ss)?;
    Ok(solve_with(&evp_net, &ScenarioSet::new(vec![sc]), k, method, settings)?.plan)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VssReport {
    pub k: usize,
    pub z: f64,
    pub plan: InterdictionPlan,
    pub eev: f64,
    pub vss: f64,
    pub vss_pct: f64,
    /// Denominator of `vss_pct`; always `"z"`.
    pub vss_pct_base: &'static str,
    pub evp_plan: InterdictionPlan,
    pub method: Method,
}

pub fn compute_vss(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    method: Method,
    settings: &SolveSettings,
) -> Result<VssReport> {
    let ss = normalize(ss)?;
    let solved = solve_with(net, &ss, k, method, settings)?;
    let evp_plan = solve_evp(net, &ss, k, method, settings)?;
    let eev = expected_shed(net, &ss, &evp_plan)?;
    let z = solved.value;
    let vss = z - eev;
    Ok(VssReport {
        k,
        z,
        plan: solved.plan,
        eev,
        vss,
        vss_pct: if z == 0.0 { 0.0 } else { 100.0 * vss / z },
        vss_pct_base: "z",
        evp_plan,
        method,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaaReport {
    pub k: usize,
    pub method: Method,
    pub seed: u64,
    pub batch_sizes: Vec<usize>,
    pub batch_values: Vec<f64>,
    pub batch_plans: Vec<InterdictionPlan>,
    pub mean: f64,
    pub ci95_halfwidth: f64,
    /// Batch plan with the highest full-set value.
    pub best_plan_overall: InterdictionPlan,
    pub full_set_value_of_best: f64,
}

/// Seeded shuffle of scenario positions split into `n_batches` parts; the
/// remainder goes to the last batch.
pub fn partition_batches(n: usize, n_batches: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if n_batches == 0 || n_batches > n {
        return Err(Error::Model(format!(
            "cannot split {n} scenarios into {n_batches} batches"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let size = n / n_batches;
    let mut batches: Vec<Vec<usize>> = order.chunks(size).map(<[usize]>::to_vec).collect();
    while batches.len() > n_batches {
        let extra = batches.pop().expect("more batches than requested");
        batches.last_mut().expect("at least one batch").extend(extra);
    }
    Ok(batches)
}

/// Student-t 95% half-width of the mean of `values` (0 for fewer than two).
pub fn ci95_halfwidth(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= 0.0 {
        return 0.0;
    }
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("degrees of freedom are positive")
        .inverse_cdf(0.975);
    t * (var / n as f64).sqrt()
}

pub fn saa_batches(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    n_batches: usize,
    method: Method,
    seed: u64,
    settings: &SolveSettings,
) -> Result<SaaReport> {
    let full = normalize(ss)?;
    let parts = partition_batches(full.len(), n_batches, seed)?;
    let solved: Vec<Solved> = parts
        .par_iter()
        .map(|idx| {
            let batch = ScenarioSet::new(idx.iter().map(|&i| full.scenarios[i].clone()).collect());
            solve_with(net, &normalize(&batch)?, k, method, settings)
        })
        .collect::<Result<_>>()?;
    let batch_values: Vec<f64> = solved.iter().map(|s| s.value).collect();
    let mean = batch_values.iter().sum::<f64>() / batch_values.len() as f64;

    let mut candidates: Vec<InterdictionPlan> = solved.iter().map(|s| s.plan.clone()).collect();
    candidates.sort();
    candidates.dedup();
    let full_values: Vec<f64> = candidates
        .iter()
        .map(|p| expected_shed(net, &full, p))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for i in 1..candidates.len() {
        let better = if is_tie(full_values[i], full_values[best]) {
            candidates[i].sorted_ids() < candidates[best].sorted_ids()
        } else {
            full_values[i] > full_values[best]
        };
        if better {
            best = i;
        }
    }
    Ok(SaaReport {
        k,
        method,
        seed,
        batch_sizes: parts.iter().map(Vec::len).collect(),
        ci95_halfwidth: ci95_halfwidth(&batch_values),
        batch_plans: solved.into_iter().map(|s| s.plan).collect(),
        batch_values,
        mean,
        full_set_value_of_best: full_values[best],
        best_plan_overall: candidates.swap_remove(best),
    })
}

/// One row of the budget sweep table (`k, time-sec, obj-MW`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub k: usize,
    pub n_scenarios: usize,
    pub time_sec: Option<f64>,
    pub obj_mw: f64,
    pub plan: InterdictionPlan,
}

/// Solves every `(k, n)` pair on the first `n` scenarios, reweighted.
pub fn scaling_grid(
    net: &Network,
    ss: &ScenarioSet,
    ks: &[usize],
    sizes: &[usize],
    method: Method,
    settings: &SolveSettings,
    deterministic: bool,
) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        if n == 0 || n > ss.len() {
            return Err(Error::Model(format!(
                "scenario count {n} outside 1..={}",
                ss.len()
            )));
        }
        let sub = normalize(&ScenarioSet::new(ss.scenarios[..n].to_vec()))?;
        for &k in ks {
            let s = solve_with(net, &sub, k, method, settings)?;
            rows.push(SummaryRow {
                k,
                n_scenarios: n,
                time_sec: (!deterministic).then_some(s.time_sec),
                obj_mw: s.value,
                plan: s.plan,
            });
        }
    }
    Ok(rows)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Model(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt_time(t: Option<f64>) -> String {
    t.map(|t| format!("{t:.3}")).unwrap_or_default()
}

/// `k,time_sec,obj_mw`
pub fn budget_table_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "time_sec", "obj_mw"])?;
    for r in rows {
        w.write_record([r.k.to_string(), opt_time(r.time_sec), r.obj_mw.to_string()])?;
    }
    finish(w)
}

/// `k,z_mw,eev_mw,vss_mw,vss_pct,vss_pct_base`
pub fn vss_table_csv(rows: &[VssReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "z_mw", "eev_mw", "vss_mw", "vss_pct", "vss_pct_base"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.z.to_string(),
            r.eev.to_string(),
            r.vss.to_string(),
            r.vss_pct.to_string(),
            r.vss_pct_base.to_string(),
        ])?;
    }
    finish(w)
}

/// `k,n_scenarios,time_sec,obj_mw`, one row per grid cell.
pub fn grid_table_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "n_scenarios", "time_sec", "obj_mw"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.n_scenarios.to_string(),
            opt_time(r.time_sec),
            r.obj_mw.to_string(),
        ])?;
    }
    finish(w)
}

/// `batch,size,value_mw,plan`, then the summary as trailing rows.
pub fn saa_table_csv(r: &SaaReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["batch", "size", "value_mw", "plan"])?;
    for (i, ((size, v), p)) in r
        .batch_sizes
        .iter()
        .zip(&r.batch_values)
        .zip(&r.batch_plans)
        .enumerate()
    {
        w.write_record([i.to_string(), size.to_string(), v.to_string(), p.sorted_ids().join(";")])?;
    }
    w.write_record(["mean", "", &r.mean.to_string(), ""])?;
    w.write_record(["ci95_halfwidth", "", &r.ci95_halfwidth.to_string(), ""])?;
    w.write_record([
        "full_set_best",
        &r.batch_sizes.iter().sum::<usize>().to_string(),
        &r.full_set_value_of_best.to_string(),
        &r.best_plan_overall.sorted_ids().join(";"),
    ])?;
    finish(w)
}
