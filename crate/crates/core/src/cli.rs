//! Command-line front end. Every run resolves its settings into a
//! [`RunConfig`] (config file first, flags on top) and records it in
//! `manifest.json` next to the outputs.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 solver failure,
//! 3 evaluation cap exceeded.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    budget_table_csv, compute_vss, saa_batches, saa_table_csv, vss_table_csv, Method, SolveSettings,
    SummaryRow,
};
use crate::cutplane::{run_cutting_plane, trace_jsonl};
use crate::enumerate::{enumerate_exact, plan_table_csv};
use crate::error::{Error, Result};
use crate::inner::{solve_scenarios, InterdictionPlan};
use crate::modelio::{export_model, ModelFormat};
use crate::netmodel::{attach_coordinates_csv, load_network, with_spectral_coordinates, Network};
use crate::scenario::{generate_scenarios, load_scenarios, normalize, GenerationParams, ScenarioSet};
use crate::singlelevel::{build_single_level_milp, solve_single_level, DualBoundPolicy};

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Solver(_) => EXIT_SOLVER,
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_CONFIG,
    }
}

#[derive(Parser, Debug)]
#[command(name = "nk-interdict", version, about = "Stochastic N-k interdiction on DC power grids")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel solves (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Omit wall-clock times from outputs so reruns are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Input {
    /// Network file: native JSON, or a MATPOWER case when it ends in `.m`.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Bus coordinates CSV (`id,lat,lon`).
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Lay out buses without coordinates from the network graph.
    #[arg(long)]
    spectral_coords: bool,
    /// Scenario file.
    #[arg(long)]
    scenarios: Option<PathBuf>,
    /// Generate scenarios from the generation flags.
    #[arg(long)]
    generate: bool,
    /// Use the single no-outage scenario.
    #[arg(long)]
    nominal: bool,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    cluster_index: Option<usize>,
    /// Number of generated scenarios.
    #[arg(long)]
    count: Option<usize>,
    /// Outages per scenario as `LO-HI`.
    #[arg(long, value_parser = parse_range)]
    outages: Option<(usize, usize)>,
    #[arg(long)]
    bernoulli_p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find an attack plan.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(short, long, value_delimiter = ',')]
        k: Vec<usize>,
        /// cutplane, enumerate, milp or milp-export.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        iter_limit: Option<usize>,
        #[arg(long)]
        eval_cap: Option<u64>,
        /// fixed_cap or probe_lp.
        #[arg(long)]
        dual_bounds: Option<String>,
        /// Also write every enumerated plan's value.
        #[arg(long)]
        plan_table: bool,
    },
    /// Generate a scenario file.
    Scenarios {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write the single-level MILP as MPS or LP text.
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(short, long, value_delimiter = ',')]
        k: Vec<usize>,
        /// mps or lp.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dual_bounds: Option<String>,
    },
    /// Value of the stochastic solution for each budget.
    Vss {
        #[command(flatten)]
        input: Input,
        #[arg(short, long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        eval_cap: Option<u64>,
    },
    /// Sample-average batches with a confidence interval.
    Saa {
        #[command(flatten)]
        input: Input,
        #[arg(short, long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long)]
        batches: Option<usize>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        eval_cap: Option<u64>,
    },
    /// Check inputs and model construction without solving.
    Validate {
        #[command(flatten)]
        input: Input,
        #[arg(short, long, value_delimiter = ',')]
        k: Vec<usize>,
    },
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(['-', ','])
        .ok_or_else(|| format!("expected LO-HI, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(lo)?, p(hi)?))
}

/// Every setting a run can take. Unset fields fall back to defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: Option<PathBuf>,
    pub coords: Option<PathBuf>,
    pub spectral_coords: Option<bool>,
    pub scenarios: Option<PathBuf>,
    pub generate: Option<bool>,
    pub nominal: Option<bool>,
    pub clusters: Option<usize>,
    pub cluster_index: Option<usize>,
    pub count: Option<usize>,
    pub outages: Option<(usize, usize)>,
    pub bernoulli_p: Option<f64>,
    pub seed: Option<u64>,
    pub k: Option<Vec<usize>>,
    pub method: Option<String>,
    pub eps: Option<f64>,
    pub iter_limit: Option<usize>,
    pub eval_cap: Option<u64>,
    pub dual_bounds: Option<DualBoundPolicy>,
    pub plan_table: Option<bool>,
    pub format: Option<String>,
    pub batches: Option<usize>,
    pub threads: Option<usize>,
    pub deterministic: Option<bool>,
    pub output_dir: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Fields set in `over` win.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            network, coords, spectral_coords, scenarios, generate, nominal, clusters, cluster_index,
            count, outages, bernoulli_p, seed, k, method, eps, iter_limit, eval_cap, dual_bounds,
            plan_table, format, batches, threads, deterministic, output_dir, output
        )
    }

    fn network_path(&self) -> Result<&Path> {
        self.network
            .as_deref()
            .ok_or_else(|| Error::Model("no network given (use --network)".into()))
    }

    fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    fn budgets(&self) -> Result<Vec<usize>> {
        match self.k.as_deref() {
            Some(ks) if !ks.is_empty() => Ok(ks.to_vec()),
            _ => Err(Error::Model("no attack budget given (use -k)".into())),
        }
    }

    fn single_budget(&self) -> Result<usize> {
        match self.budgets()?.as_slice() {
            [k] => Ok(*k),
            ks => Err(Error::Model(format!("expected one budget, got {ks:?}"))),
        }
    }

    fn method(&self, default: Method) -> Result<Method> {
        self.method.as_deref().map_or(Ok(default), str::parse)
    }

    fn generation(&self) -> GenerationParams {
        let d = GenerationParams::default();
        GenerationParams {
            n_clusters: self.clusters.unwrap_or(d.n_clusters),
            cluster_index: self.cluster_index.unwrap_or(d.cluster_index),
            n_scenarios: self.count.unwrap_or(d.n_scenarios),
            outage_range: self.outages.unwrap_or(d.outage_range),
            bernoulli_p: self.bernoulli_p.or(d.bernoulli_p),
            seed: self.seed.unwrap_or(d.seed),
        }
    }

    fn settings(&self) -> SolveSettings {
        let mut s = SolveSettings::default();
        if let Some(cap) = self.eval_cap {
            s.enumerate.eval_cap = cap as u128;
        }
        s.enumerate.keep_table = self.plan_table.unwrap_or(false);
        if let Some(eps) = self.eps {
            s.cutplane.eps = eps;
        }
        if let Some(n) = self.iter_limit {
            s.cutplane.iter_limit = n;
        }
        s.dual_bounds = self.dual_bounds.unwrap_or_default();
        s
    }

    fn deterministic(&self) -> bool {
        self.deterministic.unwrap_or(false)
    }
}

fn parse_policy(s: &str) -> Result<DualBoundPolicy> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| Error::Model(format!("unknown dual bound policy {s:?}")))
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

fn input_config(i: Input) -> RunConfig {
    RunConfig {
        network: i.network,
        coords: i.coords,
        spectral_coords: flag(i.spectral_coords),
        scenarios: i.scenarios,
        generate: flag(i.generate),
        nominal: flag(i.nominal),
        clusters: i.clusters,
        cluster_index: i.cluster_index,
        count: i.count,
        outages: i.outages,
        bernoulli_p: i.bernoulli_p,
        seed: i.seed,
        output_dir: i.output_dir,
        ..RunConfig::default()
    }
}

fn nonempty(k: Vec<usize>) -> Option<Vec<usize>> {
    (!k.is_empty()).then_some(k)
}

/// Subcommand name and its flags as a config overlay.
fn command_config(cmd: Command) -> Result<(&'static str, RunConfig)> {
    Ok(match cmd {
        Command::Solve {
            input,
            k,
            method,
            eps,
            iter_limit,
            eval_cap,
            dual_bounds,
            plan_table,
        } => (
            "solve",
            RunConfig {
                k: nonempty(k),
                method,
                eps,
                iter_limit,
                eval_cap,
                dual_bounds: dual_bounds.as_deref().map(parse_policy).transpose()?,
                plan_table: flag(plan_table),
                ..input_config(input)
            },
        ),
        Command::Scenarios { input, output } => (
            "scenarios",
            RunConfig {
                output,
                ..input_config(input)
            },
        ),
        Command::Export {
            input,
            k,
            format,
            output,
            dual_bounds,
        } => (
            "export",
            RunConfig {
                k: nonempty(k),
                format,
                output,
                dual_bounds: dual_bounds.as_deref().map(parse_policy).transpose()?,
                ..input_config(input)
            },
        ),
        Command::Vss {
            input,
            k,
            method,
            eval_cap,
        } => (
            "vss",
            RunConfig {
                k: nonempty(k),
                method,
                eval_cap,
                ..input_config(input)
            },
        ),
        Command::Saa {
            input,
            k,
            batches,
            method,
            eval_cap,
        } => (
            "saa",
            RunConfig {
                k: nonempty(k),
                batches,
                method,
                eval_cap,
                ..input_config(input)
            },
        ),
        Command::Validate { input, k } => (
            "validate",
            RunConfig {
                k: nonempty(k),
                ..input_config(input)
            },
        ),
    })
}

fn read_network(cfg: &RunConfig) -> Result<Network> {
    let mut net = load_network(cfg.network_path()?)?;
    if let Some(path) = &cfg.coords {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        net = attach_coordinates_csv(&net, &text)?;
    }
    if cfg.spectral_coords.unwrap_or(false) && !net.has_all_coords() {
        net = with_spectral_coordinates(&net)?;
    }
    Ok(net)
}

fn read_scenarios(cfg: &RunConfig, net: &Network, generate_by_default: bool) -> Result<ScenarioSet> {
    let generate = cfg.generate.unwrap_or(generate_by_default);
    let nominal = cfg.nominal.unwrap_or(false);
    let sources = [cfg.scenarios.is_some(), generate, nominal];
    match sources.iter().filter(|&&b| b).count() {
        1 => {}
        0 => {
            return Err(Error::Model(
                "no scenario source (use --scenarios, --generate or --nominal)".into(),
            ))
        }
        _ => {
            return Err(Error::Model(
                "more than one scenario source among --scenarios, --generate and --nominal".into(),
            ))
        }
    }
    let ss = if let Some(path) = &cfg.scenarios {
        load_scenarios(path, net)?
    } else if generate {
        generate_scenarios(net, &cfg.generation())?
    } else {
        ScenarioSet::nominal()
    };
    normalize(&ss)
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    outputs: &'a [String],
    /// Resolved parameters, defaults included, when scenarios were generated.
    #[serde(skip_serializing_if = "Option::is_none")]
    generation: Option<GenerationParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_sec: Option<f64>,
}

fn write_manifest(out: &mut Outputs, command: &str, cfg: &RunConfig, start: Instant) -> Result<()> {
    let mut outputs = out.written.clone();
    outputs.push("manifest.json".into());
    let generated = cfg.scenarios.is_none()
        && !cfg.nominal.unwrap_or(false)
        && cfg.generate.unwrap_or(command == "scenarios");
    let m = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        outputs: &outputs,
        generation: generated.then(|| cfg.generation()),
        wall_time_sec: (!cfg.deterministic()).then(|| start.elapsed().as_secs_f64()),
    };
    out.write("manifest.json", &to_json(&m))
}

#[derive(Serialize)]
struct ScenarioShed<'a> {
    id: &'a str,
    weight: f64,
    shed_mw: f64,
}

#[derive(Serialize)]
struct SolutionFile<'a> {
    method: &'a str,
    k: usize,
    plan: Vec<&'a str>,
    z_lb: f64,
    z_ub: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_ub_min: Option<f64>,
    status: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluated: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    binding_bounds: Option<Vec<String>>,
    expected_shed_mw: f64,
    scenario_shed_mw: Vec<ScenarioShed<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    time_sec: Option<f64>,
}

fn bus_shed_csv(net: &Network, ss: &ScenarioSet, plan: &InterdictionPlan) -> Result<(String, Vec<f64>)> {
    let sols = solve_scenarios(net, ss, plan)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bus", "demand_mw", "expected_shed_mw"])?;
    for (b, bus) in net.buses().iter().enumerate() {
        let shed: f64 = ss
            .scenarios
            .iter()
            .zip(&sols)
            .map(|(sc, d)| sc.weight * d.shed_frac[b] * bus.demand_mw)
            .sum();
        w.write_record([bus.id.clone(), bus.demand_mw.to_string(), shed.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Model(e.to_string()))?;
    let sheds = sols.iter().map(|d| d.shed_total_mw).collect();
    Ok((String::from_utf8(bytes).expect("csv output is utf-8"), sheds))
}

fn cmd_solve(cfg: &RunConfig, start: Instant) -> Result<()> {
    let net = read_network(cfg)?;
    let ss = read_scenarios(cfg, &net, false)?;
    let k = cfg.single_budget()?;
    let mut out = Outputs::new(cfg.output_dir())?;
    let method_name = cfg.method.clone().unwrap_or_else(|| "cutplane".into());
    if method_name == "milp-export" {
        let model = build_single_level_milp(&net, &ss, k, cfg.dual_bounds.unwrap_or_default())?;
        out.write("model.mps", &export_model(&model.mip, ModelFormat::Mps)?)?;
        out.write("model.lp", &export_model(&model.mip, ModelFormat::LpText)?)?;
        return write_manifest(&mut out, "solve", cfg, start);
    }
    let method: Method = method_name.parse()?;
    let settings = cfg.settings();
    let t0 = Instant::now();
    let mut sol = SolutionFile {
        method: &method_name,
        k,
        plan: Vec::new(),
        z_lb: 0.0,
        z_ub: 0.0,
        z_ub_min: None,
        status: serde_json::Value::Null,
        iterations: None,
        evaluated: None,
        binding_bounds: None,
        expected_shed_mw: 0.0,
        scenario_shed_mw: Vec::new(),
        time_sec: None,
    };
    let plan = match method {
        Method::Cutplane => {
            let r = run_cutting_plane(&net, &ss, k, &settings.cutplane)?;
            out.write("trace.jsonl", &trace_jsonl(&r.history, cfg.deterministic()))?;
            sol.z_lb = r.z_lb;
            sol.z_ub = r.z_ub;
            sol.z_ub_min = Some(r.z_ub_min);
            sol.status = serde_json::to_value(r.status)?;
            sol.iterations = Some(r.iterations);
            r.plan
        }
        Method::Enumeration => {
            let r = enumerate_exact(&net, &ss, k, &settings.enumerate)?;
            if let Some(table) = &r.per_plan_values {
                out.write("plans.csv", &plan_table_csv(table)?)?;
            }
            sol.z_lb = r.best_value;
            sol.z_ub = r.best_value;
            sol.status = "optimal".into();
            sol.evaluated = Some(r.evaluated);
            r.best_plan
        }
        Method::Milp => {
            let r = solve_single_level(&net, &ss, k, settings.dual_bounds, &settings.mip)?;
            sol.z_ub = r.bound;
            sol.status = serde_json::to_value(r.status)?;
            sol.binding_bounds = Some(r.binding_bounds);
            r.plan
        }
    };
    let elapsed = t0.elapsed().as_secs_f64();
    let (bus_csv, sheds) = bus_shed_csv(&net, &ss, &plan)?;
    let expected: f64 = ss.scenarios.iter().zip(&sheds).map(|(s, v)| s.weight * v).sum();
    if method == Method::Milp {
        sol.z_lb = expected;
    }
    sol.expected_shed_mw = expected;
    sol.plan = plan.sorted_ids();
    sol.scenario_shed_mw = ss
        .scenarios
        .iter()
        .zip(&sheds)
        .map(|(s, &v)| ScenarioShed {
            id: &s.id,
            weight: s.weight,
            shed_mw: v,
        })
        .collect();
    sol.time_sec = (!cfg.deterministic()).then_some(elapsed);
    out.write("solution.json", &to_json(&sol))?;
    out.write("bus_shed.csv", &bus_csv)?;
    let row = SummaryRow {
        k,
        n_scenarios: ss.len(),
        time_sec: sol.time_sec,
        obj_mw: sol.z_lb,
        plan: plan.clone(),
    };
    out.write("summary.csv", &budget_table_csv(&[row])?)?;
    println!("plan {plan}  z_lb {:.6}  z_ub {:.6}", sol.z_lb, sol.z_ub);
    write_manifest(&mut out, "solve", cfg, start)
}

fn cmd_scenarios(cfg: &RunConfig, start: Instant) -> Result<()> {
    let net = read_network(cfg)?;
    let ss = read_scenarios(cfg, &net, true)?;
    let mut out = Outputs::new(cfg.output_dir())?;
    match &cfg.output {
        Some(path) => {
            write_file(path, &ss.to_json())?;
            out.written.push(path.display().to_string());
        }
        None => out.write("scenarios.json", &ss.to_json())?,
    }
    println!("{} scenarios", ss.len());
    write_manifest(&mut out, "scenarios", cfg, start)
}

fn cmd_export(cfg: &RunConfig, start: Instant) -> Result<()> {
    let net = read_network(cfg)?;
    let ss = read_scenarios(cfg, &net, false)?;
    let k = cfg.single_budget()?;
    let format: ModelFormat = cfg.format.as_deref().unwrap_or("mps").parse()?;
    let model = build_single_level_milp(&net, &ss, k, cfg.dual_bounds.unwrap_or_default())?;
    for name in model.bounds.fallbacks() {
        log::warn!("dual bound for {name} fell back to the total-demand cap");
    }
    let text = export_model(&model.mip, format)?;
    let mut out = Outputs::new(cfg.output_dir())?;
    match &cfg.output {
        Some(path) => {
            write_file(path, &text)?;
            out.written.push(path.display().to_string());
        }
        None => {
            let ext = match format {
                ModelFormat::Mps => "mps",
                ModelFormat::LpText => "lp",
            };
            out.write(&format!("model.{ext}"), &text)?;
        }
    }
    write_manifest(&mut out, "export", cfg, start)
}

fn cmd_vss(cfg: &RunConfig, start: Instant) -> Result<()> {
    let net = read_network(cfg)?;
    let ss = read_scenarios(cfg, &net, false)?;
    let method = cfg.method(Method::Enumeration)?;
    let settings = cfg.settings();
    let reports = cfg
        .budgets()?
        .into_iter()
        .map(|k| compute_vss(&net, &ss, k, method, &settings))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outputs::new(cfg.output_dir())?;
    out.write("vss.json", &to_json(&reports))?;
    out.write("vss.csv", &vss_table_csv(&reports)?)?;
    for r in &reports {
        println!("k {}  z {:.6}  eev {:.6}  vss {:.6}", r.k, r.z, r.eev, r.vss);
    }
    write_manifest(&mut out, "vss", cfg, start)
}

fn cmd_saa(cfg: &RunConfig, start: Instant) -> Result<()> {
    let net = read_network(cfg)?;
    let ss = read_scenarios(cfg, &net, false)?;
    let method = cfg.method(Method::Cutplane)?;
    let k = cfg.single_budget()?;
    let batches = cfg.batches.unwrap_or(4);
    let r = saa_batches(&net, &ss, k, batches, method, cfg.seed.unwrap_or(0), &cfg.settings())?;
    let mut out = Outputs::new(cfg.output_dir())?;
    out.write("saa.json", &to_json(&r))?;
    out.write("saa.csv", &saa_table_csv(&r)?)?;
    println!(
        "mean {:.6} ± {:.6}  best {} worth {:.6}",
        r.mean, r.ci95_halfwidth, r.best_plan_overall, r.full_set_value_of_best
    );
    write_manifest(&mut out, "saa", cfg, start)
}

#[derive(Serialize)]
struct ValidationReport {
    buses: usize,
    lines: usize,
    generators: usize,
    total_demand_mw: f64,
    has_coords: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenarios: Option<usize>,
    models: Vec<ModelSize>,
}

#[derive(Serialize)]
struct ModelSize {
    k: usize,
    variables: usize,
    constraints: usize,
    binaries: usize,
    bound_fallbacks: usize,
}

fn cmd_validate(cfg: &RunConfig) -> Result<()> {
    let net = read_network(cfg)?;
    let has_source = cfg.scenarios.is_some() || cfg.generate.unwrap_or(false) || cfg.nominal.unwrap_or(false);
    let ss = if has_source {
        Some(read_scenarios(cfg, &net, false)?)
    } else {
        None
    };
    let mut models = Vec::new();
    if let (Some(ss), Some(ks)) = (&ss, &cfg.k) {
        for &k in ks {
            let m = build_single_level_milp(&net, ss, k, cfg.dual_bounds.unwrap_or_default())?;
            m.mip.validate()?;
            models.push(ModelSize {
                k,
                variables: m.mip.base.num_vars(),
                constraints: m.mip.base.num_constraints(),
                binaries: m.mip.binaries.len(),
                bound_fallbacks: m.bounds.fallbacks().len(),
            });
        }
    }
    let report = ValidationReport {
        buses: net.buses().len(),
        lines: net.lines().len(),
        generators: net.generators().len(),
        total_demand_mw: net.total_demand(),
        has_coords: net.has_all_coords(),
        scenarios: ss.as_ref().map(ScenarioSet::len),
        models,
    };
    print!("{}", to_json(&report));
    Ok(())
}

fn dispatch(command: &str, cfg: &RunConfig, start: Instant) -> Result<()> {
    match command {
        "solve" => cmd_solve(cfg, start),
        "scenarios" => cmd_scenarios(cfg, start),
        "export" => cmd_export(cfg, start),
        "vss" => cmd_vss(cfg, start),
        "saa" => cmd_saa(cfg, start),
        _ => cmd_validate(cfg),
    }
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    let start = Instant::now();
    let result = (|| {
        let base = match &cli.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        let (command, flags) = command_config(cli.command)?;
        let global = RunConfig {
            threads: cli.threads,
            deterministic: flag(cli.deterministic),
            ..RunConfig::default()
        };
        let cfg = base.overlay(flags).overlay(global);
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cfg.threads {
            pool = pool.num_threads(n);
        }
        let pool = pool
            .build()
            .map_err(|e| Error::Model(format!("thread pool: {e}")))?;
        pool.install(|| dispatch(command, &cfg, start))
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
