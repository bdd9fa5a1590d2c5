//! Cutting-plane heuristic: alternate an attacker master problem over
//! per-scenario cuts with exact inner load-shed solves at the master's plan.
//!
//! Cuts are flow-based and not valid for every plan (removing a line can
//! raise deliverable load), so `z_ub` is a heuristic bound only. `z_lb` is
//! always the exactly evaluated value of a real plan.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::{combinations, is_tie, plan_count, sorted_components};
use crate::error::{Error, Result};
use crate::inner::{solve_scenarios, DispatchSolution, InterdictionPlan};
use crate::lp::{LinearProgram, Sense, INF};
use crate::milp::{solve_milp, MipOptions, MixedIntegerProgram};
use crate::netmodel::{Component, Network};
use crate::scenario::{Scenario, ScenarioSet};

/// `η_s ≤ constant + Σ α_l x_l + Σ β_g y_g` for one scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cut {
    pub scenario: String,
    /// Iteration whose plan generated the cut.
    pub iteration: usize,
    pub constant: f64,
    pub line_coeff: BTreeMap<String, f64>,
    pub gen_coeff: BTreeMap<String, f64>,
}

impl Cut {
    /// Right-hand side of the cut at `plan`.
    pub fn value_at(&self, plan: &InterdictionPlan) -> f64 {
        let lines: f64 = plan
            .attacked_lines
            .iter()
            .filter_map(|id| self.line_coeff.get(id))
            .sum();
        let gens: f64 = plan
            .attacked_gens
            .iter()
            .filter_map(|id| self.gen_coeff.get(id))
            .sum();
        self.constant + lines + gens
    }
}

/// Coefficients are |flow| on lines and output on generators that are up in
/// the scenario and not attacked, zero otherwise.
pub fn make_cut(
    net: &Network,
    sc: &Scenario,
    plan: &InterdictionPlan,
    disp: &DispatchSolution,
    iteration: usize,
) -> Cut {
    let (line_avail, gen_avail) = sc.availability(net);
    let line_coeff = net
        .lines()
        .iter()
        .enumerate()
        .map(|(l, line)| {
            let live = line_avail[l] && !plan.attacked_lines.contains(&line.id);
            let a = if live { disp.flow_mw[l].abs() } else { 0.0 };
            (line.id.clone(), a)
        })
        .collect();
    let gen_coeff = net
        .generators()
        .iter()
        .enumerate()
        .map(|(g, gen)| {
            let live = gen_avail[g] && !plan.attacked_gens.contains(&gen.id);
            let b = if live { disp.gen_mw[g].max(0.0) } else { 0.0 };
            (gen.id.clone(), b)
        })
        .collect();
    Cut {
        scenario: sc.id.clone(),
        iteration,
        constant: disp.shed_total_mw,
        line_coeff,
        gen_coeff,
    }
}

/// Master MILP: binaries `x_{l}`, `y_{g}`, `eta_{s}` in `[0, D_tot]`, the
/// budget row, and one row per cut. `weights` follow scenario order and
/// `scenario_ids` map cuts to their `eta`.
pub fn build_master(
    net: &Network,
    k: usize,
    cuts: &[Cut],
    scenario_ids: &[String],
    weights: &[f64],
) -> Result<MixedIntegerProgram> {
    if scenario_ids.len() != weights.len() {
        return Err(Error::Model("scenario ids and weights differ in length".into()));
    }
    let mut mip = MixedIntegerProgram::new(LinearProgram::new("master", Sense::Maximize));
    let x: Vec<usize> = (0..net.lines().len())
        .map(|l| mip.add_binary(format!("x_{l}")))
        .collect();
    let y: Vec<usize> = (0..net.generators().len())
        .map(|g| mip.add_binary(format!("y_{g}")))
        .collect();
    let budget: Vec<(usize, f64)> = x.iter().chain(&y).map(|&j| (j, 1.0)).collect();
    mip.base.add_constraint("budget", budget, -INF, k as f64);
    let d = net.total_demand();
    let lp = &mut mip.base;
    let eta: Vec<usize> = weights
        .iter()
        .enumerate()
        .map(|(s, &w)| {
            let e = lp.add_var(format!("eta_{s}"), 0.0, d);
            lp.add_objective_term(e, w);
            e
        })
        .collect();
    let mut count = vec![0usize; eta.len()];
    for cut in cuts {
        let s = scenario_ids
            .iter()
            .position(|id| *id == cut.scenario)
            .ok_or_else(|| Error::Model(format!("cut for unknown scenario {:?}", cut.scenario)))?;
        let mut row = vec![(eta[s], 1.0)];
        for (l, line) in net.lines().iter().enumerate() {
            match cut.line_coeff.get(&line.id) {
                Some(&a) if a != 0.0 => row.push((x[l], -a)),
                _ => {}
            }
        }
        for (g, gen) in net.generators().iter().enumerate() {
            match cut.gen_coeff.get(&gen.id) {
                Some(&b) if b != 0.0 => row.push((y[g], -b)),
                _ => {}
            }
        }
        lp.add_constraint(format!("cut_{s}_{}", count[s]), row, -INF, cut.constant);
        count[s] += 1;
    }
    Ok(mip)
}

/// How the master problem is solved. Both give the same optimum; `Auto`
/// enumerates plans when there are at most `ENUM_MASTER_LIMIT` of them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MasterMethod {
    #[default]
    Auto,
    Milp,
    Enumerate,
}

pub const ENUM_MASTER_LIMIT: u128 = 200_000;

#[derive(Clone, Debug)]
pub struct CutplaneOptions {
    pub eps: f64,
    pub iter_limit: usize,
    pub init_plan: InterdictionPlan,
    pub master: MasterMethod,
    pub mip: MipOptions,
}

impl Default for CutplaneOptions {
    fn default() -> Self {
        Self {
            eps: 1e-4,
            iter_limit: 200,
            init_plan: InterdictionPlan::empty(),
            master: MasterMethod::Auto,
            mip: MipOptions {
                rel_gap: 1e-9,
                ..MipOptions::default()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutplaneStatus {
    Converged,
    IterationLimit,
    /// The master proposed an already visited plan without moving `z_ub`.
    RepeatedPlan,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Plan evaluated in this iteration and its expected shed.
    pub plan: InterdictionPlan,
    pub plan_value: f64,
    pub z_lb: f64,
    /// Master objective of this iteration.
    pub z_ub: f64,
    pub z_ub_min: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutplaneResult {
    /// Best evaluated plan, worth `z_lb`.
    pub plan: InterdictionPlan,
    pub z_lb: f64,
    pub z_ub: f64,
    pub z_ub_min: f64,
    pub status: CutplaneStatus,
    pub iterations: usize,
    /// Shed per scenario under `plan`, in scenario order.
    pub scenario_shed_mw: Vec<f64>,
    /// Expected shed per bus under `plan`.
    pub bus_shed_mw: Vec<f64>,
    pub history: Vec<IterationRecord>,
    #[serde(skip)]
    pub cuts: Vec<Cut>,
}

struct Master<'a> {
    net: &'a Network,
    k: usize,
    ids: Vec<String>,
    weights: Vec<f64>,
    cuts: Vec<Cut>,
    /// Per scenario: (constant, coefficient by component position).
    dense: Vec<Vec<(f64, Vec<f64>)>>,
    comps: Vec<Component>,
    method: MasterMethod,
}

impl<'a> Master<'a> {
    fn new(net: &'a Network, ss: &ScenarioSet, k: usize, method: MasterMethod) -> Self {
        let n = net.num_components();
        let method = match method {
            MasterMethod::Auto if plan_count(n, k, false) <= ENUM_MASTER_LIMIT => MasterMethod::Enumerate,
            MasterMethod::Auto => MasterMethod::Milp,
            m => m,
        };
        Self {
            net,
            k,
            ids: ss.scenarios.iter().map(|s| s.id.clone()).collect(),
            weights: ss.scenarios.iter().map(|s| s.weight).collect(),
            cuts: Vec::new(),
            dense: vec![Vec::new(); ss.len()],
            comps: sorted_components(net),
            method,
        }
    }

    fn add(&mut self, s: usize, cut: Cut) {
        let coeffs = self
            .comps
            .iter()
            .map(|&c| match c {
                Component::Line(l) => cut.line_coeff.get(&self.net.lines()[l].id).copied(),
                Component::Gen(g) => cut.gen_coeff.get(&self.net.generators()[g].id).copied(),
            }
            .unwrap_or(0.0))
            .collect();
        self.dense[s].push((cut.constant, coeffs));
        self.cuts.push(cut);
    }

    fn solve(&self, mip_opts: &MipOptions) -> Result<(f64, InterdictionPlan)> {
        match self.method {
            MasterMethod::Milp => self.solve_milp(mip_opts),
            _ => Ok(self.solve_enumerate()),
        }
    }

    fn solve_milp(&self, opts: &MipOptions) -> Result<(f64, InterdictionPlan)> {
        let mip = build_master(self.net, self.k, &self.cuts, &self.ids, &self.weights)?;
        let sol = solve_milp(&mip, opts)?;
        let values = match (&sol.incumbent, sol.is_solved()) {
            (Some(v), true) => v,
            _ => {
                return Err(Error::Solver(format!(
                    "master problem ended with status {:?}",
                    sol.status
                )))
            }
        };
        let chosen: Vec<Component> = self
            .net
            .components()
            .enumerate()
            .filter(|&(j, _)| values[j] > 0.5)
            .map(|(_, c)| c)
            .collect();
        Ok((sol.objective, InterdictionPlan::from_components(self.net, &chosen)))
    }

    fn value(&self, idx: &[usize]) -> f64 {
        let d = self.net.total_demand();
        self.dense
            .iter()
            .zip(&self.weights)
            .map(|(cuts, w)| {
                let eta = cuts
                    .iter()
                    .map(|(c, a)| c + idx.iter().map(|&i| a[i]).sum::<f64>())
                    .fold(d, f64::min);
                w * eta
            })
            .sum()
    }

    fn solve_enumerate(&self) -> (f64, InterdictionPlan) {
        let combos = combinations(self.comps.len(), 0, self.k);
        let values: Vec<f64> = combos.par_iter().map(|idx| self.value(idx)).collect();
        let key = |idx: &[usize]| -> Vec<&str> {
            idx.iter().map(|&i| self.net.component_id(self.comps[i])).collect()
        };
        let mut best = 0;
        for i in 1..combos.len() {
            let better = if is_tie(values[i], values[best]) {
                key(&combos[i]) < key(&combos[best])
            } else {
                values[i] > values[best]
            };
            if better {
                best = i;
            }
        }
        let chosen: Vec<Component> = combos[best].iter().map(|&i| self.comps[i]).collect();
        (values[best], InterdictionPlan::from_components(self.net, &chosen))
    }
}

fn weighted(ss: &ScenarioSet, sols: &[DispatchSolution]) -> f64 {
    ss.scenarios
        .iter()
        .zip(sols)
        .map(|(sc, d)| sc.weight * d.shed_total_mw)
        .sum()
}

pub fn run_cutting_plane(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    opts: &CutplaneOptions,
) -> Result<CutplaneResult> {
    if ss.is_empty() {
        return Err(Error::Model("scenario set is empty".into()));
    }
    if !(opts.eps > 0.0) {
        return Err(Error::Model(format!("eps must be positive, got {}", opts.eps)));
    }
    opts.init_plan.validate(net, Some(k))?;
    let start = Instant::now();
    let mut master = Master::new(net, ss, k, opts.master);
    let mut plan = opts.init_plan.clone();
    let mut best: Option<(f64, InterdictionPlan, Vec<DispatchSolution>)> = None;
    let mut z_ub_min = f64::INFINITY;
    let mut visited: BTreeSet<InterdictionPlan> = BTreeSet::new();
    let mut history: Vec<IterationRecord> = Vec::new();
    let mut status = CutplaneStatus::IterationLimit;

    for iter in 1..=opts.iter_limit {
        let sols = solve_scenarios(net, ss, &plan)?;
        let value = weighted(ss, &sols);
        for (s, (sc, disp)) in ss.scenarios.iter().zip(&sols).enumerate() {
            master.add(s, make_cut(net, sc, &plan, disp, iter));
        }
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, plan.clone(), sols));
        }
        visited.insert(plan.clone());
        let z_lb = best.as_ref().map_or(0.0, |b| b.0);

        let (z_ub, next) = master.solve(&opts.mip)?;
        let prev_ub = history.last().map(|r| r.z_ub);
        z_ub_min = z_ub_min.min(z_ub);
        history.push(IterationRecord {
            iter,
            plan: plan.clone(),
            plan_value: value,
            z_lb,
            z_ub,
            z_ub_min,
            wall_ms: Some(start.elapsed().as_millis() as u64),
        });
        log::debug!("cutplane iter {iter}: z_lb {z_lb:.6} z_ub {z_ub:.6} next {next}");
        if z_ub - z_lb <= opts.eps * z_lb.abs() || z_ub <= z_lb {
            status = CutplaneStatus::Converged;
            break;
        }
        if visited.contains(&next) && prev_ub.is_some_and(|u| is_tie(u, z_ub)) {
            status = CutplaneStatus::RepeatedPlan;
            break;
        }
        plan = next;
    }

    let (z_lb, plan, sols) = best.expect("at least one iteration runs");
    let last = history.last().expect("history is non-empty");
    let mut bus_shed_mw = vec![0.0; net.buses().len()];
    for (sc, d) in ss.scenarios.iter().zip(&sols) {
        for (b, bus) in net.buses().iter().enumerate() {
            bus_shed_mw[b] += sc.weight * d.shed_frac[b] * bus.demand_mw;
        }
    }
    Ok(CutplaneResult {
        z_ub: last.z_ub,
        z_ub_min: last.z_ub_min,
        iterations: history.len(),
        scenario_shed_mw: sols.iter().map(|d| d.shed_total_mw).collect(),
        bus_shed_mw,
        plan,
        z_lb,
        status,
        history,
        cuts: master.cuts,
    })
}

#[derive(Serialize)]
struct TraceLine<'a> {
    iter: usize,
    z_lb: f64,
    z_ub: f64,
    z_ub_min: f64,
    plan: Vec<&'a str>,
    plan_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<u64>,
}

/// One JSON object per iteration. `deterministic` drops wall-clock times so
/// reruns are byte-identical.
pub fn trace_jsonl(history: &[IterationRecord], deterministic: bool) -> String {
    let mut out = String::new();
    for r in history {
        let line = TraceLine {
            iter: r.iter,
            z_lb: r.z_lb,
            z_ub: r.z_ub,
            z_ub_min: r.z_ub_min,
            plan: r.plan.sorted_ids(),
            plan_value: r.plan_value,
            wall_ms: if deterministic { None } else { r.wall_ms },
        };
        let _ = writeln!(out, "{}", serde_json::to_string(&line).expect("trace serializes"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_exact, EnumerateOptions};
    use crate::inner::solve_inner;
    use crate::netmodel::parse_network_json;

    fn t3() -> Network {
        parse_network_json(include_str!("../data/t3.json")).unwrap()
    }

    fn t3_two() -> ScenarioSet {
        let mut s2 = Scenario::nominal("s2", 0.5);
        s2.off_lines.insert("l13".into());
        ScenarioSet::new(vec![Scenario::nominal("s1", 0.5), s2])
    }

    #[test]
    fn cut_coefficients_follow_dispatch() {
        let net = t3();
        let sc = Scenario::nominal("s1", 1.0);
        let plan = InterdictionPlan::empty();
        let disp = solve_inner(&net, &sc, &plan).unwrap();
        let cut = make_cut(&net, &sc, &plan, &disp, 1);
        assert!((cut.constant - 10.0).abs() < 1e-7);
        assert!((cut.line_coeff["l13"] - 60.0).abs() < 1e-7);
        assert!((cut.line_coeff["l12"] - 30.0).abs() < 1e-7);
        assert!((cut.line_coeff["l23"] - 30.0).abs() < 1e-7);
        assert!((cut.gen_coeff["g1"] - 90.0).abs() < 1e-7);

        // Off and attacked components get zero.
        let mut sc2 = Scenario::nominal("s2", 1.0);
        sc2.off_lines.insert("l13".into());
        let plan = InterdictionPlan::from_components(&net, &[Component::Line(0)]);
        let disp = solve_inner(&net, &sc2, &plan).unwrap();
        let cut = make_cut(&net, &sc2, &plan, &disp, 1);
        assert_eq!(cut.line_coeff["l13"], 0.0);
        assert_eq!(cut.line_coeff[&net.lines()[0].id], 0.0);
        assert!((cut.value_at(&plan) - disp.shed_total_mw).abs() < 1e-12);
    }

    #[test]
    fn empty_master_hits_the_demand_cap() {
        let net = t3();
        let mip = build_master(&net, 0, &[], &["s1".into()], &[1.0]).unwrap();
        let sol = solve_milp(&mip, &MipOptions::default()).unwrap();
        assert!((sol.objective - 100.0).abs() < 1e-9);
    }

    #[test]
    fn master_at_least_the_generating_plan_value() {
        let net = t3();
        let ss = t3_two();
        let mut m = Master::new(&net, &ss, 1, MasterMethod::Milp);
        let sols = solve_scenarios(&net, &ss, &InterdictionPlan::empty()).unwrap();
        for (s, (sc, d)) in ss.scenarios.iter().zip(&sols).enumerate() {
            m.add(s, make_cut(&net, sc, &InterdictionPlan::empty(), d, 1));
        }
        let (v, plan) = m.solve(&CutplaneOptions::default().mip).unwrap();
        assert!(v >= weighted(&ss, &sols) - 1e-9);
        m.method = MasterMethod::Enumerate;
        let (v2, plan2) = m.solve(&MipOptions::default()).unwrap();
        assert!((v - v2).abs() < 1e-7);
        assert_eq!(plan, plan2);
    }

    #[test]
    fn t3_two_iterations_by_hand() {
        // Iteration 1 at ∅: η ≤ 10 + 60 x13 + 30 x12 + 30 x23 + 90 y1, so the
        // master picks g1 with 100. Iteration 2 confirms 100.
        let net = t3();
        let ss = ScenarioSet::nominal();
        let r = run_cutting_plane(&net, &ss, 1, &CutplaneOptions::default()).unwrap();
        assert_eq!(r.status, CutplaneStatus::Converged);
        assert_eq!(r.iterations, 2);
        assert!((r.history[0].z_ub - 100.0).abs() < 1e-7);
        assert!((r.history[0].z_lb - 10.0).abs() < 1e-7);
        assert_eq!(r.plan.sorted_ids(), vec!["g1"]);
        assert!((r.z_lb - 100.0).abs() < 1e-7);
        assert!((r.history[1].z_ub - 100.0).abs() < 1e-7);
    }

    #[test]
    fn matches_enumeration_on_t3_two_scenarios() {
        let net = t3();
        let ss = t3_two();
        let exact = enumerate_exact(&net, &ss, 1, &EnumerateOptions::default()).unwrap();
        let r = run_cutting_plane(&net, &ss, 1, &CutplaneOptions::default()).unwrap();
        assert!(r.z_lb <= exact.best_value + 1e-6);
        assert!((r.z_lb - exact.best_value).abs() < 1e-6);
        assert!(r.z_lb <= r.z_ub + 1e-9);
    }

    #[test]
    fn k0_returns_the_empty_plan() {
        let r = run_cutting_plane(&t3(), &ScenarioSet::nominal(), 0, &CutplaneOptions::default()).unwrap();
        assert!(r.plan.is_empty());
        assert!((r.z_lb - 10.0).abs() < 1e-7);
    }

    #[test]
    fn all_generators_budget_converges_fast() {
        let net = parse_network_json(
            r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"b","demand_mw":70}],
            "generators":[{"id":"g1","bus":"b","pmax_mw":50},{"id":"g2","bus":"b","pmax_mw":50}]}"#,
        )
        .unwrap();
        let r = run_cutting_plane(&net, &ScenarioSet::nominal(), 2, &CutplaneOptions::default()).unwrap();
        assert!(r.iterations <= 2);
        assert!((r.z_lb - 70.0).abs() < 1e-9);
    }

    #[test]
    fn huge_eps_stops_after_first_master() {
        let opts = CutplaneOptions {
            eps: 1e6,
            ..Default::default()
        };
        let r = run_cutting_plane(&t3(), &ScenarioSet::nominal(), 1, &opts).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.status, CutplaneStatus::Converged);
    }

    #[test]
    fn trace_is_reproducible_when_deterministic() {
        let net = t3();
        let ss = t3_two();
        let a = run_cutting_plane(&net, &ss, 1, &CutplaneOptions::default()).unwrap();
        let b = run_cutting_plane(&net, &ss, 1, &CutplaneOptions::default()).unwrap();
        let ta = trace_jsonl(&a.history, true);
        assert_eq!(ta, trace_jsonl(&b.history, true));
        assert!(!ta.contains("wall_ms"));
        assert!(trace_jsonl(&a.history, false).contains("wall_ms"));
        assert_eq!(ta.lines().count(), a.iterations);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let opts = CutplaneOptions {
            iter_limit: 1,
            ..Default::default()
        };
        let r = run_cutting_plane(&t3(), &ScenarioSet::nominal(), 1, &opts).unwrap();
        assert_eq!(r.status, CutplaneStatus::IterationLimit);
        assert!(r.plan.is_empty());
    }
}
