//! Exact reformulation: the LP dual of the load-shed problem, and the
//! single-level MILP obtained by equating each scenario's shed with its
//! dual objective and linearizing the binary × dual products.
//!
//! Dual variables of one scenario block (all in objective MW per MW):
//!
//! * `pi` balance multiplier, free
//! * `phi` generator capacity, `gp`/`gm` flow limits, `dp`/`dm` Ohm's-law
//!   rows, `om` shed cap, `rp`/`rm` angle box; all nonnegative
//!
//! Rows: one per line (flow column), one per non-reference bus (angle
//! column), one per generator (`pi + phi >= 0`, an inequality because
//! `pg >= 0`) and one per bus (shed column).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::{EffectiveStatus, InterdictionPlan};
use crate::lp::{LinearProgram, LpEngine, LpOptions, LpStatus, Sense, INF};
use crate::milp::{solve_milp, MipOptions, MipStatus, MixedIntegerProgram};
use crate::netmodel::Network;
use crate::scenario::{Scenario, ScenarioSet};

pub use crate::modelio::{export_model, import_model, ModelFormat};

/// Column indices of one scenario's dual variables.
#[derive(Clone, Debug, Default)]
pub struct DualBlock {
    pub pi: Vec<usize>,
    pub phi: Vec<usize>,
    pub gp: Vec<usize>,
    pub gm: Vec<usize>,
    pub dp: Vec<usize>,
    pub dm: Vec<usize>,
    pub om: Vec<usize>,
    pub rp: Vec<Option<usize>>,
    pub rm: Vec<Option<usize>>,
}

/// Adds the dual variables and rows of one scenario to `lp`. Names carry
/// `tag` so several blocks can share a model.
fn add_dual_block(lp: &mut LinearProgram, net: &Network, tag: &str) -> DualBlock {
    let base = net.base_mva();
    let nb = net.buses().len();
    let ng = net.generators().len();
    let nl = net.lines().len();
    let mut blk = DualBlock::default();
    for b in 0..nb {
        blk.pi.push(lp.add_var(format!("pi{tag}_{b}"), -INF, INF));
    }
    for g in 0..ng {
        blk.phi.push(lp.add_var(format!("phi{tag}_{g}"), 0.0, INF));
    }
    for l in 0..nl {
        blk.gp.push(lp.add_var(format!("gp{tag}_{l}"), 0.0, INF));
        blk.gm.push(lp.add_var(format!("gm{tag}_{l}"), 0.0, INF));
        blk.dp.push(lp.add_var(format!("dp{tag}_{l}"), 0.0, INF));
        blk.dm.push(lp.add_var(format!("dm{tag}_{l}"), 0.0, INF));
    }
    for b in 0..nb {
        blk.om.push(lp.add_var(format!("om{tag}_{b}"), 0.0, INF));
    }
    for b in 0..nb {
        if net.is_reference(b) {
            blk.rp.push(None);
            blk.rm.push(None);
        } else {
            blk.rp.push(Some(lp.add_var(format!("rp{tag}_{b}"), 0.0, INF)));
            blk.rm.push(Some(lp.add_var(format!("rm{tag}_{b}"), 0.0, INF)));
        }
    }

    for l in 0..nl {
        let (f, t) = net.line_ends(l);
        lp.add_constraint(
            format!("cflow{tag}_{l}"),
            vec![
                (blk.pi[f], 1.0),
                (blk.pi[t], -1.0),
                (blk.gp[l], 1.0),
                (blk.gm[l], -1.0),
                (blk.dp[l], 1.0),
                (blk.dm[l], -1.0),
            ],
            0.0,
            0.0,
        );
    }
    let mut ang: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nb];
    for (l, line) in net.lines().iter().enumerate() {
        let (f, t) = net.line_ends(l);
        let k = base * line.susceptance;
        ang[f].extend([(blk.dp[l], k), (blk.dm[l], -k)]);
        ang[t].extend([(blk.dp[l], -k), (blk.dm[l], k)]);
    }
    for (b, mut coeffs) in ang.into_iter().enumerate() {
        if let (Some(rp), Some(rm)) = (blk.rp[b], blk.rm[b]) {
            coeffs.extend([(rp, 1.0), (rm, -1.0)]);
            lp.add_constraint(format!("cang{tag}_{b}"), coeffs, 0.0, 0.0);
        }
    }
    for g in 0..ng {
        lp.add_constraint(
            format!("cgen{tag}_{g}"),
            vec![(blk.pi[net.gen_bus(g)], 1.0), (blk.phi[g], 1.0)],
            0.0,
            INF,
        );
    }
    for (b, bus) in net.buses().iter().enumerate() {
        let d = bus.demand_mw;
        let mut coeffs = vec![(blk.om[b], -1.0)];
        if d != 0.0 {
            coeffs.insert(0, (blk.pi[b], -d));
        }
        lp.add_constraint(format!("cshed{tag}_{b}"), coeffs, -INF, d);
    }
    blk
}

/// Objective terms that do not depend on the attack: `−Σ d π − Σ ω − A Σ ρ`.
fn fixed_terms(net: &Network, blk: &DualBlock) -> Vec<(usize, f64)> {
    let a = net.angle_bound_rad();
    let mut t = Vec::new();
    for (b, bus) in net.buses().iter().enumerate() {
        if bus.demand_mw != 0.0 {
            t.push((blk.pi[b], -bus.demand_mw));
        }
        t.push((blk.om[b], -1.0));
        if let (Some(rp), Some(rm)) = (blk.rp[b], blk.rm[b]) {
            t.extend([(rp, -a), (rm, -a)]);
        }
    }
    t
}

/// Objective terms for a fixed effective status.
fn status_terms(net: &Network, blk: &DualBlock, st: &EffectiveStatus) -> Vec<(usize, f64)> {
    let mut t = fixed_terms(net, blk);
    for (g, gen) in net.generators().iter().enumerate() {
        if st.gen_on[g] && gen.pmax_mw != 0.0 {
            t.push((blk.phi[g], -gen.pmax_mw));
        }
    }
    for l in 0..net.lines().len() {
        if st.line_on[l] {
            let c = net.line_capacity_mw(l);
            t.extend([(blk.gp[l], -c), (blk.gm[l], -c)]);
        } else {
            let m = net.ohm_big_m(l);
            t.extend([(blk.dp[l], -m), (blk.dm[l], -m)]);
        }
    }
    t
}

#[derive(Clone, Debug)]
pub struct DualModel {
    pub lp: LinearProgram,
    pub block: DualBlock,
}

pub fn build_dual_lp(net: &Network, sc: &Scenario, plan: &InterdictionPlan) -> DualModel {
    let st = EffectiveStatus::new(net, sc, plan);
    let mut lp = LinearProgram::new("dls", Sense::Maximize);
    let block = add_dual_block(&mut lp, net, "");
    for (j, c) in status_terms(net, &block, &st) {
        lp.add_objective_term(j, c);
    }
    DualModel { lp, block }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualBoundPolicy {
    #[default]
    FixedCap,
    ProbeLp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    FixedCap,
    Probe,
    /// The probe LP was unbounded; the fixed cap is used instead.
    ProbeFallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub lo: f64,
    pub hi: f64,
    pub source: BoundSource,
}

/// Intervals for dual variables, keyed by their single-level model names
/// (`phi{s}_{g}`, `gp{s}_{l}`, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualBounds {
    pub policy: DualBoundPolicy,
    pub total_demand: f64,
    pub entries: BTreeMap<String, BoundEntry>,
}

impl DualBounds {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.get(name)
    }

    pub fn hi(&self, name: &str) -> f64 {
        self.entries.get(name).map_or(self.total_demand, |e| e.hi)
    }

    pub fn fallbacks(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, e)| e.source == BoundSource::ProbeFallback)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

fn scenario_tag(s: usize) -> String {
    format!("_{s}")
}

/// Maximizes each nonnegative multiplier of a scenario over its dual rows
/// and `V >= 0`, where `V` is the dual objective with every attack-dependent
/// term at its most favourable value. Any plan's optimal dual has value
/// `η >= 0` and value at most `V`, so it lies in this region and the probe
/// bounds are valid for all plans. `None` marks an unbounded probe.
fn probe_scenario(net: &Network, sc: &Scenario, s: usize) -> Vec<(String, Option<f64>)> {
    let (line_avail, _) = sc.availability(net);
    let mut lp = LinearProgram::new("probe", Sense::Maximize);
    let blk = add_dual_block(&mut lp, net, &scenario_tag(s));
    let mut v = fixed_terms(net, &blk);
    for (l, &on) in line_avail.iter().enumerate() {
        if !on {
            let m = net.ohm_big_m(l);
            v.extend([(blk.dp[l], -m), (blk.dm[l], -m)]);
        }
    }
    lp.add_constraint("optimistic_value", v, 0.0, INF);
    let mut targets: Vec<usize> = blk.phi.clone();
    for l in 0..net.lines().len() {
        targets.extend([blk.gp[l], blk.gm[l], blk.dp[l], blk.dm[l]]);
    }
    targets.extend(&blk.om);
    targets
        .into_iter()
        .map(|j| {
            let mut probe = lp.clone();
            probe.objective.coeffs = vec![(j, 1.0)];
            let sol = LpEngine::new(&probe).solve(&LpOptions::default(), None);
            let v = (sol.status == LpStatus::Optimal).then(|| sol.objective.max(0.0));
            (probe.variables[j].name.clone(), v)
        })
        .collect()
}

pub fn compute_dual_bounds(
    net: &Network,
    ss: &ScenarioSet,
    policy: DualBoundPolicy,
) -> Result<DualBounds> {
    let dtot = net.total_demand();
    if !dtot.is_finite() {
        return Err(Error::Model("total demand is not finite".into()));
    }
    let fixed = |lo: f64| BoundEntry {
        lo,
        hi: dtot,
        source: BoundSource::FixedCap,
    };
    let mut entries = BTreeMap::new();
    for s in 0..ss.len() {
        let tag = scenario_tag(s);
        for b in 0..net.buses().len() {
            entries.insert(format!("pi{tag}_{b}"), fixed(-dtot));
            entries.insert(format!("om{tag}_{b}"), fixed(0.0));
        }
        for g in 0..net.generators().len() {
            entries.insert(format!("phi{tag}_{g}"), fixed(0.0));
        }
        for l in 0..net.lines().len() {
            for fam in ["gp", "gm", "dp", "dm"] {
                entries.insert(format!("{fam}{tag}_{l}"), fixed(0.0));
            }
        }
    }
    if policy == DualBoundPolicy::ProbeLp {
        let probed: Vec<Vec<(String, Option<f64>)>> = ss
            .scenarios
            .par_iter()
            .enumerate()
            .map(|(s, sc)| probe_scenario(net, sc, s))
            .collect();
        for (name, v) in probed.into_iter().flatten() {
            let e = entries.get_mut(&name).expect("probe targets are bounded families");
            match v {
                Some(hi) => {
                    e.hi = hi;
                    e.source = BoundSource::Probe;
                }
                None => e.source = BoundSource::ProbeFallback,
            }
        }
    }
    if let Some((k, _)) = entries.iter().find(|(_, e)| !(e.lo.is_finite() && e.hi.is_finite())) {
        return Err(Error::Model(format!("dual bound for `{k}` is not finite")));
    }
    Ok(DualBounds {
        policy,
        total_demand: dtot,
        entries,
    })
}

/// A linearized product `sigma = binary * Σ mu` with `Σ mu ∈ [0, upper]`.
#[derive(Clone, Debug)]
pub struct Product {
    pub sigma: usize,
    pub binary: usize,
    pub mu: Vec<usize>,
    pub upper: f64,
}

#[derive(Clone, Debug)]
pub struct SingleLevelModel {
    pub mip: MixedIntegerProgram,
    pub bounds: DualBounds,
    /// Line attack binaries, by line position.
    pub x: Vec<usize>,
    /// Generator attack binaries, by generator position.
    pub y: Vec<usize>,
    pub eta: Vec<usize>,
    pub blocks: Vec<DualBlock>,
    pub products: Vec<Product>,
}

impl SingleLevelModel {
    pub fn plan_from(&self, net: &Network, values: &[f64]) -> InterdictionPlan {
        let mut plan = InterdictionPlan::empty();
        for (l, &j) in self.x.iter().enumerate() {
            if values[j] > 0.5 {
                plan.attacked_lines.insert(net.lines()[l].id.clone());
            }
        }
        for (g, &j) in self.y.iter().enumerate() {
            if values[j] > 0.5 {
                plan.attacked_gens.insert(net.generators()[g].id.clone());
            }
        }
        plan
    }

    /// Largest `|sigma − B·Σμ|` over all products at `values`.
    pub fn mccormick_residual(&self, values: &[f64]) -> f64 {
        self.products
            .iter()
            .map(|p| {
                let mu: f64 = p.mu.iter().map(|&j| values[j]).sum();
                (values[p.sigma] - values[p.binary] * mu).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Products whose multiplier sum sits at its McCormick upper bound.
    pub fn binding_bounds(&self, values: &[f64], tol: f64) -> Vec<String> {
        self.products
            .iter()
            .filter(|p| {
                let mu: f64 = p.mu.iter().map(|&j| values[j]).sum();
                mu > tol && p.upper - mu <= tol * p.upper.max(1.0)
            })
            .map(|p| self.mip.base.variables[p.sigma].name.clone())
            .collect()
    }
}

pub fn build_single_level_milp(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    policy: DualBoundPolicy,
) -> Result<SingleLevelModel> {
    let bounds = compute_dual_bounds(net, ss, policy)?;
    build_single_level_with_bounds(net, ss, k, bounds)
}

pub fn build_single_level_with_bounds(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    bounds: DualBounds,
) -> Result<SingleLevelModel> {
    if ss.is_empty() {
        return Err(Error::Model("scenario set is empty".into()));
    }
    let mut mip = MixedIntegerProgram::new(LinearProgram::new("single_level", Sense::Maximize));
    let x: Vec<usize> = (0..net.lines().len())
        .map(|l| mip.add_binary(format!("x_{l}")))
        .collect();
    let y: Vec<usize> = (0..net.generators().len())
        .map(|g| mip.add_binary(format!("y_{g}")))
        .collect();
    let mut budget: Vec<(usize, f64)> = x.iter().chain(&y).map(|&j| (j, 1.0)).collect();
    budget.sort_unstable_by_key(|&(j, _)| j);
    mip.base.add_constraint("budget", budget, -INF, k as f64);

    let mut eta = Vec::with_capacity(ss.len());
    let mut blocks = Vec::with_capacity(ss.len());
    let mut products = Vec::new();
    for (s, sc) in ss.scenarios.iter().enumerate() {
        let tag = scenario_tag(s);
        let e = mip.base.add_var(format!("eta{tag}"), -INF, INF);
        mip.base.add_objective_term(e, sc.weight);
        eta.push(e);
        let lp = &mut mip.base;
        let blk = add_dual_block(lp, net, &tag);
        let (line_avail, gen_avail) = sc.availability(net);
        let mut link: Vec<(usize, f64)> = vec![(e, 1.0)];
        let minus = |terms: &[(usize, f64)], link: &mut Vec<(usize, f64)>| {
            link.extend(terms.iter().map(|&(j, c)| (j, -c)));
        };
        minus(&fixed_terms(net, &blk), &mut link);

        let mut add_product = |lp: &mut LinearProgram,
                               name: String,
                               binary: usize,
                               mu: Vec<usize>,
                               upper: f64|
         -> usize {
            let sigma = lp.add_var(name.clone(), 0.0, upper);
            lp.add_constraint(format!("{name}_a"), vec![(sigma, 1.0), (binary, -upper)], -INF, 0.0);
            let mut row = vec![(sigma, 1.0)];
            row.extend(mu.iter().map(|&j| (j, -1.0)));
            lp.add_constraint(format!("{name}_b"), row.clone(), -INF, 0.0);
            row.push((binary, -upper));
            lp.add_constraint(format!("{name}_c"), row, -upper, INF);
            products.push(Product {
                sigma,
                binary,
                mu,
                upper,
            });
            sigma
        };

        for (g, gen) in net.generators().iter().enumerate() {
            if !gen_avail[g] || gen.pmax_mw == 0.0 {
                continue;
            }
            let p = gen.pmax_mw;
            let u = bounds.hi(&lp.variables[blk.phi[g]].name);
            let sigma = add_product(lp, format!("sy{tag}_{g}"), y[g], vec![blk.phi[g]], u);
            minus(&[(blk.phi[g], -p), (sigma, p)], &mut link);
        }
        for l in 0..net.lines().len() {
            let m = net.ohm_big_m(l);
            if !line_avail[l] {
                minus(&[(blk.dp[l], -m), (blk.dm[l], -m)], &mut link);
                continue;
            }
            let t = net.line_capacity_mw(l);
            let name = |j: usize, lp: &LinearProgram| lp.variables[j].name.clone();
            let ug = bounds.hi(&name(blk.gp[l], lp)) + bounds.hi(&name(blk.gm[l], lp));
            let sg = add_product(lp, format!("sg{tag}_{l}"), x[l], vec![blk.gp[l], blk.gm[l]], ug);
            let ud = bounds.hi(&name(blk.dp[l], lp)) + bounds.hi(&name(blk.dm[l], lp));
            let sd = add_product(lp, format!("sd{tag}_{l}"), x[l], vec![blk.dp[l], blk.dm[l]], ud);
            minus(
                &[(blk.gp[l], -t), (blk.gm[l], -t), (sg, t), (sd, -m)],
                &mut link,
            );
        }
        lp.add_constraint(format!("link{tag}"), link, 0.0, 0.0);
        blocks.push(blk);
    }
    Ok(SingleLevelModel {
        mip,
        bounds,
        x,
        y,
        eta,
        blocks,
        products,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleLevelResult {
    pub plan: InterdictionPlan,
    pub objective: f64,
    pub bound: f64,
    pub status: MipStatus,
    pub nodes: usize,
    pub mccormick_residual: f64,
    /// Products at their McCormick bound in the optimum.
    pub binding_bounds: Vec<String>,
}

/// Builds and solves the single-level MILP. A warning is logged when a
/// multiplier sits at its assumed bound, since the optimum may then be
/// understated.
pub fn solve_single_level(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    policy: DualBoundPolicy,
    opts: &MipOptions,
) -> Result<SingleLevelResult> {
    let model = build_single_level_milp(net, ss, k, policy)?;
    let sol = solve_milp(&model.mip, opts)?;
    let Some(values) = sol.incumbent.as_ref() else {
        return Err(Error::Solver(format!(
            "single-level model ended with status {:?} and no incumbent",
            sol.status
        )));
    };
    let binding = model.binding_bounds(values, 1e-6);
    if !binding.is_empty() {
        log::warn!(
            "{} dual multiplier(s) at their assumed bound (first: {}); cross-check with enumeration",
            binding.len(),
            binding[0]
        );
    }
    Ok(SingleLevelResult {
        plan: model.plan_from(net, values),
        objective: sol.objective,
        bound: sol.bound,
        status: sol.status,
        nodes: sol.nodes,
        mccormick_residual: model.mccormick_residual(values),
        binding_bounds: binding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::solve_inner;
    use crate::lp::solve_lp;
    use crate::netmodel::parse_network_json;

    fn t3() -> Network {
        parse_network_json(include_str!("../data/t3.json")).unwrap()
    }

    fn dual_value(net: &Network, sc: &Scenario, plan: &InterdictionPlan) -> f64 {
        let dm = build_dual_lp(net, sc, plan);
        let sol = solve_lp(&dm.lp, &LpOptions::default()).unwrap();
        assert!(sol.is_optimal(), "{:?}", sol.status);
        sol.objective
    }

    #[test]
    fn dual_matches_primal_on_t3() {
        let net = t3();
        let sc = Scenario::nominal("s", 1.0);
        for plan in [
            InterdictionPlan::empty(),
            InterdictionPlan {
                attacked_lines: ["l13".to_string()].into(),
                ..Default::default()
            },
            InterdictionPlan {
                attacked_gens: ["g1".to_string()].into(),
                ..Default::default()
            },
        ] {
            let p = solve_inner(&net, &sc, &plan).unwrap().shed_total_mw;
            let d = dual_value(&net, &sc, &plan);
            assert!((p - d).abs() < 1e-6, "{plan}: {p} vs {d}");
        }
    }

    #[test]
    fn dual_row_count() {
        let net = t3();
        let dm = build_dual_lp(&net, &Scenario::nominal("s", 1.0), &InterdictionPlan::empty());
        let (nl, nb, ng) = (3, 3, 1);
        let refs = net.reference_buses().len();
        assert_eq!(dm.lp.num_constraints(), nl + (nb - refs) + ng + nb);
    }

    #[test]
    fn fixed_cap_intervals() {
        let net = t3();
        let b = compute_dual_bounds(&net, &ScenarioSet::nominal(), DualBoundPolicy::FixedCap).unwrap();
        let om = b.get("om_0_2").unwrap();
        assert_eq!((om.lo, om.hi), (0.0, 100.0));
        let pi = b.get("pi_0_0").unwrap();
        assert_eq!((pi.lo, pi.hi), (-100.0, 100.0));
    }

    #[test]
    fn probe_bounds_off_line_multiplier() {
        // With l13 out in the scenario, its Ohm's-law multipliers cost M
        // each in every plan, and the dual value cannot exceed the 100 MW
        // demand, so dp <= 100 / M.
        let net = t3();
        let mut sc = Scenario::nominal("s", 1.0);
        sc.off_lines.insert("l13".into());
        let ss = ScenarioSet::new(vec![sc]);
        let b = compute_dual_bounds(&net, &ss, DualBoundPolicy::ProbeLp).unwrap();
        let l = net.line_index("l13").unwrap();
        let e = b.get(&format!("dp_0_{l}")).unwrap();
        assert_eq!(e.source, BoundSource::Probe);
        assert!((e.hi - 100.0 / net.ohm_big_m(l)).abs() < 1e-9, "{}", e.hi);
        assert!(e.hi < b.total_demand);
        // Generator multipliers lose their cost when the generator is
        // attacked, so the probe cannot bound them.
        assert_eq!(b.get("phi_0_0").unwrap().source, BoundSource::ProbeFallback);
        assert_eq!(b.get("phi_0_0").unwrap().hi, 100.0);
    }

    #[test]
    fn single_scenario_k0_is_no_attack_shed() {
        let net = t3();
        let r = solve_single_level(&net, &ScenarioSet::nominal(), 0, DualBoundPolicy::FixedCap, &MipOptions::default())
            .unwrap();
        assert!((r.objective - 10.0).abs() < 1e-6, "{}", r.objective);
        assert!(r.plan.is_empty());
    }

    #[test]
    fn large_budget_kills_supply() {
        let net = t3();
        let r = solve_single_level(&net, &ScenarioSet::nominal(), 4, DualBoundPolicy::FixedCap, &MipOptions::default())
            .unwrap();
        assert!((r.objective - 100.0).abs() < 1e-6, "{}", r.objective);
        assert!(r.mccormick_residual < 1e-6);
    }

    #[test]
    fn zero_demand_network() {
        let net = parse_network_json(
            r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"a","demand_mw":0},{"id":"b","demand_mw":0}],
            "generators":[{"id":"g","bus":"a","pmax_mw":10}],
            "lines":[{"id":"l","from":"a","to":"b","susceptance":5,"thermal_mw":10}]}"#,
        )
        .unwrap();
        let b = compute_dual_bounds(&net, &ScenarioSet::nominal(), DualBoundPolicy::FixedCap).unwrap();
        assert!(b.entries.values().all(|e| e.lo == 0.0 && e.hi == 0.0));
        let r = solve_single_level(&net, &ScenarioSet::nominal(), 1, DualBoundPolicy::FixedCap, &MipOptions::default())
            .unwrap();
        assert!(r.objective.abs() < 1e-9);
    }
}
