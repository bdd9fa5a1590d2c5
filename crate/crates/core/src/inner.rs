//! The defender's per-scenario minimum load-shed LP under DC power flow,
//! solved for a fixed attack plan.
//!
//! Variables per bus `b`: shed fraction `ℓ_b ∈ [0,1]` and angle `θ_b`;
//! per generator: output `pg`; per line: flow `p` in MW. Rows:
//!
//! * balance at every bus: `Σ pg + d_b ℓ_b − Σ_{to=b} p + Σ_{from=b} p = d_b`
//! * Ohm's law on every line: `p + base·b·(θ_from − θ_to) ∈ [−M u, M u]`
//!   where `u = 1` when the line is unavailable.
//!
//! Generator and flow limits are variable bounds, zero for unavailable
//! components. A line's flow bound also carries its angle-difference limit,
//! since on an in-service line `|θ_i − θ_j| ≤ Θ` is the same as
//! `|p| ≤ base·|b|·Θ`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpEngine, LpOptions, LpSolution, LpStatus, Sense};
use crate::netmodel::{Component, Network};
use crate::scenario::{Scenario, ScenarioSet};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterdictionPlan {
    #[serde(default)]
    pub attacked_lines: BTreeSet<String>,
    #[serde(default)]
    pub attacked_gens: BTreeSet<String>,
}

impl InterdictionPlan {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_components(net: &Network, comps: &[Component]) -> Self {
        let mut plan = Self::default();
        for &c in comps {
            match c {
                Component::Line(l) => {
                    plan.attacked_lines.insert(net.lines()[l].id.clone());
                }
                Component::Gen(g) => {
                    plan.attacked_gens.insert(net.generators()[g].id.clone());
                }
            }
        }
        plan
    }

    pub fn size(&self) -> usize {
        self.attacked_lines.len() + self.attacked_gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    /// All attacked component ids, sorted. Plans compare lexicographically
    /// on this key when breaking ties.
    pub fn sorted_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self
            .attacked_lines
            .iter()
            .chain(&self.attacked_gens)
            .map(String::as_str)
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn validate(&self, net: &Network, budget: Option<usize>) -> Result<()> {
        for id in &self.attacked_lines {
            if net.line_index(id).is_none() {
                return Err(Error::invariant("plan", id, "unknown line"));
            }
        }
        for id in &self.attacked_gens {
            if net.gen_index(id).is_none() {
                return Err(Error::invariant("plan", id, "unknown generator"));
            }
        }
        if let Some(k) = budget {
            if self.size() > k {
                return Err(Error::Model(format!(
                    "plan attacks {} components, budget is {k}",
                    self.size()
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for InterdictionPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids = self.sorted_ids();
        if ids.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{{{}}}", ids.join(","))
        }
    }
}

/// Which components are usable: available in the scenario and not attacked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveStatus {
    pub line_on: Vec<bool>,
    pub gen_on: Vec<bool>,
}

impl EffectiveStatus {
    pub fn new(net: &Network, sc: &Scenario, plan: &InterdictionPlan) -> Self {
        let (mut line_on, mut gen_on) = sc.availability(net);
        for id in &plan.attacked_lines {
            if let Some(l) = net.line_index(id) {
                line_on[l] = false;
            }
        }
        for id in &plan.attacked_gens {
            if let Some(g) = net.gen_index(id) {
                gen_on[g] = false;
            }
        }
        Self { line_on, gen_on }
    }
}

/// Column positions of the inner LP.
#[derive(Clone, Copy, Debug)]
pub struct InnerLayout {
    pub n_bus: usize,
    pub n_gen: usize,
    pub n_line: usize,
}

impl InnerLayout {
    pub fn of(net: &Network) -> Self {
        Self {
            n_bus: net.buses().len(),
            n_gen: net.generators().len(),
            n_line: net.lines().len(),
        }
    }
    pub fn shed(&self, b: usize) -> usize {
        b
    }
    pub fn pg(&self, g: usize) -> usize {
        self.n_bus + g
    }
    pub fn flow(&self, l: usize) -> usize {
        self.n_bus + self.n_gen + l
    }
    pub fn theta(&self, b: usize) -> usize {
        self.n_bus + self.n_gen + self.n_line + b
    }
    pub fn balance_row(&self, b: usize) -> usize {
        b
    }
    pub fn ohm_row(&self, l: usize) -> usize {
        self.n_bus + l
    }
}

pub fn build_inner_lp(net: &Network, sc: &Scenario, plan: &InterdictionPlan) -> LinearProgram {
    build_inner_lp_with(net, &EffectiveStatus::new(net, sc, plan))
}

pub fn build_inner_lp_with(net: &Network, st: &EffectiveStatus) -> LinearProgram {
    let lay = InnerLayout::of(net);
    let base = net.base_mva();
    let a = net.angle_bound_rad();
    let mut lp = LinearProgram::new("pls", Sense::Minimize);
    for (b, bus) in net.buses().iter().enumerate() {
        let j = lp.add_var(format!("shed_{b}"), 0.0, 1.0);
        lp.add_objective_term(j, bus.demand_mw);
    }
    for (g, gen) in net.generators().iter().enumerate() {
        let cap = if st.gen_on[g] { gen.pmax_mw } else { 0.0 };
        lp.add_var(format!("pg_{g}"), 0.0, cap);
    }
    for l in 0..lay.n_line {
        let cap = if st.line_on[l] { net.line_capacity_mw(l) } else { 0.0 };
        lp.add_var(format!("p_{l}"), -cap, cap);
    }
    for b in 0..lay.n_bus {
        let r = if net.is_reference(b) { 0.0 } else { a };
        lp.add_var(format!("theta_{b}"), -r, r);
    }

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lay.n_bus];
    for (b, bus) in net.buses().iter().enumerate() {
        if bus.demand_mw != 0.0 {
            rows[b].push((lay.shed(b), bus.demand_mw));
        }
    }
    for g in 0..lay.n_gen {
        rows[net.gen_bus(g)].push((lay.pg(g), 1.0));
    }
    for l in 0..lay.n_line {
        let (from, to) = net.line_ends(l);
        rows[from].push((lay.flow(l), 1.0));
        rows[to].push((lay.flow(l), -1.0));
    }
    for (b, coeffs) in rows.into_iter().enumerate() {
        let d = net.buses()[b].demand_mw;
        lp.add_constraint(format!("bal_{b}"), coeffs, d, d);
    }
    for (l, line) in net.lines().iter().enumerate() {
        let (from, to) = net.line_ends(l);
        let k = base * line.susceptance;
        let slack = if st.line_on[l] { 0.0 } else { net.ohm_big_m(l) };
        lp.add_constraint(
            format!("ohm_{l}"),
            vec![(lay.flow(l), 1.0), (lay.theta(from), k), (lay.theta(to), -k)],
            -slack,
            slack,
        );
    }
    lp
}

/// Multipliers of the load-shed LP, named after its dual: `balance` (π,
/// free), `gen_cap` (φ), `flow_cap_hi`/`flow_cap_lo` (γ±), `ohm_hi`/`ohm_lo`
/// (δ±), `shed_cap` (ω) and `angle_hi`/`angle_lo` for the angle box.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InnerDuals {
    pub balance: Vec<f64>,
    pub gen_cap: Vec<f64>,
    pub flow_cap_hi: Vec<f64>,
    pub flow_cap_lo: Vec<f64>,
    pub ohm_hi: Vec<f64>,
    pub ohm_lo: Vec<f64>,
    pub shed_cap: Vec<f64>,
    pub angle_hi: Vec<f64>,
    pub angle_lo: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DispatchSolution {
    pub shed_total_mw: f64,
    pub shed_frac: Vec<f64>,
    pub gen_mw: Vec<f64>,
    pub flow_mw: Vec<f64>,
    pub angle_rad: Vec<f64>,
    pub duals: InnerDuals,
    /// Dual objective evaluated at `duals`.
    pub dual_value: f64,
    pub iterations: usize,
}

fn split(v: f64) -> (f64, f64) {
    (v.max(0.0), (-v).max(0.0))
}

fn extract(net: &Network, st: &EffectiveStatus, sol: &LpSolution) -> DispatchSolution {
    let lay = InnerLayout::of(net);
    let x = &sol.primal;
    let rc = &sol.reduced_costs;
    let y = &sol.dual;
    let shed_frac: Vec<f64> = (0..lay.n_bus).map(|b| x[lay.shed(b)]).collect();
    let gen_mw: Vec<f64> = (0..lay.n_gen).map(|g| x[lay.pg(g)]).collect();
    let flow_mw: Vec<f64> = (0..lay.n_line).map(|l| x[lay.flow(l)]).collect();
    let angle_rad: Vec<f64> = (0..lay.n_bus).map(|b| x[lay.theta(b)]).collect();
    let shed_total_mw = net
        .buses()
        .iter()
        .zip(&shed_frac)
        .map(|(bus, l)| bus.demand_mw * l)
        .sum::<f64>()
        .max(0.0);

    // Sensitivities of a minimization: an upper bound's multiplier is the
    // negated reduced cost, a lower bound's is the reduced cost.
    let mut d = InnerDuals {
        balance: (0..lay.n_bus).map(|b| -y[lay.balance_row(b)]).collect(),
        shed_cap: (0..lay.n_bus).map(|b| split(-rc[lay.shed(b)]).0).collect(),
        gen_cap: (0..lay.n_gen).map(|g| split(-rc[lay.pg(g)]).0).collect(),
        ..InnerDuals::default()
    };
    for l in 0..lay.n_line {
        let (hi, lo) = split(-rc[lay.flow(l)]);
        d.flow_cap_hi.push(hi);
        d.flow_cap_lo.push(lo);
        let (hi, lo) = split(-y[lay.ohm_row(l)]);
        d.ohm_hi.push(hi);
        d.ohm_lo.push(lo);
    }
    for b in 0..lay.n_bus {
        let (hi, lo) = if net.is_reference(b) {
            (0.0, 0.0)
        } else {
            split(-rc[lay.theta(b)])
        };
        d.angle_hi.push(hi);
        d.angle_lo.push(lo);
    }
    let dual_value = dual_objective(net, st, &d);
    DispatchSolution {
        shed_total_mw,
        shed_frac,
        gen_mw,
        flow_mw,
        angle_rad,
        duals: d,
        dual_value,
        iterations: sol.iterations,
    }
}

/// `−Σ d π − Σ ω − Σ P φ − Σ t (γ⁺ + γ⁻) − Σ M u (δ⁺ + δ⁻) − A Σ (ρ⁺ + ρ⁻)`
/// with capacities zeroed on unavailable components.
pub fn dual_objective(net: &Network, st: &EffectiveStatus, d: &InnerDuals) -> f64 {
    let a = net.angle_bound_rad();
    let mut v = 0.0;
    for (b, bus) in net.buses().iter().enumerate() {
        v -= bus.demand_mw * d.balance[b] + d.shed_cap[b];
        v -= a * (d.angle_hi[b] + d.angle_lo[b]);
    }
    for (g, gen) in net.generators().iter().enumerate() {
        if st.gen_on[g] {
            v -= gen.pmax_mw * d.gen_cap[g];
        }
    }
    for l in 0..net.lines().len() {
        if st.line_on[l] {
            v -= net.line_capacity_mw(l) * (d.flow_cap_hi[l] + d.flow_cap_lo[l]);
        } else {
            v -= net.ohm_big_m(l) * (d.ohm_hi[l] + d.ohm_lo[l]);
        }
    }
    v
}

pub fn solve_inner(net: &Network, sc: &Scenario, plan: &InterdictionPlan) -> Result<DispatchSolution> {
    solve_inner_with(net, &EffectiveStatus::new(net, sc, plan))
}

pub fn solve_inner_with(net: &Network, st: &EffectiveStatus) -> Result<DispatchSolution> {
    let lp = build_inner_lp_with(net, st);
    let sol = LpEngine::new(&lp).solve(&LpOptions::default(), None);
    match sol.status {
        LpStatus::Optimal => Ok(extract(net, st, &sol)),
        other => Err(Error::Solver(format!("load-shed LP ended with status {other:?}"))),
    }
}

/// Solves every scenario at `plan`, in scenario order.
pub fn solve_scenarios(
    net: &Network,
    ss: &ScenarioSet,
    plan: &InterdictionPlan,
) -> Result<Vec<DispatchSolution>> {
    ss.scenarios
        .par_iter()
        .map(|sc| solve_inner(net, sc, plan))
        .collect()
}

pub fn expected_shed(net: &Network, ss: &ScenarioSet, plan: &InterdictionPlan) -> Result<f64> {
    let sols = solve_scenarios(net, ss, plan)?;
    Ok(ss
        .scenarios
        .iter()
        .zip(&sols)
        .map(|(sc, d)| sc.weight * d.shed_total_mw)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::parse_network_json;

    const T3: &str = include_str!("../data/t3.json");

    fn t3() -> Network {
        parse_network_json(T3).unwrap()
    }

    #[test]
    fn t3_layout() {
        let net = t3();
        let lp = build_inner_lp(&net, &Scenario::nominal("s", 1.0), &InterdictionPlan::empty());
        let count = |p: &str| lp.variables.iter().filter(|v| v.name.starts_with(p)).count();
        assert_eq!(count("shed_"), 3);
        assert_eq!(count("pg_"), 1);
        assert_eq!(count("p_"), 3);
        assert_eq!(count("theta_"), 3);
    }

    #[test]
    fn t3_no_attack_shed() {
        // Demand 100 at bus3, supply at bus1. The direct line takes 2/3 of
        // the transfer and the two-hop path 1/3, so the direct line's 60 MW
        // limit binds at a 90 MW transfer: shed = 10.
        let net = t3();
        let d = solve_inner(&net, &Scenario::nominal("s", 1.0), &InterdictionPlan::empty()).unwrap();
        assert!((d.shed_total_mw - 10.0).abs() < 1e-7, "{}", d.shed_total_mw);
        assert!((d.dual_value - d.shed_total_mw).abs() < 1e-6);
    }

    #[test]
    fn all_generators_attacked_sheds_everything() {
        let net = t3();
        let mut plan = InterdictionPlan::empty();
        plan.attacked_gens.insert("g1".into());
        let d = solve_inner(&net, &Scenario::nominal("s", 1.0), &plan).unwrap();
        assert!((d.shed_total_mw - 100.0).abs() < 1e-9);
        assert!(d.gen_mw.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn single_bus_examples() {
        let one = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"b","demand_mw":50}],
            "generators":[{"id":"g","bus":"b","pmax_mw":80}]}"#;
        let net = parse_network_json(one).unwrap();
        let mut plan = InterdictionPlan::empty();
        plan.attacked_gens.insert("g".into());
        let d = solve_inner(&net, &Scenario::nominal("s", 1.0), &plan).unwrap();
        assert!((d.shed_total_mw - 50.0).abs() < 1e-9);

        let zero = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"b","demand_mw":0}]}"#;
        let net = parse_network_json(zero).unwrap();
        let d = solve_inner(&net, &Scenario::nominal("s", 1.0), &InterdictionPlan::empty()).unwrap();
        assert_eq!(d.shed_total_mw, 0.0);
    }

    #[test]
    fn outage_and_attack_are_idempotent() {
        let net = t3();
        let mut sc = Scenario::nominal("s", 1.0);
        sc.off_lines.insert("l13".into());
        let mut plan = InterdictionPlan::empty();
        plan.attacked_lines.insert("l13".into());
        let both = build_inner_lp(&net, &sc, &plan);
        let only_sc = build_inner_lp(&net, &sc, &InterdictionPlan::empty());
        let only_plan = build_inner_lp(&net, &Scenario::nominal("s", 1.0), &plan);
        assert_eq!(both, only_sc);
        assert_eq!(both, only_plan);
    }

    #[test]
    fn off_components_carry_nothing() {
        let net = t3();
        let mut plan = InterdictionPlan::empty();
        plan.attacked_lines.insert("l13".into());
        let d = solve_inner(&net, &Scenario::nominal("s", 1.0), &plan).unwrap();
        let l = net.line_index("l13").unwrap();
        assert_eq!(d.flow_mw[l], 0.0);
        // Only the 1-2-3 path remains, limited to 60 MW.
        assert!((d.shed_total_mw - 40.0).abs() < 1e-7);
    }

    #[test]
    fn identical_scenarios_match_single() {
        let net = t3();
        let plan = InterdictionPlan::empty();
        let one = expected_shed(&net, &ScenarioSet::nominal(), &plan).unwrap();
        let two = ScenarioSet::new(vec![Scenario::nominal("a", 0.5), Scenario::nominal("b", 0.5)]);
        assert!((expected_shed(&net, &two, &plan).unwrap() - one).abs() < 1e-12);
    }

    #[test]
    fn plan_display_and_budget() {
        let net = t3();
        let mut plan = InterdictionPlan::empty();
        assert_eq!(plan.to_string(), "{}");
        plan.attacked_lines.insert("l23".into());
        plan.attacked_gens.insert("g1".into());
        assert_eq!(plan.to_string(), "{g1,l23}");
        assert!(plan.validate(&net, Some(1)).is_err());
        assert!(plan.validate(&net, Some(2)).is_ok());
    }
}
