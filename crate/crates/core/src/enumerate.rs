//! Exhaustive search over every attack plan within the budget. Slow and
//! obviously correct; the reference the other solvers are checked against.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inner::{expected_shed, InterdictionPlan};
use crate::netmodel::{Component, Network};
use crate::scenario::ScenarioSet;

/// Default cap on inner LP solves (plans × scenarios).
pub const DEFAULT_EVAL_CAP: u128 = 2_000_000;

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub keep_table: bool,
    /// Only plans of size exactly `k` instead of at most `k`.
    pub budget_exact: bool,
    pub eval_cap: u128,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            keep_table: false,
            budget_exact: false,
            eval_cap: DEFAULT_EVAL_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanValue {
    pub plan: InterdictionPlan,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnumerationResult {
    pub best_plan: InterdictionPlan,
    pub best_value: f64,
    pub evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_plan_values: Option<Vec<PlanValue>>,
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of plans enumerated for `n` components and budget `k`.
pub fn plan_count(n: usize, k: usize, budget_exact: bool) -> u128 {
    let lo = if budget_exact { k } else { 0 };
    (lo..=k.min(n))
        .map(|j| binomial(n as u128, j as u128))
        .fold(0u128, u128::saturating_add)
}

/// Components sorted by id (lines before generators on equal ids).
pub(crate) fn sorted_components(net: &Network) -> Vec<Component> {
    let mut comps: Vec<Component> = net.components().collect();
    comps.sort_by(|a, b| net.component_id(*a).cmp(net.component_id(*b)).then(a.cmp(b)));
    comps
}

/// Index subsets of `0..n` with sizes `lo..=hi`, by size, each size in
/// lexicographic order.
pub(crate) fn combinations(n: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in lo..=hi.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.clone());
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

fn all_plans(net: &Network, k: usize, budget_exact: bool) -> Vec<InterdictionPlan> {
    let comps = sorted_components(net);
    let lo = if budget_exact { k } else { 0 };
    combinations(comps.len(), lo, k)
        .into_iter()
        .map(|idx| {
            let chosen: Vec<Component> = idx.iter().map(|&i| comps[i]).collect();
            InterdictionPlan::from_components(net, &chosen)
        })
        .collect()
}

pub(crate) fn is_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn enumerate_exact(
    net: &Network,
    ss: &ScenarioSet,
    k: usize,
    opts: &EnumerateOptions,
) -> Result<EnumerationResult> {
    if ss.is_empty() {
        return Err(Error::Model("scenario set is empty".into()));
    }
    let n_plans = plan_count(net.num_components(), k, opts.budget_exact);
    let needed = n_plans.saturating_mul(ss.len() as u128);
    if needed > opts.eval_cap {
        return Err(Error::CapExceeded {
            needed,
            cap: opts.eval_cap,
        });
    }
    let plans = all_plans(net, k, opts.budget_exact);
    if plans.is_empty() {
        return Err(Error::Model(format!(
            "no plan of size exactly {k} among {} components",
            net.num_components()
        )));
    }
    let values: Vec<f64> = plans
        .par_iter()
        .map(|p| expected_shed(net, ss, p))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for i in 1..plans.len() {
        let (v, b) = (values[i], values[best]);
        let better = if is_tie(v, b) {
            plans[i].sorted_ids() < plans[best].sorted_ids()
        } else {
            v > b
        };
        if better {
            best = i;
        }
    }
    let best_value = values[best];
    let best_plan = plans[best].clone();
    let evaluated = plans.len();
    let per_plan_values = opts.keep_table.then(|| {
        plans
            .into_iter()
            .zip(values)
            .map(|(plan, value)| PlanValue { plan, value })
            .collect()
    });
    Ok(EnumerationResult {
        best_plan,
        best_value,
        evaluated,
        per_plan_values,
    })
}

/// CSV audit table: `plan,size,value_mw`, components joined by `;`.
pub fn plan_table_csv(table: &[PlanValue]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["plan", "size", "value_mw"])?;
    for row in table {
        w.write_record([
            row.plan.sorted_ids().join(";"),
            row.plan.size().to_string(),
            format!("{}", row.value),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Model(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::parse_network_json;
    use crate::scenario::Scenario;

    fn t3() -> Network {
        parse_network_json(include_str!("../data/t3.json")).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(plan_count(4, 1, false), 5);
        assert_eq!(plan_count(4, 2, true), 6);
        assert_eq!(plan_count(3, 7, false), 8);
    }

    #[test]
    fn k0_is_the_empty_plan() {
        let r = enumerate_exact(&t3(), &ScenarioSet::nominal(), 0, &EnumerateOptions::default()).unwrap();
        assert!(r.best_plan.is_empty());
        assert_eq!(r.evaluated, 1);
        assert!((r.best_value - 10.0).abs() < 1e-7);
    }

    #[test]
    fn one_generator_two_plans() {
        let net = parse_network_json(
            r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"b","demand_mw":50}],
            "generators":[{"id":"g","bus":"b","pmax_mw":80}]}"#,
        )
        .unwrap();
        let r = enumerate_exact(&net, &ScenarioSet::nominal(), 1, &EnumerateOptions::default()).unwrap();
        assert_eq!(r.evaluated, 2);
        assert_eq!(r.best_plan.sorted_ids(), vec!["g"]);
    }

    #[test]
    fn t3_two_scenarios_k1() {
        // Plan values by hand (s1 nominal, s2 without l13):
        // ∅ → 10, 40; l12 → 40, 100; l13 → 40, 40; g1 → 100, 100.
        let net = t3();
        let mut s2 = Scenario::nominal("s2", 0.5);
        s2.off_lines.insert("l13".into());
        let ss = ScenarioSet::new(vec![Scenario::nominal("s1", 0.5), s2]);
        let opts = EnumerateOptions {
            keep_table: true,
            ..Default::default()
        };
        let r = enumerate_exact(&net, &ss, 1, &opts).unwrap();
        assert_eq!(r.evaluated, 5);
        assert_eq!(r.best_plan.sorted_ids(), vec!["g1"]);
        assert!((r.best_value - 100.0).abs() < 1e-7);
        let table = r.per_plan_values.unwrap();
        let get = |id: &str| table.iter().find(|p| p.plan.sorted_ids() == vec![id]).unwrap().value;
        assert!((get("l12") - 70.0).abs() < 1e-7);
        assert!((get("l23") - 70.0).abs() < 1e-7);
        assert!((get("l13") - 40.0).abs() < 1e-7);
        let csv = plan_table_csv(&table).unwrap();
        assert!(csv.starts_with("plan,size,value_mw\n,0,"));
    }

    #[test]
    fn ties_prefer_lexicographically_smallest() {
        // Both lines of a two-line corridor are interchangeable.
        let net = parse_network_json(
            r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"a","demand_mw":0},{"id":"b","demand_mw":100}],
            "generators":[{"id":"g","bus":"a","pmax_mw":200}],
            "lines":[{"id":"m2","from":"a","to":"b","susceptance":5,"thermal_mw":60},
                     {"id":"m1","from":"a","to":"b","susceptance":5,"thermal_mw":60}]}"#,
        )
        .unwrap();
        let r = enumerate_exact(&net, &ScenarioSet::nominal(), 2, &EnumerateOptions::default()).unwrap();
        // {g} and {m1,m2} both shed everything; "g" sorts first.
        assert_eq!(r.best_plan.sorted_ids(), vec!["g"]);
        let r = enumerate_exact(
            &net,
            &ScenarioSet::nominal(),
            1,
            &EnumerateOptions::default(),
        )
        .unwrap();
        assert_eq!(r.best_plan.sorted_ids(), vec!["g"]);
    }

    #[test]
    fn cap_is_enforced() {
        let opts = EnumerateOptions {
            eval_cap: 3,
            ..Default::default()
        };
        match enumerate_exact(&t3(), &ScenarioSet::nominal(), 1, &opts) {
            Err(Error::CapExceeded { needed: 5, cap: 3 }) => {}
            other => panic!("{other:?}"),
        }
    }
}
