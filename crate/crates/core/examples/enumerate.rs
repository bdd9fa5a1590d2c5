//! Exact worst-case plans by enumeration, for budgets 0 through 3.

use nk_interdict::enumerate::{enumerate_exact, plan_table_csv, EnumerateOptions};
use nk_interdict::netmodel::parse_network_json;
use nk_interdict::scenario::{Scenario, ScenarioSet};

fn main() -> nk_interdict::Result<()> {
    let net = parse_network_json(include_str!("../data/t3.json"))?;
    let mut s2 = Scenario::nominal("s2", 0.5);
    s2.off_lines.insert("l13".into());
    let ss = ScenarioSet::new(vec![Scenario::nominal("s1", 0.5), s2]);

    for k in 0..=3 {
        let r = enumerate_exact(&net, &ss, k, &EnumerateOptions::default())?;
        println!("k={k}: {:?} -> {:.2} MW ({} plans)", r.best_plan.sorted_ids(), r.best_value, r.evaluated);
    }

    let opts = EnumerateOptions {
        keep_table: true,
        budget_exact: true,
        ..Default::default()
    };
    let r = enumerate_exact(&net, &ss, 1, &opts)?;
    print!("{}", plan_table_csv(r.per_plan_values.as_deref().unwrap_or_default())?);
    Ok(())
}
