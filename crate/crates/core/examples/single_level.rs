//! Single-level MILP: solve it with the built-in branch and bound, then
//! write it as MPS and LP text for an external solver.

use nk_interdict::milp::MipOptions;
use nk_interdict::modelio::{export_model, import_model, ModelFormat};
use nk_interdict::netmodel::parse_network_json;
use nk_interdict::scenario::{Scenario, ScenarioSet};
use nk_interdict::singlelevel::{build_single_level_milp, solve_single_level, DualBoundPolicy};

fn main() -> nk_interdict::Result<()> {
    let net = parse_network_json(include_str!("../data/t3.json"))?;
    let mut s2 = Scenario::nominal("s2", 0.5);
    s2.off_lines.insert("l13".into());
    let ss = ScenarioSet::new(vec![Scenario::nominal("s1", 0.5), s2]);

    let r = solve_single_level(&net, &ss, 1, DualBoundPolicy::FixedCap, &MipOptions::default())?;
    println!(
        "plan {:?}, objective {:.3}, bound {:.3}, {} nodes, {:?}",
        r.plan.sorted_ids(),
        r.objective,
        r.bound,
        r.nodes,
        r.status
    );
    if !r.binding_bounds.is_empty() {
        println!("multipliers at their bound: {:?}", r.binding_bounds);
    }

    let model = build_single_level_milp(&net, &ss, 1, DualBoundPolicy::FixedCap)?;
    let mps = export_model(&model.mip, ModelFormat::Mps)?;
    let lp = export_model(&model.mip, ModelFormat::LpText)?;
    println!(
        "{} columns, {} rows; MPS {} bytes, LP {} bytes",
        model.mip.base.num_vars(),
        model.mip.base.num_constraints(),
        mps.len(),
        lp.len()
    );
    let back = import_model(&mps, ModelFormat::Mps)?;
    assert_eq!(back.base.num_vars(), model.mip.base.num_vars());
    print!("{}", lp.lines().take(12).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
