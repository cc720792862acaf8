//! The Child network loaded from its JSON model: a conditional table, the
//! dagger route to the same table, and the step-by-step derivation.

use chancalc::cli::decimal_table;
use chancalc::inference::{child_derivation, infer_channel, verify_derivation, QuerySpec};
use chancalc::netmodel::parse_network;

const MODEL: &str = include_str!("../models/child.json");

fn main() -> chancalc::error::Result<()> {
    let net = parse_network(MODEL)?;
    println!("{} nodes", net.nodes().len());

    let c = infer_channel(&net, &QuerySpec::new(&["HD", "CO"], &["LB"]))?;
    println!("\nP(LB | HD, CO):\n{}", decimal_table(&c));

    let steps = child_derivation(&net)?;
    let report = verify_derivation(&steps)?;
    println!("derivation over {} steps: {}", report.labels.len(), if report.passed() { "holds" } else { "breaks" });
    println!("\nfinal step, exact:\n{}", steps.last().expect("steps").channel);
    Ok(())
}
