//! Counterfactuals through the twin network: had the treatment been given,
//! would the patient have recovered, given what was observed?

use chancalc::causal::{counterfactual_channel, twin_network, CounterfactualSpec};
use chancalc::netmodel::medical;

fn main() -> chancalc::error::Result<()> {
    let net = medical();
    let cf = CounterfactualSpec::sharing_all(&net, &[("X", "1")], &["X", "Y"], &["Y"]);

    let twin = twin_network(&net, &cf)?;
    println!("twin nodes: {}", twin.node_names().join(" "));

    let c = counterfactual_channel(&net, &cf)?;
    println!("\nP(Y' | X, Y) with X' forced to 1:\n{c}");
    Ok(())
}
