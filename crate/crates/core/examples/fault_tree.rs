//! The fault tree: build the network, read off `P(w5 | w2)` by brute-force
//! conditioning, then check the five-step disintegration derivation.

use chancalc::inference::{fault_tree_derivation, infer_channel, verify_derivation, QuerySpec};
use chancalc::netmodel::fault_tree;

fn main() -> chancalc::error::Result<()> {
    let net = fault_tree();
    println!("nodes: {}", net.node_names().join(" "));

    let c = infer_channel(&net, &QuerySpec::new(&["w2"], &["w5"]))?;
    println!("\nP(w5 | w2) from the joint:\n{c}");

    let steps = fault_tree_derivation()?;
    for s in &steps {
        println!("\nstep {}:\n{}", s.label, s.channel);
    }
    let report = verify_derivation(&steps)?;
    println!("\nderivation {}", if report.passed() { "holds" } else { "breaks" });
    if let Some(m) = report.mismatch {
        println!("  {} vs {} at {} ↦ {}: {} ≠ {}", m.from, m.to, m.input, m.output, m.left, m.right);
    }
    Ok(())
}
