//! Conditional independence as a string-diagram equation: the disintegration
//! of `Z → A ⊗ B` against `copy ; (P(A|Z) ⊗ P(B|Z))`.

use chancalc::inference::{check_cond_independence, independence_sides};
use chancalc::netmodel::{fault_tree, joins};

fn main() -> chancalc::error::Result<()> {
    let net = joins();
    println!("joins network: {}", net.node_names().join(" "));
    let names = net.node_names();
    for z in &names {
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                if a == z || b == z {
                    continue;
                }
                let joint = net.joint(&[z, a, b])?;
                let indep = check_cond_independence(&joint, &[0], &[1], &[2])?;
                println!("  {a} ⫫ {b} | {z}: {indep}");
            }
        }
    }

    let ft = fault_tree();
    let joint = ft.joint(&["w3", "w2", "w6"])?;
    let (lhs, rhs) = independence_sides(&joint, &[0], &[1], &[2])?;
    println!("\nfault tree, w2 ⫫ w6 | w3: {}", lhs == rhs);
    println!("disintegration:\n{lhs}\nfactored:\n{rhs}");
    Ok(())
}
