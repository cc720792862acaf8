//! A tour of the rewrite laws on small concrete channels: each prints both
//! sides and whether they agree.

use chancalc::channel::Channel;
use chancalc::kernel::{q, FiniteSpace};
use chancalc::laws::{self, Sides};

fn show(name: &str, sides: Sides) {
    let (l, r) = sides;
    println!("{name}: {}", if l == r { "equal" } else { "differ" });
}

fn main() -> chancalc::error::Result<()> {
    let x = FiniteSpace::new("X", &["a", "b"])?;
    let y = FiniteSpace::new("Y", &["u", "v", "w"])?;
    let f = Channel::from_dense(
        vec![x.clone()],
        vec![y.clone()],
        ["1/4", "1/4", "0", "0", "0", "0"].iter().map(|s| q(s)).collect(),
    )?;
    println!("f:\n{f}\nnrm(f):\n{}\n", f.nrm());

    show("normalisation recovery", laws::normalisation_recovery(&f)?);
    show("nrm idempotent", laws::nrm_idempotent(&f));
    show("nrm of a copy", laws::nrm_copy_pullout(&f)?);
    show("comparator commutative", laws::comparator_commutative(&x)?);
    show("comparator associative", laws::comparator_associative(&y)?);
    show("comparator special", laws::comparator_special(&x)?);
    show("comparator on a product", laws::comparator_tensor(&x, &y)?);

    let joint = Channel::joint_state(
        vec![x.clone(), y.clone()],
        ["1/6", "1/12", "1/4", "1/8", "1/8", "1/4"].iter().map(|s| q(s)).collect(),
    )?;
    show("disintegration recovery", laws::disintegration_recovery(&joint, 1)?);
    let prior = joint.marginal(&[0])?;
    show("box removal", laws::box_removal_state(&prior)?);
    let g = chancalc::disint::disint(&joint, 1)?;
    show("dagger of a state", laws::dagger_state_equation(&g, &prior)?);
    Ok(())
}
