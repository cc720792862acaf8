//! Interventions: front-door adjustment on the smoking joint state, the same
//! effect from the fitted network, and a back-door-free intervention.

use chancalc::causal::{do_channel, front_door_do};
use chancalc::cli::decimal_table;
use chancalc::inference::{infer_channel, QuerySpec};
use chancalc::netmodel::{medical, smoking_joint, smoking_network};

fn main() -> chancalc::error::Result<()> {
    let sigma = smoking_joint();
    let fd = front_door_do(&sigma)?;
    println!("front-door P(C | do(S)):\n{}", decimal_table(&fd));

    let net = smoking_network();
    let obs = infer_channel(&net, &QuerySpec::new(&["S"], &["C"]))?;
    println!("observational P(C | S):\n{}", decimal_table(&obs));
    let d = do_channel(&net, "S", "C")?;
    println!("mutilated network P(C | do(S)):\n{}", decimal_table(&d));

    let m = medical();
    println!("medical P(Y | do(X)):\n{}", do_channel(&m, "X", "Y")?);
    Ok(())
}
