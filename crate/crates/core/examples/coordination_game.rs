//! The nested-belief coordination game: each agent reasons about the other
//! to a fixed depth, and the result matches the closed form.

use chancalc::kernel::{q, FiniteSpace, SubDist};
use chancalc::nestedq::{coord_agent, coord_closed_form, Agent};

fn main() -> chancalc::error::Result<()> {
    let places = FiniteSpace::new("Place", &["pub", "cafe"])?;
    let location = SubDist::new(&places, &[("pub", q("3/5")), ("cafe", q("2/5"))])?;
    println!("location prior: {location}");

    for depth in 0..5 {
        let bob = coord_agent(&location, Agent::Bob, depth)?;
        println!("bob({depth}) = {bob}");
        if depth > 0 {
            let alice = coord_agent(&location, Agent::Alice, depth)?;
            assert_eq!(alice, coord_closed_form(&location, Agent::Alice, depth)?);
            println!("alice({depth}) = {alice}");
        }
    }
    Ok(())
}
