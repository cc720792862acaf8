//! Nested normalisation: comparator powers of a state and the coordination game.
//!
//! Two agents want to meet. Bob at depth 0 goes wherever `location` says. Alice
//! reasons about Bob one level down, Bob about Alice at the same level:
//!
//! ```text
//! alice(n) = nrm(∇ ∘ (location ⊗ bob(n-1)))     n ≥ 1
//! bob(n)   = nrm(∇ ∘ (location ⊗ alice(n)))     n ≥ 1
//! ```
//!
//! Unfolding gives `bob(n) = location^(2n+1)` and `alice(n) = location^(2n)`,
//! normalised.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::kernel::SubDist;

/// Default bound on the recursion depth of [`coord_agent`].
pub const DEFAULT_DEPTH_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    Alice,
    Bob,
}

impl std::str::FromStr for Agent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alice" => Ok(Agent::Alice),
            "bob" => Ok(Agent::Bob),
            other => Err(Error::Invalid(format!("unknown agent `{other}`; expected alice or bob"))),
        }
    }
}

/// `x ↦ ω(x)ⁿ`, normalised.
pub fn power_state(omega: &SubDist, n: u32) -> Result<SubDist> {
    if n == 0 {
        return Err(Error::Invalid("power must be at least 1".into()));
    }
    if omega.is_zero() {
        return Err(Error::Invalid("cannot take powers of the zero subdistribution".into()));
    }
    let raised = omega.weights().iter().map(|w| w.pow(n)).collect();
    Ok(SubDist::from_weights(omega.space(), raised)?.normalize())
}

/// `nrm(∇ ∘ (a ⊗ b))` for two states on the same space.
pub fn compare_states(a: &SubDist, b: &SubDist) -> Result<SubDist> {
    let joint = Channel::from_state(a).tensor(&Channel::from_state(b));
    let merged = joint.then(&Channel::comparator(a.space()))?.nrm();
    SubDist::from_weights(a.space(), merged.row(0).to_vec())
}

/// Evaluates the mutual recursion directly, with the default depth cap.
pub fn coord_agent(location: &SubDist, agent: Agent, depth: usize) -> Result<SubDist> {
    coord_agent_capped(location, agent, depth, DEFAULT_DEPTH_CAP)
}

pub fn coord_agent_capped(location: &SubDist, agent: Agent, depth: usize, cap: usize) -> Result<SubDist> {
    if depth > cap {
        return Err(Error::DepthExceeded { depth, cap });
    }
    if !location.is_proper() {
        return Err(Error::NotTotal {
            context: "location".into(),
            mass: location.weight(),
        });
    }
    match agent {
        Agent::Bob if depth == 0 => Ok(location.clone()),
        Agent::Bob => compare_states(location, &coord_agent_capped(location, Agent::Alice, depth, cap)?),
        Agent::Alice if depth == 0 => Err(Error::Invalid("alice starts at depth 1".into())),
        Agent::Alice => compare_states(location, &coord_agent_capped(location, Agent::Bob, depth - 1, cap)?),
    }
}

/// The closed form of [`coord_agent`].
pub fn coord_closed_form(location: &SubDist, agent: Agent, depth: usize) -> Result<SubDist> {
    let n = u32::try_from(depth).map_err(|_| Error::Invalid(format!("depth {depth} is too large")))?;
    match agent {
        Agent::Bob => power_state(location, 2 * n + 1),
        Agent::Alice if depth == 0 => Err(Error::Invalid("alice starts at depth 1".into())),
        Agent::Alice => power_state(location, 2 * n),
    }
}
