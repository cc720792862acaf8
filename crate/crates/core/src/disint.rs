//! Disintegration and Bayesian inversion.
//!
//! Disintegration of `f : X → Y⊗Z` is built from the algebra itself: feed an extra
//! copy of `Y` in, compare it against the `Y` produced by `f` with a cap, and
//! normalise what is left on `Z`:
//!
//! ```text
//! disint(f) = nrm( (cap_Y ⊗ id_Z) ∘ (id_Y ⊗ f) ) : Y⊗X → Z
//! ```
//!
//! Rows whose `Y`-marginal vanishes come out as zero rows rather than an arbitrary
//! distribution.

use crate::channel::Channel;
use crate::error::{Error, Result};

/// Conditions the first `split` output wires of `f` and returns the conditional on the rest.
///
/// The result takes the conditioned wires first, followed by the original inputs.
pub fn disint(f: &Channel, split: usize) -> Result<Channel> {
    let outs = f.outputs();
    if outs.len() < 2 {
        return Err(Error::Arity(format!(
            "disintegration needs at least two output wires, found {}",
            outs.len()
        )));
    }
    if split == 0 || split >= outs.len() {
        return Err(Error::Arity(format!(
            "split {split} must leave wires on both sides of {} outputs",
            outs.len()
        )));
    }
    condition(f, split)
}

/// Disintegration without the arity checks; an empty block on either side is allowed.
pub(crate) fn condition(f: &Channel, split: usize) -> Result<Channel> {
    let (ys, zs) = f.outputs().split_at(split);
    let feed = Channel::identity(ys).tensor(f);
    let compare = Channel::cap_all(ys).tensor(&Channel::identity(zs));
    Ok(feed.then(&compare)?.nrm())
}

/// Dagger of `f : Y → Z` with respect to a prior state `prior` on `Y`: a channel `Z → Y`.
///
/// `f†(z) = nrm(y ↦ prior(y)·f(y)(z))`.
pub fn dagger_state(f: &Channel, prior: &Channel) -> Result<Channel> {
    if !prior.is_state() {
        return Err(Error::Arity("dagger prior must be a state".into()));
    }
    if prior.outputs() != f.inputs() {
        return Err(Error::SpaceMismatch {
            context: "dagger prior".into(),
            expected: wire_names(f.inputs()),
            found: wire_names(prior.outputs()),
        });
    }
    let joint = graph_then(prior, f)?;
    condition(&joint, f.outputs().len())
}

/// Dagger of `f : Y → Z` with respect to a total prior channel `c : X → Y`: a channel `Z⊗X → Y`.
pub fn dagger_channel(f: &Channel, c: &Channel) -> Result<Channel> {
    if !c.is_total() {
        return Err(Error::NotTotal {
            context: "dagger prior channel".into(),
            mass: c.row_masses().into_iter().find(|m| !m.is_one()).unwrap_or_default(),
        });
    }
    if c.outputs() != f.inputs() {
        return Err(Error::SpaceMismatch {
            context: "dagger prior channel".into(),
            expected: wire_names(f.inputs()),
            found: wire_names(c.outputs()),
        });
    }
    let joint = graph_then(c, f)?;
    condition(&joint, f.outputs().len())
}

/// `c` followed by copying its outputs and applying `f` to the first copy: `X → Z⊗Y`.
fn graph_then(c: &Channel, f: &Channel) -> Result<Channel> {
    let ys = c.outputs();
    c.then(&Channel::copy_all(ys))?
        .then(&f.tensor(&Channel::identity(ys)))
}

fn wire_names(ws: &[crate::kernel::FiniteSpace]) -> String {
    ws.iter().map(|w| w.name()).collect::<Vec<_>>().join(", ")
}
