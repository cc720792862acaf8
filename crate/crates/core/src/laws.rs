//! Both sides of the equational laws of the calculus, as concrete channels.
//!
//! Each function returns `(lhs, rhs)`; the law holds when the two are equal
//! entrywise. The property tests and the acceptance suite feed these random
//! subchannels, and the runnable examples use them to show rewrite steps.

use crate::channel::Channel;
use crate::disint::{dagger_channel, dagger_state, disint};
use crate::error::{Error, Result};
use crate::kernel::FiniteSpace;

pub type Sides = (Channel, Channel);

/// `f` against the tuple of `dom(f)` and `nrm(f)` taken through a copy of the input.
pub fn normalisation_recovery(f: &Channel) -> Result<Sides> {
    let rhs = Channel::copy_all(f.inputs()).then(&f.dom().tensor(&f.nrm()))?;
    Ok((f.clone(), rhs))
}

/// `nrm(f ⊗ g) = nrm(f) ⊗ nrm(g)`.
pub fn nrm_parallel(f: &Channel, g: &Channel) -> Sides {
    (f.tensor(g).nrm(), f.nrm().tensor(&g.nrm()))
}

/// `nrm(h ∘ f) = h ∘ nrm(f)` for a total `h`.
pub fn nrm_channel_pullout(f: &Channel, h: &Channel) -> Result<Sides> {
    if !h.is_total() {
        return Err(Error::Invalid("only total channels can be pulled out of a box".into()));
    }
    Ok((f.then(h)?.nrm(), f.nrm().then(h)?))
}

/// `nrm(Δ ∘ f) = Δ ∘ nrm(f)`, copying every output wire.
pub fn nrm_copy_pullout(f: &Channel) -> Result<Sides> {
    let copy = Channel::copy_all(f.outputs());
    Ok((f.then(&copy)?.nrm(), f.nrm().then(&copy)?))
}

/// `nrm((id ⊗ discard) ∘ f) = (id ⊗ discard) ∘ nrm(f)`, keeping the wires in `keep`.
pub fn nrm_discard_pullout(f: &Channel, keep: &[usize]) -> Result<Sides> {
    Ok((f.marginal(keep)?.nrm(), f.nrm().marginal(keep)?))
}

/// `nrm(nrm(f)) = nrm(f)`.
pub fn nrm_idempotent(f: &Channel) -> Sides {
    (f.nrm().nrm(), f.nrm())
}

/// `∇ ∘ swap = ∇`.
pub fn comparator_commutative(x: &FiniteSpace) -> Result<Sides> {
    let cmp = Channel::comparator(x);
    let xs = [x.clone()];
    Ok((Channel::swap(&xs, &xs).then(&cmp)?, cmp))
}

/// `∇ ∘ (∇ ⊗ id) = ∇ ∘ (id ⊗ ∇)`.
pub fn comparator_associative(x: &FiniteSpace) -> Result<Sides> {
    let cmp = Channel::comparator(x);
    let id = Channel::identity(std::slice::from_ref(x));
    Ok((cmp.tensor(&id).then(&cmp)?, id.tensor(&cmp).then(&cmp)?))
}

/// Both Frobenius equations: `(id ⊗ ∇)(Δ ⊗ id) = Δ∇ = (∇ ⊗ id)(id ⊗ Δ)`.
pub fn frobenius(x: &FiniteSpace) -> Result<(Channel, Channel, Channel)> {
    let cmp = Channel::comparator(x);
    let copy = Channel::copy(x);
    let id = Channel::identity(std::slice::from_ref(x));
    let left = copy.tensor(&id).then(&id.tensor(&cmp))?;
    let middle = cmp.then(&copy)?;
    let right = id.tensor(&copy).then(&cmp.tensor(&id))?;
    Ok((left, middle, right))
}

/// The special (spider) law `∇ ∘ Δ = id`.
pub fn comparator_special(x: &FiniteSpace) -> Result<Sides> {
    Ok((
        Channel::copy(x).then(&Channel::comparator(x))?,
        Channel::identity(std::slice::from_ref(x)),
    ))
}

/// Tensor compatibility: the comparator on `X⊗Y` against `(∇_X ⊗ ∇_Y)` after
/// interleaving, both read through the bijection `X⊗Y ≅ X×Y` with the flat product space.
pub fn comparator_tensor(x: &FiniteSpace, y: &FiniteSpace) -> Result<Sides> {
    let pair = [x.clone(), y.clone()];
    let prod = FiniteSpace::product(&pair);
    let fuse = Channel::deterministic(pair.to_vec(), vec![prod.clone()], |t| vec![t[0] * y.len() + t[1]])?;
    let split = Channel::deterministic(vec![prod.clone()], pair.to_vec(), |t| vec![t[0] / y.len(), t[0] % y.len()])?;
    let lhs = fuse
        .tensor(&fuse)
        .then(&Channel::comparator(&prod))?
        .then(&split)?;
    let rhs = Channel::comparator_all(&pair);
    Ok((lhs, rhs))
}

/// Recovery of `f` from its marginal and its disintegration:
/// `Δ_X ; (marg_Y f ⊗ id_X) ; (Δ_Y ⊗ id_X) ; (id_Y ⊗ disint f)`.
pub fn disintegration_recovery(f: &Channel, split: usize) -> Result<Sides> {
    let xs = f.inputs();
    let ys = &f.outputs()[..split];
    let keep: Vec<usize> = (0..split).collect();
    let marginal = f.marginal(&keep)?;
    let rebuilt = Channel::copy_all(xs)
        .then(&marginal.tensor(&Channel::identity(xs)))?
        .then(&Channel::copy_all(ys).tensor(&Channel::identity(xs)))?
        .then(&Channel::identity(ys).tensor(&disint(f, split)?))?;
    Ok((f.clone(), rebuilt))
}

/// Dagger equation for a state prior, as joint states on `Y⊗Z`:
/// `(id ⊗ f)Δω = (f†_ω ⊗ id)Δ(f∘ω)`.
pub fn dagger_state_equation(f: &Channel, prior: &Channel) -> Result<Sides> {
    let ys = f.inputs();
    let zs = f.outputs();
    let lhs = prior
        .then(&Channel::copy_all(ys))?
        .then(&Channel::identity(ys).tensor(f))?;
    let dagger = dagger_state(f, prior)?;
    let rhs = prior
        .then(f)?
        .then(&Channel::copy_all(zs))?
        .then(&dagger.tensor(&Channel::identity(zs)))?;
    Ok((lhs, rhs))
}

/// Dagger equation for a channel prior `c : X → Y`, as channels `X → Y⊗Z`.
pub fn dagger_channel_equation(f: &Channel, c: &Channel) -> Result<Sides> {
    let xs = c.inputs();
    let ys = f.inputs();
    let zs = f.outputs();
    let lhs = c
        .then(&Channel::copy_all(ys))?
        .then(&Channel::identity(ys).tensor(f))?;
    let dagger = dagger_channel(f, c)?;
    let rhs = Channel::copy_all(xs)
        .then(&c.then(f)?.tensor(&Channel::identity(xs)))?
        .then(&Channel::copy_all(zs).tensor(&Channel::identity(xs)))?
        .then(&Channel::identity(zs).tensor(&dagger))?
        .then(&Channel::swap(zs, ys))?;
    Ok((lhs, rhs))
}

/// Box removal for a full-support state: `nrm(∇ ∘ (ω ⊗ id)) = id`.
pub fn box_removal_state(state: &Channel) -> Result<Sides> {
    let xs = state.outputs();
    if xs.len() != 1 {
        return Err(Error::Arity("box removal expects a state on one wire".into()));
    }
    let lhs = state
        .tensor(&Channel::identity(xs))
        .then(&Channel::comparator(&xs[0]))?
        .nrm();
    Ok((lhs, Channel::identity(xs)))
}

/// Box removal for a full-support channel `c : X → Y`:
/// `nrm(∇_Y ∘ (c ⊗ id_Y)) = discard_X ⊗ id_Y`.
pub fn box_removal_channel(c: &Channel) -> Result<Sides> {
    let xs = c.inputs();
    let ys = c.outputs();
    if ys.len() != 1 {
        return Err(Error::Arity("box removal expects a channel with one output wire".into()));
    }
    let lhs = c
        .tensor(&Channel::identity(ys))
        .then(&Channel::comparator(&ys[0]))?
        .nrm();
    Ok((lhs, Channel::discard(xs).tensor(&Channel::identity(ys))))
}

/// Nested boxes collapse: `nrm(m ∘ (id ⊗ nrm ρ)) = nrm(m ∘ (id ⊗ ρ))` for a state `ρ`.
pub fn nested_box(m: &Channel, rho: &Channel) -> Result<Sides> {
    if !rho.is_state() {
        return Err(Error::Arity("nested box law expects a state".into()));
    }
    let k = m.inputs().len() - rho.outputs().len().min(m.inputs().len());
    let front = &m.inputs()[..k];
    let id = Channel::identity(front);
    let lhs = id.tensor(&rho.nrm()).then(m)?.nrm();
    let rhs = id.tensor(rho).then(m)?.nrm();
    Ok((lhs, rhs))
}
