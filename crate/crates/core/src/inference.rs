//! Conditioning queries, Jeffrey updating, conditional independence, and replay of
//! step-by-step derivations.
//!
//! The reference semantics of a query is brute force: build the joint over evidence
//! and target nodes, then normalise each evidence slice. Derivations built from the
//! channel algebra are checked against it entry by entry.

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::disint::{condition, dagger_channel, dagger_state, disint};
use crate::error::{Error, Result};
use crate::kernel::{normalize_row, product_size, FiniteSpace, Scalar, SubDist};
use crate::netmodel::{and_gate, fault_tree, or_gate, NetworkSpec};

/// Which nodes are observed and which are asked about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub evidence: Vec<String>,
    pub target: Vec<String>,
}

impl QuerySpec {
    pub fn new(evidence: &[&str], target: &[&str]) -> Self {
        QuerySpec {
            evidence: evidence.iter().map(|s| s.to_string()).collect(),
            target: target.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn check(&self, net: &NetworkSpec) -> Result<()> {
        if self.target.is_empty() {
            return Err(Error::Invalid("query needs at least one target node".into()));
        }
        for e in &self.evidence {
            if self.target.contains(e) {
                return Err(Error::Invalid(format!("node `{e}` is both evidence and target")));
            }
            if net.node(e)?.is_open() {
                return Err(Error::Invalid(format!(
                    "node `{e}` is an open input and cannot be observed"
                )));
            }
        }
        for t in &self.target {
            net.node(t)?;
        }
        Ok(())
    }
}

/// The conditional channel `evidence → target`.
///
/// Open inputs of the network come first among the channel inputs, then the evidence
/// nodes in query order. Rows for evidence of probability zero are zero rows; see
/// [`impossible_rows`].
pub fn infer_channel(net: &NetworkSpec, q: &QuerySpec) -> Result<Channel> {
    q.check(net)?;
    let keep: Vec<&str> = q.evidence.iter().chain(&q.target).map(String::as_str).collect();
    let joint = net.joint_channel(&keep)?;
    let ne = q.evidence.len();
    let ev = &joint.outputs()[..ne];
    let tg = &joint.outputs()[ne..];
    let (e_n, t_n) = (product_size(ev), product_size(tg));
    let mut data = Vec::with_capacity(joint.n_rows() * e_n * t_n);
    for r in 0..joint.n_rows() {
        let row = joint.row(r);
        for e in 0..e_n {
            data.extend(normalize_row(&row[e * t_n..(e + 1) * t_n]));
        }
    }
    let inputs = joint.inputs().iter().chain(ev).cloned().collect();
    Ok(Channel::from_dense_unchecked(inputs, tg.to_vec(), data))
}

/// Input keys of the zero rows of an inferred channel: the impossible evidence.
pub fn impossible_rows(ch: &Channel) -> Vec<String> {
    ch.zero_rows().into_iter().map(|r| ch.input_key(r)).collect()
}

/// Outcome of a Jeffrey update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JeffreyUpdate {
    /// Pushforward of the soft evidence through the inferred channel.
    pub posterior: SubDist,
    /// Evidence mass placed on impossible evidence; the posterior falls short by this much.
    pub lost_mass: Scalar,
}

/// Pushes a distribution over evidence tuples through the inferred channel.
///
/// `evidence` lives on the product of the evidence spaces, as produced by
/// [`FiniteSpace::product`].
pub fn jeffrey_update(net: &NetworkSpec, q: &QuerySpec, evidence: &SubDist) -> Result<JeffreyUpdate> {
    let ch = infer_channel(net, q)?;
    if ch.inputs().len() != q.evidence.len() {
        return Err(Error::Invalid("Jeffrey updating needs a network without open inputs".into()));
    }
    let expected = FiniteSpace::product(ch.inputs());
    if evidence.space().elements() != expected.elements() {
        return Err(Error::SpaceMismatch {
            context: "Jeffrey evidence".into(),
            expected: expected.name().to_string(),
            found: evidence.space().name().to_string(),
        });
    }
    if !evidence.is_proper() {
        return Err(Error::NotTotal {
            context: "Jeffrey evidence".into(),
            mass: evidence.weight(),
        });
    }
    let mut post = vec![Scalar::zero(); ch.n_cols()];
    let mut lost = Scalar::zero();
    for (r, w) in evidence.weights().iter().enumerate() {
        let row = ch.row(r);
        if row.iter().all(Scalar::is_zero) {
            lost += w;
        }
        for (p, v) in post.iter_mut().zip(row) {
            *p += w * v;
        }
    }
    Ok(JeffreyUpdate {
        posterior: SubDist::from_weights(&FiniteSpace::product(ch.outputs()), post)?,
        lost_mass: lost,
    })
}

/// Both sides of the independence shape: the conditional `Z → A⊗B` against
/// `Δ_Z ; (P(A|Z) ⊗ P(B|Z))`. Wires of `joint` are given by position.
pub fn independence_sides(joint: &Channel, z: &[usize], a: &[usize], b: &[usize]) -> Result<(Channel, Channel)> {
    if !joint.is_state() {
        return Err(Error::Arity("independence check needs a joint state".into()));
    }
    let n = joint.outputs().len();
    let mut all: Vec<usize> = z.iter().chain(a).chain(b).copied().collect();
    all.sort_unstable();
    if a.is_empty() || b.is_empty() || all != (0..n).collect::<Vec<_>>() {
        return Err(Error::Invalid(format!(
            "blocks Z={z:?}, A={a:?}, B={b:?} must partition the {n} wires with A and B non-empty"
        )));
    }
    let cat = |xs: &[&[usize]]| xs.concat();
    let zab = condition(&joint.rewire(&cat(&[z, a, b]))?, z.len())?;
    let za = condition(&joint.rewire(&cat(&[z, a]))?, z.len())?;
    let zb = condition(&joint.rewire(&cat(&[z, b]))?, z.len())?;
    let zs = zab.inputs().to_vec();
    let factored = Channel::copy_all(&zs).then(&za.tensor(&zb))?;
    Ok((zab, factored))
}

/// Whether `A ⊥ B | Z` holds exactly in a proper joint state.
pub fn check_cond_independence(joint: &Channel, z: &[usize], a: &[usize], b: &[usize]) -> Result<bool> {
    let mass: Scalar = joint.data().iter().sum();
    if !mass.is_one() {
        return Err(Error::NotTotal {
            context: "independence joint".into(),
            mass,
        });
    }
    let (lhs, rhs) = independence_sides(joint, z, a, b)?;
    lhs.equals(&rhs)
}

/// One labelled step of a derivation.
#[derive(Debug, Clone)]
pub struct Step {
    pub label: String,
    pub channel: Channel,
}

impl Step {
    pub fn new(label: &str, channel: Channel) -> Self {
        Step {
            label: label.to_string(),
            channel,
        }
    }
}

/// Where two consecutive steps first disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub from: String,
    pub to: String,
    pub input: String,
    pub output: String,
    pub left: Scalar,
    pub right: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationReport {
    pub labels: Vec<String>,
    pub mismatch: Option<Mismatch>,
}

impl DerivationReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares every pair of consecutive steps; stops at the first difference.
pub fn verify_derivation(steps: &[Step]) -> Result<DerivationReport> {
    let labels = steps.iter().map(|s| s.label.clone()).collect();
    for pair in steps.windows(2) {
        let (l, r) = (&pair[0], &pair[1]);
        if let Some((row, col)) = l.channel.first_difference(&r.channel)? {
            return Ok(DerivationReport {
                labels,
                mismatch: Some(Mismatch {
                    from: l.label.clone(),
                    to: r.label.clone(),
                    input: l.channel.input_key(row),
                    output: l.channel.output_key(col),
                    left: l.channel.entry(row, col).clone(),
                    right: r.channel.entry(row, col).clone(),
                }),
            });
        }
    }
    Ok(DerivationReport { labels, mismatch: None })
}

fn bit() -> FiniteSpace {
    FiniteSpace::bool_named("2")
}

fn leaf(net: &NetworkSpec, name: &str) -> Result<Channel> {
    net.node(name)?
        .cpt()
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("node `{name}` has no table")))
}

/// Steps (a) to (e) of the fault-tree disintegration, each a channel `w2 → w5`.
///
/// `ω = flip(1/3)` on `w3`, `f = or ∘ (flip(1/2) ⊗ id)` sends `w3` to `w2`,
/// `ρ = f ∘ ω`, `d = f†_ω`, and `V` is the state of `w6`.
pub fn fault_tree_derivation() -> Result<Vec<Step>> {
    let net = fault_tree();
    let b = bit();
    let one = [b.clone()];
    let id = Channel::identity(&one);
    let copy = Channel::copy(&b);
    let (oc, ac) = (or_gate(), and_gate());
    let half = leaf(&net, "w1")?;
    let omega = leaf(&net, "w3")?;
    let v = leaf(&net, "w7")?.tensor(&leaf(&net, "w8")?).then(&oc)?;
    let f = half.tensor(&id).then(&oc)?;
    let rho = omega.then(&f)?;
    let d = dagger_state(&f, &omega)?;
    // M : (e, w) ↦ ac(ac(e, w), V).
    let m = ac.tensor(&v).then(&ac)?;
    let pulled = |box_: &Channel| copy.then(&id.tensor(box_))?.then(&m);
    let cond_on_e = |joint_ew: &Channel| condition(joint_ew, 1);

    // (a) the whole tree as a state on (w2, w5), conditioned on w2.
    let joint_ew = half.tensor(&omega).then(&id.tensor(&copy))?.then(&oc.tensor(&id))?;
    let tau25 = joint_ew
        .then(&copy.tensor(&id))?
        .then(&id.tensor(&ac))?
        .then(&id.tensor(&id).tensor(&v))?
        .then(&id.tensor(&ac))?;
    let a = cond_on_e(&tau25)?;
    // (b) the gates above w2 and w3 pulled out of the box.
    let b_step = pulled(&cond_on_e(&joint_ew)?)?;
    // (c) the joint on (w2, w3) rewritten through the dagger.
    let via_dagger = rho.then(&copy)?.then(&id.tensor(&d))?;
    let c = pulled(&cond_on_e(&via_dagger)?)?;
    // (d) what is left of the box is a comparison with the full-support state ρ.
    let inner = id.tensor(&rho).then(&Channel::comparator(&b))?.nrm();
    let dd = pulled(&inner.then(&d)?)?;
    // (e) box removed.
    let e = pulled(&d)?;
    Ok(vec![
        Step::new("(a)", a),
        Step::new("(b)", b_step),
        Step::new("(c)", c),
        Step::new("(d)", dd),
        Step::new("(e)", e),
    ])
}

/// The Child derivation, each step a channel `HD⊗CO → LB`.
///
/// Abbreviations: `α` is the state on `X = DF⊗CM⊗LP`, `c = (co∘π_LP)†_α : CO → X`,
/// `f = hd∘π_{DF,CM} : X → HD`, and the last step uses `f†_c : HD⊗CO → X`.
pub fn child_derivation(net: &NetworkSpec) -> Result<Vec<Step>> {
    let t = |n: &str| leaf(net, n);
    let sp = |n: &str| -> Result<FiniteSpace> { Ok(net.node(n)?.space.clone()) };
    let (df, cm, lp, co, hd, hi) = (sp("DF")?, sp("CM")?, sp("LP")?, sp("CO")?, sp("HD")?, sp("HI")?);
    let x = vec![df.clone(), cm.clone(), lp.clone()];
    let hd_co = vec![hd.clone(), co.clone()];
    let id = |ws: &[FiniteSpace]| Channel::identity(ws);

    let di = sp("DI")?;
    let alpha = t("BA")?
        .then(&t("DI")?)?
        .then(&Channel::wires(&[di], &[0, 0, 0])?)?
        .then(&t("DF")?.tensor(&t("CM")?).tensor(&t("LP")?))?;
    let co_x = Channel::wires(&x, &[2])?.then(&t("CO")?)?;
    let f = Channel::wires(&x, &[0, 1])?.then(&t("HD")?)?;
    let hi_lb = |pre: &Channel| -> Result<Channel> {
        // pre : HD⊗CO → HD⊗CM⊗LP
        pre.then(&id(&[hd.clone()]).tensor(&t("HI")?))?.then(&t("LB")?)
    };
    // X ↦ (HD, CO, CM, LP)
    let outputs_of_x = Channel::wires(&x, &[0, 1, 2, 0, 1, 2, 0, 1, 2])?
        .then(&f.tensor(&co_x).tensor(&Channel::wires(&x, &[1, 2])?))?;

    // (a) everything inside one box: the joint on (HD, CO, LB) conditioned on (HD, CO).
    let joint_all = alpha
        .then(&Channel::wires(&x, &[0, 1, 1, 2, 2])?)?
        .then(&t("HD")?.tensor(&t("HI")?).tensor(&t("CO")?))?
        .then(&Channel::wires(&[hd.clone(), hi.clone(), co.clone()], &[0, 2, 0, 1])?)?
        .then(&id(&hd_co).tensor(&t("LB")?))?;
    let a = condition(&joint_all, 2)?;

    // (b) hi and lb pulled out; the box conditions the joint on (HD, CO, CM, LP).
    let copy_hd = Channel::copy(&hd).tensor(&id(&[co.clone()]));
    let pulled = |box_: &Channel| hi_lb(&copy_hd.then(&id(&[hd.clone()]).tensor(box_))?);
    let b = pulled(&condition(&alpha.then(&outputs_of_x)?, 2)?)?;

    // (c) the joint on (CO, X) rewritten through c.
    let rho_co = alpha.then(&co_x)?;
    let c = dagger_state(&co_x, &alpha)?;
    let co_then_x = rho_co.then(&Channel::copy(&co))?.then(&id(&[co.clone()]).tensor(&c))?;
    let to_hd_co_cm_lp = id(&[co.clone()])
        .tensor(&Channel::copy_all(&x))
        .then(&id(&[co.clone()]).tensor(&f).tensor(&Channel::wires(&x, &[1, 2])?))?
        .then(&Channel::wires(&[co.clone(), hd.clone(), cm.clone(), lp.clone()], &[1, 0, 2, 3])?)?;
    let c_step = pulled(&condition(&co_then_x.then(&to_hd_co_cm_lp)?, 2)?)?;

    // (d) the CO part of the box removed: CO is fed into c and only HD is compared.
    let feed = id(&[hd.clone()]).tensor(&c.then(&Channel::copy_all(&x))?.then(&f.tensor(&id(&x)))?);
    let compare = Channel::cap(&hd).tensor(&Channel::wires(&x, &[1, 2])?);
    let d = pulled(&feed.then(&compare)?.nrm())?;

    // (e) the box is the channel dagger of f at c.
    let f_dagger = dagger_channel(&f, &c)?;
    let e = pulled(&f_dagger.then(&Channel::wires(&x, &[1, 2])?)?)?;

    Ok(vec![
        Step::new("(a)", a),
        Step::new("(b)", b),
        Step::new("(c)", c_step),
        Step::new("(d)", d),
        Step::new("(e)", e),
    ])
}

/// `P(B | A)` for two nodes computed as a dagger: invert `P(A | B)` at the marginal of `B`.
pub fn two_node_dagger(net: &NetworkSpec, a: &str, b: &str) -> Result<Channel> {
    let joint = net.joint(&[b, a])?;
    let a_given_b = disint(&joint, 1)?;
    let prior = joint.marginal(&[0])?;
    dagger_state(&a_given_b, &prior)
}
