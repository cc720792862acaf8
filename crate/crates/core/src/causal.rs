//! Interventions, the front-door do-channel computed from a joint alone, and
//! counterfactuals through twin networks.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::Channel;
use crate::disint::disint;
use crate::error::{Error, Result};
use crate::inference::{infer_channel, QuerySpec};
use crate::kernel::SubDist;
use crate::netmodel::{Mechanism, NetworkSpec, NodeSpec};

/// What replaces the severed mechanism of an intervened node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    /// The node becomes an input wire.
    OpenInput,
    /// The node is drawn from a fixed state, independent of its former parents.
    ReplaceWith(SubDist),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterventionSpec {
    pub node: String,
    pub policy: Policy,
}

impl InterventionSpec {
    pub fn open(node: &str) -> Self {
        InterventionSpec {
            node: node.to_string(),
            policy: Policy::OpenInput,
        }
    }

    pub fn replace(node: &str, state: SubDist) -> Self {
        InterventionSpec {
            node: node.to_string(),
            policy: Policy::ReplaceWith(state),
        }
    }

    /// Reads `{"node": name, "policy": "open_input"}` or
    /// `{"node": name, "policy": {"replace_with": {label: weight}}}`; labels are
    /// resolved against the node's space in `net`.
    pub fn from_json(value: &Value, net: &NetworkSpec) -> Result<Self> {
        let node = value
            .get("node")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Model("intervention needs a string field `node`".into()))?;
        let space = &net.node(node)?.space;
        match value.get("policy") {
            Some(Value::String(s)) if s == "open_input" => Ok(InterventionSpec::open(node)),
            Some(Value::Object(o)) if o.len() == 1 && o.contains_key("replace_with") => {
                let weights = o["replace_with"]
                    .as_object()
                    .ok_or_else(|| Error::Model("`replace_with` must map labels to weights".into()))?;
                let pairs = weights
                    .iter()
                    .map(|(l, w)| Ok((l.as_str(), crate::channel::scalar_from_json(w)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(InterventionSpec::replace(node, SubDist::new(space, &pairs)?))
            }
            _ => Err(Error::Model(
                "intervention `policy` must be \"open_input\" or {\"replace_with\": {...}}".into(),
            )),
        }
    }
}

/// Severs the node from its parents and applies the policy.
pub fn intervene(net: &NetworkSpec, iv: &InterventionSpec) -> Result<NetworkSpec> {
    let old = net.node(&iv.node)?;
    let replacement = match &iv.policy {
        Policy::OpenInput => NodeSpec::open(&old.name, &old.space),
        Policy::ReplaceWith(state) => {
            if state.space() != &old.space {
                return Err(Error::SpaceMismatch {
                    context: format!("replacement state for `{}`", old.name),
                    expected: old.space.name().to_string(),
                    found: state.space().name().to_string(),
                });
            }
            if !state.is_proper() {
                return Err(Error::NotTotal {
                    context: format!("replacement state for `{}`", old.name),
                    mass: state.weight(),
                });
            }
            NodeSpec {
                exogenous: old.exogenous,
                ..NodeSpec::root(&old.name, state)
            }
        }
    };
    net.replace_node(replacement)
}

/// The interventional channel `cause → effect`: open the cause and read off the effect.
pub fn do_channel(net: &NetworkSpec, cause: &str, effect: &str) -> Result<Channel> {
    if cause == effect {
        return Err(Error::Invalid(format!("cause and effect are both `{cause}`")));
    }
    net.node(effect)?;
    if let Some(other) = net.open_inputs().iter().find(|n| n.name != cause) {
        return Err(Error::Invalid(format!(
            "node `{}` is already an open input; do-channels need a closed network",
            other.name
        )));
    }
    intervene(net, &InterventionSpec::open(cause))?.joint_channel(&[effect])
}

/// The effect of `S` on `C` from a joint `σ` on `S⊗T⊗C` with mediator `T`:
///
/// ```text
/// do(s)(c) = Σ_t P(t | s) · Σ_s' P(s') · P(c | s', t)
/// ```
///
/// assembled as `k ∘ (σ_S ⊗ g)` with `g = P(T | S)` and `k = P(C | S, T)` both
/// obtained by disintegration. Fails if a pair `(s', t)` with no conditional is
/// reached with positive weight.
pub fn front_door_do(sigma: &Channel) -> Result<Channel> {
    if !sigma.is_state() || sigma.outputs().len() != 3 {
        return Err(Error::Arity("front-door adjustment needs a joint state on three wires".into()));
    }
    if !sigma.is_total() {
        return Err(Error::NotTotal {
            context: "front-door joint".into(),
            mass: sigma.row_masses()[0].clone(),
        });
    }
    let g = disint(&sigma.marginal(&[0, 1])?, 1)?;
    let k = disint(sigma, 2)?;
    let prior = sigma.marginal(&[0])?;
    // S → S'⊗T: the weight with which each row of k is used.
    let reach = prior.tensor(&g);
    let dead = k.zero_rows();
    for r in 0..reach.n_rows() {
        for &d in &dead {
            if reach.entry(r, d).is_positive() {
                return Err(Error::Identifiability { row: k.input_key(d) });
            }
        }
    }
    reach.then(&k)
}

/// A counterfactual query on a network in randomness-pushback form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterfactualSpec {
    /// Exogenous nodes common to both worlds; other exogenous nodes are duplicated.
    pub shared: Vec<String>,
    /// `(node, label)` pairs imposed in the counterfactual world.
    pub forced: Vec<(String, String)>,
    /// Factual nodes observed as evidence.
    pub observed: Vec<String>,
    /// Counterfactual nodes asked about, by their base names.
    pub cf_target: Vec<String>,
}

impl CounterfactualSpec {
    /// Shares every exogenous node of `net`.
    pub fn sharing_all(net: &NetworkSpec, forced: &[(&str, &str)], observed: &[&str], cf_target: &[&str]) -> Self {
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        CounterfactualSpec {
            shared: net.nodes().iter().filter(|n| n.exogenous).map(|n| n.name.clone()).collect(),
            forced: forced.iter().map(|(n, v)| (n.to_string(), v.to_string())).collect(),
            observed: own(observed),
            cf_target: own(cf_target),
        }
    }
}

/// Name of the counterfactual copy of a node.
pub fn twin_name(name: &str) -> String {
    format!("{name}'")
}

/// Factual and counterfactual copies of every endogenous node, coupled through the
/// shared exogenous nodes. Copies are named with a trailing `'`; forced copies become
/// point masses.
pub fn twin_network(net: &NetworkSpec, cf: &CounterfactualSpec) -> Result<NetworkSpec> {
    for s in &cf.shared {
        if !net.node(s)?.exogenous {
            return Err(Error::Invalid(format!("shared node `{s}` is not exogenous")));
        }
    }
    for (n, v) in &cf.forced {
        let node = net.node(n)?;
        if node.exogenous {
            return Err(Error::Invalid(format!("cannot force exogenous node `{n}`")));
        }
        node.space.index_of(v)?;
    }
    let mut factual = Vec::with_capacity(net.nodes().len());
    let mut twins = vec![];
    for node in net.nodes() {
        factual.push(node.clone());
        if node.exogenous {
            if !cf.shared.contains(&node.name) {
                twins.push(NodeSpec {
                    name: twin_name(&node.name),
                    ..node.clone()
                });
            }
            continue;
        }
        let cpt = match &node.mechanism {
            Mechanism::Table(c) => c,
            Mechanism::OpenInput => {
                return Err(Error::Invalid(format!("open input `{}` has no mechanism to twin", node.name)))
            }
        };
        if !cpt.classify().deterministic {
            return Err(Error::NotDeterministic(node.name.clone()));
        }
        let twin = match cf.forced.iter().find(|(n, _)| n == &node.name) {
            Some((_, v)) => NodeSpec::root(&twin_name(&node.name), &SubDist::point(&node.space, v)?),
            None => {
                let parents: Vec<String> = node
                    .parents
                    .iter()
                    .map(|p| if cf.shared.contains(p) { p.clone() } else { twin_name(p) })
                    .collect();
                let parents: Vec<&str> = parents.iter().map(String::as_str).collect();
                NodeSpec::new(&twin_name(&node.name), &node.space, &parents, cpt.clone())
            }
        };
        twins.push(twin);
    }
    factual.extend(twins);
    Ok(NetworkSpec::with_spaces(net.spaces().to_vec(), factual)?.with_max_joint(net.max_joint()))
}

/// `observed → cf_target` on the twin network. A trailing `'` on target names is optional.
pub fn counterfactual_channel(net: &NetworkSpec, cf: &CounterfactualSpec) -> Result<Channel> {
    let twin = twin_network(net, cf)?;
    let targets: Vec<String> = cf
        .cf_target
        .iter()
        .map(|t| twin_name(t.strip_suffix('\'').unwrap_or(t)))
        .collect();
    let q = QuerySpec {
        evidence: cf.observed.clone(),
        target: targets,
    };
    infer_channel(&twin, &q)
}
