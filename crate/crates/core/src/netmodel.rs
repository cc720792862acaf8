//! Bayesian networks: the model file format, validation, joint construction, and
//! the built-in example networks.
//!
//! A network is a list of nodes, each with a space, an ordered parent list and a
//! conditional probability table (a total channel from the parent product to the
//! node's space). A node may instead be an open input, which is what an intervention
//! leaves behind; its value is then supplied from outside and joints become channels.

use std::collections::HashMap;

use serde_json::{Map, Value};

use crate::channel::{scalar_from_json, Channel};
use crate::error::{Error, Result};
use crate::kernel::{flat_index, parse_tuple_key, product_size, tuple_key, unflatten, FiniteSpace, Scalar, SubDist};

/// Default bound on the number of entries of a dense joint.
pub const DEFAULT_MAX_JOINT: u128 = 1_000_000;

/// Environment variable overriding [`DEFAULT_MAX_JOINT`] in the command-line tool.
pub const MAX_JOINT_ENV: &str = "CHANCALC_MAX_JOINT";

/// Reads the joint-size limit from the environment, falling back to the default.
pub fn max_joint_from_env() -> Result<u128> {
    match std::env::var(MAX_JOINT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("{MAX_JOINT_ENV} must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_JOINT),
    }
}

/// How a node gets its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    /// Conditional probability table from the parents to the node's space.
    Table(Channel),
    /// Supplied from outside; the node becomes an input wire of every joint.
    OpenInput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSpec {
    pub name: String,
    pub space: FiniteSpace,
    pub parents: Vec<String>,
    pub mechanism: Mechanism,
    pub exogenous: bool,
}

impl NodeSpec {
    pub fn new(name: &str, space: &FiniteSpace, parents: &[&str], cpt: Channel) -> Self {
        NodeSpec {
            name: name.to_string(),
            space: space.clone(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            mechanism: Mechanism::Table(cpt),
            exogenous: false,
        }
    }

    /// A parentless node distributed as `state`.
    pub fn root(name: &str, state: &SubDist) -> Self {
        NodeSpec::new(name, state.space(), &[], Channel::from_state(state))
    }

    /// An exogenous noise node distributed as `state`.
    pub fn exogenous(name: &str, state: &SubDist) -> Self {
        NodeSpec {
            exogenous: true,
            ..NodeSpec::root(name, state)
        }
    }

    /// A node whose value is an input of the network.
    pub fn open(name: &str, space: &FiniteSpace) -> Self {
        NodeSpec {
            name: name.to_string(),
            space: space.clone(),
            parents: vec![],
            mechanism: Mechanism::OpenInput,
            exogenous: false,
        }
    }

    pub fn cpt(&self) -> Option<&Channel> {
        match &self.mechanism {
            Mechanism::Table(c) => Some(c),
            Mechanism::OpenInput => None,
        }
    }

    pub fn is_open(&self) -> bool {
        self.mechanism == Mechanism::OpenInput
    }
}

/// A validated network. Nodes are kept in a topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    spaces: Vec<FiniteSpace>,
    nodes: Vec<NodeSpec>,
    index: HashMap<String, usize>,
    max_joint: u128,
}

impl NetworkSpec {
    /// Validates the nodes and sorts them topologically (stable with respect to the given order).
    /// The space list is collected from the nodes in order of first appearance.
    pub fn new(nodes: Vec<NodeSpec>) -> Result<Self> {
        let mut spaces: Vec<FiniteSpace> = vec![];
        for n in &nodes {
            if !spaces.iter().any(|s| s.name() == n.space.name()) {
                spaces.push(n.space.clone());
            }
        }
        NetworkSpec::with_spaces(spaces, nodes)
    }

    /// Like [`NetworkSpec::new`] with an explicit space list, which must cover every node.
    pub fn with_spaces(spaces: Vec<FiniteSpace>, nodes: Vec<NodeSpec>) -> Result<Self> {
        for (i, s) in spaces.iter().enumerate() {
            if spaces[..i].iter().any(|t| t.name() == s.name()) {
                return Err(Error::Model(format!("space `{}` declared twice", s.name())));
            }
        }
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if seen.insert(n.name.as_str(), i).is_some() {
                return Err(Error::Model(format!("node `{}` declared twice", n.name)));
            }
            if !spaces.iter().any(|s| s == &n.space) {
                return Err(Error::Model(format!(
                    "node `{}` uses space `{}`, which is not declared with those elements",
                    n.name,
                    n.space.name()
                )));
            }
        }
        for n in &nodes {
            validate_node(n, &nodes, &seen)?;
        }
        let nodes = topological(nodes)?;
        let index = nodes.iter().enumerate().map(|(i, n)| (n.name.clone(), i)).collect();
        Ok(NetworkSpec {
            spaces,
            nodes,
            index,
            max_joint: DEFAULT_MAX_JOINT,
        })
    }

    /// Sets the bound on dense joint sizes used by [`NetworkSpec::joint_channel`].
    pub fn with_max_joint(mut self, limit: u128) -> Self {
        self.max_joint = limit;
        self
    }

    pub fn max_joint(&self) -> u128 {
        self.max_joint
    }

    pub fn spaces(&self) -> &[FiniteSpace] {
        &self.spaces
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn node_names(&self) -> Vec<&str> {
        self.nodes.iter().map(|n| n.name.as_str()).collect()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn node(&self, name: &str) -> Result<&NodeSpec> {
        Ok(&self.nodes[self.position(name)?])
    }

    /// Open-input nodes in topological order; these are the inputs of every joint channel.
    pub fn open_inputs(&self) -> Vec<&NodeSpec> {
        self.nodes.iter().filter(|n| n.is_open()).collect()
    }

    /// Returns a copy of the network with the named node replaced.
    pub fn replace_node(&self, replacement: NodeSpec) -> Result<NetworkSpec> {
        let at = self.position(&replacement.name)?;
        let mut nodes = self.nodes.clone();
        nodes[at] = replacement;
        let mut spaces = self.spaces.clone();
        if !spaces.iter().any(|s| s.name() == nodes[at].space.name()) {
            spaces.push(nodes[at].space.clone());
        }
        Ok(NetworkSpec::with_spaces(spaces, nodes)?.with_max_joint(self.max_joint))
    }

    fn resolve(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for &n in names {
            let i = self.position(n)?;
            if out.contains(&i) {
                return Err(Error::Invalid(format!("node `{n}` listed twice")));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// The joint over `keep` (in that order) as a channel from the open inputs.
    ///
    /// Nodes are added in topological order by copying the current wires and feeding
    /// the parents through the node's table. Wires that are neither kept nor needed by
    /// a later node are summed out as soon as possible.
    pub fn joint_channel(&self, keep: &[&str]) -> Result<Channel> {
        let keep = self.resolve(keep)?;
        let open: Vec<usize> = (0..self.nodes.len()).filter(|&i| self.nodes[i].is_open()).collect();
        let in_spaces: Vec<FiniteSpace> = open.iter().map(|&i| self.nodes[i].space.clone()).collect();
        let rows = product_size(&in_spaces) as u128;
        self.check_size(rows * rows)?;

        let mut pending = vec![0usize; self.nodes.len()];
        for n in &self.nodes {
            for p in &n.parents {
                pending[self.index[p]] += 1;
            }
        }
        let mut live = open.clone();
        let mut cur = Channel::identity(&in_spaces);
        for (i, node) in self.nodes.iter().enumerate() {
            let Some(cpt) = node.cpt() else { continue };
            let parents: Vec<usize> = node
                .parents
                .iter()
                .map(|p| live.iter().position(|&w| w == self.index[p]).expect("parent is live"))
                .collect();
            self.check_size(rows * cur.n_cols() as u128 * node.space.len() as u128)?;
            cur = extend(&cur, &parents, cpt);
            live.push(i);
            for p in &node.parents {
                pending[self.index[p]] -= 1;
            }
            let still: Vec<usize> = (0..live.len())
                .filter(|&k| pending[live[k]] > 0 || keep.contains(&live[k]))
                .collect();
            if still.len() < live.len() {
                cur = cur.rewire(&still)?;
                live = still.iter().map(|&k| live[k]).collect();
            }
        }
        let order: Vec<usize> = keep
            .iter()
            .map(|k| live.iter().position(|w| w == k).expect("kept wire is live"))
            .collect();
        cur.rewire(&order)
    }

    /// The joint over `keep` as a state; fails if the network has open inputs.
    pub fn joint(&self, keep: &[&str]) -> Result<Channel> {
        if let Some(n) = self.open_inputs().first() {
            return Err(Error::Invalid(format!(
                "node `{}` is an open input; use a joint channel instead of a joint state",
                n.name
            )));
        }
        self.joint_channel(keep)
    }

    /// The joint over `keep` as a subdistribution on the product of their spaces.
    pub fn joint_state(&self, keep: &[&str]) -> Result<SubDist> {
        self.joint(keep)?.to_subdist()
    }

    fn check_size(&self, entries: u128) -> Result<()> {
        if entries > self.max_joint {
            Err(Error::JointTooLarge {
                entries,
                limit: self.max_joint,
            })
        } else {
            Ok(())
        }
    }

    /// The model-file form: spaces in declaration order, nodes in topological order.
    pub fn to_json(&self) -> Value {
        let mut spaces = Map::new();
        for s in &self.spaces {
            spaces.insert(
                s.name().to_string(),
                Value::Array(s.elements().iter().map(|l| Value::String(l.clone())).collect()),
            );
        }
        let nodes = self.nodes.iter().map(node_json).collect();
        let mut obj = Map::new();
        obj.insert("spaces".into(), Value::Object(spaces));
        obj.insert("nodes".into(), Value::Array(nodes));
        Value::Object(obj)
    }

    /// Pretty-printed model file.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize")
    }
}

/// `cur ; copy ; (id ⊗ cpt∘parents)`, computed directly on the dense data.
fn extend(cur: &Channel, parents: &[usize], cpt: &Channel) -> Channel {
    let outs = cur.outputs();
    let pspaces: Vec<FiniteSpace> = parents.iter().map(|&p| outs[p].clone()).collect();
    let (rows, n, k) = (cur.n_rows(), cur.n_cols(), cpt.n_cols());
    let cpt_row: Vec<usize> = (0..n)
        .map(|c| {
            let t = unflatten(outs, c);
            let picked: Vec<usize> = parents.iter().map(|&p| t[p]).collect();
            flat_index(&pspaces, &picked)
        })
        .collect();
    let mut data = Vec::with_capacity(rows * n * k);
    for r in 0..rows {
        for (c, &pr) in cpt_row.iter().enumerate() {
            let w = cur.entry(r, c);
            for v in cpt.row(pr) {
                data.push(if w.is_zero() || v.is_zero() { Scalar::zero() } else { w * v });
            }
        }
    }
    let outputs = outs.iter().chain(cpt.outputs()).cloned().collect();
    Channel::from_dense_unchecked(cur.inputs().to_vec(), outputs, data)
}

fn validate_node(n: &NodeSpec, nodes: &[NodeSpec], index: &HashMap<&str, usize>) -> Result<()> {
    let mut parent_spaces = Vec::with_capacity(n.parents.len());
    for (i, p) in n.parents.iter().enumerate() {
        let Some(&at) = index.get(p.as_str()) else {
            return Err(Error::Model(format!("node `{}` has unknown parent `{p}`", n.name)));
        };
        if n.parents[..i].contains(p) {
            return Err(Error::Model(format!("node `{}` lists parent `{p}` twice", n.name)));
        }
        parent_spaces.push(nodes[at].space.clone());
    }
    if n.exogenous && !n.parents.is_empty() {
        return Err(Error::Model(format!("exogenous node `{}` must not have parents", n.name)));
    }
    let cpt = match &n.mechanism {
        Mechanism::OpenInput => {
            if !n.parents.is_empty() || n.exogenous {
                return Err(Error::Model(format!(
                    "open input `{}` cannot have parents or be exogenous",
                    n.name
                )));
            }
            return Ok(());
        }
        Mechanism::Table(c) => c,
    };
    if cpt.inputs() != parent_spaces.as_slice() || cpt.outputs() != std::slice::from_ref(&n.space) {
        return Err(Error::SpaceMismatch {
            context: format!("table of node `{}`", n.name),
            expected: signature(&parent_spaces, std::slice::from_ref(&n.space)),
            found: signature(cpt.inputs(), cpt.outputs()),
        });
    }
    for (r, mass) in cpt.row_masses().into_iter().enumerate() {
        if !mass.is_one() {
            return Err(Error::NotTotal {
                context: format!("node `{}` row `{}`", n.name, cpt.input_key(r)),
                mass,
            });
        }
    }
    Ok(())
}

fn signature(ins: &[FiniteSpace], outs: &[FiniteSpace]) -> String {
    let join = |ws: &[FiniteSpace]| ws.iter().map(FiniteSpace::name).collect::<Vec<_>>().join(", ");
    format!("{} -> {}", join(ins), join(outs))
}

/// Stable Kahn sort: repeatedly emits the earliest node whose parents are all placed.
fn topological(nodes: Vec<NodeSpec>) -> Result<Vec<NodeSpec>> {
    let mut placed: Vec<bool> = vec![false; nodes.len()];
    let mut placed_names: Vec<&str> = vec![];
    let mut order = Vec::with_capacity(nodes.len());
    while order.len() < nodes.len() {
        let next = (0..nodes.len())
            .find(|&i| !placed[i] && nodes[i].parents.iter().all(|p| placed_names.contains(&p.as_str())));
        match next {
            Some(i) => {
                placed[i] = true;
                placed_names.push(&nodes[i].name);
                order.push(i);
            }
            None => {
                let stuck = (0..nodes.len()).find(|&i| !placed[i]).expect("unplaced node exists");
                return Err(Error::Cycle(nodes[stuck].name.clone()));
            }
        }
    }
    let mut slots: Vec<Option<NodeSpec>> = nodes.into_iter().map(Some).collect();
    Ok(order.into_iter().map(|i| slots[i].take().expect("each node once")).collect())
}

fn node_json(n: &NodeSpec) -> Value {
    let mut obj = Map::new();
    obj.insert("name".into(), Value::String(n.name.clone()));
    obj.insert("space".into(), Value::String(n.space.name().to_string()));
    obj.insert(
        "parents".into(),
        Value::Array(n.parents.iter().map(|p| Value::String(p.clone())).collect()),
    );
    obj.insert("exogenous".into(), Value::Bool(n.exogenous));
    match &n.mechanism {
        Mechanism::OpenInput => {
            obj.insert("input".into(), Value::Bool(true));
        }
        Mechanism::Table(c) => {
            obj.insert("cpt".into(), c.to_json()["rows"].clone());
        }
    }
    Value::Object(obj)
}

/// Parses and validates a model file.
pub fn parse_network(text: &str) -> Result<NetworkSpec> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Model(format!("invalid JSON: {e}")))?;
    network_from_json(&value)
}

/// Builds a network from an already-parsed model document.
pub fn network_from_json(value: &Value) -> Result<NetworkSpec> {
    let top = value
        .as_object()
        .ok_or_else(|| Error::Model("model must be a JSON object".into()))?;
    if let Some(k) = top.keys().find(|k| !matches!(k.as_str(), "spaces" | "nodes")) {
        return Err(Error::Model(format!("unexpected top-level field `{k}`")));
    }
    let spaces_obj = top
        .get("spaces")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Model("model needs an object `spaces`".into()))?;
    let mut spaces = Vec::with_capacity(spaces_obj.len());
    for (name, labels) in spaces_obj {
        let labels = labels
            .as_array()
            .ok_or_else(|| Error::Model(format!("space `{name}` must be a list of labels")))?
            .iter()
            .map(|l| {
                l.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Model(format!("space `{name}` has a non-string label")))
            })
            .collect::<Result<Vec<_>>>()?;
        spaces.push(FiniteSpace::new(name.as_str(), &labels)?);
    }
    let by_name: HashMap<&str, &FiniteSpace> = spaces.iter().map(|s| (s.name(), s)).collect();
    let nodes_arr = top
        .get("nodes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Model("model needs an array `nodes`".into()))?;

    // Spaces of every node, needed to read parent tuple keys.
    let mut node_space: HashMap<String, FiniteSpace> = HashMap::new();
    for n in nodes_arr {
        let name = str_field(n, "name", "node")?;
        let space = str_field(n, "space", &format!("node `{name}`"))?;
        let space = by_name
            .get(space)
            .ok_or_else(|| Error::Model(format!("node `{name}` uses undeclared space `{space}`")))?;
        node_space.insert(name.to_string(), (*space).clone());
    }

    let mut nodes = Vec::with_capacity(nodes_arr.len());
    for n in nodes_arr {
        nodes.push(node_from_json(n, &node_space)?);
    }
    NetworkSpec::with_spaces(spaces, nodes)
}

fn str_field<'a>(v: &'a Value, field: &str, what: &str) -> Result<&'a str> {
    v.get(field)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Model(format!("{what} needs a string field `{field}`")))
}

fn node_from_json(v: &Value, node_space: &HashMap<String, FiniteSpace>) -> Result<NodeSpec> {
    let obj = v.as_object().ok_or_else(|| Error::Model("node must be an object".into()))?;
    let name = str_field(v, "name", "node")?.to_string();
    if let Some(k) = obj
        .keys()
        .find(|k| !matches!(k.as_str(), "name" | "space" | "parents" | "exogenous" | "cpt" | "input"))
    {
        return Err(Error::Model(format!("node `{name}` has unexpected field `{k}`")));
    }
    let space = node_space[&name].clone();
    let parents: Vec<String> = match obj.get("parents") {
        None => vec![],
        Some(Value::Array(ps)) => ps
            .iter()
            .map(|p| {
                p.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Model(format!("node `{name}` has a non-string parent")))
            })
            .collect::<Result<_>>()?,
        Some(_) => return Err(Error::Model(format!("node `{name}`: `parents` must be a list"))),
    };
    let exogenous = match obj.get("exogenous") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(Error::Model(format!("node `{name}`: `exogenous` must be a boolean"))),
    };
    let open = match obj.get("input") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(Error::Model(format!("node `{name}`: `input` must be a boolean"))),
    };
    let mechanism = match (open, obj.get("cpt")) {
        (true, None) => Mechanism::OpenInput,
        (true, Some(_)) => return Err(Error::Model(format!("open input `{name}` must not have a table"))),
        (false, None) => return Err(Error::Model(format!("node `{name}` needs a `cpt`"))),
        (false, Some(table)) => {
            let mut parent_spaces = Vec::with_capacity(parents.len());
            for p in &parents {
                let s = node_space
                    .get(p)
                    .ok_or_else(|| Error::Model(format!("node `{name}` has unknown parent `{p}`")))?;
                parent_spaces.push(s.clone());
            }
            Mechanism::Table(table_from_json(&name, table, parent_spaces, &space)?)
        }
    };
    Ok(NodeSpec {
        name,
        space,
        parents,
        mechanism,
        exogenous,
    })
}

fn table_from_json(name: &str, table: &Value, parents: Vec<FiniteSpace>, space: &FiniteSpace) -> Result<Channel> {
    let rows = table
        .as_object()
        .ok_or_else(|| Error::Model(format!("node `{name}`: `cpt` must be an object")))?;
    let cols = space.len();
    let n_rows = product_size(&parents);
    let mut data: Vec<Option<Vec<Scalar>>> = vec![None; n_rows];
    for (key, row) in rows {
        let r = flat_index(&parents, &parse_tuple_key(&parents, key)?);
        if data[r].is_some() {
            return Err(Error::Model(format!("node `{name}` row `{key}` given twice")));
        }
        let entries = row
            .as_object()
            .ok_or_else(|| Error::Model(format!("node `{name}` row `{key}` must be an object")))?;
        let mut weights = vec![Scalar::zero(); cols];
        for (label, w) in entries {
            let w = scalar_from_json(w)?;
            if w.is_negative() {
                return Err(Error::NegativeWeight {
                    context: format!("node `{name}` row `{key}`"),
                    weight: w,
                });
            }
            weights[space.index_of(label)?] = w;
        }
        data[r] = Some(weights);
    }
    let mut dense = Vec::with_capacity(n_rows * cols);
    for (r, row) in data.into_iter().enumerate() {
        let Some(row) = row else {
            let key = tuple_key(&parents, &unflatten(&parents, r));
            return Err(Error::Model(format!("node `{name}` is missing row `{key}`")));
        };
        dense.extend(row);
    }
    // Totality is checked with the node context by the network validation.
    Ok(Channel::from_dense_unchecked(parents, vec![space.clone()], dense))
}

// ---- built-in examples ----------------------------------------------------

/// Names accepted by [`builtin_example`].
pub const BUILTIN_NAMES: [&str; 5] = ["fault_tree", "child", "joins", "smoking_joint", "medical"];

/// A built-in example: a network, or for the smoking example a bare joint state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    Network(NetworkSpec),
    Joint(Channel),
}

pub fn builtin_example(name: &str) -> Result<Builtin> {
    Ok(match name {
        "fault_tree" => Builtin::Network(fault_tree()),
        "child" => Builtin::Network(child()),
        "joins" => Builtin::Network(joins()),
        "smoking_joint" => Builtin::Joint(smoking_joint()),
        "medical" => Builtin::Network(medical()),
        other => {
            return Err(Error::Invalid(format!(
                "unknown example `{other}`; expected one of {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    })
}

fn bit() -> FiniteSpace {
    FiniteSpace::bool_named("2")
}

fn flip(r: &str, space: &FiniteSpace) -> SubDist {
    SubDist::flip(r.parse().expect("fixture probability"), space).expect("fixture probability")
}

/// Deterministic table from binary parents to a binary space.
fn gate(parents: usize, out: &FiniteSpace, f: impl Fn(&[usize]) -> bool) -> Channel {
    Channel::deterministic(vec![bit(); parents], vec![out.clone()], |x| vec![usize::from(f(x))]).expect("gate")
}

/// Or-gate on bits.
pub fn or_gate() -> Channel {
    gate(2, &bit(), |x| x[0] == 1 || x[1] == 1)
}

/// And-gate on bits.
pub fn and_gate() -> Channel {
    gate(2, &bit(), |x| x[0] == 1 && x[1] == 1)
}

/// Wire names of the fault tree, left to right.
pub const FAULT_TREE_WIRES: [&str; 8] = ["w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8"];

/// The fault tree: leaves `w1 ~ flip(1/2)`, `w3 ~ flip(1/3)`, `w7 ~ flip(1/8)`,
/// `w8 ~ flip(1/7)`; gates `w2 = w1 ∨ w3`, `w4 = w2 ∧ w3`, `w6 = w7 ∨ w8` and the
/// top event `w5 = w4 ∧ w6`.
pub fn fault_tree() -> NetworkSpec {
    let b = bit();
    NetworkSpec::new(vec![
        NodeSpec::exogenous("w1", &flip("1/2", &b)),
        NodeSpec::exogenous("w3", &flip("1/3", &b)),
        NodeSpec::new("w2", &b, &["w1", "w3"], or_gate()),
        NodeSpec::new("w4", &b, &["w2", "w3"], and_gate()),
        NodeSpec::exogenous("w7", &flip("1/8", &b)),
        NodeSpec::exogenous("w8", &flip("1/7", &b)),
        NodeSpec::new("w6", &b, &["w7", "w8"], or_gate()),
        NodeSpec::new("w5", &b, &["w4", "w6"], and_gate()),
    ])
    .expect("fault tree fixture")
}

/// The Child network fragment (nine nodes, `BA` through `LB`).
pub fn child() -> NetworkSpec {
    parse_network(CHILD_MODEL).expect("child fixture")
}

/// Model file of the Child network.
pub const CHILD_MODEL: &str = include_str!("../models/child.json");

/// `Z, X, Y ~ flip(1/2)`, `A = X ∨ Z`, `B = Z ∨ Y`.
pub fn joins() -> NetworkSpec {
    let b = bit();
    let half = flip("1/2", &b);
    NetworkSpec::new(vec![
        NodeSpec::root("Z", &half),
        NodeSpec::root("X", &half),
        NodeSpec::root("Y", &half),
        NodeSpec::new("A", &b, &["X", "Z"], or_gate()),
        NodeSpec::new("B", &b, &["Z", "Y"], or_gate()),
    ])
    .expect("joins fixture")
}

/// Spaces `S`, `T`, `C` of the smoking example.
pub fn smoking_spaces() -> [FiniteSpace; 3] {
    [
        FiniteSpace::new("S", &["s", "~s"]).expect("space"),
        FiniteSpace::new("T", &["t", "~t"]).expect("space"),
        FiniteSpace::new("C", &["c", "~c"]).expect("space"),
    ]
}

/// The observed joint σ over smoking, tar and cancer.
pub fn smoking_joint() -> Channel {
    let weights = ["1/5", "1/50", "1/20", "1/10", "1/50", "1/100", "1/10", "1/2"];
    Channel::joint_state(
        smoking_spaces().to_vec(),
        weights.iter().map(|w| w.parse().expect("fixture weight")).collect(),
    )
    .expect("smoking fixture")
}

/// One network whose joint on `(S, T, C)` is σ: a hidden `G` distributed as the
/// `S`-marginal, `S = G`, `T` drawn from `P(t | s)` and `C` from `P(c | s = G, t)`.
/// `G` is the confounder between smoking and cancer.
pub fn smoking_network() -> NetworkSpec {
    let [s, t, c] = smoking_spaces();
    let g = FiniteSpace::new("G", s.elements()).expect("space");
    let sigma = smoking_joint();
    let ps = sigma.marginal(&[0]).expect("marginal").row(0).to_vec();
    let pst = sigma.marginal(&[0, 1]).expect("marginal");
    let t_given_s = crate::disint::disint(&pst, 1).expect("conditional");
    let c_given_st = crate::disint::disint(&sigma, 2).expect("conditional");
    let retype = |ch: &Channel, inputs: Vec<FiniteSpace>| {
        Channel::from_dense(inputs, ch.outputs().to_vec(), ch.data().to_vec()).expect("same shape")
    };
    NetworkSpec::new(vec![
        NodeSpec::exogenous("G", &SubDist::from_weights(&g, ps).expect("marginal")),
        NodeSpec::new("S", &s, &["G"], Channel::deterministic(vec![g.clone()], vec![s.clone()], |x| x.to_vec()).expect("copy")),
        NodeSpec::new("T", &t, &["S"], t_given_s),
        NodeSpec::new("C", &c, &["G", "T"], retype(&c_given_st, vec![g, t.clone()])),
    ])
    .expect("smoking network fixture")
}

/// The medical model with exogenous noise `Ur, Uz, Ux, Uy` and deterministic mechanisms
/// `Z = Ur ∧ Uz`, `X = [Z = Ux]`, `Y = f_y(X, Ur, Uy)`.
pub fn medical() -> NetworkSpec {
    let b = bit();
    let z = FiniteSpace::bool_named("Z");
    let x = FiniteSpace::bool_named("X");
    let y = FiniteSpace::bool_named("Y");
    let f_z = gate(2, &z, |u| u[0] == 1 && u[1] == 1);
    let f_x = Channel::deterministic(vec![z.clone(), b.clone()], vec![x.clone()], |u| vec![usize::from(u[0] == u[1])])
        .expect("f_x");
    let f_y = Channel::deterministic(vec![x.clone(), b.clone(), b.clone()], vec![y.clone()], |u| {
        let (a, r, c) = (u[0], u[1], u[2]);
        vec![usize::from((a == 1 && r == 1) || (a == 0 && r == 1 && c == 1) || (a == 0 && r == 0 && c == 0))]
    })
    .expect("f_y");
    NetworkSpec::new(vec![
        NodeSpec::exogenous("Ur", &flip("1/4", &b)),
        NodeSpec::exogenous("Uz", &flip("19/20", &b)),
        NodeSpec::exogenous("Ux", &flip("9/10", &b)),
        NodeSpec::exogenous("Uy", &flip("7/10", &b)),
        NodeSpec::new("Z", &z, &["Ur", "Uz"], f_z),
        NodeSpec::new("X", &x, &["Z", "Ux"], f_x),
        NodeSpec::new("Y", &y, &["X", "Ur", "Uy"], f_y),
    ])
    .expect("medical fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::q;

    /// Joint by enumerating every assignment and multiplying table entries.
    fn brute_joint(net: &NetworkSpec, keep: &[&str]) -> Vec<Scalar> {
        let spaces: Vec<FiniteSpace> = net.nodes().iter().map(|n| n.space.clone()).collect();
        let keep_pos: Vec<usize> = keep.iter().map(|k| net.position(k).unwrap()).collect();
        let keep_spaces: Vec<FiniteSpace> = keep_pos.iter().map(|&i| spaces[i].clone()).collect();
        let mut out = vec![Scalar::zero(); product_size(&keep_spaces)];
        for flat in 0..product_size(&spaces) {
            let t = unflatten(&spaces, flat);
            let mut w = Scalar::one();
            for (i, n) in net.nodes().iter().enumerate() {
                let ps: Vec<usize> = n.parents.iter().map(|p| t[net.position(p).unwrap()]).collect();
                let pspaces: Vec<FiniteSpace> = n.parents.iter().map(|p| net.node(p).unwrap().space.clone()).collect();
                w = w * n.cpt().unwrap().entry(flat_index(&pspaces, &ps), t[i]);
            }
            let picked: Vec<usize> = keep_pos.iter().map(|&i| t[i]).collect();
            out[flat_index(&keep_spaces, &picked)] += &w;
        }
        out
    }

    #[test]
    fn child_parses_and_has_full_joint_of_expected_size() {
        let net = child();
        assert_eq!(net.nodes().len(), 9);
        assert_eq!(
            net.spaces().iter().map(FiniteSpace::name).collect::<Vec<_>>(),
            ["BA", "DI", "DF", "CM", "LP", "CO", "HD", "HI", "LB"]
        );
        let ba = net.joint_state(&["BA"]).unwrap();
        assert_eq!(ba.weights(), &[q("1/10"), q("9/10")]);
        let names = net.node_names();
        let full = net.joint(&names).unwrap();
        assert_eq!(full.n_cols(), 23328);
        assert!(full.is_total());
    }

    #[test]
    fn joints_match_enumeration() {
        for net in [fault_tree(), joins(), medical()] {
            let names = net.node_names();
            let full = net.joint(&names).unwrap();
            assert_eq!(full.data(), &brute_joint(&net, &names)[..]);
            let pick = [names[names.len() - 1], names[0]];
            assert_eq!(net.joint(&pick).unwrap().data(), &brute_joint(&net, &pick)[..]);
        }
    }

    #[test]
    fn marginalisation_is_order_independent() {
        let net = child();
        let wide = net.joint(&["LB", "HD", "CO"]).unwrap();
        let narrow = net.joint(&["CO", "LB"]).unwrap();
        assert_eq!(wide.marginal(&[2, 0]).unwrap(), narrow);
    }

    #[test]
    fn smoking_fixtures() {
        let sigma = smoking_joint();
        assert_eq!(sigma.apply("").unwrap().get("s,t,c").unwrap(), &q("1/5"));
        let net = smoking_network();
        assert_eq!(net.joint(&["S", "T", "C"]).unwrap(), sigma);
        assert_eq!(net.joint_state(&["S"]).unwrap().weights(), &[q("37/100"), q("63/100")]);
    }

    #[test]
    fn joins_and_medical_spot_values() {
        assert_eq!(joins().joint_state(&["Z"]).unwrap().weights(), &[q("1/2"), q("1/2")]);
        let med = medical();
        let fx = med.node("X").unwrap().cpt().unwrap();
        assert_eq!(fx.apply("1,1").unwrap().weights(), &[Scalar::zero(), Scalar::one()]);
        assert_eq!(fx.apply("0,0").unwrap().weights(), &[Scalar::zero(), Scalar::one()]);
        assert_eq!(fx.apply("0,1").unwrap().weights(), &[Scalar::one(), Scalar::zero()]);
        assert_eq!(med.node("Ur").unwrap().cpt().unwrap().row(0), &[q("3/4"), q("1/4")]);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        for net in [fault_tree(), child(), joins(), medical(), smoking_network()] {
            let text = net.to_json_string();
            let back = parse_network(&text).unwrap();
            assert_eq!(back, net);
            assert_eq!(back.to_json_string(), text);
        }
    }

    #[test]
    fn validation_errors() {
        let bad_mass = r#"{"spaces":{"B":["0","1"]},"nodes":[
            {"name":"A","space":"B","parents":[],"cpt":{"":{"0":"0.5","1":"0.49"}}}]}"#;
        match parse_network(bad_mass) {
            Err(Error::NotTotal { context, .. }) => assert!(context.contains("`A`")),
            other => panic!("{other:?}"),
        }
        let cycle = r#"{"spaces":{"B":["0","1"]},"nodes":[
            {"name":"A","space":"B","parents":["C"],"cpt":{"0":{"0":1},"1":{"1":1}}},
            {"name":"C","space":"B","parents":["A"],"cpt":{"0":{"0":1},"1":{"1":1}}}]}"#;
        assert!(matches!(parse_network(cycle), Err(Error::Cycle(_))));
        let dangling = r#"{"spaces":{"B":["0","1"]},"nodes":[
            {"name":"A","space":"B","parents":["Q"],"cpt":{"0":{"0":1},"1":{"1":1}}}]}"#;
        assert!(matches!(parse_network(dangling), Err(Error::Model(_))));
        let missing = r#"{"spaces":{"B":["0","1"]},"nodes":[
            {"name":"A","space":"B","cpt":{"":{"0":"1/2","1":"1/2"}}},
            {"name":"C","space":"B","parents":["A"],"cpt":{"0":{"0":1}}}]}"#;
        assert!(matches!(parse_network(missing), Err(Error::Model(_))));
        assert!(matches!(joins().joint(&["Q"]), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn joint_limit_is_enforced() {
        let net = child().with_max_joint(1000);
        let names = net.node_names();
        assert!(matches!(net.joint(&names), Err(Error::JointTooLarge { .. })));
        assert!(net.joint(&["BA"]).is_ok());
    }

    #[test]
    fn open_inputs_become_channel_inputs() {
        let b = bit();
        let net = joins().replace_node(NodeSpec::open("X", &b)).unwrap();
        let ch = net.joint_channel(&["A"]).unwrap();
        assert_eq!(ch.inputs(), &[b.clone()]);
        assert_eq!(ch.apply("1").unwrap().weights(), &[Scalar::zero(), Scalar::one()]);
        assert_eq!(ch.apply("0").unwrap().weights(), &[q("1/2"), q("1/2")]);
        assert!(net.joint(&["A"]).is_err());
    }
}
