//! Channels: dense matrices of exact weights between lists of wires.
//!
//! A channel `f : X₁⊗…⊗Xₙ → Y₁⊗…⊗Yₘ` assigns to every input tuple a subdistribution
//! over output tuples. Composition is the Kleisli composition of the subdistribution
//! monad, `(g∘f)(x)(z) = Σ_y f(x)(y)·g(y)(z)`. A state has no input wires and a
//! predicate has no output wires.

use std::collections::HashMap;
use std::fmt;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::kernel::{
    flat_index, for_each_tuple, normalize_row, parse_tuple_key, product_size, tuple_key, unflatten,
    FiniteSpace, Scalar, SubDist,
};

#[derive(Clone, PartialEq, Eq)]
pub struct Channel {
    inputs: Vec<FiniteSpace>,
    outputs: Vec<FiniteSpace>,
    /// Row-major: `data[row * cols + col]`.
    data: Vec<Scalar>,
}

/// Structural generators of the channel algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Identity,
    Swap,
    Copy,
    Discard,
    /// Keep only the wire at this position.
    Project(usize),
    Comparator,
    Cap,
    Truth,
}

/// Result of [`Channel::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    /// Every row has mass exactly one.
    pub total: bool,
    /// Total and every row is a point mass.
    pub deterministic: bool,
    /// Every matrix entry is strictly positive.
    pub full_support: bool,
}

fn names(spaces: &[FiniteSpace]) -> String {
    spaces.iter().map(FiniteSpace::name).collect::<Vec<_>>().join(", ")
}

fn check_wires(context: &str, expected: &[FiniteSpace], found: &[FiniteSpace]) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SpaceMismatch {
            context: context.to_string(),
            expected: names(expected),
            found: names(found),
        })
    }
}

impl Channel {
    /// Dense constructor. Validates non-negativity and the row-mass bound.
    pub fn from_dense(inputs: Vec<FiniteSpace>, outputs: Vec<FiniteSpace>, data: Vec<Scalar>) -> Result<Self> {
        let rows = product_size(&inputs);
        let cols = product_size(&outputs);
        if data.len() != rows * cols {
            return Err(Error::Arity(format!(
                "{} entries for a {rows}x{cols} channel",
                data.len()
            )));
        }
        let ch = Channel { inputs, outputs, data };
        for r in 0..rows {
            let row = ch.row(r);
            if let Some(w) = row.iter().find(|w| w.is_negative()) {
                return Err(Error::NegativeWeight {
                    context: format!("row `{}`", ch.input_key(r)),
                    weight: w.clone(),
                });
            }
            let mass: Scalar = row.iter().sum();
            if mass > Scalar::one() {
                return Err(Error::MassExceeded {
                    context: format!("row `{}`", ch.input_key(r)),
                    mass,
                });
            }
        }
        Ok(ch)
    }

    pub(crate) fn from_dense_unchecked(inputs: Vec<FiniteSpace>, outputs: Vec<FiniteSpace>, data: Vec<Scalar>) -> Self {
        debug_assert_eq!(data.len(), product_size(&inputs) * product_size(&outputs));
        Channel { inputs, outputs, data }
    }

    /// Builds a channel from tuple-keyed rows; unspecified entries are zero.
    ///
    /// Keys join element labels with ','. A channel without inputs uses the key "".
    pub fn from_table<K: AsRef<str>, L: AsRef<str>>(
        inputs: Vec<FiniteSpace>,
        outputs: Vec<FiniteSpace>,
        rows: &[(K, Vec<(L, Scalar)>)],
    ) -> Result<Self> {
        let cols = product_size(&outputs);
        let mut data = vec![Scalar::zero(); product_size(&inputs) * cols];
        for (key, entries) in rows {
            let r = flat_index(&inputs, &parse_tuple_key(&inputs, key.as_ref())?);
            for (okey, w) in entries {
                let c = flat_index(&outputs, &parse_tuple_key(&outputs, okey.as_ref())?);
                data[r * cols + c] += w;
            }
        }
        Channel::from_dense(inputs, outputs, data)
    }

    /// Builds a channel entrywise from element-index tuples.
    pub fn from_fn(
        inputs: Vec<FiniteSpace>,
        outputs: Vec<FiniteSpace>,
        mut f: impl FnMut(&[usize], &[usize]) -> Scalar,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(product_size(&inputs) * product_size(&outputs));
        for_each_tuple(&inputs, |i| for_each_tuple(&outputs, |o| data.push(f(i, o))));
        Channel::from_dense(inputs, outputs, data)
    }

    /// A deterministic channel sending each input tuple to the output tuple `f(x)`.
    pub fn deterministic(
        inputs: Vec<FiniteSpace>,
        outputs: Vec<FiniteSpace>,
        mut f: impl FnMut(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        let cols = product_size(&outputs);
        let mut data = vec![Scalar::zero(); product_size(&inputs) * cols];
        let mut err = None;
        let mut r = 0;
        for_each_tuple(&inputs, |i| {
            let o = f(i);
            if o.len() != outputs.len() || o.iter().zip(&outputs).any(|(&k, s)| k >= s.len()) {
                err.get_or_insert_with(|| Error::Arity(format!("deterministic map produced {o:?}")));
            } else {
                data[r * cols + flat_index(&outputs, &o)] = Scalar::one();
            }
            r += 1;
        });
        match err {
            Some(e) => Err(e),
            None => Ok(Channel::from_dense_unchecked(inputs, outputs, data)),
        }
    }

    /// A state with one output wire.
    pub fn from_state(state: &SubDist) -> Self {
        Channel::from_dense_unchecked(vec![], vec![state.space().clone()], state.weights().to_vec())
    }

    /// A state over several output wires, weights given in flattened order.
    pub fn joint_state(outputs: Vec<FiniteSpace>, weights: Vec<Scalar>) -> Result<Self> {
        Channel::from_dense(vec![], outputs, weights)
    }

    /// The channel that ignores its input and always returns `state`.
    pub fn constant(inputs: Vec<FiniteSpace>, state: &Channel) -> Result<Self> {
        if !state.is_state() {
            return Err(Error::Arity("constant channel needs a state".into()));
        }
        Ok(Channel::discard(&inputs).tensor(state))
    }

    // ---- generators -------------------------------------------------------

    /// Builds a structural generator over the given wires.
    ///
    /// Arity: `Identity`, `Discard`, `Truth` and `Project` take any wire list; `Swap`
    /// takes two; `Copy`, `Comparator` and `Cap` take one.
    pub fn generator(kind: Generator, spaces: &[FiniteSpace]) -> Result<Self> {
        let need = |n: usize| {
            if spaces.len() == n {
                Ok(())
            } else {
                Err(Error::Arity(format!("{kind:?} takes {n} wire(s), got {}", spaces.len())))
            }
        };
        match kind {
            Generator::Identity => Ok(Channel::identity(spaces)),
            Generator::Swap => {
                need(2)?;
                Ok(Channel::swap(&spaces[..1], &spaces[1..]))
            }
            Generator::Copy => {
                need(1)?;
                Ok(Channel::copy(&spaces[0]))
            }
            Generator::Discard | Generator::Truth => Ok(Channel::discard(spaces)),
            Generator::Project(k) => {
                if k >= spaces.len() {
                    return Err(Error::Arity(format!("projection {k} out of {} wires", spaces.len())));
                }
                Channel::wires(spaces, &[k])
            }
            Generator::Comparator => {
                need(1)?;
                Ok(Channel::comparator(&spaces[0]))
            }
            Generator::Cap => {
                need(1)?;
                Ok(Channel::cap(&spaces[0]))
            }
        }
    }

    /// Rewiring map: output wire `j` carries input wire `select[j]`.
    ///
    /// Covers identities, permutations, copies, discards and projections.
    pub fn wires(inputs: &[FiniteSpace], select: &[usize]) -> Result<Self> {
        if let Some(&bad) = select.iter().find(|&&k| k >= inputs.len()) {
            return Err(Error::Arity(format!("wire {bad} out of {} inputs", inputs.len())));
        }
        let outputs: Vec<FiniteSpace> = select.iter().map(|&k| inputs[k].clone()).collect();
        Channel::deterministic(inputs.to_vec(), outputs, |x| select.iter().map(|&k| x[k]).collect())
    }

    pub fn identity(spaces: &[FiniteSpace]) -> Self {
        let sel: Vec<usize> = (0..spaces.len()).collect();
        Channel::wires(spaces, &sel).expect("in range")
    }

    /// Exchanges the block `a` with the block `b`.
    pub fn swap(a: &[FiniteSpace], b: &[FiniteSpace]) -> Self {
        let inputs: Vec<FiniteSpace> = a.iter().chain(b).cloned().collect();
        let sel: Vec<usize> = (a.len()..inputs.len()).chain(0..a.len()).collect();
        Channel::wires(&inputs, &sel).expect("in range")
    }

    /// `Δ(x) = 1|x,x⟩`.
    pub fn copy(space: &FiniteSpace) -> Self {
        Channel::wires(std::slice::from_ref(space), &[0, 0]).expect("in range")
    }

    /// Copies a whole block of wires: `x̄ ↦ 1|x̄, x̄⟩`.
    pub fn copy_all(spaces: &[FiniteSpace]) -> Self {
        let sel: Vec<usize> = (0..spaces.len()).chain(0..spaces.len()).collect();
        Channel::wires(spaces, &sel).expect("in range")
    }

    /// The discarder, equal to the truth predicate `𝟙`.
    pub fn discard(spaces: &[FiniteSpace]) -> Self {
        Channel::wires(spaces, &[]).expect("in range")
    }

    /// `∇(x, x') = 1|x⟩` if `x = x'` and `0` otherwise.
    pub fn comparator(space: &FiniteSpace) -> Self {
        let inputs = vec![space.clone(), space.clone()];
        Channel::from_fn(inputs, vec![space.clone()], |i, o| {
            if i[0] == i[1] && i[0] == o[0] {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
        .expect("delta entries")
    }

    /// `𝟙 ∘ ∇`: weight one on the diagonal, zero elsewhere.
    pub fn cap(space: &FiniteSpace) -> Self {
        Channel::comparator(space).dom()
    }

    /// Comparator on a block of wires, comparing `a` against `b` wire by wire.
    pub fn comparator_all(spaces: &[FiniteSpace]) -> Self {
        let n = spaces.len();
        let interleave: Vec<usize> = (0..n).flat_map(|k| [k, n + k]).collect();
        let doubled: Vec<FiniteSpace> = spaces.iter().chain(spaces).cloned().collect();
        let mut out = Channel::identity(&[]);
        for s in spaces {
            out = out.tensor(&Channel::comparator(s));
        }
        Channel::wires(&doubled, &interleave)
            .expect("in range")
            .then(&out)
            .expect("matching wires")
    }

    /// Cap on a block of wires.
    pub fn cap_all(spaces: &[FiniteSpace]) -> Self {
        Channel::comparator_all(spaces).dom()
    }

    // ---- accessors --------------------------------------------------------

    pub fn inputs(&self) -> &[FiniteSpace] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[FiniteSpace] {
        &self.outputs
    }

    pub fn n_rows(&self) -> usize {
        product_size(&self.inputs)
    }

    pub fn n_cols(&self) -> usize {
        product_size(&self.outputs)
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        let c = self.n_cols();
        &self.data[r * c..(r + 1) * c]
    }

    pub fn entry(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.n_cols() + c]
    }

    pub fn is_state(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn is_predicate(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn input_key(&self, r: usize) -> String {
        tuple_key(&self.inputs, &unflatten(&self.inputs, r))
    }

    pub fn output_key(&self, c: usize) -> String {
        tuple_key(&self.outputs, &unflatten(&self.outputs, c))
    }

    pub fn row_index(&self, key: &str) -> Result<usize> {
        Ok(flat_index(&self.inputs, &parse_tuple_key(&self.inputs, key)?))
    }

    /// Row as a subdistribution over the flattened output space.
    pub fn row_dist(&self, r: usize) -> SubDist {
        SubDist::from_weights_unchecked(FiniteSpace::product(&self.outputs), self.row(r).to_vec())
    }

    /// The subdistribution `f(x)` for the input tuple with key `key`.
    pub fn apply(&self, key: &str) -> Result<SubDist> {
        Ok(self.row_dist(self.row_index(key)?))
    }

    /// Reads a state back as a subdistribution over the product of its outputs.
    pub fn to_subdist(&self) -> Result<SubDist> {
        if !self.is_state() {
            return Err(Error::Arity(format!(
                "channel with inputs [{}] is not a state",
                names(&self.inputs)
            )));
        }
        Ok(self.row_dist(0))
    }

    /// Row masses.
    pub fn row_masses(&self) -> Vec<Scalar> {
        (0..self.n_rows()).map(|r| self.row(r).iter().sum()).collect()
    }

    /// Indices of rows that are entirely zero.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.n_rows())
            .filter(|&r| self.row(r).iter().all(Scalar::is_zero))
            .collect()
    }

    // ---- algebra ----------------------------------------------------------

    /// Sequential composition `next ∘ self`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        check_wires("composition", &self.outputs, &next.inputs)?;
        let (rows, mid, cols) = (self.n_rows(), self.n_cols(), next.n_cols());
        let sparse: Vec<Vec<(usize, &Scalar)>> = (0..mid)
            .map(|j| next.row(j).iter().enumerate().filter(|(_, b)| !b.is_zero()).collect())
            .collect();
        let mut data = vec![Scalar::zero(); rows * cols];
        for i in 0..rows {
            let out = &mut data[i * cols..(i + 1) * cols];
            for (j, nz) in sparse.iter().enumerate() {
                let a = &self.data[i * mid + j];
                if a.is_zero() {
                    continue;
                }
                for &(k, b) in nz {
                    out[k] += a * b;
                }
            }
        }
        Ok(Channel::from_dense_unchecked(self.inputs.clone(), next.outputs.clone(), data))
    }

    /// Parallel composition; wire lists concatenate and weights multiply.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let inputs: Vec<FiniteSpace> = self.inputs.iter().chain(&other.inputs).cloned().collect();
        let outputs: Vec<FiniteSpace> = self.outputs.iter().chain(&other.outputs).cloned().collect();
        let (r1, c1, r2, c2) = (self.n_rows(), self.n_cols(), other.n_rows(), other.n_cols());
        let mut data = Vec::with_capacity(r1 * r2 * c1 * c2);
        for i1 in 0..r1 {
            for i2 in 0..r2 {
                for a in self.row(i1) {
                    for b in other.row(i2) {
                        data.push(if a.is_zero() || b.is_zero() { Scalar::zero() } else { a * b });
                    }
                }
            }
        }
        Channel::from_dense_unchecked(inputs, outputs, data)
    }

    /// `dom(f) = 𝟙 ∘ f`, the predicate of row masses.
    pub fn dom(&self) -> Channel {
        Channel::from_dense_unchecked(self.inputs.clone(), vec![], self.row_masses())
    }

    /// Row-wise normalisation; zero rows stay zero.
    pub fn nrm(&self) -> Channel {
        let mut data = Vec::with_capacity(self.data.len());
        for r in 0..self.n_rows() {
            data.extend(normalize_row(self.row(r)));
        }
        Channel::from_dense_unchecked(self.inputs.clone(), self.outputs.clone(), data)
    }

    /// Keeps the output wires listed in `keep` (in that order) and discards the rest.
    pub fn marginal(&self, keep: &[usize]) -> Result<Channel> {
        self.rewire(keep)
    }

    /// `self` followed by `Channel::wires(self.outputs(), select)`, computed without
    /// building the rewiring matrix.
    pub fn rewire(&self, select: &[usize]) -> Result<Channel> {
        if let Some(&bad) = select.iter().find(|&&k| k >= self.outputs.len()) {
            return Err(Error::Arity(format!("wire {bad} out of {} outputs", self.outputs.len())));
        }
        let outputs: Vec<FiniteSpace> = select.iter().map(|&k| self.outputs[k].clone()).collect();
        let (rows, n, cols) = (self.n_rows(), self.n_cols(), product_size(&outputs));
        let mut data = vec![Scalar::zero(); rows * cols];
        for c in 0..n {
            let t = unflatten(&self.outputs, c);
            let picked: Vec<usize> = select.iter().map(|&k| t[k]).collect();
            let oc = flat_index(&outputs, &picked);
            for r in 0..rows {
                let w = &self.data[r * n + c];
                if !w.is_zero() {
                    data[r * cols + oc] += w;
                }
            }
        }
        Ok(Channel::from_dense_unchecked(self.inputs.clone(), outputs, data))
    }

    /// Multiplies every entry by `s` in `[0, 1]`.
    pub fn scale(&self, s: &Scalar) -> Result<Channel> {
        if s.is_negative() || *s > Scalar::one() {
            return Err(Error::Invalid(format!("scale factor {s} is outside [0, 1]")));
        }
        Ok(Channel::from_dense_unchecked(
            self.inputs.clone(),
            self.outputs.clone(),
            self.data.iter().map(|w| w * s).collect(),
        ))
    }

    pub fn is_total(&self) -> bool {
        self.row_masses().iter().all(Scalar::is_one)
    }

    pub fn classify(&self) -> Classification {
        let total = self.is_total();
        let deterministic = total
            && (0..self.n_rows()).all(|r| self.row(r).iter().filter(|w| !w.is_zero()).count() == 1);
        let full_support = self.data.iter().all(Scalar::is_positive);
        Classification {
            total,
            deterministic,
            full_support,
        }
    }

    /// Exact entrywise equality; errors if the wire signatures differ.
    pub fn equals(&self, other: &Channel) -> Result<bool> {
        check_wires("equality (inputs)", &self.inputs, &other.inputs)?;
        check_wires("equality (outputs)", &self.outputs, &other.outputs)?;
        Ok(self.data == other.data)
    }

    /// First `(row, column)` where two same-signature channels differ.
    pub fn first_difference(&self, other: &Channel) -> Result<Option<(usize, usize)>> {
        if self.equals(other)? {
            return Ok(None);
        }
        let c = self.n_cols();
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| a != b)
            .map(|k| (k / c, k % c)))
    }

    // ---- serialization ----------------------------------------------------

    /// Canonical JSON: zero entries omitted, keys in space order.
    pub fn to_json(&self) -> Value {
        let mut rows = Map::new();
        for r in 0..self.n_rows() {
            let mut row = Map::new();
            for (c, w) in self.row(r).iter().enumerate() {
                if !w.is_zero() {
                    row.insert(self.output_key(c), Value::String(w.to_string()));
                }
            }
            rows.insert(self.input_key(r), Value::Object(row));
        }
        let mut obj = Map::new();
        obj.insert("inputs".into(), names_json(&self.inputs));
        obj.insert("outputs".into(), names_json(&self.outputs));
        obj.insert("rows".into(), Value::Object(rows));
        Value::Object(obj)
    }

    /// Parses the canonical JSON form, resolving space names through `spaces`.
    pub fn from_json(value: &Value, spaces: &HashMap<String, FiniteSpace>) -> Result<Channel> {
        let wire_list = |field: &str| -> Result<Vec<FiniteSpace>> {
            let arr = value
                .get(field)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Model(format!("channel JSON needs an array `{field}`")))?;
            arr.iter()
                .map(|n| {
                    let n = n.as_str().ok_or_else(|| Error::Model(format!("`{field}` must hold names")))?;
                    spaces
                        .get(n)
                        .cloned()
                        .ok_or_else(|| Error::Model(format!("unknown space `{n}`")))
                })
                .collect()
        };
        let inputs = wire_list("inputs")?;
        let outputs = wire_list("outputs")?;
        let rows = value
            .get("rows")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Model("channel JSON needs an object `rows`".into()))?;
        let mut table = Vec::with_capacity(rows.len());
        for (k, row) in rows {
            let row = row
                .as_object()
                .ok_or_else(|| Error::Model(format!("row `{k}` must be an object")))?;
            let entries = row
                .iter()
                .map(|(ok, w)| Ok((ok.clone(), scalar_from_json(w)?)))
                .collect::<Result<Vec<_>>>()?;
            table.push((k.clone(), entries));
        }
        Channel::from_table(inputs, outputs, &table)
    }
}

fn names_json(spaces: &[FiniteSpace]) -> Value {
    Value::Array(spaces.iter().map(|s| Value::String(s.name().to_string())).collect())
}

pub(crate) fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(n) => n.to_string().parse(),
        other => Err(Error::Model(format!("expected a probability, found {other}"))),
    }
}

impl fmt::Debug for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Channel[{}] -> [{}]", names(&self.inputs), names(&self.outputs))?;
        for r in 0..self.n_rows() {
            write!(f, "\n  {} ↦ {}", self.input_key(r), self.row_dist(r))?;
        }
        Ok(())
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n_rows() {
            if r > 0 {
                writeln!(f)?;
            }
            write!(f, "{} ↦ {}", self.input_key(r), self.row_dist(r))?;
        }
        Ok(())
    }
}

/// `g ∘ f`: first `f`, then `g`.
pub fn compose(f: &Channel, g: &Channel) -> Result<Channel> {
    f.then(g)
}

pub fn tensor(f: &Channel, g: &Channel) -> Channel {
    f.tensor(g)
}

/// Pushes a state forward along a channel (Kleisli extension).
///
/// The state lives on the flattened product of the channel's input wires.
pub fn pushforward(state: &SubDist, f: &Channel) -> Result<SubDist> {
    let expected = FiniteSpace::product(f.inputs());
    if *state.space() != expected {
        return Err(Error::SpaceMismatch {
            context: "pushforward".into(),
            expected: expected.name().to_string(),
            found: state.space().name().to_string(),
        });
    }
    let as_state = Channel::from_dense_unchecked(vec![], f.inputs().to_vec(), state.weights().to_vec());
    as_state.then(f)?.to_subdist()
}

pub fn channels_equal(f: &Channel, g: &Channel) -> Result<bool> {
    f.equals(g)
}
