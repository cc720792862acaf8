#![allow(dead_code)]

use chancalc::channel::Channel;
use chancalc::kernel::{FiniteSpace, Scalar, SubDist};
use chancalc::netmodel::{NetworkSpec, NodeSpec};
use proptest::prelude::*;
use rand::Rng;

/// The space `{0, …, n-1}`, named by its size so equal sizes give equal spaces.
pub fn space(n: usize) -> FiniteSpace {
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    FiniteSpace::new(format!("S{n}"), &labels).unwrap()
}

pub fn spaces(sizes: &[usize]) -> Vec<FiniteSpace> {
    sizes.iter().map(|&n| space(n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Rows of mass at most one, zero rows allowed.
    Sub,
    /// Rows of mass exactly one.
    Total,
    /// Total with every entry positive.
    FullTotal,
    /// Every entry positive, rows of mass at most one.
    FullSub,
}

fn rows_to_channel(inputs: Vec<FiniteSpace>, outputs: Vec<FiniteSpace>, raw: Vec<(Vec<u32>, u32)>) -> Channel {
    let mut data = vec![];
    for (mut row, slack) in raw {
        if row.iter().all(|&w| w == 0) && slack == 0 {
            row[0] = 1;
        }
        let total: u32 = row.iter().sum::<u32>() + slack;
        data.extend(row.iter().map(|&w| Scalar::new(w.into(), total.into())));
    }
    Channel::from_dense(inputs, outputs, data).unwrap()
}

/// Random channel between the given wires.
pub fn arb_channel(inputs: Vec<FiniteSpace>, outputs: Vec<FiniteSpace>, kind: Kind) -> BoxedStrategy<Channel> {
    let rows: usize = inputs.iter().map(FiniteSpace::len).product();
    let cols: usize = outputs.iter().map(FiniteSpace::len).product();
    let lo = if matches!(kind, Kind::FullTotal | Kind::FullSub) { 1 } else { 0 };
    let slack = if matches!(kind, Kind::Sub | Kind::FullSub) { 0..=4u32 } else { 0..=0u32 };
    let row = (proptest::collection::vec(lo..=5u32, cols), slack);
    proptest::collection::vec(row, rows)
        .prop_map(move |raw| rows_to_channel(inputs.clone(), outputs.clone(), raw))
        .boxed()
}

/// Between one and `max` wire sizes in `1..=4`.
pub fn arb_sizes(min: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1..=4usize, min..=max)
}

/// A random proper distribution on `n` labels with small rational weights.
pub fn random_dist<R: Rng>(rng: &mut R, n: usize, allow_zero: bool) -> SubDist {
    let labels: Vec<String> = (0..n).map(|i| format!("l{i}")).collect();
    let s = FiniteSpace::new("L", &labels).unwrap();
    loop {
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(if allow_zero { 0 } else { 1 }..=20)).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return SubDist::from_weights(&s, raw.iter().map(|&w| Scalar::new(w, total)).collect()).unwrap();
        }
    }
}

/// A random network of `n` binary nodes; node `i` draws up to three parents among
/// earlier nodes. Table entries are multiples of 1/d with some zeros.
pub fn random_network<R: Rng>(rng: &mut R, n: usize) -> NetworkSpec {
    let b = FiniteSpace::bool_named("2");
    let mut nodes = vec![];
    for i in 0..n {
        let mut parents: Vec<usize> = (0..i).filter(|_| rng.gen_bool(0.5)).collect();
        parents.truncate(3);
        let names: Vec<String> = parents.iter().map(|p| format!("N{p}")).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let rows = 1usize << parents.len();
        let mut data = vec![];
        for _ in 0..rows {
            let d: i64 = rng.gen_range(1..=6);
            let k: i64 = rng.gen_range(0..=d);
            data.push(Scalar::new(d - k, d));
            data.push(Scalar::new(k, d));
        }
        let cpt = Channel::from_dense(vec![b.clone(); parents.len()], vec![b.clone()], data).unwrap();
        nodes.push(NodeSpec::new(&format!("N{i}"), &b, &names, cpt));
    }
    NetworkSpec::new(nodes).unwrap()
}

/// Conditional `P(target | evidence)` by enumerating every assignment of a binary
/// network and multiplying table entries; rows with zero evidence mass stay zero.
pub fn brute_conditional(net: &NetworkSpec, evidence: &[&str], target: &[&str]) -> Vec<Vec<Scalar>> {
    let nodes = net.nodes();
    let n = nodes.len();
    let pos = |name: &str| net.position(name).unwrap();
    let (ne, nt) = (evidence.len(), target.len());
    let mut table = vec![vec![Scalar::zero(); 1 << nt]; 1 << ne];
    for assign in 0..(1usize << n) {
        let bit = |i: usize| (assign >> (n - 1 - i)) & 1;
        let mut w = Scalar::one();
        for (i, node) in nodes.iter().enumerate() {
            let row = node.parents.iter().fold(0, |acc, p| acc * 2 + bit(pos(p)));
            w = w * node.cpt().unwrap().entry(row, bit(i));
        }
        let e = evidence.iter().fold(0, |acc, x| acc * 2 + bit(pos(x)));
        let t = target.iter().fold(0, |acc, x| acc * 2 + bit(pos(x)));
        table[e][t] += &w;
    }
    for row in &mut table {
        let m: Scalar = row.iter().sum();
        if !m.is_zero() {
            for w in row.iter_mut() {
                *w = &*w / &m;
            }
        }
    }
    table
}
