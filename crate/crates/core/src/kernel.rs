//! Exact scalars, finite spaces and subdistributions.
//!
//! Every probability in this crate is an exact rational. Spaces keep the element
//! order they were declared with, and every dense index is derived from it.
//! Products of spaces flatten row-major: the leftmost factor varies slowest.

use std::collections::HashMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always kept in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    /// `numer / denom`. Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        Scalar(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn recip(&self) -> Scalar {
        Scalar(self.0.recip())
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        Scalar(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` significant digits, rounding half to even.
    pub fn to_significant(&self, digits: u32) -> String {
        assert!(digits > 0);
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let v = self.0.abs();
        let ten = BigRational::from_integer(BigInt::from(10));
        // Find e with 10^e <= v < 10^(e+1).
        let mut e: i64 = 0;
        let mut probe = BigRational::one();
        if v >= probe {
            while v >= &probe * &ten {
                probe = probe * &ten;
                e += 1;
            }
        } else {
            while v < probe {
                probe = probe / &ten;
                e -= 1;
            }
        }
        let mut shift = digits as i64 - 1 - e;
        let mut n = round_half_even(&(v.clone() * pow10(shift)));
        if n == num_traits::pow(BigInt::from(10), digits as usize) {
            // Rounding carried into a new leading digit.
            shift -= 1;
            n = round_half_even(&(v * pow10(shift)));
        }
        let mut body = n.to_string();
        let out = if shift <= 0 {
            body.push_str(&"0".repeat((-shift) as usize));
            body
        } else {
            let shift = shift as usize;
            if body.len() <= shift {
                let pad = "0".repeat(shift - body.len());
                format!("0.{pad}{body}")
            } else {
                let (int, frac) = body.split_at(body.len() - shift);
                format!("{int}.{frac}")
            }
        };
        if neg {
            format!("-{out}")
        } else {
            out
        }
    }
}

fn pow10(exp: i64) -> BigRational {
    let base = BigRational::from_integer(num_traits::pow(BigInt::from(10), exp.unsigned_abs() as usize));
    if exp >= 0 {
        base
    } else {
        base.recip()
    }
}

fn round_half_even(x: &BigRational) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    let twice: BigInt = r * 2;
    match twice.cmp(x.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Accepts `p/q`, integers and plain decimals such as `0.43` (read as `43/100`).
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::ParseScalar(s.to_string());
        if t.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Scalar(BigRational::new(n, d)));
        }
        let (sign, digits) = match t.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let mut all = String::with_capacity(int.len() + frac.len());
        all.push_str(int);
        all.push_str(frac);
        let numer: BigInt = all.parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        Ok(Scalar(BigRational::new(numer * sign, denom)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Scalar::from_integer(n)),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                Scalar((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$m(rhs.0))
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0.$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Self {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Self {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

struct SpaceInner {
    name: String,
    elements: Vec<String>,
    index: HashMap<String, usize>,
}

/// A named finite set with a fixed element order.
///
/// Cloning is cheap. Two spaces are equal when both the name and the element list agree.
#[derive(Clone)]
pub struct FiniteSpace(Arc<SpaceInner>);

impl FiniteSpace {
    pub fn new<S: Into<String>, L: AsRef<str>>(name: S, elements: &[L]) -> Result<Self> {
        let name = name.into();
        if elements.is_empty() {
            return Err(Error::EmptySpace(name));
        }
        let mut index = HashMap::with_capacity(elements.len());
        let mut labels = Vec::with_capacity(elements.len());
        for (i, l) in elements.iter().enumerate() {
            let l = l.as_ref();
            if l.is_empty() || l.contains(',') {
                return Err(Error::InvalidLabel {
                    space: name,
                    label: l.to_string(),
                });
            }
            if index.insert(l.to_string(), i).is_some() {
                return Err(Error::DuplicateLabel {
                    space: name,
                    label: l.to_string(),
                });
            }
            labels.push(l.to_string());
        }
        Ok(FiniteSpace(Arc::new(SpaceInner {
            name,
            elements: labels,
            index,
        })))
    }

    /// The two-element space `{0, 1}` under the given name.
    pub fn bool_named(name: &str) -> Self {
        FiniteSpace::new(name, &["0", "1"]).expect("static labels")
    }

    /// The one-point space, the empty product.
    pub fn unit() -> Self {
        let mut index = HashMap::new();
        index.insert(String::new(), 0);
        FiniteSpace(Arc::new(SpaceInner {
            name: "I".into(),
            elements: vec![String::new()],
            index,
        }))
    }

    /// Flattened product of `factors`; labels are the factor labels joined with ','.
    pub fn product(factors: &[FiniteSpace]) -> Self {
        match factors {
            [] => FiniteSpace::unit(),
            [single] => single.clone(),
            _ => {
                let name = factors.iter().map(|f| f.name()).collect::<Vec<_>>().join("⊗");
                let mut labels = Vec::with_capacity(product_size(factors));
                for_each_tuple(factors, |tuple| {
                    labels.push(tuple_key(factors, tuple));
                });
                let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
                FiniteSpace(Arc::new(SpaceInner {
                    name,
                    elements: labels,
                    index,
                }))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn elements(&self) -> &[String] {
        &self.0.elements
    }

    pub fn len(&self) -> usize {
        self.0.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.elements[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.0.index.get(label).copied().ok_or_else(|| Error::UnknownLabel {
            space: self.name().to_string(),
            label: label.to_string(),
        })
    }
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name && self.0.elements == other.0.elements)
    }
}

impl Eq for FiniteSpace {}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.name(), self.elements().join(","))
    }
}

impl fmt::Display for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn product_size(spaces: &[FiniteSpace]) -> usize {
    spaces.iter().map(FiniteSpace::len).product()
}

/// Row-major flat index of a tuple of element indices.
pub(crate) fn flat_index(spaces: &[FiniteSpace], tuple: &[usize]) -> usize {
    debug_assert_eq!(spaces.len(), tuple.len());
    spaces
        .iter()
        .zip(tuple)
        .fold(0, |acc, (s, &i)| acc * s.len() + i)
}

/// Inverse of [`flat_index`].
pub(crate) fn unflatten(spaces: &[FiniteSpace], mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; spaces.len()];
    for (slot, s) in out.iter_mut().zip(spaces).rev() {
        *slot = flat % s.len();
        flat /= s.len();
    }
    out
}

/// Visits every tuple of the product in flat-index order.
pub(crate) fn for_each_tuple(spaces: &[FiniteSpace], mut f: impl FnMut(&[usize])) {
    let n = product_size(spaces);
    let mut tuple = vec![0usize; spaces.len()];
    for _ in 0..n {
        f(&tuple);
        for k in (0..spaces.len()).rev() {
            tuple[k] += 1;
            if tuple[k] < spaces[k].len() {
                break;
            }
            tuple[k] = 0;
        }
    }
}

/// Labels of a tuple joined with ','; the empty tuple is "".
pub fn tuple_key(spaces: &[FiniteSpace], tuple: &[usize]) -> String {
    spaces
        .iter()
        .zip(tuple)
        .map(|(s, &i)| s.label(i))
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses a ','-joined tuple key against the given spaces.
pub fn parse_tuple_key(spaces: &[FiniteSpace], key: &str) -> Result<Vec<usize>> {
    if spaces.is_empty() {
        return if key.is_empty() {
            Ok(vec![])
        } else {
            Err(Error::Arity(format!("key `{key}` given for an empty wire list")))
        };
    }
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != spaces.len() {
        return Err(Error::Arity(format!(
            "key `{key}` has {} components, expected {}",
            parts.len(),
            spaces.len()
        )));
    }
    spaces.iter().zip(parts).map(|(s, p)| s.index_of(p)).collect()
}

/// A finite subdistribution: non-negative weights with total mass at most one.
#[derive(Clone, PartialEq, Eq)]
pub struct SubDist {
    space: FiniteSpace,
    weights: Vec<Scalar>,
}

impl SubDist {
    /// Builds a subdistribution from labelled weights; unlisted labels get weight zero.
    pub fn new<L: AsRef<str>>(space: &FiniteSpace, weights: &[(L, Scalar)]) -> Result<Self> {
        let mut dense = vec![Scalar::zero(); space.len()];
        for (label, w) in weights {
            let i = space.index_of(label.as_ref())?;
            dense[i] += w;
        }
        SubDist::from_weights(space, dense)
    }

    /// Dense constructor in the space's element order.
    pub fn from_weights(space: &FiniteSpace, weights: Vec<Scalar>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::Arity(format!(
                "{} weights for space {space} of size {}",
                weights.len(),
                space.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::NegativeWeight {
                context: format!("subdistribution on {space}"),
                weight: w.clone(),
            });
        }
        let mass: Scalar = weights.iter().sum();
        if mass > Scalar::one() {
            return Err(Error::MassExceeded {
                context: format!("subdistribution on {space}"),
                mass,
            });
        }
        Ok(SubDist {
            space: space.clone(),
            weights,
        })
    }

    pub(crate) fn from_weights_unchecked(space: FiniteSpace, weights: Vec<Scalar>) -> Self {
        debug_assert_eq!(weights.len(), space.len());
        SubDist { space, weights }
    }

    pub fn zero(space: &FiniteSpace) -> Self {
        SubDist::from_weights_unchecked(space.clone(), vec![Scalar::zero(); space.len()])
    }

    /// `r|1⟩ + (1-r)|0⟩` on a two-element space whose second element plays the role of 1.
    pub fn flip(r: Scalar, space: &FiniteSpace) -> Result<Self> {
        if space.len() != 2 {
            return Err(Error::Arity(format!(
                "flip needs a two-element space, {space} has {}",
                space.len()
            )));
        }
        if r.is_negative() || r > Scalar::one() {
            return Err(Error::Invalid(format!("flip bias {r} is outside [0, 1]")));
        }
        let other = Scalar::one() - &r;
        SubDist::from_weights(space, vec![other, r])
    }

    pub fn uniform(space: &FiniteSpace) -> Self {
        let w = Scalar::new(1, space.len() as i64);
        SubDist::from_weights_unchecked(space.clone(), vec![w; space.len()])
    }

    pub fn point(space: &FiniteSpace, label: &str) -> Result<Self> {
        let i = space.index_of(label)?;
        Ok(SubDist::point_at(space, i))
    }

    pub(crate) fn point_at(space: &FiniteSpace, i: usize) -> Self {
        let mut w = vec![Scalar::zero(); space.len()];
        w[i] = Scalar::one();
        SubDist::from_weights_unchecked(space.clone(), w)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    pub fn get(&self, label: &str) -> Result<&Scalar> {
        Ok(&self.weights[self.space.index_of(label)?])
    }

    /// Total mass `Σ ω(x)`.
    pub fn weight(&self) -> Scalar {
        self.weights.iter().sum()
    }

    pub fn is_proper(&self) -> bool {
        self.weight().is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(Scalar::is_zero)
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(Scalar::is_positive)
    }

    /// Rescales to total mass one; the zero subdistribution stays zero.
    pub fn normalize(&self) -> SubDist {
        SubDist::from_weights_unchecked(self.space.clone(), normalize_row(&self.weights))
    }

    /// Product measure on the product space.
    pub fn tensor(&self, other: &SubDist) -> SubDist {
        let space = FiniteSpace::product(&[self.space.clone(), other.space.clone()]);
        let mut w = Vec::with_capacity(space.len());
        for a in &self.weights {
            for b in &other.weights {
                w.push(a * b);
            }
        }
        SubDist::from_weights_unchecked(space, w)
    }

    /// `s·ω` for a scalar `0 <= s <= 1`.
    pub fn scale(&self, s: &Scalar) -> Result<SubDist> {
        if s.is_negative() || *s > Scalar::one() {
            return Err(Error::Invalid(format!("scale factor {s} is outside [0, 1]")));
        }
        Ok(SubDist::from_weights_unchecked(
            self.space.clone(),
            self.weights.iter().map(|w| w * s).collect(),
        ))
    }

    /// Iterates over `(label, weight)` pairs with non-zero weight.
    pub fn support(&self) -> impl Iterator<Item = (&str, &Scalar)> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(move |(i, w)| (self.space.label(i), w))
    }
}

impl fmt::Debug for SubDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SubDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.support().map(|(l, w)| format!("{w}|{l}⟩")).collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

pub(crate) fn normalize_row(row: &[Scalar]) -> Vec<Scalar> {
    let mass: Scalar = row.iter().sum();
    if mass.is_zero() {
        return row.to_vec();
    }
    let inv = mass.recip();
    row.iter().map(|w| w * &inv).collect()
}

/// Builds a scalar from a `p/q` or decimal literal; panics on malformed input.
///
/// Meant for fixtures and tests where the literal is known to be valid.
pub fn q(s: &str) -> Scalar {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two() -> FiniteSpace {
        FiniteSpace::new("2", &["0", "1"]).unwrap()
    }

    #[test]
    fn make_space_keeps_order() {
        let di = FiniteSpace::new("DI", &["pfc", "tga", "flt", "pis", "tpd", "lng"]).unwrap();
        assert_eq!(di.len(), 6);
        assert_eq!(di.label(2), "flt");
        assert_eq!(two().len(), 2);
    }

    #[test]
    fn make_space_rejects_empty_and_duplicates() {
        let empty: [&str; 0] = [];
        assert!(matches!(FiniteSpace::new("X", &empty), Err(Error::EmptySpace(_))));
        assert!(matches!(
            FiniteSpace::new("X", &["a", "a"]),
            Err(Error::DuplicateLabel { .. })
        ));
        assert!(matches!(FiniteSpace::new("X", &["a,b"]), Err(Error::InvalidLabel { .. })));
    }

    #[test]
    fn scalar_parsing() {
        assert_eq!(q("0.43"), Scalar::new(43, 100));
        assert_eq!(q("19/20"), Scalar::new(19, 20));
        assert_eq!(q("2/4"), Scalar::new(1, 2));
        assert_eq!(q("1"), Scalar::one());
        assert_eq!(q(".5"), Scalar::new(1, 2));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!("0.1.2".parse::<Scalar>().is_err());
        assert_eq!(Scalar::new(3, 6).to_string(), "1/2");
    }

    #[test]
    fn significant_digits_round_half_even() {
        assert_eq!(Scalar::new(1, 46).to_significant(4), "0.02174");
        assert_eq!(Scalar::one().to_significant(4), "1.000");
        assert_eq!(q("0.12345").to_significant(4), "0.1234");
        assert_eq!(q("0.12355").to_significant(4), "0.1236");
        assert_eq!(q("0.99996").to_significant(4), "1.000");
        assert_eq!(q("1234.5").to_significant(4), "1234");
        assert_eq!(q("12345").to_significant(2), "12000");
        assert_eq!(Scalar::zero().to_significant(4), "0");
    }

    #[test]
    fn make_subdist_examples() {
        let f = SubDist::new(&two(), &[("1", q("1/2")), ("0", q("1/2"))]).unwrap();
        assert_eq!(f, SubDist::flip(q("1/2"), &two()).unwrap());
        let ab = FiniteSpace::new("AB", &["a", "b"]).unwrap();
        let none: [(&str, Scalar); 0] = [];
        let z = SubDist::new(&ab, &none).unwrap();
        assert!(z.is_zero());
        assert!(matches!(
            SubDist::new(&ab, &[("a", q("3/4")), ("b", q("1/2"))]),
            Err(Error::MassExceeded { .. })
        ));
        assert!(matches!(SubDist::new(&ab, &[("c", q("1/2"))]), Err(Error::UnknownLabel { .. })));
        assert!(matches!(
            SubDist::new(&ab, &[("a", q("-1/2"))]),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(SubDist::flip(q("0.3"), &two()).unwrap().weight(), Scalar::one());
        let s = SubDist::new(&two(), &[("1", q("1/2")), ("0", q("1/4"))]).unwrap();
        assert_eq!(s.weight(), q("3/4"));
        assert_eq!(SubDist::zero(&two()).weight(), Scalar::zero());
    }

    #[test]
    fn normalize_examples() {
        let ab = FiniteSpace::new("AB", &["a", "b"]).unwrap();
        let s = SubDist::new(&ab, &[("a", q("1/4")), ("b", q("1/4"))]).unwrap();
        assert_eq!(s.normalize(), SubDist::uniform(&ab));
        assert_eq!(SubDist::zero(&ab).normalize(), SubDist::zero(&ab));
        let third = SubDist::flip(q("1/3"), &two()).unwrap();
        assert_eq!(third.normalize(), third);
    }

    #[test]
    fn tensor_examples() {
        let h = SubDist::flip(q("1/2"), &two()).unwrap();
        let hh = h.tensor(&h);
        assert!(hh.weights().iter().all(|w| *w == q("1/4")));
        assert!(h.tensor(&SubDist::zero(&two())).is_zero());

        // (1/4 · 19/20, 1/4 · 1/20, 3/4 · 19/20, 3/4 · 1/20) on the labels (1,1),(1,0),(0,1),(0,0).
        let a = SubDist::flip(q("1/4"), &two()).unwrap();
        let b = SubDist::flip(q("19/20"), &two()).unwrap();
        let ab = a.tensor(&b);
        assert_eq!(ab.get("1,1").unwrap(), &q("19/80"));
        assert_eq!(ab.get("1,0").unwrap(), &q("1/80"));
        assert_eq!(ab.get("0,1").unwrap(), &q("57/80"));
        assert_eq!(ab.get("0,0").unwrap(), &q("3/80"));
    }

    #[test]
    fn standard_states() {
        assert_eq!(
            SubDist::flip(Scalar::one(), &two()).unwrap(),
            SubDist::point(&two(), "1").unwrap()
        );
        let s = FiniteSpace::new("S", &["s", "~s"]).unwrap();
        assert_eq!(SubDist::uniform(&s).weights(), &[q("1/2"), q("1/2")]);
        let ba = FiniteSpace::new("BA", &["ba", "~ba"]).unwrap();
        assert_eq!(SubDist::point(&ba, "ba").unwrap().get("ba").unwrap(), &Scalar::one());
        let three = FiniteSpace::new("3", &["a", "b", "c"]).unwrap();
        assert!(SubDist::flip(q("1/2"), &three).is_err());
        assert!(SubDist::point(&ba, "zz").is_err());
    }

    #[test]
    fn flat_index_is_row_major() {
        let a = FiniteSpace::new("A", &["a0", "a1"]).unwrap();
        let b = FiniteSpace::new("B", &["b0", "b1", "b2"]).unwrap();
        let spaces = [a, b];
        assert_eq!(flat_index(&spaces, &[1, 0]), 3);
        assert_eq!(unflatten(&spaces, 5), vec![1, 2]);
        let mut seen = vec![];
        for_each_tuple(&spaces, |t| seen.push(flat_index(&spaces, t)));
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
        assert_eq!(parse_tuple_key(&spaces, "a1,b2").unwrap(), vec![1, 2]);
    }

    fn arb_subdist() -> impl Strategy<Value = SubDist> {
        (1usize..=4).prop_flat_map(|n| {
            (prop::collection::vec(0u32..6, n), 0u32..6).prop_map(move |(ws, slack)| {
                let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
                let space = FiniteSpace::new("X", &labels).unwrap();
                let total: u32 = ws.iter().sum::<u32>() + slack;
                let total = total.max(1) as i64;
                let w = ws.iter().map(|&k| Scalar::new(k as i64, total)).collect();
                SubDist::from_weights(&space, w).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn mass_stays_in_unit_interval(w in arb_subdist(), v in arb_subdist()) {
            for d in [w.normalize(), w.tensor(&v), v.normalize()] {
                prop_assert!(d.weights().iter().all(|x| !x.is_negative()));
                prop_assert!(d.weight() <= Scalar::one());
            }
        }

        #[test]
        fn normalize_is_idempotent(w in arb_subdist()) {
            prop_assert_eq!(w.normalize().normalize(), w.normalize());
        }

        #[test]
        fn normalize_is_scale_invariant(w in arb_subdist(), k in 1i64..20, extra in 0i64..20) {
            let s = Scalar::new(k, k + extra);
            prop_assert_eq!(w.scale(&s).unwrap().normalize(), w.normalize());
        }

        #[test]
        fn tensor_weight_is_multiplicative(w in arb_subdist(), v in arb_subdist()) {
            prop_assert_eq!(w.tensor(&v).weight(), w.weight() * v.weight());
        }

        #[test]
        fn tensor_is_associative(a in arb_subdist(), b in arb_subdist(), c in arb_subdist()) {
            let left = a.tensor(&b).tensor(&c);
            let right = a.tensor(&b.tensor(&c));
            prop_assert_eq!(left.weights(), right.weights());
        }
    }
}
