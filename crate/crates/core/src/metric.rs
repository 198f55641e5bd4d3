//! Distance matrices, transmissions and metric validation.
//!
//! Graph distances stay as exact `u64` values; general finite metric spaces
//! use `f64`. Code that is generic over both goes through [`Distance`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative slack used when comparing real-valued distances.
pub const REAL_RELATIVE_TOL: f64 = 1e-12;

/// Number type usable as a distance.
pub trait Distance:
    Copy
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + 'static
{
    const ZERO: Self;

    fn to_f64(self) -> f64;

    fn times(self, k: u64) -> Self;

    /// Exact value for integers, plain float for reals.
    fn to_value(self) -> Value;

    /// Whether `lhs > rhs` beyond this type's comparison slack.
    fn exceeds(lhs: Self, rhs: Self) -> bool;

    /// Compares `an / ad` with `bn / bd` for positive denominators.
    fn cmp_fractions(an: Self, ad: Self, bn: Self, bd: Self) -> Ordering;
}

impl Distance for u64 {
    const ZERO: Self = 0;

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn times(self, k: u64) -> Self {
        self * k
    }

    fn to_value(self) -> Value {
        Value::Exact(BigRational::from_integer(BigInt::from(self)))
    }

    fn exceeds(lhs: Self, rhs: Self) -> bool {
        lhs > rhs
    }

    fn cmp_fractions(an: Self, ad: Self, bn: Self, bd: Self) -> Ordering {
        (an as u128 * bd as u128).cmp(&(bn as u128 * ad as u128))
    }
}

impl Distance for f64 {
    const ZERO: Self = 0.0;

    fn to_f64(self) -> f64 {
        self
    }

    fn times(self, k: u64) -> Self {
        self * k as f64
    }

    fn to_value(self) -> Value {
        Value::Real(self)
    }

    fn exceeds(lhs: Self, rhs: Self) -> bool {
        lhs > rhs + REAL_RELATIVE_TOL * rhs.abs().max(1.0)
    }

    fn cmp_fractions(an: Self, ad: Self, bn: Self, bd: Self) -> Ordering {
        let a = an / ad;
        let b = bn / bd;
        if (a - b).abs() <= REAL_RELATIVE_TOL * a.abs().max(b.abs()) {
            Ordering::Equal
        } else {
            a.partial_cmp(&b).unwrap_or(Ordering::Equal)
        }
    }
}

/// A scalar that is exact when the inputs were integers.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Real(f64),
}

impl Value {
    pub fn exact(num: i64, den: i64) -> Self {
        Value::Exact(BigRational::new(num.into(), den.into()))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Real(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Real(_) => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_negative(),
            Value::Real(x) => *x < 0.0,
        }
    }

    fn binop(
        &self,
        other: &Value,
        exact: impl Fn(&BigRational, &BigRational) -> BigRational,
        real: impl Fn(f64, f64) -> f64,
    ) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(exact(a, b)),
            _ => Value::Real(real(self.to_f64(), other.to_f64())),
        }
    }

    pub fn add(&self, o: &Value) -> Value {
        self.binop(o, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, o: &Value) -> Value {
        self.binop(o, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, o: &Value) -> Value {
        self.binop(o, |a, b| a * b, |a, b| a * b)
    }

    pub fn div(&self, o: &Value) -> Value {
        self.binop(o, |a, b| a / b, |a, b| a / b)
    }

    /// Exact comparison when both sides are exact; plain float comparison
    /// otherwise.
    pub fn compare(&self, o: &Value) -> Ordering {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&o.to_f64()).unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Value::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Real(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Exact(r) => {
                let mut st = s.serialize_struct("Rational", 3)?;
                st.serialize_field("num", &big_to_json(r.numer()))?;
                st.serialize_field("den", &big_to_json(r.denom()))?;
                st.serialize_field("decimal", &rational_to_f64(r))?;
                st.end()
            }
            Value::Real(x) => s.serialize_f64(*x),
        }
    }
}

fn big_to_json(b: &BigInt) -> serde_json::Value {
    match b.to_i64() {
        Some(v) => v.into(),
        None => b.to_string().into(),
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Symmetric `n x n` distance matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix<D> {
    n: usize,
    data: Vec<D>,
}

impl<D: Distance> DistanceMatrix<D> {
    pub(crate) fn from_raw_unchecked(n: usize, data: Vec<D>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> D {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[D] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<D>> {
        self.data.chunks(self.n.max(1)).map(<[D]>::to_vec).collect()
    }

    pub fn to_f64(&self) -> DistanceMatrix<f64> {
        DistanceMatrix { n: self.n, data: self.data.iter().map(|d| d.to_f64()).collect() }
    }

    /// Row sums `t(u) = sum_v d(u, v)`.
    pub fn transmission(&self) -> TransmissionVector<D> {
        let t = (0..self.n).map(|u| self.row(u).iter().fold(D::ZERO, |a, &b| a + b)).collect();
        TransmissionVector { t }
    }
}

/// Per-vertex transmissions, in the same number type as the distances.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionVector<D> {
    t: Vec<D>,
}

impl<D: Distance> TransmissionVector<D> {
    pub fn new(t: Vec<D>) -> Self {
        Self { t }
    }

    pub fn as_slice(&self) -> &[D] {
        &self.t
    }

    pub fn get(&self, u: usize) -> D {
        self.t[u]
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Sum of all transmissions, i.e. the total volume.
    pub fn total(&self) -> D {
        self.t.iter().fold(D::ZERO, |a, &b| a + b)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.t.iter().map(|x| x.to_f64()).collect()
    }
}

/// Convenience for `d.transmission()`.
pub fn transmission<D: Distance>(d: &DistanceMatrix<D>) -> TransmissionVector<D> {
    d.transmission()
}

/// A validated distance matrix that satisfies every metric axiom.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace<D> {
    d: DistanceMatrix<D>,
    from_graph: bool,
}

impl<D: Distance> FiniteMetricSpace<D> {
    pub(crate) fn from_graph_distances(d: DistanceMatrix<D>) -> Self {
        Self { d, from_graph: true }
    }

    pub fn distances(&self) -> &DistanceMatrix<D> {
        &self.d
    }

    pub fn into_distances(self) -> DistanceMatrix<D> {
        self.d
    }

    pub fn n(&self) -> usize {
        self.d.n()
    }

    pub fn from_graph(&self) -> bool {
        self.from_graph
    }

    pub fn transmission(&self) -> TransmissionVector<D> {
        self.d.transmission()
    }
}

/// One violated metric axiom.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotSquare { row: usize, len: usize, n: usize },
    NonzeroDiagonal { u: usize, value: f64 },
    Asymmetric { u: usize, v: usize },
    NonPositive { u: usize, v: usize, value: f64 },
    Triangle { u: usize, v: usize, via: usize, direct: f64, detour: (f64, f64) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { row, len, n } => {
                write!(f, "row {row} has {len} entries, expected {n}")
            }
            Violation::NonzeroDiagonal { u, value } => write!(f, "d({u},{u}) = {value} != 0"),
            Violation::Asymmetric { u, v } => write!(f, "d({u},{v}) != d({v},{u})"),
            Violation::NonPositive { u, v, value } => write!(f, "d({u},{v}) = {value} is not positive"),
            Violation::Triangle { u, v, via, direct, detour } => write!(
                f,
                "triangle ({u},{v}) via {via}: {direct} > {}+{}",
                detour.0, detour.1
            ),
        }
    }
}

/// Checks every metric axiom and reports all violations at once.
pub fn validate_metric<D: Distance>(rows: Vec<Vec<D>>) -> Result<FiniteMetricSpace<D>> {
    let n = rows.len();
    let mut violations = Vec::new();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            violations.push(Violation::NotSquare { row, len: r.len(), n });
        }
    }
    if !violations.is_empty() {
        return Err(Error::InvalidMetric(violations));
    }
    let data: Vec<D> = rows.into_iter().flatten().collect();
    let d = DistanceMatrix::from_raw_unchecked(n, data);
    for u in 0..n {
        let x = d.get(u, u);
        if x != D::ZERO {
            violations.push(Violation::NonzeroDiagonal { u, value: x.to_f64() });
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (d.get(u, v), d.get(v, u));
            if a != b {
                violations.push(Violation::Asymmetric { u, v });
            }
            for (x, y, val) in [(u, v, a), (v, u, b)] {
                // catches NaN as well as non-positive entries
                if val.partial_cmp(&D::ZERO) != Some(Ordering::Greater) {
                    violations.push(Violation::NonPositive { u: x, v: y, value: val.to_f64() });
                }
            }
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let direct = d.get(u, v);
            for w in 0..n {
                if w == u || w == v {
                    continue;
                }
                let (a, b) = (d.get(u, w), d.get(w, v));
                if D::exceeds(direct, a + b) {
                    violations.push(Violation::Triangle {
                        u,
                        v,
                        via: w,
                        direct: direct.to_f64(),
                        detour: (a.to_f64(), b.to_f64()),
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(FiniteMetricSpace { d, from_graph: false })
    } else {
        Err(Error::InvalidMetric(violations))
    }
}

/// Reads `n` lines of `n` comma-separated numbers and validates the metric.
pub fn parse_metric_csv(text: &str) -> Result<FiniteMetricSpace<f64>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("`{}` is not a number", tok.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    validate_metric(rows)
}
