//! Exact distance-Cheeger constants.
//!
//! For a cut `S | S^c` the Cheeger ratio is `D(S, S^c) / min(vol S, vol S^c)`
//! where `D(X, Y)` sums distances over `X x Y` and `vol S` sums
//! transmissions. The minimum over all proper nonempty `S` is found by
//! walking every cut in Gray-code order with O(n) incremental updates.
//! Integer inputs give exact rational results.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric::{Distance, DistanceMatrix, TransmissionVector, Value};
use crate::report::{Check, Report};

/// Default largest `n` for exhaustive enumeration (2^23 cuts).
pub const DEFAULT_CAP: usize = 24;

/// Hard ceiling imposed by the `u64` subset masks.
pub const MAX_CAP: usize = 63;

/// A bipartition `S | S^c` with its exact cross sum and volumes.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut<D> {
    pub n: usize,
    pub subset: u64,
    /// `D(S, S^c)`
    pub cross: D,
    /// `D(S, S)` over ordered pairs
    pub inner: D,
    /// `D(S^c, S^c)` over ordered pairs
    pub inner_complement: D,
    pub vol: D,
    pub vol_complement: D,
}

impl<D: Distance> Cut<D> {
    pub fn new(d: &DistanceMatrix<D>, t: &TransmissionVector<D>, subset: u64) -> Result<Self> {
        let n = d.n();
        check_subset(n, subset)?;
        let (mut cross, mut inner, mut inner_c) = (D::ZERO, D::ZERO, D::ZERO);
        let (mut vol, mut vol_c) = (D::ZERO, D::ZERO);
        for u in 0..n {
            let u_in = subset >> u & 1 == 1;
            if u_in {
                vol = vol + t.get(u);
            } else {
                vol_c = vol_c + t.get(u);
            }
            for v in 0..n {
                let duv = d.get(u, v);
                match (u_in, subset >> v & 1 == 1) {
                    (true, true) => inner = inner + duv,
                    (false, false) => inner_c = inner_c + duv,
                    (true, false) => cross = cross + duv,
                    (false, true) => {}
                }
            }
        }
        Ok(Self { n, subset, cross, inner, inner_complement: inner_c, vol, vol_complement: vol_c })
    }

    pub fn size(&self) -> usize {
        self.subset.count_ones() as usize
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&u| self.subset >> u & 1 == 1).collect()
    }

    /// The Cheeger ratio of this cut.
    pub fn ratio(&self) -> Value {
        let min_vol = if self.vol <= self.vol_complement { self.vol } else { self.vol_complement };
        self.cross.to_value().div(&min_vol.to_value())
    }

    /// `vol S = D(S,S) + D(S,S^c)`, likewise for the complement.
    pub fn volumes_consistent(&self) -> bool {
        let close = |a: D, b: D| !D::exceeds(a, b) && !D::exceeds(b, a);
        close(self.vol, self.inner + self.cross) && close(self.vol_complement, self.inner_complement + self.cross)
    }
}

fn check_subset(n: usize, subset: u64) -> Result<()> {
    if n > MAX_CAP {
        return Err(Error::CapExceeded { n, cap: MAX_CAP });
    }
    let full = (1u64 << n) - 1;
    if subset == 0 || subset & full == full || subset & !full != 0 {
        return Err(Error::ImproperSubset);
    }
    Ok(())
}

/// Exact value of the Cheeger ratio `h(S)`.
pub fn h_of_cut<D: Distance>(d: &DistanceMatrix<D>, t: &TransmissionVector<D>, subset: u64) -> Result<Value> {
    Ok(Cut::new(d, t, subset)?.ratio())
}

/// Minimum Cheeger ratio together with one optimal cut.
///
/// `ties` counts optimal subsets `S` among all proper nonempty subsets, so
/// it is always even (`S` and its complement tie).
#[derive(Clone, Debug, PartialEq)]
pub struct CheegerResult<D> {
    pub h: Value,
    pub cut: Cut<D>,
    pub ties: u64,
}

impl<D: Distance> Serialize for CheegerResult<D> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CheegerResult", 4)?;
        st.serialize_field("h", &self.h)?;
        st.serialize_field("decimal", &self.h.to_f64())?;
        st.serialize_field("subset", &self.cut.vertices())?;
        st.serialize_field("ties", &self.ties)?;
        st.end()
    }
}

pub fn cheeger_exact<D: Distance>(d: &DistanceMatrix<D>, t: &TransmissionVector<D>) -> Result<CheegerResult<D>> {
    cheeger_exact_with_cap(d, t, DEFAULT_CAP)
}

/// Exhaustive minimum over the `2^{n-1} - 1` cuts with vertex 0 in `S`.
pub fn cheeger_exact_with_cap<D: Distance>(
    d: &DistanceMatrix<D>,
    t: &TransmissionVector<D>,
    cap: usize,
) -> Result<CheegerResult<D>> {
    let n = d.n();
    if n < 2 {
        return Err(Error::TooSmall { need: 2, got: n });
    }
    let cap = cap.min(MAX_CAP);
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let full = (1u64 << n) - 1;
    let total = t.total();

    // state for S = {0}; into_s[w] = D(w, S)
    let mut subset = 1u64;
    let mut into_s: Vec<D> = (0..n).map(|w| d.get(w, 0)).collect();
    let mut cross = t.get(0);
    let mut vol = t.get(0);

    let min_side = |vol: D| {
        let other = total - vol;
        if vol <= other { vol } else { other }
    };
    let mut best = (subset, cross, min_side(vol));
    let mut ties = 1u64;

    let steps = 1u64 << (n - 1);
    for i in 1..steps {
        let x = i.trailing_zeros() as usize + 1;
        let bit = 1u64 << x;
        let row = d.row(x);
        if subset & bit == 0 {
            cross = (cross + t.get(x)) - into_s[x] - into_s[x];
            vol = vol + t.get(x);
            for (acc, &dx) in into_s.iter_mut().zip(row) {
                *acc = *acc + dx;
            }
        } else {
            cross = (cross + into_s[x] + into_s[x]) - t.get(x);
            vol = vol - t.get(x);
            for (acc, &dx) in into_s.iter_mut().zip(row) {
                *acc = *acc - dx;
            }
        }
        subset ^= bit;
        if subset == full {
            continue;
        }
        let denom = min_side(vol);
        match D::cmp_fractions(cross, denom, best.1, best.2) {
            Ordering::Less => {
                best = (subset, cross, denom);
                ties = 1;
            }
            Ordering::Equal => ties += 1,
            Ordering::Greater => {}
        }
    }

    let cut = Cut::new(d, t, best.0)?;
    Ok(CheegerResult { h: cut.ratio(), cut, ties: 2 * ties })
}

/// `(2(s-1)/s^c) D(S,S^c) - D(S,S)`, never negative for a metric.
pub fn cut_slack<D: Distance>(d: &DistanceMatrix<D>, subset: u64) -> Result<Value> {
    let t = d.transmission();
    let cut = Cut::new(d, &t, subset)?;
    let s = cut.size() as i64;
    let sc = (cut.n - cut.size()) as i64;
    let coeff = Value::exact(2 * (s - 1), sc);
    Ok(coeff.mul(&cut.cross.to_value()).sub(&cut.inner.to_value()))
}

/// Whether every `u != v` in `S` and `w` outside `S` satisfy
/// `d(u,v) = d(u,w) + d(w,v)`, the condition for zero slack.
pub fn midpoint_condition<D: Distance>(d: &DistanceMatrix<D>, subset: u64) -> bool {
    let n = d.n();
    let inside: Vec<usize> = (0..n).filter(|&u| subset >> u & 1 == 1).collect();
    let outside: Vec<usize> = (0..n).filter(|&u| subset >> u & 1 == 0).collect();
    inside.iter().all(|&u| {
        inside.iter().filter(|&&v| v != u).all(|&v| {
            outside.iter().all(|&w| {
                let (a, b) = (d.get(u, v), d.get(u, w) + d.get(w, v));
                !D::exceeds(a, b) && !D::exceeds(b, a)
            })
        })
    })
}

/// Worst-case Cheeger constant over connected graphs on `n` vertices:
/// `n/(3n-4)` for even `n`, `(n+1)/(3n-5)` for odd `n`.
pub fn cheeger_lower_bound(n: usize) -> BigRational {
    assert!(n >= 2, "bound needs n >= 2");
    let n = n as i64;
    let (num, den) = if n % 2 == 0 { (n, 3 * n - 4) } else { (n + 1, 3 * n - 5) };
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheegerBoundsReport {
    pub report: Report,
    /// `h` meets the worst-case bound exactly.
    pub equality: bool,
    pub bound: Value,
}

/// Checks `h` against the worst-case bound (exactly, when `h` is exact),
/// `h > 1/3`, and both sides of Cheeger's inequality `h^2/2 <= gap <= 2h`.
pub fn check_cheeger_bounds<D: Distance>(res: &CheegerResult<D>, gap: f64, n: usize, tol: f64) -> CheegerBoundsReport {
    let mut r = Report::new(tol);
    let bound = Value::Exact(cheeger_lower_bound(n));
    let third = Value::exact(1, 3);
    let h = &res.h;
    let hf = h.to_f64();
    let (meets, equality, above_third) = match h {
        Value::Exact(_) => (
            h.compare(&bound) != Ordering::Less,
            h.compare(&bound) == Ordering::Equal,
            h.compare(&third) == Ordering::Greater,
        ),
        Value::Real(x) => {
            let b = bound.to_f64();
            (*x >= b - tol, (*x - b).abs() <= tol, *x > 1.0 / 3.0)
        }
    };
    r.push(
        Check::decided("cheeger worst-case bound", meets, hf, bound.to_f64())
            .with_detail(format!("h = {h}, bound = {bound}")),
    );
    r.push(Check::decided("h above 1/3", above_third, hf, 1.0 / 3.0));
    r.push(Check::at_least("cheeger inequality lower h^2/2 <= gap", gap, hf * hf / 2.0, tol));
    r.push(Check::at_most("cheeger inequality upper gap <= 2h", gap, 2.0 * hf, tol));
    CheegerBoundsReport { report: r, equality, bound }
}

/// The three extra extremal graphs on five vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum N5Kind {
    /// `P_5`
    Path,
    /// `C_4` plus a pendant edge
    C4Pendant,
    /// `C_4 = uvwx` plus pendant `xy` and chord `uw`
    C4PendantChord,
}

impl N5Kind {
    pub fn graph(self) -> Graph {
        let edges: &[(usize, usize)] = match self {
            N5Kind::Path => &[(0, 1), (1, 2), (2, 3), (3, 4)],
            N5Kind::C4Pendant => &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4)],
            N5Kind::C4PendantChord => &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (0, 2)],
        };
        Graph::from_edges(5, edges.iter().copied()).unwrap()
    }

    pub const ALL: [N5Kind; 3] = [N5Kind::Path, N5Kind::C4Pendant, N5Kind::C4PendantChord];
}

/// Structural class of graphs that attain the worst-case Cheeger bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum EqualityClass {
    /// `K_{m,m}`
    EvenExtremal { m: usize },
    /// `K_{m,m+1}` plus `larger_part_edges <= n - 1` edges inside the part
    /// of size `m + 1`.
    OddExtremal { m: usize, larger_part_edges: usize },
    N5Exceptional { kind: N5Kind },
    None,
}

impl EqualityClass {
    pub fn is_extremal(self) -> bool {
        self != EqualityClass::None
    }
}

impl fmt::Display for EqualityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqualityClass::EvenExtremal { m } => write!(f, "K_{{{m},{m}}}"),
            EqualityClass::OddExtremal { m, larger_part_edges: 0 } => write!(f, "K_{{{m},{}}}", m + 1),
            EqualityClass::OddExtremal { m, larger_part_edges } => {
                write!(f, "K_{{{m},{}}} + {larger_part_edges} edges in the larger part", m + 1)
            }
            EqualityClass::N5Exceptional { kind } => write!(f, "n=5 exceptional equality ({kind:?})"),
            EqualityClass::None => write!(f, "none"),
        }
    }
}

/// Classifies `g` against the extremal families of the Cheeger bound.
///
/// In an extremal graph the small part `A` is independent and completely
/// joined to the large part, so `A = V \ N(a)` for any `a` in `A`; trying
/// each vertex covers every candidate partition in O(n^2). For `n = 5` the
/// three exceptional graphs are matched by brute-force isomorphism.
pub fn classify_equality(g: &Graph) -> EqualityClass {
    let n = g.n();
    if !(2..=64).contains(&n) || !g.is_connected() {
        return EqualityClass::None;
    }
    let masks = g.adjacency_masks();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let small = n / 2;
    for v in 0..n {
        let part_b = masks[v];
        let part_a = all & !part_b;
        if part_a.count_ones() as usize != small {
            continue;
        }
        let joined = (0..n).filter(|&a| part_a >> a & 1 == 1).all(|a| masks[a] == part_b);
        if !joined {
            continue;
        }
        let inner_b = (0..n)
            .filter(|&b| part_b >> b & 1 == 1)
            .map(|b| (masks[b] & part_b).count_ones() as usize)
            .sum::<usize>()
            / 2;
        if n.is_multiple_of(2) {
            if inner_b == 0 {
                return EqualityClass::EvenExtremal { m: small };
            }
        } else if inner_b < n {
            return EqualityClass::OddExtremal { m: small, larger_part_edges: inner_b };
        }
    }
    if n == 5 {
        for kind in N5Kind::ALL {
            if isomorphic_brute_force(g, &kind.graph()) {
                return EqualityClass::N5Exceptional { kind };
            }
        }
    }
    EqualityClass::None
}

/// Isomorphism test by trying every vertex permutation. Small `n` only.
pub fn isomorphic_brute_force(g: &Graph, h: &Graph) -> bool {
    let n = g.n();
    if n != h.n() || g.edge_count() != h.edge_count() {
        return false;
    }
    let mut dg: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let mut dh: Vec<usize> = (0..n).map(|u| h.degree(u)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return false;
    }
    let hm = h.adjacency_masks();
    let mut found = false;
    for_each_permutation(n, |perm| {
        if !found && g.edges().all(|(u, v)| hm[perm[u]] >> perm[v] & 1 == 1) {
            found = true;
        }
    });
    found
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&p);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
