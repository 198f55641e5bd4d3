//! Finite abelian groups, their characters, and Cayley graphs on them.
//!
//! A translation-invariant distance on an abelian group makes the
//! normalized distance Laplacian a group-circulant matrix, so every
//! character is an eigenvector and the spectrum is
//! `{ 1 - (1/t0) sum_v d(v) chi(v) }` with `t0 = sum_v d(v)`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certify;
use crate::constants::{ODD_CAYLEY_FLOOR, TWO_THIRDS};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric::{DistanceMatrix, REAL_RELATIVE_TOL};
use crate::report::{Check, Report};
use crate::spectral::Spectrum;

/// Largest group order handled by the closed-form routines.
pub const MAX_ORDER: usize = 4096;

/// Allowed imaginary part of a normalized character sum.
pub const IMAG_TOL: f64 = 1e-10;

/// `Z_{m1} x ... x Z_{mk}`, elements indexed in mixed-radix row-major order
/// (the last coordinate varies fastest).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianGroup {
    moduli: Vec<u64>,
    #[serde(skip)]
    strides: Vec<usize>,
}

impl AbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::Group("need at least one cyclic factor".into()));
        }
        if let Some(m) = moduli.iter().find(|&&m| m < 2) {
            return Err(Error::Group(format!("cyclic factor Z{m} is too small")));
        }
        let order = moduli.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m as usize));
        match order {
            Some(o) if o <= MAX_ORDER => {}
            _ => return Err(Error::Group(format!("order exceeds {MAX_ORDER}"))),
        }
        let mut strides = vec![1usize; moduli.len()];
        for j in (0..moduli.len() - 1).rev() {
            strides[j] = strides[j + 1] * moduli[j + 1] as usize;
        }
        Ok(Self { moduli, strides })
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        Self::new(vec![m])
    }

    /// Parses `Z4`, `Z2xZ2`, `Z3xZ5`, ...
    pub fn parse(s: &str) -> Result<Self> {
        let moduli = s
            .trim()
            .split(['x', 'X', '*'])
            .map(|part| {
                let p = part.trim();
                p.strip_prefix('Z')
                    .or_else(|| p.strip_prefix('z'))
                    .and_then(|m| m.parse::<u64>().ok())
                    .ok_or_else(|| Error::Group(format!("cannot parse factor `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(moduli)
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product::<u64>() as usize
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn element(&self, idx: usize) -> Vec<u64> {
        self.moduli
            .iter()
            .zip(&self.strides)
            .map(|(&m, &s)| ((idx / s) as u64) % m)
            .collect()
    }

    pub fn index(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.moduli)
            .zip(&self.strides)
            .map(|((&a, &m), &s)| (a % m) as usize * s)
            .sum()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let mut idx = 0;
        for (j, (&m, &s)) in self.moduli.iter().zip(&self.strides).enumerate() {
            let _ = j;
            let x = (a / s) as u64 % m;
            let y = (b / s) as u64 % m;
            idx += ((x + y) % m) as usize * s;
        }
        idx
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut idx = 0;
        for (&m, &s) in self.moduli.iter().zip(&self.strides) {
            let x = (a / s) as u64 % m;
            idx += ((m - x) % m) as usize * s;
        }
        idx
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Character with the same exponent vector as element `idx`.
    pub fn character(&self, idx: usize) -> Character {
        Character { exponents: self.element(idx) }
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        (0..self.order()).map(|i| self.character(i))
    }

    /// Parses an element: `3` for cyclic groups, or a tuple `(1,0,2)`.
    pub fn parse_element(&self, s: &str) -> Result<usize> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = body
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Group(format!("bad element `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != self.rank() {
            return Err(Error::Group(format!("element `{s}` has {} coordinates, expected {}", coords.len(), self.rank())));
        }
        Ok(self.index(&coords))
    }

    /// Parses a connection set such as `1,3` (cyclic) or `(1,0),(0,1)`.
    pub fn parse_connection_set(&self, s: &str) -> Result<Vec<usize>> {
        let s = s.trim();
        if self.rank() == 1 && !s.contains('(') {
            return s.split(',').filter(|t| !t.trim().is_empty()).map(|t| self.parse_element(t)).collect();
        }
        let mut out = Vec::new();
        let mut rest = s;
        while let Some(start) = rest.find('(') {
            let end = rest[start..]
                .find(')')
                .ok_or_else(|| Error::Group(format!("unclosed tuple in `{s}`")))?;
            out.push(self.parse_element(&rest[start..start + end + 1])?);
            rest = &rest[start + end + 1..];
        }
        if out.is_empty() {
            return Err(Error::Group(format!("no elements in `{s}`")));
        }
        Ok(out)
    }

    pub fn format_element(&self, idx: usize) -> String {
        let e = self.element(idx);
        if e.len() == 1 {
            e[0].to_string()
        } else {
            format!("({})", e.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z{m}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// `chi(v) = exp(2 pi i sum_j c_j v_j / m_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Character {
    pub exponents: Vec<u64>,
}

impl Character {
    /// Angle of `chi(v)` in `[0, 2 pi)`.
    pub fn angle(&self, gr: &AbelianGroup, v: usize) -> f64 {
        let coords = gr.element(v);
        let mut frac = 0.0;
        for ((&c, &x), &m) in self.exponents.iter().zip(&coords).zip(gr.moduli()) {
            frac += ((c * x) % m) as f64 / m as f64;
        }
        TAU * (frac - frac.floor())
    }

    pub fn value(&self, gr: &AbelianGroup, v: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.angle(gr, v))
    }

    pub fn is_trivial(&self, gr: &AbelianGroup) -> bool {
        self.exponents.iter().zip(gr.moduli()).all(|(&c, &m)| c % m == 0)
    }

    /// Whether `chi^2` is trivial, i.e. `chi` takes only the values +-1.
    pub fn squares_to_trivial(&self, gr: &AbelianGroup) -> bool {
        self.exponents.iter().zip(gr.moduli()).all(|(&c, &m)| (2 * c) % m == 0)
    }
}

fn validate_connection_set(gr: &AbelianGroup, conn: &[usize]) -> Result<()> {
    if conn.contains(&0) {
        return Err(Error::Group("connection set contains the identity".into()));
    }
    if let Some(&s) = conn.iter().find(|&&s| s >= gr.order()) {
        return Err(Error::Group(format!("element index {s} out of range")));
    }
    if let Some(&s) = conn.iter().find(|&&s| !conn.contains(&gr.neg(s))) {
        return Err(Error::Group(format!(
            "connection set is not closed under negation: missing -{}",
            gr.format_element(s)
        )));
    }
    Ok(())
}

/// `Cay(gr, conn)`: vertex `u` is adjacent to `u + s` for each `s` in `conn`.
pub fn cayley_graph(gr: &AbelianGroup, conn: &[usize]) -> Result<Graph> {
    validate_connection_set(gr, conn)?;
    let mut g = Graph::empty(gr.order());
    for u in 0..gr.order() {
        for &s in conn {
            g.add_edge(u, gr.add(u, s))?;
        }
    }
    Ok(g)
}

/// A distance-from-identity vector `d: gr -> [0, inf)` that is symmetric,
/// subadditive and positive off the identity. Equivalent to a
/// translation-invariant metric `d(u, v) = d(v - u)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetricDVector {
    group: AbelianGroup,
    d: Vec<f64>,
}

impl SymmetricDVector {
    pub fn new(group: AbelianGroup, d: Vec<f64>) -> Result<Self> {
        let n = group.order();
        if d.len() != n {
            return Err(Error::Group(format!("distance vector has length {}, expected {n}", d.len())));
        }
        if d[0] != 0.0 {
            return Err(Error::Group(format!("d(0) = {} must be zero", d[0])));
        }
        let slack = |x: f64| REAL_RELATIVE_TOL * x.abs().max(1.0);
        for v in 1..n {
            if !(d[v] > 0.0) {
                return Err(Error::Group(format!("d({}) = {} is not positive", group.format_element(v), d[v])));
            }
            if (d[v] - d[group.neg(v)]).abs() > slack(d[v]) {
                return Err(Error::Group(format!("d is not symmetric at {}", group.format_element(v))));
            }
        }
        for u in 1..n {
            for v in 1..n {
                let w = group.add(u, v);
                if d[w] > d[u] + d[v] + slack(d[u] + d[v]) {
                    return Err(Error::Group(format!(
                        "subadditivity fails: d({}) > d({}) + d({})",
                        group.format_element(w),
                        group.format_element(u),
                        group.format_element(v)
                    )));
                }
            }
        }
        Ok(Self { group, d })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    /// Common transmission `t0 = sum_v d(v)`.
    pub fn transmission(&self) -> f64 {
        self.d.iter().sum()
    }

    /// Dense metric `d(u, v) = d(v - u)`.
    pub fn to_distance_matrix(&self) -> DistanceMatrix<f64> {
        let n = self.group.order();
        let mut data = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                data.push(self.d[self.group.sub(v, u)]);
            }
        }
        DistanceMatrix::from_raw_unchecked(n, data)
    }
}

/// Reads off `d(v) = dist(0, v)` from a connected Cayley graph of `gr`.
///
/// Fails if `g` is not translation invariant over `gr`, is disconnected,
/// or the resulting vector breaks a [`SymmetricDVector`] invariant.
pub fn dvector_from_graph(gr: &AbelianGroup, g: &Graph) -> Result<SymmetricDVector> {
    if g.n() != gr.order() {
        return Err(Error::Group(format!("graph has {} vertices, group order is {}", g.n(), gr.order())));
    }
    let conn = g.neighbors(0).to_vec();
    for u in 0..g.n() {
        let mut expect: Vec<usize> = conn.iter().map(|&s| gr.add(u, s)).collect();
        expect.sort_unstable();
        if expect != g.neighbors(u) {
            return Err(Error::Group(format!("graph is not a Cayley graph of {gr}: vertex {u} breaks translation invariance")));
        }
    }
    g.require_connected()?;
    let d = g.bfs(0).into_iter().map(|x| x.expect("connected") as f64).collect();
    SymmetricDVector::new(gr.clone(), d)
}

/// Eigenvalue `1 - (1/t0) sum_v d(v) chi(v)` for one character.
pub fn character_eigenvalue(dv: &SymmetricDVector, chi: &Character) -> Result<f64> {
    let gr = dv.group();
    let t0 = dv.transmission();
    let mut sum = Complex64::new(0.0, 0.0);
    for (v, &dvv) in dv.values().iter().enumerate() {
        if dvv != 0.0 {
            sum += chi.value(gr, v) * dvv;
        }
    }
    let sum = sum / t0;
    if sum.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(sum.im));
    }
    Ok(1.0 - sum.re)
}

/// Closed-form spectrum of the normalized distance Laplacian, one
/// eigenvalue per character, sorted ascending.
pub fn cayley_spectrum(dv: &SymmetricDVector) -> Result<Spectrum> {
    let gr = dv.group();
    let values = (0..gr.order())
        .into_par_iter()
        .map(|i| character_eigenvalue(dv, &gr.character(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::from_eigenvalues(values))
}

/// `4x^4 - 4x^3 - 31x^2 - 20x + 4`
pub fn c1_quartic(x: f64) -> f64 {
    (((4.0 * x - 4.0) * x - 31.0) * x - 20.0) * x + 4.0
}

/// Largest root of [`c1_quartic`], by bisection on `[3, 4]`.
pub fn c1_constant() -> f64 {
    let (mut lo, mut hi) = (3.0f64, 4.0f64);
    debug_assert!(c1_quartic(lo) < 0.0 && c1_quartic(hi) > 0.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if c1_quartic(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `C1`, computed from the quartic and from the quadratic-form maximum,
/// asserted to agree to `1e-10` on first use.
pub fn c1() -> f64 {
    static C1: OnceLock<f64> = OnceLock::new();
    *C1.get_or_init(|| {
        let root = c1_constant();
        let (_, _, form_max) = certify::ab_optimum();
        assert!(
            (root - form_max).abs() <= 1e-10,
            "C1 mismatch: quartic root {root} vs quadratic-form maximum {form_max}"
        );
        root
    })
}

/// Breakdown of the combinatorial argument for a +-1 character: with
/// `P = chi^{-1}(1)`, `M = chi^{-1}(-1)` and `u0` a minimiser of `d` on `M`,
/// translation by `u0` maps `M` onto `P`, giving
/// `sum_P d <= |M| d(u0) + sum_M d <= 2 sum_M d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignCharacterWitness {
    /// `sum_v d(v) (1 - 3 chi(v))`
    pub margin: f64,
    pub u0: usize,
    pub plus_size: usize,
    pub minus_size: usize,
    pub plus_sum: f64,
    pub minus_sum: f64,
    /// `|M| d(u0) + sum_M d`
    pub shifted_bound: f64,
}

impl SignCharacterWitness {
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.plus_size == self.minus_size
            && self.plus_sum <= self.shifted_bound + tol
            && self.shifted_bound <= 2.0 * self.minus_sum + tol
    }
}

/// `sum_v d(v) (1 - 3 chi(v))` for a nontrivial character with values +-1.
pub fn sign_character_margin(dv: &SymmetricDVector, chi: &Character) -> Result<SignCharacterWitness> {
    let gr = dv.group();
    if chi.is_trivial(gr) {
        return Err(Error::InvalidArgument("character must be nontrivial".into()));
    }
    if !chi.squares_to_trivial(gr) {
        return Err(Error::InvalidArgument("character must square to the trivial character; use complex_character_margin".into()));
    }
    let d = dv.values();
    let minus: Vec<usize> = (0..gr.order()).filter(|&v| chi.value(gr, v).re < 0.0).collect();
    let plus: Vec<usize> = (0..gr.order()).filter(|&v| chi.value(gr, v).re > 0.0).collect();
    let u0 = *minus.iter().min_by(|&&a, &&b| d[a].total_cmp(&d[b])).expect("nontrivial character");
    let plus_sum: f64 = plus.iter().map(|&v| d[v]).sum();
    let minus_sum: f64 = minus.iter().map(|&v| d[v]).sum();
    Ok(SignCharacterWitness {
        margin: 4.0 * minus_sum - 2.0 * plus_sum,
        u0,
        plus_size: plus.len(),
        minus_size: minus.len(),
        plus_sum,
        minus_sum,
        shifted_bound: minus.len() as f64 * d[u0] + minus_sum,
    })
}

/// Real part of `sum_v d(v) (1 - C1 chi(v))` for a character with
/// `chi^2` nontrivial.
pub fn complex_character_margin(dv: &SymmetricDVector, chi: &Character) -> Result<f64> {
    let gr = dv.group();
    if chi.squares_to_trivial(gr) {
        return Err(Error::InvalidArgument("character squares to the trivial character; use sign_character_margin".into()));
    }
    let c1 = c1();
    let mut sum = Complex64::new(0.0, 0.0);
    for (v, &x) in dv.values().iter().enumerate() {
        sum += (Complex64::new(1.0, 0.0) - chi.value(gr, v) * c1) * x;
    }
    let scale = dv.transmission().max(1.0);
    if sum.im.abs() > IMAG_TOL * scale {
        return Err(Error::ImaginaryResidue(sum.im / scale));
    }
    Ok(sum.re)
}

/// Spectral-gap floors for abelian Cayley spectra: at least 2/3, and above
/// 0.718 for odd order.
pub fn check_cayley_bounds(spec: &Spectrum, gr: &AbelianGroup, tol: f64) -> Report {
    let mut r = Report::new(tol);
    let gap = spec.eigenvalues[1];
    r.push(Check::at_least("abelian Cayley gap at least 2/3", gap, TWO_THIRDS, tol));
    if gr.order() % 2 == 1 {
        r.push(Check::above("odd-order abelian Cayley gap above 0.718", gap, ODD_CAYLEY_FLOOR, 0.0));
    }
    r
}

/// Whether `conn` generates the whole group.
pub fn generates(gr: &AbelianGroup, conn: &[usize]) -> bool {
    let mut seen = vec![false; gr.order()];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        for &s in conn {
            let w = gr.add(u, s);
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Random inverse-closed generating set built from `size` random nonzero
/// elements (the negation closure may add more).
pub fn random_connection_set<R: Rng + ?Sized>(gr: &AbelianGroup, size: usize, rng: &mut R) -> Result<Vec<usize>> {
    let n = gr.order();
    let size = size.clamp(1, n - 1);
    let mut pool: Vec<usize> = (1..n).collect();
    for _ in 0..1000 {
        pool.shuffle(rng);
        let mut conn: Vec<usize> = Vec::new();
        for &s in &pool[..size] {
            for x in [s, gr.neg(s)] {
                if !conn.contains(&x) {
                    conn.push(x);
                }
            }
        }
        if generates(gr, &conn) {
            conn.sort_unstable();
            return Ok(conn);
        }
    }
    Err(Error::Group(format!("no generating set of size {size} found for {gr}")))
}

/// Random translation-invariant metric: shortest paths in a Cayley graph
/// with random positive weights on a random inverse-closed generating set.
pub fn random_dvector<R: Rng + ?Sized>(gr: &AbelianGroup, rng: &mut R) -> Result<SymmetricDVector> {
    let n = gr.order();
    // a rank-k group needs at least k generators
    let max_size = (n - 1).min(2 * gr.rank() + 3);
    let size = rng.random_range(gr.rank().min(max_size)..=max_size);
    let conn = random_connection_set(gr, size, rng)?;
    let mut weight = vec![0.0; n];
    for &s in &conn {
        if weight[s] == 0.0 {
            let w = rng.random_range(0.1..1.0);
            weight[s] = w;
            weight[gr.neg(s)] = w;
        }
    }
    // dense Dijkstra from the identity
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[0] = 0.0;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&u| !done[u])
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            .unwrap();
        done[u] = true;
        for &s in &conn {
            let w = gr.add(u, s);
            let cand = dist[u] + weight[s];
            if cand < dist[w] {
                dist[w] = cand;
            }
        }
    }
    // exact symmetrisation; the two Dijkstra sums can differ in the last bit
    for v in 1..n {
        let m = dist[v].min(dist[gr.neg(v)]);
        dist[v] = m;
    }
    SymmetricDVector::new(gr.clone(), dist)
}
