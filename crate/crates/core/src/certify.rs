//! Numerical checks of the certificates behind the spectral-gap bounds:
//! the semidefinite form, the triangle-combination weights that prove it,
//! and the trigonometric weights used for characters of order above 2.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{self, AbelianGroup, Character, SymmetricDVector};
use crate::constants::{CROSS_COEFF, SQRT2_MINUS_HALF, SQRT2_PLUS_HALF, SQRT_2};
use crate::error::{Error, Result};
use crate::harness::random_metric;
use crate::metric::{Distance, DistanceMatrix};
use crate::report::{Check, Report};

/// Tolerance on `sum y` when a balanced vector is required.
pub const BALANCE_TOL: f64 = 1e-12;

fn require_balanced(y: &[f64]) -> Result<()> {
    let sum: f64 = y.iter().sum();
    let l1: f64 = y.iter().map(|x| x.abs()).sum();
    if sum.abs() > BALANCE_TOL * l1.max(1.0) {
        return Err(Error::Unbalanced(sum));
    }
    Ok(())
}

/// `sum_{u,v} (y_u^2 - (1+2 sqrt2) y_u y_v + y_v^2) d(u,v)` for balanced `y`.
pub fn semidefinite_form<D: Distance>(d: &DistanceMatrix<D>, y: &[f64]) -> Result<f64> {
    check_len(d.n(), y)?;
    require_balanced(y)?;
    let mut s = 0.0;
    for u in 0..d.n() {
        for (v, &duv) in d.row(u).iter().enumerate() {
            s += pair_coefficient(y[u], y[v]) * duv.to_f64();
        }
    }
    Ok(s)
}

/// Same quantity written through the Rayleigh-quotient pieces:
/// `(sqrt2 + 1/2) sum d (y_u - y_v)^2 - (sqrt2 - 1/2) 2 sum t y^2`.
pub fn semidefinite_form_rearranged<D: Distance>(d: &DistanceMatrix<D>, y: &[f64]) -> Result<f64> {
    check_len(d.n(), y)?;
    let t = d.transmission().to_f64();
    let mut num = 0.0;
    for u in 0..d.n() {
        for (v, &duv) in d.row(u).iter().enumerate() {
            num += duv.to_f64() * (y[u] - y[v]).powi(2);
        }
    }
    let den: f64 = t.iter().zip(y).map(|(t, y)| t * y * y).sum();
    Ok(SQRT2_PLUS_HALF * num - SQRT2_MINUS_HALF * 2.0 * den)
}

fn check_len(n: usize, y: &[f64]) -> Result<()> {
    if y.len() != n {
        return Err(Error::InvalidArgument(format!("vector has length {}, expected {n}", y.len())));
    }
    Ok(())
}

// grouped so that swapping the arguments gives bit-identical results
fn pair_coefficient(a: f64, b: f64) -> f64 {
    (a * a + b * b) - CROSS_COEFF * (a * b)
}

/// `f(a, b, c) = (a^2 - (1+2 sqrt2) a b + b^2) c^2 + a b c (a + b)`.
pub fn f_weight(alpha: f64, beta: f64, gamma: f64) -> f64 {
    pair_coefficient(alpha, beta) * gamma * gamma + (alpha * beta) * gamma * (alpha + beta)
}

/// `(a b + a c - sqrt2 b c)^2`, which equals `f(a,b,c) + f(a,c,b)`.
pub fn f_pair_square(alpha: f64, beta: f64, gamma: f64) -> f64 {
    (alpha * beta + alpha * gamma - SQRT_2 * beta * gamma).powi(2)
}

/// Weights `mu(u, v, w)` on ordered triples and target coefficients
/// `z(u, v)`. Summing `mu(u,v,w) (d(u,v) + d(u,w) - d(v,w))` over all
/// triples gives `sum z d` whenever `mu` is symmetric in its first two
/// arguments, `mu(u,v,w) + mu(u,w,v) >= 0`, and the rows sum to `z`.
pub trait TripleWeights {
    fn n(&self) -> usize;
    fn mu(&self, u: usize, v: usize, w: usize) -> f64;
    fn z(&self, u: usize, v: usize) -> f64;
}

/// `mu(u,v,w) = f(y_u, y_v, y_w)` for a balanced unit vector `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightScheme {
    y: Vec<f64>,
}

impl WeightScheme {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        require_balanced(&y)?;
        let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("weight vector must have unit norm, got {norm}")));
        }
        Ok(Self { y })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

impl TripleWeights for WeightScheme {
    fn n(&self) -> usize {
        self.y.len()
    }

    fn mu(&self, u: usize, v: usize, w: usize) -> f64 {
        f_weight(self.y[u], self.y[v], self.y[w])
    }

    fn z(&self, u: usize, v: usize) -> f64 {
        pair_coefficient(self.y[u], self.y[v])
    }
}

pub const WEIGHT_TOL: f64 = 1e-10;
pub const FORM_TOL: f64 = 1e-9;

pub const CHECK_SYMMETRY: &str = "weights symmetric in first two arguments";
pub const CHECK_PAIR_NONNEG: &str = "paired weights nonnegative";
pub const CHECK_ROW_SUMS: &str = "weight rows sum to target";
pub const CHECK_CHAIN: &str = "weighted triangle sum nonnegative";

/// Checks the three weight conditions and the resulting inequality
/// `sum z d >= 0`. Each check carries its worst triple or pair.
pub fn verify_triple_weights<D: Distance, W: TripleWeights>(d: &DistanceMatrix<D>, w: &W) -> Result<Report> {
    let n = d.n();
    if w.n() != n {
        return Err(Error::InvalidArgument(format!("weights are on {} points, metric on {n}", w.n())));
    }
    let mut sym = (0.0f64, (0, 0, 0));
    let mut pair = (f64::INFINITY, (0, 0, 0));
    let mut rows = (0.0f64, (0, 0));
    let mut chain = 0.0;
    let mut combo = 0.0;
    for u in 0..n {
        for v in 0..n {
            let mut row = 0.0;
            for x in 0..n {
                let m = w.mu(u, v, x);
                row += m;
                let asym = (m - w.mu(v, u, x)).abs();
                if asym > sym.0 {
                    sym = (asym, (u, v, x));
                }
                let p = m + w.mu(u, x, v);
                if p < pair.0 {
                    pair = (p, (u, v, x));
                }
                combo += m * (d.get(u, v).to_f64() + d.get(u, x).to_f64() - d.get(v, x).to_f64());
            }
            let z = w.z(u, v);
            let err = (row - z).abs();
            if err > rows.0 {
                rows = (err, (u, v));
            }
            chain += z * d.get(u, v).to_f64();
        }
    }
    let triple = |(a, b, c): (usize, usize, usize)| format!("({a},{b},{c})");
    let mut r = Report::new(WEIGHT_TOL);
    r.push(Check::at_most(CHECK_SYMMETRY, sym.0, 0.0, WEIGHT_TOL).with_detail(triple(sym.1)));
    r.push(Check::at_least(CHECK_PAIR_NONNEG, pair.0, 0.0, WEIGHT_TOL).with_detail(triple(pair.1)));
    r.push(Check::at_most(CHECK_ROW_SUMS, rows.0, 0.0, WEIGHT_TOL).with_detail(format!("({},{})", rows.1 .0, rows.1 .1)));
    r.push(
        Check::at_least(CHECK_CHAIN, chain, 0.0, FORM_TOL)
            .with_detail(format!("triangle combination evaluates to {combo:.12e}")),
    );
    Ok(r)
}

/// [`verify_triple_weights`] for the scheme built from `y`.
pub fn verify_weight_scheme<D: Distance>(d: &DistanceMatrix<D>, y: &[f64]) -> Result<Report> {
    verify_triple_weights(d, &WeightScheme::new(y.to_vec())?)
}

/// Parameters `A`, `B` and the angles `theta_v` of a character.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrigCertificate {
    pub a: f64,
    pub b: f64,
    pub theta: Vec<f64>,
}

impl TrigCertificate {
    pub fn new(a: f64, b: f64, gr: &AbelianGroup, chi: &Character) -> Self {
        let theta = (0..gr.order()).map(|v| chi.angle(gr, v)).collect();
        Self { a, b, theta }
    }

    /// Certificate at the optimal `(A, B)`.
    pub fn optimal(gr: &AbelianGroup, chi: &Character) -> Self {
        let (a, b, _) = ab_optimum();
        Self::new(a, b, gr, chi)
    }

    pub fn g(&self, alpha: f64, beta: f64) -> f64 {
        g_value(self.a, self.b, alpha, beta)
    }
}

/// `g(a, b) = (A + B cos(a+b) - B (cos a + cos b) / sqrt2)^2`.
pub fn g_value(a: f64, b: f64, alpha: f64, beta: f64) -> f64 {
    (a + b * (alpha + beta).cos() - b * (alpha.cos() + beta.cos()) / SQRT_2).powi(2)
}

/// `(1/|G|) sum_v (2 g(phi, theta_v) - g(phi - theta_v, theta_v))`.
pub fn trig_identity_lhs(cert: &TrigCertificate, phi: f64) -> f64 {
    let s: f64 = cert.theta.iter().map(|&t| 2.0 * cert.g(phi, t) - cert.g(phi - t, t)).sum();
    s / cert.theta.len() as f64
}

/// `(A^2 + B^2) - (2AB(1+sqrt2) + B^2(sqrt2 + 1/2)) cos phi`.
pub fn trig_identity_rhs(cert: &TrigCertificate, phi: f64) -> f64 {
    let (a, b) = (cert.a, cert.b);
    (a * a + b * b) - quadratic_form(a, b) * phi.cos()
}

/// `|lhs - rhs|` of the averaged trigonometric identity. Only valid when
/// neither `chi` nor `chi^2` is trivial.
pub fn trig_identity_residual(cert: &TrigCertificate, gr: &AbelianGroup, chi: &Character, phi: f64) -> Result<f64> {
    if chi.squares_to_trivial(gr) {
        return Err(Error::InvalidArgument("identity needs a character whose square is nontrivial".into()));
    }
    if cert.theta.len() != gr.order() {
        return Err(Error::InvalidArgument(format!(
            "certificate has {} angles, group order is {}",
            cert.theta.len(),
            gr.order()
        )));
    }
    Ok((trig_identity_lhs(cert, phi) - trig_identity_rhs(cert, phi)).abs())
}

/// `Q(A, B) = 2AB(1+sqrt2) + B^2(sqrt2 + 1/2)`.
pub fn quadratic_form(a: f64, b: f64) -> f64 {
    2.0 * a * b * (1.0 + SQRT_2) + b * b * SQRT2_PLUS_HALF
}

/// Maximiser of [`quadratic_form`] on the unit circle, as `(A, B, Q(A, B))`
/// with `A > 0`. Computed as the top eigenpair of
/// `[[0, 1+sqrt2], [1+sqrt2, sqrt2+1/2]]`.
pub fn ab_optimum() -> (f64, f64, f64) {
    let off = 1.0 + SQRT_2;
    let diag = SQRT2_PLUS_HALF;
    let lambda = 0.5 * (diag + (diag * diag + 4.0 * off * off).sqrt());
    // (M - lambda I) x = 0 gives -lambda A + off B = 0
    let (a, b) = (off, lambda);
    let norm = a.hypot(b);
    (a / norm, b / norm, lambda)
}

/// Balanced unit vector: standard normal entries, mean removed, normalised.
pub fn random_balanced_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    assert!(n >= 2, "balanced vectors need at least two entries");
    loop {
        let mut y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter_mut().for_each(|x| *x -= mean);
        let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            y.iter_mut().for_each(|x| *x /= norm);
            let mean = y.iter().sum::<f64>() / n as f64;
            y.iter_mut().for_each(|x| *x -= mean);
            return y;
        }
    }
}

/// Worst value seen for one certificate across a batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub trials: usize,
    /// Smallest margin (for lower-bounded quantities) or largest error.
    pub worst: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Extremum {
    fn min_margin(values: &[f64], bound: f64) -> Self {
        let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
        Self { trials: values.len(), worst, bound, passed: worst >= bound }
    }

    fn max_error(values: &[f64], bound: f64) -> Self {
        let worst = values.iter().copied().fold(0.0, f64::max);
        Self { trials: values.len(), worst, bound, passed: worst <= bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyReport {
    pub seed: u64,
    pub rng: &'static str,
    pub c1_quartic_root: f64,
    pub c1_quadratic_form: f64,
    pub semidefinite_form: Extremum,
    pub rearrangement_error: Extremum,
    pub weight_symmetry_error: Extremum,
    pub weight_pair_margin: Extremum,
    pub weight_row_sum_error: Extremum,
    pub trig_identity_residual: Extremum,
    pub sign_character_margin: Extremum,
    pub complex_character_margin: Extremum,
}

impl CertifyReport {
    pub fn all_passed(&self) -> bool {
        [
            &self.semidefinite_form,
            &self.rearrangement_error,
            &self.weight_symmetry_error,
            &self.weight_pair_margin,
            &self.weight_row_sum_error,
            &self.trig_identity_residual,
            &self.sign_character_margin,
            &self.complex_character_margin,
        ]
        .iter()
        .all(|e| e.passed)
            && (self.c1_quartic_root - self.c1_quadratic_form).abs() <= 1e-10
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Groups used for the character-sum checks.
pub const SUITE_GROUPS: &[&str] = &["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z9", "Z12", "Z15", "Z2xZ2", "Z2xZ4", "Z3xZ3", "Z3xZ5"];

/// Runs every certificate check on `trials` random instances each.
///
/// Metrics have between 2 and 12 points. Trigonometric residuals cover
/// every character of `Z_n`, `n <= 15`, whose square is nontrivial, at 100
/// random angles each.
pub fn run_suite(seed: u64, trials: usize) -> Result<CertifyReport> {
    let c1_root = cayley::c1_constant();
    let (_, _, c1_form) = ab_optimum();
    // panics if the two computations disagree
    cayley::c1();

    let metric_rows = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<[f64; 5]> {
            let mut rng = stream_rng(seed, i as u64);
            let n = rng.random_range(2..=12);
            let m = random_metric(n, &mut rng)?;
            let d = m.distances();
            let y = random_balanced_vector(n, &mut rng);
            let form = semidefinite_form(d, &y)?;
            let re = (semidefinite_form_rearranged(d, &y)? - form).abs();
            let r = verify_weight_scheme(d, &y)?;
            let get = |name| r.get(name).expect("check present").value;
            Ok([form, re, get(CHECK_SYMMETRY), get(CHECK_PAIR_NONNEG), get(CHECK_ROW_SUMS)])
        })
        .collect::<Result<Vec<_>>>()?;
    let column = |k: usize| metric_rows.iter().map(|r| r[k]).collect::<Vec<_>>();

    let mut residuals = Vec::new();
    let mut rng = stream_rng(seed, u64::MAX);
    for n in 2..=15u64 {
        let gr = AbelianGroup::cyclic(n)?;
        for chi in gr.characters() {
            if chi.squares_to_trivial(&gr) {
                continue;
            }
            let cert = TrigCertificate::optimal(&gr, &chi);
            for _ in 0..100 {
                let phi = rng.random_range(0.0..TAU);
                residuals.push(trig_identity_residual(&cert, &gr, &chi, phi)?);
            }
        }
    }

    let groups = SUITE_GROUPS.iter().map(|s| AbelianGroup::parse(s)).collect::<Result<Vec<_>>>()?;
    let char_rows = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut rng = stream_rng(seed ^ 0x5eed_c4a2, i as u64);
            let gr = &groups[i % groups.len()];
            let dv = cayley::random_dvector(gr, &mut rng)?;
            character_margins(&dv)
        })
        .collect::<Result<Vec<_>>>()?;
    let signs: Vec<f64> = char_rows.iter().flat_map(|r| r.0.iter().copied()).collect();
    let complex: Vec<f64> = char_rows.iter().flat_map(|r| r.1.iter().copied()).collect();

    Ok(CertifyReport {
        seed,
        rng: "chacha8",
        c1_quartic_root: c1_root,
        c1_quadratic_form: c1_form,
        semidefinite_form: Extremum::min_margin(&column(0), -FORM_TOL),
        rearrangement_error: Extremum::max_error(&column(1), FORM_TOL),
        weight_symmetry_error: Extremum::max_error(&column(2), WEIGHT_TOL),
        weight_pair_margin: Extremum::min_margin(&column(3), -WEIGHT_TOL),
        weight_row_sum_error: Extremum::max_error(&column(4), WEIGHT_TOL),
        trig_identity_residual: Extremum::max_error(&residuals, 1e-10),
        sign_character_margin: Extremum::min_margin(&signs, -FORM_TOL),
        complex_character_margin: Extremum::min_margin(&complex, -FORM_TOL),
    })
}

/// Margins of every nontrivial character of `dv`'s group, split into
/// `(+-1 characters, the rest)`.
pub fn character_margins(dv: &SymmetricDVector) -> Result<(Vec<f64>, Vec<f64>)> {
    let gr = dv.group();
    let mut signs = Vec::new();
    let mut complex = Vec::new();
    for chi in gr.characters().skip(1) {
        if chi.squares_to_trivial(gr) {
            signs.push(cayley::sign_character_margin(dv, &chi)?.margin);
        } else {
            complex.push(cayley::complex_character_margin(dv, &chi)?);
        }
    }
    Ok((signs, complex))
}
