//! The normalized distance Laplacian and its spectrum.
//!
//! For a distance matrix `D` with transmission matrix `T = diag(t)`, the
//! normalized distance Laplacian is `T^{-1/2} (T - D) T^{-1/2}`: ones on the
//! diagonal and `-d(u,v) / sqrt(t(u) t(v))` off it. Spectra are computed
//! with a cyclic Jacobi eigensolver, which keeps the code self-contained and
//! gives residuals we can certify.

use serde::Serialize;

use crate::constants::GAP_FLOOR;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric::{Distance, DistanceMatrix, TransmissionVector};
use crate::report::{Check, Report};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Dense symmetric matrix. Built from the upper triangle, so
/// `get(i, j) == get(j, i)` holds bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Fills entry `(i, j)` and `(j, i)` from `f(i, j)` for `i <= j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = f(i, j);
                data[i * n + j] = x;
                data[j * n + i] = x;
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Self::from_upper(rows.len(), |i, j| rows[i][j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data.chunks(self.n).map(|row| dot(row, x)).collect()
    }
}

/// Eigenvalues in ascending order, with multiplicity.
///
/// `eigenvectors[i]` (when present) is the unit eigenvector for
/// `eigenvalues[i]`. `residual` is `max_i |M x_i - lambda_i x_i|_2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub residual: f64,
    #[serde(skip)]
    pub tol: f64,
}

impl Spectrum {
    /// Spectrum known in closed form; sorts the values.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues, eigenvectors: None, residual: 0.0, tol: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn largest(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Builds the normalized distance Laplacian. Needs `n >= 2` so that every
/// transmission is positive.
pub fn build_ndl<D: Distance>(d: &DistanceMatrix<D>) -> Result<SymmetricMatrix> {
    let n = d.n();
    if n < 2 {
        return Err(Error::TooSmall { need: 2, got: n });
    }
    let t = d.transmission().to_f64();
    if let Some(u) = t.iter().position(|&x| x <= 0.0) {
        return Err(Error::InvalidArgument(format!("transmission of vertex {u} is not positive")));
    }
    let s: Vec<f64> = t.iter().map(|x| x.sqrt()).collect();
    Ok(SymmetricMatrix::from_upper(n, |i, j| {
        if i == j {
            1.0
        } else {
            -d.get(i, j).to_f64() / (s[i] * s[j])
        }
    }))
}

/// Classical normalized Laplacian `I - Deg^{-1/2} A Deg^{-1/2}`.
pub fn build_classical_nl(g: &Graph) -> Result<SymmetricMatrix> {
    if let Some(u) = (0..g.n()).find(|&u| g.degree(u) == 0) {
        return Err(Error::IsolatedVertex(u));
    }
    let s: Vec<f64> = (0..g.n()).map(|u| (g.degree(u) as f64).sqrt()).collect();
    Ok(SymmetricMatrix::from_upper(g.n(), |i, j| {
        if i == j {
            1.0
        } else if g.has_edge(i, j) {
            -1.0 / (s[i] * s[j])
        } else {
            0.0
        }
    }))
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius norm drops to `tol * |m|_F`;
/// fails after [`MAX_SWEEPS`] sweeps.
pub fn eig_sym(m: &SymmetricMatrix, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = m.n();
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let fro = m.frobenius_norm();
    let target = tol * fro;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- J^T A J, columns first, then rows
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let eigenvectors: Vec<Vec<f64>> =
        order.iter().map(|&col| (0..n).map(|k| v[k * n + col]).collect()).collect();
    let residual = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&lambda, x)| {
            let mx = m.mul_vec(x);
            mx.iter().zip(x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    Ok(Spectrum { eigenvalues, eigenvectors: Some(eigenvectors), residual, tol })
}

/// Second-smallest eigenvalue, counted with multiplicity.
pub fn spectral_gap(s: &Spectrum) -> f64 {
    assert!(s.len() >= 2, "spectral gap needs at least two eigenvalues");
    s.eigenvalues[1]
}

/// Spectrum of the normalized distance Laplacian of `d`.
pub fn ndl_spectrum<D: Distance>(d: &DistanceMatrix<D>, tol: f64) -> Result<Spectrum> {
    eig_sym(&build_ndl(d)?, tol)
}

/// `sum_{u,v} d(u,v) (y_u - y_v)^2 / (2 sum_u t(u) y_u^2)`, summing over
/// ordered pairs. Minimising over `y` orthogonal to `T 1` gives the
/// spectral gap.
pub fn rayleigh_quotient<D: Distance>(
    d: &DistanceMatrix<D>,
    t: &TransmissionVector<D>,
    y: &[f64],
) -> Result<f64> {
    let n = d.n();
    if y.len() != n {
        return Err(Error::InvalidArgument(format!("vector has length {}, expected {n}", y.len())));
    }
    let denom: f64 = 2.0 * (0..n).map(|u| t.get(u).to_f64() * y[u] * y[u]).sum::<f64>();
    if y.iter().all(|&x| x == 0.0) || denom == 0.0 {
        return Err(Error::InvalidArgument("Rayleigh quotient of the zero vector".into()));
    }
    let mut num = 0.0;
    for u in 0..n {
        let row = d.row(u);
        for v in 0..n {
            let diff = y[u] - y[v];
            num += row[v].to_f64() * diff * diff;
        }
    }
    Ok(num / denom)
}

/// Removes the component of `y` along `t`, leaving `sum_u t(u) y_u = 0`.
pub fn project_against_transmission(t: &[f64], y: &[f64]) -> Vec<f64> {
    let c = dot(t, y) / dot(t, t);
    y.iter().zip(t).map(|(a, b)| a - c * b).collect()
}

/// Checks the spectrum of a normalized distance Laplacian against the
/// known constraints: smallest eigenvalue zero, everything at most 2,
/// strictly below 2 once `n > 2`, and the universal gap floor.
pub fn check_spectrum_bounds(s: &Spectrum, n: usize, tol: f64) -> Report {
    let mut r = Report::new(tol);
    r.push(Check::at_most("smallest eigenvalue is zero", s.smallest().abs(), 0.0, tol));
    r.push(Check::at_most("largest eigenvalue at most 2", s.largest(), 2.0, tol));
    if n > 2 {
        r.push(Check::below("largest eigenvalue below 2", s.largest(), 2.0, tol));
    }
    if s.len() >= 2 {
        r.push(Check::at_least("gap floor (9-4*sqrt2)/7", spectral_gap(s), GAP_FLOOR, tol));
    }
    r
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bfs_apsp;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ndl_entries() {
        let m = build_ndl(&bfs_apsp(&Graph::complete(2)).unwrap()).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);

        let m = build_ndl(&bfs_apsp(&Graph::complete(4)).unwrap()).unwrap();
        for i in 0..4 {
            assert_eq!(m.get(i, i), 1.0);
            for j in 0..4 {
                if i != j {
                    assert!(close(m.get(i, j), -1.0 / 3.0, 1e-15));
                }
            }
        }

        let m = build_ndl(&bfs_apsp(&Graph::path(3)).unwrap()).unwrap();
        assert!(close(m.get(0, 1), -1.0 / 6f64.sqrt(), 1e-15));
        assert!(close(m.get(0, 2), -2.0 / 3.0, 1e-15));
        assert!(close(m.get(1, 2), -1.0 / 6f64.sqrt(), 1e-15));
    }

    #[test]
    fn ndl_rejects_single_point() {
        assert!(matches!(
            build_ndl(&bfs_apsp(&Graph::empty(1)).unwrap()),
            Err(Error::TooSmall { need: 2, got: 1 })
        ));
    }

    #[test]
    fn two_by_two_closed_form() {
        let s = eig_sym(&SymmetricMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]), DEFAULT_TOL)
            .unwrap();
        assert!(close(s.eigenvalues[0], 0.0, 1e-14));
        assert!(close(s.eigenvalues[1], 2.0, 1e-14));
        assert_eq!(spectral_gap(&s), s.eigenvalues[1]);
    }

    #[test]
    fn complete_graph_spectrum() {
        for n in 2..=8 {
            let s = ndl_spectrum(&bfs_apsp(&Graph::complete(n)).unwrap(), DEFAULT_TOL).unwrap();
            let top = n as f64 / (n as f64 - 1.0);
            assert!(close(s.eigenvalues[0], 0.0, 1e-12));
            assert!(s.eigenvalues[1..].iter().all(|&x| close(x, top, 1e-12)));
        }
    }

    #[test]
    fn four_cycle_spectrum() {
        let s = ndl_spectrum(&bfs_apsp(&Graph::cycle(4)).unwrap(), DEFAULT_TOL).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([0.0, 1.0, 1.5, 1.5]) {
            assert!(close(*got, want, 1e-12), "{:?}", s.eigenvalues);
        }
        assert!(close(spectral_gap(&s), 1.0, 1e-12));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let m = SymmetricMatrix::from_rows(&[vec![1.0]]);
        assert!(eig_sym(&m, 0.0).is_err());
        assert!(eig_sym(&m, f64::NAN).is_err());
    }

    #[test]
    fn rayleigh_examples() {
        let d = bfs_apsp(&Graph::complete(2)).unwrap();
        let t = d.transmission();
        assert!(close(rayleigh_quotient(&d, &t, &[1.0, -1.0]).unwrap(), 2.0, 1e-15));
        assert_eq!(rayleigh_quotient(&d, &t, &[1.0, 1.0]).unwrap(), 0.0);
        assert!(rayleigh_quotient(&d, &t, &[0.0, 0.0]).is_err());

        let d = bfs_apsp(&Graph::cycle(4)).unwrap();
        let t = d.transmission();
        // eigenvectors of the two character classes on Z_4
        assert!(close(rayleigh_quotient(&d, &t, &[1.0, 0.0, -1.0, 0.0]).unwrap(), 1.5, 1e-15));
        assert!(close(rayleigh_quotient(&d, &t, &[1.0, -1.0, 1.0, -1.0]).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn bounds_report() {
        let s = ndl_spectrum(&bfs_apsp(&Graph::complete(2)).unwrap(), DEFAULT_TOL).unwrap();
        let r = check_spectrum_bounds(&s, 2, 1e-9);
        assert!(r.all_passed(), "{r:?}");
        assert!(r.get("largest eigenvalue below 2").is_none());

        let s = ndl_spectrum(&bfs_apsp(&Graph::path(5)).unwrap(), DEFAULT_TOL).unwrap();
        assert!(check_spectrum_bounds(&s, 5, 1e-9).all_passed());

        let fake = Spectrum::from_eigenvalues(vec![0.0, 0.3, 1.0, 1.2]);
        let r = check_spectrum_bounds(&fake, 4, 1e-9);
        assert!(!r.all_passed());
        assert_eq!(r.failures().map(|c| c.name.as_str()).collect::<Vec<_>>(), vec!["gap floor (9-4*sqrt2)/7"]);
    }

    #[test]
    fn classical_nl_examples() {
        let m = build_classical_nl(&Graph::complete(2)).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let m = build_classical_nl(&Graph::cycle(4)).unwrap();
        assert!(close(m.get(0, 1), -0.5, 1e-15));
        assert_eq!(m.get(0, 2), 0.0);
        let m = build_classical_nl(&Graph::path(3)).unwrap();
        assert!(close(m.get(0, 1), -1.0 / 2f64.sqrt(), 1e-15));
        assert!(matches!(build_classical_nl(&Graph::empty(2)), Err(Error::IsolatedVertex(0))));
    }
}
