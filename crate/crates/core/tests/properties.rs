//! Property tests over random graphs, metrics and vectors.

use distgap::certify::{f_pair_square, f_weight, random_balanced_vector, semidefinite_form, semidefinite_form_rearranged};
use distgap::graph::{bfs_apsp, parse_graph6, Graph};
use distgap::harness::random_metric;
use distgap::metric::validate_metric;
use distgap::spectral::{
    build_ndl, eig_sym, project_against_transmission, rayleigh_quotient, spectral_gap, SymmetricMatrix, DEFAULT_TOL,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Connected graph on `2..=max_n` vertices: a random spanning tree plus
/// random extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let parents = (1..n).map(|v| 0..v).collect::<Vec<_>>();
        let extra = proptest::collection::vec(any::<bool>(), n * (n - 1) / 2);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut g = Graph::empty(n);
            for (v, p) in parents.into_iter().enumerate() {
                g.add_edge(v + 1, p).unwrap();
            }
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if extra[k] && !g.has_edge(u, v) {
                        g.add_edge(u, v).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::empty(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn apsp_is_a_metric(g in connected_graph(7)) {
        let d = bfs_apsp(&g).unwrap();
        prop_assert!(validate_metric(d.to_rows()).is_ok());
        let t = d.transmission();
        let pairs: u64 = (0..g.n()).flat_map(|u| (u + 1..g.n()).map(move |v| (u, v))).map(|(u, v)| d.get(u, v)).sum();
        prop_assert_eq!(t.total(), 2 * pairs);
    }

    #[test]
    fn graph6_round_trip(g in any_graph(30)) {
        let s = g.to_graph6();
        let back = parse_graph6(s.as_bytes()).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_graph6(), s);
    }

    #[test]
    fn ndl_is_psd_with_known_null_vector(g in connected_graph(12)) {
        let d = bfs_apsp(&g).unwrap();
        let m = build_ndl(&d).unwrap();
        let s = eig_sym(&m, DEFAULT_TOL).unwrap();
        prop_assert!(s.eigenvalues.iter().all(|&x| x >= -1e-9));
        prop_assert!(s.largest() <= 2.0 + 1e-9);
        let t = d.transmission().to_f64();
        let norm = t.iter().sum::<f64>().sqrt();
        let x: Vec<f64> = t.iter().map(|v| v.sqrt() / norm).collect();
        let mx = m.mul_vec(&x);
        let res = mx.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(res <= 1e-9, "residual {}", res);
    }

    #[test]
    fn rayleigh_quotient_attains_and_bounds_the_gap(g in connected_graph(10), seed in any::<u64>()) {
        let d = bfs_apsp(&g).unwrap();
        let t = d.transmission();
        let s = eig_sym(&build_ndl(&d).unwrap(), DEFAULT_TOL).unwrap();
        let gap = spectral_gap(&s);
        let x2 = &s.eigenvectors.as_ref().unwrap()[1];
        let tf = t.to_f64();
        let y: Vec<f64> = x2.iter().zip(&tf).map(|(x, t)| x / t.sqrt()).collect();
        let q = rayleigh_quotient(&d, &t, &y).unwrap();
        prop_assert!((q - gap).abs() <= 1e-8, "q={} gap={}", q, gap);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = random_balanced_vector(g.n(), &mut rng);
        let y = project_against_transmission(&tf, &raw);
        if y.iter().any(|v| v.abs() > 1e-9) {
            prop_assert!(rayleigh_quotient(&d, &t, &y).unwrap() >= gap - 1e-9);
        }
    }

    #[test]
    fn two_by_two_closed_form(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
        let m = SymmetricMatrix::from_rows(&[vec![a, b], vec![b, c]]);
        let s = eig_sym(&m, DEFAULT_TOL).unwrap();
        let mean = (a + c) / 2.0;
        let r = (((a - c) / 2.0).powi(2) + b * b).sqrt();
        prop_assert!((s.eigenvalues[0] - (mean - r)).abs() <= 1e-9);
        prop_assert!((s.eigenvalues[1] - (mean + r)).abs() <= 1e-9);
    }

    #[test]
    fn three_by_three_trace_and_determinant(v in proptest::collection::vec(-5.0f64..5.0, 6)) {
        let rows = vec![
            vec![v[0], v[1], v[2]],
            vec![v[1], v[3], v[4]],
            vec![v[2], v[4], v[5]],
        ];
        let s = eig_sym(&SymmetricMatrix::from_rows(&rows), DEFAULT_TOL).unwrap();
        let e = &s.eigenvalues;
        // roots of the characteristic cubic: match its three coefficients
        let tr = v[0] + v[3] + v[5];
        let minors = v[0] * v[3] - v[1] * v[1] + v[0] * v[5] - v[2] * v[2] + v[3] * v[5] - v[4] * v[4];
        let det = v[0] * (v[3] * v[5] - v[4] * v[4]) - v[1] * (v[1] * v[5] - v[4] * v[2]) + v[2] * (v[1] * v[4] - v[3] * v[2]);
        prop_assert!((e[0] + e[1] + e[2] - tr).abs() <= 1e-9);
        prop_assert!((e[0] * e[1] + e[0] * e[2] + e[1] * e[2] - minors).abs() <= 1e-8);
        prop_assert!((e[0] * e[1] * e[2] - det).abs() <= 1e-7);
    }

    #[test]
    fn f_pair_identity(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let lhs = f_weight(a, b, c) + f_weight(a, c, b);
        prop_assert!((lhs - f_pair_square(a, b, c)).abs() <= 1e-12 * (1.0 + lhs.abs()));
        prop_assert_eq!(f_weight(a, b, c), f_weight(b, a, c));
    }

    #[test]
    fn semidefinite_form_on_random_metrics(seed in any::<u64>(), n in 2usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_metric(n, &mut rng).unwrap();
        let y = random_balanced_vector(n, &mut rng);
        let form = semidefinite_form(m.distances(), &y).unwrap();
        prop_assert!(form >= -1e-9);
        let other = semidefinite_form_rearranged(m.distances(), &y).unwrap();
        prop_assert!((form - other).abs() <= 1e-9);
    }
}
