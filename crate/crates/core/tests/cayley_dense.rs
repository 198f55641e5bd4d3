//! Closed-form Cayley spectra against the dense eigensolver, and the
//! abelian floors on graph and non-graph translation-invariant metrics.

use distgap::cayley::{
    cayley_graph, cayley_spectrum, check_cayley_bounds, complex_character_margin, dvector_from_graph, random_dvector,
    random_connection_set, sign_character_margin, AbelianGroup,
};
use distgap::certify::{trig_identity_residual, TrigCertificate};
use distgap::graph::bfs_apsp;
use distgap::spectral::{ndl_spectrum, DEFAULT_TOL};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_multiset_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
    }
}

fn compare(gr: &AbelianGroup, conn: &[usize]) {
    let g = cayley_graph(gr, conn).unwrap();
    let dv = dvector_from_graph(gr, &g).unwrap();
    let closed = cayley_spectrum(&dv).unwrap();
    let dense = ndl_spectrum(&bfs_apsp(&g).unwrap(), DEFAULT_TOL).unwrap();
    assert_multiset_close(&closed.eigenvalues, &dense.eigenvalues, 1e-9);
    assert!(check_cayley_bounds(&closed, gr, 1e-9).all_passed(), "{gr} {conn:?}");
}

#[test]
fn characters_are_orthogonal() {
    for spec in ["Z2", "Z5", "Z8", "Z2xZ2", "Z2xZ6", "Z3xZ3", "Z4xZ4", "Z2xZ2xZ2", "Z64"] {
        let gr = AbelianGroup::parse(spec).unwrap();
        let n = gr.order();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (gr.character(i), gr.character(j));
                let s: Complex64 = (0..n).map(|v| a.value(&gr, v) * b.value(&gr, v).conj()).sum::<Complex64>() / n as f64;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s.re - want).abs() <= 1e-12 && s.im.abs() <= 1e-12, "{spec} {i} {j}");
            }
        }
        // multiplicative
        let chi = gr.character(n - 1);
        for u in 0..n {
            for v in 0..n {
                let lhs = chi.value(&gr, gr.add(u, v));
                let rhs = chi.value(&gr, u) * chi.value(&gr, v);
                assert!((lhs - rhs).norm() <= 1e-12);
            }
        }
    }
}

#[test]
fn cycles_match_dense() {
    for n in 3..=30u64 {
        let gr = AbelianGroup::cyclic(n).unwrap();
        compare(&gr, &[1, n as usize - 1]);
    }
}

#[test]
fn products_match_dense() {
    for m in 2..=10u64 {
        let gr = AbelianGroup::new(vec![2, m]).unwrap();
        let conn = gr.parse_connection_set(&format!("(1,0),(0,1),(0,{})", m - 1)).unwrap();
        let mut conn = conn;
        conn.dedup();
        compare(&gr, &conn);
    }
    let gr = AbelianGroup::parse("Z3xZ3").unwrap();
    compare(&gr, &gr.parse_connection_set("(1,0),(2,0),(0,1),(0,2)").unwrap());
}

#[test]
fn random_generating_sets_match_dense() {
    let groups = ["Z6", "Z9", "Z12", "Z2xZ4", "Z3xZ3", "Z2xZ2xZ2", "Z15", "Z4xZ4"];
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gr = AbelianGroup::parse(groups[seed as usize % groups.len()]).unwrap();
        let size = rng.random_range(gr.rank()..=gr.rank() + 2);
        let conn = random_connection_set(&gr, size, &mut rng).unwrap();
        compare(&gr, &conn);
    }
}

#[test]
fn translation_invariant_metrics_meet_floors() {
    let groups = ["Z3", "Z5", "Z7", "Z9", "Z15", "Z3xZ3", "Z4", "Z8", "Z2xZ2", "Z2xZ6"];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..200 {
        let gr = AbelianGroup::parse(groups[i % groups.len()]).unwrap();
        let dv = random_dvector(&gr, &mut rng).unwrap();
        let s = cayley_spectrum(&dv).unwrap();
        let r = check_cayley_bounds(&s, &gr, 1e-9);
        assert!(r.all_passed(), "{gr}: {:?}", r.failures().collect::<Vec<_>>());
        let dense = ndl_spectrum(&dv.to_distance_matrix(), DEFAULT_TOL).unwrap();
        assert_multiset_close(&s.eigenvalues, &dense.eigenvalues, 1e-9);
    }
}

#[test]
fn character_margins_on_random_vectors() {
    let groups = ["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z2xZ2", "Z3xZ3", "Z2xZ4"];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for spec in groups {
        let gr = AbelianGroup::parse(spec).unwrap();
        for _ in 0..100 {
            let dv = random_dvector(&gr, &mut rng).unwrap();
            for chi in gr.characters().skip(1) {
                if chi.squares_to_trivial(&gr) {
                    let w = sign_character_margin(&dv, &chi).unwrap();
                    assert!(w.margin >= -1e-9 && w.chain_holds(1e-9), "{spec} {w:?}");
                } else {
                    assert!(complex_character_margin(&dv, &chi).unwrap() >= -1e-9);
                }
            }
        }
    }
}

#[test]
fn trig_identity_on_cyclic_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 3..=15u64 {
        let gr = AbelianGroup::cyclic(n).unwrap();
        for chi in gr.characters().filter(|c| !c.squares_to_trivial(&gr)) {
            let a = rng.random_range(-1.0..1.0);
            let b = rng.random_range(-1.0..1.0);
            let cert = TrigCertificate::new(a, b, &gr, &chi);
            for _ in 0..20 {
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                assert!(trig_identity_residual(&cert, &gr, &chi, phi).unwrap() <= 1e-10);
            }
        }
    }
}
