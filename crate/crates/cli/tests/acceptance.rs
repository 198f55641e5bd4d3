//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use distgap::cayley::{
    self, c1_constant, c1_quartic, cayley_graph, cayley_spectrum, check_cayley_bounds, dvector_from_graph,
    random_connection_set, random_dvector, AbelianGroup,
};
use distgap::certify::{ab_optimum, run_suite, FORM_TOL, WEIGHT_TOL};
use distgap::cheeger::{
    cheeger_exact, cheeger_lower_bound, classify_equality, h_of_cut, isomorphic_brute_force, EqualityClass, N5Kind,
};
use distgap::constants::{GAP_FLOOR, ODD_CAYLEY_FLOOR, TWO_THIRDS};
use distgap::graph::{bfs_apsp, Graph};
use distgap::harness::{random_metric, strip_timing};
use distgap::spectral::{build_classical_nl, eig_sym, ndl_spectrum, spectral_gap, Spectrum, DEFAULT_TOL};
use distgap::Value;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn connected_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs = n * (n - 1) / 2;
    (0..1u64 << pairs).map(move |m| Graph::from_pair_mask(n, m)).filter(Graph::is_connected)
}

fn gap_of(g: &Graph) -> f64 {
    spectral_gap(&ndl_spectrum(&bfs_apsp(g).unwrap(), DEFAULT_TOL).unwrap())
}

fn exact_h(g: &Graph) -> Value {
    let d = bfs_apsp(g).unwrap();
    cheeger_exact(&d, &d.transmission()).unwrap().h
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn multiset_diff(a: &Spectrum, b: &Spectrum) -> f64 {
    assert_eq!(a.len(), b.len());
    sorted(a.eigenvalues.clone())
        .iter()
        .zip(sorted(b.eigenvalues.clone()))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let third = Value::exact(1, 3);
    let mut count = 0usize;
    let mut min_gap = f64::INFINITY;
    for n in 2..=5 {
        let bound = Value::Exact(cheeger_lower_bound(n));
        for g in connected_graphs(n) {
            count += 1;
            let d = bfs_apsp(&g).unwrap();
            let res = cheeger_exact(&d, &d.transmission()).unwrap();
            let h = &res.h;
            ensure!(h.as_exact().is_some(), "h not exact for {}", g.to_graph6());
            ensure!(h.compare(&bound) != Ordering::Less, "h = {h} below bound {bound} on {}", g.to_graph6());
            ensure!(h.compare(&third) == Ordering::Greater, "h = {h} not above 1/3 on {}", g.to_graph6());
            let gap = gap_of(&g);
            let hf = h.to_f64();
            ensure!(hf * hf / 2.0 <= gap + TOL, "h^2/2 > gap on {}", g.to_graph6());
            ensure!(gap <= 2.0 * hf + TOL, "gap > 2h on {}", g.to_graph6());
            ensure!(gap >= GAP_FLOOR - TOL, "gap {gap} below floor on {}", g.to_graph6());
            min_gap = min_gap.min(gap);
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!("{count} connected labeled graphs, min gap {min_gap:.6}, {elapsed:.2?}"))
}

/// Independent oracle: `A` (size `m`) independent, `B` (size `n - m`) with
/// every `A`-`B` pair adjacent, for some choice of `A`.
fn contains_spanning_bipartite(g: &Graph, m: usize) -> bool {
    let n = g.n();
    (0..1u64 << n).filter(|a| a.count_ones() as usize == m).any(|a| {
        g.edges().all(|(u, v)| !(a >> u & 1 == 1 && a >> v & 1 == 1))
            && (0..n).all(|u| (0..n).all(|v| a >> u & 1 == 0 || a >> v & 1 == 1 || g.has_edge(u, v)))
    })
}

fn criterion_2() -> Outcome {
    let mut lines = Vec::new();
    for n in 4..=6 {
        let bound = Value::Exact(cheeger_lower_bound(n));
        let mut equal = 0usize;
        let mut exceptional = BTreeSet::new();
        for g in connected_graphs(n) {
            let at_bound = exact_h(&g) == bound;
            let class = classify_equality(&g);
            ensure!(at_bound == class.is_extremal(), "n={n}: {} at_bound={at_bound} class={class}", g.to_graph6());
            if !at_bound {
                continue;
            }
            equal += 1;
            match (n, class) {
                (4, EqualityClass::EvenExtremal { m: 2 }) => {
                    ensure!(isomorphic_brute_force(&g, &Graph::complete_bipartite(2, 2)), "{} not K_2,2", g.to_graph6());
                }
                (6, EqualityClass::EvenExtremal { m: 3 }) => {
                    ensure!(isomorphic_brute_force(&g, &Graph::complete_bipartite(3, 3)), "{} not K_3,3", g.to_graph6());
                }
                (5, EqualityClass::OddExtremal { m: 2, .. }) => {
                    ensure!(contains_spanning_bipartite(&g, 2), "{} lacks K_2,3", g.to_graph6());
                }
                (5, EqualityClass::N5Exceptional { kind }) => {
                    ensure!(isomorphic_brute_force(&g, &kind.graph()), "{} not {kind:?}", g.to_graph6());
                    ensure!(!contains_spanning_bipartite(&g, 2), "{} is in the K_2,3 family", g.to_graph6());
                    exceptional.insert(format!("{kind:?}"));
                }
                _ => return Err(format!("n={n}: unexpected class {class} for {}", g.to_graph6())),
            }
        }
        if n == 5 {
            ensure!(exceptional.len() == 3, "n=5 exceptional classes seen: {exceptional:?}");
            for kind in N5Kind::ALL {
                ensure!(exact_h(&kind.graph()) == bound, "{kind:?} misses the bound");
            }
        }
        lines.push(format!("n={n}: {equal} labeled equality graphs"));
    }
    Ok(lines.join(", ") + ", 3 exceptional classes at n=5")
}

fn criterion_3() -> Outcome {
    let named = [
        ("C4", Graph::cycle(4), Value::exact(1, 2)),
        ("K33", Graph::complete_bipartite(3, 3), Value::exact(3, 7)),
        ("K23", Graph::complete_bipartite(2, 3), Value::exact(3, 5)),
        ("P5", Graph::path(5), Value::exact(3, 5)),
    ];
    for (name, g, want) in &named {
        let h = exact_h(g);
        ensure!(&h == want, "h({name}) = {h}, want {want}");
    }
    let d = bfs_apsp(&Graph::path(5)).unwrap();
    let ends = h_of_cut(&d, &d.transmission(), 0b10001).unwrap();
    ensure!(ends == Value::exact(3, 5), "P5 endpoints cut gives {ends}");
    let c4 = gap_of(&Graph::cycle(4));
    ensure!((c4 - 1.0).abs() <= TOL, "gap(C4) = {c4}");
    for n in 2..=8 {
        let got = gap_of(&Graph::complete(n));
        let want = n as f64 / (n as f64 - 1.0);
        ensure!((got - want).abs() <= TOL, "gap(K{n}) = {got}, want {want}");
    }
    Ok("h(C4)=1/2, h(K33)=3/7, h(K23)=3/5, h(P5)=3/5 (endpoints cut), gap(C4)=1, gap(K_n)=n/(n-1) for n=2..8".into())
}

struct CayleyCase {
    group: AbelianGroup,
    conn: Vec<usize>,
}

fn cayley_cases() -> Vec<CayleyCase> {
    let mut cases = Vec::new();
    let mut push = |group: AbelianGroup, conn: Vec<usize>| cases.push(CayleyCase { group, conn });
    for n in 3..=30u64 {
        let gr = AbelianGroup::cyclic(n).unwrap();
        let conn = gr.parse_connection_set(&format!("1,{}", n - 1)).unwrap();
        push(gr.clone(), conn);
        if n >= 5 {
            let conn = gr.parse_connection_set(&format!("1,{},2,{}", n - 1, n - 2)).unwrap();
            push(gr, conn);
        }
    }
    for m in 2..=10u64 {
        let gr = AbelianGroup::new(vec![2, m]).unwrap();
        let conn = gr.parse_connection_set(&format!("(1,0),(0,1),(0,{})", m - 1)).unwrap();
        push(gr, conn);
    }
    let z33 = AbelianGroup::parse("Z3xZ3").unwrap();
    let conn = z33.parse_connection_set("(1,0),(2,0),(0,1),(0,2)").unwrap();
    push(z33, conn);
    let pool = ["Z7", "Z9", "Z12", "Z15", "Z2xZ4", "Z3xZ3", "Z2xZ6", "Z3xZ5", "Z4xZ4", "Z2xZ2xZ3"];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let gr = AbelianGroup::parse(pool[i % pool.len()]).unwrap();
        let size = rng.random_range(gr.rank()..=gr.rank() + 3);
        let conn = random_connection_set(&gr, size, &mut rng).unwrap();
        push(gr, conn);
    }
    cases
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let cases = cayley_cases();
    let mut worst = 0.0f64;
    for c in &cases {
        let g = cayley_graph(&c.group, &c.conn).unwrap();
        let closed = cayley_spectrum(&dvector_from_graph(&c.group, &g).unwrap()).unwrap();
        let dense = ndl_spectrum(&bfs_apsp(&g).unwrap(), DEFAULT_TOL).unwrap();
        let diff = multiset_diff(&closed, &dense);
        ensure!(diff <= TOL, "{} {:?}: closed form differs from dense by {diff:e}", c.group, c.conn);
        worst = worst.max(diff);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{} Cayley graphs, max |diff| {worst:.1e}, {elapsed:.2?}", cases.len()))
}

fn criterion_5() -> Outcome {
    let mut min_all = f64::INFINITY;
    let mut min_odd = f64::INFINITY;
    for c in cayley_cases() {
        let g = cayley_graph(&c.group, &c.conn).unwrap();
        let spec = cayley_spectrum(&dvector_from_graph(&c.group, &g).unwrap()).unwrap();
        let gap = spectral_gap(&spec);
        ensure!(gap >= TWO_THIRDS - TOL, "{} {:?}: gap {gap} below 2/3", c.group, c.conn);
        min_all = min_all.min(gap);
        if c.group.order() % 2 == 1 {
            ensure!(gap > ODD_CAYLEY_FLOOR, "{} {:?}: gap {gap} not above 0.718", c.group, c.conn);
            min_odd = min_odd.min(gap);
        }
        ensure!(check_cayley_bounds(&spec, &c.group, TOL).all_passed(), "{} report failed", c.group);
    }
    let root = c1_constant();
    let (a, b, form) = ab_optimum();
    ensure!((root - form).abs() <= 1e-10, "C1 quartic {root} vs 2x2 {form}");
    ensure!(a > 0.0 && (a.hypot(b) - 1.0).abs() <= 1e-12, "optimiser ({a}, {b}) not a unit vector with A > 0");
    let floor = 1.0 - 1.0 / root;
    ensure!(floor > 0.718 && floor < 0.719, "1 - 1/C1 = {floor}");
    let p = c1_quartic(root);
    ensure!(p.abs() <= 1e-8, "quartic residual {p}");
    ensure!(cayley::c1() == root, "c1() disagrees with bisection");
    Ok(format!("min gap {min_all:.6}, min odd-order gap {min_odd:.6}, C1 = {root:.12}, 1 - 1/C1 = {floor:.6}, |p(C1)| = {:.1e}", p.abs()))
}

fn criterion_6() -> Outcome {
    let r = run_suite(0, 1000).map_err(|e| e.to_string())?;
    let pinned = [
        ("semidefinite form", &r.semidefinite_form, -FORM_TOL, 1000),
        ("rearrangement", &r.rearrangement_error, FORM_TOL, 1000),
        ("weight symmetry", &r.weight_symmetry_error, WEIGHT_TOL, 1000),
        ("weight pairs", &r.weight_pair_margin, -WEIGHT_TOL, 1000),
        ("weight rows", &r.weight_row_sum_error, WEIGHT_TOL, 1000),
        // counted per character; odd-order draws have no +-1 character
        ("sign characters", &r.sign_character_margin, -1e-9, 1),
        ("complex characters", &r.complex_character_margin, -1e-9, 1000),
    ];
    for (name, e, bound, min_trials) in pinned {
        ensure!(e.bound == bound, "{name}: bound {} not pinned at {bound}", e.bound);
        ensure!(e.trials >= min_trials, "{name}: only {} trials", e.trials);
        ensure!(e.passed, "{name}: worst {} vs {bound}", e.worst);
    }
    ensure!(FORM_TOL == 1e-9, "form tolerance drifted");
    let trig = &r.trig_identity_residual;
    ensure!(trig.bound == 1e-10 && trig.passed, "trig residual {} (bound {})", trig.worst, trig.bound);
    let mut expected = 0;
    for n in 2..=15u64 {
        let gr = AbelianGroup::cyclic(n).unwrap();
        expected += 100 * gr.characters().filter(|c| !c.squares_to_trivial(&gr)).count();
    }
    ensure!(trig.trials == expected, "trig residual covered {} angles, want {expected}", trig.trials);
    ensure!(r.all_passed(), "suite reports failure");
    Ok(format!(
        "form worst {:.3e}, pair margin {:.3e}, trig residual {:.1e} over {} angles, sign {:.3e}, complex {:.3e}",
        r.semidefinite_form.worst,
        r.weight_pair_margin.worst,
        trig.worst,
        trig.trials,
        r.sign_character_margin.worst,
        r.complex_character_margin.worst
    ))
}

fn classical_gap(g: &Graph) -> f64 {
    spectral_gap(&eig_sym(&build_classical_nl(g).unwrap(), DEFAULT_TOL).unwrap())
}

fn criterion_7() -> Outcome {
    let mut prev = f64::INFINITY;
    let mut rows = Vec::new();
    for k in 3..=8 {
        let g = Graph::barbell(k, k);
        let classical = classical_gap(&g);
        let distance = gap_of(&g);
        ensure!(classical < prev, "classical gap not decreasing at k={k}: {classical} >= {prev}");
        ensure!(distance >= GAP_FLOOR, "distance gap {distance} below floor at k={k}");
        prev = classical;
        rows.push(format!("k={k}: {classical:.4}/{distance:.4}"));
    }
    ensure!(prev < 0.1, "classical gap at k=8 is {prev}");
    Ok(format!("classical/distance gap {}", rows.join(", ")))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut min_gap = f64::INFINITY;
    for i in 0..500 {
        let n = rng.random_range(2..=12);
        let m = random_metric(n, &mut rng).map_err(|e| e.to_string())?;
        ensure!(!m.from_graph(), "metric {i} flagged as a graph metric");
        let gap = spectral_gap(&ndl_spectrum(m.distances(), DEFAULT_TOL).unwrap());
        ensure!(gap >= GAP_FLOOR - TOL, "metric {i} (n={n}): gap {gap}");
        min_gap = min_gap.min(gap);
    }
    let groups = ["Z2", "Z3", "Z5", "Z6", "Z7", "Z8", "Z9", "Z11", "Z2xZ2", "Z2xZ4", "Z3xZ3", "Z2xZ6", "Z3xZ5", "Z2xZ2xZ2"];
    let mut min_inv = f64::INFINITY;
    let mut min_odd = f64::INFINITY;
    for i in 0..200 {
        let gr = AbelianGroup::parse(groups[i % groups.len()]).unwrap();
        let dv = random_dvector(&gr, &mut rng).map_err(|e| e.to_string())?;
        let closed = cayley_spectrum(&dv).unwrap();
        let dense = ndl_spectrum(&dv.to_distance_matrix(), DEFAULT_TOL).unwrap();
        ensure!(multiset_diff(&closed, &dense) <= TOL, "{gr}: closed form differs from dense");
        let gap = spectral_gap(&closed);
        ensure!(gap >= TWO_THIRDS - TOL, "{gr}: gap {gap} below 2/3");
        if gr.order() % 2 == 1 {
            ensure!(gap > ODD_CAYLEY_FLOOR, "{gr}: gap {gap} not above 0.718");
            min_odd = min_odd.min(gap);
        }
        min_inv = min_inv.min(gap);
    }
    Ok(format!(
        "500 metrics min gap {min_gap:.6}; 200 translation-invariant min gap {min_inv:.6}, odd order {min_odd:.6}"
    ))
}

fn run_scan(dir: &std::path::Path) -> std::result::Result<Vec<String>, String> {
    let out = dir.join("records.jsonl");
    let status = Command::new(env!("CARGO_BIN_EXE_distgap"))
        .args(["scan", "--family", "random-connected", "--n", "6..9", "--count", "25", "--seed", "20"])
        .arg("--out")
        .arg(&out)
        .arg("--summary")
        .arg(dir.join("summary.json"))
        .arg("--json")
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    ensure!(status.code() == Some(0), "scan exited with {status}");
    std::fs::read_to_string(&out)
        .map_err(|e| e.to_string())?
        .lines()
        .map(|l| strip_timing(l).map_err(|e| e.to_string()))
        .collect()
}

fn criterion_9() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_scan(a.path())?;
    let second = run_scan(b.path())?;
    ensure!(first.len() == 100, "expected 100 records, got {}", first.len());
    ensure!(first == second, "JSONL differs between runs");
    Ok(format!("{} records identical after stripping timing", first.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exhaustive small graphs", criterion_1),
        ("equality census", criterion_2),
        ("named values", criterion_3),
        ("Cayley closed form vs dense", criterion_4),
        ("abelian Cayley floors and C1", criterion_5),
        ("certificate suite", criterion_6),
        ("barbell contrast", criterion_7),
        ("finite metrics", criterion_8),
        ("scan determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
