use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, ValueEnum};
use distgap::cayley::{self, AbelianGroup};
use distgap::certify::{self, random_balanced_vector, semidefinite_form, verify_weight_scheme};
use distgap::cheeger::{self, check_cheeger_bounds, classify_equality, cut_slack};
use distgap::constants::TWO_THIRDS;
use distgap::graph::{bfs_apsp, parse_edge_list, parse_graph6, Graph};
use distgap::harness::{
    self, is_finding, run_scan, write_json_atomic, Checks, FamilySpec, RecordSink, Summary, CONJECTURE_CHECK,
    EXIT_CONJECTURE, EXIT_OK, EXIT_PROVED_VIOLATION,
};
use distgap::metric::{DistanceMatrix, Value};
use distgap::report::{Check, Report};
use distgap::spectral::{check_spectrum_bounds, ndl_spectrum, rayleigh_quotient, spectral_gap, Spectrum};
use distgap::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::{parse_range, Input, InputArgs};
use crate::{CheegerArgs, Common};

fn exit_code(checks: &[Check]) -> i32 {
    let failed = || checks.iter().filter(|c| !c.passed);
    if failed().any(|c| !is_finding(&c.name)) {
        EXIT_PROVED_VIOLATION
    } else if failed().next().is_some() {
        EXIT_CONJECTURE
    } else {
        EXIT_OK
    }
}

fn status(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_PROVED_VIOLATION => "proved-bound violation",
        _ => "conjecture finding",
    }
}

/// Shortest round-trip form, identical to the JSON output.
fn num(x: f64) -> String {
    serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn print_checks(checks: &[Check]) {
    println!("checks:");
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in checks {
        let tag = if c.passed { "PASS" } else if is_finding(&c.name) { "FIND" } else { "FAIL" };
        print!("  {tag}  {:<width$}  value={} bound={} margin={}", c.name, num(c.value), num(c.bound), num(c.margin));
        match &c.detail {
            Some(d) => println!("  ({d})"),
            None => println!(),
        }
    }
}

fn fmt_values(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

fn fmt_set(xs: &[usize]) -> String {
    format!("{{{}}}", xs.iter().map(usize::to_string).collect::<Vec<_>>().join(", "))
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    kind: &'static str,
    n: usize,
    tol: f64,
    eig_tol: f64,
    eigenvalues: &'a [f64],
    gap: f64,
    residual: f64,
    checks: &'a [Check],
    status: &'static str,
    exit_code: i32,
}

fn graph_spectrum_report(g: &Graph, d: &DistanceMatrix<u64>, c: &Common) -> Result<(Spectrum, Report)> {
    let spec = ndl_spectrum(d, c.eig_tol)?;
    let mut r = check_spectrum_bounds(&spec, g.n(), c.tol);
    r.push(Check::at_least(CONJECTURE_CHECK, spectral_gap(&spec), TWO_THIRDS, c.tol));
    Ok((spec, r))
}

pub fn spectrum(input: &InputArgs, c: &Common) -> Result<i32> {
    let (kind, n, spec, report) = match input.load()? {
        Input::Graph(g) => {
            let d = bfs_apsp(&g)?;
            let (spec, r) = graph_spectrum_report(&g, &d, c)?;
            ("graph", g.n(), spec, r)
        }
        Input::Metric(m) => {
            let spec = ndl_spectrum(m.distances(), c.eig_tol)?;
            let r = check_spectrum_bounds(&spec, m.n(), c.tol);
            ("metric", m.n(), spec, r)
        }
    };
    let code = exit_code(&report.checks);
    let gap = spectral_gap(&spec);
    if c.json {
        print_json(&SpectrumOut {
            kind,
            n,
            tol: c.tol,
            eig_tol: c.eig_tol,
            eigenvalues: &spec.eigenvalues,
            gap,
            residual: spec.residual,
            checks: &report.checks,
            status: status(code),
            exit_code: code,
        })?;
    } else {
        println!("input: {kind}, n = {n}");
        println!("tolerance: {} (eigensolver {})", num(c.tol), num(c.eig_tol));
        println!("eigenvalues: {}", fmt_values(&spec.eigenvalues));
        println!("spectral gap: {}", num(gap));
        println!("eigen residual: {}", num(spec.residual));
        print_checks(&report.checks);
        println!("status: {}", status(code));
    }
    Ok(code)
}

#[derive(Serialize)]
struct CheegerOut<'a> {
    n: usize,
    tol: f64,
    h: &'a Value,
    decimal: f64,
    subset: Vec<usize>,
    ties: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equality: Option<String>,
    checks: Vec<Check>,
    status: &'static str,
    exit_code: i32,
}

pub fn cheeger(input: &InputArgs, c: &Common, cap: usize) -> Result<i32> {
    let out = match input.load()? {
        Input::Graph(g) => {
            let d = bfs_apsp(&g)?;
            let res = cheeger::cheeger_exact_with_cap(&d, &d.transmission(), cap)?;
            let gap = spectral_gap(&ndl_spectrum(&d, c.eig_tol)?);
            let b = check_cheeger_bounds(&res, gap, g.n(), c.tol);
            let code = exit_code(&b.report.checks);
            CheegerOut {
                n: g.n(),
                tol: c.tol,
                h: &res.h,
                decimal: res.h.to_f64(),
                subset: res.cut.vertices(),
                ties: res.ties,
                gap: Some(gap),
                bound: Some(b.bound),
                equality: b.equality.then(|| classify_equality(&g).to_string()),
                checks: b.report.checks,
                status: status(code),
                exit_code: code,
            }
            .emit(c.json)?
        }
        Input::Metric(m) => {
            let d = m.distances();
            let res = cheeger::cheeger_exact_with_cap(d, &d.transmission(), cap)?;
            CheegerOut {
                n: m.n(),
                tol: c.tol,
                h: &res.h,
                decimal: res.h.to_f64(),
                subset: res.cut.vertices(),
                ties: res.ties,
                gap: None,
                bound: None,
                equality: None,
                checks: Vec::new(),
                status: status(EXIT_OK),
                exit_code: EXIT_OK,
            }
            .emit(c.json)?
        }
    };
    Ok(out)
}

impl CheegerOut<'_> {
    fn emit(&self, json: bool) -> Result<i32> {
        if json {
            print_json(self)?;
        } else {
            println!("n = {}", self.n);
            println!("tolerance: {}", num(self.tol));
            println!("cheeger constant: h = {} ({})", self.h, num(self.decimal));
            println!("optimal cut: S = {} ({} optimal subsets)", fmt_set(&self.subset), self.ties);
            if let Some(b) = &self.bound {
                println!("worst-case bound: {b} ({})", num(b.to_f64()));
            }
            if let Some(g) = self.gap {
                println!("spectral gap: {}", num(g));
            }
            match &self.equality {
                Some(e) => println!("cheeger bound equality: {e}"),
                None if self.bound.is_some() => println!("cheeger bound strict"),
                None => {}
            }
            if !self.checks.is_empty() {
                print_checks(&self.checks);
            }
            println!("status: {}", self.status);
        }
        Ok(self.exit_code)
    }
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["conn", "edges", "graph6"])))]
pub struct CayleyArgs {
    /// Group as a product of cyclic factors, e.g. Z4, Z2xZ2, Z3xZ5
    #[arg(long)]
    group: String,
    /// Connection set: "1,4" for cyclic groups or tuples "(1,0),(0,1)"
    #[arg(long)]
    conn: Option<String>,
    /// Edge list of a Cayley graph of the group (vertices in row-major element order)
    #[arg(long)]
    edges: Option<String>,
    /// graph6 string of a Cayley graph of the group
    #[arg(long)]
    graph6: Option<String>,
    /// Cross-check against the dense eigensolver up to this order
    #[arg(long, default_value_t = 512)]
    dense_max: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct CayleyOut {
    group: String,
    order: usize,
    connection_set: Vec<String>,
    distances: Vec<f64>,
    transmission: f64,
    eigenvalues: Vec<f64>,
    gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dense_max_abs_diff: Option<f64>,
    c1: f64,
    odd_order_floor: f64,
    checks: Vec<Check>,
    status: &'static str,
    exit_code: i32,
}

pub fn cayley(args: &CayleyArgs) -> Result<i32> {
    let c = &args.common;
    let gr = AbelianGroup::parse(&args.group)?;
    let g = if let Some(conn) = &args.conn {
        cayley::cayley_graph(&gr, &gr.parse_connection_set(conn)?)?
    } else if let Some(p) = &args.edges {
        let text = if p == "-" {
            std::io::read_to_string(std::io::stdin())?
        } else {
            std::fs::read_to_string(p)?
        };
        parse_edge_list(&text)?
    } else {
        parse_graph6(args.graph6.as_deref().unwrap_or_default().trim().as_bytes())?
    };
    g.require_connected()?;
    let dv = cayley::dvector_from_graph(&gr, &g)?;
    let spec = cayley::cayley_spectrum(&dv)?;
    let mut report = check_spectrum_bounds(&spec, gr.order(), c.tol);
    report.extend(cayley::check_cayley_bounds(&spec, &gr, c.tol));
    let (signs, complex) = certify::character_margins(&dv)?;
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    if !signs.is_empty() {
        report.push(Check::at_least("+-1 character sums nonnegative", min(&signs), 0.0, c.tol));
    }
    if !complex.is_empty() {
        report.push(Check::at_least("complex character sums nonnegative", min(&complex), 0.0, c.tol));
    }
    let dense_diff = if gr.order() <= args.dense_max {
        let dense = ndl_spectrum(&bfs_apsp(&g)?, c.eig_tol)?;
        let diff = dense
            .eigenvalues
            .iter()
            .zip(&spec.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        report.push(Check::at_most("closed form matches dense eigensolver", diff, 0.0, c.tol));
        Some(diff)
    } else {
        None
    };
    let code = exit_code(&report.checks);
    let c1 = cayley::c1();
    let out = CayleyOut {
        group: gr.to_string(),
        order: gr.order(),
        connection_set: g.neighbors(0).iter().map(|&s| gr.format_element(s)).collect(),
        distances: dv.values().to_vec(),
        transmission: dv.transmission(),
        gap: spectral_gap(&spec),
        eigenvalues: spec.eigenvalues,
        dense_max_abs_diff: dense_diff,
        c1,
        odd_order_floor: 1.0 - 1.0 / c1,
        checks: report.checks,
        status: status(code),
        exit_code: code,
    };
    if c.json {
        print_json(&out)?;
    } else {
        println!("group: {} (order {})", out.group, out.order);
        println!("connection set: {}", out.connection_set.join(", "));
        println!("tolerance: {}", num(c.tol));
        println!("distances from 0: {}", fmt_values(&out.distances));
        println!("eigenvalues: {}", fmt_values(&out.eigenvalues));
        println!("spectral gap: {}", num(out.gap));
        if let Some(d) = out.dense_max_abs_diff {
            println!("dense cross-check: max |diff| = {}", num(d));
        }
        println!("C1 = {} (1 - 1/C1 = {})", num(out.c1), num(out.odd_order_floor));
        print_checks(&out.checks);
        println!("status: {}", out.status);
    }
    Ok(code)
}

pub fn certify(seed: u64, trials: usize, out: Option<&Path>) -> Result<i32> {
    let report = certify::run_suite(seed, trials)?;
    print_json(&report)?;
    if let Some(p) = out {
        write_json_atomic(p, &report)?;
    }
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_PROVED_VIOLATION })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Path,
    Cycle,
    Complete,
    CompleteBipartitePlus,
    Barbell,
    RandomConnected,
    RandomCayley,
    RandomMetric,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Vertex count or inclusive range, e.g. 8 or 3..20
    #[arg(long, value_parser = parse_range)]
    n: Option<(usize, usize)>,
    /// Edge probability for random-connected
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Instances per spec for random families
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Barbell clique size or range
    #[arg(long, value_parser = parse_range)]
    k: Option<(usize, usize)>,
    /// Barbell path length (defaults to k)
    #[arg(long)]
    path_len: Option<usize>,
    /// Smaller part size for complete-bipartite-plus
    #[arg(long)]
    a: Option<usize>,
    /// Larger part size for complete-bipartite-plus
    #[arg(long)]
    b: Option<usize>,
    /// Extra edges inside the larger part (count or range)
    #[arg(long, value_parser = parse_range)]
    extra: Option<(usize, usize)>,
    /// Group for random-cayley, e.g. Z3xZ5
    #[arg(long)]
    group: Option<String>,
    /// Random generators drawn before closing under negation
    #[arg(long, default_value_t = 2)]
    set_size: usize,
    #[arg(long, env = "DISTGAP_SEED", default_value_t = 0)]
    seed: u64,
    /// JSONL record file, appended idempotently ("-" for stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON file
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Skip the classical normalized-Laplacian gap
    #[arg(long)]
    skip_classical: bool,
    #[command(flatten)]
    cheeger: CheegerArgs,
    #[command(flatten)]
    common: Common,
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: Family) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for {family:?} families")))
}

fn build_specs(a: &ScanArgs) -> Result<Vec<FamilySpec>> {
    let range = |r: (usize, usize)| r.0..=r.1;
    let f = a.family;
    let specs = match f {
        Family::Path => range(need(a.n, "n", f)?).map(|n| FamilySpec::Path { n }).collect(),
        Family::Cycle => range(need(a.n, "n", f)?).map(|n| FamilySpec::Cycle { n }).collect(),
        Family::Complete => range(need(a.n, "n", f)?).map(|n| FamilySpec::Complete { n }).collect(),
        Family::CompleteBipartitePlus => {
            let (pa, pb) = (need(a.a, "a", f)?, need(a.b, "b", f)?);
            range(a.extra.unwrap_or((0, 0))).map(|extra| FamilySpec::CompleteBipartitePlus { a: pa, b: pb, extra }).collect()
        }
        Family::Barbell => range(need(a.k, "k", f)?)
            .map(|k| FamilySpec::Barbell { k, path_len: a.path_len.unwrap_or(k) })
            .collect(),
        Family::RandomConnected => range(need(a.n, "n", f)?).map(|n| FamilySpec::RandomConnected { n, p: a.p }).collect(),
        Family::RandomCayley => {
            let group = a.group.clone().ok_or_else(|| Error::InvalidArgument("--group is required for random-cayley".into()))?;
            vec![FamilySpec::RandomCayley { group, set_size: a.set_size }]
        }
        Family::RandomMetric => range(need(a.n, "n", f)?).map(|n| FamilySpec::RandomMetric { n }).collect(),
    };
    Ok(specs)
}

pub fn scan(a: &ScanArgs) -> Result<i32> {
    let specs = build_specs(a)?;
    let checks = Checks {
        tol: a.common.tol,
        eig_tol: a.common.eig_tol,
        cheeger: !a.cheeger.skip_cheeger,
        cheeger_cap: a.cheeger.cheeger_cap,
        classical: !a.skip_classical,
    };
    let out = run_scan(&specs, a.seed, a.count, &checks)?;
    let to_stdout = a.out.as_deref() == Some(Path::new("-"));
    if to_stdout {
        let mut stdout = std::io::stdout().lock();
        for r in &out.records {
            writeln!(stdout, "{}", serde_json::to_string(r)?)?;
        }
    } else if let Some(p) = &a.out {
        let written = RecordSink::open(p)?.extend(&out.records)?;
        let skipped = out.records.len() - written;
        if skipped > 0 {
            eprintln!("{}: {written} records written, {skipped} already present", p.display());
        }
    }
    if let Some(p) = &a.summary {
        write_json_atomic(p, &out.summary)?;
    }
    if a.common.json {
        let s = serde_json::to_string_pretty(&out.summary)?;
        if to_stdout {
            eprintln!("{s}");
        } else {
            println!("{s}");
        }
    } else if to_stdout {
        eprint!("{}", human_summary(&out.records, &out.summary));
    } else {
        print!("{}", human_summary(&out.records, &out.summary));
    }
    Ok(out.summary.exit_code)
}

const TABLE_LIMIT: usize = 60;

fn human_summary(records: &[harness::Record], s: &Summary) -> String {
    use std::fmt::Write as _;
    let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.9}"));
    let mut o = String::new();
    let _ = writeln!(o, "scan: {} instances, seed {}, rng {}, tolerance {}", s.instances, s.seed, s.rng, num(s.tol));
    if records.len() <= TABLE_LIMIT {
        let w = records.iter().map(|r| r.label.len()).max().unwrap_or(5).max(5);
        let _ = writeln!(o, "{:<w$}  {:>4}  {:>12}  {:>12}  h", "label", "n", "gap", "classical");
        for r in records {
            let h = r.cheeger.as_ref().map_or("-".to_string(), |c| format!("{} ({:.9})", c.h, c.h.to_f64()));
            let _ = writeln!(o, "{:<w$}  {:>4}  {:>12}  {:>12}  {}", r.label, r.n, opt(r.gap), opt(r.classical_gap), h);
        }
    }
    if let (Some(g), Some(a)) = (s.min_gap, &s.argmin) {
        let _ = writeln!(o, "min gap: {} ({a})", num(g));
    }
    if let (Some(g), Some(a)) = (s.min_classical_gap, &s.argmin_classical) {
        let _ = writeln!(o, "min classical gap: {} ({a})", num(g));
    }
    if let (Some(h), Some(a)) = (&s.min_h, &s.argmin_h) {
        let _ = writeln!(o, "min h: {h} = {} ({a})", num(h.to_f64()));
    }
    for e in &s.errors {
        let _ = writeln!(o, "error: {}: {}", e.label, e.check);
    }
    let list = |v: &[harness::Finding]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.iter().map(|f| format!("{} [{} margin {}]", f.label, f.check, num(f.margin))).collect::<Vec<_>>().join("; ")
        }
    };
    let _ = writeln!(o, "proved-bound violations: {}", list(&s.counterexamples));
    let _ = writeln!(o, "conjecture findings: {}", list(&s.conjecture_findings));
    let _ = writeln!(o, "exit code: {}", s.exit_code);
    o
}

#[derive(Serialize)]
struct VerifyOut {
    n: usize,
    edges: usize,
    graph6: String,
    tol: f64,
    eigenvalues: Vec<f64>,
    gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cheeger: Option<VerifyCheeger>,
    checks: Vec<Check>,
    status: &'static str,
    exit_code: i32,
}

#[derive(Serialize)]
struct VerifyCheeger {
    h: Value,
    decimal: f64,
    subset: Vec<usize>,
    ties: u64,
    bound: Value,
    equality: bool,
    classification: String,
}

/// Random balanced vectors used for the certificate spot checks.
const SPOT_CHECKS: usize = 100;

pub fn verify_all(input: &InputArgs, c: &Common, ch: &CheegerArgs, seed: u64) -> Result<i32> {
    let g = input.load_graph()?;
    let d = bfs_apsp(&g)?;
    let t = d.transmission();
    let (spec, mut report) = graph_spectrum_report(&g, &d, c)?;
    let gap = spectral_gap(&spec);

    let cheeger = if ch.skip_cheeger {
        None
    } else {
        let res = cheeger::cheeger_exact_with_cap(&d, &t, ch.cheeger_cap)?;
        let b = check_cheeger_bounds(&res, gap, g.n(), c.tol);
        report.extend(b.report);
        let slack = cut_slack(&d, res.cut.subset)?;
        report.push(Check::decided("cut slack nonnegative at optimal cut", !slack.is_negative(), slack.to_f64(), 0.0));
        Some(VerifyCheeger {
            decimal: res.h.to_f64(),
            h: res.h,
            subset: res.cut.vertices(),
            ties: res.ties,
            bound: b.bound,
            equality: b.equality,
            classification: classify_equality(&g).to_string(),
        })
    };

    // certificate spot checks
    let x2 = &spec.eigenvectors.as_ref().expect("dense solver returns eigenvectors")[1];
    let tf = t.to_f64();
    let y: Vec<f64> = x2.iter().zip(&tf).map(|(x, t)| x / t.sqrt()).collect();
    let q = rayleigh_quotient(&d, &t, &y)?;
    report.push(Check::at_most("Rayleigh quotient at second eigenvector equals gap", (q - gap).abs(), 0.0, 1e-8));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_form, mut worst_pair, mut worst_rows) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for _ in 0..SPOT_CHECKS {
        let y = random_balanced_vector(g.n(), &mut rng);
        worst_form = worst_form.min(semidefinite_form(&d, &y)?);
        let w = verify_weight_scheme(&d, &y)?;
        worst_pair = worst_pair.min(w.get(certify::CHECK_PAIR_NONNEG).expect("present").value);
        worst_rows = worst_rows.max(w.get(certify::CHECK_ROW_SUMS).expect("present").value);
    }
    report.push(Check::at_least("semidefinite form nonnegative", worst_form, 0.0, certify::FORM_TOL));
    report.push(Check::at_least(certify::CHECK_PAIR_NONNEG, worst_pair, 0.0, certify::WEIGHT_TOL));
    report.push(Check::at_most(certify::CHECK_ROW_SUMS, worst_rows, 0.0, certify::WEIGHT_TOL));

    let code = exit_code(&report.checks);
    let out = VerifyOut {
        n: g.n(),
        edges: g.edge_count(),
        graph6: g.to_graph6(),
        tol: c.tol,
        gap,
        eigenvalues: spec.eigenvalues,
        cheeger,
        checks: report.checks,
        status: status(code),
        exit_code: code,
    };
    if c.json {
        print_json(&out)?;
        return Ok(code);
    }
    println!("graph: n = {}, {} edges, graph6 {}", out.n, out.edges, out.graph6);
    println!("tolerance: {}", num(out.tol));
    println!("eigenvalues: {}", fmt_values(&out.eigenvalues));
    println!("spectral gap: {}", num(out.gap));
    match &out.cheeger {
        Some(ch) => {
            println!("cheeger constant: h = {} ({})", ch.h, num(ch.decimal));
            println!("optimal cut: S = {} ({} optimal subsets)", fmt_set(&ch.subset), ch.ties);
            println!("worst-case bound: {} ({})", ch.bound, num(ch.bound.to_f64()));
            if ch.equality {
                println!("cheeger bound equality: {}", ch.classification);
            } else {
                println!("cheeger bound strict");
            }
        }
        None => println!("cheeger: skipped"),
    }
    println!("certificate spot checks: {SPOT_CHECKS} balanced vectors, seed {seed}");
    print_checks(&out.checks);
    println!("status: {}", out.status);
    Ok(code)
}
