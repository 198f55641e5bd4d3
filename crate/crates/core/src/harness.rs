//! Family generators and the batch pipeline behind `distgap scan`.
//!
//! Every random instance draws from its own ChaCha8 stream: the generator
//! is seeded with the run seed and the stream id is the instance index, so
//! instance `i` is the same no matter how many others are generated or in
//! which order the worker pool finishes them.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{self, AbelianGroup, SymmetricDVector};
use crate::cheeger::{self, classify_equality};
use crate::constants::TWO_THIRDS;
use crate::error::{Error, Result};
use crate::graph::{bfs_apsp, Graph};
use crate::metric::{validate_metric, FiniteMetricSpace, Value};
use crate::report::{Check, Report};
use crate::spectral::{self, build_classical_nl, eig_sym, ndl_spectrum, spectral_gap};

pub const RNG_NAME: &str = "chacha8";
pub const MAX_ATTEMPTS: usize = 1000;
pub const DEFAULT_CHECK_TOL: f64 = 1e-9;

/// Name of the conjectured 2/3 floor check. Failing it is a finding, not a bug.
pub const CONJECTURE_CHECK: &str = "gap at least 2/3 (conjectured)";
/// Observed but unproved; failures are reported like conjecture findings.
pub const EMPIRICAL_CHECKS: &[&str] = &["largest eigenvalue below 2"];

/// Whether a failed check is a finding (conjectured or empirical bound)
/// rather than a violated proved bound.
pub fn is_finding(check: &str) -> bool {
    check == CONJECTURE_CHECK || EMPIRICAL_CHECKS.contains(&check)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    /// `K_{a,b}` plus the first `extra` pairs (lexicographically) inside the
    /// second part.
    CompleteBipartitePlus { a: usize, b: usize, extra: usize },
    /// Two `K_k` joined by a path with `path_len` edges.
    Barbell { k: usize, path_len: usize },
    /// `G(n, p)` conditioned on being connected.
    RandomConnected { n: usize, p: f64 },
    RandomCayley { group: String, set_size: usize },
    /// Shortest-path closure of a complete graph with random real weights.
    RandomMetric { n: usize },
}

impl FamilySpec {
    pub fn is_random(&self) -> bool {
        matches!(self, Self::RandomConnected { .. } | Self::RandomCayley { .. } | Self::RandomMetric { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match *self {
            Self::Path { n } | Self::Complete { n } | Self::RandomMetric { n } if n < 2 => bad(format!("{self}: need n >= 2")),
            Self::Cycle { n } if n < 3 => bad(format!("{self}: need n >= 3")),
            Self::CompleteBipartitePlus { a, b, extra } => {
                if a == 0 || b == 0 {
                    bad(format!("{self}: parts must be nonempty"))
                } else if extra > b * (b - 1) / 2 {
                    bad(format!("{self}: at most {} extra edges fit in the second part", b * (b - 1) / 2))
                } else {
                    Ok(())
                }
            }
            Self::Barbell { k, path_len } if k < 2 || path_len < 1 => bad(format!("{self}: need k >= 2 and path_len >= 1")),
            Self::RandomConnected { n, p } if n < 2 || !(p > 0.0 && p <= 1.0) => {
                bad(format!("{self}: need n >= 2 and 0 < p <= 1"))
            }
            Self::RandomCayley { ref group, set_size } => {
                let gr = AbelianGroup::parse(group)?;
                if set_size == 0 || set_size >= gr.order() {
                    bad(format!("{self}: set size must be in 1..{}", gr.order()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Path { n } => write!(f, "path n={n}"),
            Self::Cycle { n } => write!(f, "cycle n={n}"),
            Self::Complete { n } => write!(f, "complete n={n}"),
            Self::CompleteBipartitePlus { a, b, extra } => write!(f, "complete-bipartite-plus a={a} b={b} extra={extra}"),
            Self::Barbell { k, path_len } => write!(f, "barbell k={k} path_len={path_len}"),
            Self::RandomConnected { n, p } => write!(f, "random-connected n={n} p={p}"),
            Self::RandomCayley { group, set_size } => write!(f, "random-cayley group={group} set_size={set_size}"),
            Self::RandomMetric { n } => write!(f, "random-metric n={n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Graph(Graph),
    Cayley { graph: Graph, dvector: SymmetricDVector },
    Metric(FiniteMetricSpace<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub spec: FamilySpec,
    pub seed: u64,
    pub index: usize,
    pub payload: Payload,
}

impl Instance {
    pub fn n(&self) -> usize {
        match &self.payload {
            Payload::Graph(g) | Payload::Cayley { graph: g, .. } => g.n(),
            Payload::Metric(m) => m.n(),
        }
    }

    pub fn label(&self) -> String {
        if self.spec.is_random() {
            format!("{} #{}", self.spec, self.index)
        } else {
            self.spec.to_string()
        }
    }
}

/// Generator for instance `index` of a run.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Random finite metric on `n` points: shortest-path closure of the
/// complete graph with weights drawn uniformly from `[0.05, 1)`.
pub fn random_metric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FiniteMetricSpace<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let w = rng.random_range(0.05..1.0);
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for k in 0..n {
        for u in 0..n {
            for v in 0..n {
                let via = d[u][k] + d[k][v];
                if via < d[u][v] {
                    d[u][v] = via;
                }
            }
        }
    }
    validate_metric(d)
}

fn random_connected<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Option<Graph> {
    for _ in 0..MAX_ATTEMPTS {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    g.add_edge(u, v).expect("valid pair");
                }
            }
        }
        if g.is_connected() {
            return Some(g);
        }
    }
    None
}

/// Instance `index` of `spec` under `seed`.
pub fn generate_one(spec: &FamilySpec, seed: u64, index: usize) -> Result<Instance> {
    spec.validate()?;
    let mut rng = instance_rng(seed, index);
    let payload = match *spec {
        FamilySpec::Path { n } => Payload::Graph(Graph::path(n)),
        FamilySpec::Cycle { n } => Payload::Graph(Graph::cycle(n)),
        FamilySpec::Complete { n } => Payload::Graph(Graph::complete(n)),
        FamilySpec::CompleteBipartitePlus { a, b, extra } => {
            let mut g = Graph::complete_bipartite(a, b);
            let inner = (a..a + b).flat_map(|u| (u + 1..a + b).map(move |v| (u, v)));
            for (u, v) in inner.take(extra) {
                g.add_edge(u, v)?;
            }
            Payload::Graph(g)
        }
        FamilySpec::Barbell { k, path_len } => Payload::Graph(Graph::barbell(k, path_len)),
        FamilySpec::RandomConnected { n, p } => match random_connected(n, p, &mut rng) {
            Some(g) => Payload::Graph(g),
            None => return Err(Error::RetryExhausted { seed, index, attempts: MAX_ATTEMPTS }),
        },
        FamilySpec::RandomCayley { ref group, set_size } => {
            let gr = AbelianGroup::parse(group)?;
            let conn = cayley::random_connection_set(&gr, set_size, &mut rng)?;
            let graph = cayley::cayley_graph(&gr, &conn)?;
            let dvector = cayley::dvector_from_graph(&gr, &graph)?;
            Payload::Cayley { graph, dvector }
        }
        FamilySpec::RandomMetric { n } => Payload::Metric(random_metric(n, &mut rng)?),
    };
    Ok(Instance { spec: spec.clone(), seed, index, payload })
}

/// Deterministic families yield one instance; random ones yield `count`.
pub fn generate(spec: &FamilySpec, seed: u64, count: usize) -> impl Iterator<Item = Result<Instance>> + '_ {
    let count = if spec.is_random() { count } else { 1 };
    (0..count).map(move |i| generate_one(spec, seed, i))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Checks {
    pub tol: f64,
    pub eig_tol: f64,
    pub cheeger: bool,
    pub cheeger_cap: usize,
    pub classical: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            tol: DEFAULT_CHECK_TOL,
            eig_tol: spectral::DEFAULT_TOL,
            cheeger: true,
            cheeger_cap: cheeger::DEFAULT_CAP,
            classical: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheegerSummary {
    pub h: Value,
    pub subset: Vec<usize>,
    pub bound: Value,
    pub equality: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub spec: String,
    pub seed: u64,
    pub index: usize,
    pub label: String,
    pub kind: &'static str,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph6: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub largest: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cheeger: Option<CheegerSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality: Option<String>,
    /// Signed margin of every check; negative means the bound was missed.
    pub margins: BTreeMap<String, f64>,
    /// Failed checks of proved bounds.
    pub violations: Vec<String>,
    /// Failed conjectured or empirical checks.
    pub findings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock time; excluded from determinism guarantees and keys.
    pub elapsed_us: u64,
}

impl Record {
    pub fn key(&self) -> RecordKey {
        (self.spec.clone(), self.seed, self.index)
    }

    fn blank(spec: &FamilySpec, seed: u64, index: usize) -> Self {
        Self {
            spec: spec.to_string(),
            seed,
            index,
            label: spec.to_string(),
            kind: "graph",
            n: 0,
            graph6: None,
            gap: None,
            largest: None,
            classical_gap: None,
            cheeger: None,
            equality: None,
            margins: BTreeMap::new(),
            violations: Vec::new(),
            findings: Vec::new(),
            error: None,
            notes: Vec::new(),
            elapsed_us: 0,
        }
    }

    fn absorb(&mut self, r: &Report) {
        for c in &r.checks {
            self.margins.insert(c.name.clone(), c.margin);
            if !c.passed {
                if is_finding(&c.name) {
                    self.findings.push(c.name.clone());
                } else {
                    self.violations.push(c.name.clone());
                }
            }
        }
    }
}

pub type RecordKey = (String, u64, usize);

/// Runs the selected checks on one instance.
pub fn evaluate(inst: &Instance, checks: &Checks) -> Record {
    let start = Instant::now();
    let mut rec = Record::blank(&inst.spec, inst.seed, inst.index);
    rec.label = inst.label();
    rec.n = inst.n();
    if let Err(e) = evaluate_into(inst, checks, &mut rec) {
        rec.error = Some(e.to_string());
    }
    rec.elapsed_us = start.elapsed().as_micros() as u64;
    rec
}

fn evaluate_into(inst: &Instance, checks: &Checks, rec: &mut Record) -> Result<()> {
    let tol = checks.tol;
    match &inst.payload {
        Payload::Metric(m) => {
            rec.kind = "metric";
            let spec = ndl_spectrum(m.distances(), checks.eig_tol)?;
            record_spectrum(rec, &spec, tol);
        }
        Payload::Cayley { graph, dvector } => {
            rec.kind = "cayley";
            rec.graph6 = Some(graph.to_graph6());
            let spec = cayley::cayley_spectrum(dvector)?;
            record_spectrum(rec, &spec, tol);
            rec.absorb(&cayley::check_cayley_bounds(&spec, dvector.group(), tol));
            graph_checks(graph, spectral_gap(&spec), checks, rec)?;
        }
        Payload::Graph(g) => {
            rec.graph6 = Some(g.to_graph6());
            let d = bfs_apsp(g)?;
            let spec = ndl_spectrum(&d, checks.eig_tol)?;
            record_spectrum(rec, &spec, tol);
            let gap = spectral_gap(&spec);
            let mut r = Report::new(tol);
            r.push(Check::at_least(CONJECTURE_CHECK, gap, TWO_THIRDS, tol));
            rec.absorb(&r);
            graph_checks(g, gap, checks, rec)?;
        }
    }
    Ok(())
}

fn record_spectrum(rec: &mut Record, spec: &spectral::Spectrum, tol: f64) {
    rec.gap = Some(spectral_gap(spec));
    rec.largest = Some(spec.largest());
    rec.absorb(&spectral::check_spectrum_bounds(spec, spec.len(), tol));
}

fn graph_checks(g: &Graph, gap: f64, checks: &Checks, rec: &mut Record) -> Result<()> {
    if checks.classical {
        let s = eig_sym(&build_classical_nl(g)?, checks.eig_tol)?;
        rec.classical_gap = Some(spectral_gap(&s));
    }
    if !checks.cheeger {
        return Ok(());
    }
    if g.n() > checks.cheeger_cap {
        rec.notes.push(format!("cheeger skipped: n = {} exceeds cap {}", g.n(), checks.cheeger_cap));
        return Ok(());
    }
    let d = bfs_apsp(g)?;
    let res = cheeger::cheeger_exact_with_cap(&d, &d.transmission(), checks.cheeger_cap)?;
    let b = cheeger::check_cheeger_bounds(&res, gap, g.n(), checks.tol);
    rec.absorb(&b.report);
    if b.equality {
        rec.equality = Some(classify_equality(g).to_string());
    }
    rec.cheeger = Some(CheegerSummary { h: res.h.clone(), subset: res.cut.vertices(), bound: b.bound, equality: b.equality });
    Ok(())
}

/// One failed check, with the instance it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub label: String,
    pub check: String,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub rng: &'static str,
    pub seed: u64,
    pub count: usize,
    pub specs: Vec<String>,
    pub tol: f64,
    pub instances: usize,
    pub errors: Vec<Finding>,
    pub min_gap: Option<f64>,
    pub argmin: Option<String>,
    pub min_h: Option<Value>,
    pub argmin_h: Option<String>,
    pub min_classical_gap: Option<f64>,
    pub argmin_classical: Option<String>,
    /// Proved-bound failures. Non-empty means a bug.
    pub counterexamples: Vec<Finding>,
    /// Conjectured or empirical bounds that failed.
    pub conjecture_findings: Vec<Finding>,
    pub exit_code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PROVED_VIOLATION: i32 = 2;
pub const EXIT_CONJECTURE: i32 = 3;

impl Summary {
    pub fn from_records(records: &[Record], specs: &[FamilySpec], seed: u64, count: usize, tol: f64) -> Self {
        let mut s = Summary {
            rng: RNG_NAME,
            seed,
            count,
            specs: specs.iter().map(ToString::to_string).collect(),
            tol,
            instances: records.len(),
            errors: Vec::new(),
            min_gap: None,
            argmin: None,
            min_h: None,
            argmin_h: None,
            min_classical_gap: None,
            argmin_classical: None,
            counterexamples: Vec::new(),
            conjecture_findings: Vec::new(),
            exit_code: EXIT_OK,
        };
        for r in records {
            if let Some(e) = &r.error {
                s.errors.push(Finding { label: r.label.clone(), check: e.clone(), margin: 0.0 });
            }
            if let Some(g) = r.gap {
                if s.min_gap.is_none_or(|m| g < m) {
                    s.min_gap = Some(g);
                    s.argmin = Some(r.label.clone());
                }
            }
            if let Some(g) = r.classical_gap {
                if s.min_classical_gap.is_none_or(|m| g < m) {
                    s.min_classical_gap = Some(g);
                    s.argmin_classical = Some(r.label.clone());
                }
            }
            if let Some(c) = &r.cheeger {
                if s.min_h.as_ref().is_none_or(|m| c.h.compare(m).is_lt()) {
                    s.min_h = Some(c.h.clone());
                    s.argmin_h = Some(r.label.clone());
                }
            }
            let finding = |name: &String| Finding { label: r.label.clone(), check: name.clone(), margin: r.margins[name] };
            s.counterexamples.extend(r.violations.iter().map(finding));
            s.conjecture_findings.extend(r.findings.iter().map(finding));
        }
        s.exit_code = if !s.counterexamples.is_empty() {
            EXIT_PROVED_VIOLATION
        } else if !s.conjecture_findings.is_empty() {
            EXIT_CONJECTURE
        } else {
            EXIT_OK
        };
        s
    }
}

pub struct ScanOutput {
    pub records: Vec<Record>,
    pub summary: Summary,
}

/// Generates and evaluates every instance of every spec in parallel.
/// Records come back ordered by spec, then instance index.
pub fn run_scan(specs: &[FamilySpec], seed: u64, count: usize, checks: &Checks) -> Result<ScanOutput> {
    for s in specs {
        s.validate()?;
    }
    let jobs: Vec<(usize, usize)> = specs
        .iter()
        .enumerate()
        .flat_map(|(k, s)| (0..if s.is_random() { count } else { 1 }).map(move |i| (k, i)))
        .collect();
    let records: Vec<Record> = jobs
        .par_iter()
        .map(|&(k, i)| match generate_one(&specs[k], seed, i) {
            Ok(inst) => evaluate(&inst, checks),
            Err(e) => {
                let mut r = Record::blank(&specs[k], seed, i);
                r.error = Some(e.to_string());
                r
            }
        })
        .collect();
    let summary = Summary::from_records(&records, specs, seed, count, checks.tol);
    Ok(ScanOutput { records, summary })
}

/// [`run_scan`] for a single spec.
pub fn run_batch(spec: &FamilySpec, seed: u64, count: usize, checks: &Checks) -> Result<ScanOutput> {
    run_scan(std::slice::from_ref(spec), seed, count, checks)
}

/// Append-only JSONL file of records, one object per line. Records whose
/// `(spec, seed, index)` key is already present are skipped.
pub struct RecordSink {
    path: PathBuf,
    file: File,
    seen: HashSet<RecordKey>,
}

#[derive(Deserialize)]
struct KeyOnly {
    spec: String,
    seed: u64,
    index: usize,
}

impl RecordSink {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut seen = HashSet::new();
        if path.exists() {
            // drop a torn trailing line left by an interrupted writer
            let bytes = fs::read(&path)?;
            if let Some(pos) = bytes.iter().rposition(|&b| b == b'\n') {
                if pos + 1 != bytes.len() {
                    OpenOptions::new().write(true).open(&path)?.set_len(pos as u64 + 1)?;
                }
            } else if !bytes.is_empty() {
                OpenOptions::new().write(true).open(&path)?.set_len(0)?;
            }
            for line in BufReader::new(File::open(&path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let k: KeyOnly = serde_json::from_str(&line)?;
                seen.insert((k.spec, k.seed, k.index));
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, file, seen })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Returns whether the record was written.
    pub fn append(&mut self, r: &Record) -> Result<bool> {
        if !self.seen.insert(r.key()) {
            return Ok(false);
        }
        let mut line = serde_json::to_string(r)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        Ok(true)
    }

    /// Appends all records; returns how many were new.
    pub fn extend<'a>(&mut self, records: impl IntoIterator<Item = &'a Record>) -> Result<usize> {
        let mut written = 0;
        for r in records {
            written += usize::from(self.append(r)?);
        }
        self.file.flush()?;
        Ok(written)
    }
}

/// Writes `value` as pretty JSON to a sibling temp file, then renames it.
pub fn write_json_atomic<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = File::create(&tmp)?;
        serde_json::to_writer_pretty(&mut f, value)?;
        f.write_all(b"\n")?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Removes the `elapsed_us` field from a JSONL record line.
pub fn strip_timing(line: &str) -> Result<String> {
    let mut v: serde_json::Value = serde_json::from_str(line)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("elapsed_us");
    }
    Ok(serde_json::to_string(&v)?)
}
