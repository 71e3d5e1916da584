//! Timing harness: problem sizes × dimensions × strategies, with the
//! published naïve-port timings bundled for comparison.

mod reference;
mod report;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::FlowmapField;
use crate::flows::{default_domain, generate_flowmap, FlowSpec};
use crate::io::FormatError;
use crate::kernels::{compute_ftle_field, ExecutionStrategy};
use crate::mesh::{grid_on_box, Dim, MeshTopology};

pub use reference::{reference_table1, ReferenceTable};
pub use report::{render_report, ReportFormat};

/// One timed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub label: String,
    pub dim: Dim,
    pub npoints: usize,
    pub strategy: ExecutionStrategy,
    pub times_ms: Vec<f64>,
    pub median_ms: f64,
    /// SHA-256 of the flowmap the timings were taken on, when known.
    pub input_digest: Option<String>,
}

impl BenchRecord {
    pub fn reps(&self) -> usize {
        self.times_ms.len()
    }
}

/// Row label for a strategy: `single-pass` or `data-parallel/w4/c4096`.
pub fn strategy_label(s: &ExecutionStrategy) -> String {
    match s {
        ExecutionStrategy::SinglePass => "single-pass".to_string(),
        ExecutionStrategy::DataParallel { workers, chunk } => {
            format!("data-parallel/w{workers}/c{chunk}")
        }
    }
}

/// Exact median; the mean of the central pair for even lengths.
pub fn median(times: &[f64]) -> Option<f64> {
    if times.is_empty() {
        return None;
    }
    let mut v = times.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// `baseline / candidate`; values above 1 mean the candidate is faster.
pub fn speedup(baseline_ms: f64, candidate_ms: f64) -> Result<f64> {
    if !(baseline_ms > 0.0 && candidate_ms > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "speedup needs positive times, got {baseline_ms} and {candidate_ms}"
        )));
    }
    Ok(baseline_ms / candidate_ms)
}

pub fn flowmap_digest(field: &FlowmapField) -> String {
    let mut h = Sha256::new();
    h.update((field.dim.n() as u32).to_le_bytes());
    h.update(field.t0.to_le_bytes());
    h.update(field.horizon.to_le_bytes());
    for v in &field.values {
        h.update(v.to_le_bytes());
    }
    h.finalize()
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Runs the kernel `warmup + reps` times and keeps the last `reps`
/// wall-clock times. Only [`compute_ftle_field`] is inside the timed region.
pub fn time_computation(
    field: &FlowmapField,
    mesh: &MeshTopology,
    strategy: ExecutionStrategy,
    reps: usize,
    warmup: usize,
) -> Result<BenchRecord> {
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be >= 1".into()));
    }
    let mut times_ms = Vec::with_capacity(reps);
    for i in 0..warmup + reps {
        let start = Instant::now();
        let out = compute_ftle_field(field, mesh, strategy)?;
        let elapsed = start.elapsed();
        std::hint::black_box(&out);
        if i >= warmup {
            times_ms.push(elapsed.as_secs_f64() * 1e3);
        }
    }
    let median_ms = median(&times_ms).expect("reps >= 1");
    Ok(BenchRecord {
        label: strategy_label(&strategy),
        dim: mesh.dim(),
        npoints: mesh.npoints(),
        strategy,
        times_ms,
        median_ms,
        input_digest: Some(flowmap_digest(field)),
    })
}

/// Default grid shapes for the published problem sizes.
pub fn default_grid(dim: Dim, npoints: usize) -> Option<Vec<usize>> {
    let dims: &[usize] = match (dim, npoints) {
        (Dim::Two, 200_000) => &[500, 400],
        (Dim::Two, 400_000) => &[800, 500],
        (Dim::Two, 600_000) => &[1000, 600],
        (Dim::Three, 200_000) => &[80, 50, 50],
        (Dim::Three, 400_000) => &[100, 80, 50],
        (Dim::Three, 600_000) => &[100, 100, 60],
        _ => return None,
    };
    Some(dims.to_vec())
}

/// Most nearly square (2D) or cubic (3D) factorization of `npoints` with
/// every axis at least 3, largest axis first. Falls back to
/// [`default_grid`] shapes for the published sizes.
pub fn factor_grid(dim: Dim, npoints: usize) -> Option<Vec<usize>> {
    if let Some(g) = default_grid(dim, npoints) {
        return Some(g);
    }
    let pair = |n: usize, min: usize| -> Option<(usize, usize)> {
        let mut a = (n as f64).sqrt() as usize + 1;
        while a >= min {
            if a * a <= n && n.is_multiple_of(a) && n / a >= a {
                return Some((n / a, a));
            }
            a -= 1;
        }
        None
    };
    match dim {
        Dim::Two => pair(npoints, 3).map(|(a, b)| vec![a, b]),
        Dim::Three => {
            let mut c = (npoints as f64).cbrt() as usize + 1;
            while c >= 3 {
                if c * c * c <= npoints && npoints.is_multiple_of(c) {
                    if let Some((a, b)) = pair(npoints / c, c) {
                        return Some(vec![a, b, c]);
                    }
                }
                c -= 1;
            }
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub sizes: Vec<usize>,
    pub dims: Vec<Dim>,
    pub strategies: Vec<ExecutionStrategy>,
    pub reps: usize,
    pub warmup: usize,
    pub flow: FlowSpec,
    pub t0: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Overrides for the grid shape of a given `(dim, npoints)`.
    pub grids: BTreeMap<(Dim, usize), Vec<usize>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            sizes: vec![200_000, 400_000, 600_000],
            dims: vec![Dim::Two, Dim::Three],
            strategies: vec![
                ExecutionStrategy::DataParallel {
                    workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
                    chunk: crate::kernels::DEFAULT_CHUNK,
                },
                ExecutionStrategy::SinglePass,
            ],
            reps: 5,
            warmup: 1,
            flow: FlowSpec::double_gyre(),
            t0: 0.0,
            horizon: 15.0,
            dt: 0.1,
            grids: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    pub fn grid(&self, dim: Dim, npoints: usize) -> Result<Vec<usize>> {
        if let Some(g) = self.grids.get(&(dim, npoints)) {
            if g.len() != dim.n() || g.iter().product::<usize>() != npoints {
                return Err(Error::InvalidArgument(format!(
                    "grid override {g:?} does not describe {npoints} points in {dim}"
                )));
            }
            return Ok(g.clone());
        }
        factor_grid(dim, npoints).ok_or_else(|| {
            Error::InvalidArgument(format!("cannot factor {npoints} points into a {dim} grid"))
        })
    }
}

/// Builds the input for one `(dim, npoints)` configuration.
pub fn suite_input(
    config: &SuiteConfig,
    dim: Dim,
    npoints: usize,
) -> Result<(FlowmapField, MeshTopology)> {
    let dims = config.grid(dim, npoints)?;
    let mesh = grid_on_box(&dims, &default_domain(&config.flow, dim))?;
    let field = generate_flowmap(&mesh, &config.flow, config.t0, config.horizon, config.dt)?;
    Ok((field, mesh))
}

/// One record per `(size, dim, strategy)`, ordered dim-major then size then
/// strategy. Each input is generated once and shared by all strategies;
/// configurations run one after another.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &dim in &config.dims {
        for &n in &config.sizes {
            let (field, mesh) = suite_input(config, dim, n)?;
            for &s in &config.strategies {
                records.push(time_computation(
                    &field,
                    &mesh,
                    s,
                    config.reps,
                    config.warmup,
                )?);
            }
        }
    }
    Ok(records)
}

pub const BENCH_CSV_HEADER: &str = "label,dim,npoints,strategy,workers,chunk,rep,time_ms";
pub const SUMMARY_CSV_HEADER: &str = "label,dim,npoints,strategy,median_ms";

/// Per-repetition rows.
pub fn format_bench_csv(records: &[BenchRecord]) -> String {
    let mut out = format!("{BENCH_CSV_HEADER}\n");
    for r in records {
        for (i, t) in r.times_ms.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.label,
                r.dim.n(),
                r.npoints,
                r.strategy.name(),
                r.strategy.workers(),
                r.strategy.chunk(),
                i,
                t
            );
        }
    }
    out
}

/// One row per record with its median.
pub fn format_summary_csv(records: &[BenchRecord]) -> String {
    let mut out = format!("{SUMMARY_CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.label,
            r.dim.n(),
            r.npoints,
            r.strategy.name(),
            r.median_ms
        );
    }
    out
}

/// `bench.csv` → `bench.summary.csv`.
pub fn summary_path(bench_csv: &Path) -> PathBuf {
    bench_csv.with_extension("summary.csv")
}

/// Writes the per-repetition file and its summary sibling.
pub fn write_bench_files(path: &Path, records: &[BenchRecord]) -> Result<PathBuf> {
    fs::write(path, format_bench_csv(records)).map_err(FormatError::from)?;
    let summary = summary_path(path);
    fs::write(&summary, format_summary_csv(records)).map_err(FormatError::from)?;
    Ok(summary)
}

/// Parses per-repetition rows back into records (medians recomputed).
pub fn parse_bench_csv(text: &str) -> Result<Vec<BenchRecord>, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == BENCH_CSV_HEADER => {}
        _ => return Err(FormatError::Invalid("missing bench CSV header".into())),
    }
    let mut records: Vec<BenchRecord> = Vec::new();
    let mut reps: Vec<Vec<(usize, f64)>> = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| FormatError::Invalid(format!("line {}: {what}", lineno + 1));
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(bad("expected 8 columns"));
        }
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("bad integer"));
        let dim = Dim::new(num(cols[1])?).map_err(|_| bad("bad dim"))?;
        let npoints = num(cols[2])?;
        let strategy = match cols[3] {
            "single-pass" => ExecutionStrategy::SinglePass,
            "data-parallel" => ExecutionStrategy::data_parallel(num(cols[4])?, num(cols[5])?)
                .map_err(|e| bad(&e.to_string()))?,
            _ => return Err(bad("unknown strategy")),
        };
        let rep = num(cols[6])?;
        let t: f64 = cols[7].trim().parse().map_err(|_| bad("bad time"))?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(bad("time must be positive"));
        }
        let key = |r: &BenchRecord| {
            r.label == cols[0] && r.dim == dim && r.npoints == npoints && r.strategy == strategy
        };
        let idx = match records.iter().position(key) {
            Some(i) => i,
            None => {
                records.push(BenchRecord {
                    label: cols[0].to_string(),
                    dim,
                    npoints,
                    strategy,
                    times_ms: Vec::new(),
                    median_ms: 0.0,
                    input_digest: None,
                });
                reps.push(Vec::new());
                records.len() - 1
            }
        };
        reps[idx].push((rep, t));
    }
    for (r, mut times) in records.iter_mut().zip(reps) {
        times.sort_by_key(|&(rep, _)| rep);
        r.times_ms = times.into_iter().map(|(_, t)| t).collect();
        r.median_ms = median(&r.times_ms).expect("at least one row");
    }
    Ok(records)
}

pub fn read_bench_csv(path: &Path) -> Result<Vec<BenchRecord>, FormatError> {
    parse_bench_csv(&fs::read_to_string(path)?)
}
