use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::error::{Error, Result};
use crate::field::{validate_flowmap, FlowmapField, FtleField};
use crate::mesh::{AxisNeighbors, Dim, MeshTopology};

use super::eigen::max_eigenvalue;
use super::exponent::exponent;
use super::gradient::gradient_at;
use super::tensor::cauchy_green;
use super::KernelError;

/// Default points per work unit for [`ExecutionStrategy::DataParallel`].
pub const DEFAULT_CHUNK: usize = 4096;

/// How the per-point pipeline is applied across a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecutionStrategy {
    /// The index space is cut into contiguous chunks of `chunk` points;
    /// `workers` threads pull chunks from a shared queue until it is empty.
    DataParallel { workers: usize, chunk: usize },
    /// One sequential loop over all points on the calling thread.
    SinglePass,
}

impl ExecutionStrategy {
    pub fn data_parallel(workers: usize, chunk: usize) -> Result<Self, KernelError> {
        let s = ExecutionStrategy::DataParallel { workers, chunk };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            ExecutionStrategy::DataParallel { workers, chunk } => {
                if workers == 0 {
                    return Err(KernelError::InvalidStrategy("workers must be >= 1".into()));
                }
                if chunk == 0 {
                    return Err(KernelError::InvalidStrategy("chunk must be >= 1".into()));
                }
                Ok(())
            }
            ExecutionStrategy::SinglePass => Ok(()),
        }
    }

    /// `data-parallel` or `single-pass`.
    pub fn name(&self) -> &'static str {
        match self {
            ExecutionStrategy::DataParallel { .. } => "data-parallel",
            ExecutionStrategy::SinglePass => "single-pass",
        }
    }

    /// Worker count; 1 for the single-pass executor.
    pub fn workers(&self) -> usize {
        match *self {
            ExecutionStrategy::DataParallel { workers, .. } => workers,
            ExecutionStrategy::SinglePass => 1,
        }
    }

    /// Chunk size; 0 for the single-pass executor (no chunking).
    pub fn chunk(&self) -> usize {
        match *self {
            ExecutionStrategy::DataParallel { chunk, .. } => chunk,
            ExecutionStrategy::SinglePass => 0,
        }
    }
}

impl fmt::Display for ExecutionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecutionStrategy::DataParallel { workers, chunk } => {
                write!(f, "data-parallel(workers={workers},chunk={chunk})")
            }
            ExecutionStrategy::SinglePass => write!(f, "single-pass"),
        }
    }
}

impl FromStr for ExecutionStrategy {
    type Err = KernelError;

    /// Parses the [`Display`](fmt::Display) form back.
    fn from_str(s: &str) -> Result<Self, KernelError> {
        let bad = || KernelError::InvalidStrategy(format!("cannot parse strategy {s:?}"));
        if s == "single-pass" {
            return Ok(ExecutionStrategy::SinglePass);
        }
        let inner = s
            .strip_prefix("data-parallel(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let mut workers = None;
        let mut chunk = None;
        for kv in inner.split(',') {
            match kv.split_once('=') {
                Some(("workers", v)) => workers = Some(v.parse().map_err(|_| bad())?),
                Some(("chunk", v)) => chunk = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        ExecutionStrategy::data_parallel(workers.ok_or_else(bad)?, chunk.ok_or_else(bad)?)
    }
}

/// Inputs of the per-point pipeline, borrowed once per field.
struct PointKernel<'a> {
    dim: Dim,
    values: &'a [f64],
    coords: &'a [f64],
    neighbors: &'a [AxisNeighbors],
    horizon: f64,
}

impl PointKernel<'_> {
    #[inline]
    fn eval(&self, p: usize) -> Result<f64, KernelError> {
        let j = gradient_at(self.dim, self.values, self.coords, self.neighbors, p)?;
        let c = cauchy_green(&j);
        Ok(exponent(max_eigenvalue(&c), self.horizon))
    }

    /// Fills `out` with the values of points `start..start+out.len()` and
    /// returns the number of degenerate points among them.
    #[inline]
    fn eval_range(&self, start: usize, out: &mut [f64]) -> Result<usize, (usize, KernelError)> {
        let mut degenerate = 0;
        for (k, slot) in out.iter_mut().enumerate() {
            let p = start + k;
            let v = self.eval(p).map_err(|e| (p, e))?;
            degenerate += v.is_nan() as usize;
            *slot = v;
        }
        Ok(degenerate)
    }
}

/// Computes the FTLE at every point of `mesh`.
///
/// Both strategies run the same per-point arithmetic, so their outputs are
/// bit-identical for any worker count and chunk size. If several points
/// fail, the error for the lowest point index is returned.
pub fn compute_ftle_field(
    field: &FlowmapField,
    mesh: &MeshTopology,
    strategy: ExecutionStrategy,
) -> Result<FtleField> {
    strategy.validate()?;
    let diag = validate_flowmap(field, mesh);
    if !diag.is_ok() {
        return Err(Error::InvalidFlowmap(diag));
    }
    let kernel = PointKernel {
        dim: mesh.dim(),
        values: &field.values,
        coords: mesh.coords(),
        neighbors: mesh.neighbor_table(),
        horizon: field.horizon,
    };
    let mut values = vec![0.0; mesh.npoints()];
    let degenerate = match strategy {
        ExecutionStrategy::SinglePass => kernel.eval_range(0, &mut values),
        ExecutionStrategy::DataParallel { workers, chunk } => {
            run_chunked(&mut values, 1, workers, chunk, |start, out| {
                kernel.eval_range(start, out)
            })
        }
    }
    .map_err(|(_, e)| e)?;
    Ok(FtleField {
        dim: mesh.dim(),
        values,
        degenerate_count: degenerate,
    })
}

/// Chunked work queue over a point-major output buffer.
///
/// `out` holds `stride` entries per point and is cut into runs of `chunk`
/// points. Up to `workers` scoped threads pull runs from a shared queue and
/// call `work(first_point, run)`; the per-run counts are summed. Runs that
/// start after an already-observed failure are skipped, and the failure
/// with the lowest point index is reported.
pub(crate) fn run_chunked<T, E, F>(
    out: &mut [T],
    stride: usize,
    workers: usize,
    chunk: usize,
    work: F,
) -> Result<usize, (usize, E)>
where
    T: Send,
    E: Send,
    F: Fn(usize, &mut [T]) -> Result<usize, (usize, E)> + Sync,
{
    let npoints = out.len() / stride;
    if npoints == 0 {
        return Ok(0);
    }
    let nchunks = npoints.div_ceil(chunk);
    let queue = Mutex::new(out.chunks_mut(chunk * stride).enumerate());
    let total = AtomicUsize::new(0);
    let fail_floor = AtomicUsize::new(usize::MAX);
    let failure: Mutex<Option<(usize, E)>> = Mutex::new(None);

    thread::scope(|scope| {
        for _ in 0..workers.min(nchunks) {
            scope.spawn(|| loop {
                let next = queue.lock().unwrap_or_else(|e| e.into_inner()).next();
                let Some((c, run)) = next else { break };
                let start = c * chunk;
                if start > fail_floor.load(Ordering::Relaxed) {
                    continue;
                }
                match work(start, run) {
                    Ok(n) => {
                        total.fetch_add(n, Ordering::Relaxed);
                    }
                    Err((p, e)) => {
                        fail_floor.fetch_min(p, Ordering::Relaxed);
                        let mut slot = failure.lock().unwrap_or_else(|e| e.into_inner());
                        if slot.as_ref().is_none_or(|(q, _)| p < *q) {
                            *slot = Some((p, e));
                        }
                    }
                }
            });
        }
    });

    match failure.into_inner().unwrap_or_else(|e| e.into_inner()) {
        Some(f) => Err(f),
        None => Ok(total.into_inner()),
    }
}
