//! C ABI over `ftle-core`.
//!
//! Meshes, flowmaps and FTLE fields are opaque heap handles owned by the
//! caller and released with the matching `*_free` function. Every entry
//! point returns an [`FtleStatus`]; on failure a message is available from
//! [`ftle_last_error`] until the next call on the same thread. Panics are
//! caught at the boundary and reported as [`FtleStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ftle_core::io::FormatError;
use ftle_core::{
    Dim, Error, ExecutionStrategy, FlowSpec, FlowmapField, MeshTopology, SymmetricTensor,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtleStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Mesh = 3,
    InvalidFlowmap = 4,
    Kernel = 5,
    Flow = 6,
    Format = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtleFlowKind {
    DoubleGyre = 0,
    Abc = 1,
    Identity = 2,
    ConstantDrift = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtleStrategyKind {
    SinglePass = 0,
    DataParallel = 1,
}

/// `workers` and `chunk` are read for `DataParallel` only; zero selects the
/// logical CPU count and the default chunk respectively.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FtleStrategy {
    pub kind: FtleStrategyKind,
    pub workers: usize,
    pub chunk: usize,
}

pub struct FtleMesh(MeshTopology);

pub struct FtleFlowmap(FlowmapField);

pub struct FtleField(ftle_core::FtleField);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(FtleStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Mesh(_) => FtleStatus::Mesh,
            Error::InvalidFlowmap(_) => FtleStatus::InvalidFlowmap,
            Error::Kernel(_) => FtleStatus::Kernel,
            Error::Flow(_) => FtleStatus::Flow,
            Error::Format(FormatError::Io(_)) => FtleStatus::Io,
            Error::Format(_) => FtleStatus::Format,
            Error::InvalidArgument(_) => FtleStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

macro_rules! impl_failure_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
impl_failure_from!(
    ftle_core::MeshError,
    ftle_core::KernelError,
    ftle_core::FlowError,
    FormatError
);

impl From<ftle_core::Diagnostics> for Failure {
    fn from(d: ftle_core::Diagnostics) -> Self {
        Error::InvalidFlowmap(d).into()
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(FtleStatus::InvalidArgument, msg.into())
}

fn null(what: &str) -> Failure {
    Failure(FtleStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FtleStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FtleStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            FtleStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid("path is not valid UTF-8"))?;
    Ok(PathBuf::from(s))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn to_dim(n: u32) -> Result<Dim, Failure> {
    Dim::new(n as usize).map_err(Failure::from)
}

/// Message of the last failed call on this thread, or null after a
/// successful one. Owned by the library.
#[no_mangle]
pub extern "C" fn ftle_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Row-major structured grid with the last axis varying fastest. The three
/// arrays hold `dim` entries each.
///
/// # Safety
/// Array arguments must point to `dim` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftle_mesh_structured(
    dim: u32,
    dims: *const usize,
    spacing: *const f64,
    origin: *const f64,
    out: *mut *mut FtleMesh,
) -> FtleStatus {
    guard(|| {
        let d = to_dim(dim)?.n();
        let mesh = ftle_core::make_structured_grid(
            slice(dims, d, "dims")?,
            slice(spacing, d, "spacing")?,
            slice(origin, d, "origin")?,
        )?;
        put(out, FtleMesh(mesh))
    })
}

/// Reads a neighbor-table file.
///
/// # Safety
/// `file` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftle_mesh_read(
    file: *const c_char,
    out: *mut *mut FtleMesh,
) -> FtleStatus {
    guard(|| {
        let mesh = ftle_core::io::read_neighbor_table(path(file)?)?;
        put(out, FtleMesh(mesh))
    })
}

/// # Safety
/// `mesh` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ftle_mesh_npoints(mesh: *const FtleMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.npoints())
}

/// # Safety
/// `mesh` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ftle_mesh_dim(mesh: *const FtleMesh) -> u32 {
    mesh.as_ref().map_or(0, |m| m.0.dim().n() as u32)
}

/// # Safety
/// `mesh` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ftle_mesh_free(mesh: *mut FtleMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Advects every mesh point through an analytic flow with fixed-step RK4.
///
/// `params` may be null to use the flow's defaults: double gyre takes
/// `A, eps, omega`, ABC takes `A, B, C`, constant drift takes one velocity
/// component per axis (required).
///
/// # Safety
/// `mesh` must be live, `params` must hold `nparams` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ftle_flowmap_generate(
    mesh: *const FtleMesh,
    flow: FtleFlowKind,
    params: *const f64,
    nparams: usize,
    t0: f64,
    horizon: f64,
    dt: f64,
    out: *mut *mut FtleFlowmap,
) -> FtleStatus {
    guard(|| {
        let mesh = &handle(mesh, "mesh")?.0;
        let p = slice(params, nparams, "params")?;
        let three = |what: &str| match p {
            [] => Ok(None),
            [a, b, c] => Ok(Some([*a, *b, *c])),
            _ => Err(invalid(format!(
                "{what} takes 3 parameters, got {}",
                p.len()
            ))),
        };
        let spec = match flow {
            FtleFlowKind::DoubleGyre => match three("double gyre")? {
                None => FlowSpec::double_gyre(),
                Some([amplitude, epsilon, omega]) => FlowSpec::DoubleGyre {
                    amplitude,
                    epsilon,
                    omega,
                },
            },
            FtleFlowKind::Abc => match three("abc")? {
                None => FlowSpec::abc(),
                Some([a, b, c]) => FlowSpec::Abc { a, b, c },
            },
            FtleFlowKind::Identity => FlowSpec::Identity,
            FtleFlowKind::ConstantDrift => FlowSpec::ConstantDrift {
                velocity: p.to_vec(),
            },
        };
        let field = ftle_core::generate_flowmap(mesh, &spec, t0, horizon, dt)?;
        put(out, FtleFlowmap(field))
    })
}

/// Wraps caller-provided final positions, `npoints * dim` values with the
/// axis varying fastest.
///
/// # Safety
/// `mesh` must be live, `values` must hold `len` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ftle_flowmap_from_values(
    mesh: *const FtleMesh,
    values: *const f64,
    len: usize,
    t0: f64,
    horizon: f64,
    out: *mut *mut FtleFlowmap,
) -> FtleStatus {
    guard(|| {
        let mesh = &handle(mesh, "mesh")?.0;
        let values = slice(values, len, "values")?.to_vec();
        let field = FlowmapField::new(mesh.dim(), values, t0, horizon)?;
        let diag = ftle_core::validate_flowmap(&field, mesh);
        if !diag.is_ok() {
            return Err(diag.into());
        }
        put(out, FtleFlowmap(field))
    })
}

/// Reads a `.ftlm` file into a new flowmap and mesh.
///
/// # Safety
/// `file` must be a NUL-terminated string; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftle_flowmap_read(
    file: *const c_char,
    out_flowmap: *mut *mut FtleFlowmap,
    out_mesh: *mut *mut FtleMesh,
) -> FtleStatus {
    guard(|| {
        if out_flowmap.is_null() || out_mesh.is_null() {
            return Err(null("output pointer"));
        }
        let (field, mesh) = ftle_core::io::read_flowmap(path(file)?)?;
        put(out_flowmap, FtleFlowmap(field))?;
        put(out_mesh, FtleMesh(mesh))
    })
}

/// # Safety
/// Handles must be live; `file` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ftle_flowmap_write(
    file: *const c_char,
    flowmap: *const FtleFlowmap,
    mesh: *const FtleMesh,
) -> FtleStatus {
    guard(|| {
        let field = &handle(flowmap, "flowmap")?.0;
        let mesh = &handle(mesh, "mesh")?.0;
        ftle_core::io::write_flowmap(path(file)?, field, mesh)?;
        Ok(())
    })
}

/// # Safety
/// `flowmap` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ftle_flowmap_values(
    flowmap: *const FtleFlowmap,
    len: *mut usize,
) -> *const f64 {
    match flowmap.as_ref() {
        Some(f) => {
            if !len.is_null() {
                *len = f.0.values.len();
            }
            f.0.values.as_ptr()
        }
        None => ptr::null(),
    }
}

/// # Safety
/// `flowmap` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ftle_flowmap_free(flowmap: *mut FtleFlowmap) {
    if !flowmap.is_null() {
        drop(Box::from_raw(flowmap));
    }
}

/// Computes the FTLE field. Degenerate points hold NaN and are counted in
/// [`ftle_field_degenerate_count`].
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftle_compute(
    flowmap: *const FtleFlowmap,
    mesh: *const FtleMesh,
    strategy: FtleStrategy,
    out: *mut *mut FtleField,
) -> FtleStatus {
    guard(|| {
        let field = &handle(flowmap, "flowmap")?.0;
        let mesh = &handle(mesh, "mesh")?.0;
        let strategy = match strategy.kind {
            FtleStrategyKind::SinglePass => ExecutionStrategy::SinglePass,
            FtleStrategyKind::DataParallel => {
                let workers = match strategy.workers {
                    0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
                    w => w,
                };
                let chunk = match strategy.chunk {
                    0 => ftle_core::kernels::DEFAULT_CHUNK,
                    c => c,
                };
                ExecutionStrategy::data_parallel(workers, chunk)?
            }
        };
        let ftle = ftle_core::compute_ftle_field(field, mesh, strategy)?;
        put(out, FtleField(ftle))
    })
}

/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ftle_field_len(field: *const FtleField) -> usize {
    field.as_ref().map_or(0, |f| f.0.values.len())
}

/// Borrowed pointer to `ftle_field_len` values, valid while `field` lives.
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ftle_field_values(field: *const FtleField) -> *const f64 {
    field.as_ref().map_or(ptr::null(), |f| f.0.values.as_ptr())
}

/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ftle_field_degenerate_count(field: *const FtleField) -> u64 {
    field.as_ref().map_or(0, |f| f.0.degenerate_count as u64)
}

/// Writes an `.ftlf` FTLE field file.
///
/// # Safety
/// `field` must be live; `file` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ftle_field_write(
    file: *const c_char,
    field: *const FtleField,
) -> FtleStatus {
    guard(|| {
        let field = &handle(field, "field")?.0;
        ftle_core::io::write_ftle_field(path(file)?, field)?;
        Ok(())
    })
}

/// Writes `x,y[,z],ftle` rows in point order.
///
/// # Safety
/// Handles must be live; `file` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ftle_field_write_csv(
    file: *const c_char,
    field: *const FtleField,
    mesh: *const FtleMesh,
) -> FtleStatus {
    guard(|| {
        let field = &handle(field, "field")?.0;
        let mesh = &handle(mesh, "mesh")?.0;
        ftle_core::io::write_ftle_csv(path(file)?, field, mesh)?;
        Ok(())
    })
}

/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ftle_field_free(field: *mut FtleField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Largest eigenvalue of a symmetric `dim × dim` matrix given row-major.
///
/// # Safety
/// `matrix` must hold `dim * dim` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftle_max_eigenvalue(
    dim: u32,
    matrix: *const f64,
    out: *mut f64,
) -> FtleStatus {
    guard(|| {
        let d = to_dim(dim)?.n();
        let m = slice(matrix, d * d, "matrix")?;
        let rows: Vec<&[f64]> = m.chunks(d).collect();
        let s = SymmetricTensor::new(&rows)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ftle_core::max_eigenvalue(&s);
        Ok(())
    })
}

/// `ln(lambda_max) / (2 |horizon|)`; NaN below the degeneracy floor.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftle_exponent(lambda_max: f64, horizon: f64, out: *mut f64) -> FtleStatus {
    guard(|| {
        let v = ftle_core::ftle_point(lambda_max, horizon)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = v;
        Ok(())
    })
}
