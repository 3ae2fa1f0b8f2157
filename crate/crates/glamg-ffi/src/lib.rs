//! C ABI for the glamg solver: opaque handles, status codes, and a flat
//! options struct, so other languages can drive the solver without touching
//! Rust types.
//!
//! Conventions:
//! - every function returns a [`GlamgStatus`]; `GLAMG_OK` is 0
//! - handles created here must be released with the matching `*_free`
//! - a failing call stores a message retrievable with
//!   [`glamg_last_error_message`] (thread-local)
//! - panics are caught at the boundary and reported as
//!   `GLAMG_INTERNAL_ERROR`
//!
//! The C header is generated into `include/glamg.h` by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use glamg::coarsening::CoarsenerChoice;
use glamg::error::Error;
use glamg::poisson::{poisson_2d, PoissonSpec, RhsKind};
use glamg::solver::{solve, SolveReport, SolverConfig};
use glamg::sparse::CsrMatrix;

/// Status code of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlamgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NumericalError = 4,
    NotConverged = 5,
    IoError = 6,
    InternalError = 7,
}

/// Coarsener selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlamgMethod {
    Gl = 0,
    Vanek = 1,
    Beck = 2,
}

/// Right-hand side of generated Poisson problems.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlamgRhs {
    Zero = 0,
    Ones = 1,
    ManufacturedSin = 2,
}

/// Solver options, passed by value. Obtain defaults from
/// [`glamg_options_default`] and override fields as needed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GlamgOptions {
    pub method: GlamgMethod,
    pub tolerance: f64,
    pub max_vcycles: usize,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    pub coarsest_size: usize,
    /// Seed of the stochastic (graph-learning) pipeline.
    pub seed: u64,
    /// Node-embedding dimension of the graph-learning coarsener.
    pub embedding_dimension: usize,
    /// Fine nodes per aggregate for the graph-learning coarsener.
    pub cluster_ratio: f64,
    /// Strong-coupling threshold of the Vanek coarsener.
    pub vanek_epsilon: f64,
}

/// Opaque sparse matrix handle.
pub struct GlamgMatrix(CsrMatrix);

/// Opaque solve report handle.
pub struct GlamgReport(SolveReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_for(err: &Error) -> GlamgStatus {
    match err {
        Error::IndexOutOfRange { .. } => GlamgStatus::InvalidArgument,
        Error::InvalidConfig(_) => GlamgStatus::InvalidArgument,
        Error::DimensionMismatch(_) => GlamgStatus::DimensionMismatch,
        Error::ZeroDiagonal(_) | Error::Singular(_) => GlamgStatus::NumericalError,
        Error::EmptyCluster(_) | Error::EmptyCorpus => GlamgStatus::NumericalError,
        Error::Parse { .. } | Error::Io(_) => GlamgStatus::IoError,
    }
}

fn fail(err: &Error) -> GlamgStatus {
    set_last_error(&err.to_string());
    status_for(err)
}

/// Run `body` with panics converted to `InternalError`.
fn guarded(body: impl FnOnce() -> GlamgStatus) -> GlamgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            GlamgStatus::InternalError
        }
    }
}

fn options_to_config(options: &GlamgOptions) -> Result<SolverConfig, Error> {
    let coarsener = match options.method {
        GlamgMethod::Gl => {
            let mut choice = CoarsenerChoice::gl(options.seed);
            if let glamg::coarsening::CoarsenMethod::Gl(cfg) = &mut choice.method {
                if options.embedding_dimension == 0 {
                    return Err(Error::InvalidConfig(
                        "embedding_dimension must be at least 1".into(),
                    ));
                }
                cfg.embedding.dimension = options.embedding_dimension;
                cfg.cluster_ratio = options.cluster_ratio;
            }
            choice
        }
        GlamgMethod::Vanek => {
            let mut choice = CoarsenerChoice::vanek();
            if let glamg::coarsening::CoarsenMethod::Vanek { epsilon } = &mut choice.method {
                *epsilon = options.vanek_epsilon;
            }
            choice
        }
        GlamgMethod::Beck => CoarsenerChoice::beck(),
    };
    let mut cfg = SolverConfig::new(coarsener);
    cfg.tolerance = options.tolerance;
    cfg.max_vcycles = options.max_vcycles;
    cfg.pre_sweeps = options.pre_sweeps;
    cfg.post_sweeps = options.post_sweeps;
    cfg.coarsest_size = options.coarsest_size;
    Ok(cfg)
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn glamg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn glamg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Default solver options: graph-learning coarsener, tolerance 1e-4,
/// 2 pre / 7 post Jacobi sweeps, direct solves at 20 unknowns or less.
#[no_mangle]
pub extern "C" fn glamg_options_default() -> GlamgOptions {
    GlamgOptions {
        method: GlamgMethod::Gl,
        tolerance: 1e-4,
        max_vcycles: 10_000,
        pre_sweeps: 2,
        post_sweeps: 7,
        coarsest_size: 20,
        seed: 0,
        embedding_dimension: 128,
        cluster_ratio: 5.0,
        vanek_epsilon: 0.08,
    }
}

/// Build an `n_rows x n_cols` sparse matrix from `nnz` triplets; duplicate
/// entries are summed.
///
/// # Safety
/// `rows`, `cols` and `values` must point to `nnz` readable elements;
/// `out` must be a valid destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn glamg_matrix_from_triplets(
    n_rows: usize,
    n_cols: usize,
    nnz: usize,
    rows: *const usize,
    cols: *const usize,
    values: *const f64,
    out: *mut *mut GlamgMatrix,
) -> GlamgStatus {
    if out.is_null() || (nnz > 0 && (rows.is_null() || cols.is_null() || values.is_null())) {
        set_last_error("null pointer argument");
        return GlamgStatus::NullPointer;
    }
    guarded(|| {
        let rows = std::slice::from_raw_parts(rows, nnz);
        let cols = std::slice::from_raw_parts(cols, nnz);
        let values = std::slice::from_raw_parts(values, nnz);
        let entries: Vec<(usize, usize, f64)> = rows
            .iter()
            .zip(cols)
            .zip(values)
            .map(|((&r, &c), &v)| (r, c, v))
            .collect();
        match CsrMatrix::from_triplets(n_rows, n_cols, &entries) {
            Ok(matrix) => {
                *out = Box::into_raw(Box::new(GlamgMatrix(matrix)));
                GlamgStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Read a matrix from a Matrix Market coordinate file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn glamg_matrix_read_matrix_market(
    path: *const c_char,
    out: *mut *mut GlamgMatrix,
) -> GlamgStatus {
    if path.is_null() || out.is_null() {
        set_last_error("null pointer argument");
        return GlamgStatus::NullPointer;
    }
    guarded(|| {
        let path = match CStr::from_ptr(path).to_str() {
            Ok(p) => p,
            Err(_) => {
                set_last_error("path is not valid UTF-8");
                return GlamgStatus::InvalidArgument;
            }
        };
        match glamg::mm::read_matrix_market(path) {
            Ok(matrix) => {
                *out = Box::into_raw(Box::new(GlamgMatrix(matrix)));
                GlamgStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Write a matrix in Matrix Market coordinate format.
///
/// # Safety
/// `matrix` must be a live handle from this library; `path` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn glamg_matrix_write_matrix_market(
    matrix: *const GlamgMatrix,
    path: *const c_char,
) -> GlamgStatus {
    if matrix.is_null() || path.is_null() {
        set_last_error("null pointer argument");
        return GlamgStatus::NullPointer;
    }
    guarded(|| {
        let path = match CStr::from_ptr(path).to_str() {
            Ok(p) => p,
            Err(_) => {
                set_last_error("path is not valid UTF-8");
                return GlamgStatus::InvalidArgument;
            }
        };
        match glamg::mm::write_matrix_market(&(*matrix).0, path) {
            Ok(()) => GlamgStatus::Ok,
            Err(err) => fail(&err),
        }
    })
}

/// Generate the 5-point Poisson system on an `nx x ny` interior grid.
/// `rhs_out` may be null; otherwise it must hold `nx * ny` elements.
///
/// # Safety
/// `out` must be a valid destination for one pointer; `rhs_out`, when not
/// null, must point to `nx * ny` writable elements.
#[no_mangle]
pub unsafe extern "C" fn glamg_poisson_2d(
    nx: usize,
    ny: usize,
    rhs: GlamgRhs,
    out: *mut *mut GlamgMatrix,
    rhs_out: *mut f64,
) -> GlamgStatus {
    if out.is_null() {
        set_last_error("null pointer argument");
        return GlamgStatus::NullPointer;
    }
    guarded(|| {
        let kind = match rhs {
            GlamgRhs::Zero => RhsKind::Zero,
            GlamgRhs::Ones => RhsKind::Ones,
            GlamgRhs::ManufacturedSin => RhsKind::ManufacturedSin,
        };
        match poisson_2d(&PoissonSpec { nx, ny, rhs: kind }) {
            Ok((matrix, f)) => {
                if !rhs_out.is_null() {
                    std::ptr::copy_nonoverlapping(f.as_ptr(), rhs_out, f.len());
                }
                *out = Box::into_raw(Box::new(GlamgMatrix(matrix)));
                GlamgStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Number of rows of a matrix handle (0 for null).
///
/// # Safety
/// `matrix` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn glamg_matrix_n_rows(matrix: *const GlamgMatrix) -> usize {
    if matrix.is_null() {
        return 0;
    }
    (*matrix).0.n_rows()
}

/// Number of columns of a matrix handle (0 for null).
///
/// # Safety
/// `matrix` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn glamg_matrix_n_cols(matrix: *const GlamgMatrix) -> usize {
    if matrix.is_null() {
        return 0;
    }
    (*matrix).0.n_cols()
}

/// Number of stored entries of a matrix handle (0 for null).
///
/// # Safety
/// `matrix` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn glamg_matrix_nnz(matrix: *const GlamgMatrix) -> usize {
    if matrix.is_null() {
        return 0;
    }
    (*matrix).0.nnz()
}

/// Release a matrix handle. Null is a no-op.
///
/// # Safety
/// `matrix` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn glamg_matrix_free(matrix: *mut GlamgMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Solve `A v = f` with the AMG V-cycle from a zero initial guess.
///
/// `solution_out` receives the iterate (length `rhs_len`) whether or not
/// the run converged. When `report_out` is not null it receives a report
/// handle to free with [`glamg_report_free`]. Returns `NotConverged` when
/// the iteration hit its budget or the divergence guard.
///
/// # Safety
/// `matrix` must be a live handle; `rhs` must hold `rhs_len` readable
/// elements; `solution_out` must hold `rhs_len` writable elements;
/// `report_out` must be null or a valid destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn glamg_solve(
    matrix: *const GlamgMatrix,
    rhs: *const f64,
    rhs_len: usize,
    options: GlamgOptions,
    solution_out: *mut f64,
    report_out: *mut *mut GlamgReport,
) -> GlamgStatus {
    if matrix.is_null() || rhs.is_null() || solution_out.is_null() {
        set_last_error("null pointer argument");
        return GlamgStatus::NullPointer;
    }
    guarded(|| {
        let a = &(*matrix).0;
        let f = std::slice::from_raw_parts(rhs, rhs_len);
        let cfg = match options_to_config(&options) {
            Ok(cfg) => cfg,
            Err(err) => return fail(&err),
        };
        let v0 = vec![0.0; f.len()];
        match solve(a, f, &v0, &cfg) {
            Ok((v, report)) => {
                std::ptr::copy_nonoverlapping(v.as_ptr(), solution_out, v.len());
                let converged = report.converged;
                if !report_out.is_null() {
                    *report_out = Box::into_raw(Box::new(GlamgReport(report)));
                }
                if converged {
                    GlamgStatus::Ok
                } else {
                    set_last_error("iteration stopped before reaching the tolerance");
                    GlamgStatus::NotConverged
                }
            }
            Err(err) => fail(&err),
        }
    })
}

/// Build a prolongation operator for `matrix` with the configured
/// coarsener.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be a valid destination for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn glamg_coarsen(
    matrix: *const GlamgMatrix,
    options: GlamgOptions,
    out: *mut *mut GlamgMatrix,
) -> GlamgStatus {
    if matrix.is_null() || out.is_null() {
        set_last_error("null pointer argument");
        return GlamgStatus::NullPointer;
    }
    guarded(|| {
        let cfg = match options_to_config(&options) {
            Ok(cfg) => cfg,
            Err(err) => return fail(&err),
        };
        match cfg.coarsener.coarsen(&(*matrix).0) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(GlamgMatrix(p)));
                GlamgStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// V-cycles executed by the reported solve.
///
/// # Safety
/// `report` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn glamg_report_iterations(report: *const GlamgReport) -> usize {
    if report.is_null() {
        return 0;
    }
    (*report).0.iterations
}

/// Whether the reported solve reached the tolerance.
///
/// # Safety
/// `report` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn glamg_report_converged(report: *const GlamgReport) -> bool {
    if report.is_null() {
        return false;
    }
    (*report).0.converged
}

/// Final residual infinity norm (NaN when no cycles ran).
///
/// # Safety
/// `report` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn glamg_report_final_residual(report: *const GlamgReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    (*report)
        .0
        .residual_history
        .last()
        .copied()
        .unwrap_or(f64::NAN)
}

/// Hierarchy setup time in seconds.
///
/// # Safety
/// `report` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn glamg_report_setup_seconds(report: *const GlamgReport) -> f64 {
    if report.is_null() {
        return 0.0;
    }
    (*report).0.setup_seconds
}

/// Cycling time in seconds.
///
/// # Safety
/// `report` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn glamg_report_solve_seconds(report: *const GlamgReport) -> f64 {
    if report.is_null() {
        return 0.0;
    }
    (*report).0.solve_seconds
}

/// Release a report handle. Null is a no-op.
///
/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn glamg_report_free(report: *mut GlamgReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
