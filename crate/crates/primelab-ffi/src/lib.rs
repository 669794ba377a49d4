//! C ABI over the primelab core: opaque handles for the sieve and for
//! density matrices, integer status codes, and scalar out-parameters.
//!
//! Every function is panic-safe (panics are converted to
//! `PL_STATUS_INTERNAL`) and null-checks its pointers. Handles must be
//! released with the matching `_free` function exactly once; `_free` on a
//! null pointer is a no-op.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, c_double, c_int, size_t};

use primelab::primes::PrimeTable;
use primelab::spectra::{self, Spectrum};
use primelab::statebuilder::{
    build_state, reduce_mask, rho_exact, DensityMatrix, PartitionMask, Series,
};
use primelab::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum PlStatus {
    PlStatusOk = 0,
    /// A required pointer argument was null.
    PlStatusNullArgument = 1,
    /// An argument was outside the supported range.
    PlStatusRange = 2,
    /// Arguments were individually valid but jointly inconsistent.
    PlStatusDomain = 3,
    /// Filesystem failure while reading or writing a sieve cache.
    PlStatusIo = 4,
    /// The eigensolver failed to converge.
    PlStatusEigen = 5,
    /// Unexpected internal failure.
    PlStatusInternal = 6,
}

fn status_of(e: &Error) -> PlStatus {
    match e {
        Error::Range(_) => PlStatus::PlStatusRange,
        Error::Domain(_) => PlStatus::PlStatusDomain,
        Error::Io(_) => PlStatus::PlStatusIo,
        Error::Eig(_) => PlStatus::PlStatusEigen,
    }
}

/// Opaque sieve handle.
pub struct PlTable {
    inner: PrimeTable,
}

/// Opaque density-matrix handle, carrying its spectrum lazily.
pub struct PlMatrix {
    rho: DensityMatrix,
    spectrum: Option<Spectrum>,
}

/// Series selector for `pl_matrix_reduce`.
#[repr(C)]
#[derive(Clone, Copy)]
pub enum PlSeries {
    PlSeriesPrime = 0,
    PlSeriesTwin = 1,
    PlSeriesTriplet = 2,
    PlSeriesMoebius = 3,
}

impl From<PlSeries> for Series {
    fn from(s: PlSeries) -> Series {
        match s {
            PlSeries::PlSeriesPrime => Series::Prime,
            PlSeries::PlSeriesTwin => Series::Twin,
            PlSeries::PlSeriesTriplet => Series::Triplet,
            PlSeries::PlSeriesMoebius => Series::Moebius,
        }
    }
}

fn guarded<F: FnOnce() -> PlStatus>(f: F) -> PlStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(PlStatus::PlStatusInternal)
}

/// Build a sieve covering [0, 2^n). On success `*out` owns the handle.
#[no_mangle]
pub unsafe extern "C" fn pl_table_build(n: u32, out: *mut *mut PlTable) -> PlStatus {
    if out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| match PrimeTable::build(n) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(PlTable { inner }));
            PlStatus::PlStatusOk
        }
        Err(e) => status_of(&e),
    })
}

/// Build a sieve with an on-disk cache under `cache_dir` (UTF-8 path).
#[no_mangle]
pub unsafe extern "C" fn pl_table_load_or_build(
    n: u32,
    cache_dir: *const c_char,
    out: *mut *mut PlTable,
) -> PlStatus {
    if out.is_null() || cache_dir.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| {
        let dir = match std::ffi::CStr::from_ptr(cache_dir).to_str() {
            Ok(s) => s,
            Err(_) => return PlStatus::PlStatusDomain,
        };
        match PrimeTable::load_or_build(n, std::path::Path::new(dir)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PlTable { inner }));
                PlStatus::PlStatusOk
            }
            Err(e) => status_of(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn pl_table_free(table: *mut PlTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of primes at or below x.
#[no_mangle]
pub unsafe extern "C" fn pl_pi(table: *const PlTable, x: u64, out: *mut u64) -> PlStatus {
    if table.is_null() || out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| match primelab::counting::pi(&(*table).inner, x) {
        Ok(v) => {
            *out = v;
            PlStatus::PlStatusOk
        }
        Err(e) => status_of(&e),
    })
}

/// 1 if x is prime, 0 otherwise (x must be inside the sieved range).
#[no_mangle]
pub unsafe extern "C" fn pl_is_prime(table: *const PlTable, x: u64, out: *mut c_int) -> PlStatus {
    if table.is_null() || out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| {
        if x >= (*table).inner.limit() {
            return PlStatus::PlStatusRange;
        }
        *out = (*table).inner.is_prime(x) as c_int;
        PlStatus::PlStatusOk
    })
}

/// Exact natural-partition reduced density matrix of the prime state.
#[no_mangle]
pub unsafe extern "C" fn pl_rho_exact(
    table: *const PlTable,
    n: u32,
    m: u32,
    out: *mut *mut PlMatrix,
) -> PlStatus {
    if table.is_null() || out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| match rho_exact(&(*table).inner, n, m) {
        Ok(rho) => {
            *out = Box::into_raw(Box::new(PlMatrix { rho, spectrum: None }));
            PlStatus::PlStatusOk
        }
        Err(e) => status_of(&e),
    })
}

/// Reduced density matrix of an arbitrary series state under the partition
/// keeping the `n_keep` qubit indices in `keep_bits`.
#[no_mangle]
pub unsafe extern "C" fn pl_matrix_reduce(
    table: *const PlTable,
    n: u32,
    series: PlSeries,
    keep_bits: *const u32,
    n_keep: size_t,
    out: *mut *mut PlMatrix,
) -> PlStatus {
    if table.is_null() || out.is_null() || keep_bits.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| {
        let bits = std::slice::from_raw_parts(keep_bits, n_keep).to_vec();
        let result = build_state(&(*table).inner, n, series.into())
            .and_then(|state| {
                let mask = PartitionMask::new(n, bits)?;
                reduce_mask(&state, &mask)
            });
        match result {
            Ok(rho) => {
                *out = Box::into_raw(Box::new(PlMatrix { rho, spectrum: None }));
                PlStatus::PlStatusOk
            }
            Err(e) => status_of(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn pl_matrix_free(matrix: *mut PlMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Matrix dimension.
#[no_mangle]
pub unsafe extern "C" fn pl_matrix_dim(matrix: *const PlMatrix, out: *mut size_t) -> PlStatus {
    if matrix.is_null() || out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    *out = (*matrix).rho.dim();
    PlStatus::PlStatusOk
}

/// One matrix entry by (row, col).
#[no_mangle]
pub unsafe extern "C" fn pl_matrix_entry(
    matrix: *const PlMatrix,
    row: size_t,
    col: size_t,
    out: *mut c_double,
) -> PlStatus {
    if matrix.is_null() || out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    let dim = (*matrix).rho.dim();
    if row >= dim || col >= dim {
        return PlStatus::PlStatusRange;
    }
    *out = (*matrix).rho.entry(row, col);
    PlStatus::PlStatusOk
}

unsafe fn spectrum_mut(matrix: *mut PlMatrix) -> Result<&'static Spectrum, PlStatus> {
    let mx = &mut *matrix;
    if mx.spectrum.is_none() {
        match spectra::spectrum_of(&mx.rho) {
            Ok(s) => mx.spectrum = Some(s),
            Err(e) => return Err(status_of(&e)),
        }
    }
    Ok(mx.spectrum.as_ref().unwrap())
}

/// Tr rho^2.
#[no_mangle]
pub unsafe extern "C" fn pl_purity(matrix: *const PlMatrix, out: *mut c_double) -> PlStatus {
    if matrix.is_null() || out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| {
        *out = spectra::purity(&(*matrix).rho);
        PlStatus::PlStatusOk
    })
}

/// Von Neumann entropy in bits; diagonalizes on first use and caches the
/// spectrum in the handle.
#[no_mangle]
pub unsafe extern "C" fn pl_vn_entropy(matrix: *mut PlMatrix, out: *mut c_double) -> PlStatus {
    if matrix.is_null() || out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| match spectrum_mut(matrix) {
        Ok(spec) => {
            *out = spectra::vn_entropy(spec);
            PlStatus::PlStatusOk
        }
        Err(st) => st,
    })
}

/// Renyi entropy in bits for order > 0, order != 1.
#[no_mangle]
pub unsafe extern "C" fn pl_renyi_entropy(
    matrix: *mut PlMatrix,
    order: c_double,
    out: *mut c_double,
) -> PlStatus {
    if matrix.is_null() || out.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| match spectrum_mut(matrix) {
        Ok(spec) => match spectra::renyi(spec, order) {
            Ok(v) => {
                *out = v;
                PlStatus::PlStatusOk
            }
            Err(e) => status_of(&e),
        },
        Err(st) => st,
    })
}

/// Copy the descending eigenvalues into a caller buffer of length
/// `capacity`; `*written` reports how many were stored.
#[no_mangle]
pub unsafe extern "C" fn pl_eigenvalues(
    matrix: *mut PlMatrix,
    buffer: *mut c_double,
    capacity: size_t,
    written: *mut size_t,
) -> PlStatus {
    if matrix.is_null() || buffer.is_null() || written.is_null() {
        return PlStatus::PlStatusNullArgument;
    }
    guarded(|| match spectrum_mut(matrix) {
        Ok(spec) => {
            let count = spec.eigenvalues.len().min(capacity);
            ptr::copy_nonoverlapping(spec.eigenvalues.as_ptr(), buffer, count);
            *written = count;
            PlStatus::PlStatusOk
        }
        Err(st) => st,
    })
}
