//! C ABI for `records-core`.
//!
//! Every function returns a [`RecStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and can be read with
//! [`rec_last_error`]. Handles are opaque and must be released with their
//! `_free` function. Panics never cross the boundary; they map to
//! [`RecStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use records_core::extract::ExtractorState;
use records_core::laws;
use records_core::mc::{self, McConfig};
use records_core::{DistributionSpec, RealLine, RecordKind};

/// Status codes of every `rec_` function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    DomainError = 4,
    Unsupported = 5,
    Panic = 6,
}

/// Record kinds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecKind {
    StrongUpper = 0,
    WeakUpper = 1,
    StrongLower = 2,
    WeakLower = 3,
}

impl From<RecKind> for RecordKind {
    fn from(k: RecKind) -> Self {
        match k {
            RecKind::StrongUpper => RecordKind::StrongUpper,
            RecKind::WeakUpper => RecordKind::WeakUpper,
            RecKind::StrongLower => RecordKind::StrongLower,
            RecKind::WeakLower => RecordKind::WeakLower,
        }
    }
}

/// A record: its ordinal `n`, time `t` and value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecEvent {
    pub n: u64,
    pub t: u64,
    pub value: f64,
}

/// Monte-Carlo estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecMcReport {
    pub estimate: f64,
    pub std_error: f64,
    pub trials_used: u64,
    pub truncation_mass: f64,
    pub seed: u64,
}

/// Opaque distribution handle.
pub struct RecDist(DistributionSpec);

/// Opaque streaming extractor over real numbers.
pub struct RecExtractor(ExtractorState<RealLine>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(RecStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(RecStatus::NullPointer, format!("{what} is null"))
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Failure(RecStatus::InvalidArgument, msg.into())
    }
}

impl From<laws::LawError> for Failure {
    fn from(e: laws::LawError) -> Self {
        let status = match e {
            laws::LawError::UnsupportedVariant(..) => RecStatus::Unsupported,
            laws::LawError::Dist(_) | laws::LawError::OffSupport(_) => RecStatus::DomainError,
            _ => RecStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<records_core::DistError> for Failure {
    fn from(e: records_core::DistError) -> Self {
        let status = match e {
            records_core::DistError::Parse(_) => RecStatus::ParseError,
            records_core::DistError::InvalidParameter(_) => RecStatus::InvalidArgument,
            records_core::DistError::Unsupported(_) => RecStatus::Unsupported,
            _ => RecStatus::DomainError,
        };
        Failure(status, e.to_string())
    }
}

impl From<mc::McError> for Failure {
    fn from(e: mc::McError) -> Self {
        let status = match e {
            mc::McError::UnsupportedVariant(_) => RecStatus::Unsupported,
            _ => RecStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RecStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RecStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn dist<'a>(d: *const RecDist) -> Result<&'a DistributionSpec, Failure> {
    d.as_ref().map(|d| &d.0).ok_or_else(|| Failure::null("distribution"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null("array"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message of the last failed call on this thread; valid until the next call
/// that fails on the same thread. Never null.
#[no_mangle]
pub extern "C" fn rec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a distribution from JSON or shorthand (`exp:1`, `unif:0,1`, ...).
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rec_dist_new(spec: *const c_char, out: *mut *mut RecDist) -> RecStatus {
    guard(|| {
        if spec.is_null() {
            return Err(Failure::null("spec"));
        }
        let text =
            CStr::from_ptr(spec).to_str().map_err(|_| Failure(RecStatus::ParseError, "spec is not UTF-8".into()))?;
        let d = DistributionSpec::parse(text)?;
        write(out, Box::into_raw(Box::new(RecDist(d))))
    })
}

/// Releases a distribution; null is ignored.
///
/// # Safety
/// `d` must come from [`rec_dist_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rec_dist_free(d: *mut RecDist) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Whether the law is discrete (1) or continuous (0).
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rec_dist_is_discrete(d: *const RecDist, out: *mut i32) -> RecStatus {
    guard(|| write(out, dist(d)?.is_discrete() as i32))
}

/// `F(x)`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rec_dist_cdf(d: *const RecDist, x: f64, out: *mut f64) -> RecStatus {
    guard(|| write(out, dist(d)?.cdf(x)))
}

/// Generalized inverse of `F` at `u` in (0, 1).
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rec_dist_quantile(d: *const RecDist, u: f64, out: *mut f64) -> RecStatus {
    guard(|| write(out, dist(d)?.quantile(u)?))
}

/// Hazard `f(x) / P(X > x)`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rec_dist_hazard(d: *const RecDist, x: f64, out: *mut f64) -> RecStatus {
    guard(|| write(out, dist(d)?.hazard(x)?))
}

/// Cumulative hazard `-ln(1 - F(x))`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rec_dist_cum_hazard(d: *const RecDist, x: f64, out: *mut f64) -> RecStatus {
    guard(|| write(out, dist(d)?.cum_hazard(x)?))
}

/// Creates a streaming extractor over real numbers.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rec_extractor_new(kind: RecKind, out: *mut *mut RecExtractor) -> RecStatus {
    guard(|| write(out, Box::into_raw(Box::new(RecExtractor(ExtractorState::new(RealLine, kind.into()))))))
}

/// Releases an extractor; null is ignored.
///
/// # Safety
/// `e` must come from [`rec_extractor_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rec_extractor_free(e: *mut RecExtractor) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Feeds one observation. `*is_record` is set to 1 and `*event` filled when it
/// is a record, otherwise `*is_record` is 0. `event` may be null. A NaN is
/// rejected and leaves the extractor unchanged.
///
/// # Safety
/// `e` must be a live handle, `is_record` valid and `event` null or valid.
#[no_mangle]
pub unsafe extern "C" fn rec_extractor_feed(
    e: *mut RecExtractor,
    x: f64,
    is_record: *mut i32,
    event: *mut RecEvent,
) -> RecStatus {
    guard(|| {
        let state = e.as_mut().ok_or_else(|| Failure::null("extractor"))?;
        if is_record.is_null() {
            return Err(Failure::null("is_record"));
        }
        let ev = state.0.feed(x).map_err(|err| Failure::invalid(err.to_string()))?;
        match ev {
            Some(ev) => {
                if !event.is_null() {
                    event.write(RecEvent { n: ev.ordinal, t: ev.time_index, value: ev.value });
                }
                is_record.write(1);
            }
            None => is_record.write(0),
        }
        Ok(())
    })
}

/// Observations consumed and records seen so far.
///
/// # Safety
/// `e` must be a live handle; `clock` and `records` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rec_extractor_counts(e: *const RecExtractor, clock: *mut u64, records: *mut u64) -> RecStatus {
    guard(|| {
        let state = e.as_ref().ok_or_else(|| Failure::null("extractor"))?;
        write(clock, state.0.clock())?;
        write(records, state.0.records())
    })
}

/// Extracts all records of `xs[0..len]` into `events`, which has room for
/// `capacity` entries. `*count` receives the number of records, which may
/// exceed `capacity`; only the first `capacity` are written.
///
/// # Safety
/// `xs` must hold `len` values, `events` `capacity` entries, `count` valid.
#[no_mangle]
pub unsafe extern "C" fn rec_extract(
    xs: *const f64,
    len: usize,
    kind: RecKind,
    events: *mut RecEvent,
    capacity: usize,
    count: *mut usize,
) -> RecStatus {
    guard(|| {
        let xs = slice(xs, len)?;
        if capacity > 0 && events.is_null() {
            return Err(Failure::null("events"));
        }
        let rs = records_core::extract_all(xs.iter().copied(), kind.into(), RealLine)
            .map_err(|err| Failure::invalid(err.to_string()))?;
        for (i, ev) in rs.events.iter().take(capacity).enumerate() {
            events.add(i).write(RecEvent { n: ev.ordinal, t: ev.time_index, value: ev.value });
        }
        write(count, rs.count)
    })
}

/// `P(D2 = k2, ..., Dn = kn)` for gaps `gaps[0..len]`.
///
/// # Safety
/// `gaps` must hold `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn rec_interrecord_pmf(gaps: *const u64, len: usize, out: *mut f64) -> RecStatus {
    guard(|| write(out, laws::interrecord_joint_pmf(slice(gaps, len)?)?.value))
}

/// `P(U(2) = l2, ..., U(n) = ln)` for times `times[0..len]`.
///
/// # Safety
/// `times` must hold `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn rec_record_times_pmf(times: *const u64, len: usize, out: *mut f64) -> RecStatus {
    guard(|| write(out, laws::record_times_joint_pmf(slice(times, len)?)?.value))
}

/// `P(U(n+1) = j | U(n) = k)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rec_record_time_transition_pmf(k: u64, j: u64, out: *mut f64) -> RecStatus {
    guard(|| write(out, laws::record_time_transition_pmf(k, j).value))
}

/// `int prod_j F(x_j)^(k_j - 1) dF` over the ordered simplex.
///
/// # Safety
/// `exponents` must hold `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn rec_gamma_integral(exponents: *const u64, len: usize, out: *mut f64) -> RecStatus {
    guard(|| write(out, laws::gamma_integral(slice(exponents, len)?)?.value))
}

/// Density of the `n`-th record value of a continuous law at `x`.
///
/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rec_record_value_pdf(d: *const RecDist, n: usize, x: f64, out: *mut f64) -> RecStatus {
    guard(|| write(out, laws::record_value_marginal_pdf(dist(d)?, n, x)?.value))
}

/// Joint density of the first `len` record values of a continuous law.
///
/// # Safety
/// `d` must be a live handle, `ys` hold `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn rec_record_value_joint_pdf(
    d: *const RecDist,
    ys: *const f64,
    len: usize,
    out: *mut f64,
) -> RecStatus {
    guard(|| write(out, laws::record_value_joint_pdf(dist(d)?, slice(ys, len)?)?.value))
}

/// `P(X(n) = y)` for a discrete law.
///
/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rec_discrete_record_pmf(d: *const RecDist, n: usize, y: f64, out: *mut f64) -> RecStatus {
    guard(|| write(out, laws::discrete_record_pmf(dist(d)?, n, y)?.value))
}

/// Joint pmf of the first `len` record values of a discrete law.
///
/// # Safety
/// `d` must be a live handle, `ys` hold `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn rec_discrete_record_joint_pmf(
    d: *const RecDist,
    ys: *const f64,
    len: usize,
    out: *mut f64,
) -> RecStatus {
    guard(|| write(out, laws::discrete_record_joint_pmf(dist(d)?, slice(ys, len)?)?.value))
}

/// Probability that no record follows the first observation.
///
/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rec_no_further_record(d: *const RecDist, out: *mut f64) -> RecStatus {
    guard(|| write(out, laws::prob_no_further_record(dist(d)?).value))
}

/// Monte-Carlo estimate of the probability of no further record.
///
/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rec_estimate_no_further_record(
    d: *const RecDist,
    trials: u64,
    horizon: u64,
    seed: u64,
    out: *mut RecMcReport,
) -> RecStatus {
    guard(|| {
        let r = mc::estimate_no_further_record(dist(d)?, &McConfig::new(trials, horizon, seed))?;
        write(
            out,
            RecMcReport {
                estimate: r.estimate,
                std_error: r.stderr,
                trials_used: r.trials_used,
                truncation_mass: r.truncation_mass,
                seed: r.seed,
            },
        )
    })
}
