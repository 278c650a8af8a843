//! C ABI over `barcode_entropy`.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Fallible functions return a [`BeStatus`]
//! and write their result through an out-pointer only on success; the text
//! of the most recent failure on the calling thread is available from
//! [`be_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use barcode_entropy::pipeline::{classify_barcode, load_point_file};
use barcode_entropy::{
    apply_essential_cap, build_rips, classify, compute_barcode, distance_matrix,
    lengths_from_barcode, render_report, sample_circle, sample_torus, sample_torus_stratified,
    Barcode, EntropyReport, Error, ErrorClass, PointCloud, ReportFormat, RipsOptions, Threshold,
};

/// Result of a fallible call. Values 2 to 5 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Invalid parameter or index.
    Config = 2,
    /// Unreadable or malformed input.
    Io = 3,
    /// The simplex budget was exceeded.
    Budget = 4,
    /// Nothing to classify.
    Degenerate = 5,
    /// The library panicked; the handle arguments should not be reused.
    Panic = 6,
}

/// Output format for [`be_report_render`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeReportFormat {
    Table = 0,
    Csv = 1,
    Json = 2,
}

/// One persistence interval. Essential classes carry the barcode cap as death.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeInterval {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

/// One classified interval, longest first.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeReportRow {
    /// 1-based rank by decreasing length.
    pub index: usize,
    pub length: f64,
    pub share: f64,
    pub substitute: f64,
    pub substitute_share: f64,
    pub entropy: f64,
    pub normalized_entropy: f64,
    pub relative_gain: f64,
    pub threshold: f64,
    pub feature: bool,
    /// Homology dimension of the source interval, or -1 for bare lengths.
    pub dim: i32,
    pub birth: f64,
    pub death: f64,
}

/// Opaque point cloud.
pub struct BePointCloud(PointCloud);

/// Opaque barcode with capped essential classes.
pub struct BeBarcode(Barcode);

/// Opaque classification report.
pub struct BeReport(EntropyReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> BeStatus {
    match e.class() {
        ErrorClass::Config => BeStatus::Config,
        ErrorClass::Io => BeStatus::Io,
        ErrorClass::Budget => BeStatus::Budget,
        ErrorClass::Degenerate => BeStatus::Degenerate,
    }
}

/// Runs `f`, translating errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BeStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BeStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("{name} must not be NULL"));
            BeStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {text}"));
            BeStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either NULL or a live pointer of type T.
    unsafe { p.as_ref() }.ok_or(Failure::Null(name))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    // SAFETY: `out` was checked for NULL and points to writable storage.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

fn out_check<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure::Null("out"))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(s: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: non-NULL, NUL-terminated per the function contracts.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| Failure::Core(Error::InvalidParameter(format!("{name} is not valid UTF-8"))))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn be_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn be_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn be_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by `CString::into_raw` in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Copies `count` points of dimension `dim`, stored row by row in `coords`.
///
/// # Safety
/// `coords` must point to `count * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_new(
    coords: *const f64,
    count: usize,
    dim: usize,
    out: *mut *mut BePointCloud,
) -> BeStatus {
    guard(|| {
        out_check(out)?;
        if coords.is_null() {
            return Err(Failure::Null("coords"));
        }
        let len = count
            .checked_mul(dim)
            .ok_or_else(|| Error::InvalidParameter("count * dim overflows".into()))?;
        // SAFETY: the caller guarantees `len` readable doubles.
        let flat = unsafe { std::slice::from_raw_parts(coords, len) }.to_vec();
        let cloud = PointCloud::from_flat(flat, dim)?;
        unsafe { put(out, BePointCloud(cloud)) };
        Ok(())
    })
}

/// Reads a CSV or whitespace-separated point file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_load(
    path: *const c_char,
    out: *mut *mut BePointCloud,
) -> BeStatus {
    guard(|| {
        out_check(out)?;
        let path = unsafe { str_arg(path, "path") }?;
        let cloud = load_point_file(Path::new(path))?;
        unsafe { put(out, BePointCloud(cloud)) };
        Ok(())
    })
}

/// Seeded sample of `count` points on a circle about the origin.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_sample_circle(
    count: usize,
    radius: f64,
    seed: u64,
    out: *mut *mut BePointCloud,
) -> BeStatus {
    guard(|| {
        out_check(out)?;
        let cloud = sample_circle(count, radius, seed)?;
        unsafe { put(out, BePointCloud(cloud)) };
        Ok(())
    })
}

/// Seeded sample of `count` points on a torus about the z-axis: a jittered
/// grid when `stratified` is true, otherwise uniform angles.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_sample_torus(
    count: usize,
    major: f64,
    minor: f64,
    seed: u64,
    stratified: bool,
    out: *mut *mut BePointCloud,
) -> BeStatus {
    guard(|| {
        out_check(out)?;
        let cloud = if stratified {
            sample_torus_stratified(count, major, minor, seed)?
        } else {
            sample_torus(count, major, minor, seed)?
        };
        unsafe { put(out, BePointCloud(cloud)) };
        Ok(())
    })
}

/// Number of points; 0 for NULL.
///
/// # Safety
/// `cloud` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_len(cloud: *const BePointCloud) -> usize {
    unsafe { cloud.as_ref() }.map_or(0, |c| c.0.len())
}

/// Ambient dimension; 0 for NULL.
///
/// # Safety
/// `cloud` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_dim(cloud: *const BePointCloud) -> usize {
    unsafe { cloud.as_ref() }.map_or(0, |c| c.0.dim())
}

/// Copies the coordinates of point `index` into `coords`.
///
/// # Safety
/// `cloud` must be a live handle and `coords` must have room for
/// `be_point_cloud_dim(cloud)` doubles.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_point(
    cloud: *const BePointCloud,
    index: usize,
    coords: *mut f64,
) -> BeStatus {
    guard(|| {
        let cloud = &unsafe { deref(cloud, "cloud") }?.0;
        if coords.is_null() {
            return Err(Failure::Null("coords"));
        }
        if index >= cloud.len() {
            return Err(Error::IndexOutOfRange { index, len: cloud.len() }.into());
        }
        let point = cloud.point(index);
        // SAFETY: the caller provides room for `dim` doubles.
        unsafe { ptr::copy_nonoverlapping(point.as_ptr(), coords, point.len()) };
        Ok(())
    })
}

/// Largest pairwise distance.
///
/// # Safety
/// `cloud` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_diameter(
    cloud: *const BePointCloud,
    out: *mut f64,
) -> BeStatus {
    guard(|| {
        let cloud = &unsafe { deref(cloud, "cloud") }?.0;
        out_check(out)?;
        let d = distance_matrix(cloud).diameter();
        unsafe { *out = d };
        Ok(())
    })
}

/// Releases a point cloud. NULL is ignored.
///
/// # Safety
/// `cloud` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn be_point_cloud_free(cloud: *mut BePointCloud) {
    if !cloud.is_null() {
        drop(unsafe { Box::from_raw(cloud) });
    }
}

/// Barcode of the Rips filtration on the radius scale, with simplices up to
/// `max_dim` and values up to `threshold` (pass infinity for the full
/// filtration). Essential classes end at the threshold, or at half the
/// diameter for the full filtration. `budget` caps the simplex count.
///
/// # Safety
/// `cloud` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_compute_barcode(
    cloud: *const BePointCloud,
    max_dim: usize,
    threshold: f64,
    budget: usize,
    out: *mut *mut BeBarcode,
) -> BeStatus {
    guard(|| {
        let cloud = &unsafe { deref(cloud, "cloud") }?.0;
        out_check(out)?;
        let threshold = if threshold == f64::INFINITY {
            Threshold::Full
        } else {
            Threshold::Value(threshold)
        };
        let options = RipsOptions { max_dim, threshold, budget };
        let complex = build_rips(&distance_matrix(cloud), &options)?;
        let barcode = apply_essential_cap(&compute_barcode(&complex), complex.diameter(), threshold);
        unsafe { put(out, BeBarcode(barcode)) };
        Ok(())
    })
}

/// Parses the text barcode format written by the CLI.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_barcode_from_text(
    text: *const c_char,
    out: *mut *mut BeBarcode,
) -> BeStatus {
    guard(|| {
        out_check(out)?;
        let text = unsafe { str_arg(text, "text") }?;
        let barcode = Barcode::from_text(text)?;
        unsafe { put(out, BeBarcode(barcode)) };
        Ok(())
    })
}

/// Serializes a barcode in the text format; free the result with
/// [`be_string_free`].
///
/// # Safety
/// `barcode` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_barcode_to_text(
    barcode: *const BeBarcode,
    out: *mut *mut c_char,
) -> BeStatus {
    guard(|| {
        let barcode = &unsafe { deref(barcode, "barcode") }?.0;
        out_check(out)?;
        unsafe { *out = c_string(barcode.to_text()) };
        Ok(())
    })
}

/// Number of intervals; 0 for NULL.
///
/// # Safety
/// `barcode` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_barcode_len(barcode: *const BeBarcode) -> usize {
    unsafe { barcode.as_ref() }.map_or(0, |b| b.0.len())
}

/// Death value given to essential classes, or NaN if none was applied.
///
/// # Safety
/// `barcode` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_barcode_cap(barcode: *const BeBarcode) -> f64 {
    unsafe { barcode.as_ref() }.and_then(|b| b.0.cap).unwrap_or(f64::NAN)
}

/// Copies interval `index`.
///
/// # Safety
/// `barcode` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_barcode_get(
    barcode: *const BeBarcode,
    index: usize,
    out: *mut BeInterval,
) -> BeStatus {
    guard(|| {
        let barcode = &unsafe { deref(barcode, "barcode") }?.0;
        out_check(out)?;
        let iv = barcode
            .intervals
            .get(index)
            .ok_or(Error::IndexOutOfRange { index, len: barcode.len() })?;
        unsafe {
            *out = BeInterval {
                dim: iv.dim,
                birth: iv.birth,
                death: iv.death,
            }
        };
        Ok(())
    })
}

/// Releases a barcode. NULL is ignored.
///
/// # Safety
/// `barcode` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn be_barcode_free(barcode: *mut BeBarcode) {
    if !barcode.is_null() {
        drop(unsafe { Box::from_raw(barcode) });
    }
}

/// Separates features from noise by persistent entropy. A negative `dim`
/// classifies all intervals together; otherwise only intervals of that
/// homology dimension are used. Zero-length intervals are left out.
///
/// # Safety
/// `barcode` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_classify(
    barcode: *const BeBarcode,
    dim: i32,
    out: *mut *mut BeReport,
) -> BeStatus {
    guard(|| {
        let barcode = &unsafe { deref(barcode, "barcode") }?.0;
        out_check(out)?;
        let report = if dim < 0 {
            classify_barcode(barcode, false)?.remove(0)
        } else {
            let mut report = classify(&lengths_from_barcode(barcode, Some(dim as usize))?);
            report.dim = Some(dim as usize);
            report
        };
        unsafe { put(out, BeReport(report)) };
        Ok(())
    })
}

/// Classifies bare lengths, which must be positive and finite.
///
/// # Safety
/// `lengths` must point to `count` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_classify_lengths(
    lengths: *const f64,
    count: usize,
    out: *mut *mut BeReport,
) -> BeStatus {
    guard(|| {
        out_check(out)?;
        if lengths.is_null() {
            return Err(Failure::Null("lengths"));
        }
        // SAFETY: the caller guarantees `count` readable doubles.
        let values = unsafe { std::slice::from_raw_parts(lengths, count) };
        let list = barcode_entropy::LengthList::new(values.iter().copied())?;
        unsafe { put(out, BeReport(classify(&list))) };
        Ok(())
    })
}

/// Number of classified intervals; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_report_len(report: *const BeReport) -> usize {
    unsafe { report.as_ref() }.map_or(0, |r| r.0.rows.len())
}

/// Number of rows flagged as features; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_report_feature_count(report: *const BeReport) -> usize {
    unsafe { report.as_ref() }.map_or(0, |r| r.0.feature_count())
}

/// Persistent entropy (natural log) of the classified lengths; NaN for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn be_report_entropy(report: *const BeReport) -> f64 {
    unsafe { report.as_ref() }.map_or(f64::NAN, |r| r.0.entropy)
}

/// Copies row `index` (0-based; rows are ordered longest first).
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_report_row(
    report: *const BeReport,
    index: usize,
    out: *mut BeReportRow,
) -> BeStatus {
    guard(|| {
        let report = &unsafe { deref(report, "report") }?.0;
        out_check(out)?;
        let row = report
            .rows
            .get(index)
            .ok_or(Error::IndexOutOfRange { index, len: report.rows.len() })?;
        let (dim, birth, death) = row
            .interval
            .as_ref()
            .map_or((-1, f64::NAN, f64::NAN), |iv| (iv.dim as i32, iv.birth, iv.death));
        unsafe {
            *out = BeReportRow {
                index: row.index,
                length: row.length,
                share: row.share,
                substitute: row.substitute,
                substitute_share: row.substitute_share,
                entropy: row.entropy,
                normalized_entropy: row.normalized_entropy,
                relative_gain: row.relative_gain,
                threshold: row.threshold,
                feature: row.feature,
                dim,
                birth,
                death,
            }
        };
        Ok(())
    })
}

/// Renders the report; free the result with [`be_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn be_report_render(
    report: *const BeReport,
    format: BeReportFormat,
    out: *mut *mut c_char,
) -> BeStatus {
    guard(|| {
        let report = &unsafe { deref(report, "report") }?.0;
        out_check(out)?;
        let format = match format {
            BeReportFormat::Table => ReportFormat::Table,
            BeReportFormat::Csv => ReportFormat::Csv,
            BeReportFormat::Json => ReportFormat::Json,
        };
        let text = render_report(report, format)?;
        unsafe { *out = c_string(text) };
        Ok(())
    })
}

/// Releases a report. NULL is ignored.
///
/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn be_report_free(report: *mut BeReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}
