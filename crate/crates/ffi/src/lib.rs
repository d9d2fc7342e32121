//! C ABI over `mimome_tas`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`MimomeStatus`]; on failure the thread-local message from
//! [`mimome_last_error_message`] describes what went wrong. Outputs are only
//! written on success.
//!
//! SNR arguments are linear normalized SNRs; use [`mimome_db_to_linear`] to
//! convert from dB. Antenna indices are 1-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mimome_tas::baselines::{exhaustive_select, norm_based_result};
use mimome_tas::capacity::{db_to_linear, link_capacity, secrecy_capacity_direct, NormalizedSnr};
use mimome_tas::channel::{generate_rayleigh, select_columns, ChannelMatrix, MatrixFormat, Seed};
use mimome_tas::selection::{Scenario, SelectOptions, SelectionProblem, SelectionResult};
use mimome_tas::Error;
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MimomeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Selection = 4,
    Problem = 5,
    Format = 6,
    Numerical = 7,
    Budget = 8,
    Io = 9,
    Panic = 10,
}

/// Which objective the search maximizes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MimomeScenario {
    /// Legitimate capacity only.
    Ncsie = 0,
    /// Legitimate minus eavesdropper capacity.
    Csie = 1,
}

impl From<MimomeScenario> for Scenario {
    fn from(s: MimomeScenario) -> Self {
        match s {
            MimomeScenario::Ncsie => Scenario::Ncsie,
            MimomeScenario::Csie => Scenario::Csie,
        }
    }
}

/// Complex channel matrix, `rows` receive by `cols` transmit antennas.
pub struct MimomeChannel {
    inner: ChannelMatrix,
}

/// Outcome of one antenna selection.
pub struct MimomeSelection {
    inner: SelectionResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> MimomeStatus {
    match err {
        Error::Dimension(_) => MimomeStatus::Dimension,
        Error::Selection(_) => MimomeStatus::Selection,
        Error::Problem(_) => MimomeStatus::Problem,
        Error::Format(_) => MimomeStatus::Format,
        Error::Numerical(_) => MimomeStatus::Numerical,
        Error::Budget { .. } => MimomeStatus::Budget,
        Error::Io(_) => MimomeStatus::Io,
        _ => MimomeStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn guard(body: impl FnOnce() -> Outcome) -> MimomeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            MimomeStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            MimomeStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            MimomeStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> std::result::Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) {
    ptr::write(out, value);
}

fn check_out<T>(out: *mut T, what: &'static str) -> Outcome {
    if out.is_null() {
        Err(Failure::Null(what))
    } else {
        Ok(())
    }
}

unsafe fn path_arg(path: *const c_char) -> std::result::Result<String, Failure> {
    if path.is_null() {
        return Err(Failure::Null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::Lib(Error::Config("path is not valid UTF-8".into())))
}

fn boxed_channel(inner: ChannelMatrix) -> *mut MimomeChannel {
    Box::into_raw(Box::new(MimomeChannel { inner }))
}

fn boxed_selection(inner: SelectionResult) -> *mut MimomeSelection {
    Box::into_raw(Box::new(MimomeSelection { inner }))
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn mimome_status_message(status: MimomeStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        MimomeStatus::Ok => b"ok\0",
        MimomeStatus::NullPointer => b"null pointer argument\0",
        MimomeStatus::InvalidArgument => b"invalid argument\0",
        MimomeStatus::Dimension => b"dimension mismatch\0",
        MimomeStatus::Selection => b"invalid antenna selection\0",
        MimomeStatus::Problem => b"invalid problem size\0",
        MimomeStatus::Format => b"malformed matrix file\0",
        MimomeStatus::Numerical => b"numerical failure\0",
        MimomeStatus::Budget => b"exhaustive search budget exceeded\0",
        MimomeStatus::Io => b"i/o error\0",
        MimomeStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn mimome_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn mimome_db_to_linear(db: f64) -> f64 {
    db_to_linear(db)
}

/// Build a channel from `2 * rows * cols` doubles: row-major entries, each
/// as a (real, imaginary) pair.
///
/// # Safety
/// `values` must point to `2 * rows * cols` readable doubles and `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_channel_new(
    rows: usize,
    cols: usize,
    values: *const f64,
    out: *mut *mut MimomeChannel,
) -> MimomeStatus {
    guard(|| {
        check_out(out, "out")?;
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let n = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(2))
            .ok_or_else(|| Error::Dimension("matrix too large".into()))?;
        let raw = std::slice::from_raw_parts(values, n);
        let entries = raw
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let h = ChannelMatrix::new(rows, cols, entries)?;
        write_out(out, boxed_channel(h));
        Ok(())
    })
}

/// I.i.d. unit-variance circularly symmetric Gaussian channel.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_channel_generate_rayleigh(
    rows: usize,
    cols: usize,
    seed: u64,
    out: *mut *mut MimomeChannel,
) -> MimomeStatus {
    guard(|| {
        check_out(out, "out")?;
        let h = generate_rayleigh(rows, cols, Seed(seed))?;
        write_out(out, boxed_channel(h));
        Ok(())
    })
}

/// Load a text or binary matrix file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_channel_load(
    path: *const c_char,
    out: *mut *mut MimomeChannel,
) -> MimomeStatus {
    guard(|| {
        check_out(out, "out")?;
        let path = path_arg(path)?;
        let h = ChannelMatrix::load_path(path)?;
        write_out(out, boxed_channel(h));
        Ok(())
    })
}

/// Store a matrix; `binary` selects the binary encoding.
///
/// # Safety
/// `channel` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mimome_channel_store(
    channel: *const MimomeChannel,
    path: *const c_char,
    binary: bool,
) -> MimomeStatus {
    guard(|| {
        let h = deref(channel, "channel")?;
        let path = path_arg(path)?;
        let format = if binary {
            MatrixFormat::Binary
        } else {
            MatrixFormat::Text
        };
        h.inner.store_path(path, format)?;
        Ok(())
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `channel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mimome_channel_rows(channel: *const MimomeChannel) -> usize {
    channel.as_ref().map_or(0, |h| h.inner.rows())
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `channel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mimome_channel_cols(channel: *const MimomeChannel) -> usize {
    channel.as_ref().map_or(0, |h| h.inner.cols())
}

/// Read one entry (0-based row and column).
///
/// # Safety
/// `channel` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_channel_get(
    channel: *const MimomeChannel,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> MimomeStatus {
    guard(|| {
        let h = deref(channel, "channel")?;
        check_out(re, "re")?;
        check_out(im, "im")?;
        if row >= h.inner.rows() || col >= h.inner.cols() {
            return Err(Error::Dimension(format!(
                "entry ({row}, {col}) outside a {}x{} matrix",
                h.inner.rows(),
                h.inner.cols()
            ))
            .into());
        }
        let z = h.inner.get(row, col);
        write_out(re, z.re);
        write_out(im, z.im);
        Ok(())
    })
}

/// # Safety
/// `channel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mimome_channel_free(channel: *mut MimomeChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

unsafe fn indices_arg<'a>(
    indices: *const usize,
    len: usize,
) -> std::result::Result<&'a [usize], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if indices.is_null() {
        return Err(Failure::Null("indices"));
    }
    Ok(std::slice::from_raw_parts(indices, len))
}

/// `log2 det(I + rho H H^H)` of a whole channel.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_link_capacity(
    channel: *const MimomeChannel,
    rho: f64,
    out: *mut f64,
) -> MimomeStatus {
    guard(|| {
        let h = deref(channel, "channel")?;
        check_out(out, "out")?;
        let c = link_capacity(&h.inner, NormalizedSnr::new(rho)?)?;
        write_out(out, c);
        Ok(())
    })
}

/// Clamped secrecy capacity `[C_m - C_e]^+` of the subset `indices`.
///
/// # Safety
/// Handles must be live, `indices` must hold `len` values and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_secrecy_capacity(
    hm: *const MimomeChannel,
    he: *const MimomeChannel,
    indices: *const usize,
    len: usize,
    rho_m: f64,
    rho_e: f64,
    out: *mut f64,
) -> MimomeStatus {
    guard(|| {
        let hm = deref(hm, "hm")?;
        let he = deref(he, "he")?;
        check_out(out, "out")?;
        let idx = indices_arg(indices, len)?;
        let s = secrecy_capacity_direct(
            &select_columns(&hm.inner, idx)?,
            &select_columns(&he.inner, idx)?,
            NormalizedSnr::new(rho_m)?,
            NormalizedSnr::new(rho_e)?,
        )?;
        write_out(out, s.clamped());
        Ok(())
    })
}

unsafe fn problem<'a>(
    scenario: MimomeScenario,
    hm: *const MimomeChannel,
    he: *const MimomeChannel,
    l: usize,
    rho_m: f64,
    rho_e: f64,
) -> std::result::Result<SelectionProblem<'a>, Failure> {
    let hm: &'a MimomeChannel = deref(hm, "hm")?;
    let he: Option<&'a MimomeChannel> = he.as_ref();
    if scenario == MimomeScenario::Csie && he.is_none() {
        return Err(Failure::Null("he"));
    }
    let rho_m = NormalizedSnr::new(rho_m)?;
    let rho_e = he.map(|_| NormalizedSnr::new(rho_e)).transpose()?;
    Ok(SelectionProblem::new(
        scenario.into(),
        &hm.inner,
        he.map(|h| &h.inner),
        l,
        rho_m,
        rho_e,
    )?)
}

/// Branch-and-bound selection without eavesdropper knowledge.
///
/// # Safety
/// `hm` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_select_ncsie(
    hm: *const MimomeChannel,
    l: usize,
    rho_m: f64,
    warm_start: bool,
    out: *mut *mut MimomeSelection,
) -> MimomeStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = problem(MimomeScenario::Ncsie, hm, ptr::null(), l, rho_m, 1.0)?;
        let r = p.select(&SelectOptions {
            warm_start,
            ..Default::default()
        })?;
        write_out(out, boxed_selection(r));
        Ok(())
    })
}

/// Branch-and-bound selection maximizing `C_m - C_e`.
///
/// # Safety
/// `hm` and `he` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_select_csie(
    hm: *const MimomeChannel,
    he: *const MimomeChannel,
    l: usize,
    rho_m: f64,
    rho_e: f64,
    warm_start: bool,
    out: *mut *mut MimomeSelection,
) -> MimomeStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = problem(MimomeScenario::Csie, hm, he, l, rho_m, rho_e)?;
        let r = p.select(&SelectOptions {
            warm_start,
            ..Default::default()
        })?;
        write_out(out, boxed_selection(r));
        Ok(())
    })
}

/// Exhaustive search. `he` may be null for [`MimomeScenario::Ncsie`].
/// Fails with [`MimomeStatus::Budget`] when `C(Nt, L)` exceeds `cap`.
///
/// # Safety
/// Handles must be live (or `he` null) and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_select_exhaustive(
    scenario: MimomeScenario,
    hm: *const MimomeChannel,
    he: *const MimomeChannel,
    l: usize,
    rho_m: f64,
    rho_e: f64,
    cap: u64,
    out: *mut *mut MimomeSelection,
) -> MimomeStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = problem(scenario, hm, he, l, rho_m, rho_e)?;
        let r = exhaustive_select(&p, u128::from(cap))?;
        write_out(out, boxed_selection(r));
        Ok(())
    })
}

/// The `L` strongest columns of `hm`. `he` may be null; when given, the
/// secrecy capacity of the choice is reported.
///
/// # Safety
/// Handles must be live (or `he` null) and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mimome_select_norm(
    hm: *const MimomeChannel,
    he: *const MimomeChannel,
    l: usize,
    rho_m: f64,
    rho_e: f64,
    out: *mut *mut MimomeSelection,
) -> MimomeStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = problem(MimomeScenario::Ncsie, hm, he, l, rho_m, rho_e)?;
        let r = norm_based_result(&p)?;
        write_out(out, boxed_selection(r));
        Ok(())
    })
}

/// Number of selected antennas, or 0 for a null handle.
///
/// # Safety
/// `selection` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mimome_selection_len(selection: *const MimomeSelection) -> usize {
    selection.as_ref().map_or(0, |s| s.inner.indices.len())
}

/// Copy the 1-based indices into `buf`, which must hold at least
/// [`mimome_selection_len`] values.
///
/// # Safety
/// `selection` must be a live handle and `buf` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn mimome_selection_indices(
    selection: *const MimomeSelection,
    buf: *mut usize,
    capacity: usize,
) -> MimomeStatus {
    guard(|| {
        let s = deref(selection, "selection")?;
        check_out(buf, "buf")?;
        let idx = &s.inner.indices;
        if capacity < idx.len() {
            return Err(Error::Dimension(format!(
                "buffer holds {capacity} indices, selection has {}",
                idx.len()
            ))
            .into());
        }
        ptr::copy_nonoverlapping(idx.as_ptr(), buf, idx.len());
        Ok(())
    })
}

/// Scenario objective in bits per channel use (NaN for a null handle).
///
/// # Safety
/// `selection` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mimome_selection_objective(selection: *const MimomeSelection) -> f64 {
    selection.as_ref().map_or(f64::NAN, |s| s.inner.objective)
}

/// Clamped secrecy capacity, or NaN when the eavesdropper link was unknown.
///
/// # Safety
/// `selection` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mimome_selection_secrecy_capacity(
    selection: *const MimomeSelection,
) -> f64 {
    selection
        .as_ref()
        .and_then(|s| s.inner.secrecy_capacity)
        .unwrap_or(f64::NAN)
}

/// Search-tree nodes charged to the method (0 for a null handle).
///
/// # Safety
/// `selection` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mimome_selection_visited_nodes(selection: *const MimomeSelection) -> u64 {
    selection.as_ref().map_or(0, |s| s.inner.visited_nodes)
}

/// # Safety
/// `selection` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mimome_selection_free(selection: *mut MimomeSelection) {
    if !selection.is_null() {
        drop(Box::from_raw(selection));
    }
}
