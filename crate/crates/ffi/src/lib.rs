//! C interface to `wlab`.
//!
//! A composition is parsed into an opaque [`WlabSection`] handle holding the
//! tableau and its section. Queries write through out-pointers and return a
//! [`WlabStatus`]. Strings handed out by the library are released with
//! [`wlab_string_free`], handles with [`wlab_section_free`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wlab::component::{dim_b_saturation, markings_of, orbital_closure_test};
use wlab::regularity::{analyze_regularity, EvsPolicy, Verdict};
use wlab::report::analyze;
use wlab::section::{build_section, LineSet};
use wlab::suites::SuiteConfig;
use wlab::weyl::CoordSet;
use wlab::{Composition, Coord, Tableau, WlabError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidComposition = 3,
    InvalidConfig = 4,
    OutOfRange = 5,
    /// A lemma-level assertion failed inside the library.
    Assertion = 6,
    /// Some property check in a report failed.
    PropertyFailure = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WlabVerdict {
    Regular = 0,
    WeaklyRegularNoDenseOrbit = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WlabRenderTarget {
    Tableau = 0,
    Matrix = 1,
}

/// Which support a coordinate query reads.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WlabSupport {
    /// Lines labelled 1.
    E = 0,
    /// Lines labelled `*`.
    V = 1,
    /// Coordinates excluded by some pair.
    Excluded = 2,
}

/// A matrix position, 1-based.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WlabCoord {
    pub row: usize,
    pub col: usize,
}

/// Opaque handle: a composition with its section.
pub struct WlabSection {
    comp: Composition,
    section: LineSet,
    e: Vec<Coord>,
    v: Vec<Coord>,
    excluded: Vec<Coord>,
}

impl From<&WlabError> for WlabStatus {
    fn from(e: &WlabError) -> Self {
        match e {
            WlabError::InvalidComposition(_) => WlabStatus::InvalidComposition,
            WlabError::InvalidConfig(_) | WlabError::SymbolicBlowup { .. } => {
                WlabStatus::InvalidConfig
            }
            WlabError::NotNeighbors { .. } => WlabStatus::OutOfRange,
            _ => WlabStatus::Assertion,
        }
    }
}

fn guard(f: impl FnOnce() -> WlabStatus) -> WlabStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(WlabStatus::Panic)
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, WlabStatus> {
    if s.is_null() {
        return Err(WlabStatus::NullPointer);
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| WlabStatus::InvalidUtf8)
}

unsafe fn read_comp(s: *const c_char) -> Result<Composition, WlabStatus> {
    read_str(s)?
        .parse()
        .map_err(|e: WlabError| WlabStatus::from(&e))
}

fn give_string(s: String, out: *mut *mut c_char) -> WlabStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before reaching here.
            unsafe { *out = c.into_raw() };
            WlabStatus::Ok
        }
        Err(_) => WlabStatus::InvalidUtf8,
    }
}

fn sorted(s: CoordSet) -> Vec<Coord> {
    s.into_iter().collect()
}

/// Short description of a status code. The string is static.
#[no_mangle]
pub extern "C" fn wlab_status_message(status: WlabStatus) -> *const c_char {
    let s: &'static CStr = match status {
        WlabStatus::Ok => c"ok",
        WlabStatus::NullPointer => c"null pointer argument",
        WlabStatus::InvalidUtf8 => c"string is not valid UTF-8",
        WlabStatus::InvalidComposition => c"invalid composition",
        WlabStatus::InvalidConfig => c"invalid configuration",
        WlabStatus::OutOfRange => c"index out of range",
        WlabStatus::Assertion => c"lemma-level assertion failed",
        WlabStatus::PropertyFailure => c"property check failed",
        WlabStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Parses `comp` (e.g. `"3,2,1,1,2,3"`) and builds its section.
///
/// # Safety
/// `comp` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_new(
    comp: *const c_char,
    out: *mut *mut WlabSection,
) -> WlabStatus {
    guard(|| {
        if out.is_null() {
            return WlabStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let comp = match read_comp(comp) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let section = match build_section(&comp) {
            Ok(s) => s,
            Err(e) => return WlabStatus::from(&e),
        };
        let up = wlab::weyl::u_pi(&comp);
        let handle = WlabSection {
            e: sorted(section.e()),
            v: sorted(section.v()),
            excluded: sorted(up.excluded),
            comp,
            section,
        };
        *out = Box::into_raw(Box::new(handle));
        WlabStatus::Ok
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from [`wlab_section_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_free(h: *mut WlabSection) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Matrix size `n`; 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_size(h: *const WlabSection) -> usize {
    h.as_ref().map_or(0, |h| h.comp.n())
}

/// Number of neighbouring pairs, equal to the number of STAR lines.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_pair_count(h: *const WlabSection) -> usize {
    h.as_ref().map_or(0, |h| h.v.len())
}

/// Dimension of the nilradical.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_nilradical_dim(h: *const WlabSection) -> usize {
    h.as_ref()
        .map_or(0, |h| h.section.tableau().dim_nilradical())
}

unsafe fn support<'a>(h: *const WlabSection, which: WlabSupport) -> Option<&'a [Coord]> {
    let h = h.as_ref()?;
    Some(match which {
        WlabSupport::E => &h.e,
        WlabSupport::V => &h.v,
        WlabSupport::Excluded => &h.excluded,
    })
}

/// Number of coordinates in a support; 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_support_len(
    h: *const WlabSection,
    which: WlabSupport,
) -> usize {
    support(h, which).map_or(0, <[Coord]>::len)
}

/// The `index`-th coordinate of a support, in row-major order.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_support_get(
    h: *const WlabSection,
    which: WlabSupport,
    index: usize,
    out: *mut WlabCoord,
) -> WlabStatus {
    guard(|| {
        if out.is_null() {
            return WlabStatus::NullPointer;
        }
        let Some(s) = support(h, which) else {
            return WlabStatus::NullPointer;
        };
        match s.get(index) {
            Some(&(row, col)) => {
                *out = WlabCoord { row, col };
                WlabStatus::Ok
            }
            None => WlabStatus::OutOfRange,
        }
    })
}

/// Generic dimension of `B·u` over `samples` random points, and the value
/// it should equal (`dim m - g`).
///
/// # Safety
/// `h` must be a live handle; `out_dim` and `out_expected` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_saturation_dim(
    h: *const WlabSection,
    samples: usize,
    seed: u64,
    out_dim: *mut usize,
    out_expected: *mut usize,
) -> WlabStatus {
    guard(|| {
        let (Some(h), false, false) = (h.as_ref(), out_dim.is_null(), out_expected.is_null())
        else {
            return WlabStatus::NullPointer;
        };
        if samples == 0 {
            return WlabStatus::InvalidConfig;
        }
        match dim_b_saturation(&h.comp, samples, seed) {
            Ok(r) => {
                *out_dim = r.max;
                *out_expected = r.expected;
                WlabStatus::Ok
            }
            Err(e) => WlabStatus::from(&e),
        }
    })
}

/// Whether the closure of `B·u` is an orbital variety closure.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_is_orbital_closure(
    h: *const WlabSection,
    samples: usize,
    seed: u64,
    out: *mut bool,
) -> WlabStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return WlabStatus::NullPointer;
        };
        if samples == 0 {
            return WlabStatus::InvalidConfig;
        }
        match orbital_closure_test(&h.comp, samples, seed) {
            Ok(v) => {
                *out = v.is_orbital_variety_closure;
                WlabStatus::Ok
            }
            Err(e) => WlabStatus::from(&e),
        }
    })
}

/// Dense-orbit verdict for the augmented element.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wlab_section_verdict(
    h: *const WlabSection,
    samples: usize,
    seed: u64,
    out: *mut WlabVerdict,
) -> WlabStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return WlabStatus::NullPointer;
        };
        if samples == 0 {
            return WlabStatus::InvalidConfig;
        }
        match analyze_regularity(&h.comp, EvsPolicy::VerifiedBadOnly, samples, seed) {
            Ok(r) => {
                *out = match r.verdict {
                    Verdict::Regular => WlabVerdict::Regular,
                    Verdict::WeaklyRegularNoDenseOrbit => WlabVerdict::WeaklyRegularNoDenseOrbit,
                    Verdict::Inconclusive => WlabVerdict::Inconclusive,
                };
                WlabStatus::Ok
            }
            Err(e) => WlabStatus::from(&e),
        }
    })
}

/// Full analysis report as JSON, written to `*out` even when some property
/// check fails (status `PROPERTY_FAILURE`).
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer. Free the string
/// with [`wlab_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wlab_section_report_json(
    h: *const WlabSection,
    seed: u64,
    out: *mut *mut c_char,
) -> WlabStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return WlabStatus::NullPointer;
        };
        *out = ptr::null_mut();
        let cfg = SuiteConfig {
            seed,
            ..SuiteConfig::default()
        };
        match analyze(&h.comp, &cfg, EvsPolicy::VerifiedBadOnly) {
            Ok(a) => {
                let body = serde_json::to_string(&a.json).expect("report serializes");
                let status = give_string(body, out);
                if status != WlabStatus::Ok {
                    status
                } else if a.outcome.assertion {
                    WlabStatus::Assertion
                } else if !a.outcome.passed() {
                    WlabStatus::PropertyFailure
                } else {
                    WlabStatus::Ok
                }
            }
            Err(e) => WlabStatus::from(&e),
        }
    })
}

/// ASCII rendering of a composition's tableau or circled matrix.
///
/// # Safety
/// `comp` must be a NUL-terminated string and `out` a valid pointer. Free
/// the string with [`wlab_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wlab_render(
    comp: *const c_char,
    target: WlabRenderTarget,
    out: *mut *mut c_char,
) -> WlabStatus {
    guard(|| {
        if out.is_null() {
            return WlabStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let comp = match read_comp(comp) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let body = match target {
            WlabRenderTarget::Tableau => Tableau::new(&comp).render(),
            WlabRenderTarget::Matrix => match markings_of(&comp) {
                Ok(m) => m.render(),
                Err(e) => return WlabStatus::from(&e),
            },
        };
        give_string(body, out)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn wlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
