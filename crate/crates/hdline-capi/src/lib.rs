//! C ABI for the `hdline` library.
//!
//! Every function follows the same conventions:
//!
//! * Fallible calls return an [`HdlStatus`]; `Ok` is zero. On failure a
//!   human-readable description is stored per thread and can be fetched
//!   with [`hdl_last_error_message`].
//! * Objects are returned as opaque pointers and released with the
//!   matching `*_free` function. Strings returned through out-parameters
//!   are NUL-terminated, heap-allocated, and released with
//!   [`hdl_string_free`].
//! * Numeric results are exact rationals rendered as `"p/q"`, `"p"`, or
//!   `"inf"`, never floating point.
//!
//! The header `include/hdline.h` is generated from this file by the
//! build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hdline::scheduler::{build_pipeline, SchedulePipeline};
use hdline::verify::certify_schedule_optimal;
use hdline::{line, Error, ExtRational, LineNetwork};

/// Status code of a C ABI call. `Ok` is zero; the nonzero codes mirror the
/// library's error variants one-to-one, followed by two codes for problems
/// that can only arise at the language boundary.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdlStatus {
    Ok = 0,
    EmptyNetwork = 1,
    NoRelay = 2,
    ZeroCapacity = 3,
    UnsupportedCapacity = 4,
    InvalidGain = 5,
    ResolutionTooCoarse = 6,
    LimitExceeded = 7,
    InvalidSchedule = 8,
    IndexOutOfRange = 9,
    NegativeValue = 10,
    Parse = 11,
    WitnessNotApplicable = 12,
    Graph = 13,
    Formula = 14,
    Internal = 15,
    /// A required pointer argument was NULL.
    NullArgument = 16,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 17,
}

fn status_of(e: &Error) -> HdlStatus {
    // Exhaustive on purpose: adding a library error variant must not
    // compile until it is given a status code.
    match e {
        Error::EmptyNetwork => HdlStatus::EmptyNetwork,
        Error::NoRelay { .. } => HdlStatus::NoRelay,
        Error::ZeroCapacity { .. } => HdlStatus::ZeroCapacity,
        Error::UnsupportedCapacity { .. } => HdlStatus::UnsupportedCapacity,
        Error::InvalidGain { .. } => HdlStatus::InvalidGain,
        Error::ResolutionTooCoarse { .. } => HdlStatus::ResolutionTooCoarse,
        Error::LimitExceeded { .. } => HdlStatus::LimitExceeded,
        Error::InvalidSchedule(_) => HdlStatus::InvalidSchedule,
        Error::IndexOutOfRange { .. } => HdlStatus::IndexOutOfRange,
        Error::NegativeValue(_) => HdlStatus::NegativeValue,
        Error::Parse(_) => HdlStatus::Parse,
        Error::WitnessNotApplicable => HdlStatus::WitnessNotApplicable,
        Error::Graph(_) => HdlStatus::Graph,
        Error::Formula(_) => HdlStatus::Formula,
        Error::Internal(_) => HdlStatus::Internal,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: HdlStatus, message: String) -> HdlStatus {
    let text = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
    status
}

fn pass() -> HdlStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    HdlStatus::Ok
}

fn lib_error(e: Error) -> HdlStatus {
    fail(status_of(&e), e.to_string())
}

fn null_argument(name: &str) -> HdlStatus {
    fail(HdlStatus::NullArgument, format!("argument {name} is NULL"))
}

/// Converts a panic into `Internal` instead of aborting the caller.
fn guard(f: impl FnOnce() -> HdlStatus) -> HdlStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        fail(
            HdlStatus::Internal,
            "caught a panic at the language boundary".into(),
        )
    })
}

/// Writes `value` through `out` as a freshly allocated NUL-terminated
/// string. The caller owns it and must release it with `hdl_string_free`.
unsafe fn emit_string(out: *mut *mut c_char, value: String) -> HdlStatus {
    match CString::new(value) {
        Ok(text) => {
            *out = text.into_raw();
            pass()
        }
        Err(_) => fail(
            HdlStatus::Internal,
            "result contained an interior NUL byte".into(),
        ),
    }
}

unsafe fn parse_utf8<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, HdlStatus> {
    match CStr::from_ptr(ptr).to_str() {
        Ok(text) => Ok(text),
        Err(_) => Err(fail(
            HdlStatus::InvalidUtf8,
            format!("argument {name} is not valid UTF-8"),
        )),
    }
}

/// Opaque handle to a line network.
pub struct HdlNetwork(LineNetwork);

/// Opaque handle to a built schedule together with its color structure.
pub struct HdlSchedule(SchedulePipeline);

/// Returns the most recent error message of the calling thread, or NULL if
/// the last call succeeded. The caller owns the returned string and must
/// release it with `hdl_string_free`.
#[no_mangle]
pub extern "C" fn hdl_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(text) => text.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
///
/// `s` must be NULL or a pointer obtained from this library that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn hdl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a comma-separated list of link capacities such as
/// `"2,2,3,1"`, `"9/2,7,3/5"`, or `"1,inf,2"` into a network handle.
///
/// # Safety
///
/// `links` must point to a NUL-terminated string and `out` must be a valid
/// location to store the handle.
#[no_mangle]
pub unsafe extern "C" fn hdl_network_parse(
    links: *const c_char,
    out: *mut *mut HdlNetwork,
) -> HdlStatus {
    guard(|| {
        if links.is_null() {
            return null_argument("links");
        }
        if out.is_null() {
            return null_argument("out");
        }
        let text = match parse_utf8(links, "links") {
            Ok(text) => text,
            Err(status) => return status,
        };
        match LineNetwork::parse_links(text) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(HdlNetwork(net)));
                pass()
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Builds a network from an array of positive integer link capacities.
///
/// # Safety
///
/// `capacities` must point to `len` readable values and `out` must be a
/// valid location to store the handle.
#[no_mangle]
pub unsafe extern "C" fn hdl_network_from_integers(
    capacities: *const u64,
    len: usize,
    out: *mut *mut HdlNetwork,
) -> HdlStatus {
    guard(|| {
        if capacities.is_null() {
            return null_argument("capacities");
        }
        if out.is_null() {
            return null_argument("out");
        }
        let caps = std::slice::from_raw_parts(capacities, len);
        match LineNetwork::from_integers(caps) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(HdlNetwork(net)));
                pass()
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Number of relays in the network (one less than the number of links).
///
/// # Safety
///
/// `net` must be a live handle from `hdl_network_parse` or
/// `hdl_network_from_integers`.
#[no_mangle]
pub unsafe extern "C" fn hdl_network_relay_count(net: *const HdlNetwork) -> usize {
    if net.is_null() {
        return 0;
    }
    (*net).0.relay_count()
}

/// Releases a network handle. NULL is ignored.
///
/// # Safety
///
/// `net` must be NULL or a live handle that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn hdl_network_free(net: *mut HdlNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Computes the end-to-end capacity of the network under the half-duplex
/// constraint and writes it through `out` as an exact rational string.
///
/// # Safety
///
/// `net` must be a live network handle and `out` a valid location to store
/// the string.
#[no_mangle]
pub unsafe extern "C" fn hdl_capacity(
    net: *const HdlNetwork,
    out: *mut *mut c_char,
) -> HdlStatus {
    guard(|| {
        if net.is_null() {
            return null_argument("net");
        }
        if out.is_null() {
            return null_argument("out");
        }
        emit_string(out, line::closed_form_capacity(&(*net).0).to_string())
    })
}

/// Builds a simple capacity-achieving schedule for the network.
///
/// # Safety
///
/// `net` must be a live network handle and `out` a valid location to store
/// the handle.
#[no_mangle]
pub unsafe extern "C" fn hdl_schedule_build(
    net: *const HdlNetwork,
    out: *mut *mut HdlSchedule,
) -> HdlStatus {
    guard(|| {
        if net.is_null() {
            return null_argument("net");
        }
        if out.is_null() {
            return null_argument("out");
        }
        match build_pipeline(&(*net).0) {
            Ok(pipeline) => {
                *out = Box::into_raw(Box::new(HdlSchedule(pipeline)));
                pass()
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Writes the rate of the schedule through `out` as an exact rational
/// string. The rate equals the network capacity by construction.
///
/// # Safety
///
/// `sched` must be a live schedule handle and `out` a valid location to
/// store the string.
#[no_mangle]
pub unsafe extern "C" fn hdl_schedule_rate(
    sched: *const HdlSchedule,
    out: *mut *mut c_char,
) -> HdlStatus {
    guard(|| {
        if sched.is_null() {
            return null_argument("sched");
        }
        if out.is_null() {
            return null_argument("out");
        }
        emit_string(out, (*sched).0.rate.to_string())
    })
}

/// Number of distinct states in the schedule. Always at most the number of
/// relays plus one.
///
/// # Safety
///
/// `sched` must be a live schedule handle.
#[no_mangle]
pub unsafe extern "C" fn hdl_schedule_len(sched: *const HdlSchedule) -> usize {
    if sched.is_null() {
        return 0;
    }
    (*sched).0.schedule.len()
}

/// Serializes the schedule as JSON: each entry carries the relay state
/// bitstring, the exact time fraction, and the color interval it was
/// grouped from.
///
/// # Safety
///
/// `sched` must be a live schedule handle and `out` a valid location to
/// store the string.
#[no_mangle]
pub unsafe extern "C" fn hdl_schedule_json(
    sched: *const HdlSchedule,
    out: *mut *mut c_char,
) -> HdlStatus {
    guard(|| {
        if sched.is_null() {
            return null_argument("sched");
        }
        if out.is_null() {
            return null_argument("out");
        }
        match serde_json::to_string(&(*sched).0.grouped) {
            Ok(text) => emit_string(out, text),
            Err(e) => fail(HdlStatus::Internal, e.to_string()),
        }
    })
}

/// Releases a schedule handle. NULL is ignored.
///
/// # Safety
///
/// `sched` must be NULL or a live handle that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn hdl_schedule_free(sched: *mut HdlSchedule) {
    if !sched.is_null() {
        drop(Box::from_raw(sched));
    }
}

/// Builds a schedule for the network, checks it against every fundamental
/// cut, and writes the certificate through `out` as JSON with fields
/// `rate`, `bound`, `optimal`, and `bottleneck`.
///
/// # Safety
///
/// `net` must be a live network handle and `out` a valid location to store
/// the string.
#[no_mangle]
pub unsafe extern "C" fn hdl_certify_json(
    net: *const HdlNetwork,
    out: *mut *mut c_char,
) -> HdlStatus {
    guard(|| {
        if net.is_null() {
            return null_argument("net");
        }
        if out.is_null() {
            return null_argument("out");
        }
        let network = &(*net).0;
        let certificate = match build_pipeline(network)
            .and_then(|p| certify_schedule_optimal(&p.schedule, network))
        {
            Ok(cert) => cert,
            Err(e) => return lib_error(e),
        };
        match serde_json::to_string(&certificate) {
            Ok(text) => emit_string(out, text),
            Err(e) => fail(HdlStatus::Internal, e.to_string()),
        }
    })
}

/// Parses a capacity string such as `"3/4"` or `"inf"` and writes its
/// canonical form back through `out`; a cheap way for bindings to validate
/// and normalize rational inputs.
///
/// # Safety
///
/// `value` must point to a NUL-terminated string and `out` must be a valid
/// location to store the string.
#[no_mangle]
pub unsafe extern "C" fn hdl_rational_normalize(
    value: *const c_char,
    out: *mut *mut c_char,
) -> HdlStatus {
    guard(|| {
        if value.is_null() {
            return null_argument("value");
        }
        if out.is_null() {
            return null_argument("out");
        }
        let text = match parse_utf8(value, "value") {
            Ok(text) => text,
            Err(status) => return status,
        };
        match text.parse::<ExtRational>() {
            Ok(r) => emit_string(out, r.to_string()),
            Err(e) => lib_error(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn parse(links: &str) -> *mut HdlNetwork {
        let text = CString::new(links).unwrap();
        let mut net = ptr::null_mut();
        assert_eq!(hdl_network_parse(text.as_ptr(), &mut net), HdlStatus::Ok);
        assert!(!net.is_null());
        net
    }

    unsafe fn take_string(s: *mut c_char) -> String {
        assert!(!s.is_null());
        let text = CStr::from_ptr(s).to_str().unwrap().to_string();
        hdl_string_free(s);
        text
    }

    #[test]
    fn capacity_of_the_worked_example() {
        unsafe {
            let net = parse("2,2,3,1");
            assert_eq!(hdl_network_relay_count(net), 3);
            let mut cap = ptr::null_mut();
            assert_eq!(hdl_capacity(net, &mut cap), HdlStatus::Ok);
            assert_eq!(take_string(cap), "3/4");
            hdl_network_free(net);
        }
    }

    #[test]
    fn networks_from_integer_arrays() {
        unsafe {
            let caps = [4u64, 4, 2];
            let mut net = ptr::null_mut();
            assert_eq!(
                hdl_network_from_integers(caps.as_ptr(), caps.len(), &mut net),
                HdlStatus::Ok
            );
            let mut cap = ptr::null_mut();
            assert_eq!(hdl_capacity(net, &mut cap), HdlStatus::Ok);
            assert_eq!(take_string(cap), "4/3");
            hdl_network_free(net);
        }
    }

    #[test]
    fn schedule_handle_reports_rate_len_and_json() {
        unsafe {
            let net = parse("2,2,3,1");
            let mut sched = ptr::null_mut();
            assert_eq!(hdl_schedule_build(net, &mut sched), HdlStatus::Ok);
            assert_eq!(hdl_schedule_len(sched), 4);

            let mut rate = ptr::null_mut();
            assert_eq!(hdl_schedule_rate(sched, &mut rate), HdlStatus::Ok);
            assert_eq!(take_string(rate), "3/4");

            let mut json = ptr::null_mut();
            assert_eq!(hdl_schedule_json(sched, &mut json), HdlStatus::Ok);
            assert_eq!(
                take_string(json),
                concat!(
                    r#"{"states":[{"s":"010","w":"1/4","colors":[7,8]},"#,
                    r#"{"s":"001","w":"1/8","colors":[6,6]},{"s":"111","w":"1/4","colors":[4,5]},"#,
                    r#"{"s":"101","w":"3/8","colors":[1,3]}]}"#
                )
            );

            hdl_schedule_free(sched);
            hdl_network_free(net);
        }
    }

    #[test]
    fn certificates_match_the_library_serialization() {
        unsafe {
            let net = parse("2,2,3,1");
            let mut json = ptr::null_mut();
            assert_eq!(hdl_certify_json(net, &mut json), HdlStatus::Ok);
            assert_eq!(
                take_string(json),
                r#"{"rate":"3/4","bound":"3/4","optimal":true,"bottleneck":3}"#
            );
            hdl_network_free(net);
        }
    }

    #[test]
    fn library_errors_keep_their_status_codes() {
        unsafe {
            let text = CString::new("2,0,1").unwrap();
            let mut net = ptr::null_mut();
            assert_eq!(
                hdl_network_parse(text.as_ptr(), &mut net),
                HdlStatus::ZeroCapacity
            );
            let message = take_string(hdl_last_error_message());
            assert!(message.contains("zero capacity"), "message was {message:?}");

            let text = CString::new("banana").unwrap();
            assert_eq!(hdl_network_parse(text.as_ptr(), &mut net), HdlStatus::Parse);

            let text = CString::new("5").unwrap();
            assert_eq!(
                hdl_network_parse(text.as_ptr(), &mut net),
                HdlStatus::NoRelay
            );
            let message = take_string(hdl_last_error_message());
            assert!(message.contains('5'), "message was {message:?}");
        }
    }

    #[test]
    fn success_clears_the_error_slot() {
        unsafe {
            let text = CString::new("nonsense").unwrap();
            let mut net = ptr::null_mut();
            assert_eq!(hdl_network_parse(text.as_ptr(), &mut net), HdlStatus::Parse);
            assert!(!hdl_last_error_message().is_null());

            let net = parse("1,2");
            assert!(hdl_last_error_message().is_null());
            hdl_network_free(net);
        }
    }

    #[test]
    fn null_arguments_are_rejected_not_dereferenced() {
        unsafe {
            let mut net = ptr::null_mut();
            assert_eq!(
                hdl_network_parse(ptr::null(), &mut net),
                HdlStatus::NullArgument
            );
            let text = CString::new("1,2").unwrap();
            assert_eq!(
                hdl_network_parse(text.as_ptr(), ptr::null_mut()),
                HdlStatus::NullArgument
            );
            let mut out = ptr::null_mut();
            assert_eq!(hdl_capacity(ptr::null(), &mut out), HdlStatus::NullArgument);
            assert_eq!(hdl_schedule_len(ptr::null()), 0);
            assert_eq!(hdl_network_relay_count(ptr::null()), 0);
        }
    }

    #[test]
    fn frees_ignore_null() {
        unsafe {
            hdl_network_free(ptr::null_mut());
            hdl_schedule_free(ptr::null_mut());
            hdl_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn invalid_utf8_is_its_own_status() {
        unsafe {
            let bytes = [0xffu8, 0xfe, 0x00];
            let mut net = ptr::null_mut();
            assert_eq!(
                hdl_network_parse(bytes.as_ptr().cast(), &mut net),
                HdlStatus::InvalidUtf8
            );
        }
    }

    #[test]
    fn rational_normalization_round_trips() {
        unsafe {
            for (input, expected) in [("6/8", "3/4"), ("12/4", "3"), ("inf", "inf")] {
                let text = CString::new(input).unwrap();
                let mut out = ptr::null_mut();
                assert_eq!(
                    hdl_rational_normalize(text.as_ptr(), &mut out),
                    HdlStatus::Ok
                );
                assert_eq!(take_string(out), expected);
            }
        }
    }
}
