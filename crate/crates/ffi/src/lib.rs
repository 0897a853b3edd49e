//! C ABI for the tubular library: opaque handles, status codes, and
//! malloc-style ownership with explicit free functions.
//!
//! Every fallible function returns a [`TubularStatus`]; on failure the
//! thread-local message retrieved by [`tubular_last_error`] describes what
//! went wrong. Strings returned through out-parameters are owned by the
//! caller and must be released with [`tubular_string_free`]; handles with
//! their respective `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use tubular::farey::{FareyTriple, Rat};
use tubular::growth::growth_certificate;
use tubular::templates::TubularType;
use tubular::tilting::{canonical_config, realize_base, TiltingConfig};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum TubularStatus {
    Ok = 0,
    /// A domain error: invalid weights, vertex, triple or mutation.
    Invalid = 1,
    /// A null pointer or malformed UTF-8/JSON input.
    BadInput = 2,
}

/// Opaque Farey triple handle.
pub struct TubularTriple(FareyTriple);

/// Opaque tilting configuration handle.
pub struct TubularConfig(TiltingConfig);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl std::fmt::Display) -> TubularStatus {
    let text = CString::new(msg.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
    TubularStatus::Invalid
}

fn bad_input(msg: &str) -> TubularStatus {
    set_error(msg);
    TubularStatus::BadInput
}

/// Copies the message of the most recent error on this thread into `buf`
/// (NUL-terminated, truncated to `cap`); returns the full message length.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (then only the
/// length is reported).
#[no_mangle]
pub unsafe extern "C" fn tubular_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            // Always terminate.
            *buf.add(n - 1) = 0;
        }
        bytes.len() - 1
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn tubular_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-parameter of
/// this library, or null.
#[no_mangle]
pub unsafe extern "C" fn tubular_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, TubularStatus> {
    if ptr.is_null() {
        return Err(bad_input("null string"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| bad_input("string is not valid UTF-8"))
}

unsafe fn read_weights(ptr: *const u32, len: usize) -> Result<Vec<u32>, TubularStatus> {
    if ptr.is_null() {
        return Err(bad_input("null weights"));
    }
    Ok(std::slice::from_raw_parts(ptr, len).to_vec())
}

fn give_string(text: String, out: *mut *mut c_char) -> TubularStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            TubularStatus::Ok
        }
        Err(_) => bad_input("interior NUL in output"),
    }
}

/// Parses a triple like `"0/1,1/1,1/0"`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tubular_triple_parse(
    text: *const c_char,
    out: *mut *mut TubularTriple,
) -> TubularStatus {
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match text.parse::<FareyTriple>() {
        Ok(t) => {
            *out = Box::into_raw(Box::new(TubularTriple(t)));
            TubularStatus::Ok
        }
        Err(e) => set_error(e),
    }
}

/// Mutates a triple at the element written in `at` (e.g. `"1/1"`).
///
/// # Safety
/// `triple` must be a live handle, `at` a NUL-terminated string, `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tubular_triple_mutate(
    triple: *const TubularTriple,
    at: *const c_char,
    out: *mut *mut TubularTriple,
) -> TubularStatus {
    let Some(t) = triple.as_ref() else {
        return bad_input("null triple");
    };
    let at = match read_str(at) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let p: Rat = match at.parse() {
        Ok(p) => p,
        Err(e) => return set_error(e),
    };
    match t.0.mutate(&p) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(TubularTriple(m)));
            TubularStatus::Ok
        }
        Err(e) => set_error(e),
    }
}

/// Formats a triple as `"a/b,c/d,e/f"` in ascending order.
///
/// # Safety
/// `triple` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tubular_triple_format(
    triple: *const TubularTriple,
    out: *mut *mut c_char,
) -> TubularStatus {
    let Some(t) = triple.as_ref() else {
        return bad_input("null triple");
    };
    give_string(t.0.to_string(), out)
}

/// # Safety
/// `triple` must be a handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn tubular_triple_free(triple: *mut TubularTriple) {
    if !triple.is_null() {
        drop(Box::from_raw(triple));
    }
}

/// Builds the canonical configuration of a weight sequence.
///
/// # Safety
/// `weights` must point to `len` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_canonical(
    weights: *const u32,
    len: usize,
    out: *mut *mut TubularConfig,
) -> TubularStatus {
    let w = match read_weights(weights, len) {
        Ok(w) => w,
        Err(s) => return s,
    };
    match canonical_config(&w) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(TubularConfig(c)));
            TubularStatus::Ok
        }
        Err(e) => set_error(e),
    }
}

/// Builds the base realization of `{0, 1, ∞}` for a tubular weight
/// sequence.
///
/// # Safety
/// `weights` must point to `len` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_realize_base(
    weights: *const u32,
    len: usize,
    out: *mut *mut TubularConfig,
) -> TubularStatus {
    let w = match read_weights(weights, len) {
        Ok(w) => w,
        Err(s) => return s,
    };
    match realize_base(&w) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(TubularConfig(c)));
            TubularStatus::Ok
        }
        Err(e) => set_error(e),
    }
}

/// Parses a configuration from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_from_json(
    json: *const c_char,
    out: *mut *mut TubularConfig,
) -> TubularStatus {
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match serde_json::from_str::<TiltingConfig>(text) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(TubularConfig(c)));
            TubularStatus::Ok
        }
        Err(e) => set_error(e),
    }
}

/// Serializes a configuration to JSON.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_to_json(
    config: *const TubularConfig,
    out: *mut *mut c_char,
) -> TubularStatus {
    let Some(c) = config.as_ref() else {
        return bad_input("null config");
    };
    match serde_json::to_string(&c.0) {
        Ok(s) => give_string(s, out),
        Err(e) => set_error(e),
    }
}

/// Renders a configuration as DOT.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_to_dot(
    config: *const TubularConfig,
    out: *mut *mut c_char,
) -> TubularStatus {
    let Some(c) = config.as_ref() else {
        return bad_input("null config");
    };
    give_string(c.0.to_dot(), out)
}

/// Number of vertices of a configuration, or 0 for null.
///
/// # Safety
/// `config` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_len(config: *const TubularConfig) -> usize {
    config.as_ref().map_or(0, |c| c.0.n())
}

/// Mutates a configuration at a zero-based vertex.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_mutate(
    config: *const TubularConfig,
    vertex: usize,
    out: *mut *mut TubularConfig,
) -> TubularStatus {
    let Some(c) = config.as_ref() else {
        return bad_input("null config");
    };
    match c.0.mutate(vertex) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(TubularConfig(m)));
            TubularStatus::Ok
        }
        Err(e) => set_error(e),
    }
}

/// Writes the sorted distinct slopes as a string like `"0/1,1/1,1/0"`.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_slope_set(
    config: *const TubularConfig,
    out: *mut *mut c_char,
) -> TubularStatus {
    let Some(c) = config.as_ref() else {
        return bad_input("null config");
    };
    match c.0.slope_set() {
        Ok(set) => {
            let text = set
                .into_iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(",");
            give_string(text, out)
        }
        Err(e) => set_error(e),
    }
}

/// Returns 1 when the rank function is additive over the quiver with
/// relations, 0 when it is not, and -1 for a null handle.
///
/// # Safety
/// `config` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_rank_additive(config: *const TubularConfig) -> i32 {
    match config.as_ref() {
        Some(c) => c.0.rank_additivity_holds() as i32,
        None => -1,
    }
}

/// # Safety
/// `config` must be a handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn tubular_config_free(config: *mut TubularConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the full growth certificate for a tubular weight sequence and
/// returns it as JSON lines (one record per tree node plus a summary).
///
/// # Safety
/// `weights` must point to `len` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tubular_growth_certificate(
    weights: *const u32,
    len: usize,
    depth: u32,
    out: *mut *mut c_char,
) -> TubularStatus {
    let w = match read_weights(weights, len) {
        Ok(w) => w,
        Err(s) => return s,
    };
    let kind = match TubularType::from_weights(&w) {
        Ok(k) => k,
        Err(e) => return set_error(e),
    };
    if depth == 0 {
        return set_error("certificate depth must be at least 1");
    }
    match growth_certificate(kind, depth) {
        Ok(cert) => give_string(cert.to_json_lines(), out),
        Err(e) => set_error(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take_string(p: *mut c_char) -> String {
        let s = CStr::from_ptr(p).to_str().unwrap().to_string();
        tubular_string_free(p);
        s
    }

    #[test]
    fn triple_round_trip_over_the_c_abi() {
        unsafe {
            let mut t = ptr::null_mut();
            let st = tubular_triple_parse(cstr("0/1,1/1,1/0").as_ptr(), &mut t);
            assert!(st == TubularStatus::Ok);
            let mut m = ptr::null_mut();
            let st = tubular_triple_mutate(t, cstr("1/0").as_ptr(), &mut m);
            assert!(st == TubularStatus::Ok);
            let mut s = ptr::null_mut();
            assert!(tubular_triple_format(m, &mut s) == TubularStatus::Ok);
            assert_eq!(take_string(s), "0/1,1/2,1/1");
            tubular_triple_free(t);
            tubular_triple_free(m);
        }
    }

    #[test]
    fn errors_set_the_message() {
        unsafe {
            let mut t = ptr::null_mut();
            let st = tubular_triple_parse(cstr("0/1,1/1,2/1").as_ptr(), &mut t);
            assert!(st == TubularStatus::Invalid);
            let mut buf = [0i8; 128];
            let len = tubular_last_error(buf.as_mut_ptr(), buf.len());
            assert!(len > 0);
            let msg = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
            assert!(msg.contains("Farey"), "{msg}");
        }
    }

    #[test]
    fn config_lifecycle_over_the_c_abi() {
        unsafe {
            let weights = [2u32, 2, 2, 2];
            let mut c = ptr::null_mut();
            let st = tubular_config_realize_base(weights.as_ptr(), 4, &mut c);
            assert!(st == TubularStatus::Ok);
            assert_eq!(tubular_config_len(c), 6);
            assert_eq!(tubular_config_rank_additive(c), 1);

            let mut slopes = ptr::null_mut();
            assert!(tubular_config_slope_set(c, &mut slopes) == TubularStatus::Ok);
            assert_eq!(take_string(slopes), "0/1,1/1,1/0");

            let mut json = ptr::null_mut();
            assert!(tubular_config_to_json(c, &mut json) == TubularStatus::Ok);
            let text = take_string(json);
            let mut back = ptr::null_mut();
            let st = tubular_config_from_json(cstr(&text).as_ptr(), &mut back);
            assert!(st == TubularStatus::Ok);

            let mut m = ptr::null_mut();
            assert!(tubular_config_mutate(back, 0, &mut m) == TubularStatus::Ok);
            let mut mm = ptr::null_mut();
            assert!(tubular_config_mutate(m, 0, &mut mm) == TubularStatus::Ok);
            let mut json2 = ptr::null_mut();
            assert!(tubular_config_to_json(mm, &mut json2) == TubularStatus::Ok);
            assert_eq!(take_string(json2), text);

            for h in [c, back, m, mm] {
                tubular_config_free(h);
            }
        }
    }

    #[test]
    fn growth_certificate_over_the_c_abi() {
        unsafe {
            let weights = [3u32, 3, 3];
            let mut s = ptr::null_mut();
            let st = tubular_growth_certificate(weights.as_ptr(), 3, 3, &mut s);
            assert!(st == TubularStatus::Ok);
            let text = take_string(s);
            assert_eq!(text.lines().count(), 22);
            assert!(text.lines().last().unwrap().contains("\"distinct\":21"));
        }
    }
}
