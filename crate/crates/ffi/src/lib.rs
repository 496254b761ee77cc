//! C ABI over `urysohn_core`.
//!
//! Every fallible call returns a [`UryStatus`] and writes its result through
//! an out-pointer. On failure the message is available from
//! [`ury_last_error`] on the same thread. Handles are opaque and owned by the
//! caller, who releases them with the matching `_free`. Strings returned
//! through `char **` are released with [`ury_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use urysohn_core::grey::{cone_subset, GreyCosetCode};
use urysohn_core::logic::text::{read_signature, read_structure};
use urysohn_core::logic::{eval, modulus, parse, Assignment, FinStructure, Formula, Signature};
use urysohn_core::metric::text::{prefix_to_string, read_constraints, read_prefix};
use urysohn_core::metric::{feasible, qu_extend, QUPrefix};
use urysohn_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UryStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Usage = 3,
    Parse = 4,
    Precondition = 5,
    Io = 6,
    Panic = 7,
}

impl From<&Error> for UryStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Usage(_) => UryStatus::Usage,
            Error::Parse { .. } => UryStatus::Parse,
            Error::Precondition(_) => UryStatus::Precondition,
            Error::Io(_) => UryStatus::Io,
        }
    }
}

/// Opaque prefix of the rational Urysohn space.
pub struct UryPrefix(QUPrefix);
/// Opaque relational signature.
pub struct UrySignature(Signature);
/// Opaque finite structure.
pub struct UryStructure(FinStructure);
/// Opaque parsed formula.
pub struct UryFormula(Formula);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(UryStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(UryStatus::from(&e), e.to_string())
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn guard(f: impl FnOnce() -> Res<()>) -> UryStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UryStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            UryStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Res<&'a str> {
    if p.is_null() {
        return Err(Fail(UryStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(UryStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Res<&'a T> {
    p.as_ref().ok_or_else(|| Fail(UryStatus::NullArgument, format!("{name} is null")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Res<()> {
    if out.is_null() {
        return Err(Fail(UryStatus::NullArgument, "out pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, v: T) -> Res<()> {
    if out.is_null() {
        return Err(Fail(UryStatus::NullArgument, "out pointer is null".into()));
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Res<()> {
    let c = CString::new(s).map_err(|_| Fail(UryStatus::Panic, "interior NUL".into()))?;
    if out.is_null() {
        return Err(Fail(UryStatus::NullArgument, "out pointer is null".into()));
    }
    out.write(c.into_raw());
    Ok(())
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ury_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ury_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the canonical prefix with `steps` points.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_prefix_build(steps: usize, out: *mut *mut UryPrefix) -> UryStatus {
    guard(|| put_box(out, UryPrefix(qu_extend(&QUPrefix::new(), steps))))
}

/// # Safety
/// `text` must be a NUL-terminated string, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_prefix_read(text: *const c_char, out: *mut *mut UryPrefix) -> UryStatus {
    guard(|| put_box(out, UryPrefix(read_prefix(str_arg(text, "text")?)?)))
}

/// # Safety
/// `p` must be a live prefix handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_prefix_to_string(p: *const UryPrefix, out: *mut *mut c_char) -> UryStatus {
    guard(|| put_string(out, prefix_to_string(&ref_arg(p, "prefix")?.0)))
}

/// # Safety
/// `p` must be a live prefix handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_prefix_len(p: *const UryPrefix, out: *mut usize) -> UryStatus {
    guard(|| put(out, ref_arg(p, "prefix")?.0.len()))
}

/// Writes the distance between points `a` and `b` as `"n/d"`.
///
/// # Safety
/// `p` must be a live prefix handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_prefix_dist(p: *const UryPrefix, a: usize, b: usize, out: *mut *mut c_char) -> UryStatus {
    guard(|| {
        let p = &ref_arg(p, "prefix")?.0;
        if a >= p.len() || b >= p.len() {
            return Err(Error::precondition(format!("points {a}, {b} not in a prefix of {}", p.len())).into());
        }
        put_string(out, p.d(a, b).to_string())
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ury_prefix_free(p: *mut UryPrefix) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_signature_read(text: *const c_char, out: *mut *mut UrySignature) -> UryStatus {
    guard(|| put_box(out, UrySignature(read_signature(str_arg(text, "text")?)?)))
}

/// # Safety
/// `s` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ury_signature_free(s: *mut UrySignature) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_structure_read(text: *const c_char, out: *mut *mut UryStructure) -> UryStatus {
    guard(|| put_box(out, UryStructure(read_structure(str_arg(text, "text")?)?)))
}

/// # Safety
/// `m` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ury_structure_free(m: *mut UryStructure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string, `sig` a live handle, `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_formula_parse(
    text: *const c_char,
    sig: *const UrySignature,
    out: *mut *mut UryFormula,
) -> UryStatus {
    guard(|| {
        let f = parse(str_arg(text, "text")?, &ref_arg(sig, "signature")?.0)?;
        put_box(out, UryFormula(f))
    })
}

/// Normal form of a formula.
///
/// # Safety
/// `f` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_formula_to_string(f: *const UryFormula, out: *mut *mut c_char) -> UryStatus {
    guard(|| put_string(out, ref_arg(f, "formula")?.0.to_string()))
}

/// Uniform continuity modulus of a formula, as `"n/d"`.
///
/// # Safety
/// `f` and `sig` must be live handles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_formula_modulus(
    f: *const UryFormula,
    sig: *const UrySignature,
    out: *mut *mut c_char,
) -> UryStatus {
    guard(|| {
        let q = modulus(&ref_arg(f, "formula")?.0, &ref_arg(sig, "signature")?.0)?;
        put_string(out, q.to_string())
    })
}

/// # Safety
/// `f` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ury_formula_free(f: *mut UryFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

fn parse_assignment(s: &str) -> Res<Assignment> {
    let mut asg = Assignment::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Fail(UryStatus::Usage, format!("bad binding `{part}`, want name=point"));
        let (name, id) = part.split_once('=').ok_or_else(bad)?;
        asg.insert(name.trim().to_owned(), id.trim().parse().map_err(|_| bad())?);
    }
    Ok(asg)
}

/// Evaluates `f` in `m`. `assign` lists bindings as `"x=0,y=3"`; null or
/// empty binds nothing. The value is written as `"n/d"`.
///
/// # Safety
/// `m` and `f` must be live handles, `assign` null or NUL-terminated, `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_eval(
    m: *const UryStructure,
    f: *const UryFormula,
    assign: *const c_char,
    out: *mut *mut c_char,
) -> UryStatus {
    guard(|| {
        let asg = if assign.is_null() { Assignment::new() } else { parse_assignment(str_arg(assign, "assign")?)? };
        let v = eval(&ref_arg(m, "structure")?.0, &ref_arg(f, "formula")?.0, &asg)?;
        put_string(out, v.to_string())
    })
}

/// Decides whether a constraint file admits a metric. Writes 1 or 0.
///
/// # Safety
/// `text` must be NUL-terminated, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ury_feasible(text: *const c_char, out: *mut i32) -> UryStatus {
    guard(|| {
        let c = read_constraints(str_arg(text, "text")?)?;
        put(out, feasible(&c)?.is_feasible() as i32)
    })
}

/// Decides inclusion of the grey cones given by two `gcone` lines, over the
/// prefix `p`. Writes 1 or 0.
///
/// # Safety
/// `p` must be a live handle, `c1` and `c2` NUL-terminated, `out` valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn ury_cone_subset(
    p: *const UryPrefix,
    c1: *const c_char,
    c2: *const c_char,
    out: *mut i32,
) -> UryStatus {
    guard(|| {
        let space = ref_arg(p, "prefix")?.0.space();
        let a: GreyCosetCode = str_arg(c1, "c1")?.parse()?;
        let b: GreyCosetCode = str_arg(c2, "c2")?.parse()?;
        put(out, cone_subset(&a, &b, space)? as i32)
    })
}
