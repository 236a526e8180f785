//! C interface to `unfoeq`. Signatures, formulas and structures are opaque
//! handles owned by the caller and released with the matching `_free`
//! function. Every entry point returns an [`UnfoeqStatus`]; on failure the
//! message is available from [`unfoeq_last_error`] on the same thread.
//! Strings returned through out-parameters are freed with
//! [`unfoeq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::rc::Rc;

use unfoeq::bounds::{size_bound_m_capped, size_bound_t_capped};
use unfoeq::construct_nd::{build_with, regularize, target_depth, verify_d_conditions, NdPattern, TreeNode};
use unfoeq::logic::{parse_formula, to_normal_form, validate_fragment};
use unfoeq::modelfinder::{find_model, SearchBudget};
use unfoeq::semantics::check_model;
use unfoeq::structures::load_structure;
use unfoeq::{Error, FiniteStructure, Formula, NormalFormFormula, Signature};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnfoeqStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not UTF-8.
    Utf8 = 2,
    /// Syntax, arity, symbol or file-format error in the input text.
    Format = 3,
    /// The formula is outside the unary negation fragment.
    Fragment = 4,
    /// Well-formed input that the operation rejects (for instance a pattern
    /// that is not a model).
    Invalid = 5,
    /// A search or size budget ran out.
    Budget = 6,
    /// Internal error; the library state is unchanged.
    Panic = 7,
}

/// Parsed signature.
pub struct UnfoeqSignature(Signature);

/// A sentence together with its normal form.
pub struct UnfoeqFormula {
    formula: Formula,
    sig: Signature,
    nf: NormalFormFormula,
}

/// Finite structure.
pub struct UnfoeqStructure(FiniteStructure);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> UnfoeqStatus {
    match e {
        Error::BudgetExhausted => UnfoeqStatus::Budget,
        Error::Fragment(_) => UnfoeqStatus::Fragment,
        Error::Invalid(_) | Error::NotEquivalence { .. } | Error::Element(_) | Error::Unassigned(_) => {
            UnfoeqStatus::Invalid
        }
        _ => UnfoeqStatus::Format,
    }
}

type Outcome = std::result::Result<(), UnfoeqStatus>;

fn fail(status: UnfoeqStatus, msg: impl Into<String>) -> UnfoeqStatus {
    set_error(msg.into());
    status
}

fn lib<T>(r: unfoeq::Result<T>) -> std::result::Result<T, UnfoeqStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

/// Runs `f`, turning panics into [`UnfoeqStatus::Panic`].
fn guard(f: impl FnOnce() -> Outcome) -> UnfoeqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UnfoeqStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            fail(UnfoeqStatus::Panic, msg)
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> std::result::Result<&'a str, UnfoeqStatus> {
    if p.is_null() {
        return Err(fail(UnfoeqStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(UnfoeqStatus::Utf8, "string is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> std::result::Result<&'a T, UnfoeqStatus> {
    p.as_ref().ok_or_else(|| fail(UnfoeqStatus::NullPointer, "null handle"))
}

unsafe fn out<T>(p: *mut T, v: T) -> Outcome {
    if p.is_null() {
        return Err(fail(UnfoeqStatus::NullPointer, "null out-parameter"));
    }
    p.write(v);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn unfoeq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a signature header (`base NAME ARITY` / `eq NAME` per line).
///
/// # Safety
/// `src` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_signature_parse(src: *const c_char, out_sig: *mut *mut UnfoeqSignature) -> UnfoeqStatus {
    guard(|| {
        let sig = lib(Signature::parse(text(src)?))?;
        out(out_sig, boxed(UnfoeqSignature(sig)))
    })
}

/// # Safety
/// `sig` must be null or a live handle from [`unfoeq_signature_parse`].
#[no_mangle]
pub unsafe extern "C" fn unfoeq_signature_free(sig: *mut UnfoeqSignature) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

/// Parses a sentence over `sig`, checks that it is in the unary negation
/// fragment and normalizes it.
///
/// # Safety
/// `src` must be a nul-terminated string, `sig` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_formula_parse(
    src: *const c_char,
    sig: *const UnfoeqSignature,
    out_formula: *mut *mut UnfoeqFormula,
) -> UnfoeqStatus {
    guard(|| {
        let sig = &handle(sig)?.0;
        let parsed = lib(parse_formula(text(src)?, sig))?;
        let report = validate_fragment(&parsed.formula, sig);
        if !report.is_unfo {
            let why = report
                .violations
                .first()
                .map_or(String::new(), |(at, reason)| format!("{at}: {reason}"));
            return Err(fail(UnfoeqStatus::Fragment, why));
        }
        let (nf, _) = lib(to_normal_form(&parsed.formula, sig))?;
        out(
            out_formula,
            boxed(UnfoeqFormula {
                formula: parsed.formula,
                sig: sig.clone(),
                nf,
            }),
        )
    })
}

/// # Safety
/// `f` must be null or a live handle from [`unfoeq_formula_parse`].
#[no_mangle]
pub unsafe extern "C" fn unfoeq_formula_free(f: *mut UnfoeqFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// The normal form as text.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_formula_normal_form(f: *const UnfoeqFormula, out_text: *mut *mut c_char) -> UnfoeqStatus {
    guard(|| {
        let f = handle(f)?;
        out(out_text, c_string(f.nf.pretty()))
    })
}

/// Parses a structure over the formula's normalized signature (fresh symbols
/// included). Distinguished relations are closed to equivalences.
///
/// # Safety
/// `src` must be a nul-terminated string, `f` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_structure_parse(
    src: *const c_char,
    f: *const UnfoeqFormula,
    out_structure: *mut *mut UnfoeqStructure,
) -> UnfoeqStatus {
    guard(|| {
        let f = handle(f)?;
        let s = lib(load_structure(text(src)?, &f.nf.signature, true))?;
        out(out_structure, boxed(UnfoeqStructure(s)))
    })
}

/// # Safety
/// `s` must be null or a live structure handle.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_structure_free(s: *mut UnfoeqStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of elements.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_structure_size(s: *const UnfoeqStructure, out_size: *mut usize) -> UnfoeqStatus {
    guard(|| out(out_size, handle(s)?.0.size()))
}

/// The structure in the text format read by [`unfoeq_structure_parse`].
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_structure_to_text(s: *const UnfoeqStructure, out_text: *mut *mut c_char) -> UnfoeqStatus {
    guard(|| out(out_text, c_string(handle(s)?.0.to_text())))
}

/// Whether `s` is a model of the normal form. Structures over the original
/// signature (without fresh symbols) are evaluated against the sentence.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_check_model(
    f: *const UnfoeqFormula,
    s: *const UnfoeqStructure,
    out_holds: *mut bool,
) -> UnfoeqStatus {
    guard(|| {
        let (f, s) = (handle(f)?, &handle(s)?.0);
        let holds = if s.sig() == &f.nf.signature {
            check_model(s, &f.nf)
        } else if s.sig() == &f.sig {
            lib(unfoeq::semantics::evaluate(s, &f.formula, &unfoeq::semantics::Assignment::new()))?
        } else {
            return Err(fail(UnfoeqStatus::Invalid, "structure is over another signature"));
        };
        out(out_holds, holds)
    })
}

/// Searches for a model with at most `max_size` elements. `node_limit` 0
/// means unlimited. `*out_model` is null when there is none.
///
/// # Safety
/// `f` must be a live handle and `out_model` writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_find_model(
    f: *const UnfoeqFormula,
    max_size: usize,
    node_limit: u64,
    out_model: *mut *mut UnfoeqStructure,
) -> UnfoeqStatus {
    guard(|| {
        let f = handle(f)?;
        let budget = SearchBudget {
            node_limit: (node_limit > 0).then_some(node_limit),
            ..SearchBudget::upto(max_size)
        };
        let found = lib(find_model(&f.nf, budget))?;
        out(out_model, found.map_or(ptr::null_mut(), |s| boxed(UnfoeqStructure(s))))
    })
}

/// Two-variable construction from the finite model `pattern` starting at
/// `origin`. `*out_conditions_hold` reports the structure-level checks.
///
/// # Safety
/// Handles must be live and out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_construct_2v(
    f: *const UnfoeqFormula,
    pattern: *const UnfoeqStructure,
    origin: u32,
    out_model: *mut *mut UnfoeqStructure,
    out_conditions_hold: *mut bool,
) -> UnfoeqStatus {
    guard(|| {
        let (f, p) = (handle(f)?, &handle(pattern)?.0);
        if origin as usize >= p.size() {
            return Err(fail(UnfoeqStatus::Invalid, format!("origin {origin} is outside the pattern")));
        }
        let c = lib(unfoeq::construct2v::construct(p, &f.nf, origin))?;
        out(out_conditions_hold, c.report.all_hold())?;
        out(out_model, boxed(UnfoeqStructure(c.structure)))
    })
}

/// General construction from the finite model `pattern` with its root at
/// `origin`. Gives up with [`UnfoeqStatus::Budget`] when an intermediate
/// structure exceeds `max_size` elements (0 means no limit). The result is
/// over the normalized signature.
///
/// # Safety
/// Handles must be live and out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_construct_nd(
    f: *const UnfoeqFormula,
    pattern: *const UnfoeqStructure,
    origin: u32,
    max_size: usize,
    out_model: *mut *mut UnfoeqStructure,
    out_conditions_hold: *mut bool,
) -> UnfoeqStatus {
    guard(|| {
        let (f, p) = (handle(f)?, &handle(pattern)?.0);
        if origin as usize >= p.size() {
            return Err(fail(UnfoeqStatus::Invalid, format!("origin {origin} is outside the pattern")));
        }
        let r = lib(regularize(p, &f.nf))?;
        let mut pat = NdPattern::new(Rc::new(r.clone()));
        if max_size > 0 {
            pat.set_budget(max_size);
        }
        let node = TreeNode::root(origin);
        let all = pat.all_mask();
        let built = lib(build_with(&mut pat, &node, all))?;
        let report = lib(verify_d_conditions(&r, &built, &node, all, f.nf.t, target_depth(&r)))?;
        let plain = lib(built.structure.project(p.sig()))?;
        out(out_conditions_hold, report.all_hold())?;
        out(out_model, boxed(UnfoeqStructure(plain)))
    })
}

/// Decimal value of the two-variable size bound, or [`UnfoeqStatus::Budget`]
/// when it has more than `max_bits` bits.
///
/// # Safety
/// `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_bound_two_variable(
    live: u32,
    gtypes: u32,
    conjuncts: u32,
    max_bits: u64,
    out_text: *mut *mut c_char,
) -> UnfoeqStatus {
    guard(|| match size_bound_t_capped(live, gtypes, conjuncts, max_bits) {
        Some(v) => out(out_text, c_string(v.to_string())),
        None => Err(fail(UnfoeqStatus::Budget, format!("bound exceeds {max_bits} bits"))),
    })
}

/// Decimal value of the general size bound, or [`UnfoeqStatus::Budget`] when
/// it has more than `max_bits` bits.
///
/// # Safety
/// `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn unfoeq_bound_general(
    live: u32,
    formula_len: u32,
    subtree_types: u32,
    max_bits: u64,
    out_text: *mut *mut c_char,
) -> UnfoeqStatus {
    guard(|| match size_bound_m_capped(live, formula_len, subtree_types, max_bits) {
        Some(v) => out(out_text, c_string(v.to_string())),
        None => Err(fail(UnfoeqStatus::Budget, format!("bound exceeds {max_bits} bits"))),
    })
}
