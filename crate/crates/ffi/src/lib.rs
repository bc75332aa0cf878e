//! C ABI for hilbert-forge.
//!
//! Conventions: every function returns an `HfStatus` code; results travel
//! through out-parameters.  Rule sets are opaque handles freed with
//! [`hf_ruleset_free`]; strings returned by this library are freed with
//! [`hf_string_free`].  On any non-`Ok` status, [`hf_last_error`] returns a
//! thread-local message valid until the next failing call on that thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};

use hilbert_forge::calculi::{ruleset_from_text, ruleset_to_text, RuleSet};
use hilbert_forge::engine::{builtin_ruleset, check_derivation, parse_consecution, parse_script};
use hilbert_forge::search::{find_countermodel, EnumerationSpec, SearchOutcome, Target};
use hilbert_forge::semantics::SemanticsMode;
use hilbert_forge::syntax::{parse, print};

/// Status codes returned by every FFI entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Formula, script, or rule set text failed to parse.
    ParseError = 3,
    /// The derivation failed to check; see `hf_last_error`.
    CheckFailed = 4,
    /// Unknown built-in rule set id.
    UnknownRuleset = 5,
    /// Semantic evaluation or enumeration failed.
    SemanticsError = 6,
}

/// Opaque rule set handle.
pub struct HfRuleSet(RuleSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: HfStatus, msg: impl std::fmt::Display) -> HfStatus {
    let msg = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, HfStatus> {
    if ptr.is_null() {
        return Err(fail(HfStatus::NullArgument, "null string argument"));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|e| fail(HfStatus::InvalidUtf8, e))
}

fn give_string(s: String, out: *mut *mut c_char) -> HfStatus {
    if out.is_null() {
        return fail(HfStatus::NullArgument, "null out-parameter");
    }
    let c = CString::new(s.replace('\0', " ")).unwrap_or_default();
    unsafe { *out = c.into_raw() };
    HfStatus::Ok
}

/// Message for the most recent failing call on this thread.  The pointer is
/// owned by the library; do not free it.
#[no_mangle]
pub extern "C" fn hf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Free a string returned by this library.
#[no_mangle]
pub extern "C" fn hf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse a formula in user syntax and return its canonical printing.
#[no_mangle]
pub extern "C" fn hf_normalize_formula(text: *const c_char, out: *mut *mut c_char) -> HfStatus {
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match parse(text) {
        Ok(f) => give_string(print(&f), out),
        Err(e) => fail(HfStatus::ParseError, e),
    }
}

/// Build a built-in rule set (`sdm`, `sdm-reduced`, `sdm-g4`, `ockham:m:n`,
/// `omega:<class>:<n>`).
#[no_mangle]
pub extern "C" fn hf_ruleset_builtin(id: *const c_char, out: *mut *mut HfRuleSet) -> HfStatus {
    let id = match read_str(id) {
        Ok(t) => t,
        Err(s) => return s,
    };
    if out.is_null() {
        return fail(HfStatus::NullArgument, "null out-parameter");
    }
    match builtin_ruleset(id) {
        Ok(rs) => {
            unsafe { *out = Box::into_raw(Box::new(HfRuleSet(rs))) };
            HfStatus::Ok
        }
        Err(hilbert_forge::engine::EngineError::UnknownRuleset(id)) => {
            fail(HfStatus::UnknownRuleset, format!("unknown rule set {id:?}"))
        }
        Err(e) => fail(HfStatus::SemanticsError, e),
    }
}

/// Parse a rule set from its text form (`name: f1 , f2 |- g` lines).
#[no_mangle]
pub extern "C" fn hf_ruleset_parse(
    id: *const c_char,
    text: *const c_char,
    out: *mut *mut HfRuleSet,
) -> HfStatus {
    let (id, text) = match (read_str(id), read_str(text)) {
        (Ok(i), Ok(t)) => (i, t),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    if out.is_null() {
        return fail(HfStatus::NullArgument, "null out-parameter");
    }
    match ruleset_from_text(id, text) {
        Ok(rs) => {
            unsafe { *out = Box::into_raw(Box::new(HfRuleSet(rs))) };
            HfStatus::Ok
        }
        Err(e) => fail(HfStatus::ParseError, e),
    }
}

/// Number of rules in a rule set, or -1 on a null handle.
#[no_mangle]
pub extern "C" fn hf_ruleset_len(rs: *const HfRuleSet) -> c_int {
    if rs.is_null() {
        return -1;
    }
    unsafe { &*rs }.0.rules.len() as c_int
}

/// Text form of a rule set.
#[no_mangle]
pub extern "C" fn hf_ruleset_text(rs: *const HfRuleSet, out: *mut *mut c_char) -> HfStatus {
    if rs.is_null() {
        return fail(HfStatus::NullArgument, "null rule set handle");
    }
    give_string(ruleset_to_text(&unsafe { &*rs }.0), out)
}

/// Free a rule set handle.
#[no_mangle]
pub extern "C" fn hf_ruleset_free(rs: *mut HfRuleSet) {
    if !rs.is_null() {
        drop(unsafe { Box::from_raw(rs) });
    }
}

/// Parse and check a derivation script against an explicit rule set.  The
/// script's `ruleset:` header is ignored in favor of `rs`.
#[no_mangle]
pub extern "C" fn hf_check_script_with(rs: *const HfRuleSet, text: *const c_char) -> HfStatus {
    if rs.is_null() {
        return fail(HfStatus::NullArgument, "null rule set handle");
    }
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let d = match parse_script(text) {
        Ok(d) => d,
        Err(e) => return fail(HfStatus::ParseError, e),
    };
    let goal = d.goal.clone();
    match check_derivation(&unsafe { &*rs }.0, &d, &goal) {
        Ok(()) => HfStatus::Ok,
        Err(e) => fail(HfStatus::CheckFailed, e),
    }
}

/// Parse and check a derivation script, resolving its `ruleset:` header as a
/// built-in id.
#[no_mangle]
pub extern "C" fn hf_check_script(text: *const c_char) -> HfStatus {
    let text_str = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let d = match parse_script(text_str) {
        Ok(d) => d,
        Err(e) => return fail(HfStatus::ParseError, e),
    };
    let rs = match builtin_ruleset(&d.ruleset_id) {
        Ok(rs) => rs,
        Err(e) => return fail(HfStatus::UnknownRuleset, e),
    };
    let goal = d.goal.clone();
    match check_derivation(&rs, &d, &goal) {
        Ok(()) => HfStatus::Ok,
        Err(e) => fail(HfStatus::CheckFailed, e),
    }
}

/// Search for a finite countermodel to `goal` over the named algebra class
/// up to `max_size`.  On success, `*found` is 1 and `*witness_json` holds a
/// JSON witness if a countermodel exists, else `*found` is 0 and
/// `*witness_json` is null.  `assertional` non-zero selects ⊤-assertional
/// semantics instead of filter semantics.
#[no_mangle]
pub extern "C" fn hf_refute_goal(
    goal: *const c_char,
    class: *const c_char,
    max_size: usize,
    assertional: c_int,
    found: *mut c_int,
    witness_json: *mut *mut c_char,
) -> HfStatus {
    let (goal, class) = match (read_str(goal), read_str(class)) {
        (Ok(g), Ok(c)) => (g, c),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    if found.is_null() || witness_json.is_null() {
        return fail(HfStatus::NullArgument, "null out-parameter");
    }
    let goal = match parse_consecution(goal) {
        Ok(g) => g,
        Err(e) => return fail(HfStatus::ParseError, e),
    };
    let spec = EnumerationSpec {
        class: class.to_string(),
        max_size,
        include_trivial: false,
    };
    let mode = if assertional != 0 {
        SemanticsMode::Assertional
    } else {
        SemanticsMode::Filter
    };
    match find_countermodel(&Target::Consecution("goal".into(), goal), &spec, &mode) {
        Ok(SearchOutcome::Refuted(w)) => {
            unsafe { *found = 1 };
            match serde_json::to_string(&w) {
                Ok(j) => give_string(j, witness_json),
                Err(e) => fail(HfStatus::SemanticsError, e),
            }
        }
        Ok(SearchOutcome::Exhausted(_)) => {
            unsafe {
                *found = 0;
                *witness_json = std::ptr::null_mut();
            }
            HfStatus::Ok
        }
        Err(e) => fail(HfStatus::SemanticsError, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn ruleset_round_trip() {
        let mut rs: *mut HfRuleSet = ptr::null_mut();
        assert_eq!(hf_ruleset_builtin(c("sdm").as_ptr(), &mut rs), HfStatus::Ok);
        assert_eq!(hf_ruleset_len(rs), 75);
        let mut text: *mut c_char = ptr::null_mut();
        assert_eq!(hf_ruleset_text(rs, &mut text), HfStatus::Ok);
        let owned = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_string();
        hf_string_free(text);
        let mut rs2: *mut HfRuleSet = ptr::null_mut();
        assert_eq!(
            hf_ruleset_parse(c("copy").as_ptr(), c(&owned).as_ptr(), &mut rs2),
            HfStatus::Ok
        );
        assert_eq!(hf_ruleset_len(rs2), 75);
        hf_ruleset_free(rs);
        hf_ruleset_free(rs2);
    }

    #[test]
    fn errors_and_checks() {
        assert_eq!(hf_check_script(ptr::null()), HfStatus::NullArgument);
        let mut rs: *mut HfRuleSet = ptr::null_mut();
        assert_eq!(
            hf_ruleset_builtin(c("no-such").as_ptr(), &mut rs),
            HfStatus::UnknownRuleset
        );
        assert!(!hf_last_error().is_null());
        let script = "ruleset: sdm\ngoal: |- 1\n1. 1 ; by ax_top\n";
        assert_eq!(hf_check_script(c(script).as_ptr()), HfStatus::Ok);
        let bad = "ruleset: sdm\ngoal: |- 1\n1. 1 ; by no_rule\n";
        assert_eq!(hf_check_script(c(bad).as_ptr()), HfStatus::CheckFailed);
        let mut norm: *mut c_char = ptr::null_mut();
        assert_eq!(
            hf_normalize_formula(c("~((x)|y & z)").as_ptr(), &mut norm),
            HfStatus::Ok
        );
        assert_eq!(
            unsafe { CStr::from_ptr(norm) }.to_str().unwrap(),
            "~(x | y & z)"
        );
        hf_string_free(norm);
    }

    #[test]
    fn refute_goal_both_ways() {
        let mut found: c_int = -1;
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(
            hf_refute_goal(
                c("p & ~p |- ~q").as_ptr(),
                c("DM").as_ptr(),
                3,
                0,
                &mut found,
                &mut json
            ),
            HfStatus::Ok
        );
        assert_eq!(found, 1);
        assert!(!json.is_null());
        hf_string_free(json);
        assert_eq!(
            hf_refute_goal(
                c("p |- p | q").as_ptr(),
                c("DN").as_ptr(),
                3,
                0,
                &mut found,
                &mut json
            ),
            HfStatus::Ok
        );
        assert_eq!(found, 0);
        assert!(json.is_null());
    }
}
