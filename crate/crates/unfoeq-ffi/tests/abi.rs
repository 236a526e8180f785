use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use unfoeq_ffi::*;

const SIG: &str = "base P 1\nbase R 2\neq E1\n";
const ALTERNATING: &str = "(forall x . exists y . E1(x,y) & R(x,y) & (P(x) & ~P(y) | ~P(x) & P(y))) \
                           & ~(exists x y . R(x,y) & P(x) & P(y))";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = unfoeq_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    unfoeq_string_free(p);
    s
}

struct Handles {
    sig: *mut UnfoeqSignature,
    f: *mut UnfoeqFormula,
}

impl Handles {
    fn new(formula: &str) -> Self {
        let mut sig = ptr::null_mut();
        let mut f = ptr::null_mut();
        unsafe {
            assert_eq!(unfoeq_signature_parse(c(SIG).as_ptr(), &mut sig), UnfoeqStatus::Ok);
            assert_eq!(unfoeq_formula_parse(c(formula).as_ptr(), sig, &mut f), UnfoeqStatus::Ok);
        }
        Handles { sig, f }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            unfoeq_formula_free(self.f);
            unfoeq_signature_free(self.sig);
        }
    }
}

#[test]
fn find_check_and_construct() {
    let h = Handles::new(ALTERNATING);
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(unfoeq_find_model(h.f, 3, 0, &mut m), UnfoeqStatus::Ok);
        assert!(!m.is_null());
        let mut holds = false;
        assert_eq!(unfoeq_check_model(h.f, m, &mut holds), UnfoeqStatus::Ok);
        assert!(holds);

        for nd in [false, true] {
            let (mut big, mut ok) = (ptr::null_mut(), false);
            let st = if nd {
                unfoeq_construct_nd(h.f, m, 0, 5000, &mut big, &mut ok)
            } else {
                unfoeq_construct_2v(h.f, m, 0, &mut big, &mut ok)
            };
            assert_eq!(st, UnfoeqStatus::Ok, "{}", last_error());
            assert!(ok);
            assert_eq!(unfoeq_check_model(h.f, big, &mut holds), UnfoeqStatus::Ok);
            assert!(holds);
            let mut text = ptr::null_mut();
            assert_eq!(unfoeq_structure_to_text(big, &mut text), UnfoeqStatus::Ok);
            assert!(take(text).starts_with("domain "));
            unfoeq_structure_free(big);
        }
        unfoeq_structure_free(m);
    }
}

#[test]
fn structure_text_round_trips_through_handles() {
    let h = Handles::new(ALTERNATING);
    unsafe {
        let mut s = ptr::null_mut();
        let src = c("domain 2\nrel P: (0)\nrel R: (0,1) (1,0)\nrel E1: (0,1)\n");
        assert_eq!(unfoeq_structure_parse(src.as_ptr(), h.f, &mut s), UnfoeqStatus::Ok);
        let mut n = 0;
        assert_eq!(unfoeq_structure_size(s, &mut n), UnfoeqStatus::Ok);
        assert_eq!(n, 2);
        let mut holds = false;
        assert_eq!(unfoeq_check_model(h.f, s, &mut holds), UnfoeqStatus::Ok);
        assert!(holds);
        let mut text = ptr::null_mut();
        assert_eq!(unfoeq_structure_to_text(s, &mut text), UnfoeqStatus::Ok);
        let text = take(text);
        let mut t = ptr::null_mut();
        assert_eq!(unfoeq_structure_parse(c(&text).as_ptr(), h.f, &mut t), UnfoeqStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(unfoeq_structure_to_text(t, &mut again), UnfoeqStatus::Ok);
        assert_eq!(take(again), text);
        unfoeq_structure_free(t);
        unfoeq_structure_free(s);
    }
}

#[test]
fn errors_map_to_codes() {
    let h = Handles::new(ALTERNATING);
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(unfoeq_formula_parse(c("~(x = y)").as_ptr(), h.sig, &mut f), UnfoeqStatus::Fragment);
        assert!(f.is_null());
        assert_eq!(unfoeq_formula_parse(c("P(x,x)").as_ptr(), h.sig, &mut f), UnfoeqStatus::Format);
        assert!(last_error().contains("arity"));
        assert_eq!(unfoeq_formula_parse(ptr::null(), h.sig, &mut f), UnfoeqStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(unfoeq_formula_parse(bad.as_ptr().cast(), h.sig, &mut f), UnfoeqStatus::Utf8);

        let mut m = ptr::null_mut();
        assert_eq!(unfoeq_find_model(h.f, 3, 1, &mut m), UnfoeqStatus::Budget);
        let unsat = Handles::new("forall x . exists y . P(y) & ~P(y)");
        assert_eq!(unfoeq_find_model(unsat.f, 2, 0, &mut m), UnfoeqStatus::Ok);
        assert!(m.is_null());

        let mut s = ptr::null_mut();
        assert_eq!(unfoeq_structure_parse(c("domain 1\n").as_ptr(), h.f, &mut s), UnfoeqStatus::Ok);
        let (mut big, mut ok) = (ptr::null_mut(), false);
        assert_eq!(unfoeq_construct_2v(h.f, s, 0, &mut big, &mut ok), UnfoeqStatus::Invalid);
        assert_eq!(unfoeq_construct_2v(h.f, s, 5, &mut big, &mut ok), UnfoeqStatus::Invalid);
        assert!(last_error().contains("origin"));
        unfoeq_structure_free(s);

        let mut text = ptr::null_mut();
        assert_eq!(unfoeq_bound_two_variable(0, 1, 1, 8, &mut text), UnfoeqStatus::Ok);
        assert_eq!(take(text), "1");
        assert_eq!(unfoeq_bound_general(3, 10, 1, 64, &mut text), UnfoeqStatus::Budget);
        unfoeq_structure_free(ptr::null_mut());
        unfoeq_string_free(ptr::null_mut());
    }
}

/// Every exported function is declared in the checked-in header.
#[test]
fn header_declares_exports() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(dir.join("include/unfoeq.h")).unwrap();
    let mut n = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
            n += 1;
        }
    }
    assert!(n >= 15);
    for handle in ["UnfoeqSignature", "UnfoeqFormula", "UnfoeqStructure"] {
        assert!(header.contains(&format!("typedef struct {handle} {handle};")));
    }
}

/// Compiles the C example against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().unwrap().parent().unwrap();
    let lib = target.join("libunfoeq_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
