use std::path::{Path, PathBuf};

use tempfile::TempDir;
use unfoeq::cli::run_args;
use unfoeq::logic::Signature;
use unfoeq::structures::load_structure;

const SIG: &str = "base P 1\nbase R 2\neq E1\n";
const ALTERNATING: &str = "(forall x . exists y . E1(x,y) & R(x,y) & (P(x) & ~P(y) | ~P(x) & P(y))) \
                           & ~(exists x y . R(x,y) & P(x) & P(y))\n";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(dir: &Path, args: &[&str]) -> Run {
    let mut argv = vec!["unfoeq".to_string()];
    argv.extend(args.iter().map(|a| {
        if a.ends_with(".txt") || a.ends_with(".sig") || a.ends_with(".dot") {
            dir.join(a).display().to_string()
        } else {
            a.to_string()
        }
    }));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_args(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn setup(formula: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.sig"), SIG).unwrap();
    std::fs::write(dir.path().join("f.txt"), formula).unwrap();
    dir
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn solve_satisfiable_emits_structure() {
    let d = setup(ALTERNATING);
    let r = run(d.path(), &["solve", "f.txt", "--sig", "s.sig", "--max-size", "3", "--out", "m.txt"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("satisfiable: true"));
    let text = std::fs::read_to_string(path(&d, "m.txt")).unwrap();
    let sig = Signature::parse(SIG).unwrap();
    let s = load_structure(&text, &sig, false).unwrap();
    assert_eq!(s.to_text(), text);
    let r = run(d.path(), &["check", "f.txt", "--sig", "s.sig", "--structure", "m.txt"]);
    assert_eq!(r.code, 0);
}

#[test]
fn solve_unsatisfiable_and_budget() {
    let d = setup("(forall x . exists y . P(y) & ~P(y))\n");
    let r = run(d.path(), &["solve", "f.txt", "--sig", "s.sig", "--max-size", "2"]);
    assert_eq!(r.code, 1);
    let d = setup(ALTERNATING);
    let r = run(
        d.path(),
        &["solve", "f.txt", "--sig", "s.sig", "--max-size", "3", "--node-limit", "1"],
    );
    assert_eq!(r.code, 4, "{}{}", r.out, r.err);
}

#[test]
fn validate_rejects_disequality() {
    let d = setup("~(x = y)\n");
    let r = run(d.path(), &["validate", "f.txt", "--sig", "s.sig"]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("unfo: false"));
    assert!(r.out.contains("violation: "));
    let d = setup(ALTERNATING);
    assert_eq!(run(d.path(), &["validate", "f.txt", "--sig", "s.sig"]).code, 0);
}

#[test]
fn bounds_print_values() {
    let d = setup(ALTERNATING);
    let r = run(d.path(), &["bounds", "--T", "0", "--K", "1", "--m", "1"]);
    assert_eq!((r.code, r.out.as_str()), (0, "1\n"));
    let r = run(d.path(), &["bounds", "--T", "2", "--K", "2", "--m", "3"]);
    // 2 * 2^2 * 3^4 * 72^5, with T_1 = 2 * 2^2 * 3^2 = 72.
    assert_eq!(r.out, "1253826625536\n");
    let r = run(d.path(), &["bounds", "--M", "1", "--n", "1", "--g", "2"]);
    assert_eq!(r.out, "9\n");
    assert_eq!(run(d.path(), &["bounds", "--M", "3", "--n", "10"]).code, 4);
    assert_eq!(run(d.path(), &["bounds"]).code, 2);
}

#[test]
fn usage_and_format_errors() {
    let d = setup(ALTERNATING);
    assert_eq!(run(d.path(), &["frobnicate"]).code, 2);
    assert_eq!(run(d.path(), &["solve", "f.txt"]).code, 2);
    assert_eq!(run(d.path(), &["solve", "missing.txt", "--sig", "s.sig"]).code, 3);
    std::fs::write(path(&d, "bad.txt"), "forall x . P(x,x)\n").unwrap();
    let r = run(d.path(), &["normalize", "bad.txt", "--sig", "s.sig"]);
    assert_eq!(r.code, 3);
    assert!(r.err.contains("arity"));
    std::fs::write(path(&d, "m.txt"), "domain 2\nrel Q: (0)\n").unwrap();
    let r = run(d.path(), &["check", "f.txt", "--sig", "s.sig", "--structure", "m.txt"]);
    assert_eq!(r.code, 3);
}

#[test]
fn constructions_write_verifiable_outputs() {
    let d = setup(ALTERNATING);
    std::fs::write(path(&d, "m.txt"), "domain 2\nrel P: (0)\nrel R: (0,1) (1,0)\nrel E1: (0,1)\n").unwrap();
    let base = ["f.txt", "--sig", "s.sig", "--structure", "m.txt"];
    let mut args = vec!["construct2v"];
    args.extend(base);
    args.extend(["--out", "r2.txt", "--pmap", "p2.txt", "--dot", "c2.dot"]);
    let r = run(d.path(), &args);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.contains("model: true") && r.out.contains("b1: ok"));
    assert!(std::fs::read_to_string(path(&d, "c2.dot")).unwrap().starts_with("digraph"));
    let verify = |result: &str, pmap: &str| {
        run(
            d.path(),
            &["verify", "f.txt", "--sig", "s.sig", "--pattern", "m.txt", "--result", result, "--pmap", pmap],
        )
    };
    assert_eq!(verify("r2.txt", "p2.txt").code, 0);

    let mut args = vec!["constructnd"];
    args.extend(base);
    args.extend(["--out", "rn.txt", "--full-out", "rf.txt", "--pmap", "pn.txt"]);
    let r = run(d.path(), &args);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.contains("d4: ok") && r.out.contains("within_bound: true"));
    assert_eq!(verify("rf.txt", "pn.txt").code, 0);
    let r = run(d.path(), &["check", "f.txt", "--sig", "s.sig", "--structure", "rn.txt"]);
    assert_eq!(r.code, 0);

    // A wrong pmap entry is caught.
    let p = std::fs::read_to_string(path(&d, "p2.txt")).unwrap();
    let flipped: String = p
        .lines()
        .map(|l| match l.split_once(' ') {
            Some(("0", a)) if !l.starts_with('#') => format!("0 {}\n", 1 - a.parse::<u32>().unwrap()),
            _ => format!("{l}\n"),
        })
        .collect();
    std::fs::write(path(&d, "bad.txt"), flipped).unwrap();
    let r = verify("r2.txt", "bad.txt");
    assert_eq!(r.code, 1, "{}", r.out);
    assert!(r.out.contains("fail"));
}

#[test]
fn unravel_and_reports_are_deterministic() {
    let d = setup(ALTERNATING);
    std::fs::write(path(&d, "m.txt"), "domain 2\nrel P: (0)\nrel R: (0,1) (1,0)\nrel E1: (0,1)\n").unwrap();
    let args = [
        "unravel", "f.txt", "--sig", "s.sig", "--structure", "m.txt", "--depth", "3", "--out", "u.txt",
    ];
    let a = run(d.path(), &args);
    assert_eq!(a.code, 0);
    assert!(a.out.contains("size: 4") && a.out.contains("tree_like: true"));
    let b = run(d.path(), &args);
    assert_eq!(a.out, b.out);
    let r = run(d.path(), &["fuzz", "--seed", "3", "--count", "4", "--k", "1"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert_eq!(r.out, run(d.path(), &["fuzz", "--seed", "3", "--count", "4", "--k", "1"]).out);
}

#[test]
fn fresh_symbols_are_filled_in() {
    // The nested negated quantifier gets a fresh unary symbol.
    let d = setup("forall x . exists y . R(x,y) & ~(exists z . R(y,z) & P(z))\n");
    std::fs::write(path(&d, "m.txt"), "domain 2\nrel R: (0,1) (1,1)\n").unwrap();
    let r = run(d.path(), &["normalize", "f.txt", "--sig", "s.sig"]);
    assert!(r.out.contains("fresh: _nf0"), "{}", r.out);
    let r = run(d.path(), &["check", "f.txt", "--sig", "s.sig", "--structure", "m.txt"]);
    assert_eq!(r.code, 0, "{}", r.out);
    std::fs::write(path(&d, "m.txt"), "domain 2\nrel P: (1)\nrel R: (0,1) (1,1)\n").unwrap();
    let r = run(d.path(), &["check", "f.txt", "--sig", "s.sig", "--structure", "m.txt"]);
    assert_eq!(r.code, 1);
}
