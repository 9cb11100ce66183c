use std::fs;

use varwords::cli::{run_with, EXIT_BUDGET, EXIT_FALSE, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run_with(std::iter::once("varwords").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn hj_number_prints_two() {
    let (code, out) = run(&["hj-number", "--p", "2", "--q", "2", "--nmax", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().last(), Some("2"));
    assert!(out.contains("line-free: N = 1"));
}

#[test]
fn hj_number_below_the_value_is_false() {
    let (code, _) = run(&["hj-number", "--p", "2", "--q", "2", "--nmax", "1"]);
    assert_eq!(code, EXIT_FALSE);
}

#[test]
fn extract_then_verify_then_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cs.cert");
    let p = path.to_str().unwrap();
    let (code, out) =
        run(&["cs-extract", "--coloring", "builtin:length-mod:2", "--ladder", "2", "--depth", "2", "--out", p]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("result: x x0 x0 in color 2"));
    let (code, out) = run(&["verify", "--cert", p]);
    assert_eq!(code, EXIT_OK, "{out}");
    let text = fs::read_to_string(&path).unwrap().replace("words = x x0 x0", "words = x x1 x0x");
    fs::write(&path, text).unwrap();
    let (code, out) = run(&["verify", "--cert", p]);
    assert_eq!(code, EXIT_FALSE, "{out}");
    assert!(out.contains("result: failed"));
}

#[test]
fn carlson_and_hj_certificates_verify() {
    let dir = tempfile::tempdir().unwrap();
    for (i, args) in [
        vec!["carlson-extract", "--coloring", "builtin:last-letter:2", "--mode", "proof-guided", "--depth", "1"],
        vec!["hj-search", "--p", "3", "--n", "2", "--coloring", "builtin:letter-count-mod:0:2"],
    ]
    .into_iter()
    .enumerate()
    {
        let path = dir.path().join(format!("{i}.cert"));
        let mut full = args.clone();
        full.extend(["--out", path.to_str().unwrap()]);
        let (code, out) = run(&full);
        assert_eq!(code, EXIT_OK, "{out}");
        let (code, out) = run(&["verify", "--cert", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK, "{out}");
    }
}

#[test]
fn coloring_documents_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    fs::write(&path, "[coloring]\nkind = dfa\nq = 2\nalphabet = 0 1\n[dfa]\nstates = 2\nstart = 0\n0, 0 -> 0\n0, 1 -> 1\n1, 0 -> 0\n1, 1 -> 1\n0 -> 1\n1 -> 2\n").unwrap();
    let (code, out) = run(&["cs-extract", "--coloring", path.to_str().unwrap(), "--depth", "1"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("coloring = inline"));
}

#[test]
fn budget_and_usage_codes() {
    let (code, _) = run(&["cs-extract", "--coloring", "builtin:length-mod:2", "--depth", "3", "--budget", "5"]);
    assert_eq!(code, EXIT_BUDGET);
    let (code, _) = run(&["hj-number", "--p", "3", "--q", "3", "--nmax", "3", "--cap", "100"]);
    assert_eq!(code, EXIT_BUDGET);
    let (code, _) = run(&["bogus"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _) = run(&["cs-extract", "--coloring", "builtin:nope"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _) = run(&["cs-extract", "--coloring", "builtin:length-mod:2", "--ladder", "0"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _) = run(&["verify", "--cert", "/nonexistent/cert"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn enumerate_span_example() {
    let (code, out) = run(&["enumerate-span", "--words", "x 0x", "--kind", "reduced-variable"]);
    assert_eq!(code, EXIT_OK);
    let words: Vec<&str> = out.lines().filter(|l| !l.contains(':')).collect();
    let mut sorted = words.clone();
    sorted.sort();
    assert_eq!(sorted, ["00x", "10x", "x00", "x01", "x0x"]);
    assert!(out.contains("count: 5"));
}

#[test]
fn probe_verdicts_map_to_codes() {
    let (code, out) = run(&["probe-largeness", "--coloring", "builtin:constant", "--color", "1"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out) = run(&["probe-largeness", "--coloring", "builtin:length-mod:2", "--color", "1", "--rounds", "3"]);
    assert_eq!(code, EXIT_FALSE, "{out}");
    assert!(out.contains("result: counterexample-prefix"));
    let (code, _) = run(&["probe-largeness", "--coloring", "builtin:length-mod:2", "--color", "2", "--budget", "2"]);
    assert_eq!(code, EXIT_BUDGET);
    let (code, _) = run(&["probe-largeness", "--coloring", "builtin:length-mod:2", "--color", "3"]);
    assert_eq!(code, EXIT_USAGE);
}
