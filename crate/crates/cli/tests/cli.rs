use std::process::{Command, Output};

fn cantor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantor")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("{key}=");
    text.split_whitespace().find_map(|t| t.strip_prefix(prefix.as_str()))
}

#[test]
fn additivity_of_builtins_passes() {
    let o = cantor(&["additivity", "FAIR", "--depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "measure=FAIR depth=12 nodes=4095 violations=0\nresult=pass\n");
    let o = cantor(&["additivity", "MIX 3/4 FAIR 1/4 DIRAC 0", "--depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn broken_table_fails_at_the_root() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.m");
    std::fs::write(&file, "# hand-written and wrong\nMEASURE broken\nTABLE [ ε=1 0=1/2 1=1/4 ]\n").unwrap();
    let ledger = dir.path().join("ledger.txt");
    let src = format!("@{}", file.display());
    let o = cantor(&["additivity", &src, "--depth", "3", "--out", ledger.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("VIOLATION node=ε kind=not-additive value=1/1 children=3/4"));
    let ledger = std::fs::read_to_string(ledger).unwrap();
    assert_eq!(ledger.lines().count(), 7);
    assert!(ledger.starts_with("node=ε value=1/1 children=3/4 ok=false\n"));
}

#[test]
fn pushforward_examples() {
    let o = cantor(&["pushforward", "ID", "FAIR", "01", "--depth", "4"]);
    assert_eq!(field(&stdout(&o), "interval"), Some("[1/4,1/4]"));
    let o = cantor(&["pushforward", "TAIL", "SUM 2 SCALE 1/2 FAIR SCALE 1/2 FAIR", "0", "--depth", "6"]);
    assert_eq!(field(&stdout(&o), "interval"), Some("[1/2,1/2]"));
}

#[test]
fn von_neumann_pushforward_is_tight() {
    let o = cantor(&["pushforward", "VN", "BERNOULLI", "1/3", "0", "--depth", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let interval = field(&text, "interval").unwrap();
    let (lo, hi) = interval.trim_matches(['[', ']']).split_once(',').unwrap();
    let parse = |s: &str| {
        let (p, q) = s.split_once('/').unwrap();
        (p.parse::<u128>().unwrap(), q.parse::<u128>().unwrap())
    };
    let ((lp, lq), (hp, hq)) = (parse(lo), parse(hi));
    // lo ≤ 1/2 ≤ hi and hi - lo ≤ 2^-10, by cross-multiplication.
    assert!(2 * lp <= lq && 2 * hp >= hq);
    assert_eq!(lq, hq);
    assert!((hp - lp) * 1024 <= hq);
}

#[test]
fn avoider_certificates() {
    let o = cantor(&["avoider", "FAIR", "DIRAC 0", "0", "--depth", "8", "--samples", "200", "--seed", "20240601"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("avoider_lambda_dirac.txt"));
    let o = cantor(&["avoider", "BERNOULLI", "1/3", "DIRAC", "0", "0", "--depth", "8", "--format", "table"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("avoider_bernoulli_dirac.txt"));
}

#[test]
fn degenerate_instance_has_no_certificate() {
    let o = cantor(&["avoider", "FAIR", "FAIR", "0", "--depth", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CERT y0=1/2 n=none"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no avoidance certificate"));
}

#[test]
fn avoider_writes_plan_and_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.txt");
    let o = cantor(&["avoider", "FAIR", "DIRAC 0", "0", "--depth", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("STAGE 1"));
    assert!(text.contains("MOVE 0 "));
    assert_eq!(text.lines().filter(|l| l.starts_with("COLUMN")).count(), 15);
    assert!(text.lines().filter(|l| l.starts_with("COLUMN")).all(|l| l.ends_with("OK")));
}

#[test]
fn martingale_crosses_at_twelve() {
    let o = cantor(&[
        "martingale",
        "--nu",
        "MIX 3/4 FAIR 1/4 DIRAC 0",
        "--mu",
        "FAIR",
        "--x",
        "000…",
        "--threshold",
        "1024",
    ]);
    assert_eq!(stdout(&o), "n=12\n");
    let o = cantor(&[
        "martingale", "--nu", "BERNOULLI", "2/3", "--mu", "FAIR", "--x", "1", "--threshold", "8", "--show-trace", "--depth",
        "6", "--window", "3",
    ]);
    assert_eq!(stdout(&o), golden("martingale_trace.txt"));
}

#[test]
fn conditional_of_independent_product() {
    let o = cantor(&["conditional", "--mu", "PRODUCT", "FAIR", "FAIR", "--y", "1011", "--sigma", "01"]);
    assert_eq!(stdout(&o), "value=1/4\n");
    let o = cantor(&["conditional", "--mu", "DIAGONAL BERNOULLI 1/3", "--y", "10", "--sigma", "1", "--depth", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("value=1/1\nnormalized=true depth=6 additivity_failures=0\n"));
}

#[test]
fn zero_conditioning_mass_is_an_error() {
    let o = cantor(&["conditional", "--mu", "PRODUCT FAIR DIRAC 0", "--y", "1", "--sigma", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn slln_soft_check() {
    let o = cantor(&["slln", "--machine", "VN", "--x-random", "--seed", "7", "-n", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "available"), Some("1000"));
    assert_eq!(field(&text, "soft_check"), Some("within"));
    let o = cantor(&["slln", "--machine", "ID", "--x", "(01)", "-n", "4"]);
    assert_eq!(field(&stdout(&o), "mean"), Some("1/2"));
}

#[test]
fn slln_reports_stalls() {
    let o = cantor(&["slln", "--machine", "VN", "--x", "(0)", "-n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("STALLED bits=0"));
}

#[test]
fn independence_of_xor_family() {
    let o = cantor(&["independence", "XOR", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "checked"), Some("256"));
    assert!(text.contains("FAIR depth=8 checked=511 exact=true result=pass"));
    let o = cantor(&["independence", "SETS", "2", "[1]", "[1]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("WITNESS members=C0,C1 intersection=1/2 product=1/4"));
}

#[test]
fn density_along_a_point() {
    let o = cantor(&["density", "FAIR", "--set", "[0 11]", "--x", "0(1)", "-n", "2"]);
    assert!(stdout(&o).ends_with(
        "DENSITY k=0 enclosure=[3/4,3/4] exact=true\nDENSITY k=1 enclosure=[1/1,1/1] exact=true\n\
         DENSITY k=2 enclosure=[1/1,1/1] exact=true\n"
    ));
}

#[test]
fn preimage_golden() {
    let o = cantor(&["preimage", "VN", "FAIR", "0", "--depth", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("preimage_vn.txt"));
}

#[test]
fn traces_are_reproducible() {
    let args = ["trace", "FAIR", "DIRAC 0", "0", "--samples", "2", "--seed", "3", "--depth", "4"];
    let a = cantor(&args);
    assert_eq!(stdout(&a), stdout(&cantor(&args)));
    assert_eq!(stdout(&a), golden("trace_samples.txt"));
    let o = cantor(&["trace", "FAIR", "DIRAC 0", "0", "--omega", "(0)", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("STALLED stage=1 reason=zero-height"));
}

#[test]
fn bad_input_exits_two() {
    for args in [
        &["pushforward", "VN", "FAIR"][..],
        &["additivity", "NOPE"],
        &["additivity", "FAIR", "--depth", "0"],
        &["conditional", "--mu", "FAIR", "--y", "1", "--sigma", "0"],
        &["avoider", "FAIR", "FAIR", "0", "extra"],
    ] {
        assert_eq!(cantor(args).status.code(), Some(2), "{args:?}");
    }
}
