use std::process::Command;

fn cram() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cram"))
}

fn run_ok(args: &[&str]) -> String {
    let out = cram().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn verify_is_deterministic_and_passes() {
    let a = run_ok(&["verify", "--size", "4096", "--ops", "5000", "--seed", "3"]);
    let b = run_ok(&["verify", "--size", "4096", "--ops", "5000", "--seed", "3"]);
    assert_eq!(a, b);
    assert!(a.contains("result=pass"), "{a}");
}

#[test]
fn injected_fault_is_reported() {
    let out = cram()
        .args(["verify", "--size", "4096", "--ops", "200", "--inject-fault"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("DIVERGED"), "{report}");
    assert!(report.contains("minimized trace"));
    assert!(report.contains("result=FAIL"));
}

#[test]
fn build_writes_loadable_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("in.txt");
    std::fs::write(&corpus, b"the quick brown fox jumps over the lazy dog ".repeat(200)).unwrap();
    for extra in [None, Some("--xcram")] {
        let snap = dir.path().join("snap.bin");
        let mut args = vec!["build", "--corpus", corpus.to_str().unwrap(), "--snapshot", snap.to_str().unwrap()];
        args.extend(extra);
        let report = run_ok(&args);
        assert!(report.contains("bpc_total="), "{report}");
        assert!(std::fs::metadata(&snap).unwrap().len() > 0);
    }
}

#[test]
fn overwrite_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ow.csv");
    run_ok(&["overwrite", "--size", "20000", "--out", out.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "percent,bpc_total,bpc_payload,h0_blocked_current");
    assert_eq!(lines.len(), 102);
    assert!(lines[101].starts_with("100,"));
}

#[test]
fn overwrite_rejects_unequal_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    std::fs::write(&a, b"abcd").unwrap();
    std::fs::write(&b, b"abc").unwrap();
    let out = cram()
        .args(["overwrite", "--corpus", a.to_str().unwrap(), b.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("differ in length"));
}

#[test]
fn throughput_and_entropy_csv() {
    let t = run_ok(&["throughput", "--size", "4096"]);
    assert!(t.starts_with("unit_bytes,read_s,write_s\n"));
    assert_eq!(t.lines().count(), 6);
    let e = run_ok(&["entropy", "--gen", "dna", "--size", "100000"]);
    let lines: Vec<&str> = e.lines().collect();
    assert_eq!(lines.len(), 5);
    let h0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((h0 - 2.0).abs() < 0.01);
}

#[test]
fn huffman_u_mode_runs() {
    let out = run_ok(&["build", "--mode", "huffman-u", "--size", "8192"]);
    assert!(out.contains("ell=2"), "{out}");
    let v = run_ok(&["verify", "--mode", "huffman-u", "--size", "4096", "--ops", "3000"]);
    assert!(v.contains("result=pass"), "{v}");
}
