use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use frozen_snowflake::io::Report;

fn fsnow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsnow")).args(args).output().expect("run fsnow")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn generate(dir: &Path) -> Output {
    fsnow(&["-o", dir.to_str().unwrap(), "generate"])
}

#[test]
fn fixtures_pass_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for fix in ["line", "wedge"] {
        let o = fsnow(&["-o", d, "analyze", "--fixture", fix]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("0 failed"));
    }
    let o = fsnow(&["-o", d, "--walks", "20000", "wos", "--fixture", "disk"]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("wos.report").exists());
    let o = fsnow(&["-o", d, "--format", "structured", "report"]);
    assert_eq!(code(&o), 0);
    let rep = Report::parse_structured(&String::from_utf8_lossy(&o.stdout));
    assert!(rep.checks.iter().any(|c| c.name == "disk_quarter"));
    // the wedge run replaced the line fixture's analyze.report
    assert!(rep.checks.iter().any(|c| c.name == "wedge_non_decaying"));
}

#[test]
fn bad_configuration_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&fsnow(&["-o", d, "--schedule", "two", "generate"])), 3);
    assert_eq!(code(&fsnow(&["-o", d, "--generations", "2", "--schedule", "2", "generate"])), 3);
    assert_eq!(code(&fsnow(&["--no-such-flag", "generate"])), 3);
    assert_eq!(code(&fsnow(&["--config", "/nonexistent/run.cfg", "generate"])), 3);
    // nothing to report yet
    assert_eq!(code(&fsnow(&["-o", d, "report"])), 3);
    assert_eq!(code(&fsnow(&["--help"])), 0);
}

#[test]
fn global_window_hits_the_resource_limit() {
    let dir = tempfile::tempdir().unwrap();
    let o = fsnow(&["-o", dir.path().to_str().unwrap(), "--window", "global", "generate"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn generate_is_reproducible_and_counts_pieces() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = generate(d.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["gen_0.snap", "gen_1.snap", "gen_1.edges", "registry_1.txt", "manifest.txt"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
    let m = Report::parse_structured(&fs::read_to_string(a.path().join("manifest.txt")).unwrap());
    assert_eq!(m.records.len(), 2);
    assert_eq!(m.records[0].get("edges"), Some("100"));
    let g1 = &m.records[1];
    assert_eq!(g1.get("M"), Some("2"));
    assert_eq!(g1.get("m_prev"), Some("100"));
    assert_eq!(g1.get("t"), Some("25600"));
    assert!(g1.get_f64("window_r").is_some());

    // the generated run analyses cleanly, and the walk statistics on a
    // single generation miss the frozen-measure floor
    let d = a.path().to_str().unwrap();
    let o = fsnow(&["-o", d, "analyze"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = fsnow(&["-o", d, "--walks", "2000", "wos"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("f_fraction"));

    let svg = a.path().join("g1.svg");
    let w = |k: &str| g1.get_f64(k).unwrap();
    let region = format!("--region={},{},{}", w("window_x"), w("window_y"), w("window_r") / 64.0);
    let o = fsnow(&[
        "export-svg",
        "--snapshot",
        a.path().join("gen_1.snap").to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        &region,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn figures_export_with_their_segment_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (fig, n) in [("1", 4), ("2", 256)] {
        let svg = dir.path().join(format!("figure{fig}.svg"));
        let o = fsnow(&["export-svg", "--figure", fig, "--svg", svg.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        assert!(String::from_utf8_lossy(&o.stdout).contains(&format!("({n} segments)")));
        let text = fs::read_to_string(&svg).unwrap();
        assert!(text.contains("</svg>"));
    }
    let o = fsnow(&["export-svg", "--svg", "x.svg"]);
    assert_eq!(code(&o), 3);
}
