use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vqelab::io::{read_repository, Payload};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn vqelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqelab")).args(args).output().expect("binary runs")
}

/// A three-geometry LiH config in `dir`.
fn small_config(dir: &Path, extra: &str) -> PathBuf {
    let lih = root().join("fixtures/lih");
    let mut text = String::from(
        "molecule = LiH\nn_frozen = 1\nactive_irreps = 1\nansatz = ry_linear\nn_l = 2\nrestarts = 2\nseed = 3\n",
    );
    for r in ["1.500", "2.500", "3.500"] {
        text.push_str(&format!("geometry = {r} {}\n", lih.join(format!("R{r}.FCIDUMP")).display()));
    }
    text.push_str(extra);
    let path = dir.join("lih.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn cost_reports_ry_full_parameter_count() {
    let cfg = root().join("configs/lih_ry_full.cfg");
    let out = vqelab(&["cost", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().find(|l| !l.starts_with('#')).unwrap().split_whitespace().collect();
    // R family n_q n_l depth depth_with_prep n_theta ...
    assert_eq!((row[1], row[2], row[3], row[6]), ("ry_full", "4", "3", "16"));
}

#[test]
fn missing_fixture_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "geometry = 9.0 /nonexistent/R9.FCIDUMP\n");
    let out = vqelab(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/R9.FCIDUMP"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(vqelab(&["scan", "--bogus"]).status.code(), Some(1));
    assert_eq!(vqelab(&["frobnicate"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "colour = blue\n");
    let out = vqelab(&["fci", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    assert_eq!(vqelab(&["--help"]).status.code(), Some(0));
}

#[test]
fn fci_and_scan_agree_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let cfg = cfg.to_str().unwrap();
    let (a, b, f) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("f"));
    for out in [&a, &b] {
        let o = vqelab(&["scan", "--config", cfg, "--out", out.to_str().unwrap(), "--threads", "2"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let o = vqelab(&["fci", "--config", cfg, "--out", f.to_str().unwrap()]);
    assert!(o.status.success());

    let ra = read_repository(&a).unwrap();
    assert_eq!(ra.len(), 6);
    for rec in &ra {
        let rel = rec.relative_path();
        assert_eq!(std::fs::read(a.join(&rel)).unwrap(), std::fs::read(b.join(&rel)).unwrap());
    }
    let refs = read_repository(&f).unwrap();
    for rec in &ra {
        let Payload::Vqe(v) = &rec.payload else { continue };
        let fci = refs
            .iter()
            .find_map(|r| match &r.payload {
                Payload::Reference(p) if p.r == rec.geometry => Some(p.e_fci),
                _ => None,
            })
            .unwrap();
        assert!(((v.e_vqe - fci) - v.deltas.delta_e).abs() < 1e-10);
    }
}

#[test]
fn export_rewrites_a_repository() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let src = dir.path().join("src");
    assert!(vqelab(&["fci", "--config", cfg.to_str().unwrap(), "--out", src.to_str().unwrap()])
        .status
        .success());
    let dst = dir.path().join("dst");
    let o = vqelab(&["export", "--from", src.to_str().unwrap(), "--out", dst.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(read_repository(&src).unwrap(), read_repository(&dst).unwrap());
}

#[test]
fn firstq_trim_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("r");
    let o = vqelab(&[
        "firstq",
        "--config",
        cfg.to_str().unwrap(),
        "--scheme",
        "trim",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("trim/LiH").is_dir());
    let o = vqelab(&["firstq", "--config", cfg.to_str().unwrap(), "--scheme", "wedge"]);
    assert_eq!(o.status.code(), Some(1));
}
