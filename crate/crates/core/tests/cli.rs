use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cervipre(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cervipre"))
        .current_dir(dir)
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compare against a checked-in file; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(
        actual, expected,
        "{name} drifted; rerun with UPDATE_GOLDEN=1 if intended"
    );
}

const SMALL: [&str; 10] = [
    "--width",
    "128",
    "--height",
    "128",
    "--semi-axis-x",
    "50",
    "--semi-axis-y",
    "42",
    "--speckles",
    "3",
];

fn synth_small(dir: &Path, count: &str, extra: &[&str]) {
    let mut args = vec!["synth", "--out", "data", "--count", count, "--seed", "1"];
    args.extend(SMALL);
    args.extend(extra);
    let out = cervipre(dir, &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn synth_process_eval_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth_small(dir, "4", &["--diseased-every", "2"]);
    assert!(dir.join("data/images/synth_00001.png").exists());
    assert!(dir.join("data/truth/synth_00004.glaremask.png").exists());
    let groups = std::fs::read_to_string(dir.join("data/groups.json")).unwrap();
    check_golden("groups.json", &groups);

    let out = cervipre(dir, &["process", "data/images", "--out", "pred"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for suffix in [
        "inpainted.png",
        "roi.png",
        "roimask.png",
        "glaremask.png",
        "report.json",
    ] {
        assert!(dir.join(format!("pred/synth_00002.{suffix}")).exists(), "{suffix}");
    }
    let report = std::fs::read_to_string(dir.join("pred/synth_00001.report.json")).unwrap();
    check_golden("synth_00001.report.json", &report);

    let out = cervipre(
        dir,
        &[
            "eval",
            "--pred",
            "pred",
            "--truth",
            "data/truth",
            "--groups",
            "data/groups.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    check_golden("eval.json", &String::from_utf8(out.stdout).unwrap());
}

#[test]
fn json_flag_prints_every_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth_small(dir, "2", &[]);
    let out = cervipre(dir, &["process", "data/images", "--out", "pred", "--json", "--timings"]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["stages"].as_array().unwrap().len(), 9);
    assert_eq!(reports[0]["timings"].as_array().unwrap().len(), 9);
}

#[test]
fn failing_image_exits_one_and_still_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let white = cervipre::ImageRgb8::filled(16, 16, [255, 255, 255]).unwrap();
    cervipre::imagecore::io::save_png(&white, &dir.join("white.png")).unwrap();
    let out = cervipre(dir, &["process", "white.png", "--out", "pred"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("pred/white.report.json")).unwrap()).unwrap();
    assert!(report["error"].as_str().unwrap().contains("remove_specular"));
    assert!(report["roi"].is_null());
}

#[test]
fn invalid_arguments_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for args in [
        &["process", "x.png", "--out", "o", "--threshold", "1.5"][..],
        &["process", "x.png", "--out", "o", "--omega", "2.0"],
        &["process", "x.png", "--out", "o", "--connectivity", "6"],
        &["process", "x.png", "--out", "o", "--k", "0"],
        &["process", "x.png"],
        &[
            "eval", "--pred", "p", "--truth", "t", "--groups", "g.json", "--slack", "1.0",
        ],
        &["synth", "--out", "d", "--count", "1", "--seed", "1", "--width", "0"],
        &["frobnicate"],
    ] {
        let out = cervipre(dir, args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth_small(dir, "3", &[]);
    for (threads, out_dir) in [("1", "one"), ("3", "three")] {
        let out = Command::new(env!("CARGO_BIN_EXE_cervipre"))
            .current_dir(dir)
            .args(["process", "data/images", "--out", out_dir])
            .env("CERVIPRE_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    for entry in std::fs::read_dir(dir.join("one")).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            std::fs::read(dir.join("one").join(&name)).unwrap(),
            std::fs::read(dir.join("three").join(&name)).unwrap(),
            "{name:?}"
        );
    }
}
