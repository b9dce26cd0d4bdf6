use std::fs;
use std::path::Path;
use std::process::Command;

fn qus(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qus"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.cfg");
    fs::write(
        &path,
        "# small two-class demo\n\
         phantom.a.rows=160\nphantom.a.cols=48\n\
         phantom.b.rows=160\nphantom.b.cols=48\n\
         simulate.frames_per_class=6\nsimulate.groups_per_class=3\n\
         pipeline.window=9x9\npipeline.depth=1\npipeline.basis=full\n\
         cv.k=3\ncv.repeats=4\n",
    )
    .unwrap();
    path.display().to_string()
}

fn files_with(dir: &Path, suffix: &str) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(suffix))
        .collect();
    v.sort();
    v
}

#[test]
fn simulate_writes_frames_sidecars_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("new/dir");
    let o = qus(&["simulate", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(files_with(&out, ".hdr").len(), 20);
    assert_eq!(files_with(&out, ".f32").len(), 20);
    assert_eq!(files_with(&out, ".truth").len(), 20);
    assert!(out.join("manifest.csv").exists());

    let again = tmp.path().join("again");
    assert!(qus(&["simulate", "--out", again.to_str().unwrap()]).status.success());
    for f in files_with(&out, ".f32") {
        assert_eq!(
            fs::read(out.join(&f)).unwrap(),
            fs::read(again.join(&f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn unwritable_output_names_path() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = qus(&["simulate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains(out.to_str().unwrap()));
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("o");
    let out = out_dir.to_str().unwrap();
    assert_eq!(
        qus(&["simulate", "--out", out, "--window", "8x8"]).status.code(),
        Some(2)
    );
    assert_eq!(qus(&["evaluate", "--out", out]).status.code(), Some(2));
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "pipeline.unknown=1\n").unwrap();
    assert_eq!(
        qus(&["simulate", "--out", out, "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qus(&["bogus"]).status.code(), Some(2));
}

#[test]
fn pipeline_stages_and_partial_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let d = |n: &str| tmp.path().join(n).display().to_string();
    assert!(qus(&["simulate", "--config", &cfg, "--out", &d("rf")]).status.success());
    assert!(
        qus(&["envelope", "--config", &cfg, "--in", &d("rf"), "--out", &d("env")])
            .status
            .success()
    );
    assert_eq!(files_with(Path::new(&d("env")), ".hdr").len(), 12);

    let o = qus(&[
        "features",
        "--config",
        &cfg,
        "--model",
        "nakagami,rayleigh",
        "--in",
        &d("env"),
        "--out",
        &d("feat"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(Path::new(&d("feat")).join("features_nakagami.csv")).unwrap();
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1 + 12);
    // image_id + 2 params x 4 subbands x 2 + group_id, class_label, degenerate
    assert_eq!(rows[0].split(',').count(), 1 + 16 + 3);
    assert!(table.starts_with("# config_hash="));
    assert!(Path::new(&d("feat")).join("features_rayleigh.csv").exists());

    let o = qus(&["evaluate", "--config", &cfg, "--in", &d("feat"), "--out", &d("rep")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("leave-one-group-out (6 folds"), "{stdout}");
    let logo = fs::read_to_string(Path::new(&d("rep")).join("report_logo.csv")).unwrap();
    assert!(logo.contains("metric,Nkg,Ray"));
    assert_eq!(logo.lines().filter(|l| !l.starts_with('#')).count(), 1 + 7);
    let base = fs::read_to_string(Path::new(&d("rep")).join("report_logo_baseline.csv")).unwrap();
    assert!(base.contains("Accuracy,1.000,1.000"), "{base}");
    assert!(Path::new(&d("rep")).join("report_kfold3_baseline.csv").exists());
    let kv = fs::read_to_string(Path::new(&d("rep")).join("metrics.kv")).unwrap();
    assert!(kv.contains("logo.fractal.Nkg.folds=6"));

    // one corrupt frame: 11 rows and exit code 1
    let env_dir = d("env");
    let env = Path::new(&env_dir);
    fs::write(env.join("a-f000.f32"), [0u8; 10]).unwrap();
    let o = qus(&["features", "--config", &cfg, "--in", &d("env"), "--out", &d("feat2")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a-f000"));
    let table = fs::read_to_string(Path::new(&d("feat2")).join("features_nakagami.csv")).unwrap();
    assert_eq!(table.lines().filter(|l| !l.starts_with('#')).count(), 1 + 11);
}

#[test]
fn all_is_deterministic_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(
        qus(&["all", "--config", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"])
            .status
            .success()
    );
    assert!(
        qus(&["all", "--config", &cfg, "--out", b.to_str().unwrap(), "--threads", "3"])
            .status
            .success()
    );
    for rel in [
        "features/features_nakagami.csv",
        "features/baseline_nakagami.csv",
        "reports/metrics.kv",
        "reports/report_logo.csv",
    ] {
        assert_eq!(fs::read(a.join(rel)).unwrap(), fs::read(b.join(rel)).unwrap(), "{rel}");
    }
}
