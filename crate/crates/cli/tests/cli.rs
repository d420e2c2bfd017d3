use std::path::Path;
use std::process::{Command, Output};

fn shrinker(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shrinker"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
        .parse()
        .unwrap()
}

#[test]
fn find_writes_profile_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["find", "--g", "1", "--m1", "1", "--m2", "1"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let line = stdout(&o);
    let line = line.lines().next().unwrap();
    assert!(line.starts_with("xi_star="));
    assert!(field(line, "closure") < 1e-6 && field(line, "residual") < 1e-5);
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("t,xi,theta,alpha,r,phi,x,r_tilde\n"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["xi_star"].as_f64().unwrap(), field(line, "xi_star"));
    assert_eq!(meta["config"]["tolerances"]["step"].as_f64(), Some(1e-10));
    assert_eq!(meta["config"]["mode"].as_str(), Some("find"));
}

#[test]
fn find_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = shrinker(&["find", "--g", "2", "--jobs", "1"], d.path());
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["profile.csv", "meta.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        let (x, y) = (String::from_utf8(x).unwrap(), String::from_utf8(y).unwrap());
        // Only the output directory differs between the two runs.
        let norm = |s: &str, d: &Path| s.replace(d.to_str().unwrap(), "OUT");
        assert_eq!(norm(&x, a.path()), norm(&y, b.path()), "{name}");
    }
}

#[test]
fn odd_g_with_unequal_multiplicities_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["find", "--g", "3", "--m1", "1", "--m2", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m1 = m2"));
}

#[test]
fn unequal_multiplicities_switch_to_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["find", "--g", "2", "--m1", "2", "--m2", "1"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("arc=")).count(), 2);
    for name in [
        "arc_upper.csv",
        "arc_lower.csv",
        "arc_upper.json",
        "arc_lower.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn sweep_reports_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["sweep", "--sweep-count", "6", "--jobs", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 6);
    // The grid starts exactly at xi_sphere.
    assert_eq!(rows[0][1], "Type3Timeout");
    assert_eq!(rows[0][2], "");
    // Everything above the critical value 0.599... returns first.
    for r in &rows[1..] {
        assert!(r[0].parse::<f64>().unwrap() > 0.6);
        assert_eq!(r[1], "Type1");
        assert!(r[2].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["sweep", "--sweep-count", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv, "xi0,kind,witness_time\n");
}

#[test]
fn sweep_outside_the_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["sweep", "--sweep-from", "-5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_single_start() {
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["classify", "--xi0", "2.0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("kind=Type1"));
    let o = shrinker(&["classify"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_angenent_agrees_for_n2_and_n3() {
    for m in ["1", "2"] {
        let dir = tempfile::tempdir().unwrap();
        let o = shrinker(&["verify-angenent", "--m1", m, "--m2", m], dir.path());
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        let line = stdout(&o);
        assert!(field(&line, "gap") < 1e-6);
        assert!(field(&line, "hausdorff") < 1e-5);
        assert!(dir.path().join("verify.json").exists());
    }
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["verify-angenent", "--g", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mesh_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = shrinker(
            &["mesh", "--segments", "32", "--profile-points", "200"],
            d.path(),
        );
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(stdout(&o).contains("euler=0"));
    }
    let x = std::fs::read(a.path().join("mesh.obj")).unwrap();
    let y = std::fs::read(b.path().join("mesh.obj")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("v ")).count(),
        200 * 32
    );
    assert_eq!(
        text.lines().filter(|l| l.starts_with("f ")).count(),
        2 * 200 * 32
    );

    let o = shrinker(&["mesh", "--g", "2"], a.path());
    assert_eq!(o.status.code(), Some(2));
    let o = shrinker(&["mesh", "--segments", "2"], a.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# desk run\ng = 2\nsweep-count = 3\ntol-orth = 1e-9\n",
    )
    .unwrap();
    let o = shrinker(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--sweep-count",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    // xi_sphere for g = 2, m1 = m2 = 1 is ln(3)/2.
    let first: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(first, 0.5 * 3f64.ln());

    std::fs::write(&cfg, "colour = 1\n").unwrap();
    let o = shrinker(&["find", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = shrinker(&["find", "--config", "/nonexistent/run.conf"], dir.path());
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let o = shrinker(&["find"], &file.join("sub"));
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn bad_tolerances_are_parameter_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = shrinker(&["find", "--tol-step", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
