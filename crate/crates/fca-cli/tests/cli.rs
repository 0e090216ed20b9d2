use std::process::{Command, Output};

fn fca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fca")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn classify_reports_the_solution_space() {
    let out = fca(&["classify"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["solution_dimension"], 17);
    assert_eq!(report["real_sector_dimension"], 13);
    assert_eq!(report["family_count"], 13);
    assert_eq!(report["span_equal"], true);
    assert_eq!(report["families"].as_array().unwrap().len(), 13);
    assert!(!report["monomials"].as_array().unwrap().is_empty());
}

#[test]
fn dispersion_lists_every_branch() {
    let out = fca(&["dispersion", "--k-grid", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("k1,k2,k3,branch,omega\n"));
    let table = rows(&text);
    assert_eq!(table.len(), 27 * 2);
    // the grid centre is k = 0, where U = I
    assert!(table.iter().filter(|r| r[..3] == [0.0, 0.0, 0.0]).all(|r| r[4].abs() < 1e-15));

    let dirac = rows(&stdout(&fca(&["dispersion", "--k-grid", "5", "--model", "dirac", "--mass", "0.3"])));
    assert_eq!(dirac.len(), 125 * 4);
    let massless = rows(&stdout(&fca(&["dispersion", "--k-grid", "9", "--model", "massless1d"])));
    assert_eq!(massless.len(), 9 * 4);
}

#[test]
fn free_pair_moves_ballistically() {
    let out = fca(&["evolve", "--L", "16", "--T", "5", "--lambda-abs", "0", "--initial", "site(e3,0)"]);
    let text = stdout(&out);
    assert!(text.starts_with("t,y,probability\n"));
    let table = rows(&text);
    assert_eq!(table.len(), 6 * 33);
    for r in table.iter().filter(|r| r[2] > 1e-14) {
        let (t, y) = (r[0], r[1]);
        if t == 0.0 {
            assert_eq!(y, 0.0);
        } else {
            assert_eq!(y.abs(), 2.0 * t);
            assert!((r[2] - 0.5).abs() < 1e-14);
        }
    }
}

#[test]
fn bound_state_stays_put() {
    let out = fca(&["evolve", "--L", "16", "--T", "100", "--p", "pi/4", "--lambda-abs", "pi/sqrt2"]);
    for r in rows(&stdout(&out)).iter().filter(|r| r[1] == 0.0) {
        assert!((r[2] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["evolve", "--L", "16", "--T", "20", "--initial", "gaussian(3,2,0.5)", "--seed", "7"];
    let a = fca(&args);
    assert_eq!(a.stdout, fca(&args).stdout);
    let other = fca(&["evolve", "--L", "16", "--T", "20", "--initial", "gaussian(3,2,0.5)", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &config,
        format!(
            r#"{{"p": "pi/4", "lambda-abs": 1.2, "lambda-phase": 0.3, "L": 16, "T": 12,
                "initial": "phi_s(0.4)", "seed": 1, "out": {:?}}}"#,
            csv.to_str().unwrap()
        ),
    )
    .unwrap();
    let from_file = fca(&["evolve", "--config", config.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0));
    assert!(from_file.stdout.is_empty());
    let flags = fca(&[
        "evolve",
        "--p",
        "pi/4",
        "--lambda-abs",
        "1.2",
        "--lambda-phase",
        "0.3",
        "--L",
        "16",
        "--T",
        "12",
        "--initial",
        "phi_s(0.4)",
        "--seed",
        "1",
    ]);
    assert_eq!(std::fs::read(&csv).unwrap(), flags.stdout);

    // flags win over the file
    let shorter = dir.path().join("short.csv");
    let out = fca(&["evolve", "--config", config.to_str().unwrap(), "--T", "3", "--out", shorter.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&shorter).unwrap().lines().count(), 1 + 4 * 33);
}

#[test]
fn sweep_peaks_at_the_critical_momentum() {
    let out = fca(&[
        "sweep",
        "--p",
        "1.1707963267948966:1.9707963267948966",
        "--steps",
        "5",
        "--lambda-abs",
        "1/sqrt2",
        "--initial",
        "phi_b0",
        "--L",
        "64",
        "--T",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("p,metric\n"));
    let table = rows(&text);
    assert!((table[2][1] - 1.0).abs() < 1e-10);
    for r in [&table[0], &table[1], &table[3], &table[4]] {
        assert!(r[1] < 0.9, "{r:?}");
    }
}

#[test]
fn lambda_sweep_localizes_at_the_endpoints() {
    let out = fca(&["sweep", "--lambda-abs", "pi/sqrt2:2*pi/sqrt2", "--steps", "33", "--T", "60"]);
    let table = rows(&stdout(&out));
    assert_eq!(table.len(), 33);
    assert!(table[0][1] >= 0.99 && table[32][1] >= 0.99);
    assert!(table[16][1] < 0.5);
}

#[test]
fn empty_sweep_prints_the_header() {
    let out = fca(&["sweep", "--lambda-abs", "0:1", "--steps", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "lambda,metric\n");
}

#[test]
fn verify_passes_on_a_small_lattice() {
    for point in [["--p", "0.7", "--lambda-abs", "1/sqrt2"], ["--p", "pi/4", "--lambda-abs", "pi/sqrt2"]] {
        let mut args = vec!["verify", "--L", "24"];
        args.extend(point);
        let out = fca(&args);
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["pass"], true, "{report:#}");
        assert_eq!(out.status.code(), Some(0));
    }
}

#[test]
fn spectrum_reports_localization() {
    let out = fca(&["spectrum", "--L", "16", "--p", "0.5", "--lambda-abs", "pi/sqrt2"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["eigenphases"].as_array().unwrap().len(), 3 * 33);
    assert!(report["bound_count"].as_u64().unwrap() >= 2);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("bad.json");
    std::fs::write(&bad_key, r#"{"lambda_abs": 1}"#).unwrap();
    for args in [
        vec!["evolve", "--bogus"],
        vec!["frobnicate"],
        vec!["evolve", "--initial", "phi_x"],
        vec!["evolve", "--L", "7"],
        vec!["evolve", "--p", "abc"],
        vec!["sweep"],
        vec!["sweep", "--p", "0:1", "--lambda-abs", "0:1"],
        vec!["evolve", "--config", bad_key.to_str().unwrap()],
        vec!["evolve", "--config", "/nonexistent/run.json"],
        vec!["dispersion", "--model", "dirac", "--mass", "2"],
    ] {
        assert_eq!(fca(&args).status.code(), Some(2), "{args:?}");
    }
}
