use std::process::{Command, Output};

fn airs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_airs"))
        .args(args)
        .env_remove("AIRS_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(csv: &str, key: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no field {key} in\n{csv}"))
        .parse()
        .unwrap()
}

#[test]
fn figure_4_lists_both_coefficients() {
    let csv = stdout(&airs(&["figure", "4"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("sweep,scheme,value_db"));
    assert!(csv.contains("\n10,xi-lower,0.0101020514\n"), "{csv}");
    assert!(csv.contains("\n10,xi-upper,0.989897949\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 201);
}

#[test]
fn single_location_reports_candidates_and_snr() {
    let csv = stdout(&airs(&["single-loc", "--w1", "1000,0", "--N", "256"]));
    assert!(csv.starts_with("field,value\n"));
    assert!((field(&csv, "xi_1") - 0.0101020514).abs() < 1e-9);
    assert!((field(&csv, "candidate_2_qx") - 989.897949).abs() < 1e-5);
    assert_eq!(field(&csv, "qx"), field(&csv, "candidate_1_qx"));
    let snr = field(&csv, "snr_db");
    assert!(snr > 15.0 && snr < 17.0, "{snr}");
}

#[test]
fn planar_placement_with_twenty_by_twenty() {
    let csv = stdout(&airs(&["--set", "Nx=20", "--set", "Ny=20", "place-upa"]));
    assert_eq!(field(&csv, "l_x"), 1.0);
    assert_eq!(field(&csv, "l_y"), 2.0);
    assert!(field(&csv, "qx") <= 1000.0);
    assert!(field(&csv, "worst_snr_db").is_finite());
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    let args = ["figure", "6", "--sweep", "10,100,1000"];
    let piped = stdout(&airs(&args));
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let written = airs(&with_out);
    assert!(written.status.success());
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), piped);
}

#[test]
fn config_file_and_overrides_combine() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.cfg");
    std::fs::write(&path, "# linear array\nNx = 400\nDy = 0\nnoise_dbm = −110\n").unwrap();
    let cfg = path.to_str().unwrap();
    let a = stdout(&airs(&["--config", cfg, "place-ula"]));
    let b = stdout(&airs(&["--config", cfg, "--set", "Nx=100", "place-ula"]));
    assert_eq!(field(&a, "span_y"), 0.0);
    assert!(field(&a, "worst_snr_db") > field(&b, "worst_snr_db"));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let args = ["figure", "11", "--range", "10:40:10"];
    let one = Command::new(env!("CARGO_BIN_EXE_airs"))
        .args(args)
        .env("AIRS_THREADS", "1")
        .output()
        .unwrap();
    let auto = Command::new(env!("CARGO_BIN_EXE_airs"))
        .args(args)
        .env("AIRS_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(stdout(&one), stdout(&auto));
    assert_eq!(stdout(&airs(&args)), stdout(&auto));
}

#[test]
fn scheme_filter_keeps_only_the_requested_rows() {
    let csv = stdout(&airs(&["figure", "10", "--sweep", "20", "--schemes", "center-placement"]));
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("20,center-placement,"));
}

#[test]
fn pattern_dump_peaks_inside_the_interval() {
    let csv = stdout(&airs(&[
        "pattern-dump", "--delta-min", "-0.05", "--delta-max", "0.05", "--N", "64", "--points", "101",
    ]));
    assert!(csv.starts_with("delta,gain_db\n-0.5,"));
    assert_eq!(csv.lines().count(), 102);
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    let peak = rows.iter().cloned().fold((0.0, f64::MIN), |m, r| if r.1 > m.1 { r } else { m });
    assert!(peak.0.abs() <= 0.05, "{peak:?}");
}

#[test]
fn flatten_plan_partitions_the_array() {
    let csv = stdout(&airs(&["flatten-1d", "--delta-min", "-0.1", "--delta-max", "0.1", "--N", "512"]));
    let sizes: usize = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(sizes, 512);
    let elems = stdout(&airs(&["flatten-1d", "--delta-min", "-0.1", "--delta-max", "0.1", "--N", "512", "--elements"]));
    assert_eq!(elems.lines().count(), 513);
}

fn fails_with(args: &[&str], needle: &str) {
    let out = airs(args);
    assert!(!out.status.success(), "{args:?} succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(needle), "{args:?}: {err}");
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn failures_give_one_line_diagnostics() {
    fails_with(&["figure", "13"], "4, 5, 6, 7, 8, 8a, 8b, 8c, 9, 9a, 9b, 9c, 10, 11, 12");
    fails_with(&["--set", "H=-5", "figure", "4"], "`H`");
    fails_with(&["--set", "colour=red", "figure", "4"], "colour");
    fails_with(&["--set", "Ny=4", "place-ula"], "ny = 1");
    fails_with(&["figure", "4", "--schemes", "center-placement"], "does not apply");
    fails_with(&["figure", "10", "--schemes", "magic"], "magic");
    fails_with(&["--config", "/nonexistent/scenario.cfg", "figure", "4"], "nonexistent");
    fails_with(&["single-loc", "--w1", "1000"], "--w1");
}

#[test]
fn bad_thread_setting_is_reported() {
    let out = Command::new(env!("CARGO_BIN_EXE_airs"))
        .args(["figure", "4"])
        .env("AIRS_THREADS", "many")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("AIRS_THREADS"));
}
