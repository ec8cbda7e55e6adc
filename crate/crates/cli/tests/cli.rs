//! End-to-end checks of the `orf` binary: exit codes, error reporting, and
//! output plumbing.

use std::process::{Command, Output};

fn orf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orf"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn usage_error_exits_2() {
    let out = orf(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_kind_exits_2() {
    let out = orf(&[
        "bias-variance",
        "--kind",
        "quux",
        "--d",
        "8",
        "--trials",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown transform kind"), "{stderr}");
}

#[test]
fn empty_kind_list_exits_2() {
    let out = orf(&["bias-variance", "--kind", "", "--d", "8", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_file_exits_3() {
    let out = orf(&["sigma", "--input", "/nonexistent/points.csv", "--k", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn parse_error_names_line_and_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "1,2\n3,oops\n").unwrap();
    let out = orf(&[
        "sigma",
        "--input",
        path.to_str().unwrap(),
        "--k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn degenerate_auto_sigma_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("same.csv");
    std::fs::write(&path, "1,1\n".repeat(60)).unwrap();
    let out = orf(&[
        "mse-curve",
        "--input",
        path.to_str().unwrap(),
        "--kind",
        "rff",
        "--D",
        "4",
        "--pairs",
        "5",
        "--seeds",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn synth_then_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.csv");
    let out = orf(&[
        "synth",
        "--kind",
        "gaussian",
        "--n",
        "30",
        "--d",
        "3",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = orf(&[
        "sigma",
        "--input",
        path.to_str().unwrap(),
        "--k",
        "5",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("sigma\n"));
    let value: f64 = text.lines().nth(1).unwrap().parse().unwrap();
    assert!(value > 0.0);
}

#[test]
fn csv_header_is_first_line_everywhere() {
    for (args, header) in [
        (
            vec![
                "mse-curve", "--synth", "sphere", "--n", "70", "--d", "8", "--kind",
                "rff", "--D", "8", "--pairs", "5", "--seeds", "1", "--sigma", "1",
            ],
            "kind,d,D,mse,stderr,runtime_ns",
        ),
        (
            vec![
                "bias-variance", "--kind", "rff", "--d", "8", "--z", "1", "--trials",
                "50",
            ],
            "kind,d,z,bias,var_ratio,trials",
        ),
        (
            vec!["ortho-check", "--d", "8", "--t", "0.5", "--trials", "20"],
            "d,trials,row_norm_max_dev,recon_max_err,median_max_inner,t,exceed_frac",
        ),
        (
            vec![
                "angle-sim", "--kind", "rff", "--d", "8", "--D", "32", "--seeds", "3",
            ],
            "kind,d,D,theta,mean_estimate,angular_mse,seeds",
        ),
    ] {
        let out = orf(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next().unwrap(), header, "{args:?}");
    }
}

#[test]
fn timing_flag_populates_runtime_column() {
    let out = orf(&[
        "mse-curve", "--synth", "sphere", "--n", "70", "--d", "16", "--kind", "rff",
        "--D", "16", "--pairs", "5", "--seeds", "1", "--sigma", "1", "--timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let runtime: u64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!(runtime > 0, "{row}");
}

#[test]
fn sorf_transform_is_faster_than_rff_at_high_dim() {
    // Table-1 style check through the CLI timing column at d = 2048.
    let out = orf(&[
        "mse-curve", "--synth", "gaussian", "--n", "60", "--d", "2048", "--kind",
        "rff,sorf", "--D", "2048", "--pairs", "2", "--seeds", "1", "--sigma", "1",
        "--timing", "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let runtimes: Vec<u64> = text
        .lines()
        .skip(1)
        .map(|row| row.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(runtimes.len(), 2);
    assert!(
        runtimes[1] < runtimes[0],
        "sorf {} ns should beat rff {} ns",
        runtimes[1],
        runtimes[0]
    );
}
