use std::process::{Command, Output};

use hypercover::designs::Design;
use hypercover::sweep::{from_csv, from_json};

fn hypercover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercover")).args(args).output().expect("failed to run hypercover")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn geometry_examples() {
    let text = stdout(&hypercover(&["geometry", "--table7"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,r_d,r_d_full");
    assert_eq!(lines.len(), 19);
    assert!(lines[10].starts_with("10,0.911,"));
    assert!(lines[18].starts_with("1000,7.683,"));

    let text = stdout(&hypercover(&["geometry", "--ball-volume", "--dim", "100"]));
    let v: f64 = text.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((v / 2.368e-40 - 1.0).abs() < 5e-3);

    let text = stdout(&hypercover(&["geometry", "--cap", "--dim", "3", "--r", "1", "--h", "0.5"]));
    let v: f64 = text.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((v - 0.654498).abs() < 1e-6);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["local-cover", "--dim", "10", "--r", "1.2", "--method", "bogus"][..],
        &["cover", "--d", "10", "--n", "64"],
        &["cover", "--d", "10", "--n", "64", "--scheme", "s9", "--r", "1"],
        &["cover", "--d", "10", "--n", "64", "--delta", "1.5", "--r", "1"],
        &["geometry"],
        &["table", "--id", "8"],
        &["design", "--d", "5", "--n", "12", "--scheme", "s3"],
    ] {
        let out = hypercover(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn local_cover_is_reproducible() {
    let args = ["local-cover", "--dim", "10", "--z-norm", "0", "--r", "1.2", "--method", "mc", "--samples", "200000", "--seed", "7"];
    let a = hypercover(&args);
    let b = hypercover(&args);
    assert_eq!(stdout(&a), stdout(&b));
    let adjusted = stdout(&hypercover(&["local-cover", "--dim", "10", "--z-norm", "0", "--r", "1.2", "--method", "adjusted"]));
    let value = |s: &str| -> f64 { s.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap() };
    let mc = stdout(&a);
    assert!((value(&adjusted) - value(&mc)).abs() < 0.01);
}

#[test]
fn cover_sweep_csv_round_trips() {
    let text = stdout(&hypercover(&[
        "cover", "--d", "10", "--n", "128", "--sweep-delta", "0.5:1.0:0.1", "--r", "1.520", "--samples", "20000",
        "--replications", "5", "--seed", "3",
    ]));
    assert!(text.starts_with("delta,value,stderr,method,d,n,r,scheme,seed\n"));
    let rows = from_csv(&text).unwrap();
    assert_eq!(rows.len(), 6);
    let best = rows.iter().max_by(|a, b| a.value.total_cmp(&b.value)).unwrap();
    assert!((best.delta - 0.78).abs() <= 0.12, "{best:?}");
    assert!(rows.iter().all(|r| r.r == Some(1.52) && r.scheme == "s1" && r.seed == 3));

    let json = stdout(&hypercover(&[
        "cover", "--d", "10", "--n", "128", "--sweep-delta", "0.5:1.0:0.1", "--r", "1.520", "--samples", "20000",
        "--replications", "5", "--seed", "3", "--format", "json",
    ]));
    let out = from_json(&json).unwrap();
    assert_eq!(out.rows, rows);
    assert_eq!(out.provenance.test_points, 20000);
}

#[test]
fn cover_target_and_approximations() {
    let text = stdout(&hypercover(&[
        "cover", "--d", "20", "--n", "64", "--scheme", "s5", "--delta", "1.4", "--target", "0.9", "--samples", "20000",
        "--replications", "10",
    ]));
    let row = &from_csv(&text).unwrap()[0];
    assert!((row.r.unwrap() - 2.550).abs() < 0.02, "{row:?}");
    assert!(row.value >= 0.899);

    let text = stdout(&hypercover(&[
        "cover", "--d", "50", "--n", "512", "--delta", "0.45", "--r", "4.02", "--method", "approx2",
    ]));
    let row = &from_csv(&text).unwrap()[0];
    assert!((row.value - 0.9).abs() < 0.015);
}

#[test]
fn cube_cover_and_quantize() {
    let text = stdout(&hypercover(&["cube-cover", "--d", "1", "--n", "1", "--r", "0.5", "--delta", "1"]));
    assert_eq!(from_csv(&text).unwrap()[0].value, 0.4375);
    let text = stdout(&hypercover(&["cube-cover", "--d", "10", "--n", "128", "--r", "0.7", "--sweep-delta", "0.2:1.0:0.2"]));
    let rows = from_csv(&text).unwrap();
    assert!(rows.iter().all(|r| r.scheme == "cube-uniform" && r.method == "closed-form"));

    let text = stdout(&hypercover(&["quantize", "--d", "10", "--n", "64", "--delta", "0.0001", "--method", "approx"]));
    let row = &from_csv(&text).unwrap()[0];
    assert!(row.r.is_none());
    let plain = 10.0 / 3.0 * 64f64.powf(0.2);
    assert!((row.value - plain).abs() / plain < 1e-3);
}

#[test]
fn design_output() {
    let json = stdout(&hypercover(&["design", "--d", "4", "--n", "8", "--scheme", "s7", "--delta", "0.5", "--format", "json"]));
    let design = Design::from_json(&json).unwrap();
    assert_eq!((design.d, design.n), (4, 8));
    let csv = stdout(&hypercover(&["design", "--d", "4", "--n", "8", "--scheme", "s7", "--delta", "0.5"]));
    assert_eq!(csv, design.to_csv());
    let warn = hypercover(&["cover", "--d", "10", "--n", "64", "--scheme", "s7", "--r", "1.6", "--replications", "3", "--samples", "1000"]);
    assert!(String::from_utf8_lossy(&warn.stderr).contains("deterministic"));
}

#[test]
fn table_reference_and_filters() {
    let text = stdout(&hypercover(&["table", "--id", "1", "--reference-only", "--schemes", "s1,s7"]));
    assert_eq!(text.lines().count(), 1 + 4 * 4);
    assert!(text.contains("1,s1,10,64,1.632,0.70"));
    let text = stdout(&hypercover(&["table", "--id", "7"]));
    assert_eq!(text.lines().filter(|l| l.ends_with(",PASS")).count(), 18);
}
