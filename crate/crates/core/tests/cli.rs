use std::io::Write;
use std::process::{Command, Output, Stdio};

fn ncgamma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncgamma")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn batch_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|t| t.strip_prefix(&format!("{key}=")))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn central_cdf_line() {
    let o = ncgamma(&["cdf-central", "--a", "1", "--x", "2.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "p=9.1791500137610120e-1 q=8.2084998623898800e-2 ierr=0\n");
}

#[test]
fn inverfc_line() {
    let o = ncgamma(&["inverfc", "--y", "1e-1"]);
    assert_eq!(stdout(&o), "x=1.1630871536766740e0 ierr=0\n");
    let o = ncgamma(&["inverfc", "--y", "1e-2"]);
    assert_eq!(stdout(&o), "x=1.8213863677184496e0 ierr=0\n");
}

#[test]
fn infeasible_noncentrality() {
    let o = ncgamma(&[
        "inv-noncentral",
        "--target",
        "x",
        "--mu",
        "1",
        "--y",
        "5",
        "--q",
        "1e-3",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "ierr=1\n");
    assert!(!o.stderr.is_empty());
}

#[test]
fn exit_code_matches_ierr() {
    for args in [
        &["cdf-central", "--a", "-1", "--x", "1"][..],
        &["cdf-central", "--a", "1", "--x", "800"],
        &["inv-central", "--a", "2", "--p", "1e-200"],
        &[
            "inv-noncentral",
            "--target",
            "y",
            "--mu",
            "1",
            "--x",
            "5",
            "--p",
            "1e-30",
        ],
        &["gamma", "--x", "-3"],
        &["cdf-noncentral", "--mu", "3", "--x", "10", "--y", "7"],
    ] {
        let o = ncgamma(args);
        let out = stdout(&o);
        let ierr = out.trim().rsplit("ierr=").next().unwrap().parse::<i32>().unwrap();
        assert_eq!(o.status.code(), Some(ierr), "{args:?}: {out}");
    }
}

#[test]
fn usage_errors() {
    for args in [
        &["cdf-central", "--a", "1"][..],
        &["cdf-central", "--a", "abc", "--x", "1"],
        &["cdf-central", "--a", "inf", "--x", "1"],
        &["frobnicate"],
        &[],
        &[
            "inv-noncentral",
            "--target",
            "x",
            "--mu",
            "1",
            "--x",
            "2",
            "--y",
            "5",
            "--q",
            "0.5",
        ],
        &["inv-central", "--a", "2"],
        &["--batch", "-", "erf", "--x", "1"],
    ] {
        let o = ncgamma(args);
        assert_eq!(o.status.code(), Some(64), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn digits_and_round_trip() {
    let o = ncgamma(&["erf", "--x", "1", "--digits", "5"]);
    assert_eq!(stdout(&o), "value=8.4270e-1\n");
    for x in ["0.3", "2.5", "17.25", "-0.75"] {
        let o = ncgamma(&["gamma", "--x", x]);
        let v = field(&stdout(&o), "value");
        assert_eq!(v, ncgamma::gammafun(x.parse().unwrap()).unwrap());
    }
}

#[test]
fn kinds() {
    let a = stdout(&ncgamma(&[
        "cdf-noncentral",
        "--kind",
        "chi-square",
        "--mu",
        "4",
        "--x",
        "2",
        "--y",
        "3",
    ]));
    let b = stdout(&ncgamma(&["cdf-noncentral", "--mu", "2", "--x", "1", "--y", "1.5"]));
    assert_eq!(a, b);
}

#[test]
fn global_options_in_either_position() {
    let a = stdout(&ncgamma(&[
        "--kind",
        "chi-square",
        "cdf-noncentral",
        "--mu",
        "4",
        "--x",
        "2",
        "--y",
        "3",
    ]));
    let b = stdout(&ncgamma(&[
        "cdf-noncentral",
        "--mu",
        "4",
        "--x",
        "2",
        "--y",
        "3",
        "--kind",
        "chi-square",
    ]));
    assert_eq!(a, b);
    assert!(a.ends_with("ierr=0\n"));
}

#[test]
fn deterministic_output() {
    let args = [
        "inv-noncentral",
        "--target",
        "y",
        "--mu",
        "2.5",
        "--x",
        "40",
        "--q",
        "0.01",
    ];
    let (a, b) = (ncgamma(&args), ncgamma(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn batch_empty() {
    let f = batch_file("");
    let o = ncgamma(&["--batch", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn batch_order() {
    let f = batch_file("erf,x=0.5\ncdf-central,a=1,x=2.5\nerf,x=-0.5\n");
    let o = ncgamma(&["--batch", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "p=9.1791500137610120e-1 q=8.2084998623898800e-2 ierr=0");
    assert_eq!(field(lines[0], "value"), -field(lines[2], "value"));
}

#[test]
fn batch_noncentral_golden() {
    let f = batch_file(
        "cdf-noncentral,mu=5,x=150,y=30\ncdf-noncentral,mu=1,x=75,y=0.5\n\
         cdf-noncentral,mu=2,x=100,y=2\ncdf-noncentral,mu=10,x=100,y=1\n",
    );
    let o = ncgamma(&["--batch", f.path().to_str().unwrap()]);
    let want = [
        1.215915354045e-23,
        3.287840255874e-30,
        1.557081489535e-35,
        5.152185145235e-48,
    ];
    let out = stdout(&o);
    let got: Vec<f64> = out.lines().map(|l| field(l, "p")).collect();
    assert_eq!(got.len(), 4);
    for (g, w) in got.iter().zip(want) {
        assert!((g / w - 1.0).abs() <= 1e-12, "{g:e} vs {w:e}");
    }
}

#[test]
fn batch_malformed_lines() {
    let f = batch_file("erf,x=1\nerf,x\nbogus,a=1\ncdf-central,a=-1,x=1\nerfc,x=1\n");
    let o = ncgamma(&["--batch", f.path().to_str().unwrap()]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1], "ierr=64");
    assert_eq!(lines[2], "ierr=64");
    assert_eq!(lines[3], "ierr=2");
    assert!(lines[4].starts_with("value="));
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn batch_unreadable() {
    let o = ncgamma(&["--batch", "/nonexistent/requests.csv"]);
    assert_eq!(o.status.code(), Some(66));
}

#[test]
fn batch_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ncgamma"))
        .args(["--batch", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"loggam,x=11\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "value"), ncgamma::loggam(11.0).unwrap());
}
