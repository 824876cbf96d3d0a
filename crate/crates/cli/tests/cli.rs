use std::path::Path;
use std::process::{Command, Output};

fn modelset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modelset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Data rows of a CSV or point file, comments dropped.
fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn generate_fibonacci_fragment() {
    let o = modelset(&[
        "generate",
        "--scheme",
        "fibonacci",
        "--window",
        "[-1,1/tau)",
        "--region",
        "-2",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(data_lines(&stdout(&o)), ["-1 0", "0 0", "0 1"]);
}

#[test]
fn generate_periodic_alias_lists_the_residues() {
    let o = modelset(&["generate", "--scheme", "periodic:32", "--window", "{A}"]);
    assert_eq!(code(&o), 0);
    let pts: Vec<u32> = data_lines(&stdout(&o))
        .iter()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(pts, modelset::homometry::SET_A);
}

#[test]
fn generate_empty_window_gives_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.txt");
    let o = modelset(&[
        "generate",
        "--scheme",
        "fibonacci",
        "--window",
        "empty",
        "--region",
        "0",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(data_lines(&std::fs::read_to_string(&out).unwrap()).is_empty());
}

#[test]
fn generate_thinned_rows_plot() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("rows.svg");
    let o = modelset(&[
        "generate",
        "--scheme",
        "fibonacci",
        "--window",
        "fib",
        "--region",
        "-12",
        "12",
        "--thin",
        "A",
        "--thin",
        "B",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    let rows = text.matches("<text").count();
    assert_eq!(rows, 3);
    let full = data_lines(&String::from_utf8_lossy(&o.stdout)).len();
    assert!(text.matches("<circle").count() < 2 * full);
}

#[test]
fn correlate_order_two_contains_tau_row() {
    let o = modelset(&[
        "correlate",
        "--scheme",
        "fibonacci",
        "--window",
        "fib",
        "--order",
        "2",
        "--cutoff",
        "5",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "0+1*tau,0.447213595499958"));
}

#[test]
fn correlate_zero_cutoff_gives_density_only() {
    let o = modelset(&[
        "correlate",
        "--scheme",
        "fibonacci",
        "--window",
        "fib",
        "--cutoff",
        "0",
    ]);
    let text = stdout(&o);
    assert_eq!(
        data_lines(&text),
        ["diff1,frequency", "0+0*tau,0.723606797749979"]
    );
}

#[test]
fn correlate_compare_thinned_sets() {
    let base = [
        "correlate",
        "--scheme",
        "combined:32",
        "--window",
        "fib x {A}",
        "--compare",
        "fib x {B}",
    ];
    for order in ["2", "3"] {
        let mut args = base.to_vec();
        args.extend(["--order", order, "--cutoff", "5"]);
        let o = modelset(&args);
        assert_eq!(code(&o), 0);
        assert!(stdout(&o).starts_with("EQUAL"), "{}", stdout(&o));
    }
    let o = modelset(&[
        "correlate",
        "--scheme",
        "combined:32",
        "--window",
        "fib x {A}",
        "--compare",
        "[-1,0) x {A}",
    ]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).starts_with("DIFFERENT"));
}

#[test]
fn correlate_bad_pattern_is_a_parameter_error() {
    let o = modelset(&[
        "correlate",
        "--scheme",
        "fibonacci",
        "--window",
        "fib",
        "--pattern",
        "tau,1+",
    ]);
    assert_eq!(code(&o), 2);
    let o = modelset(&[
        "correlate",
        "--scheme",
        "fibonacci",
        "--window",
        "fib",
        "--pattern",
        "1/2",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn correlate_pattern_with_empirical_column() {
    let o = modelset(&[
        "correlate",
        "--scheme",
        "fibonacci",
        "--window",
        "fib",
        "--pattern",
        "tau",
        "--empirical",
        "10000",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows = data_lines(&text);
    assert_eq!(rows[0], "pattern,exact,empirical");
    let fields: Vec<f64> = rows[1]
        .rsplit(',')
        .take(2)
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((fields[0] - fields[1]).abs() < 0.02 * fields[1] + 1e-3);
}

#[test]
fn diffract_periodic_full_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let run = |w: &str, tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let svg = dir.path().join(format!("{tag}.svg"));
        let o = modelset(&[
            "diffract",
            "--scheme",
            "periodic:32",
            "--window",
            w,
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        (
            std::fs::read_to_string(csv).unwrap(),
            std::fs::read_to_string(svg).unwrap(),
        )
    };
    let (csv_a, svg_a) = run("{A}", "a");
    let (csv_b, _) = run("{B}", "b");
    assert_eq!(csv_a, csv_b);
    let rows = data_lines(&csv_a);
    assert_eq!(rows.len(), 34);
    let zeros: Vec<i64> = rows[1..]
        .iter()
        .filter_map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[2].parse::<f64>().unwrap() < 1e-12).then(|| f[0].parse().unwrap())
        })
        .collect();
    assert_eq!(zeros, (1..16).map(|b| 2 * b).collect::<Vec<i64>>());
    assert!(svg_a.contains(">4/32<"));
}

#[test]
fn diffract_kmax_zero_is_the_central_peak() {
    let o = modelset(&[
        "diffract",
        "--scheme",
        "fibonacci",
        "--window",
        "fib",
        "--kmax",
        "0",
    ]);
    let text = stdout(&o);
    assert_eq!(
        data_lines(&text),
        ["m,n,k,intensity", "0,0,0,0.523606797749979"]
    );
}

#[test]
fn diffract_incompatible_window() {
    let o = modelset(&["diffract", "--scheme", "periodic:32", "--window", "fib"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reconstruct_selftest_and_deck_file() {
    let dir = tempfile::tempdir().unwrap();
    let deck = dir.path().join("deck.json");
    let report = dir.path().join("report.json");
    let o = modelset(&[
        "reconstruct",
        "--selftest",
        "--window",
        "[0,1)u[1.5,2.25)",
        "--grid",
        "512",
        "--write-deck",
        deck.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(json["mismatch"].as_f64().unwrap() < 0.01);
    assert_eq!(json["M"], 512);

    let csv = dir.path().join("cells.csv");
    let o = modelset(&[
        "reconstruct",
        "--deck",
        deck.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let cells = data_lines(&std::fs::read_to_string(&csv).unwrap()).len();
    assert_eq!(cells, 513);
}

#[test]
fn reconstruct_symmetric_window() {
    let o = modelset(&[
        "reconstruct",
        "--selftest",
        "--window",
        "[-0.5,0.5)",
        "--grid",
        "256",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn reconstruct_errors_map_to_exit_codes() {
    let o = modelset(&["reconstruct", "--selftest", "--window", "[0,1"]);
    assert_eq!(code(&o), 2);
    let o = modelset(&[
        "reconstruct",
        "--selftest",
        "--window",
        "[0,1)",
        "--grid",
        "1024",
    ]);
    assert_eq!(code(&o), 4);
    // an impossible threshold turns a perfect recovery into a failure
    let o = modelset(&[
        "reconstruct",
        "--selftest",
        "--window",
        "[0,1)",
        "--grid",
        "128",
        "--threshold",
        "0",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn homometry_default_passes() {
    let o = modelset(&["homometry"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.matches("PASS").count(), 4, "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn homometry_order_four_witness() {
    let o = modelset(&["homometry", "--order", "4"]);
    assert!(stdout(&o).contains("differ: tuple ["));
}

#[test]
fn homometry_same_set_is_rigidly_equivalent() {
    let o = modelset(&["homometry", "--sets", "A", "A"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("rigid equivalence (+,0)"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "diffract",
        "--scheme",
        "fibonacci",
        "--window",
        "fib",
        "--kmax",
        "2",
    ];
    assert_eq!(modelset(&args).stdout, modelset(&args).stdout);
    let args = [
        "correlate",
        "--scheme",
        "combined:32",
        "--window",
        "fib x {B}",
        "--order",
        "3",
        "--cutoff",
        "3",
    ];
    assert_eq!(modelset(&args).stdout, modelset(&args).stdout);
}

#[test]
fn help_names_what_each_command_reproduces() {
    for cmd in [
        "generate",
        "correlate",
        "diffract",
        "reconstruct",
        "homometry",
    ] {
        let o = modelset(&[cmd, "--help"]);
        assert!(stdout(&o).contains("Reproduces"), "{cmd}");
    }
}

#[test]
fn thread_count_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_modelset"))
            .env("MODELSET_THREADS", v)
            .args(["homometry"])
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("2")), 0);
    assert_eq!(code(&run("zero")), 2);
}

#[test]
fn out_file_is_written_without_leftovers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pts.txt");
    let o = modelset(&[
        "generate",
        "--scheme",
        "periodic:8",
        "--window",
        "{0,3}",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, [Path::new("pts.txt").as_os_str()]);
}
