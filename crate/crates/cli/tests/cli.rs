use std::process::Command;

use clap::Parser;
use hypdiv_cli::commands::{parse_cap, probe_grid, ProbeArgs};
use hypdiv_cli::report::parse_csv;
use hypdiv_cli::{run, Cell, Cli, ReportDocument};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hypdiv"));
    cmd.env_remove("HYPERGEO_SUPPORT_CAP");
    cmd
}

fn report(args: &[&str]) -> ReportDocument {
    let cli = Cli::try_parse_from(std::iter::once("hypdiv").chain(args.iter().copied())).unwrap();
    run(&cli).unwrap().report
}

fn value(doc: &ReportDocument, row: usize, column: &str) -> f64 {
    doc.rows[row][doc.column(column).unwrap()].as_f64().unwrap()
}

#[test]
fn divergence_examples() {
    let doc = report(&[
        "divergence",
        "--target",
        "bin",
        "-N",
        "4",
        "-K",
        "2",
        "-n",
        "2",
    ]);
    assert!((value(&doc, 0, "exact") - 0.056_633_012_265_132_49).abs() < 1e-15);
    assert_eq!(value(&doc, 0, "chi2"), 1.0 / 9.0);

    let doc = report(&[
        "divergence",
        "--target",
        "bin",
        "-N",
        "10",
        "-K",
        "5",
        "-n",
        "1",
    ]);
    assert_eq!(value(&doc, 0, "exact"), 0.0);

    let doc = report(&[
        "divergence",
        "--target",
        "poisson",
        "-N",
        "2",
        "-K",
        "2",
        "-n",
        "2",
    ]);
    assert!((value(&doc, 0, "exact") - (2.0 - std::f64::consts::LN_2)).abs() < 1e-15);
}

#[test]
fn colors_and_counts_agree() {
    let a = report(&["divergence", "-N", "30", "-K", "11", "-n", "9"]);
    let b = report(&[
        "divergence",
        "--colors",
        "11,19",
        "-n",
        "9",
        "--target",
        "multinomial",
    ]);
    let (x, y) = (value(&a, 0, "exact"), value(&b, 0, "exact"));
    assert!((x - y).abs() <= 1e-12 * x);
    assert_eq!(a.columns, b.columns);
}

#[test]
fn bounds_flag_the_failing_log_bound() {
    let doc = report(&["bounds", "-N", "20", "-K", "1", "-n", "20"]);
    let status = doc.column("status").unwrap();
    let row = doc
        .rows
        .iter()
        .find(|r| r[0] == Cell::Text("log_integral".into()))
        .unwrap();
    assert_eq!(row[status], Cell::Text("violated".into()));
    assert!(doc
        .rows
        .iter()
        .filter(|r| r[0] != Cell::Text("log_integral".into()))
        .all(|r| r[status] != Cell::Text("violated".into())));
}

#[test]
fn first_dataset() {
    let doc = report(&["figure1"]);
    assert_eq!(doc.rows.len(), 199);
    assert_eq!(
        doc.columns,
        [
            "K",
            "exact",
            "stam_lower",
            "stam_upper",
            "new_lower",
            "new_upper"
        ]
    );
    for i in 0..199 {
        let exact = value(&doc, i, "exact");
        assert!((exact - value(&doc, 198 - i, "exact")).abs() <= 1e-12);
        assert!(value(&doc, i, "new_lower") <= exact);
        assert!(value(&doc, i, "stam_lower") <= exact);
        assert!(exact <= value(&doc, i, "new_upper"));
        assert!(exact <= value(&doc, i, "stam_upper"));
    }
    let middle = 99;
    assert_eq!(value(&doc, middle, "K"), 100.0);
    assert!((value(&doc, middle, "new_lower") - 10100.0 / 158_404.0).abs() < 1e-16);
    assert!((value(&doc, middle, "stam_upper") - 10100.0 / 39800.0).abs() < 1e-16);
}

#[test]
fn second_dataset() {
    let doc = report(&["figure2", "--points", "999"]);
    for column in ["stam_upper", "stam_lower", "new_lower", "new_upper"] {
        assert!(value(&doc, 0, column) < 1e-5, "{column}");
    }
    let half = doc
        .rows
        .iter()
        .position(|r| r[0] == Cell::Float(0.5))
        .unwrap();
    assert!((value(&doc, half, "new_lower") - 0.096_573_590_279_972_65).abs() < 1e-15);
    for i in 0..doc.rows.len() {
        if value(&doc, i, "q") >= 0.9 {
            assert!(value(&doc, i, "new_lower") > value(&doc, i, "stam_lower"));
            assert!(value(&doc, i, "new_upper") < value(&doc, i, "stam_upper"));
        }
    }
    let finite = report(&["figure2", "--points", "9", "-N", "2000"]);
    let limit = report(&["figure2", "--points", "9"]);
    for i in 0..9 {
        let (a, b) = (
            value(&finite, i, "new_lower"),
            value(&limit, i, "new_lower"),
        );
        assert!((a - b).abs() < 5e-3, "{a} vs {b}");
    }
}

#[test]
fn csv_output_reparses_bit_for_bit() {
    for args in [
        vec!["figure1", "-N", "60", "-n", "31"],
        vec!["figure2", "--points", "50"],
        vec![
            "divergence",
            "--colors",
            "3,4,5",
            "-n",
            "6",
            "--target",
            "multinomial",
        ],
        vec!["asymptote", "--Nmax", "400", "--steps", "8"],
    ] {
        let doc = report(&args);
        let (columns, rows) = parse_csv(&doc.to_csv().unwrap()).unwrap();
        assert_eq!(columns, doc.columns);
        assert_eq!(rows, doc.rows, "{args:?}");
    }
}

#[test]
fn json_output_round_trips() {
    let doc = report(&[
        "bounds",
        "--colors",
        "2,3,4",
        "-n",
        "5",
        "--target",
        "multinomial",
    ]);
    assert_eq!(
        ReportDocument::from_json(&doc.to_json().unwrap()).unwrap(),
        doc
    );
}

#[test]
fn seeded_grid_is_reproducible() {
    let args = |seed| ProbeArgs {
        max_draws: 13,
        points: 50,
        seed,
    };
    let plain = probe_grid(&args(None));
    assert_eq!(plain[0], 1.0 / 51.0);
    let a = probe_grid(&args(Some(3)));
    assert_eq!(a, probe_grid(&args(Some(3))));
    assert_ne!(a, probe_grid(&args(Some(4))));
    assert!(a.iter().all(|&p| p > 0.0 && p < 1.0));
    assert!(a.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn cap_parsing() {
    assert_eq!(parse_cap("1000").unwrap().0, 1000);
    assert_eq!(parse_cap("1e7").unwrap().0, 10_000_000);
    assert!(parse_cap("0.5").is_err());
    assert!(parse_cap("lots").is_err());
}

#[test]
fn binary_exit_codes() {
    let out = bin().args(["verify", "phi"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (columns, rows) = parse_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(columns, ["suite", "check", "value", "threshold", "status"]);
    assert!(rows.iter().all(|r| r[4] == Cell::Text("pass".into())));

    let out = bin()
        .args([
            "verify",
            "asymptote",
            "--Nmax",
            "40",
            "--steps",
            "4",
            "--tolerance",
            "1e-9",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    for args in [
        vec!["verify", "nonsense"],
        vec!["divergence", "-N", "4", "-K", "5", "-n", "2"],
        vec!["divergence", "-N", "4", "-K", "2", "-n", "7"],
        vec![
            "divergence",
            "--colors",
            "1,2,3",
            "-n",
            "2",
            "--target",
            "bin",
        ],
        vec!["figure2", "--points", "0"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }

    let out = bin()
        .args([
            "divergence",
            "--colors",
            "3,3,3",
            "-n",
            "4",
            "--target",
            "multinomial",
        ])
        .env("HYPERGEO_SUPPORT_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn binary_tilt_suite_reports_counts() {
    let out = bin()
        .args(["verify", "tilt", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc = ReportDocument::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let count = |name: &str| {
        doc.rows
            .iter()
            .find(|r| r[1] == Cell::Text(name.into()))
            .map(|r| r[2].clone())
            .unwrap()
    };
    assert_eq!(count("nondegenerate_cases"), Cell::Int(78));
    assert_eq!(count("inclusive_count"), Cell::Int(91));
    let cases = doc
        .rows
        .iter()
        .filter(|r| r[4] == Cell::Text("pass".into()))
        .count();
    assert_eq!(cases, 78);
}
