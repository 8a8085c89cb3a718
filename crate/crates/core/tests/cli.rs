use std::process::{Command, Output};

fn ricecap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ricecap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn bound_single_point() {
    let out = ricecap(&[
        "bound", "--nt", "1", "--nr", "4", "--kappa", "5", "--snr-db", "0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert_eq!(
        text.lines().next().unwrap(),
        "kappa,upper_bound_capacity,upper_bound_err"
    );
    assert!((column(&text, "upper_bound_capacity")[0] - 5f64.ln()).abs() < 1e-8);
    assert!(text.ends_with('\n'));
}

#[test]
fn bits_and_nats_differ_by_ln2() {
    let args = [
        "sweep",
        "--variable",
        "n_r",
        "--grid",
        "1:8:8",
        "--methods",
        "upper_bound,quad_m1",
        "--kappa",
        "3",
    ];
    let nats = stdout(&ricecap(&args));
    let mut with_bits = args.to_vec();
    with_bits.extend(["--units", "bits"]);
    let bits = stdout(&ricecap(&with_bits));
    for col in ["upper_bound_capacity", "quad_m1_capacity"] {
        for (a, b) in column(&nats, col).iter().zip(column(&bits, col)) {
            // nine printed digits
            assert!((a / b - std::f64::consts::LN_2).abs() < 1e-8);
        }
    }
}

#[test]
fn negative_snr_and_range_grid() {
    let out = ricecap(&[
        "sweep",
        "--variable",
        "power_db",
        "--grid",
        "-10:10:5",
        "--methods",
        "deterministic",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(column(&text, "power_db"), vec![-10.0, -5.0, 0.0, 5.0, 10.0]);
}

#[test]
fn validation_errors_exit_nonzero_without_output() {
    for args in [
        vec!["sweep", "--variable", "kappa", "--grid", "0,1"],
        vec![
            "sweep",
            "--variable",
            "kappa",
            "--grid",
            "1,0",
            "--methods",
            "upper_bound",
        ],
        vec![
            "sweep",
            "--variable",
            "n_r",
            "--grid",
            "1,2",
            "--methods",
            "new_scheme_ub",
        ],
        vec!["capacity", "--method", "quad", "--nt", "2", "--nr", "2"],
        vec!["new-scheme", "--nr", "3"],
        vec!["figure", "12"],
        vec!["bound", "--units", "furlongs"],
        vec!["capacity", "--samples", "10"],
    ] {
        let out = ricecap(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(out.stdout.is_empty(), "{args:?} wrote output");
        assert!(!out.stderr.is_empty(), "{args:?} gave no diagnostic");
    }
}

#[test]
fn seed_controls_monte_carlo() {
    let base = [
        "capacity",
        "--nt",
        "2",
        "--nr",
        "2",
        "--kappa",
        "1",
        "--samples",
        "5000",
    ];
    let run = |seed: &str| {
        let mut a = base.to_vec();
        a.extend(["--seed", seed]);
        stdout(&ricecap(&a))
    };
    assert_eq!(run("1"), run("1"));
    assert_ne!(run("1"), run("2"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    std::fs::write(
        &path,
        r#"
variable = "n_t"
grid = [1, 2, 4]
methods = ["new_scheme_ub", "new_scheme_approx"]
[fixed]
kappa = 10
snr_db = 10
"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let text = stdout(&ricecap(&["sweep", "--config", cfg]));
    assert_eq!(column(&text, "n_t"), vec![1.0, 2.0, 4.0]);
    let ub = column(&text, "new_scheme_ub_capacity");
    assert!(
        (ub[1] - (1.0f64 + 10.0 / 11.0 * (1.0 + 10.0 / 11.0 + 200.0 / 11.0)).ln()).abs() < 1e-8
    );

    // the flag wins over the file
    let text = stdout(&ricecap(&["sweep", "--config", cfg, "--kappa", "0"]));
    for v in column(&text, "new_scheme_approx_capacity") {
        assert_eq!(v, 0.0);
    }

    let out = ricecap(&["sweep", "--config", "/definitely/missing.toml"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/missing.toml"));
}

#[test]
fn figure_presets_have_series_columns() {
    let out = ricecap(&["figure", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("n_r,quad_m1.kappa=0_capacity,"));
    assert!(header.contains("upper_bound.kappa=1_capacity"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let out = ricecap(&["figure", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 42);
}
