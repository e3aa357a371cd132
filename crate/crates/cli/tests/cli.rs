use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edgestates"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with(config: &str, ext: &str, args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(format!("run.{ext}"));
    std::fs::write(&path, config).unwrap();
    let mut all = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--config", &p]);
    run(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parsed CSV: header plus rows of fields.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (
        header,
        lines.map(|l| l.split(',').map(String::from).collect()).collect(),
    )
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn constants_are_in_range() {
    let o = run(&["constants"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let theta0 = v["constants"]["theta0"].as_f64().unwrap();
    let theta1 = v["constants"]["theta1"].as_f64().unwrap();
    assert!((0.585..=0.595).contains(&theta0));
    assert!((2.625..=2.635).contains(&theta1));
}

#[test]
fn refined_constants_report_error_trend() {
    let o = run(&["constants", "--refine", "1", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["name", "value", "error", "refinement"]);
    for r in &rows {
        assert!(r[3] == "halved" || r[3] == "stalled");
    }
    assert_eq!(rows[0][3], "halved");
}

#[test]
fn halfcyl_sample_config() {
    let o = run(&["halfcyl", "--config", configs().join("halfcyl.toml").to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let (h, rows) = csv_rows(&text);
    assert_eq!(
        h,
        [
            "h",
            "S",
            "B",
            "lambda",
            "N_exact",
            "N_oracle",
            "estimate_lhs",
            "estimate_rhs"
        ]
    );
    let (exact, oracle) = (column(&h, &rows, "N_exact"), column(&h, &rows, "N_oracle"));
    assert_eq!(exact, oracle);
    let (lhs, rhs, hs) = (
        column(&h, &rows, "estimate_lhs"),
        column(&h, &rows, "estimate_rhs"),
        column(&h, &rows, "h"),
    );
    for i in 0..rows.len() {
        assert!(lhs[i] <= rhs[i]);
        assert_eq!(rhs[i], hs[i].sqrt());
    }
    // the explicit row sits below hΘ₀B
    assert_eq!(*exact.last().unwrap(), 0.0);
}

#[test]
fn halfcyl_rejects_rows_at_threshold() {
    let o = run_with(
        "[[rows]]\nh = 0.01\ns = 1.0\nb = 1.0\nlambda = 0.01\n",
        "toml",
        &["halfcyl"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda < hB"));
    assert!(o.stdout.is_empty());
}

#[test]
fn csv_format_contract() {
    let o = run_with("beta = [0.7, 0.8]\n", "toml", &["nu"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains('\r') && text.ends_with('\n'));
    let (h, rows) = csv_rows(&text);
    assert_eq!(h, ["beta", "nu_minus", "nu_plus", "width"]);
    for field in rows.iter().flatten() {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
        assert!(!field.contains(','));
    }
}

#[test]
fn json_config_fallback_and_json_output() {
    let o = run_with(r#"{"xi": [-0.5, 0.0]}"#, "json", &["mu", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["mu"].as_f64().unwrap() < rows[1]["mu"].as_f64().unwrap());
}

#[test]
fn bad_configs_exit_with_2() {
    assert_eq!(
        run_with("xi = [0.0]\nzeta = 3\n", "toml", &["mu"]).status.code(),
        Some(2)
    );
    assert_eq!(run_with("this is not a config", "toml", &["nu"]).status.code(), Some(2));
    // b0 above the field violates the edge-term precondition
    let weyl = "side = \"interior\"\nfield = 1.0\nb0 = [1.2]\n[curve]\nshape = \"circle\"\nr = 1.0\n";
    assert_eq!(run_with(weyl, "toml", &["weyl"]).status.code(), Some(2));
}

#[test]
fn weyl_circle_matches_closed_form() {
    // constant field on the unit circle: main term = sqrt(B) (nu+ - nu-)(b0/B) with B = 1
    let weyl = "side = \"interior\"\nfield = 1.0\nb0 = [0.8]\n[curve]\nshape = \"circle\"\nr = 1.0\n";
    let o = run_with(weyl, "toml", &["weyl"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let main = v["edge"][0]["prediction"]["main_term"].as_f64().unwrap();
    let n = run_with("beta = [0.8]\n", "toml", &["nu"]);
    let text = stdout(&n);
    let (h, rows) = csv_rows(&text);
    let width = column(&h, &rows, "width")[0];
    assert!((main - width).abs() < 1e-9, "{main} vs {width}");
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("strip.toml");
    let mut outs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("strip{threads}.csv"));
        let o = run(&[
            "strip",
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert!(!outs[0].is_empty());
}

#[test]
fn verify_disk_sample_and_failing_threshold() {
    let o = run(&["verify-disk", "--config", configs().join("disk.toml").to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let (h, rows) = csv_rows(&text);
    let err = column(&h, &rows, "rel_err");
    assert!(err.windows(2).all(|w| w[1] < w[0]), "{err:?}");
    // impossible threshold: table still written, exit 3
    let strict =
        "b0 = 0.8\nh = [4e-3]\nfield = { kind = \"constant\", b = 1.0 }\n[thresholds]\nmax_final_rel_err = 1e-9\n";
    let o = run_with(strict, "toml", &["verify-disk"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn exterior_theorem2_predicts_zero() {
    let cfg = "side = \"exterior\"\nb = 1.0\nkappa0 = 0.0\nh = [1e-3, 5e-4]\n[thresholds]\nmax_count = 2\n";
    let o = run_with(cfg, "toml", &["theorem2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let (h, rows) = csv_rows(&text);
    assert!(column(&h, &rows, "prediction").iter().all(|&p| p == 0.0));
}

#[test]
fn strip_rejects_large_curvature() {
    let cfg = "s = 1.0\nt = 0.5\nb = 1.0\nh = [0.01]\nkappa = [1.5]\nbc = \"dirichlet\"\nbeta = [0.8]\n";
    assert_eq!(run_with(cfg, "toml", &["strip"]).status.code(), Some(2));
}
