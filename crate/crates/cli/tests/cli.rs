use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerofree"))
        .args(args)
        .env("ZEROFREE_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Schema check: exact header, LF endings, one field per column, numeric fields round-trip
/// as f64 with 17 significant digits; `text_columns` are exempt from the numeric check.
fn check_csv(csv: &str, header: &str, text_columns: &[usize]) {
    assert!(!csv.contains('\r'));
    assert!(csv.ends_with('\n'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(header));
    let width = header.split(',').count();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), width, "{line}");
        for (i, f) in fields.iter().enumerate() {
            if text_columns.contains(&i) {
                continue;
            }
            let x: f64 = f.parse().unwrap_or_else(|_| panic!("{line}"));
            assert!(x.is_finite(), "{line}");
            assert_eq!(format!("{x:.16e}"), *f, "{line}");
        }
    }
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').filter_map(|x| x.parse().ok()).collect())
        .collect()
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["density", "--step", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["cdf", "--c", "0.4"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["sigma-lattice", "/nonexistent/lattice.json"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["poles"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"], dir.path()).status.code(), Some(2));
}

#[test]
fn constants_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&["constants"], dir.path());
    let b = run(&["constants"], dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((v["K1"].as_f64().unwrap() - 39.47841).abs() < 5e-4);
    assert!((v["K2"].as_f64().unwrap() - 0.822467).abs() < 5e-6);
    assert!(v["err_estimates"]["K2"].as_f64().unwrap() < 5e-6);
}

#[test]
fn poles_table_has_one_record_per_index() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["poles", "--a", "2", "--n-max", "5"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    check_csv(&text, "a,n,re_zeta,im_zeta,re_dzeta_da,im_dzeta_da,residual", &[1]);
    let r = rows(&text);
    assert_eq!(r.len(), 6);
    assert_eq!(r[0][2], 0.0);
    assert!(r.iter().all(|x| x[3] < 0.0 && x[6] < 1e-12));
    // second call is served from the cache and is byte-identical
    assert_eq!(run(&["poles", "--a", "2", "--n-max", "5"], dir.path()).stdout, o.stdout);
}

#[test]
fn cdf_and_density_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cdf.csv");
    let o = run(&["cdf", "--c", "0.51,1,10", "-o", out.to_str().unwrap()], dir.path());
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    check_csv(&text, "c,cdf,abs_err_est", &[]);
    let r = rows(&text);
    assert!((r[1][1] - 2.0 / std::f64::consts::PI).abs() < 1e-10);

    let o = run(&["density", "--c-min", "0.6", "--c-max", "1.0", "--step", "0.1"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    check_csv(&text, "c,f_c,method,abs_err_est,discrepancy", &[2]);
    assert_eq!(text.lines().count(), 6);
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[2], "both");
        assert!(f[4].parse::<f64>().unwrap().abs() < 1e-8, "{line}");
    }
    let o = run(&["density", "--c", "1", "--method", "residue"], dir.path());
    assert!(stdout(&o).contains(",residue,"));
}

#[test]
fn montecarlo_small_runs_are_flagged_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["montecarlo", "--samples", "10", "--seed", "7", "--c", "0.6,1,2"];
    let a = run(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&args, dir.path()).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["wide_uncertainty"], true);
    assert_eq!(v["n_samples"], 10);
    assert_eq!(v["empirical_cdf"].as_array().unwrap().len(), 3);
}

#[test]
fn sigma_lattice_square_and_shear() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = dir.path().join("z2.json");
    std::fs::write(&z2, r#"{"dimension":2,"basis":[[1,0],[0,1]]}"#).unwrap();
    let o = run(&["sigma-lattice", z2.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sigma_tilde"], "inf");
    assert_eq!(v["m_L"], 1.0);

    let shear = dir.path().join("shear.json");
    std::fs::write(&shear, r#"{"dimension":2,"basis":[[1,0],[0.3,1.1]]}"#).unwrap();
    let o = run(&["sigma-lattice", shear.to_str().unwrap()], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = v["sigma_tilde"].as_f64().unwrap();
    assert!(s > 1.0 && s.is_finite());
    // covolume 1.1 is rejected when normalization is off
    let o = run(&["sigma-lattice", "--no-normalize", shear.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn nu_curve_is_nonnegative_with_oracle_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["nu", "--log-primes", "6", "--sigma-step", "0.1", "--check-shift", "0.5", "--oracle-height", "100"],
        dir.path(),
    );
    assert!(o.status.success());
    let text = stdout(&o);
    check_csv(&text, "sigma,nu,err_estimate", &[]);
    assert!(rows(&text).iter().all(|r| r[1] >= -1e-8));
    let notes: Vec<serde_json::Value> = String::from_utf8(o.stderr)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(notes[0]["max_shift_residual"].as_f64().unwrap() < 1e-10);
    assert!(notes[1]["zeros"].as_u64().unwrap() > 0);
}

#[test]
fn degenerate_lattice_spectrum_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = dir.path().join("z2.json");
    std::fs::write(&z2, r#"{"dimension":2,"basis":[[1,0],[0,1]]}"#).unwrap();
    let o = run(&["nu", "--lattice", z2.to_str().unwrap(), "--k", "8"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let diag: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "DegenerateSpectrum");
}

#[test]
fn default_density_grid_has_400_rows_and_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["density"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    check_csv(&text, "c,f_c,method,abs_err_est,discrepancy", &[2]);
    let r: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 2).map(|(_, x)| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(r.len(), 400);
    assert!((r[0][0] - 0.505).abs() < 1e-12 && (r[399][0] - 2.5).abs() < 1e-12);
    for row in &r {
        let tol = if row[0] <= 1.0 { 1e-8 } else { 1e-6 };
        assert!(row[3].abs() < tol, "c = {}: {}", row[0], row[3]);
    }
}

#[test]
fn nu_for_log_integers_is_nonnegative() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["nu", "--log-integers", "6", "--sigma-step", "0.05"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    check_csv(&text, "sigma,nu,err_estimate", &[]);
    assert!(rows(&text).iter().all(|r| r[1] >= -1e-6));
}
