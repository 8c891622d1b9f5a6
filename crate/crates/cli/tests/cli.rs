use std::path::PathBuf;
use std::process::{Command, Output};

fn pbcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbcurv"))
        .args(args)
        .env_remove("PBCURV_MAX_M")
        .output()
        .expect("run pbcurv")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes a spec file unique to this test process.
fn spec_file(tag: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("pbcurv-{}-{tag}.toml", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

#[test]
fn sphere_has_unit_curvature() {
    let o = pbcurv(&["curvature", "sphere"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let k = column(&stdout(&o), "K_full");
    assert_eq!(k.len(), 64);
    assert!(k.iter().all(|k| (k - 1.0).abs() < 1e-8), "{k:?}");
}

#[test]
fn hyperbolic_plane_has_curvature_minus_one() {
    let o = pbcurv(&["curvature", "hyperbolic-plane", "--compare"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(column(&out, "K_full").iter().all(|k| (k + 1.0).abs() < 1e-8));
    assert!(column(&out, "K_oracle").iter().all(|k| (k + 1.0).abs() < 1e-8));
}

#[test]
fn null_tangent_is_a_geometric_error() {
    let path = spec_file(
        "null",
        "name = \"null\"\nm = 3\nnu = 1\ncoords = [\"u\", \"u\", \"v\"]\ndomain = [-1, 1, -1, 1]\ngrid = [3, 3]\n",
    );
    let p = path.to_str().unwrap();
    let o = pbcurv(&["curvature", p]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("(u, v) = ("), "{}", stderr(&o));

    let o = pbcurv(&["curvature", p, "--skip-degenerate", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recs = v.as_array().unwrap();
    assert_eq!(recs.len(), 9);
    assert!(recs.iter().all(|r| r["status"] == "skipped"));
}

#[test]
fn signature_index_above_dimension_is_rejected() {
    let path = spec_file(
        "nu",
        "name = \"bad\"\nm = 3\nnu = 4\ncoords = [\"u\", \"v\", \"u*v\"]\ndomain = [-1, 1, -1, 1]\ngrid = [3, 3]\n",
    );
    let o = pbcurv(&["curvature", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains(":3:") && err.contains("nu"), "{err}");
}

#[test]
fn unparseable_coordinate_cites_offset() {
    let path = spec_file(
        "coord",
        "name = \"bad\"\nm = 3\nnu = 0\ncoords = [\"u\", \"v\", \"u*+v\"]\ndomain = [-1, 1, -1, 1]\ngrid = [3, 3]\n",
    );
    let o = pbcurv(&["curvature", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("coords") && err.contains("offset 2"), "{err}");
}

#[test]
fn unknown_surface_is_a_config_error() {
    assert_eq!(pbcurv(&["curvature", "no-such-surface"]).status.code(), Some(2));
}

#[test]
fn de_sitter_sign_table() {
    let o = pbcurv(&["invariants", "de-sitter"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out
        .lines()
        .skip_while(|l| !l.contains("normal signs"))
        .nth(1)
        .unwrap();
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(&cols[..4], ["1", "1", "0", "+"], "{out}");
    assert!(row.ends_with("PASS"));

    let o = pbcurv(&["invariants", "de-sitter", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["signs"][0]["delta"], 0);
}

#[test]
fn every_catalog_surface_passes_invariants() {
    for name in [
        "plane",
        "sphere",
        "cylinder",
        "catenoid",
        "helicoid",
        "torus",
        "hyperbolic-plane",
        "de-sitter",
        "flat-torus-r4",
        "graph-surface-r4",
        "lorentz-graph-r41",
        "r5-product",
    ] {
        let o = pbcurv(&["invariants", name, "--grid", "4x4"]);
        assert!(o.status.success(), "{name}: {}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn impossible_tolerance_fails() {
    for name in ["sphere", "torus", "r5-product"] {
        let o = pbcurv(&["invariants", name, "--tolerance", "1e-15"]);
        assert_eq!(o.status.code(), Some(1), "{name}: {}", stdout(&o));
        assert!(stdout(&o).contains("FAIL"));
    }
}

#[test]
fn compare_flags_oracle_disagreement_beyond_tolerance() {
    let o = pbcurv(&["curvature", "torus", "--compare", "--tolerance", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let run = |threads: &str| pbcurv(&["curvature", "r5-graph", "--compare", "--threads", threads]).stdout;
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("4"));
    assert_eq!(one, run("7"));
}

#[test]
fn csv_and_json_agree() {
    let csv = stdout(&pbcurv(&["curvature", "torus", "--compare"]));
    let json: serde_json::Value =
        serde_json::from_slice(&pbcurv(&["curvature", "torus", "--compare", "--format", "json"]).stdout).unwrap();
    let recs = json.as_array().unwrap();
    for (name, key) in [("K_full", "K_full"), ("K_oracle", "K_oracle"), ("u", "u"), ("v", "v")] {
        let col = column(&csv, name);
        assert_eq!(col.len(), recs.len());
        for (c, r) in col.iter().zip(recs) {
            assert_eq!(*c, r[key].as_f64().unwrap(), "{name}");
        }
    }
    let h2 = column(&csv, "H_full_2");
    for (c, r) in h2.iter().zip(recs) {
        assert_eq!(*c, r["H_full"][2].as_f64().unwrap());
    }
}

#[test]
fn density_and_grid_overrides() {
    let base = pbcurv(&["curvature", "catenoid", "--grid", "5x3"]);
    let alt = pbcurv(&["curvature", "catenoid", "--grid", "5x3", "--rho", "expr:2+cos(v)"]);
    let unit = pbcurv(&["curvature", "catenoid", "--grid", "5x3", "--rho", "unit", "--contraction", "naive"]);
    for o in [&base, &alt, &unit] {
        assert!(o.status.success(), "{}", stderr(o));
    }
    let k0 = column(&stdout(&base), "K_full");
    assert_eq!(k0.len(), 15);
    for o in [&alt, &unit] {
        for (a, b) in k0.iter().zip(column(&stdout(o), "K_full")) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
    assert_eq!(pbcurv(&["curvature", "sphere", "--rho", "bogus"]).status.code(), Some(2));
    assert_eq!(pbcurv(&["curvature", "sphere", "--grid", "1x4"]).status.code(), Some(2));
}

const R9: &str = "name = \"r9\"\nm = 9\nnu = 0\ncoords = [\"u\", \"v\", \"u*v\", \"u^2\", \"v^2\", \"sin(u)\", \"sin(v)\", \"cos(u+v)\", \"u*v^2\"]\ndomain = [-1, 1, -1, 1]\ngrid = [2, 2]\n";

#[test]
fn bench_reports_both_paths() {
    let o = pbcurv(&["bench", "r5-graph", "--grid", "3x3", "--repetitions", "1", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], 5);
    assert_eq!(v["naive"]["work_per_call"], 25);
    assert!(v["max_disagreement"].as_f64().unwrap() <= 1e-12);
    assert!(v["ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn bench_beyond_cap_is_rejected() {
    let path = spec_file("r9", R9);
    let o = pbcurv(&["bench", path.to_str().unwrap(), "--repetitions", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('9'), "{}", stderr(&o));
}

#[test]
fn cap_follows_the_environment() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_pbcurv"))
            .args(["curvature", "r5-graph", "--grid", "3x3", "--contraction", "naive"])
            .env("PBCURV_MAX_M", cap)
            .output()
            .unwrap()
    };
    let o = run("4");
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(run("5").status.success());
}
