use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spacetimes")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn all_pass(v: &Value) -> bool {
    v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn euler_of_bundled_representations() {
    let out = run(&["euler", s(&data("octagon_genus2.json"))]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(v["schema"], "spacetimes.euler/1");
    assert_eq!(v["values"]["euler_class"], -2);
    assert_eq!(v["values"]["maximal"], true);
    assert_eq!(v["inputs"].as_object().unwrap().values().next().unwrap().as_str().unwrap().len(), 64);

    let out = run(&["euler", s(&data("trivial_genus2.json"))]);
    assert!(out.status.success());
    assert_eq!(report(&out)["values"]["euler_class"], 0);
}

#[test]
fn corrupt_input_gives_a_structured_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"genus\": 2, \"generators\": [[[1, 0], [0").unwrap();
    let out = run(&["euler", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(out.stderr.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(err["schema"], "spacetimes.error/1");
    assert!(out.stdout.is_empty());

    let out = run(&["--ball", "99", "euler", s(&data("octagon_genus2.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--tol", "0", "euler", s(&data("octagon_genus2.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flat_build_empty_multicurve_is_the_identity_development() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out",
        s(dir.path()),
        "--density",
        "60",
        "flat",
        "build",
        s(&data("octagon_genus2.json")),
        s(&data("multicurve_empty.json")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(&out);
    assert!(all_pass(&v));
    for t in v["values"]["cocycle"].as_array().unwrap() {
        assert!(t.as_array().unwrap().iter().all(|c| c.as_f64() == Some(0.0)));
    }
    assert_eq!(v["values"]["regions"], 1);
    // Identity development: developed points are the hyperboloid samples.
    let csv = std::fs::read_to_string(dir.path().join("surface.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!((f[0], f[1], f[2]), (f[6], f[7], f[8]));
    }
}

#[test]
fn flat_build_then_check_single_curve() {
    let dir = tempfile::tempdir().unwrap();
    let (rep, mc) = (data("octagon_genus2.json"), data("multicurve_a1.json"));
    let args = [
        "--out",
        s(dir.path()),
        "--density",
        "120",
        "flat",
        "build",
        s(&rep),
        s(&mc),
    ];
    let out = run(&args);
    assert!(out.status.success());
    let v = report(&out);
    assert!(all_pass(&v));
    for c in v["checks"].as_array().unwrap() {
        if c["name"].as_str().unwrap().starts_with("cocycle") {
            assert!(c["residual"].as_f64().unwrap() < 1e-8);
        }
    }
    for name in ["cocycle.json", "surface.obj", "surface.csv", "support_planes.json", "report.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let obj = std::fs::read_to_string(dir.path().join("surface.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 120);

    // Same inputs, seed and configuration: byte-identical report.
    let first = std::fs::read(dir.path().join("report.json")).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("report.json")).unwrap());

    let coc = dir.path().join("cocycle.json");
    let out = run(&["flat", "check", s(&data("octagon_genus2.json")), s(&coc)]);
    assert!(out.status.success());
    assert_eq!(report(&out)["schema"], "spacetimes.flat-check/1");

    // A perturbed cocycle breaks the relator: failed check, exit 1.
    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(&coc).unwrap()).unwrap();
    c["a1"][0] = Value::from(0.5);
    std::fs::write(&coc, c.to_string()).unwrap();
    let out = run(&["flat", "check", s(&data("octagon_genus2.json")), s(&coc)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!all_pass(&report(&out)));
}

fn cot(theta: f64) -> f64 {
    let a = std::f64::consts::PI * theta;
    a.cos() / a.sin()
}

#[test]
fn quake_single_leaf_follows_the_multiplication_law() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("points.csv");
    std::fs::write(&pts, "re,im\n-2,1\n1,1\n0,2\n").unwrap();
    let out = run(&["--out", s(dir.path()), "--density", "32", "quake", s(&data("single_leaf_s3.json")), "--points", s(&pts)]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(v["values"]["monotone"], true);
    assert_eq!(v["values"]["points_on_leaves"], 1);
    let csv = std::fs::read_to_string(dir.path().join("boundary.csv")).unwrap();
    let mut checked = 0;
    for line in csv.lines().skip(1) {
        let (a, b) = line.split_once(',').unwrap();
        let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
        if a > 0.02 && a < 0.48 {
            // Positive reals are multiplied by 3.
            assert!((cot(b) - 3.0 * cot(a)).abs() < 1e-9 * cot(b).abs().max(1.0));
            checked += 1;
        } else if a > 0.52 && a < 0.98 {
            assert!((a - b).abs() < 1e-12);
        }
    }
    assert!(checked > 5);
    let images = std::fs::read_to_string(dir.path().join("images.csv")).unwrap();
    let rows: Vec<Vec<&str>> = images.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][2], "ok");
    assert!((rows[0][3].parse::<f64>().unwrap() + 2.0).abs() < 1e-12);
    assert!((rows[1][3].parse::<f64>().unwrap() - 3.0).abs() < 1e-9);
    assert_eq!(rows[2][2], "on_leaf");
}

#[test]
fn quake_at_scale_zero_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("points.csv");
    std::fs::write(&pts, "re,im\n0.5,0.25\n7,3\n").unwrap();
    let out = run(&["--out", s(dir.path()), "quake", s(&data("single_leaf_s3.json")), "--scale", "0", "--points", s(&pts)]);
    assert!(out.status.success());
    let images = std::fs::read_to_string(dir.path().join("images.csv")).unwrap();
    for line in images.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let num = |i: usize| f[i].parse::<f64>().unwrap();
        assert!((num(0) - num(3)).abs() < 1e-12 && (num(1) - num(4)).abs() < 1e-12);
    }
}

#[test]
fn ads_hull_of_the_shear_map_has_one_bending_edge() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--out", s(dir.path()), "ads", "hull", "--map", s(&data("shear_s4.csv"))]);
    assert!(out.status.success());
    let v = report(&out);
    assert!(all_pass(&v));
    assert_eq!(v["values"]["bending_edges"], 1);
    let leaves = v["values"]["leaves"].as_array().unwrap();
    assert_eq!(leaves.len(), 1);
    assert!((leaves[0]["shear"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-9);
    assert!((v["values"]["bending_sum"].as_f64().unwrap() - 0.5 * 4f64.ln()).abs() < 1e-9);
    let obj = std::fs::read_to_string(dir.path().join("hull.obj")).unwrap();
    assert!(obj.starts_with("# affine chart complementary to the plane ("));
    for name in ["bending.json", "earthquake_boundary.csv", "graph.csv"] {
        assert!(dir.path().join(name).exists());
    }
}

#[test]
fn ads_hull_of_equal_holonomies_is_flat() {
    let rep = data("octagon_genus2.json");
    let out = run(&["--ball", "3", "ads", "hull", "--left", s(&rep), "--right", s(&rep)]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(v["values"]["flat"], true);
    assert_eq!(v["values"]["bending_edges"], 0);
    assert!(v["notices"][0].as_str().unwrap().starts_with("flat hull"));
    assert!(v["values"]["roundtrip_error"].as_f64().unwrap() < 1e-12);
}

#[test]
fn ads_hull_roundtrip_of_a_twist() {
    let out = run(&[
        "--ball",
        "5",
        "--density",
        "500",
        "ads",
        "hull",
        "--left",
        s(&data("octagon_genus2.json")),
        "--twist",
        s(&data("multicurve_a1.json")),
    ]);
    assert!(out.status.success());
    let v = report(&out);
    assert!(all_pass(&v));
    assert_eq!(v["values"]["flat"], false);
    // Sampling spreads each lift's weight over nearby edges: every shear is
    // a left shear and none exceeds the weight 1.
    let shears: Vec<f64> = v["values"]["leaves"].as_array().unwrap().iter().map(|l| l["shear"].as_f64().unwrap()).collect();
    assert!(!shears.is_empty());
    assert!(shears.iter().all(|&s| s > 0.0 && s < 1.05), "{shears:?}");
}

#[test]
fn ads_between_reports_membership() {
    let map = data("shear_s4.csv");
    let out = run(&["ads", "between", "--map", s(&map), "--point", "1,0,0,1"]);
    assert!(out.status.success());
    assert_eq!(report(&out)["values"]["between"], true);
    let out = run(&["ads", "between", "--map", s(&map), "--point=0.1699,0.9854,-0.9854,0.1699"]);
    assert!(out.status.success());
    assert_eq!(report(&out)["values"]["between"], false);
    // Planar graph: indeterminate, reported as a failed check.
    let rep = data("octagon_genus2.json");
    let out = run(&["ads", "between", "--left", s(&rep), "--right", s(&rep), "--point", "1,0,0,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["values"]["between"], Value::Null);
    let out = run(&["ads", "between", "--map", s(&map), "--point", "1,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}
