use std::process::{Command, Output};

use holonomy::cli::read_trajectory_csv;

fn holonomy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy")).args(args).output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn quarter_turn_about_e3() {
    let o = holonomy(&["transport", "--connection", "natural-so3", "--path", "line", "--xi", "0,0,1.5707963267948966"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    let q: Vec<f64> = serde_json::from_value(doc["holonomy"]["quat"].clone()).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((q[0] - s).abs() < 1e-12 && (q[3] - s).abs() < 1e-12);
    assert_eq!(doc["request"]["command"], "transport");
    assert_eq!(doc["request"]["connection"], "natural-so3");
    assert!(doc["reports"].as_array().unwrap().is_empty());
}

#[test]
fn csv_trajectory_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("traj.csv");
    let base = ["transport", "--connection", "plane-rolling", "--path", "circle", "--eps", "0.7", "--steps", "500", "--stride", "7"];
    let o = holonomy(&[&base[..], &["--format", "csv", "--out", csv_path.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("t,x1,x2,qw,qx,qy,qz\n"));
    let from_csv = read_trajectory_csv(text.as_bytes()).unwrap();

    let doc = json(&holonomy(&base));
    let from_json = doc["trajectory"].as_array().unwrap();
    assert_eq!(from_csv.len(), from_json.len());
    for (a, b) in from_csv.iter().zip(from_json) {
        assert_eq!(a.t, b["t"].as_f64().unwrap());
        let x: Vec<f64> = serde_json::from_value(b["x"].clone()).unwrap();
        let q: Vec<f64> = serde_json::from_value(b["quat"].clone()).unwrap();
        assert_eq!(a.x, x);
        assert_eq!(a.quat.to_vec(), q);
        assert!(a.quat[0] >= 0.0);
    }
}

#[test]
fn path_files() {
    let dir = tempfile::tempdir().unwrap();
    let square = dir.path().join("square.csv");
    std::fs::write(&square, "t,x1,x2\n0,0,0\n0.25,1,0\n0.5,1,1\n0.75,0,1\n1,0,0\n").unwrap();
    let from_file = json(&holonomy(&["holonomy", "--connection", "plane-rolling", "--path", "file", "--input", square.to_str().unwrap()]));
    let catalog = json(&holonomy(&["holonomy", "--connection", "plane-rolling", "--path", "square", "--eps", "1"]));
    assert_eq!(from_file["holonomy"], catalog["holonomy"]);
    assert!((catalog["holonomy"]["angle"].as_f64().unwrap() - 0.9277).abs() < 1e-3);

    let shuffled = dir.path().join("shuffled.csv");
    std::fs::write(&shuffled, "t,x1,x2\n0,0,0\n0.6,1,0\n0.3,1,1\n1,0,0\n").unwrap();
    let o = holonomy(&["holonomy", "--connection", "plane-rolling", "--path", "file", "--input", shuffled.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("increase"));

    let three_d = dir.path().join("line3.csv");
    std::fs::write(&three_d, "t,x1,x2,x3\n0,0,0,0\n1,1,2,3\n").unwrap();
    let o = holonomy(&["transport", "--connection", "plane-rolling", "--path", "file", "--input", three_d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn inner_unit_sphere_document_is_identity() {
    let doc = json(&holonomy(&["transport", "--connection", "sphere-inner", "--radius", "1", "--path", "polyline", "--points", "1,0;1.4,0.5;0.8,1.2"]));
    assert_eq!(doc["holonomy"]["quat"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));
    assert_eq!(doc["holonomy"]["angle"], 0.0);
}

#[test]
fn verify_all_passes() {
    let o = holonomy(&["verify", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&o);
    let reports = doc["reports"].as_array().unwrap();
    let names: Vec<&str> = reports.iter().map(|r| r["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(reports.iter().all(|r| r["pass"] == true));
    assert!(names.len() >= 15);
}

#[test]
fn verify_reports_as_csv() {
    let o = holonomy(&["verify", "--check", "omega-naturality", "--check", "alpha-naturality", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,max_residual,tolerance,samples,pass"));
    assert!(lines.next().unwrap().starts_with("alpha-naturality,"));
}

#[test]
fn failing_check_exits_two() {
    let o = holonomy(&["verify", "--check", "inner-sphere", "--radius", "2", "--steps", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    let doc = json(&o);
    assert_eq!(doc["reports"][0]["pass"], false);
    assert!(String::from_utf8_lossy(&o.stderr).contains("inner-sphere"));
}

#[test]
fn operational_errors_exit_one() {
    for args in [
        &["transport", "--unknown-flag"][..],
        &["transport", "--connection", "natural-so3", "--path", "line"],
        &["transport", "--connection", "natural-so3", "--path", "line", "--xi", "1,,2"],
        &["holonomy", "--connection", "natural-so3", "--path", "line", "--xi", "1,0,0"],
        &["verify", "--check", "no-such-check"],
        &["frobnicate"],
    ] {
        assert_eq!(holonomy(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(holonomy(&["--help"]).status.code(), Some(0));
}

#[test]
fn section_and_curvature_documents() {
    let doc = json(&holonomy(&["section", "--target", "1,0,0"]));
    assert!((doc["holonomy"]["angle"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-6);
    assert!(doc["reports"].as_array().unwrap().iter().all(|r| r["pass"] == true));

    let doc = json(&holonomy(&["curvature", "--connection", "sphere-outer", "--radius", "0.5"]));
    assert!((doc["curvature"]["factor"].as_f64().unwrap() + 3.0).abs() < 3e-3);
    let doc = json(&holonomy(&["curvature", "--connection", "natural-so3"]));
    let est: Vec<f64> = serde_json::from_value(doc["curvature"]["estimate"].clone()).unwrap();
    assert!((est[2] - 1.0).abs() < 1e-4 && est[0].abs() < 1e-4);
}
