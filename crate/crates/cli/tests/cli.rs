use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const B: f64 = std::f64::consts::TAU / 12.0;

fn qc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcarpet"))
        .args(args)
        .current_dir(dir)
        .env_remove("QC_CARPET_THREADS")
        .output()
        .expect("spawn qcarpet")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = qc(dir, args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn setup() -> (TempDir, PathBuf) {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_path_buf();
    (tmp, dir)
}

#[test]
fn gen_sierpinski_depth_two_has_nine_holes() {
    let (_t, dir) = setup();
    ok(&dir, &["gen", "sierpinski", "--depth", "2", "--out", "s.json"]);
    let v = json(&dir.join("s.json"));
    assert_eq!(v["holes"].as_array().unwrap().len(), 9);
    assert_eq!(v["region"]["kind"], "rect");
}

#[test]
fn gen_ring_valid_and_invalid() {
    let (_t, dir) = setup();
    ok(&dir, &["gen", "ring", "--a", "2", "--K", "0.8,0.9,0.4,0.2", "--depth", "1", "--out", "r.json"]);
    assert_eq!(json(&dir.join("r.json"))["region"]["kind"], "rect-ring");

    let bad = qc(&dir, &["gen", "ring", "--a", "2", "--K", "1.8,0.9,0.4,0.2", "--depth", "1"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("K"));
    assert_eq!(code(&qc(&dir, &["gen", "ring", "--a", "2", "--K", "0.8,0.9"])), 2);
    assert_eq!(code(&qc(&dir, &["gen", "sierpinski", "--depth", "9"])), 2);
}

#[test]
fn modulus_examples() {
    let (_t, dir) = setup();
    let rect = stdout_json(&ok(&dir, &["modulus", "--family", "vertical", "--rect", "2"]));
    assert!((rect["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let ann = stdout_json(&ok(
        &dir,
        &["modulus", "--family", "radial", "--annulus", "2.718281828459045", "--grid", "16"],
    ));
    let v = ann["value"].as_f64().unwrap();
    assert!((v - std::f64::consts::TAU).abs() < 0.02 * std::f64::consts::TAU, "{v}");
    assert_eq!(code(&qc(&dir, &["modulus", "--family", "vertical", "--carpet", "missing.json"])), 2);
    assert_eq!(code(&qc(&dir, &["modulus", "--family", "vertical"])), 2);
}

#[test]
fn gen_output_round_trips_through_modulus() {
    let (_t, dir) = setup();
    ok(&dir, &["gen", "ring", "--a", "2", "--K", "0.8,0.4,0.4,0.2", "--depth", "2", "--out", "r.json"]);
    let from_file = stdout_json(&ok(&dir, &["modulus", "--family", "vertical", "--carpet", "r.json"]));
    let direct = stdout_json(&ok(&dir, &["modulus", "--family", "vertical", "--rect", "2"]));
    assert_eq!(from_file["region"]["a"], direct["region"]["a"]);
    assert_eq!(from_file["value"], direct["value"]);

    // Re-serialising the carpet through plot keeps every hole.
    ok(&dir, &["plot", "--input", "r.json", "--no-timestamp", "--out", "r.svg"]);
    let holes = json(&dir.join("r.json"))["holes"].as_array().unwrap().len();
    let svg = fs::read_to_string(dir.join("r.svg")).unwrap();
    assert!(svg.matches("class=\"hole\"").count() >= holes, "{holes} holes");
}

#[test]
fn extend_ba_identity_is_identity() {
    let (_t, dir) = setup();
    ok(&dir, &["map", "circle", "--kind", "identity", "--out", "id.csv"]);
    let man = stdout_json(&ok(&dir, &["extend", "--mode", "ba", "--map", "id.csv", "--grid", "33", "--out", "ba.json"]));
    assert!(man["boundary_residual"].as_f64().unwrap() <= 1e-12);
    let m = json(&dir.join("ba.json"));
    let (ox, oy) = (m["region"]["origin"][0].as_f64().unwrap(), m["region"]["origin"][1].as_f64().unwrap());
    let nx = m["region"]["nx"].as_u64().unwrap() as usize;
    let d = m["delta"].as_f64().unwrap();
    let mut defined = 0;
    for (idx, v) in m["values"].as_array().unwrap().iter().enumerate() {
        if v.is_null() {
            continue;
        }
        defined += 1;
        let (i, j) = ((idx % nx) as f64, (idx / nx) as f64);
        assert!((v[0].as_f64().unwrap() - (ox + d * i)).abs() < 1e-12);
        assert!((v[1].as_f64().unwrap() - (oy + d * j)).abs() < 1e-12);
    }
    assert!(defined > 700);
}

#[test]
fn extend_periodic_annulus_rotation() {
    let (_t, dir) = setup();
    ok(&dir, &["map", "circle", "--kind", "rotation", "--k", "3", "--out", "rot.csv"]);
    let man = stdout_json(&ok(
        &dir,
        &["extend", "--mode", "periodic-annulus", "--map", "rot.csv", "--k", "3", "--grid", "17", "--out", "pa.json"],
    ));
    assert!(man["periodicity_residual"].as_f64().unwrap() <= 1e-12);
    assert!(man["boundary_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(man["probes"], 10_000);
}

#[test]
fn extend_tower_conjugated_rotation() {
    let (_t, dir) = setup();
    ok(&dir, &["map", "circle", "--kind", "conjugated", "--k", "3", "--out", "c.csv"]);
    ok(&dir, &[
        "extend", "--mode", "tower", "--map", "c.csv", "--k", "3", "--grid", "33", "--out", "t.json", "--manifest",
        "m.json",
    ]);
    let man = json(&dir.join("m.json"));
    assert!(man["periodicity_residual"].as_f64().unwrap() <= 1e-5);
    let rings = man["tower"]["rings"].as_array().unwrap();
    assert!(!rings.is_empty());
    assert!(rings.iter().all(|r| r["residual"].as_f64().unwrap() <= 1e-5));

    ok(&dir, &["plot", "--input", "m.json", "--no-timestamp", "--out", "m.svg"]);
    assert!(fs::read_to_string(dir.join("m.svg")).unwrap().contains("<polyline"));
}

#[test]
fn extend_carpet_reports_orbits() {
    let (_t, dir) = setup();
    ok(&dir, &["gen", "four-fold", "--out", "ff.json"]);
    let man = stdout_json(&ok(
        &dir,
        &["extend", "--mode", "carpet", "--carpet", "ff.json", "--k", "4", "--grid", "33", "--out", "cx.json"],
    ));
    let mut periods: Vec<u64> = man["periods"].as_array().unwrap().iter().map(|p| p.as_u64().unwrap()).collect();
    periods.sort();
    assert_eq!(periods, [1, 4]);
    assert!(man["periodicity_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(code(&qc(&dir, &["extend", "--mode", "carpet", "--out", "x.json"])), 2);
}

#[test]
fn rigidity_exit_codes() {
    let (_t, dir) = setup();
    ok(&dir, &["gen", "sierpinski", "--depth", "1", "--out", "s.json"]);

    ok(&dir, &["map", "plane", "--kind", "identity", "--out", "id.json"]);
    let rep = stdout_json(&ok(&dir, &["rigidity", "--carpet", "s.json", "--map", "id.json"]));
    assert_eq!(rep["verdict"], "identity");
    assert_eq!(rep["pipeline"], "carpet");

    ok(&dir, &["map", "plane", "--kind", "quarter-turn", "--out", "q.json"]);
    let q = qc(&dir, &["rigidity", "--carpet", "s.json", "--map", "q.json", "--hypothesis-tol", "10"]);
    assert_eq!(code(&q), 2);
    assert!(String::from_utf8_lossy(&q.stderr).contains("fixed point"));

    ok(&dir, &["map", "plane", "--kind", "slide", "--amplitude", "0.05", "--out", "sl.json"]);
    let out = qc(&dir, &["rigidity", "--carpet", "s.json", "--map", "sl.json", "--hypothesis-tol", "0.06"]);
    assert_eq!(code(&out), 1);
    let rep = stdout_json(&out);
    assert_eq!(rep["verdict"], "non-identity");
    assert!(rep["witness"]["orbit"].as_array().unwrap().len() >= 2);

    assert_eq!(code(&qc(&dir, &["rigidity", "--carpet", "s.json", "--map", "nope.json"])), 2);
}

#[test]
fn rigidity_cstar_rotation_is_periodic() {
    let (_t, dir) = setup();
    let k = format!("{},{},{},{}", 2.0 * B, B, B, 2.0 * B);
    let r = (6.0 * B).exp().to_string();
    ok(&dir, &[
        "gen", "cstar", "--r", &r, "--K", &k, "--divisions", "12", "--symmetry", "3", "--depth", "1", "--out", "c.json",
    ]);
    let angle = (std::f64::consts::TAU / 3.0).to_string();
    ok(&dir, &[
        "map", "plane", "--kind", "rotation", "--angle", &angle, "--center", "0,0", "--window=-24,24,-24,24", "--nodes",
        "257", "--out", "rot.json",
    ]);
    let rep = stdout_json(&ok(&dir, &["rigidity", "--carpet", "c.json", "--map", "rot.json"]));
    assert_eq!(rep["pipeline"], "cstar");
    assert_eq!(rep["verdict"], "periodic");
    assert_eq!(rep["order"], 3);
}

#[test]
fn json_outputs_are_byte_identical_across_runs_and_threads() {
    let (_t, dir) = setup();
    ok(&dir, &["gen", "four-fold", "--out", "ff.json"]);
    ok(&dir, &["map", "circle", "--kind", "conjugated", "--k", "3", "--out", "c.csv"]);
    let runs: Vec<(Vec<u8>, Vec<u8>)> = ["1", "3", "0"]
        .iter()
        .map(|threads| {
            let a = ok(&dir, &[
                "--threads", threads, "extend", "--mode", "carpet", "--carpet", "ff.json", "--grid", "33", "--out",
                "cx.json",
            ]);
            ok(&dir, &[
                "--threads", threads, "extend", "--mode", "tower", "--map", "c.csv", "--k", "3", "--grid", "33",
                "--out", "t.json", "--manifest", "m.json",
            ]);
            let mut plane = fs::read(dir.join("cx.json")).unwrap();
            plane.extend(fs::read(dir.join("t.json")).unwrap());
            plane.extend(fs::read(dir.join("m.json")).unwrap());
            (a.stdout, plane)
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));

    let m1 = ok(&dir, &["modulus", "--family", "horizontal", "--carpet", "ff.json"]).stdout;
    let m2 = ok(&dir, &["modulus", "--family", "horizontal", "--carpet", "ff.json"]).stdout;
    assert_eq!(m1, m2);
}

#[test]
fn threads_env_var_is_honoured() {
    let (_t, dir) = setup();
    let out = Command::new(env!("CARGO_BIN_EXE_qcarpet"))
        .args(["gen", "sierpinski", "--depth", "1"])
        .env("QC_CARPET_THREADS", "2")
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let bad = Command::new(env!("CARGO_BIN_EXE_qcarpet"))
        .args(["gen", "sierpinski"])
        .env("QC_CARPET_THREADS", "many")
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn svg_timestamp_is_optional() {
    let (_t, dir) = setup();
    ok(&dir, &["gen", "sierpinski", "--depth", "2", "--out", "s.json"]);
    let stamped = String::from_utf8(ok(&dir, &["plot", "--input", "s.json"]).stdout).unwrap();
    assert!(stamped.contains("<!-- generated at unix time"));
    let a = ok(&dir, &["plot", "--input", "s.json", "--no-timestamp"]).stdout;
    let b = ok(&dir, &["plot", "--input", "s.json", "--no-timestamp"]).stdout;
    assert_eq!(a, b);
    let plain = String::from_utf8(a).unwrap();
    assert!(!plain.contains("<!--"));
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("<!--")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&stamped), strip(&plain));
}

#[test]
fn plot_handles_every_result_kind() {
    let (_t, dir) = setup();
    ok(&dir, &["gen", "sierpinski", "--depth", "1", "--out", "s.json"]);
    ok(&dir, &["modulus", "--family", "vertical", "--rect", "1", "--grid", "8", "--out", "mod.json", "--svg", "h.svg"]);
    ok(&dir, &["map", "plane", "--kind", "identity", "--nodes", "9", "--out", "p.json"]);
    for input in ["s.json", "mod.json", "p.json"] {
        let svg = String::from_utf8(ok(&dir, &["plot", "--input", input, "--no-timestamp"]).stdout).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"), "{input}");
    }
    let heat = fs::read_to_string(dir.join("h.svg")).unwrap();
    assert!(heat.contains("legend"));
    fs::write(dir.join("other.json"), "{\"x\": 1}").unwrap();
    assert_eq!(code(&qc(&dir, &["plot", "--input", "other.json"])), 2);
}
