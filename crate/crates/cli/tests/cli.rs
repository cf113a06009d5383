//! End-to-end runs of every subcommand on the worked-example pattern.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

struct Run {
    out: Output,
    manifest: Value,
}

impl Run {
    fn code(&self) -> i32 {
        self.out.status.code().expect("exited normally")
    }

    fn stdout(&self) -> String {
        String::from_utf8(self.out.stdout.clone()).unwrap()
    }

    fn json(&self) -> Value {
        serde_json::from_slice(&self.out.stdout)
            .unwrap_or_else(|e| panic!("{e}: {}", self.stdout()))
    }
}

fn turanpat(args: &[&str]) -> Run {
    turanpat_env(args, &[])
}

fn turanpat_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.json");
    let out = Command::new(env!("CARGO_BIN_EXE_turanpat"))
        .args(args)
        .arg("--manifest")
        .arg(&manifest)
        .envs(env.iter().copied())
        .output()
        .unwrap();
    let manifest = std::fs::read(&manifest)
        .map(|b| serde_json::from_slice(&b).unwrap())
        .unwrap_or(Value::Null);
    Run { out, manifest }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lagrangian_json_and_manifest() {
    let pat = data("example.pat");
    let r = turanpat(&["lagrangian", "--pattern", s(&pat)]);
    assert_eq!(r.code(), 0);
    let v = r.json();
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - (2.0 * 3f64.sqrt() - 3.0)).abs() < 1e-6);
    assert_eq!(v["pattern"]["recursive"], serde_json::json!([1]));
    assert!(v["result"]["upper_bound_exact"].is_string());
    assert_eq!(r.manifest["subcommand"], "lagrangian");
    assert_eq!(r.manifest["exit_code"], 0);
    assert_eq!(r.manifest["inputs"].as_array().unwrap().len(), 1);
    assert_eq!(
        r.manifest["inputs"][0]["sha256"].as_str().unwrap().len(),
        64
    );
    assert!(r.manifest["wall_time_seconds"].is_number());
}

#[test]
fn deterministic_output() {
    let pat = data("example.pat");
    let args = ["lagrangian", "--pattern", s(&pat), "--seed", "7"];
    let a = turanpat(&args);
    let b = turanpat(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.out.stdout, b.out.stdout);
    assert_eq!(a.manifest["result_sha256"], b.manifest["result_sha256"]);
}

#[test]
fn lagrangian_csv() {
    let pat = data("example.pat");
    let r = turanpat(&["lagrangian", "--pattern", s(&pat), "--out", "csv"]);
    assert_eq!(r.code(), 0);
    let text = r.stdout();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("value,"));
    assert!(lines.next().unwrap().starts_with("0.46410161"));
}

#[test]
fn pn_sequence_and_witness() {
    let pat = data("example.pat");
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("p6.hg");
    let r = turanpat(&[
        "pn",
        "--pattern",
        s(&pat),
        "--n",
        "6",
        "--witness",
        "--graph-out",
        s(&g),
    ]);
    assert_eq!(r.code(), 0);
    let v = r.json();
    assert_eq!(v["pn"], "12");
    let seq: Vec<&str> = v["sequence"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["pn"].as_str().unwrap())
        .collect();
    assert_eq!(seq, ["1", "3", "6", "12"]);
    assert_eq!(v["sequence"][1]["density"]["exact"], "3/4");
    assert!(v["witness"]["sizes"].is_array());
    let text = std::fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("6 3\n"));
    assert_eq!(text.lines().count(), 13);
    assert_eq!(r.manifest["outputs"][0]["path"], s(&g));

    let csv = turanpat(&["pn", "--pattern", s(&pat), "--n", "4", "--csv"]);
    assert_eq!(
        csv.stdout(),
        "n,pn,density_exact,density\n3,1,1,1\n4,3,3/4,0.75\n"
    );
}

#[test]
fn minimal_decisions() {
    let r = turanpat(&["minimal", "--pattern", s(&data("example.pat"))]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.json()["minimal"], true);
    let r = turanpat(&["minimal", "--pattern", s(&data("path.pat"))]);
    assert_eq!(r.code(), 1);
    let v = r.json();
    assert_eq!(v["minimal"], false);
    assert!(v["margins"][2]["margin"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn forbid_writes_members_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("family");
    let r = turanpat(&[
        "forbid",
        "--pattern",
        s(&data("example.pat")),
        "--max-vertices",
        "4",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code(), 0);
    let v = r.json();
    let count = v["count"].as_u64().unwrap() as usize;
    assert!(count >= 1);
    let index: Value =
        serde_json::from_slice(&std::fs::read(out.join("index.json")).unwrap()).unwrap();
    assert_eq!(index, v);
    let first = out.join(v["members"][0]["file"].as_str().unwrap());
    assert_eq!(
        std::fs::read_to_string(first).unwrap(),
        std::fs::read_to_string(data("k4_3.hg"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| format!("{l}\n"))
            .collect::<String>()
    );
    // the family directory feeds exact-ex
    let ex = turanpat(&["exact-ex", "--family", s(&out), "--n", "4"]);
    assert_eq!(ex.code(), 0);
    assert_eq!(ex.json()["ex"], 3);
}

#[test]
fn embed_exit_codes() {
    let pat = data("example.pat");
    let r = turanpat(&[
        "embed",
        "--pattern",
        s(&pat),
        "--graph",
        s(&data("k4_3.hg")),
    ]);
    assert_eq!(r.code(), 1);
    assert_eq!(r.json()["embeds"], false);
    assert_eq!(r.manifest["exit_code"], 1);
    let r = turanpat(&[
        "embed",
        "--pattern",
        s(&pat),
        "--graph",
        s(&data("edge_3.hg")),
    ]);
    assert_eq!(r.code(), 0);
    let v = r.json();
    assert_eq!(v["embeds"], true);
    assert_eq!(v["witness"]["branches"].as_array().unwrap().len(), 4);
}

#[test]
fn exact_ex_matches_pn() {
    let r = turanpat(&["exact-ex", "--pattern", s(&data("example.pat")), "--n", "5"]);
    assert_eq!(r.code(), 0);
    let v = r.json();
    assert_eq!(v["ex"], 6);
    assert_eq!(v["pn"], "6");
    assert_eq!(v["matches_pn"], true);
}

#[test]
fn rigid_golden() {
    let r = turanpat(&[
        "rigid",
        "--pattern",
        s(&data("example.pat")),
        "--sizes",
        "1,3",
    ]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.json()["rigid"], true);
    let capped = turanpat_env(
        &[
            "rigid",
            "--pattern",
            s(&data("example.pat")),
            "--sizes",
            "1,3",
        ],
        &[("TURANPAT_CAP_RIGIDITY_VERTICES", "3")],
    );
    assert_eq!(capped.code(), 3);
    assert!(capped.manifest["error"].as_str().unwrap().contains("cap"));
}

#[test]
fn irrational_certificate() {
    let r = turanpat(&["irrational", "--k", "3"]);
    assert_eq!(r.code(), 0);
    let v = r.json();
    assert_eq!(v["passed"], true);
    assert_eq!(v["ell"], 2);
    let want = 2.0 * 3f64.sqrt() - 3.0;
    assert!((v["lambda_closed_form"].as_f64().unwrap() - want).abs() < 1e-6);
    // and the pattern it certifies is the worked example
    assert_eq!(v["pattern"]["profiles"], serde_json::json!([[1, 2]]));
    assert_eq!(turanpat(&["irrational", "--k", "2"]).code(), 2);
}

#[test]
fn density_commands() {
    let r = turanpat(&[
        "homdensity",
        "--f",
        s(&data("k2_2.hg")),
        "--g",
        s(&data("k3_2.hg")),
    ]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.json()["t"]["exact"], "2/3");
    let r = turanpat(&["hlagrangian", "--graph", s(&data("k3_2.hg"))]);
    assert_eq!(r.code(), 0);
    let v = r.json();
    assert!((v["result"]["value"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
    assert_eq!(v["uniform_point_value"]["exact"], "2/3");
    let r = turanpat(&["ctgap", "--graph", s(&data("edge_3.hg"))]);
    assert_eq!(r.code(), 0);
    let v = r.json();
    assert_eq!(v["density"]["exact"], "1/4");
    assert!((v["gap"].as_f64().unwrap() - (0.25 - 6.0 / 27.0)).abs() < 1e-6);
}

#[test]
fn ctgap_reports_denser_members() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data("edge_3.hg"), dir.path().join("edge.hg")).unwrap();
    let r = turanpat(&[
        "ctgap",
        "--graph",
        s(&data("k4_3.hg")),
        "--family",
        s(dir.path()),
    ]);
    assert_eq!(r.code(), 0);
    // t(K_3^3, edge on 4 vertices) = 6/64 < ρ(K_4^3) = 1
    assert_eq!(r.json()["violations"], serde_json::json!([]));
    let sparse = tempfile::tempdir().unwrap();
    std::fs::write(sparse.path().join("e.hg"), "3 3\n0 1 2\n").unwrap();
    let g = sparse.path().join("g.hg");
    std::fs::write(&g, "6 3\n0 1 2\n").unwrap();
    let fam = sparse.path().join("fam");
    std::fs::create_dir(&fam).unwrap();
    std::fs::copy(sparse.path().join("e.hg"), fam.join("e.hg")).unwrap();
    let r = turanpat(&["ctgap", "--graph", s(&g), "--family", s(&fam)]);
    let v = r.json();
    assert_eq!(v["violations"][0]["file"], "e.hg");
    assert_eq!(v["violations"][0]["member_density"]["exact"], "2/9");
}

#[test]
fn usage_and_validation_errors() {
    let r = turanpat(&[
        "lagrangian",
        "--pattern",
        s(&data("example.pat")),
        "--bogus",
    ]);
    assert_eq!(r.code(), 2);
    assert!(String::from_utf8_lossy(&r.out.stderr).contains("Usage"));
    let r = turanpat(&[
        "embed",
        "--pattern",
        "/nonexistent.pat",
        "--graph",
        s(&data("k4_3.hg")),
    ]);
    assert_eq!(r.code(), 2);
    assert_eq!(r.manifest["exit_code"], 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pat");
    std::fs::write(&bad, "3 2\nR: 3\n1 2\n").unwrap();
    let r = turanpat(&["lagrangian", "--pattern", s(&bad)]);
    assert_eq!(r.code(), 3);
    assert!(String::from_utf8_lossy(&r.out.stderr).contains("R index out of range"));
    let r = turanpat_env(
        &[
            "embed",
            "--pattern",
            s(&data("example.pat")),
            "--graph",
            s(&data("k4_3.hg")),
        ],
        &[("TURANPAT_CAP_HOM_SOURCE", "x")],
    );
    assert_eq!(r.code(), 2);
    let help = turanpat(&["--help"]);
    assert_eq!(help.code(), 0);
    assert!(help.stdout().contains("TURANPAT_CAP_RIGIDITY_VERTICES"));
}
