use std::process::{Command, Output};

use coatom_core::classical::SupportSet;
use coatom_core::family::m_family;
use coatom_core::random::random_hermitian;
use coatom_core::HermitianMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coatom-forge"))
        .args(args)
        .env_remove("COATOM_FORGE_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_duration(out: &Output) -> String {
    let mut v = json(out);
    v.as_object_mut().unwrap().remove("duration_seconds");
    v.to_string()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(
        forge(&["sample", "--model", "c4-qubit"]).status.code(),
        Some(2)
    );
    assert_eq!(forge(&["sample", "--bogus"]).status.code(), Some(2));
    assert_eq!(forge(&["sample", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(
        forge(&["factor-check", "--support", "1111"]).status.code(),
        Some(2)
    );
    assert_eq!(
        forge(&["verify-family", "--a-grid", "3.0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        forge(&["certify", "--matrix", "/nonexistent/matrix.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failure_gate_exits_with_three() {
    // One outer iteration cannot reach the gap, so every trial is capped.
    let out = forge(&[
        "sample",
        "--model",
        "cayley",
        "--trials",
        "10",
        "--max-outer",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn report_layout_and_seed_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_coatom-forge"))
        .args(["sample", "--model", "cayley", "--trials", "20"])
        .env("COATOM_FORGE_SEED", "5")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["records"].as_array().unwrap().len(), 20);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).collect();
    assert!(top.first().unwrap().starts_with("  \"command\""));
    assert!(top.last().unwrap().starts_with("  \"duration_seconds\""));
    assert!(v["version"]
        .as_str()
        .unwrap()
        .starts_with(env!("CARGO_PKG_VERSION")));
}

#[test]
fn reports_do_not_depend_on_workers() {
    let one = forge(&[
        "sample",
        "--model",
        "c3-bit",
        "--trials",
        "60",
        "--seed",
        "9",
        "--workers",
        "1",
    ]);
    let three = forge(&[
        "sample",
        "--model",
        "c3-bit",
        "--trials",
        "60",
        "--seed",
        "9",
        "--workers",
        "3",
    ]);
    assert_eq!(without_duration(&one), without_duration(&three));
}

#[test]
fn classical_bit_samples_are_vertices() {
    let v = json(&forge(&[
        "sample",
        "--model",
        "c3-bit",
        "--trials",
        "300",
        "--certify",
        "--omit-records",
    ]));
    let hist = v["histogram"].as_object().unwrap();
    assert_eq!(hist.len(), 1);
    assert_eq!(hist["2"], 300);
    assert_eq!(v["certificate_histogram"]["1"], 300);
}

#[test]
fn enumerate_matches_table_one() {
    let out = forge(&[
        "enumerate-classical",
        "--model",
        "c3ff",
        "--format",
        "table",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 12);
    assert_eq!(
        rows[0],
        "{000,001} = diag(1,1,0,0,0,0,0,0) = 1/4(I+Z)(I+Z)I"
    );
    assert_eq!(
        rows[11],
        "{011,111} = diag(0,0,0,1,0,0,0,1) = 1/4I(I-Z)(I-Z)"
    );
    let v = json(&forge(&["enumerate-classical", "--model", "c3"]));
    assert_eq!(v["count"], 16);
    assert_eq!(v["rows"][15]["edge"], "{100,011}");
}

#[test]
fn factor_check_mask() {
    let v = json(&forge(&[
        "factor-check",
        "--support",
        "11111100",
        "--graph",
        "c3",
    ]));
    assert_eq!(v["m_feasible"], true);
    assert_eq!(v["complement"], "{110,111}");
    assert_eq!(v["decomposition"][0]["factor"], "{11}' on units {1,2}");
    let v = json(&forge(&[
        "factor-check",
        "--support",
        "01111110",
        "--graph",
        "c3",
    ]));
    assert_eq!(v["m_feasible"], false);
    assert!(v["decomposition"].is_null());
}

fn write_matrix(dir: &tempfile::TempDir, name: &str, m: &HermitianMatrix) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, m.to_json().unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn certify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let id = HermitianMatrix::identity(8);

    let m = m_family(1.0, std::f64::consts::FRAC_PI_4)
        .unwrap()
        .dense
        .add_scaled(&id, -1.0);
    let path = write_matrix(&dir, "family.json", &m);
    let v = json(&forge(&["certify", "--matrix", &path]));
    assert_eq!(
        (v["dimension"].clone(), v["verdict"].clone()),
        (1.into(), "coatom".into())
    );
    assert_eq!(v["ground_projector_rank"], 5);
    assert!(v["in_space_residual"].as_f64().unwrap() < 1e-12);

    let edge = SupportSet::from_configs(3, &[0, 7])
        .unwrap()
        .to_projector()
        .matrix;
    let a = edge.scale(4.0).add_scaled(&id, -1.0);
    let path = write_matrix(&dir, "edge.json", &a);
    let v = json(&forge(&["certify", "--matrix", &path]));
    assert_eq!(v["verdict"], "coatom");
    assert_eq!(v["ground_projector_rank"], 6);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let basis = coatom_core::Model::C3Qubit.basis();
    let r = coatom_core::local_space::project_onto_space(&random_hermitian(8, &mut rng), &basis)
        .unwrap();
    let path = write_matrix(&dir, "random.json", &r);
    let v = json(&forge(&["certify", "--matrix", &path]));
    assert_eq!(v["verdict"], "not-coatom");
    assert!(v["dimension"].as_u64().unwrap() >= 2);

    let v = json(&forge(&[
        "certify",
        "--model",
        "c3-bit",
        "--support",
        "11101111",
    ]));
    assert_eq!(v["verdict"], "not-coatom");
    assert_eq!(v["cone_dimension"], 0);
}

#[test]
fn family_and_cayley_commands() {
    let v = json(&forge(&["verify-family", "--include-special"]));
    assert_eq!(v["generic_all_coatom"], true);
    assert_eq!(v["special_agrees"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 25);

    let v = json(&forge(&["cayley-demo", "--trials", "400"]));
    assert_eq!(v["distinct_rank1_optimizers"], 4);
    let f = v["rank1_fraction"].as_f64().unwrap();
    assert!(f > 0.75 && f < 0.93, "{f}");
}

#[test]
fn file_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    let out = forge(&[
        "sample",
        "--model",
        "cayley",
        "--trials",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("seed_index,status,objective"));
    assert_eq!(lines.count(), 5);
}
