use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hopf-lab"));
    c.env_remove("HOPF_LAB_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = run(&full);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&o)));
    (v, o.status.code().unwrap())
}

fn verdict<'a>(report: &'a Value, prop: &str) -> &'a Value {
    report["result"]["verdicts"].as_array().unwrap().iter().find(|v| v["property"] == prop).unwrap()
}

#[test]
fn classify_examples() {
    let (v, code) = json(&["classify", "Z(2^3)"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "hopf-lab/1");
    let cfi = verdict(&v, "cfi");
    assert_eq!(cfi["outcome"], "Fails");
    assert_eq!(cfi["trace"][0]["rule"], "R2");

    let (v, _) = json(&["classify", "0"]);
    assert!(v["result"]["verdicts"].as_array().unwrap().iter().all(|x| x["outcome"] == "Holds"));

    let (v, _) = json(&["classify", "Q^w", "--props", "cfs"]);
    assert_eq!(v["result"]["verdicts"].as_array().unwrap().len(), 1);
    assert_eq!(verdict(&v, "cfs")["outcome"], "Holds");
}

#[test]
fn parse_errors_exit_2_with_offset() {
    let o = run(&["classify", "Z(2^3) + Prufer(4)"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("byte 16"), "{err}");
    assert!(err.contains('^'));
    assert_eq!(run(&["classify", "Z", "--props", "nope"]).status.code(), Some(2));
}

#[test]
fn oracle_examples() {
    let (v, code) = json(&["oracle", "finite", "Z(2^2)+Z(2)", "--exhaustive"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["agrees"], true);
    assert_eq!(v["result"]["oracle"]["endomorphisms"], 32);

    let o = run(&["oracle", "free", "--rank", "3", "--trials", "200", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.trim_start().starts_with("cfi") && l.contains("Holds")));
    assert!(text.lines().any(|l| l.trim_start().starts_with("cfs") && l.contains("witness [[2, 0, 0]")));

    assert_eq!(run(&["oracle", "finite", "Q"]).status.code(), Some(4));
    assert_eq!(run(&["oracle", "cross", "Z^5"]).status.code(), Some(4));
    assert_eq!(run(&["oracle", "finite", "Z(2^9)", "--bound", "256"]).status.code(), Some(4));
}

#[test]
fn construct_examples() {
    let (v, code) = json(&["construct", "infin", "--check", "multipliers", "--N", "3"]);
    assert_eq!(code, 0);
    let results = v["result"]["results"].as_array().unwrap();
    assert_eq!(results[0]["sigma"], serde_json::json!([1, 2, 3]));
    assert_eq!(results[0]["solution_set"], "AllIntegers");
    assert_eq!(results[1]["sigma"], serde_json::json!([2, 1, 3]));
    assert_eq!(results[1]["solution_set"], "OnlyZero");

    let (v, _) = json(&["construct", "tensor", "--gamma", &data("identity3.json")]);
    assert_eq!(v["result"]["automorphism"], true);
    let (v, _) = json(&["construct", "tensor", "--gamma", &data("double2.json")]);
    assert_eq!((&v["result"]["injective"], &v["result"]["cokernel_finite"]), (&Value::Bool(true), &Value::Bool(false)));

    let (v, _) = json(&["construct", "infin", "--check", "quotients", "--n", "3", "--N", "2,4,8"]);
    let orders: Vec<u64> =
        v["result"]["rows"].as_array().unwrap().iter().map(|r| r["order"].as_str().unwrap().parse().unwrap()).collect();
    assert!(orders.windows(2).all(|w| w[0] < w[1]), "{orders:?}");
}

#[test]
fn bad_construction_input_exits_2() {
    assert_eq!(run(&["construct", "tensor", "--gamma", &data("rect.json")]).status.code(), Some(2));
    assert_eq!(run(&["construct", "tensor", "--gamma", &data("missing.json")]).status.code(), Some(2));
    assert_eq!(run(&["construct", "infin", "--check", "quotients", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "infin", "--check", "fir", "--prime", "101"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "infin", "--check", "multipliers", "--N", "2", "--perm", "1,1"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "infin", "--check", "rigid", "--N", "0"]).status.code(), Some(2));
}

#[test]
fn types_commands() {
    let (v, _) = json(&["types", "dtc", "incomparable(w)"]);
    assert_eq!(v["result"]["holds"], true);
    let (v, _) = json(&["types", "dtc", "R1[def=0]:w"]);
    assert_eq!(v["result"]["holds"], false);
    assert!(v["result"]["witness"].as_str().unwrap().contains("infinitely many"));
    let (v, _) = json(&["types", "cmp", "def=0", "def=0; 3->inf"]);
    assert_eq!(v["result"]["relation"], "less");
    let (v, _) = json(&["types", "cmp", "def=0; 2->inf", "def=0; 3->inf"]);
    assert_eq!(v["result"]["relation"], "incomparable");
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas/hopf-lab-1.schema.json");
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

#[test]
fn json_outputs_match_schema() {
    let v = schema();
    let (id3, d2, d10) = (data("identity3.json"), data("double2.json"), data("diag10.json"));
    let cases: Vec<Vec<&str>> = vec![
        vec!["classify", "Z(2^3)"],
        vec!["classify", "Jp(5)^w + Prufer(3)"],
        vec!["classify", "CD{descending(w)}", "--extended"],
        vec!["oracle", "finite", "Z(2^2)+Z(3)"],
        vec!["oracle", "finite", "Z(2)^4", "--workers", "3"],
        vec!["oracle", "free", "--rank", "2", "--trials", "20"],
        vec!["oracle", "cross", "Z(5^2)"],
        vec!["construct", "infin", "--check", "quotients", "--N", "1,2"],
        vec!["construct", "infin", "--check", "multipliers", "--N", "3", "--perm", "3,1,2"],
        vec!["construct", "infin", "--check", "rigid", "--N", "2"],
        vec!["construct", "infin", "--check", "fir", "--N", "2", "--prime", "2"],
        vec!["construct", "tensor", "--gamma", &id3],
        vec!["construct", "tensor", "--gamma", &d2],
        vec!["construct", "tensor", "--gamma", &d10],
        vec!["types", "dtc", "R1[def=0]:2, R1[def=inf]"],
        vec!["types", "cmp", "def=inf", "def=0"],
    ];
    for args in cases {
        let (out, _) = json(&args);
        let errors: Vec<String> = v.iter_errors(&out).map(|e| format!("{e} at {}", e.instance_path())).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    let broken = serde_json::json!({"schema": "hopf-lab/1", "command": "types cmp", "result": {"a": "def=0"}});
    assert!(!v.is_valid(&broken));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lab.toml");
    std::fs::write(&path, "format = \"json\"\nN = 2\nK = 1\n").unwrap();
    let o = bin().env("HOPF_LAB_CONFIG", &path).args(["construct", "infin", "--check", "multipliers"]).output().unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((&v["result"]["N"], &v["result"]["K"]), (&Value::from(2), &Value::from(1)));

    let o = bin().env("HOPF_LAB_CONFIG", &path).args(["--format", "text", "classify", "Q"]).output().unwrap();
    assert!(stdout(&o).starts_with("Q\n"));

    std::fs::write(&path, "N = \"four\"\n").unwrap();
    let code = bin().env("HOPF_LAB_CONFIG", &path).args(["classify", "Q"]).output().unwrap().status.code();
    assert_eq!(code, Some(2));
    let code = bin().args(["--config", "/nonexistent/lab.toml", "classify", "Q"]).output().unwrap().status.code();
    assert_eq!(code, Some(2));
}

/// Text outputs pinned byte for byte. Set `HOPF_LAB_BLESS=1` to rewrite.
#[test]
fn golden_outputs() {
    let id3 = data("identity3.json");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("classify_z8", vec!["classify", "Z(2^3)"]),
        ("classify_mixed_explain", vec!["classify", "Z(3^2)^w + Q", "--props", "acfh,bassian", "--explain"]),
        ("classify_undecided", vec!["classify", "Jp(5)^w", "--props", "hopfian", "--explain"]),
        ("oracle_finite", vec!["oracle", "finite", "Z(2^2)+Z(2)", "--exhaustive"]),
        ("oracle_free", vec!["oracle", "free", "--rank", "3", "--trials", "200", "--seed", "7"]),
        ("construct_multipliers", vec!["construct", "infin", "--check", "multipliers", "--N", "3"]),
        ("construct_quotients", vec!["construct", "infin", "--check", "quotients", "--n", "3", "--N", "2,4,8"]),
        ("construct_fir", vec!["construct", "infin", "--check", "fir", "--N", "2"]),
        ("construct_tensor", vec!["construct", "tensor", "--gamma", &id3]),
        ("types_dtc", vec!["types", "dtc", "R1[def=0]:w, R1[def=inf]"]),
    ];
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("HOPF_LAB_BLESS").is_some();
    for (name, args) in cases {
        let a = stdout(&run(&args));
        assert_eq!(a, stdout(&run(&args)), "{name} is not deterministic");
        // the data path differs between checkouts
        let a = a.replace(&id3, "identity3.json");
        let path = dir.join(format!("{name}.txt"));
        if bless {
            std::fs::write(&path, &a).unwrap();
        } else {
            let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
            assert_eq!(a, want, "{name} differs from {}", path.display());
        }
    }
}
