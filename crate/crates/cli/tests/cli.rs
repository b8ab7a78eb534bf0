use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn stadisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stadisc"))
        .args(args)
        .env("DISC_TOOLKIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn schema(name: &str) -> Value {
    let text = std::fs::read_to_string(root().join("docs/schemas").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Point every `$ref` to `urn` at `local`.
fn relink(v: &mut Value, urn: &str, local: &str) {
    match v {
        Value::Object(map) => {
            if map.get("$ref").and_then(Value::as_str) == Some(urn) {
                map.insert("$ref".into(), Value::from(local));
            }
            map.values_mut().for_each(|x| relink(x, urn, local));
        }
        Value::Array(items) => items.iter_mut().for_each(|x| relink(x, urn, local)),
        _ => {}
    }
}

// the lift schema is merged into the output root so its `#/$defs` refs still resolve
fn output_validator() -> jsonschema::Validator {
    let mut lift = schema("lift.v1.schema.json");
    let mut out = schema("output.v1.schema.json");
    relink(&mut out, "urn:stadisc:schema:lift:v1", "#/$defs/lift");
    let lift_map = lift.as_object_mut().unwrap();
    lift_map.remove("$id");
    lift_map.remove("$schema");
    let lift_defs = lift_map.remove("$defs").unwrap_or_else(|| Value::Object(Default::default()));
    let out_map = out.as_object_mut().unwrap();
    let defs = out_map
        .entry("$defs")
        .or_insert_with(|| Value::Object(Default::default()))
        .as_object_mut()
        .unwrap();
    for (k, v) in lift_defs.as_object().unwrap() {
        assert!(!defs.contains_key(k), "duplicate def {k}");
        defs.insert(k.clone(), v.clone());
    }
    defs.insert("lift".into(), lift);
    jsonschema::validator_for(&out).unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn exit_codes() {
    let ok = stadisc(&["admissible", &fixture("quartic_t0.5.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json_of(&ok)["payload"]["admissible"], Value::Bool(true));
    let fail = stadisc(&["admissible", &fixture("quartic_t0.7.json")]);
    assert_eq!(fail.status.code(), Some(2));
    assert_eq!(json_of(&fail)["payload"]["admissible"], Value::Bool(false));
    let missing = stadisc(&["validate", "/nonexistent/model.json"]);
    assert_eq!(missing.status.code(), Some(1));
    let usage = stadisc(&["kernel"]);
    assert_eq!(usage.status.code(), Some(1));
    let not_adm = stadisc(&["index", &fixture("quartic_t0.7.json")]);
    assert_eq!(not_adm.status.code(), Some(2));
}

#[test]
fn kernel_on_sphere() {
    let out = stadisc(&["kernel", &fixture("sphere.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["payload"]["nullity"], 5);
    assert_eq!(v["payload"]["matches"], true);
}

#[test]
fn plot_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("detq.csv");
    let out = stadisc(&[
        "admissible",
        &fixture("quartic_t0.3.json"),
        "--emit-plot",
        csv.to_str().unwrap(),
        "--plot-samples",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,abs_detQ"));
    assert_eq!(lines.count(), 64);
}

#[test]
fn outputs_match_schema() {
    let validator = output_validator();
    let dir = tempfile::tempdir().unwrap();
    let lift = dir.path().join("lift.json");
    let lift_s = lift.to_str().unwrap().to_string();
    let sphere = fixture("sphere.json");
    let pert = fixture("sphere_perturbation.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", &sphere],
        vec!["admissible", &sphere],
        vec!["admissible", &sphere, "--search", "--budget", "16"],
        vec!["index", &sphere],
        vec!["disc", &sphere, "--lift-out", &lift_s],
        vec!["kernel", &sphere, "--pinned"],
        vec!["indices", &sphere],
        vec!["solve", &sphere, "--perturbation", &pert, "--start", &lift_s],
        vec!["jets", &sphere],
    ];
    for args in runs {
        let out = stadisc(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json_of(&out);
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    let mut broken = json_of(&stadisc(&["disc", &sphere]));
    broken["payload"]["lift"]["h"] = Value::from("not a disc list");
    assert!(!validator.is_valid(&broken));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&lift).unwrap()).unwrap();
    assert!(jsonschema::is_valid(&schema("lift.v1.schema.json"), &saved));
}

#[test]
fn fixtures_match_schema() {
    let model = jsonschema::validator_for(&schema("model.v1.schema.json")).unwrap();
    let pert = jsonschema::validator_for(&schema("perturbation.v1.schema.json")).unwrap();
    for entry in std::fs::read_dir(root().join("fixtures")).unwrap() {
        let path = entry.unwrap().path();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let ok = if name.contains("perturbation") {
            pert.is_valid(&v)
        } else {
            model.is_valid(&v)
        };
        assert!(ok, "{name}");
    }
}

#[test]
fn search_is_deterministic() {
    let args = ["admissible", &fixture("power_sums_4_6.json"), "--search", "--budget", "32", "--seed", "5"];
    let (a, b) = (json_of(&stadisc(&args)), json_of(&stadisc(&args)));
    assert_eq!(a["payload"], b["payload"]);
    assert_eq!(a["manifest"]["seed"], 5);
}
