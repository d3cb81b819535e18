//! Published-schema conformance: every JSON value the library serializes and
//! every report the binary prints must validate against docs/schemas/.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use jsonschema::Validator;
use serde_json::Value;
use tstar::corpus::{
    dg_lie_instance, random_complex, random_element, random_equivalence, seeded_rng,
};
use tstar::json::{ComplexJson, ElementJson, EquivalenceJson, StructureJson};

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

fn validator(name: &str) -> Validator {
    let raw = std::fs::read_to_string(schema_dir().join(name))
        .unwrap_or_else(|e| panic!("read {name}: {e}"));
    let schema: Value = serde_json::from_str(&raw).unwrap();
    jsonschema::validator_for(&schema).unwrap_or_else(|e| panic!("compile {name}: {e}"))
}

fn assert_valid(v: &Validator, value: &Value, what: &str) {
    if let Err(err) = v.validate(value) {
        panic!("{what} violates schema at {}: {}\nvalue: {value}", err.instance_path(), err);
    }
}

#[test]
fn all_schemas_compile() {
    let mut seen = 0;
    for entry in std::fs::read_dir(schema_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map_or(false, |e| e == "json") {
            validator(path.file_name().unwrap().to_str().unwrap());
            seen += 1;
        }
    }
    assert!(seen >= 7, "expected the full schema set, found {seen}");
}

#[test]
fn serialized_values_validate() {
    let mut rng = seeded_rng(41);
    let v_complex = validator("complex.schema.json");
    let v_map = validator("graded_map.schema.json");
    let v_equiv = validator("equivalence.schema.json");
    let v_elem = validator("element.schema.json");
    let v_struct = validator("structure.schema.json");
    let v_inputs = validator("inputs.schema.json");

    for i in 0..8 {
        let cx = random_complex(&mut rng, -2, 0, 3);
        let j = serde_json::to_value(ComplexJson::from_complex(&cx)).unwrap();
        assert_valid(&v_complex, &j, "complex");
        assert_valid(&v_inputs, &j, "complex as CLI input");

        let eq = random_equivalence(&mut rng, -2, 0, 3);
        let ej = serde_json::to_value(EquivalenceJson::from_equivalence(&eq)).unwrap();
        assert_valid(&v_equiv, &ej, "equivalence");
        assert_valid(&v_inputs, &ej, "equivalence as CLI input");
        let mj = serde_json::to_value(tstar::json::GradedMapJson::from_map(&eq.h_e)).unwrap();
        assert_valid(&v_map, &mj, "graded map");

        let el = random_element(&mut rng, &cx, 4, 3);
        let lj = serde_json::to_value(ElementJson::from_element(&el)).unwrap();
        assert_valid(&v_elem, &lj, "element");

        let s = dg_lie_instance(&mut rng, i);
        let sj = serde_json::to_value(StructureJson::from_structure(&s)).unwrap();
        assert_valid(&v_struct, &sj, "structure");
        assert_valid(&v_inputs, &sj, "structure as CLI input");
    }
}

fn run_cli(args: &[&str], stdin_json: Option<&Value>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tstar"));
    cmd.args(args).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.stdin(if stdin_json.is_some() { Stdio::piped() } else { Stdio::null() });
    let mut child = cmd.spawn().unwrap();
    if let Some(v) = stdin_json {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(serde_json::to_string(v).unwrap().as_bytes())
            .unwrap();
    }
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn cli_reports_validate() {
    let v_report = validator("report.schema.json");
    let mut rng = seeded_rng(42);

    let cx = random_complex(&mut rng, -2, 0, 3);
    let cx_json = serde_json::to_value(ComplexJson::from_complex(&cx)).unwrap();
    let eq = random_equivalence(&mut rng, -2, 0, 2);
    let eq_json = serde_json::to_value(EquivalenceJson::from_equivalence(&eq)).unwrap();
    let s = dg_lie_instance(&mut rng, 2);
    let s_json = serde_json::to_value(StructureJson::from_structure(&s)).unwrap();
    let transfer_json = serde_json::json!({"structure": s_json, "equivalence":
        serde_json::to_value(EquivalenceJson::from_equivalence(
            &tstar::equiv::retract_to_cohomology(&s.complex).unwrap())).unwrap()});

    let cases: Vec<(Vec<&str>, Option<&Value>)> = vec![
        (vec!["complex", "validate"], Some(&cx_json)),
        (vec!["equiv", "check"], Some(&eq_json)),
        (vec!["equiv", "cylinder"], Some(&eq_json)),
        (vec!["trees", "enumerate", "4"], None),
        (vec!["structure", "verify"], Some(&s_json)),
        (vec!["structure", "encode"], Some(&s_json)),
        (vec!["structure", "minimal-model"], Some(&s_json)),
        (vec!["structure", "transfer", "--trials", "4"], Some(&transfer_json)),
        (vec!["morphism", "verify", "--trials", "4"], Some(&eq_json)),
    ];
    for (args, input) in cases {
        let (code, stdout) = run_cli(&args, input);
        assert_eq!(code, 0, "{args:?} exited {code}\nstdout: {stdout}");
        let report: Value = serde_json::from_str(&stdout)
            .unwrap_or_else(|e| panic!("{args:?} stdout is not JSON: {e}\n{stdout}"));
        assert_valid(&v_report, &report, &format!("report of {args:?}"));
        assert_eq!(report["status"], "ok", "{args:?}");
    }
}
