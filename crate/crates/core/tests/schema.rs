use branchflow::surface::{duck, family_tori_on_solid_torus, validate, BranchedSurfaceSpec};
use serde_json::{json, Value};

const SCHEMA: &str = include_str!("../schema/branched_surface.schema.json");

fn schema() -> jsonschema::Validator {
    jsonschema::validator_for(&serde_json::from_str(SCHEMA).unwrap()).unwrap()
}

fn data(name: &str) -> Value {
    let path = format!("{}/data/{name}.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn parses(v: &Value) -> bool {
    BranchedSurfaceSpec::from_json(&v.to_string()).is_ok()
}

#[test]
fn data_files_conform() {
    let schema = schema();
    for name in ["duck", "torus_no_branch", "genus2_pants"] {
        let v = data(name);
        assert!(schema.is_valid(&v), "{name}");
        let spec = BranchedSurfaceSpec::from_json(&v.to_string()).unwrap();
        assert!(validate(&spec).ok, "{name}: {:?}", validate(&spec).violations);
    }
}

#[test]
fn generated_specs_conform() {
    let schema = schema();
    let mut specs = vec![duck()];
    specs.extend((3..=8).map(|n| family_tori_on_solid_torus(n).unwrap()));
    for spec in specs {
        let v: Value = serde_json::from_str(&spec.to_json()).unwrap();
        assert!(schema.is_valid(&v));
    }
}

#[test]
fn schema_and_parser_agree_on_mutations() {
    let schema = schema();
    let base = data("duck");
    type Mutation = Box<dyn Fn(&mut Value)>;
    let mutations: Vec<(&str, Mutation)> = vec![
        ("unchanged", Box::new(|_| {})),
        ("unknown top-level key", Box::new(|v| v["mode"] = json!("free"))),
        ("missing sheets", Box::new(|v| { v.as_object_mut().unwrap().remove("sheets"); })),
        ("missing twists", Box::new(|v| { v.as_object_mut().unwrap().remove("twists"); })),
        ("genus string", Box::new(|v| v["sheets"][0]["genus"] = json!("1"))),
        ("genus negative", Box::new(|v| v["sheets"][0]["genus"] = json!(-1))),
        ("genus fractional", Box::new(|v| v["sheets"][0]["genus"] = json!(1.5))),
        ("numeric length", Box::new(|v| v["sheets"][0]["boundary_lengths"][0] = json!(6.0))),
        ("boolean length", Box::new(|v| v["branch_curves"][0]["length"] = json!(true))),
        ("unknown source", Box::new(|v| v["branch_curves"][0]["source"] = json!("other"))),
        ("short pair", Box::new(|v| { v["branch_curves"][0]["crossing_pair"].as_array_mut().unwrap().pop(); })),
        ("extra curve key", Box::new(|v| v["branch_curves"][1]["weight"] = json!(1))),
        ("extra end key", Box::new(|v| v["branch_curves"][1]["crossing_pair"][0]["side"] = json!("left"))),
        ("twist string", Box::new(|v| v["twists"]["b1_2"] = json!("half"))),
        ("parameter string", Box::new(|v| v["parameters"]["a"] = json!("6"))),
        ("degree missing", Box::new(|v| { v["branch_curves"][2].as_object_mut().unwrap().remove("degree"); })),
    ];
    for (name, mutate) in mutations {
        let mut v = base.clone();
        mutate(&mut v);
        assert_eq!(schema.is_valid(&v), parses(&v), "{name}");
    }
}

#[test]
fn semantic_errors_pass_schema() {
    // The schema is structural: a broken switch condition is the validator's job.
    let mut v = data("duck");
    v["sheets"][0]["cycle_degree"] = json!(3.0);
    assert!(schema().is_valid(&v));
    let spec = BranchedSurfaceSpec::from_json(&v.to_string()).unwrap();
    assert!(validate(&spec).has_rule("end.switch_condition"));
}
