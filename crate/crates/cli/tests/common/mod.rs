#![allow(dead_code)]

use std::path::PathBuf;

use serde_json::Value;

const SCHEMA_BASE: &str = "https://apulse.dev/schemas/";

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn read_schema(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    serde_json::from_str(&text).unwrap()
}

/// Validator for `<name>.schema.json` with every shipped schema registered
/// so cross-file references resolve offline.
pub fn validator(name: &str) -> jsonschema::Validator {
    let mut options = jsonschema::options();
    for entry in std::fs::read_dir(schema_dir()).unwrap() {
        let file = entry.unwrap().file_name().into_string().unwrap();
        let resource = jsonschema::Resource::from_contents(read_schema(&file)).unwrap();
        options = options.with_resource(format!("{SCHEMA_BASE}{file}"), resource);
    }
    options.build(&read_schema(&format!("{name}.schema.json"))).unwrap()
}

/// Parses `body` and asserts it conforms to the named schema.
pub fn assert_schema(name: &str, body: &str) -> Value {
    let value: Value = serde_json::from_str(body).unwrap_or_else(|e| panic!("not JSON ({e}): {body}"));
    let errors: Vec<String> =
        validator(name).iter_errors(&value).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{name} schema violations: {errors:?}\n{body}");
    value
}
