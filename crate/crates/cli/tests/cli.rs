mod common;

use common::{code, fixture, golden, prnred, schema, schema_errors, stderr, stdout};
use serde_json::Value;

fn fig1() -> String {
    fixture("fig1.prn").display().to_string()
}

fn json(out: &std::process::Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON on stdout")
}

#[test]
fn reduce_matches_golden_and_schema() {
    let out = prnred(["reduce", &fig1(), "--output", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), golden("example2-reduce.json"));
    let errors = schema_errors(&schema("reduction-report.schema.json"), &json(&out));
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn reduce_is_byte_for_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = prnred(["reduce", &fig1(), "--json", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn reduce_timing_is_opt_in() {
    let out = prnred(["reduce", &fig1(), "--output", "json", "--timing"]);
    let report = json(&out);
    assert!(report["timing_ms"].as_f64().unwrap() >= 0.0);
    assert!(schema_errors(&schema("reduction-report.schema.json"), &report).is_empty());
    assert!(json(&prnred(["reduce", &fig1(), "--output", "json"])).get("timing_ms").is_none());
}

#[test]
fn reduce_text_lists_limits() {
    let out = prnred(["reduce", &fig1()]);
    let text = stdout(&out);
    assert!(text.contains("objectives (8):"));
    assert!(text.contains("valid partial transitions (7):"));
    assert!(text.contains("activation limits: a=1 b=1 c=1 d=-inf"));
    assert!(text.contains("inhibition limits: a=+inf b=0 c=0 d=+inf"));
}

#[test]
fn unknown_goal_component_is_an_input_error() {
    let out = prnred(["reduce", &fig1(), "--goal", "zz=1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("zz"));
}

#[test]
fn flags_override_the_model_file() {
    let out = prnred(["reduce", &fig1(), "--initial", "a=0,b=1,c=0,d=0", "--goal", "c=1", "--output", "json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["initial"], serde_json::json!([0, 1, 0, 0]));
    assert_eq!(report["goal"]["component"], "c");
    let out = prnred(["reduce", &fig1(), "--initial", "a=0,b=0"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("misses c, d"));
}

/// `l` as a number with -inf below and +inf above every value.
fn rank(l: &Value) -> i64 {
    match l {
        Value::String(s) if s == "-inf" => i64::MIN,
        Value::String(s) if s == "+inf" => i64::MAX,
        v => v.as_i64().unwrap(),
    }
}

#[test]
fn approx_limits_are_at_least_as_permissive() {
    let exact = json(&prnred(["reduce", &fig1(), "--output", "json"]));
    let approx = json(&prnred(["reduce", &fig1(), "--output", "json", "--mode", "approx"]));
    assert_eq!(approx["mode"], "approx");
    let e = exact["limits"]["per_state"].as_array().unwrap();
    let a = approx["limits"]["per_state"].as_array().unwrap();
    assert_eq!(e.len(), a.len());
    for (e, a) in e.iter().zip(a) {
        assert_eq!(e["regulator_state"], a["regulator_state"]);
        assert!(rank(&a["activation"]) >= rank(&e["activation"]));
        assert!(rank(&a["inhibition"]) <= rank(&e["inhibition"]));
    }
}

#[test]
fn reach_without_reduction() {
    let out = prnred(["reach", &fig1(), "--reduce", "off", "--output", "json"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["unreduced"]["verdict"], "reached");
    assert!(r["unreduced"]["states"].as_u64().unwrap() <= 16);
    assert!(r["reduced"].is_null());
}

#[test]
fn reach_with_reduction_explores_fewer_states() {
    let out = prnred(["reach", &fig1(), "--output", "json"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["unreduced"]["states"], 16);
    assert_eq!(r["reduced"]["verdict"], "reached");
    assert!(r["reduced"]["states"].as_u64().unwrap() <= 8);
}

#[test]
fn reach_unreachable_goal() {
    let frozen = fixture("frozen.prn").display().to_string();
    let out = prnred(["reach", &frozen]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("unreached"));
}

#[test]
fn reach_budget_exhaustion_is_unknown() {
    let out = prnred(["reach", &fig1(), "--reduce", "off", "--budget", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("unknown"));
}

#[test]
fn cover_goldens() {
    for (change, file, members, specs) in [("0:1", "example3-a-up.json", 3, 9), ("1:0", "example3-a-down.json", 6, 12)] {
        let out = prnred(["cover", &fig1(), "--component", "a", "--change", change, "--output", "json"]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), golden(file));
        let r = json(&out);
        assert_eq!(r["members"].as_array().unwrap().len(), members);
        assert_eq!(r["spec_count"], specs);
        assert!(schema_errors(&schema("cover-report.schema.json"), &r).is_empty());
    }
}

#[test]
fn cover_text_uses_wildcards() {
    let out = prnred(["cover", &fig1(), "--component", "a", "--change", "1:0"]);
    let text = stdout(&out);
    assert!(text.contains("⟨b=0 c=0 d=*⟩"));
    assert!(text.contains("specifications: 12 (concrete cover: 18)"));
}

#[test]
fn cover_without_enabling_states_is_empty() {
    let frozen = fixture("frozen.prn").display().to_string();
    let out = prnred(["cover", &frozen, "--component", "a", "--change", "0:1", "--output", "json"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert!(r["members"].as_array().unwrap().is_empty());
    assert_eq!(r["spec_count"], 0);
}

#[test]
fn cover_rejects_bad_changes() {
    let out = prnred(["cover", &fig1(), "--component", "q", "--change", "0:1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("`q`"));
    for change in ["1:2", "0:0", "0-1"] {
        let out = prnred(["cover", &fig1(), "--component", "a", "--change", change]);
        assert_eq!(code(&out), 3, "{change}");
    }
}

#[test]
fn oracle_lists_minimal_traces_in_length_order() {
    let out = prnred(["oracle", &fig1(), "--max-len", "4", "--output", "json"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    let lens: Vec<usize> = r["traces"].as_array().unwrap().iter().map(|t| t.as_array().unwrap().len()).collect();
    assert_eq!(lens, [2, 3, 4]);
    let out = prnred(["oracle", &fig1(), "--max-len", "1", "--output", "json"]);
    assert!(json(&out)["traces"].as_array().unwrap().is_empty());
}

#[test]
fn oracle_cap_points_to_lattice_mode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("open.prn");
    std::fs::write(&path, "component a 1\ncomponent b 1\ninfluence b -> a\ninfluence a -> b\ninitial a=0,b=0\ngoal a=1\n")
        .unwrap();
    let out = prnred(["oracle", path.to_str().unwrap(), "--cap", "2"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("lattice"));
    let out = prnred(["oracle", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn campaign_is_reproducible() {
    let args = ["oracle", "--campaign", "--seed", "42", "--count", "20", "--output", "json"];
    let a = prnred(args);
    let b = prnred(args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["seed"], 42);
    assert_eq!(r["instances"].as_array().unwrap().len(), 20);
}

#[test]
fn oracle_without_model_needs_campaign() {
    assert_eq!(code(&prnred(["oracle"])), 3);
}

#[test]
fn parses_shipped_fixture() {
    let out = prnred(["convert", &fig1(), "--to", "json"]);
    assert_eq!(code(&out), 0);
    let m = json(&out);
    assert_eq!(m["components"].as_array().unwrap().len(), 4);
    assert_eq!(m["influences"].as_array().unwrap().len(), 6);
    let ps = m["parametrisations"].as_array().unwrap();
    assert_eq!(ps.len(), 2);
    for p in ps {
        assert_eq!(p["rows"].as_array().unwrap().len(), 14);
    }
}

#[test]
fn shipped_fixtures_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig1.prn", "frozen.prn"] {
        let path = fixture(name).display().to_string();
        let text = stdout(&prnred(["convert", &path]));
        let as_json = stdout(&prnred(["convert", &path, "--to", "json"]));
        let j = dir.path().join("m.json");
        std::fs::write(&j, &as_json).unwrap();
        assert_eq!(stdout(&prnred(["convert", j.to_str().unwrap()])), text);
        let t = dir.path().join("m.prn");
        std::fs::write(&t, &text).unwrap();
        assert_eq!(stdout(&prnred(["convert", t.to_str().unwrap()])), text);
        let j2 = dir.path().join("m.data");
        std::fs::write(&j2, &as_json).unwrap();
        assert_eq!(stdout(&prnred(["convert", j2.to_str().unwrap(), "--format", "json", "--to", "json"])), as_json);
    }
}

#[test]
fn json_model_reduces_like_the_line_format() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("fig1.json");
    std::fs::write(&j, stdout(&prnred(["convert", &fig1(), "--to", "json"]))).unwrap();
    let out = prnred(["reduce", j.to_str().unwrap(), "--output", "json"]);
    assert_eq!(stdout(&out), golden("example2-reduce.json"));
}

#[test]
fn semantic_errors_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.prn");
    std::fs::write(&path, "component a 1\ninfluence x -> a +\n").unwrap();
    let out = prnred(["convert", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("`x`"));
}

#[test]
fn syntax_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.prn");
    std::fs::write(&path, "component a 1\nnode b 1\n").unwrap();
    let out = prnred(["reduce", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let err = stderr(&out);
    assert!(err.contains("bad.prn: line 2, column 1: unknown key `node`"), "{err}");
}

#[test]
fn missing_file_is_an_input_error() {
    let out = prnred(["reduce", "/nonexistent/model.prn"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("/nonexistent/model.prn"));
}

#[test]
fn log_level_comes_from_the_environment() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_prnred"))
        .args(["reduce", &fig1()])
        .env("PRNRED_LOG", "info")
        .output()
        .unwrap();
    assert!(stderr(&out).contains("loaded 4 components"));
    assert!(stderr(&prnred(["reduce", &fig1()])).is_empty());
}
