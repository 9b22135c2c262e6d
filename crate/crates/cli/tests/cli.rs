use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn program(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "programs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn semilog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semilog")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = semilog(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn temp_program(src: &str) -> tempfile::NamedTempFile {
    let f = tempfile::Builder::new().suffix(".pl").tempfile().unwrap();
    std::fs::write(f.path(), src).unwrap();
    f
}

#[test]
fn sprinkler_query_is_byte_exact() {
    let o = semilog(&["query", &program("sprinkler.pl"), "--query", "wet"]);
    assert_eq!(stdout(&o), "{\"query\":\"wet\",\"value\":0.6}\n");
    let o = semilog(&["query", &program("sprinkler.pl"), "--query", "\\+ wet"]);
    assert_eq!(stdout(&o), "{\"query\":\"\\\\+ wet\",\"value\":0.4}\n");
}

#[test]
fn semirings_on_the_sprinkler() {
    let p = program("sprinkler.pl");
    let v = |s: &str| json(&["query", &p, "--query", "wet", "--semiring", s])["value"].clone();
    assert_eq!(v("mpe"), 0.3);
    assert_eq!(v("bool"), true);
    assert_eq!(v("count"), 5);
    assert!((v("maxplus").as_f64().unwrap() - 0.3f64.ln()).abs() < 1e-9);
    let o = semilog(&["query", &p, "--query", "wet", "--semiring", "frobenius"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mpe_with_explanation() {
    let v = json(&["mpe", &program("sprinkler.pl"), "--query", "wet"]);
    assert_eq!(v["value"], 0.3);
    let expl: Vec<&str> = v["explanation"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(expl, ["\\+ cloudy", "humid", "sprinkler"]);
}

#[test]
fn worlds_table_and_json() {
    let o = semilog(&["worlds", &program("sprinkler.pl")]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("world  cloudy  humid  sprinkler  entailed"));
    assert!(lines[4].contains("{cloudy, humid, rain, wet}") && lines[4].ends_with("0.1"));
    assert_eq!(lines[9], "total 1.0");

    let v = json(&["worlds", &program("sprinkler.pl"), "--format", "json"]);
    let worlds = v["worlds"].as_array().unwrap();
    assert_eq!(worlds.len(), 8);
    let wet: f64 = worlds
        .iter()
        .filter(|w| w["entailed"].as_array().unwrap().iter().any(|a| a == "wet"))
        .map(|w| w["probability"].as_f64().unwrap())
        .sum();
    assert!((wet - 0.6).abs() < 1e-12);
    assert_eq!(v["total"], 1.0);
}

#[test]
fn world_cap_is_a_resource_error() {
    let o = semilog(&["worlds", &program("sprinkler.pl"), "--cap", "2"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn continuous_program() {
    let v = json(&["query", &program("sprinkler_beta.pl"), "--query", "wet"]);
    assert!((v["value"].as_f64().unwrap() - 0.58288).abs() < 1e-9);
    let v = json(&["query", &program("sprinkler_flip.pl"), "--query", "wet"]);
    assert_eq!(v["value"], 0.6);
}

#[test]
fn non_ground_query_lists_answers() {
    let v = json(&["query", &program("week.pl"), "--query", "wet(X)"]);
    let answers = v["answers"].as_array().unwrap();
    assert_eq!(answers.len(), 7);
    assert_eq!(answers[0]["atom"], "wet(monday)");
    for a in answers {
        assert_eq!(a["value"], 0.6);
    }
}

#[test]
fn gradient_of_the_neural_sprinkler() {
    let v = json(&[
        "query",
        &program("neural_sprinkler.pl"),
        "--query",
        "wet(18, 998)",
        "--semiring",
        "gradient",
        "--model",
        "cloudnet=const:0.6",
    ]);
    assert_eq!(v["value"], 0.74);
    assert_eq!(v["gradient"], serde_json::json!([0.3, 0.4]));
    assert_eq!(v["slots"], serde_json::json!(["humid", "cloudnet:cloudy(18, 998)"]));
}

#[test]
fn learning_reuses_circuits_without_changing_results() {
    let base = [
        "learn",
        &program("neural_sprinkler.pl"),
        "--data",
        &program("neural_sprinkler.jsonl"),
        "--model",
        "cloudnet=const:0.6",
        "--epochs",
        "5",
    ]
    .map(String::from);
    let args: Vec<&str> = base.iter().map(String::as_str).collect();
    let reuse = json(&args);
    let mut fresh_args = args.clone();
    fresh_args.push("--no-reuse");
    let fresh = json(&fresh_args);
    assert_eq!(reuse["compilations"], 1);
    assert_eq!(fresh["compilations"], 5);
    assert_eq!(reuse["loss"], fresh["loss"]);
    assert_eq!(reuse["parameters"], fresh["parameters"]);
    let first = reuse["loss"][0].as_f64().unwrap();
    assert!((first + 0.74f64.ln()).abs() < 1e-9);
    let humid = reuse["parameters"][0]["value"].as_f64().unwrap();
    assert!(humid > 0.8);
}

#[test]
fn learn_rejects_bad_data() {
    let data = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(data.path(), "{\"query\": \"wet(18, 998)\"}\n").unwrap();
    let o = semilog(&["learn", &program("neural_sprinkler.pl"), "--data", data.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(data.path(), "{\"query\": \"wet(18, 998)\", \"p\": 1.5}\n").unwrap();
    let o = semilog(&["learn", &program("neural_sprinkler.pl"), "--data", data.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compile_reports_circuit_properties() {
    let v = json(&["compile", &program("sprinkler.pl"), "--query", "wet"]);
    for k in ["smooth", "deterministic", "decomposable"] {
        assert_eq!(v[k], true, "{k}");
    }
    assert!(v["nodes"].as_u64().unwrap() > 0);
    let o = semilog(&["compile", &program("sprinkler.pl"), "--query", "wet", "--dot"]);
    assert!(stdout(&o).starts_with("digraph"));
    let o = semilog(&["compile", &program("sprinkler.pl"), "--query", "wet", "--nnf"]);
    assert!(stdout(&o).starts_with("nnf "));
}

#[test]
fn grounding_views() {
    let p = program("sprinkler.pl");
    let o = semilog(&["ground", &p, "--query", "wet", "--completion"]);
    assert_eq!(stdout(&o), "rain <=> cloudy & humid\nwet <=> rain | sprinkler\n");
    let o = semilog(&["ground", &p, "--query", "wet", "--dimacs"]);
    assert!(stdout(&o).contains("p cnf 5 6\n"));
    let o = semilog(&["ground", &program("week.pl"), "--query", "wet(monday)"]);
    assert!(!stdout(&o).contains("tuesday"));
}

#[test]
fn parse_round_trips() {
    let once = stdout(&semilog(&["parse", &program("week.pl")]));
    let f = temp_program(&once);
    let twice = stdout(&semilog(&["parse", f.path().to_str().unwrap()]));
    assert_eq!(once, twice);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| semilog(args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["query", "/no/such/file.pl", "--query", "a"]), Some(1));

    let bad = temp_program("a :- b(\n");
    assert_eq!(code(&["query", bad.path().to_str().unwrap(), "--query", "a"]), Some(2));
    let cyclic = temp_program("0.5 :: b.\na :- \\+ a, b.\n");
    assert_eq!(code(&["query", cyclic.path().to_str().unwrap(), "--query", "a"]), Some(3));
    let runaway = temp_program("n(z).\nn(s(X)) :- n(X).\nbig(X) :- n(X), stop(X).\n");
    let o = semilog(&["query", runaway.path().to_str().unwrap(), "--query", "big(Y)", "--depth-limit", "100"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no termination"));
    assert_eq!(code(&["query", &program("sprinkler.pl"), "--query", "wet", "--node-budget", "2"]), Some(4));
}

#[test]
fn output_is_deterministic_across_runs_and_threads() {
    let p = program("week.pl");
    let a = stdout(&semilog(&["query", &p, "--query", "wet(X)"]));
    let b = stdout(&semilog(&["query", &p, "--query", "wet(X)"]));
    let c = stdout(&semilog(&["query", &p, "--query", "wet(X)", "--jobs", "4"]));
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = semilog_cli::run(["semilog", "query", &program("sprinkler.pl"), "--query", "wet"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), "{\"query\":\"wet\",\"value\":0.6}\n");
}
