use std::path::Path;
use std::process::{Command, Output};

use diamfam::io::parse_json;
use diamfam::{SetMask, Template, TemplateKind};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diamfam"))
        .args(args)
        .env_remove("DIAMFAM_SEED")
        .env_remove("DIAMFAM_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_report(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = run(&all);
    (serde_json::from_slice(&o.stdout).expect("json report"), o.status.code().unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bound_prints_value() {
    let o = run(&["bound", "--id", "KLEITMAN", "--n", "10", "--s", "4", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "56");
    let (r, _) = json_report(&["bound", "--id", "SECOND_STAB", "--n", "10", "--s", "5"]);
    assert_eq!(r["results"]["value"], "74");
    assert_eq!(r["results"]["parts"], serde_json::json!(["74", "68"]));
    let (r, _) = json_report(&["bound", "--id", "HM", "--n", "7", "--k", "3"]);
    assert_eq!(r["results"]["value"], "13");
}

#[test]
fn ladder_csv() {
    let o = run(&["bound", "--ladder", "--n", "10", "--s", "4", "--csv", "--format", "text"]);
    let text = stdout(&o);
    assert!(text.contains("KLEITMAN,10,4,56,true"), "{text}");
    assert!(text.contains("FRANKL_DIAM,10,4,36,true"));
    assert!(text.contains("SECOND_STAB,10,4,31,true"));
}

#[test]
fn construct_then_classify_v() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("v.json");
    assert_eq!(run(&["construct", "--kind", "V", "--n", "5", "--out", p(&fam)]).status.code(), Some(0));
    let (r, code) = json_report(&["classify", "--in", p(&fam), "--s", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["level"], 2);
    assert_eq!(r["results"]["label"]["kind"], "V");
}

#[test]
fn construct_echoes_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("h.json");
    run(&["construct", "--kind", "H", "--n", "6", "--s", "4", "--D", "1,2,3", "--out", p(&fam)]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&fam).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["kind"], "H");
    assert_eq!(doc["metadata"]["expected_size"], "20");
    assert_eq!(doc["members"].as_array().unwrap().len(), 20);
}

#[test]
fn compress_r_at_y_gives_h() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.json");
    let out = dir.path().join("out.json");
    let trace = dir.path().join("trace.json");
    run(&["construct", "--kind", "R", "--n", "7", "--s", "4", "--set", "2,3,4,5", "--y", "3", "--out", p(&r)]);
    let o = run(&["compress", "--in", p(&r), "--coordinate", "3", "--out", p(&out), "--trace", p(&trace)]);
    assert_eq!(o.status.code(), Some(0));
    let got = parse_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let n = got.n();
    let want = Template::H { n, s: 4, d_set: SetMask::from_elements(n, [2, 4, 5]).unwrap(), y: 1 }.build().unwrap();
    assert_eq!(got, want);
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["steps"][0]["coordinate"], 3);
}

#[test]
fn construct_round_trips_for_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    for kind in TemplateKind::ALL {
        let (n, extra): (usize, Vec<&str>) = match kind {
            TemplateKind::HM | TemplateKind::T3 => (7, vec!["--k", "3"]),
            TemplateKind::Lex => (6, vec!["--k", "3", "--m", "7"]),
            k if k.fixed_s().is_some() => (7, vec![]),
            TemplateKind::R => (7, vec!["--s", "4"]),
            _ => (7, vec!["--s", "3"]),
        };
        let path = dir.path().join(format!("{}.json", kind.name()));
        let ns = n.to_string();
        let mut args = vec!["construct", "--kind", kind.name(), "--n", &ns, "--out", p(&path)];
        args.extend(extra);
        assert_eq!(run(&args).status.code(), Some(0), "{kind}");
        let fam = parse_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let meta: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(meta["metadata"]["expected_size"], fam.len().to_string(), "{kind}");
    }
}

#[test]
fn search_writes_report_and_enumerates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let o = run(&["search", "--n", "6", "--s", "4", "--level", "2", "--enumerate", "--json", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["exhausted"], true);
    assert_eq!(r["results"]["max_size"], 20);
    assert_eq!(r["results"]["witness_count"], 4);
}

#[test]
fn search_time_limit_exits_two() {
    let o = run(&["search", "--n", "7", "--s", "5", "--time-limit", "0.000001"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_lemma_passes() {
    let (r, code) = json_report(&["verify-lemma", "--id", "HK32", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["pass"], true);
    let (r, code) = json_report(&["verify-lemma", "--id", "LN", "--n", "6", "--k", "3", "--l", "2", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["seed"], 7);
}

#[test]
fn report_runs_selected_criteria() {
    let o = run(&["report", "--suite", "acceptance", "--criterion", "1,8a", "--format", "text"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("criterion 1   PASS"));
    assert!(text.contains("criterion 8a  PASS"));
    let o = run(&["report", "--suite", "acceptance", "--criterion", "8b"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["bound", "--n", "3", "--bogus"]).status.code(), Some(64));
    assert_eq!(run(&["nope"]).status.code(), Some(64));
    assert_eq!(run(&["search", "--n", "12", "--s", "4"]).status.code(), Some(64));
    assert_eq!(run(&["construct", "--kind", "Q", "--n", "7", "--s", "4"]).status.code(), Some(64));
}

#[test]
fn malformed_input_exits_65() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "n=4\n{1,9}\n").unwrap();
    assert_eq!(run(&["inspect", "--in", p(&bad)]).status.code(), Some(65));
}

#[test]
fn reports_are_deterministic() {
    let args = ["search", "--n", "6", "--s", "3", "--level", "2", "--enumerate"];
    let (mut a, _) = json_report(&args);
    let (mut b, _) = json_report(&args);
    a["wall_time_ms"] = Value::Null;
    b["wall_time_ms"] = Value::Null;
    assert_eq!(a, b);
}
