use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_routenet"));
    c.env_remove("ROUTENET_BUDGET");
    c
}

fn file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("routenet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn arg(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compile_unit_is_a_boxed_one() {
    let p = file("unit.t", "*\n");
    let o = run(&["compile", arg(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let json = stdout(&o);
    assert!(json.starts_with("{\"sum\""));
    assert_eq!(json.matches("\"sym\":\"box\"").count(), 1);
    assert_eq!(json.matches("\"sym\":\"one\"").count(), 1);
    assert!(json.contains("\"label\":\"out\""));
    let dot = run(&["compile", arg(&p), "--emit", "dot"]);
    assert!(stdout(&dot).starts_with("digraph"));
}

#[test]
fn area_of_comm3_has_six_free_ports() {
    let p = file("comm3.mat", "in: 1 2 3\nout: 1 2 3\n0 1 1\n1 0 1\n1 1 0\n");
    let o = run(&["area", arg(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let free = text.split("\"cells\"").next().unwrap();
    assert_eq!(free.matches("\"port\"").count(), 6);
}

#[test]
fn verify_trace_passes() {
    let o = run(&["verify", "--suite", "trace", "--cases", "200"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("200/200 pass"));
    assert!(stdout(&o).contains("seed 0"));
}

#[test]
fn verify_output_is_deterministic() {
    let a = run(&["verify", "--suite", "compose", "--seed", "7", "--cases", "20"]);
    let b = run(&["verify", "--suite", "compose", "--seed", "7", "--cases", "20"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn values_are_sorted_multisets() {
    let p = file("values.t", "(\\x. x) * || *\n");
    let o = run(&["values", arg(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[*, *]\n");
}

#[test]
fn check_prints_type_and_effect() {
    let c = file("r.ctx", "r : Unit\n");
    let p = file("get.t", "get r\n");
    let o = run(&["check", arg(&c), arg(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("{r}"));
}

#[test]
fn reduce_round_trips_a_compiled_net() {
    let p = file("beta.t", "(\\x. x) *\n");
    let net = stdout(&run(&["compile", arg(&p)]));
    let n = file("beta.json", &net);
    let o = run(&["reduce", arg(&n), "--deep"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("{\"sum\""));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(64));
    assert_eq!(run(&["area", "/nonexistent/routenet.mat"]).status.code(), Some(66));
    let bad = file("bad.mat", "in: 1\nout: 1\n1 2\n");
    assert_eq!(run(&["area", arg(&bad)]).status.code(), Some(65));
    let bad = file("bad.t", "(\\x.\n");
    assert_eq!(run(&["compile", arg(&bad)]).status.code(), Some(65));
    let c = file("u.ctx", "r : Unit\n");
    let ill = file("ill.t", "* *\n");
    assert_eq!(run(&["check", arg(&c), arg(&ill)]).status.code(), Some(1));
    let p = file("budget.t", "(\\x. x) *\n");
    assert_eq!(run(&["--budget", "0", "values", arg(&p)]).status.code(), Some(75));
}
