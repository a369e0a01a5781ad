use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn racetrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_racetrack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = racetrack(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn code(args: &[&str]) -> i32 {
    racetrack(args).status.code().expect("exited normally")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn count(haystack: &str, needle: &str) -> usize {
    haystack.matches(needle).count()
}

/// `x1,x2@v1,v2` lines of `traj --expand` as a trajectory JSON array.
fn trajectory_json(lines: &[&str]) -> String {
    let configs: Vec<String> = lines
        .iter()
        .map(|line| {
            let (p, v) = line.split_once('@').unwrap();
            format!(r#"{{"p":[{p}],"v":[{v}]}}"#)
        })
        .collect();
    format!("[{}]", configs.join(","))
}

#[test]
fn cost_of_known_pairs() {
    let out = ok(&["cost", "1,2@1,2", "12,3@2,1"]);
    assert_eq!(out.lines().next(), Some("5"));
    assert_eq!(ok(&["cost", "3,-1@2,0", "3,-1@2,0"]).lines().next(), Some("0"));

    let out = ok(&["cost", "1,3@0,3", "7,6@0,3"]);
    assert_eq!(out.lines().next(), Some("11"));
    assert!(out.lines().any(|l| l.starts_with("dim 2:") && l.ends_with("[1,1] ∪ [11,∞)")), "{out}");

    let json: serde_json::Value = serde_json::from_str(&ok(&["cost", "1,2@1,2", "12,3@2,1", "--json"])).unwrap();
    assert_eq!(json["cost"], 5);
    assert_eq!(json["intervals"].as_array().map(Vec::len), Some(2));
}

#[test]
fn traj_prints_a_compact_witness() {
    let out = ok(&["traj", "0@6", "24@5", "--length", "16"]);
    assert!(out.starts_with("length 16\n"), "{out}");
    assert!(out.contains("dim 1: 0@6 (-,8)(0,1)(+,7)"), "{out}");

    let out = ok(&["traj", "1,2@1,2", "12,3@2,1", "--expand"]);
    assert!(out.starts_with("length 5\n"));
    // header, two axes, then every configuration
    assert_eq!(out.lines().count(), 3 + 6);
    assert_eq!(out.lines().last(), Some("12,3@2,1"));

    let out = ok(&["traj", "4@-2", "4@-2"]);
    assert!(out.starts_with("length 0\n"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["traj", "0@6", "24@5", "--length", "7"]), 3);
    assert_eq!(code(&["cost", "1,2@1", "3,4@0,0"]), 2);
    assert_eq!(code(&["cost", "1,2", "3,4@0,0"]), 2);
    assert_eq!(code(&["cost", "1@0", "1,2@0,0"]), 2);
    assert_eq!(code(&["multi", "/nonexistent/instance.json"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
}

#[test]
fn multi_solves_small_instances() {
    let dir = TempDir::new().unwrap();
    let single = write(&dir, "one.json", r#"{"d":2,"points":[[3,4]],"tour":false}"#);
    let out = ok(&["multi", &single]);
    assert!(out.contains("\"cost\": 0"), "{out}");

    let line = write(&dir, "line.json", r#"{"d":1,"points":[[0],[24]],"tour":false}"#);
    let out = ok(&["multi", &line, "--policy", "conjecture"]);
    assert!(out.contains("\"cost\": 10"), "{out}");
    let result = dir.path().join("line.out.json");
    ok(&["multi", &line, "--output", result.to_str().unwrap()]);
    assert!(fs::read_to_string(&result).unwrap().contains("\"cost\": 10"));

    assert_eq!(code(&["multi", &line, "--policy", "fixed"]), 2);
}

#[test]
fn gen_is_deterministic() {
    let a = ok(&["gen", "random", "--n", "6", "--l", "50", "--d", "3", "--seed", "11"]);
    let b = ok(&["gen", "random", "--n", "6", "--l", "50", "--d", "3", "--seed", "11"]);
    let c = ok(&["gen", "random", "--n", "6", "--l", "50", "--d", "3", "--seed", "12"]);
    assert_eq!(a, b);
    assert_ne!(a, c);

    let slope: String = ok(&["gen", "slope", "--n", "2", "--delta", "7"]).split_whitespace().collect();
    assert_eq!(slope, r#"{"d":2,"points":[[0,0],[7,-1],[14,-2]],"tour":false}"#);
}

#[test]
fn bench_writes_versioned_csv() {
    let out = ok(&["bench", "--sweep", "n", "--ns", "3", "--fixed-l", "20", "--policies", "conjecture"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3, "{out}");
    assert_eq!(lines[0], "# racetrack-bench v1");
    assert_eq!(lines[1], "n,L,d,policy,seed,candidate_count,runtime_ms,cost");
    let fields: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fields.len(), 8);
    assert_eq!(&fields[..5], &["3", "20", "2", "conjecture", "0"]);
}

#[test]
fn plot_draws_one_arrow_per_move() {
    let dir = TempDir::new().unwrap();
    let expanded = ok(&["traj", "1,2@1,2", "12,3@2,1", "--expand"]);
    let configs: Vec<&str> = expanded.lines().skip(3).collect();
    let traj = write(&dir, "traj.json", &trajectory_json(&configs));
    let svg_path = dir.path().join("traj.svg");
    ok(&["plot", &traj, "--out", svg_path.to_str().unwrap()]);
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(count(&svg, r#"class="move""#), 6);

    let inst = write(&dir, "inst.json", r#"{"d":2,"points":[[0,0],[3,1],[5,5]],"tour":false}"#);
    let empty = write(&dir, "empty.json", "[]");
    let svg_path = dir.path().join("empty.svg");
    ok(&["plot", &empty, "--out", svg_path.to_str().unwrap(), "--instance", &inst]);
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert_eq!(count(&svg, r#"class="move""#), 0);
    assert_eq!(count(&svg, "<circle"), 3);

    let flat = write(&dir, "flat.json", r#"{"d":1,"points":[[0],[4]],"tour":false}"#);
    let out = dir.path().join("flat.svg");
    assert_eq!(code(&["plot", &flat, "--out", out.to_str().unwrap()]), 2);
}

#[test]
fn plot_renders_multipoint_results() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.json", r#"{"d":2,"points":[[0,0],[6,2],[2,5]],"tour":false}"#);
    let result = dir.path().join("result.json");
    ok(&["multi", &inst, "--output", result.to_str().unwrap()]);
    let svg_path = dir.path().join("result.svg");
    ok(&["plot", result.to_str().unwrap(), "--out", svg_path.to_str().unwrap()]);
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(count(&svg, r#"class="move""#) > 0);
    let cities = svg.split(r#"class="cities""#).nth(1).unwrap().split("</g>").next().unwrap();
    assert_eq!(count(cities, "<circle"), 3);
}

fn cost_of(result: &Path) -> i64 {
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(result).unwrap()).unwrap();
    value["cost"].as_i64().unwrap()
}

#[test]
fn hull_constraint_costs_moves_on_the_slope() {
    let dir = TempDir::new().unwrap();
    let slope = ok(&["gen", "slope", "--n", "60", "--delta", "7"]);
    let inst = write(&dir, "slope.json", &slope);
    let free = dir.path().join("free.json");
    let boxed = dir.path().join("boxed.json");
    ok(&["multi", &inst, "--policy", "conjecture", "--output", free.to_str().unwrap()]);
    ok(&["multi", &inst, "--policy", "conjecture", "--hull-margin", "0", "--output", boxed.to_str().unwrap()]);
    assert!(cost_of(&free) < cost_of(&boxed), "{} vs {}", cost_of(&free), cost_of(&boxed));
}

#[test]
fn oracle_subcommands() {
    let out = ok(&["oracle", "sweep", "--box", "5", "--speed", "3", "--t-max", "20"]);
    assert_eq!(out.lines().last(), Some("PASS"));

    let out = racetrack(&["oracle", "sweep", "--box", "5", "--speed", "3", "--t-max", "20", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));

    let out = ok(&["oracle", "pair", "1,3@0,3", "7,6@0,3"]);
    assert_eq!(out.lines().last(), Some("PASS"));
    assert!(out.contains("PASS cost: closed 11, search 11"), "{out}");

    let out = racetrack(&["oracle", "pair", "1,2@1,2", "12,3@2,1", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(code(&["oracle", "pair", "1,3@0,3", "7,6@0,3", "--budget", "10"]), 4);

    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.json", r#"{"d":2,"points":[[0,0],[5,1],[2,3]],"tour":false}"#);
    let out = ok(&["oracle", "multi", &inst, "--cap", "6"]);
    assert_eq!(out.lines().last(), Some("PASS"), "{out}");
    let out = ok(&["oracle", "multi", &inst, "--hull-margin", "1", "--cap", "6"]);
    assert_eq!(out.lines().last(), Some("PASS"), "{out}");
}
