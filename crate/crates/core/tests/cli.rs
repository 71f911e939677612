use std::path::Path;
use std::process::Command;

use convexcut::io::obj::obj_string;
use convexcut::primitives::{frame, unit_cube};

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_convexcut")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn cube_gives_one_component() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cube.obj");
    std::fs::write(&input, obj_string(&[unit_cube()])).unwrap();
    let rep = dir.path().join("r.json");
    let out = dir.path().join("o.obj");
    let (code, _) = run(&[
        "--input", input.to_str().unwrap(), "--threshold", "0.05",
        "--report", rep.to_str().unwrap(), "--output", out.to_str().unwrap(), "--score",
    ]);
    assert_eq!(code, 0);
    let r = report(&rep);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["components"], 1);
    assert_eq!(r["parts"].as_array().unwrap().len(), 1);
    assert!(r["score"].as_f64().unwrap() < 0.01);
    assert!(std::fs::read_to_string(&rep).unwrap().starts_with("{\n  \"schema\": 1,"));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("o part_0\n"));
}

#[test]
fn open_boundary_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("broken.obj");
    let text = obj_string(&[unit_cube()]);
    let last_face = text.lines().rfind(|l| l.starts_with("f ")).unwrap().to_string();
    let broken: String = text.lines().filter(|l| *l != last_face).map(|l| format!("{l}\n")).collect();
    std::fs::write(&input, broken).unwrap();
    let (code, err) = run(&["--input", input.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("open boundary: edge"), "{err}");
}

#[test]
fn io_and_parse_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["--input", dir.path().join("nope.obj").to_str().unwrap()]);
    assert_eq!(code, 3);
    let bad = dir.path().join("bad.obj");
    std::fs::write(&bad, "v 0 0 zero\n").unwrap();
    let (code, err) = run(&["--input", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn bad_flags_exit_with_one() {
    assert_eq!(run(&["--threshold", "0.1"]).0, 1);
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cube.obj");
    std::fs::write(&input, obj_string(&[unit_cube()])).unwrap();
    assert_eq!(run(&["--input", input.to_str().unwrap(), "--threshold", "-1"]).0, 1);
    assert_eq!(run(&["--input", input.to_str().unwrap(), "--planner", "random"]).0, 1);
}

#[test]
fn greedy_needs_at_least_as_many_parts_and_cap_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("frame.obj");
    std::fs::write(&input, obj_string(&[frame()])).unwrap();
    let mcts = dir.path().join("m.json");
    let greedy = dir.path().join("g.json");
    let (code, _) = run(&["--input", input.to_str().unwrap(), "--report", mcts.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, err) = run(&[
        "--input", input.to_str().unwrap(), "--planner", "greedy", "--max-components", "8",
        "--report", greedy.to_str().unwrap(),
    ]);
    // Greedy slices the frame into ever thinner slabs and hits the cap.
    assert_eq!(code, 2, "{err}");
    let (m, g) = (report(&mcts)["components"].as_u64().unwrap(), report(&greedy)["components"].as_u64().unwrap());
    assert!(m <= g, "{m} > {g}");
    assert_eq!(report(&greedy)["capped"], true);
}

#[test]
fn per_part_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("frame.obj");
    std::fs::write(&input, obj_string(&[frame()])).unwrap();
    let out = dir.path().join("hulls.obj");
    let (code, _) = run(&["--input", input.to_str().unwrap(), "--output", out.to_str().unwrap(), "--per-part"]);
    assert_eq!(code, 0);
    for k in 0..4 {
        assert!(dir.path().join(format!("hulls_part{k}.obj")).exists());
    }
    assert!(!out.exists());
}
