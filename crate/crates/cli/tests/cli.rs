use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ordgeo"));
    c.env_remove("ORDGEO_CORPUS_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus/v1")
}

fn check_stdin(script: &str) -> Output {
    let mut child = bin()
        .args(["check", "/dev/stdin"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn prove_output_rechecks() {
    for args in [
        vec!["--from", "I6", "--goal", "W1"],
        vec!["--from", "I6", "--goal", "W4"],
        vec!["--from", "I5,ODO", "--goal", "OO"],
        vec!["--from", "I5,I6,ODO", "--goal", "W2"],
        vec!["--from", "I5,I6,ODO", "--goal", "W3", "--direct"],
        vec!["--from", "I7,I8,ODO", "--goal", "I6", "--max-term-depth", "3"],
    ] {
        let o = run(&[&["prove"], &args[..]].concat());
        assert_eq!(code(&o), 0, "{args:?}");
        let c = check_stdin(&stdout(&o));
        assert_eq!(code(&c), 0, "{args:?}: {}", stdout(&c));
        assert!(stdout(&c).contains("valid"));
    }
}

#[test]
fn prove_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w1.prf");
    let o = run(&["prove", "--from", "I6", "--goal", "W1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let c = run(&["check", out.to_str().unwrap()]);
    assert_eq!(code(&c), 0);
}

#[test]
fn staged_is_default_for_w2() {
    let o = run(&["--format", "records", "prove", "--from", "I5,I6,ODO", "--goal", "W2"]);
    let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["detail"]["mode"], "staged");
    let o = run(&["--format", "records", "prove", "--from", "I5,I6,ODO", "--goal", "W2", "--direct"]);
    let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["detail"]["mode"], "direct");
}

#[test]
fn search_failure_exits_3() {
    let o = run(&["prove", "--from", "I6", "--goal", "W2"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("exhausted"));
    let o = run(&["prove", "--from", "I6", "--goal", "W1", "--max-lines", "3"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("budget-exceeded"));
}

#[test]
fn unknown_names_exit_2() {
    assert_eq!(code(&run(&["prove", "--from", "I6", "--goal", "W9"])), 2);
    assert_eq!(code(&run(&["models", "--from", "NOPE", "--goal", "W1"])), 2);
}

#[test]
fn check_reports_first_failure() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(corpus_dir().join("a.prf")).unwrap();
    let bad = src.replacen("LDS 7 3", "RDS 7 3", 1);
    assert_ne!(src, bad);
    let bad_path = dir.path().join("bad.prf");
    std::fs::write(&bad_path, bad).unwrap();
    let good = corpus_dir().join("d.prf");
    let o = run(&["check", bad_path.to_str().unwrap(), good.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("bad.prf: line 8"), "{out}");
    assert!(!out.contains("/d.prf"));
    let o = run(&["check", "--keep-going", bad_path.to_str().unwrap(), good.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("d.prf: valid"));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("junk.prf");
    std::fs::write(&p, "1. UNDIR x PREMISE\n").unwrap();
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn check_output_follows_input_order() {
    let files: Vec<String> = ["e", "a", "d", "b1", "c", "b2", "a", "e"]
        .iter()
        .map(|f| corpus_dir().join(format!("{f}.prf")).display().to_string())
        .collect();
    let mut args = vec!["--format", "records", "--jobs", "4", "check"];
    args.extend(files.iter().map(String::as_str));
    let o = run(&args);
    assert_eq!(code(&o), 0);
    let items: Vec<String> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter_map(|v| v["item"].as_str().map(String::from))
        .collect();
    assert_eq!(items, files);
}

#[test]
fn models_expectations() {
    let o = run(&["models", "--from", "I5,I6", "--goal", "W2", "--max-size", "4", "--expect-counter"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("countermodel of size 2"));
    assert_eq!(code(&run(&["models", "--from", "I5,I6", "--goal", "W2", "--expect-none"])), 4);
    assert_eq!(code(&run(&["models", "--from", "I6", "--goal", "W4", "--max-size", "3", "--expect-none"])), 0);
    assert_eq!(code(&run(&["models", "--from", "I5,I6,ODO", "--goal", "W3", "--max-size", "3", "--expect-none"])), 0);
    assert_eq!(code(&run(&["models", "--from", "I6", "--goal", "W4", "--expect-counter"])), 4);
}

#[test]
fn models_records_round_trip() {
    let o = run(&["--format", "records", "models", "--from", "I5,I6", "--goal", "W3"]);
    let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    let rec: ordgeo::models::CountermodelRecord = serde_json::from_value(first["detail"].clone()).unwrap();
    let s = rec.to_structure().unwrap();
    assert_eq!(s.size, 3);
}

#[test]
fn defined_relations_need_opt_in() {
    assert_eq!(code(&run(&["models", "--from", "I7conv", "--goal", "I7"])), 2);
    assert_eq!(code(&run(&["--expand-defs", "models", "--from", "I7conv", "--goal", "I7", "--expect-none"])), 0);
}

#[test]
fn corpus_command_and_dir_override() {
    let o = run(&["corpus"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.contains(": valid")).count(), 6);

    let dir = tempfile::tempdir().unwrap();
    for f in ["a", "b1", "b2", "c", "d", "e"] {
        std::fs::copy(corpus_dir().join(format!("{f}.prf")), dir.path().join(format!("{f}.prf"))).unwrap();
    }
    let c = dir.path().join("c.prf");
    let src = std::fs::read_to_string(&c).unwrap();
    std::fs::write(&c, src.replacen("US", "UG", 1)).unwrap();
    let o = bin().arg("corpus").env("ORDGEO_CORPUS_DIR", dir.path()).output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("C: line"));
}

#[test]
fn config_file_sets_bounds_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ordgeo.toml");
    std::fs::write(&cfg, "[search]\nmax-lines = 5\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&run(&["--config", c, "prove", "--from", "I6", "--goal", "W1"])), 3);
    assert_eq!(code(&run(&["--config", c, "prove", "--from", "I6", "--goal", "W1", "--max-lines", "50"])), 0);
    std::fs::write(&cfg, "[search]\nmax-linez = 5\n").unwrap();
    assert_eq!(code(&run(&["--config", c, "prove", "--from", "I6", "--goal", "W1"])), 2);
}

#[test]
fn config_file_extends_signature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ordgeo.toml");
    std::fs::write(&cfg, "[signature]\npredicates = { P = 1 }\nfunctions = { s = 1 }\n").unwrap();
    let proof = dir.path().join("p.prf");
    std::fs::write(&proof, "1. (Ax)[P x -> P [s x]]  PREMISE\n2. P a  PREMISE\n3. P a -> P [s a]  US (a x) 1\n4. P [s a]  MP 3 2\n")
        .unwrap();
    let (c, p) = (cfg.to_str().unwrap(), proof.to_str().unwrap());
    assert_eq!(code(&run(&["check", p])), 2);
    let o = run(&["--config", c, "check", p]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
