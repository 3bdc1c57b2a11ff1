use std::process::{Command, Output};

fn modborel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modborel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_prints_the_level() {
    let o = modborel(&["classify", "--formula", "(forall x0 (exists x1 (R x0 x1)))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "A2");
}

#[test]
fn reduce_emits_the_requested_bits() {
    let o = modborel(&["reduce", "--name", "matching", "--input", "0;0", "--matrix", "--bits", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let bits = stdout(&o);
    let bits = bits.trim();
    assert_eq!(bits.len(), 64);
    assert!(bits.chars().all(|c| c == '0' || c == '1'));
}

#[test]
fn simulate_core1_is_clean_and_writes_a_trace() {
    let dir = std::env::temp_dir().join(format!("modborel-trace-{}", std::process::id()));
    let o = modborel(&[
        "simulate",
        "--demo",
        "core1",
        "--point",
        "0;0",
        "--stages",
        "100",
        "--trace",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("violations=0"));
    let trace = std::fs::read_to_string(&dir).unwrap();
    std::fs::remove_file(&dir).ok();
    assert!(trace.lines().all(|l| l.starts_with("stage=") && l.contains(" kind=") && l.contains(" detail=")));
    assert_eq!(trace.lines().filter(|l| l.contains("kind=commit")).count(), 100);
    assert!(!trace.contains("kind=switch"));
}

#[test]
fn simulate_switches_once_on_a_witness() {
    let o = modborel(&["simulate", "--demo", "core1", "--point", "001;0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("switches=1"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(modborel(&["simulate", "--demo", "core7", "--point", "0;0"]).status.code(), Some(2));
    assert_eq!(modborel(&["classify", "--formula", "(forall x0"]).status.code(), Some(2));
    assert_eq!(modborel(&["reduce", "--name", "nosuch", "--input", "0;0"]).status.code(), Some(2));
    assert_eq!(modborel(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn help_names_the_constructions() {
    let top = stdout(&modborel(&["--help"]));
    for cmd in ["classify", "prenex", "encode", "decode", "reduce", "eval", "complete", "split", "simulate", "battery"]
    {
        assert!(top.contains(cmd), "{cmd} missing from help");
    }
    let reduce = stdout(&modborel(&["reduce", "--help"]));
    for name in ["identity", "infcoinf", "pad", "matching", "linord", "marker", "diffjoin", "section", "tograph"] {
        assert!(reduce.lines().any(|l| l.trim_start().starts_with(name)), "{name} missing from reduce help");
    }
    assert!(reduce.contains("infinitely many empty columns"));
}

#[test]
fn encode_and_decode_round_trip() {
    let o = modborel(&["encode", "--vocab", "P/1,R/2", "--structure", "size=3; R 0 2; P 1; R 2 2"]);
    assert_eq!(o.status.code(), Some(0));
    let bits = stdout(&o);
    let o = modborel(&["decode", "--vocab", "P/1,R/2", "--bits", bits.trim()]);
    assert_eq!(stdout(&o).trim(), "size=3; P 1; R 0 2; R 2 2");
}

#[test]
fn completion_and_split_report_no_counterexamples() {
    let o = modborel(&[
        "complete",
        "--family",
        "matching",
        "--phi",
        "(exists x0 (forall x1 (not (R x0 x1))))",
        "--lambda",
        "E2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("minus survivors=matching pairs=inf unmatched=0"), "{out}");
    assert!(out.contains("counterexamples=0"));
    let o = modborel(&["split", "--theory", "matching inf inf", "--lambda", "A2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("t1 survivors=matching pairs=inf unmatched=0"));
}

#[test]
fn eval_on_a_structure_and_a_stream() {
    let o = modborel(&["eval", "--formula", "(exists x0 (R x0 x0))", "--vocab", "R/2", "--structure", "size=2; R 1 1"]);
    assert_eq!(stdout(&o).trim(), "true");
    let o = modborel(&[
        "eval",
        "--formula",
        "(forall x0 (P x0))",
        "--stream",
        "infcoinf",
        "--input",
        ";0",
        "--stages",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("stage=3 size=3 verdict=false"), "{}", stdout(&o));
}

#[test]
fn battery_with_a_broken_fixture_fails() {
    let o = modborel(&["battery", "--extra-points", "10", "--inject-broken"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("criterion=10 ") && l.contains("result=fail")), "{out}");
    assert!(out.contains("summary pass=9 fail=1"));
}

#[test]
fn theory_settings_can_come_from_a_file() {
    let path = std::env::temp_dir().join(format!("modborel-theory-{}.toml", std::process::id()));
    std::fs::write(&path, "theory = \"matching inf inf\"\ncap = 3\n").unwrap();
    let o = modborel(&["split", "--config", path.to_str().unwrap(), "--lambda", "A2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("t1 survivors=matching pairs=inf unmatched=0"));
    std::fs::write(
        &path,
        "family = \"matching\"\nphi = \"(exists x0 (forall x1 (not (R x0 x1))))\"\nlambda = \"E2\"\n",
    )
    .unwrap();
    let o = modborel(&["complete", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("counterexamples=0"));
    std::fs::write(&path, "colour = \"blue\"\n").unwrap();
    assert_eq!(modborel(&["split", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_file(&path).ok();
    assert_eq!(modborel(&["split", "--lambda", "A2"]).status.code(), Some(2));
}

#[test]
fn pipe_is_an_alias_for_name() {
    let a = modborel(&["reduce", "--pipe", "pad,infcoinf", "--input", "1;01", "--bits", "40"]);
    let b = modborel(&["reduce", "--name", "pad,infcoinf", "--input", "1;01", "--bits", "40"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&b));
}
