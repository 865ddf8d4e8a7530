use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn netrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netrw")).args(args).env_remove("NETRW_BUDGET").output().expect("spawn netrw")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_accepts_every_data_file() {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", "data"].iter().collect();
    let mut files: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path().to_string_lossy().into_owned()).collect();
    files.sort();
    let mut args = vec!["validate"];
    args.extend(files.iter().map(String::as_str));
    let o = netrw(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn nf_relabels_both_nets() {
    let o = netrw(&["nf", "--rules", &data("relabel.rns"), "--in", &data("chain.nets")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("netrw-nets v1\n"));
    assert_eq!(s.matches("node").count(), 3);
    assert!(!s.contains(" a ") && !s.contains(" b "));
    assert!(!s.contains("# exhausted"));
}

#[test]
fn nf_marks_exhausted_runs() {
    let o = netrw(&["nf", "--rules", &data("swap.rns"), "--in", &data("a.nets")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# exhausted"));
}

#[test]
fn rewrite_merges_the_chain() {
    let o = netrw(&["rewrite", "--rules", &data("merge.rns"), "--in", &data("chain.nets")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("node 0 z in=1 out=1"));
}

#[test]
fn nbh_apply_and_compile() {
    let o = netrw(&["nbh", "apply", "--nbh", &data("relabel.nbh"), "--in", &data("chain.nets")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("node 1 y"));
    let o = netrw(&["compile", "nbh2rns", "--nbh", &data("relabel.nbh")]);
    assert!(stdout(&o).starts_with("netrw-rns v1\n"));
    let o = netrw(&["compile", "rns2nbh", "--rules", &data("relabel.rns")]);
    assert!(stdout(&o).starts_with("netrw-nbh v1\n"));
}

#[test]
fn td_run_and_compose() {
    let o = netrw(&["td", "run", "--td", &data("p.td"), "--in", &data("singles.nets")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("node 0 c") && s.contains("node 0 d"));
    let o = netrw(&["td", "compose", &data("p.td"), &data("r.td")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("netrw-td v1\n"));
}

#[test]
fn solve_finds_the_two_step_path() {
    let o = netrw(&[
        "solve", "--problem", &data("reach-e.prob"), "--library", &data("p.td"), "--library", &data("q.td"), "--library",
        &data("r.td"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("solution path=0,2"));
}

#[test]
fn evolve_prints_one_line_per_level() {
    let o = netrw(&[
        "evolve", "--universe", &data("singles.nets"), "--td", &data("p.td"), "--td", &data("q.td"), "--problem",
        &data("reach-c.prob"), "--collapse", "b=a,d=c,q=p", "--levels", "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("level=")).count(), 3);
}

#[test]
fn uprns_check_exit_codes() {
    let good = netrw(&["uprns-check", "--rules", &data("relabel.rns"), "--in", &data("chain.nets")]);
    assert_eq!(good.status.code(), Some(0));
    let bad = netrw(&["uprns-check", "--rules", &data("swap.rns"), "--in", &data("chain.nets")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn check_runs_one_id_and_rejects_unknown() {
    let o = netrw(&["check", "link-formula"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS link-formula"));
    let o = netrw(&["check", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_agrees_on_relabel() {
    let o = netrw(&["oracle", "--rules", &data("relabel.rns"), "--in", &data("chain.nets")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS oracle agreement"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(netrw(&["frob"]).status.code(), Some(2));
    assert_eq!(netrw(&["nf", "--bogus"]).status.code(), Some(2));
    assert_eq!(netrw(&["nf", "--rules", &data("a.nets"), "--in", &data("a.nets")]).status.code(), Some(2));
    assert_eq!(netrw(&["nf", "--rules", &data("missing.rns"), "--in", &data("a.nets")]).status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["--seed", "7", "solve", "--problem", &data("reach-e.prob"), "--library", &data("q.td"), "--library", &data("p.td"), "--library", &data("r.td")];
    let a = netrw(&args);
    let b = netrw(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = netrw(&["nf", "--rules", &data("merge.rns"), "--in", &data("chain.nets")]);
    let d = netrw(&["nf", "--rules", &data("merge.rns"), "--in", &data("chain.nets")]);
    assert_eq!(c.stdout, d.stdout);
}
