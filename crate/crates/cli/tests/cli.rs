use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use glc_core::format::print_glc;
use glc_core::lambda::{encode, graph_normalize, parse};
use glc_core::scenarios::catalog;

fn glc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn scenario_all_lists_every_scenario() {
    let o = glc(&["scenario", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), catalog().len());
    for (line, s) in lines.iter().zip(catalog()) {
        assert!(line.starts_with(&format!("{}: pass", s.name)), "{line}");
    }
    let o = glc(&["scenario", "no_such_thing"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[UNKNOWN_SCENARIO]"));
}

#[test]
fn iso_of_a_file_with_itself() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.glc").display().to_string();
    assert!(glc(&["encode", "\\f.\\x.f (f x)", "-o", &a]).status.success());
    let o = glc(&["iso", &a, &a]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "isomorphic\n");
    let b = write(dir.path(), "b.glc", &print_glc(&encode(&parse("\\f.\\x.f x").unwrap())));
    let o = glc(&["iso", &a, &b]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "not isomorphic\n");
}

#[test]
fn stale_site_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.glc", &print_glc(&encode(&parse("(\\x.x) y").unwrap())));
    let o = glc(&["apply", &g, "--move", "beta", "--site", "e77"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[SITE_STALE]"), "{}", stderr(&o));
    let o = glc(&["apply", &g, "--move", "beta", "--site", "0123456789abcdef.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[SITE_STALE]"));
}

#[test]
fn moves_then_apply_by_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.glc", &print_glc(&encode(&parse("(\\x.x) y").unwrap())));
    let o = glc(&["moves", &g]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let beta: Vec<&serde_json::Value> =
        v.as_array().unwrap().iter().filter(|m| m["moveKind"] == "beta" && m["direction"] == "forward").collect();
    assert_eq!(beta.len(), 1);
    for site in [beta[0]["descriptor"].as_str().unwrap(), beta[0]["site"].as_str().unwrap()] {
        let o = glc(&["apply", &g, "--move", "beta", "--site", site]);
        assert!(o.status.success(), "{}", stderr(&o));
        let out = write(dir.path(), "out.glc", &stdout(&o));
        let want = write(dir.path(), "want.glc", &print_glc(&encode(&parse("y").unwrap())));
        assert_eq!(stdout(&glc(&["iso", "--labeled", &out, &want])), "isomorphic\n");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(glc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(glc(&["apply", "x.glc"]).status.code(), Some(2));
    assert_eq!(glc(&["reduce", "x", "--strategy", "applicative"]).status.code(), Some(2));
}

#[test]
fn domain_errors_carry_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.glc", "node n0 lambda\nbogus\n");
    let o = glc(&["dot", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[GLC_SYNTAX]"));
    let o = glc(&["encode", "(\\x."]);
    assert!(stderr(&o).starts_with("error[TERM_SYNTAX]"));
    let o = glc(&["dot", &dir.path().join("missing.glc").display().to_string()]);
    assert!(stderr(&o).starts_with("error[IO]"));
    let o = glc(&["reduce", "(\\x.x x)(\\x.x x)", "--fuel", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[FUEL_EXHAUSTED]"));
}

#[test]
fn reduce_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ["(\\x.x) y", "(\\f.\\x.f (f x)) (\\y.y) z", "(\\x.\\y.x) a b", "\\x.(\\y.y x) x", "(\\x.x x)(\\y.y)"];
    for t in corpus {
        let want = print_glc(&graph_normalize(&encode(&parse(t).unwrap()), 500).unwrap());
        let o = glc(&["reduce", t, "--fuel", "500", "--strategy", "normal"]);
        assert!(o.status.success(), "{t}: {}", stderr(&o));
        assert_eq!(stdout(&o), want, "{t}");
        let f = write(dir.path(), "t.glc", &print_glc(&encode(&parse(t).unwrap())));
        assert_eq!(stdout(&glc(&["reduce", &f, "--fuel", "500"])), want);
    }
    let o = glc(&["reduce", "(\\f.\\x.f (f x)) (\\y.y) z", "--decode"]);
    assert_eq!(stdout(&o), "z\n");
}

#[test]
fn encode_decode_dot() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("k.glc").display().to_string();
    assert!(glc(&["encode", "\\x.\\y.x", "-o", &f]).status.success());
    let o = glc(&["decode", &f]);
    assert!(o.status.success());
    assert!(parse(stdout(&o).trim()).unwrap().alpha_eq(&parse("\\a.\\b.a").unwrap()));
    let d1 = stdout(&glc(&["dot", &f]));
    let d2 = stdout(&glc(&["dot", &f]));
    assert!(d1.starts_with("digraph glc {"));
    assert_eq!(d1, d2);
}

#[test]
fn dash_reads_standard_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_glc"))
        .args(["decode", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(print_glc(&encode(&parse("\\x.x y").unwrap())).as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert!(parse(stdout(&o).trim()).unwrap().alpha_eq(&parse("\\z.z y").unwrap()));
}
