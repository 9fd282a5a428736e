mod common;

use std::path::PathBuf;

use polyacc::cli::{run, EXIT_BUDGET, EXIT_EXPECTATION, EXIT_OK, EXIT_USAGE};
use polyacc::{Algorithm, Dag};

use common::*;

fn polyacc(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("polyacc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polyacc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn value<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

#[test]
fn decide_difference_of_squares_emits_a_dag() {
    let (code, out, _) = polyacc(&["decide", "--poly", "x1^2 - x2^2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value(&out, "field"), Some("c"));
    assert_eq!(value(&out, "status"), Some("Evaluable"));
    let dag_text: String = out.lines().skip_while(|l| !l.starts_with("dag ")).map(|l| format!("{l}\n")).collect();
    let d = Dag::parse(&dag_text).unwrap();
    assert_eq!(d.extract_polynomial().unwrap(), poly("x1^2 - x2^2", 2));
}

#[test]
fn decide_motzkin_is_not_evaluable_over_c() {
    let (code, out, _) = polyacc(&["decide", "--poly", MOTZKIN]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value(&out, "status"), Some("NotEvaluable"));
    let (code, _, _) = polyacc(&["decide", "--poly", MOTZKIN, "--expect", "evaluable"]);
    assert_eq!(code, EXIT_EXPECTATION);
}

#[test]
fn decide_real_finds_a_witness() {
    let (code, out, _) = polyacc(&["decide", "--field", "r", "--poly", "x1^2 + x2^2 - x3^2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value(&out, "field"), Some("r"));
    assert_eq!(value(&out, "status"), Some("NotEvaluable"));
}

#[test]
fn bad_input_is_a_usage_error() {
    let (code, _, err) = polyacc(&["decide", "--poly", "x1 + * x2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(!err.is_empty());
    let (code, _, _) = polyacc(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = polyacc(&["simulate", "--dag", "/nonexistent/polyacc.dag", "--eps", "1/100"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn compile_monomial_sum_reports_f() {
    let (code, out, _) = polyacc(&["compile", "--strategy", "monomial-sum", "--poly", "x1^2 + x2^2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().next(), Some("# f=2"));
    let d = Dag::parse(&out).unwrap();
    assert_eq!(d.extract_polynomial().unwrap(), poly("x1^2 + x2^2", 2));
}

#[test]
fn compile_motzkin_round_trips() {
    let (code, out, _) = polyacc(&["compile", "--strategy", "motzkin", "--j", "1"]);
    assert_eq!(code, EXIT_OK);
    let alg = Algorithm::parse(&out).unwrap();
    let m = poly(MOTZKIN, 3);
    for leaf in alg.leaves() {
        assert_eq!(leaf.extract_polynomial().unwrap(), m);
    }
}

#[test]
fn compile_compensated_and_product() {
    let (code, out, _) = polyacc(&["compile", "--strategy", "compensated", "--summands", "x1*x2; -x1^2; x2^2", "--k", "3"]);
    assert_eq!(code, EXIT_OK);
    let d = Dag::parse(&out).unwrap();
    assert_eq!(d.rounded_ids().len(), 3);
    let (code, out, _) = polyacc(&["compile", "--strategy", "product", "--poly", "x1^2 - x2^2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(Dag::parse(&out).unwrap().extract_polynomial().unwrap(), poly("x1^2 - x2^2", 2));
    let (code, _, _) = polyacc(&["compile", "--strategy", "product", "--poly", "x1^2 + x2^2"]);
    assert_eq!(code, EXIT_EXPECTATION);
}

#[test]
fn simulate_finds_the_naive_sum_failure() {
    let path = temp_file("naive.dag", NAIVE_SUM);
    let p = path.to_str().unwrap();
    let args = ["simulate", "--dag", p, "--eps", "1/100000000", "--near", "1,1,-2", "--budget", "2000", "--expect", "inaccurate"];
    let (code, out, _) = polyacc(&args);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(value(&out, "worst_rel_err"), Some("inf"));
}

#[test]
fn simulate_budget_exhaustion_exits_3() {
    let path = temp_file("squares.dag", SUM_OF_SQUARES);
    let p = path.to_str().unwrap();
    let args = ["simulate", "--dag", p, "--eps", "1/100000000", "--near", "1,1", "--budget", "50", "--expect", "inaccurate"];
    let (code, _, _) = polyacc(&args);
    assert_eq!(code, EXIT_BUDGET);
}

#[test]
fn simulate_accurate_program_passes() {
    let path = temp_file("squares_acc.dag", SUM_OF_SQUARES);
    let p = path.to_str().unwrap();
    let args = ["simulate", "--dag", p, "--eps", "1/1048576", "--eta", "1/1000", "--samples", "200", "--expect", "accurate"];
    let (code, out, _) = polyacc(&args);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(value(&out, "pass"), Some("true"));
}

#[test]
fn simulate_is_deterministic_for_a_seed() {
    let path = temp_file("mixed.dag", MIXED);
    let p = path.to_str().unwrap();
    let args = ["--seed", "17", "simulate", "--dag", p, "--eps", "1/1024", "--samples", "100", "--sampler", "cube"];
    let first = polyacc(&args);
    let second = polyacc(&args);
    assert_eq!(first.0, EXIT_OK);
    assert_eq!(first.1, second.1);
    let threaded: Vec<&str> = ["--threads", "4"].into_iter().chain(args).collect();
    assert_eq!(polyacc(&threaded).1, first.1);
}

#[test]
fn prune_three_squares() {
    let path = temp_file("three_squares.dag", THREE_SQUARES);
    let p = path.to_str().unwrap();
    let (code, out, _) = polyacc(&["prune", "--dag", p, "--component", "zero: x1; chain: x2=x3=x4", "--eta", "1,1,1"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(value(&out, "deleted"), Some("7<-6"));
    let want = poly("x1^2*x2^2 + (x3 - x4)^2*x5^2", 5).to_string();
    assert_eq!(value(&out, "p_dom"), Some(want.as_str()));
    let (code, _, _) = polyacc(&["prune", "--dag", p, "--component", "zero: x1; chain: x2=x3=x4", "--eta", "1,1"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn dominant_example_facets() {
    let p = "x2^8*x3^12 + x1^2*x2^2*x3^16 + x1^8*x3^12 + x1^6*x2^14 + x1^10*x2^6*x3^4";
    let (code, out, _) = polyacc(&["dominant", "--poly", p, "--component", "zero: x1,x2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("lambda={(2,2),(8,0)} facet=true"), "{out}");
    assert!(out.contains("lambda={(0,8),(2,2)} facet=true"), "{out}");
}

#[test]
fn matrix_subcommands() {
    let (code, out, _) = polyacc(&["matrix", "toeplitz", "--n", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value(&out, "holds"), Some("true"), "{out}");
    let (code, out, _) = polyacc(&["matrix", "gvander", "--n", "3", "--lambda", "2,1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value(&out, "holds"), Some("true"), "{out}");
    let (code, out, _) = polyacc(&["matrix", "pvminor", "--n", "4", "--i", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(value(&out, "holds"), Some("true"), "{out}");
    let (code, _, _) = polyacc(&["matrix", "pvminor", "--n", "9", "--i", "1"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = polyacc(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("simulate"));
}
