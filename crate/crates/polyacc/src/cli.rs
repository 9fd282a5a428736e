//! The `polyacc` command line: decide, compile, simulate, prune, dominant, matrix.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dag::{Algorithm, BlackBoxOp, Dag};
use crate::decide::{
    compile_verdict, decide_blackbox_affine, decide_complex, decide_real, line_zero_candidates, Certificate, Status,
    Verdict,
};
use crate::dominance::{analyze_component, enumerate_standard_changes, prune, ComponentSpec};
use crate::generators::{compensated_ops, gen_compensated_sum, gen_monomial_sum, gen_motzkin};
use crate::linalg::{
    generalized_vandermonde, generalized_vandermonde_check, identity_c, minor_evaluability_verdict, parse_matrix,
    poly_vandermonde_minor_check, schur_function, toeplitz_certificate, toeplitz_det, vandermonde_det, Partition,
};
use crate::parse::{infer_nvars, parse_point, parse_polynomial};
use crate::poly::Polynomial;
use crate::rational::{fmt_q, parse_q, Q};
use crate::sim::{adversarial_search, sample_accuracy_report, EvalMode, RelErr, Sampler, SimOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_EXPECTATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "polyacc", version, about = "Accurate polynomial evaluation under the (1+δ) rounding model")]
struct Cli {
    /// RNG seed (falls back to ACC_SEED, then 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sampling
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide accurate evaluability and emit an algorithm when one exists
    Decide(DecideArgs),
    /// Generate an evaluation algorithm with a fixed strategy
    Compile(CompileArgs),
    /// Measure relative error of an algorithm by sampling or adversarial search
    Simulate(SimulateArgs),
    /// Prune a DAG toward a variety component
    Prune(PruneArgs),
    /// Dominance regions and dominant terms near a variety component
    Dominant(DominantArgs),
    /// Structured determinants and their identities
    Matrix(MatrixArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Field {
    C,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Expect {
    Evaluable,
    Accurate,
    Inaccurate,
}

#[derive(Args, Debug)]
struct DecideArgs {
    #[arg(long, value_enum, default_value = "c")]
    field: Field,
    #[arg(long)]
    poly: String,
    #[arg(long)]
    nvars: Option<usize>,
    /// File of `op <name> arity=<k> [exact] poly=<text>` lines
    #[arg(long)]
    ops: Option<String>,
    /// Coordinate range of the witness search grid (real field)
    #[arg(long, default_value_t = 5)]
    radius: i64,
    #[arg(long, value_enum)]
    expect: Option<Expect>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    MonomialSum,
    Motzkin,
    Product,
    Compensated,
}

#[derive(Args, Debug)]
struct CompileArgs {
    #[arg(long, value_enum)]
    strategy: Strategy,
    #[arg(long)]
    poly: Option<String>,
    #[arg(long)]
    nvars: Option<usize>,
    /// Compensation stages
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Motzkin scale j (k = 3j)
    #[arg(long, default_value_t = 1)]
    j: i64,
    /// Summands separated by ';' (compensated; default: the terms of --poly)
    #[arg(long)]
    summands: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// DAG or branch-program file
    #[arg(long)]
    dag: String,
    /// Reference polynomial (default: the polynomial computed by the first leaf)
    #[arg(long)]
    poly: Option<String>,
    #[arg(long)]
    eps: String,
    #[arg(long)]
    eta: Option<String>,
    /// Adversarial search centre, e.g. `1,1,-2`
    #[arg(long)]
    near: Option<String>,
    #[arg(long, default_value = "1/1000")]
    radius: String,
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    /// unit-sphere | cube | near-variety:<component>
    #[arg(long, default_value = "unit-sphere")]
    sampler: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Also write the worst witnesses as CSV
    #[arg(long)]
    csv: Option<String>,
    #[arg(long, value_enum)]
    expect: Option<Expect>,
}

#[derive(Args, Debug)]
struct PruneArgs {
    #[arg(long)]
    dag: String,
    #[arg(long)]
    component: String,
    /// Weights for the vanishing coordinates in ascending variable order
    #[arg(long)]
    eta: String,
    /// Index into the enumerated standard changes
    #[arg(long, default_value_t = 0)]
    change: usize,
}

#[derive(Args, Debug)]
struct DominantArgs {
    #[arg(long)]
    poly: String,
    #[arg(long)]
    nvars: Option<usize>,
    #[arg(long)]
    component: String,
    /// Only report this change index
    #[arg(long)]
    change: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MatrixKind {
    Toeplitz,
    Vandermonde,
    Gvander,
    Pvminor,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    #[arg(value_enum)]
    kind: MatrixKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    lambda: Option<String>,
    /// Upper-triangular coefficient matrix file (default identity)
    #[arg(long = "C")]
    c: Option<String>,
    #[arg(long)]
    i: Option<usize>,
}

struct Failure {
    code: i32,
    msg: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: EXIT_USAGE, msg: e.to_string() }
    }
}

type Res = Result<i32, Failure>;

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure { code: EXIT_USAGE, msg: format!("{path}: {e}") })
}

fn write_file(path: &str, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure { code: EXIT_USAGE, msg: format!("{path}: {e}") })
}

fn poly_arg(text: &str, nvars: Option<usize>) -> Result<Polynomial, Failure> {
    let n = match nvars {
        Some(n) => n,
        None => infer_nvars(text)?,
    };
    Ok(parse_polynomial(text, n)?)
}

/// Runs the CLI on `argv` (including the program name); returns the exit status.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let seed = cli
        .seed
        .or_else(|| std::env::var("ACC_SEED").ok().and_then(|s| s.trim().parse().ok()))
        .unwrap_or(0);
    let opts = |mode: EvalMode| SimOptions { seed, threads: cli.threads.max(1), mode };
    let res = match &cli.cmd {
        Cmd::Decide(a) => cmd_decide(a, out),
        Cmd::Compile(a) => cmd_compile(a, out),
        Cmd::Simulate(a) => cmd_simulate(a, &opts(if a.mode == Mode::Float { EvalMode::Float } else { EvalMode::Exact }), out),
        Cmd::Prune(a) => cmd_prune(a, out),
        Cmd::Dominant(a) => cmd_dominant(a, out),
        Cmd::Matrix(a) => cmd_matrix(a, out),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn print_verdict(v: &Verdict, out: &mut dyn Write) -> Result<(), Failure> {
    writeln!(out, "status={}", v.status)?;
    let s = v.to_string();
    let cert = s.split_once("certificate=").map(|x| x.1).unwrap_or("");
    writeln!(out, "certificate={cert}")?;
    Ok(())
}

fn cmd_decide(a: &DecideArgs, out: &mut dyn Write) -> Res {
    let p = poly_arg(&a.poly, a.nvars)?;
    let ops: Vec<BlackBoxOp> = match &a.ops {
        Some(path) => read_file(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(BlackBoxOp::parse_line)
            .collect::<Result<_, _>>()?,
        None => vec![],
    };
    let registry: BTreeMap<String, BlackBoxOp> = ops.iter().map(|o| (o.name.clone(), o.clone())).collect();
    let complex = if ops.is_empty() { decide_complex(&p)? } else { decide_blackbox_affine(&p, &ops)? };
    let v = match a.field {
        Field::C => complex,
        Field::R if complex.status == Status::Evaluable => complex,
        Field::R => decide_real(&p, &line_zero_candidates(&p, a.radius, 10_000)),
    };
    writeln!(out, "field={}", if a.field == Field::C { "c" } else { "r" })?;
    print_verdict(&v, out)?;
    if v.status == Status::Evaluable {
        if let Certificate::Factorization(_) = v.certificate {
            match compile_verdict(&v, p.nvars(), &registry) {
                Ok(d) => write!(out, "{}", d.to_text())?,
                Err(e) => writeln!(out, "dag=none ({e})")?,
            }
        }
    }
    if a.expect == Some(Expect::Evaluable) && v.status != Status::Evaluable {
        return Ok(EXIT_EXPECTATION);
    }
    Ok(EXIT_OK)
}

fn cmd_compile(a: &CompileArgs, out: &mut dyn Write) -> Res {
    let need_poly = || -> Result<Polynomial, Failure> {
        let text = a.poly.as_deref().ok_or_else(|| Failure { code: EXIT_USAGE, msg: "--poly is required".into() })?;
        poly_arg(text, a.nvars)
    };
    let (text, note) = match a.strategy {
        Strategy::MonomialSum => {
            let m = gen_monomial_sum(&need_poly()?)?;
            (m.dag.to_text(), format!("# f={}\n", m.f))
        }
        Strategy::Motzkin => (gen_motzkin(a.j, 3 * a.j)?.to_text(), String::new()),
        Strategy::Product => {
            let p = need_poly()?;
            let v = decide_complex(&p)?;
            if v.status != Status::Evaluable {
                return Err(Failure { code: EXIT_EXPECTATION, msg: v.to_string() });
            }
            (compile_verdict(&v, p.nvars(), &BTreeMap::new())?.to_text(), String::new())
        }
        Strategy::Compensated => {
            let summands: Vec<Polynomial> = match &a.summands {
                Some(s) => {
                    let parts: Vec<&str> = s.split(';').map(str::trim).filter(|t| !t.is_empty()).collect();
                    let n = match a.nvars {
                        Some(n) => n,
                        None => parts.iter().map(|t| infer_nvars(t)).collect::<Result<Vec<_>, _>>()?.into_iter().max().unwrap_or(1),
                    };
                    parts.iter().map(|t| parse_polynomial(t, n)).collect::<Result<_, _>>()?
                }
                None => {
                    let p = need_poly()?;
                    p.terms().map(|(m, c)| Polynomial::monomial(p.nvars(), m.0.clone(), c.clone())).collect()
                }
            };
            let reg: BTreeMap<String, BlackBoxOp> =
                compensated_ops(&summands, a.k)?.into_iter().map(|o| (o.name.clone(), o)).collect();
            (gen_compensated_sum(&summands, a.k, &reg)?.to_text(), String::new())
        }
    };
    let full = format!("{note}{text}");
    match &a.out {
        Some(path) => {
            write_file(path, &full)?;
            writeln!(out, "wrote={path}")?;
        }
        None => write!(out, "{full}")?,
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(a: &SimulateArgs, opts: &SimOptions, out: &mut dyn Write) -> Res {
    let alg = Algorithm::parse(&read_file(&a.dag)?)?;
    let p = match &a.poly {
        Some(t) => parse_polynomial(t, alg.nvars())?,
        None => alg.leaves()[0].extract_polynomial()?,
    };
    let eps = parse_q(&a.eps)?;
    let eta = a.eta.as_deref().map(parse_q).transpose()?;
    let report = match &a.near {
        Some(c) => {
            let center = parse_point(c)?;
            let radius = parse_q(&a.radius)?;
            adversarial_search(&alg, &p, &center, &radius, &eps, a.budget, eta.as_ref(), opts)?
        }
        None => {
            let sampler = Sampler::parse(&a.sampler)?;
            sample_accuracy_report(&alg, &p, &sampler, &eps, eta.as_ref(), a.samples, opts)?
        }
    };
    write!(out, "{}", report.to_kv())?;
    if let Some(path) = &a.csv {
        write_file(path, &report.to_csv())?;
    }
    match a.expect {
        Some(Expect::Accurate) if report.pass() == Some(false) => Ok(EXIT_EXPECTATION),
        Some(Expect::Inaccurate) => {
            let threshold = eta.unwrap_or_else(|| Q::from_integer(1.into()));
            let found = match report.worst_rel_err() {
                RelErr::Infinite => true,
                RelErr::Finite(e) => e >= threshold,
            };
            Ok(if found { EXIT_OK } else { EXIT_BUDGET })
        }
        _ => Ok(EXIT_OK),
    }
}

fn parse_ints(text: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Failure { code: EXIT_USAGE, msg: format!("bad integer {t:?}") }))
        .collect()
}

fn cmd_prune(a: &PruneArgs, out: &mut dyn Write) -> Res {
    let d = Dag::parse(&read_file(&a.dag)?)?;
    let spec = ComponentSpec::parse(&a.component)?;
    let changes = enumerate_standard_changes(&spec, d.nvars)?;
    let change = changes.get(a.change).ok_or_else(|| Failure {
        code: EXIT_USAGE,
        msg: format!("change index {} out of range (0..{})", a.change, changes.len()),
    })?;
    let eta = parse_ints(&a.eta)?;
    let r = prune(&d, change, &eta)?;
    writeln!(out, "change={}", change.describe())?;
    let degs: Vec<String> =
        r.degrees.iter().map(|(id, dg)| format!("{id}:{}", dg.map(|v| v.to_string()).unwrap_or("inf".into()))).collect();
    writeln!(out, "degrees={}", degs.join(","))?;
    let dels: Vec<String> = r.deletions.iter().map(|(k, i)| format!("{k}<-{i}")).collect();
    writeln!(out, "deleted={}", dels.join(","))?;
    let reds: Vec<String> = r.redirections.iter().map(|(k, f, t)| format!("{k}:x{}->x{}", f + 1, t + 1)).collect();
    writeln!(out, "redirected={}", reds.join(","))?;
    writeln!(out, "p_dom={}", r.dag.extract_polynomial()?)?;
    write!(out, "{}", r.dag.to_text())?;
    Ok(EXIT_OK)
}

fn fmt_lambda(l: &[Vec<u32>]) -> String {
    let parts: Vec<String> = l
        .iter()
        .map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    format!("{{{}}}", parts.join(","))
}

fn fmt_vec(v: &[i64]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn cmd_dominant(a: &DominantArgs, out: &mut dyn Write) -> Res {
    let p = poly_arg(&a.poly, a.nvars)?;
    let spec = ComponentSpec::parse(&a.component)?;
    let analyses = analyze_component(&p, &spec)?;
    writeln!(out, "changes={}", analyses.len())?;
    for (k, an) in analyses.iter().enumerate() {
        if a.change.is_some_and(|c| c != k) {
            continue;
        }
        writeln!(out, "change[{k}]={}", an.change.describe())?;
        let blk: Vec<String> = an.block.iter().map(|b| format!("x{}", b + 1)).collect();
        writeln!(out, "change[{k}].block={}", blk.join(","))?;
        for (r, dom, ok) in &an.regions {
            writeln!(
                out,
                "change[{k}].region lambda={} facet={} generator={} exp_cond={} p_dom={}",
                fmt_lambda(&r.lambda),
                r.facet,
                fmt_vec(&r.generator),
                ok,
                dom
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_matrix(a: &MatrixArgs, out: &mut dyn Write) -> Res {
    match a.kind {
        MatrixKind::Toeplitz => {
            let d = toeplitz_det(a.n)?;
            let c = toeplitz_certificate(a.n, &d);
            let names: Vec<String> = (0..2 * a.n - 1).map(|k| format!("x[{}]", k as i64 - a.n as i64 + 1)).collect();
            writeln!(out, "det={}", d.fmt_with(&names))?;
            writeln!(out, "x0_power={}", c.x0_power)?;
            let cross: Vec<String> = c.cross_terms.iter().map(|(j, v)| format!("{j}:{}", fmt_q(v))).collect();
            writeln!(out, "cross_terms={}", cross.join(","))?;
            writeln!(out, "affine_last={}", c.affine_last)?;
            writeln!(out, "affine_first={}", c.affine_first)?;
            writeln!(out, "holds={}", c.holds())?;
        }
        MatrixKind::Vandermonde => {
            if !(1..=6).contains(&a.n) {
                return Err(Failure { code: EXIT_USAGE, msg: "n must be in 1..=6".into() });
            }
            writeln!(out, "det={}", vandermonde_det(a.n))?;
            writeln!(out, "convention=prod_{{i<j}}(x_j-x_i)")?;
        }
        MatrixKind::Gvander => {
            let lambda = Partition::parse(a.lambda.as_deref().unwrap_or(""))?;
            let gv = generalized_vandermonde(&lambda, a.n);
            let d = crate::linalg::det(&gv, a.n)?;
            let s = schur_function(&lambda, a.n)?;
            let chk = generalized_vandermonde_check(&lambda, a.n)?;
            writeln!(out, "det={d}")?;
            writeln!(out, "schur={s}")?;
            writeln!(out, "convention=det(GV)=s_lambda*prod_{{i<j}}(x_j-x_i)")?;
            writeln!(out, "holds={}", chk.holds)?;
        }
        MatrixKind::Pvminor => {
            let c = match &a.c {
                Some(path) => parse_matrix(&read_file(path)?)?,
                None => identity_c(a.n),
            };
            let rows: Vec<usize> = match a.i {
                Some(i) => vec![i],
                None => (1..=a.n).collect(),
            };
            let mut all = true;
            for i in rows {
                let r = poly_vandermonde_minor_check(&c, a.n, i)?;
                writeln!(out, "minor[{i}].E={}", fmt_q(&r.e))?;
                writeln!(out, "minor[{i}].F={}", fmt_q(&r.f))?;
                writeln!(out, "minor[{i}].det={}", r.det)?;
                writeln!(out, "minor[{i}].holds={}", r.holds)?;
                all &= r.holds;
            }
            writeln!(out, "holds={all}")?;
            print_verdict(&minor_evaluability_verdict(a.n), out)?;
        }
    }
    Ok(EXIT_OK)
}
