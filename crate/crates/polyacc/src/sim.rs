//! Empirical accuracy: relative errors under chosen or adversarial δ, sampling
//! reports and witness search.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dag::{Algorithm, DeltaAssignment, NodeId};
use crate::dominance::ComponentSpec;
use crate::error::SimError;
use crate::poly::Polynomial;
use crate::rational::{fmt_q, from_f64_exact, from_f64_grid, pow_q, q, qf, to_f64, Q};

/// Relative error; `Infinite` compares above every finite value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelErr {
    Finite(Q),
    Infinite,
}

impl RelErr {
    pub fn to_f64(&self) -> f64 {
        match self {
            RelErr::Finite(v) => to_f64(v),
            RelErr::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RelErr::Infinite)
    }

    pub fn le(&self, bound: &Q) -> bool {
        match self {
            RelErr::Finite(v) => v <= bound,
            RelErr::Infinite => false,
        }
    }
}

impl Ord for RelErr {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RelErr::Infinite, RelErr::Infinite) => Ordering::Equal,
            (RelErr::Infinite, _) => Ordering::Greater,
            (_, RelErr::Infinite) => Ordering::Less,
            (RelErr::Finite(a), RelErr::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for RelErr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RelErr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelErr::Finite(v) => write!(f, "{:e}", to_f64(v)),
            RelErr::Infinite => f.write_str("inf"),
        }
    }
}

/// |computed − exact| / |exact| with the zero conventions.
pub fn rel_err_of(computed: &Q, exact: &Q) -> RelErr {
    if exact.is_zero() {
        if computed.is_zero() {
            RelErr::Finite(Q::zero())
        } else {
            RelErr::Infinite
        }
    } else {
        RelErr::Finite(((computed - exact) / exact).abs())
    }
}

/// Every leaf must compute p at δ = 0.
pub fn check_leaves(alg: &Algorithm, p: &Polynomial) -> Result<(), SimError> {
    for leaf in alg.leaves() {
        let got = leaf.extract_polynomial()?;
        if &got != p {
            return Err(SimError::LeafMismatch { computed: got.to_string(), target: p.to_string() });
        }
    }
    Ok(())
}

pub fn relative_error(alg: &Algorithm, p: &Polynomial, x: &[Q], delta: &DeltaAssignment) -> Result<RelErr, SimError> {
    check_leaves(alg, p)?;
    let computed = alg.eval_rounded(x, delta)?;
    Ok(rel_err_of(&computed, &p.eval(x)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Exact rational inputs, δ and arithmetic.
    Exact,
    /// Binary64 arithmetic with binary64 δ; the reference p(x) is still exact.
    Float,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sampler {
    UnitSphere,
    Cube,
    /// Exact component points perturbed by a geometric ladder 0, 10⁻¹, …, 10⁻¹².
    NearVariety(ComponentSpec),
    Ball { center: Vec<Q>, radius: Q },
}

impl Sampler {
    pub fn parse(text: &str) -> Result<Sampler, SimError> {
        let t = text.trim();
        match t {
            "unit-sphere" | "sphere" => Ok(Sampler::UnitSphere),
            "cube" => Ok(Sampler::Cube),
            _ => {
                if let Some(rest) = t.strip_prefix("near-variety:") {
                    let spec = ComponentSpec::parse(rest).map_err(|e| SimError::Invalid(e.to_string()))?;
                    Ok(Sampler::NearVariety(spec))
                } else {
                    Err(SimError::UnknownSampler(t.to_string()))
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimOptions {
    pub seed: u64,
    pub threads: usize,
    pub mode: EvalMode,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { seed: 0, threads: 1, mode: EvalMode::Exact }
    }
}

/// One evaluated (x, δ) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRecord {
    pub err: RelErr,
    pub x: Vec<Q>,
    pub delta: Vec<(NodeId, Q)>,
}

impl SampleRecord {
    /// Worse first; ties broken by the lexicographically smallest witness.
    fn rank(&self, other: &Self) -> Ordering {
        other.err.cmp(&self.err).then_with(|| self.x.cmp(&other.x)).then_with(|| self.delta.cmp(&other.delta))
    }
}

#[derive(Clone, Debug)]
pub struct AccuracyReport {
    pub samples: usize,
    pub evaluations: usize,
    pub eps: Q,
    pub eta: Option<Q>,
    pub mode: EvalMode,
    pub seed: u64,
    pub worst: Option<SampleRecord>,
    pub top: Vec<SampleRecord>,
}

impl AccuracyReport {
    pub fn worst_rel_err(&self) -> RelErr {
        self.worst.as_ref().map(|w| w.err.clone()).unwrap_or(RelErr::Finite(Q::zero()))
    }

    pub fn pass(&self) -> Option<bool> {
        self.eta.as_ref().map(|eta| self.worst_rel_err().le(eta))
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("samples={}\n", self.samples));
        s.push_str(&format!("evaluations={}\n", self.evaluations));
        s.push_str(&format!("eps={}\n", fmt_q(&self.eps)));
        s.push_str(&format!("eta={}\n", self.eta.as_ref().map(fmt_q).unwrap_or_else(|| "none".into())));
        s.push_str(&format!("mode={}\n", if self.mode == EvalMode::Exact { "exact" } else { "float" }));
        s.push_str(&format!("seed={}\n", self.seed));
        s.push_str(&format!("worst_rel_err={}\n", self.worst_rel_err()));
        let (wx, wd) = match &self.worst {
            Some(w) => (fmt_point(&w.x), fmt_delta(&w.delta)),
            None => ("none".into(), "none".into()),
        };
        s.push_str(&format!("witness_x={wx}\n"));
        s.push_str(&format!("witness_delta={wd}\n"));
        s.push_str(&format!(
            "pass={}\n",
            match self.pass() {
                Some(true) => "true",
                Some(false) => "false",
                None => "none",
            }
        ));
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,rel_err,x,delta\n");
        for (i, r) in self.top.iter().enumerate() {
            s.push_str(&format!("{},{},\"{}\",\"{}\"\n", i + 1, r.err, fmt_point(&r.x), fmt_delta(&r.delta)));
        }
        s
    }

    fn absorb(&mut self, mut recs: Vec<SampleRecord>) {
        self.top.append(&mut recs);
        self.top.sort_by(|a, b| a.rank(b));
        self.top.dedup();
        self.top.truncate(100);
        self.worst = self.top.first().cloned();
    }
}

fn fmt_point(x: &[Q]) -> String {
    x.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}

fn fmt_delta(d: &[(NodeId, Q)]) -> String {
    d.iter().map(|(k, v)| format!("{k}:{}", fmt_q(v))).collect::<Vec<_>>().join(";")
}

/// Evaluates one (x, δ) pair in the chosen mode.
fn evaluate(
    alg: &Algorithm,
    p: &Polynomial,
    mode: EvalMode,
    x: &[Q],
    delta: &[(NodeId, Q)],
    eps: &Q,
) -> Result<SampleRecord, SimError> {
    match mode {
        EvalMode::Exact => {
            let d = DeltaAssignment { eps: eps.clone(), values: delta.iter().cloned().collect() };
            let c = alg.eval_rounded(x, &d)?;
            Ok(SampleRecord { err: rel_err_of(&c, &p.eval(x)?), x: x.to_vec(), delta: delta.to_vec() })
        }
        EvalMode::Float => {
            let xf: Vec<f64> = x.iter().map(to_f64).collect();
            let xq: Vec<Q> = xf.iter().map(|v| from_f64_exact(*v).unwrap_or_else(Q::zero)).collect();
            let df: BTreeMap<NodeId, f64> = delta.iter().map(|(k, v)| (*k, to_f64(v))).collect();
            let leaf = alg.leaf_for(&xq)?;
            let c = leaf.eval_rounded_f64(&xf, &df)?;
            let cq = from_f64_exact(c).ok_or_else(|| SimError::Invalid("non-finite result".into()))?;
            let dq: Vec<(NodeId, Q)> =
                df.iter().map(|(k, v)| (*k, from_f64_exact(*v).unwrap_or_else(Q::zero))).collect();
            Ok(SampleRecord { err: rel_err_of(&cq, &p.eval(&xq)?), x: xq, delta: dq })
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// δ = ε·k/2²⁰ with k uniform in [−2²⁰, 2²⁰].
pub fn random_delta(rng: &mut ChaCha8Rng, eps: &Q) -> Q {
    let k: i64 = rng.gen_range(-(1i64 << 20)..=(1i64 << 20));
    eps * qf(k, 1 << 20)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Exact rational point on the unit sphere (inverse stereographic projection of a
/// grid-rounded projection of a Gaussian direction).
pub fn sphere_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    if n == 1 {
        return vec![if rng.gen::<bool>() { q(1) } else { q(-1) }];
    }
    loop {
        let g: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let y: Vec<f64> = g.iter().map(|v| v / norm).collect();
        let den = 1.0 - y[n - 1];
        if den < 1e-6 {
            continue;
        }
        let u: Vec<Q> = y[..n - 1].iter().map(|v| from_f64_grid(v / den, 30)).collect();
        let s: Q = u.iter().map(|v| v * v).fold(Q::zero(), |a, b| a + b);
        let d = &s + Q::one();
        let mut x: Vec<Q> = u.iter().map(|v| q(2) * v / &d).collect();
        x.push((&s - Q::one()) / &d);
        return x;
    }
}

pub fn cube_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| from_f64_grid(rng.gen_range(-1.0..=1.0), 30)).collect()
}

/// Point of the component (zeros, sign chains, free coordinates random), then perturbed
/// off it by `h` in a random direction.
pub fn near_variety_point(rng: &mut ChaCha8Rng, n: usize, spec: &ComponentSpec, h: &Q) -> Vec<Q> {
    let mut x = cube_point(rng, n);
    for &z in &spec.zeros {
        if z < n {
            x[z] = Q::zero();
        }
    }
    for chain in &spec.chains {
        let s = from_f64_grid(rng.gen_range(0.1..=1.0), 30);
        let s = if rng.gen::<bool>() { s } else { -s };
        for (k, &v) in chain.vars.iter().enumerate() {
            if v < n {
                x[v] = if chain.signs[k] < 0 { -s.clone() } else { s.clone() };
            }
        }
    }
    if !h.is_zero() {
        for xi in x.iter_mut() {
            *xi += h * from_f64_grid(rng.gen_range(-1.0..=1.0), 30);
        }
    }
    x
}

fn ladder(i: usize) -> Q {
    match i % 13 {
        0 => Q::zero(),
        k => Q::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), k)),
    }
}

fn sample_point(rng: &mut ChaCha8Rng, n: usize, sampler: &Sampler, i: usize) -> Vec<Q> {
    match sampler {
        Sampler::UnitSphere => sphere_point(rng, n),
        Sampler::Cube => cube_point(rng, n),
        Sampler::NearVariety(spec) => near_variety_point(rng, n, spec, &ladder(i)),
        Sampler::Ball { center, radius } => {
            if i == 0 {
                center.clone()
            } else {
                center.iter().map(|c| c + radius * from_f64_grid(rng.gen_range(-1.0..=1.0), 30)).collect()
            }
        }
    }
}

fn run_parallel<F>(count: usize, threads: usize, work: F) -> Result<Vec<SampleRecord>, SimError>
where
    F: Fn(usize) -> Result<SampleRecord, SimError> + Sync,
{
    let threads = threads.max(1).min(count.max(1));
    if threads == 1 {
        return (0..count).map(&work).collect();
    }
    let chunk = count.div_ceil(threads);
    let results: Vec<Result<Vec<SampleRecord>, SimError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let work = &work;
                s.spawn(move || (t * chunk..((t + 1) * chunk).min(count)).map(work).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(count);
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// N samples from the sampler with uniformly random δ ∈ [−ε, ε].
pub fn sample_accuracy_report(
    alg: &Algorithm,
    p: &Polynomial,
    sampler: &Sampler,
    eps: &Q,
    eta: Option<&Q>,
    n: usize,
    opts: &SimOptions,
) -> Result<AccuracyReport, SimError> {
    check_leaves(alg, p)?;
    let ids = alg.delta_ids();
    let nv = alg.nvars();
    if let Sampler::Ball { center, .. } = sampler {
        if center.len() != nv {
            return Err(SimError::Invalid("center has wrong dimension".into()));
        }
    }
    let recs = run_parallel(n, opts.threads, |i| {
        let mut rng = rng_for(opts.seed, i as u64);
        let x = sample_point(&mut rng, nv, sampler, i);
        let delta: Vec<(NodeId, Q)> = ids.iter().map(|&id| (id, random_delta(&mut rng, eps))).collect();
        evaluate(alg, p, opts.mode, &x, &delta, eps)
    })?;
    let mut report = AccuracyReport {
        samples: n,
        evaluations: n,
        eps: eps.clone(),
        eta: eta.cloned(),
        mode: opts.mode,
        seed: opts.seed,
        worst: None,
        top: Vec::new(),
    };
    report.absorb(recs);
    Ok(report)
}

/// Latin-hypercube δ seeds over random x in the ball, then sign-climbing on δ and
/// shrinking coordinate steps on x from the best witnesses. Stops early on ∞.
#[allow(clippy::too_many_arguments)]
pub fn adversarial_search(
    alg: &Algorithm,
    p: &Polynomial,
    center: &[Q],
    radius: &Q,
    eps: &Q,
    budget: usize,
    eta: Option<&Q>,
    opts: &SimOptions,
) -> Result<AccuracyReport, SimError> {
    if budget == 0 {
        return Err(SimError::Invalid("budget must be at least 1".into()));
    }
    check_leaves(alg, p)?;
    let nv = alg.nvars();
    if center.len() != nv {
        return Err(SimError::Invalid("center has wrong dimension".into()));
    }
    let ids = alg.delta_ids();
    let m = 8usize;
    let mut report = AccuracyReport {
        samples: 0,
        evaluations: 0,
        eps: eps.clone(),
        eta: eta.cloned(),
        mode: opts.mode,
        seed: opts.seed,
        worst: None,
        top: Vec::new(),
    };
    let explore = (budget * 7 / 10).max(1);
    let rounds = explore.div_ceil(m);
    let sampler = Sampler::Ball { center: center.to_vec(), radius: radius.clone() };
    let mut round = 0usize;
    while round < rounds && report.evaluations < explore {
        // one batch of rounds per reduction keeps early stopping cheap
        let batch = (rounds - round).min(64);
        let recs = run_parallel(batch * m, opts.threads, |k| {
            let r = round + k / m;
            let slot = k % m;
            let mut rng = rng_for(opts.seed, r as u64);
            let x = sample_point(&mut rng, nv, &sampler, r);
            // LHS: dimension d uses a seeded permutation of the m strata
            let delta: Vec<(NodeId, Q)> = ids
                .iter()
                .enumerate()
                .map(|(d, &id)| {
                    let mut prng = rng_for(opts.seed ^ 0x9e37_79b9, (r * 1024 + d) as u64);
                    let mut perm: Vec<usize> = (0..m).collect();
                    for i in (1..m).rev() {
                        perm.swap(i, prng.gen_range(0..=i));
                    }
                    let mut urng = rng_for(opts.seed ^ 0x51ed_270b, (k * 1024 + d) as u64);
                    let u: i64 = urng.gen_range(0..(1i64 << 16));
                    let cell = perm[slot] as i64;
                    // position in [0, 1): (cell + u/2^16)/m, mapped to [−ε, ε]
                    let pos = qf(cell * (1 << 16) + u, (m as i64) << 16);
                    (id, eps * (q(2) * pos - q(1)))
                })
                .collect();
            evaluate(alg, p, opts.mode, &x, &delta, eps)
        })?;
        report.evaluations += recs.len();
        report.samples += batch;
        report.absorb(recs);
        round += batch;
        if report.worst_rel_err().is_infinite() {
            return Ok(report);
        }
    }
    // refinement from the best few witnesses
    let starts: Vec<SampleRecord> = report.top.iter().take(4).cloned().collect();
    for start in starts {
        let mut cur = start;
        let mut step = radius.clone();
        while report.evaluations < budget {
            let mut improved = false;
            for i in 0..cur.delta.len() {
                for v in [eps.clone(), -eps.clone()] {
                    if cur.delta[i].1 == v || report.evaluations >= budget {
                        continue;
                    }
                    let mut d = cur.delta.clone();
                    d[i].1 = v;
                    let rec = evaluate(alg, p, opts.mode, &cur.x, &d, eps)?;
                    report.evaluations += 1;
                    if rec.err > cur.err {
                        cur = rec;
                        improved = true;
                    }
                }
            }
            if !step.is_zero() {
                for i in 0..nv {
                    for sgn in [1, -1] {
                        if report.evaluations >= budget {
                            break;
                        }
                        let mut x = cur.x.clone();
                        x[i] += &step * q(sgn);
                        if (&x[i] - &center[i]).abs() > *radius {
                            continue;
                        }
                        let rec = evaluate(alg, p, opts.mode, &x, &cur.delta, eps)?;
                        report.evaluations += 1;
                        if rec.err > cur.err {
                            cur = rec;
                            improved = true;
                        }
                    }
                }
            }
            report.absorb(vec![cur.clone()]);
            if report.worst_rel_err().is_infinite() {
                return Ok(report);
            }
            if !improved {
                step = &step / q(2);
                if step < pow_q(&qf(1, 2), 40) * radius.clone() || step.is_zero() {
                    break;
                }
            }
        }
    }
    Ok(report)
}

/// Σ|c_α|·((1+ε)^f − 1)/p_min for the monomial-sum evaluator.
pub fn monomial_sum_bound(p: &Polynomial, f: u32, eps: &Q, p_min: &Q) -> Q {
    let l1: Q = p.terms().map(|(_, c)| c.abs()).fold(Q::zero(), |a, b| a + b);
    l1 * (pow_q(&(Q::one() + eps), f) - Q::one()) / p_min
}
