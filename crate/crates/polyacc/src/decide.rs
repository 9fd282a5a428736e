//! Decision procedures: allowable-form factorization (complex case), Allow(x)
//! subspaces, general position, real witnesses and affine black boxes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::dag::{BlackBoxOp, Dag, DagBuilder, Ref};
use crate::error::DecideError;
use crate::poly::Polynomial;
use crate::rational::{fmt_q, q, rational_roots, Q};

/// x_i, x_i + x_j or x_i − x_j (0-based, i < j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AllowableForm {
    Z(usize),
    S(usize, usize),
    D(usize, usize),
}

impl AllowableForm {
    pub fn to_poly(&self, n: usize) -> Polynomial {
        match *self {
            AllowableForm::Z(i) => Polynomial::var(n, i),
            AllowableForm::S(i, j) => &Polynomial::var(n, i) + &Polynomial::var(n, j),
            AllowableForm::D(i, j) => &Polynomial::var(n, i) - &Polynomial::var(n, j),
        }
    }

    pub fn vanishes_at(&self, x: &[Q]) -> bool {
        match *self {
            AllowableForm::Z(i) => x[i].is_zero(),
            AllowableForm::S(i, j) => (&x[i] + &x[j]).is_zero(),
            AllowableForm::D(i, j) => x[i] == x[j],
        }
    }
}

impl fmt::Display for AllowableForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AllowableForm::Z(i) => write!(f, "x{}", i + 1),
            AllowableForm::S(i, j) => write!(f, "x{}+x{}", i + 1, j + 1),
            AllowableForm::D(i, j) => write!(f, "x{}-x{}", i + 1, j + 1),
        }
    }
}

/// n forms x_i, then x_i+x_j, x_i−x_j for each i < j.
pub fn allowable_forms(n: usize) -> Vec<AllowableForm> {
    let mut v: Vec<AllowableForm> = (0..n).map(AllowableForm::Z).collect();
    for i in 0..n {
        for j in i + 1..n {
            v.push(AllowableForm::S(i, j));
            v.push(AllowableForm::D(i, j));
        }
    }
    v
}

/// Argument of a black-box slot: 0 or ±x_var.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Zero,
    Var { index: usize, neg: bool },
}

/// How a factor is computed in a DAG.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormImpl {
    Classical(AllowableForm),
    BlackBox { op: String, slots: Vec<Slot> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub poly: Polynomial,
    pub imp: FormImpl,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.imp {
            FormImpl::Classical(a) => write!(f, "({a})"),
            FormImpl::BlackBox { op, .. } => write!(f, "{op}[{}]", self.poly),
        }
    }
}

pub fn classical_factors(n: usize) -> Vec<Factor> {
    allowable_forms(n)
        .into_iter()
        .map(|a| Factor { poly: a.to_poly(n), imp: FormImpl::Classical(a) })
        .collect()
}

/// p = c · Π factors · remainder, remainder primitive (or 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub c: Q,
    pub factors: Vec<Factor>,
    pub remainder: Polynomial,
}

impl Factorization {
    pub fn expand(&self) -> Polynomial {
        let mut acc = self.remainder.scale(&self.c);
        for f in &self.factors {
            acc = &acc * &f.poly;
        }
        acc
    }

    pub fn is_complete(&self) -> bool {
        self.remainder.is_constant()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_q(&self.c))?;
        for fac in &self.factors {
            write!(f, "*{fac}")?;
        }
        if !self.remainder.is_constant() {
            write!(f, "*({})", self.remainder)?;
        }
        Ok(())
    }
}

/// Greedy maximal extraction of each form in turn; the content of what is left goes to c.
pub fn factor_allowable(p: &Polynomial, forms: &[Factor]) -> Factorization {
    let mut rem = p.clone();
    let mut factors = Vec::new();
    if !rem.is_zero() {
        for f in forms {
            if f.poly.is_constant() {
                continue;
            }
            while let Some(r) = rem.try_divide_exact(&f.poly) {
                factors.push(f.clone());
                rem = r;
            }
        }
    }
    let (c, prim) = rem.content_primitive();
    let remainder = if prim.is_zero() { Polynomial::one(p.nvars()) } else { prim };
    Factorization { c, factors, remainder }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Evaluable,
    NotEvaluable,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Evaluable => "Evaluable",
            Status::NotEvaluable => "NotEvaluable",
            Status::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub point: Vec<Q>,
    /// Restriction of p to Allow(point); nonzero.
    pub restriction: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Factorization(Factorization),
    Remainder(Polynomial),
    Inhomogeneous { degrees: Vec<u32> },
    Witness(Witness),
    Reason(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub certificate: Certificate,
}

impl Verdict {
    fn unknown(reason: &str) -> Self {
        Verdict { status: Status::Unknown, certificate: Certificate::Reason(reason.to_string()) }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cert = match &self.certificate {
            Certificate::Factorization(fz) => format!("factorization:{fz}"),
            Certificate::Remainder(r) => format!("remainder:{r}"),
            Certificate::Inhomogeneous { degrees } => format!("inhomogeneous:degrees={degrees:?}"),
            Certificate::Witness(w) => {
                let pt: Vec<String> = w.point.iter().map(fmt_q).collect();
                format!("witness:({}) restriction:{}", pt.join(","), w.restriction)
            }
            Certificate::Reason(r) => format!("reason:{r}"),
        };
        write!(f, "status={} certificate={}", self.status, cert)
    }
}

fn term_degrees(p: &Polynomial) -> Vec<u32> {
    let s: BTreeSet<u32> = p.terms().map(|(m, _)| m.degree()).collect();
    s.into_iter().collect()
}

/// Complex-case decision for classical arithmetic.
pub fn decide_complex(p: &Polynomial) -> Result<Verdict, DecideError> {
    if !p.is_integral() {
        return Err(DecideError::Hypothesis("coefficients must be integers".into()));
    }
    if !p.constant_term().is_zero() {
        return Err(DecideError::Hypothesis("constant term must be zero".into()));
    }
    let degs = term_degrees(p);
    if degs.len() > 1 {
        return Ok(Verdict { status: Status::NotEvaluable, certificate: Certificate::Inhomogeneous { degrees: degs } });
    }
    let fz = factor_allowable(p, &classical_factors(p.nvars()));
    if fz.is_complete() {
        Ok(Verdict { status: Status::Evaluable, certificate: Certificate::Factorization(fz) })
    } else {
        Ok(Verdict { status: Status::NotEvaluable, certificate: Certificate::Remainder(fz.remainder) })
    }
}

fn scale_op_for<'a>(c: &Q, ops: &'a BTreeMap<String, BlackBoxOp>) -> Option<&'a BlackBoxOp> {
    ops.values().find(|op| {
        op.arity == 1 && op.poly.len() == 1 && op.poly.coeff(&[1]) == *c
    })
}

/// DAG computing c · Π factors: balanced product, then integer c by repeated addition
/// (negative c through a dotted output edge); non-integer c needs a registered scale op.
pub fn compile_product(
    c: &Q,
    factors: &[Factor],
    nvars: usize,
    ops: &BTreeMap<String, BlackBoxOp>,
) -> Result<Dag, DecideError> {
    let mut b = DagBuilder::new("product", nvars);
    for op in ops.values() {
        b.register(op.clone());
    }
    let mut zero: Option<Ref> = None;
    let mut vals = Vec::new();
    for f in factors {
        let r = match &f.imp {
            FormImpl::Classical(AllowableForm::Z(i)) => b.source(*i),
            FormImpl::Classical(AllowableForm::S(i, j)) => {
                let (a, c) = (b.source(*i), b.source(*j));
                b.add(a, c)
            }
            FormImpl::Classical(AllowableForm::D(i, j)) => {
                let (a, c) = (b.source(*i), b.source(*j));
                b.sub(a, c)
            }
            FormImpl::BlackBox { op, slots } => {
                if !ops.contains_key(op) {
                    return Err(DecideError::Hypothesis(format!("black-box op {op} is not registered")));
                }
                let mut ins = Vec::new();
                for s in slots {
                    ins.push(match s {
                        Slot::Zero => match zero {
                            Some(z) => z,
                            None => {
                                let x = b.source(0);
                                let z = b.sub(x, x);
                                zero = Some(z);
                                z
                            }
                        },
                        Slot::Var { index, neg } => b.source(*index).with_sign(*neg),
                    });
                }
                b.bbox(op, ins)
            }
        };
        vals.push(r);
    }
    let prod = match b.product(vals) {
        Some(r) => r,
        None => {
            let x = b.source(0);
            if c.is_zero() {
                let z = b.sub(x, x);
                return Ok(b.finish(z));
            }
            return Err(DecideError::Hypothesis("a nonzero constant cannot be computed from inputs".into()));
        }
    };
    if c.is_zero() {
        let z = b.sub(prod, prod);
        return Ok(b.finish(z));
    }
    let out = if c.is_integer() {
        let m = c.abs().to_integer();
        let m: u64 = m.try_into().map_err(|_| DecideError::Hypothesis("constant too large".into()))?;
        b.times_int(prod, m).with_sign(c.is_negative())
    } else if let Some(op) = scale_op_for(c, ops) {
        let name = op.name.clone();
        b.bbox(&name, vec![prod])
    } else {
        return Err(DecideError::Hypothesis(format!(
            "non-integer constant {} needs a constant-multiplication op",
            fmt_q(c)
        )));
    };
    Ok(b.finish(out))
}

/// Compiles an Evaluable verdict's factorization.
pub fn compile_verdict(v: &Verdict, nvars: usize, ops: &BTreeMap<String, BlackBoxOp>) -> Result<Dag, DecideError> {
    match &v.certificate {
        Certificate::Factorization(fz) if fz.is_complete() => {
            let c = &fz.c * fz.remainder.constant_term();
            compile_product(&c, &fz.factors, nvars, ops)
        }
        _ => Err(DecideError::Hypothesis("verdict carries no complete factorization".into())),
    }
}

/// Allow(x): the vanishing allowable hyperplanes and a parametrization
/// x_i = sign_i · s_{class(i)} (zero classes map to 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllowSubspace {
    pub nvars: usize,
    pub forms: Vec<AllowableForm>,
    /// One polynomial per coordinate, in `dim` parameters.
    pub images: Vec<Polynomial>,
    pub dim: usize,
}

impl AllowSubspace {
    pub fn is_whole_space(&self) -> bool {
        self.dim == self.nvars
    }

    pub fn basis(&self) -> Vec<Vec<Q>> {
        (0..self.dim)
            .map(|k| {
                self.images
                    .iter()
                    .map(|p| {
                        let mut e = vec![0; self.dim];
                        e[k] = 1;
                        p.coeff(&e)
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn allow_subspace(x: &[Q]) -> AllowSubspace {
    let n = x.len();
    let forms: Vec<AllowableForm> = allowable_forms(n).into_iter().filter(|f| f.vanishes_at(x)).collect();
    // classes of equal |x_i|, in order of first appearance
    let mut reps: Vec<usize> = Vec::new();
    let mut class = vec![None; n];
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        match reps.iter().position(|&r| x[r].abs() == x[i].abs()) {
            Some(k) => class[i] = Some(k),
            None => {
                class[i] = Some(reps.len());
                reps.push(i);
            }
        }
    }
    let dim = reps.len();
    let images = (0..n)
        .map(|i| match class[i] {
            None => Polynomial::zero(dim),
            Some(k) => {
                let v = Polynomial::var(dim, k);
                if (x[i].is_negative()) != (x[reps[k]].is_negative()) {
                    -v
                } else {
                    v
                }
            }
        })
        .collect();
    AllowSubspace { nvars: n, forms, images, dim }
}

/// General position of a variety point: p restricted to Allow(x) is not identically zero.
pub fn is_general_position(p: &Polynomial, x: &[Q]) -> Result<(bool, Polynomial), DecideError> {
    let v = p.eval(x)?;
    if !v.is_zero() {
        return Err(DecideError::NotOnVariety(fmt_q(&v)));
    }
    let sub = allow_subspace(x);
    if sub.dim == 0 {
        return Ok((false, Polynomial::zero(1)));
    }
    let r = p.substitute(&sub.images)?;
    Ok((!r.is_zero(), r))
}

/// First candidate that is a general-position zero of p.
pub fn real_nonevaluability_witness(p: &Polynomial, candidates: &[Vec<Q>]) -> Option<Witness> {
    for c in candidates {
        if c.len() != p.nvars() {
            continue;
        }
        if let Ok((true, restriction)) = is_general_position(p, c) {
            return Some(Witness { point: c.clone(), restriction });
        }
    }
    None
}

/// Rational zeros of p on axis-parallel lines through points of a small integer grid
/// (coordinates in [-r, r]); each line restriction is solved exactly.
pub fn line_zero_candidates(p: &Polynomial, r: i64, limit: usize) -> Vec<Vec<Q>> {
    let n = p.nvars();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let vals: Vec<Q> = (-r..=r).map(q).collect();
    let combos = (vals.len() as u64).saturating_pow(n.saturating_sub(1) as u32);
    if combos > 200_000 {
        return out;
    }
    for free in 0..n {
        for code in 0..combos {
            let mut pt: Vec<Q> = Vec::with_capacity(n);
            let mut c = code;
            for i in 0..n {
                if i == free {
                    pt.push(Q::zero());
                } else {
                    pt.push(vals[(c % vals.len() as u64) as usize].clone());
                    c /= vals.len() as u64;
                }
            }
            // univariate restriction in t = x_free
            let images: Vec<Polynomial> = (0..n)
                .map(|i| if i == free { Polynomial::var(1, 0) } else { Polynomial::constant(1, pt[i].clone()) })
                .collect();
            let Ok(u) = p.substitute(&images) else { continue };
            if u.is_zero() {
                continue;
            }
            let coeffs: Vec<Q> = (0..=u.degree_in(0)).map(|d| u.coeff(&[d])).collect();
            if let Some(roots) = rational_roots(&coeffs) {
                for t in roots {
                    let mut z = pt.clone();
                    z[free] = t;
                    if seen.insert(z.clone()) {
                        out.push(z);
                        if out.len() >= limit {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Real-case verdict: NotEvaluable with a witness from the candidates, Unknown otherwise.
pub fn decide_real(p: &Polynomial, candidates: &[Vec<Q>]) -> Verdict {
    match real_nonevaluability_witness(p, candidates) {
        Some(w) => Verdict { status: Status::NotEvaluable, certificate: Certificate::Witness(w) },
        None => Verdict::unknown("no general-position rational zero among the candidates"),
    }
}

/// I = (T, K_Z, K_D, K_S, K_N), all 0-based slot indices; pairs (i, j) eliminate j.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivedVarietySpec {
    pub t: Vec<usize>,
    pub kz: Vec<usize>,
    pub kd: Vec<(usize, usize)>,
    pub ks: Vec<(usize, usize)>,
    pub kn: Vec<usize>,
}

impl DerivedVarietySpec {
    /// Per-slot images: each slot becomes 0 or ±(surviving variable).
    pub fn slot_images(&self, arity: usize) -> Result<Vec<Slot>, DecideError> {
        let bad = |m: String| DecideError::MalformedSpec(m);
        let check = |i: usize| if i < arity { Ok(()) } else { Err(bad(format!("index {} out of range", i + 1))) };
        // parent[j] = (i, negated) for eliminated j
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; arity];
        for (pairs, neg) in [(&self.kd, false), (&self.ks, true)] {
            for &(i, j) in pairs {
                check(i)?;
                check(j)?;
                if i == j {
                    return Err(bad(format!("pair ({}, {}) repeats a variable", i + 1, j + 1)));
                }
                if parent[j].is_some() {
                    return Err(bad(format!("x{} eliminated twice", j + 1)));
                }
                parent[j] = Some((i, neg));
            }
        }
        for &i in self.kz.iter().chain(self.kn.iter()).chain(self.t.iter()) {
            check(i)?;
        }
        let root = |mut j: usize| -> Result<(usize, bool), DecideError> {
            let mut sign = false;
            for _ in 0..=arity {
                match parent[j] {
                    None => return Ok((j, sign)),
                    Some((i, s)) => {
                        sign ^= s;
                        j = i;
                    }
                }
            }
            Err(DecideError::MalformedSpec("cyclic identifications".into()))
        };
        let mut slots = Vec::with_capacity(arity);
        for s in 0..arity {
            let (r, sign) = root(s)?;
            let zero = self.kz.contains(&s) || self.kz.contains(&r);
            slots.push(if zero {
                Slot::Zero
            } else {
                Slot::Var { index: r, neg: sign ^ self.kn.contains(&s) }
            });
        }
        for &t in &self.t {
            if !matches!(slots[t], Slot::Var { index, .. } if index == t) {
                return Err(bad(format!("x{} is not a remaining independent variable", t + 1)));
            }
        }
        Ok(slots)
    }
}

fn slot_poly(s: &Slot, n: usize) -> Polynomial {
    match *s {
        Slot::Zero => Polynomial::zero(n),
        Slot::Var { index, neg } => {
            let v = Polynomial::var(n, index);
            if neg {
                -v
            } else {
                v
            }
        }
    }
}

/// Generators of V_I: the coefficients of q̃ expanded in the variables T.
pub fn derived_variety_polynomial(op: &BlackBoxOp, spec: &DerivedVarietySpec) -> Result<Vec<Polynomial>, DecideError> {
    let n = op.arity;
    let slots = spec.slot_images(n)?;
    let images: Vec<Polynomial> = slots.iter().map(|s| slot_poly(s, n)).collect();
    let qt = op.poly.substitute(&images)?;
    if spec.t.is_empty() {
        return Ok(vec![qt]);
    }
    let parts = qt.support_projection(&spec.t)?;
    Ok(parts.into_values().filter(|p| !p.is_zero()).collect())
}

/// Every distinct form q(ℓ_1, …, ℓ_k) with ℓ_s ∈ {0, ±x_j} (j < n), up to scaling.
/// Affine ops are enumerated by DFS over partial linear forms with deduplication.
pub fn derived_forms(op: &BlackBoxOp, n: usize) -> Result<Vec<Factor>, DecideError> {
    if op.arity > 8 {
        return Err(DecideError::Hypothesis(format!("op {} has arity {} > 8", op.name, op.arity)));
    }
    let k = op.arity;
    let choices: Vec<Slot> = std::iter::once(Slot::Zero)
        .chain((0..n).flat_map(|j| [Slot::Var { index: j, neg: false }, Slot::Var { index: j, neg: true }]))
        .collect();
    let mut out: BTreeMap<Polynomial, Vec<Slot>> = BTreeMap::new();
    let affine = op.poly.total_degree().unwrap_or(0) <= 1;
    if affine {
        let a: Vec<Q> = (0..k)
            .map(|s| {
                let mut e = vec![0; k];
                e[s] = 1;
                op.poly.coeff(&e)
            })
            .collect();
        let mut states: BTreeMap<Vec<Q>, Vec<Slot>> = BTreeMap::from([(vec![Q::zero(); n], vec![])]);
        for (s, a_s) in a.iter().enumerate() {
            let mut next = BTreeMap::new();
            for (vec, slots) in &states {
                for ch in &choices {
                    let mut v = vec.clone();
                    if let Slot::Var { index, neg } = *ch {
                        if neg {
                            v[index] -= a_s;
                        } else {
                            v[index] += a_s;
                        }
                    }
                    let mut sl = slots.clone();
                    sl.push(*ch);
                    next.entry(v).or_insert(sl);
                }
            }
            states = next;
            let _ = s;
        }
        let c0 = op.poly.constant_term();
        for (v, slots) in states {
            let mut p = Polynomial::linear(&v);
            if !c0.is_zero() {
                p = &p + &Polynomial::constant(n, c0.clone());
            }
            insert_form(&mut out, p, slots);
        }
    } else {
        let total = (choices.len() as u64).saturating_pow(k as u32);
        if total > 200_000 {
            return Err(DecideError::Hypothesis(format!("op {} has too many slot assignments", op.name)));
        }
        for code in 0..total {
            let mut c = code;
            let slots: Vec<Slot> = (0..k)
                .map(|_| {
                    let s = choices[(c % choices.len() as u64) as usize];
                    c /= choices.len() as u64;
                    s
                })
                .collect();
            let images: Vec<Polynomial> = slots.iter().map(|s| slot_poly(s, n)).collect();
            let p = op.poly.substitute(&images)?;
            insert_form(&mut out, p, slots);
        }
    }
    Ok(out
        .into_iter()
        .map(|(poly, slots)| Factor { poly, imp: FormImpl::BlackBox { op: op.name.clone(), slots } })
        .collect())
}

fn insert_form(out: &mut BTreeMap<Polynomial, Vec<Slot>>, p: Polynomial, slots: Vec<Slot>) {
    if p.is_constant() {
        return;
    }
    let (c, prim) = p.content_primitive();
    if c.is_one() || !out.contains_key(&prim) {
        // keep an assignment computing the primitive form exactly when one exists
        if c.is_one() {
            out.insert(prim, slots);
        } else {
            out.entry(prim).or_insert(slots);
        }
    }
}

/// Complex-case decision with black-box ops (affine ops give an iff; otherwise only
/// sufficiency is checked).
pub fn decide_blackbox_affine(p: &Polynomial, ops: &[BlackBoxOp]) -> Result<Verdict, DecideError> {
    let n = p.nvars();
    let registry: BTreeMap<String, BlackBoxOp> = ops.iter().map(|o| (o.name.clone(), o.clone())).collect();
    let all_affine = ops.iter().all(|o| o.poly.total_degree().unwrap_or(0) <= 1);
    let mut forms = classical_factors(n);
    let classical: BTreeSet<Polynomial> = forms.iter().map(|f| f.poly.clone()).collect();
    for op in ops {
        for f in derived_forms(op, n)? {
            // a derived form whose exact value is a classical form adds nothing; keep the classical one
            if f.poly.total_degree() == Some(1) && classical.contains(&f.poly) {
                continue;
            }
            forms.push(f);
        }
    }
    let fz = factor_allowable(p, &forms);
    if !fz.is_complete() {
        if all_affine {
            return Ok(Verdict { status: Status::NotEvaluable, certificate: Certificate::Remainder(fz.remainder) });
        }
        return Ok(Verdict::unknown("non-affine op present and no factorization over the available forms"));
    }
    let c = &fz.c * fz.remainder.constant_term();
    if !c.is_integer() && scale_op_for(&c, &registry).is_none() {
        return Ok(Verdict::unknown(&format!(
            "constant {} requires a constant-multiplication op",
            fmt_q(&c)
        )));
    }
    Ok(Verdict { status: Status::Evaluable, certificate: Certificate::Factorization(fz) })
}

/// Constant-multiplication op q^c(x) = c·x.
pub fn scale_op(c: &Q) -> BlackBoxOp {
    BlackBoxOp::new("scale", Polynomial::linear(std::slice::from_ref(c)))
}
