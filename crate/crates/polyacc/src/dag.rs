//! Rounded-arithmetic DAGs: every non-source node multiplies its exact result by
//! (1+δ_id); negated edges are exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::DagError;
use crate::parse::parse_polynomial;
use crate::poly::{Arith, Polynomial};
use crate::rational::{fmt_q, Q};

pub type NodeId = u32;

/// Edge into a node; `neg` marks an exact negation (dotted edge).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ref {
    pub node: NodeId,
    pub neg: bool,
}

impl Ref {
    pub fn pos(node: NodeId) -> Self {
        Ref { node, neg: false }
    }

    pub fn negated(self) -> Self {
        Ref { node: self.node, neg: !self.neg }
    }

    pub fn with_sign(self, neg: bool) -> Self {
        Ref { node: self.node, neg: self.neg ^ neg }
    }
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.neg {
            write!(f, "-{}", self.node)
        } else {
            write!(f, "{}", self.node)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    /// Input variable (0-based index).
    Source(usize),
    Add,
    Sub,
    Mul,
    BBox(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub op: Op,
    pub inputs: Vec<Ref>,
}

/// A polynomial primitive evaluated with a single rounding (or none when `exact`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlackBoxOp {
    pub name: String,
    pub arity: usize,
    pub poly: Polynomial,
    pub exact: bool,
}

impl BlackBoxOp {
    pub fn new(name: &str, poly: Polynomial) -> Self {
        BlackBoxOp { name: name.to_string(), arity: poly.nvars(), poly, exact: false }
    }

    pub fn exact(name: &str, poly: Polynomial) -> Self {
        BlackBoxOp { name: name.to_string(), arity: poly.nvars(), poly, exact: true }
    }

    pub fn parse_line(line: &str) -> Result<Self, DagError> {
        let bad = |msg: &str| DagError::Parse { line: 0, msg: msg.to_string() };
        let rest = line.trim().strip_prefix("op ").ok_or_else(|| bad("expected 'op'"))?;
        let (head, poly_text) = rest.split_once("poly=").ok_or_else(|| bad("missing poly="))?;
        let mut name = None;
        let mut arity = None;
        let mut exact = false;
        for tok in head.split_whitespace() {
            if let Some(a) = tok.strip_prefix("arity=") {
                arity = Some(a.parse::<usize>().map_err(|_| bad("bad arity"))?);
            } else if tok == "exact" {
                exact = true;
            } else if name.is_none() {
                name = Some(tok.to_string());
            } else {
                return Err(bad(&format!("unexpected token {tok:?}")));
            }
        }
        let name = name.ok_or_else(|| bad("missing op name"))?;
        let arity = arity.ok_or_else(|| bad("missing arity="))?;
        let poly = parse_polynomial(poly_text.trim(), arity)?;
        Ok(BlackBoxOp { name, arity, poly, exact })
    }

    pub fn to_line(&self) -> String {
        format!(
            "op {} arity={}{} poly={}",
            self.name,
            self.arity,
            if self.exact { " exact" } else { "" },
            self.poly
        )
    }
}

/// Structured validation findings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    DuplicateId(NodeId),
    UnknownInput { node: NodeId, input: NodeId },
    Cycle(Vec<NodeId>),
    Arity { node: NodeId, expected: usize, got: usize },
    UnknownOp { node: NodeId, op: String },
    SourceVarOutOfRange { node: NodeId, var: usize },
    MissingOutput(NodeId),
    OpPolyArity { op: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DuplicateId(id) => write!(f, "duplicate node id {id}"),
            Diagnostic::UnknownInput { node, input } => write!(f, "node {node} reads unknown node {input}"),
            Diagnostic::Cycle(ids) => write!(f, "cycle through nodes {ids:?}"),
            Diagnostic::Arity { node, expected, got } => {
                write!(f, "node {node} has {got} inputs, expected {expected}")
            }
            Diagnostic::UnknownOp { node, op } => write!(f, "node {node} uses unknown op {op:?}"),
            Diagnostic::SourceVarOutOfRange { node, var } => write!(f, "node {node} reads x{}", var + 1),
            Diagnostic::MissingOutput(id) => write!(f, "output node {id} does not exist"),
            Diagnostic::OpPolyArity { op } => write!(f, "op {op:?} polynomial does not match its arity"),
        }
    }
}

/// Rounding errors per node plus the bound ε they respect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaAssignment {
    pub eps: Q,
    pub values: BTreeMap<NodeId, Q>,
}

impl DeltaAssignment {
    pub fn new(eps: Q, values: BTreeMap<NodeId, Q>) -> Result<Self, DagError> {
        if eps <= Q::zero() || eps >= Q::one() {
            return Err(DagError::Invalid("eps must lie in (0,1)".into()));
        }
        for (id, v) in &values {
            if v.clone() > eps || v.clone() < -eps.clone() {
                return Err(DagError::Invalid(format!("|delta_{id}| exceeds eps")));
            }
        }
        Ok(DeltaAssignment { eps, values })
    }

    /// No δ values at all (only DAGs without rounded nodes evaluate); use `uniform` with 0 for δ ≡ 0.
    pub fn zero(eps: Q) -> Self {
        DeltaAssignment { eps, values: BTreeMap::new() }
    }

    pub fn uniform(eps: &Q, ids: &[NodeId], value: &Q) -> Self {
        DeltaAssignment { eps: eps.clone(), values: ids.iter().map(|&i| (i, value.clone())).collect() }
    }
}

/// p_comp(x,δ) expanded in δ: α ↦ p_α(x). The α = 0 entry is p itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorExpansion {
    pub nvars: usize,
    pub delta_ids: Vec<NodeId>,
    pub order: Option<u32>,
    pub coeffs: BTreeMap<Vec<u32>, Polynomial>,
}

impl ErrorExpansion {
    pub fn p(&self) -> Polynomial {
        self.coeffs
            .get(&vec![0; self.delta_ids.len()])
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    /// Coefficient of the δ-monomial given as (node id, power) pairs.
    pub fn coeff(&self, alpha: &[(NodeId, u32)]) -> Polynomial {
        let mut key = vec![0; self.delta_ids.len()];
        for (id, e) in alpha {
            if let Some(pos) = self.delta_ids.iter().position(|d| d == id) {
                key[pos] = *e;
            } else {
                return Polynomial::zero(self.nvars);
            }
        }
        self.coeffs.get(&key).cloned().unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    /// Nonzero δ-monomials (α ≠ 0) as sorted (node id, power) lists.
    pub fn delta_support(&self) -> BTreeSet<Vec<(NodeId, u32)>> {
        self.coeffs
            .keys()
            .filter(|a| a.iter().any(|&e| e > 0))
            .map(|a| {
                a.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (self.delta_ids[i], e))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityVerdict {
    pub homogeneous: bool,
    pub degree: Option<u32>,
    /// True when δ was kept symbolic; false when checked on random δ specializations.
    pub symbolic: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    pub name: String,
    pub nvars: usize,
    pub nodes: Vec<Node>,
    pub output: Ref,
    pub ops: BTreeMap<String, BlackBoxOp>,
}

impl Dag {
    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    fn index(&self) -> HashMap<NodeId, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect()
    }

    pub fn is_rounded(&self, n: &Node) -> bool {
        match &n.op {
            Op::Source(_) => false,
            Op::BBox(name) => !self.ops.get(name).map(|o| o.exact).unwrap_or(false),
            _ => true,
        }
    }

    /// Ids of nodes that carry a δ, ascending.
    pub fn rounded_ids(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.nodes.iter().filter(|n| self.is_rounded(n)).map(|n| n.id).collect();
        v.sort();
        v
    }

    pub fn is_classical(&self) -> bool {
        self.nodes.iter().all(|n| !matches!(n.op, Op::BBox(_)))
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.id) {
                diags.push(Diagnostic::DuplicateId(n.id));
            }
        }
        for op in self.ops.values() {
            if op.poly.nvars() != op.arity {
                diags.push(Diagnostic::OpPolyArity { op: op.name.clone() });
            }
        }
        for n in &self.nodes {
            for r in &n.inputs {
                if !seen.contains(&r.node) {
                    diags.push(Diagnostic::UnknownInput { node: n.id, input: r.node });
                }
            }
            let expected = match &n.op {
                Op::Source(v) => {
                    if *v >= self.nvars {
                        diags.push(Diagnostic::SourceVarOutOfRange { node: n.id, var: *v });
                    }
                    Some(0)
                }
                Op::Add | Op::Sub | Op::Mul => Some(2),
                Op::BBox(name) => match self.ops.get(name) {
                    Some(op) => Some(op.arity),
                    None => {
                        diags.push(Diagnostic::UnknownOp { node: n.id, op: name.clone() });
                        None
                    }
                },
            };
            if let Some(e) = expected {
                if e != n.inputs.len() {
                    diags.push(Diagnostic::Arity { node: n.id, expected: e, got: n.inputs.len() });
                }
            }
        }
        if !seen.contains(&self.output.node) {
            diags.push(Diagnostic::MissingOutput(self.output.node));
        }
        if let Err(cyc) = self.topo_order_inner() {
            diags.push(Diagnostic::Cycle(cyc));
        }
        diags
    }

    fn topo_order_inner(&self) -> Result<Vec<usize>, Vec<NodeId>> {
        let idx = self.index();
        let mut indeg = vec![0usize; self.nodes.len()];
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for r in &n.inputs {
                if let Some(&j) = idx.get(&r.node) {
                    indeg[i] += 1;
                    users[j].push(i);
                }
            }
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).rev().collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop() {
            order.push(i);
            for &u in users[i].iter().rev() {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    ready.push(u);
                }
            }
        }
        if order.len() != self.nodes.len() {
            let mut stuck: Vec<NodeId> =
                (0..self.nodes.len()).filter(|&i| indeg[i] > 0).map(|i| self.nodes[i].id).collect();
            stuck.sort();
            return Err(stuck);
        }
        Ok(order)
    }

    /// Node indices in a dependency-respecting order.
    pub fn topo_order(&self) -> Result<Vec<usize>, DagError> {
        let diags = self.validate();
        if !diags.is_empty() {
            let msg: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            return Err(DagError::Invalid(msg.join("; ")));
        }
        self.topo_order_inner().map_err(|c| DagError::Invalid(format!("cycle through {c:?}")))
    }

    /// Evaluates every node; `round(id, v)` applies the rounding factor of a rounded node.
    pub fn eval_nodes<T: Arith>(
        &self,
        x: &[T],
        konst: &dyn Fn(&Q) -> T,
        round: &mut dyn FnMut(NodeId, T) -> Result<T, DagError>,
    ) -> Result<HashMap<NodeId, T>, DagError> {
        if x.len() != self.nvars {
            return Err(crate::error::PolyError::DimensionMismatch { expected: self.nvars, got: x.len() }.into());
        }
        let order = self.topo_order()?;
        let mut vals: HashMap<NodeId, T> = HashMap::with_capacity(self.nodes.len());
        for i in order {
            let n = &self.nodes[i];
            let arg = |r: &Ref| -> T {
                let v = &vals[&r.node];
                if r.neg {
                    v.negate()
                } else {
                    v.clone()
                }
            };
            let v = match &n.op {
                Op::Source(k) => x[*k].clone(),
                Op::Add => arg(&n.inputs[0]).plus(&arg(&n.inputs[1])),
                Op::Sub => arg(&n.inputs[0]).minus(&arg(&n.inputs[1])),
                Op::Mul => arg(&n.inputs[0]).times(&arg(&n.inputs[1])),
                Op::BBox(name) => {
                    let op = self.ops.get(name).ok_or_else(|| DagError::UnknownOp(name.clone()))?;
                    let args: Vec<T> = n.inputs.iter().map(&arg).collect();
                    op.poly.eval_with(&args, konst)
                }
            };
            let v = if self.is_rounded(n) { round(n.id, v)? } else { v };
            vals.insert(n.id, v);
        }
        Ok(vals)
    }

    pub fn eval_generic<T: Arith>(
        &self,
        x: &[T],
        konst: &dyn Fn(&Q) -> T,
        round: &mut dyn FnMut(NodeId, T) -> Result<T, DagError>,
    ) -> Result<T, DagError> {
        let vals = self.eval_nodes(x, konst, round)?;
        let v = vals[&self.output.node].clone();
        Ok(if self.output.neg { v.negate() } else { v })
    }

    /// Exact rational evaluation under the rounding model.
    pub fn eval_rounded(&self, x: &[Q], delta: &DeltaAssignment) -> Result<Q, DagError> {
        self.eval_generic(x, &|c: &Q| c.clone(), &mut |id, v: Q| {
            let d = delta.values.get(&id).ok_or(DagError::MissingDelta(id))?;
            Ok(v * (Q::one() + d))
        })
    }

    /// Binary64 evaluation under the rounding model (δ missing ⇒ error).
    pub fn eval_rounded_f64(&self, x: &[f64], delta: &BTreeMap<NodeId, f64>) -> Result<f64, DagError> {
        self.eval_generic(x, &crate::rational::to_f64, &mut |id, v: f64| {
            let d = delta.get(&id).ok_or(DagError::MissingDelta(id))?;
            Ok(v * (1.0 + d))
        })
    }

    /// The polynomial computed at δ = 0.
    pub fn extract_polynomial(&self) -> Result<Polynomial, DagError> {
        let n = self.nvars;
        let x: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
        self.eval_generic(&x, &|c: &Q| Polynomial::constant(n, c.clone()), &mut |_, v| Ok(v))
    }

    /// Output with symbolic δ: a polynomial in x1..xn followed by one variable per
    /// rounded node (ascending id), truncated at total δ-degree `order` if given.
    pub fn symbolic_output(&self, order: Option<u32>) -> Result<(Polynomial, Vec<NodeId>), DagError> {
        let ids = self.rounded_ids();
        let n = self.nvars;
        let total = n + ids.len();
        let pos: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(k, &id)| (id, n + k)).collect();
        let x: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(total, i)).collect();
        let one = Polynomial::one(total);
        let out = self.eval_generic(&x, &|c: &Q| Polynomial::constant(total, c.clone()), &mut |id, v| {
            let d = Polynomial::var(total, pos[&id]);
            let r = &v * &(&one + &d);
            Ok(match order {
                Some(k) => truncate_delta(&r, n, k),
                None => r,
            })
        })?;
        Ok((out, ids))
    }

    pub fn error_expansion(&self, order: Option<u32>) -> Result<ErrorExpansion, DagError> {
        let (out, ids) = self.symbolic_output(order)?;
        let n = self.nvars;
        let mut coeffs: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
        for (m, c) in out.terms() {
            let alpha = m.0[n..].to_vec();
            let mut xe = m.0[..n].to_vec();
            xe.truncate(n);
            let t = Polynomial::monomial(n, xe, c.clone());
            let e = coeffs.entry(alpha).or_insert_with(|| Polynomial::zero(n));
            *e = &*e + &t;
        }
        coeffs.retain(|_, p| !p.is_zero());
        Ok(ErrorExpansion { nvars: n, delta_ids: ids, order, coeffs })
    }

    /// Homogeneity in x of every node and of the output, no node above the output degree.
    pub fn check_homogeneous_algorithm(&self) -> Result<HomogeneityVerdict, DagError> {
        let ids = self.rounded_ids();
        let n = self.nvars;
        let symbolic = ids.len() <= 16;
        let runs: Vec<HashMap<NodeId, Polynomial>> = if symbolic {
            let total = n + ids.len();
            let pos: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(k, &id)| (id, n + k)).collect();
            let x: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(total, i)).collect();
            let one = Polynomial::one(total);
            vec![self.eval_nodes(&x, &|c: &Q| Polynomial::constant(total, c.clone()), &mut |id, v| {
                Ok(&v * &(&one + &Polynomial::var(total, pos[&id])))
            })?]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_4a11);
            let x: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
            let mut runs = Vec::new();
            for _ in 0..2 {
                let deltas: HashMap<NodeId, Q> = ids
                    .iter()
                    .map(|&id| (id, Q::new(rng.gen_range(-1000i64..=1000).into(), 1009.into())))
                    .collect();
                runs.push(self.eval_nodes(&x, &|c: &Q| Polynomial::constant(n, c.clone()), &mut |id, v| {
                    Ok(v.scale(&(Q::one() + &deltas[&id])))
                })?);
            }
            runs
        };
        let xdeg = |p: &Polynomial| -> BTreeSet<u32> { p.terms().map(|(m, _)| m.0[..n].iter().sum()).collect() };
        let mut out_deg: Option<u32> = None;
        for vals in &runs {
            let mut out = vals[&self.output.node].clone();
            if self.output.neg {
                out = -out;
            }
            let degs = xdeg(&out);
            if degs.len() != 1 {
                let reason = if degs.is_empty() { "output is identically zero" } else { "output is not homogeneous" };
                return Ok(HomogeneityVerdict { homogeneous: false, degree: None, symbolic, reason: Some(reason.into()) });
            }
            let d = *degs.iter().next().unwrap();
            out_deg = Some(d);
            let mut ordered: Vec<&NodeId> = vals.keys().collect();
            ordered.sort();
            for id in ordered {
                let degs = xdeg(&vals[id]);
                if degs.len() > 1 {
                    return Ok(HomogeneityVerdict {
                        homogeneous: false,
                        degree: Some(d),
                        symbolic,
                        reason: Some(format!("node {id} is not homogeneous")),
                    });
                }
                if let Some(&e) = degs.iter().next() {
                    if e > d {
                        return Ok(HomogeneityVerdict {
                            homogeneous: false,
                            degree: Some(d),
                            symbolic,
                            reason: Some(format!("node {id} has degree {e} > {d}")),
                        });
                    }
                }
            }
        }
        Ok(HomogeneityVerdict { homogeneous: true, degree: out_deg, symbolic, reason: None })
    }

    /// Largest number of (1+δ) factors on any term of the output (the f of the monomial-sum bound).
    pub fn delta_depth(&self) -> Result<u32, DagError> {
        let order = self.topo_order()?;
        let mut depth: HashMap<NodeId, u32> = HashMap::new();
        for i in order {
            let n = &self.nodes[i];
            let ins: Vec<u32> = n.inputs.iter().map(|r| depth[&r.node]).collect();
            let base = match &n.op {
                Op::Source(_) => 0,
                Op::Mul => ins.iter().sum(),
                Op::BBox(name) => {
                    // each output term multiplies at most (degree) input terms
                    let deg = self.ops.get(name).and_then(|o| o.poly.total_degree()).unwrap_or(1) as usize;
                    let mut sorted = ins.clone();
                    sorted.sort_unstable_by(|a, b| b.cmp(a));
                    sorted.iter().take(deg.max(1)).sum()
                }
                _ => ins.iter().copied().max().unwrap_or(0),
            };
            depth.insert(n.id, base + u32::from(self.is_rounded(n)));
        }
        Ok(depth[&self.output.node])
    }

    pub fn rounded_op_count(&self) -> usize {
        self.nodes.iter().filter(|n| self.is_rounded(n)).count()
    }

    /// Drops nodes that do not reach the output.
    pub fn remove_unreachable(&mut self) {
        let idx = self.index();
        let mut keep = BTreeSet::new();
        let mut stack = vec![self.output.node];
        while let Some(id) = stack.pop() {
            if !keep.insert(id) {
                continue;
            }
            if let Some(&i) = idx.get(&id) {
                for r in &self.nodes[i].inputs {
                    stack.push(r.node);
                }
            }
        }
        self.nodes.retain(|n| keep.contains(&n.id));
        let used: BTreeSet<String> = self
            .nodes
            .iter()
            .filter_map(|n| if let Op::BBox(s) = &n.op { Some(s.clone()) } else { None })
            .collect();
        self.ops.retain(|k, _| used.contains(k));
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("dag {} nvars={}\n", self.name, self.nvars);
        for op in self.ops.values() {
            s.push_str(&op.to_line());
            s.push('\n');
        }
        for n in &self.nodes {
            let refs: Vec<String> = n.inputs.iter().map(|r| r.to_string()).collect();
            let line = match &n.op {
                Op::Source(v) => format!("node {} source x{}", n.id, v + 1),
                Op::Add => format!("node {} add {}", n.id, refs.join(" ")),
                Op::Sub => format!("node {} sub {}", n.id, refs.join(" ")),
                Op::Mul => format!("node {} mul {}", n.id, refs.join(" ")),
                Op::BBox(name) => format!("node {} bbox {} {}", n.id, name, refs.join(" ")),
            };
            s.push_str(line.trim_end());
            s.push('\n');
        }
        s.push_str(&format!("out {}\n", self.output));
        s
    }

    pub fn parse(text: &str) -> Result<Dag, DagError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let (dag, used) = parse_dag_lines(&lines)?;
        if used != lines.len() {
            return Err(DagError::Parse { line: lines[used].0, msg: "unexpected trailing content".into() });
        }
        Ok(dag)
    }
}

fn truncate_delta(p: &Polynomial, n: usize, order: u32) -> Polynomial {
    p.filter_terms(|m| m.0[n..].iter().sum::<u32>() <= order)
}

fn parse_ref(tok: &str, line: usize) -> Result<Ref, DagError> {
    let (neg, body) = match tok.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, tok),
    };
    let node = body
        .parse::<NodeId>()
        .map_err(|_| DagError::Parse { line, msg: format!("bad node reference {tok:?}") })?;
    Ok(Ref { node, neg })
}

fn is_dag_line(l: &str) -> bool {
    ["node ", "op ", "out "].iter().any(|k| l.starts_with(k))
}

/// Parses a `dag` block starting at lines[0]; returns the dag and number of lines consumed.
fn parse_dag_lines(lines: &[(usize, &str)]) -> Result<(Dag, usize), DagError> {
    let (ln, header) = *lines.first().ok_or(DagError::Parse { line: 0, msg: "empty input".into() })?;
    let perr = |line: usize, msg: &str| DagError::Parse { line, msg: msg.to_string() };
    let mut hdr = header.split_whitespace();
    if hdr.next() != Some("dag") {
        return Err(perr(ln, "expected 'dag <name> nvars=<n>'"));
    }
    let name = hdr.next().ok_or_else(|| perr(ln, "missing dag name"))?.to_string();
    let nvars = hdr
        .next()
        .and_then(|t| t.strip_prefix("nvars="))
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| perr(ln, "missing nvars=<n>"))?;
    let mut nodes = Vec::new();
    let mut ops = BTreeMap::new();
    let mut output = None;
    let mut used = 1;
    for &(ln, l) in &lines[1..] {
        if !is_dag_line(l) {
            break;
        }
        used += 1;
        if l.starts_with("op ") {
            let op = BlackBoxOp::parse_line(l).map_err(|e| match e {
                DagError::Parse { msg, .. } => perr(ln, &msg),
                other => other,
            })?;
            ops.insert(op.name.clone(), op);
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks[0] == "out" {
            if output.is_some() {
                return Err(perr(ln, "more than one output"));
            }
            if toks.len() != 2 {
                return Err(perr(ln, "expected 'out <ref>'"));
            }
            output = Some(parse_ref(toks[1], ln)?);
            continue;
        }
        if toks.len() < 3 {
            return Err(perr(ln, "incomplete node line"));
        }
        let id = toks[1].parse::<NodeId>().map_err(|_| perr(ln, "bad node id"))?;
        let (op, rest) = match toks[2] {
            "source" => {
                let v = toks
                    .get(3)
                    .and_then(|t| t.strip_prefix('x'))
                    .and_then(|t| t.parse::<usize>().ok())
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| perr(ln, "expected source x<i>"))?;
                if toks.len() != 4 {
                    return Err(perr(ln, "trailing tokens after source"));
                }
                (Op::Source(v - 1), &toks[4..])
            }
            "add" => (Op::Add, &toks[3..]),
            "sub" => (Op::Sub, &toks[3..]),
            "mul" => (Op::Mul, &toks[3..]),
            "bbox" => {
                let name = toks.get(3).ok_or_else(|| perr(ln, "missing op name"))?;
                (Op::BBox(name.to_string()), &toks[4..])
            }
            other => return Err(perr(ln, &format!("unknown node kind {other:?}"))),
        };
        let inputs = rest.iter().map(|t| parse_ref(t, ln)).collect::<Result<Vec<_>, _>>()?;
        nodes.push(Node { id, op, inputs });
    }
    let output = output.ok_or_else(|| perr(ln, "dag has no 'out' line"))?;
    Ok((Dag { name, nvars, nodes, output, ops }, used))
}

/// Incremental DAG construction with shared source nodes.
#[derive(Clone, Debug)]
pub struct DagBuilder {
    name: String,
    nvars: usize,
    nodes: Vec<Node>,
    ops: BTreeMap<String, BlackBoxOp>,
    sources: HashMap<usize, NodeId>,
    next: NodeId,
}

impl DagBuilder {
    pub fn new(name: &str, nvars: usize) -> Self {
        DagBuilder {
            name: name.to_string(),
            nvars,
            nodes: Vec::new(),
            ops: BTreeMap::new(),
            sources: HashMap::new(),
            next: 1,
        }
    }

    fn push(&mut self, op: Op, inputs: Vec<Ref>) -> Ref {
        let id = self.next;
        self.next += 1;
        self.nodes.push(Node { id, op, inputs });
        Ref::pos(id)
    }

    pub fn source(&mut self, var: usize) -> Ref {
        if let Some(&id) = self.sources.get(&var) {
            return Ref::pos(id);
        }
        let r = self.push(Op::Source(var), vec![]);
        self.sources.insert(var, r.node);
        r
    }

    pub fn add(&mut self, a: Ref, b: Ref) -> Ref {
        self.push(Op::Add, vec![a, b])
    }

    pub fn sub(&mut self, a: Ref, b: Ref) -> Ref {
        self.push(Op::Sub, vec![a, b])
    }

    pub fn mul(&mut self, a: Ref, b: Ref) -> Ref {
        self.push(Op::Mul, vec![a, b])
    }

    pub fn register(&mut self, op: BlackBoxOp) {
        self.ops.insert(op.name.clone(), op);
    }

    pub fn has_op(&self, name: &str) -> bool {
        self.ops.contains_key(name)
    }

    pub fn bbox(&mut self, name: &str, inputs: Vec<Ref>) -> Ref {
        self.push(Op::BBox(name.to_string()), inputs)
    }

    /// Balanced product of the given values (empty ⇒ None).
    pub fn product(&mut self, mut vals: Vec<Ref>) -> Option<Ref> {
        if vals.is_empty() {
            return None;
        }
        while vals.len() > 1 {
            let mut next = Vec::with_capacity(vals.len().div_ceil(2));
            for pair in vals.chunks(2) {
                next.push(if pair.len() == 2 { self.mul(pair[0], pair[1]) } else { pair[0] });
            }
            vals = next;
        }
        Some(vals[0])
    }

    /// Balanced sum; a negated ref is subtracted. Returns a ref whose sign may be negative.
    pub fn sum(&mut self, mut vals: Vec<Ref>) -> Option<Ref> {
        if vals.is_empty() {
            return None;
        }
        while vals.len() > 1 {
            let mut next = Vec::with_capacity(vals.len().div_ceil(2));
            for pair in vals.chunks(2) {
                next.push(if pair.len() == 2 { self.add(pair[0], pair[1]) } else { pair[0] });
            }
            vals = next;
        }
        Some(vals[0])
    }

    /// m·v for a positive integer m by repeated addition along a doubling chain.
    pub fn times_int(&mut self, v: Ref, m: u64) -> Ref {
        assert!(m >= 1);
        let bits = 64 - m.leading_zeros();
        let mut acc = v;
        for b in (0..bits - 1).rev() {
            acc = self.add(acc, acc);
            if (m >> b) & 1 == 1 {
                acc = self.add(acc, v);
            }
        }
        acc
    }

    /// Copies `dag` into this builder (sources shared by variable) and returns its output.
    pub fn import(&mut self, dag: &Dag) -> Result<Ref, DagError> {
        let order = dag.topo_order()?;
        for op in dag.ops.values() {
            if let Some(existing) = self.ops.get(&op.name) {
                if existing != op {
                    return Err(DagError::Invalid(format!("conflicting definitions of op {}", op.name)));
                }
            }
            self.ops.insert(op.name.clone(), op.clone());
        }
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        for i in order {
            let n = &dag.nodes[i];
            let ins: Vec<Ref> = n.inputs.iter().map(|r| Ref { node: map[&r.node], neg: r.neg }).collect();
            let r = match &n.op {
                Op::Source(v) => self.source(*v),
                op => self.push(op.clone(), ins),
            };
            map.insert(n.id, r.node);
        }
        Ok(Ref { node: map[&dag.output.node], neg: dag.output.neg })
    }

    pub fn finish(self, output: Ref) -> Dag {
        let mut d = Dag { name: self.name, nvars: self.nvars, nodes: self.nodes, output, ops: self.ops };
        d.remove_unreachable();
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
}

impl Cmp {
    pub fn holds(self, a: &Q, b: &Q) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Eq => a == b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
        }
    }
}

/// Exact polynomial comparison `lhs cmp rhs` on the inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    pub lhs: Polynomial,
    pub cmp: Cmp,
    pub rhs: Polynomial,
}

impl Guard {
    pub fn holds(&self, x: &[Q]) -> Result<bool, DagError> {
        Ok(self.cmp.holds(&self.lhs.eval(x)?, &self.rhs.eval(x)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch {
    Leaf(Dag),
    If { guard: Guard, then: Box<Branch>, els: Box<Branch> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchProgram {
    pub name: String,
    pub nvars: usize,
    pub root: Branch,
}

impl BranchProgram {
    pub fn route(&self, x: &[Q]) -> Result<&Dag, DagError> {
        let mut b = &self.root;
        loop {
            match b {
                Branch::Leaf(d) => return Ok(d),
                Branch::If { guard, then, els } => {
                    b = if guard.holds(x)? { then } else { els };
                }
            }
        }
    }

    pub fn leaves(&self) -> Vec<&Dag> {
        fn walk<'a>(b: &'a Branch, out: &mut Vec<&'a Dag>) {
            match b {
                Branch::Leaf(d) => out.push(d),
                Branch::If { then, els, .. } => {
                    walk(then, out);
                    walk(els, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn to_text(&self) -> String {
        fn walk(b: &Branch, depth: usize, s: &mut String) {
            let pad = "  ".repeat(depth);
            match b {
                Branch::Leaf(d) => {
                    for l in d.to_text().lines() {
                        s.push_str(&format!("{pad}{l}\n"));
                    }
                }
                Branch::If { guard, then, els } => {
                    s.push_str(&format!("{pad}if {} {} {} then\n", guard.lhs, guard.cmp.symbol(), guard.rhs));
                    walk(then, depth + 1, s);
                    s.push_str(&format!("{pad}else\n"));
                    walk(els, depth + 1, s);
                    s.push_str(&format!("{pad}end\n"));
                }
            }
        }
        let mut s = format!("branch {} nvars={}\n", self.name, self.nvars);
        walk(&self.root, 0, &mut s);
        s
    }

    pub fn parse(text: &str) -> Result<BranchProgram, DagError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let (ln, header) = *lines.first().ok_or(DagError::Parse { line: 0, msg: "empty input".into() })?;
        let mut hdr = header.split_whitespace();
        if hdr.next() != Some("branch") {
            return Err(DagError::Parse { line: ln, msg: "expected 'branch <name> nvars=<n>'".into() });
        }
        let name = hdr.next().unwrap_or("program").to_string();
        let nvars = hdr
            .next()
            .and_then(|t| t.strip_prefix("nvars="))
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or(DagError::Parse { line: ln, msg: "missing nvars=<n>".into() })?;
        let (root, used) = parse_branch(&lines[1..], nvars)?;
        if used + 1 != lines.len() {
            return Err(DagError::Parse { line: lines[used + 1].0, msg: "unexpected trailing content".into() });
        }
        Ok(BranchProgram { name, nvars, root })
    }
}

fn parse_branch(lines: &[(usize, &str)], nvars: usize) -> Result<(Branch, usize), DagError> {
    let (ln, l) = *lines.first().ok_or(DagError::Parse { line: 0, msg: "missing block".into() })?;
    if l.starts_with("dag ") {
        let (d, used) = parse_dag_lines(lines)?;
        return Ok((Branch::Leaf(d), used));
    }
    let body = l
        .strip_prefix("if ")
        .and_then(|b| b.strip_suffix(" then"))
        .ok_or(DagError::Parse { line: ln, msg: "expected 'if ... then' or 'dag'".into() })?;
    let (lhs, cmp, rhs) = if let Some((a, b)) = body.split_once("<=") {
        (a, Cmp::Le, b)
    } else if let Some((a, b)) = body.split_once('<') {
        (a, Cmp::Lt, b)
    } else if let Some((a, b)) = body.split_once('=') {
        (a, Cmp::Eq, b)
    } else {
        return Err(DagError::Parse { line: ln, msg: "guard needs <, <= or =".into() });
    };
    let perr = |e: crate::error::PolyError| DagError::Parse { line: ln, msg: e.to_string() };
    let guard = Guard {
        lhs: parse_polynomial(lhs.trim(), nvars).map_err(perr)?,
        cmp,
        rhs: parse_polynomial(rhs.trim(), nvars).map_err(perr)?,
    };
    let mut i = 1;
    let (then, used) = parse_branch(&lines[i..], nvars)?;
    i += used;
    match lines.get(i) {
        Some((_, "else")) => i += 1,
        Some((l2, _)) => return Err(DagError::Parse { line: *l2, msg: "expected 'else'".into() }),
        None => return Err(DagError::Parse { line: ln, msg: "missing 'else'".into() }),
    }
    let (els, used) = parse_branch(&lines[i..], nvars)?;
    i += used;
    match lines.get(i) {
        Some((_, "end")) => i += 1,
        Some((l2, _)) => return Err(DagError::Parse { line: *l2, msg: "expected 'end'".into() }),
        None => return Err(DagError::Parse { line: ln, msg: "missing 'end'".into() }),
    }
    Ok((Branch::If { guard, then: Box::new(then), els: Box::new(els) }, i))
}

/// Either a straight-line DAG or a branching program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Dag(Dag),
    Branch(BranchProgram),
}

impl Algorithm {
    pub fn nvars(&self) -> usize {
        match self {
            Algorithm::Dag(d) => d.nvars,
            Algorithm::Branch(b) => b.nvars,
        }
    }

    pub fn leaves(&self) -> Vec<&Dag> {
        match self {
            Algorithm::Dag(d) => vec![d],
            Algorithm::Branch(b) => b.leaves(),
        }
    }

    pub fn leaf_for(&self, x: &[Q]) -> Result<&Dag, DagError> {
        match self {
            Algorithm::Dag(d) => Ok(d),
            Algorithm::Branch(b) => b.route(x),
        }
    }

    /// Union of δ ids over all leaves.
    pub fn delta_ids(&self) -> Vec<NodeId> {
        let set: BTreeSet<NodeId> = self.leaves().iter().flat_map(|d| d.rounded_ids()).collect();
        set.into_iter().collect()
    }

    pub fn eval_rounded(&self, x: &[Q], delta: &DeltaAssignment) -> Result<Q, DagError> {
        self.leaf_for(x)?.eval_rounded(x, delta)
    }

    pub fn parse(text: &str) -> Result<Algorithm, DagError> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .unwrap_or("");
        if first.starts_with("branch") {
            Ok(Algorithm::Branch(BranchProgram::parse(text)?))
        } else {
            Ok(Algorithm::Dag(Dag::parse(text)?))
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Algorithm::Dag(d) => d.to_text(),
            Algorithm::Branch(b) => b.to_text(),
        }
    }
}

/// Shorthand for rendering a delta assignment as `id:value` pairs.
pub fn fmt_delta(d: &DeltaAssignment) -> String {
    d.values.iter().map(|(k, v)| format!("{k}:{}", fmt_q(v))).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    const NAIVE: &str = "dag naive_sum nvars=3\nnode 101 source x1\nnode 102 source x2\nnode 103 source x3\nnode 1 add 101 102\nnode 2 add 1 103\nout 2\n";

    #[test]
    fn naive_sum_is_valid_and_round_trips() {
        let d = Dag::parse(NAIVE).unwrap();
        assert!(d.validate().is_empty());
        assert_eq!(Dag::parse(&d.to_text()).unwrap(), d);
        assert_eq!(d.extract_polynomial().unwrap(), parse_polynomial("x1+x2+x3", 3).unwrap());
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let d = Dag::parse("dag c nvars=1\nnode 1 source x1\nnode 2 add 1 2\nout 2\n").unwrap();
        assert!(d.validate().iter().any(|x| matches!(x, Diagnostic::Cycle(_))));
    }

    #[test]
    fn blackbox_arity_diagnostic() {
        let text = "dag f nvars=2\nop fma arity=3 poly=x1 + x2*x3\nnode 1 source x1\nnode 2 source x2\nnode 3 bbox fma 1 2\nout 3\n";
        let d = Dag::parse(text).unwrap();
        assert!(d.validate().contains(&Diagnostic::Arity { node: 3, expected: 3, got: 2 }));
    }

    #[test]
    fn naive_sum_failure_at_cancellation_point() {
        let d = Dag::parse(NAIVE).unwrap();
        let x = [q(1), q(1), q(-2)];
        let (d1, d2) = (qf(1, 1000), qf(-1, 999));
        let delta = DeltaAssignment::new(qf(1, 100), BTreeMap::from([(1, d1.clone()), (2, d2.clone())])).unwrap();
        let v = d.eval_rounded(&x, &delta).unwrap();
        assert_eq!(v, q(2) * &d1 * (q(1) + &d2));
    }

    #[test]
    fn product_rounding() {
        let d = Dag::parse("dag p nvars=2\nnode 1 source x1\nnode 2 source x2\nnode 3 mul 1 2\nout 3\n").unwrap();
        let delta = DeltaAssignment::new(qf(1, 10), BTreeMap::from([(3, qf(1, 10))])).unwrap();
        assert_eq!(d.eval_rounded(&[q(3), q(4)], &delta).unwrap(), qf(66, 5));
        assert!(d.eval_rounded(&[q(3), q(4)], &DeltaAssignment::zero(qf(1, 10))).is_err());
    }

    #[test]
    fn naive_sum_expansion() {
        let d = Dag::parse(NAIVE).unwrap();
        let e = d.error_expansion(Some(2)).unwrap();
        let p = |s: &str| parse_polynomial(s, 3).unwrap();
        assert_eq!(e.p(), p("x1+x2+x3"));
        assert_eq!(e.coeff(&[(1, 1)]), p("x1+x2"));
        assert_eq!(e.coeff(&[(2, 1)]), p("x1+x2+x3"));
        assert_eq!(e.coeff(&[(1, 1), (2, 1)]), p("x1+x2"));
        assert_eq!(e.delta_support().len(), 3);
    }

    #[test]
    fn homogeneity_checks() {
        let good = Dag::parse("dag h nvars=3\nnode 1 source x1\nnode 2 source x2\nnode 3 source x3\nnode 4 sub 1 2\nnode 5 mul 3 4\nout 5\n").unwrap();
        let v = good.check_homogeneous_algorithm().unwrap();
        assert!(v.homogeneous);
        assert_eq!(v.degree, Some(2));
        let bad = Dag::parse("dag h nvars=2\nnode 1 source x1\nnode 2 source x2\nnode 3 mul 1 2\nnode 4 add 3 1\nout 4\n").unwrap();
        assert!(!bad.check_homogeneous_algorithm().unwrap().homogeneous);
    }

    #[test]
    fn builder_times_int() {
        let mut b = DagBuilder::new("m", 1);
        let x = b.source(0);
        let r = b.times_int(x, 13);
        let d = b.finish(r);
        assert_eq!(d.extract_polynomial().unwrap(), parse_polynomial("13*x1", 1).unwrap());
    }

    #[test]
    fn branch_program_round_trip() {
        let text = "branch b nvars=1\nif x1 <= 0 then\n  dag neg nvars=1\n  node 1 source x1\n  out -1\nelse\n  dag pos nvars=1\n  node 1 source x1\n  out 1\nend\n";
        let bp = BranchProgram::parse(text).unwrap();
        assert_eq!(bp.leaves().len(), 2);
        assert_eq!(bp.route(&[q(-1)]).unwrap().name, "neg");
        assert_eq!(bp.route(&[q(2)]).unwrap().name, "pos");
        assert_eq!(BranchProgram::parse(&bp.to_text()).unwrap(), bp);
    }
}
