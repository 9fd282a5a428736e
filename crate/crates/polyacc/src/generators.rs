//! Constructors of accurate algorithms: monomial sums, the Motzkin branching program,
//! compensated summation through black boxes, and region-guarded assembly.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::dag::{Algorithm, BlackBoxOp, Branch, BranchProgram, Cmp, Dag, DagBuilder, Guard, Ref};
use crate::error::GenError;
use crate::poly::Polynomial;
use crate::rational::{q, Q};

/// Monomial-sum DAG with its f (largest number of δ factors on any term).
#[derive(Clone, Debug)]
pub struct MonomialSum {
    pub dag: Dag,
    pub f: u32,
}

fn int_coeff(c: &Q) -> Result<(u64, bool), GenError> {
    if !c.is_integer() {
        return Err(GenError::Precondition(format!("coefficient {c} is not an integer")));
    }
    let m = c.abs().to_integer().to_u64().ok_or_else(|| GenError::Precondition("coefficient too large".into()))?;
    Ok((m, c.is_negative()))
}

/// Each monomial by balanced repeated multiplication, its integer coefficient by
/// repeated addition (negative ones through a dotted edge), then a balanced sum.
pub fn gen_monomial_sum(p: &Polynomial) -> Result<MonomialSum, GenError> {
    if p.is_zero() {
        return Err(GenError::Precondition("zero polynomial".into()));
    }
    if p.homogeneous_degree()?.is_none() {
        return Err(GenError::Precondition("polynomial is not homogeneous".into()));
    }
    let n = p.nvars();
    let mut b = DagBuilder::new("monomial_sum", n);
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let (mag, neg) = int_coeff(c)?;
        let mut factors = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                factors.push(b.source(i));
            }
        }
        let mono = b.product(factors).ok_or_else(|| GenError::Precondition("constant term".into()))?;
        let t = if mag == 1 { mono } else { b.times_int(mono, mag) };
        terms.push(t.with_sign(neg));
    }
    let out = b.sum(terms).expect("nonzero polynomial");
    let dag = b.finish(out);
    let f = dag.delta_depth()?;
    Ok(MonomialSum { dag, f })
}

fn left_sum(b: &mut DagBuilder, vals: Vec<Ref>) -> Ref {
    let mut it = vals.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, |acc, v| b.add(acc, v))
}

fn times(b: &mut DagBuilder, v: Ref, m: u64) -> Ref {
    if m == 1 {
        v
    } else {
        b.times_int(v, m)
    }
}

/// The displayed Motzkin leaf with x_i replaced by s_i·x_i.
pub fn motzkin_leaf(j: u64, signs: [bool; 3]) -> Dag {
    let name = format!(
        "motzkin_{}{}{}",
        if signs[0] { 'm' } else { 'p' },
        if signs[1] { 'm' } else { 'p' },
        if signs[2] { 'm' } else { 'p' }
    );
    let mut b = DagBuilder::new(&name, 3);
    let x1 = b.source(0).with_sign(signs[0]);
    let x2 = b.source(1).with_sign(signs[1]);
    let c = b.source(2).with_sign(signs[2]);
    let a = b.sub(x1, c);
    let bb = b.sub(x2, c);
    let a2 = b.mul(a, a);
    let b2 = b.mul(bb, bb);
    let ab = b.mul(a, bb);
    let a3 = b.mul(a2, a);
    let b3 = b.mul(b2, bb);
    let a2b = b.mul(a2, bb);
    let ab2 = b.mul(a, b2);
    let a4 = b.mul(a2, a2);
    let b4 = b.mul(b2, b2);
    let a3b = b.mul(a3, bb);
    let a2b2 = b.mul(a2, b2);
    let ab3 = b.mul(a, b3);
    let c2 = b.mul(c, c);
    let c3 = b.mul(c2, c);
    let c4 = b.mul(c2, c2);
    // x3^4·[4(a² + b² + ab)]
    let s4 = left_sum(&mut b, vec![a2, b2, ab]);
    let s4 = times(&mut b, s4, 4);
    let t4 = b.mul(c4, s4);
    // x3^3·[2(2a³ + 5a²b + 5ab² + 2b³)]
    let v = vec![times(&mut b, a3, 2), times(&mut b, a2b, 5), times(&mut b, ab2, 5), times(&mut b, b3, 2)];
    let s3 = left_sum(&mut b, v);
    let s3 = times(&mut b, s3, 2);
    let t3 = b.mul(c3, s3);
    // x3^2·[a⁴ + 8a³b + 9a²b² + 8ab³ + b⁴]
    let v = vec![a4, times(&mut b, a3b, 8), times(&mut b, a2b2, 9), times(&mut b, ab3, 8), b4];
    let s2 = left_sum(&mut b, v);
    let t2 = b.mul(c2, s2);
    // x3·[2ab(a³ + 2a²b + 2ab² + b³)]
    let v = vec![a3, times(&mut b, a2b, 2), times(&mut b, ab2, 2), b3];
    let s1 = left_sum(&mut b, v);
    let s1 = b.mul(ab, s1);
    let s1 = times(&mut b, s1, 2);
    let t1 = b.mul(c, s1);
    // a²b²(a² + b²)
    let s0 = b.add(a2, b2);
    let t0 = b.mul(a2b2, s0);
    let p = left_sum(&mut b, vec![t4, t3, t2, t1, t0]);
    let p = times(&mut b, p, j);
    b.finish(p)
}

/// M_{j,k}(x) = j·x3⁶ + x1²x2²(j·x1² + j·x2² − k·x3²).
pub fn motzkin_polynomial(j: i64, k: i64) -> Polynomial {
    let x = |i| Polynomial::var(3, i);
    let inner = &(&x(0).pow(2).scale(&q(j)) + &x(1).pow(2).scale(&q(j))) - &x(2).pow(2).scale(&q(k));
    &x(2).pow(6).scale(&q(j)) + &(&(&x(0).pow(2) * &x(1).pow(2)) * &inner)
}

/// 4·x3² ≤ x1² + x2²: the subtraction in the direct leaf loses at most a factor 7.
pub fn axis_guard() -> Guard {
    let sq = |i| Polynomial::var(3, i).pow(2);
    Guard { lhs: sq(2).scale(&q(4)), cmp: Cmp::Le, rhs: &sq(0) + &sq(1) }
}

/// 6·x1²x2² ≤ x3⁴: the x1²x2² term is at most half of x3⁶ in the direct leaf.
pub fn pole_guard() -> Guard {
    let sq = |i| Polynomial::var(3, i).pow(2);
    Guard { lhs: (&sq(0) * &sq(1)).scale(&q(6)), cmp: Cmp::Le, rhs: sq(2).pow(2) }
}

/// j·(x3⁶ + x1²x2²((x1² + x2²) − 3x3²)).
pub fn motzkin_direct_leaf(j: u64) -> Dag {
    let mut b = DagBuilder::new("motzkin_direct", 3);
    let x: Vec<Ref> = (0..3).map(|i| b.source(i)).collect();
    let sq: Vec<Ref> = x.iter().map(|&v| b.mul(v, v)).collect();
    let s = b.add(sq[0], sq[1]);
    let t = b.times_int(sq[2], 3);
    let d = b.sub(s, t);
    let pr = b.mul(sq[0], sq[1]);
    let u = b.mul(pr, d);
    let x3_4 = b.mul(sq[2], sq[2]);
    let x3_6 = b.mul(x3_4, sq[2]);
    let out = b.add(x3_6, u);
    let out = times(&mut b, out, j);
    b.finish(out)
}

/// |x_i − s·x3| ≤ |x_i + s·x3| as a squared comparison.
fn side_guard(i: usize, s_neg: bool) -> Guard {
    let xi = Polynomial::var(3, i);
    let x3 = Polynomial::var(3, 2);
    let x3 = if s_neg { -&x3 } else { x3 };
    Guard { lhs: (&xi - &x3).pow(2), cmp: Cmp::Le, rhs: (&xi + &x3).pow(2) }
}

/// Guards selecting the leaf with sign pattern `signs`, outermost first.
pub fn motzkin_guards(signs: [bool; 3]) -> Vec<(Guard, bool)> {
    let g3 = Guard { lhs: Polynomial::zero(3), cmp: Cmp::Le, rhs: Polynomial::var(3, 2) };
    vec![(g3, !signs[2]), (side_guard(0, signs[2]), !signs[0]), (side_guard(1, signs[2]), !signs[1])]
}

/// Program for M_{j,3j}. The displayed leaves cancel badly near the axis zeros
/// (±1,0,0), (0,±1,0) (x3²a⁴ + 2x3·a⁴b + a⁴b² = a⁴x2²) and lose a factor ~200 near
/// (0,0,±1), so x1² + x2² ≥ 4x3² or 6x1²x2² ≤ x3⁴ goes to the direct leaf; otherwise
/// the sign of x3 picks the orientation and one test per remaining coordinate picks
/// the leaf whose differences are the small ones.
pub fn gen_motzkin(j: i64, k: i64) -> Result<BranchProgram, GenError> {
    if j < 1 || k != 3 * j {
        return Err(GenError::Precondition(format!("need k = 3j with j ≥ 1, got j={j}, k={k}")));
    }
    let jj = j as u64;
    let build = |s3: bool| -> Branch {
        let leaf = |s1: bool, s2: bool| Branch::Leaf(motzkin_leaf(jj, [s1, s2, s3]));
        let inner = |s1: bool| Branch::If {
            guard: side_guard(1, s3),
            then: Box::new(leaf(s1, false)),
            els: Box::new(leaf(s1, true)),
        };
        Branch::If { guard: side_guard(0, s3), then: Box::new(inner(false)), els: Box::new(inner(true)) }
    };
    let displayed = Branch::If {
        guard: Guard { lhs: Polynomial::zero(3), cmp: Cmp::Le, rhs: Polynomial::var(3, 2) },
        then: Box::new(build(false)),
        els: Box::new(build(true)),
    };
    let direct = || Box::new(Branch::Leaf(motzkin_direct_leaf(jj)));
    let root = Branch::If {
        guard: axis_guard(),
        then: direct(),
        els: Box::new(Branch::If { guard: pole_guard(), then: direct(), els: Box::new(displayed) }),
    };
    Ok(BranchProgram { name: format!("motzkin_{j}_{k}"), nvars: 3, root })
}

/// Stage ops `csum{j}(x, y_1..y_{j−1}) = Σp_i − Σ y` (rounded) and the exact `ysum{k}`.
pub fn compensated_ops(summands: &[Polynomial], k: usize) -> Result<Vec<BlackBoxOp>, GenError> {
    let n = summands.first().map(|p| p.nvars()).ok_or_else(|| GenError::Precondition("no summands".into()))?;
    if summands.iter().any(|p| p.nvars() != n) {
        return Err(GenError::Precondition("summands disagree on nvars".into()));
    }
    if k == 0 {
        return Err(GenError::Precondition("k must be at least 1".into()));
    }
    let mut ops = Vec::new();
    for j in 1..=k {
        let arity = n + j - 1;
        let mut poly = Polynomial::zero(arity);
        for p in summands {
            poly = &poly + &p.extend(arity);
        }
        for m in 0..j - 1 {
            poly = &poly - &Polynomial::var(arity, n + m);
        }
        ops.push(BlackBoxOp::new(&format!("csum{j}"), poly));
    }
    let ys = (0..k).fold(Polynomial::zero(k), |acc, m| &acc + &Polynomial::var(k, m));
    ops.push(BlackBoxOp::exact(&format!("ysum{k}"), ys));
    Ok(ops)
}

/// y_j = rnd(Σp_i − Σ_{m<j} y_m) for j = 1..k, then the exact sum of the y_j.
pub fn gen_compensated_sum(
    summands: &[Polynomial],
    k: usize,
    registry: &BTreeMap<String, BlackBoxOp>,
) -> Result<Dag, GenError> {
    let expected = compensated_ops(summands, k)?;
    let n = summands[0].nvars();
    let mut b = DagBuilder::new(&format!("compensated_k{k}"), n);
    for op in &expected {
        match registry.get(&op.name) {
            Some(r) if r.poly == op.poly && r.exact == op.exact => b.register(r.clone()),
            Some(_) => return Err(GenError::Precondition(format!("op {} has a different definition", op.name))),
            None => return Err(GenError::Precondition(format!("black-box op {} is not registered", op.name))),
        }
    }
    let xs: Vec<Ref> = (0..n).map(|i| b.source(i)).collect();
    let mut ys: Vec<Ref> = Vec::new();
    for j in 1..=k {
        let mut ins = xs.clone();
        ins.extend(ys.iter().copied());
        ys.push(b.bbox(&format!("csum{j}"), ins));
    }
    let out = b.bbox(&format!("ysum{k}"), ys);
    Ok(b.finish(out))
}

/// A region-guarded leaf: all guards must hold; ε_j = 1/eps_inv.
#[derive(Clone, Debug)]
pub struct Plan {
    pub guards: Vec<Guard>,
    pub alg: Algorithm,
    pub eps_inv: u64,
}

/// Tests the plans in order; the first whose guards all hold evaluates p. Points no
/// plan claims fall through to the monomial-sum default leaf.
pub fn branching_evaluator(p: &Polynomial, plans: &[Plan]) -> Result<BranchProgram, GenError> {
    let default = gen_monomial_sum(p)?.dag;
    for (k, plan) in plans.iter().enumerate() {
        if plan.eps_inv == 0 {
            return Err(GenError::Precondition(format!("plan {k} has eps_inv = 0")));
        }
        if plan.alg.nvars() != p.nvars() {
            return Err(GenError::Precondition(format!("plan {k} has the wrong number of variables")));
        }
        for leaf in plan.alg.leaves() {
            if leaf.extract_polynomial()? != *p {
                return Err(GenError::InconsistentPlans(format!("plan {k} has a leaf that does not compute p")));
            }
        }
        for (l, other) in plans.iter().enumerate().take(k) {
            if other.guards == plan.guards && other.eps_inv != plan.eps_inv {
                return Err(GenError::InconsistentPlans(format!(
                    "plans {l} and {k} claim the same region with ε = 1/{} and 1/{}",
                    other.eps_inv, plan.eps_inv
                )));
            }
        }
    }
    let pending: Vec<(Vec<Guard>, &Plan)> = plans.iter().map(|p| (p.guards.clone(), p)).collect();
    let root = decision_tree(pending, &default);
    Ok(BranchProgram { name: "branching".into(), nvars: p.nvars(), root })
}

fn complement(g: &Guard) -> Option<Guard> {
    let cmp = match g.cmp {
        Cmp::Le => Cmp::Lt,
        Cmp::Lt => Cmp::Le,
        Cmp::Eq => return None,
    };
    Some(Guard { lhs: g.rhs.clone(), cmp, rhs: g.lhs.clone() })
}

/// Splits on the first open guard of the first pending plan; plans that require the
/// guard (or its complement) follow one side only, the rest follow both.
fn decision_tree(pending: Vec<(Vec<Guard>, &Plan)>, default: &Dag) -> Branch {
    let Some((guards, first)) = pending.first() else {
        return Branch::Leaf(default.clone());
    };
    let Some(g) = guards.first().cloned() else {
        return match &first.alg {
            Algorithm::Dag(d) => Branch::Leaf(d.clone()),
            Algorithm::Branch(bp) => bp.root.clone(),
        };
    };
    let comp = complement(&g);
    let (mut then, mut els) = (Vec::new(), Vec::new());
    for (gs, plan) in pending {
        if gs.contains(&g) {
            then.push((gs.into_iter().filter(|x| *x != g).collect(), plan));
        } else if comp.as_ref().is_some_and(|c| gs.contains(c)) {
            let c = comp.as_ref().unwrap();
            els.push((gs.into_iter().filter(|x| x != c).collect(), plan));
        } else {
            then.push((gs.clone(), plan));
            els.push((gs, plan));
        }
    }
    Branch::If { guard: g, then: Box::new(decision_tree(then, default)), els: Box::new(decision_tree(els, default)) }
}

/// Guards of a 0/1 sign test: `(guard, holds)` pairs become conjunctions of
/// `guard` or its strict complement.
pub fn guard_conjunction(tests: &[(Guard, bool)]) -> Vec<Guard> {
    tests
        .iter()
        .map(|(g, holds)| {
            if *holds {
                g.clone()
            } else {
                Guard { lhs: g.rhs.clone(), cmp: Cmp::Lt, rhs: g.lhs.clone() }
            }
        })
        .collect()
}

/// The Motzkin leaves as plans (direct leaf first), for assembly by `branching_evaluator`.
pub fn motzkin_plans(j: i64) -> Vec<Plan> {
    let direct = |g: Guard| Plan { guards: vec![g], alg: Algorithm::Dag(motzkin_direct_leaf(j as u64)), eps_inv: 1 << 20 };
    let mut plans = vec![direct(axis_guard()), direct(pole_guard())];
    for code in 0..8u8 {
        let signs = [code & 1 != 0, code & 2 != 0, code & 4 != 0];
        let mut tests = vec![(axis_guard(), false), (pole_guard(), false)];
        tests.extend(motzkin_guards(signs));
        plans.push(Plan {
            guards: guard_conjunction(&tests),
            alg: Algorithm::Dag(motzkin_leaf(j as u64, signs)),
            eps_inv: 1 << 20,
        });
    }
    plans
}

/// Σ_i |c_i| as used by the monomial-sum bound.
pub fn coefficient_l1(p: &Polynomial) -> Q {
    p.terms().fold(Q::zero(), |acc, (_, c)| acc + c.abs())
}
