//! Variety components, standard changes of variables, Newton-polytope dominance
//! regions, dominant terms, widened cones and DAG pruning.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dag::{Cmp, Dag, Guard, Node, NodeId, Op, Ref};
use crate::error::DominanceError;
use crate::poly::Polynomial;
use crate::rational::{q, Q};

/// σ_1 x_{v1} = σ_2 x_{v2} = … (0-based variables, signs ±1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub vars: Vec<usize>,
    pub signs: Vec<i8>,
}

/// A component: some variables zero plus sign chains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentSpec {
    pub zeros: Vec<usize>,
    pub chains: Vec<Chain>,
}

impl ComponentSpec {
    /// `zero: x1,x2; chain: x3=-x4=x5` (sections in any order, chain may repeat).
    pub fn parse(text: &str) -> Result<ComponentSpec, DominanceError> {
        let bad = |m: &str| DominanceError::Spec(m.to_string());
        let var = |tok: &str| -> Result<usize, DominanceError> {
            tok.trim()
                .strip_prefix('x')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .map(|i| i - 1)
                .ok_or_else(|| bad(&format!("bad variable {tok:?}")))
        };
        let mut spec = ComponentSpec::default();
        for section in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, body) = section.split_once(':').ok_or_else(|| bad("expected 'zero:' or 'chain:'"))?;
            match key.trim() {
                "zero" => {
                    for tok in body.split(',').filter(|t| !t.trim().is_empty()) {
                        spec.zeros.push(var(tok)?);
                    }
                }
                "chain" => {
                    let mut vars = Vec::new();
                    let mut signs = Vec::new();
                    for tok in body.split('=') {
                        let t = tok.trim();
                        let (s, v) = match t.strip_prefix('-') {
                            Some(rest) => (-1, rest),
                            None => (1, t.strip_prefix('+').unwrap_or(t)),
                        };
                        vars.push(var(v)?);
                        signs.push(s);
                    }
                    spec.chains.push(Chain { vars, signs });
                }
                other => return Err(bad(&format!("unknown section {other:?}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DominanceError> {
        let mut seen = BTreeSet::new();
        for &z in &self.zeros {
            if !seen.insert(z) {
                return Err(DominanceError::Spec(format!("x{} listed twice", z + 1)));
            }
        }
        for c in &self.chains {
            if c.vars.len() < 2 || c.vars.len() != c.signs.len() {
                return Err(DominanceError::Spec("a chain needs at least two variables".into()));
            }
            for &v in &c.vars {
                if !seen.insert(v) {
                    return Err(DominanceError::Spec(format!("x{} listed twice", v + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn max_var(&self) -> Option<usize> {
        self.zeros.iter().chain(self.chains.iter().flat_map(|c| c.vars.iter())).copied().max()
    }

    /// Exact membership of a point.
    pub fn contains(&self, x: &[Q]) -> bool {
        self.zeros.iter().all(|&z| x[z].is_zero())
            && self.chains.iter().all(|c| {
                let v0 = &x[c.vars[0]] * q(c.signs[0] as i64);
                c.vars.iter().zip(&c.signs).all(|(&v, &s)| &x[v] * q(s as i64) == v0)
            })
    }
}

impl fmt::Display for ComponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.zeros.is_empty() {
            let z: Vec<String> = self.zeros.iter().map(|v| format!("x{}", v + 1)).collect();
            parts.push(format!("zero: {}", z.join(",")));
        }
        for c in &self.chains {
            let s: Vec<String> = c
                .vars
                .iter()
                .zip(&c.signs)
                .map(|(v, s)| format!("{}x{}", if *s < 0 { "-" } else { "" }, v + 1))
                .collect();
            parts.push(format!("chain: {}", s.join("=")));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Representative plus members with x̃_r = x_r − σ_r x_rep. `merged` groups were
/// built from zero-group variables, so their representative also tends to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub rep: usize,
    pub members: Vec<(usize, i8)>,
    pub merged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChangeOfVariables {
    pub nvars: usize,
    pub zeros: Vec<usize>,
    pub groups: Vec<Group>,
}

impl ChangeOfVariables {
    /// Coordinates that vanish on the component (ascending).
    pub fn block(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.zeros.clone();
        for g in &self.groups {
            if g.merged {
                b.push(g.rep);
            }
            b.extend(g.members.iter().map(|m| m.0));
        }
        b.sort();
        b
    }

    /// The integer matrix C with x̃ = C x.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let n = self.nvars;
        let mut c: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for g in &self.groups {
            for &(r, s) in &g.members {
                c[r][g.rep] = -(s as i64);
            }
        }
        c
    }

    /// x in terms of x̃ (x_r = x̃_r + σ x̃_rep): substituting gives p̃.
    pub fn to_new(&self) -> Vec<Polynomial> {
        self.images(1)
    }

    /// x̃ in terms of x (x̃_r = x_r − σ x_rep): maps p̃-side polynomials back.
    pub fn to_original(&self) -> Vec<Polynomial> {
        self.images(-1)
    }

    fn images(&self, dir: i64) -> Vec<Polynomial> {
        let n = self.nvars;
        let mut im: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
        for g in &self.groups {
            for &(r, s) in &g.members {
                im[r] = &im[r] + &Polynomial::var(n, g.rep).scale(&q(dir * s as i64));
            }
        }
        im
    }

    /// Group and sign of a non-representative member.
    fn member_of(&self, v: usize) -> Option<(&Group, i8)> {
        self.groups.iter().find_map(|g| g.members.iter().find(|m| m.0 == v).map(|m| (g, m.1)))
    }

    /// t-exponent of a block-indexed η for variable v (0 for free variables).
    fn exponent(&self, eta: &[i64], v: usize) -> i64 {
        match self.block().iter().position(|&b| b == v) {
            Some(k) => eta[k],
            None => 0,
        }
    }

    /// Condition n_rep ≤ n_r on merged groups (original chains have n_rep = 0).
    pub fn exp_cond(&self, eta: &[i64]) -> bool {
        self.groups.iter().filter(|g| g.merged).all(|g| {
            let nr = self.exponent(eta, g.rep);
            g.members.iter().all(|&(m, _)| nr <= self.exponent(eta, m))
        })
    }

    /// Rows like `x~2=x2-x1`.
    pub fn describe(&self) -> String {
        let o = self.to_original();
        (0..self.nvars).map(|i| format!("x~{}={}", i + 1, o[i])).collect::<Vec<_>>().join(", ")
    }
}

fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let mut out = Vec::new();
    for part in set_partitions(&items[1..]) {
        for i in 0..part.len() {
            let mut p = part.clone();
            p[i].insert(0, first);
            out.push(p);
        }
        let mut p = part.clone();
        p.insert(0, vec![first]);
        out.push(p);
    }
    out
}

/// All standard changes: zero-group partitions (blocks of size ≥ 2 become sign chains
/// with every sign pattern and representative) times representative choices of the
/// original chains; deduplicated by matrix.
pub fn enumerate_standard_changes(spec: &ComponentSpec, nvars: usize) -> Result<Vec<ChangeOfVariables>, DominanceError> {
    spec.validate()?;
    if spec.max_var().is_some_and(|m| m >= nvars) {
        return Err(DominanceError::Spec("component mentions a variable beyond nvars".into()));
    }
    if spec.zeros.len() > 8 {
        return Err(DominanceError::TooLarge("zero group larger than 8".into()));
    }
    // options per original chain
    let chain_opts: Vec<Vec<Group>> = spec
        .chains
        .iter()
        .map(|c| {
            (0..c.vars.len())
                .map(|ri| Group {
                    rep: c.vars[ri],
                    members: (0..c.vars.len())
                        .filter(|&k| k != ri)
                        .map(|k| (c.vars[k], c.signs[k] * c.signs[ri]))
                        .collect(),
                    merged: false,
                })
                .collect()
        })
        .collect();
    let mut zero_opts: Vec<(Vec<usize>, Vec<Group>)> = Vec::new();
    let mut zs = spec.zeros.clone();
    zs.sort();
    for part in set_partitions(&zs) {
        let mut acc: Vec<(Vec<usize>, Vec<Group>)> = vec![(vec![], vec![])];
        for blk in part {
            let mut next = Vec::new();
            if blk.len() == 1 {
                for (z, g) in &acc {
                    let mut z = z.clone();
                    z.push(blk[0]);
                    next.push((z, g.clone()));
                }
            } else {
                let m = blk.len();
                for ri in 0..m {
                    for mask in 0..(1u32 << (m - 1)) {
                        let mut members = Vec::new();
                        let mut bit = 0;
                        for (k, &v) in blk.iter().enumerate() {
                            if k == ri {
                                continue;
                            }
                            members.push((v, if mask >> bit & 1 == 1 { -1 } else { 1 }));
                            bit += 1;
                        }
                        for (z, g) in &acc {
                            let mut g = g.clone();
                            g.push(Group { rep: blk[ri], members: members.clone(), merged: true });
                            next.push((z.clone(), g));
                        }
                    }
                }
            }
            acc = next;
        }
        zero_opts.extend(acc);
    }
    let mut out: Vec<ChangeOfVariables> = Vec::new();
    let mut seen = BTreeSet::new();
    for (zeros, zgroups) in &zero_opts {
        let mut combos: Vec<Vec<Group>> = vec![zgroups.clone()];
        for opts in &chain_opts {
            let mut next = Vec::new();
            for c in &combos {
                for o in opts {
                    let mut c = c.clone();
                    c.push(o.clone());
                    next.push(c);
                }
            }
            combos = next;
        }
        for groups in combos {
            let mut z = zeros.clone();
            z.sort();
            let ch = ChangeOfVariables { nvars, zeros: z, groups };
            if seen.insert(ch.matrix()) {
                out.push(ch);
            }
        }
    }
    // unmerged zero groups first, so index 0 keeps the zero coordinates as they are
    out.sort_by_key(|c| c.groups.iter().filter(|g| g.merged).count());
    Ok(out)
}

/// A face Λ_j of the Newton polytope selected by nonnegative weights η.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceRegion {
    pub lambda: Vec<Vec<u32>>,
    /// Interior generator: sum of all rays of the closed cone; argmin is exactly Λ_j.
    pub generator: Vec<i64>,
    /// Extreme rays of the closure of S_Λj.
    pub rays: Vec<Vec<i64>>,
    pub facet: bool,
}

impl DominanceRegion {
    /// Interior generator plus rays whose argmin is exactly Λ_j.
    pub fn generators(&self, all: &[Vec<u32>]) -> Vec<Vec<i64>> {
        let mut g = vec![self.generator.clone()];
        for r in &self.rays {
            if argmin(all, r) == self.lambda && !g.contains(r) {
                g.push(r.clone());
            }
        }
        g
    }
}

fn dot(eta: &[i64], lambda: &[u32]) -> i64 {
    eta.iter().zip(lambda).map(|(a, b)| a * *b as i64).sum()
}

/// Exponents minimizing η·λ.
pub fn argmin(lambdas: &[Vec<u32>], eta: &[i64]) -> Vec<Vec<u32>> {
    let best = lambdas.iter().map(|l| dot(eta, l)).min();
    let mut v: Vec<Vec<u32>> = lambdas.iter().filter(|l| Some(dot(eta, l)) == best).cloned().collect();
    v.sort();
    v
}

fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in 0..cols {
                    let v = &m[r][k] * &f;
                    m[i][k] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Nullspace of a (k−1)×k system when it is one-dimensional, as a primitive integer vector.
fn null_ray(rows: &[Vec<Q>], k: usize) -> Option<Vec<i64>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..k {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() + 1 != k {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c))?;
    let mut v = vec![Q::zero(); k];
    v[free] = Q::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[row][free].clone();
    }
    let den = v.iter().fold(num_bigint::BigInt::one(), |a, x| a.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |a, x| a.gcd(x));
    ints.iter().map(|x| (x / &g).to_i64()).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Faces of the Newton polytope (w.r.t. `block`) selected by nonzero η ≥ 0.
pub fn dominance_regions(p: &Polynomial, block: &[usize]) -> Result<Vec<DominanceRegion>, DominanceError> {
    if block.is_empty() {
        return Err(DominanceError::EmptyBlock);
    }
    let parts = p.support_projection(block)?;
    let lambdas: Vec<Vec<u32>> = parts.keys().cloned().collect();
    regions_of(&lambdas, block.len())
}

pub fn regions_of(lambdas: &[Vec<u32>], k: usize) -> Result<Vec<DominanceRegion>, DominanceError> {
    if k == 0 {
        return Err(DominanceError::EmptyBlock);
    }
    if lambdas.is_empty() {
        return Ok(vec![]);
    }
    let mut cons: Vec<Vec<Q>> = Vec::new();
    let mut seen = BTreeSet::new();
    for a in 0..lambdas.len() {
        for b in a + 1..lambdas.len() {
            let d: Vec<i64> = (0..k).map(|i| lambdas[a][i] as i64 - lambdas[b][i] as i64).collect();
            let g = d.iter().fold(0i64, |acc, x| acc.gcd(x));
            let mut d: Vec<i64> = d.iter().map(|x| x / g).collect();
            if d.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
                d.iter_mut().for_each(|x| *x = -*x);
            }
            if seen.insert(d.clone()) {
                cons.push(d.into_iter().map(q).collect());
            }
        }
    }
    for i in 0..k {
        let mut e = vec![0i64; k];
        e[i] = 1;
        if seen.insert(e.clone()) {
            cons.push(e.into_iter().map(q).collect());
        }
    }
    let choose = k - 1;
    if binomial(cons.len(), choose) > 2e6 {
        return Err(DominanceError::TooLarge(format!("{} constraints in dimension {k}", cons.len())));
    }
    let mut rays: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut idx: Vec<usize> = (0..choose).collect();
    loop {
        let rows: Vec<Vec<Q>> = idx.iter().map(|&i| cons[i].clone()).collect();
        if let Some(r) = null_ray(&rows, k) {
            if r.iter().all(|x| *x >= 0) {
                rays.insert(r);
            } else if r.iter().all(|x| *x <= 0) {
                rays.insert(r.iter().map(|x| -x).collect());
            }
        }
        // next combination
        let mut i = choose;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if idx[i] < cons.len() - choose + i {
                idx[i] += 1;
                for j in i + 1..choose {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                idx.clear();
            }
        }
        if idx.is_empty() || choose == 0 {
            break;
        }
    }
    let ray_sets: Vec<(Vec<i64>, BTreeSet<Vec<u32>>)> =
        rays.iter().map(|r| (r.clone(), argmin(lambdas, r).into_iter().collect())).collect();
    let mut faces: BTreeSet<BTreeSet<Vec<u32>>> = ray_sets.iter().map(|(_, s)| s.clone()).collect();
    loop {
        let cur: Vec<BTreeSet<Vec<u32>>> = faces.iter().cloned().collect();
        let mut added = false;
        for a in 0..cur.len() {
            for b in a + 1..cur.len() {
                let i: BTreeSet<Vec<u32>> = cur[a].intersection(&cur[b]).cloned().collect();
                if !i.is_empty() && faces.insert(i) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let mut out = Vec::new();
    for face in faces {
        let members: Vec<&(Vec<i64>, BTreeSet<Vec<u32>>)> =
            ray_sets.iter().filter(|(_, s)| face.is_subset(s)).collect();
        let mut gen = vec![0i64; k];
        for (r, _) in &members {
            for i in 0..k {
                gen[i] += r[i];
            }
        }
        let lambda: Vec<Vec<u32>> = face.iter().cloned().collect();
        if argmin(lambdas, &gen) != lambda {
            continue;
        }
        let diffs: Vec<Vec<Q>> = lambda[1..]
            .iter()
            .map(|l| (0..k).map(|i| q(l[i] as i64 - lambda[0][i] as i64)).collect())
            .collect();
        let facet = k >= 2 && rank(&diffs) == k - 1 || k == 1 && false;
        out.push(DominanceRegion { lambda, generator: gen, rays: members.iter().map(|(r, _)| r.clone()).collect(), facet });
    }
    out.sort_by(|a, b| a.lambda.cmp(&b.lambda));
    Ok(out)
}

/// Checks the exponent condition on every generator of the region.
pub fn satisfies_exp_cond(region: &DominanceRegion, all: &[Vec<u32>], change: &ChangeOfVariables) -> Result<bool, DominanceError> {
    let gens = region.generators(all);
    let flags: Vec<bool> = gens.iter().map(|g| change.exp_cond(g)).collect();
    if flags.iter().all(|&f| f) {
        Ok(true)
    } else if flags.iter().all(|&f| !f) {
        Ok(false)
    } else {
        Err(DominanceError::MixedExpCond)
    }
}

/// p written in the changed variables.
pub fn transformed(p: &Polynomial, change: &ChangeOfVariables) -> Result<Polynomial, DominanceError> {
    Ok(p.substitute(&change.to_new())?)
}

/// Λ_j-slice of p̃ mapped back to the original variables.
pub fn dominant_term(p: &Polynomial, change: &ChangeOfVariables, lambda: &[Vec<u32>]) -> Result<Polynomial, DominanceError> {
    let pt = transformed(p, change)?;
    let block = change.block();
    if block.is_empty() {
        return Ok(p.clone());
    }
    let parts = pt.support_projection(&block)?;
    let keep: BTreeMap<Vec<u32>, Polynomial> =
        parts.into_iter().filter(|(l, _)| lambda.contains(l)).collect();
    let slice = Polynomial::reassemble(p.nvars(), &block, &keep);
    Ok(slice.substitute(&change.to_original())?)
}

/// One change of variables with its regions and dominant terms.
#[derive(Clone, Debug)]
pub struct ComponentAnalysis {
    pub change: ChangeOfVariables,
    pub block: Vec<usize>,
    pub lambdas: Vec<Vec<u32>>,
    pub regions: Vec<(DominanceRegion, Polynomial, bool)>,
}

/// Regions, dominant terms and exp-condition flags for every standard change.
pub fn analyze_component(p: &Polynomial, spec: &ComponentSpec) -> Result<Vec<ComponentAnalysis>, DominanceError> {
    let mut out = Vec::new();
    for change in enumerate_standard_changes(spec, p.nvars())? {
        let block = change.block();
        if block.is_empty() {
            continue;
        }
        let pt = transformed(p, &change)?;
        let lambdas: Vec<Vec<u32>> = pt.support_projection(&block)?.keys().cloned().collect();
        let mut regions = Vec::new();
        for r in regions_of(&lambdas, block.len())? {
            let dom = dominant_term(p, &change, &r.lambda)?;
            let ok = satisfies_exp_cond(&r, &lambdas, &change)?;
            regions.push((r, dom, ok));
        }
        out.push(ComponentAnalysis { change, block, lambdas, regions });
    }
    Ok(out)
}

/// Cone {η ≥ 0 : a·η ≥ 0 for every normal a}, tested on |x| through the power form
/// Π_{a>0}|x_i|^{a_i} ≤ Π_{a<0}|x_i|^{−a_i} plus |x_i| ≤ 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidenedCone {
    pub dim: usize,
    /// Integer normals.
    pub normals: Vec<Vec<i64>>,
}

impl WidenedCone {
    pub fn full(dim: usize) -> Self {
        WidenedCone { dim, normals: vec![] }
    }

    /// 2-D cone of slopes η2/η1 in [lo, hi], given as (num, den) pairs.
    pub fn from_slopes(lo: (i64, i64), hi: (i64, i64)) -> Self {
        WidenedCone { dim: 2, normals: vec![vec![-lo.0, lo.1], vec![hi.0, -hi.1]] }
    }

    pub fn contains_eta(&self, eta: &[i64]) -> bool {
        eta.iter().all(|&e| e >= 0) && self.normals.iter().all(|a| a.iter().zip(eta).map(|(x, y)| x * y).sum::<i64>() >= 0)
    }

    /// Exact log-free membership; zero coordinates are handled by evaluating the power
    /// inequality directly (0 ≤ 0 counts as inside).
    pub fn contains(&self, x: &[Q]) -> bool {
        if x.len() != self.dim || x.iter().any(|v| v.abs() > Q::one()) {
            return false;
        }
        self.normals.iter().all(|a| {
            let mut lhs = Q::one();
            let mut rhs = Q::one();
            for (i, &ai) in a.iter().enumerate() {
                let v = x[i].abs();
                if ai > 0 {
                    lhs *= crate::rational::pow_q(&v, ai as u32);
                } else if ai < 0 {
                    rhs *= crate::rational::pow_q(&v, (-ai) as u32);
                }
            }
            lhs <= rhs
        })
    }

    /// Polynomial guards for homogeneous inputs: block coordinates are measured
    /// relative to N² = Σ (other coordinates)². Guards compare
    /// Π x̃^{2a+}·(N²)^{D−} ≤ Π x̃^{2a−}·(N²)^{D+} and x̃_i² ≤ N².
    pub fn homogenized_guards(&self, change: &ChangeOfVariables) -> Vec<Guard> {
        let n = change.nvars;
        let block = change.block();
        let orig = change.to_original();
        let tilde: Vec<Polynomial> = block.iter().map(|&b| orig[b].clone()).collect();
        let rest: Vec<usize> = (0..n).filter(|i| !block.contains(i)).collect();
        let mut n2 = Polynomial::zero(n);
        for &r in &rest {
            n2 = &n2 + &Polynomial::var(n, r).pow(2);
        }
        let mut guards = Vec::new();
        for t in &tilde {
            guards.push(Guard { lhs: t.pow(2), cmp: Cmp::Le, rhs: n2.clone() });
        }
        for a in &self.normals {
            let mut lhs = Polynomial::one(n);
            let mut rhs = Polynomial::one(n);
            let (mut dp, mut dm) = (0u32, 0u32);
            for (i, &ai) in a.iter().enumerate() {
                if ai > 0 {
                    lhs = &lhs * &tilde[i].pow(2 * ai as u32);
                    dp += ai as u32;
                } else if ai < 0 {
                    rhs = &rhs * &tilde[i].pow(2 * (-ai) as u32);
                    dm += (-ai) as u32;
                }
            }
            lhs = &lhs * &n2.pow(dm);
            rhs = &rhs * &n2.pow(dp);
            guards.push(Guard { lhs, cmp: Cmp::Le, rhs });
        }
        guards
    }
}

/// Voronoi cells on the L1-normalized facet generators: cone j holds η closer to u_j
/// than to any other u_l.
pub fn widened_cones(facets: &[&DominanceRegion]) -> Vec<WidenedCone> {
    let norm: Vec<Vec<Q>> = facets
        .iter()
        .map(|r| {
            let s: i64 = r.generator.iter().sum();
            r.generator.iter().map(|&g| Q::new(g.into(), s.max(1).into())).collect()
        })
        .collect();
    let sq = |v: &[Q]| v.iter().map(|x| x * x).fold(Q::zero(), |a, b| a + b);
    let dim = facets.first().map(|r| r.generator.len()).unwrap_or(0);
    (0..facets.len())
        .map(|j| {
            let mut normals = Vec::new();
            for l in 0..facets.len() {
                if l == j || norm[l] == norm[j] {
                    continue;
                }
                let c = sq(&norm[l]) - sq(&norm[j]);
                let a: Vec<Q> = (0..dim).map(|i| &c - q(2) * (&norm[l][i] - &norm[j][i])).collect();
                let den = a.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let ints: Vec<i64> = a
                    .iter()
                    .map(|x| (x * Q::from_integer(den.clone())).to_integer().to_i64().unwrap_or(0))
                    .collect();
                let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x)).max(1);
                normals.push(ints.iter().map(|x| x / g).collect());
            }
            WidenedCone { dim, normals }
        })
        .collect()
}

/// Outcome of pruning with the bookkeeping of each action.
#[derive(Clone, Debug)]
pub struct PruneResult {
    pub dag: Dag,
    /// Lowest t-degree per original node (None: identically zero in t).
    pub degrees: BTreeMap<NodeId, Option<u32>>,
    /// (node, deleted input node)
    pub deletions: Vec<(NodeId, NodeId)>,
    /// (node, from variable, to variable), 0-based
    pub redirections: Vec<(NodeId, usize, usize)>,
}

type Expansion = BTreeMap<u32, Vec<Q>>;

fn add_exp(a: &Expansion, b: &Expansion, sb: i64) -> Expansion {
    let mut out = a.clone();
    for (d, v) in b {
        let e = out.entry(*d).or_insert_with(|| vec![Q::zero(); v.len()]);
        for (x, y) in e.iter_mut().zip(v) {
            *x += y * q(sb);
        }
    }
    out.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    out
}

fn scale_exp(a: &Expansion, s: i64) -> Expansion {
    a.iter().map(|(d, v)| (*d, v.iter().map(|x| x * q(s)).collect())).collect()
}

/// Pruning along the curve of the change of variables with integer weights η (indexed
/// like `change.block()`).
pub fn prune(d: &Dag, change: &ChangeOfVariables, eta: &[i64]) -> Result<PruneResult, DominanceError> {
    let n = d.nvars;
    let block = change.block();
    if eta.len() != block.len() || eta.iter().any(|&e| e < 0) {
        return Err(DominanceError::Spec("eta must be nonnegative and match the block".into()));
    }
    if !change.exp_cond(eta) {
        return Err(DominanceError::ExpCondFails);
    }
    let order = d.topo_order()?;
    let ex = |v: usize| change.exponent(eta, v) as u32;
    // t-expansion of each source variable: degree → linear form in the curve variables
    let source_exp = |v: usize| -> Expansion {
        let mut e = vec![Q::zero(); n];
        e[v] = Q::one();
        let mut m: Expansion = BTreeMap::from([(ex(v), e)]);
        if let Some((g, s)) = change.member_of(v) {
            let mut r = vec![Q::zero(); n];
            r[g.rep] = q(s as i64);
            m = add_exp(&m, &BTreeMap::from([(ex(g.rep), r)]), 1);
        }
        m
    };
    // redirect a source only when its lowest term is the representative term alone
    let redirect_target = |v: usize| -> Option<(usize, i8)> {
        let (g, s) = change.member_of(v)?;
        if ex(g.rep) < ex(v) {
            Some((g.rep, s))
        } else {
            None
        }
    };

    let mut nodes: Vec<Node> = Vec::new();
    let mut source_ids: HashMap<usize, NodeId> = HashMap::new();
    let mut deg: HashMap<NodeId, Option<u32>> = HashMap::new();
    let mut src_var: HashMap<NodeId, usize> = HashMap::new();
    // sources may follow their first use in topological order; a redirect can target any of them
    for nd in &d.nodes {
        if let Op::Source(v) = nd.op {
            source_ids.entry(v).or_insert(nd.id);
            src_var.insert(nd.id, v);
            deg.insert(nd.id, source_exp(v).keys().next().copied());
        }
    }
    let mut next_id = d.nodes.iter().map(|x| x.id).max().unwrap_or(0) + 1;
    let mut extra_sources: Vec<Node> = Vec::new();
    let mut resolve: HashMap<NodeId, Ref> = HashMap::new();
    let mut deletions = Vec::new();
    let mut redirections = Vec::new();

    for i in order {
        let nd = &d.nodes[i];
        match &nd.op {
            Op::Source(_) => {
                resolve.insert(nd.id, Ref::pos(nd.id));
                nodes.push(nd.clone());
                continue;
            }
            Op::BBox(_) => return Err(DominanceError::NonClassical(nd.id)),
            _ => {}
        }
        let ins: Vec<Ref> = nd.inputs.iter().map(|r| resolve[&r.node].with_sign(r.neg)).collect();
        let degs: Vec<Option<u32>> = ins.iter().map(|r| deg[&r.node]).collect();
        let is_src = |r: &Ref| src_var.contains_key(&r.node);
        let mut redirect = |r: Ref, nodes_ex: &mut Vec<Node>, next_id: &mut NodeId| -> Ref {
            let Some(&v) = src_var.get(&r.node) else { return r };
            let Some((rep, s)) = redirect_target(v) else { return r };
            let rid = *source_ids.entry(rep).or_insert_with(|| {
                let id = *next_id;
                *next_id += 1;
                nodes_ex.push(Node { id, op: Op::Source(rep), inputs: vec![] });
                id
            });
            redirections.push((nd.id, v, rep));
            Ref { node: rid, neg: r.neg ^ (s < 0) }
        };
        match nd.op {
            Op::Mul => {
                let a = redirect(ins[0], &mut extra_sources, &mut next_id);
                let b = redirect(ins[1], &mut extra_sources, &mut next_id);
                register_extra(&extra_sources, &mut src_var, &mut deg, &source_exp);
                let dd = match (deg[&a.node], deg[&b.node]) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                };
                deg.insert(nd.id, dd);
                resolve.insert(nd.id, Ref::pos(nd.id));
                nodes.push(Node { id: nd.id, op: Op::Mul, inputs: vec![a, b] });
            }
            Op::Add | Op::Sub => {
                let sb: i64 = if nd.op == Op::Sub { -1 } else { 1 };
                let lower_wins = match (degs[0], degs[1]) {
                    (Some(x), Some(y)) if x != y => Some(if x < y { 0 } else { 1 }),
                    (Some(_), None) => Some(0),
                    (None, Some(_)) => Some(1),
                    _ => None,
                };
                if let Some(keep) = lower_wins {
                    let drop = 1 - keep;
                    deletions.push((nd.id, nd.inputs[drop].node));
                    let mut r = ins[keep];
                    if keep == 1 && sb < 0 {
                        r = r.negated();
                    }
                    deg.insert(nd.id, deg[&r.node]);
                    resolve.insert(nd.id, r);
                    continue;
                }
                let (mut a, mut b) = (ins[0], ins[1]);
                if is_src(&a) && is_src(&b) {
                    let sa = if a.neg { -1 } else { 1 };
                    let sbb = if b.neg { -sb } else { sb };
                    let ea = scale_exp(&source_exp(src_var[&a.node]), sa);
                    let eb = scale_exp(&source_exp(src_var[&b.node]), sbb);
                    let la = *ea.keys().next().unwrap();
                    let lb = *eb.keys().next().unwrap();
                    let mut low = ea[&la].clone();
                    for (x, y) in low.iter_mut().zip(&eb[&lb]) {
                        *x += y;
                    }
                    let cancels = low.iter().all(|x| x.is_zero());
                    if cancels {
                        let second = |e: &Expansion| e.keys().nth(1).copied();
                        match (second(&ea), second(&eb)) {
                            (Some(x), Some(y)) if x != y => {
                                if x < y {
                                    b = redirect(b, &mut extra_sources, &mut next_id);
                                } else {
                                    a = redirect(a, &mut extra_sources, &mut next_id);
                                }
                            }
                            _ => {}
                        }
                    } else {
                        a = redirect(a, &mut extra_sources, &mut next_id);
                        b = redirect(b, &mut extra_sources, &mut next_id);
                    }
                    register_extra(&extra_sources, &mut src_var, &mut deg, &source_exp);
                    let sa = if a.neg { -1 } else { 1 };
                    let sbb = if b.neg { -sb } else { sb };
                    let comb = add_exp(
                        &scale_exp(&source_exp(src_var[&a.node]), sa),
                        &source_exp(src_var[&b.node]),
                        sbb,
                    );
                    deg.insert(nd.id, comb.keys().next().copied());
                } else {
                    a = redirect(a, &mut extra_sources, &mut next_id);
                    b = redirect(b, &mut extra_sources, &mut next_id);
                    register_extra(&extra_sources, &mut src_var, &mut deg, &source_exp);
                    deg.insert(nd.id, degs[0]);
                }
                resolve.insert(nd.id, Ref::pos(nd.id));
                nodes.push(Node { id: nd.id, op: nd.op.clone(), inputs: vec![a, b] });
            }
            _ => unreachable!(),
        }
    }
    nodes.extend(extra_sources);
    let output = resolve[&d.output.node].with_sign(d.output.neg);
    let mut out = Dag { name: format!("{}_pruned", d.name), nvars: n, nodes, output, ops: BTreeMap::new() };
    out.remove_unreachable();
    let degrees = d.nodes.iter().map(|nd| (nd.id, deg.get(&nd.id).copied().flatten())).collect();
    Ok(PruneResult { dag: out, degrees, deletions, redirections })
}

fn register_extra(
    extra: &[Node],
    src_var: &mut HashMap<NodeId, usize>,
    deg: &mut HashMap<NodeId, Option<u32>>,
    source_exp: &dyn Fn(usize) -> Expansion,
) {
    for e in extra {
        if let Op::Source(v) = e.op {
            src_var.entry(e.id).or_insert(v);
            deg.entry(e.id).or_insert_with(|| source_exp(v).keys().next().copied());
        }
    }
}

/// Pruning after checking that η selects the region on p̃ and the exponent condition.
pub fn prune_checked(
    d: &Dag,
    change: &ChangeOfVariables,
    region: &DominanceRegion,
    eta: &[i64],
) -> Result<PruneResult, DominanceError> {
    let p = d.extract_polynomial()?;
    let pt = transformed(&p, change)?;
    let lambdas: Vec<Vec<u32>> = pt.support_projection(&change.block())?.keys().cloned().collect();
    let sel = argmin(&lambdas, eta);
    if sel != region.lambda {
        return Err(DominanceError::EtaNotInRegion(format!("{eta:?} selects {sel:?}")));
    }
    if !satisfies_exp_cond(region, &lambdas, change)? {
        return Err(DominanceError::ExpCondFails);
    }
    prune(d, change, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    #[test]
    fn parses_component_text() {
        let s = ComponentSpec::parse("zero: x1,x2; chain: x3=-x4=x5").unwrap();
        assert_eq!(s.zeros, vec![0, 1]);
        assert_eq!(s.chains[0].vars, vec![2, 3, 4]);
        assert_eq!(s.chains[0].signs, vec![1, -1, 1]);
        assert_eq!(s.to_string(), "zero: x1,x2; chain: x3=-x4=x5");
        assert!(ComponentSpec::parse("zero: x1; chain: x1=x2").is_err());
        assert!(ComponentSpec::parse("chain: x1").is_err());
    }

    #[test]
    fn small_enumerations() {
        let one = ComponentSpec::parse("zero: x1").unwrap();
        assert_eq!(enumerate_standard_changes(&one, 2).unwrap().len(), 1);
        let chain = ComponentSpec::parse("chain: x1=x2").unwrap();
        assert_eq!(enumerate_standard_changes(&chain, 2).unwrap().len(), 2);
    }

    #[test]
    fn sum_of_squares_regions() {
        let p = parse_polynomial("x1^2 + x2^2", 2).unwrap();
        let r = dominance_regions(&p, &[0, 1]).unwrap();
        let facets: Vec<&DominanceRegion> = r.iter().filter(|x| x.facet).collect();
        assert_eq!(facets.len(), 1);
        assert_eq!(facets[0].lambda, vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(facets[0].generator, vec![1, 1]);
    }

    #[test]
    fn monomial_has_one_region() {
        let p = parse_polynomial("x1^3*x2", 2).unwrap();
        let r = dominance_regions(&p, &[0, 1]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].lambda, vec![vec![3, 1]]);
        assert!(!r[0].facet);
    }

    #[test]
    fn slope_cone_membership() {
        let c = WidenedCone::from_slopes((1, 2), (2, 3));
        assert!(c.contains(&[Q::new(1.into(), 8.into()), Q::new(1.into(), 4.into())]));
        assert!(!c.contains(&[Q::new(1.into(), 1024.into()), Q::new(1.into(), 2.into())]));
        assert!(WidenedCone::full(2).contains(&[Q::new(1.into(), 2.into()), Q::new(1.into(), 2.into())]));
    }

    #[test]
    fn exp_cond_cases() {
        // merged group x1 (rep) = x2 from zeros
        let ch = ChangeOfVariables {
            nvars: 2,
            zeros: vec![],
            groups: vec![Group { rep: 0, members: vec![(1, 1)], merged: true }],
        };
        assert!(!ch.exp_cond(&[2, 1]));
        assert!(ch.exp_cond(&[1, 2]));
        assert!(ch.exp_cond(&[0, 0]));
    }

    #[test]
    fn prune_deletes_small_input() {
        let d = Dag::parse("dag d nvars=2\nnode 1 source x1\nnode 2 source x2\nnode 3 add 1 2\nnode 4 mul 3 2\nout 4\n").unwrap();
        let ch = enumerate_standard_changes(&ComponentSpec::parse("zero: x1").unwrap(), 2).unwrap().remove(0);
        let r = prune(&d, &ch, &[1]).unwrap();
        assert_eq!(r.deletions, vec![(3, 1)]);
        assert_eq!(r.dag.extract_polynomial().unwrap(), parse_polynomial("x2^2", 2).unwrap());
    }
}
