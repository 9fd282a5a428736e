use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::PolyError;
use crate::rational::{fmt_q, Q};

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then x1's exponent, then x2's, ...
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimal ring interface used for generic evaluation (rationals, floats, polynomials).
pub trait Arith: Clone {
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
}

impl Arith for Q {
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
}

impl Arith for f64 {
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
}

impl Arith for Polynomial {
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    /// The variable x_{i+1} (0-based index `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), Q::one());
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: Q) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Q)>>(nvars: usize, it: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Linear form Σ coeffs[i]·x_{i+1}.
    pub fn linear(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Q {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// Total degree if every monomial has the same degree.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>, PolyError> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let first = it.next().ok_or(PolyError::ZeroPolynomial)?;
        Ok(if it.all(|d| d == first) { Some(first) } else { None })
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), f(c));
        }
        p
    }

    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Splits into (content, primitive) with an integer primitive part whose
    /// coefficients are coprime and whose leading coefficient is positive.
    pub fn content_primitive(&self) -> (Q, Polynomial) {
        if self.is_zero() {
            return (Q::zero(), self.clone());
        }
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c * Q::from_integer(den.clone())).to_integer()));
        let mut content = Q::new(num, den);
        if self.leading_term().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Exact value at a rational point.
    pub fn eval(&self, x: &[Q]) -> Result<Q, PolyError> {
        self.check_dim(x.len())?;
        Ok(self.eval_with(x, &|c: &Q| c.clone()))
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64, PolyError> {
        self.check_dim(x.len())?;
        Ok(self.eval_with(x, &crate::rational::to_f64))
    }

    fn check_dim(&self, got: usize) -> Result<(), PolyError> {
        if got != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got });
        }
        Ok(())
    }

    /// Evaluates with values of any ring type; `konst` lifts coefficients.
    pub fn eval_with<T: Arith>(&self, x: &[T], konst: &dyn Fn(&Q) -> T) -> T {
        let zero = konst(&Q::zero());
        let mut powers: Vec<Vec<T>> = x.iter().map(|v| vec![v.clone()]).collect();
        let mut acc = zero;
        for (m, c) in &self.terms {
            let mut term = konst(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() < e as usize {
                    let next = powers[i].last().unwrap().times(&x[i]);
                    powers[i].push(next);
                }
                term = term.times(&powers[i][e as usize - 1]);
            }
            acc = acc.plus(&term);
        }
        acc
    }

    /// Exact division: returns r with self = q·r, or None when q does not divide self.
    pub fn try_divide_exact(&self, q: &Polynomial) -> Option<Polynomial> {
        assert!(!q.is_zero(), "division by the zero polynomial");
        if self.nvars != q.nvars {
            return None;
        }
        let (lm, lc) = q.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&m) {
                return None;
            }
            let tm = m.div(&lm);
            let tc = c / &lc;
            let t = Polynomial { nvars: self.nvars, terms: BTreeMap::from([(tm, tc)]) };
            rem = &rem - &(&t * q);
            quot = &quot + &t;
        }
        debug_assert_eq!(&(&quot * q), self);
        if &(&quot * q) != self {
            return None;
        }
        Some(quot)
    }

    /// Replaces x_i by images[i]; all images share one target variable count.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial, PolyError> {
        self.check_dim(images.len())?;
        let target = match images.first() {
            Some(p) => p.nvars,
            None => 0,
        };
        if let Some(bad) = images.iter().find(|p| p.nvars != target) {
            return Err(PolyError::DimensionMismatch { expected: target, got: bad.nvars });
        }
        Ok(self.eval_with(images, &|c: &Q| Polynomial::constant(target, c.clone())))
    }

    /// Same polynomial viewed in `n ≥ nvars` variables (new ones appended).
    pub fn extend(&self, n: usize) -> Polynomial {
        assert!(n >= self.nvars);
        Polynomial {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(n, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Drops trailing variables that do not occur.
    pub fn truncate_vars(&self, n: usize) -> Result<Polynomial, PolyError> {
        if self.terms.keys().any(|m| m.0[n..].iter().any(|&e| e > 0)) {
            return Err(PolyError::Invalid("truncated variables occur in polynomial".into()));
        }
        Ok(Polynomial {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial(m.0[..n].to_vec()), c.clone()))
                .collect(),
        })
    }

    /// Groups terms by their exponents on `block`: p = Σ_λ x_block^λ · q_λ,
    /// with q_λ free of block variables (coefficients folded into q_λ).
    pub fn support_projection(&self, block: &[usize]) -> Result<BTreeMap<Vec<u32>, Polynomial>, PolyError> {
        if block.is_empty() {
            return Err(PolyError::Invalid("empty block".into()));
        }
        for &b in block {
            if b >= self.nvars {
                return Err(PolyError::VarOutOfRange { index: b + 1, nvars: self.nvars });
            }
        }
        let mut out: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let lambda: Vec<u32> = block.iter().map(|&b| m.0[b]).collect();
            let mut rest = m.0.clone();
            for &b in block {
                rest[b] = 0;
            }
            out.entry(lambda)
                .or_insert_with(|| Polynomial::zero(self.nvars))
                .add_term(Monomial(rest), c.clone());
        }
        Ok(out)
    }

    /// Inverse of `support_projection`.
    pub fn reassemble(nvars: usize, block: &[usize], parts: &BTreeMap<Vec<u32>, Polynomial>) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        for (lambda, q) in parts {
            let mut e = vec![0; nvars];
            for (k, &b) in block.iter().enumerate() {
                e[b] = lambda[k];
            }
            let mono = Polynomial::monomial(nvars, e, Q::one());
            p = &p + &(&mono * q);
        }
        p
    }

    /// Variables (0-based) that occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    /// Renders with explicit variable names.
    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            out.push_str(match (k, neg) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            });
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            if !mag.is_one() || factors.is_empty() {
                factors.insert(0, fmt_q(&mag));
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    pub fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&Self::default_names(self.nvars)))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), -c.clone());
        }
        p
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut p = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.add_term(m1.mul(m2), c1 * c2);
            }
        }
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, o: Polynomial) -> Polynomial {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
