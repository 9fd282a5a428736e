//! Symbolic structured determinants: Toeplitz, (generalized) Vandermonde, Schur
//! functions and polynomial-Vandermonde minors.

use num_traits::{One, Zero};

use crate::decide::{real_nonevaluability_witness, Certificate, Status, Verdict};
use crate::error::LinalgError;
use crate::poly::Polynomial;
use crate::rational::{q, Q};

/// Determinant by fraction-free (Bareiss) elimination with exact polynomial division.
pub fn det(m: &[Vec<Polynomial>], nvars: usize) -> Result<Polynomial, LinalgError> {
    let n = m.len();
    if n == 0 {
        return Ok(Polynomial::one(nvars));
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(LinalgError::OutOfRange("matrix is not square".into()));
    }
    let mut a: Vec<Vec<Polynomial>> = m.to_vec();
    let mut sign = false;
    let mut prev = Polynomial::one(nvars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(Polynomial::zero(nvars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.try_divide_exact(&prev).ok_or(LinalgError::DivisionFailed)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign { -d } else { d })
}

/// Index of x_k (k in 1−n..=n−1) among x1..x_{2n−1}.
pub fn toeplitz_var(n: usize, k: i64) -> usize {
    (k + n as i64 - 1) as usize
}

/// det T with T(i, j) = x_{j−i}; variable x_k is stored at index k + n − 1.
pub fn toeplitz_det(n: usize) -> Result<Polynomial, LinalgError> {
    if !(2..=6).contains(&n) {
        return Err(LinalgError::OutOfRange(format!("n = {n} outside 2..=6")));
    }
    let nv = 2 * n - 1;
    let m: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| (0..n).map(|j| Polynomial::var(nv, toeplitz_var(n, j as i64 - i as i64))).collect())
        .collect();
    det(&m, nv)
}

/// Monomial facts of det T: x_0^n, ±x_j^{n−j}·x_{j−n}^j for 1 ≤ j ≤ n−1, and
/// degree exactly 1 in each of x_{n−1}, x_{1−n}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzCertificate {
    pub n: usize,
    pub x0_power: bool,
    /// (j, coefficient of x_j^{n−j}·x_{j−n}^j)
    pub cross_terms: Vec<(usize, Q)>,
    pub affine_last: bool,
    pub affine_first: bool,
}

impl ToeplitzCertificate {
    pub fn holds(&self) -> bool {
        self.x0_power
            && self.affine_last
            && self.affine_first
            && self.cross_terms.iter().all(|(_, c)| *c == q(1) || *c == q(-1))
    }
}

pub fn toeplitz_certificate(n: usize, det: &Polynomial) -> ToeplitzCertificate {
    let nv = 2 * n - 1;
    let mut e = vec![0u32; nv];
    e[toeplitz_var(n, 0)] = n as u32;
    let x0_power = !det.coeff(&e).is_zero();
    let cross_terms = (1..n)
        .map(|j| {
            let mut e = vec![0u32; nv];
            e[toeplitz_var(n, j as i64)] += (n - j) as u32;
            e[toeplitz_var(n, j as i64 - n as i64)] += j as u32;
            (j, det.coeff(&e))
        })
        .collect();
    ToeplitzCertificate {
        n,
        x0_power,
        cross_terms,
        affine_last: det.degree_in(toeplitz_var(n, n as i64 - 1)) == 1,
        affine_first: det.degree_in(toeplitz_var(n, 1 - n as i64)) == 1,
    }
}

/// Weakly decreasing parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, LinalgError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(LinalgError::OutOfRange("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition(parts))
    }

    /// From `2,1,0` (order-insensitive: parts are sorted decreasingly).
    pub fn parse(text: &str) -> Result<Self, LinalgError> {
        let mut v: Vec<u32> = text
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<u32>().map_err(|_| LinalgError::OutOfRange(format!("bad part {t:?}"))))
            .collect::<Result<_, _>>()?;
        v.sort_by(|a, b| b.cmp(a));
        Ok(Partition(v))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Nonzero length.
    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&p| p > 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// λ_k for k ≥ 1 (0 past the end).
    pub fn part(&self, k: usize) -> u32 {
        self.0.get(k - 1).copied().unwrap_or(0)
    }

    /// All partitions of `size` with at most `max_len` nonzero parts.
    pub fn all(size: u32, max_len: usize) -> Vec<Partition> {
        fn rec(rem: u32, max_part: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            if left == 0 {
                return;
            }
            for p in (1..=rem.min(max_part)).rev() {
                cur.push(p);
                rec(rem - p, p, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(size, size, max_len, &mut Vec::new(), &mut out);
        out
    }
}

fn check_schur_args(lambda: &Partition, n: usize) -> Result<(), LinalgError> {
    if n == 0 || n > 6 || lambda.len() > n || lambda.size() > 8 {
        return Err(LinalgError::OutOfRange(format!("need len(λ) ≤ n ≤ 6 and |λ| ≤ 8 (n = {n}, λ = {:?})", lambda.0)));
    }
    Ok(())
}

/// Vandermonde determinant det[x_i^{j−1}] = Π_{i<j}(x_j − x_i).
pub fn vandermonde_det(n: usize) -> Polynomial {
    let mut p = Polynomial::one(n);
    for i in 0..n {
        for j in i + 1..n {
            p = &p * &(&Polynomial::var(n, j) - &Polynomial::var(n, i));
        }
    }
    p
}

/// Generalized Vandermonde matrix [x_i^{j−1+μ_j}] where μ is λ read in increasing order.
pub fn generalized_vandermonde(lambda: &Partition, n: usize) -> Vec<Vec<Polynomial>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mu = lambda.part(n - j);
                    let mut e = vec![0u32; n];
                    e[i] = j as u32 + mu;
                    Polynomial::monomial(n, e, Q::one())
                })
                .collect()
        })
        .collect()
}

/// s_λ(x1..xn) = det(generalized Vandermonde) / det(Vandermonde), by exact division.
pub fn schur_function(lambda: &Partition, n: usize) -> Result<Polynomial, LinalgError> {
    check_schur_args(lambda, n)?;
    let num = det(&generalized_vandermonde(lambda, n), n)?;
    num.try_divide_exact(&vandermonde_det(n)).ok_or(LinalgError::DivisionFailed)
}

/// Complete homogeneous symmetric polynomial h_k in n variables.
pub fn complete_homogeneous(k: i64, n: usize) -> Polynomial {
    if k < 0 {
        return Polynomial::zero(n);
    }
    let mut out = Polynomial::zero(n);
    let mut e = vec![0u32; n];
    fn rec(i: usize, rem: u32, e: &mut Vec<u32>, out: &mut Polynomial, n: usize) {
        if i == n - 1 {
            e[i] = rem;
            *out = &*out + &Polynomial::monomial(n, e.clone(), Q::one());
            return;
        }
        for v in 0..=rem {
            e[i] = v;
            rec(i + 1, rem - v, e, out, n);
        }
        e[i] = 0;
    }
    rec(0, k as u32, &mut e, &mut out, n);
    out
}

/// Jacobi–Trudi: s_λ = det[h_{λ_i − i + j}].
pub fn jacobi_trudi(lambda: &Partition, n: usize) -> Result<Polynomial, LinalgError> {
    let l = lambda.len().max(1);
    let m: Vec<Vec<Polynomial>> = (1..=l)
        .map(|i| (1..=l).map(|j| complete_homogeneous(lambda.part(i) as i64 - i as i64 + j as i64, n)).collect())
        .collect();
    det(&m, n)
}

/// Outcome of an identity check; `residual` is lhs − rhs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    pub residual: Polynomial,
}

/// det(generalized Vandermonde) = s_λ · Π_{i<j}(x_j − x_i) with s_λ from Jacobi–Trudi.
pub fn generalized_vandermonde_check(lambda: &Partition, n: usize) -> Result<IdentityCheck, LinalgError> {
    check_schur_args(lambda, n)?;
    let lhs = det(&generalized_vandermonde(lambda, n), n)?;
    let rhs = &jacobi_trudi(lambda, n)? * &vandermonde_det(n);
    let residual = &lhs - &rhs;
    Ok(IdentityCheck { holds: residual.is_zero(), residual })
}

/// Polynomial Vandermonde V_P(r, j) = P_{j−1}(x_r) = Σ_{k ≤ j} C(k, j)·x_r^{k−1} (1-based C).
pub fn poly_vandermonde(c: &[Vec<Q>], n: usize) -> Vec<Vec<Polynomial>> {
    (0..n)
        .map(|r| {
            (0..n)
                .map(|j| {
                    let mut p = Polynomial::zero(n);
                    for k in 0..=j {
                        let mut e = vec![0u32; n];
                        e[r] = k as u32;
                        p = &p + &Polynomial::monomial(n, e, c[k][j].clone());
                    }
                    p
                })
                .collect()
        })
        .collect()
}

/// Result of the (i, n−1) minor identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorCheck {
    pub holds: bool,
    pub e: Q,
    pub f: Q,
    pub det: Polynomial,
    pub residual: Polynomial,
}

/// E = C(n−1,n)·Π_{m=1}^{n−2} c_{m−1} and F = c_{n−1}·Π_{m=1}^{n−2} c_{m−1}
/// (written without dividing by C(n−1,n), so C(n−1,n) = 0 is allowed).
pub fn minor_constants(c: &[Vec<Q>], n: usize) -> (Q, Q) {
    let prod = (0..n - 2).fold(Q::one(), |acc, m| acc * &c[m][m]);
    (&c[n - 2][n - 1] * &prod, &c[n - 1][n - 1] * &prod)
}

/// Bracket E + F·s_[1] times Π_{k<j; k,j≠i}(x_j − x_k), in x1..xn (x_i absent).
pub fn minor_formula(n: usize, i: usize, e: &Q, f: &Q) -> Polynomial {
    let others: Vec<usize> = (0..n).filter(|&k| k != i - 1).collect();
    let mut s1 = Polynomial::zero(n);
    for &k in &others {
        s1 = &s1 + &Polynomial::var(n, k);
    }
    let mut p = &Polynomial::constant(n, e.clone()) + &s1.scale(f);
    for (a, &k) in others.iter().enumerate() {
        for &j in &others[a + 1..] {
            p = &p * &(&Polynomial::var(n, j) - &Polynomial::var(n, k));
        }
    }
    p
}

/// det(M_{P,i}) (rows ≠ i, columns 1..n−2 and n of V·C) against the bracket formula.
pub fn poly_vandermonde_minor_check(c: &[Vec<Q>], n: usize, i: usize) -> Result<MinorCheck, LinalgError> {
    if !(3..=5).contains(&n) {
        return Err(LinalgError::OutOfRange(format!("n = {n} outside 3..=5")));
    }
    if !(1..=n).contains(&i) {
        return Err(LinalgError::OutOfRange(format!("row {i} outside 1..={n}")));
    }
    if c.len() != n || c.iter().any(|r| r.len() != n) {
        return Err(LinalgError::OutOfRange("C must be n×n".into()));
    }
    for r in 0..n {
        for col in 0..r {
            if !c[r][col].is_zero() {
                return Err(LinalgError::OutOfRange("C must be upper triangular".into()));
            }
        }
        if c[r][r].is_zero() {
            return Err(LinalgError::SingularDiagonal(r + 1));
        }
    }
    let vp = poly_vandermonde(c, n);
    let cols: Vec<usize> = (0..n - 2).chain(std::iter::once(n - 1)).collect();
    let m: Vec<Vec<Polynomial>> =
        (0..n).filter(|&r| r != i - 1).map(|r| cols.iter().map(|&j| vp[r][j].clone()).collect()).collect();
    let d = det(&m, n)?;
    let (e, f) = minor_constants(c, n);
    let residual = &d - &minor_formula(n, i, &e, &f);
    Ok(MinorCheck { holds: residual.is_zero(), e, f, det: d, residual })
}

pub fn identity_c(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

/// Parses a matrix file: one row per line, entries separated by whitespace or commas.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Q>>, LinalgError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| crate::rational::parse_q(t).map_err(LinalgError::Poly))
                .collect()
        })
        .collect()
}

/// Verdict for the (n, n−1) minor with E = F = 1 (or the given constants) as a
/// polynomial in the n−1 remaining variables.
pub fn minor_evaluability_verdict_with(n: usize, e: &Q, f: &Q) -> Verdict {
    let unknown = |r: &str| Verdict { status: Status::Unknown, certificate: Certificate::Reason(r.to_string()) };
    if n < 4 {
        return unknown("non-evaluability of this minor is only established for n >= 4");
    }
    if f.is_zero() {
        return unknown("bracket is constant; the variety is a union of x_j = x_k hyperplanes");
    }
    let m = n - 1;
    // drop x_n: the minor lives on x1..x_{n−1}
    let full = minor_formula(n, n, e, f);
    let p = match full.truncate_vars(m) {
        Ok(p) => p,
        Err(err) => return unknown(&err.to_string()),
    };
    // distinct magnitudes 1, 2, …, m−1 and a last coordinate zeroing the bracket
    let mut pt: Vec<Q> = (1..m as i64).map(q).collect();
    let partial: Q = pt.iter().fold(Q::zero(), |a, b| a + b);
    pt.push(-(e / f) - partial);
    match real_nonevaluability_witness(&p, &[pt]) {
        Some(w) => Verdict { status: Status::NotEvaluable, certificate: Certificate::Witness(w) },
        None => unknown("constructed bracket zero is not in general position"),
    }
}

pub fn minor_evaluability_verdict(n: usize) -> Verdict {
    minor_evaluability_verdict_with(n, &Q::one(), &Q::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    #[test]
    fn toeplitz_two() {
        // x_{-1}, x_0, x_1 at indices 0, 1, 2
        let d = toeplitz_det(2).unwrap();
        assert_eq!(d, parse_polynomial("x2^2 - x3*x1", 3).unwrap());
        assert!(toeplitz_certificate(2, &d).holds());
        assert!(toeplitz_det(7).is_err());
    }

    #[test]
    fn schur_small() {
        let s = schur_function(&Partition::new(vec![1]).unwrap(), 2).unwrap();
        assert_eq!(s, parse_polynomial("x1 + x2", 2).unwrap());
        let s0 = schur_function(&Partition::new(vec![]).unwrap(), 3).unwrap();
        assert_eq!(s0, Polynomial::one(3));
        assert!(Partition::new(vec![1, 2]).is_err());
    }

    #[test]
    fn gvander_two() {
        let l = Partition::new(vec![1, 0]).unwrap();
        let m = generalized_vandermonde(&l, 2);
        assert_eq!(det(&m, 2).unwrap(), parse_polynomial("x2^2 - x1^2", 2).unwrap());
        assert!(generalized_vandermonde_check(&l, 2).unwrap().holds);
    }

    #[test]
    fn minor_identity_basis() {
        let r = poly_vandermonde_minor_check(&identity_c(3), 3, 3).unwrap();
        assert!(r.holds);
        assert_eq!((r.e.clone(), r.f.clone()), (Q::zero(), Q::one()));
        assert_eq!(r.det, parse_polynomial("(x2 - x1)*(x1 + x2)", 3).unwrap());
    }

    #[test]
    fn minor_verdicts() {
        assert_eq!(minor_evaluability_verdict(4).status, Status::NotEvaluable);
        assert_eq!(minor_evaluability_verdict(3).status, Status::Unknown);
        assert_eq!(minor_evaluability_verdict_with(4, &Q::one(), &Q::zero()).status, Status::Unknown);
    }
}
