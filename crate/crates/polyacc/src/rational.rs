use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow_q(base: &Q, e: u32) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

pub fn to_f64(x: &Q) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator/denominator: scale down both before dividing.
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Nearest multiple of 2^-bits.
pub fn from_f64_grid(v: f64, bits: u32) -> Q {
    let scale = (1u64 << bits) as f64;
    let k = (v * scale).round();
    Q::new(
        BigInt::from(k as i64),
        BigInt::from(1u64 << bits),
    )
}

/// Exact value of a finite binary64.
pub fn from_f64_exact(v: f64) -> Option<Q> {
    Q::from_float(v)
}

/// Parses `-3`, `3/4`, `0.125`, `1e-8`, `2.5E3`.
pub fn parse_q(text: &str) -> Result<Q, PolyError> {
    let s = text.trim();
    let bad = || PolyError::Syntax {
        pos: 0,
        msg: format!("not a rational number: {text:?}"),
    };
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| bad())?;
        let d: BigInt = b.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(PolyError::Syntax {
                pos: 0,
                msg: "zero denominator".into(),
            });
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        Q::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn lcm_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

/// All rational roots of a univariate polynomial given by coefficients (constant first).
/// Candidates come from the rational root theorem; gives up (returns None) when the
/// extreme integer coefficients are too large to factor by trial division.
pub fn rational_roots(coeffs: &[Q]) -> Option<Vec<Q>> {
    let mut c: Vec<Q> = coeffs.to_vec();
    while c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Some(Vec::new());
    }
    let mut roots = Vec::new();
    // strip zero roots
    let lead_zero = c.iter().take_while(|v| v.is_zero()).count();
    if lead_zero > 0 {
        roots.push(Q::zero());
        c.drain(..lead_zero);
    }
    if c.len() <= 1 {
        return Some(roots);
    }
    let den = c.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = c.iter().map(|v| (v * Q::from_integer(den.clone())).to_integer()).collect();
    let a0 = ints[0].abs();
    let an = ints[ints.len() - 1].abs();
    let limit = BigInt::from(1_000_000_000_000i64);
    if a0 > limit || an > limit {
        return None;
    }
    let divisors = |m: &BigInt| -> Vec<BigInt> {
        let m = m.to_u64().unwrap_or(1);
        let mut out = Vec::new();
        let mut d = 1u64;
        while d * d <= m {
            if m.is_multiple_of(d) {
                out.push(BigInt::from(d));
                if d != m / d {
                    out.push(BigInt::from(m / d));
                }
            }
            d += 1;
        }
        out
    };
    let ps = divisors(&a0);
    let qs = divisors(&an);
    let mut cands: Vec<Q> = Vec::new();
    for p in &ps {
        for qd in &qs {
            let r = Q::new(p.clone(), qd.clone());
            cands.push(r.clone());
            cands.push(-r);
        }
    }
    cands.sort();
    cands.dedup();
    for r in cands {
        let mut acc = Q::zero();
        for v in c.iter().rev() {
            acc = acc * &r + v;
        }
        if acc.is_zero() {
            roots.push(r);
        }
    }
    roots.sort();
    Some(roots)
}
