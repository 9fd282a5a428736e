use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyacc::decide::Status;
use polyacc::linalg::*;
use polyacc::rational::q;
use polyacc::{parse_polynomial, Polynomial, Q};

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for k in 0..n {
            if !prefix.contains(&k) {
                prefix.push(k);
                go(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut all = Vec::new();
    go(&mut Vec::new(), n, &mut all);
    all.into_iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (p, if inversions % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

fn leibniz(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    let mut acc = Polynomial::zero(nvars);
    for (p, sign) in permutations(m.len()) {
        let mut term = Polynomial::constant(nvars, q(sign));
        for (r, &c) in p.iter().enumerate() {
            term = &term * &m[r][c];
        }
        acc = &acc + &term;
    }
    acc
}

#[test]
fn det_matches_permutation_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let n = rng.gen_range(1..=4);
        let nv = 3;
        let m: Vec<Vec<Polynomial>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let mut p = Polynomial::constant(nv, q(rng.gen_range(-3..=3)));
                        for v in 0..nv {
                            if rng.gen_bool(0.4) {
                                p = &p + &Polynomial::var(nv, v).scale(&q(rng.gen_range(-2..=2)));
                            }
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        assert_eq!(det(&m, nv).unwrap(), leibniz(&m, nv));
    }
}

#[test]
fn toeplitz_n2_golden() {
    // x_{-1}, x_0, x_1 live at indices 0, 1, 2
    let d = toeplitz_det(2).unwrap();
    assert_eq!(d, parse_polynomial("x2^2 - x1*x3", 3).unwrap());
}

#[test]
fn toeplitz_matches_leibniz() {
    for n in 2..=4 {
        let nv = 2 * n - 1;
        let m: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| (0..n).map(|j| Polynomial::var(nv, toeplitz_var(n, i as i64 - j as i64))).collect())
            .collect();
        let d = toeplitz_det(n).unwrap();
        let l = leibniz(&m, nv);
        // either orientation of the diagonals gives the same determinant up to relabelling x_k ↔ x_{−k}
        let flipped = l
            .substitute(&(0..nv).map(|k| Polynomial::var(nv, nv - 1 - k)).collect::<Vec<_>>())
            .unwrap();
        assert!(d == l || d == flipped, "n={n}");
    }
}

#[test]
fn toeplitz_certificates_and_affine_extremes() {
    for n in 2..=5 {
        let d = toeplitz_det(n).unwrap();
        let c = toeplitz_certificate(n, &d);
        assert!(c.holds(), "n={n}");
        assert_eq!(c.cross_terms.len(), n - 1);
        assert_eq!(d.degree_in(toeplitz_var(n, n as i64 - 1)), 1);
        assert_eq!(d.homogeneous_degree().unwrap(), Some(n as u32));
    }
}

/// Semistandard tableaux of shape λ with entries 1..n, summed as monomials.
fn schur_by_tableaux(lambda: &[u32], n: usize) -> Polynomial {
    let cells: Vec<(usize, usize)> =
        lambda.iter().enumerate().flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c))).collect();
    let mut acc = Polynomial::zero(n);
    let total = n.pow(cells.len() as u32);
    for code in 0..total {
        let mut fill = vec![vec![0usize; lambda.first().copied().unwrap_or(0) as usize]; lambda.len()];
        let mut c = code;
        for &(r, col) in &cells {
            fill[r][col] = c % n;
            c /= n;
        }
        let ok = cells.iter().all(|&(r, col)| {
            (col == 0 || fill[r][col - 1] <= fill[r][col]) && (r == 0 || fill[r - 1][col] < fill[r][col])
        });
        if ok {
            let mut e = vec![0u32; n];
            for &(r, col) in &cells {
                e[fill[r][col]] += 1;
            }
            acc = &acc + &Polynomial::monomial(n, e, q(1));
        }
    }
    acc
}

#[test]
fn schur_21_in_three_variables() {
    let lambda = Partition::new(vec![2, 1]).unwrap();
    let s = schur_function(&lambda, 3).unwrap();
    assert_eq!(s, schur_by_tableaux(&[2, 1], 3));
    // s_(2,1)(x1,x2,x3) has 8 tableaux: six x_i²x_j plus 2·x1x2x3
    assert_eq!(s.coeff(&[1, 1, 1]), q(2));
    assert_eq!(s.len(), 7);
}

#[test]
fn schur_matches_tableaux_for_small_shapes() {
    for n in 1..=3 {
        for size in 0..=4 {
            for lambda in Partition::all(size, n) {
                let s = schur_function(&lambda, n).unwrap();
                assert_eq!(s, schur_by_tableaux(lambda.parts(), n), "λ={:?}, n={n}", lambda.parts());
                assert_eq!(jacobi_trudi(&lambda, n).unwrap(), s);
                assert!(s.terms().all(|(_, c)| !c.is_negative()));
            }
        }
    }
}

#[test]
fn gvander_identity_up_to_size_three() {
    for n in 1..=4 {
        for size in 0..=3 {
            for lambda in Partition::all(size, n) {
                let chk = generalized_vandermonde_check(&lambda, n).unwrap();
                assert!(chk.holds && chk.residual.is_zero());
            }
        }
    }
    assert!(generalized_vandermonde_check(&Partition::new(vec![1, 1, 1]).unwrap(), 2).is_err());
    assert!(Partition::new(vec![1, 2]).is_err());
}

#[test]
fn vandermonde_flips_sign_under_a_swap() {
    for n in 2..=4 {
        let v = vandermonde_det(n);
        let mut images: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
        images.swap(0, 1);
        assert_eq!(v.substitute(&images).unwrap(), -&v);
    }
}

#[test]
fn minor_identity_for_random_upper_triangular_bases() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 3..=4 {
        for _ in 0..5 {
            let c: Vec<Vec<Q>> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|col| match col.cmp(&r) {
                            std::cmp::Ordering::Less => Q::zero(),
                            std::cmp::Ordering::Equal => q([1, 2, -1, 3][rng.gen_range(0..4)]),
                            std::cmp::Ordering::Greater => q(rng.gen_range(-3..=3)),
                        })
                        .collect()
                })
                .collect();
            for i in 1..=n {
                let chk = poly_vandermonde_minor_check(&c, n, i).unwrap();
                assert!(chk.holds, "n={n}, i={i}, C={c:?}");
            }
        }
    }
}

#[test]
fn minor_monomial_basis_constants() {
    for n in 3..=4 {
        for i in 1..=n {
            let chk = poly_vandermonde_minor_check(&identity_c(n), n, i).unwrap();
            assert!(chk.holds);
            assert_eq!((chk.e.clone(), chk.f.clone()), (q(0), q(1)));
        }
    }
    let mut singular = identity_c(3);
    singular[1][1] = Q::zero();
    assert!(poly_vandermonde_minor_check(&singular, 3, 1).is_err());
}

#[test]
fn minor_verdicts() {
    assert_eq!(minor_evaluability_verdict(3).status, Status::Unknown);
    assert_eq!(minor_evaluability_verdict(4).status, Status::NotEvaluable);
}
