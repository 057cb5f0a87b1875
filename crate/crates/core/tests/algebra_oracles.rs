//! Independent oracles for the exact linear algebra, root finding and jets.

#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use terracini::algebra::{
    exact_rank, jet2_eval, subspace_intersect, uni_roots_mod_p, FieldSpec, Matrix, MultiPoly, Scalar,
};

const P: u64 = 1009;

fn small() -> FieldSpec {
    FieldSpec::prime(P).unwrap()
}

fn det_mod(m: &[Vec<i64>], p: i64) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0].rem_euclid(p);
    }
    let mut total = 0i64;
    for j in 0..n {
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { p - 1 };
        total = (total + sign * (m[0][j].rem_euclid(p) * det_mod(&minor, p) % p)) % p;
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Largest nonvanishing minor.
fn minor_rank(m: &[Vec<i64>], p: i64) -> usize {
    let (rows, cols) = (m.len(), m[0].len());
    for r in (1..=rows.min(cols)).rev() {
        for rs in subsets(rows, r) {
            for cs in subsets(cols, r) {
                let sub: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                if det_mod(&sub, p) != 0 {
                    return r;
                }
            }
        }
    }
    0
}

fn to_matrix(m: &[Vec<i64>], field: FieldSpec) -> Matrix {
    Matrix::from_rows(
        m.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect(),
        field,
    )
    .unwrap()
}

/// A 5x7 integer matrix of rank at most `r`.
fn low_rank(rng: &mut ChaCha8Rng, r: usize) -> Vec<Vec<i64>> {
    let a: Vec<Vec<i64>> = (0..5).map(|_| (0..r).map(|_| rng.random_range(-9..=9)).collect()).collect();
    let b: Vec<Vec<i64>> = (0..r).map(|_| (0..7).map(|_| rng.random_range(-9..=9)).collect()).collect();
    (0..5)
        .map(|i| (0..7).map(|j| (0..r).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

#[test]
fn rank_matches_minor_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..24 {
        let m = low_rank(&mut rng, trial % 6);
        let expected = minor_rank(&m, P as i64);
        assert_eq!(to_matrix(&m, small()).rank(), expected, "{m:?}");
        let q = to_matrix(&m, FieldSpec::rationals());
        assert_eq!(exact_rank(&q), q.rank());
    }
}

#[test]
fn cubic_roots_match_scan() {
    let field = small();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let c: Vec<u64> = (0..3).map(|_| rng.random_range(0..P)).collect();
        let f = MultiPoly::parse(&format!("x0^3 + {}*x0^2 + {}*x0 + {}", c[2], c[1], c[0]), 1, field).unwrap();
        let scan: Vec<u64> = (0..P)
            .filter(|&x| (x * x % P * x + c[2] * x % P * x + c[1] * x + c[0]).is_multiple_of(P))
            .collect();
        let found: Vec<u64> = uni_roots_mod_p(&f, field, &mut rng)
            .unwrap()
            .iter()
            .map(|s| s.residue().unwrap())
            .collect();
        assert_eq!(found, scan);
    }
}

#[test]
fn jet_matches_termwise_derivatives() {
    let field = FieldSpec::analysis();
    let f = MultiPoly::parse("3*x0^4 - x0^2*x1*x2 + 7*x1^3*x2 + 2*x2^2 - x0 + 5", 3, field).unwrap();
    let pt: Vec<u64> = vec![4, 9, 13];
    let jet = jet2_eval(&f, &pt.iter().map(|&v| field.from_u64(v)).collect::<Vec<_>>()).unwrap();
    let p = terracini::algebra::ANALYSIS_PRIME as i128;
    let pow = |b: u64, e: u32| (b as i128).pow(e) % p;
    let mut value = 0i128;
    let mut grad = [0i128; 3];
    let mut hess = [[0i128; 3]; 3];
    for (exps, c) in f.terms() {
        let c = c.residue().unwrap() as i128;
        let mono = |e: &[i64]| -> i128 {
            if e.iter().any(|&x| x < 0) {
                return 0;
            }
            (0..3).fold(1i128, |acc, i| acc * pow(pt[i], e[i] as u32) % p)
        };
        let e: Vec<i64> = exps.iter().map(|&x| x as i64).collect();
        value = (value + c * mono(&e)) % p;
        for i in 0..3 {
            let mut ei = e.clone();
            ei[i] -= 1;
            grad[i] = (grad[i] + c * e[i] as i128 % p * mono(&ei)) % p;
            for j in 0..3 {
                let mut eij = ei.clone();
                eij[j] -= 1;
                let factor = e[i] * if i == j { e[i] - 1 } else { e[j] };
                hess[i][j] = (hess[i][j] + c * factor as i128 % p * mono(&eij)) % p;
            }
        }
    }
    let res = |s: &Scalar| s.residue().unwrap() as i128;
    assert_eq!(res(&jet.value), value);
    for i in 0..3 {
        assert_eq!(res(&jet.gradient[i]), grad[i]);
        for j in 0..3 {
            assert_eq!(res(jet.hessian.get(i, j)), hess[i][j]);
        }
    }
}

#[test]
fn generic_subspaces_meet_in_expected_dimension() {
    let field = FieldSpec::analysis();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let random = |cols: usize, rng: &mut ChaCha8Rng| {
        let data = (0..cols).map(|_| (0..6).map(|_| field.random(rng)).collect::<Vec<_>>()).collect::<Vec<_>>();
        Matrix::from_columns(6, &data, field).unwrap()
    };
    let a = random(3, &mut rng);
    let b = random(4, &mut rng);
    assert_eq!(subspace_intersect(&a, &b).unwrap().cols(), 1);
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..=4, c), r))
}

fn poly_strategy(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..4, nvars), -20i64..=20), 1..6).prop_map(move |terms| {
        let field = small();
        MultiPoly::from_terms(nvars, field, terms.into_iter().map(|(e, c)| (e, field.from_i64(c)))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_is_transpose_invariant(m in matrix_strategy()) {
        let a = to_matrix(&m, small());
        prop_assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn intersection_dimension_identity(a in matrix_strategy(), b in matrix_strategy()) {
        let rows = a.len().min(b.len());
        let a = to_matrix(&a[..rows], small());
        let b = to_matrix(&b[..rows], small());
        let meet = subspace_intersect(&a, &b).unwrap().cols();
        prop_assert_eq!(meet + a.hcat(&b).unwrap().rank(), a.rank() + b.rank());
    }

    #[test]
    fn roots_of_product_are_union(f in poly_strategy(1), g in poly_strategy(1), seed in any::<u64>()) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let field = small();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fg = f.checked_mul(&g).unwrap();
        let mut union: Vec<u64> = uni_roots_mod_p(&f, field, &mut rng).unwrap()
            .into_iter()
            .chain(uni_roots_mod_p(&g, field, &mut rng).unwrap())
            .map(|s| s.residue().unwrap())
            .collect();
        union.sort_unstable();
        union.dedup();
        let product: Vec<u64> = uni_roots_mod_p(&fg, field, &mut rng).unwrap().iter().map(|s| s.residue().unwrap()).collect();
        prop_assert_eq!(product, union);
    }

    #[test]
    fn jets_are_linear_with_symmetric_hessians(
        f in poly_strategy(3),
        g in poly_strategy(3),
        pt in prop::collection::vec(0u64..P, 3),
        c in 1u64..P,
    ) {
        let field = small();
        let x: Vec<Scalar> = pt.iter().map(|&v| field.from_u64(v)).collect();
        let c = field.from_u64(c);
        let lhs = jet2_eval(&f.checked_add(&g.scale(&c)).unwrap(), &x).unwrap();
        let rhs = jet2_eval(&f, &x).unwrap().checked_add(&jet2_eval(&g, &x).unwrap().scale(&c)).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(lhs.hessian == lhs.hessian.transpose());
    }
}
