//! Dense univariate arithmetic over `F_p` and root finding by distinct-degree and
//! equal-degree splitting (Cantor-Zassenhaus restricted to linear factors).

use rand::Rng;

use super::field::{add_mod, inv_mod, mul_mod, sub_mod, FieldSpec, Scalar};
use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// Coefficients low to high, no trailing zeros. The zero polynomial is empty.
pub(crate) type Dense = Vec<u64>;

fn trim(mut a: Dense) -> Dense {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mul(a: &[u64], b: &[u64], p: u64) -> Dense {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    trim(out)
}

/// Quotient and remainder; `b` must be nonzero.
fn divrem(a: &[u64], b: &[u64], p: u64) -> (Dense, Dense) {
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    let mut r = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![0u64; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = mul_mod(r[i], lead_inv, p);
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            let k = i - db + j;
            r[k] = sub_mod(r[k], mul_mod(c, bj, p), p);
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

fn make_monic(a: Dense, p: u64) -> Dense {
    match a.last() {
        None => a,
        Some(&lead) => {
            let inv = inv_mod(lead, p);
            a.into_iter().map(|c| mul_mod(c, inv, p)).collect()
        }
    }
}

/// Monic gcd.
pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Dense {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(a, p)
}

fn powmod(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Dense {
    let mut acc: Dense = divrem(&[1], modulus, p).1;
    let mut b = divrem(base, modulus, p).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = divrem(&mul(&acc, &b, p), modulus, p).1;
        }
        b = divrem(&mul(&b, &b, p), modulus, p).1;
        e >>= 1;
    }
    acc
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Dense {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            sub_mod(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
                p,
            )
        })
        .collect();
    trim(out)
}

/// Product of the distinct linear factors of `f`: `gcd(f, x^p - x)`.
fn linear_part(f: &[u64], p: u64) -> Dense {
    let xp = powmod(&[0, 1], p, f, p);
    gcd(f, &sub(&xp, &[0, 1], p), p)
}

fn split<R: Rng + ?Sized>(g: Dense, p: u64, rng: &mut R, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => {}
        2 => out.push(mul_mod(p - g[0] % p, inv_mod(g[1], p), p) % p),
        _ => loop {
            let a = rng.random_range(0..p);
            let h = powmod(&[a, 1], (p - 1) / 2, &g, p);
            let d = gcd(&g, &sub(&h, &[1], p), p);
            if d.len() > 1 && d.len() < g.len() {
                let (q, _) = divrem(&g, &d, p);
                split(d, p, rng, out);
                split(make_monic(q, p), p, rng, out);
                return;
            }
        },
    }
}

fn derivative(f: &[u64], p: u64) -> Dense {
    trim(
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect(),
    )
}

/// Whether `gcd(f, f')` is constant. The zero polynomial is not squarefree.
pub(crate) fn is_squarefree(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    if f.is_empty() {
        return false;
    }
    gcd(&f, &derivative(&f, p), p).len() <= 1
}

/// Distinct roots of a dense polynomial, sorted ascending.
pub(crate) fn roots_dense<R: Rng + ?Sized>(f: &[u64], p: u64, rng: &mut R) -> Vec<u64> {
    let f = trim(f.to_vec());
    if f.len() <= 1 {
        return Vec::new();
    }
    let g = linear_part(&make_monic(f, p), p);
    let mut out = Vec::new();
    split(g, p, rng, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) fn to_dense(f: &MultiPoly) -> Result<Dense> {
    Ok(trim(
        f.univariate_coeffs()?
            .iter()
            .map(|c| c.residue().ok_or(Error::RequiresPrimeField("univariate root finding")))
            .collect::<Result<Vec<_>>>()?,
    ))
}

/// The set of roots of a nonzero univariate polynomial in `F_p`, sorted by residue.
///
/// Randomized splitting draws from `rng`; the returned set does not depend on it.
pub fn uni_roots_mod_p<R: Rng + ?Sized>(
    f: &MultiPoly,
    field: FieldSpec,
    rng: &mut R,
) -> Result<Vec<Scalar>> {
    let p = field
        .modulus()
        .ok_or(Error::RequiresPrimeField("univariate root finding"))?;
    if f.field() != field {
        return Err(Error::FieldMismatch(f.field().to_string(), field.to_string()));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let dense = to_dense(f)?;
    Ok(roots_dense(&dense, p, rng)
        .into_iter()
        .map(|r| field.from_u64(r))
        .collect())
}

/// Roots of the common gcd of several univariate polynomials.
///
/// Returns `None` when every polynomial vanishes identically (every value is a root).
pub(crate) fn common_roots<R: Rng + ?Sized>(
    polys: &[Dense],
    p: u64,
    rng: &mut R,
) -> Option<Vec<u64>> {
    let mut g: Dense = Vec::new();
    for f in polys {
        g = gcd(&g, f, p);
        if g.len() == 1 {
            return Some(Vec::new());
        }
    }
    if g.is_empty() {
        return None;
    }
    Some(roots_dense(&g, p, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f7() -> FieldSpec {
        // 7 is below the working minimum, so build residues directly for the tiny cases.
        FieldSpec::prime(263).unwrap()
    }

    #[test]
    fn dense_roots_tiny_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // x^2 - 1 over F_7
        assert_eq!(roots_dense(&[6, 0, 1], 7, &mut rng), vec![1, 6]);
        // x^2 + 1 over F_7 has no roots since 7 = 3 mod 4
        assert!(roots_dense(&[1, 0, 1], 7, &mut rng).is_empty());
    }

    #[test]
    fn rejects_zero_and_rationals() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = MultiPoly::zero(1, f7());
        assert!(matches!(uni_roots_mod_p(&z, f7(), &mut rng), Err(Error::ZeroPolynomial)));
        let q = FieldSpec::rationals();
        let x = MultiPoly::var(0, 1, q);
        assert!(uni_roots_mod_p(&x, q, &mut rng).is_err());
    }

    #[test]
    fn repeated_roots_reported_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = f7();
        let p = MultiPoly::parse("(x0 - 5)^3*(x0 + 2)^2", 1, f).unwrap();
        let roots = uni_roots_mod_p(&p, f, &mut rng).unwrap();
        assert_eq!(roots, vec![f.from_i64(5), f.from_i64(-2)]);
    }

    #[test]
    fn squarefree_detection() {
        assert!(is_squarefree(&[6, 0, 1], 7));
        // (x - 1)^2
        assert!(!is_squarefree(&[1, 5, 1], 7));
        assert!(!is_squarefree(&[], 7));
    }

    #[test]
    fn common_roots_of_identically_zero_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(common_roots(&[vec![], vec![]], 263, &mut rng), None);
        assert_eq!(common_roots(&[vec![], vec![5]], 263, &mut rng), Some(vec![]));
        // (x-1)(x-2) and (x-2)(x-3)
        let a = vec![2, 263 - 3, 1];
        let b = vec![6, 263 - 5, 1];
        assert_eq!(common_roots(&[a, b], 263, &mut rng), Some(vec![2]));
    }
}
