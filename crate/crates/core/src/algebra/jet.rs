//! Second-order jets of scalar and vector-valued polynomial maps.

use super::field::{FieldSpec, Scalar};
use super::matrix::{dot, Matrix};
use super::poly::{power_table, MultiPoly};
use crate::error::{Error, Result};

/// Value, gradient and (exactly symmetric) Hessian of a function at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet2 {
    pub value: Scalar,
    pub gradient: Vec<Scalar>,
    pub hessian: Matrix,
}

impl Jet2 {
    pub fn zero(nvars: usize, field: FieldSpec) -> Self {
        Jet2 {
            value: field.zero(),
            gradient: vec![field.zero(); nvars],
            hessian: Matrix::zeros(nvars, nvars, field),
        }
    }

    pub fn nvars(&self) -> usize {
        self.gradient.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.hessian.field()
    }

    pub fn gradient_is_zero(&self) -> bool {
        self.gradient.iter().all(Scalar::is_zero)
    }

    pub fn checked_add(&self, rhs: &Jet2) -> Result<Jet2> {
        if self.nvars() != rhs.nvars() {
            return Err(Error::ArityMismatch {
                expected: self.nvars(),
                found: rhs.nvars(),
            });
        }
        let n = self.nvars();
        let mut hessian = self.hessian.clone();
        for i in 0..n {
            for j in 0..n {
                hessian.set(i, j, self.hessian.get(i, j).checked_add(rhs.hessian.get(i, j))?);
            }
        }
        Ok(Jet2 {
            value: self.value.checked_add(&rhs.value)?,
            gradient: self
                .gradient
                .iter()
                .zip(&rhs.gradient)
                .map(|(a, b)| a.checked_add(b))
                .collect::<Result<_>>()?,
            hessian,
        })
    }

    pub fn scale(&self, c: &Scalar) -> Jet2 {
        let n = self.nvars();
        let mut hessian = self.hessian.clone();
        for i in 0..n {
            for j in 0..n {
                hessian.set(i, j, self.hessian.get(i, j) * c);
            }
        }
        Jet2 {
            value: &self.value * c,
            gradient: self.gradient.iter().map(|g| g * c).collect(),
            hessian,
        }
    }

    pub fn hessian_corank(&self) -> usize {
        self.nvars() - self.hessian.rank()
    }
}

/// Exact value, gradient and Hessian of `f` at `point`, accumulated term by term.
pub fn jet2_eval(f: &MultiPoly, point: &[Scalar]) -> Result<Jet2> {
    let n = f.nvars();
    if point.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: point.len(),
        });
    }
    let field = f.field();
    let powers = power_table(point, f.max_exponents());
    let mut jet = Jet2::zero(n, field);
    let mut hess = vec![vec![field.zero(); n]; n];

    // Product of x^e with exponents lowered by `drop`.
    let lowered = |exps: &[u32], drop: &[(usize, u32)]| -> Scalar {
        let mut t = field.one();
        for (k, &e) in exps.iter().enumerate() {
            let d: u32 = drop.iter().filter(|(i, _)| *i == k).map(|(_, d)| d).sum();
            let e = e - d;
            if e > 0 {
                t = &t * &powers[k][e as usize];
            }
        }
        t
    };

    for (exps, c) in f.terms() {
        jet.value = &jet.value + &(c * &lowered(exps, &[]));
        for i in 0..n {
            let ei = exps[i];
            if ei == 0 {
                continue;
            }
            let ci = c * &field.from_u64(ei as u64);
            jet.gradient[i] = &jet.gradient[i] + &(&ci * &lowered(exps, &[(i, 1)]));
            if ei >= 2 {
                let cii = &ci * &field.from_u64((ei - 1) as u64);
                hess[i][i] = &hess[i][i] + &(&cii * &lowered(exps, &[(i, 2)]));
            }
            for j in i + 1..n {
                let ej = exps[j];
                if ej == 0 {
                    continue;
                }
                let cij = &ci * &field.from_u64(ej as u64);
                hess[i][j] = &hess[i][j] + &(&cij * &lowered(exps, &[(i, 1), (j, 1)]));
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            jet.hessian.set(i, j, hess[i][j].clone());
            jet.hessian.set(j, i, hess[i][j].clone());
        }
    }
    Ok(jet)
}

/// Second-order jet of a map `K^m -> K^R` at a point.
///
/// `first[i]` is the derivative vector along parameter `i`, `second[i][j]` the
/// mixed second derivative vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapJet {
    pub value: Vec<Scalar>,
    pub first: Vec<Vec<Scalar>>,
    pub second: Vec<Vec<Vec<Scalar>>>,
}

impl MapJet {
    pub fn nparams(&self) -> usize {
        self.first.len()
    }

    pub fn target_len(&self) -> usize {
        self.value.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.value[0].field()
    }

    /// Jet of a polynomial map given componentwise.
    pub fn of_polys(polys: &[MultiPoly], point: &[Scalar]) -> Result<MapJet> {
        let jets = polys
            .iter()
            .map(|p| jet2_eval(p, point))
            .collect::<Result<Vec<_>>>()?;
        let m = point.len();
        Ok(MapJet {
            value: jets.iter().map(|j| j.value.clone()).collect(),
            first: (0..m)
                .map(|i| jets.iter().map(|j| j.gradient[i].clone()).collect())
                .collect(),
            second: (0..m)
                .map(|i| {
                    (0..m)
                        .map(|k| jets.iter().map(|j| j.hessian.get(i, k).clone()).collect())
                        .collect()
                })
                .collect(),
        })
    }

    /// Jet of `A ∘ self` for a linear map `A`.
    pub fn apply_linear(&self, a: &Matrix) -> Result<MapJet> {
        Ok(MapJet {
            value: a.mul_vec(&self.value)?,
            first: self
                .first
                .iter()
                .map(|v| a.mul_vec(v))
                .collect::<Result<_>>()?,
            second: self
                .second
                .iter()
                .map(|row| row.iter().map(|v| a.mul_vec(v)).collect::<Result<_>>())
                .collect::<Result<_>>()?,
        })
    }

    /// Jet of the scalar function `form · self` for a linear form.
    pub fn linear_form(&self, form: &[Scalar]) -> Result<Jet2> {
        if form.len() != self.target_len() {
            return Err(Error::DimensionMismatch(format!(
                "linear form of length {} on K^{}",
                form.len(),
                self.target_len()
            )));
        }
        let m = self.nparams();
        let field = self.field();
        let mut hessian = Matrix::zeros(m, m, field);
        for i in 0..m {
            for j in 0..m {
                hessian.set(i, j, dot(form, &self.second[i][j]));
            }
        }
        Ok(Jet2 {
            value: dot(form, &self.value),
            gradient: self.first.iter().map(|v| dot(form, v)).collect(),
            hessian,
        })
    }

    /// Chain rule: jet of `f ∘ self` for a polynomial `f` on the target space.
    pub fn compose_scalar(&self, f: &MultiPoly) -> Result<Jet2> {
        let outer = jet2_eval(f, &self.value)?;
        let m = self.nparams();
        let field = self.field();
        let grad_outer = &outer.gradient;
        let mut hessian = Matrix::zeros(m, m, field);
        for i in 0..m {
            let hi = outer.hessian.mul_vec(&self.first[i])?;
            for j in i..m {
                let v = &dot(&hi, &self.first[j]) + &dot(grad_outer, &self.second[i][j]);
                hessian.set(i, j, v.clone());
                hessian.set(j, i, v);
            }
        }
        Ok(Jet2 {
            value: outer.value,
            gradient: self.first.iter().map(|v| dot(grad_outer, v)).collect(),
            hessian,
        })
    }

    /// Chain rule for a polynomial map `F = (f_0, ..., f_s)` on the target space.
    pub fn compose_map(&self, polys: &[MultiPoly]) -> Result<MapJet> {
        let jets = polys
            .iter()
            .map(|f| self.compose_scalar(f))
            .collect::<Result<Vec<_>>>()?;
        let m = self.nparams();
        Ok(MapJet {
            value: jets.iter().map(|j| j.value.clone()).collect(),
            first: (0..m)
                .map(|i| jets.iter().map(|j| j.gradient[i].clone()).collect())
                .collect(),
            second: (0..m)
                .map(|i| {
                    (0..m)
                        .map(|k| jets.iter().map(|j| j.hessian.get(i, k).clone()).collect())
                        .collect()
                })
                .collect(),
        })
    }
}
