//! Dense exact matrices: rank, echelon forms, kernels and subspace intersection.
//!
//! Column spans represent linear subspaces of `K^(r+1)`, i.e. affine cones over
//! projective linear spaces.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::field::{inv_mod, mul_mod, rational_parts, sub_mod, FieldSpec, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Matrix {
            rows,
            cols,
            field,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>, field: FieldSpec) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for s in row {
                if s.field() != field {
                    return Err(Error::FieldMismatch(s.field().to_string(), field.to_string()));
                }
                data.push(s);
            }
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            field,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>], field: FieldSpec) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len(), field);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {} (expected {rows})",
                    col.len()
                )));
            }
            for (i, s) in col.iter().enumerate() {
                if s.field() != field {
                    return Err(Error::FieldMismatch(s.field().to_string(), field.to_string()));
                }
                m.set(i, j, s.clone());
            }
        }
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[&[i64]], field: FieldSpec) -> Self {
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(data, field).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        self.check_field(rhs)?;
        let mut out = Matrix::zeros(self.rows, rhs.cols, self.field);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = self.field.zero();
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    if !a.is_zero() {
                        acc = &acc + &(a * rhs.get(l, j));
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hcat(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, rhs.rows
            )));
        }
        self.check_field(rhs)?;
        let mut out = Matrix::zeros(self.rows, self.cols + rhs.cols, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len(), self.field);
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        exact_rank(self)
    }

    /// Reduced row echelon form and its pivot columns (Gauss-Jordan).
    pub fn echelon(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Basis of the right null space `{x : M x = 0}`, as columns.
    pub fn kernel(&self) -> Matrix {
        let (e, pivots) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.cols, free.len(), self.field);
        for (jj, &f) in free.iter().enumerate() {
            k.set(f, jj, self.field.one());
            for (r, &pc) in pivots.iter().enumerate() {
                k.set(pc, jj, -e.get(r, f));
            }
        }
        k
    }

    /// Basis of the linear forms vanishing on every column, as columns of length `rows`.
    pub fn left_kernel(&self) -> Matrix {
        self.transpose().kernel()
    }

    /// A maximal linearly independent subset of the columns, kept in order.
    pub fn column_basis(&self) -> Matrix {
        let (_, pivots) = self.echelon();
        self.select_columns(&pivots)
    }

    /// Solves `M x = b`, returning one solution when the system is consistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch("right-hand side length".into()));
        }
        let rhs = Matrix::from_columns(self.rows, &[b.to_vec()], self.field)?;
        let (e, pivots) = self.hcat(&rhs)?.echelon();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = e.get(r, self.cols).clone();
        }
        Ok(Some(x))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn check_field(&self, rhs: &Matrix) -> Result<()> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch(self.field.to_string(), rhs.field.to_string()));
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    let field = a.first().or(b.first()).map(Scalar::field);
    let mut acc = match field {
        Some(f) => f.zero(),
        None => return FieldSpec::rationals().zero(),
    };
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}

/// Rank over the matrix's own field.
///
/// Prime fields use plain elimination on machine words; rationals use
/// fraction-free (Bareiss) elimination on an integer rescaling of the rows.
pub fn exact_rank(m: &Matrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    match m.field.modulus() {
        Some(p) => rank_mod_p(m, p),
        None => rank_bareiss(m),
    }
}

fn rank_mod_p(m: &Matrix, p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| m.row(i).iter().map(|s| s.residue().expect("residue")).collect())
        .collect();
    let (rows, cols) = (m.rows, m.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][c], p);
        for i in r + 1..rows {
            if a[i][c] == 0 {
                continue;
            }
            let factor = mul_mod(a[i][c], inv, p);
            for j in c..cols {
                let sub = mul_mod(factor, a[r][j], p);
                a[i][j] = sub_mod(a[i][j], sub, p);
            }
        }
        r += 1;
    }
    r
}

fn rank_bareiss(m: &Matrix) -> usize {
    // Clear denominators row by row; scaling rows does not change the rank.
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, s| {
                let (_, d) = rational_parts(s).expect("rational");
                acc.lcm(d)
            });
            row.iter()
                .map(|s| {
                    let (n, d) = rational_parts(s).expect("rational");
                    n * (&lcm / d)
                })
                .collect()
        })
        .collect();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// A matrix whose columns form a basis of `span(A) ∩ span(B)`.
pub fn subspace_intersect(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "subspaces live in K^{} and K^{}",
            a.rows, b.rows
        )));
    }
    a.check_field(b)?;
    let mut neg_b = b.clone();
    for s in &mut neg_b.data {
        *s = -&*s;
    }
    let kernel = a.hcat(&neg_b)?.kernel();
    // Each kernel vector (x, y) gives A x = B y in the intersection.
    let coeffs = Matrix::from_columns(
        a.cols,
        &kernel
            .columns()
            .into_iter()
            .map(|v| v[..a.cols].to_vec())
            .collect::<Vec<_>>(),
        a.field,
    )?;
    Ok(a.mul(&coeffs)?.column_basis())
}

/// Whether every column of `inner` lies in the column span of `outer`.
pub fn span_contains(outer: &Matrix, inner: &Matrix) -> Result<bool> {
    Ok(outer.hcat(inner)?.rank() == outer.rank())
}

/// Whether two matrices have the same column span.
pub fn same_span(a: &Matrix, b: &Matrix) -> Result<bool> {
    let joint = a.hcat(b)?.rank();
    Ok(joint == a.rank() && joint == b.rank())
}
