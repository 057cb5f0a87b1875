//! Random draws and exhaustive enumeration of parameter points.
//!
//! Constraints coming from sections are pushed down the constructor tree until
//! they reach a handle that can solve them: linear ones by elimination, at most
//! one nonlinear one by restriction to a random line and univariate root finding.

use rand::Rng;

use super::{HandleKind, VarietyHandle};
use crate::algebra::univariate::{common_roots, is_squarefree, roots_dense, to_dense};
use crate::algebra::{FieldSpec, Matrix, MultiPoly, Scalar};
use crate::error::{Error, Result};

type LinearRows = Vec<Vec<Scalar>>;

/// Constraints on an affine parameter space `K^nvars`.
struct System {
    nvars: usize,
    field: FieldSpec,
    /// `row · x + constant = 0`.
    linear: Vec<(Vec<Scalar>, Scalar)>,
    /// `poly(offset + map · x) = 0`.
    nonlinear: Vec<(MultiPoly, Vec<Scalar>, Matrix)>,
}

/// Solution set `base + kernel · s` of the linear part.
struct Affine {
    base: Vec<Scalar>,
    kernel: Matrix,
}

impl System {
    fn new(nvars: usize, field: FieldSpec) -> Self {
        System {
            nvars,
            field,
            linear: Vec::new(),
            nonlinear: Vec::new(),
        }
    }

    /// Adds `poly(x) = 0` for a polynomial directly on the parameters.
    fn push_poly(&mut self, poly: MultiPoly) {
        if poly.is_zero() {
            return;
        }
        if poly.degree().is_some_and(|d| d <= 1) {
            let row = (0..self.nvars)
                .map(|i| {
                    let mut e = vec![0; self.nvars];
                    e[i] = 1;
                    poly.coefficient(&e)
                })
                .collect();
            self.linear.push((row, poly.coefficient(&vec![0; self.nvars])));
        } else {
            let id = Matrix::identity(self.nvars, self.field);
            self.nonlinear.push((poly, vec![self.field.zero(); self.nvars], id));
        }
    }

    fn affine(&self) -> Result<Option<Affine>> {
        let field = self.field;
        if self.linear.is_empty() {
            return Ok(Some(Affine {
                base: vec![field.zero(); self.nvars],
                kernel: Matrix::identity(self.nvars, field),
            }));
        }
        let a = Matrix::from_rows(self.linear.iter().map(|(r, _)| r.clone()).collect(), field)?;
        let b: Vec<Scalar> = self.linear.iter().map(|(_, c)| -c.clone()).collect();
        Ok(a.solve(&b)?.map(|base| Affine {
            base,
            kernel: a.kernel(),
        }))
    }

    /// The nonlinear constraints as polynomials in the kernel coordinates `s`.
    fn restricted(&self, aff: &Affine) -> Result<Vec<MultiPoly>> {
        let d = aff.kernel.cols();
        let field = self.field;
        self.nonlinear
            .iter()
            .map(|(poly, offset, map)| {
                let shift = map.mul_vec(&aff.base)?;
                let dir = map.mul(&aff.kernel)?;
                let subs: Vec<MultiPoly> = (0..map.rows())
                    .map(|i| {
                        let mut coeffs = dir.row(i).to_vec();
                        coeffs.push(&offset[i] + &shift[i]);
                        affine_poly(&coeffs, d, field)
                    })
                    .collect();
                poly.compose(&subs)
            })
            .collect()
    }

    fn lift(&self, aff: &Affine, s: &[Scalar]) -> Result<Vec<Scalar>> {
        let mut x = aff.kernel.mul_vec(s)?;
        for (a, b) in x.iter_mut().zip(&aff.base) {
            *a = &*a + b;
        }
        Ok(x)
    }

    /// A random solution, or `None` when the draw missed.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Option<Vec<Scalar>>> {
        let Some(aff) = self.affine()? else {
            return Ok(None);
        };
        let d = aff.kernel.cols();
        let field = self.field;
        let polys: Vec<MultiPoly> = self
            .restricted(&aff)?
            .into_iter()
            .filter(|p| !p.is_zero())
            .collect();
        let s = match polys.len() {
            0 => (0..d).map(|_| field.random(rng)).collect(),
            1 if d == 0 => {
                if polys[0].eval(&[])?.is_zero() {
                    Vec::new()
                } else {
                    return Ok(None);
                }
            }
            1 => {
                let p = field
                    .modulus()
                    .ok_or(Error::RequiresPrimeField("sampling on a hypersurface"))?;
                let a: Vec<Scalar> = (0..d).map(|_| field.random(rng)).collect();
                let b: Vec<Scalar> = (0..d).map(|_| field.random(rng)).collect();
                let line: Vec<MultiPoly> = (0..d)
                    .map(|i| affine_poly(&[b[i].clone(), a[i].clone()], 1, field))
                    .collect();
                let g = polys[0].compose(&line)?;
                let t = if g.is_zero() {
                    field.random(rng)
                } else {
                    let roots = roots_dense(&to_dense(&g)?, p, rng);
                    if roots.is_empty() {
                        return Ok(None);
                    }
                    field.from_u64(roots[rng.random_range(0..roots.len())])
                };
                a.iter().zip(&b).map(|(ai, bi)| ai + &(bi * &t)).collect()
            }
            k => {
                return Err(Error::Unsupported(format!(
                    "sampling with {k} simultaneous nonlinear equations"
                )))
            }
        };
        self.lift(&aff, &s).map(Some)
    }

    /// Every `F_p`-solution.
    fn enumerate<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        visit: &mut dyn FnMut(Vec<Scalar>),
    ) -> Result<()> {
        let p = self
            .field
            .modulus()
            .ok_or(Error::RequiresPrimeField("enumeration"))?;
        let Some(aff) = self.affine()? else {
            return Ok(());
        };
        let d = aff.kernel.cols();
        let field = self.field;
        let polys: Vec<MultiPoly> = self
            .restricted(&aff)?
            .into_iter()
            .filter(|p| !p.is_zero())
            .collect();
        if d == 0 {
            for g in &polys {
                if !g.eval(&[])?.is_zero() {
                    return Ok(());
                }
            }
            visit(aff.base.clone());
            return Ok(());
        }
        // Coefficients of each polynomial in the last kernel coordinate.
        let split: Vec<Vec<MultiPoly>> = polys.iter().map(split_last).collect();
        let mut prefix = vec![0u64; d - 1];
        loop {
            let prefix_s: Vec<Scalar> = prefix.iter().map(|&v| field.from_u64(v)).collect();
            let dense: Vec<Vec<u64>> = split
                .iter()
                .map(|coeffs| {
                    coeffs
                        .iter()
                        .map(|c| c.eval(&prefix_s).map(|v| v.residue().expect("prime field")))
                        .collect::<Result<Vec<u64>>>()
                })
                .collect::<Result<_>>()?;
            let last: Vec<u64> = if dense.is_empty() {
                (0..p).collect()
            } else {
                match common_roots(&dense, p, rng) {
                    None => (0..p).collect(),
                    Some(r) => r,
                }
            };
            for v in last {
                let mut s = prefix_s.clone();
                s.push(field.from_u64(v));
                visit(self.lift(&aff, &s)?);
            }
            // Odometer over the prefix.
            let mut i = 0;
            loop {
                if i == prefix.len() {
                    return Ok(());
                }
                prefix[i] += 1;
                if prefix[i] < p {
                    break;
                }
                prefix[i] = 0;
                i += 1;
            }
        }
    }
}

/// `coeffs[0] s_0 + ... + coeffs[d-1] s_(d-1) + coeffs[d]`.
fn affine_poly(coeffs: &[Scalar], d: usize, field: FieldSpec) -> MultiPoly {
    let mut terms = Vec::with_capacity(d + 1);
    for (i, c) in coeffs[..d].iter().enumerate() {
        let mut e = vec![0; d];
        e[i] = 1;
        terms.push((e, c.clone()));
    }
    terms.push((vec![0; d], coeffs[d].clone()));
    MultiPoly::from_terms(d, field, terms).expect("consistent ring")
}

/// Coefficients of `g` as a polynomial in its last variable, each on the other variables.
fn split_last(g: &MultiPoly) -> Vec<MultiPoly> {
    let n = g.nvars();
    let field = g.field();
    let deg = g.degree_in(n - 1).unwrap_or(0) as usize;
    let mut buckets: Vec<Vec<(Vec<u32>, Scalar)>> = vec![Vec::new(); deg + 1];
    for (e, c) in g.terms() {
        buckets[e[n - 1] as usize].push((e[..n - 1].to_vec(), c.clone()));
    }
    buckets
        .into_iter()
        .map(|t| MultiPoly::from_terms(n - 1, field, t).expect("consistent ring"))
        .collect()
}

/// Linear polynomials `x_i` of a plane chart `(x0, x1) -> (x0, x1, 1)`.
fn plane_chart(field: FieldSpec) -> (Vec<Scalar>, Matrix) {
    let offset = vec![field.zero(), field.zero(), field.one()];
    let map = Matrix::from_i64_rows(&[&[1, 0], &[0, 1], &[0, 0]], field);
    (offset, map)
}

/// Pulls a linear form back through a polynomial map as a polynomial.
fn pull_linear(form: &[Scalar], polys: &[MultiPoly], nvars: usize, field: FieldSpec) -> Result<MultiPoly> {
    let mut acc = MultiPoly::zero(nvars, field);
    for (c, f) in form.iter().zip(polys) {
        if !c.is_zero() {
            acc = acc.checked_add(&f.scale(c))?;
        }
    }
    Ok(acc)
}

fn linear_polys(m: &Matrix) -> Vec<MultiPoly> {
    (0..m.rows())
        .map(|i| MultiPoly::linear(m.row(i), m.field()))
        .collect()
}

impl VarietyHandle {
    /// A random parameter vector whose point satisfies the extra equations, or
    /// `None` when this draw missed.
    pub(crate) fn draw<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        linear: &[Vec<Scalar>],
        polys: &[MultiPoly],
    ) -> Result<Option<Vec<Scalar>>> {
        match &self.kind {
            HandleKind::Parametric { .. } | HandleKind::ImplicitPlaneCurve { .. } => {
                self.leaf_system(linear, polys)?.draw(rng)
            }
            HandleKind::Cone { base, .. } => {
                let Some(u) = base.draw(rng, &[], &[])? else {
                    return Ok(None);
                };
                let sys = self.cone_system(&u, linear, polys)?;
                Ok(sys.draw(rng)?.map(|mu| [u, mu].concat()))
            }
            _ => {
                let (base, lin, hyp) = self.push_down(linear, polys)?;
                base.draw(rng, &lin, &hyp)
            }
        }
    }

    pub(crate) fn enumerate<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        linear: &[Vec<Scalar>],
        polys: &[MultiPoly],
        visit: &mut dyn FnMut(Vec<Scalar>),
    ) -> Result<()> {
        match &self.kind {
            HandleKind::Parametric { .. } | HandleKind::ImplicitPlaneCurve { .. } => {
                self.leaf_system(linear, polys)?.enumerate(rng, visit)
            }
            HandleKind::Cone { base, .. } => {
                let mut bases = Vec::new();
                base.enumerate(rng, &[], &[], &mut |u| bases.push(u))?;
                for u in bases {
                    let sys = self.cone_system(&u, linear, polys)?;
                    sys.enumerate(rng, &mut |mu| visit([u.clone(), mu].concat()))?;
                }
                Ok(())
            }
            _ => {
                let (base, lin, hyp) = self.push_down(linear, polys)?;
                base.enumerate(rng, &lin, &hyp, visit)
            }
        }
    }

    fn leaf_system(&self, linear: &[Vec<Scalar>], polys: &[MultiPoly]) -> Result<System> {
        let field = self.field;
        let mut sys = System::new(self.nparams, field);
        match &self.kind {
            HandleKind::Parametric { map } => {
                for l in linear {
                    sys.push_poly(pull_linear(l, map, self.nparams, field)?);
                }
                for h in polys {
                    sys.push_poly(h.compose(map)?);
                }
            }
            HandleKind::ImplicitPlaneCurve { f, .. } => {
                let (offset, map) = plane_chart(field);
                for l in linear {
                    sys.linear.push((vec![l[0].clone(), l[1].clone()], l[2].clone()));
                }
                sys.nonlinear.push((f.clone(), offset.clone(), map.clone()));
                for h in polys {
                    sys.nonlinear.push((h.clone(), offset.clone(), map.clone()));
                }
            }
            _ => unreachable!("leaf handles only"),
        }
        Ok(sys)
    }

    /// Equations on the vertex coefficients over a fixed base point `u`.
    fn cone_system(&self, u: &[Scalar], linear: &[Vec<Scalar>], polys: &[MultiPoly]) -> Result<System> {
        let HandleKind::Cone { base, vertex } = &self.kind else {
            unreachable!("cone handles only")
        };
        let c = base.point_at(u)?;
        let mut sys = System::new(vertex.cols(), self.field);
        for l in linear {
            let row = (0..vertex.cols())
                .map(|j| crate::algebra::matrix::dot(l, &vertex.column(j)))
                .collect();
            sys.linear.push((row, crate::algebra::matrix::dot(l, &c)));
        }
        for h in polys {
            sys.nonlinear.push((h.clone(), c.clone(), vertex.clone()));
        }
        Ok(sys)
    }

    /// Rewrites equations on this handle's points as equations on its base.
    fn push_down(
        &self,
        linear: &[Vec<Scalar>],
        polys: &[MultiPoly],
    ) -> Result<(&VarietyHandle, LinearRows, Vec<MultiPoly>)> {
        let mut lin = Vec::new();
        let mut hyp = Vec::new();
        let base = self.base().expect("derived handle");
        match &self.kind {
            HandleKind::MapImage { polys: map, .. } => {
                for l in linear {
                    hyp.push(pull_linear(l, map, base.coord_len, self.field)?);
                }
                for h in polys {
                    hyp.push(h.compose(map)?);
                }
            }
            HandleKind::HypersurfaceSection { h, .. } => {
                lin.extend_from_slice(linear);
                hyp.extend_from_slice(polys);
                hyp.push(h.clone());
            }
            HandleKind::HyperplaneSection { form, .. } => {
                lin.extend_from_slice(linear);
                lin.push(form.clone());
                hyp.extend_from_slice(polys);
            }
            HandleKind::Projection { proj, .. } => {
                let pt = proj.transpose();
                for l in linear {
                    lin.push(pt.mul_vec(l)?);
                }
                let subs = linear_polys(proj);
                for h in polys {
                    hyp.push(h.compose(&subs)?);
                }
            }
            _ => unreachable!("derived handles only"),
        }
        // Linear forms that became polynomials of degree one stay polynomials; the
        // leaf systems detect them.
        Ok((base, lin, hyp))
    }
}

/// Squarefreeness of a plane curve equation, tested on random lines: a square
/// factor makes every restriction non-squarefree.
pub(super) fn squarefree_on_lines<R: Rng + ?Sized>(f: &MultiPoly, rng: &mut R) -> Result<bool> {
    let field = f.field();
    let p = field
        .modulus()
        .ok_or(Error::RequiresPrimeField("squarefree check"))?;
    let deg = f.degree().unwrap_or(0);
    for _ in 0..5 {
        let a: Vec<Scalar> = (0..3).map(|_| field.random(rng)).collect();
        let b: Vec<Scalar> = (0..3).map(|_| field.random(rng)).collect();
        let line: Vec<MultiPoly> = (0..3)
            .map(|i| affine_poly(&[b[i].clone(), a[i].clone()], 1, field))
            .collect();
        let g = f.compose(&line)?;
        if g.degree() != Some(deg) {
            continue;
        }
        if is_squarefree(&to_dense(&g)?, p) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::sync::Arc;

    #[test]
    fn sampled_curve_points_satisfy_equation() {
        let field = FieldSpec::analysis();
        let f = MultiPoly::parse("x0^3 + x1^3 + x2^3", 3, field).unwrap();
        let c = VarietyHandle::implicit_plane_curve(f.clone(), 1).unwrap();
        let mut rng = seeded(2);
        for _ in 0..20 {
            let w = c.sample(&mut rng).unwrap();
            assert!(f.eval(&w.point).unwrap().is_zero());
        }
    }

    #[test]
    fn cubic_line_draw_success_rate() {
        let field = FieldSpec::prime(1009).unwrap();
        let f = MultiPoly::parse("x1^2*x2 - x0^3 - 2*x0*x2^2 - 3*x2^3", 3, field).unwrap();
        let c = VarietyHandle::implicit_plane_curve(f, 1).unwrap();
        let mut rng = seeded(7);
        let hits = (0..100)
            .filter(|_| c.draw(&mut rng, &[], &[]).unwrap().is_some())
            .count();
        assert!(hits >= 60, "{hits}");
    }

    #[test]
    fn enumeration_counts_affine_curve_points() {
        let field = FieldSpec::prime(1009).unwrap();
        let f = MultiPoly::parse("x1^2*x2 - x0^3 - 2*x0*x2^2 - 3*x2^3", 3, field).unwrap();
        let c = VarietyHandle::implicit_plane_curve(f.clone(), 1).unwrap();
        let mut rng = seeded(1);
        let mut n = 0usize;
        c.enumerate(&mut rng, &[], &[], &mut |_| n += 1).unwrap();
        let mut brute = 0usize;
        for x in 0..1009u64 {
            for y in 0..1009u64 {
                let pt = [field.from_u64(x), field.from_u64(y), field.one()];
                if f.eval(&pt).unwrap().is_zero() {
                    brute += 1;
                }
            }
        }
        assert_eq!(n, brute);
    }

    #[test]
    fn hyperplane_section_points_lie_on_hyperplane() {
        let field = FieldSpec::analysis();
        let v = Arc::new(VarietyHandle::veronese(2, 2, field).unwrap());
        let form: Vec<Scalar> = (1..=6).map(|i| field.from_i64(i)).collect();
        let h = VarietyHandle::hyperplane_section(v, form.clone()).unwrap();
        let mut rng = seeded(4);
        for _ in 0..5 {
            let w = h.sample(&mut rng).unwrap();
            assert!(crate::algebra::matrix::dot(&form, &w.point).is_zero());
        }
    }

    #[test]
    fn linear_system_enumeration_matches_brute_force() {
        let field = FieldSpec::prime(263).unwrap();
        let mut sys = System::new(3, field);
        sys.push_poly(MultiPoly::parse("x0 + 2*x1 - x2 + 5", 3, field).unwrap());
        sys.push_poly(MultiPoly::parse("x0^2 - x1*x2", 3, field).unwrap());
        let mut found = Vec::new();
        sys.enumerate(&mut seeded(0), &mut |x| found.push(x)).unwrap();
        let mut brute = 0;
        for a in 0..263 {
            for b in 0..263 {
                let c = (a + 2 * b + 5) % 263;
                if (a * a) % 263 == (b * c) % 263 {
                    brute += 1;
                }
            }
        }
        assert_eq!(found.len(), brute);
    }
}
