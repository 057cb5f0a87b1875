//! Named instances with pinned coordinates.

use std::sync::Arc;

use rand::Rng;

use super::VarietyHandle;
use crate::algebra::{monomials_of_degree, FieldSpec, Matrix, MultiPoly};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Seed for the random cubic cutting the cones.
pub const DEFAULT_SECTION_SEED: u64 = 20_240_917;

#[derive(Clone, Copy, Debug)]
pub struct BuiltinOptions {
    pub field: FieldSpec,
    pub section_seed: u64,
}

impl BuiltinOptions {
    pub fn new(field: FieldSpec) -> Self {
        BuiltinOptions {
            field,
            section_seed: DEFAULT_SECTION_SEED,
        }
    }
}

pub fn builtin_names() -> &'static [&'static str] {
    &["veronese-n-d", "rnc-d", "counter1", "counter2", "counter3-n3"]
}

/// Resolves a built-in name such as `veronese-2-3`, `rnc-5` or `counter3-n3`.
pub fn builtin(name: &str, opts: &BuiltinOptions) -> Result<VarietyHandle> {
    let bad = || Error::InvalidConstruction(format!("unknown built-in instance '{name}'"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if let Some(rest) = name.strip_prefix("veronese-") {
        let (n, d) = rest.split_once('-').ok_or_else(bad)?;
        let d = u32::try_from(num(d)?).map_err(|_| bad())?;
        return Ok(VarietyHandle::veronese(num(n)?, d, opts.field)?.with_label(name));
    }
    if let Some(d) = name.strip_prefix("rnc-") {
        return rational_normal_curve(num(d)? as u32, opts.field);
    }
    if let Some(n) = name.strip_prefix("counter3-n") {
        return counter3(num(n)?, opts);
    }
    match name {
        "counter1" => counter1(opts),
        "counter2" => counter2(opts),
        _ => Err(bad()),
    }
}

pub fn rational_normal_curve(d: u32, field: FieldSpec) -> Result<VarietyHandle> {
    Ok(VarietyHandle::veronese(1, d, field)?.with_label(format!("rnc-{d}")))
}

/// The plane cubic `x1^2 x2 = x0^3 + 2 x0 x2^2 + 3 x2^3` (smooth away from 2, 5, 11).
pub fn elliptic_curve(field: FieldSpec) -> Result<VarietyHandle> {
    let f = MultiPoly::parse("x1^2*x2 - x0^3 - 2*x0*x2^2 - 3*x2^3", 3, field)?;
    Ok(VarietyHandle::implicit_plane_curve(f, 1)?.with_label("elliptic cubic"))
}

/// The cubic re-embedded by degree-`e` monomials with `x0`-exponent at most 2,
/// padded by `pad` zero coordinates. It spans `P^(3e-1)`.
fn embedded_curve(e: u32, pad: usize, field: FieldSpec) -> Result<VarietyHandle> {
    let curve = Arc::new(elliptic_curve(field)?);
    let mut polys: Vec<MultiPoly> = monomials_of_degree(3, e)
        .into_iter()
        .filter(|m| m[0] <= 2)
        .map(|m| MultiPoly::from_terms(3, field, [(m, field.one())]))
        .collect::<Result<_>>()?;
    let m = polys.len();
    polys.extend((0..pad).map(|_| MultiPoly::zero(3, field)));
    Ok(VarietyHandle::map_image(curve, polys)?
        .with_label(format!("elliptic curve of degree {} in P^{}", 3 * e, m - 1)))
}

/// Columns `e_first, ..., e_(first+count-1)` of the identity in `K^len`.
fn coordinate_vertex(len: usize, first: usize, count: usize, field: FieldSpec) -> Matrix {
    let mut v = Matrix::zeros(len, count, field);
    for j in 0..count {
        v.set(first + j, j, field.one());
    }
    v
}

/// A dense cubic with small integer coefficients drawn from a fixed seed.
fn random_cubic(nvars: usize, opts: &BuiltinOptions) -> MultiPoly {
    let mut rng = seeded(opts.section_seed ^ nvars as u64);
    let field = opts.field;
    let terms: Vec<_> = monomials_of_degree(nvars, 3)
        .into_iter()
        .map(|m| (m, field.from_i64(rng.random_range(-5..=5))))
        .collect();
    MultiPoly::from_terms(nvars, field, terms).expect("consistent ring")
}

/// A cubic section of the cone over the embedded elliptic curve with a coordinate vertex.
fn cut_cone(e: u32, vertex_cols: usize, opts: &BuiltinOptions, label: &str) -> Result<VarietyHandle> {
    let field = opts.field;
    let base = embedded_curve(e, vertex_cols, field)?;
    let len = base.coord_len();
    let vertex = coordinate_vertex(len, len - vertex_cols, vertex_cols, field);
    let cone = Arc::new(VarietyHandle::cone(Arc::new(base), vertex)?);
    let h = random_cubic(len, opts);
    Ok(VarietyHandle::hypersurface_section(cone, h)?.with_label(label))
}

/// Surface in `P^7`: cubic section of the cone over an elliptic sextic with a line vertex.
pub fn counter1(opts: &BuiltinOptions) -> Result<VarietyHandle> {
    cut_cone(2, 2, opts, "counter1")
}

/// Surface in `P^10`: cubic section of the cone over an elliptic nonic in `P^8` with a line vertex.
pub fn counter2(opts: &BuiltinOptions) -> Result<VarietyHandle> {
    cut_cone(3, 2, opts, "counter2")
}

/// `n`-fold: cubic section of the cone over an elliptic curve with a `P^(n-1)` vertex,
/// the curve embedded just far enough that the ambient dimension is at least `2n+1`.
pub fn counter3(n: usize, opts: &BuiltinOptions) -> Result<VarietyHandle> {
    if n < 2 {
        return Err(Error::InvalidConstruction("counter3 needs n >= 2".into()));
    }
    let e = ((n + 2).div_ceil(3)).max(2) as u32;
    cut_cone(e, n, opts, &format!("counter3-n{n}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn fp() -> FieldSpec {
        FieldSpec::analysis()
    }

    #[test]
    fn builtin_names_resolve() {
        let o = BuiltinOptions::new(fp());
        assert_eq!(builtin("veronese-2-2", &o).unwrap().ambient_r(), 5);
        assert_eq!(builtin("rnc-7", &o).unwrap().ambient_r(), 7);
        assert_eq!(builtin("counter1", &o).unwrap().ambient_r(), 7);
        assert_eq!(builtin("counter2", &o).unwrap().ambient_r(), 10);
        assert_eq!(builtin("counter3-n3", &o).unwrap().ambient_r(), 8);
        assert!(builtin("counter4", &o).is_err());
        assert!(builtin("veronese-2", &o).is_err());
    }

    #[test]
    fn counter_dimensions() {
        let o = BuiltinOptions::new(fp());
        let mut rng = seeded(9);
        assert_eq!(counter1(&o).unwrap().intrinsic_dim(&mut rng).unwrap(), 2);
        assert_eq!(counter2(&o).unwrap().intrinsic_dim(&mut rng).unwrap(), 2);
        assert_eq!(counter3(3, &o).unwrap().intrinsic_dim(&mut rng).unwrap(), 3);
        assert!(counter3(4, &o).unwrap().ambient_r() >= 9);
    }

    #[test]
    fn embedded_curves_span_expected_spaces() {
        let mut rng = seeded(2);
        for (e, span) in [(2u32, 6usize), (3, 9)] {
            let c = embedded_curve(e, 0, fp()).unwrap();
            let pts: Vec<_> = (0..20).map(|_| c.sample(&mut rng).unwrap().point).collect();
            let m = Matrix::from_columns(c.coord_len(), &pts, fp()).unwrap();
            assert_eq!(m.rank(), span);
        }
    }

    #[test]
    fn section_points_lie_on_cubic() {
        let o = BuiltinOptions::new(fp());
        let x = counter1(&o).unwrap();
        let super::super::HandleKind::HypersurfaceSection { h, .. } = x.kind() else {
            panic!("counter1 is a section");
        };
        let mut rng = seeded(3);
        for _ in 0..10 {
            let w = x.sample(&mut rng).unwrap();
            assert!(h.eval(&w.point).unwrap().is_zero());
        }
    }
}
