//! Cross-checks between independent constructions of the same variety and
//! explicit rank oracles.

use std::sync::Arc;

use proptest::prelude::*;
use terracini::algebra::{same_span, span_contains, FieldSpec, Matrix, MultiPoly, Scalar, SECOND_ANALYSIS_PRIME};
use terracini::contact::{contact_corank, nu_estimate, tangent_hyperplane, TangentHyperplane};
use terracini::fiber::{fiber_probe, Verdict};
use terracini::rng::seeded;
use terracini::secant::{check_delta_tower, defect, general_witnesses, min_defective_k};
use terracini::varieties::{counter1, counter3, lagrange_hessian, BuiltinOptions, VarietyHandle};
use terracini::Result;

fn fp() -> FieldSpec {
    FieldSpec::analysis()
}

/// Unit upper triangular, so invertible over every field.
fn shear(n: usize, field: FieldSpec) -> Matrix {
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Equal => field.one(),
                    std::cmp::Ordering::Greater => field.from_u64(((i * 7 + j * 3) % 5) as u64),
                    std::cmp::Ordering::Less => field.zero(),
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows, field).unwrap()
}

fn secant_dims(x: &VarietyHandle, ks: &[usize], seed: u64) -> Vec<usize> {
    let mut rng = seeded(seed);
    ks.iter().map(|&k| defect(x, k, 3, &mut rng).unwrap().secant_dim).collect()
}

#[test]
fn identity_map_image_has_the_same_tangent_spaces() {
    let base = Arc::new(VarietyHandle::veronese(2, 2, fp()).unwrap());
    let polys: Vec<MultiPoly> = (0..6).map(|i| MultiPoly::var(i, 6, fp())).collect();
    let image = VarietyHandle::map_image(base.clone(), polys).unwrap();
    let mut rng = seeded(1);
    for _ in 0..3 {
        let w = base.sample(&mut rng).unwrap();
        let wi = image.witness_at(w.params.clone()).unwrap();
        assert!(same_span(&base.tangent_frame(&w).unwrap(), &image.tangent_frame(&wi).unwrap()).unwrap());
    }
}

#[test]
fn implicit_conic_matches_parametric_conic() {
    let conic = VarietyHandle::implicit_plane_curve(MultiPoly::parse("x0*x1 - x2^2", 3, fp()).unwrap(), 0).unwrap();
    let param = VarietyHandle::veronese(1, 2, fp()).unwrap();
    assert_eq!(conic.intrinsic_dim(&mut seeded(2)).unwrap(), 1);
    assert_eq!(secant_dims(&conic, &[0, 1], 3), secant_dims(&param, &[0, 1], 3));
}

#[test]
fn linear_hypersurface_section_matches_hyperplane_section() {
    let base = Arc::new(VarietyHandle::veronese(2, 3, fp()).unwrap());
    let form: Vec<i64> = vec![1, -2, 3, 0, 5, 1, -1, 4, 2, 7];
    let coeffs: Vec<Scalar> = form.iter().map(|&c| fp().from_i64(c)).collect();
    let h = MultiPoly::linear(&coeffs, fp());
    let by_poly = VarietyHandle::hypersurface_section(base.clone(), h).unwrap();
    let by_form = VarietyHandle::hyperplane_section(base, coeffs).unwrap();
    assert_eq!(by_poly.intrinsic_dim(&mut seeded(4)).unwrap(), 1);
    assert_eq!(by_form.intrinsic_dim(&mut seeded(4)).unwrap(), 1);
    assert_eq!(secant_dims(&by_poly, &[1, 2], 5), secant_dims(&by_form, &[1, 2], 5));
}

fn tangent_setup(x: &VarietyHandle, seed: u64) -> (Vec<terracini::varieties::Witness>, TangentHyperplane) {
    let mut rng = seeded(seed);
    let n = x.intrinsic_dim(&mut rng).unwrap();
    let (ws, _) = general_witnesses(x, 2, n, &mut rng).unwrap();
    let h = tangent_hyperplane(x, &ws, &mut rng).unwrap();
    (ws, h)
}

#[test]
fn gradient_vanishes_exactly_at_tangency() {
    let x = counter1(&BuiltinOptions::new(fp())).unwrap();
    let (ws, h) = tangent_setup(&x, 6);
    for w in &ws {
        assert!(x.pullback_jet2(&h.coeffs, w).unwrap().gradient_is_zero());
    }
    let other = x.sample(&mut seeded(7)).unwrap();
    assert!(!x.pullback_jet2(&h.coeffs, &other).unwrap().gradient_is_zero());
}

#[test]
fn lagrange_form_agrees_with_chart_pullback() {
    for x in [
        VarietyHandle::veronese(2, 3, fp()).unwrap(),
        counter3(3, &BuiltinOptions::new(fp())).unwrap(),
    ] {
        let (ws, h) = tangent_setup(&x, 8);
        for w in &ws {
            let lagrange = lagrange_hessian(&x, &h.coeffs, w).unwrap();
            let chart = x.pullback_jet2(&h.coeffs, w).unwrap().hessian;
            assert_eq!(lagrange.rank(), chart.rank(), "{}", x.label());
        }
    }
}

#[test]
fn rational_normal_quintic_against_explicit_frame() {
    let x = VarietyHandle::veronese(1, 5, fp()).unwrap();
    let p = defect(&x, 1, 3, &mut seeded(9)).unwrap();
    // Points and derivatives of t -> (1, t, ..., t^5) at t = 2 and t = 3.
    let field = fp();
    let mut cols = Vec::new();
    for t in [2u64, 3] {
        let t = field.from_u64(t);
        cols.push((0..6u64).map(|i| t.pow(i)).collect::<Vec<_>>());
        cols.push(
            (0..6u64)
                .map(|i| if i == 0 { field.zero() } else { &field.from_u64(i) * &t.pow(i - 1) })
                .collect(),
        );
    }
    let oracle = Matrix::from_columns(6, &cols, field).unwrap();
    assert_eq!(oracle.rank() - 1, 3);
    assert_eq!(p.secant_dim, 3);
}

#[test]
fn cubic_surface_never_defective_at_two_primes() {
    for field in [fp(), FieldSpec::prime(SECOND_ANALYSIS_PRIME).unwrap()] {
        let x = VarietyHandle::veronese(2, 3, field).unwrap();
        assert_eq!(min_defective_k(&x, 2, 3, &mut seeded(10)).unwrap(), None);
        let t = check_delta_tower(&x, 2, 3, &mut seeded(11)).unwrap();
        assert_eq!((t.delta_k, t.delta_1_derived), (0, 0));
    }
}

#[test]
fn secant_dimensions_increase_until_filling() {
    for d in 2..=4 {
        let x = VarietyHandle::veronese(2, d, fp()).unwrap();
        let dims = secant_dims(&x, &[0, 1, 2, 3, 4], 12);
        for w in dims.windows(2) {
            assert!(w[1] > w[0] || w[0] == x.ambient_r(), "d={d}: {dims:?}");
        }
    }
}

#[test]
fn contact_invariant_under_coordinate_change_and_scaling() {
    let x = Arc::new(counter3(3, &BuiltinOptions::new(fp())).unwrap());
    let y = VarietyHandle::projection(x.clone(), shear(x.coord_len(), fp())).unwrap();
    assert_eq!(defect(&x, 1, 3, &mut seeded(13)).unwrap().delta, defect(&y, 1, 3, &mut seeded(13)).unwrap().delta);
    assert_eq!(
        nu_estimate(&x, 1, 5, &mut seeded(14)).unwrap().nu_estimate,
        nu_estimate(&y, 1, 5, &mut seeded(14)).unwrap().nu_estimate
    );
    let (ws, h) = tangent_setup(&x, 15);
    let scaled = TangentHyperplane {
        coeffs: h.coeffs.iter().map(|c| c * &fp().from_u64(12345)).collect(),
        ..h.clone()
    };
    for w in &ws {
        assert_eq!(contact_corank(&x, &h, w).unwrap(), contact_corank(&x, &scaled, w).unwrap());
    }
}

#[test]
fn fibers_invariant_under_coordinate_change() {
    let build = |f: FieldSpec| -> Result<VarietyHandle> {
        let x = Arc::new(counter1(&BuiltinOptions::new(f))?);
        let n = x.coord_len();
        VarietyHandle::projection(x, shear(n, f))
    };
    let r = fiber_probe(build, 1, &[1009, 2003], 8, &mut seeded(16)).unwrap();
    assert_eq!(r.verdict, Verdict::NonBirationalEvidence);
    assert_eq!(r.consensus_d, Some(3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witness_point_lies_in_its_tangent_frame(seed in any::<u64>(), which in 0usize..3) {
        let opts = BuiltinOptions::new(fp());
        let x = match which {
            0 => VarietyHandle::veronese(2, 3, fp()).unwrap(),
            1 => counter1(&opts).unwrap(),
            _ => counter3(3, &opts).unwrap(),
        };
        let w = x.sample(&mut seeded(seed)).unwrap();
        let point = Matrix::from_columns(x.coord_len(), std::slice::from_ref(&w.point), fp()).unwrap();
        prop_assert!(span_contains(&x.tangent_frame(&w).unwrap(), &point).unwrap());
    }

    #[test]
    fn pullback_is_linear_in_the_form(seed in any::<u64>(), a in 1u64..1000, b in 1u64..1000) {
        let x = counter1(&BuiltinOptions::new(fp())).unwrap();
        let mut rng = seeded(seed);
        let w = x.sample(&mut rng).unwrap();
        let h1: Vec<Scalar> = (0..x.coord_len()).map(|_| fp().random(&mut rng)).collect();
        let h2: Vec<Scalar> = (0..x.coord_len()).map(|_| fp().random(&mut rng)).collect();
        let (a, b) = (fp().from_u64(a), fp().from_u64(b));
        let combo: Vec<Scalar> = h1.iter().zip(&h2).map(|(u, v)| &(u * &a) + &(v * &b)).collect();
        let lhs = x.pullback_jet2(&combo, &w).unwrap();
        let rhs = x.pullback_jet2(&h1, &w).unwrap().scale(&a)
            .checked_add(&x.pullback_jet2(&h2, &w).unwrap().scale(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
