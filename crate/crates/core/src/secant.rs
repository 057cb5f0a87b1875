//! Secant dimensions by stacked tangent frames, defects, and tangential projections.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Matrix;
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::varieties::{VarietyHandle, Witness, MAX_RESAMPLE};

/// Default number of independent draws aggregated by maximum.
pub const DEFAULT_TRIALS: usize = 3;

/// A contact-locus estimate, or the regime where no tangent hyperplane exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nu {
    Undefined,
    Estimate(usize),
}

impl Nu {
    pub fn from_option(v: Option<usize>) -> Self {
        v.map_or(Nu::Undefined, Nu::Estimate)
    }

    pub fn value(self) -> Option<usize> {
        match self {
            Nu::Undefined => None,
            Nu::Estimate(v) => Some(v),
        }
    }
}

impl std::fmt::Display for Nu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Nu::Undefined => f.write_str("undefined"),
            Nu::Estimate(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Nu {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Nu::Undefined => s.serialize_str("undefined"),
            Nu::Estimate(v) => s.serialize_u64(*v as u64),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectProfile {
    pub k: usize,
    pub dim: usize,
    pub ambient_r: usize,
    pub expected_dim: usize,
    pub secant_dim: usize,
    pub delta: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<Nu>,
    pub defective: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weakly_defective: Option<bool>,
    pub trials: usize,
    pub field_modulus: Option<u64>,
}

/// A projection from the span of tangent spaces at `k` witnesses.
#[derive(Clone, Debug)]
pub struct TangentialProjection {
    pub k: usize,
    pub center_frame: Matrix,
    pub proj: Matrix,
    pub source_witnesses: Vec<Witness>,
}

/// `min(r, n(k+1) + k)`.
pub fn expected_secant_dim(n: usize, k: usize, r: usize) -> usize {
    r.min(n * (k + 1) + k)
}

/// Draws `count` witnesses whose frames have full rank `n + 1` and whose points are distinct.
pub fn general_witnesses<R: Rng + ?Sized>(
    x: &VarietyHandle,
    count: usize,
    n: usize,
    rng: &mut R,
) -> Result<(Vec<Witness>, Vec<Matrix>)> {
    for _ in 0..MAX_RESAMPLE {
        let mut ws: Vec<Witness> = Vec::with_capacity(count);
        let mut frames = Vec::with_capacity(count);
        let mut ok = true;
        for _ in 0..count {
            let w = x.sample(rng)?;
            let frame = x.tangent_frame(&w)?;
            if frame.rank() != n + 1 || ws.iter().any(|v| v.point == w.point) {
                ok = false;
                break;
            }
            frames.push(frame);
            ws.push(w);
        }
        if ok {
            return Ok((ws, frames));
        }
    }
    Err(Error::SamplingExhausted {
        label: x.label().to_string(),
        attempts: MAX_RESAMPLE,
        reason: "degenerate witness tuples".into(),
    })
}

/// Column concatenation of frames; an empty list gives a matrix with no columns.
pub fn stack(frames: &[Matrix], rows: usize, field: crate::algebra::FieldSpec) -> Result<Matrix> {
    let mut m = Matrix::zeros(rows, 0, field);
    for f in frames {
        m = m.hcat(f)?;
    }
    Ok(m)
}

fn trial_seeds<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> Vec<u64> {
    (0..trials).map(|_| rng.next_u64()).collect()
}

fn stacked_dim(x: &VarietyHandle, k: usize, n: usize, trials: usize, seeds: &[u64]) -> Result<usize> {
    let ranks: Vec<usize> = seeds[..trials]
        .par_iter()
        .map(|&s| {
            let mut rng = seeded(s);
            let (_, frames) = general_witnesses(x, k + 1, n, &mut rng)?;
            Ok(stack(&frames, x.coord_len(), x.field())?.rank())
        })
        .collect::<Result<_>>()?;
    Ok(ranks.into_iter().max().unwrap_or(0).saturating_sub(1))
}

/// `dim S^k(X)` as the maximum over `trials` of the stacked frame rank minus one.
pub fn terracini_dim<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<usize> {
    let n = x.intrinsic_dim(rng)?;
    let seeds = trial_seeds(rng, trials.max(1));
    stacked_dim(x, k, n, trials.max(1), &seeds)
}

pub fn defect<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<DefectProfile> {
    let n = x.intrinsic_dim(rng)?;
    let trials = trials.max(1);
    let seeds = trial_seeds(rng, trials);
    let secant_dim = stacked_dim(x, k, n, trials, &seeds)?;
    let r = x.ambient_r();
    let expected_dim = expected_secant_dim(n, k, r);
    if secant_dim > expected_dim {
        return Err(Error::IllFormed(format!(
            "{}: secant dimension {secant_dim} exceeds expected {expected_dim}",
            x.label()
        )));
    }
    let delta = expected_dim - secant_dim;
    Ok(DefectProfile {
        k,
        dim: n,
        ambient_r: r,
        expected_dim,
        secant_dim,
        delta,
        nu: None,
        defective: delta >= 1,
        weakly_defective: None,
        trials,
        field_modulus: x.field().modulus(),
    })
}

/// Smallest `k` in `1..=k_max` with positive defect.
pub fn min_defective_k<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k_max: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Option<usize>> {
    for k in 1..=k_max {
        if defect(x, k, trials, rng)?.defective {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Projection matrix killing the column span of `center`, onto the coordinates
/// complementary to the pivot rows of `center`.
pub fn projection_from(center: &Matrix) -> Matrix {
    let rows = center.rows();
    let field = center.field();
    let (rref, pivots) = center.transpose().echelon();
    let complement: Vec<usize> = (0..rows).filter(|i| !pivots.contains(i)).collect();
    let mut p = Matrix::zeros(complement.len(), rows, field);
    for (out, &j) in complement.iter().enumerate() {
        p.set(out, j, field.one());
        for (idx, &i) in pivots.iter().enumerate() {
            p.set(out, i, -rref.get(idx, j).clone());
        }
    }
    p
}

/// The projection from the span of tangent spaces at `k` general witnesses, and its image.
pub fn tangential_projection<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k: usize,
    rng: &mut R,
) -> Result<(TangentialProjection, VarietyHandle)> {
    let n = x.intrinsic_dim(rng)?;
    let (source_witnesses, frames) = general_witnesses(x, k, n, rng)?;
    let stacked = stack(&frames, x.coord_len(), x.field())?;
    let center_frame = stacked.column_basis();
    if center_frame.cols() > x.ambient_r() {
        return Err(Error::CenterFillsAmbient);
    }
    let proj = projection_from(&center_frame);
    let image = VarietyHandle::projection(Arc::new(x.clone()), proj.clone())?
        .with_label(format!("tau_{k}({})", x.label()));
    Ok((
        TangentialProjection {
            k,
            center_frame,
            proj,
            source_witnesses,
        },
        image,
    ))
}

/// `X_k`; for `k = 0` the variety itself.
pub fn derived_handle<R: Rng + ?Sized>(x: &VarietyHandle, k: usize, rng: &mut R) -> Result<VarietyHandle> {
    if k == 0 {
        return Ok(x.clone());
    }
    tangential_projection(x, k, rng).map(|(_, h)| h)
}

/// Both sides of `delta_h(Y) = dim Y - dim tau_{Y,h}(Y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionDrop {
    pub h: usize,
    pub delta: usize,
    pub dim_source: usize,
    /// `None` when the center fills the ambient space.
    pub dim_image: Option<usize>,
    /// `None` when the center fills the ambient space or the expected secant
    /// dimension is capped.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaTowerReport {
    pub k: usize,
    pub delta_k: usize,
    pub delta_1_derived: usize,
    pub equal: bool,
    pub drop_at_k: ProjectionDrop,
    pub drop_at_1_derived: ProjectionDrop,
}

fn projection_drop<R: Rng + ?Sized>(
    y: &VarietyHandle,
    h: usize,
    delta: usize,
    rng: &mut R,
) -> Result<ProjectionDrop> {
    let dim_source = y.intrinsic_dim(rng)?;
    let dim_image = match tangential_projection(y, h, rng) {
        Ok((_, img)) => Some(img.intrinsic_dim(rng)?),
        Err(Error::CenterFillsAmbient) => None,
        Err(e) => return Err(e),
    };
    // Outside this range the expected dimension is capped by the ambient space.
    let in_range = dim_source * (h + 1) + h <= y.ambient_r();
    Ok(ProjectionDrop {
        h,
        delta,
        dim_source,
        dim_image,
        holds: dim_image.filter(|_| in_range).map(|d| dim_source == d + delta),
    })
}

/// Compares `delta_k(X)` with `delta_1(X_(k-1))`.
pub fn check_delta_tower<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<DeltaTowerReport> {
    if k == 0 {
        return Err(Error::InvalidConstruction("tower check needs k >= 1".into()));
    }
    let delta_k = defect(x, k, trials, rng)?.delta;
    let y = derived_handle(x, k - 1, rng)?;
    let delta_1_derived = defect(&y, 1, trials, rng)?.delta;
    let drop_at_k = projection_drop(x, k, delta_k, rng)?;
    let drop_at_1_derived = projection_drop(&y, 1, delta_1_derived, rng)?;
    Ok(DeltaTowerReport {
        k,
        delta_k,
        delta_1_derived,
        equal: delta_k == delta_1_derived,
        drop_at_k,
        drop_at_1_derived,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldSpec;
    use crate::rng::seeded;
    use crate::varieties::{counter2, counter3, BuiltinOptions};

    fn fp() -> FieldSpec {
        FieldSpec::analysis()
    }

    #[test]
    fn expected_dimension_formula() {
        assert_eq!(expected_secant_dim(2, 1, 5), 5);
        assert_eq!(expected_secant_dim(4, 0, 9), 4);
        assert_eq!(expected_secant_dim(3, 2, 10), 10);
    }

    #[test]
    fn veronese_surface_is_defective() {
        let v = VarietyHandle::veronese(2, 2, fp()).unwrap();
        let mut rng = seeded(1);
        assert_eq!(terracini_dim(&v, 1, 3, &mut rng).unwrap(), 4);
        assert_eq!(terracini_dim(&v, 0, 3, &mut rng).unwrap(), 2);
        let d = defect(&v, 1, 3, &mut rng).unwrap();
        assert_eq!((d.expected_dim, d.delta, d.defective), (5, 1, true));
        assert_eq!(min_defective_k(&v, 3, 3, &mut rng).unwrap(), Some(1));
    }

    #[test]
    fn projection_kills_center() {
        let v = VarietyHandle::veronese(2, 3, fp()).unwrap();
        let mut rng = seeded(2);
        let (tp, img) = tangential_projection(&v, 1, &mut rng).unwrap();
        assert!(tp.proj.mul(&tp.center_frame).unwrap().is_zero());
        assert_eq!(tp.proj.rank(), 10 - tp.center_frame.rank());
        for w in &tp.source_witnesses {
            assert!(tp.proj.mul_vec(&w.point).unwrap().iter().all(|s| s.is_zero()));
        }
        assert_eq!(img.intrinsic_dim(&mut rng).unwrap(), 2);
        let (_, img) = tangential_projection(&VarietyHandle::veronese(2, 2, fp()).unwrap(), 1, &mut rng).unwrap();
        assert_eq!(img.intrinsic_dim(&mut rng).unwrap(), 1);
    }

    #[test]
    fn center_filling_is_reported() {
        let c = VarietyHandle::veronese(1, 3, fp()).unwrap();
        let mut rng = seeded(3);
        assert!(matches!(
            tangential_projection(&c, 2, &mut rng),
            Err(Error::CenterFillsAmbient)
        ));
    }

    #[test]
    fn counter_defects() {
        let o = BuiltinOptions::new(fp());
        let mut rng = seeded(4);
        let x3 = counter3(3, &o).unwrap();
        assert_eq!(defect(&x3, 1, 3, &mut rng).unwrap().delta, 1);
        let x2 = counter2(&o).unwrap();
        assert_eq!(defect(&x2, 1, 3, &mut rng).unwrap().delta, 0);
        assert_eq!(defect(&x2, 2, 3, &mut rng).unwrap().delta, 1);
        let t = check_delta_tower(&x2, 2, 3, &mut rng).unwrap();
        assert!(t.equal, "{t:?}");
        assert_eq!(t.drop_at_k.holds, Some(true));
    }
}
