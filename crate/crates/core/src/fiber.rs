//! Exhaustive small-prime fibers of tangential projections and the tangent
//! functoriality check.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{same_span, FieldSpec, Matrix, ENUMERATION_PRIMES};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::secant::tangential_projection;
use crate::varieties::{normalize, VarietyHandle};

/// Largest number of chart points a probe may enumerate per prime.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;
/// Default trials per prime.
pub const DEFAULT_FIBER_TRIALS: usize = 16;

pub fn default_primes() -> Vec<u64> {
    ENUMERATION_PRIMES.to_vec()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    BirationalEvidence,
    NonBirationalEvidence,
    Inconclusive,
    NotGenericallyFinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberTrial {
    pub cardinality: usize,
    /// Chart points on the fiber's linear span that fall into the center.
    pub center_hits: usize,
    /// Whether every preimage has the same projected tangent space.
    pub projected_frames_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeFibers {
    pub prime: u64,
    pub trials: Vec<FiberTrial>,
    pub cardinalities: Vec<usize>,
    pub max_d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub k: usize,
    pub trials: usize,
    pub per_prime: Vec<PrimeFibers>,
    /// Largest fiber seen at any prime; rational points can only undercount.
    pub consensus_d: Option<usize>,
    pub verdict: Verdict,
}

/// Probes the degree of `tau_{X,k}` by enumerating `X ∩ span(center, x0)` over
/// each prime. `build` constructs the variety over a given field.
pub fn fiber_probe<F, R>(
    build: F,
    k: usize,
    primes: &[u64],
    trials: usize,
    rng: &mut R,
) -> Result<FiberReport>
where
    F: Fn(FieldSpec) -> Result<VarietyHandle> + Sync,
    R: Rng + ?Sized,
{
    let trials = trials.max(1);
    let mut per_prime = Vec::new();
    for &p in primes {
        let field = FieldSpec::prime(p)?;
        let x = build(field)?;
        let n = x.intrinsic_dim(rng)?;
        let budget = (p as f64).powi(n as i32);
        if budget > ENUMERATION_BUDGET as f64 {
            return Err(Error::BudgetExceeded(format!(
                "{p}^{n} chart points exceed {ENUMERATION_BUDGET}"
            )));
        }
        let (_, image) = tangential_projection(&x, k, rng)?;
        if image.intrinsic_dim(rng)? < n {
            return Ok(FiberReport {
                k,
                trials,
                per_prime: Vec::new(),
                consensus_d: None,
                verdict: Verdict::NotGenericallyFinite,
            });
        }
        let seeds: Vec<u64> = (0..trials).map(|_| rng.next_u64()).collect();
        let results: Vec<FiberTrial> = seeds
            .par_iter()
            .map(|&s| fiber_trial(&x, k, &mut seeded(s)))
            .collect::<Result<_>>()?;
        let cardinalities: Vec<usize> = results.iter().map(|t| t.cardinality).collect();
        per_prime.push(PrimeFibers {
            prime: p,
            max_d: cardinalities.iter().copied().max().unwrap_or(0),
            cardinalities,
            trials: results,
        });
    }
    let maxima: Vec<usize> = per_prime.iter().map(|f| f.max_d).collect();
    let verdict = if maxima.len() < 2 {
        Verdict::Inconclusive
    } else if maxima.iter().all(|&d| d == 1) {
        Verdict::BirationalEvidence
    } else if maxima.iter().all(|&d| d >= 2 && d == maxima[0]) {
        Verdict::NonBirationalEvidence
    } else {
        Verdict::Inconclusive
    };
    Ok(FiberReport {
        k,
        trials,
        per_prime,
        consensus_d: maxima.iter().copied().max(),
        verdict,
    })
}

fn fiber_trial<R: Rng + ?Sized>(x: &VarietyHandle, k: usize, rng: &mut R) -> Result<FiberTrial> {
    let field = x.field();
    let (tp, _) = tangential_projection(x, k, rng)?;
    let x0 = loop {
        let w = x.sample(rng)?;
        if tp.proj.mul_vec(&w.point)?.iter().any(|s| !s.is_zero()) {
            break w;
        }
    };
    // The fiber through x0 is X ∩ span(center, x0).
    let span = tp
        .center_frame
        .hcat(&Matrix::from_columns(x.coord_len(), std::slice::from_ref(&x0.point), field)?)?;
    let forms = span.left_kernel().columns();
    let mut preimages: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut params_of = Vec::new();
    let mut center_hits = 0usize;
    let mut failure = None;
    x.enumerate_points(rng, &forms, &[], &mut |params| {
        if failure.is_some() {
            return;
        }
        let point = match x.point_at(&params) {
            Ok(pt) => pt,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let Some(point) = normalize(point) else {
            return;
        };
        let image = tp.proj.mul_vec(&point).expect("consistent sizes");
        if image.iter().all(|s| s.is_zero()) {
            center_hits += 1;
            return;
        }
        let key: Vec<u64> = point.iter().map(|s| s.residue().expect("prime field")).collect();
        if preimages.insert(key) {
            params_of.push(params);
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let source_key: Vec<u64> = x0.point.iter().map(|s| s.residue().expect("prime field")).collect();
    if !preimages.contains(&source_key) {
        return Err(Error::IllFormed(format!(
            "{}: enumeration missed the source point",
            x.label()
        )));
    }
    let reference = tp.proj.mul(&x.tangent_frame(&x0)?)?;
    let mut agree = true;
    for params in &params_of {
        let w = x.witness_at(params.clone())?;
        match x.tangent_frame(&w) {
            Ok(f) => agree &= same_span(&tp.proj.mul(&f)?, &reference)?,
            Err(Error::SingularWitness) => agree = false,
            Err(e) => return Err(e),
        }
    }
    Ok(FiberTrial {
        cardinality: preimages.len(),
        center_hits,
        projected_frames_agree: agree,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorialityCheck {
    pub rank_projected: usize,
    pub rank_image: usize,
    pub rank_joint: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorialityReport {
    pub k: usize,
    pub checks: Vec<FunctorialityCheck>,
    pub all_equal: bool,
}

/// Compares the projected source frame at fresh witnesses with the tangent
/// frame of the image computed from its own local chart.
pub fn tangent_functoriality_check<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k: usize,
    witnesses: usize,
    rng: &mut R,
) -> Result<FunctorialityReport> {
    let (tp, image) = tangential_projection(x, k, rng)?;
    let n = x.intrinsic_dim(rng)?;
    if image.intrinsic_dim(rng)? < n {
        return Err(Error::Unsupported(format!(
            "tau_{k} of {} is not generically finite",
            x.label()
        )));
    }
    let mut checks = Vec::new();
    while checks.len() < witnesses.max(1) {
        let w = x.sample(rng)?;
        let projected = tp.proj.mul(&x.tangent_frame(&w)?)?;
        let Ok(iw) = image.witness_at(w.params.clone()) else {
            continue;
        };
        let chart = image.chart_frame(&iw)?;
        let rank_projected = projected.rank();
        let rank_image = chart.rank();
        let rank_joint = projected.hcat(&chart)?.rank();
        checks.push(FunctorialityCheck {
            rank_projected,
            rank_image,
            rank_joint,
            equal: rank_projected == rank_joint && rank_image == rank_joint,
        });
    }
    Ok(FunctorialityReport {
        k,
        all_equal: checks.iter().all(|c| c.equal),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::{counter1, BuiltinOptions};

    #[test]
    fn veronese_cubic_surface_is_birational() {
        let mut rng = seeded(1);
        let r = fiber_probe(|f| VarietyHandle::veronese(2, 3, f), 1, &[1009, 2003], 3, &mut rng).unwrap();
        assert_eq!(r.verdict, Verdict::BirationalEvidence, "{r:?}");
        assert_eq!(r.consensus_d, Some(1));
    }

    #[test]
    fn veronese_surface_not_generically_finite() {
        let mut rng = seeded(2);
        let r = fiber_probe(|f| VarietyHandle::veronese(2, 2, f), 1, &[1009, 2003], 2, &mut rng).unwrap();
        assert_eq!(r.verdict, Verdict::NotGenericallyFinite);
    }

    #[test]
    fn counter1_fibers() {
        let mut rng = seeded(3);
        let r = fiber_probe(
            |f| counter1(&BuiltinOptions::new(f)),
            1,
            &[1009, 2003],
            8,
            &mut rng,
        )
        .unwrap();
        assert_eq!(r.consensus_d, Some(3), "{r:?}");
    }

    #[test]
    fn functoriality_on_cubic_surface() {
        let v = VarietyHandle::veronese(2, 3, FieldSpec::analysis()).unwrap();
        let mut rng = seeded(4);
        let r = tangent_functoriality_check(&v, 1, 3, &mut rng).unwrap();
        assert!(r.all_equal);
        assert!(r.checks.iter().all(|c| c.rank_joint == 3));
    }
}
