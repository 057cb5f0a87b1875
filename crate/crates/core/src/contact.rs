//! Tangent hyperplanes at several general points and the corank estimate of
//! the contact locus dimension.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Matrix, Scalar};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::secant::{defect, derived_handle, general_witnesses, min_defective_k, stack};
use crate::varieties::{VarietyHandle, Witness};

/// Hyperplane draws per witness tuple.
pub const DEFAULT_SAMPLES: usize = 5;
/// Witness tuples per estimate.
pub const WITNESS_TUPLES: usize = 3;

#[derive(Clone, Debug)]
pub struct TangentHyperplane {
    pub coeffs: Vec<Scalar>,
    pub witnesses: Vec<Witness>,
    /// Dimension of the space of tangent forms, not counting forms vanishing on
    /// the whole variety by construction.
    pub solution_space_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContactReport {
    pub k: usize,
    pub coranks: Vec<usize>,
    /// `None` when no tangent hyperplane exists.
    pub nu_estimate: Option<usize>,
    pub weakly_defective: Option<bool>,
    pub samples: usize,
    pub solution_space_dim: usize,
}

/// A uniformly random hyperplane containing the tangent spaces at all `witnesses`.
pub fn tangent_hyperplane<R: Rng + ?Sized>(
    x: &VarietyHandle,
    witnesses: &[Witness],
    rng: &mut R,
) -> Result<TangentHyperplane> {
    let field = x.field();
    let frames = witnesses
        .iter()
        .map(|w| x.tangent_frame(w))
        .collect::<Result<Vec<_>>>()?;
    let forms = stack(&frames, x.coord_len(), field)?.left_kernel();
    let trivial = x.linear_equations();
    let trivial_rank = if trivial.is_empty() {
        0
    } else {
        Matrix::from_rows(trivial.clone(), field)?.rank()
    };
    let solution_space_dim = forms.cols() - trivial_rank.min(forms.cols());
    if solution_space_dim == 0 {
        return Err(Error::NoTangentHyperplane);
    }
    let basis = forms.columns();
    loop {
        let weights: Vec<Scalar> = basis.iter().map(|_| field.random(rng)).collect();
        let coeffs: Vec<Scalar> = (0..x.coord_len())
            .map(|i| {
                basis
                    .iter()
                    .zip(&weights)
                    .fold(field.zero(), |acc, (b, c)| &acc + &(&b[i] * c))
            })
            .collect();
        // Reject draws lying in the span of the trivial forms.
        let mut rows = trivial.clone();
        rows.push(coeffs.clone());
        if Matrix::from_rows(rows, field)?.rank() > trivial_rank {
            return Ok(TangentHyperplane {
                coeffs,
                witnesses: witnesses.to_vec(),
                solution_space_dim,
            });
        }
    }
}

/// Corank of the Hessian of the hyperplane pulled back to the local chart at `w`,
/// net of any directions collapsed by the handle's own parameterization.
pub fn contact_corank(x: &VarietyHandle, h: &TangentHyperplane, w: &Witness) -> Result<usize> {
    let jet = x.pullback_jet2(&h.coeffs, w)?;
    if !jet.gradient_is_zero() {
        return Err(Error::NotTangent);
    }
    let local_dim = x.tangent_frame(w)?.rank() - 1;
    let rank = jet.hessian.rank();
    Ok(local_dim.saturating_sub(rank))
}

/// Solution-space dimension, all coranks, and the per-hyperplane maxima.
type TupleCoranks = (usize, Vec<usize>, Vec<usize>);

/// Minimum over hyperplanes of the maximum witness corank.
pub fn nu_estimate<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k: usize,
    samples: usize,
    rng: &mut R,
) -> Result<ContactReport> {
    let n = x.intrinsic_dim(rng)?;
    let samples = samples.max(1);
    let seeds: Vec<u64> = (0..WITNESS_TUPLES).map(|_| rng.next_u64()).collect();
    let per_tuple: Vec<Option<TupleCoranks>> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = seeded(s);
            let (ws, _) = general_witnesses(x, k + 1, n, &mut rng)?;
            let mut coranks = Vec::new();
            let mut maxima = Vec::new();
            let mut space = 0;
            for _ in 0..samples {
                let h = match tangent_hyperplane(x, &ws, &mut rng) {
                    Ok(h) => h,
                    Err(Error::NoTangentHyperplane) => return Ok(None),
                    Err(e) => return Err(e),
                };
                space = h.solution_space_dim;
                let cs = ws
                    .iter()
                    .map(|w| contact_corank(x, &h, w))
                    .collect::<Result<Vec<_>>>()?;
                maxima.push(*cs.iter().max().expect("k+1 >= 1 witnesses"));
                coranks.extend(cs);
            }
            Ok(Some((space, coranks, maxima)))
        })
        .collect::<Result<_>>()?;
    if per_tuple.iter().any(Option::is_none) {
        return Ok(ContactReport {
            k,
            coranks: Vec::new(),
            nu_estimate: None,
            weakly_defective: None,
            samples,
            solution_space_dim: 0,
        });
    }
    let mut coranks = Vec::new();
    let mut nu = usize::MAX;
    let mut space = usize::MAX;
    for (s, cs, maxima) in per_tuple.into_iter().flatten() {
        space = space.min(s);
        coranks.extend(cs);
        nu = nu.min(maxima.into_iter().min().expect("samples >= 1"));
    }
    Ok(ContactReport {
        k,
        coranks,
        nu_estimate: Some(nu),
        weakly_defective: Some(nu >= 1),
        samples,
        solution_space_dim: space,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NuTowerReport {
    pub k: usize,
    pub nu_k: Option<usize>,
    pub nu_1_derived: Option<usize>,
    pub equal: bool,
}

/// Compares `nu_k(X)` with `nu_1(X_(k-1))`.
pub fn check_nu_tower<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k: usize,
    samples: usize,
    rng: &mut R,
) -> Result<NuTowerReport> {
    if k == 0 {
        return Err(Error::InvalidConstruction("tower check needs k >= 1".into()));
    }
    let nu_k = nu_estimate(x, k, samples, rng)?.nu_estimate;
    let y = derived_handle(x, k - 1, rng)?;
    let nu_1_derived = nu_estimate(&y, 1, samples, rng)?.nu_estimate;
    Ok(NuTowerReport {
        k,
        nu_k,
        nu_1_derived,
        equal: nu_k == nu_1_derived,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NuDeltaReport {
    pub k: usize,
    pub delta: usize,
    pub nu: Option<usize>,
    pub min_defective_k: Option<usize>,
    /// Whether `k` is the minimal defective index.
    pub hypothesis_met: bool,
    /// `None` when the contact estimate is undefined.
    pub holds: Option<bool>,
}

/// Checks `nu_k >= delta_k`, recording whether `k` is the minimal defective index.
pub fn check_nu_ge_delta<R: Rng + ?Sized>(
    x: &VarietyHandle,
    k: usize,
    trials: usize,
    samples: usize,
    rng: &mut R,
) -> Result<NuDeltaReport> {
    let delta = defect(x, k, trials, rng)?.delta;
    let min_k = min_defective_k(x, k.max(1), trials, rng)?;
    let nu = nu_estimate(x, k, samples, rng)?.nu_estimate;
    Ok(NuDeltaReport {
        k,
        delta,
        nu,
        min_defective_k: min_k,
        hypothesis_met: min_k == Some(k),
        holds: nu.map(|v| v >= delta),
    })
}
