//! Sampleable varieties.
//!
//! Every handle is a constrained parameterization: a polynomial (or locally
//! polynomial) map `Phi: K^M -> K^(r+1)` together with equations `g_1..g_c` on
//! the parameter space, so that the variety is the closure of `Phi(V(g))`.
//! Witnesses carry the full parameter vector; the n-dimensional local chart used
//! for second-order jets comes from the implicit function theorem applied to the
//! `g_i` at the witness.

mod builtins;
mod sampling;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    monomials_of_degree, subspace_intersect, FieldSpec, Jet2, MapJet, Matrix, MultiPoly, Scalar,
};
use crate::error::{Error, Result};

pub use builtins::{
    builtin, builtin_names, counter1, counter2, counter3, elliptic_curve, rational_normal_curve,
    BuiltinOptions,
};

/// Largest projective ambient dimension a constructor will build.
pub const DEFAULT_AMBIENT_CAP: usize = 120;
/// Draws allowed before sampling gives up.
pub const MAX_RESAMPLE: usize = 64;

/// A sampled point together with the parameters that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub params: Vec<Scalar>,
    /// Homogeneous coordinates, scaled so the last nonzero entry is 1.
    pub point: Vec<Scalar>,
}

/// The closed set of constructors.
#[derive(Clone, Debug)]
pub enum HandleKind {
    Parametric {
        map: Vec<MultiPoly>,
    },
    ImplicitPlaneCurve {
        f: MultiPoly,
        genus_hint: u32,
    },
    MapImage {
        base: Arc<VarietyHandle>,
        polys: Vec<MultiPoly>,
    },
    Cone {
        base: Arc<VarietyHandle>,
        vertex: Matrix,
    },
    HypersurfaceSection {
        base: Arc<VarietyHandle>,
        h: MultiPoly,
    },
    HyperplaneSection {
        base: Arc<VarietyHandle>,
        form: Vec<Scalar>,
    },
    Projection {
        base: Arc<VarietyHandle>,
        proj: Matrix,
    },
}

#[derive(Clone, Debug)]
pub struct VarietyHandle {
    kind: HandleKind,
    label: String,
    field: FieldSpec,
    coord_len: usize,
    ambient_r: usize,
    nparams: usize,
    nconstraints: usize,
}

fn build_rng() -> ChaCha8Rng {
    // Construction-time sanity checks use a fixed stream so handles are reproducible.
    ChaCha8Rng::seed_from_u64(0x5eed_c0de)
}

impl VarietyHandle {
    /// A parametric variety given by `map` on an affine chart of its parameter space.
    pub fn parametric(map: Vec<MultiPoly>, label: impl Into<String>) -> Result<Self> {
        let first = map
            .first()
            .ok_or_else(|| Error::InvalidConstruction("empty parameterization".into()))?;
        let (nvars, field) = (first.nvars(), first.field());
        if map.iter().any(|p| p.nvars() != nvars || p.field() != field) {
            return Err(Error::InvalidConstruction(
                "parameterization components live in different rings".into(),
            ));
        }
        check_cap(map.len() - 1)?;
        Ok(VarietyHandle {
            label: label.into(),
            field,
            coord_len: map.len(),
            ambient_r: map.len() - 1,
            nparams: nvars,
            nconstraints: 0,
            kind: HandleKind::Parametric { map },
        })
    }

    /// The degree-`d` Veronese embedding of `P^n`, on the chart where the last
    /// homogeneous coordinate is 1.
    pub fn veronese(n: usize, d: u32, field: FieldSpec) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidConstruction("veronese needs n >= 1 and d >= 1".into()));
        }
        let count = binomial(n + d as usize, d as usize)
            .ok_or(Error::AmbientCap {
                requested: usize::MAX,
                cap: DEFAULT_AMBIENT_CAP,
            })?;
        check_cap(count - 1)?;
        let map = monomials_of_degree(n + 1, d)
            .into_iter()
            .map(|e| {
                MultiPoly::from_terms(n, field, [(e[..n].to_vec(), field.one())])
                    .expect("well-formed monomial")
            })
            .collect();
        Self::parametric(map, format!("veronese({n},{d})"))
    }

    /// A plane curve `f(x0, x1, x2) = 0`, sampled on the chart `x2 = 1`.
    pub fn implicit_plane_curve(f: MultiPoly, genus_hint: u32) -> Result<Self> {
        let field = f.field();
        if !field.is_prime_field() {
            return Err(Error::RequiresPrimeField("implicit_plane_curve"));
        }
        if f.nvars() != 3 {
            return Err(Error::ArityMismatch {
                expected: 3,
                found: f.nvars(),
            });
        }
        if f.is_zero() || !f.is_homogeneous() || f.degree() == Some(0) {
            return Err(Error::InvalidConstruction(
                "plane curve equation must be a nonconstant homogeneous polynomial".into(),
            ));
        }
        if !sampling::squarefree_on_lines(&f, &mut build_rng())? {
            return Err(Error::InvalidConstruction(format!(
                "plane curve {f} is not squarefree"
            )));
        }
        Ok(VarietyHandle {
            label: format!("implicit_plane_curve(deg {})", f.degree().unwrap_or(0)),
            field,
            coord_len: 3,
            ambient_r: 2,
            nparams: 2,
            nconstraints: 1,
            kind: HandleKind::ImplicitPlaneCurve { f, genus_hint },
        })
    }

    /// Image of `base` under a polynomial map on its ambient coordinates.
    pub fn map_image(base: Arc<VarietyHandle>, polys: Vec<MultiPoly>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::InvalidConstruction("empty polynomial map".into()));
        }
        let mut degree = None;
        for p in &polys {
            if p.nvars() != base.coord_len {
                return Err(Error::ArityMismatch {
                    expected: base.coord_len,
                    found: p.nvars(),
                });
            }
            if p.field() != base.field {
                return Err(Error::FieldMismatch(p.field().to_string(), base.field.to_string()));
            }
            if p.is_zero() {
                continue;
            }
            if !p.is_homogeneous() || degree.is_some_and(|d| Some(d) != p.degree()) {
                return Err(Error::InvalidConstruction(
                    "map components must be homogeneous of one common degree".into(),
                ));
            }
            degree = p.degree();
        }
        check_cap(polys.len() - 1)?;
        let handle = VarietyHandle {
            label: format!("map_image({})", base.label),
            field: base.field,
            coord_len: polys.len(),
            ambient_r: polys.len() - 1,
            nparams: base.nparams,
            nconstraints: base.nconstraints,
            kind: HandleKind::MapImage { base, polys },
        };
        // The base must not lie in the base locus of the map.
        let mut rng = build_rng();
        let mut nonzero = false;
        for _ in 0..5 {
            let w = handle.base().expect("map image has a base").sample(&mut rng)?;
            if handle.point_at(&w.params)?.iter().any(|s| !s.is_zero()) {
                nonzero = true;
                break;
            }
        }
        if !nonzero {
            return Err(Error::InvalidConstruction(
                "image point is identically zero on the base".into(),
            ));
        }
        Ok(handle)
    }

    /// Cone over `base` with vertex spanned by the columns of `vertex`.
    ///
    /// The base is expected to be already embedded in the full ambient space.
    pub fn cone(base: Arc<VarietyHandle>, vertex: Matrix) -> Result<Self> {
        if vertex.rows() != base.coord_len {
            return Err(Error::DimensionMismatch(format!(
                "vertex has {} rows, ambient has {} coordinates",
                vertex.rows(),
                base.coord_len
            )));
        }
        if vertex.field() != base.field {
            return Err(Error::FieldMismatch(vertex.field().to_string(), base.field.to_string()));
        }
        if vertex.rank() != vertex.cols() {
            return Err(Error::InvalidConstruction("vertex columns are dependent".into()));
        }
        // Span of the base from sampled points, then disjointness by rank.
        let mut rng = build_rng();
        let pts: Vec<Vec<Scalar>> = (0..base.coord_len + 4)
            .map(|_| base.sample(&mut rng).map(|w| w.point))
            .collect::<Result<_>>()?;
        let span = Matrix::from_columns(base.coord_len, &pts, base.field)?;
        if span.hcat(&vertex)?.rank() != span.rank() + vertex.cols() {
            return Err(Error::InvalidConstruction(
                "vertex meets the linear span of the base".into(),
            ));
        }
        let mut handle = VarietyHandle {
            label: format!("cone({}, vertex dim {})", base.label, vertex.cols() as i64 - 1),
            field: base.field,
            coord_len: base.coord_len,
            ambient_r: base.coord_len - 1,
            nparams: base.nparams + vertex.cols(),
            nconstraints: base.nconstraints,
            kind: HandleKind::Cone { base, vertex },
        };
        handle.ambient_r -= handle.linear_equations().len();
        Ok(handle)
    }

    /// Intersection of `base` with the hypersurface `h = 0`.
    pub fn hypersurface_section(base: Arc<VarietyHandle>, h: MultiPoly) -> Result<Self> {
        if !base.field.is_prime_field() {
            return Err(Error::RequiresPrimeField("hypersurface_section"));
        }
        if h.nvars() != base.coord_len {
            return Err(Error::ArityMismatch {
                expected: base.coord_len,
                found: h.nvars(),
            });
        }
        if h.field() != base.field {
            return Err(Error::FieldMismatch(h.field().to_string(), base.field.to_string()));
        }
        if h.is_zero() || !h.is_homogeneous() || h.degree() == Some(0) {
            return Err(Error::InvalidConstruction(
                "section equation must be a nonconstant homogeneous polynomial".into(),
            ));
        }
        let mut rng = build_rng();
        let mut vanishes = true;
        for _ in 0..5 {
            let w = base.sample(&mut rng)?;
            if !h.eval(&w.point)?.is_zero() {
                vanishes = false;
                break;
            }
        }
        if vanishes {
            return Err(Error::InvalidConstruction(
                "hypersurface contains the base variety".into(),
            ));
        }
        Ok(VarietyHandle {
            label: format!("hypersurface_section({}, deg {})", base.label, h.degree().unwrap_or(0)),
            field: base.field,
            coord_len: base.coord_len,
            ambient_r: base.ambient_r,
            nparams: base.nparams,
            nconstraints: base.nconstraints + 1,
            kind: HandleKind::HypersurfaceSection { base, h },
        })
    }

    /// Intersection with the hyperplane `form · x = 0`.
    pub fn hyperplane_section(base: Arc<VarietyHandle>, form: Vec<Scalar>) -> Result<Self> {
        if form.len() != base.coord_len {
            return Err(Error::DimensionMismatch(format!(
                "hyperplane has {} coefficients, ambient has {}",
                form.len(),
                base.coord_len
            )));
        }
        if form.iter().all(Scalar::is_zero) {
            return Err(Error::InvalidConstruction("zero linear form".into()));
        }
        if base.ambient_r == 0 {
            return Err(Error::InvalidConstruction("cannot cut a point".into()));
        }
        Ok(VarietyHandle {
            label: format!("hyperplane_section({})", base.label),
            field: base.field,
            coord_len: base.coord_len,
            ambient_r: base.ambient_r - 1,
            nparams: base.nparams,
            nconstraints: base.nconstraints + 1,
            kind: HandleKind::HyperplaneSection { base, form },
        })
    }

    /// Section by a uniformly random hyperplane; requires dimension at least 2.
    pub fn generic_hyperplane_section<R: Rng + ?Sized>(
        base: Arc<VarietyHandle>,
        rng: &mut R,
    ) -> Result<Self> {
        let dim = base.intrinsic_dim(rng)?;
        if dim < 2 {
            return Err(Error::InvalidConstruction(format!(
                "hyperplane section needs dimension >= 2, got {dim}"
            )));
        }
        let field = base.field;
        let form = loop {
            let f: Vec<Scalar> = (0..base.coord_len).map(|_| field.random(rng)).collect();
            if f.iter().any(|s| !s.is_zero()) {
                break f;
            }
        };
        Self::hyperplane_section(base, form)
    }

    /// Image of `base` under the linear map `proj: K^(r+1) -> K^(s+1)`.
    pub fn projection(base: Arc<VarietyHandle>, proj: Matrix) -> Result<Self> {
        if proj.cols() != base.coord_len {
            return Err(Error::DimensionMismatch(format!(
                "projection has {} columns, ambient has {} coordinates",
                proj.cols(),
                base.coord_len
            )));
        }
        if proj.rows() == 0 {
            return Err(Error::CenterFillsAmbient);
        }
        let mut handle = VarietyHandle {
            label: format!("projection({} -> P^{})", base.label, proj.rows() - 1),
            field: base.field,
            coord_len: proj.rows(),
            ambient_r: proj.rows() - 1,
            nparams: base.nparams,
            nconstraints: base.nconstraints,
            kind: HandleKind::Projection { base, proj },
        };
        handle.ambient_r -= handle.linear_equations().len().min(handle.ambient_r);
        Ok(handle)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> &HandleKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Projective dimension of the ambient space (a hyperplane section lives in `P^(r-1)`).
    pub fn ambient_r(&self) -> usize {
        self.ambient_r
    }

    /// Number of homogeneous coordinates of witness points.
    pub fn coord_len(&self) -> usize {
        self.coord_len
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    /// Dimension of the local chart: parameters minus equations.
    pub fn chart_dim(&self) -> usize {
        self.nparams - self.nconstraints
    }

    pub fn base(&self) -> Option<&VarietyHandle> {
        match &self.kind {
            HandleKind::Parametric { .. } | HandleKind::ImplicitPlaneCurve { .. } => None,
            HandleKind::MapImage { base, .. }
            | HandleKind::Cone { base, .. }
            | HandleKind::HypersurfaceSection { base, .. }
            | HandleKind::HyperplaneSection { base, .. }
            | HandleKind::Projection { base, .. } => Some(base),
        }
    }

    /// Linear forms vanishing on the variety by construction (from hyperplane sections).
    pub fn linear_equations(&self) -> Vec<Vec<Scalar>> {
        match &self.kind {
            HandleKind::HyperplaneSection { base, form } => {
                let mut out = base.linear_equations();
                out.push(form.clone());
                out
            }
            HandleKind::HypersurfaceSection { base, .. } => base.linear_equations(),
            HandleKind::Cone { base, vertex } => base
                .linear_equations()
                .into_iter()
                .filter(|l| {
                    vertex
                        .columns()
                        .iter()
                        .all(|v| crate::algebra::matrix::dot(l, v).is_zero())
                })
                .collect(),
            HandleKind::Projection { base, proj } => {
                let pt = proj.transpose();
                base.linear_equations()
                    .iter()
                    .filter_map(|l| pt.solve(l).ok().flatten())
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Caller-asserted facts the computations cannot verify.
    pub fn assumptions(&self) -> Vec<String> {
        let mut out = match &self.kind {
            HandleKind::ImplicitPlaneCurve { genus_hint, .. } => vec![format!(
                "genus_hint {genus_hint} asserted, unverified{}",
                if *genus_hint >= 1 { " (curve taken as not uniruled)" } else { "" }
            )],
            HandleKind::HypersurfaceSection { .. } => {
                vec!["smoothness of the cutting hypersurface taken on faith".to_string()]
            }
            _ => Vec::new(),
        };
        if let Some(b) = self.base() {
            for a in b.assumptions() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    /// Description of the affine charts used for sampling.
    pub fn chart_description(&self) -> String {
        let own = match &self.kind {
            HandleKind::Parametric { .. } => "parameters on the affine chart (last homogeneous coordinate 1)",
            HandleKind::ImplicitPlaneCurve { .. } => "plane chart x2 = 1",
            HandleKind::Cone { .. } => "cone chart with base coefficient 1",
            _ => "",
        };
        match (own.is_empty(), self.base()) {
            (true, Some(b)) => b.chart_description(),
            (false, Some(b)) => format!("{own}; {}", b.chart_description()),
            (_, None) => own.to_string(),
        }
    }

    /// Unnormalized ambient point `Phi(params)`.
    pub fn point_at(&self, params: &[Scalar]) -> Result<Vec<Scalar>> {
        if params.len() != self.nparams {
            return Err(Error::ArityMismatch {
                expected: self.nparams,
                found: params.len(),
            });
        }
        match &self.kind {
            HandleKind::Parametric { map } => map.iter().map(|p| p.eval(params)).collect(),
            HandleKind::ImplicitPlaneCurve { .. } => {
                Ok(vec![params[0].clone(), params[1].clone(), self.field.one()])
            }
            HandleKind::MapImage { base, polys } => {
                let b = base.point_at(params)?;
                polys.iter().map(|p| p.eval(&b)).collect()
            }
            HandleKind::Cone { base, vertex } => {
                let split = base.nparams;
                let mut x = base.point_at(&params[..split])?;
                let v = vertex.mul_vec(&params[split..])?;
                for (a, b) in x.iter_mut().zip(&v) {
                    *a = &*a + b;
                }
                Ok(x)
            }
            HandleKind::HypersurfaceSection { base, .. }
            | HandleKind::HyperplaneSection { base, .. } => base.point_at(params),
            HandleKind::Projection { base, proj } => proj.mul_vec(&base.point_at(params)?),
        }
    }

    pub fn witness_at(&self, params: Vec<Scalar>) -> Result<Witness> {
        let point = normalize(self.point_at(&params)?)
            .ok_or_else(|| Error::InvalidConstruction("parameters map to the zero vector".into()))?;
        Ok(Witness { params, point })
    }

    /// Second-order jet of `Phi` at `params` and the jets of the parameter-space equations.
    pub fn param_jet(&self, params: &[Scalar]) -> Result<(MapJet, Vec<Jet2>)> {
        if params.len() != self.nparams {
            return Err(Error::ArityMismatch {
                expected: self.nparams,
                found: params.len(),
            });
        }
        match &self.kind {
            HandleKind::Parametric { map } => Ok((MapJet::of_polys(map, params)?, Vec::new())),
            HandleKind::ImplicitPlaneCurve { f, .. } => {
                let field = self.field;
                let plane = [
                    MultiPoly::var(0, 2, field),
                    MultiPoly::var(1, 2, field),
                    MultiPoly::constant(field.one(), 2),
                ];
                let phi = MapJet::of_polys(&plane, params)?;
                let g = phi.compose_scalar(f)?;
                Ok((phi, vec![g]))
            }
            HandleKind::MapImage { base, polys } => {
                let (phi, cons) = base.param_jet(params)?;
                Ok((phi.compose_map(polys)?, cons))
            }
            HandleKind::Cone { base, vertex } => {
                let split = base.nparams;
                let m = vertex.cols();
                let (bphi, bcons) = base.param_jet(&params[..split])?;
                let field = self.field;
                let zero_vec = vec![field.zero(); self.coord_len];
                let mut value = bphi.value.clone();
                let mu_part = vertex.mul_vec(&params[split..])?;
                for (a, b) in value.iter_mut().zip(&mu_part) {
                    *a = &*a + b;
                }
                let mut first = bphi.first.clone();
                first.extend(vertex.columns());
                let total = split + m;
                let second = (0..total)
                    .map(|i| {
                        (0..total)
                            .map(|j| {
                                if i < split && j < split {
                                    bphi.second[i][j].clone()
                                } else {
                                    zero_vec.clone()
                                }
                            })
                            .collect()
                    })
                    .collect();
                let cons = bcons.iter().map(|g| extend_jet(g, m)).collect();
                Ok((
                    MapJet {
                        value,
                        first,
                        second,
                    },
                    cons,
                ))
            }
            HandleKind::HypersurfaceSection { base, h } => {
                let (phi, mut cons) = base.param_jet(params)?;
                cons.push(phi.compose_scalar(h)?);
                Ok((phi, cons))
            }
            HandleKind::HyperplaneSection { base, form } => {
                let (phi, mut cons) = base.param_jet(params)?;
                cons.push(phi.linear_form(form)?);
                Ok((phi, cons))
            }
            HandleKind::Projection { base, proj } => {
                let (phi, cons) = base.param_jet(params)?;
                Ok((phi.apply_linear(proj)?, cons))
            }
        }
    }

    /// Second-order jet of a local parameterization of the variety at `w`,
    /// in `chart_dim()` parameters.
    pub fn chart_jet(&self, w: &Witness) -> Result<MapJet> {
        let (phi, cons) = self.param_jet(&w.params)?;
        reduce_chart(&phi, &cons)
    }

    /// Matrix whose columns span the affine cone over the tangent space at `w`.
    pub fn tangent_frame(&self, w: &Witness) -> Result<Matrix> {
        self.frame_at(&w.params)
    }

    fn frame_at(&self, params: &[Scalar]) -> Result<Matrix> {
        let field = self.field;
        match &self.kind {
            HandleKind::Parametric { .. } => {
                let (phi, _) = self.param_jet(params)?;
                let mut cols = vec![phi.value];
                cols.extend(phi.first);
                Matrix::from_columns(self.coord_len, &cols, field)
            }
            HandleKind::ImplicitPlaneCurve { f, .. } => {
                let p = self.point_at(params)?;
                let grad: Vec<Scalar> = (0..3)
                    .map(|i| f.derivative(i).eval(&p))
                    .collect::<Result<_>>()?;
                if grad.iter().all(Scalar::is_zero) {
                    return Err(Error::SingularWitness);
                }
                let kernel = Matrix::from_rows(vec![grad], field)?.kernel();
                Matrix::from_columns(3, &[p], field)?.hcat(&kernel)?.column_basis().pipe(Ok)
            }
            HandleKind::MapImage { base, polys } => {
                let bp = base.point_at(params)?;
                let jac_rows: Vec<Vec<Scalar>> = polys
                    .iter()
                    .map(|f| (0..base.coord_len).map(|i| f.derivative(i).eval(&bp)).collect())
                    .collect::<Result<_>>()?;
                let jac = Matrix::from_rows(jac_rows, field)?;
                jac.mul(&base.frame_at(params)?)
            }
            HandleKind::Cone { base, vertex } => {
                base.frame_at(&params[..base.nparams])?.hcat(vertex)
            }
            HandleKind::HypersurfaceSection { base, h } => {
                let x = self.point_at(params)?;
                let grad: Vec<Scalar> = (0..self.coord_len)
                    .map(|i| h.derivative(i).eval(&x))
                    .collect::<Result<_>>()?;
                let kernel = Matrix::from_rows(vec![grad], field)?.kernel();
                subspace_intersect(&base.frame_at(params)?, &kernel)
            }
            HandleKind::HyperplaneSection { base, form } => {
                let kernel = Matrix::from_rows(vec![form.clone()], field)?.kernel();
                subspace_intersect(&base.frame_at(params)?, &kernel)
            }
            HandleKind::Projection { base, proj } => proj.mul(&base.frame_at(params)?),
        }
    }

    /// Frame assembled from the local chart: the point and its chart derivatives.
    pub fn chart_frame(&self, w: &Witness) -> Result<Matrix> {
        let jet = self.chart_jet(w)?;
        let mut cols = vec![jet.value];
        cols.extend(jet.first);
        Matrix::from_columns(self.coord_len, &cols, self.field)
    }

    /// Second-order jet of `form ∘ Phi` on the local chart at `w`.
    pub fn pullback_jet2(&self, form: &[Scalar], w: &Witness) -> Result<Jet2> {
        self.chart_jet(w)?.linear_form(form)
    }

    /// Samples a general point, redrawing degenerate draws up to [`MAX_RESAMPLE`] times.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Witness> {
        let mut last_reason = String::from("no draw succeeded");
        for _ in 0..MAX_RESAMPLE {
            let Some(params) = self.draw(rng, &[], &[])? else {
                last_reason = "no rational solution on the sampling line".into();
                continue;
            };
            let Some(point) = normalize(self.point_at(&params)?) else {
                last_reason = "zero image point".into();
                continue;
            };
            let (_, cons) = self.param_jet(&params)?;
            if !constraints_smooth(&cons, self.field) {
                last_reason = "singular point".into();
                continue;
            }
            return Ok(Witness { params, point });
        }
        Err(Error::SamplingExhausted {
            label: self.label.clone(),
            attempts: MAX_RESAMPLE,
            reason: last_reason,
        })
    }

    /// Intrinsic dimension: tangent-frame rank minus one, required to agree on
    /// `samples` (at least three) independent witnesses.
    pub fn intrinsic_dim<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let mut seen = None;
        for _ in 0..3 {
            let w = self.sample(rng)?;
            let r = self.tangent_frame(&w)?.rank();
            if r == 0 {
                return Err(Error::IllFormed(format!("{}: zero tangent frame", self.label)));
            }
            match seen {
                None => seen = Some(r),
                Some(s) if s != r => {
                    return Err(Error::IllFormed(format!(
                        "{}: tangent frame rank varies ({s} vs {r}) across witnesses",
                        self.label
                    )))
                }
                _ => {}
            }
        }
        Ok(seen.expect("three samples") - 1)
    }

    /// Calls `visit` with the parameters of every `F_p`-point of the sampling
    /// charts that also satisfies the extra linear and polynomial equations.
    pub fn enumerate_points<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        linear: &[Vec<Scalar>],
        polys: &[MultiPoly],
        visit: &mut dyn FnMut(Vec<Scalar>),
    ) -> Result<()> {
        self.enumerate(rng, linear, polys, visit)
    }
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}
impl<T> Pipe for T {}

impl fmt::Display for VarietyHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in P^{} over {}", self.label, self.ambient_r, self.field)
    }
}

fn check_cap(r: usize) -> Result<()> {
    if r > DEFAULT_AMBIENT_CAP {
        return Err(Error::AmbientCap {
            requested: r,
            cap: DEFAULT_AMBIENT_CAP,
        });
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Scales so that the last nonzero coordinate is 1; `None` for the zero vector.
pub fn normalize(v: Vec<Scalar>) -> Option<Vec<Scalar>> {
    let last = v.iter().rposition(|s| !s.is_zero())?;
    let inv = v[last].inv().expect("nonzero");
    Some(v.iter().map(|s| s * &inv).collect())
}

fn extend_jet(g: &Jet2, extra: usize) -> Jet2 {
    let n = g.nvars();
    let field = g.field();
    let mut out = Jet2::zero(n + extra, field);
    out.value = g.value.clone();
    out.gradient[..n].clone_from_slice(&g.gradient);
    for i in 0..n {
        for j in 0..n {
            out.hessian.set(i, j, g.hessian.get(i, j).clone());
        }
    }
    out
}

fn jacobian(cons: &[Jet2], nparams: usize, field: FieldSpec) -> Result<Matrix> {
    if cons.is_empty() {
        return Ok(Matrix::zeros(0, nparams, field));
    }
    Matrix::from_rows(cons.iter().map(|g| g.gradient.clone()).collect(), field)
}

fn constraints_smooth(cons: &[Jet2], field: FieldSpec) -> bool {
    if cons.is_empty() {
        return true;
    }
    let n = cons[0].nvars();
    jacobian(cons, n, field).map(|j| j.rank() == cons.len()).unwrap_or(false)
}

/// Implicit-function reduction: restricts the jet of `Phi` to the smooth locus
/// `V(g_1..g_c)` through the current point, parameterized by the free coordinates.
fn reduce_chart(phi: &MapJet, cons: &[Jet2]) -> Result<MapJet> {
    let m = phi.nparams();
    let field = phi.field();
    if cons.is_empty() {
        return Ok(phi.clone());
    }
    let jac = jacobian(cons, m, field)?;
    if jac.rank() != cons.len() {
        return Err(Error::SingularWitness);
    }
    // Tangent directions of the constraint locus, one per free coordinate.
    let tangents = jac.kernel().columns();
    let n = tangents.len();
    let push = |dir: &[Scalar]| -> Vec<Scalar> {
        let mut out = vec![field.zero(); phi.target_len()];
        for (a, c) in dir.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, d) in out.iter_mut().zip(&phi.first[a]) {
                *o = &*o + &(c * d);
            }
        }
        out
    };
    let first: Vec<Vec<Scalar>> = tangents.iter().map(|t| push(t)).collect();
    let mut second = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for k in i..n {
            // Second derivative of the pivot coordinates along the chart:
            // J w = -(t_i^T G_l t_k)_l, free coordinates have zero second derivative.
            let rhs: Vec<Scalar> = cons
                .iter()
                .map(|g| {
                    let gt = g.hessian.mul_vec(&tangents[k]).expect("square hessian");
                    -crate::algebra::matrix::dot(&tangents[i], &gt)
                })
                .collect();
            let w = jac
                .solve(&rhs)?
                .ok_or_else(|| Error::IllFormed("inconsistent chart equations".into()))?;
            let mut v = push(&w);
            for a in 0..m {
                let ta = &tangents[i][a];
                if ta.is_zero() {
                    continue;
                }
                for b in 0..m {
                    let tb = &tangents[k][b];
                    if tb.is_zero() {
                        continue;
                    }
                    let c = ta * tb;
                    for (o, d) in v.iter_mut().zip(&phi.second[a][b]) {
                        *o = &*o + &(&c * d);
                    }
                }
            }
            second[i][k] = v.clone();
            second[k][i] = v;
        }
    }
    Ok(MapJet {
        value: phi.value.clone(),
        first,
        second,
    })
}

/// Lagrange form of the constrained Hessian at a contact point: for `f = form ∘ Phi`
/// and equations `g`, with `grad f = sum lambda_l grad g_l`, returns
/// `(Hess f - sum lambda_l Hess g_l)` restricted to `ker(grad g)` in the kernel basis.
///
/// Fails with [`Error::NotTangent`] when `grad f` is not in the span of the `grad g_l`.
pub fn lagrange_hessian(
    handle: &VarietyHandle,
    form: &[Scalar],
    w: &Witness,
) -> Result<Matrix> {
    let (phi, cons) = handle.param_jet(&w.params)?;
    let f = phi.linear_form(form)?;
    let field = handle.field;
    let m = phi.nparams();
    let jac = jacobian(&cons, m, field)?;
    let lambda = if cons.is_empty() {
        if !f.gradient_is_zero() {
            return Err(Error::NotTangent);
        }
        Vec::new()
    } else {
        jac.transpose().solve(&f.gradient)?.ok_or(Error::NotTangent)?
    };
    let mut hess = f.hessian.clone();
    for (l, g) in lambda.iter().zip(&cons) {
        for i in 0..m {
            for j in 0..m {
                let v = hess.get(i, j) - &(l * g.hessian.get(i, j));
                hess.set(i, j, v);
            }
        }
    }
    let basis = if cons.is_empty() {
        Matrix::identity(m, field)
    } else {
        jac.kernel()
    };
    basis.transpose().mul(&hess)?.mul(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::same_span;
    use crate::rng::seeded;

    fn fp() -> FieldSpec {
        FieldSpec::analysis()
    }

    #[test]
    fn veronese_ambient_dimensions() {
        assert_eq!(VarietyHandle::veronese(2, 2, fp()).unwrap().ambient_r(), 5);
        for d in 1..8 {
            assert_eq!(VarietyHandle::veronese(1, d, fp()).unwrap().ambient_r(), d as usize);
        }
        assert!(matches!(
            VarietyHandle::veronese(4, 6, fp()),
            Err(Error::AmbientCap { .. })
        ));
    }

    #[test]
    fn veronese_cubic_surface_has_dimension_two() {
        let v = VarietyHandle::veronese(2, 3, fp()).unwrap();
        assert_eq!(v.ambient_r(), 9);
        let mut rng = seeded(3);
        assert_eq!(v.intrinsic_dim(&mut rng).unwrap(), 2);
    }

    #[test]
    fn witness_is_normalized_and_in_frame() {
        let v = VarietyHandle::veronese(2, 2, fp()).unwrap();
        let mut rng = seeded(5);
        for _ in 0..5 {
            let w = v.sample(&mut rng).unwrap();
            assert!(w.point.last().unwrap().is_one());
            let frame = v.tangent_frame(&w).unwrap();
            let p = Matrix::from_columns(6, std::slice::from_ref(&w.point), fp()).unwrap();
            assert!(crate::algebra::span_contains(&frame, &p).unwrap());
        }
    }

    #[test]
    fn cone_over_point_is_a_line() {
        let f = fp();
        let pt = VarietyHandle::parametric(
            vec![
                MultiPoly::constant(f.one(), 1),
                MultiPoly::zero(1, f),
                MultiPoly::zero(1, f),
            ],
            "point",
        )
        .unwrap();
        // A zero-parameter base is not expressible with one chart variable; use a
        // parameterization that ignores its variable instead.
        let vertex = Matrix::from_i64_rows(&[&[0], &[1], &[0]], f);
        let line = VarietyHandle::cone(Arc::new(pt), vertex).unwrap();
        let mut rng = seeded(1);
        assert_eq!(line.intrinsic_dim(&mut rng).unwrap(), 1);
    }

    #[test]
    fn cone_rejects_bad_vertices() {
        let f = fp();
        let c = Arc::new(VarietyHandle::veronese(1, 2, f).unwrap());
        let dependent = Matrix::from_i64_rows(&[&[1, 2], &[0, 0], &[0, 0]], f);
        assert!(VarietyHandle::cone(c.clone(), dependent).is_err());
        let meets = Matrix::from_i64_rows(&[&[1], &[0], &[0]], f);
        assert!(VarietyHandle::cone(c, meets).is_err());
    }

    #[test]
    fn hypersurface_section_must_not_contain_base() {
        let f = fp();
        let c = Arc::new(VarietyHandle::veronese(1, 2, f).unwrap());
        // The conic x0*x2 = x1^2 contains the whole curve.
        let h = MultiPoly::parse("x0*x2 - x1^2", 3, f).unwrap();
        assert!(VarietyHandle::hypersurface_section(c, h).is_err());
    }

    #[test]
    fn sections_need_prime_fields() {
        let q = FieldSpec::rationals();
        let c = Arc::new(VarietyHandle::veronese(2, 2, q).unwrap());
        let h = MultiPoly::parse("x0 + x5", 6, q).unwrap();
        assert!(matches!(
            VarietyHandle::hypersurface_section(c, h),
            Err(Error::RequiresPrimeField(_))
        ));
        let g = MultiPoly::parse("x0^3 + x1^3 + x2^3", 3, q).unwrap();
        assert!(VarietyHandle::implicit_plane_curve(g, 1).is_err());
    }

    #[test]
    fn nonsquarefree_curve_rejected() {
        let f = FieldSpec::prime(1009).unwrap();
        let g = MultiPoly::parse("(x0 - x1)^2*x2", 3, f).unwrap();
        assert!(VarietyHandle::implicit_plane_curve(g, 0).is_err());
    }

    #[test]
    fn frames_agree_with_chart_frames() {
        let mut rng = seeded(11);
        for h in [
            VarietyHandle::veronese(2, 3, fp()).unwrap(),
            counter1(&BuiltinOptions::new(fp())).unwrap(),
            counter3(3, &BuiltinOptions::new(fp())).unwrap(),
        ] {
            for _ in 0..3 {
                let w = h.sample(&mut rng).unwrap();
                let a = h.tangent_frame(&w).unwrap();
                let b = h.chart_frame(&w).unwrap();
                assert!(same_span(&a, &b).unwrap(), "{}", h.label());
            }
        }
    }
}
