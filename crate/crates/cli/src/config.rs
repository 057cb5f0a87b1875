//! Run configuration: a TOML document with a nested variety constructor tree.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use terracini::algebra::{FieldSpec, Matrix, MultiPoly, Scalar, ANALYSIS_PRIME, ENUMERATION_PRIMES};
use terracini::rng::derive;
use terracini::varieties::{builtin, BuiltinOptions, VarietyHandle};
use terracini::Error;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Csv,
    Structured,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

/// Constructor tree mirroring the handle kinds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VarietyExpr {
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        section_seed: Option<u64>,
    },
    Veronese {
        n: usize,
        d: u32,
    },
    Parametric {
        nparams: usize,
        map: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    ImplicitPlaneCurve {
        equation: String,
        #[serde(default)]
        genus_hint: u32,
    },
    MapImage {
        base: Box<VarietyExpr>,
        polys: Vec<String>,
    },
    Cone {
        base: Box<VarietyExpr>,
        /// Vertex basis vectors, one per entry.
        vertex: Vec<Vec<i64>>,
    },
    HypersurfaceSection {
        base: Box<VarietyExpr>,
        equation: String,
    },
    /// A fixed hyperplane, or a random one drawn from the run seed when `form` is absent.
    HyperplaneSection {
        base: Box<VarietyExpr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        form: Option<Vec<i64>>,
    },
    Projection {
        base: Box<VarietyExpr>,
        /// Matrix rows.
        matrix: Vec<Vec<i64>>,
    },
}

fn default_field() -> u64 {
    ANALYSIS_PRIME
}
fn default_enum_primes() -> Vec<u64> {
    ENUMERATION_PRIMES.to_vec()
}
fn default_k_range() -> [usize; 2] {
    [1, 1]
}
fn default_trials() -> usize {
    terracini::secant::DEFAULT_TRIALS
}
fn default_samples() -> usize {
    terracini::contact::DEFAULT_SAMPLES
}
fn default_fiber_trials() -> usize {
    terracini::fiber::DEFAULT_FIBER_TRIALS
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub variety: VarietyExpr,
    #[serde(default = "default_field")]
    pub field: u64,
    #[serde(default = "default_enum_primes")]
    pub enum_primes: Vec<u64>,
    #[serde(default = "default_k_range")]
    pub k_range: [usize; 2],
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_fiber_trials")]
    pub fiber_trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn parse(src: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(src).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn for_variety(variety: VarietyExpr) -> Self {
        RunConfig {
            variety,
            field: default_field(),
            enum_primes: default_enum_primes(),
            k_range: default_k_range(),
            trials: default_trials(),
            samples: default_samples(),
            fiber_trials: default_fiber_trials(),
            seed: 0,
            output: OutputConfig::default(),
        }
    }

    /// Structural checks that need no arithmetic.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.k_range[0] > self.k_range[1] {
            return bad(format!("k_range {:?} is decreasing", self.k_range));
        }
        if self.trials == 0 || self.samples == 0 || self.fiber_trials == 0 {
            return bad("trials, samples and fiber_trials must be positive".into());
        }
        FieldSpec::prime(self.field).map_err(|e| CliError::Config(format!("field: {e}")))?;
        for &p in &self.enum_primes {
            FieldSpec::prime(p).map_err(|e| CliError::Config(format!("enum_primes: {e}")))?;
        }
        validate_expr(&self.variety, "variety")
    }

    pub fn analysis_field(&self) -> FieldSpec {
        FieldSpec::prime(self.field).expect("validated")
    }

    pub fn build(&self, field: FieldSpec) -> Result<VarietyHandle, Error> {
        build_expr(&self.variety, field, self.seed, &mut 0)
    }
}

fn validate_expr(e: &VarietyExpr, path: &str) -> Result<(), CliError> {
    let bad = |m: String| Err(CliError::Config(format!("{path}: {m}")));
    match e {
        VarietyExpr::Builtin { .. } | VarietyExpr::Veronese { .. } => Ok(()),
        VarietyExpr::Parametric { nparams, map, .. } => {
            if *nparams == 0 || map.is_empty() {
                return bad("parametric needs nparams >= 1 and a nonempty map".into());
            }
            Ok(())
        }
        VarietyExpr::ImplicitPlaneCurve { .. } => Ok(()),
        VarietyExpr::MapImage { base, polys } => {
            if polys.is_empty() {
                return bad("map_image needs polys".into());
            }
            validate_expr(base, &format!("{path}.base"))
        }
        VarietyExpr::Cone { base, vertex } => {
            if vertex.is_empty() {
                return bad("cone needs at least one vertex vector".into());
            }
            if vertex.iter().any(|v| v.len() != vertex[0].len()) {
                return bad("vertex vectors have different lengths".into());
            }
            validate_expr(base, &format!("{path}.base"))
        }
        VarietyExpr::HypersurfaceSection { base, .. } | VarietyExpr::HyperplaneSection { base, .. } => {
            validate_expr(base, &format!("{path}.base"))
        }
        VarietyExpr::Projection { base, matrix } => {
            if matrix.is_empty() || matrix.iter().any(|r| r.len() != matrix[0].len()) {
                return bad("projection matrix must be a nonempty rectangle".into());
            }
            validate_expr(base, &format!("{path}.base"))
        }
    }
}

fn ints(v: &[i64], field: FieldSpec) -> Vec<Scalar> {
    v.iter().map(|&c| field.from_i64(c)).collect()
}

fn parse_polys(src: &[String], nvars: usize, field: FieldSpec) -> Result<Vec<MultiPoly>, Error> {
    src.iter().map(|s| MultiPoly::parse(s, nvars, field)).collect()
}

/// `counter` numbers the random hyperplanes so each draws an independent stream.
fn build_expr(e: &VarietyExpr, field: FieldSpec, seed: u64, counter: &mut u64) -> Result<VarietyHandle, Error> {
    let sub = |b: &VarietyExpr, counter: &mut u64| build_expr(b, field, seed, counter).map(Arc::new);
    match e {
        VarietyExpr::Builtin { name, section_seed } => {
            let mut opts = BuiltinOptions::new(field);
            if let Some(s) = section_seed {
                opts.section_seed = *s;
            }
            builtin(name, &opts)
        }
        VarietyExpr::Veronese { n, d } => VarietyHandle::veronese(*n, *d, field),
        VarietyExpr::Parametric { nparams, map, label } => VarietyHandle::parametric(
            parse_polys(map, *nparams, field)?,
            label.clone().unwrap_or_else(|| "parametric".into()),
        ),
        VarietyExpr::ImplicitPlaneCurve { equation, genus_hint } => {
            VarietyHandle::implicit_plane_curve(MultiPoly::parse(equation, 3, field)?, *genus_hint)
        }
        VarietyExpr::MapImage { base, polys } => {
            let b = sub(base, counter)?;
            let p = parse_polys(polys, b.coord_len(), field)?;
            VarietyHandle::map_image(b, p)
        }
        VarietyExpr::Cone { base, vertex } => {
            let b = sub(base, counter)?;
            let cols: Vec<Vec<Scalar>> = vertex.iter().map(|v| ints(v, field)).collect();
            let m = Matrix::from_columns(vertex[0].len(), &cols, field)?;
            VarietyHandle::cone(b, m)
        }
        VarietyExpr::HypersurfaceSection { base, equation } => {
            let b = sub(base, counter)?;
            let h = MultiPoly::parse(equation, b.coord_len(), field)?;
            VarietyHandle::hypersurface_section(b, h)
        }
        VarietyExpr::HyperplaneSection { base, form } => {
            let b = sub(base, counter)?;
            match form {
                Some(f) => VarietyHandle::hyperplane_section(b, ints(f, field)),
                None => {
                    *counter += 1;
                    let mut rng = derive(seed, &[0x4859_5045, *counter]);
                    VarietyHandle::generic_hyperplane_section(b, &mut rng)
                }
            }
        }
        VarietyExpr::Projection { base, matrix } => {
            let b = sub(base, counter)?;
            let rows: Vec<Vec<Scalar>> = matrix.iter().map(|r| ints(r, field)).collect();
            VarietyHandle::projection(b, Matrix::from_rows(rows, field)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_tree() {
        let cfg = RunConfig::parse(
            r#"
seed = 7
k_range = [1, 2]

[variety]
kind = "hyperplane_section"

[variety.base]
kind = "veronese"
n = 2
d = 3
"#,
        )
        .unwrap();
        assert_eq!(cfg.k_range, [1, 2]);
        let h = cfg.build(cfg.analysis_field()).unwrap();
        assert_eq!(h.coord_len(), 10);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_primes() {
        assert!(RunConfig::parse("[variety]\nkind = \"veronese\"\nn = 2\nd = 2\nbogus = 1\n").is_err());
        assert!(RunConfig::parse("field = 100\n[variety]\nkind = \"veronese\"\nn = 2\nd = 2\n").is_err());
        assert!(RunConfig::parse("k_range = [2, 1]\n[variety]\nkind = \"veronese\"\nn = 2\nd = 2\n").is_err());
    }

    #[test]
    fn random_hyperplane_is_seeded() {
        let src = "seed = 3\n[variety]\nkind = \"hyperplane_section\"\n[variety.base]\nkind = \"veronese\"\nn = 2\nd = 2\n";
        let a = RunConfig::parse(src).unwrap();
        let x = a.build(a.analysis_field()).unwrap();
        let y = a.build(a.analysis_field()).unwrap();
        assert_eq!(x.linear_equations(), y.linear_equations());
    }
}
