//! The reproduction suite: eleven fixed criteria over the built-in instances.

use std::sync::Arc;

use serde::Serialize;
use terracini::algebra::{FieldSpec, Matrix, MultiPoly, ANALYSIS_PRIME, ENUMERATION_PRIMES, SECOND_ANALYSIS_PRIME};
use terracini::contact::{check_nu_ge_delta, check_nu_tower, nu_estimate};
use terracini::fiber::{fiber_probe, tangent_functoriality_check, Verdict, DEFAULT_FIBER_TRIALS};
use terracini::rng::{derive, Rng};
use terracini::secant::{check_delta_tower, defect, min_defective_k, DEFAULT_TRIALS};
use terracini::varieties::{builtin, BuiltinOptions, VarietyHandle};
use terracini::{Error, Result};

use crate::config::Format;
use crate::report::{verdict_word, SCHEMA_VERSION, TOOL_VERSION};

/// Two pinned seed sets; the suite must give the same verdicts under both.
pub const PINNED_SEEDS: [u64; 2] = [0x7e44_ac1a_0001, 0x7e44_ac1a_0002];
pub const CRITERIA: std::ops::RangeInclusive<u8> = 1..=11;

const SAMPLES: usize = terracini::contact::DEFAULT_SAMPLES;
const FUNCTORIALITY_WITNESSES: usize = 3;

/// Instances swept by the cross-instance criteria.
pub const MEMBERS: &[&str] = &["veronese-2-2", "veronese-2-3", "rnc-4", "counter1", "counter2", "counter3-n3"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces the quadric Veronese surface with a copy whose map has one
    /// exponent changed.
    pub negative_control: bool,
}

impl SuiteOptions {
    pub fn new(seed: u64) -> Self {
        SuiteOptions {
            seed,
            negative_control: false,
        }
    }

    fn build(&self, name: &str, field: FieldSpec) -> Result<VarietyHandle> {
        if self.negative_control && name == "veronese-2-2" {
            return corrupted_veronese(field);
        }
        builtin(name, &BuiltinOptions::new(field))
    }

    fn rng(&self, criterion: u8, part: u64) -> Rng {
        derive(self.seed, &[0x5_0175, criterion as u64, part])
    }
}

/// The quadric Veronese map with `u^2` replaced by `u^3`.
pub fn corrupted_veronese(field: FieldSpec) -> Result<VarietyHandle> {
    let map = ["1", "x0", "x1", "x0^3", "x0*x1", "x1^2"]
        .iter()
        .map(|s| MultiPoly::parse(s, 2, field))
        .collect::<Result<Vec<_>>>()?;
    VarietyHandle::parametric(map, "veronese(2,2)")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub options: SuiteOptions,
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => crate::report::to_structured(self),
            Format::Csv => {
                let mut s = String::from("id,passed,title,detail\n");
                for c in &self.criteria {
                    s.push_str(&format!(
                        "{},{},\"{}\",\"{}\"\n",
                        c.id,
                        c.passed,
                        c.title.replace('"', "\"\""),
                        c.detail.replace('"', "\"\"")
                    ));
                }
                s
            }
            Format::Table => {
                let mut s = format!(
                    "terracini {} reproduction suite (seed {}{})\n\n",
                    self.tool_version,
                    self.options.seed,
                    if self.options.negative_control {
                        ", negative control"
                    } else {
                        ""
                    }
                );
                for c in &self.criteria {
                    s.push_str(&format!(
                        "{:>2}  {}  {}\n      {}\n",
                        c.id,
                        if c.passed { "PASS" } else { "FAIL" },
                        c.title,
                        c.detail
                    ));
                }
                let failed = self.criteria.iter().filter(|c| !c.passed).count();
                s.push_str(&format!(
                    "\n{} of {} criteria passed\n",
                    self.criteria.len() - failed,
                    self.criteria.len()
                ));
                s
            }
        }
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "quadric Veronese surface has secant defect 1",
        2 => "quadric Veronese surface: contact estimate equals the defect, projection not generically finite",
        3 => "cubic Veronese surface is a non-defective control with birational projection",
        4 => "rational normal curves are never defective in the expected range",
        5 => "counter1: weakly defective, not defective, projection of degree at least 2",
        6 => "counter2: defect and contact towers agree at k = 2",
        7 => "counter3 with n = 3: contact estimate exceeds the defect",
        8 => "contact estimate bounds the defect at the minimal defective index",
        9 => "a generic hyperplane section lowers defect and contact estimate by one",
        10 => "projected tangent spaces equal tangent spaces of the image",
        11 => "reports are deterministic and dimensions agree across two analysis primes",
        _ => "unknown criterion",
    }
}

pub fn run_suite(opts: &SuiteOptions) -> SuiteReport {
    let criteria: Vec<CriterionResult> = CRITERIA.map(|id| run_criterion(id, opts)).collect();
    SuiteReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        options: *opts,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

/// Runs one criterion; internal errors count as failures.
pub fn run_criterion(id: u8, opts: &SuiteOptions) -> CriterionResult {
    let outcome = match id {
        1 => c1(opts),
        2 => c2(opts),
        3 => c3(opts),
        4 => c4(opts),
        5 => c5(opts),
        6 => c6(opts),
        7 => c7(opts),
        8 => c8(opts),
        9 => c9(opts),
        10 => c10(opts),
        11 => c11(opts),
        _ => Err(Error::InvalidConstruction(format!("no criterion {id}"))),
    };
    let (passed, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        title: title(id).to_string(),
        passed,
        detail,
    }
}

type Outcome = Result<(bool, String)>;

fn nu(v: Option<usize>) -> String {
    v.map_or_else(|| "undefined".into(), |n| n.to_string())
}

fn fp() -> FieldSpec {
    FieldSpec::analysis()
}

fn c1(o: &SuiteOptions) -> Outcome {
    let x = o.build("veronese-2-2", fp())?;
    let p = defect(&x, 1, DEFAULT_TRIALS, &mut o.rng(1, 0))?;
    let ok = p.dim == 2 && p.expected_dim == 5 && p.secant_dim == 4 && p.delta == 1;
    Ok((
        ok,
        format!("dim {} expected {} secant {} delta {}", p.dim, p.expected_dim, p.secant_dim, p.delta),
    ))
}

fn c2(o: &SuiteOptions) -> Outcome {
    let x = o.build("veronese-2-2", fp())?;
    let delta = defect(&x, 1, DEFAULT_TRIALS, &mut o.rng(2, 0))?.delta;
    let nu_1 = nu_estimate(&x, 1, SAMPLES, &mut o.rng(2, 1))?.nu_estimate;
    let f = fiber_probe(
        |f| o.build("veronese-2-2", f),
        1,
        &ENUMERATION_PRIMES,
        DEFAULT_FIBER_TRIALS,
        &mut o.rng(2, 2),
    )?;
    let ok = nu_1 == Some(1) && delta == 1 && f.verdict == Verdict::NotGenericallyFinite;
    Ok((
        ok,
        format!("nu {} delta {delta} verdict {}", nu(nu_1), verdict_word(f.verdict)),
    ))
}

fn c3(o: &SuiteOptions) -> Outcome {
    let x = o.build("veronese-2-3", fp())?;
    let d1 = defect(&x, 1, DEFAULT_TRIALS, &mut o.rng(3, 0))?.delta;
    let d2 = defect(&x, 2, DEFAULT_TRIALS, &mut o.rng(3, 1))?.delta;
    let nu_1 = nu_estimate(&x, 1, SAMPLES, &mut o.rng(3, 2))?.nu_estimate;
    let f = fiber_probe(
        |f| o.build("veronese-2-3", f),
        1,
        &ENUMERATION_PRIMES,
        DEFAULT_FIBER_TRIALS,
        &mut o.rng(3, 3),
    )?;
    let ok = d1 == 0
        && d2 == 0
        && nu_1 == Some(0)
        && f.per_prime.len() >= 2
        && f.verdict == Verdict::BirationalEvidence;
    Ok((
        ok,
        format!(
            "delta_1 {d1} delta_2 {d2} nu_1 {} verdict {} over {} primes",
            nu(nu_1),
            verdict_word(f.verdict),
            f.per_prime.len()
        ),
    ))
}

/// Rank of the stacked point and derivative rows of the moment curve at `ts`.
fn moment_rank(d: u32, ts: &[u64], field: FieldSpec) -> Result<usize> {
    let mut rows = Vec::new();
    for &t in ts {
        let t = field.from_u64(t);
        let mut point = Vec::new();
        let mut deriv = Vec::new();
        for i in 0..=d {
            point.push(t.pow(i as u64));
            deriv.push(if i == 0 {
                field.zero()
            } else {
                &field.from_u64(i as u64) * &t.pow(i as u64 - 1)
            });
        }
        rows.push(point);
        rows.push(deriv);
    }
    Ok(Matrix::from_rows(rows, field)?.rank())
}

fn c4(o: &SuiteOptions) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for d in 3..=9u32 {
        for &p in &[ANALYSIS_PRIME, SECOND_ANALYSIS_PRIME] {
            let field = FieldSpec::prime(p)?;
            let x = o.build(&format!("rnc-{d}"), field)?;
            let mut k = 1usize;
            while (k + 1) + k <= d as usize {
                let prof = defect(&x, k, DEFAULT_TRIALS, &mut o.rng(4, (d as u64) << 8 | k as u64))?;
                let ts: Vec<u64> = (0..=k as u64).map(|i| 3 + 7 * i + d as u64).collect();
                let oracle = moment_rank(d, &ts, field)? - 1;
                checked += 1;
                if prof.delta != 0 || prof.secant_dim != oracle {
                    bad.push(format!("d={d} k={k} p={p}: secant {} oracle {oracle}", prof.secant_dim));
                }
                k += 1;
            }
        }
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("{checked} (d, k, prime) cases non-defective and matching the rank oracle")
        } else {
            bad.join("; ")
        },
    ))
}

fn c5(o: &SuiteOptions) -> Outcome {
    let x = o.build("counter1", fp())?;
    let delta = defect(&x, 1, DEFAULT_TRIALS, &mut o.rng(5, 0))?.delta;
    let c = nu_estimate(&x, 1, SAMPLES, &mut o.rng(5, 1))?;
    let f = fiber_probe(
        |f| o.build("counter1", f),
        1,
        &ENUMERATION_PRIMES,
        DEFAULT_FIBER_TRIALS,
        &mut o.rng(5, 2),
    )?;
    let maxima: Vec<usize> = f.per_prime.iter().map(|p| p.max_d).collect();
    let ok = delta == 0
        && c.nu_estimate.is_some_and(|n| n >= 1)
        && maxima.len() >= 2
        && maxima.iter().all(|&d| d >= 2);
    Ok((
        ok,
        format!(
            "delta_1 {delta} nu_1 {} fiber maxima {maxima:?} verdict {}",
            nu(c.nu_estimate),
            verdict_word(f.verdict)
        ),
    ))
}

fn c6(o: &SuiteOptions) -> Outcome {
    let x = o.build("counter2", fp())?;
    let d1 = defect(&x, 1, DEFAULT_TRIALS, &mut o.rng(6, 0))?.delta;
    let d2 = defect(&x, 2, DEFAULT_TRIALS, &mut o.rng(6, 1))?.delta;
    let c1 = nu_estimate(&x, 1, SAMPLES, &mut o.rng(6, 2))?;
    let nu2 = nu_estimate(&x, 2, SAMPLES, &mut o.rng(6, 3))?.nu_estimate;
    let dt = check_delta_tower(&x, 2, DEFAULT_TRIALS, &mut o.rng(6, 4))?;
    let nt = check_nu_tower(&x, 2, SAMPLES, &mut o.rng(6, 5))?;
    let ok = d1 == 0 && d2 == 1 && nu2 == Some(1) && c1.weakly_defective == Some(true) && dt.equal && nt.equal;
    Ok((
        ok,
        format!(
            "delta_1 {d1} delta_2 {d2} nu_1 {} nu_2 {} delta tower {}={} nu tower {}={}",
            nu(c1.nu_estimate),
            nu(nu2),
            dt.delta_k,
            dt.delta_1_derived,
            nu(nt.nu_k),
            nu(nt.nu_1_derived)
        ),
    ))
}

fn c7(o: &SuiteOptions) -> Outcome {
    let x = o.build("counter3-n3", fp())?;
    let delta = defect(&x, 1, DEFAULT_TRIALS, &mut o.rng(7, 0))?.delta;
    let nu_1 = nu_estimate(&x, 1, SAMPLES, &mut o.rng(7, 1))?.nu_estimate;
    Ok((delta == 1 && nu_1 == Some(2), format!("delta_1 {delta} nu_1 {}", nu(nu_1))))
}

fn c8(o: &SuiteOptions) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, name) in MEMBERS.iter().enumerate() {
        let x = o.build(name, fp())?;
        let found = min_defective_k(&x, 2, DEFAULT_TRIALS, &mut o.rng(8, 2 * i as u64))?;
        match found {
            None => parts.push(format!("{name}: none")),
            Some(k) => {
                let r = check_nu_ge_delta(&x, k, DEFAULT_TRIALS, SAMPLES, &mut o.rng(8, 2 * i as u64 + 1))?;
                ok &= r.holds == Some(true);
                parts.push(format!("{name}: k={k} nu {} delta {}", nu(r.nu), r.delta));
            }
        }
    }
    Ok((ok, parts.join("; ")))
}

fn c9(o: &SuiteOptions) -> Outcome {
    let x = Arc::new(o.build("counter3-n3", fp())?);
    let dx = defect(&x, 1, DEFAULT_TRIALS, &mut o.rng(9, 0))?.delta;
    let nx = nu_estimate(&x, 1, SAMPLES, &mut o.rng(9, 1))?.nu_estimate;
    let h = VarietyHandle::generic_hyperplane_section(x, &mut o.rng(9, 2))?;
    let dh = defect(&h, 1, DEFAULT_TRIALS, &mut o.rng(9, 3))?.delta;
    let nh = nu_estimate(&h, 1, SAMPLES, &mut o.rng(9, 4))?.nu_estimate;
    let ok = dh + 1 == dx && matches!((nx, nh), (Some(a), Some(b)) if b + 1 == a);
    Ok((ok, format!("delta_1 {dx} -> {dh}, nu_1 {} -> {}", nu(nx), nu(nh))))
}

fn c10(o: &SuiteOptions) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut compared = 0;
    for (i, name) in MEMBERS.iter().enumerate() {
        let x = o.build(name, fp())?;
        for k in 1..=2usize {
            let mut rng = o.rng(10, (i as u64) << 8 | k as u64);
            match tangent_functoriality_check(&x, k, FUNCTORIALITY_WITNESSES, &mut rng) {
                Ok(r) => {
                    compared += 1;
                    ok &= r.all_equal && r.checks.len() >= FUNCTORIALITY_WITNESSES;
                    parts.push(format!(
                        "{name} k={k}: {}",
                        if r.all_equal { "equal" } else { "differ" }
                    ));
                }
                Err(Error::Unsupported(_)) | Err(Error::CenterFillsAmbient) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok((ok && compared > 0, format!("{compared} projections compared: {}", parts.join("; "))))
}

fn c11(o: &SuiteOptions) -> Outcome {
    let once = || {
        (1..=10)
            .map(|id| run_criterion(id, o))
            .map(|c| serde_json::to_string(&c).expect("serializes"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let identical = once() == once();
    let mut disagreements = Vec::new();
    let mut compared = 0;
    for (i, name) in MEMBERS.iter().enumerate() {
        let a = o.build(name, FieldSpec::prime(ANALYSIS_PRIME)?)?;
        let b = o.build(name, FieldSpec::prime(SECOND_ANALYSIS_PRIME)?)?;
        for k in 1..=2usize {
            let pa = defect(&a, k, DEFAULT_TRIALS, &mut o.rng(11, (i as u64) << 8 | k as u64))?;
            let pb = defect(&b, k, DEFAULT_TRIALS, &mut o.rng(11, (i as u64) << 8 | k as u64))?;
            compared += 1;
            if (pa.dim, pa.secant_dim) != (pb.dim, pb.secant_dim) {
                disagreements.push(format!(
                    "{name} k={k}: ({}, {}) vs ({}, {})",
                    pa.dim, pa.secant_dim, pb.dim, pb.secant_dim
                ));
            }
        }
    }
    Ok((
        identical && disagreements.is_empty(),
        format!(
            "reruns {}; {compared} dimension pairs, {}",
            if identical { "identical" } else { "DIFFER" },
            if disagreements.is_empty() {
                "all agree".to_string()
            } else {
                disagreements.join("; ")
            }
        ),
    ))
}
