//! The three scan verbs.

use terracini::algebra::{FieldSpec, ANALYSIS_PRIME, SECOND_ANALYSIS_PRIME};
use terracini::contact::{check_nu_ge_delta, check_nu_tower, nu_estimate};
use terracini::fiber::{fiber_probe, tangent_functoriality_check, Verdict};
use terracini::rng::derive;
use terracini::secant::{check_delta_tower, defect, min_defective_k, Nu};
use terracini::varieties::VarietyHandle;
use terracini::Error;

use crate::config::RunConfig;
use crate::report::{Check, CrossPrime, KRow, MinDefective, Report, VarietyInfo, SCHEMA_VERSION, TOOL_VERSION};
use crate::CliError;

/// Witnesses per functoriality comparison.
pub const FUNCTORIALITY_WITNESSES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    DefectScan,
    ContactScan,
    FiberProbe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DefectScan => "defect-scan",
            Command::ContactScan => "contact-scan",
            Command::FiberProbe => "fiber-probe",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Command::DefectScan => 1,
            Command::ContactScan => 2,
            Command::FiberProbe => 3,
        }
    }
}

const GENERICITY_NOTE: &str = "ranks are taken at random points over the analysis field; \
     a generic value can only be underestimated, never overestimated";

fn show(v: Option<usize>) -> String {
    v.map_or_else(|| "undefined".into(), |n| n.to_string())
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let field = cfg.analysis_field();
    let x = cfg.build(field).map_err(CliError::Build)?;
    let tag = cmd.tag();
    let dim = x.intrinsic_dim(&mut derive(cfg.seed, &[tag, 0]))?;
    let [k_min, k_max] = cfg.k_range;

    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        command: cmd.name().to_string(),
        config: cfg.clone(),
        variety: VarietyInfo {
            label: x.label().to_string(),
            ambient_r: x.ambient_r(),
            coord_len: x.coord_len(),
            dim,
            field: field.to_string(),
            chart: x.chart_description(),
        },
        rows: Vec::new(),
        min_defective_k: None,
        cross_prime: Vec::new(),
        delta_towers: Vec::new(),
        nu_towers: Vec::new(),
        nu_ge_delta: Vec::new(),
        checks: Vec::new(),
        assumptions: x.assumptions(),
        notes: vec![GENERICITY_NOTE.to_string()],
    };

    for k in k_min..=k_max {
        let mut profile = defect(&x, k, cfg.trials, &mut derive(cfg.seed, &[tag, 1, k as u64]))?;
        let mut row = KRow {
            k,
            defect: profile.clone(),
            contact: None,
            fiber: None,
            functoriality: None,
        };
        if cmd == Command::ContactScan {
            let c = nu_estimate(&x, k, cfg.samples, &mut derive(cfg.seed, &[tag, 2, k as u64]))?;
            profile.nu = Some(Nu::from_option(c.nu_estimate));
            profile.weakly_defective = c.weakly_defective;
            row.contact = Some(c);
        }
        if cmd == Command::FiberProbe {
            fiber_row(&mut report, &mut row, cfg, &x, k, tag)?;
        }
        row.defect = profile;
        report.rows.push(row);
    }

    if cmd != Command::FiberProbe {
        cross_prime(&mut report, cfg, tag)?;
        let upto = k_max.max(1);
        let found = min_defective_k(&x, upto, cfg.trials, &mut derive(cfg.seed, &[tag, 4]))?;
        report.min_defective_k = Some(MinDefective {
            searched_up_to: upto,
            k: found,
        });
        monotonicity(&mut report);
        for k in k_min.max(2)..=k_max {
            match check_delta_tower(&x, k, cfg.trials, &mut derive(cfg.seed, &[tag, 5, k as u64])) {
                Ok(t) => {
                    report.checks.push(Check::new(
                        format!("delta tower k={k}"),
                        t.equal,
                        format!("delta_k {} vs derived delta_1 {}", t.delta_k, t.delta_1_derived),
                    ));
                    for d in [&t.drop_at_k, &t.drop_at_1_derived] {
                        if let Some(h) = d.holds {
                            report.checks.push(Check::new(
                                format!("projection drop k={k} h={}", d.h),
                                h,
                                format!(
                                    "dim {} = dim image {} + delta {}",
                                    d.dim_source,
                                    show(d.dim_image),
                                    d.delta
                                ),
                            ));
                        }
                    }
                    report.delta_towers.push(t);
                }
                Err(Error::CenterFillsAmbient) => report
                    .notes
                    .push(format!("delta tower k={k} skipped: the projection center fills the ambient space")),
                Err(e) => return Err(e.into()),
            }
        }
        if cmd == Command::ContactScan {
            contact_checks(&mut report, cfg, &x, found, tag)?;
        }
    }
    Ok(report)
}

fn contact_checks(
    report: &mut Report,
    cfg: &RunConfig,
    x: &VarietyHandle,
    min_k: Option<usize>,
    tag: u64,
) -> Result<(), CliError> {
    let [k_min, k_max] = cfg.k_range;
    for k in k_min.max(2)..=k_max {
        match check_nu_tower(x, k, cfg.samples, &mut derive(cfg.seed, &[tag, 6, k as u64])) {
            Ok(t) => {
                report.checks.push(Check::new(
                    format!("nu tower k={k}"),
                    t.equal,
                    format!("nu_k {} vs derived nu_1 {}", show(t.nu_k), show(t.nu_1_derived)),
                ));
                report.nu_towers.push(t);
            }
            Err(Error::CenterFillsAmbient) => report
                .notes
                .push(format!("nu tower k={k} skipped: the projection center fills the ambient space")),
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(k) = min_k {
        let p = check_nu_ge_delta(x, k, cfg.trials, cfg.samples, &mut derive(cfg.seed, &[tag, 7, k as u64]))?;
        report.checks.push(Check::new(
            format!("nu >= delta at minimal defective k={k}"),
            p.holds != Some(false),
            format!("nu {} delta {}", show(p.nu), p.delta),
        ));
        report.nu_ge_delta.push(p);
    }
    Ok(())
}

fn fiber_row(
    report: &mut Report,
    row: &mut KRow,
    cfg: &RunConfig,
    x: &VarietyHandle,
    k: usize,
    tag: u64,
) -> Result<(), CliError> {
    let probe = fiber_probe(
        |f| cfg.build(f),
        k,
        &cfg.enum_primes,
        cfg.fiber_trials,
        &mut derive(cfg.seed, &[tag, 2, k as u64]),
    );
    let fib = match probe {
        Ok(f) => f,
        Err(Error::CenterFillsAmbient) => {
            report
                .notes
                .push(format!("fiber probe k={k} skipped: the projection center fills the ambient space"));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    if fib.verdict != Verdict::NotGenericallyFinite {
        let f = tangent_functoriality_check(x, k, FUNCTORIALITY_WITNESSES, &mut derive(cfg.seed, &[tag, 3, k as u64]))?;
        report.checks.push(Check::new(
            format!("tangent functoriality k={k}"),
            f.all_equal,
            format!("{} witnesses", f.checks.len()),
        ));
        row.functoriality = Some(f);
    }
    row.fiber = Some(fib);
    Ok(())
}

/// Recomputes every profile over a second analysis prime.
fn cross_prime(report: &mut Report, cfg: &RunConfig, tag: u64) -> Result<(), CliError> {
    let other = if cfg.field == SECOND_ANALYSIS_PRIME {
        ANALYSIS_PRIME
    } else {
        SECOND_ANALYSIS_PRIME
    };
    let y = cfg.build(FieldSpec::prime(other)?).map_err(CliError::Build)?;
    for row in &report.rows {
        let k = row.k;
        let p = defect(&y, k, cfg.trials, &mut derive(cfg.seed, &[tag, 8, k as u64]))?;
        let agrees = p.dim == row.defect.dim && p.secant_dim == row.defect.secant_dim;
        report.checks.push(Check::new(
            format!("cross-prime k={k}"),
            agrees,
            format!(
                "p={other}: dim {} secant {} vs dim {} secant {}",
                p.dim, p.secant_dim, row.defect.dim, row.defect.secant_dim
            ),
        ));
        report.cross_prime.push(CrossPrime {
            k,
            prime: other,
            dim: p.dim,
            secant_dim: p.secant_dim,
            agrees,
        });
    }
    Ok(())
}

/// Secant dimensions increase strictly until they fill the ambient space.
fn monotonicity(report: &mut Report) {
    for w in report.rows.windows(2) {
        let (a, b) = (&w[0].defect, &w[1].defect);
        let ok = b.secant_dim > a.secant_dim || (a.secant_dim == a.ambient_r && b.secant_dim == b.ambient_r);
        report.checks.push(Check::new(
            format!("monotone k={}..{}", a.k, b.k),
            ok,
            format!("{} then {}", a.secant_dim, b.secant_dim),
        ));
    }
}
