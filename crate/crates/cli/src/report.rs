//! Report model and its three renderings.

use std::fmt::Write as _;

use serde::Serialize;
use terracini::contact::{ContactReport, NuDeltaReport, NuTowerReport};
use terracini::fiber::{FiberReport, FunctorialityReport, Verdict};
use terracini::secant::{DefectProfile, DeltaTowerReport};

use crate::config::{Format, RunConfig};

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct VarietyInfo {
    pub label: String,
    pub ambient_r: usize,
    pub coord_len: usize,
    pub dim: usize,
    pub field: String,
    pub chart: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct KRow {
    pub k: usize,
    pub defect: DefectProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contact: Option<ContactReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fiber: Option<FiberReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functoriality: Option<FunctorialityReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinDefective {
    pub searched_up_to: usize,
    pub k: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossPrime {
    pub k: usize,
    pub prime: u64,
    pub dim: usize,
    pub secant_dim: usize,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub variety: VarietyInfo,
    pub rows: Vec<KRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_defective_k: Option<MinDefective>,
    pub cross_prime: Vec<CrossPrime>,
    pub delta_towers: Vec<DeltaTowerReport>,
    pub nu_towers: Vec<NuTowerReport>,
    pub nu_ge_delta: Vec<NuDeltaReport>,
    pub checks: Vec<Check>,
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_table(),
            Format::Csv => self.to_csv(),
            Format::Structured => to_structured(self),
        }
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let v = &self.variety;
        let _ = writeln!(s, "terracini {} ({})", self.tool_version, self.command);
        let _ = writeln!(s, "variety   {}", v.label);
        let _ = writeln!(s, "ambient   P^{} ({} coordinates)", v.ambient_r, v.coord_len);
        let _ = writeln!(s, "dimension {}", v.dim);
        let _ = writeln!(s, "field     {}", v.field);
        let _ = writeln!(s, "chart     {}", v.chart);
        let _ = writeln!(s, "seed      {}", self.config.seed);
        s.push('\n');
        let header = [
            "k", "expected", "secant", "delta", "defective", "nu", "weak", "fiber_d", "verdict", "functorial",
        ];
        let body: Vec<[String; 10]> = self.rows.iter().map(row_cells).collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &body {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let _ = writeln!(s, "{}", line(header.to_vec()));
        for r in &body {
            let _ = writeln!(s, "{}", line(r.iter().map(String::as_str).collect()));
        }
        if let Some(m) = &self.min_defective_k {
            let k = m.k.map_or_else(|| "none".to_string(), |k| k.to_string());
            let _ = writeln!(s, "\nmin defective k: {k} (searched k <= {})", m.searched_up_to);
        }
        for c in &self.cross_prime {
            let _ = writeln!(
                s,
                "cross-prime k={} p={}: dim {} secant {} {}",
                c.k,
                c.prime,
                c.dim,
                c.secant_dim,
                if c.agrees { "agrees" } else { "DISAGREES" }
            );
        }
        for t in &self.delta_towers {
            let _ = writeln!(
                s,
                "delta tower k={}: delta_k {} vs derived delta_1 {} {}",
                t.k,
                t.delta_k,
                t.delta_1_derived,
                eq_word(t.equal)
            );
        }
        for t in &self.nu_towers {
            let _ = writeln!(
                s,
                "nu tower k={}: nu_k {} vs derived nu_1 {} {}",
                t.k,
                opt(t.nu_k),
                opt(t.nu_1_derived),
                eq_word(t.equal)
            );
        }
        for p in &self.nu_ge_delta {
            let _ = writeln!(
                s,
                "nu >= delta at k={}: nu {} delta {} {}",
                p.k,
                opt(p.nu),
                p.delta,
                match p.holds {
                    Some(true) => "holds",
                    Some(false) => "FAILS",
                    None => "n/a",
                }
            );
        }
        if !self.checks.is_empty() {
            s.push_str("\nchecks\n");
            for c in &self.checks {
                let _ = writeln!(s, "  [{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
            }
        }
        if !self.assumptions.is_empty() {
            s.push_str("\nassumptions\n");
            for a in &self.assumptions {
                let _ = writeln!(s, "  - {a}");
            }
        }
        if !self.notes.is_empty() {
            s.push_str("\nnotes\n");
            for n in &self.notes {
                let _ = writeln!(s, "  - {n}");
            }
        }
        s
    }

    /// One row per k.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "label,field,k,dim,ambient_r,expected_dim,secant_dim,delta,defective,nu,weakly_defective,consensus_d,verdict,functoriality\n",
        );
        for r in &self.rows {
            let d = &r.defect;
            let cells = [
                csv_escape(&self.variety.label),
                d.field_modulus.map(|p| p.to_string()).unwrap_or_default(),
                d.k.to_string(),
                d.dim.to_string(),
                d.ambient_r.to_string(),
                d.expected_dim.to_string(),
                d.secant_dim.to_string(),
                d.delta.to_string(),
                d.defective.to_string(),
                d.nu.map(|n| n.to_string()).unwrap_or_default(),
                d.weakly_defective.map(|w| w.to_string()).unwrap_or_default(),
                r.fiber.as_ref().and_then(|f| f.consensus_d).map(|v| v.to_string()).unwrap_or_default(),
                r.fiber.as_ref().map(|f| verdict_word(f.verdict).to_string()).unwrap_or_default(),
                r.functoriality.as_ref().map(|f| f.all_equal.to_string()).unwrap_or_default(),
            ];
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn to_structured<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn row_cells(r: &KRow) -> [String; 10] {
    let d = &r.defect;
    [
        d.k.to_string(),
        d.expected_dim.to_string(),
        d.secant_dim.to_string(),
        d.delta.to_string(),
        yes_no(d.defective).into(),
        d.nu.map_or_else(|| "-".into(), |n| n.to_string()),
        d.weakly_defective.map_or_else(|| "-".into(), |w| yes_no(w).into()),
        r.fiber
            .as_ref()
            .and_then(|f| f.consensus_d)
            .map_or_else(|| "-".into(), |v| v.to_string()),
        r.fiber.as_ref().map_or_else(|| "-".into(), |f| verdict_word(f.verdict).into()),
        r.functoriality
            .as_ref()
            .map_or_else(|| "-".into(), |f| yes_no(f.all_equal).into()),
    ]
}

pub fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::BirationalEvidence => "birational_evidence",
        Verdict::NonBirationalEvidence => "non_birational_evidence",
        Verdict::Inconclusive => "inconclusive",
        Verdict::NotGenericallyFinite => "not_generically_finite",
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn eq_word(b: bool) -> &'static str {
    if b {
        "equal"
    } else {
        "DIFFER"
    }
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "undefined".into(), |n| n.to_string())
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
