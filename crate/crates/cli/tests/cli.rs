use std::path::PathBuf;
use std::process::{Command, Output};

use terracini_cli::commands::{self, Command as Verb};
use terracini_cli::suite::{run_suite, SuiteOptions, PINNED_SEEDS};
use terracini_cli::{Format, RunConfig, VarietyExpr, EXIT_BUDGET, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_terracini"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("terracini-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn builtin(name: &str, k: [usize; 2]) -> RunConfig {
    let mut cfg = RunConfig::for_variety(VarietyExpr::Builtin {
        name: name.into(),
        section_seed: None,
    });
    cfg.k_range = k;
    cfg.seed = 11;
    cfg
}

const VERONESE_SURFACE: &str = "seed = 1\n[variety]\nkind = \"veronese\"\nn = 2\nd = 2\n";

#[test]
fn defect_scan_reports_veronese_defect() {
    let path = write_config("vs.toml", VERONESE_SURFACE);
    let out = bin(&["defect-scan", "--config", path.to_str().unwrap(), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"][0]["defect"]["delta"], 1);
    assert_eq!(v["rows"][0]["defect"]["secant_dim"], 4);
    assert_eq!(v["min_defective_k"]["k"], 1);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn same_config_gives_identical_bytes() {
    let path = write_config("det.toml", "seed = 9\nk_range = [1, 2]\n[variety]\nkind = \"builtin\"\nname = \"counter2\"\n");
    for verb in ["defect-scan", "contact-scan"] {
        let a = bin(&[verb, "--config", path.to_str().unwrap(), "--format", "structured"]);
        let b = bin(&[verb, "--config", path.to_str().unwrap(), "--format", "structured"]);
        assert_eq!(a.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn zero_k_gives_variety_dimension() {
    let r = commands::run(Verb::DefectScan, &builtin("veronese-2-2", [0, 0])).unwrap();
    assert_eq!(r.rows[0].defect.secant_dim, 2);
}

#[test]
fn contact_scan_flags() {
    let r = commands::run(Verb::ContactScan, &builtin("counter1", [1, 1])).unwrap();
    assert_eq!(r.rows[0].defect.delta, 0);
    assert_eq!(r.rows[0].defect.weakly_defective, Some(true));
    assert!(r.passed());

    let r = commands::run(Verb::ContactScan, &builtin("veronese-2-3", [1, 1])).unwrap();
    assert_eq!(r.rows[0].defect.weakly_defective, Some(false));
}

#[test]
fn undefined_nu_is_spelled_out() {
    let r = commands::run(Verb::ContactScan, &builtin("rnc-3", [1, 1])).unwrap();
    let json = r.render(Format::Structured);
    assert!(json.contains("\"nu\": \"undefined\""), "{json}");
    assert!(r.to_table().contains("undefined"));
}

#[test]
fn fiber_probe_verdicts() {
    let verdict = |name: &str| {
        let mut cfg = builtin(name, [1, 1]);
        cfg.enum_primes = vec![1009, 2003];
        let r = commands::run(Verb::FiberProbe, &cfg).unwrap();
        serde_json::to_value(r.rows[0].fiber.as_ref().unwrap().verdict).unwrap()
    };
    assert_eq!(verdict("veronese-2-3"), "BirationalEvidence");
    assert_eq!(verdict("counter1"), "NonBirationalEvidence");
    assert_eq!(verdict("veronese-2-2"), "NotGenericallyFinite");
}

#[test]
fn csv_has_one_row_per_k() {
    let r = commands::run(Verb::DefectScan, &builtin("veronese-2-3", [1, 3])).unwrap();
    let csv = r.render(Format::Csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("label,field,k,"));
    assert!(lines[1].starts_with("veronese-2-3,2147483647,1,2,9,5,5,0,false"));
}

#[test]
fn out_flag_writes_file() {
    let path = write_config("out.toml", VERONESE_SURFACE);
    let target = path.with_extension("csv");
    let out = bin(&[
        "defect-scan",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&target).unwrap().contains("veronese(2,2)"));
}

#[test]
fn exit_codes() {
    let bad_key = write_config("bad.toml", "[variety]\nkind = \"veronese\"\nn = 2\nd = 2\nbogus = 1\n");
    assert_eq!(bin(&["defect-scan", "--config", bad_key.to_str().unwrap()]).status.code(), Some(EXIT_CONFIG));

    let bad_build = write_config("badvertex.toml", "[variety]\nkind = \"cone\"\nvertex = [[1, 0, 0]]\n[variety.base]\nkind = \"veronese\"\nn = 1\nd = 2\n");
    let out = bin(&["defect-scan", "--config", bad_build.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG), "{}", String::from_utf8_lossy(&out.stderr));

    let missing = bin(&["defect-scan", "--config", "/nonexistent/terracini.toml"]);
    assert_eq!(missing.status.code(), Some(EXIT_CONFIG));

    let big = write_config("big.toml", "[variety]\nkind = \"veronese\"\nn = 3\nd = 3\n");
    assert_eq!(bin(&["fiber-probe", "--config", big.to_str().unwrap()]).status.code(), Some(EXIT_BUDGET));

    let not_prime = write_config("np.toml", VERONESE_SURFACE);
    let out = bin(&["defect-scan", "--config", not_prime.to_str().unwrap(), "--field-prime", "1000"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn negative_control_fails_the_suite() {
    let out = bin(&["paper-suite", "--negative-control", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(EXIT_CHECK_FAILED));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("1,false,")), "{csv}");
}

#[test]
fn second_seed_set_gives_same_verdicts() {
    let a = run_suite(&SuiteOptions::new(PINNED_SEEDS[0]));
    let b = run_suite(&SuiteOptions::new(PINNED_SEEDS[1]));
    let verdicts = |r: &terracini_cli::suite::SuiteReport| r.criteria.iter().map(|c| c.passed).collect::<Vec<_>>();
    assert_eq!(verdicts(&a), verdicts(&b));
    assert!(a.passed);
}

#[test]
fn threads_variable_does_not_change_output() {
    let path = write_config("thr.toml", "seed = 5\n[variety]\nkind = \"builtin\"\nname = \"counter1\"\n");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_terracini"))
            .args(["contact-scan", "--config", path.to_str().unwrap(), "--format", "structured"])
            .env("TERRACINI_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
