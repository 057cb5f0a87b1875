use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use terracini_cli::commands::{self, Command};
use terracini_cli::suite::{run_suite, SuiteOptions, PINNED_SEEDS};
use terracini_cli::{CliError, Format, RunConfig, EXIT_CHECK_FAILED, EXIT_OK};

#[derive(Parser)]
#[command(name = "terracini", version, about = "Secant defects, contact loci and tangential projections of projective varieties")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured analysis prime.
    #[arg(long = "field-prime")]
    field_prime: Option<u64>,
    /// Writes the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Verb {
    DefectScan(Common),
    ContactScan(Common),
    FiberProbe(Common),
    PaperSuite {
        #[command(flatten)]
        common: Common,
        /// Runs against a deliberately corrupted built-in; the suite must fail.
        #[arg(long)]
        negative_control: bool,
    },
}

fn load(c: &Common) -> Result<RunConfig, CliError> {
    let path = c
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let src = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&src)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(p) = c.field_prime {
        cfg.field = p;
    }
    if let Some(f) = c.format {
        cfg.output.format = f;
    }
    if let Some(o) = &c.out {
        cfg.output.path = Some(o.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, path: Option<&str>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(verb: Verb) -> Result<i32, CliError> {
    let (cmd, common) = match verb {
        Verb::DefectScan(c) => (Command::DefectScan, c),
        Verb::ContactScan(c) => (Command::ContactScan, c),
        Verb::FiberProbe(c) => (Command::FiberProbe, c),
        Verb::PaperSuite {
            common,
            negative_control,
        } => {
            if common.config.is_some() || common.field_prime.is_some() {
                return Err(CliError::Config(
                    "paper-suite runs pinned instances and takes no --config or --field-prime".into(),
                ));
            }
            let opts = SuiteOptions {
                seed: common.seed.unwrap_or(PINNED_SEEDS[0]),
                negative_control,
            };
            let report = run_suite(&opts);
            let out = common.out.as_ref().map(|p| p.display().to_string());
            emit(&report.render(common.format.unwrap_or_default()), out.as_deref())?;
            return Ok(if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED });
        }
    };
    let cfg = load(&common)?;
    let report = commands::run(cmd, &cfg)?;
    emit(&report.render(cfg.output.format), cfg.output.path.as_deref())?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("TERRACINI_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let code = match execute(cli.verb) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    eprintln!("wall-clock {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code as u8)
}
