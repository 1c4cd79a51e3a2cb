use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use turnpoint_cli::{export, run_suite, Format, RunOptions, Stage, SuiteConfig, VerificationReport};

#[derive(Parser)]
#[command(name = "turnpoint", version, about = "Verification suites for turning-point asymptotics and Grushin spectral data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Suite configuration (TOML, or JSON by extension).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Membership, eigenpairs and their diagnostics.
    Spectrum(Common),
    /// Airy-frame constants and the alpha ladder.
    Olver(Common),
    /// Bohr-Sommerfeld counting errors.
    BohrSommerfeld(Common),
    /// Gap statistic and weighted Plancherel density for the configured model.
    Plancherel(Common),
    /// Volume doubling and quasi-triangle sampling for the configured model.
    Geometry(Common),
    /// Every stage in dependency order.
    VerifyAll(Common),
    /// Re-emit a saved report.
    Export {
        /// A report.json written by an earlier run.
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(common: &Common, stages: Vec<Stage>) -> anyhow::Result<bool> {
    let mut cfg = SuiteConfig::load(&common.config)?;
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if cfg.model.is_none() && stages.iter().all(|s| matches!(s, Stage::Grushin | Stage::Geometry)) {
        anyhow::bail!("{} has no [model] section", common.config.display());
    }
    let report = run_suite(&cfg, &RunOptions { stages, jobs: common.jobs, seed: common.seed })?;
    for c in &report.checks {
        let m = c.measured.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "non-finite".into());
        println!("{:<11} {} = {m}", serde_json::to_value(c.status)?.as_str().unwrap_or_default(), c.check_id);
    }
    for path in export(&report, Format::Json, &cfg.output_dir)?.into_iter().chain(export(&report, Format::Csv, &cfg.output_dir)?) {
        eprintln!("wrote {}", path.display());
    }
    println!("{}", report.summary());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(c) => run(c, vec![Stage::Membership, Stage::Spectra, Stage::Diagnostics]),
        Command::Olver(c) => run(c, vec![Stage::Membership, Stage::Olver]),
        Command::BohrSommerfeld(c) => run(c, vec![Stage::Membership, Stage::Spectra, Stage::BohrSommerfeld]),
        Command::Plancherel(c) => run(c, vec![Stage::Grushin]),
        Command::Geometry(c) => run(c, vec![Stage::Geometry]),
        Command::VerifyAll(c) => run(c, Stage::ALL.to_vec()),
        Command::Export { report, format, out } => VerificationReport::load(report)
            .with_context(|| format!("reading {}", report.display()))
            .and_then(|r| export(&r, *format, out))
            .map(|files| {
                for f in files {
                    println!("{}", f.display());
                }
                true
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
