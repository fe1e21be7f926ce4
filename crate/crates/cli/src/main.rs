//! `raa`: run ray antenna array experiments and write CSV results.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use raa_core::experiment::{run, ExperimentConfig, ExperimentKind, ExperimentReport};

#[derive(Parser)]
#[command(name = "raa", version, about = "Ray antenna array experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Beam patterns of the RAA and the DFT-codebook baseline.
    BeamPattern(Common),
    /// Single-user maximum SNR with top-magnitude ray selection.
    SingleUser(Common),
    /// Multi-user sum rate with greedy, exhaustive or top-magnitude selection.
    MultiUser(Common),
    /// Hardware cost of both architectures.
    Cost(Common),
}

#[derive(Args)]
struct Common {
    /// Key-value config file (`key = value` per line, `#` comments).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<String>,
    /// Result table path. Artifacts go next to it as `<stem>_<name>.csv`.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Comma-separated selection methods: greedy, exhaustive, top_magnitude.
    #[arg(long, value_name = "LIST")]
    methods: Option<String>,
    #[arg(long, value_parser = ["isotropic", "directional", "both"])]
    pattern: Option<String>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::BeamPattern(c) => (ExperimentKind::BeamPattern, c),
            Command::SingleUser(c) => (ExperimentKind::SingleUser, c),
            Command::MultiUser(c) => (ExperimentKind::MultiUser, c),
            Command::Cost(c) => (ExperimentKind::Cost, c),
        }
    }
}

fn load_config(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(kind);
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        cfg.apply_kv(&text)
            .with_context(|| format!("in config {}", path.display()))?;
    }
    let seed = args.seed.map(|s| s.to_string());
    let overrides = [
        ("seed", seed.as_deref()),
        ("trials", args.trials.as_deref()),
        ("methods", args.methods.as_deref()),
        ("pattern", args.pattern.as_deref()),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            cfg.set(key, value).with_context(|| format!("--{key}"))?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn artifact_path(out: &Path, name: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "results".into(), |s| s.to_string_lossy());
    out.with_file_name(format!("{stem}_{name}.csv"))
}

fn write_report(report: &ExperimentReport, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, report.table_csv())
                .with_context(|| format!("cannot write {}", path.display()))?;
            for artifact in &report.artifacts {
                let p = artifact_path(path, &artifact.name);
                fs::write(&p, report.artifact_csv(artifact))
                    .with_context(|| format!("cannot write {}", p.display()))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(report.table_csv().as_bytes())?;
            for artifact in &report.artifacts {
                writeln!(stdout, "# artifact={}", artifact.name)?;
                stdout.write_all(report.artifact_csv(artifact).as_bytes())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    let result = load_config(kind, &args)
        .and_then(|cfg| Ok(run(&cfg)?))
        .and_then(|report| write_report(&report, args.out.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err)
            if err
                .downcast_ref::<std::io::Error>()
                .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("raa: error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
