use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use endpoint_cli::{run, CliError, Command, Flags, ProblemInstance};
use endpoint_core::setmaps::SelectionRule;
use endpoint_core::solver::Direction;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Solve,
    VerifyContraction,
    CheckMaps,
    CheckLspace,
    GaugeReport,
    Delta,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Solve => Command::Solve,
            Cmd::VerifyContraction => Command::VerifyContraction,
            Cmd::CheckMaps => Command::CheckMaps,
            Cmd::CheckLspace => Command::CheckLspace,
            Cmd::GaugeReport => Command::GaugeReport,
            Cmd::Delta => Command::Delta,
        }
    }
}

/// Common end points of multivalued maps on ordered metric spaces.
///
/// Exit status: 0 pass/converged, 2 violations/divergence, 1 input error.
#[derive(Debug, Parser)]
#[command(name = "endpoint", version)]
struct Args {
    command: Cmd,
    instance: PathBuf,
    /// Grid sampling with N nodes per axis.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Random sampling of N comparable pairs.
    #[arg(long, value_name = "N")]
    random: Option<usize>,
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    #[arg(long, value_name = "T")]
    tolerance: Option<f64>,
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,
    /// nearest | farthest | min-lex
    #[arg(long)]
    rule: Option<SelectionRule>,
    /// descending | ascending
    #[arg(long)]
    direction: Option<Direction>,
    /// Map names used as S and T, e.g. `S,T`.
    #[arg(long, value_name = "S,T")]
    pair: Option<String>,
    /// Set names compared by `delta`, e.g. `A,B`.
    #[arg(long, value_name = "A,B")]
    sets: Option<String>,
    /// Directory for the summary and CSV artifacts.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn split_pair(s: &str) -> Result<(String, String), CliError> {
    match s.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err(CliError::Invalid(format!("expected two comma-separated names, got `{s}`"))),
    }
}

fn write_artifacts(dir: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: dir.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents).map_err(io)?;
    }
    Ok(())
}

fn main_inner(args: Args) -> Result<i32, CliError> {
    let inst = ProblemInstance::load(&args.instance)?;
    let flags = Flags {
        grid: args.grid,
        random: args.random,
        seed: args.seed,
        tolerance: args.tolerance,
        max_iter: args.max_iter,
        rule: args.rule,
        direction: args.direction,
        pair: args.pair.as_deref().map(split_pair).transpose()?,
        sets: args.sets.as_deref().map(split_pair).transpose()?,
    };
    let outcome = run(args.command.into(), &inst, &flags)?;
    print!("{}", outcome.summary);
    if let Some(dir) = &args.out {
        let mut files = outcome.artifacts.clone();
        files.push(("summary.txt".to_string(), outcome.summary.clone()));
        write_artifacts(dir, &files)?;
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
