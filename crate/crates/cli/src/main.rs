use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ambec::BackendSelection;
use ambec_cli::{
    check, compare_csv, compare_text, presets_text, run_compare, run_sweep, sweep_csv, ConfigError, ExperimentConfig,
    Overrides, RunError,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(version, about = "Atom-molecule BEC witness sweeps and backend comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate witnesses on a time grid and write CSV
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Compare the perturbative and exact backends
    Compare {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// List the shipped parameter presets
    Presets,
}

#[derive(Args)]
struct Flags {
    /// perturbative, exact or both
    #[arg(long)]
    backend: Option<BackendSelection>,
    /// Proceed despite validation warnings
    #[arg(long)]
    force: bool,
    /// Output directory (overrides [output] dir)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cutoff_a: Option<usize>,
    #[arg(long)]
    cutoff_b: Option<usize>,
    /// Residual tolerance for compare
    #[arg(long)]
    tolerance: Option<f64>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            backend: self.backend,
            cutoff_a: self.cutoff_a,
            cutoff_b: self.cutoff_b,
            tolerance: self.tolerance,
            force: self.force,
        }
    }
}

fn load(path: &Path, flags: &Flags) -> Result<ExperimentConfig, RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::Config(ConfigError { line: None, message: format!("{}: {e}", path.display()) }))?;
    let mut cfg = ExperimentConfig::parse(&text).map_err(|e| {
        RunError::Config(ConfigError {
            line: e.line,
            message: format!("{}: {}", path.display(), e.message),
        })
    })?;
    flags.overrides().apply(&mut cfg)?;
    Ok(cfg)
}

fn destination(cfg: &ExperimentConfig, config: &Path, flags: &Flags, suffix: &str) -> Result<PathBuf, RunError> {
    let dir = flags
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let stem = cfg.output.stem.clone().unwrap_or_else(|| {
        config
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "ambec".into())
    });
    Ok(dir.join(format!("{stem}{suffix}")))
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn sweep_cmd(config: &Path, flags: &Flags) -> Result<(), RunError> {
    let cfg = load(config, flags)?;
    warn(&check(&cfg, flags.force)?);
    let series = run_sweep(&cfg)?;
    let path = destination(&cfg, config, flags, ".csv")?;
    fs::write(&path, sweep_csv(&cfg.params, &cfg.grid.build(), &series))?;
    println!("wrote {} ({} series x {} samples)", path.display(), series.len(), cfg.grid.build().len());
    Ok(())
}

fn compare_cmd(config: &Path, flags: &Flags) -> Result<(), RunError> {
    let mut cfg = load(config, flags)?;
    cfg.backend = BackendSelection::Both;
    warn(&check(&cfg, flags.force)?);
    let outcome = run_compare(&cfg)?;
    if !outcome.skipped.is_empty() {
        let names: Vec<String> = outcome.skipped.iter().map(|k| k.to_string()).collect();
        eprintln!("warning: skipping exact-only witnesses: {}", names.join(", "));
    }
    let text = compare_text(&cfg, &outcome);
    print!("{text}");
    let csv = destination(&cfg, config, flags, "_compare.csv")?;
    fs::write(&csv, compare_csv(&cfg.params, &outcome))?;
    fs::write(destination(&cfg, config, flags, "_compare.txt")?, &text)?;
    println!("wrote {}", csv.display());
    match outcome.failures() {
        0 => Ok(()),
        n => Err(RunError::CompareFailed(n)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Sweep { config, flags } => sweep_cmd(config, flags),
        Command::Compare { config, flags } => compare_cmd(config, flags),
        Command::Presets => {
            print!("{}", presets_text());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
