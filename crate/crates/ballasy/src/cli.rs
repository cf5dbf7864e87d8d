//! `ballasy classify | verify | multiplier`.
//!
//! Exit codes: 0 success, 1 usage error, 2 uncovered regime, 3 failed
//! verdict, 4 I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use ballasy_core::asymptotics::rhs_formula;
use ballasy_core::spaces::{boundary_grid, multiplier_criteria};
use ballasy_core::verifier::verdict;
use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::report::{multiplier_json, summary_json, verdict_line, write_csv};
use crate::sweep::run_sweep_parallel;

#[derive(Parser, Debug)]
#[command(name = "ballasy", version, about = "Boundary asymptotics of kernel integrals on the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the case an integral family falls into and its estimate
    Classify(CommandArgs),
    /// Sweep a family toward the boundary and judge its estimate
    Verify(CommandArgs),
    /// Grid suprema of the multiplier criteria for a catalog function
    Multiplier(CommandArgs),
}

#[derive(Args, Debug)]
struct CommandArgs {
    /// Flat key = value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: RunConfig,
}

impl CommandArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        Ok(match &self.config {
            Some(path) => RunConfig::load(path)?.overridden_by(&self.params),
            None => self.params.clone(),
        })
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Classify(a) => a.resolve().and_then(|c| classify(&c, out)),
        Command::Verify(a) => a.resolve().and_then(|c| verify(&c, out)),
        Command::Multiplier(a) => a.resolve().and_then(|c| multiplier(&c, out)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn classify(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let fam = cfg.kernel_family()?;
    let est = rhs_formula(&fam)?;
    let label = est.case.label();
    writeln!(out, "{}", est.case)?;
    writeln!(out, "{label}: {}", est.case.formula)?;
    Ok(())
}

/// Opens the report destination, or returns `None` for stdout.
fn destination(cfg: &RunConfig) -> Result<Option<BufWriter<File>>, CliError> {
    match &cfg.output {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Some(BufWriter::new(f)))
        }
        None => Ok(None),
    }
}

fn verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let fam = cfg.kernel_family()?;
    let plan = cfg.sweep_plan()?;
    let report = run_sweep_parallel(&fam, &plan)?;
    let v = verdict(&report, cfg.window_bound(), cfg.slope_tol());
    let mut file = destination(cfg)?;
    match (cfg.format(), file.as_mut()) {
        (Format::Csv, Some(f)) => write_csv(&report, f)?,
        (Format::Csv, None) => {}
        (Format::Json, Some(f)) => writeln!(f, "{:#}", summary_json(&report, &v))?,
        (Format::Json, None) => writeln!(out, "{:#}", summary_json(&report, &v))?,
    }
    if let Some(mut f) = file {
        f.flush()?;
    }
    writeln!(out, "{}", verdict_line(&report, &v))?;
    if v.pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} estimate not confirmed", report.case.label())))
    }
}

fn multiplier(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let psi = cfg.symbol()?;
    let sp = cfg.space_params()?;
    let grid = boundary_grid(sp.n, cfg.max_shell.unwrap_or(12));
    let report = multiplier_criteria(&psi, &sp, &grid, &cfg.quad())?;
    let doc = multiplier_json(cfg.psi.as_deref().unwrap_or_default(), &report);
    match destination(cfg)? {
        Some(mut f) => {
            writeln!(f, "{doc:#}")?;
            f.flush()?;
        }
        None => writeln!(out, "{doc:#}")?,
    }
    Ok(())
}
