//! Command-line front end: the instance language, subcommand dispatch and
//! plain-text reports.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on an input error (unreadable file, syntax error, unknown name, bad
//! arguments).

pub mod commands;
pub mod syntax;
pub mod witness_text;

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::Report;

pub const DEFAULT_HORIZON: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "groupable", version, about = "Eventually periodic covers, slaloms and bounds")]
pub struct Cli {
    /// Horizon for materialized output and horizon checks.
    #[arg(long, global = true, value_name = "N")]
    pub horizon: Option<usize>,
    /// Seed for `oracle` and `gen`.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Part of the pipeline report to print.
    #[arg(long, global = true, value_enum)]
    pub emit: Option<Emit>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between bounds, slaloms, partitions and encodings.
    Convert { file: PathBuf, kind: ConvertKind, name: String },
    /// Decide `le-star F G`, `through F G` (G a slalom boundary) or `large U`.
    Check {
        file: PathBuf,
        kind: CheckKind,
        #[arg(num_args = 0..)]
        args: Vec<String>,
    },
    /// Group a large cover and print the refinement trace and witness.
    Group { file: PathBuf, cover: String },
    /// Check a witness file against a cover.
    Verify { file: PathBuf, cover: String, witness: PathBuf },
    /// Family → cover → grouping → partition → slalom → bound.
    Pipeline { file: PathBuf, family: Option<String> },
    /// Cross-check exact decisions against horizon oracles on random instances.
    Oracle {
        #[arg(value_enum, default_value_t = OracleCheck::All)]
        check: OracleCheck,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Print random instances.
    Gen {
        kind: GenKind,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Largest point space for covers.
        #[arg(long, default_value_t = 3)]
        points: usize,
        /// Largest family size.
        #[arg(long, default_value_t = 4)]
        members: usize,
    },
    /// Execute the directive line of an instance file.
    Run { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertKind {
    Diag,
    Undiag,
    Range,
    Enum,
    BoundToSlalom,
    SlalomToBound,
    SlalomToPartition,
    PartitionToSlalom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    LeStar,
    Through,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Witness,
    Partition,
    Slalom,
    Bound,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleCheck {
    LeStar,
    Through,
    Large,
    Witness,
    Greedy,
    Exhaustive,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Epseq,
    Increasing,
    Epset,
    Cover,
    Family,
    Partition,
}

impl GenKind {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(Report { text, ok }) => Outcome { stdout: text, stderr: String::new(), code: if ok { 0 } else { 1 } },
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e:#}\n"), code: 2 },
    }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let horizon = cli.horizon.unwrap_or(DEFAULT_HORIZON);
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match &cli.command {
        Command::Convert { file, kind, name } => commands::convert(&commands::load(file)?, *kind, name, horizon),
        Command::Check { file, kind, args } => commands::check(&commands::load(file)?, *kind, args),
        Command::Group { file, cover } => commands::group(&commands::load(file)?, cover, horizon),
        Command::Verify { file, cover, witness } => commands::verify(&commands::load(file)?, cover, witness),
        Command::Pipeline { file, family } => {
            commands::pipeline(&commands::load(file)?, family.as_deref(), cli.emit.unwrap_or(Emit::All), horizon)
        }
        Command::Oracle { check, count } => commands::oracle(*check, seed, *count, horizon),
        Command::Gen { kind, count, points, members } => commands::generate(*kind, seed, *count, *points, *members),
        Command::Run { file } => run_directive(cli, file),
    }
}

/// Runs `sub [FILE] args…` from the file's directive line. Flags given on
/// the command line override flags on the directive line.
fn run_directive(cli: &Cli, file: &std::path::Path) -> Result<Report> {
    let inst = commands::load(file)?;
    let Some(dir) = &inst.directive else {
        bail!("{}: no directive line", file.display());
    };
    let mut argv: Vec<OsString> = vec!["groupable".into()];
    let mut tokens = dir.tokens.iter();
    let sub = tokens.next().expect("directive has a subcommand");
    argv.push(sub.into());
    if !matches!(sub.as_str(), "oracle" | "gen") {
        argv.push(file.into());
    }
    argv.extend(tokens.map(OsString::from));
    if let Some(h) = cli.horizon {
        argv.extend(["--horizon".into(), h.to_string().into()]);
    }
    if let Some(s) = cli.seed {
        argv.extend(["--seed".into(), s.to_string().into()]);
    }
    if let Some(e) = cli.emit {
        argv.extend(["--emit".into(), e.to_possible_value().expect("no skipped variants").get_name().into()]);
    }
    let inner = Cli::try_parse_from(&argv).map_err(|e| anyhow::anyhow!("{}: line {}: {}", file.display(), dir.line, e.render()))?;
    if matches!(inner.command, Command::Run { .. }) {
        bail!("{}: line {}: a directive cannot be `run`", file.display(), dir.line);
    }
    dispatch(&inner)
}
