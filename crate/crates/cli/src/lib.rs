//! Command-line front end: argument parsing, run configuration and result files.

pub mod config;
pub mod emit;
pub mod error;
pub mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use endfire::exec::Execution;
use endfire::workflows::Cut;

use config::{FeedSetting, Format, LayoutKind, Overrides, RunConfig};
use run::Command;

#[derive(Debug, Parser)]
#[command(name = "endfire", version, about = "End-fire dipole array modeling and optimization")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Optimize spacing and excitation of a fully driven array.
    OptimizeActive(Common),
    /// Optimize spacing and loads of a single-feed parasitic array.
    OptimizeParasitic(Common),
    /// Uniform array with progressive end-fire phasing.
    Ula {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        spacing_lambda: Option<f64>,
    },
    /// Evaluate an explicit layout, or re-evaluate a stored design.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        design: DesignInput,
        #[arg(long)]
        kind: Option<LayoutKind>,
        /// Comma-separated element positions in wavelengths.
        #[arg(long, value_delimiter = ',')]
        positions_lambda: Option<Vec<f64>>,
        /// Comma-separated loads in ohms; leave the feed entry empty, e.g. `,4.07`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_loads)]
        loads: Option<Loads>,
    },
    /// Tolerance sweep of a single-feed design.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        design: DesignInput,
        /// Relative half-width of each sweep.
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Sampled realized-gain pattern of a design.
    Pattern {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        design: DesignInput,
        #[arg(long, value_parser = parse_cut)]
        cut: Option<Cut>,
        #[arg(long)]
        resolution_deg: Option<f64>,
    },
    /// Regenerate the published design tables and diff against the bundled values.
    ReproduceTables {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        max_n: Option<usize>,
        /// Evaluate the published designs only.
        #[arg(long)]
        no_optimize: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    freq_hz: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Population size.
    #[arg(long)]
    np: Option<usize>,
    /// Generations.
    #[arg(long)]
    iters: Option<usize>,
    /// Crossover probability.
    #[arg(long)]
    cr: Option<f64>,
    /// Mutation factor.
    #[arg(long)]
    f_factor: Option<f64>,
    #[arg(long)]
    gap_min_lambda: Option<f64>,
    #[arg(long)]
    gap_max_lambda: Option<f64>,
    /// `sweep` or a 1-based port.
    #[arg(long)]
    feed: Option<FeedSetting>,
    /// Output directory; without it results go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Score candidates on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct DesignInput {
    /// Design JSON written by an earlier command.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Loads(Vec<Option<f64>>);

fn parse_loads(s: &str) -> Result<Loads, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if t.is_empty() {
                Ok(None)
            } else {
                t.parse::<f64>().map(Some).map_err(|e| format!("`{t}`: {e}"))
            }
        })
        .collect::<Result<_, _>>()
        .map(Loads)
}

fn parse_cut(s: &str) -> Result<Cut, String> {
    match s.to_ascii_lowercase().as_str() {
        "azimuth" => Ok(Cut::Azimuth),
        "sphere" => Ok(Cut::Sphere),
        _ => Err(format!("expected `azimuth` or `sphere`, got `{s}`")),
    }
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            freq_hz: self.freq_hz,
            seed: self.seed,
            np: self.np,
            iters: self.iters,
            cr: self.cr,
            f_factor: self.f_factor,
            gap_min_lambda: self.gap_min_lambda,
            gap_max_lambda: self.gap_max_lambda,
            feed: self.feed,
            out: self.out.clone(),
            format: self.format,
            execution: self.sequential.then_some(Execution::Sequential),
            ..Overrides::default()
        }
    }
}

fn resolve(cmd: Cmd) -> error::Result<(Command, RunConfig)> {
    let (command, common, extra) = match cmd {
        Cmd::OptimizeActive(c) => (Command::OptimizeActive, c, Overrides::default()),
        Cmd::OptimizeParasitic(c) => (Command::OptimizeParasitic, c, Overrides::default()),
        Cmd::Ula { common, spacing_lambda } => (
            Command::Ula,
            common,
            Overrides {
                spacing_lambda,
                ..Overrides::default()
            },
        ),
        Cmd::Evaluate {
            common,
            design,
            kind,
            positions_lambda,
            loads,
        } => (
            Command::Evaluate,
            common,
            Overrides {
                input: design.input,
                kind,
                positions_lambda,
                loads_ohm: loads.map(|l| l.0),
                ..Overrides::default()
            },
        ),
        Cmd::Sensitivity {
            common,
            design,
            scale,
            samples,
        } => (
            Command::Sensitivity,
            common,
            Overrides {
                input: design.input,
                scale,
                samples,
                ..Overrides::default()
            },
        ),
        Cmd::Pattern {
            common,
            design,
            cut,
            resolution_deg,
        } => (
            Command::Pattern,
            common,
            Overrides {
                input: design.input,
                cut,
                resolution_deg,
                ..Overrides::default()
            },
        ),
        Cmd::ReproduceTables {
            common,
            seeds,
            max_n,
            no_optimize,
        } => (
            Command::ReproduceTables,
            common,
            Overrides {
                seeds,
                max_n,
                no_optimize,
                ..Overrides::default()
            },
        ),
    };
    let mut cfg = RunConfig::resolve(common.config.as_deref(), &common.overrides())?;
    cfg.apply(&extra);
    Ok((command, cfg))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = resolve(cli.command).and_then(|(command, cfg)| run::execute(command, &cfg, stdout, stderr));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
