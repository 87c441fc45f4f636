//! Subcommand bodies.

use std::io::Write;
use std::time::Instant;

use endfire::excitation::ArrayMode;
use endfire::performance::Drive;
use endfire::workflows::reproduce::reproduce_tables;
use endfire::workflows::{
    evaluate_design, optimize_active, optimize_parasitic, parasitic_candidate, pattern_export, sensitivity,
    ula_baseline, DesignKind, DesignResult,
};
use endfire::{ArrayLayout, Direction};

use crate::config::{Format, LayoutKind, RunConfig};
use crate::emit::{self, Artifact, Envelope, PatternOutput, SensitivityOutput};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    OptimizeActive,
    OptimizeParasitic,
    Ula,
    Evaluate,
    Sensitivity,
    Pattern,
    ReproduceTables,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::OptimizeActive => "optimize-active",
            Command::OptimizeParasitic => "optimize-parasitic",
            Command::Ula => "ula",
            Command::Evaluate => "evaluate",
            Command::Sensitivity => "sensitivity",
            Command::Pattern => "pattern",
            Command::ReproduceTables => "reproduce-tables",
        }
    }
}

fn headline(d: &DesignResult) -> String {
    let feed = d.feed().map(|f| format!(", feed {}", f + 1)).unwrap_or_default();
    format!(
        "{:?} N={}{feed}: realized gain {:.2} dBi, size {:.2} lambda, {:.3} s",
        d.kind,
        d.n,
        d.realized_gain_dbi(),
        d.size_lambda(),
        d.runtime.total_s
    )
    .to_lowercase()
}

fn optimize_parasitic_from(cfg: &RunConfig) -> Result<DesignResult> {
    let n = cfg.size()?;
    let p = cfg.params()?;
    let de = cfg.de_config(n, ArrayMode::Parasitic)?;
    Ok(optimize_parasitic(n, &p, &de, cfg.feed.policy(n)?)?)
}

/// Design from `input`, or a fresh single-feed optimization.
fn source_design(cfg: &RunConfig) -> Result<DesignResult> {
    match &cfg.input {
        Some(path) => emit::load_design(path),
        None => optimize_parasitic_from(cfg),
    }
}

fn evaluate_layout(cfg: &RunConfig) -> Result<DesignResult> {
    let Some(spec) = &cfg.layout else {
        return Err(CliError::config(
            "layout",
            "evaluate needs --input or a layout (--positions-lambda)",
        ));
    };
    let p = cfg.params()?;
    let n = spec.positions_lambda.len();
    if let Some(want) = cfg.n {
        if want != n {
            return Err(CliError::config(
                "layout.positions_lambda",
                format!("{n} positions but n = {want}"),
            ));
        }
    }
    let layout = ArrayLayout::from_wavelengths(&spec.positions_lambda, &p).map_err(|e| match e {
        endfire::Error::InvalidParameter { reason, .. } | endfire::Error::Argument(reason) => {
            CliError::config("layout.positions_lambda", reason)
        }
        other => other.into(),
    })?;
    let dir = Direction::END_FIRE;
    match spec.kind {
        LayoutKind::Active => Ok(evaluate_design(
            DesignKind::Active,
            &layout,
            &Drive::Active { currents: None },
            &p,
            dir,
        )?),
        LayoutKind::Parasitic => {
            let drive = match &spec.loads_ohm {
                Some(loads) => {
                    if loads.len() != n {
                        return Err(CliError::config(
                            "layout.loads_ohm",
                            format!("{} entries for {n} elements", loads.len()),
                        ));
                    }
                    let open: Vec<usize> = (0..n).filter(|&k| loads[k].is_none()).collect();
                    let [feed] = open[..] else {
                        return Err(CliError::config(
                            "layout.loads_ohm",
                            "exactly one entry (the feed) must be empty",
                        ));
                    };
                    if let crate::config::FeedSetting::Port(k) = cfg.feed {
                        if k != feed + 1 {
                            return Err(CliError::config(
                                "feed",
                                format!("port {k} disagrees with the empty load entry at {}", feed + 1),
                            ));
                        }
                    }
                    Drive::Parasitic {
                        feed,
                        loads: loads.clone(),
                    }
                }
                None => {
                    let c = parasitic_candidate(&layout, &p, cfg.feed.policy(n)?, dir, false)?
                        .ok_or_else(|| endfire::Error::Constraint("no feed port gives a feasible design".into()))?;
                    Drive::Parasitic {
                        feed: c.feed,
                        loads: c.loads,
                    }
                }
            };
            Ok(evaluate_design(DesignKind::Parasitic, &layout, &drive, &p, dir)?)
        }
    }
}

fn reevaluate(d: &DesignResult) -> Result<DesignResult> {
    let p = d.params()?;
    Ok(evaluate_design(d.kind, &d.layout()?, &d.drive, &p, d.direction)?)
}

fn design_artifacts(command: &str, cfg: &RunConfig, started: Instant, d: &DesignResult) -> Vec<Artifact> {
    match cfg.output.format {
        Format::Json => vec![Artifact {
            name: format!("{command}.json"),
            bytes: emit::json(&Envelope::new(command, cfg, started.elapsed().as_secs_f64(), d)),
        }],
        Format::Csv => vec![
            Artifact {
                name: format!("{command}.csv"),
                bytes: emit::design_csv(d),
            },
            Artifact {
                name: format!("{command}-summary.csv"),
                bytes: emit::summary_csv([d]),
            },
        ],
    }
}

/// Runs one command; progress and summaries go to `stderr`, results to
/// `stdout` unless an output directory is configured.
pub fn execute(command: Command, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let started = Instant::now();
    let name = command.name();
    let elapsed = |t: Instant| t.elapsed().as_secs_f64();
    let (artifacts, note) = match command {
        Command::OptimizeActive | Command::OptimizeParasitic | Command::Ula | Command::Evaluate => {
            let d = match command {
                Command::OptimizeActive => {
                    let n = cfg.size()?;
                    let p = cfg.params()?;
                    optimize_active(n, &p, &cfg.de_config(n, ArrayMode::Active)?)?
                }
                Command::OptimizeParasitic => optimize_parasitic_from(cfg)?,
                Command::Ula => ula_baseline(cfg.size()?, cfg.ula.spacing_lambda, &cfg.params()?)?,
                _ => match &cfg.input {
                    Some(path) => reevaluate(&emit::load_design(path)?)?,
                    None => evaluate_layout(cfg)?,
                },
            };
            (design_artifacts(name, cfg, started, &d), headline(&d))
        }
        Command::Sensitivity => {
            let design = source_design(cfg)?;
            let report = sensitivity(&design, &cfg.sensitivity)?;
            let note = format!("{}; {} sensitivity rows", headline(&design), report.rows.len());
            let artifacts = match cfg.output.format {
                Format::Json => {
                    let out = SensitivityOutput {
                        design,
                        sensitivity: report,
                    };
                    vec![Artifact {
                        name: format!("{name}.json"),
                        bytes: emit::json(&Envelope::new(name, cfg, elapsed(started), out)),
                    }]
                }
                Format::Csv => vec![Artifact {
                    name: format!("{name}.csv"),
                    bytes: emit::sensitivity_csv(&report),
                }],
            };
            (artifacts, note)
        }
        Command::Pattern => {
            let design = source_design(cfg)?;
            let pattern = pattern_export(&design, &cfg.pattern)?;
            let note = match pattern.peak() {
                Some(s) => format!(
                    "{}; peak {:.2} dB at theta {} phi {}",
                    headline(&design),
                    s.realized_gain_db,
                    s.theta_deg,
                    s.phi_deg
                ),
                None => headline(&design),
            };
            let artifacts = match cfg.output.format {
                Format::Json => vec![Artifact {
                    name: format!("{name}.json"),
                    bytes: emit::json(&Envelope::new(name, cfg, elapsed(started), PatternOutput { design, pattern })),
                }],
                Format::Csv => vec![Artifact {
                    name: format!("{name}.csv"),
                    bytes: emit::pattern_csv(&pattern),
                }],
            };
            (artifacts, note)
        }
        Command::ReproduceTables => {
            let p = cfg.params()?;
            let r = reproduce_tables(&p, &cfg.reproduce)?;
            stdout
                .write_all(r.render().as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))?;
            if let Some(dir) = &cfg.output.dir {
                let artifacts = match cfg.output.format {
                    Format::Json => vec![Artifact {
                        name: format!("{name}.json"),
                        bytes: emit::json(&Envelope::new(name, cfg, elapsed(started), &r)),
                    }],
                    Format::Csv => vec![
                        Artifact {
                            name: format!("{name}.csv"),
                            bytes: emit::reproduction_csv(&r),
                        },
                        Artifact {
                            name: format!("{name}-designs.csv"),
                            bytes: emit::summary_csv(&r.designs),
                        },
                    ],
                };
                for path in emit::deliver(Some(dir), &artifacts, stdout)? {
                    let _ = writeln!(stderr, "wrote {}", path.display());
                }
            }
            let failed = r.rows.len() - r.passed();
            if failed > 0 {
                return Err(CliError::Tolerance {
                    failed,
                    total: r.rows.len(),
                });
            }
            return Ok(());
        }
    };
    let _ = writeln!(stderr, "{note}");
    for path in emit::deliver(cfg.output.dir.as_deref(), &artifacts, stdout)? {
        let _ = writeln!(stderr, "wrote {}", path.display());
    }
    Ok(())
}
