//! Command-line front end. Exit codes: 0 success, 1 bound violations or a
//! failed run, 2 usage or configuration errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::output::{write_outputs, write_report};
use crate::experiment::{run_experiment, ExperimentConfig, ExperimentOutcome, Scale};
use crate::generators::{generate, GeneratorKind, GeneratorSpec};
use crate::tt::io::{write_tt, TtFileHeader};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "tt-inherit", version, about = "Sampled TT subtensors: incoherence, conditioning and inheritance bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full experiment and write trials.csv, summary.json and SVGs.
    Run(ConfigArgs),
    /// Run the bound checks only; exit 1 on any violation.
    Verify(ConfigArgs),
    /// Write one random TT tensor in the binary core format.
    Generate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
        /// Generator to use; defaults to the first one in the config.
        #[arg(long)]
        generator: Option<GeneratorKind>,
    },
    /// Recompute summaries and SVGs from an existing trials.csv.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        no_svg: bool,
    },
}

#[derive(Args, Debug)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Preset shape; with no --config, the whole preset is used.
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl clap::builder::ValueParserFactory for GeneratorKind {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<GeneratorKind>().map_err(|e| e.to_string()))
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, self.scale) {
            (Some(path), scale) => {
                let c = ExperimentConfig::load(path)?;
                match scale {
                    Some(s) => c.with_scale(s),
                    None => c,
                }
            }
            (None, Some(s)) => ExperimentConfig::preset(s),
            (None, None) => return Err(Error::Config("either --config or --scale is required".into())),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Config(_))
}

fn report_outcome(outcome: &ExperimentOutcome) {
    for f in &outcome.failures {
        eprintln!("warning: {} trial {} excluded: {}", f.generator, f.trial, f.error);
    }
    println!(
        "{} trials completed, {} excluded, {} bound violations",
        outcome.results.len(),
        outcome.failures.len(),
        outcome.violations()
    );
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let outcome = run_experiment(&cfg)?;
            let files = write_outputs(&outcome, &cfg, &cfg.output_dir)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            report_outcome(&outcome);
            Ok(if outcome.violations() == 0 { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Verify(args) => {
            let cfg = args.resolve()?;
            let outcome = run_experiment(&cfg)?;
            for r in &outcome.results {
                for rec in &r.records {
                    for c in rec.checks.iter().filter(|c| !c.satisfied) {
                        println!(
                            "VIOLATION {} trial {} {:?} {}: {:.6e} > {:.6e}",
                            r.generator, r.trial, rec.subtensor, c.name, c.lhs, c.rhs
                        );
                    }
                }
            }
            report_outcome(&outcome);
            Ok(if outcome.violations() == 0 { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Generate { cfg, out, generator } => {
            let cfg = cfg.resolve()?;
            let kind = generator.unwrap_or(cfg.generators[0]);
            let spec = GeneratorSpec::new(kind, cfg.shape()?, cfg.ranks.clone(), cfg.master_seed);
            let g = generate(&spec, cfg.rank_tol)?;
            let header = TtFileHeader::for_tensor(&g.tensor, Some(kind.name().to_string()), Some(g.seed_used));
            let file = std::io::BufWriter::new(std::fs::File::create(&out)?);
            write_tt(file, &g.tensor, &header)?;
            println!("wrote {} ({kind}, shape {:?}, ranks {:?}, seed {})", out.display(), cfg.shape, cfg.ranks, g.seed_used);
            Ok(EXIT_OK)
        }
        Command::Report { input, no_svg } => {
            let report = write_report(&input, !no_svg)?;
            println!(
                "{} rows, {} with failed bounds, {} generators summarized",
                report.rows,
                report.failed_bound_rows,
                report.summaries.len()
            );
            Ok(if report.failed_bound_rows == 0 { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

/// Parse `argv` (program name first) and run; returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) if is_usage(&e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_VIOLATION
        }
    }
}
