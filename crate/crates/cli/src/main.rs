use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use matchwelfare_cli::claims;
use matchwelfare_cli::commands::{self, Mechanism, RunConfig};
use matchwelfare_cli::io::{self, Loaded};
use matchwelfare_cli::sweep::{self, SweepConfig};

#[derive(Parser)]
#[command(name = "matchwelfare", version, about = "Welfare of RSD and PS in one-sided matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct GenParams {
    /// Instance family (identical, random, rsd-hard, ps-hard, kvv-hard,
    /// sd-log, partial-adversarial, kdemand).
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        /// Family name; same as --generator.
        family: Option<String>,
        #[command(flatten)]
        params: GenParams,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a mechanism and report welfare.
    Run {
        #[arg(long)]
        instance: Option<PathBuf>,
        #[command(flatten)]
        params: GenParams,
        #[arg(long, value_enum)]
        mechanism: Mechanism,
        /// Benchmark file, or `random` for a seeded uniform matching.
        #[arg(long)]
        benchmark: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Arrival order for `sd`, comma separated.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        /// Also emit the Birkhoff-von Neumann lottery (ps only).
        #[arg(long)]
        lottery: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every published claim and report pass/fail.
    Verify {
        /// Claim tags or numbers, comma separated.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Welfare, optimum and ratio for one family over a grid of sizes.
    Sweep {
        family: String,
        /// Comma-separated sizes.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        mechanism: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn generate(family: &str, p: &GenParams) -> Result<Loaded> {
    let spec = commands::generator_spec(family, p.n, p.t, p.k, p.seed)?;
    Ok(spec.generate()?.into())
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { family, params, out } => {
            let family = match (family, params.generator.clone()) {
                (Some(f), None) | (None, Some(f)) => f,
                (Some(_), Some(_)) => bail!("give the family either positionally or with --generator, not both"),
                (None, None) => bail!("missing generator family"),
            };
            let loaded = generate(&family, &params)?;
            emit(out.as_ref(), &io::instance_json(&loaded))?;
        }
        Command::Run { instance, params, mechanism, benchmark, samples, order, lottery, format, out } => {
            let loaded = match (&instance, &params.generator) {
                (Some(path), None) => io::read_instance(path)?,
                (None, Some(family)) => generate(family, &params)?,
                _ => bail!("give exactly one of --instance PATH or --generator NAME"),
            };
            let cfg = RunConfig {
                mechanism,
                benchmark,
                samples,
                seed: params.seed,
                guard: commands::enum_guard()?,
                order,
                lottery,
            };
            let value = commands::run(&loaded, &cfg)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&value)? + "\n",
                Format::Csv => commands::flatten_csv(&value),
            };
            emit(out.as_ref(), &text)?;
        }
        Command::Verify { only, fixtures, format, out } => {
            let fixtures = fixtures.unwrap_or_else(claims::default_fixtures);
            let selected = claims::select(only.as_deref())?;
            let outcomes: Vec<_> = selected.into_iter().map(|c| claims::evaluate(c, &fixtures)).collect();
            let text = match format {
                None => {
                    let mut s: String = outcomes.iter().map(|o| o.line() + "\n").collect();
                    let failed = outcomes.iter().filter(|o| !o.passed).count();
                    s.push_str(&format!("{} passed, {failed} failed\n", outcomes.len() - failed));
                    s
                }
                Some(Format::Json) => serde_json::to_string_pretty(&outcomes)? + "\n",
                Some(Format::Csv) => {
                    let mut s = String::from("id,tag,passed,expected,actual,tolerance\n");
                    for o in &outcomes {
                        let quote = |x: &str| format!("\"{}\"", x.replace('"', "\"\""));
                        s.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            o.id,
                            o.tag,
                            o.passed,
                            quote(&o.expected),
                            quote(&o.actual),
                            quote(o.tolerance)
                        ));
                    }
                    s
                }
            };
            emit(out.as_ref(), &text)?;
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Sweep { family, grid, t, k, samples, seed, mechanism, format, out } => {
            let cfg = SweepConfig {
                family,
                grid: sweep::parse_grid(&grid)?,
                t,
                k,
                samples,
                seed,
                mechanism,
            };
            let rows = sweep::sweep(&cfg).context("sweep failed")?;
            let text = match format {
                Format::Csv => sweep::to_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(out.as_ref(), &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
