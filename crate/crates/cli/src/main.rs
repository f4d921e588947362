use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pseudoherm::fixtures::{
    family_eq23, family_eq28, family_eq3, fixture_i1_with_a, fixture_i2, random_real_spectrum,
};
use pseudoherm::Tolerance;
use pseudoherm_cli::{
    analyze, emit_report, fixture_to_file, parse_matrix_file, write_matrix_str, AnalysisReport,
    AnalyzeOptions, ExitClass, FileError, Format,
};

#[derive(Parser)]
#[command(name = "pseudoherm", version, about = "Metric and P, T, C analysis of pseudo-Hermitian matrices")]
struct Cli {
    /// Absolute tolerance; the relative tolerance is ten times this
    #[arg(long, global = true, env = "PSEUDOHERM_TOL", value_parser = parse_tol, allow_negative_numbers = true)]
    tol: Option<f64>,

    /// Report format
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Phases {
    Auto,
    File,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Metric file; its `eta` field is used, or its `H` field when absent
    #[arg(long)]
    metric: Option<PathBuf>,

    /// Eigenpair permutation applied to the default ordering, e.g. `1,0`
    #[arg(long, value_delimiter = ',')]
    ordering: Option<Vec<usize>>,

    /// Use the automatic phases or the `phases` field of the input file
    #[arg(long, value_enum, default_value = "auto")]
    phases: Phases,

    /// Build the conjugate-pair metric instead of the real-spectrum suite
    #[arg(long)]
    conjugate_pairs: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    I1,
    I2,
    Eq3,
    Eq23,
    Eq28,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one matrix file
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        args: AnalyzeArgs,
        /// Write the report here instead of stdout
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Analyze several files concurrently; reports are printed in input order
    Batch {
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        args: AnalyzeArgs,
    },
    /// Write a built-in example as a matrix file
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
        /// Family parameters in order (i1: r a; i2/eq28: a b c x; eq3/eq23: a b c)
        #[arg(allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Analyze seeded random real-spectrum matrices and summarize
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: u64,
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err("must be a finite number >= 0".into())
    }
}

fn tolerance(tol: Option<f64>) -> anyhow::Result<Tolerance> {
    match tol {
        None => Ok(Tolerance::default()),
        Some(abs) => Tolerance::scaled(abs).map_err(|e| anyhow::anyhow!("--tol: {e}")),
    }
}

/// Reads the input and builds options; errors are returned with their exit class.
fn prepare(
    input: &Path,
    args: &AnalyzeArgs,
    tol: Tolerance,
) -> Result<(pseudoherm::ComplexSquareMatrix, AnalyzeOptions), (ExitClass, String)> {
    let file_err = |e: FileError| {
        let class = match e {
            FileError::Io { .. } => ExitClass::Other,
            _ => ExitClass::Parse,
        };
        (class, e.to_string())
    };
    let file = parse_matrix_file(input).map_err(file_err)?;
    let metric = match &args.metric {
        Some(path) => {
            let m = parse_matrix_file(path).map_err(file_err)?;
            Some(m.eta.unwrap_or(m.h))
        }
        None => file.eta.clone(),
    };
    let phases = match args.phases {
        Phases::Auto => None,
        Phases::File => match file.phases.clone() {
            Some(p) => Some(p),
            None => {
                return Err((
                    ExitClass::Usage,
                    format!("{}: --phases file given but the file has no `phases`", input.display()),
                ))
            }
        },
    };
    let opts = AnalyzeOptions {
        tol,
        metric,
        ordering: args.ordering.clone(),
        phases,
        conjugate_pairs: args.conjugate_pairs,
    };
    Ok((file.h, opts))
}

fn run_one(input: &Path, args: &AnalyzeArgs, tol: Tolerance) -> Result<AnalysisReport, (ExitClass, String)> {
    let (h, opts) = prepare(input, args, tol)?;
    Ok(analyze(&h, &opts))
}

fn write_out(text: &str, output: Option<&PathBuf>) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fixture(name: FixtureName, p: &[f64]) -> anyhow::Result<pseudoherm::fixtures::PaperFixture> {
    let arg = |k: usize, default: f64| p.get(k).copied().unwrap_or(default);
    let expected = match name {
        FixtureName::I1 => 2,
        FixtureName::Eq3 | FixtureName::Eq23 => 3,
        FixtureName::I2 | FixtureName::Eq28 => 4,
    };
    if p.len() > expected {
        bail!("at most {expected} parameters expected, got {}", p.len());
    }
    let fx = match name {
        FixtureName::I1 => fixture_i1_with_a(arg(0, 2.0), arg(1, 1.0)),
        FixtureName::I2 => fixture_i2(arg(0, 3.0), arg(1, 1.0), arg(2, 1.0), arg(3, 2.0)),
        FixtureName::Eq3 => family_eq3(arg(0, 1.0), arg(1, 1.0), arg(2, 4.0)),
        FixtureName::Eq23 => family_eq23(arg(0, 0.0), arg(1, 3.0), arg(2, 5.0)),
        FixtureName::Eq28 => family_eq28(arg(0, 3.0), arg(1, 1.0), arg(2, 1.0), arg(3, 2.0)),
    }?;
    Ok(fx)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let tol = tolerance(cli.tol)?;
    match cli.command {
        Command::Analyze { input, args, output } => match run_one(&input, &args, tol) {
            Ok(report) => {
                write_out(&emit_report(&report, cli.format), output.as_ref())?;
                Ok(ExitCode::from(report.exit_code() as u8))
            }
            Err((class, msg)) => {
                eprintln!("error: {msg}");
                Ok(ExitCode::from(class.code() as u8))
            }
        },
        Command::Batch { inputs, args } => {
            let results: Vec<_> = std::thread::scope(|s| {
                let handles: Vec<_> = inputs
                    .iter()
                    .map(|input| s.spawn(|| run_one(input, &args, tol)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("analysis thread panicked"))
                    .collect()
            });
            let mut worst = 0;
            for (input, result) in inputs.iter().zip(results) {
                match result {
                    Ok(report) => {
                        worst = worst.max(report.exit_code());
                        if cli.format == Format::Markdown {
                            println!("<!-- {} -->", input.display());
                        }
                        print!("{}", emit_report(&report, cli.format));
                    }
                    Err((class, msg)) => {
                        worst = worst.max(class.code());
                        eprintln!("error: {msg}");
                    }
                }
            }
            Ok(ExitCode::from(worst as u8))
        }
        Command::Fixture { name, params, output } => {
            let fx = fixture(name, &params)?;
            let file = fixture_to_file(&fx, &tol)?;
            write_out(&write_matrix_str(&file), output.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { seed, count, dim } => {
            let mut failures = 0u64;
            for k in 0..count {
                let g = random_real_spectrum(dim, seed.wrapping_add(k))?;
                let eta = (&g.d * &g.d.adjoint())
                    .inverse()
                    .context("random diagonalizer is singular")?;
                let opts = AnalyzeOptions {
                    tol,
                    metric: Some(eta),
                    ..Default::default()
                };
                let report = analyze(&g.h, &opts);
                let status = if report.verdicts.all_pass { "pass" } else { "FAIL" };
                if !report.verdicts.all_pass {
                    failures += 1;
                }
                println!("seed {} dim {dim}: {status}", seed.wrapping_add(k));
            }
            println!("{} of {count} passed", count - failures);
            Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(ExitClass::Suite.code() as u8)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ExitClass::Other.code() as u8)
        }
    }
}
