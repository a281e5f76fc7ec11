use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use opo_reservoir::commands::{self, FitKind};
use opo_reservoir::descriptor::ExperimentDescriptor;
use opo_reservoir::fitting::ingest_data;
use opo_reservoir::grid::{grid, Spacing};
use opo_reservoir::spectrum::Mode;
use opo_reservoir::table::ResultTable;
use opo_reservoir::{Error, Result};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Canonical,
    Verbatim,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Canonical => Mode::Canonical,
            ModeArg::Verbatim => Mode::Verbatim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitArg {
    Alpha,
    Linear,
    CoshScale,
}

/// Squeezed-reservoir OPO toolkit.
#[derive(Debug, Parser)]
#[command(name = "opo", version)]
struct Cli {
    /// Experiment descriptor (JSON).
    #[arg(long, global = true, conflicts_with = "preset")]
    descriptor: Option<PathBuf>,

    /// Shipped descriptor preset, e.g. paper-opo2.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Spectrum formula; defaults to the descriptor's.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quadrature noise spectrum over a sideband grid.
    Spectrum {
        /// Evaluate at these sidebands (rad/s) instead of the descriptor grid.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        omega: Vec<f64>,
        /// Generate a grid: lo,hi,count.
        #[arg(long, value_delimiter = ',', num_args = 3, conflicts_with = "omega")]
        range: Vec<f64>,
        #[arg(long, requires = "range")]
        log: bool,
        /// Fail with status 5 if any sideband hits the threshold.
        #[arg(long)]
        strict: bool,
    },
    /// Evaluate the descriptor's sweep axis.
    Sweep {
        /// Measured points to fit and overlay (x,y[,sigma]).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Where to write the fitted overlay; defaults next to --out.
        #[arg(long, requires = "data")]
        fit_out: Option<PathBuf>,
    },
    /// Threshold, reduced threshold and classical gain.
    Threshold,
    /// Co-resonance of the two cavity combs.
    Comb {
        /// Co-resonance tolerance, Hz.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, requires = "fsr2")]
        fsr1: Option<f64>,
        #[arg(long, requires = "fsr1")]
        fsr2: Option<f64>,
    },
    /// Beta-line linewidth of a frequency-noise trace.
    Linewidth {
        trace: PathBuf,
        /// Lower integration bound 1/T0, Hz.
        #[arg(long)]
        fmin: Option<f64>,
    },
    /// Fit a model to x,y[,sigma] data.
    Fit {
        data: PathBuf,
        #[arg(long, value_enum)]
        model: FitArg,
        /// Search interval for alpha.
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 10.0])]
        bounds: Vec<f64>,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(table: &ResultTable, format: OutFormat) -> String {
    match format {
        OutFormat::Csv => table.to_csv(),
        OutFormat::Json => format!("{}\n", serde_json::to_string_pretty(&table.to_json()).unwrap()),
    }
}

fn load_descriptor(cli: &Cli) -> Result<Option<ExperimentDescriptor>> {
    match (&cli.descriptor, &cli.preset) {
        (Some(path), _) => {
            let bytes = read(path)?;
            let text = String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))?;
            ExperimentDescriptor::from_json(&text).map(Some)
        }
        (None, Some(name)) => ExperimentDescriptor::preset(name).map(Some),
        (None, None) => Ok(None),
    }
}

fn companion_path(out: &Path, format: OutFormat) -> PathBuf {
    let ext = match format {
        OutFormat::Csv => "fit.csv",
        OutFormat::Json => "fit.json",
    };
    out.with_extension(ext)
}

fn run(cli: Cli) -> Result<()> {
    let descriptor = load_descriptor(&cli)?;
    let need = || {
        descriptor
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs --descriptor or --preset".into()))
    };
    let mode = cli.mode.map(Mode::from);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Spectrum {
            omega,
            range,
            log,
            strict,
        } => {
            let d = need()?;
            let omegas = if !omega.is_empty() {
                omega.clone()
            } else if range.len() == 3 {
                let spacing = if *log { Spacing::Log } else { Spacing::Linear };
                grid(range[0], range[1], range[2] as usize, spacing)?
            } else {
                commands::default_omega_grid(d)?
            };
            let table = commands::cmd_spectrum(d, mode, &omegas)?;
            write(out, &render(&table, cli.format))?;
            if *strict {
                if let Some(i) = table.rows.iter().position(|r| r.last() == Some(&"threshold".into())) {
                    return Err(Error::ThresholdSingularity {
                        omega: omegas[i],
                        denominator: f64::NAN,
                    });
                }
            }
        }
        Command::Sweep { data, fit_out } => {
            let d = need()?;
            let table = commands::cmd_sweep(d, mode)?;
            if let Some(data) = data {
                let points = ingest_data(read(data)?.as_slice())?;
                let overlay = commands::cmd_sweep_overlay(d, &points)?;
                let path = match (fit_out, out) {
                    (Some(p), _) => p.clone(),
                    (None, Some(o)) => companion_path(o, cli.format),
                    (None, None) => {
                        return Err(Error::Config("--data needs --out or --fit-out".into()));
                    }
                };
                write(Some(&path), &render(&overlay, cli.format))?;
            }
            write(out, &render(&table, cli.format))?;
        }
        Command::Threshold => {
            let table = commands::cmd_threshold(need()?)?;
            write(out, &render(&table, cli.format))?;
        }
        Command::Comb { tol, fsr1, fsr2 } => {
            let fsrs = fsr1.zip(*fsr2);
            let table = commands::cmd_comb(need()?, *tol, fsrs)?;
            write(out, &render(&table, cli.format))?;
        }
        Command::Linewidth { trace, fmin } => {
            let v = commands::cmd_linewidth(&read(trace)?, *fmin)?;
            write(out, &format!("{}\n", serde_json::to_string_pretty(&v).unwrap()))?;
        }
        Command::Fit { data, model, bounds } => {
            let kind = match model {
                FitArg::Alpha => FitKind::Alpha,
                FitArg::Linear => FitKind::Linear,
                FitArg::CoshScale => FitKind::CoshScale,
            };
            let v = commands::cmd_fit(kind, &read(data)?, descriptor.as_ref(), mode, (bounds[0], bounds[1]))?;
            write(out, &format!("{}\n", serde_json::to_string_pretty(&v).unwrap()))?;
        }
    }
    Ok(())
}

fn fail(kind: &str, message: &str, code: i32) -> ExitCode {
    eprintln!("{}", json!({"error": kind, "message": message, "exit_code": code}));
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&msg);
            return fail("usage", first.trim_start_matches("error: "), 2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), e.exit_code()),
    }
}
