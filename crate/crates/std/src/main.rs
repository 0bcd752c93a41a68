use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dilute::budget::{budget_sweep, csv_rows, BudgetConfig, Kind};
use dilute::commands::{
    eos_table, free_energy_table, reference_soft_ball, scattering, scattering_row, two_body, wavefunction_rows,
    Chemical, EosGrid, EosRows, TwoBodyConfig,
};
use dilute::grid::{parse_counts, parse_grid};
use dilute::records::{write_csv, write_json, Format, Meta};
use dilute::verify::{run_verify, VerifyConfig, VerifyReport};
use dilute::{exit, potential_file, CliError, Result};
use dilute_core::dilute_eos::{EosOptions, Validity};
use serde::Serialize;

/// Equation of state, scattering lengths and inequality checks for the
/// dilute Fermi gas (units ħ = 1, 2m = 1, k_B = 1).
#[derive(Parser)]
#[command(name = "dilute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output format (default depends on the subcommand).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the run metadata block from JSON output.
    #[arg(long)]
    no_meta: bool,
}

#[derive(Args)]
struct EosFlags {
    /// Envelope exponent α in (0, 1/33).
    #[arg(long, default_value_t = 1.0 / 34.0)]
    alpha: f64,
    /// a³ϱ₀ above which rows are flagged not_dilute.
    #[arg(long, default_value_t = 1e-2)]
    max_a3rho: f64,
    /// Fugacity below which rows are flagged low_fugacity.
    #[arg(long, default_value_t = 0.1)]
    min_z: f64,
}

impl EosFlags {
    fn options(&self) -> EosOptions {
        EosOptions {
            alpha: self.alpha,
            validity: Validity {
                max_a3rho: self.max_a3rho,
                min_z: self.min_z,
            },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pressure table over (β, μ or z, a, q), or polarized rows with --m.
    EosTable {
        /// Inverse temperature grid.
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        beta: String,
        /// Chemical potential grid.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "z")]
        mu: Option<String>,
        /// Fugacity grid (μ = ln z / β).
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// Scattering length grid.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        a: String,
        /// Spin multiplicity grid.
        #[arg(long, default_value = "2")]
        q: String,
        /// Spin field grid; switches to two-component polarized rows.
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
        #[command(flatten)]
        eos: EosFlags,
        #[command(flatten)]
        output: Output,
    },
    /// Free-energy table over (β, ϱ, a, q).
    FreeEnergy {
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        beta: String,
        /// Density grid.
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        a: String,
        #[arg(long, default_value = "2")]
        q: String,
        #[command(flatten)]
        eos: EosFlags,
        #[command(flatten)]
        output: Output,
    },
    /// Scattering length of a potential spec file.
    Scattering {
        #[arg(long)]
        potential: PathBuf,
        /// Use the adaptive ODE path even for piecewise-constant potentials.
        #[arg(long)]
        ode: bool,
        /// Write (r, u, φ) samples of the zero-energy solution as CSV.
        #[arg(long)]
        wavefunction: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the inequality suites; exit 1 on any failure.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per suite (grid suites are truncated row-major).
        #[arg(long)]
        instances: Option<usize>,
        /// Comma-separated suites; repeatable. Default: all.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Append one deliberately failing instance (exit-code self-test).
        #[arg(long)]
        inject_failure: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Error-budget sweep over x = aϱ₀^{1/3}.
    #[command(allow_negative_numbers = true)]
    Budget {
        /// Dilution grid.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value_t = Kind::Lower)]
        kind: Kind,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.005)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Fugacity of the reference state (default 1).
        #[arg(long, conflicts_with = "mu")]
        z: Option<f64>,
        /// Chemical potential of the reference state.
        #[arg(long)]
        mu: Option<f64>,
        /// Potential range in units of a (upper schedule).
        #[arg(long, default_value_t = 0.0)]
        r0_over_a: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Lowest two-body level in a periodic lattice box against 8πa/L³.
    TwoBody {
        /// Potential spec file (default: v = 0.5 on r < 1).
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long, default_value_t = 50.0)]
        side: f64,
        #[arg(long, default_value_t = 32)]
        n_grid: usize,
        /// Grid sizes for a refinement series, e.g. 16,24,32 (overrides --n-grid).
        #[arg(long)]
        refine: Option<String>,
        /// Eigensolver residual tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<B: Serialize, R: Serialize>(o: &Output, default: Format, command: &'static str, body: B, rows: &[R]) -> Result<()> {
    let mut w = sink(&o.out)?;
    match o.format.unwrap_or(default) {
        Format::Json => write_json(&mut w, command, (!o.no_meta).then(Meta::now), body)?,
        Format::Csv => write_csv(&mut w, rows)?,
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}

#[derive(Serialize)]
struct Rows<'a, T: Serialize> {
    rows: &'a [T],
}

fn failure_lines(report: &VerifyReport) -> Vec<String> {
    report
        .suites
        .iter()
        .filter(|s| s.failures > 0)
        .map(|s| {
            format!(
                "FAIL {}: {} of {} instances (seed {}), first failing {:?}",
                s.check, s.failures, s.instances, s.seed, s.failing
            )
        })
        .collect()
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::EosTable { beta, mu, z, a, q, m, eos, output } => {
            let chemical = match (mu, z) {
                (Some(mu), None) => Chemical::Mu(parse_grid(&mu, "--mu")?),
                (None, Some(z)) => Chemical::Z(parse_grid(&z, "--z")?),
                _ => return Err(CliError::config("give exactly one of --mu or --z")),
            };
            let grid = EosGrid {
                beta: parse_grid(&beta, "--beta")?,
                chemical,
                a: parse_grid(&a, "--a")?,
                q: parse_counts(&q, "--q")?,
                m: m.map(|m| parse_grid(&m, "--m")).transpose()?,
                options: eos.options(),
            };
            match eos_table(&grid)? {
                EosRows::Plain(rows) => emit(&output, Format::Csv, "eos-table", Rows { rows: &rows }, &rows)?,
                EosRows::Polarized(rows) => emit(&output, Format::Csv, "eos-table", Rows { rows: &rows }, &rows)?,
            }
        }
        Command::FreeEnergy { beta, rho, a, q, eos, output } => {
            let rows = free_energy_table(
                &parse_grid(&beta, "--beta")?,
                &parse_grid(&rho, "--rho")?,
                &parse_grid(&a, "--a")?,
                &parse_counts(&q, "--q")?,
                &eos.options(),
            )?;
            emit(&output, Format::Csv, "free-energy", Rows { rows: &rows }, &rows)?;
        }
        Command::Scattering { potential, ode, wavefunction, output } => {
            let v = potential_file::load(&potential)?;
            let res = scattering(&v, ode)?;
            if let Some(path) = &wavefunction {
                write_csv(sink(&Some(path.clone()))?, &wavefunction_rows(&res))?;
            }
            let row = scattering_row(&v, &res);
            emit(&output, Format::Json, "scattering", &row, std::slice::from_ref(&row))?;
        }
        Command::Verify { seed, instances, suite, inject_failure, output } => {
            let mut cfg = VerifyConfig::new(seed);
            cfg.instances = instances;
            cfg.inject_failure = inject_failure;
            if !suite.is_empty() {
                cfg.suites = suite.into_iter().map(|s| s.trim().to_string()).collect();
            }
            let report = run_verify(&cfg)?;
            emit(&output, Format::Json, "verify", &report, &report.suites)?;
            if !report.pass {
                for line in failure_lines(&report) {
                    eprintln!("{line}");
                }
                return Ok(exit::VERIFICATION_FAILED);
            }
        }
        Command::Budget { x, kind, epsilon, nu, beta, z, mu, r0_over_a, output } => {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(CliError::config("--beta must be finite and positive"));
            }
            let ln_z = match (z, mu) {
                (Some(z), _) if z > 0.0 => z.ln(),
                (Some(z), _) => return Err(CliError::config(format!("--z must be positive, got {z}"))),
                (None, Some(mu)) => beta * mu,
                (None, None) => 0.0,
            };
            let cfg = BudgetConfig {
                x: parse_grid(&x, "--x")?,
                kind,
                epsilon,
                nu,
                beta,
                ln_z,
                r0_over_a,
            };
            let sweep = budget_sweep(&cfg)?;
            emit(&output, Format::Json, "budget", &sweep, &csv_rows(&sweep))?;
        }
        Command::TwoBody { potential, side, n_grid, refine, tol, output } => {
            let potential = match potential {
                Some(p) => potential_file::load(&p)?,
                None => reference_soft_ball(),
            };
            let n_grid = match refine {
                Some(r) => parse_counts(&r, "--refine")?.into_iter().map(|n| n as usize).collect(),
                None => vec![n_grid],
            };
            let report = two_body(&TwoBodyConfig {
                potential,
                side,
                n_grid,
                tol,
            })?;
            emit(&output, Format::Json, "two-body", &report, &report.rows)?;
        }
    }
    Ok(exit::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
