use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isotone::cli::{self, Overrides};
use isotone::error::Error;

/// Steady-state solver for isotone electric systems y = k - M(1/y).
#[derive(Parser)]
#[command(name = "isotone", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a problem file: bounds, existence verdict, dominant point,
    /// stability certificate (JSON report).
    Analyze {
        /// Problem file (JSON)
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
        /// Output path, or '-' for stdout
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// Emit the fixed-point iteration trace from a start vector (CSV).
    Trace {
        file: PathBuf,
        /// Start vector, comma separated: --start 23.13,21.94
        #[arg(long, value_delimiter = ',', required = true)]
        start: Vec<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// Classify iteration starts over a grid spanning a box (CSV, n = 2).
    Basin {
        file: PathBuf,
        /// Box corners x0,y0,x1,y1 with (x0,y0) < (x1,y1)
        #[arg(long = "box", value_delimiter = ',', required = true, num_args = 4)]
        corners: Vec<f64>,
        /// Grid points per axis
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// Enumerate all fixed points with residuals, dominance flags, and the
    /// comparability matrix (JSON report, n <= 3).
    Enumerate {
        file: PathBuf,
        /// Grid points per axis for the Newton sweep
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value = "-")]
        output: String,
    },
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Analyze { file, tol, budget, output } => {
            let text = std::fs::read_to_string(&file)?;
            let lp = cli::load_problem(&text, Overrides { tol, budget })?;
            let report = cli::cmd_analyze(&lp)?;
            write_output(&output, &report.to_json())
        }
        Command::Trace { file, start, tol, budget, output } => {
            let text = std::fs::read_to_string(&file)?;
            let lp = cli::load_problem(&text, Overrides { tol, budget })?;
            let csv = cli::cmd_trace(&lp, &start)?;
            write_output(&output, &csv)
        }
        Command::Basin { file, corners, grid, tol, budget, output } => {
            let text = std::fs::read_to_string(&file)?;
            let lp = cli::load_problem(&text, Overrides { tol, budget })?;
            let csv = cli::cmd_basin(
                &lp,
                (corners[0], corners[1]),
                (corners[2], corners[3]),
                grid,
            )?;
            write_output(&output, &csv)
        }
        Command::Enumerate { file, grid, tol, budget, output } => {
            let text = std::fs::read_to_string(&file)?;
            let lp = cli::load_problem(&text, Overrides { tol, budget })?;
            let report = cli::cmd_enumerate(&lp, grid)?;
            write_output(&output, &report.to_json())
        }
    }
}

fn write_output(target: &str, contents: &str) -> Result<(), Error> {
    if target == "-" {
        print!("{contents}");
        Ok(())
    } else {
        std::fs::write(target, contents)?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
