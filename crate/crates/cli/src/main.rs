mod commands;
mod error;
mod schema;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Scenario, SolveArgs, DEFAULT_MAX_RESIDUAL, DEFAULT_POINTS};
use error::CliError;

/// Classify, solve and verify ÿ + α·f(y)·ẏ + β·f(y)·∫f(y)dy + γ·f(y) = 0.
///
/// Exit status: 0 on success, 1 when a valid problem breaks down
/// numerically (or fails its residual check), 2 on invalid input.
/// PAINLIN_TOL overrides the default integration tolerance.
#[derive(Parser)]
#[command(name = "painlin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the family class and the constraints that matched.
    Classify {
        #[arg(long)]
        problem: String,
    },
    /// Solve and write x,y,ydot,residual samples as CSV.
    Solve {
        #[arg(long)]
        problem: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        span: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<String>,
        /// Also write a solution descriptor for `sample` and `verify`.
        #[arg(long)]
        descriptor: Option<String>,
        /// Refuse to write output when the max residual exceeds this.
        #[arg(long, default_value_t = DEFAULT_MAX_RESIDUAL)]
        max_residual: f64,
        #[arg(long)]
        no_check: bool,
    },
    /// Write a residual and oracle report for a solution.
    Verify {
        #[arg(long)]
        problem: Option<String>,
        /// `closed` to solve the problem file, or a descriptor path.
        #[arg(long, default_value = "closed")]
        solution: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        span: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// Report destination (stdout when omitted).
        #[arg(long)]
        report: Option<String>,
    },
    /// Evaluate a solution descriptor on a grid.
    Sample {
        #[arg(long)]
        descriptor: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        span: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Convert physical scenario parameters into a problem file.
    PhysicsMap {
        #[arg(long, value_enum)]
        scenario: ScenarioKind,
        #[arg(long, allow_negative_numbers = true)]
        q: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c2: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        r: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        /// Forcing F as an expression in x (shear-free).
        #[arg(long)]
        forcing: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioKind {
    Tsallis,
    Bianchi,
    Viscous,
    ShearFree,
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Input(format!("this scenario needs --{flag}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify { problem } => {
            print!("{}", commands::classify(&problem)?);
            Ok(())
        }
        Command::Solve {
            problem,
            span,
            points,
            out,
            descriptor,
            max_residual,
            no_check,
        } => commands::solve_cmd(SolveArgs {
            problem: &problem,
            span,
            points,
            out: out.as_deref(),
            descriptor: descriptor.as_deref(),
            max_residual,
            check: !no_check,
        }),
        Command::Verify {
            problem,
            solution,
            span,
            points,
            report,
        } => commands::verify(problem.as_deref(), &solution, span, points, report.as_deref()),
        Command::Sample {
            descriptor,
            span,
            points,
            out,
        } => commands::sample(&descriptor, span, points, out.as_deref()),
        Command::PhysicsMap {
            scenario,
            q,
            c,
            c1,
            c2,
            r,
            alpha,
            beta,
            forcing,
            out,
        } => {
            let scenario = match scenario {
                ScenarioKind::Tsallis => Scenario::Tsallis { q: need(q, "q")? },
                ScenarioKind::Bianchi => Scenario::Bianchi {
                    c: need(c, "c")?,
                    c1: need(c1, "c1")?,
                    c2: need(c2, "c2")?,
                },
                ScenarioKind::Viscous => Scenario::Viscous {
                    r: need(r, "r")?,
                    alpha: need(alpha, "alpha")?,
                    beta: need(beta, "beta")?,
                },
                ScenarioKind::ShearFree => Scenario::ShearFree {
                    forcing: need(forcing, "forcing")?,
                },
            };
            commands::physics_map(scenario, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("painlin: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
