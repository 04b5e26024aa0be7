//! Command-line driver: single runs, convergence studies, and a
//! weight-table dump for debugging.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use catmood::cases::{self, Experiment};
use catmood::error::SolverError;
use catmood::mesh::SolverConfig;
use catmood::report::{emit_outputs, ConvergenceRow};
use catmood::solver::{convergence_study, run_solver, SchemeChoice};
use catmood::systems::{ConservationLaw, Fallback};
use catmood::weights::{make_weights, Rational};
use catmood::{DeltaForm, RunReport};

#[derive(Parser)]
#[command(
    name = "catmood",
    version,
    about = "1D conservation-law solver: CAT2P fluxes with a posteriori MOOD limiting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one test case and write solution/reference CSVs.
    Run {
        #[arg(long, value_enum)]
        test: TestArg,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long)]
        cells: usize,
        #[arg(long, default_value_t = 0.9)]
        cfl: f64,
        /// Override the test's final time.
        #[arg(long)]
        tfinal: Option<f64>,
        #[arg(long, default_value_t = 1.4)]
        gamma: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = DeltaFormArg::Product)]
        delta_form: DeltaFormArg,
        /// First-order flux of the cascade (default: HLL for Euler,
        /// Rusanov for scalar laws).
        #[arg(long, value_enum)]
        fallback: Option<FallbackArg>,
        /// Also write a per-step demotion log CSV.
        #[arg(long)]
        log_demotions: bool,
    },
    /// Run one scheme over a mesh sequence and tabulate L1 errors.
    Convergence {
        #[arg(long, value_enum)]
        test: TestArg,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Comma-separated strictly increasing mesh sizes.
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80,160,320")]
        cells: Vec<usize>,
        #[arg(long, default_value_t = 0.9)]
        cfl: f64,
        #[arg(long)]
        tfinal: Option<f64>,
        #[arg(long, default_value_t = 1.4)]
        gamma: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = DeltaFormArg::Product)]
        delta_form: DeltaFormArg,
        #[arg(long, value_enum)]
        fallback: Option<FallbackArg>,
    },
    /// Print one differentiation-weight table as CSV.
    Weights {
        /// Stencil half width (2P nodes).
        #[arg(long, alias = "P")]
        p: usize,
        /// Derivative order (0 = interpolation).
        #[arg(long)]
        k: usize,
        /// Offset in units of the spacing, e.g. "1/2", "0", "-1".
        #[arg(long, value_parser = parse_rational)]
        q: Rational,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TestArg {
    Advection,
    Burgers,
    Sod,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Cat2,
    Cat6,
    Catmood6,
    First,
    /// Debug hook: sample the exact solution instead of solving.
    #[value(hide = true)]
    Exact,
}

impl From<SchemeArg> for SchemeChoice {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Cat2 => SchemeChoice::Cat2,
            SchemeArg::Cat6 => SchemeChoice::Cat6,
            SchemeArg::Catmood6 => SchemeChoice::CatMood6,
            SchemeArg::First => SchemeChoice::FirstOrder,
            SchemeArg::Exact => SchemeChoice::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DeltaFormArg {
    Product,
    Printed,
}

#[derive(Clone, Copy, ValueEnum)]
enum FallbackArg {
    Rusanov,
    Hll,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let parse_int = |t: &str| t.trim().parse::<i64>().map_err(|e| e.to_string());
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den == 0 {
                return Err("denominator must be nonzero".into());
            }
            Ok(Rational::new(parse_int(num)?, den))
        }
        None => Ok(Rational::from(parse_int(s)?)),
    }
}

struct RunArgs {
    scheme: SchemeChoice,
    cells: Vec<usize>,
    cfl: f64,
    tfinal: Option<f64>,
    out: PathBuf,
    delta_form: DeltaForm,
    fallback: Option<Fallback>,
    log_demotions: bool,
    convergence: bool,
}

fn build_config<const M: usize, L: ConservationLaw<M>>(
    exp: &Experiment<M, L>,
    args: &RunArgs,
    default_fallback: Fallback,
) -> SolverConfig {
    let mut cfg = SolverConfig::new(args.cfl, args.tfinal.unwrap_or(exp.t_final));
    cfg.delta_form = args.delta_form;
    cfg.fallback = args.fallback.unwrap_or(default_fallback);
    cfg
}

fn execute<const M: usize, L: ConservationLaw<M>>(
    mut exp: Experiment<M, L>,
    args: &RunArgs,
    default_fallback: Fallback,
) -> Result<(), SolverError> {
    let cfg = build_config(&exp, args, default_fallback);
    exp.snapshot_times.retain(|&t| t < cfg.t_final);

    if args.convergence {
        let rows = convergence_study(&exp, args.scheme, &args.cells, &cfg)?;
        print_convergence(&rows);
        // Keep the finest run's solution files alongside the table.
        let report = run_solver(&exp, args.scheme, *args.cells.last().unwrap(), &cfg)?;
        let files = emit_outputs(&report, Some(&rows), &args.out, args.log_demotions)?;
        for f in files {
            println!("wrote {}", f.display());
        }
    } else {
        let report = run_solver(&exp, args.scheme, args.cells[0], &cfg)?;
        print_run_summary(&report);
        let files = emit_outputs(&report, None, &args.out, args.log_demotions)?;
        for f in files {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn print_run_summary(report: &RunReport) {
    println!(
        "{} / {}: N={}, {} steps, {:.4}s",
        report.test_name, report.scheme_label, report.n_cells, report.steps, report.cpu_seconds
    );
    if let Some(errors) = &report.l1_errors {
        for (name, e) in report.var_names.iter().zip(errors) {
            println!("  L1({name}) = {e:.6e}");
        }
    }
    if let Some(mood) = &report.mood {
        println!("  demotions: {}", mood.total_demotions);
    }
}

fn print_convergence(rows: &[ConvergenceRow]) {
    println!(
        "{:>6} {:>16} {:>8} {:>10}",
        "N", "L1_error", "order", "cpu_s"
    );
    for row in rows {
        let order = row
            .order
            .map(|o| format!("{o:.2}"))
            .unwrap_or_else(|| "---".into());
        println!(
            "{:>6} {:>16.6e} {:>8} {:>10.4}",
            row.n_cells, row.l1_error, order, row.cpu_seconds
        );
    }
}

fn dispatch(test: TestArg, gamma: f64, args: RunArgs) -> Result<(), SolverError> {
    match test {
        TestArg::Advection => execute(cases::advection_smooth(), &args, Fallback::Rusanov),
        TestArg::Burgers => execute(cases::burgers_steps(), &args, Fallback::Rusanov),
        TestArg::Sod => execute(cases::sod(gamma), &args, Fallback::Hll),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            test,
            scheme,
            cells,
            cfl,
            tfinal,
            gamma,
            out,
            delta_form,
            fallback,
            log_demotions,
        } => dispatch(
            test,
            gamma,
            RunArgs {
                scheme: scheme.into(),
                cells: vec![cells],
                cfl,
                tfinal,
                out,
                delta_form: match delta_form {
                    DeltaFormArg::Product => DeltaForm::Product,
                    DeltaFormArg::Printed => DeltaForm::Printed,
                },
                fallback: fallback.map(|f| match f {
                    FallbackArg::Rusanov => Fallback::Rusanov,
                    FallbackArg::Hll => Fallback::Hll,
                }),
                log_demotions,
                convergence: false,
            },
        ),
        Command::Convergence {
            test,
            scheme,
            cells,
            cfl,
            tfinal,
            gamma,
            out,
            delta_form,
            fallback,
        } => dispatch(
            test,
            gamma,
            RunArgs {
                scheme: scheme.into(),
                cells,
                cfl,
                tfinal,
                out,
                delta_form: match delta_form {
                    DeltaFormArg::Product => DeltaForm::Product,
                    DeltaFormArg::Printed => DeltaForm::Printed,
                },
                fallback: fallback.map(|f| match f {
                    FallbackArg::Rusanov => Fallback::Rusanov,
                    FallbackArg::Hll => Fallback::Hll,
                }),
                log_demotions: false,
                convergence: true,
            },
        ),
        Command::Weights { p, k, q } => match make_weights(p, k, q) {
            Ok(table) => {
                println!("j,gamma");
                for (w, g) in table.gamma().iter().enumerate() {
                    println!("{},{g:.12e}", table.first_node() + w as i64);
                }
                Ok(())
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
