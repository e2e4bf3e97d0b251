//! `hurot` command line: generate measures, solve, sweep, and run transport
//! with boundary.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hurot_core::experiments::{generate, Layout, Metric, SweepSpec, WeightKind};
use hurot_core::solver::solve;
use hurot_core::{CostSpec, DiscreteMeasure, MarginalDivergence, SolverConfig};

use hurot::io::{measure_to_json, read_measure, solve_result_to_json, sweep_to_csv};
use hurot::parse::{ground_cost, parse_cost, parse_divergence, parse_domain, parse_grid, parse_model};
use hurot::sweep::parallel_sweep;

#[derive(Parser)]
#[command(name = "hurot", version, about = "Entropic unbalanced optimal transport with a homogeneous model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random measure.
    Gen(GenArgs),
    /// Solve one transport problem and write the result as JSON.
    Solve(SolveArgs),
    /// Evaluate a cost or Sinkhorn divergence over a lambda grid (CSV).
    Sweep(SweepArgs),
    /// Transport with boundary: a solve, or a sweep when a grid is given.
    Otb(OtbArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenDomain {
    Square,
    Halfplane,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenWeights {
    Uniform,
    Unit,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Cost,
    SinkhornDiv,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent stream of the same seed (e.g. 0 for alpha, 1 for beta).
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, value_enum, default_value = "square")]
    domain: GenDomain,
    #[arg(long, value_enum, default_value = "uniform")]
    weights: GenWeights,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    alpha: PathBuf,
    #[arg(long)]
    beta: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// standard | homogeneous
    #[arg(long, default_value = "homogeneous")]
    model: String,
    /// sqeuclidean | euclidean | matrix:<path.csv>
    #[arg(long, default_value = "sqeuclidean")]
    cost: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// balanced | kl:rho=<float> | tv | otb:<domain>
    #[arg(long)]
    divergence: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    divergence: String,
    /// min:max:num:lin|log
    #[arg(long)]
    lambda_grid: String,
    #[arg(long, value_enum, default_value = "sinkhorn-div")]
    metric: MetricArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OtbArgs {
    #[command(flatten)]
    common: Common,
    /// halfplane | box:lo1,hi1,lo2,hi2,...
    #[arg(long, default_value = "halfplane")]
    domain: String,
    #[arg(long)]
    lambda_grid: Option<String>,
    #[arg(long, value_enum, default_value = "sinkhorn-div")]
    metric: MetricArg,
}

struct Loaded {
    alpha: DiscreteMeasure,
    beta: DiscreteMeasure,
    cost: CostSpec,
    cfg: SolverConfig,
}

fn load(c: &Common) -> Result<Loaded> {
    let alpha = read_measure(&c.alpha).context("reading alpha")?;
    let beta = read_measure(&c.beta).context("reading beta")?;
    let cost = parse_cost(&c.cost)?;
    let cfg = SolverConfig::new(c.epsilon, parse_model(&c.model)?)
        .with_tol(c.tol)
        .with_max_iter(c.max_iter);
    cfg.validate()?;
    Ok(Loaded { alpha, beta, cost, cfg })
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Exit status 2 flags a solve that hit `max_iter`.
fn run_solve(l: &Loaded, div: &MarginalDivergence, output: &Option<PathBuf>) -> Result<ExitCode> {
    let r = solve(&l.alpha, &l.beta, &l.cost, div, &l.cfg)?;
    emit(output, &solve_result_to_json(&r))?;
    if r.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("not converged after {} iterations", r.iterations);
        Ok(ExitCode::from(2))
    }
}

fn run_sweep(l: &Loaded, div: &MarginalDivergence, grid: &str, metric: MetricArg, seed: u64, output: &Option<PathBuf>) -> Result<ExitCode> {
    let g = parse_grid(grid)?;
    let spec = SweepSpec {
        lambda_min: g.min,
        lambda_max: g.max,
        num_points: g.num,
        scale: g.scale,
        metric: match metric {
            MetricArg::Cost => Metric::Cost,
            MetricArg::SinkhornDiv => Metric::SinkhornDiv,
        },
        model: l.cfg.model,
        seed,
    };
    let r = parallel_sweep(&l.alpha, &l.beta, &l.cost, div, &l.cfg, &spec)?;
    let missed = r.converged.iter().filter(|c| !**c).count();
    if missed > 0 {
        eprintln!("{missed} grid point(s) did not converge");
    }
    emit(output, &sweep_to_csv(&r)?)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(a) => {
            let layout = match a.domain {
                GenDomain::Square => Layout::UnitSquare,
                GenDomain::Halfplane => Layout::Triangle,
            };
            let weights = match a.weights {
                GenWeights::Uniform => WeightKind::Uniform,
                GenWeights::Unit => WeightKind::Unit,
            };
            emit(&a.output, &measure_to_json(&generate(a.n, a.seed, a.stream, layout, weights)))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve(a) => {
            let l = load(&a.common)?;
            let div = parse_divergence(&a.divergence, &l.cost)?;
            run_solve(&l, &div, &a.common.output)
        }
        Command::Sweep(a) => {
            let l = load(&a.common)?;
            let div = parse_divergence(&a.divergence, &l.cost)?;
            run_sweep(&l, &div, &a.lambda_grid, a.metric, a.seed, &a.common.output)
        }
        Command::Otb(a) => {
            let l = load(&a.common)?;
            let domain = parse_domain(&a.domain, ground_cost(&l.cost)?)?;
            let div = MarginalDivergence::OtbSpatial(domain);
            match &a.lambda_grid {
                Some(grid) => run_sweep(&l, &div, grid, a.metric, 0, &a.common.output),
                None => run_solve(&l, &div, &a.common.output),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
