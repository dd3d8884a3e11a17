use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use riemplan::harness::export::{
    write_boxplot_csv, write_compare_csv, write_convergence_csv, write_json, write_runs_csv,
};
use riemplan::harness::{
    default_convergence_samples, format_g9, load_scenario, Algorithm, Experiment, ScenarioConfig, PRESETS,
};
use riemplan::Error;

#[derive(Parser, Debug)]
#[command(name = "riemplan", version, about = "Path planning on surfaces with a pulled-back Riemannian metric")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the planner once; writes runs.csv and path.json.
    Plan(PlanArgs),
    /// Shoot the geodesic fan; writes geodesics.json.
    Geodesic(GeodesicArgs),
    /// Repeat the planner with consecutive seeds; writes runs.csv and boxplot.csv.
    Repeat(RepeatArgs),
    /// Sweep the sample count; writes convergence.csv and runs.csv.
    Converge(ConvergeArgs),
    /// Both planners on the same seeds plus the geodesic oracle; writes compare.csv and runs.csv.
    Compare(CompareArgs),
    /// List the built-in scenarios, or print one as TOML.
    Scenarios {
        /// Print this preset as a scenario file.
        #[arg(long)]
        dump: Option<String>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Preset name or path to a TOML scenario file.
    #[arg(long, default_value = "peak1-3d")]
    scenario: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Goal disk radius, for both planner goal extraction and geodesic hits.
    #[arg(long)]
    hit_radius: Option<f64>,
}

#[derive(Args, Debug)]
struct PlannerArgs {
    #[arg(long, default_value = "rrtstar-r", value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    /// Record wall-clock milliseconds (makes runs.csv nondeterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    planner: PlannerArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    fan_count: Option<usize>,
    /// Skip bisection refinement between fan rays.
    #[arg(long)]
    no_refine: bool,
}

#[derive(Args, Debug)]
struct RepeatArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    planner: PlannerArgs,
    /// First seed; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 150)]
    trials: usize,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    planner: PlannerArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials per sample count.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Comma-separated ascending sample counts [default: 2000,4000,...,20000].
    #[arg(long, value_delimiter = ',')]
    samples_list: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    fan_count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of paired seeds.
    #[arg(long, default_value_t = 10)]
    trials: usize,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn scenario(common: &Common) -> Result<ScenarioConfig, Error> {
    let mut cfg = load_scenario(&common.scenario)?;
    if let Some(r) = common.hit_radius {
        cfg.goal_radius = r;
    }
    Ok(cfg)
}

fn apply_planner(cfg: &mut ScenarioConfig, samples: Option<usize>, eta: Option<f64>) {
    if let Some(n) = samples {
        cfg.planner.n_samples = n;
    }
    if let Some(eta) = eta {
        cfg.planner.eta = eta;
    }
}

fn experiment(cfg: ScenarioConfig, timing: bool) -> Result<Experiment, Error> {
    Experiment::new(cfg)
        .map(|e| e.with_timing(timing))
        .map_err(|e| match e {
            Error::InvalidInput(message) => Error::Config {
                origin: "command line".into(),
                message,
            },
            other => other,
        })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Plan(a) => {
            let mut cfg = scenario(&a.common)?;
            apply_planner(&mut cfg, a.planner.samples, a.planner.eta);
            let exp = experiment(cfg, a.planner.timing)?;
            let (record, outcome) = exp.run_single(a.planner.algo, a.seed)?;
            write_runs_csv(&a.common.out.join("runs.csv"), std::slice::from_ref(&record))?;
            write_json(&a.common.out.join("path.json"), &exp.path_export(&record, &outcome))?;
            println!(
                "{} {} seed {}: h-length {} cost {} ({} vertices, {} path points)",
                record.scenario,
                record.algorithm,
                record.seed,
                format_g9(outcome.h_length),
                format_g9(outcome.cost),
                record.nodes,
                outcome.path.len()
            );
        }
        Command::Geodesic(a) => {
            let mut cfg = scenario(&a.common)?;
            if let Some(k) = a.fan_count {
                cfg.geodesic.fan_count = k;
            }
            if a.no_refine {
                cfg.geodesic.refine = false;
            }
            let exp = experiment(cfg, false)?;
            let oracle = exp.run_geodesic_oracle()?;
            write_json(&a.common.out.join("geodesics.json"), &oracle.export(&exp.scenario().name))?;
            println!(
                "{} fan {}: {} hits, shortest {} at heading {}",
                exp.scenario().name,
                oracle.fan_count,
                oracle.hits(),
                format_g9(oracle.length),
                format_g9(oracle.best_trace().angle)
            );
        }
        Command::Repeat(a) => {
            let mut cfg = scenario(&a.common)?;
            apply_planner(&mut cfg, a.planner.samples, a.planner.eta);
            let exp = experiment(cfg, a.planner.timing)?;
            let r = exp.run_repeat(a.planner.algo, a.trials, a.seed)?;
            write_runs_csv(&a.common.out.join("runs.csv"), &r.records)?;
            write_boxplot_csv(&a.common.out.join("boxplot.csv"), &r.stats)?;
            let s = r.stats;
            println!(
                "{} trials ({} failed): median {} iqr {} min {} max {}",
                s.trials + s.failures,
                s.failures,
                format_g9(s.median),
                format_g9(s.iqr()),
                format_g9(s.min),
                format_g9(s.max)
            );
        }
        Command::Converge(a) => {
            let mut cfg = scenario(&a.common)?;
            apply_planner(&mut cfg, a.planner.samples, a.planner.eta);
            let exp = experiment(cfg, a.planner.timing)?;
            let n_list = a.samples_list.unwrap_or_else(default_convergence_samples);
            let (rows, records) = exp.run_convergence(a.planner.algo, &n_list, a.trials, a.seed)?;
            write_convergence_csv(&a.common.out.join("convergence.csv"), &rows)?;
            write_runs_csv(&a.common.out.join("runs.csv"), &records)?;
            for r in &rows {
                println!(
                    "N {:>6}: mean {} std {} failures {}",
                    r.n_samples,
                    format_g9(r.stats.mean),
                    format_g9(r.stats.std),
                    r.stats.failures
                );
            }
        }
        Command::Compare(a) => {
            let mut cfg = scenario(&a.common)?;
            apply_planner(&mut cfg, a.samples, a.eta);
            if let Some(k) = a.fan_count {
                cfg.geodesic.fan_count = k;
            }
            let exp = experiment(cfg, false)?;
            let seeds: Vec<u64> = (0..a.trials as u64).map(|i| a.seed.wrapping_add(i)).collect();
            let n = exp.scenario().planner.n_samples;
            let (rows, records) = exp.run_compare(n, &seeds)?;
            write_compare_csv(&a.common.out.join("compare.csv"), &exp.scenario().name, &rows)?;
            write_runs_csv(&a.common.out.join("runs.csv"), &records)?;
            let wins = rows
                .iter()
                .filter(|r| matches!((r.riemannian, r.euclidean), (Some(x), Some(y)) if x <= y))
                .count();
            println!("rrtstar-r no longer than rrtstar-euclid in {wins}/{} seeds", rows.len());
        }
        Command::Scenarios { dump } => match dump {
            Some(name) => print!("{}", ScenarioConfig::preset(&name)?.to_toml()),
            None => {
                for name in PRESETS {
                    let cfg = ScenarioConfig::preset(name)?;
                    println!("{name:<10} R^{}  fan {}", cfg.ambient_dim(), cfg.geodesic.fan_count);
                }
            }
        },
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::UnknownPreset(_) | Error::InvalidInput(_) => 2,
        Error::GoalNotReached { .. } => 3,
        Error::NoGeodesicHit { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
