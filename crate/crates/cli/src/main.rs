use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hybrid_lfc::output::{format_summary, format_tune_report, write_convergence, write_simulation};
use hybrid_lfc::scenario::Controller;
use hybrid_lfc::{
    load_scenario, run_simulation, run_with_gains, tune, tuner_settings, Error, Scenario,
    TuneReport,
};

/// Load-frequency control simulator for an isolated wind–diesel system.
#[derive(Parser)]
#[command(name = "hybrid-lfc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write timeseries.csv, summary.txt and plot.gp.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Step size override, s.
        #[arg(long)]
        dt: Option<f64>,
        /// End time override, s.
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// Seed used when the scenario asks for tuning.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Tune the diesel PI gains and droop with particle swarm optimization.
    Tune {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a scenario file and print any warnings.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::SimulationFault { .. } => 2,
        _ => 1,
    }
}

fn with_overrides(
    mut scenario: Scenario,
    dt: Option<f64>,
    t_end: Option<f64>,
) -> hybrid_lfc::Result<Scenario> {
    if let Some(dt) = dt {
        scenario.solver.dt = dt;
    }
    if let Some(t_end) = t_end {
        scenario.solver.t_end = t_end;
    }
    for w in scenario.validate()? {
        log::warn!("{w}");
    }
    Ok(scenario)
}

fn run_tuner(
    scenario: &Scenario,
    seed: u64,
    pop: Option<usize>,
    iters: Option<usize>,
) -> hybrid_lfc::Result<TuneReport> {
    let mut settings = tuner_settings(scenario, seed);
    settings.population = pop.unwrap_or(settings.population);
    settings.iterations = iters.unwrap_or(settings.iterations);
    log::info!(
        "tuning with {} particles for {} iterations",
        settings.population,
        settings.iterations
    );
    tune(scenario, &settings)
}

fn write_tuning(out: &Path, report: &TuneReport, seed: u64) -> hybrid_lfc::Result<()> {
    std::fs::create_dir_all(out)?;
    write_convergence(out.join("convergence.csv"), &report.trace)?;
    std::fs::write(out.join("tune.txt"), format_tune_report(report, seed))?;
    Ok(())
}

fn simulate(
    path: &Path,
    out: &Path,
    dt: Option<f64>,
    t_end: Option<f64>,
    seed: Option<u64>,
) -> hybrid_lfc::Result<()> {
    let scenario = with_overrides(load_scenario(path)?, dt, t_end)?;
    let result = match scenario.controller {
        Controller::Gains(_) => run_simulation(&scenario)?,
        Controller::Mode(_) => {
            let seed = seed.unwrap_or(scenario.pso.seed);
            let report = run_tuner(&scenario, seed, None, None)?;
            write_tuning(out, &report, seed)?;
            run_with_gains(&scenario, report.gains)?
        }
    };
    write_simulation(out, &result.records, &result.summary)?;
    print!("{}", format_summary(&result.summary));
    Ok(())
}

fn tune_command(
    path: &Path,
    seed: u64,
    pop: Option<usize>,
    iters: Option<usize>,
    out: &Path,
) -> hybrid_lfc::Result<()> {
    let scenario = load_scenario(path)?;
    let report = run_tuner(&scenario, seed, pop, iters)?;
    write_tuning(out, &report, seed)?;
    let result = run_with_gains(&scenario, report.gains)?;
    write_simulation(out, &result.records, &result.summary)?;
    print!("{}", format_tune_report(&report, seed));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            scenario,
            out,
            dt,
            t_end,
            seed,
        } => simulate(&scenario, &out, dt, t_end, seed),
        Command::Tune {
            scenario,
            seed,
            pop,
            iters,
            out,
        } => tune_command(&scenario, seed, pop, iters, &out),
        Command::Validate { scenario } => load_scenario(&scenario).map(|s| {
            println!(
                "{}: ok ({} load segments)",
                scenario.display(),
                s.load.len()
            );
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
