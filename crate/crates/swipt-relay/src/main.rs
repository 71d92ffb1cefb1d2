//! Command-line front end: single cycles, parameter sweeps, the harvesting
//! optimizer, figure-style trend experiments, and a self-check suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swipt_relay::config::{Config, CONFIG_ENV_VAR};
use swipt_relay::error::Result;
use swipt_relay::experiment::{
    self, reproduce_figure, run_sweep, sidecar_path, ExperimentSpec, OptimizationReport,
    ResultTable,
};
use swipt_relay::optimizer::{self, solve_analytic, solve_grid, OptimizationProblem};
use swipt_relay::scenario::{run_cycle, Scenario};
use swipt_relay::swipt::{BatteryLaw, ThresholdPolicy};
use swipt_relay::uav_power::{self, FormulaVariant};

#[derive(Parser)]
#[command(
    name = "swipt-relay",
    version,
    about = "UAV relay cycle simulator with SWIPT power splitting",
    after_help = format!(
        "Config files are flat `section.key = value` lines; every key has a \
         shipped default. The {CONFIG_ENV_VAR} environment variable names a \
         default config file."
    )
)]
struct Cli {
    /// Config file (defaults apply when absent).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one relay cycle and print (or save) the full report.
    Cycle {
        /// Scenario to run: A (plain relay) or B (harvesting).
        #[arg(long, default_value = "B")]
        scenario: Scenario,
        /// Override the mission seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report as JSON here instead of pretty-printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one config key and tabulate seed-averaged metrics.
    Sweep {
        /// Dotted config key to sweep, e.g. mission.p_t_users.
        #[arg(long)]
        param: String,
        /// Comma-separated sweep values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Number of replication seeds (starting at the config seed).
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value = "B")]
        scenario: Scenario,
        /// Comma-separated metric columns.
        #[arg(long, value_delimiter = ',', default_value = "t_total,e_total")]
        columns: Vec<String>,
        /// Output CSV path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the harvesting program and run all three solvers.
    Optimize {
        /// Force the threshold to the plain-cycle energy even under a fixed
        /// threshold policy.
        #[arg(long)]
        threshold_from_cycle: bool,
        /// Lattice resolution of the grid solver.
        #[arg(long, default_value_t = 10_001)]
        resolution: usize,
        /// Write the report as JSON here as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce one of the trend experiments (figures 2 through 8).
    Figure {
        /// Figure number, 2..=8.
        #[arg(value_parser = clap::value_parser!(u8).range(2..=8))]
        n: u8,
        /// Output CSV path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite; exits nonzero on any failure.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit_table(table: &ResultTable, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            table.write_csv(path)?;
            eprintln!(
                "wrote {} and {}",
                path.display(),
                sidecar_path(path).display()
            );
        }
        None => print!("{}", table.to_csv()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = Config::load_or_default(cli.config.as_deref())?;
    match cli.command {
        Command::Cycle {
            scenario,
            seed,
            out,
        } => {
            let mut config = config;
            if let Some(seed) = seed {
                config.mission.seed = seed;
            }
            let report = run_cycle(
                &config.mission,
                &config.channel,
                &config.aero,
                &config.swipt,
                scenario,
            )?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| swipt_relay::Error::Config(format!("serialization failed: {e}")))?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &json)?;
                    eprintln!("wrote {}", path.display());
                }
                None => println!("{json}"),
            }
            eprintln!(
                "scenario {scenario}: {} users, t_total = {:.3} s, e_total = {:.3} J, \
                 battery {} -> {}, feasible = {}",
                report.user_count,
                report.ledger.t_total,
                report.ledger.e_total,
                report.battery_before,
                report.battery_after,
                report.feasible
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            param,
            values,
            seeds,
            scenario,
            columns,
            out,
        } => {
            let spec = ExperimentSpec {
                name: format!("sweep_{param}"),
                swept_parameter: param,
                values,
                seeds: (0..seeds.max(1))
                    .map(|i| config.mission.seed.wrapping_add(i))
                    .collect(),
                scenario,
                columns,
            };
            let table = run_sweep(&config, &spec)?;
            emit_table(&table, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Optimize {
            threshold_from_cycle,
            resolution,
            out,
        } => {
            let report = experiment::optimize_mission(&config, threshold_from_cycle, resolution)?;
            print_optimization_report(&report);
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&report).map_err(|e| {
                    swipt_relay::Error::Config(format!("serialization failed: {e}"))
                })?;
                std::fs::write(&path, json)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure { n, out } => {
            let table = reproduce_figure(&config, n)?;
            emit_table(&table, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate => {
            let failures = validate(&config);
            if failures == 0 {
                println!("all checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("{failures} check(s) failed");
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn print_optimization_report(report: &OptimizationReport) {
    println!(
        "problem: {} users, g1 = {:.6e}, g2 = {:.6e}, e_threshold = {:.6e} ({:?})",
        report.user_count, report.g1, report.g2, report.e_threshold, report.threshold_source
    );
    let line = |name: &str, s: &swipt_relay::optimizer::Solution| {
        println!(
            "  {name:<12} eta_bat = {:<10.6} eta_ps = {:<12.6} objective = {:<14.6e} feasible = {}",
            s.eta_bat, s.eta_ps, s.objective, s.feasible
        );
    };
    match (&report.closed_form, &report.closed_form_error) {
        (Some(s), _) => line("closed_form", s),
        (None, Some(err)) => println!("  closed_form  unavailable: {err}"),
        (None, None) => {}
    }
    line("grid", &report.grid);
    line("analytic", &report.analytic);
    if let Some(kkt) = &report.kkt_closed_form {
        println!(
            "  closed-form audit: balance residual = {:.6e} (g1^2 = {:.6e}); \
             the formulas satisfy their own balance only when g1 = 0",
            kkt.balance_residual,
            report.g1 * report.g1
        );
    }
    if let Some(kkt) = &report.kkt_grid {
        println!(
            "  grid KKT: stationarity = ({:.3e}, {:.3e}), constraint = {:.3e}, \
             multipliers = {:?}",
            kkt.stationarity_bat, kkt.stationarity_ps, kkt.primal_harvest, kkt.multipliers
        );
    }
}

/// Quick self-checks over the core identities; one line per check.
fn validate(config: &Config) -> usize {
    use rand::{Rng, SeedableRng};
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // Hover power decomposes exactly.
    let aero = &config.aero;
    let p0 = uav_power::blade_profile_power(aero);
    let pi = uav_power::induced_hover_power(aero);
    let hover = uav_power::propulsion_power(0.0, aero, FormulaVariant::Standard).unwrap();
    check(
        "hover-power-identity",
        hover == p0 + pi,
        format!("P(0) = {hover:.6} W"),
    );

    // Power-split conservation.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let eta: f64 = rng.gen_range(0.0..=1.0);
        let p: f64 = rng.gen_range(0.0..1e3);
        let sum = swipt_relay::swipt::harvested_power_ps(eta, p)
            + swipt_relay::swipt::id_power_ps(eta, p);
        worst = worst.max((sum - p).abs() / p.max(f64::MIN_POSITIVE));
    }
    check(
        "split-conservation",
        worst <= 2.0 * f64::EPSILON,
        format!("worst relative error {worst:.3e}"),
    );

    // LOS probability bounded and monotone.
    let mut ok = true;
    let mut prev = -1.0;
    for i in 0..=1000 {
        let theta = 90.0 * i as f64 / 1000.0;
        let p = swipt_relay::channel::los_probability(theta, &config.channel);
        ok &= (0.0..=1.0).contains(&p) && p >= prev;
        prev = p;
    }
    check("los-probability", ok, "bounded in [0,1], monotone".into());

    // Degenerate harvesting reproduces the plain scenario.
    let mut degenerate = config.clone();
    degenerate.swipt.eta_ps = 0.0;
    degenerate.swipt.eta_bat = 0.0;
    degenerate.swipt.battery_law = BatteryLaw::EfficiencyOnHarvest;
    degenerate.swipt.threshold_policy = ThresholdPolicy::CycleEnergy;
    let a = run_cycle(
        &degenerate.mission,
        &degenerate.channel,
        &degenerate.aero,
        &degenerate.swipt,
        Scenario::A,
    );
    let b = run_cycle(
        &degenerate.mission,
        &degenerate.channel,
        &degenerate.aero,
        &degenerate.swipt,
        Scenario::B,
    );
    let equal = match (&a, &b) {
        (Ok(a), Ok(b)) => {
            a.per_user == b.per_user
                && a.ledger == b.ledger
                && (a.battery_after - b.battery_after).abs() <= 1e-9 * (1.0 + a.battery_after.abs())
                && a.feasible == b.feasible
        }
        _ => false,
    };
    check(
        "degenerate-swipt",
        equal,
        "scenario B(0,0) equals scenario A".into(),
    );

    // Grid and analytic solvers agree on random programs.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let resolution = 2001;
    let step = 1.0 / (resolution as f64 - 1.0);
    let mut mismatches = 0usize;
    for _ in 0..100 {
        let problem = OptimizationProblem::from_constants(
            rng.gen_range(0.0..=5.0),
            rng.gen_range(1e-6..=2.0),
            rng.gen_range(0.0..=3.0),
            1.0,
        );
        let grid = solve_grid(&problem, resolution);
        let analytic = solve_analytic(&problem);
        let agree = grid.feasible == analytic.feasible
            && (!grid.feasible
                || ((grid.eta_ps - analytic.eta_ps).abs() <= step + 1e-9
                    && (grid.eta_bat - analytic.eta_bat).abs() <= step + 1e-9));
        if !agree {
            mismatches += 1;
        }
    }
    check(
        "solver-agreement",
        mismatches == 0,
        format!("{mismatches} mismatches over 100 random programs"),
    );

    // The published closed form leaves g1^2 in its own balance.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let problem = OptimizationProblem::from_constants(
            rng.gen_range(0.0..=5.0),
            rng.gen_range(0.1..=2.0),
            rng.gen_range(0.0..=3.0),
            1.0,
        );
        if problem.g2 == 0.0 {
            continue;
        }
        if let Ok(closed) = optimizer::solve_closed_form(&problem) {
            let report = optimizer::kkt::kkt_residuals(&problem, &closed);
            worst = worst.max((report.balance_residual - problem.g1 * problem.g1).abs());
        }
    }
    check(
        "closed-form-audit",
        worst <= 1e-9,
        format!("worst |residual - g1^2| = {worst:.3e}"),
    );

    // Experiment determinism.
    let spec = ExperimentSpec {
        name: "validate".into(),
        swept_parameter: "mission.p_t_users".into(),
        values: vec![1.0, 5.0],
        seeds: vec![config.mission.seed, config.mission.seed + 1],
        scenario: Scenario::B,
        columns: vec!["t_total".into()],
    };
    let t1 = run_sweep(config, &spec).map(|t| t.to_csv());
    let t2 = run_sweep(config, &spec).map(|t| t.to_csv());
    check(
        "sweep-determinism",
        matches!((&t1, &t2), (Ok(a), Ok(b)) if a == b),
        "byte-identical repeat".into(),
    );

    failures
}
