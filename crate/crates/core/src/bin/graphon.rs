use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use graphon_core::dynamics::{simulate_finite, simulate_reduced};
use graphon_core::experiments::{
    read_snapshot_states, registry_list, resolve_coefficients, resolve_kernel, run_experiment,
    write_densities, write_snapshot, write_summary, ExperimentId, ExperimentSpec, RunConfig,
};
use graphon_core::graphon::{
    check_condition_h, cut_distance_step, cut_norm, default_tolerance, CutNormMode, Kernel,
    StepKernel,
};
use graphon_core::metrics::{wasserstein2, MeasureSnapshot};
use graphon_core::pde::solve_fp_system_recording;
use graphon_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    version,
    about = "Graphon particle systems: simulation, Fokker-Planck solves and scripted experiments"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Cut-norm evaluation.
    #[arg(long, global = true, default_value = "exact")]
    mode: CutNormMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Particle system on the configured kernel.
    Simulate,
    /// Block system with `particles_per_block` particles per block.
    Reduce,
    /// Fokker-Planck system on the configured step kernel.
    Pde,
    /// Cut norm of a kernel, or cut distance between two.
    Cutnorm {
        kernel: String,
        other: Option<String>,
        /// Blocks used to approximate non-step kernels.
        #[arg(long, default_value_t = 8)]
        blocks: usize,
    },
    /// Degree profile `x, d(x)` on an even grid of labels.
    Degree {
        kernel: String,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Condition (H) for the configured kernel and initial datum.
    CheckH {
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// W2 distance between the `state` columns of two snapshot files.
    Compare { a: PathBuf, b: PathBuf },
    /// Scripted experiment E1..E6.
    Experiment {
        id: ExperimentId,
        /// Print the effective configuration instead of running.
        #[arg(long)]
        print_config: bool,
        /// Small, fast version of the scenario.
        #[arg(long)]
        reduced: bool,
    },
    /// Kernels, coefficient sets and distributions known by name.
    Registry,
}

enum Outcome {
    Done,
    ToleranceFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ToleranceFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn base_dir(cli: &Cli) -> PathBuf {
    cli.config
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn as_step(kernel: &Kernel, blocks: usize) -> Result<StepKernel> {
    match kernel {
        Kernel::Constant(p) => Ok(StepKernel::constant(*p)),
        Kernel::Step(s) => Ok(s.clone()),
        Kernel::Analytic(_) => kernel.step_approximate(blocks),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Simulate => {
            let cfg = run_config(cli)?;
            let w = resolve_kernel(&cfg.kernel, &base_dir(cli))?;
            let coeffs = resolve_coefficients(&cfg.coefficients)?;
            let e = simulate_finite(&w, &coeffs, &cfg.init, &cfg.sim)?;
            let out = out_dir(cli);
            println!(
                "{}",
                write_summary(&out.join("summary.csv"), &e.summary(cfg.summary_every))?.display()
            );
            for &t in &cfg.snapshot_times {
                println!(
                    "{}",
                    write_snapshot(&out.join(format!("snapshot_t{t}.csv")), &e, t)?.display()
                );
            }
        }
        Command::Reduce => {
            let cfg = run_config(cli)?;
            let w = resolve_kernel(&cfg.kernel, &base_dir(cli))?;
            let step = w.as_step().ok_or_else(|| {
                Error::Config(format!("kernel '{}' is not a step kernel", cfg.kernel))
            })?;
            let coeffs = resolve_coefficients(&cfg.coefficients)?;
            let m = cfg.particles_per_block.unwrap_or(cfg.sim.particles);
            let e = simulate_reduced(
                &step,
                &coeffs,
                &cfg.init,
                m,
                cfg.sim.horizon,
                cfg.sim.dt,
                cfg.sim.seed,
            )?;
            let out = out_dir(cli);
            println!(
                "{}",
                write_summary(
                    &out.join("summary_reduced.csv"),
                    &e.summary(cfg.summary_every)
                )?
                .display()
            );
            for &t in &cfg.snapshot_times {
                println!(
                    "{}",
                    write_snapshot(&out.join(format!("snapshot_reduced_t{t}.csv")), &e, t)?
                        .display()
                );
            }
        }
        Command::Pde => {
            let cfg = run_config(cli)?;
            let w = resolve_kernel(&cfg.kernel, &base_dir(cli))?;
            let step = match &w {
                Kernel::Analytic(_) => {
                    return Err(Error::Config(format!(
                        "the density solver needs a step kernel, got '{}'",
                        cfg.kernel
                    )))
                }
                k => as_step(k, 1)?,
            };
            let coeffs = resolve_coefficients(&cfg.coefficients)?;
            let grid = cfg.grid.grid()?;
            let init = cfg
                .init
                .block_distributions(&step)?
                .iter()
                .map(|d| grid.discretize(d))
                .collect::<Result<Vec<_>>>()?;
            let series = solve_fp_system_recording(
                &step,
                &coeffs,
                &init,
                &grid,
                cfg.sim.horizon,
                cfg.grid.dt_pde,
                cfg.summary_every.max(1),
            )?;
            let times = (!cfg.snapshot_times.is_empty()).then_some(cfg.snapshot_times.as_slice());
            let path = write_densities(&out_dir(cli).join("densities.csv"), &series, times)?;
            if series.clipped > 0 {
                eprintln!(
                    "note: {} slightly negative cells were clipped to zero",
                    series.clipped
                );
            }
            println!("{}", path.display());
        }
        Command::Cutnorm {
            kernel,
            other,
            blocks,
        } => {
            let base = base_dir(cli);
            let w = as_step(&resolve_kernel(kernel, &base)?, *blocks)?;
            match other {
                None => println!("{}", cut_norm(&w, cli.mode)?),
                Some(o) => {
                    let v = as_step(&resolve_kernel(o, &base)?, *blocks)?;
                    let d = if w.breakpoints() == v.breakpoints() {
                        cut_distance_step(&w, &v, cli.mode)?
                    } else {
                        return Err(Error::Config(
                            "cut distance needs kernels on the same blocks".into(),
                        ));
                    };
                    println!("cut_distance,{}", d.value);
                    println!(
                        "permutation,{}",
                        d.permutation
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    );
                    println!(
                        "cut_norm_unpermuted,{}",
                        cut_norm(&w.difference(&v)?, cli.mode)?
                    );
                }
            }
        }
        Command::Degree { kernel, points } => {
            let w = resolve_kernel(kernel, &base_dir(cli))?;
            let n = (*points).max(1);
            println!("label,degree");
            for i in 0..n {
                let x = (i as f64 + 0.5) / n as f64;
                println!("{x},{}", w.degree(x)?);
            }
        }
        Command::CheckH { samples } => {
            let cfg = run_config(cli)?;
            let w = resolve_kernel(&cfg.kernel, &base_dir(cli))?;
            let r = check_condition_h(&w, &cfg.init.partition, *samples, default_tolerance(&w))?;
            println!("holds,{}", r.holds);
            println!("max_deviation,{}", r.max_deviation);
        }
        Command::Compare { a, b } => {
            let sa = MeasureSnapshot::empirical(read_snapshot_states(a)?)?;
            let sb = MeasureSnapshot::empirical(read_snapshot_states(b)?)?;
            println!("{}", wasserstein2(&sa, &sb)?);
        }
        Command::Experiment {
            id,
            print_config,
            reduced,
        } => {
            let mut spec = match &cli.config {
                Some(path) => ExperimentSpec::load(path)?,
                None => ExperimentSpec::scripted(*id),
            };
            if spec.id != *id {
                return Err(Error::Config(format!(
                    "configuration is for {}, not {id}",
                    spec.id
                )));
            }
            if *reduced {
                spec = spec.reduced_scale();
            }
            if let Some(seed) = cli.seed {
                spec.sim.seed = seed;
            }
            if let Some(out) = &cli.out {
                spec.out = out.clone();
            }
            if *print_config {
                print!("{}", spec.to_toml()?);
                return Ok(Outcome::Done);
            }
            let report = run_experiment(&spec, &base_dir(cli), cli.mode)?;
            println!("{report}");
            for f in &report.files {
                println!("  wrote {}", f.display());
            }
            if !report.passed() {
                for c in report.failures() {
                    eprintln!("tolerance failed: {}", c.criterion);
                }
                return Ok(Outcome::ToleranceFailed);
            }
        }
        Command::Registry => print!("{}", registry_list()),
    }
    Ok(Outcome::Done)
}
