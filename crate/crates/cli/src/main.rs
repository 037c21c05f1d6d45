use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use cyclic_aoi::config::{self, Base, BaseParams, Config};
use cyclic_aoi::validate::{self, Scale};
use cyclic_aoi::{presets, report, sweep};
use cyclic_aoi_core::analytic::per_source_aoi;
use cyclic_aoi_core::optimizer::{default_max_cycle, DEFAULT_ALPHA};
use cyclic_aoi_core::sim::{simulate_cyclic, simulate_pgaw};
use cyclic_aoi_core::{CyclicSchedule, ServiceKind, SimConfig};

/// Age of information of two sources sharing one channel under cyclic schedules.
#[derive(Parser)]
#[command(name = "cyclic-aoi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form AoI of one schedule.
    Analyze {
        /// Slot string such as `1221` or tuple `(u, u1, r1 r2 ...)`.
        schedule: String,
        #[command(flatten)]
        input: Input,
    },
    /// Near-optimal and insertion-search schedules.
    Optimize {
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: u64,
        /// Longest cycle tried by insertion search.
        #[arg(long)]
        max_cycle: Option<usize>,
        #[command(flatten)]
        input: Input,
    },
    /// Monte Carlo estimate for a cyclic schedule or P-GAW.
    Simulate {
        /// Slot string or tuple; omit with `--pgaw`.
        #[arg(required_unless_present = "pgaw", conflicts_with = "pgaw")]
        schedule: Option<String>,
        /// Serve source 1 with this probability in every slot.
        #[arg(long)]
        pgaw: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        cycles: u64,
        #[arg(long, default_value_t = 30)]
        batches: u64,
        #[arg(long, default_value_t = 1000)]
        warmup: u64,
        #[command(flatten)]
        input: Input,
    },
    /// Parameter sweep written as CSV.
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Simulated slots per point, overriding the config.
        #[arg(long)]
        cycles: Option<u64>,
    },
    /// Run the oracle suite.
    Validate {
        #[arg(long, value_enum, default_value_t = Scale::Quick)]
        scale: Scale,
    },
}

#[derive(Args)]
struct Input {
    /// TOML config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = presets::NAMES)]
    preset: Option<String>,
}

impl Input {
    fn load(&self) -> Result<Option<Config>> {
        if let Some(path) = &self.config {
            return Ok(Some(config::load(path)?));
        }
        if let Some(name) = &self.preset {
            return Ok(presets::load(name));
        }
        Ok(None)
    }

    /// Base scenario, defaulting to unit deterministic service, no drops, equal weights.
    fn base(&self) -> Result<Base> {
        let params = match self.load()? {
            Some(cfg) => cfg.base,
            None => BaseParams {
                mean: [1.0, 1.0],
                drop: [0.0, 0.0],
                weight_1: 0.5,
                kind: [ServiceKind::Deterministic; 2],
                gamma_variance: [None, None],
            },
        };
        Ok(params.build()?)
    }
}

fn parse_schedule(s: &str) -> Result<CyclicSchedule> {
    s.parse::<CyclicSchedule>()
        .map_err(|e| anyhow!("bad schedule {s:?}: {e}"))
}

enum Outcome {
    Ok,
    ChecksFailed,
}

fn run(cli: Cli) -> Result<Outcome> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Analyze { schedule, input } => {
            let schedule = parse_schedule(&schedule)?;
            let base = input.base()?;
            let a = report::analyze(&schedule, &base.scenario)?;
            write!(out, "{}", report::format_analysis(&schedule, &a))?;
        }
        Command::Optimize {
            alpha,
            max_cycle,
            input,
        } => {
            let base = input.base()?;
            let max_cycle = match max_cycle {
                Some(m) => m,
                None => default_max_cycle(&base.scenario)?,
            };
            let o = report::optimize(&base.scenario, alpha, max_cycle)?;
            write!(out, "{}", report::format_optimization(&o))?;
        }
        Command::Simulate {
            schedule,
            pgaw,
            seed,
            cycles,
            batches,
            warmup,
            input,
        } => {
            let base = input.base()?;
            let cfg = SimConfig {
                cycles,
                warmup_cycles: warmup,
                seed,
                batches,
            };
            let [s1, s2] = &base.services;
            let (est, analytic) = match (schedule, pgaw) {
                (Some(s), _) => {
                    let schedule = parse_schedule(&s)?;
                    let est = simulate_cyclic(&schedule, &base.scenario, s1, s2, &cfg)?;
                    (est, Some(per_source_aoi(&schedule, &base.scenario)?))
                }
                (None, Some(p1)) => (simulate_pgaw(p1, &base.scenario, s1, s2, &cfg)?, None),
                (None, None) => unreachable!("clap requires one of the two"),
            };
            write!(out, "{}", report::format_estimate(&est, analytic))?;
        }
        Command::Sweep {
            input,
            out: path,
            seed,
            cycles,
        } => {
            let cfg = input
                .load()?
                .ok_or_else(|| anyhow!("sweep needs --config or --preset"))?;
            let mut spec = cfg.sweep()?.clone();
            if let Some(sim) = spec.sim.as_mut() {
                if let Some(seed) = seed {
                    sim.seed = seed;
                }
                if let Some(slots) = cycles {
                    sim.slots = slots;
                }
            }
            spec.validate()?;
            match path {
                Some(p) => {
                    let f =
                        File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    let mut w = BufWriter::new(f);
                    sweep::run_to_writer(&spec, &mut w)?;
                    w.flush()?;
                }
                None => {
                    sweep::run_to_writer(&spec, &mut out)?;
                }
            }
        }
        Command::Validate { scale } => {
            let results = validate::run(scale);
            let mut ok = true;
            for r in &results {
                writeln!(out, "{r}")?;
                ok &= r.passed;
            }
            if !ok {
                return Ok(Outcome::ChecksFailed);
            }
        }
    }
    Ok(Outcome::Ok)
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
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
