//! Parameter sweeps written as CSV.
//!
//! Header: `param,method,analytic_aoi[,sim_mean,sim_stderr]`, one row per
//! grid value and method, sorted by grid value then method name. P-GAW has
//! no analytic value; its `analytic_aoi` cell is empty.

use std::io::Write;

use anyhow::{Context, Result};
use cyclic_aoi_core::optimizer::{default_max_cycle, insertion_search, near_optimal_search};
use cyclic_aoi_core::sim::{pgaw_best, simulate_cyclic};
use cyclic_aoi_core::{CyclicSchedule, SimConfig, SimEstimate};
use rayon::prelude::*;

use crate::config::{Base, Method, SimSettings, SweepSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub param: f64,
    pub method: Method,
    pub analytic: Option<f64>,
    pub sim: Option<(f64, f64)>,
    /// Cyclic schedule used, or the chosen P-GAW probability.
    pub choice: Choice,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Choice {
    Schedule(CyclicSchedule),
    Probability(f64),
}

fn sim_config(sim: &SimSettings, slots_per_unit: u64) -> SimConfig {
    let units = sim.slots.div_ceil(slots_per_unit).max(100 * sim.batches);
    SimConfig {
        cycles: units,
        warmup_cycles: sim.warmup_cycles,
        seed: sim.seed,
        batches: sim.batches,
    }
}

fn simulate(base: &Base, schedule: &CyclicSchedule, sim: &SimSettings) -> Result<SimEstimate> {
    let cfg = sim_config(sim, schedule.u());
    Ok(simulate_cyclic(
        schedule,
        &base.scenario,
        &base.services[0],
        &base.services[1],
        &cfg,
    )?)
}

fn run_point(spec: &SweepSpec, value: f64) -> Result<Vec<Row>> {
    let base = spec.base.with_param(spec.varying, value).build()?;
    let sc = &base.scenario;
    let mut rows = Vec::new();
    for &method in &spec.methods {
        let (analytic, choice, sim) = match method {
            Method::Pgaw => {
                let sim = spec
                    .sim
                    .as_ref()
                    .context("pgaw needs simulation settings")?;
                let cfg = sim_config(sim, 1);
                let (p1, est) = pgaw_best(
                    sc,
                    &base.services[0],
                    &base.services[1],
                    sim.pgaw_grid_step,
                    &cfg,
                )?;
                (
                    None,
                    Choice::Probability(p1),
                    Some((est.weighted_mean, est.weighted_stderr)),
                )
            }
            _ => {
                let result = match method {
                    Method::Optimal => near_optimal_search(sc, spec.alpha)?,
                    Method::InsertionSearch => {
                        let cap = match spec.max_cycle {
                            Some(c) => c,
                            None => default_max_cycle(sc)?,
                        };
                        insertion_search(sc, cap)?
                    }
                    Method::RoundRobin => {
                        let rr = CyclicSchedule::round_robin();
                        let w = cyclic_aoi_core::analytic::weighted_aoi(&rr, sc)?;
                        cyclic_aoi_core::SearchResult {
                            schedule: rr,
                            weighted_aoi: w,
                            evaluations: 1,
                            a_range: (f64::NAN, f64::NAN),
                        }
                    }
                    Method::Pgaw => unreachable!(),
                };
                let sim = match &spec.sim {
                    Some(s) => {
                        let est = simulate(&base, &result.schedule, s)?;
                        Some((est.weighted_mean, est.weighted_stderr))
                    }
                    None => None,
                };
                (
                    Some(result.weighted_aoi),
                    Choice::Schedule(result.schedule),
                    sim,
                )
            }
        };
        rows.push(Row {
            param: value,
            method,
            analytic,
            sim,
            choice,
        });
    }
    Ok(rows)
}

/// Evaluate every grid point (in parallel) and return rows in output order.
pub fn run(spec: &SweepSpec) -> Result<Vec<Row>> {
    spec.validate()?;
    let per_point: Vec<Vec<Row>> = spec
        .grid
        .par_iter()
        .map(|&v| run_point(spec, v))
        .collect::<Result<_>>()?;
    let mut rows: Vec<Row> = per_point.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.param
            .total_cmp(&b.param)
            .then_with(|| a.method.name().cmp(b.method.name()))
    });
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[Row], with_sim: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["param", "method", "analytic_aoi"];
    if with_sim {
        header.extend(["sim_mean", "sim_stderr"]);
    }
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![
            row.param.to_string(),
            row.method.name().to_string(),
            row.analytic.map(|x| x.to_string()).unwrap_or_default(),
        ];
        if with_sim {
            let (m, s) = row
                .sim
                .map(|(m, s)| (m.to_string(), s.to_string()))
                .unwrap_or_default();
            rec.push(m);
            rec.push(s);
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Run a sweep and write its CSV to `out`.
pub fn run_to_writer<W: Write>(spec: &SweepSpec, out: W) -> Result<Vec<Row>> {
    let rows = run(spec)?;
    write_csv(&rows, spec.sim.is_some(), out)?;
    Ok(rows)
}
