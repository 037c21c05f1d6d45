//! Plain-text reports for `analyze`, `optimize` and `simulate`.

use std::fmt::Write;

use anyhow::Result;
use cyclic_aoi_core::analytic::{aoi_closed_form, weighted_aoi};
use cyclic_aoi_core::optimizer::{insertion_search, near_optimal_search};
use cyclic_aoi_core::{CyclicSchedule, Scenario, SearchResult, SimEstimate, Source};

pub struct Analysis {
    pub per_source: [cyclic_aoi_core::AoiBreakdown; 2],
    pub weighted: f64,
}

pub fn analyze(schedule: &CyclicSchedule, scenario: &Scenario) -> Result<Analysis> {
    Ok(Analysis {
        per_source: [
            aoi_closed_form(schedule, scenario, Source::One)?,
            aoi_closed_form(schedule, scenario, Source::Two)?,
        ],
        weighted: weighted_aoi(schedule, scenario)?,
    })
}

pub fn format_analysis(schedule: &CyclicSchedule, a: &Analysis) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "schedule   {schedule}  {}", schedule.tuple_string());
    for (k, b) in a.per_source.iter().enumerate() {
        let _ = writeln!(
            s,
            "source {}   aoi {:.12}  (f {:.12}  g {:.12}  h {:.12})",
            k + 1,
            b.total,
            b.f,
            b.g,
            b.h
        );
    }
    let _ = writeln!(s, "weighted   {:.12}", a.weighted);
    s
}

pub struct Optimization {
    pub optimal: SearchResult,
    pub insertion: SearchResult,
}

pub fn optimize(scenario: &Scenario, alpha: u64, max_cycle: usize) -> Result<Optimization> {
    Ok(Optimization {
        optimal: near_optimal_search(scenario, alpha)?,
        insertion: insertion_search(scenario, max_cycle)?,
    })
}

pub fn format_optimization(o: &Optimization) -> String {
    let mut s = String::new();
    let (lo, hi) = o.optimal.a_range;
    let _ = writeln!(s, "a range    [{lo:.6}, {hi:.6}]");
    for (name, r) in [("optimal", &o.optimal), ("insertion", &o.insertion)] {
        let _ = writeln!(
            s,
            "{name:<10} {}  u={} u1={}  weighted {:.12}  ({} evaluations)",
            r.schedule,
            r.schedule.u(),
            r.schedule.u1(),
            r.weighted_aoi,
            r.evaluations
        );
    }
    s
}

pub fn format_estimate(est: &SimEstimate, analytic: Option<[f64; 2]>) -> String {
    let mut s = String::new();
    for k in 0..2 {
        let _ = write!(
            s,
            "source {}   sim {:.6} ± {:.6}",
            k + 1,
            est.aoi_mean[k],
            est.aoi_stderr[k]
        );
        if let Some(a) = analytic {
            let _ = write!(s, "  analytic {:.6}", a[k]);
        }
        s.push('\n');
    }
    let _ = writeln!(
        s,
        "weighted   sim {:.6} ± {:.6}  (simulated time {:.1})",
        est.weighted_mean, est.weighted_stderr, est.sim_time
    );
    s
}
