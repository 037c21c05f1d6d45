//! Oracle suite behind `cyclic-aoi validate`.

use std::fmt;

use cyclic_aoi_core::analytic::{
    aoi_closed_form, aoi_general, correction_sum_direct, pi_z_sums_closed, pi_z_sums_direct,
    stationary, stationary_power_iteration, transition_prob,
};
use cyclic_aoi_core::optimizer::{
    brute_force, compositions, default_max_cycle, insertion_search, near_optimal_search,
    placement_cost, rr_weighted_aoi, uniform_placement,
};
use cyclic_aoi_core::sim::simulate_cyclic;
use cyclic_aoi_core::{
    CyclicSchedule, Scenario, ServiceKind, ServiceModel, SimConfig, SlotSequence, Source,
    SourceParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

fn outcome(name: &'static str, failures: Vec<String>, checked: usize) -> CheckOutcome {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{checked} cases")
    } else {
        format!(
            "{} of {checked} failed; first: {}",
            failures.len(),
            failures[0]
        )
    };
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Every rotation-distinct two-source cycle with `2 <= u <= max_u`.
pub fn all_cycles(max_u: usize) -> Vec<CyclicSchedule> {
    let mut out = Vec::new();
    for u in 2..=max_u {
        for mask in 1u32..(1u32 << u) - 1 {
            let labels = (0..u)
                .map(|k| {
                    if mask >> k & 1 == 1 {
                        Source::Two
                    } else {
                        Source::One
                    }
                })
                .collect();
            let seq = SlotSequence::new(labels).expect("both sources present");
            if seq.is_canonical() {
                out.push(CyclicSchedule::from_slots(&seq));
            }
        }
    }
    out
}

pub fn scenario(s1: (f64, f64), p: f64, s2: (f64, f64), q: f64, w1: f64) -> Scenario {
    Scenario::new(
        SourceParams::new(s1.0, s1.1, p, w1).expect("valid source 1"),
        SourceParams::new(s2.0, s2.1, q, 1.0 - w1).expect("valid source 2"),
    )
    .expect("valid scenario")
}

/// `p, q ∈ {0, 0.3, 0.7, 0.95}` × `(s, v) ∈ {(1,0), (2,4), (3,9)}` per source.
pub fn parameter_grid() -> Vec<Scenario> {
    let probs = [0.0, 0.3, 0.7, 0.95];
    let moments = [(1.0, 0.0), (2.0, 4.0), (3.0, 9.0)];
    let mut out = Vec::new();
    for &p in &probs {
        for &q in &probs {
            for &m1 in &moments {
                for &m2 in &moments {
                    out.push(scenario(m1, p, m2, q, 0.5));
                }
            }
        }
    }
    out
}

pub fn check_row_sums(max_u1: usize) -> CheckOutcome {
    let grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    let mut failures = Vec::new();
    let mut n = 0;
    for u1 in 1..=max_u1 {
        for &p in &grid {
            for i in 1..=u1 {
                let row: f64 = (1..=u1)
                    .map(|j| transition_prob(i, j, u1, p).unwrap())
                    .sum();
                n += 1;
                if (row - 1.0).abs() > 1e-12 {
                    failures.push(format!("u1={u1} p={p} i={i}: {row}"));
                }
            }
        }
    }
    outcome("row-stochastic transitions", failures, n)
}

pub fn check_stationarity(max_u1: usize) -> CheckOutcome {
    let grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    let mut failures = Vec::new();
    let mut n = 0;
    for u1 in 1..=max_u1 {
        for &p in &grid {
            n += 1;
            let diff = match (stationary(u1, p), stationary_power_iteration(u1, p)) {
                (Ok(a), Ok(b)) => a.max_abs_diff(&b),
                (a, b) => {
                    failures.push(format!("u1={u1} p={p}: {:?} {:?}", a.err(), b.err()));
                    continue;
                }
            };
            if diff > 1e-12 {
                failures.push(format!("u1={u1} p={p}: L∞ {diff:e}"));
            }
        }
    }
    outcome("stationary distribution vs power iteration", failures, n)
}

pub fn check_formula_equivalence(max_u: usize) -> CheckOutcome {
    let cycles = all_cycles(max_u);
    let grid = parameter_grid();
    let failures: Vec<String> = grid
        .par_iter()
        .flat_map_iter(|sc| {
            cycles.iter().flat_map(move |s| {
                [Source::One, Source::Two]
                    .into_iter()
                    .filter_map(move |src| {
                        let g = aoi_general(s, sc, src).ok()?;
                        let c = aoi_closed_form(s, sc, src).ok()?.total;
                        (rel(g, c) > 1e-10).then(|| format!("{s} {src:?}: {g} vs {c}"))
                    })
            })
        })
        .collect();
    outcome(
        "renewal-reward AoI equals closed form",
        failures,
        2 * cycles.len() * grid.len(),
    )
}

pub fn check_aggregate_sums(max_u: usize) -> CheckOutcome {
    let cycles = all_cycles(max_u);
    let grid = parameter_grid();
    let failures: Vec<String> = grid
        .par_iter()
        .flat_map_iter(|sc| {
            cycles.iter().flat_map(move |s| {
                [Source::One, Source::Two]
                    .into_iter()
                    .filter_map(move |src| {
                        let (db, dt) = pi_z_sums_direct(s, sc, src).ok()?;
                        let (cb, ct) = pi_z_sums_closed(s, sc, src).ok()?;
                        (rel(db, cb) > 1e-10 || rel(dt, ct) > 1e-10)
                            .then(|| format!("{s} {src:?}: ({db}, {dt}) vs ({cb}, {ct})"))
                    })
            })
        })
        .collect();
    outcome(
        "aggregate z-moment sums",
        failures,
        2 * cycles.len() * grid.len(),
    )
}

/// Drop-free AoI of source 1 from the first-window form
/// `s/2 + v/(2s) + s1 + s2² (r̃(1) - u1 a²) / (2 s u1)`.
pub fn drop_free_reference(s: &CyclicSchedule, sc: &Scenario) -> f64 {
    let (u1, u2) = (s.u1() as f64, s.u2() as f64);
    let a = u2 / u1;
    let (s1, v1, s2, v2) = (
        sc.src1.mean_service,
        sc.src1.var_service,
        sc.src2.mean_service,
        sc.src2.var_service,
    );
    let ss = a * s2 + s1;
    let v = a * v2 + v1;
    let rt1 = s.r_tilde(1).unwrap() as f64;
    ss / 2.0 + v / (2.0 * ss) + s1 + s2 * s2 * (rt1 - u1 * a * a) / (2.0 * ss * u1)
}

pub fn check_drop_free_reduction(max_u: usize) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut n = 0;
    let moments = [(1.0, 0.0), (2.0, 4.0), (3.0, 9.0), (0.5, 0.1)];
    for s in all_cycles(max_u) {
        for &m1 in &moments {
            for &m2 in &moments {
                let sc = scenario(m1, 0.0, m2, 0.4, 0.5);
                let got = aoi_closed_form(&s, &sc, Source::One).unwrap().total;
                let want = drop_free_reference(&s, &sc);
                n += 1;
                if rel(got, want) > 1e-12 {
                    failures.push(format!("{s}: {got} vs {want}"));
                }
            }
        }
    }
    for u1 in 1..=6u32 {
        for k in 1..=5u32 {
            let s = CyclicSchedule::from_placement(vec![k; u1 as usize]).unwrap();
            let sc = scenario((2.0, 4.0), 0.0, (3.0, 9.0), 0.4, 0.5);
            let b = aoi_closed_form(&s, &sc, Source::One).unwrap();
            n += 1;
            if b.total != b.f {
                failures.push(format!("constant {k} x {u1}: correction {}", b.total - b.f));
            }
        }
    }
    outcome("drop-free reduction", failures, n)
}

/// Exhaustive: `arrange(u1, u2)` must attain the minimum of
/// `Σ r̃(i) p^(i-1)` over every composition of `u2` into `u1` parts.
pub fn check_placement_optimality(
    arrange: &dyn Fn(u64, u64) -> Vec<u32>,
    max_u1: u32,
    max_u2: u32,
) -> CheckOutcome {
    let ps = [0.0, 0.3, 0.7, 0.95];
    let mut failures = Vec::new();
    let mut n = 0;
    for u1 in 1..=max_u1 {
        for u2 in 1..=max_u2 {
            let r = arrange(u1 as u64, u2 as u64);
            let comps = compositions(u2, u1 as usize);
            for &p in &ps {
                n += 1;
                let ours = placement_cost(&r, p);
                let best = comps
                    .iter()
                    .map(|c| placement_cost(c, p))
                    .fold(f64::INFINITY, f64::min);
                if ours > best * (1.0 + 1e-12) {
                    failures.push(format!("({u1},{u2}) p={p}: {ours} > {best}"));
                }
            }
        }
    }
    outcome("placement optimality", failures, n)
}

pub fn check_joint_minimization(max_u1: u32, max_u2: u32) -> CheckOutcome {
    let ps = [0.0, 0.3, 0.7, 0.95];
    let mut failures = Vec::new();
    let mut n = 0;
    for u1 in 1..=max_u1 {
        for u2 in 1..=max_u2 {
            let ours =
                CyclicSchedule::from_placement(uniform_placement(u1 as u64, u2 as u64)).unwrap();
            let comps: Vec<CyclicSchedule> = compositions(u2, u1 as usize)
                .into_iter()
                .map(|c| CyclicSchedule::from_placement(c).unwrap())
                .collect();
            for &p in &ps {
                n += 1;
                let own = correction_sum_direct(ours.placement(), p);
                let dual = correction_sum_direct(ours.dual().placement(), p);
                let best_own = comps
                    .iter()
                    .map(|s| correction_sum_direct(s.placement(), p))
                    .fold(f64::INFINITY, f64::min);
                let best_dual = comps
                    .iter()
                    .map(|s| correction_sum_direct(s.dual().placement(), p))
                    .fold(f64::INFINITY, f64::min);
                if own > best_own + 1e-9 || dual > best_dual + 1e-9 {
                    failures.push(format!("({u1},{u2}) p={p}"));
                }
            }
        }
    }
    outcome("joint minimization of both sources", failures, n)
}

/// Ten scenarios spanning drops, service moments and weights.
pub fn near_optimality_scenarios() -> Vec<Scenario> {
    vec![
        scenario((1.0, 0.0), 0.0, (1.0, 0.0), 0.9, 0.5),
        scenario((1.0, 0.0), 0.5, (1.0, 0.0), 0.9, 0.5),
        scenario((1.0, 0.0), 0.9, (1.0, 0.0), 0.9, 0.3),
        scenario((2.0, 4.0), 0.8, (3.0, 9.0), 0.9, 0.2),
        scenario((2.0, 4.0), 0.2, (3.0, 9.0), 0.9, 0.2),
        scenario((0.5, 0.25), 0.3, (2.0, 1.0), 0.6, 0.6),
        scenario((1.5, 0.0), 0.7, (1.0, 2.0), 0.1, 0.4),
        scenario((3.0, 1.0), 0.0, (1.0, 1.0), 0.0, 0.7),
        scenario((1.0, 1.0), 0.95, (1.0, 1.0), 0.5, 0.5),
        scenario((4.0, 16.0), 0.4, (1.0, 0.0), 0.8, 0.35),
    ]
}

pub fn check_near_optimality(max_u: usize, alpha: u64) -> CheckOutcome {
    let failures: Vec<String> = near_optimality_scenarios()
        .par_iter()
        .enumerate()
        .filter_map(|(k, sc)| {
            let bf = brute_force(sc, max_u).ok()?;
            let no = near_optimal_search(sc, alpha).ok()?;
            let doubled = near_optimal_search(sc, 2 * alpha).ok()?;
            if no.weighted_aoi > 1.01 * bf.weighted_aoi {
                Some(format!(
                    "scenario {k}: {} > 1.01 x {}",
                    no.weighted_aoi, bf.weighted_aoi
                ))
            } else if doubled.weighted_aoi > no.weighted_aoi {
                Some(format!("scenario {k}: doubling alpha worsened"))
            } else {
                None
            }
        })
        .collect();
    outcome("near-optimal search vs brute force", failures, 10)
}

/// `n` random drop-free scenarios.
pub fn drop_free_scenarios(n: usize, seed: u64) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let s1: f64 = rng.random_range(0.5..5.0);
            let s2: f64 = rng.random_range(0.5..5.0);
            let cv1: f64 = rng.random_range(0.0..1.5);
            let cv2: f64 = rng.random_range(0.0..1.5);
            let w1: f64 = rng.random_range(0.1..0.9);
            scenario((s1, cv1 * s1 * s1), 0.0, (s2, cv2 * s2 * s2), 0.0, w1)
        })
        .collect()
}

pub fn check_insertion_search(n: usize) -> CheckOutcome {
    let mut failures = Vec::new();
    for (k, sc) in drop_free_scenarios(n, 7).iter().enumerate() {
        let no = near_optimal_search(sc, 200).unwrap();
        let is = insertion_search(sc, default_max_cycle(sc).unwrap()).unwrap();
        if (no.weighted_aoi - is.weighted_aoi).abs() > 1e-9 * no.weighted_aoi {
            failures.push(format!(
                "drop-free {k}: {} vs {}",
                is.weighted_aoi, no.weighted_aoi
            ));
        }
    }
    for (k, sc) in near_optimality_scenarios().iter().enumerate() {
        let is = insertion_search(sc, default_max_cycle(sc).unwrap()).unwrap();
        if is.weighted_aoi > rr_weighted_aoi(sc).unwrap() {
            failures.push(format!("scenario {k}: worse than round-robin"));
        }
    }
    outcome("insertion search", failures, n + 10)
}

/// A schedule, scenario and matching service models for simulation checks.
#[derive(Debug, Clone)]
pub struct SimCase {
    pub schedule: CyclicSchedule,
    pub scenario: Scenario,
    pub services: [ServiceModel; 2],
}

fn random_service(rng: &mut ChaCha8Rng) -> ServiceModel {
    let mean: f64 = rng.random_range(0.5..3.0);
    match rng.random_range(0..3) {
        0 => ServiceModel::deterministic(mean).unwrap(),
        1 => ServiceModel::exponential(mean).unwrap(),
        _ => {
            let cv2: f64 = rng.random_range(0.1..2.0);
            ServiceModel::new(ServiceKind::Gamma, mean, cv2 * mean * mean).unwrap()
        }
    }
}

impl SimCase {
    pub fn new(
        schedule: CyclicSchedule,
        services: [ServiceModel; 2],
        p: f64,
        q: f64,
        w1: f64,
    ) -> Self {
        let sc = Scenario::new(
            SourceParams::new(services[0].mean, services[0].variance, p, w1).unwrap(),
            SourceParams::new(services[1].mean, services[1].variance, q, 1.0 - w1).unwrap(),
        )
        .unwrap();
        SimCase {
            schedule,
            scenario: sc,
            services,
        }
    }
}

/// `n` random (schedule with `u <= 8`, scenario, distribution) triples.
pub fn random_sim_cases(n: usize, seed: u64) -> Vec<SimCase> {
    let cycles = all_cycles(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let schedule = cycles[rng.random_range(0..cycles.len())].clone();
            let services = [random_service(&mut rng), random_service(&mut rng)];
            let p: f64 = rng.random_range(0.0..0.8);
            let q: f64 = rng.random_range(0.0..0.8);
            let w1: f64 = rng.random_range(0.1..0.9);
            SimCase::new(schedule, services, p, q, w1)
        })
        .collect()
}

/// Per-source `(analytic, simulated, stderr)` for one case.
pub fn simulate_case(case: &SimCase, cfg: &SimConfig) -> [(f64, f64, f64); 2] {
    let est = simulate_cyclic(
        &case.schedule,
        &case.scenario,
        &case.services[0],
        &case.services[1],
        cfg,
    )
    .expect("valid simulation inputs");
    let mut out = [(0.0, 0.0, 0.0); 2];
    for src in [Source::One, Source::Two] {
        let k = src.index();
        let exact = aoi_closed_form(&case.schedule, &case.scenario, src)
            .unwrap()
            .total;
        out[k] = (exact, est.aoi_mean[k], est.aoi_stderr[k]);
    }
    out
}

pub fn check_simulation_agreement(n: usize, cycles: u64, batches: u64) -> CheckOutcome {
    let cases = random_sim_cases(n, 2024);
    let failures: Vec<String> = cases
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, case)| {
            let cfg = SimConfig {
                cycles,
                warmup_cycles: 1000,
                seed: 100 + k as u64,
                batches,
            };
            simulate_case(case, &cfg)
                .into_iter()
                .enumerate()
                .filter(|(_, (a, m, se))| (a - m).abs() > 3.0 * se)
                .map(move |(src, (a, m, se))| {
                    format!("case {k} source {}: analytic {a} sim {m} ± {se}", src + 1)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    outcome("simulation agreement (3 stderr)", failures, 2 * n)
}

pub fn run(scale: Scale) -> Vec<CheckOutcome> {
    match scale {
        Scale::Quick => vec![
            check_row_sums(8),
            check_stationarity(8),
            check_formula_equivalence(6),
            check_aggregate_sums(6),
            check_drop_free_reduction(6),
            check_placement_optimality(&uniform_placement, 4, 8),
            check_joint_minimization(4, 8),
            check_near_optimality(8, 100),
            check_insertion_search(4),
            check_simulation_agreement(5, 50_000, 20),
        ],
        Scale::Full => vec![
            check_row_sums(12),
            check_stationarity(12),
            check_formula_equivalence(8),
            check_aggregate_sums(8),
            check_drop_free_reduction(8),
            check_placement_optimality(&uniform_placement, 5, 12),
            check_joint_minimization(5, 12),
            check_near_optimality(12, 200),
            check_insertion_search(10),
            check_simulation_agreement(20, 1_000_000, 30),
        ],
    }
}
