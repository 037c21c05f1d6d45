//! Discrete-event simulation of generate-at-will scheduling over a lossy
//! channel with random service times.
//!
//! Slots run back to back. A slot draws its service time, the clock advances
//! by it, then a drop is drawn; on success the source's age falls to that
//! service time (the sample was generated when the slot started). Ages are
//! integrated exactly as piecewise-linear sawtooths.
//!
//! Every random quantity comes from its own ChaCha stream keyed by
//! `(source, purpose)`, so runs with the same seed are bit-identical and runs
//! that differ only in the scheduling rule share service/drop draws.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma};

use crate::analytic::Scenario;
use crate::error::{Error, Result};
use crate::math::{abs, sqrt};
use crate::schedule::{CyclicSchedule, Source};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ServiceKind {
    Deterministic,
    Exponential,
    Gamma,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ServiceModel {
    pub kind: ServiceKind,
    pub mean: f64,
    pub variance: f64,
}

impl ServiceModel {
    /// `variance` is only read for gamma; deterministic forces 0 and
    /// exponential forces `mean²`.
    pub fn new(kind: ServiceKind, mean: f64, variance: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::InvalidService("mean must be positive"));
        }
        let variance = match kind {
            ServiceKind::Deterministic => 0.0,
            ServiceKind::Exponential => mean * mean,
            ServiceKind::Gamma => {
                if !(variance > 0.0 && variance.is_finite()) {
                    return Err(Error::InvalidService("gamma needs a positive variance"));
                }
                variance
            }
        };
        Ok(ServiceModel {
            kind,
            mean,
            variance,
        })
    }

    pub fn deterministic(mean: f64) -> Result<Self> {
        Self::new(ServiceKind::Deterministic, mean, 0.0)
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        Self::new(ServiceKind::Exponential, mean, 0.0)
    }

    pub fn gamma(mean: f64, variance: f64) -> Result<Self> {
        Self::new(ServiceKind::Gamma, mean, variance)
    }

    fn sampler(&self) -> Result<Sampler> {
        Ok(match self.kind {
            ServiceKind::Deterministic => Sampler::Fixed(self.mean),
            ServiceKind::Exponential => Sampler::Exp(
                Exp::new(1.0 / self.mean).map_err(|_| Error::InvalidService("bad rate"))?,
            ),
            ServiceKind::Gamma => {
                let shape = self.mean * self.mean / self.variance;
                let scale = self.variance / self.mean;
                Sampler::Gamma(
                    Gamma::new(shape, scale).map_err(|_| Error::InvalidService("bad gamma"))?,
                )
            }
        })
    }
}

enum Sampler {
    Fixed(f64),
    Exp(Exp<f64>),
    Gamma(Gamma<f64>),
}

impl Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Fixed(x) => *x,
            Sampler::Exp(d) => d.sample(rng),
            Sampler::Gamma(d) => d.sample(rng),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    /// Schedule cycles after warmup (for P-GAW, slots).
    pub cycles: u64,
    pub warmup_cycles: u64,
    pub seed: u64,
    pub batches: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batches < 10 {
            return Err(Error::InvalidSimConfig("batches must be at least 10"));
        }
        if self.cycles < 100 * self.batches {
            return Err(Error::InvalidSimConfig(
                "cycles must be at least 100 x batches",
            ));
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            cycles: 1_000_000,
            warmup_cycles: 1_000,
            seed: 1,
            batches: 30,
        }
    }
}

/// Time-average AoI per source with batch-means standard errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimEstimate {
    pub aoi_mean: [f64; 2],
    pub aoi_stderr: [f64; 2],
    pub weighted_mean: f64,
    pub weighted_stderr: f64,
    /// Simulated time after warmup.
    pub sim_time: f64,
}

const STREAM_SERVICE: [u64; 2] = [0, 1];
const STREAM_DROP: [u64; 2] = [2, 3];
const STREAM_CHOICE: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

struct Engine {
    samplers: [Sampler; 2],
    service_rng: [ChaCha8Rng; 2],
    drop_rng: [ChaCha8Rng; 2],
    drop_prob: [f64; 2],
    age: [f64; 2],
    area: [f64; 2],
    elapsed: f64,
}

impl Engine {
    fn new(scenario: &Scenario, svc: [&ServiceModel; 2], seed: u64) -> Result<Self> {
        Ok(Engine {
            samplers: [svc[0].sampler()?, svc[1].sampler()?],
            service_rng: [
                stream(seed, STREAM_SERVICE[0]),
                stream(seed, STREAM_SERVICE[1]),
            ],
            drop_rng: [stream(seed, STREAM_DROP[0]), stream(seed, STREAM_DROP[1])],
            drop_prob: [scenario.src1.drop_prob, scenario.src2.drop_prob],
            age: [0.0; 2],
            area: [0.0; 2],
            elapsed: 0.0,
        })
    }

    fn slot(&mut self, src: usize) {
        let x = self.samplers[src].draw(&mut self.service_rng[src]);
        for k in 0..2 {
            self.area[k] += x * (self.age[k] + 0.5 * x);
            self.age[k] += x;
        }
        self.elapsed += x;
        let u: f64 = self.drop_rng[src].random();
        if u >= self.drop_prob[src] {
            self.age[src] = x;
        }
    }

    /// Returns `(area, elapsed)` since the previous call.
    fn take(&mut self) -> ([f64; 2], f64) {
        let out = (self.area, self.elapsed);
        self.area = [0.0; 2];
        self.elapsed = 0.0;
        out
    }
}

fn check_services(scenario: &Scenario, svc1: &ServiceModel, svc2: &ServiceModel) -> Result<()> {
    scenario.validate()?;
    for (idx, (svc, src)) in [(svc1, &scenario.src1), (svc2, &scenario.src2)]
        .into_iter()
        .enumerate()
    {
        let close = |a: f64, b: f64| abs(a - b) <= 1e-9 * a.abs().max(b.abs()).max(1e-12);
        if !close(svc.mean, src.mean_service) || !close(svc.variance, src.var_service) {
            return Err(Error::ServiceMismatch(idx as u8 + 1));
        }
    }
    Ok(())
}

fn run_batches(
    engine: &mut Engine,
    scenario: &Scenario,
    cfg: &SimConfig,
    mut unit: impl FnMut(&mut Engine),
) -> SimEstimate {
    for _ in 0..cfg.warmup_cycles {
        unit(engine);
    }
    engine.take();
    let per_batch = cfg.cycles / cfg.batches;
    let extra = cfg.cycles % cfg.batches;
    let mut ratios: Vec<[f64; 2]> = Vec::with_capacity(cfg.batches as usize);
    let mut total_area = [0.0; 2];
    let mut total_time = 0.0;
    for b in 0..cfg.batches {
        let n = per_batch + u64::from(b < extra);
        for _ in 0..n {
            unit(engine);
        }
        let (area, time) = engine.take();
        ratios.push([area[0] / time, area[1] / time]);
        total_area[0] += area[0];
        total_area[1] += area[1];
        total_time += time;
    }
    let (w1, w2) = (scenario.src1.weight, scenario.src2.weight);
    let mean = [total_area[0] / total_time, total_area[1] / total_time];
    let weighted: Vec<f64> = ratios.iter().map(|r| w1 * r[0] + w2 * r[1]).collect();
    SimEstimate {
        aoi_mean: mean,
        aoi_stderr: [
            batch_stderr(ratios.iter().map(|r| r[0])),
            batch_stderr(ratios.iter().map(|r| r[1])),
        ],
        weighted_mean: w1 * mean[0] + w2 * mean[1],
        weighted_stderr: batch_stderr(weighted.into_iter()),
        sim_time: total_time,
    }
}

/// Standard error of the mean of the batch values.
fn batch_stderr(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let ss: f64 = values.map(|x| (x - mean) * (x - mean)).sum();
    sqrt(ss / (n - 1.0) / n)
}

/// Simulate the cyclic schedule `schedule` for `cfg.cycles` cycles.
pub fn simulate_cyclic(
    schedule: &CyclicSchedule,
    scenario: &Scenario,
    svc1: &ServiceModel,
    svc2: &ServiceModel,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    check_services(scenario, svc1, svc2)?;
    cfg.validate()?;
    let slots: Vec<usize> = schedule
        .to_slots()
        .labels()
        .iter()
        .map(|s| s.index())
        .collect();
    let mut engine = Engine::new(scenario, [svc1, svc2], cfg.seed)?;
    Ok(run_batches(&mut engine, scenario, cfg, |e| {
        for &src in &slots {
            e.slot(src);
        }
    }))
}

/// Probabilistic generate-at-will: each slot serves source 1 with
/// probability `p1`, independently. One slot counts as one cycle.
pub fn simulate_pgaw(
    p1: f64,
    scenario: &Scenario,
    svc1: &ServiceModel,
    svc2: &ServiceModel,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    if !(p1 > 0.0 && p1 < 1.0) {
        return Err(Error::PgawProbability(p1));
    }
    check_services(scenario, svc1, svc2)?;
    cfg.validate()?;
    let mut engine = Engine::new(scenario, [svc1, svc2], cfg.seed)?;
    let mut choice = stream(cfg.seed, STREAM_CHOICE);
    Ok(run_batches(&mut engine, scenario, cfg, |e| {
        let u: f64 = choice.random();
        let src = if u < p1 { Source::One } else { Source::Two };
        e.slot(src.index());
    }))
}

/// `{step, 2·step, ...}` strictly inside `(0, 1)`.
pub fn pgaw_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::GridStep(step));
    }
    let mut grid = Vec::new();
    let mut k = 1u32;
    loop {
        let p1 = k as f64 * step;
        if p1 >= 1.0 - 1e-9 {
            break;
        }
        grid.push(p1);
        k += 1;
    }
    Ok(grid)
}

/// One-dimensional exhaustive search of the P-GAW probability, using the same
/// seed (common random numbers) for every candidate.
pub fn pgaw_best(
    scenario: &Scenario,
    svc1: &ServiceModel,
    svc2: &ServiceModel,
    grid_step: f64,
    cfg: &SimConfig,
) -> Result<(f64, SimEstimate)> {
    let mut best: Option<(f64, SimEstimate)> = None;
    for p1 in pgaw_grid(grid_step)? {
        let est = simulate_pgaw(p1, scenario, svc1, svc2, cfg)?;
        if best
            .as_ref()
            .is_none_or(|(_, b)| est.weighted_mean < b.weighted_mean)
        {
            best = Some((p1, est));
        }
    }
    Ok(best.expect("grid is never empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{aoi_closed_form, SourceParams};

    fn det(p: f64, q: f64) -> (Scenario, ServiceModel) {
        let sc = Scenario::new(
            SourceParams::new(1.0, 0.0, p, 0.5).unwrap(),
            SourceParams::new(1.0, 0.0, q, 0.5).unwrap(),
        )
        .unwrap();
        (sc, ServiceModel::deterministic(1.0).unwrap())
    }

    fn small_cfg(seed: u64) -> SimConfig {
        SimConfig {
            cycles: 200_000,
            warmup_cycles: 1000,
            seed,
            batches: 20,
        }
    }

    #[test]
    fn service_model_forces_variance() {
        assert_eq!(ServiceModel::deterministic(2.0).unwrap().variance, 0.0);
        assert_eq!(ServiceModel::exponential(2.0).unwrap().variance, 4.0);
        assert!(ServiceModel::gamma(2.0, 0.0).is_err());
        assert!(ServiceModel::exponential(0.0).is_err());
    }

    #[test]
    fn config_invariants() {
        let mut c = small_cfg(1);
        assert!(c.validate().is_ok());
        c.batches = 9;
        assert!(c.validate().is_err());
        c.batches = 10;
        c.cycles = 999;
        assert!(c.validate().is_err());
    }

    #[test]
    fn rr_deterministic_drop_free_is_exact() {
        let (sc, d) = det(0.0, 0.0);
        let est =
            simulate_cyclic(&CyclicSchedule::round_robin(), &sc, &d, &d, &small_cfg(3)).unwrap();
        assert!(abs(est.aoi_mean[0] - 2.0) < 1e-9);
        assert!(abs(est.aoi_mean[1] - 2.0) < 1e-9);
        assert!(est.aoi_stderr[0] < 1e-9);
    }

    #[test]
    fn rr_half_drops_matches_closed_form() {
        let (sc, d) = det(0.5, 0.0);
        let est =
            simulate_cyclic(&CyclicSchedule::round_robin(), &sc, &d, &d, &small_cfg(5)).unwrap();
        let exact = aoi_closed_form(&CyclicSchedule::round_robin(), &sc, Source::One)
            .unwrap()
            .total;
        assert_eq!(exact, 4.0);
        assert!(
            abs(est.aoi_mean[0] - 4.0) <= 3.0 * est.aoi_stderr[0],
            "{est:?}"
        );
    }

    #[test]
    fn mismatched_services_rejected() {
        let (sc, d) = det(0.0, 0.0);
        let e = ServiceModel::exponential(1.0).unwrap();
        let rr = CyclicSchedule::round_robin();
        assert_eq!(
            simulate_cyclic(&rr, &sc, &e, &d, &small_cfg(1)),
            Err(Error::ServiceMismatch(1))
        );
        let bad = SimConfig {
            batches: 2,
            ..small_cfg(1)
        };
        assert!(simulate_cyclic(&rr, &sc, &d, &d, &bad).is_err());
    }

    #[test]
    fn same_seed_same_output() {
        let (sc, d) = det(0.4, 0.7);
        let rr: CyclicSchedule = "12122".parse().unwrap();
        let a = simulate_cyclic(&rr, &sc, &d, &d, &small_cfg(9)).unwrap();
        let b = simulate_cyclic(&rr, &sc, &d, &d, &small_cfg(9)).unwrap();
        assert_eq!(a, b);
        let a = simulate_pgaw(0.3, &sc, &d, &d, &small_cfg(9)).unwrap();
        let b = simulate_pgaw(0.3, &sc, &d, &d, &small_cfg(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pgaw_rejects_degenerate_probabilities() {
        let (sc, d) = det(0.0, 0.0);
        assert_eq!(
            simulate_pgaw(0.0, &sc, &d, &d, &small_cfg(1)),
            Err(Error::PgawProbability(0.0))
        );
        assert!(simulate_pgaw(1.0, &sc, &d, &d, &small_cfg(1)).is_err());
    }

    #[test]
    fn pgaw_symmetric_and_worse_than_rr() {
        let (sc, d) = det(0.0, 0.0);
        let est = simulate_pgaw(0.5, &sc, &d, &d, &small_cfg(11)).unwrap();
        let joint = sqrt(est.aoi_stderr[0].powi(2) + est.aoi_stderr[1].powi(2));
        assert!(abs(est.aoi_mean[0] - est.aoi_mean[1]) <= 3.0 * joint);
        assert!(est.weighted_mean > 2.0);
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(pgaw_grid(0.05).unwrap().len(), 19);
        assert_eq!(pgaw_grid(0.1).unwrap().len(), 9);
        assert!(pgaw_grid(0.2).is_err());
        assert!(pgaw_grid(0.0).is_err());
    }

    #[test]
    fn pgaw_best_symmetric_near_half() {
        let (sc, d) = det(0.3, 0.3);
        let cfg = SimConfig {
            cycles: 100_000,
            ..small_cfg(2)
        };
        let (p1, est) = pgaw_best(&sc, &d, &d, 0.1, &cfg).unwrap();
        assert!(abs(p1 - 0.5) <= 0.1 + 1e-12, "p1={p1}");
        assert!(est.aoi_mean[0] >= 1.0 && est.aoi_mean[1] >= 1.0);
    }
}
