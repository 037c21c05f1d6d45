//! Weighted-AoI minimizing cyclic schedules.
//!
//! For fixed `(u1, u2)` the best placement vector only uses `⌊a⌋` and `⌈a⌉`
//! and spreads them as evenly as possible ([`uniform_placement`]); the same
//! arrangement is also the most even one for source 2. What remains is the
//! choice of the rational `a = u2/u1`, swept by [`near_optimal_search`]
//! inside the interval where a schedule can still beat round-robin.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::analytic::{per_source_aoi, weighted_aoi, Scenario};
use crate::error::{Error, Result};
use crate::math::{abs, powi};
use crate::schedule::{r_tilde, reduce_coprime, CyclicSchedule, SlotSequence, Source};

/// Default resolution of the rational sweep.
pub const DEFAULT_ALPHA: u64 = 200;

/// Largest cycle length [`brute_force`] accepts; cost grows as `2^u`.
pub const BRUTE_FORCE_CAP: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub schedule: CyclicSchedule,
    pub weighted_aoi: f64,
    /// Number of distinct candidate patterns scored.
    pub evaluations: usize,
    pub a_range: (f64, f64),
}

/// Arrange `u1` entries of `⌊a⌋` and `⌈a⌉` (`a = u2/u1`, summing to `u2`) by
/// hierarchical spreading.
///
/// Starting from the two single-entry blocks, the minority block is paired
/// with `⌊c⌋` or `⌈c⌉` copies of the majority block (`c` the count ratio),
/// which yields two new blocks and new counts; this repeats until one of the
/// two counts is at most 1. Counts are kept as exact integers.
pub fn uniform_placement(u1: u64, u2: u64) -> Vec<u32> {
    assert!(u1 >= 1, "u1 must be positive");
    let lo = (u2 / u1) as u32;
    if u2.is_multiple_of(u1) {
        return vec![lo; u1 as usize];
    }
    let mut b1: Vec<u32> = vec![lo];
    let mut b2: Vec<u32> = vec![lo + 1];
    // c1 copies of b1, c2 copies of b2
    let mut c1 = u1 * (lo as u64 + 1) - u2;
    let mut c2 = u2 - u1 * lo as u64;
    while c1.min(c2) > 1 {
        if c1 > c2 {
            core::mem::swap(&mut c1, &mut c2);
            core::mem::swap(&mut b1, &mut b2);
        }
        let floor = c2 / c1;
        let ceil = floor + u64::from(!c2.is_multiple_of(c1));
        let mut n1 = b1.clone();
        let mut n2 = b1;
        for _ in 0..floor {
            n1.extend_from_slice(&b2);
        }
        for _ in 0..ceil {
            n2.extend_from_slice(&b2);
        }
        let (new_c1, new_c2) = if floor == ceil {
            (0, c1)
        } else {
            (c1 * ceil - c2, c2 - c1 * floor)
        };
        b1 = n1;
        b2 = n2;
        c1 = new_c1;
        c2 = new_c2;
    }
    let mut out = Vec::with_capacity(u1 as usize);
    for _ in 0..c2 {
        out.extend_from_slice(&b2);
    }
    for _ in 0..c1 {
        out.extend_from_slice(&b1);
    }
    debug_assert_eq!(out.len() as u64, u1);
    out
}

/// `Σ_{i=1..u1} r̃(i) p^(i-1)`, the placement-dependent part of the source-1
/// correction term, summed window by window.
pub fn placement_cost(placement: &[u32], p: f64) -> f64 {
    (1..=placement.len())
        .map(|i| r_tilde(placement, i).expect("in range") as f64 * powi(p, i as u64 - 1))
        .sum()
}

/// All compositions of `total` into `parts` nonnegative integers.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// Weighted AoI of round-robin `{S1, S2}`.
pub fn rr_weighted_aoi(scenario: &Scenario) -> Result<f64> {
    weighted_aoi(&CyclicSchedule::round_robin(), scenario)
}

/// Interval of `a = u2/u1` outside which no schedule can beat round-robin.
///
/// `a_max` solves `w1·LB1(a) = E[Δ_RR]` for the linear lower bound
/// `LB1(a) = (1+p)(a s2 + s1)/(2(1-p)) + s1 <= E[Δ¹]`; `a_min` is the
/// reciprocal of the same quantity computed for source 2.
pub fn a_bounds(scenario: &Scenario) -> Result<(f64, f64)> {
    let rr = rr_weighted_aoi(scenario)?;
    let a_max = linear_crossing(scenario, Source::One, rr);
    let a_min = 1.0 / linear_crossing(scenario, Source::Two, rr);
    if a_min >= a_max || !a_min.is_finite() || !a_max.is_finite() {
        return Err(Error::DegenerateBounds { a_min, a_max });
    }
    Ok((a_min, a_max))
}

fn linear_crossing(scenario: &Scenario, source: Source, rr: f64) -> f64 {
    let own = scenario.source(source);
    let other = scenario.source(source.other());
    let p = own.drop_prob;
    let slope_scale = 2.0 * (1.0 - p) / (1.0 + p);
    ((rr / own.weight - own.mean_service) * slope_scale - own.mean_service) / other.mean_service
}

/// Keeps the best candidate; ties (to 1e-12 relative) go to the shorter cycle.
struct Incumbent {
    schedule: CyclicSchedule,
    value: f64,
}

impl Incumbent {
    fn offer(&mut self, schedule: CyclicSchedule, value: f64) {
        let tol = 1e-12 * abs(self.value);
        let better = value < self.value - tol
            || (abs(value - self.value) <= tol && schedule.u() < self.schedule.u());
        if better {
            self.schedule = schedule;
            self.value = value;
        }
    }
}

fn score(schedule: &CyclicSchedule, scenario: &Scenario) -> Result<f64> {
    let [a1, a2] = per_source_aoi(schedule, scenario)?;
    Ok(scenario.src1.weight * a1 + scenario.src2.weight * a2)
}

/// Sweep `a` over multiples of `1/alpha` in `[1, a_max)` (fixing `u1 =
/// alpha`) and over `alpha/u1` in `(a_min, 1]` (fixing `u2 = alpha`),
/// scoring each reduced pattern with its uniform placement.
pub fn near_optimal_search(scenario: &Scenario, alpha: u64) -> Result<SearchResult> {
    if alpha == 0 {
        return Err(Error::InvalidSearch("alpha must be at least 1"));
    }
    scenario.validate()?;
    let (a_min, a_max) = a_bounds(scenario)?;
    let rr = CyclicSchedule::round_robin();
    let mut best = Incumbent {
        value: score(&rr, scenario)?,
        schedule: rr,
    };
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    seen.insert((1, 1));
    let mut evaluations = 1usize;
    let mut consider = |u1: u64, u2: u64, best: &mut Incumbent| -> Result<()> {
        let key = reduce_coprime(u1, u2);
        if !seen.insert(key) {
            return Ok(());
        }
        let schedule = CyclicSchedule::from_placement(uniform_placement(key.0, key.1))?;
        let value = score(&schedule, scenario)?;
        evaluations += 1;
        best.offer(schedule, value);
        Ok(())
    };

    let mut u2 = alpha;
    while (u2 as f64) < a_max * alpha as f64 {
        consider(alpha, u2, &mut best)?;
        u2 += 1;
    }
    let mut u1 = alpha;
    while (alpha as f64) > a_min * u1 as f64 {
        consider(u1, alpha, &mut best)?;
        u1 += 1;
    }
    Ok(SearchResult {
        schedule: best.schedule,
        weighted_aoi: best.value,
        evaluations,
        a_range: (a_min, a_max),
    })
}

/// Default cycle-length limit for [`insertion_search`]: `4·(a_max + 1)`,
/// with `a_max` taken over both orientations.
pub fn default_max_cycle(scenario: &Scenario) -> Result<usize> {
    let (a_min, a_max) = a_bounds(scenario)?;
    let widest = a_max.max(1.0 / a_min);
    Ok((4.0 * (widest + 1.0)) as usize)
}

/// Greedy growth from round-robin: at every step try inserting each source
/// at each position and keep the best insertion while it strictly lowers the
/// weighted AoI.
pub fn insertion_search(scenario: &Scenario, max_cycle: usize) -> Result<SearchResult> {
    if max_cycle < 2 {
        return Err(Error::InvalidSearch("max_cycle must be at least 2"));
    }
    scenario.validate()?;
    let a_range = a_bounds(scenario)?;
    let mut slots = CyclicSchedule::round_robin().to_slots();
    let mut value = score(&CyclicSchedule::round_robin(), scenario)?;
    let mut evaluations = 1usize;
    while slots.len() < max_cycle {
        let mut step: Option<(SlotSequence, f64)> = None;
        for source in [Source::One, Source::Two] {
            for pos in 0..slots.len() {
                let cand = slots.inserted(pos, source);
                let v = score(&CyclicSchedule::from_slots(&cand), scenario)?;
                evaluations += 1;
                if step.as_ref().is_none_or(|(_, bv)| v < *bv) {
                    step = Some((cand, v));
                }
            }
        }
        match step {
            Some((cand, v)) if v < value => {
                slots = cand;
                value = v;
            }
            _ => break,
        }
    }
    Ok(SearchResult {
        schedule: CyclicSchedule::from_slots(&slots),
        weighted_aoi: value,
        evaluations,
        a_range,
    })
}

/// Exhaustive minimum over all rotation-distinct cycles with `2 <= u <= max_u`.
pub fn brute_force(scenario: &Scenario, max_u: usize) -> Result<SearchResult> {
    brute_force_capped(scenario, max_u, BRUTE_FORCE_CAP)
}

pub fn brute_force_capped(scenario: &Scenario, max_u: usize, cap: usize) -> Result<SearchResult> {
    if max_u > cap {
        return Err(Error::CapExceeded { max_u, cap });
    }
    if max_u < 2 {
        return Err(Error::InvalidSearch("max_u must be at least 2"));
    }
    scenario.validate()?;
    let a_range = a_bounds(scenario)?;
    let rr = CyclicSchedule::round_robin();
    let mut best = Incumbent {
        value: score(&rr, scenario)?,
        schedule: rr,
    };
    let mut evaluations = 1usize;
    for u in 3..=max_u {
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
            let seq = SlotSequence::new(labels)?;
            if !seq.is_canonical() {
                continue;
            }
            let schedule = CyclicSchedule::from_slots(&seq);
            let value = score(&schedule, scenario)?;
            evaluations += 1;
            best.offer(schedule, value);
        }
    }
    Ok(SearchResult {
        schedule: best.schedule,
        weighted_aoi: best.value,
        evaluations,
        a_range,
    })
}
