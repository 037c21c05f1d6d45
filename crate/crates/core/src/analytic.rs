//! Exact mean AoI of a cyclic schedule under independent packet drops.
//!
//! For source 1 the successful-delivery instants form a Markov chain on
//! pairs `(i, j)`: an AoI cycle that starts at the `i`-th source-1 slot of
//! the cycle and ends at the `j`-th. Mean AoI follows from renewal-reward
//! over that chain ([`aoi_general`]). Summing the stationary weights in
//! closed form gives
//!
//! ```text
//! E[Δ¹] = (1+p)/(2(1-p))·s + v/(2s) + s1
//!       + s2²(1-p)² / (2 s u1 (1-p^u1)) · Σ_{i=1..u1} (r̃(i) - u1 a² i²) p^(i-1)
//! ```
//!
//! with `a = u2/u1`, `s = a s2 + s1`, `v = a v2 + v1` ([`aoi_closed_form`]).
//! Source 2 is handled by swapping roles on the dual schedule.
//!
//! Both routes evaluate `p = 0` as the continuous limit (`0^0 = 1`).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, powi};
use crate::schedule::{r_tilde, CyclicSchedule, Source};

/// Channel and weighting parameters of one source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceParams {
    pub mean_service: f64,
    pub var_service: f64,
    pub drop_prob: f64,
    pub weight: f64,
}

impl SourceParams {
    pub fn new(mean_service: f64, var_service: f64, drop_prob: f64, weight: f64) -> Result<Self> {
        let sp = SourceParams {
            mean_service,
            var_service,
            drop_prob,
            weight,
        };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_service > 0.0 && self.mean_service.is_finite()) {
            return Err(Error::InvalidSource("mean service time must be positive"));
        }
        if !(self.var_service >= 0.0 && self.var_service.is_finite()) {
            return Err(Error::InvalidSource("service variance must be nonnegative"));
        }
        check_drop(self.drop_prob)?;
        if !(self.weight > 0.0 && self.weight.is_finite()) {
            return Err(Error::InvalidSource("weight must be positive"));
        }
        Ok(())
    }
}

/// Two sources sharing the channel; weights are normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub src1: SourceParams,
    pub src2: SourceParams,
}

impl Scenario {
    pub fn new(src1: SourceParams, src2: SourceParams) -> Result<Self> {
        let sc = Scenario { src1, src2 };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        self.src1.validate()?;
        self.src2.validate()?;
        let total = self.src1.weight + self.src2.weight;
        if abs(total - 1.0) > 1e-12 {
            return Err(Error::WeightsNotNormalized(total));
        }
        Ok(())
    }

    pub fn source(&self, source: Source) -> &SourceParams {
        match source {
            Source::One => &self.src1,
            Source::Two => &self.src2,
        }
    }

    /// The same scenario with the two sources exchanged.
    pub fn swapped(&self) -> Scenario {
        Scenario {
            src1: self.src2,
            src2: self.src1,
        }
    }
}

/// Quantities shared by both AoI routes, from the point of view of one source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedQuantities {
    /// `u_other / u_own`.
    pub a: f64,
    /// Mean cycle time per own slot, `a·s_other + s_own`.
    pub s: f64,
    pub v: f64,
    /// Mean cycle duration `u1·s1 + u2·s2`.
    pub s_hat: f64,
    pub v_hat: f64,
    /// Probability that every own slot of a cycle is dropped, `p^u_own`.
    pub rho: f64,
    pub m_bar: f64,
    pub m_tilde: f64,
}

impl DerivedQuantities {
    pub fn new(schedule: &CyclicSchedule, scenario: &Scenario, source: Source) -> Result<Self> {
        scenario.validate()?;
        let placement = schedule.placement_for(source);
        let side = Side::new(scenario, source, &placement);
        side.derived()
    }
}

/// Closed-form AoI split as `total = f - g + h`.
///
/// `f` collects the terms that depend only on `a`; `g` and `h` are the two
/// halves of the placement-dependent correction, with `h >= g` always.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AoiBreakdown {
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub total: f64,
}

fn check_drop(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::DropProbability(p));
    }
    Ok(())
}

fn check_index(i: usize, len: usize) -> Result<()> {
    if i == 0 || i > len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    Ok(())
}

/// Probability that, after a success at own slot `i`, the next success lands
/// on own slot `j` (1-based).
pub fn transition_prob(i: usize, j: usize, u1: usize, p: f64) -> Result<f64> {
    check_index(i, u1)?;
    check_index(j, u1)?;
    check_drop(p)?;
    Ok(transition_prob_unchecked(i, j, u1, p))
}

fn transition_prob_unchecked(i: usize, j: usize, u1: usize, p: f64) -> f64 {
    let exp = if j > i { j - i - 1 } else { j + u1 - i - 1 };
    (1.0 - p) * powi(p, exp as u64) / (1.0 - powi(p, u1 as u64))
}

/// Dense `n × n` matrix of probabilities, row-major, read with 1-based indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ProbMatrix {
    fn zeros(n: usize) -> Self {
        ProbMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, 1-based.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[(i - 1) * self.n + (j - 1)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &ProbMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| abs(a - b))
            .fold(0.0, f64::max)
    }
}

/// Stationary distribution of the pair chain: `π(i, j) = p_ij / u1`.
pub fn stationary(u1: usize, p: f64) -> Result<ProbMatrix> {
    check_drop(p)?;
    if u1 == 0 {
        return Err(Error::IndexOutOfRange { index: 0, len: 0 });
    }
    let mut m = ProbMatrix::zeros(u1);
    for i in 1..=u1 {
        for j in 1..=u1 {
            m.data[(i - 1) * u1 + (j - 1)] = transition_prob_unchecked(i, j, u1, p) / u1 as f64;
        }
    }
    Ok(m)
}

/// Transition matrix of the `u1²`-state pair chain, row-major over states
/// `(k, l) -> (i, j)`, state `(i, j)` at index `(i-1)·u1 + (j-1)`.
///
/// `(k, l)` moves to `(l, j)` with probability `p_lj`; every other entry is 0.
pub fn pair_chain_matrix(u1: usize, p: f64) -> Result<Vec<f64>> {
    check_drop(p)?;
    let n = u1 * u1;
    let mut t = vec![0.0; n * n];
    for k in 0..u1 {
        for l in 0..u1 {
            let row = k * u1 + l;
            for j in 0..u1 {
                let col = l * u1 + j;
                t[row * n + col] = transition_prob_unchecked(l + 1, j + 1, u1, p);
            }
        }
    }
    Ok(t)
}

const POWER_MAX_ITERS: usize = 100_000;

/// Power iteration on the dense pair-chain matrix from the uniform start,
/// stopping once the L∞ change drops below `1e-14`.
pub fn stationary_power_iteration(u1: usize, p: f64) -> Result<ProbMatrix> {
    if u1 == 0 {
        return Err(Error::IndexOutOfRange { index: 0, len: 0 });
    }
    let t = pair_chain_matrix(u1, p)?;
    let n = u1 * u1;
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_ITERS {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (row, &w) in pi.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let base = row * n;
            for (col, x) in next.iter_mut().enumerate() {
                *x += w * t[base + col];
            }
        }
        let delta = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| abs(a - b))
            .fold(0.0, f64::max);
        core::mem::swap(&mut pi, &mut next);
        if delta < 1e-14 {
            return Ok(ProbMatrix { n: u1, data: pi });
        }
    }
    Err(Error::NoConvergence(POWER_MAX_ITERS))
}

/// `(E[M], E[M²])` for the number `M` of whole cycles in which every own
/// slot is dropped: `M + 1 ~ Geom(ρ)` with failure probability `ρ = p^u1`.
pub fn geom_round_moments(u1: usize, p: f64) -> Result<(f64, f64)> {
    check_drop(p)?;
    Ok(geom_moments_of_rho(powi(p, u1 as u64)))
}

fn geom_moments_of_rho(rho: f64) -> (f64, f64) {
    if rho < 1e-15 {
        return (0.0, 0.0);
    }
    let m_bar = rho / (1.0 - rho);
    let m_tilde = rho * (1.0 + rho) / ((1.0 - rho) * (1.0 - rho));
    (m_bar, m_tilde)
}

/// Own and other slot counts traversed by an AoI cycle from own slot `i` to
/// own slot `j` within one pass (`n1 = u1` when `i == j`).
pub fn slot_counts(schedule: &CyclicSchedule, i: usize, j: usize) -> Result<(u64, u64)> {
    let u1 = schedule.u1() as usize;
    check_index(i, u1)?;
    check_index(j, u1)?;
    Ok(slot_counts_in(schedule.placement(), i, j))
}

fn slot_counts_in(placement: &[u32], i: usize, j: usize) -> (u64, u64) {
    let u1 = placement.len();
    let n1 = (j + u1 - i - 1) % u1 + 1;
    let n2 = (0..n1).map(|k| placement[(i - 1 + k) % u1] as u64).sum();
    (n1 as u64, n2)
}

/// `(E[Z_ij], E[Z_ij²])` for source 1; service times in distinct slots are
/// independent.
pub fn z_moments(
    schedule: &CyclicSchedule,
    scenario: &Scenario,
    i: usize,
    j: usize,
) -> Result<(f64, f64)> {
    let (n1, n2) = slot_counts(schedule, i, j)?;
    Ok(z_from_counts(&scenario.src1, &scenario.src2, n1, n2))
}

fn z_from_counts(own: &SourceParams, other: &SourceParams, n1: u64, n2: u64) -> (f64, f64) {
    let (n1, n2) = (n1 as f64, n2 as f64);
    let z_bar = n1 * own.mean_service + n2 * other.mean_service;
    let z_tilde = n1 * own.var_service + n2 * other.var_service + z_bar * z_bar;
    (z_bar, z_tilde)
}

/// `Σ_{i=1..n} i p^(i-1)` and `Σ_{i=1..n} i² p^(i-1)`, summed directly.
fn power_sums(n: u64, p: f64) -> (f64, f64, f64) {
    let mut pw = 1.0;
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for i in 1..=n {
        let fi = i as f64;
        s0 += pw;
        s1 += fi * pw;
        s2 += fi * fi * pw;
        pw *= p;
        if pw == 0.0 {
            break;
        }
    }
    (s0, s1, s2)
}

/// `Σ_{i=1..u} (r̃(i) - u a² i²) p^(i-1)` evaluated term by term from `r̃`.
///
/// `O(u²)`; [`correction_sum`] gives the same value in `O(u)`.
pub fn correction_sum_direct(placement: &[u32], p: f64) -> f64 {
    let u = placement.len();
    let u_other: u64 = placement.iter().map(|&x| x as u64).sum();
    let a = u_other as f64 / u as f64;
    let mut acc = 0.0;
    let mut pw = 1.0;
    for i in 1..=u {
        let rt = r_tilde(placement, i).expect("window in range") as f64;
        let fi = i as f64;
        acc += (rt - u as f64 * a * a * fi * fi) * pw;
        pw *= p;
    }
    acc
}

/// Same value as [`correction_sum_direct`], in linear time.
///
/// With the integer discrepancy `d[k] = u·P[k] - u_other·k` (`P` the prefix
/// sums of the placement, `d` periodic in `k`), every window satisfies
/// `u·(W_j(i) - a i) = d[j+i] - d[j]`, so
///
/// ```text
/// Σ_i p^(i-1) Σ_j (W_j(i) - a i)² = (2/u²) (C0 S0 - Σ_j d[j] E[j])
/// ```
///
/// where `C0 = Σ d²`, `S0 = Σ_{i=1..u} p^(i-1)` and
/// `E[j] = Σ_{i=1..u} p^(i-1) d[j+i]`, which obeys the cyclic recurrence
/// `E[j] = (1 - p^u) d[j+1] + p E[j+1]`.
pub fn correction_sum(placement: &[u32], p: f64) -> f64 {
    let u = placement.len();
    let u_other: i64 = placement.iter().map(|&x| x as i64).sum();
    let mut d = Vec::with_capacity(u);
    let mut prefix: i64 = 0;
    for (k, &r) in placement.iter().enumerate() {
        d.push((u as i64 * prefix - u_other * k as i64) as f64);
        prefix += r as i64;
    }
    let rho = powi(p, u as u64);
    let mut e = vec![0.0; u];
    let mut pw = 1.0;
    for i in 1..=u {
        e[0] += pw * d[i % u];
        pw *= p;
    }
    for j in (1..u).rev() {
        e[j] = (1.0 - rho) * d[(j + 1) % u] + p * e[(j + 1) % u];
    }
    let (s0, _, _) = power_sums(u as u64, p);
    let c0: f64 = d.iter().map(|x| x * x).sum();
    let cross: f64 = d.iter().zip(&e).map(|(x, y)| x * y).sum();
    let uf = u as f64;
    (2.0 * (c0 * s0 - cross) / (uf * uf)).max(0.0)
}

/// One source's view: its own parameters, the other source's, and its
/// placement vector (gaps of other-source slots between own slots).
struct Side<'a> {
    own: &'a SourceParams,
    other: &'a SourceParams,
    placement: &'a [u32],
}

impl<'a> Side<'a> {
    fn new(scenario: &'a Scenario, source: Source, placement: &'a [u32]) -> Self {
        Side {
            own: scenario.source(source),
            other: scenario.source(source.other()),
            placement,
        }
    }

    fn u_own(&self) -> u64 {
        self.placement.len() as u64
    }

    fn u_other(&self) -> u64 {
        self.placement.iter().map(|&x| x as u64).sum()
    }

    fn derived(&self) -> Result<DerivedQuantities> {
        check_drop(self.own.drop_prob)?;
        let (u1, u2) = (self.u_own() as f64, self.u_other() as f64);
        let a = u2 / u1;
        let rho = powi(self.own.drop_prob, self.u_own());
        let (m_bar, m_tilde) = geom_moments_of_rho(rho);
        Ok(DerivedQuantities {
            a,
            s: a * self.other.mean_service + self.own.mean_service,
            v: a * self.other.var_service + self.own.var_service,
            s_hat: u1 * self.own.mean_service + u2 * self.other.mean_service,
            v_hat: u1 * self.own.var_service + u2 * self.other.var_service,
            rho,
            m_bar,
            m_tilde,
        })
    }

    /// `(Σ π z̄, Σ π z̃)` from the stationary matrix and per-pair moments.
    fn pi_z_direct(&self) -> Result<(f64, f64)> {
        let u1 = self.placement.len();
        let pi = stationary(u1, self.own.drop_prob)?;
        let (mut zb, mut zt) = (0.0, 0.0);
        for i in 1..=u1 {
            for j in 1..=u1 {
                let (n1, n2) = slot_counts_in(self.placement, i, j);
                let (b, t) = z_from_counts(self.own, self.other, n1, n2);
                let w = pi.at(i, j);
                zb += w * b;
                zt += w * t;
            }
        }
        Ok((zb, zt))
    }

    /// `(Σ π z̄, Σ π z̃)` via the aggregate closed forms.
    fn pi_z_closed(&self) -> Result<(f64, f64)> {
        let dq = self.derived()?;
        let p = self.own.drop_prob;
        let u = self.u_own();
        let (_, s1, s2) = power_sums(u, p);
        let k = (1.0 - p) / (1.0 - dq.rho);
        let zb = dq.s * k * s1;
        let corr = correction_sum(self.placement, p);
        let so2 = self.other.mean_service * self.other.mean_service;
        let zt = k * (dq.v * s1 + dq.s * dq.s * s2) + so2 * k / u as f64 * corr;
        Ok((zb, zt))
    }

    fn general(&self) -> Result<f64> {
        let dq = self.derived()?;
        let (zb, zt) = self.pi_z_direct()?;
        let s_own = self.own.mean_service;
        let denom = dq.m_bar * dq.s_hat + zb;
        let first = (dq.m_tilde * dq.s_hat * dq.s_hat
            + dq.m_bar * (2.0 * s_own * dq.s_hat + dq.v_hat)
            + zt)
            / (2.0 * denom);
        let second = (dq.m_bar * dq.s_hat + s_own) * zb / denom;
        Ok(first + second)
    }

    fn closed_form(&self) -> Result<AoiBreakdown> {
        let dq = self.derived()?;
        let p = self.own.drop_prob;
        let u = self.u_own();
        let s = dq.s;
        let f = (1.0 + p) / (2.0 * (1.0 - p)) * s + dq.v / (2.0 * s) + self.own.mean_service;
        let so2 = self.other.mean_service * self.other.mean_service;
        let scale = so2 * (1.0 - p) * (1.0 - p) / (2.0 * s * (1.0 - dq.rho));
        let (_, _, sq) = power_sums(u, p);
        let g = dq.a * dq.a * scale * sq;
        let corr = scale * correction_sum(self.placement, p) / u as f64;
        Ok(AoiBreakdown {
            f,
            g,
            h: g + corr,
            total: f + corr,
        })
    }
}

fn with_side<T>(
    schedule: &CyclicSchedule,
    scenario: &Scenario,
    source: Source,
    run: impl FnOnce(&Side<'_>) -> Result<T>,
) -> Result<T> {
    scenario.validate()?;
    match source {
        Source::One => run(&Side::new(scenario, source, schedule.placement())),
        Source::Two => {
            let placement = schedule.placement_for(Source::Two);
            run(&Side::new(scenario, source, &placement))
        }
    }
}

/// Mean AoI of `source` from the pair-chain stationary distribution and the
/// renewal-reward ratio of expected area to expected cycle time.
pub fn aoi_general(schedule: &CyclicSchedule, scenario: &Scenario, source: Source) -> Result<f64> {
    with_side(schedule, scenario, source, |side| side.general())
}

/// Closed-form mean AoI of `source`, with its `f - g + h` split.
pub fn aoi_closed_form(
    schedule: &CyclicSchedule,
    scenario: &Scenario,
    source: Source,
) -> Result<AoiBreakdown> {
    with_side(schedule, scenario, source, |side| side.closed_form())
}

/// `(Σ π z̄, Σ π z̃)` summed over all `u1²` pairs.
pub fn pi_z_sums_direct(
    schedule: &CyclicSchedule,
    scenario: &Scenario,
    source: Source,
) -> Result<(f64, f64)> {
    with_side(schedule, scenario, source, |side| side.pi_z_direct())
}

/// `(Σ π z̄, Σ π z̃)` from the aggregate closed forms in `s`, `v` and `r̃`.
pub fn pi_z_sums_closed(
    schedule: &CyclicSchedule,
    scenario: &Scenario,
    source: Source,
) -> Result<(f64, f64)> {
    with_side(schedule, scenario, source, |side| side.pi_z_closed())
}

/// `w1 E[Δ¹] + w2 E[Δ²]` using the closed form.
pub fn weighted_aoi(schedule: &CyclicSchedule, scenario: &Scenario) -> Result<f64> {
    let [a1, a2] = per_source_aoi(schedule, scenario)?;
    Ok(scenario.src1.weight * a1 + scenario.src2.weight * a2)
}

/// Closed-form mean AoI of both sources.
pub fn per_source_aoi(schedule: &CyclicSchedule, scenario: &Scenario) -> Result<[f64; 2]> {
    scenario.validate()?;
    let dual = schedule.dual();
    let one = Side::new(scenario, Source::One, schedule.placement()).closed_form()?;
    let two = Side::new(scenario, Source::Two, dual.placement()).closed_form()?;
    Ok([one.total, two.total])
}
