//! Numerical checks of the finite-case and asymptotic claims:
//!
//! * the exponential family `Q_β(x) ∝ exp(β·𝒦̃₂(x)) bin(n, p; x)` and the sweep
//!   showing `D(P ‖ bin(n, p)) ≥ (E_P[𝒦̃₂])²/2` on `−2^{−½} ≤ E_P[𝒦̃₂] ≤ 0`,
//! * the same sweep for non-integer `np`,
//! * convergence of `D(U_n‖V_n)` to `(C−1)(r − 1 − ln r)/2`,
//! * the two-draw, one-white-ball extreme case,
//! * the central-moment terms of the asymptotic expansion,
//! * the φ brackets on a log-spaced grid.
//!
//! Among all `P` with a given `E_P[𝒦̃₂] = μ`, the divergence from the binomial
//! law is minimized by the normalized tilt `Q_β / M(β)` whose mean is `μ`, and
//! that minimum equals `βμ − ln M(β)`. The sweep therefore checks
//! `βμ − ln M(β) − μ²/2 ≥ 0` along the family. The unnormalized variant
//! `βM'(β) − (M(β) − 1) − M'(β)²/2` is reported next to it.

use std::f64::consts::{E, FRAC_1_SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    hyp_central_moment, moments_by_enumeration, EnumerateSupport, HypParams, MultiHypParams,
    SupportCap,
};
use crate::divergence::{d_hyp_bin, d_multihyp_multinomial};
use crate::kravchuk::{kravchuk2_min, kravchuk2_values, KravchukContext};
use crate::numerics::compensated_sum;
use crate::phi_taylor::{phi_derivatives, phi_sandwich, taylor4_upper_right};
use crate::{Error, Result};

/// Lowest mean of 𝒦̃₂ the inequality is claimed for, `−2^{−½}`.
pub const MEAN_FLOOR: f64 = -FRAC_1_SQRT_2;

/// `β₀ = −2/e`, where `x²e^{β₀x}` peaks at `x = 1`.
pub const BETA_ZERO: f64 = -2.0 / E;

/// `Q_β(x) = exp(β·𝒦̃₂(x; n)) bin(n, p; x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltedFamily {
    pub ctx: KravchukContext,
    pub beta: f64,
}

/// `M(β) = Σ Q_β` and its first three derivatives `M⁽ᵏ⁾(β) = Σ 𝒦̃₂ᵏ Q_β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltedMoments {
    pub m: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

/// Binomial weights and 𝒦̃₂ values on `0..=n`.
struct TiltTable {
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl TiltTable {
    fn new(ctx: &KravchukContext) -> Result<Self> {
        Ok(Self {
            weights: ctx.binomial_masses(),
            values: kravchuk2_values(ctx)?,
        })
    }

    fn moments(&self, beta: f64) -> TiltedMoments {
        let tilted: Vec<(f64, f64)> = self
            .weights
            .iter()
            .zip(&self.values)
            .map(|(&w, &t)| (w * (beta * t).exp(), t))
            .collect();
        let power = |k: i32| compensated_sum(tilted.iter().map(|&(q, t)| q * t.powi(k)));
        TiltedMoments {
            m: power(0),
            m1: power(1),
            m2: power(2),
            m3: power(3),
        }
    }

    /// `(ln M(β), M'(β)/M(β))` without overflow.
    fn log_normalizer_and_mean(&self, beta: f64) -> (f64, f64) {
        let shift = self
            .values
            .iter()
            .map(|&t| beta * t)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        let mut first = 0.0;
        for (&w, &t) in self.weights.iter().zip(&self.values) {
            let q = w * (beta * t - shift).exp();
            total += q;
            first += q * t;
        }
        (shift + total.ln(), first / total)
    }

    fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn tilted_moments(family: &TiltedFamily) -> Result<TiltedMoments> {
    Ok(TiltTable::new(&family.ctx)?.moments(family.beta))
}

/// Step, stopping rule and tolerance of a β sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Decrement of β per step.
    pub step: f64,
    /// Sweep continues until the mean is this far below `−2^{−½}`.
    pub margin: f64,
    /// Lowest β visited when the mean never gets that low.
    pub beta_floor: f64,
    /// Stop once the tilted mean is this close to `min 𝒦̃₂`.
    pub saturation: f64,
    pub tolerance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            margin: 0.05,
            beta_floor: -100.0,
            saturation: 1e-7,
            tolerance: 1e-10,
        }
    }
}

/// Worst points of one β sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    /// Smallest `βμ − ln M − μ²/2` over steps with `μ = M'/M ≥ −2^{−½}`.
    pub min_slack: f64,
    pub worst_beta: f64,
    pub worst_mean: f64,
    /// Smallest `βM' − (M − 1) − M'²/2` over steps with `M' ≥ −2^{−½}`.
    pub reduction_min_slack: f64,
    pub reduction_worst_beta: f64,
    pub reduction_worst_mean: f64,
    /// The tilted mean decreased at every step.
    pub mean_monotone: bool,
    pub steps: usize,
    pub final_beta: f64,
    pub final_mean: f64,
}

fn sweep(table: &TiltTable, cfg: &SweepConfig) -> SweepOutcome {
    let floor_stop = MEAN_FLOOR - cfg.margin;
    let minimum = table.min_value();
    let mut out = SweepOutcome {
        min_slack: f64::INFINITY,
        worst_beta: 0.0,
        worst_mean: 0.0,
        reduction_min_slack: f64::INFINITY,
        reduction_worst_beta: 0.0,
        reduction_worst_mean: 0.0,
        mean_monotone: true,
        steps: 0,
        final_beta: 0.0,
        final_mean: 0.0,
    };
    let mut previous_mean = f64::INFINITY;
    let mut reduction_active = true;
    let mut step = 0usize;
    loop {
        let beta = -(step as f64) * cfg.step;
        let (log_m, mean) = table.log_normalizer_and_mean(beta);
        if mean >= MEAN_FLOOR {
            let slack = beta * mean - log_m - mean * mean / 2.0;
            if slack < out.min_slack {
                out.min_slack = slack;
                out.worst_beta = beta;
                out.worst_mean = mean;
            }
        }
        if reduction_active {
            let m = log_m.exp();
            let m1 = mean * m;
            if m1 >= MEAN_FLOOR {
                let slack = beta * m1 - (m - 1.0) - m1 * m1 / 2.0;
                if slack < out.reduction_min_slack {
                    out.reduction_min_slack = slack;
                    out.reduction_worst_beta = beta;
                    out.reduction_worst_mean = m1;
                }
            }
            if m1 < floor_stop {
                reduction_active = false;
            }
        }
        if mean > previous_mean + 1e-15 {
            out.mean_monotone = false;
        }
        previous_mean = mean;
        out.final_beta = beta;
        out.final_mean = mean;
        out.steps = step;
        let saturated = mean - minimum < cfg.saturation;
        if mean < floor_stop || saturated || beta <= cfg.beta_floor {
            break;
        }
        step += 1;
    }
    out
}

/// Outcome of the sweep for one `(n, k)` with `p = k/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub n: u64,
    pub k: u64,
    /// `min_slack ≥ −tolerance`.
    pub passed: bool,
    pub min_slack: f64,
    pub worst_beta: f64,
    pub worst_mean: f64,
    pub reduction_min_slack: f64,
    pub reduction_worst_beta: f64,
    pub mean_monotone: bool,
    /// `M''(β₀)`.
    pub m2_at_beta_zero: f64,
    /// `min 𝒦̃₂ ≥ β₀`, so the analytic argument covers the case.
    pub analytic_branch: bool,
    pub steps: usize,
}

pub fn verify_tilt_case(n: u64, k: u64) -> Result<CaseReport> {
    verify_tilt_case_with(n, k, &SweepConfig::default())
}

pub fn verify_tilt_case_with(n: u64, k: u64, cfg: &SweepConfig) -> Result<CaseReport> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::InvalidCase { n, k });
    }
    let ctx = KravchukContext::new(n, k as f64 / n as f64)?;
    let table = TiltTable::new(&ctx)?;
    let outcome = sweep(&table, cfg);
    let minimum = kravchuk2_min(&ctx)?;
    Ok(CaseReport {
        n,
        k,
        passed: outcome.min_slack >= -cfg.tolerance,
        min_slack: outcome.min_slack,
        worst_beta: outcome.worst_beta,
        worst_mean: outcome.worst_mean,
        reduction_min_slack: outcome.reduction_min_slack,
        reduction_worst_beta: outcome.reduction_worst_beta,
        mean_monotone: outcome.mean_monotone,
        m2_at_beta_zero: table.moments(BETA_ZERO).m2,
        analytic_branch: minimum.integer_min >= BETA_ZERO,
        steps: outcome.steps,
    })
}

/// All cases `2 ≤ n ≤ n_max`, `1 ≤ k ≤ n − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltSummary {
    pub cases: Vec<CaseReport>,
    /// `(n, k)` with `k ∈ {0, n}`, listed but not swept.
    pub degenerate: Vec<(u64, u64)>,
    pub nondegenerate_count: usize,
    /// `Σ_{n=1}^{n_max} n`, the count obtained with a different inclusive convention.
    pub inclusive_count: u64,
    pub all_passed: bool,
    /// Cases where the unnormalized reduction dips below `−tolerance`.
    pub reduction_failures: Vec<(u64, u64)>,
}

pub fn verify_tilt_all(n_max: u64) -> Result<TiltSummary> {
    verify_tilt_all_with(n_max, &SweepConfig::default())
}

pub fn verify_tilt_all_with(n_max: u64, cfg: &SweepConfig) -> Result<TiltSummary> {
    let pairs: Vec<(u64, u64)> = (2..=n_max)
        .flat_map(|n| (1..n).map(move |k| (n, k)))
        .collect();
    let mut cases = pairs
        .par_iter()
        .map(|&(n, k)| verify_tilt_case_with(n, k, cfg))
        .collect::<Result<Vec<_>>>()?;
    cases.sort_by_key(|c| (c.n, c.k));
    let degenerate = (2..=n_max).flat_map(|n| [(n, 0), (n, n)]).collect();
    let reduction_failures = cases
        .iter()
        .filter(|c| c.reduction_min_slack < -cfg.tolerance)
        .map(|c| (c.n, c.k))
        .collect();
    Ok(TiltSummary {
        nondegenerate_count: cases.len(),
        inclusive_count: n_max * (n_max + 1) / 2,
        all_passed: cases.iter().all(|c| c.passed),
        cases,
        degenerate,
        reduction_failures,
    })
}

/// A point of the conjecture sweep with negative slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjecturePoint {
    pub n: u64,
    pub p: f64,
    pub beta: f64,
    pub mean: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub points_checked: usize,
    /// Grid points dropped because `np` is an integer.
    pub skipped_integer_mean: usize,
    pub violations: Vec<ConjecturePoint>,
    pub reduction_violations: Vec<ConjecturePoint>,
}

/// Runs the sweep for every `n` and every `p` in the grid with `np` not an
/// integer, collecting points whose slack is below `−tolerance`.
pub fn conjecture_search(
    n_values: &[u64],
    p_grid: &[f64],
    cfg: &SweepConfig,
    tolerance: f64,
) -> Result<ConjectureReport> {
    let mut grid = Vec::new();
    let mut skipped = 0;
    for &n in n_values {
        for &p in p_grid {
            let ctx = KravchukContext::new(n, p)?;
            if n < 2 || ctx.has_integer_mean() {
                skipped += 1;
            } else {
                grid.push(ctx);
            }
        }
    }
    let outcomes = grid
        .par_iter()
        .map(|ctx| Ok((*ctx, sweep(&TiltTable::new(ctx)?, cfg))))
        .collect::<Result<Vec<_>>>()?;
    let mut report = ConjectureReport {
        points_checked: outcomes.len(),
        skipped_integer_mean: skipped,
        violations: Vec::new(),
        reduction_violations: Vec::new(),
    };
    for (ctx, o) in outcomes {
        if o.min_slack < -tolerance {
            report.violations.push(ConjecturePoint {
                n: ctx.n(),
                p: ctx.p(),
                beta: o.worst_beta,
                mean: o.worst_mean,
                slack: o.min_slack,
            });
        }
        if o.reduction_min_slack < -tolerance {
            report.reduction_violations.push(ConjecturePoint {
                n: ctx.n(),
                p: ctx.p(),
                beta: o.reduction_worst_beta,
                mean: o.reduction_worst_mean,
                slack: o.reduction_min_slack,
            });
        }
    }
    Ok(report)
}

/// Exact divergences along a schedule of growing urns with a fixed color mix
/// and `n/N → 1 − r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteTrace {
    /// `(N_ℓ, n_ℓ)`
    pub schedule: Vec<(u64, u64)>,
    pub values: Vec<f64>,
    /// `(C − 1)(r − 1 − ln r)/2`
    pub limit: f64,
    pub errors: Vec<f64>,
}

impl AsymptoteTrace {
    pub fn final_error(&self) -> Option<f64> {
        self.errors.last().copied()
    }

    /// Errors over the last third of the schedule never grow by more than `noise`.
    pub fn tail_decreasing(&self, noise: f64) -> bool {
        let start = self.errors.len() - self.errors.len() / 3;
        let start = start.saturating_sub(1);
        self.errors[start..]
            .windows(2)
            .all(|w| w[1] <= w[0] + noise)
    }
}

/// `steps` evenly spaced population sizes ending at `n_max`.
pub fn linear_schedule(n_max: u64, steps: u64) -> Vec<u64> {
    (1..=steps)
        .map(|i| n_max * i / steps)
        .filter(|&v| v > 0)
        .collect()
}

/// Integer counts proportional to `weights` summing to `total`, by the
/// largest-remainder method (ties go to the lower index).
pub fn largest_remainder_counts(weights: &[f64], total: u64) -> Vec<u64> {
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<u64> = exact.iter().map(|e| e.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take((total - assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

pub fn asymptote_limit(colors: usize, r: f64) -> f64 {
    (colors as f64 - 1.0) * (r - 1.0 - r.ln()) / 2.0
}

pub fn asymptote_experiment(
    weights: &[f64],
    r: f64,
    populations: &[u64],
    cap: SupportCap,
) -> Result<AsymptoteTrace> {
    if weights.is_empty() || weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(Error::InvalidParams(
            "color weights must be positive".into(),
        ));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParams(format!(
            "r must lie in (0, 1), got {r}"
        )));
    }
    let limit = asymptote_limit(weights.len(), r);
    let mut schedule = Vec::with_capacity(populations.len());
    let mut values = Vec::with_capacity(populations.len());
    for &big_n in populations {
        let n = ((1.0 - r) * big_n as f64).round() as u64;
        if n >= big_n {
            return Err(Error::InvalidParams(format!(
                "N = {big_n} too small for r = {r}: sample would exhaust the urn"
            )));
        }
        let counts = largest_remainder_counts(weights, big_n);
        let params = MultiHypParams::new(counts, n)?;
        let value = match params.as_univariate() {
            Some(hyp) => d_hyp_bin(&hyp).nats,
            None => d_multihyp_multinomial(&params, cap)?.nats,
        };
        schedule.push((big_n, n));
        values.push(value);
    }
    let errors = values.iter().map(|v| (v - limit).abs()).collect();
    Ok(AsymptoteTrace {
        schedule,
        values,
        limit,
        errors,
    })
}

/// One population size of the `K = 1`, `n = 2` extreme case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremePoint {
    pub population: u64,
    pub divergence: f64,
    /// `N²·D`
    pub scaled: f64,
    /// `1/(2(N−1)²)`
    pub lower_bound: f64,
}

/// `D(U₂‖V₂)` for one white ball among `N`, two draws:
/// `−(1 − 2/N) ln(1 + 1/(N²(1 − 2/N))) − (2/N) ln(1 − 1/N)`.
pub fn extreme_case_divergence(population: u64) -> Result<f64> {
    if population < 2 {
        return Err(Error::InvalidParams(format!(
            "need N ≥ 2, got N = {population}"
        )));
    }
    let big_n = population as f64;
    let single = -(2.0 / big_n) * (-1.0 / big_n).ln_1p();
    if population == 2 {
        return Ok(single);
    }
    let rest = 1.0 - 2.0 / big_n;
    Ok(single - rest * (1.0 / (big_n * big_n * rest)).ln_1p())
}

pub fn extreme_case_trace<I: IntoIterator<Item = u64>>(
    populations: I,
) -> Result<Vec<ExtremePoint>> {
    populations
        .into_iter()
        .map(|population| {
            let divergence = extreme_case_divergence(population)?;
            let big_n = population as f64;
            Ok(ExtremePoint {
                population,
                divergence,
                scaled: big_n * big_n * divergence,
                lower_bound: 1.0 / (2.0 * (big_n - 1.0) * (big_n - 1.0)),
            })
        })
        .collect()
}

/// Order of the expansion term in the asymptotic argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentTerm {
    Second,
    Third,
    Fourth,
}

/// One color with `white` balls among `population`, `draws` already drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentIdentityRow {
    pub population: u64,
    pub draws: u64,
    pub white: u64,
    pub term: MomentTerm,
    pub closed: f64,
    pub enumerated: f64,
    /// `|closed − enumerated|` over the larger of `|enumerated|` and the
    /// same normalization applied to `σᵏ`.
    pub relative_error: f64,
}

/// `Σ_c` of the second-order term against `m(C−1)/(2(N−m)(N−1))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorSumRow {
    pub counts: Vec<u64>,
    pub draws: u64,
    pub closed: f64,
    pub summed: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentIdentityReport {
    pub rows: Vec<MomentIdentityRow>,
    pub color_sums: Vec<ColorSumRow>,
    pub max_relative_error: f64,
}

impl MomentIdentityReport {
    pub fn max_error_for(&self, term: MomentTerm) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.term == term)
            .map(|r| r.relative_error)
            .fold(0.0, f64::max)
    }
}

fn relative_error(value: f64, reference: f64) -> f64 {
    scaled_error(value, reference, 1e-15)
}

/// `|value − reference| / max(|reference|, scale)`.
fn scaled_error(value: f64, reference: f64, scale: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(scale)
}

/// Checks closed forms of the central moments `E[(h − mp)^k]` of `hyp(N, K, m)`,
/// scaled by `2p(N−m)²`, `6p²(N−m)³` and `3p³(N−m)⁴` for `k = 2, 3, 4`, against
/// enumeration for every `1 ≤ m < N`, `1 ≤ K < N` and each `N` in `populations`
/// (each ≥ 4). Also sums the second-order term over three nonempty colors on a
/// coarse grid of splits.
pub fn verify_moment_identities(populations: &[u64]) -> Result<MomentIdentityReport> {
    let mut rows = Vec::new();
    for &big_n in populations {
        if big_n < 4 {
            return Err(Error::InvalidParams(format!("need N ≥ 4, got N = {big_n}")));
        }
        for m in 1..big_n {
            for white in 1..big_n {
                let params = HypParams::new(big_n, white, m)?;
                let table = params.enumerate_support(SupportCap::default())?;
                let (nf, mf, p) = (big_n as f64, m as f64, params.p());
                let gap = nf - mf;
                let variance = moments_by_enumeration(&table, 2)?;
                let second_norm = 2.0 * p * gap * gap;
                let second_closed = mf * (1.0 - p) / (2.0 * gap * (nf - 1.0));
                let second_enum = variance / second_norm;
                let third_norm = 6.0 * p * p * gap.powi(3);
                let third_closed = (1.0 - p) * (1.0 - 2.0 * p) / (6.0 * p) * mf * (nf - 2.0 * mf)
                    / (gap * gap * (nf - 1.0) * (nf - 2.0));
                let third_enum = moments_by_enumeration(&table, 3)? / third_norm;
                let fourth_norm = 3.0 * p.powi(3) * gap.powi(4);
                let fourth_closed = hyp_central_moment(&params, 4)? / fourth_norm;
                let fourth_enum = moments_by_enumeration(&table, 4)? / fourth_norm;
                for (term, closed, enumerated, scale) in [
                    (
                        MomentTerm::Second,
                        second_closed,
                        second_enum,
                        variance / second_norm,
                    ),
                    (
                        MomentTerm::Third,
                        third_closed,
                        third_enum,
                        variance.powf(1.5) / third_norm,
                    ),
                    (
                        MomentTerm::Fourth,
                        fourth_closed,
                        fourth_enum,
                        variance * variance / fourth_norm,
                    ),
                ] {
                    rows.push(MomentIdentityRow {
                        population: big_n,
                        draws: m,
                        white,
                        term,
                        closed,
                        enumerated,
                        relative_error: scaled_error(closed, enumerated, scale),
                    });
                }
            }
        }
    }

    let mut color_sums = Vec::new();
    for &big_n in populations {
        let stride = (big_n / 6).max(1);
        for a in (1..big_n).step_by(stride as usize) {
            for b in (1..big_n - a).step_by(stride as usize) {
                let counts = vec![a, b, big_n - a - b];
                for m in (1..big_n).step_by(stride as usize) {
                    let nf = big_n as f64;
                    let mf = m as f64;
                    let mut parts = Vec::with_capacity(3);
                    for &k in &counts {
                        let params = HypParams::new(big_n, k, m)?;
                        let table = params.enumerate_support(SupportCap::default())?;
                        let p = params.p();
                        parts.push(
                            moments_by_enumeration(&table, 2)? / (2.0 * p * (nf - mf).powi(2)),
                        );
                    }
                    let summed = compensated_sum(parts);
                    let closed = mf * 2.0 / (2.0 * (nf - mf) * (nf - 1.0));
                    color_sums.push(ColorSumRow {
                        counts: counts.clone(),
                        draws: m,
                        closed,
                        summed,
                        relative_error: relative_error(closed, summed),
                    });
                }
            }
        }
    }

    let max_relative_error = rows
        .iter()
        .map(|r| r.relative_error)
        .chain(color_sums.iter().map(|r| r.relative_error))
        .fold(0.0, f64::max);
    Ok(MomentIdentityReport {
        rows,
        color_sums,
        max_relative_error,
    })
}

/// `0` followed by `points − 1` log-spaced values from `1e−6` to `1e3`.
pub fn phi_grid(points: usize) -> Vec<f64> {
    let inner = points.saturating_sub(1).max(2);
    let (lo, hi) = (-6.0f64, 3.0f64);
    std::iter::once(0.0)
        .chain((0..inner).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (inner - 1) as f64)))
        .take(points.max(1))
        .collect()
}

/// Worst slacks of the four φ brackets over a grid, each divided by `max(1, |φ|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiGridReport {
    pub points: usize,
    /// `φ ≥ 0`
    pub nonnegative: f64,
    /// `φ ≤ Δ²`
    pub chi_upper: f64,
    /// `φ ≥ ½Δ² − ⅙Δ³`
    pub taylor3_lower: f64,
    /// `φ ≤ ½Δ² − ⅙Δ³ + ⅓Δ⁴`
    pub taylor4_upper: f64,
    /// `φ ≤ ½Δ² − ⅙Δ³ + (1/12)Δ⁴` on the part of the grid with `x ≥ 1`.
    pub taylor4_right: f64,
    pub violations: usize,
}

impl PhiGridReport {
    pub fn worst(&self) -> f64 {
        [
            self.nonnegative,
            self.chi_upper,
            self.taylor3_lower,
            self.taylor4_upper,
            self.taylor4_right,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

pub fn verify_phi_grid(points: usize, tolerance: f64) -> Result<PhiGridReport> {
    let mut report = PhiGridReport {
        points: 0,
        nonnegative: f64::INFINITY,
        chi_upper: f64::INFINITY,
        taylor3_lower: f64::INFINITY,
        taylor4_upper: f64::INFINITY,
        taylor4_right: f64::INFINITY,
        violations: 0,
    };
    for x in phi_grid(points) {
        let s = phi_sandwich(x)?;
        let scale = s.phi.abs().max(1.0);
        let mut slacks = vec![
            (&mut report.nonnegative, s.phi / scale),
            (&mut report.chi_upper, (s.chi_upper - s.phi) / scale),
            (&mut report.taylor3_lower, (s.phi - s.taylor3_lower) / scale),
            (&mut report.taylor4_upper, (s.taylor4_upper - s.phi) / scale),
        ];
        if x >= 1.0 {
            slacks.push((
                &mut report.taylor4_right,
                (taylor4_upper_right(x) - s.phi) / scale,
            ));
        }
        let mut bad = false;
        for (slot, slack) in slacks {
            *slot = slot.min(slack);
            bad |= slack < -tolerance;
        }
        report.violations += bad as usize;
        report.points += 1;
    }
    Ok(report)
}

/// Analytic derivative of φ against a central difference of the next lower order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub x: f64,
    pub order: u32,
    pub analytic: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
}

/// Checks orders 1..=5 at `points` log-spaced points in `(0.1, 10)`.
pub fn verify_phi_derivatives(points: usize) -> Result<Vec<DerivativeCheck>> {
    let mut out = Vec::new();
    for i in 0..points {
        let x = 0.1 * 100f64.powf((i as f64 + 0.5) / points as f64);
        let h = 1e-5 * x;
        for order in 1..=5u32 {
            let analytic = phi_derivatives(x, order)?;
            let finite_difference = (phi_derivatives(x + h, order - 1)?
                - phi_derivatives(x - h, order - 1)?)
                / (2.0 * h);
            out.push(DerivativeCheck {
                x,
                order,
                analytic,
                finite_difference,
                relative_error: relative_error(finite_difference, analytic),
            });
        }
    }
    Ok(out)
}
