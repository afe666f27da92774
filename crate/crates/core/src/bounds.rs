//! Closed-form lower and upper bounds on the divergence of (multivariate)
//! hypergeometric laws from their approximations, and [`BoundsReport`],
//! which sets them against the exact value.
//!
//! `C` is the number of colors, `N` the population and `n` the sample size.
//! Bounds whose hypotheses fail return [`Error::PreconditionNotMet`] instead
//! of a clamped value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{HypParams, MultiHypParams, PmfTable, SupportCap};
use crate::divergence::{
    chi2_hyp_bin, chi2_hyp_poisson, chi2_multihyp_multinomial, d_hyp_bin, d_hyp_poisson,
    d_multihyp_multinomial,
};
use crate::kravchuk::{kravchuk2_expect, KravchukContext};
use crate::numerics::{compensated_sum, LN_2PI};
use crate::{Error, Result};

fn check_sizes(colors: usize, population: u64, sample: u64) -> Result<()> {
    if colors == 0 {
        return Err(Error::InvalidParams("need at least one color".into()));
    }
    if sample == 0 || sample > population {
        return Err(Error::InvalidParams(format!(
            "need 1 ≤ n ≤ N, got n = {sample}, N = {population}"
        )));
    }
    Ok(())
}

/// `x − ln(1 + x)` without cancellation for small `x`.
fn log1p_gap(x: f64) -> f64 {
    if x.abs() < 0.01 {
        // Σ_{k≥2} (−1)^k x^k / k
        let mut power = x;
        let mut sum = 0.0;
        for k in 2..40u32 {
            power *= -x;
            let add = -power / k as f64;
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        x - x.ln_1p()
    }
}

/// Stam's upper bound `(C−1) n(n−1) / (2(N−1)(N−n+1))`.
pub fn stam_upper(colors: usize, population: u64, sample: u64) -> Result<f64> {
    check_sizes(colors, population, sample)?;
    if sample == 1 {
        return Ok(0.0);
    }
    let (c, big_n, n) = (colors as f64, population as f64, sample as f64);
    Ok((c - 1.0) * n * (n - 1.0) / (2.0 * (big_n - 1.0) * (big_n - n + 1.0)))
}

/// The constant `Q = Σ 1/p_c − 3C + 2 = C²·χ²(1/C, p) + (C−1)(C−2)` of
/// Stam's lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QConstant {
    pub value: f64,
    /// `χ²(uniform, p) = Σ (1/C − p_c)² / p_c`
    pub chi2_uniform: f64,
    pub colors: usize,
}

fn check_probability_vector(probabilities: &[f64]) -> Result<()> {
    if probabilities.is_empty() {
        return Err(Error::InvalidParams("empty probability vector".into()));
    }
    if let Some(c) = probabilities.iter().position(|&p| p.is_nan() || p <= 0.0) {
        return Err(Error::ZeroColorProbability { color: c });
    }
    let total = compensated_sum(probabilities.iter().copied());
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

pub fn q_constant(probabilities: &[f64]) -> Result<QConstant> {
    check_probability_vector(probabilities)?;
    let colors = probabilities.len();
    let c = colors as f64;
    let uniform = 1.0 / c;
    let chi2_uniform = compensated_sum(probabilities.iter().map(|&p| (uniform - p).powi(2) / p));
    Ok(QConstant {
        value: c * c * chi2_uniform + (c - 1.0) * (c - 2.0),
        chi2_uniform,
        colors,
    })
}

/// `Σ 1/p_c − 3C + 2`, the other expression for Q.
pub fn q_constant_reciprocal(probabilities: &[f64]) -> Result<f64> {
    check_probability_vector(probabilities)?;
    let c = probabilities.len() as f64;
    Ok(compensated_sum(
        probabilities
            .iter()
            .map(|&p| 1.0 / p)
            .chain([-3.0 * c, 2.0]),
    ))
}

/// Stam's lower bound
/// `(C−1) n(n−1)/(2(N−1)²) · (½ + (Q/(6(C−1)))·(N−2n+2)/((N−n+1)(N−2)))`.
///
/// Needs `N ≥ 3` once `n ≥ 2`.
pub fn stam_lower(colors: usize, population: u64, sample: u64, q: &QConstant) -> Result<f64> {
    check_sizes(colors, population, sample)?;
    if sample == 1 || colors == 1 {
        return Ok(0.0);
    }
    if population < 3 {
        return Err(Error::PreconditionNotMet(format!(
            "Stam's lower bound needs N ≥ 3, got N = {population}"
        )));
    }
    let (c, big_n, n) = (colors as f64, population as f64, sample as f64);
    let lead = (c - 1.0) * n * (n - 1.0) / (2.0 * (big_n - 1.0) * (big_n - 1.0));
    let correction =
        q.value / (6.0 * (c - 1.0)) * (big_n - 2.0 * n + 2.0) / ((big_n - n + 1.0) * (big_n - 2.0));
    Ok(lead * (0.5 + correction))
}

/// The Poisson lower bound `½((K + n − λ − 1)/(N − 1))²`, `λ = nK/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonLower {
    pub value: f64,
    /// `½((λ/n + λ/K − (λ+1)/N)/(1 − 1/N))²`; absent when `n = 0` or `K = 0`.
    pub rewritten: Option<f64>,
    /// `K ∈ {0, N}` or `n = 0`: the law is a point mass and the bound is not meaningful.
    pub degenerate: bool,
}

pub fn poisson_lower(params: &HypParams) -> Result<PoissonLower> {
    let big_n = params.population();
    if big_n < 2 {
        return Err(Error::InvalidParams(format!(
            "Poisson bound needs N ≥ 2, got N = {big_n}"
        )));
    }
    let (nf, kf, bf) = (params.sample() as f64, params.white() as f64, big_n as f64);
    let lambda = params.mean();
    let base = (kf + nf - lambda - 1.0) / (bf - 1.0);
    let rewritten = (params.sample() > 0 && params.white() > 0).then(|| {
        let inner = (lambda / nf + lambda / kf - (lambda + 1.0) / bf) / (1.0 - 1.0 / bf);
        0.5 * inner * inner
    });
    Ok(PoissonLower {
        value: 0.5 * base * base,
        rewritten,
        degenerate: params.white() == 0 || params.white() == big_n || params.sample() == 0,
    })
}

/// Floor `½ ln 2π` for `D(hyp(N, N, N) ‖ Po(N))`, the case where every ball is
/// white and all are drawn.
pub fn poisson_point_mass_floor() -> f64 {
    0.5 * LN_2PI
}

/// `n(n−1) / (4(N−1)²)`, valid for every `K`.
pub fn binomial_lower(population: u64, sample: u64) -> Result<f64> {
    if population < 2 {
        return Err(Error::InvalidParams(format!(
            "need N ≥ 2, got N = {population}"
        )));
    }
    multi_lower_quadratic(2, population, sample)
}

/// `(E_P[𝒦̃₂])² / 2`, with flags for the hypotheses under which it is a
/// lower bound on `D(P ‖ bin(n, p))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KravchukLower {
    pub value: f64,
    pub expectation: f64,
    /// `np` is an integer.
    pub integer_mean: bool,
    /// `−2^{−½} ≤ E_P[𝒦̃₂] ≤ 0`.
    pub expectation_in_range: bool,
}

impl KravchukLower {
    pub fn applies(&self) -> bool {
        self.integer_mean && self.expectation_in_range
    }
}

pub fn kravchuk_lower(pmf: &PmfTable<u64>, ctx: &KravchukContext) -> Result<KravchukLower> {
    let expectation = kravchuk2_expect(pmf, ctx)?;
    let tol = 1e-12;
    Ok(KravchukLower {
        value: expectation * expectation / 2.0,
        expectation,
        integer_mean: ctx.has_integer_mean(),
        expectation_in_range: expectation >= -std::f64::consts::FRAC_1_SQRT_2 - tol
            && expectation <= tol,
    })
}

/// `(C−1) n(n−1) / (4(N−1)²)`
pub fn multi_lower_quadratic(colors: usize, population: u64, sample: u64) -> Result<f64> {
    check_sizes(colors, population, sample)?;
    if sample == 1 {
        return Ok(0.0);
    }
    let (c, big_n, n) = (colors as f64, population as f64, sample as f64);
    Ok((c - 1.0) * n * (n - 1.0) / (4.0 * (big_n - 1.0) * (big_n - 1.0)))
}

/// `(C−1)(ln(N/(N−n+1)) − (n−1)/(N−1)) / 2`
pub fn multi_lower_log(colors: usize, population: u64, sample: u64) -> Result<f64> {
    check_sizes(colors, population, sample)?;
    if sample == 1 {
        return Ok(0.0);
    }
    let (c, big_n, n) = (colors as f64, population as f64, sample as f64);
    let log_term = -(-(n - 1.0) / big_n).ln_1p();
    Ok((c - 1.0) * (log_term - (n - 1.0) / (big_n - 1.0)) / 2.0)
}

/// `(C−1)(r − 1 − ln r)/2` with `r = 1 − (n−1)/(N − ½)`, for `n ≤ N/2`.
pub fn multi_lower_opt(colors: usize, population: u64, sample: u64) -> Result<f64> {
    check_sizes(colors, population, sample)?;
    if 2 * sample > population {
        return Err(Error::PreconditionNotMet(format!(
            "needs n ≤ N/2, got n = {sample}, N = {population}"
        )));
    }
    let (c, big_n, n) = (colors as f64, population as f64, sample as f64);
    let shift = -(n - 1.0) / (big_n - 0.5);
    Ok((c - 1.0) * log1p_gap(shift) / 2.0)
}

/// `(C−1)(ln((N−1)/(N−n)) + 1/(N−n+1) − n/N)`, for `n < N`.
pub fn multi_upper_log(colors: usize, population: u64, sample: u64) -> Result<f64> {
    check_sizes(colors, population, sample)?;
    if sample == population {
        return Err(Error::PreconditionNotMet(format!(
            "needs n < N, got n = N = {population}"
        )));
    }
    let (c, big_n, n) = (colors as f64, population as f64, sample as f64);
    let log_term = ((n - 1.0) / (big_n - n)).ln_1p();
    Ok((c - 1.0) * (log_term + 1.0 / (big_n - n + 1.0) - n / big_n))
}

/// `(C−1)/2 · S` and `(C−1) · S` with `S = Σ_{j=1}^{n−1} (n−j)/(N−j)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn summed_step_bounds(colors: usize, population: u64, sample: u64) -> Result<StepBounds> {
    check_sizes(colors, population, sample)?;
    let sum = compensated_sum((1..sample).map(|j| {
        let gap = (population - j) as f64;
        (sample - j) as f64 / (gap * gap)
    }));
    let c = colors as f64 - 1.0;
    Ok(StepBounds {
        lower: c * sum / 2.0,
        upper: c * sum,
    })
}

/// Law the hypergeometric distribution is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    #[serde(rename = "bin")]
    Binomial,
    Poisson,
    Multinomial,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bin" | "binomial" => Ok(Target::Binomial),
            "poisson" => Ok(Target::Poisson),
            "multinomial" => Ok(Target::Multinomial),
            other => Err(Error::InvalidParams(format!("unknown target {other:?}"))),
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Target::Binomial => "bin",
            Target::Poisson => "poisson",
            Target::Multinomial => "multinomial",
        })
    }
}

/// Exact divergence next to every bound that applies to the instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub target: Target,
    pub exact: f64,
    pub lower: BTreeMap<String, f64>,
    pub upper: BTreeMap<String, f64>,
    /// Bounds left out, with the reason.
    pub not_applicable: BTreeMap<String, String>,
}

impl BoundsReport {
    /// `exact − bound` for lower bounds and `bound − exact` for upper bounds.
    pub fn slack(&self) -> BTreeMap<String, f64> {
        let lower = self.lower.iter().map(|(k, v)| (k.clone(), self.exact - v));
        let upper = self.upper.iter().map(|(k, v)| (k.clone(), v - self.exact));
        lower.chain(upper).collect()
    }

    /// Bounds whose slack is below `−tolerance`.
    pub fn violations(&self, tolerance: f64) -> Vec<(String, f64)> {
        self.slack()
            .into_iter()
            .filter(|(_, s)| *s < -tolerance)
            .collect()
    }

    pub fn max_lower(&self) -> Option<f64> {
        self.lower.values().copied().reduce(f64::max)
    }

    pub fn min_upper(&self) -> Option<f64> {
        self.upper.values().copied().reduce(f64::min)
    }

    pub fn sandwich_holds(&self, tolerance: f64) -> bool {
        self.violations(tolerance).is_empty()
    }
}

fn record(
    result: Result<f64>,
    name: &str,
    into: &mut BTreeMap<String, f64>,
    skipped: &mut BTreeMap<String, String>,
) -> Result<()> {
    match result {
        Ok(v) => {
            into.insert(name.to_string(), v);
            Ok(())
        }
        Err(Error::PreconditionNotMet(why)) => {
            skipped.insert(name.to_string(), why);
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// Computes the exact divergence and all applicable bounds.
///
/// `Binomial` and `Poisson` need exactly two colors (white first). Violated
/// bounds are reported through [`BoundsReport::violations`], not as errors.
pub fn bounds_report(
    params: &MultiHypParams,
    target: Target,
    cap: SupportCap,
) -> Result<BoundsReport> {
    let mut lower = BTreeMap::new();
    let mut upper = BTreeMap::new();
    let mut skipped = BTreeMap::new();
    let population = params.population();
    let n = params.sample();

    let univariate = || {
        params.as_univariate().ok_or_else(|| {
            Error::InvalidParams(format!(
                "target {target} needs exactly two colors, got {}",
                params.colors()
            ))
        })
    };

    if target == Target::Poisson {
        let hyp = univariate()?;
        let exact = d_hyp_poisson(&hyp).nats;
        upper.insert("chi2".into(), chi2_hyp_poisson(&hyp));
        if population >= 2 {
            let bound = poisson_lower(&hyp)?;
            if bound.degenerate {
                skipped.insert(
                    "poisson".into(),
                    format!(
                        "degenerate urn (K = {}, n = {n}); value {}",
                        hyp.white(),
                        bound.value
                    ),
                );
            } else {
                lower.insert("poisson".into(), bound.value);
            }
        } else {
            skipped.insert("poisson".into(), "needs N ≥ 2".into());
        }
        return Ok(BoundsReport {
            target,
            exact,
            lower,
            upper,
            not_applicable: skipped,
        });
    }

    let (exact, chi2) = match target {
        Target::Binomial => {
            let hyp = univariate()?;
            (d_hyp_bin(&hyp).nats, chi2_hyp_bin(&hyp))
        }
        _ => (
            d_multihyp_multinomial(params, cap)?.nats,
            chi2_multihyp_multinomial(params, cap)?,
        ),
    };
    upper.insert("chi2".into(), chi2);

    let effective = params.without_empty_colors();
    let colors = effective.colors();
    if n == 0 {
        skipped.insert("all".into(), "sample size 0".into());
        return Ok(BoundsReport {
            target,
            exact,
            lower,
            upper,
            not_applicable: skipped,
        });
    }

    let q = q_constant(&effective.probabilities())?;
    record(
        stam_lower(colors, population, n, &q),
        "stam_lower",
        &mut lower,
        &mut skipped,
    )?;
    record(
        multi_lower_quadratic(colors, population, n),
        "quadratic",
        &mut lower,
        &mut skipped,
    )?;
    record(
        multi_lower_log(colors, population, n),
        "log_integral",
        &mut lower,
        &mut skipped,
    )?;
    record(
        multi_lower_opt(colors, population, n),
        "opt_integral",
        &mut lower,
        &mut skipped,
    )?;
    record(
        stam_upper(colors, population, n),
        "stam_upper",
        &mut upper,
        &mut skipped,
    )?;
    record(
        multi_upper_log(colors, population, n),
        "log_upper",
        &mut upper,
        &mut skipped,
    )?;
    upper.insert(
        "summed_upper".into(),
        summed_step_bounds(colors, population, n)?.upper,
    );

    let kravchuk_reason = match params.as_univariate() {
        Some(hyp) if n >= 2 && hyp.white() > 0 && hyp.white() < population => {
            let ctx = KravchukContext::new(n, hyp.p())?;
            let table = crate::distributions::EnumerateSupport::enumerate_support(&hyp, cap)?;
            let bound = kravchuk_lower(&table, &ctx)?;
            if bound.applies() {
                lower.insert("kravchuk".into(), bound.value);
                None
            } else if !bound.integer_mean {
                Some("nK/N is not an integer".to_string())
            } else {
                Some(format!(
                    "E[K2] = {} outside [-2^-1/2, 0]",
                    bound.expectation
                ))
            }
        }
        Some(_) => Some("needs n ≥ 2 and 0 < K < N".to_string()),
        None => Some("needs two colors".to_string()),
    };
    if let Some(why) = kravchuk_reason {
        skipped.insert("kravchuk".into(), why);
    }

    Ok(BoundsReport {
        target,
        exact,
        lower,
        upper,
        not_applicable: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_PAIR: f64 = 0.056_633_012_265_132_49;

    #[test]
    fn stam_upper_examples() {
        assert!((stam_upper(2, 200, 101).unwrap() - 10100.0 / 39800.0).abs() < 1e-15);
        assert_eq!(stam_upper(2, 200, 1).unwrap(), 0.0);
        assert_eq!(stam_upper(1, 200, 50).unwrap(), 0.0);
        assert!(stam_upper(2, 10, 11).is_err());
        assert!(stam_upper(0, 10, 2).is_err());
    }

    #[test]
    fn q_constant_examples() {
        assert_eq!(q_constant(&[0.5, 0.5]).unwrap().value, 0.0);
        let third = 1.0 / 3.0;
        assert!((q_constant(&[third, third, third]).unwrap().value - 2.0).abs() < 1e-14);
        let q = q_constant(&[0.75, 0.25]).unwrap();
        assert!((q.value - 4.0 / 3.0).abs() < 1e-14);
        assert!((q_constant_reciprocal(&[0.75, 0.25]).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!(matches!(
            q_constant(&[1.0, 0.0]),
            Err(Error::ZeroColorProbability { color: 1 })
        ));
    }

    #[test]
    fn stam_lower_examples() {
        let q = q_constant(&[0.5, 0.5]).unwrap();
        let v = stam_lower(2, 4, 2, &q).unwrap();
        assert!((v - 1.0 / 18.0).abs() < 1e-15);
        assert!(v <= SMALL_PAIR);
        assert_eq!(stam_lower(2, 4, 1, &q).unwrap(), 0.0);
        for big_n in 3..30u64 {
            for n in 1..=big_n {
                let a = stam_lower(2, big_n, n, &q).unwrap();
                let b = multi_lower_quadratic(2, big_n, n).unwrap();
                assert!((a - b).abs() < 1e-15);
            }
        }
        assert!(matches!(
            stam_lower(2, 2, 2, &q),
            Err(Error::PreconditionNotMet(_))
        ));
    }

    #[test]
    fn poisson_lower_examples() {
        let b = poisson_lower(&HypParams::new(2, 2, 2).unwrap()).unwrap();
        assert_eq!(b.value, 0.5);
        assert!(b.degenerate);
        let b = poisson_lower(&HypParams::new(100, 10, 10).unwrap()).unwrap();
        assert!((b.value - 0.5 * (18.0f64 / 99.0).powi(2)).abs() < 1e-15);
        assert!((b.rewritten.unwrap() - b.value).abs() < 1e-15);
        assert!(!b.degenerate);
        let b = poisson_lower(&HypParams::new(9, 0, 4).unwrap()).unwrap();
        assert!(b.degenerate);
        assert!((b.value - 0.5 * (3.0f64 / 8.0).powi(2)).abs() < 1e-15);
        assert_eq!(b.rewritten, None);
        assert!(poisson_lower(&HypParams::new(1, 1, 1).unwrap()).is_err());
    }

    #[test]
    fn point_mass_poisson_floor() {
        for big_n in 1..200u64 {
            let d = d_hyp_poisson(&HypParams::new(big_n, big_n, big_n).unwrap()).nats;
            assert!(d >= poisson_point_mass_floor());
        }
    }

    #[test]
    fn binomial_lower_examples() {
        assert!((binomial_lower(4, 2).unwrap() - 2.0 / 36.0).abs() < 1e-15);
        assert_eq!(binomial_lower(10, 1).unwrap(), 0.0);
        assert!((binomial_lower(200, 101).unwrap() - 10100.0 / 158404.0).abs() < 1e-15);
        assert!(binomial_lower(1, 1).is_err());
    }

    #[test]
    fn kravchuk_lower_examples() {
        use crate::distributions::{binomial_table, EnumerateSupport};
        let ctx = KravchukContext::new(2, 0.5).unwrap();
        let b = kravchuk_lower(&binomial_table(2, 0.5).unwrap(), &ctx).unwrap();
        assert!(b.value.abs() < 1e-30);
        let hyp = HypParams::new(4, 2, 2).unwrap();
        let t = hyp.enumerate_support(SupportCap::default()).unwrap();
        let b = kravchuk_lower(&t, &ctx).unwrap();
        assert!((b.expectation + 1.0 / 3.0).abs() < 1e-15);
        assert!((b.value - 1.0 / 18.0).abs() < 1e-15);
        assert!(b.applies());
        let hyp = HypParams::new(3, 1, 2).unwrap();
        let t = hyp.enumerate_support(SupportCap::default()).unwrap();
        let ctx = KravchukContext::new(2, 1.0 / 3.0).unwrap();
        let b = kravchuk_lower(&t, &ctx).unwrap();
        assert!((b.value - 0.125).abs() < 1e-15);
        assert!(!b.integer_mean);
    }

    #[test]
    fn multicolor_bound_examples() {
        assert!(matches!(
            multi_lower_opt(2, 200, 101),
            Err(Error::PreconditionNotMet(_))
        ));
        let r: f64 = 1.0 - 99.0 / 199.5;
        let expected = (r - 1.0 - r.ln()) / 2.0;
        let got = multi_lower_opt(2, 200, 100).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.094_707_953_663_514_14).abs() < 1e-15);
        let expected = (199.0f64 / 99.0).ln() + 1.0 / 100.0 - 101.0 / 200.0;
        assert!((multi_upper_log(2, 200, 101).unwrap() - expected).abs() < 1e-15);
        assert!(matches!(
            multi_upper_log(2, 10, 10),
            Err(Error::PreconditionNotMet(_))
        ));
        let s = summed_step_bounds(3, 17, 2).unwrap();
        assert!((s.lower - 2.0 / (2.0 * 256.0)).abs() < 1e-16);
        assert!((s.upper - 2.0 / 256.0).abs() < 1e-16);
        assert_eq!(multi_lower_log(2, 50, 1).unwrap(), 0.0);
    }

    #[test]
    fn log1p_gap_matches_direct_form() {
        // 40-digit reference values
        let cases = [
            (-0.5, 0.19314718055994531),
            (-0.02, 0.00020270731751944842),
            (-0.0099, 4.933085366808252e-05),
            (-1e-5, 5.0000333335833364e-11),
            (1e-5, 4.9999666669166655e-11),
            (0.0099, 4.868394962581728e-05),
            (0.3, 0.03763573553250894),
        ];
        for (x, expected) in cases {
            assert!((log1p_gap(x) - expected).abs() <= 1e-14 * expected, "{x}");
        }
    }

    #[test]
    fn report_examples() {
        let p = MultiHypParams::from(HypParams::new(4, 2, 2).unwrap());
        let r = bounds_report(&p, Target::Binomial, SupportCap::default()).unwrap();
        assert!((r.exact - SMALL_PAIR).abs() < 1e-15);
        assert!((r.lower["quadratic"] - 1.0 / 18.0).abs() < 1e-15);
        assert!((r.upper["stam_upper"] - 1.0 / 9.0).abs() < 1e-15);
        assert!(r.sandwich_holds(1e-10));

        let p = MultiHypParams::from(HypParams::new(10, 5, 1).unwrap());
        let r = bounds_report(&p, Target::Binomial, SupportCap::default()).unwrap();
        assert_eq!(r.exact, 0.0);
        assert!(r.lower.values().chain(r.upper.values()).all(|&v| v == 0.0));

        let p = MultiHypParams::new(vec![2, 2, 2], 3).unwrap();
        assert!(bounds_report(&p, Target::Binomial, SupportCap::default()).is_err());
        let r = bounds_report(&p, Target::Multinomial, SupportCap::default()).unwrap();
        assert!(!r.lower.contains_key("kravchuk"));
        assert!(r.not_applicable.contains_key("kravchuk"));
    }

    #[test]
    fn target_parsing() {
        assert_eq!("bin".parse::<Target>().unwrap(), Target::Binomial);
        assert_eq!("poisson".parse::<Target>().unwrap(), Target::Poisson);
        assert!("normal".parse::<Target>().is_err());
        assert_eq!(Target::Multinomial.to_string(), "multinomial");
    }
}
