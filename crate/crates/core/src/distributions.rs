//! Point masses, supports and moments of the hypergeometric family and the
//! laws used to approximate it.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::numerics::{
    compensated_sum, count_compositions, ln_binom_raw, ln_poisson_raw, visit_compositions,
};
use crate::{Error, Result};

/// Univariate hypergeometric parameters: `sample` draws without replacement
/// from `population` balls of which `white` are white.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HypParams {
    population: u64,
    white: u64,
    sample: u64,
}

impl HypParams {
    pub fn new(population: u64, white: u64, sample: u64) -> Result<Self> {
        if population == 0 {
            return Err(Error::InvalidParams("population must be at least 1".into()));
        }
        if white > population || sample > population {
            return Err(Error::InvalidParams(format!(
                "need K ≤ N and n ≤ N, got N = {population}, K = {white}, n = {sample}"
            )));
        }
        Ok(Self {
            population,
            white,
            sample,
        })
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn white(&self) -> u64 {
        self.white
    }

    pub fn sample(&self) -> u64 {
        self.sample
    }

    /// Fraction of white balls, K/N.
    pub fn p(&self) -> f64 {
        self.white as f64 / self.population as f64
    }

    /// Fraction of black balls computed as (N−K)/N rather than 1 − K/N.
    pub fn q(&self) -> f64 {
        (self.population - self.white) as f64 / self.population as f64
    }

    /// Inclusive support `max(0, n+K−N) ..= min(n, K)`.
    pub fn support_range(&self) -> (u64, u64) {
        let lo = (self.sample + self.white).saturating_sub(self.population);
        let hi = self.sample.min(self.white);
        (lo, hi)
    }

    pub fn mean(&self) -> f64 {
        self.sample as f64 * self.p()
    }
}

/// Multivariate hypergeometric parameters: per-color ball counts and the
/// sample size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiHypParams {
    counts: Vec<u64>,
    sample: u64,
}

impl MultiHypParams {
    pub fn new(counts: Vec<u64>, sample: u64) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidParams("need at least one color".into()));
        }
        let population: u64 = counts.iter().sum();
        if population == 0 {
            return Err(Error::InvalidParams("population must be at least 1".into()));
        }
        if sample > population {
            return Err(Error::InvalidParams(format!(
                "sample size {sample} exceeds population {population}"
            )));
        }
        Ok(Self { counts, sample })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sample(&self) -> u64 {
        self.sample
    }

    pub fn population(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn colors(&self) -> usize {
        self.counts.len()
    }

    /// Number of colors with at least one ball.
    pub fn effective_colors(&self) -> usize {
        self.counts.iter().filter(|&&k| k > 0).count()
    }

    /// p_c = k_c / N.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.population() as f64;
        self.counts.iter().map(|&k| k as f64 / n).collect()
    }

    /// The same urn and sample size, keeping only colors that have balls.
    pub fn without_empty_colors(&self) -> Self {
        Self {
            counts: self.counts.iter().copied().filter(|&k| k > 0).collect(),
            sample: self.sample,
        }
    }

    /// Two-color view, if there are exactly two colors.
    pub fn as_univariate(&self) -> Option<HypParams> {
        match self.counts[..] {
            [k, rest] => HypParams::new(k + rest, k, self.sample).ok(),
            _ => None,
        }
    }
}

impl From<HypParams> for MultiHypParams {
    fn from(p: HypParams) -> Self {
        Self {
            counts: vec![p.white, p.population - p.white],
            sample: p.sample,
        }
    }
}

/// Upper limit on the number of support points an enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportCap(pub u128);

impl Default for SupportCap {
    fn default() -> Self {
        SupportCap(10_000_000)
    }
}

impl SupportCap {
    pub fn check(&self, size: u128) -> Result<()> {
        if size > self.0 {
            Err(Error::SupportTooLarge { size, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

/// A finite measure given by its support and log masses (nats).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfTable<T> {
    support: Vec<T>,
    log_mass: Vec<f64>,
}

impl<T: Clone + Eq + Hash + Debug> PmfTable<T> {
    /// Builds a table. Log masses may be −∞ (zero mass) but not NaN or +∞;
    /// support points must be distinct.
    pub fn new(support: Vec<T>, log_mass: Vec<f64>) -> Result<Self> {
        if support.len() != log_mass.len() {
            return Err(Error::InvalidParams(format!(
                "support has {} points but {} masses",
                support.len(),
                log_mass.len()
            )));
        }
        if let Some(bad) = log_mass.iter().find(|v| v.is_nan() || *v == &f64::INFINITY) {
            return Err(Error::InvalidParams(format!(
                "log mass {bad} is not allowed"
            )));
        }
        let mut seen = HashSet::with_capacity(support.len());
        for s in &support {
            if !seen.insert(s) {
                return Err(Error::InvalidParams(format!(
                    "duplicate support point {s:?}"
                )));
            }
        }
        Ok(Self { support, log_mass })
    }

    /// Builds a table from plain (non-log) masses.
    pub fn from_masses(support: Vec<T>, masses: &[f64]) -> Result<Self> {
        if let Some(bad) = masses.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidParams(format!(
                "mass {bad} is not a finite non-negative value"
            )));
        }
        Self::new(support, masses.iter().map(|m| m.ln()).collect())
    }

    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn log_mass(&self) -> &[f64] {
        &self.log_mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.log_mass[i].exp()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, f64)> + '_ {
        self.support
            .iter()
            .zip(self.log_mass.iter().map(|l| l.exp()))
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.log_mass.iter().map(|l| l.exp()))
    }

    /// True when the masses sum to 1 within `tol`.
    pub fn is_probability(&self, tol: f64) -> bool {
        (self.total_mass() - 1.0).abs() <= tol
    }

    /// `Σ mass(x)·f(x)`; zero-mass points contribute nothing, whatever `f` says.
    pub fn expect<F: Fn(&T) -> f64>(&self, f: F) -> f64 {
        compensated_sum(self.iter().filter(|(_, m)| *m > 0.0).map(|(x, m)| m * f(x)))
    }
}

/// Enumeration of the full support of a distribution.
pub trait EnumerateSupport {
    type Outcome;

    /// Number of support points.
    fn support_size(&self) -> u128;

    fn enumerate_support(&self, cap: SupportCap) -> Result<PmfTable<Self::Outcome>>;
}

impl EnumerateSupport for HypParams {
    type Outcome = u64;

    fn support_size(&self) -> u128 {
        let (lo, hi) = self.support_range();
        (hi - lo + 1) as u128
    }

    fn enumerate_support(&self, cap: SupportCap) -> Result<PmfTable<u64>> {
        cap.check(self.support_size())?;
        let (lo, hi) = self.support_range();
        let support: Vec<u64> = (lo..=hi).collect();
        let log_mass = support.iter().map(|&x| ln_hyp_unchecked(self, x)).collect();
        PmfTable::new(support, log_mass)
    }
}

impl EnumerateSupport for MultiHypParams {
    type Outcome = Vec<u64>;

    fn support_size(&self) -> u128 {
        count_compositions(self.sample, &self.counts)
    }

    fn enumerate_support(&self, cap: SupportCap) -> Result<PmfTable<Vec<u64>>> {
        cap.check(self.support_size())?;
        let mut support = Vec::new();
        let mut log_mass = Vec::new();
        visit_compositions(self.sample, &self.counts, |h| {
            support.push(h.to_vec());
            log_mass.push(ln_multi_hyp_unchecked(self, h));
        });
        PmfTable::new(support, log_mass)
    }
}

fn ln_hyp_unchecked(params: &HypParams, x: u64) -> f64 {
    let big_n = params.population;
    let n = params.sample;
    let k = params.white;
    let p = n as f64 / big_n as f64;
    let q = (big_n - n) as f64 / big_n as f64;
    ln_binom_raw(x, k, p, q) + ln_binom_raw(n - x, big_n - k, p, q) - ln_binom_raw(n, big_n, p, q)
}

fn ln_multi_hyp_unchecked(params: &MultiHypParams, h: &[u64]) -> f64 {
    let big_n = params.population();
    let n = params.sample;
    let p = n as f64 / big_n as f64;
    let q = (big_n - n) as f64 / big_n as f64;
    let num: f64 = params
        .counts
        .iter()
        .zip(h)
        .map(|(&k, &hc)| ln_binom_raw(hc, k, p, q))
        .sum();
    num - ln_binom_raw(n, big_n, p, q)
}

/// ln Pr(X = x) for X ~ hyp(N, K, n).
pub fn log_pmf_hyp(params: &HypParams, x: u64) -> Result<f64> {
    let (lo, hi) = params.support_range();
    if x < lo || x > hi {
        return Err(Error::OutOfSupport {
            outcome: x.to_string(),
            support: format!("{lo}..={hi}"),
        });
    }
    Ok(ln_hyp_unchecked(params, x))
}

/// ln Pr(U = h) for the multivariate hypergeometric count vector `h`.
pub fn log_pmf_multi_hyp(params: &MultiHypParams, h: &[u64]) -> Result<f64> {
    if h.len() != params.colors() {
        return Err(Error::InvalidParams(format!(
            "count vector has {} entries for {} colors",
            h.len(),
            params.colors()
        )));
    }
    let fits =
        h.iter().sum::<u64>() == params.sample && h.iter().zip(&params.counts).all(|(a, b)| a <= b);
    if !fits {
        return Err(Error::OutOfSupport {
            outcome: format!("{h:?}"),
            support: format!("sum {} with h ≤ {:?}", params.sample, params.counts),
        });
    }
    Ok(ln_multi_hyp_unchecked(params, h))
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// ln bin(n, p; x). Values of `x` above `n` have zero mass.
pub fn log_pmf_bin(n: u64, p: f64, x: u64) -> Result<f64> {
    check_probability(p)?;
    Ok(ln_binom_raw(x, n, p, 1.0 - p))
}

/// ln of the binomial mass with success fraction `white / population`,
/// keeping both p and 1 − p exact to one rounding.
pub(crate) fn ln_bin_counts(n: u64, white: u64, population: u64, x: u64) -> f64 {
    let p = white as f64 / population as f64;
    let q = (population - white) as f64 / population as f64;
    ln_binom_raw(x, n, p, q)
}

/// ln of the multinomial mass of `h` for probabilities `p` (entries ≥ 0, summing to 1).
pub fn log_pmf_multinomial(n: u64, p: &[f64], h: &[u64]) -> Result<f64> {
    if p.len() != h.len() || p.is_empty() {
        return Err(Error::InvalidParams(
            "probability and count vectors differ in length".into(),
        ));
    }
    for &pc in p {
        check_probability(pc)?;
    }
    let total = compensated_sum(p.iter().copied());
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    if h.iter().sum::<u64>() != n {
        return Err(Error::InvalidParams(format!(
            "counts do not sum to n = {n}"
        )));
    }
    // Sequential binomial factorization with suffix sums of p.
    let mut suffix = vec![0.0; p.len() + 1];
    for c in (0..p.len()).rev() {
        suffix[c] = suffix[c + 1] + p[c];
    }
    let mut remaining = n;
    let mut acc = 0.0;
    for c in 0..p.len() - 1 {
        let s = suffix[c];
        let (pc, qc) = if s > 0.0 {
            (p[c] / s, suffix[c + 1] / s)
        } else {
            (0.0, 1.0)
        };
        acc += ln_binom_raw(h[c], remaining, pc, qc);
        remaining -= h[c].min(remaining);
    }
    let last = p.len() - 1;
    if h[last] != remaining || (remaining > 0 && p[last] == 0.0 && suffix[last] == 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(acc)
}

/// Multinomial log mass with probabilities `k_c / N` given as counts.
pub(crate) fn ln_multinomial_counts(n: u64, counts: &[u64], h: &[u64]) -> f64 {
    let mut suffix = vec![0u64; counts.len() + 1];
    for c in (0..counts.len()).rev() {
        suffix[c] = suffix[c + 1] + counts[c];
    }
    let mut remaining = n;
    let mut acc = 0.0;
    for c in 0..counts.len() - 1 {
        if suffix[c] == 0 {
            if h[c] > 0 {
                return f64::NEG_INFINITY;
            }
            continue;
        }
        if h[c] > remaining {
            return f64::NEG_INFINITY;
        }
        acc += ln_bin_counts(remaining, counts[c], suffix[c], h[c]);
        remaining -= h[c];
    }
    let last = counts.len() - 1;
    if h[last] != remaining || (remaining > 0 && counts[last] == 0) {
        return f64::NEG_INFINITY;
    }
    acc
}

/// ln Po(λ; x).
pub fn log_pmf_poisson(lambda: f64, x: u64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParams(format!(
            "Poisson mean {lambda} must be finite and ≥ 0"
        )));
    }
    if lambda == 0.0 {
        return Ok(if x == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    Ok(ln_poisson_raw(x, lambda))
}

/// Full binomial table over `0..=n`.
pub fn binomial_table(n: u64, p: f64) -> Result<PmfTable<u64>> {
    check_probability(p)?;
    let support: Vec<u64> = (0..=n).collect();
    let log_mass = support
        .iter()
        .map(|&x| ln_binom_raw(x, n, p, 1.0 - p))
        .collect();
    PmfTable::new(support, log_mass)
}

/// Full multinomial table over compositions of `n` into `p.len()` parts.
pub fn multinomial_table(n: u64, p: &[f64], cap: SupportCap) -> Result<PmfTable<Vec<u64>>> {
    let upper = vec![n; p.len()];
    cap.check(count_compositions(n, &upper))?;
    let mut support = Vec::new();
    let mut log_mass = Vec::new();
    let mut err = None;
    visit_compositions(n, &upper, |h| match log_pmf_multinomial(n, p, h) {
        Ok(l) => {
            support.push(h.to_vec());
            log_mass.push(l);
        }
        Err(e) => err = Some(e),
    });
    if let Some(e) = err {
        return Err(e);
    }
    PmfTable::new(support, log_mass)
}

/// Mean and central moments (keyed by order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean: f64,
    pub central: BTreeMap<u32, f64>,
}

impl MomentSet {
    pub fn variance(&self) -> Option<f64> {
        self.central.get(&2).copied()
    }

    /// Orders 2..=6 by enumeration of a normalized table.
    pub fn from_enumeration(pmf: &PmfTable<u64>) -> Result<Self> {
        let mean = pmf.expect(|&x| x as f64);
        let mut central = BTreeMap::new();
        for order in 2..=6 {
            central.insert(order, moments_by_enumeration(pmf, order)?);
        }
        Ok(Self { mean, central })
    }
}

/// Closed-form hypergeometric central moment of order 2, 3 or 4.
///
/// Order 3 needs N ≥ 3 and order 4 needs N ≥ 4.
pub fn hyp_central_moment(params: &HypParams, order: u32) -> Result<f64> {
    let big_n = params.population as f64;
    let m = params.sample as f64;
    let p = params.p();
    let q = params.q();
    let npq = m * p * q;
    match order {
        1 => Ok(0.0),
        2 => {
            if params.population == 1 {
                return Ok(0.0);
            }
            Ok(npq * (big_n - m) / (big_n - 1.0))
        }
        3 => {
            if params.population < 3 {
                return Err(Error::DegenerateDenominator {
                    order,
                    population: params.population,
                    min_population: 2,
                });
            }
            Ok(npq * (q - p) * (big_n - m) * (big_n - 2.0 * m) / ((big_n - 1.0) * (big_n - 2.0)))
        }
        4 => {
            if params.population < 4 {
                return Err(Error::DegenerateDenominator {
                    order,
                    population: params.population,
                    min_population: 3,
                });
            }
            let pq = p * q;
            let var = npq * (big_n - m) / (big_n - 1.0);
            let numerator = (big_n - 1.0)
                * (big_n * (big_n + 1.0) - 6.0 * m * (big_n - m) - 6.0 * big_n * big_n * pq)
                + 6.0 * m * pq * (big_n - m) * (5.0 * big_n - 6.0);
            let scale =
                npq * (big_n - m) / ((big_n - 1.0) * (big_n - 1.0) * (big_n - 2.0) * (big_n - 3.0));
            Ok(3.0 * var * var + scale * numerator)
        }
        _ => Err(Error::InvalidParams(format!(
            "no closed form for central moment of order {order}"
        ))),
    }
}

/// Mean and central moments 2..=4 from closed forms; orders whose closed form
/// has a vanishing denominator fall back to enumeration.
pub fn moments_closed_form(params: &HypParams) -> Result<MomentSet> {
    let mut central = BTreeMap::new();
    let mut table = None;
    for order in 2..=4 {
        let v = match hyp_central_moment(params, order) {
            Ok(v) => v,
            Err(Error::DegenerateDenominator { .. }) => {
                if table.is_none() {
                    table = Some(params.enumerate_support(SupportCap::default())?);
                }
                moments_by_enumeration(table.as_ref().unwrap(), order)?
            }
            Err(e) => return Err(e),
        };
        central.insert(order, v);
    }
    Ok(MomentSet {
        mean: params.mean(),
        central,
    })
}

/// `Σ p(x)(x − μ)^order` with compensated summation, order in 1..=6.
pub fn moments_by_enumeration(pmf: &PmfTable<u64>, order: u32) -> Result<f64> {
    if !(1..=6).contains(&order) {
        return Err(Error::InvalidParams(format!(
            "moment order {order} outside 1..=6"
        )));
    }
    let mean = pmf.expect(|&x| x as f64);
    Ok(pmf.expect(|&x| (x as f64 - mean).powi(order as i32)))
}

/// Binomial central moments of order 2..=6 from the cumulants
/// κ₂ = npq, κ₃ = npq(q−p), κ₄ = npq(1−6pq), κ₅ = npq(q−p)(1−12pq),
/// κ₆ = npq(1−30pq+120p²q²).
pub fn binomial_central_moment(n: u64, p: f64, order: u32) -> Result<f64> {
    check_probability(p)?;
    let q = 1.0 - p;
    let pq = p * q;
    let npq = n as f64 * pq;
    let k2 = npq;
    let k3 = npq * (q - p);
    let k4 = npq * (1.0 - 6.0 * pq);
    let k5 = npq * (q - p) * (1.0 - 12.0 * pq);
    let k6 = npq * (1.0 - 30.0 * pq + 120.0 * pq * pq);
    match order {
        1 => Ok(0.0),
        2 => Ok(k2),
        3 => Ok(k3),
        4 => Ok(k4 + 3.0 * k2 * k2),
        5 => Ok(k5 + 10.0 * k3 * k2),
        6 => Ok(k6 + 15.0 * k4 * k2 + 10.0 * k3 * k3 + 15.0 * k2 * k2 * k2),
        _ => Err(Error::InvalidParams(format!(
            "moment order {order} outside 1..=6"
        ))),
    }
}
