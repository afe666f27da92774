//! Information divergence `D(P‖Q) = Σ p ln(p/q) − p + q` and χ²-divergence
//! between finite measures, the exact divergences of hypergeometric laws from
//! their binomial, multinomial and Poisson approximations, and the per-step
//! decomposition of the multinomial case into conditional mutual informations.
//!
//! Every divergence is accumulated as `Σ q·φ(p/q)`, with `ln(p/q)` obtained
//! directly from products of `(1 − i/M)` factors rather than as a difference
//! of two log masses. The divergences of interest are of order `1/N²`, far
//! below the size of the individual log masses, so this matters.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    ln_bin_counts, ln_multinomial_counts, EnumerateSupport, HypParams, MultiHypParams, PmfTable,
    SupportCap,
};
use crate::numerics::{
    compensated_sum, count_compositions, ln_falling_ratio_table, visit_compositions,
};
use crate::phi_taylor::phi_of_exp;
use crate::{Error, Result};

/// An exact divergence in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceResult {
    pub nats: f64,
    /// Number of points of the reference measure that were summed over.
    pub support_size: usize,
    /// Points where the first measure has zero mass (each contributes `q`).
    pub terms_dropped: usize,
}

/// A reference mass (log) paired with the log likelihood ratio `ln(p/q)` at
/// the same point. `log_ratio = −∞` marks a point where `p = 0`.
#[derive(Debug, Clone, Copy)]
struct RatioTerm {
    log_ref: f64,
    log_ratio: f64,
}

/// `q·φ(p/q)` evaluated from `ln q` and `t = ln(p/q)`.
fn weighted_phi(term: RatioTerm) -> f64 {
    let RatioTerm { log_ref, log_ratio } = term;
    if log_ratio > 1.0 {
        let p = (log_ref + log_ratio).exp();
        p * (log_ratio - 1.0) + log_ref.exp()
    } else {
        log_ref.exp() * phi_of_exp(log_ratio)
    }
}

fn kl_from_terms(terms: &[RatioTerm]) -> DivergenceResult {
    DivergenceResult {
        nats: compensated_sum(terms.iter().copied().map(weighted_phi)),
        support_size: terms.len(),
        terms_dropped: terms
            .iter()
            .filter(|t| t.log_ratio == f64::NEG_INFINITY)
            .count(),
    }
}

fn chi2_from_terms(terms: &[RatioTerm]) -> f64 {
    compensated_sum(terms.iter().map(|t| {
        let e = t.log_ratio.exp_m1();
        t.log_ref.exp() * e * e
    }))
}

/// Pairs the two tables point by point over the positive support of `q`.
fn table_terms<T: Clone + Eq + Hash + Debug>(
    p: &PmfTable<T>,
    q: &PmfTable<T>,
) -> Result<Vec<RatioTerm>> {
    let q_index: HashMap<&T, usize> = q
        .support()
        .iter()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    for (i, (x, &lp)) in p.support().iter().zip(p.log_mass()).enumerate() {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        let lq = q_index
            .get(x)
            .map_or(f64::NEG_INFINITY, |&j| q.log_mass()[j]);
        if lq == f64::NEG_INFINITY {
            return Err(Error::AbsoluteContinuityViolated { index: i });
        }
    }
    let p_index: HashMap<&T, usize> = p
        .support()
        .iter()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    Ok(q.support()
        .iter()
        .zip(q.log_mass())
        .filter(|(_, &lq)| lq > f64::NEG_INFINITY)
        .map(|(x, &lq)| {
            let lp = p_index
                .get(x)
                .map_or(f64::NEG_INFINITY, |&i| p.log_mass()[i]);
            RatioTerm {
                log_ref: lq,
                log_ratio: lp - lq,
            }
        })
        .collect())
}

/// `D(P‖Q) = Σ p ln(p/q) − p + q` for finite measures.
pub fn kl<T: Clone + Eq + Hash + Debug>(
    p: &PmfTable<T>,
    q: &PmfTable<T>,
) -> Result<DivergenceResult> {
    Ok(kl_from_terms(&table_terms(p, q)?))
}

/// `χ²(P, Q) = Σ (p/q − 1)² q`.
pub fn chi2<T: Clone + Eq + Hash + Debug>(p: &PmfTable<T>, q: &PmfTable<T>) -> Result<f64> {
    Ok(chi2_from_terms(&table_terms(p, q)?))
}

/// Terms of `hyp(N, K, n)` against `bin(n, K/N)` over the binomial support.
fn hyp_bin_terms(params: &HypParams) -> Vec<RatioTerm> {
    let big_n = params.population();
    let white = params.white();
    let black = big_n - white;
    let n = params.sample();
    let white_tab = ln_falling_ratio_table(white, n);
    let black_tab = ln_falling_ratio_table(black, n);
    let all = ln_falling_ratio_table(big_n, n)[n as usize];
    (0..=n)
        .map(|x| RatioTerm {
            log_ref: ln_bin_counts(n, white, big_n, x),
            log_ratio: white_tab[x as usize] + black_tab[(n - x) as usize] - all,
        })
        .filter(|t| t.log_ref > f64::NEG_INFINITY)
        .collect()
}

/// Exact `D(hyp(N, K, n) ‖ bin(n, K/N))`.
pub fn d_hyp_bin(params: &HypParams) -> DivergenceResult {
    kl_from_terms(&hyp_bin_terms(params))
}

/// Exact `χ²(hyp(N, K, n), bin(n, K/N))`.
pub fn chi2_hyp_bin(params: &HypParams) -> f64 {
    chi2_from_terms(&hyp_bin_terms(params))
}

/// Terms of the multivariate hypergeometric law against the multinomial with
/// `p_c = k_c/N`, over the multinomial support. Colors without balls are dropped.
fn multi_terms(params: &MultiHypParams, cap: SupportCap) -> Result<Vec<RatioTerm>> {
    let params = params.without_empty_colors();
    let n = params.sample();
    let colors = params.colors();
    let reference_caps = vec![n; colors];
    cap.check(count_compositions(n, &reference_caps))?;
    let tables: Vec<Vec<f64>> = params
        .counts()
        .iter()
        .map(|&k| ln_falling_ratio_table(k, n))
        .collect();
    let all = ln_falling_ratio_table(params.population(), n)[n as usize];
    let mut terms = Vec::new();
    visit_compositions(n, &reference_caps, |h| {
        let log_ratio = h
            .iter()
            .zip(&tables)
            .map(|(&hc, tab)| tab[hc as usize])
            .sum::<f64>()
            - all;
        terms.push(RatioTerm {
            log_ref: ln_multinomial_counts(n, params.counts(), h),
            log_ratio,
        });
    });
    Ok(terms)
}

/// Exact `D(U_n ‖ V_n)` between the multivariate hypergeometric and the
/// multinomial law with the same color fractions.
pub fn d_multihyp_multinomial(
    params: &MultiHypParams,
    cap: SupportCap,
) -> Result<DivergenceResult> {
    Ok(kl_from_terms(&multi_terms(params, cap)?))
}

/// Exact `χ²(U_n, V_n)`.
pub fn chi2_multihyp_multinomial(params: &MultiHypParams, cap: SupportCap) -> Result<f64> {
    Ok(chi2_from_terms(&multi_terms(params, cap)?))
}

/// Hypergeometric masses and log ratios against `Po(nK/N)` over the
/// hypergeometric support, or `None` when `λ = 0`.
fn hyp_poisson_terms(params: &HypParams) -> Option<Vec<(f64, f64)>> {
    let big_n = params.population();
    let white = params.white();
    let n = params.sample();
    if white == 0 || n == 0 {
        return None;
    }
    let lambda = params.mean();
    let draws_tab = ln_falling_ratio_table(n, n);
    let white_tab = ln_falling_ratio_table(white, n);
    let black_tab = ln_falling_ratio_table(big_n - white, n);
    let all = ln_falling_ratio_table(big_n, n)[n as usize];
    let ln_black_fraction = (-(white as f64) / big_n as f64).ln_1p();
    let table = params
        .enumerate_support(SupportCap(u128::MAX))
        .expect("univariate support is never capped");
    Some(
        table
            .support()
            .iter()
            .zip(table.log_mass())
            .map(|(&x, &lp)| {
                let rest = n - x;
                let mut log_ratio =
                    draws_tab[x as usize] + white_tab[x as usize] + black_tab[rest as usize] - all
                        + lambda;
                if rest > 0 {
                    log_ratio += rest as f64 * ln_black_fraction;
                }
                (lp, log_ratio)
            })
            .collect(),
    )
}

/// Exact `D(hyp(N, K, n) ‖ Po(nK/N))`.
///
/// Both laws are probability measures, so the divergence is `Σ p ln(p/q)`
/// over the finite hypergeometric support; the Poisson tail needs no truncation.
pub fn d_hyp_poisson(params: &HypParams) -> DivergenceResult {
    match hyp_poisson_terms(params) {
        None => DivergenceResult {
            nats: 0.0,
            support_size: 1,
            terms_dropped: 0,
        },
        Some(terms) => DivergenceResult {
            nats: compensated_sum(terms.iter().map(|&(lp, t)| lp.exp() * t)),
            support_size: terms.len(),
            terms_dropped: 0,
        },
    }
}

/// Exact `χ²(hyp(N, K, n), Po(nK/N)) = Σ p²/q − 1`.
pub fn chi2_hyp_poisson(params: &HypParams) -> f64 {
    match hyp_poisson_terms(params) {
        None => 0.0,
        Some(terms) => {
            let mut parts: Vec<f64> = terms.iter().map(|&(lp, t)| (lp + t).exp()).collect();
            parts.push(-1.0);
            compensated_sum(parts)
        }
    }
}

/// `I(X_j; X_{j+1} | X^{j−1})` for draws without replacement: the conditional
/// mutual information between two consecutive colors given the colors of the
/// first `j − 1` draws.
///
/// Valid for `1 ≤ j ≤ n − 1`.
pub fn conditional_mi_term(params: &MultiHypParams, step: u64) -> Result<f64> {
    conditional_mi_term_capped(params, step, SupportCap::default())
}

pub fn conditional_mi_term_capped(
    params: &MultiHypParams,
    step: u64,
    cap: SupportCap,
) -> Result<f64> {
    let n = params.sample();
    if step == 0 || step >= n {
        return Err(Error::InvalidStep { j: step, n });
    }
    let params = params.without_empty_colors();
    if params.colors() <= 1 {
        return Ok(0.0);
    }
    let drawn = step - 1;
    let prefix = MultiHypParams::new(params.counts().to_vec(), drawn)?;
    let table = prefix.enumerate_support(cap)?;
    // Balls left before draw j.
    let left = params.population() - drawn;
    let m = left as f64;
    let off_diagonal = phi_of_exp((1.0 / (m - 1.0)).ln_1p());
    let terms = table.iter().map(|(h, w)| {
        let remaining: Vec<f64> = params
            .counts()
            .iter()
            .zip(h)
            .map(|(&k, &hc)| (k - hc) as f64)
            .collect();
        let same_color_mass: f64 = remaining.iter().map(|r| r * r).sum::<f64>() / (m * m);
        let diagonal = remaining.iter().filter(|&&r| r > 0.0).map(|&r| {
            let t = ((r - m) / ((m - 1.0) * r)).ln_1p();
            r * r / (m * m) * phi_of_exp(t)
        });
        let inner = compensated_sum(
            diagonal.chain(std::iter::once((1.0 - same_color_mass) * off_diagonal)),
        );
        w * inner
    });
    Ok(compensated_sum(terms))
}

/// `D(U_n‖V_n) = Σ_{j=1}^{n−1} (n − j) I_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDecomposition {
    /// `I_j` for `j = 1..n−1`.
    pub terms: Vec<f64>,
    pub weighted_sum: f64,
}

pub fn chain_decompose(params: &MultiHypParams, cap: SupportCap) -> Result<ChainDecomposition> {
    let n = params.sample();
    let terms = (1..n)
        .map(|j| conditional_mi_term_capped(params, j, cap))
        .collect::<Result<Vec<_>>>()?;
    let weighted_sum = compensated_sum(
        terms
            .iter()
            .enumerate()
            .map(|(i, &t)| (n - 1 - i as u64) as f64 * t),
    );
    Ok(ChainDecomposition {
        terms,
        weighted_sum,
    })
}
