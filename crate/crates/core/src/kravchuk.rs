//! Kravchuk polynomials, orthogonal with respect to `bin(n, p)`:
//!
//! ```text
//! 𝒦_k(x; n) = Σ_j (−1)^j (p/(1−p))^(k−j) C(x, j) C(n−x, k−j)
//! ```
//!
//! and the normalized order-2 polynomial `𝒦̃₂ = 𝒦₂ / ((p/(1−p))² C(n,2))^½`,
//! which has zero mean and unit variance under the binomial law.

use serde::{Deserialize, Serialize};

use crate::distributions::{HypParams, PmfTable};
use crate::numerics::{binomial_exact, compensated_sum, ln_binom_raw, ln_choose};
use crate::{Error, Result};

/// Trial count and success probability of the reference binomial law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KravchukContext {
    n: u64,
    p: f64,
}

impl KravchukContext {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("Kravchuk context needs n ≥ 1".into()));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParams(format!(
                "Kravchuk context needs 0 < p < 1, got {p}"
            )));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// True when `np` is an integer (up to rounding of `p`).
    pub fn has_integer_mean(&self) -> bool {
        let np = self.n as f64 * self.p;
        (np - np.round()).abs() < 1e-9
    }

    /// Binomial masses `bin(n, p; x)` for `x = 0..=n`.
    pub fn binomial_masses(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|x| ln_binom_raw(x, self.n, self.p, self.q()).exp())
            .collect()
    }

    fn require_order_two(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidOrder {
                order: 2,
                n: self.n,
            });
        }
        Ok(())
    }

    /// `((p/(1−p))² C(n,2))^½`
    fn order_two_norm(&self) -> f64 {
        let nf = self.n as f64;
        self.p / self.q() * (nf * (nf - 1.0) / 2.0).sqrt()
    }
}

fn choose_f64(n: u64, k: u64) -> f64 {
    match binomial_exact(n, k) {
        Some(v) => v as f64,
        None => ln_choose(n, k).exp(),
    }
}

/// 𝒦_k(x; n) from its defining alternating sum.
pub fn kravchuk(ctx: &KravchukContext, order: u64, x: u64) -> Result<f64> {
    if order > ctx.n {
        return Err(Error::InvalidOrder { order, n: ctx.n });
    }
    if x > ctx.n {
        return Err(Error::OutOfSupport {
            outcome: x.to_string(),
            support: format!("0..={}", ctx.n),
        });
    }
    let ratio = ctx.p / ctx.q();
    let terms = (0..=order).map(|j| {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sign * ratio.powi((order - j) as i32) * choose_f64(x, j) * choose_f64(ctx.n - x, order - j)
    });
    Ok(compensated_sum(terms))
}

/// `Σ_x bin(n,p;x) 𝒦_r(x) 𝒦_s(x)`; equals `(p/(1−p))^r C(n,r)` when `r = s`
/// and 0 otherwise.
pub fn kravchuk_orthogonality(ctx: &KravchukContext, r: u64, s: u64) -> Result<f64> {
    let masses = ctx.binomial_masses();
    let mut terms = Vec::with_capacity(masses.len());
    for (x, w) in masses.iter().enumerate() {
        let x = x as u64;
        terms.push(w * kravchuk(ctx, r, x)? * kravchuk(ctx, s, x)?);
    }
    Ok(compensated_sum(terms))
}

/// Right-hand side of the orthogonality relation for `r = s`.
pub fn kravchuk_norm_squared(ctx: &KravchukContext, r: u64) -> f64 {
    (ctx.p / ctx.q()).powi(r as i32) * choose_f64(ctx.n, r)
}

/// 𝒦̃₂ at a real point, from the expanded form
/// `((2p−1)(x−np) + (x−np)² − np(1−p)) / (2p(1−p)·(n(n−1)/2)^½)`.
pub fn kravchuk2_normalized(ctx: &KravchukContext, x: f64) -> Result<f64> {
    ctx.require_order_two()?;
    let nf = ctx.n as f64;
    let (p, q) = (ctx.p, ctx.q());
    let d = x - nf * p;
    let numerator = (2.0 * p - 1.0) * d + d * d - nf * p * q;
    Ok(numerator / (2.0 * p * q * (nf * (nf - 1.0) / 2.0).sqrt()))
}

/// 𝒦̃₂ at an integer point via the defining sum of 𝒦₂.
pub fn kravchuk2_normalized_at(ctx: &KravchukContext, x: u64) -> Result<f64> {
    ctx.require_order_two()?;
    Ok(kravchuk(ctx, 2, x)? / ctx.order_two_norm())
}

/// Values of 𝒦̃₂ at `x = 0..=n`.
pub fn kravchuk2_values(ctx: &KravchukContext) -> Result<Vec<f64>> {
    (0..=ctx.n)
        .map(|x| kravchuk2_normalized_at(ctx, x))
        .collect()
}

/// Minimum of 𝒦̃₂ over the reals and over `0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kravchuk2Min {
    /// `−((½−p)²/(np(1−p)) + 1) / (2(n−1)/n)^½`, attained at `x = (n−1)p + ½`.
    pub continuous_min: f64,
    pub integer_min: f64,
    /// Smallest integer minimizer.
    pub argmin_integer: u64,
}

pub fn kravchuk2_min(ctx: &KravchukContext) -> Result<Kravchuk2Min> {
    ctx.require_order_two()?;
    let nf = ctx.n as f64;
    let (p, q) = (ctx.p, ctx.q());
    let offset = 0.5 - p;
    let continuous_min = -(offset * offset / (nf * p * q) + 1.0) / (2.0 * (nf - 1.0) / nf).sqrt();
    let values = kravchuk2_values(ctx)?;
    let (argmin, integer_min) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold((0usize, f64::INFINITY), |best, (x, v)| {
                if v < best.1 {
                    (x, v)
                } else {
                    best
                }
            });
    Ok(Kravchuk2Min {
        continuous_min,
        integer_min,
        argmin_integer: argmin as u64,
    })
}

/// Context `(n, K/N)` of the binomial law matched to a hypergeometric law.
pub fn matched_context(params: &HypParams) -> Result<KravchukContext> {
    if params.white() == 0 || params.white() == params.population() {
        return Err(Error::InvalidParams(format!(
            "need 0 < K < N for a Kravchuk context, got K = {} and N = {}",
            params.white(),
            params.population()
        )));
    }
    KravchukContext::new(params.sample(), params.p())
}

/// `E[𝒦̃₂(X; n)]` for `X ~ hyp(N, K, n)`, with `p = K/N`:
/// `−(n(n−1))^½ / (2^½ (N−1))`.
pub fn kravchuk2_expect_hyp(params: &HypParams) -> Result<f64> {
    let n = params.sample();
    if n < 2 {
        return Err(Error::InvalidParams(format!("need n ≥ 2, got n = {n}")));
    }
    matched_context(params)?;
    let nf = n as f64;
    let big_n = params.population() as f64;
    Ok(-(nf * (nf - 1.0)).sqrt() / (std::f64::consts::SQRT_2 * (big_n - 1.0)))
}

/// `E_P[𝒦̃₂]` for a measure on `0..=n`.
pub fn kravchuk2_expect(pmf: &PmfTable<u64>, ctx: &KravchukContext) -> Result<f64> {
    let values = kravchuk2_values(ctx)?;
    if let Some(x) = pmf.support().iter().find(|&&x| x > ctx.n) {
        return Err(Error::OutOfSupport {
            outcome: x.to_string(),
            support: format!("0..={}", ctx.n),
        });
    }
    Ok(pmf.expect(|&x| values[x as usize]))
}

/// `E[(2(1−p)²𝒦₂(X))³]` for `X ~ bin(n, p)`:
/// `4n(n−1)p²(1−p)²(1 + 2(n−4)p(1−p))`.
///
/// Positive except at `n = 2, p = ½`, where it vanishes.
pub fn kravchuk2_third_moment(ctx: &KravchukContext) -> Result<f64> {
    ctx.require_order_two()?;
    let nf = ctx.n as f64;
    let pq = ctx.p * ctx.q();
    Ok(4.0 * nf * (nf - 1.0) * pq * pq * (1.0 + 2.0 * (nf - 4.0) * pq))
}

/// `E[(2(1−p)²𝒦₂(X))³]` by summation over the binomial support.
pub fn kravchuk2_third_moment_by_enumeration(ctx: &KravchukContext) -> Result<f64> {
    ctx.require_order_two()?;
    let scale = 2.0 * ctx.q() * ctx.q();
    let masses = ctx.binomial_masses();
    let mut terms = Vec::with_capacity(masses.len());
    for (x, w) in masses.iter().enumerate() {
        let v = scale * kravchuk(ctx, 2, x as u64)?;
        terms.push(w * v * v * v);
    }
    Ok(compensated_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{EnumerateSupport, SupportCap};

    fn ctx(n: u64, p: f64) -> KravchukContext {
        KravchukContext::new(n, p).unwrap()
    }

    #[test]
    fn low_order_examples() {
        assert_eq!(kravchuk(&ctx(5, 0.3), 0, 2).unwrap(), 1.0);
        assert!((kravchuk(&ctx(2, 0.5), 1, 2).unwrap() + 2.0).abs() < 1e-15);
        assert!((kravchuk(&ctx(2, 0.5), 2, 1).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            kravchuk(&ctx(2, 0.5), 3, 1),
            Err(Error::InvalidOrder { order: 3, n: 2 })
        ));
    }

    #[test]
    fn first_polynomials_match_closed_forms() {
        for n in 1..10u64 {
            for &p in &[0.1, 0.35, 0.5, 0.8] {
                let c = ctx(n, p);
                let q = 1.0 - p;
                let np = n as f64 * p;
                for x in 0..=n {
                    let d = x as f64 - np;
                    let k1 = (np - x as f64) / q;
                    assert!((kravchuk(&c, 1, x).unwrap() - k1).abs() < 1e-12);
                    if n >= 2 {
                        let k2 = ((2.0 * p - 1.0) * d + d * d - np * q) / (2.0 * q * q);
                        assert!((kravchuk(&c, 2, x).unwrap() - k2).abs() < 1e-11);
                        let a = kravchuk2_normalized(&c, x as f64).unwrap();
                        let b = kravchuk2_normalized_at(&c, x).unwrap();
                        assert!((a - b).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_examples() {
        assert!((kravchuk_orthogonality(&ctx(2, 0.5), 1, 1).unwrap() - 2.0).abs() < 1e-14);
        assert!(kravchuk_orthogonality(&ctx(2, 0.5), 0, 1).unwrap().abs() < 1e-14);
        let expected = (0.3f64 / 0.7).powi(2) * 3.0;
        let got = kravchuk_orthogonality(&ctx(3, 0.3), 2, 2).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected);
        assert!((kravchuk_norm_squared(&ctx(3, 0.3), 2) - expected).abs() < 1e-15);
    }

    #[test]
    fn normalized_examples() {
        assert!((kravchuk2_normalized(&ctx(2, 0.5), 1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            kravchuk2_normalized(&ctx(1, 0.5), 0.0),
            Err(Error::InvalidOrder { .. })
        ));
        let c = ctx(101, 0.5);
        let m = kravchuk2_min(&c).unwrap();
        let at_stationary = kravchuk2_normalized(&c, 50.5).unwrap();
        assert!((m.continuous_min - at_stationary).abs() < 1e-14);
    }

    #[test]
    fn min_examples() {
        let m = kravchuk2_min(&ctx(2, 0.5)).unwrap();
        assert!((m.integer_min + 1.0).abs() < 1e-15);
        assert_eq!(m.argmin_integer, 1);
        for n in 2..30u64 {
            let nf = n as f64;
            let m = kravchuk2_min(&ctx(n, 0.5)).unwrap();
            assert!((m.continuous_min + 1.0 / (2.0 * (nf - 1.0) / nf).sqrt()).abs() < 1e-14);
        }
        assert_eq!(kravchuk2_min(&ctx(4, 0.25)).unwrap().argmin_integer, 1);
    }

    #[test]
    fn integer_mean_minimum_is_at_np() {
        for n in 2..=20u64 {
            for k in 1..n {
                let c = ctx(n, k as f64 / n as f64);
                let m = kravchuk2_min(&c).unwrap();
                let nf = n as f64;
                assert_eq!(m.argmin_integer, k);
                assert!((m.integer_min + 1.0 / (2.0 * (nf - 1.0) / nf).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hypergeometric_expectation_examples() {
        for k in 1..=2 {
            let p = HypParams::new(3, k, 2).unwrap();
            assert!((kravchuk2_expect_hyp(&p).unwrap() + 0.5).abs() < 1e-15);
        }
        let p = HypParams::new(200, 100, 101).unwrap();
        let closed = kravchuk2_expect_hyp(&p).unwrap();
        assert!((closed + (101.0f64 * 100.0).sqrt() / (2f64.sqrt() * 199.0)).abs() < 1e-15);
        let table = p.enumerate_support(SupportCap::default()).unwrap();
        let by_sum = kravchuk2_expect(&table, &matched_context(&p).unwrap()).unwrap();
        assert!((closed - by_sum).abs() < 1e-9);
        assert!(kravchuk2_expect_hyp(&HypParams::new(5, 2, 1).unwrap()).is_err());
        assert!(kravchuk2_expect_hyp(&HypParams::new(5, 0, 3).unwrap()).is_err());
    }

    #[test]
    fn third_moment_examples() {
        assert_eq!(kravchuk2_third_moment(&ctx(2, 0.5)).unwrap(), 0.0);
        assert!(kravchuk2_third_moment(&ctx(3, 0.5)).unwrap() > 0.0);
        let c = ctx(5, 0.3);
        let closed = kravchuk2_third_moment(&c).unwrap();
        let summed = kravchuk2_third_moment_by_enumeration(&c).unwrap();
        assert!((closed - summed).abs() < 1e-12 * closed.abs());
    }

    #[test]
    fn third_moment_two_trials_form() {
        for &p in &[0.1, 0.3, 0.5, 0.7] {
            let pq: f64 = p * (1.0 - p);
            let expected = 4.0 / 7.0 * pq * pq * (14.0 - 56.0 * pq);
            assert!((kravchuk2_third_moment(&ctx(2, p)).unwrap() - expected).abs() < 1e-15);
        }
    }
}
