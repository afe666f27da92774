//! Low-level numerical kernels: compensated summation, Stirling-error based
//! log point masses (saddle-point form), and log falling-factorial ratios.
//!
//! The log masses follow the deviance/Stirling-error decomposition
//! `ln b(x; n, p) = δ(n) − δ(x) − δ(n−x) − bd0(x, np) − bd0(n−x, nq) − ½ln(2πx(n−x)/n)`
//! where `δ(m) = ln Γ(m+1) − [(m+½)ln m − m + ½ln 2π]`. The large terms of
//! `ln Γ` cancel analytically, so the result keeps close to full relative
//! precision even when `n` is in the millions.

use std::f64::consts::{LN_2, PI};

/// ln(2π)
pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// δ(m) for m = 0..=35, evaluated at 40 digits and rounded.
const STIRLERR_TABLE: [f64; 36] = [
    0.0,
    0.08106146679532726,
    0.0413406959554093,
    0.02767792568499834,
    0.020790672103765093,
    0.016644691189821193,
    0.013876128823070748,
    0.01189670994589177,
    0.010411265261972096,
    0.009255462182712733,
    0.00833056343336287,
    0.007573675487951841,
    0.00694284010720953,
    0.006408994188004207,
    0.0059513701127588475,
    0.005554733551962801,
    0.0052076559196096404,
    0.004901395948434738,
    0.004629153749334028,
    0.004385560249232324,
    0.004166319691996922,
    0.00396795421864086,
    0.0037876180684444346,
    0.0036229602246830948,
    0.003472021382978767,
    0.003333155636728093,
    0.003204970228055038,
    0.0030862786826087773,
    0.002976063983550409,
    0.0028734493623524663,
    0.0027776749297526936,
    0.002688078828531143,
    0.0026040819192516564,
    0.0025251752497567844,
    0.002450909735438118,
    0.002380887608234112,
];

/// Sum with Neumaier compensation after sorting addends by ascending magnitude.
///
/// Non-finite inputs propagate exactly as in a naive sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.iter().any(|x| !x.is_finite()) {
        return v.iter().sum();
    }
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut acc = NeumaierSum::default();
    for x in v {
        acc.add(x);
    }
    acc.value()
}

/// Running Neumaier (improved Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Stirling-series error δ(m) = ln m! − [(m+½)ln m − m + ½ln 2π].
pub fn stirlerr(m: u64) -> f64 {
    if (m as usize) < STIRLERR_TABLE.len() {
        return STIRLERR_TABLE[m as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let n = m as f64;
    let nn = n * n;
    if m > 500 {
        (S0 - S1 / nn) / n
    } else if m > 80 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if m > 50 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/m) + m − x`, evaluated by series when `x ≈ m`.
pub fn bd0(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        return m;
    }
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// ln of the binomial point mass `C(n,x) p^x q^(n−x)` with `q = 1 − p` supplied
/// separately so callers holding exact rationals avoid forming `1 − p`.
///
/// Returns −∞ for zero mass.
pub fn ln_binom_raw(x: u64, n: u64, p: f64, q: f64) -> f64 {
    if x > n {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if x == 0 {
        if n == 0 {
            return 0.0;
        }
        return if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
    }
    if x == n {
        return if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
    }
    let xf = x as f64;
    let yf = (n - x) as f64;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xf, nf * p) - bd0(yf, nf * q);
    let lf = LN_2PI + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

/// ln of the Poisson point mass `λ^x e^{−λ} / x!` for λ > 0.
pub fn ln_poisson_raw(x: u64, lambda: f64) -> f64 {
    if x == 0 {
        return -lambda;
    }
    let xf = x as f64;
    -stirlerr(x) - bd0(xf, lambda) - 0.5 * (2.0 * PI * xf).ln()
}

/// ln C(n, k); −∞ when k > n.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_binom_raw(k, n, 0.5, 0.5) + n as f64 * LN_2
}

/// Exact binomial coefficient when it fits in 128 bits.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// Table of `ln(base^{(m)} / base^m) = Σ_{i<m} ln(1 − i/base)` for m = 0..=upto.
///
/// Entries with m > base are −∞ (the falling factorial vanishes).
pub fn ln_falling_ratio_table(base: u64, upto: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(upto as usize + 1);
    let mut acc = NeumaierSum::default();
    out.push(0.0);
    let b = base as f64;
    for m in 1..=upto {
        if m > base {
            out.push(f64::NEG_INFINITY);
            continue;
        }
        let i = (m - 1) as f64;
        acc.add((-i / b).ln_1p());
        out.push(acc.value());
    }
    out
}

/// Compositions of `total` into `upper.len()` non-negative parts with
/// `part[c] ≤ upper[c]`, visited in lexicographic order.
pub fn visit_compositions<F: FnMut(&[u64])>(total: u64, upper: &[u64], mut f: F) {
    let c = upper.len();
    if c == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    // suffix capacity: max total the parts c.. can hold
    let mut cap = vec![0u64; c + 1];
    for i in (0..c).rev() {
        cap[i] = cap[i + 1].saturating_add(upper[i]);
    }
    if cap[0] < total {
        return;
    }
    let mut parts = vec![0u64; c];
    fill(0, total, upper, &cap, &mut parts, &mut f);

    fn fill<F: FnMut(&[u64])>(
        i: usize,
        remaining: u64,
        upper: &[u64],
        cap: &[u64],
        parts: &mut [u64],
        f: &mut F,
    ) {
        let c = upper.len();
        if i == c - 1 {
            if remaining <= upper[i] {
                parts[i] = remaining;
                f(parts);
            }
            return;
        }
        let lo = remaining.saturating_sub(cap[i + 1]);
        let hi = remaining.min(upper[i]);
        for v in lo..=hi {
            parts[i] = v;
            fill(i + 1, remaining - v, upper, cap, parts, f);
        }
    }
}

/// Number of compositions `visit_compositions` would produce (saturating).
pub fn count_compositions(total: u64, upper: &[u64]) -> u128 {
    let t = total as usize;
    let mut ways = vec![0u128; t + 1];
    ways[0] = 1;
    for &u in upper {
        let mut next = vec![0u128; t + 1];
        // sliding window over ways[s - u ..= s]
        let mut window: u128 = 0;
        for s in 0..=t {
            window = window.saturating_add(ways[s]);
            if s as u64 > u {
                window -= ways[s - u as usize - 1];
            }
            next[s] = window;
        }
        ways = next;
    }
    ways[t]
}
