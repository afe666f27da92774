//! The convex function `φ(x) = x ln x − (x − 1)` (with `φ(0) = 1`) and its
//! Taylor brackets around `x = 1`.
//!
//! With `Δ = x − 1`, for every `x ≥ 0`:
//!
//! ```text
//! 0 ≤ φ(x)
//! φ(x) ≤ Δ²
//! φ(x) ≥ ½Δ² − ⅙Δ³
//! φ(x) ≤ ½Δ² − ⅙Δ³ + ⅓Δ⁴
//! ```
//!
//! and for `x ≥ 1` the sharper `φ(x) ≤ ½Δ² − ⅙Δ³ + (1/12)Δ⁴`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Below this distance from 1, φ is evaluated from its Taylor series.
const SERIES_RADIUS: f64 = 1e-4;

/// φ(x) = x ln x − (x − 1), with φ(0) = 1.
pub fn phi(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeInput(x));
    }
    Ok(phi_unchecked(x))
}

pub(crate) fn phi_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let d = x - 1.0;
    if d.abs() < SERIES_RADIUS {
        let d2 = d * d;
        d2 * (0.5 - d / 6.0 + d2 / 12.0 - d2 * d / 20.0)
    } else {
        x * x.ln() - d
    }
}

/// `φ(eᵗ) = t·eᵗ − (eᵗ − 1)`, accurate for the log-ratio argument `t`
/// including `t = −∞` (where it equals 1).
pub fn phi_of_exp(t: f64) -> f64 {
    if t == f64::NEG_INFINITY {
        return 1.0;
    }
    if t.abs() < 0.1 {
        // Σ_{k≥2} (k−1) tᵏ / k!
        let mut term = t; // tᵏ/k! at k = 1
        let mut sum = 0.0;
        for k in 2..30u32 {
            term *= t / k as f64;
            let add = (k - 1) as f64 * term;
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    t * t.exp() - t.exp_m1()
}

/// φ together with the three Taylor brackets at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiEval {
    pub x: f64,
    pub phi: f64,
    /// ½Δ² − ⅙Δ³
    pub taylor3_lower: f64,
    /// ½Δ² − ⅙Δ³ + ⅓Δ⁴
    pub taylor4_upper: f64,
    /// Δ²
    pub chi_upper: f64,
}

impl PhiEval {
    /// Smallest of the four slacks `φ`, `Δ² − φ`, `φ − T₃`, `T₄ − φ`.
    pub fn min_slack(&self) -> f64 {
        [
            self.phi,
            self.chi_upper - self.phi,
            self.phi - self.taylor3_lower,
            self.taylor4_upper - self.phi,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    /// `Δ² − φ`, the function whose non-negativity gives the χ² bound.
    pub fn chi_gap(&self) -> f64 {
        self.chi_upper - self.phi
    }
}

pub fn phi_sandwich(x: f64) -> Result<PhiEval> {
    let phi = phi(x)?;
    let d = x - 1.0;
    let d2 = d * d;
    let taylor3_lower = 0.5 * d2 - d2 * d / 6.0;
    Ok(PhiEval {
        x,
        phi,
        taylor3_lower,
        taylor4_upper: taylor3_lower + d2 * d2 / 3.0,
        chi_upper: d2,
    })
}

/// One-sided order-4 bracket `½Δ² − ⅙Δ³ + (1/12)Δ⁴`, an upper bound for φ on `x ≥ 1`.
pub fn taylor4_upper_right(x: f64) -> f64 {
    let d = x - 1.0;
    let d2 = d * d;
    0.5 * d2 - d2 * d / 6.0 + d2 * d2 / 12.0
}

/// Derivative of φ of the given order (0..=5).
pub fn phi_derivatives(x: f64, order: u32) -> Result<f64> {
    match order {
        0 => phi(x),
        _ if x.is_nan() || x < 0.0 => Err(Error::NegativeInput(x)),
        1 if x == 0.0 => Ok(f64::NEG_INFINITY),
        1 => Ok(x.ln()),
        2..=5 if x <= 0.0 => Err(Error::NonpositiveInput(x)),
        2 => Ok(1.0 / x),
        3 => Ok(-1.0 / (x * x)),
        4 => Ok(2.0 / (x * x * x)),
        5 => Ok(-6.0 / (x * x * x * x)),
        _ => Err(Error::InvalidParams(format!(
            "derivative order {order} outside 0..=5"
        ))),
    }
}
