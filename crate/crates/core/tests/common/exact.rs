//! Exact rational masses and fixed-point logarithms, independent of the
//! floating-point code under test.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Fractional bits of the fixed-point representation.
const PRECISION: u32 = 200;

pub fn choose(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn int(v: u64) -> BigInt {
    BigInt::from(v)
}

pub fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Pr(X = x) for X ~ hyp(N, K, n).
pub fn hyp_mass(population: u64, white: u64, sample: u64, x: u64) -> BigRational {
    if x > sample || x > white || sample - x > population - white {
        return BigRational::zero();
    }
    ratio(
        choose(white, x) * choose(population - white, sample - x),
        choose(population, sample),
    )
}

/// bin(n, K/N; x).
pub fn bin_mass(population: u64, white: u64, sample: u64, x: u64) -> BigRational {
    let num = BigInt::from(choose(sample, x))
        * int(white).pow(x as u32)
        * int(population - white).pow((sample - x) as u32);
    BigRational::new(num, int(population).pow(sample as u32))
}

/// Multivariate hypergeometric mass of `h`.
pub fn multi_hyp_mass(counts: &[u64], h: &[u64]) -> BigRational {
    let population: u64 = counts.iter().sum();
    let sample: u64 = h.iter().sum();
    if h.iter().zip(counts).any(|(a, b)| a > b) {
        return BigRational::zero();
    }
    let num = counts
        .iter()
        .zip(h)
        .fold(BigUint::one(), |acc, (&k, &hc)| acc * choose(k, hc));
    ratio(num, choose(population, sample))
}

/// Multinomial mass of `h` with probabilities `k_c / N`.
pub fn multinomial_mass(counts: &[u64], h: &[u64]) -> BigRational {
    let population: u64 = counts.iter().sum();
    let sample: u64 = h.iter().sum();
    let mut coefficient = BigUint::one();
    let mut left = sample;
    for &hc in h {
        coefficient *= choose(left, hc);
        left -= hc;
    }
    let powers = counts
        .iter()
        .zip(h)
        .fold(BigInt::one(), |acc, (&k, &hc)| acc * int(k).pow(hc as u32));
    BigRational::new(
        BigInt::from(coefficient) * powers,
        int(population).pow(sample as u32),
    )
}

/// Compositions of `total` into `parts` non-negative parts.
pub fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Fixed-point `round(r · 2^PRECISION)` (truncated).
fn to_fixed(r: &BigRational) -> BigInt {
    (r.numer() << PRECISION).div_floor(r.denom())
}

/// `2·atanh(z)` in fixed point for a fixed-point `z` with `|z| ≤ 1/3`.
fn twice_atanh(z: &BigInt) -> BigInt {
    if z.is_negative() {
        return -twice_atanh(&-z);
    }
    let z2 = (z * z) >> PRECISION;
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / int(2 * k + 1);
        power = (&power * &z2) >> PRECISION;
        k += 1;
    }
    sum * 2
}

fn ln2_fixed() -> &'static BigInt {
    static LN2: OnceLock<BigInt> = OnceLock::new();
    LN2.get_or_init(|| {
        let third = to_fixed(&BigRational::new(BigInt::one(), int(3)));
        twice_atanh(&third)
    })
}

/// `ln r` in fixed point for a positive rational.
pub fn ln_fixed(r: &BigRational) -> BigInt {
    assert!(r.is_positive(), "logarithm of a non-positive value");
    // r = y · 2^e with y in [2/3, 4/3)
    let mut exponent: i64 = r.numer().bits() as i64 - r.denom().bits() as i64;
    let mut y = shift(r, -exponent);
    let two_thirds = BigRational::new(int(2), int(3));
    let four_thirds = BigRational::new(int(4), int(3));
    while y < two_thirds {
        y *= int(2);
        exponent -= 1;
    }
    while y >= four_thirds {
        y /= int(2);
        exponent += 1;
    }
    let one = BigRational::one();
    let z = (&y - &one) / (&y + &one);
    twice_atanh(&to_fixed(&z)) + ln2_fixed() * BigInt::from(exponent)
}

fn shift(r: &BigRational, by: i64) -> BigRational {
    if by >= 0 {
        BigRational::new(r.numer() << by as usize, r.denom().clone())
    } else {
        BigRational::new(r.numer().clone(), r.denom() << (-by) as usize)
    }
}

/// Weighted fixed-point value `w · v` for a rational weight.
fn weigh(w: &BigRational, v: &BigInt) -> BigInt {
    (w.numer() * v).div_floor(w.denom())
}

pub fn fixed_to_f64(v: &BigInt) -> f64 {
    // keep 64 significant bits before the final scaling
    let bits = v.bits() as i64;
    let drop = (bits - 64).max(0);
    let head = (v >> drop as usize).to_f64().unwrap();
    head * 2f64.powi((drop - PRECISION as i64) as i32)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    fixed_to_f64(&to_fixed(r))
}

/// `ln r` as a float, correct to far below double precision.
pub fn ln_f64(r: &BigRational) -> f64 {
    fixed_to_f64(&ln_fixed(r))
}

/// `Σ p ln(p/q) − p + q` over paired rational masses.
pub fn kl_pairs(pairs: &[(BigRational, BigRational)]) -> f64 {
    let mut acc = BigInt::zero();
    for (p, q) in pairs {
        if q.is_zero() {
            assert!(p.is_zero(), "absolute continuity violated in oracle input");
            continue;
        }
        if !p.is_zero() {
            acc += weigh(p, &ln_fixed(&(p / q)));
        }
        acc += to_fixed(&(q - p));
    }
    fixed_to_f64(&acc)
}

/// `Σ (p − q)²/q` over paired rational masses, exactly.
pub fn chi2_pairs(pairs: &[(BigRational, BigRational)]) -> f64 {
    let total =
        pairs
            .iter()
            .filter(|(_, q)| !q.is_zero())
            .fold(BigRational::zero(), |acc, (p, q)| {
                let d = p - q;
                acc + &d * &d / q
            });
    rational_to_f64(&total)
}

pub fn hyp_bin_pairs(population: u64, white: u64, sample: u64) -> Vec<(BigRational, BigRational)> {
    (0..=sample)
        .map(|x| {
            (
                hyp_mass(population, white, sample, x),
                bin_mass(population, white, sample, x),
            )
        })
        .collect()
}

pub fn d_hyp_bin(population: u64, white: u64, sample: u64) -> f64 {
    kl_pairs(&hyp_bin_pairs(population, white, sample))
}

pub fn d_multi(counts: &[u64], sample: u64) -> f64 {
    let pairs: Vec<_> = compositions(sample, counts.len())
        .into_iter()
        .map(|h| (multi_hyp_mass(counts, &h), multinomial_mass(counts, &h)))
        .collect();
    kl_pairs(&pairs)
}

/// `D(hyp(N, K, n) ‖ Po(nK/N)) = Σ p ln(p·x!/λ^x) + λ`.
pub fn d_hyp_poisson(population: u64, white: u64, sample: u64) -> f64 {
    if white == 0 || sample == 0 {
        return 0.0;
    }
    let lambda = BigRational::new(int(sample * white), int(population));
    let mut acc = to_fixed(&lambda);
    let mut factorial = BigInt::one();
    for x in 0..=sample {
        if x > 0 {
            factorial *= int(x);
        }
        let p = hyp_mass(population, white, sample, x);
        if p.is_zero() {
            continue;
        }
        let r = &p * BigRational::from(factorial.clone()) / lambda.pow(x as i32);
        acc += weigh(&p, &ln_fixed(&r));
    }
    fixed_to_f64(&acc)
}

/// Relative difference with an absolute floor.
pub fn rel_diff(value: f64, reference: f64, floor: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(floor)
}
