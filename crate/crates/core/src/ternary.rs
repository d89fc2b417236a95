//! Base-3 digit expansions of points in `[0, 1]`.
//!
//! A point is addressed by its ternary digits `x = 0.ξ₁ξ₂… = Σ ξᵢ 3⁻ⁱ`.
//! Ternary rationals `k/3ⁱ` always use the terminating form (trailing zeros),
//! and `x = 1` is written with every digit equal to 2. The repeating form of
//! a ternary rational can still be built explicitly with
//! [`TernaryExpansion::from_digits`].

use num::bigint::BigInt;
use num::{BigRational, Integer, One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest level `i` for which `3^i` fits in a `u64`.
pub const MAX_RATIONAL_LEVEL: u32 = 40;

/// Levels searched when snapping a float onto a ternary rational.
const SNAP_MAX_LEVEL: u32 = 20;

/// Relative distance under which a float is read as the ternary rational `k/3^j`.
const SNAP_RELATIVE: f64 = 1.0 / (1u64 << 50) as f64;

pub(crate) fn pow3(i: u32) -> u64 {
    3u64.pow(i)
}

/// A finite prefix of a ternary digit sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryExpansion {
    digits: Vec<u8>,
    is_truncation: bool,
    source: Option<(u64, u32)>,
}

impl TernaryExpansion {
    /// Builds an expansion from raw digits.
    ///
    /// With `is_truncation == false` the digits are followed by an infinite
    /// run of zeros; otherwise they are only the prefix of a longer expansion.
    pub fn from_digits(digits: Vec<u8>, is_truncation: bool) -> Result<Self> {
        if let Some(pos) = digits.iter().position(|&d| d > 2) {
            return Err(Error::domain(format!(
                "digit {} at position {} is not a ternary digit",
                digits[pos],
                pos + 1
            )));
        }
        Ok(TernaryExpansion {
            digits,
            is_truncation,
            source: None,
        })
    }

    /// The first `n` digits of the periodic sequence `pattern pattern …`.
    pub fn periodic(pattern: &[u8], n: usize) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::domain("empty digit pattern"));
        }
        let digits = pattern.iter().copied().cycle().take(n).collect();
        Self::from_digits(digits, true)
    }

    /// `n` independent uniform digits drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let digits = (0..n).map(|_| rng.gen_range(0..3u8)).collect();
        TernaryExpansion {
            digits,
            is_truncation: true,
            source: None,
        }
    }

    /// Exact digits of a rational `r ∈ [0, 1]`, truncated to `n` places.
    pub fn from_rational(r: &BigRational, n: usize) -> Result<Self> {
        if r.is_negative() || *r > BigRational::one() {
            return Err(Error::domain(format!("{r} is outside [0, 1]")));
        }
        if r.is_one() {
            return Ok(Self::one(n));
        }
        let numer = r.numer().clone();
        let denom = r.denom().clone();
        let (digits, exhausted) = if denom.bits() <= 126 {
            // 3 * remainder stays below 2^128
            let mut rem = numer.to_u128().expect("numerator below denominator");
            let q = denom.to_u128().expect("checked bit length");
            let mut digits = Vec::with_capacity(n);
            for _ in 0..n {
                rem *= 3;
                digits.push((rem / q) as u8);
                rem %= q;
            }
            (digits, rem == 0)
        } else {
            let mut rem = numer;
            let mut digits = Vec::with_capacity(n);
            for _ in 0..n {
                rem *= 3;
                let (d, r) = rem.div_rem(&denom);
                digits.push(d.to_u8().expect("digit below 3"));
                rem = r;
            }
            (digits, rem.is_zero())
        };
        Ok(TernaryExpansion {
            digits,
            is_truncation: !exhausted,
            source: ternary_source(r),
        })
    }

    /// The expansion of 1: `n` twos, continued forever.
    fn one(n: usize) -> Self {
        TernaryExpansion {
            digits: vec![2; n],
            is_truncation: true,
            source: Some((1, 0)),
        }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// True when the stored digits are a proper prefix of the expansion.
    pub fn is_truncation(&self) -> bool {
        self.is_truncation
    }

    /// The exact ternary rational `(k, i)` meaning `k/3^i`, when known.
    pub fn source(&self) -> Option<(u64, u32)> {
        self.source
    }

    /// True when the expansion is known to denote exactly 1.
    pub fn is_one(&self) -> bool {
        matches!(self.source, Some((k, i)) if k == pow3(i))
    }

    /// Partial sum `Σ_{i≤n} ξᵢ 3⁻ⁱ` in floating point.
    pub fn value(&self) -> f64 {
        self.digits
            .iter()
            .rev()
            .fold(0.0, |acc, &d| (acc + f64::from(d)) / 3.0)
    }

    /// Partial sum `Σ_{i≤n} ξᵢ 3⁻ⁱ` as an exact rational.
    pub fn exact_value(&self) -> BigRational {
        let mut numer = BigInt::zero();
        let mut denom = BigInt::one();
        for &d in &self.digits {
            numer = numer * 3 + d;
            denom *= 3;
        }
        BigRational::new(numer, denom)
    }

    /// Upper bound on `|x − partial sum|` for the point this expansion denotes.
    pub fn truncation_bound(&self) -> f64 {
        if self.is_truncation {
            3f64.powi(-(self.digits.len() as i32))
        } else {
            0.0
        }
    }

    /// Running count of 1-digits: entry `m` is `i(m)`, with `i(0) = 0`.
    pub fn ones_prefix_counts(&self) -> Vec<usize> {
        let mut counts = Vec::with_capacity(self.digits.len() + 1);
        counts.push(0);
        let mut ones = 0;
        for &d in &self.digits {
            ones += usize::from(d == 1);
            counts.push(ones);
        }
        counts
    }
}

/// `Some((k, i))` when `r = k/3^i` with `i` small enough to store.
fn ternary_source(r: &BigRational) -> Option<(u64, u32)> {
    let mut denom = r.denom().clone();
    let mut level = 0u32;
    let three = BigInt::from(3);
    while !denom.is_one() {
        let (q, rem) = denom.div_rem(&three);
        if !rem.is_zero() || level == MAX_RATIONAL_LEVEL {
            return None;
        }
        denom = q;
        level += 1;
    }
    r.numer().to_u64().map(|k| (k, level))
}

/// The terminating expansion of `k/3^i`.
///
/// Digits are the base-3 representation of `k` padded to `i` places;
/// `k = 3^i` yields the all-2s expansion of 1.
pub fn ternary_rational(k: u64, i: u32) -> Result<TernaryExpansion> {
    if i > MAX_RATIONAL_LEVEL {
        return Err(Error::domain(format!(
            "level {i} exceeds the supported maximum {MAX_RATIONAL_LEVEL}"
        )));
    }
    let full = pow3(i);
    if k > full {
        return Err(Error::domain(format!("k = {k} exceeds 3^{i} = {full}")));
    }
    if k == full {
        let mut one = TernaryExpansion::one(i.max(1) as usize);
        one.source = Some((k, i));
        return Ok(one);
    }
    let mut digits = vec![0u8; i as usize];
    let mut rest = k;
    for slot in digits.iter_mut().rev() {
        *slot = (rest % 3) as u8;
        rest /= 3;
    }
    Ok(TernaryExpansion {
        digits,
        is_truncation: false,
        source: Some((k, i)),
    })
}

/// The first `n` ternary digits of a float `x ∈ [0, 1]`.
///
/// Floats within a few ulps of a ternary rational `k/3^j` (with `j ≤ 20`) are
/// read as that rational and get its terminating expansion. Every other float
/// is expanded exactly from its binary value, so the reconstruction error is
/// at most `3^-n`.
pub fn to_ternary(x: f64, n: usize) -> Result<TernaryExpansion> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x = {x} is outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::domain("digit count must be at least 1"));
    }
    if x == 1.0 {
        return Ok(TernaryExpansion::one(n));
    }
    if let Some((k, j)) = snap_ternary(x) {
        if k == pow3(j) {
            return Ok(TernaryExpansion::one(n));
        }
        let mut e = ternary_rational(k, j)?;
        e.is_truncation = e.digits.len() > n;
        e.digits.resize(n, 0);
        return Ok(e);
    }
    let r = BigRational::from_float(x).expect("finite float");
    TernaryExpansion::from_rational(&r, n)
}

fn snap_ternary(x: f64) -> Option<(u64, u32)> {
    (0..=SNAP_MAX_LEVEL).find_map(|j| {
        let scaled = x * pow3(j) as f64;
        let k = scaled.round();
        let tol = SNAP_RELATIVE * scaled.max(f64::MIN_POSITIVE);
        ((scaled - k).abs() <= tol).then_some((k as u64, j))
    })
}

/// Counts of the digit 1 within a prefix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DigitStats {
    /// Prefix length.
    pub n: usize,
    /// Number of 1-digits among the first `n`, written `i(n)`.
    pub ones_count: usize,
    /// `i(n) / n`.
    pub ratio: f64,
    /// Finite stand-in for `liminf i(m)/m`: the minimum ratio over `m ∈ [⌈n/2⌉, n]`.
    pub gamma_estimate: f64,
}

pub fn digit_stats(e: &TernaryExpansion, n: usize) -> Result<DigitStats> {
    if n == 0 {
        return Err(Error::domain("prefix length must be at least 1"));
    }
    if n > e.len() {
        return Err(Error::domain(format!(
            "prefix length {n} exceeds the {} available digits",
            e.len()
        )));
    }
    let counts = e.ones_prefix_counts();
    Ok(stats_from_counts(&counts, n))
}

/// Stats for prefix `n` given running counts `counts[m] = i(m)`.
pub(crate) fn stats_from_counts(counts: &[usize], n: usize) -> DigitStats {
    let ratio_at = |m: usize| counts[m] as f64 / m as f64;
    let gamma_estimate = (n.div_ceil(2).max(1)..=n)
        .map(ratio_at)
        .fold(f64::INFINITY, f64::min);
    DigitStats {
        n,
        ones_count: counts[n],
        ratio: ratio_at(n),
        gamma_estimate,
    }
}
