//! Where `F_a` has a derivative, and what it is.
//!
//! At a point with ternary digits `ξ₁ξ₂…` the slope of `f_n` on the piece
//! containing `x` is
//!
//! ```text
//! D_n = (3 − 6a)^{i(n)} · (3a)^{n − i(n)}
//! ```
//!
//! where `i(n)` counts the 1-digits. With `γ = liminf i(n)/n` the magnitude
//! behaves like `r(a, γ)^n` with `r = 3·|1−2a|^γ·a^{1−γ}`. Almost every `x`
//! has `γ = 1/3`, where `r³ = |27a² − 54a³|`; the cubic crosses −1 at the
//! critical value `a₀ ≈ 0.5592`.

use std::fmt;
use std::sync::OnceLock;

use num::rational::Ratio;
use num::{BigRational, One, Signed};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::param::{Mode, Parameter, Scalar, SPECIAL_VALUE_TOLERANCE};
use crate::rng;
use crate::ternary::{pow3, stats_from_counts, DigitStats, TernaryExpansion};

/// `r` within this distance of 1 counts as unit magnitude.
pub const UNIT_RATE_TOLERANCE: f64 = 1e-12;

/// Float parameters within this distance of `a₀` are classified as `a₀`.
pub const CRITICAL_VALUE_TOLERANCE: f64 = 1e-14;

/// Largest level accepted by [`nondiff_points`].
pub const MAX_POINT_LEVEL: u32 = 16;

/// Slope products `D_1..D_n` along one digit sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTrace {
    a: Parameter,
    digits: TernaryExpansion,
    values: Vec<f64>,
    ones: Vec<usize>,
    saturated: bool,
}

impl DerivativeTrace {
    pub fn parameter(&self) -> &Parameter {
        &self.a
    }

    pub fn digits(&self) -> &TernaryExpansion {
        &self.digits
    }

    /// `D_1..D_n`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `D_m` for `0 ≤ m ≤ n`, with `D_0 = 1`.
    pub fn value(&self, m: usize) -> f64 {
        if m == 0 {
            1.0
        } else {
            self.values[m - 1]
        }
    }

    pub fn last(&self) -> f64 {
        self.value(self.values.len())
    }

    /// Digit statistics of the first `m` digits.
    pub fn stats(&self, m: usize) -> Result<DigitStats> {
        if m == 0 || m > self.values.len() {
            return Err(Error::domain(format!(
                "prefix {m} outside 1..={}",
                self.values.len()
            )));
        }
        Ok(stats_from_counts(&self.ones, m))
    }

    /// `max_m |D_m|`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Smallest `m` with `|D_m| > threshold`.
    pub fn first_exceeding(&self, threshold: f64) -> Option<usize> {
        self.values
            .iter()
            .position(|v| v.abs() > threshold)
            .map(|idx| idx + 1)
    }

    /// True if some product overflowed to an infinity.
    pub fn saturated(&self) -> bool {
        self.saturated
    }
}

/// Builds `D_1..D_n` by `D_m = D_{m−1}·(3−6a)` on a 1-digit and `D_{m−1}·(3a)`
/// otherwise.
///
/// Overflow saturates to a signed infinity and sets [`DerivativeTrace::saturated`];
/// a zero factor always yields an exact zero.
pub fn derivative_trace(a: &Parameter, x: &TernaryExpansion, n: usize) -> Result<DerivativeTrace> {
    if n == 0 {
        return Err(Error::domain("trace length must be at least 1"));
    }
    if x.len() < n {
        return Err(Error::domain(format!(
            "trace length {n} exceeds the {} available digits",
            x.len()
        )));
    }
    let av = a.value();
    let on_one = 3.0 - 6.0 * av;
    let otherwise = 3.0 * av;
    let mut values = Vec::with_capacity(n);
    let mut current = 1.0f64;
    let mut saturated = false;
    for &d in &x.digits()[..n] {
        let factor = if d == 1 { on_one } else { otherwise };
        current = if factor == 0.0 { 0.0 } else { current * factor };
        saturated |= current.is_infinite();
        values.push(current);
    }
    let mut ones = x.ones_prefix_counts();
    ones.truncate(n + 1);
    Ok(DerivativeTrace {
        a: a.clone(),
        digits: x.clone(),
        values,
        ones,
        saturated,
    })
}

/// Fate of `D_n` along digit sequences with a given 1-frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitClass {
    Zero,
    DivergesInMagnitude,
    ConstantOne,
    /// `r = 1` away from `a = 1/3`: the magnitude does not settle under the
    /// generic-digit model. Only `γ = 1/3` at `a₀` is backed by a theorem.
    OscillatesOnUnitMagnitude,
}

impl fmt::Display for LimitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitClass::Zero => "zero",
            LimitClass::DivergesInMagnitude => "diverges-in-magnitude",
            LimitClass::ConstantOne => "constant-one",
            LimitClass::OscillatesOnUnitMagnitude => "oscillates-on-unit-magnitude",
        })
    }
}

/// `r(a, γ) = 3·|1−2a|^γ·a^{1−γ}`, with `0^0 = 1`.
pub fn growth_rate(a: f64, gamma: f64) -> f64 {
    3.0 * (1.0 - 2.0 * a).abs().powf(gamma) * a.powf(1.0 - gamma)
}

/// `27a² − 54a³`, the per-digit growth cubed when `γ = 1/3`.
pub fn cubic_criterion<T: Scalar>(a: &T) -> T {
    let a2 = a.clone() * a.clone();
    T::from_ratio(27, 1) * a2.clone() - T::from_ratio(54, 1) * a2 * a.clone()
}

pub fn classify_limit(a: &Parameter, gamma: f64) -> Result<LimitClass> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!("gamma = {gamma} outside [0, 1]")));
    }
    if a.is_one_third() {
        return Ok(LimitClass::ConstantOne);
    }
    // Exact rationals at γ = 1/3 compare |27a² − 54a³| with 1 without rounding.
    if a.mode() == Mode::Exact && gamma == 1.0 / 3.0 {
        let cubic = cubic_criterion(a.exact()).abs();
        return Ok(match cubic.cmp(&BigRational::one()) {
            std::cmp::Ordering::Less => LimitClass::Zero,
            std::cmp::Ordering::Greater => LimitClass::DivergesInMagnitude,
            std::cmp::Ordering::Equal => LimitClass::OscillatesOnUnitMagnitude,
        });
    }
    let r = growth_rate(a.value(), gamma);
    Ok(if (r - 1.0).abs() <= UNIT_RATE_TOLERANCE {
        LimitClass::OscillatesOnUnitMagnitude
    } else if r < 1.0 {
        LimitClass::Zero
    } else {
        LimitClass::DivergesInMagnitude
    })
}

/// `a₀` with its bisection bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    pub value: f64,
    /// `|54a₀³ − 27a₀² − 1|`.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: u32,
}

fn critical_cubic(a: f64) -> f64 {
    ((54.0 * a - 27.0) * a) * a - 1.0
}

/// Bisects `g(a) = 54a³ − 27a² − 1` on `[1/2, 2/3]` until the bracket is no
/// wider than `tol`. `g(1/2) = −1` and `g(2/3) = 3`, and `g` is increasing there.
pub fn find_a0(tol: f64) -> Result<CriticalValue> {
    let resolution = f64::EPSILON / 2.0;
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    if tol < resolution {
        return Err(Error::Precision {
            message: format!("tolerance {tol:e} is below double-precision resolution near a0"),
            achievable: resolution,
        });
    }
    let (mut lo, mut hi) = (0.5f64, 2.0 / 3.0);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if critical_cubic(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let value = lo + (hi - lo) / 2.0;
    Ok(CriticalValue {
        value,
        residual: critical_cubic(value).abs(),
        bracket: (lo, hi),
        iterations,
    })
}

/// `a₀` to full double precision.
pub fn a0() -> f64 {
    static A0: OnceLock<f64> = OnceLock::new();
    *A0.get_or_init(|| find_a0(f64::EPSILON).expect("valid tolerance").value)
}

/// Differentiability regions of the parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// `a = 1/3`: `F_a(x) = x`.
    Identity,
    /// `a = 1/2`: the Cantor function.
    Cantor,
    /// `a ∈ (0, 1/3) ∪ (1/3, a₀)`, `a ≠ 1/2`.
    AeDifferentiable,
    /// `a ∈ [a₀, 2/3)`.
    AeNondifferentiable,
    /// `a ∈ [2/3, 1)`.
    NowhereDifferentiable,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::Identity => "identity",
            Region::Cantor => "cantor",
            Region::AeDifferentiable => "ae-differentiable",
            Region::AeNondifferentiable => "ae-nondifferentiable",
            Region::NowhereDifferentiable => "nowhere-differentiable",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Region::Identity => "identity function",
            Region::Cantor => "Cantor function",
            Region::AeDifferentiable => "differentiable almost everywhere",
            Region::AeNondifferentiable => "differentiable almost nowhere",
            Region::NowhereDifferentiable => "nowhere differentiable",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Behaviour of `F_a'` on a set of full measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FirstDerivative {
    OneEverywhere,
    ZeroAlmostEverywhere,
    DivergesAlmostEverywhere,
    DivergesEverywhere,
}

impl FirstDerivative {
    pub fn label(&self) -> &'static str {
        match self {
            FirstDerivative::OneEverywhere => "one-everywhere",
            FirstDerivative::ZeroAlmostEverywhere => "zero-almost-everywhere",
            FirstDerivative::DivergesAlmostEverywhere => "diverges-almost-everywhere",
            FirstDerivative::DivergesEverywhere => "diverges-everywhere",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SecondDerivative {
    ZeroEverywhere,
    ZeroAlmostEverywhere,
    NonexistentEverywhere,
}

impl SecondDerivative {
    pub fn label(&self) -> &'static str {
        match self {
            SecondDerivative::ZeroEverywhere => "zero-everywhere",
            SecondDerivative::ZeroAlmostEverywhere => "zero-almost-everywhere",
            SecondDerivative::NonexistentEverywhere => "nonexistent-everywhere",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionClass {
    pub region: Region,
    pub first_derivative: FirstDerivative,
    pub second_derivative: SecondDerivative,
}

/// True when `a ≥ a₀`, decided exactly for exact-mode parameters.
fn at_or_above_a0(a: &Parameter) -> bool {
    if a.mode() == Mode::Exact {
        let half = BigRational::new(1.into(), 2.into());
        if *a.exact() <= half {
            return false;
        }
        // g is increasing on (1/3, 1), so g(a) ≥ 0 ⇔ a ≥ a₀
        let g = -cubic_criterion(a.exact()) - BigRational::one();
        return !g.is_negative();
    }
    a.value() >= a0() - CRITICAL_VALUE_TOLERANCE
}

fn at_or_above_two_thirds(a: &Parameter) -> bool {
    let two_thirds = BigRational::new(2.into(), 3.into());
    match a.mode() {
        Mode::Exact => *a.exact() >= two_thirds,
        Mode::Float => a.value() >= 2.0 / 3.0 - SPECIAL_VALUE_TOLERANCE,
    }
}

pub fn region_classify(a: &Parameter) -> RegionClass {
    use FirstDerivative as D1;
    use SecondDerivative as D2;
    let (region, first, second) = if a.is_one_third() {
        (Region::Identity, D1::OneEverywhere, D2::ZeroEverywhere)
    } else if a.is_one_half() {
        (Region::Cantor, D1::ZeroAlmostEverywhere, D2::ZeroAlmostEverywhere)
    } else if at_or_above_two_thirds(a) {
        (Region::NowhereDifferentiable, D1::DivergesEverywhere, D2::NonexistentEverywhere)
    } else if at_or_above_a0(a) {
        (Region::AeNondifferentiable, D1::DivergesAlmostEverywhere, D2::NonexistentEverywhere)
    } else {
        (Region::AeDifferentiable, D1::ZeroAlmostEverywhere, D2::NonexistentEverywhere)
    };
    RegionClass {
        region,
        first_derivative: first,
        second_derivative: second,
    }
}

/// The level-`i` members of the dense family where `F_a'` fails to exist.
///
/// For `a < 1/3` these are the midpoints `(2k+1)/(2·3^i)`; for
/// `a ∈ (1/3, 1/2) ∪ (1/2, a₀)` the grid points `k/3^i`.
pub fn nondiff_points(a: &Parameter, level: u32) -> Result<Vec<Ratio<u64>>> {
    if level > MAX_POINT_LEVEL {
        return Err(Error::Resource(format!(
            "level {level} exceeds the cap {MAX_POINT_LEVEL}"
        )));
    }
    let cells = pow3(level);
    let below_third = !a.is_one_third()
        && match a.mode() {
            Mode::Exact => *a.exact() < BigRational::new(1.into(), 3.into()),
            Mode::Float => a.value() < 1.0 / 3.0,
        };
    if below_third {
        return Ok((0..cells)
            .map(|k| Ratio::new(2 * k + 1, 2 * cells))
            .collect());
    }
    if region_classify(a).region == Region::AeDifferentiable {
        return Ok((0..=cells).map(|k| Ratio::new(k, cells)).collect());
    }
    Err(Error::UnsupportedRegion(format!(
        "no dense non-differentiability family is known for a = {a} ({})",
        region_classify(a).region
    )))
}

/// How the digits of an experiment are produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitSource {
    /// Independent uniform digits from the seeded stream.
    Uniform,
    /// A fixed repeating pattern (control case).
    Periodic(Vec<u8>),
}

impl DigitSource {
    fn expansion(&self, seed: u64, index: u64, n: usize) -> Result<TernaryExpansion> {
        match self {
            DigitSource::Uniform => Ok(TernaryExpansion::random(&mut rng::stream(seed, index), n)),
            DigitSource::Periodic(pattern) => TernaryExpansion::periodic(pattern, n),
        }
    }
}

/// Spread of `i(n)/n` across sampled digit sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySummary {
    pub seed: u64,
    pub samples: usize,
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Fraction of samples with `|i(n)/n − 1/3| ≤ 0.02`.
    pub within_band: f64,
}

/// Half-width of the band reported in [`FrequencySummary::within_band`].
pub const FREQUENCY_BAND: f64 = 0.02;

pub fn digit_frequency_experiment(samples: usize, n: usize, seed: u64) -> Result<FrequencySummary> {
    digit_frequency_with(samples, n, seed, &DigitSource::Uniform)
}

/// [`digit_frequency_experiment`] with an explicit digit source.
///
/// Sample `s` uses stream `(seed, s)`, so the summary is the same for any
/// thread count.
pub fn digit_frequency_with(
    samples: usize,
    n: usize,
    seed: u64,
    source: &DigitSource,
) -> Result<FrequencySummary> {
    if samples == 0 || n == 0 {
        return Err(Error::domain("samples and digit count must be at least 1"));
    }
    let ratios = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let e = source.expansion(seed, s, n)?;
            Ok(e.digits().iter().filter(|&&d| d == 1).count() as f64 / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = ratios.iter().sum::<f64>() / samples as f64;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inside = ratios
        .iter()
        .filter(|r| (*r - 1.0 / 3.0).abs() <= FREQUENCY_BAND)
        .count();
    Ok(FrequencySummary {
        seed,
        samples,
        n,
        mean,
        min,
        max,
        within_band: inside as f64 / samples as f64,
    })
}

/// Derivative traces along seeded uniform digit streams.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceExperiment {
    pub seed: u64,
    pub traces: Vec<DerivativeTrace>,
}

impl TraceExperiment {
    /// Streams whose final product has magnitude below `eps`.
    pub fn count_final_below(&self, eps: f64) -> usize {
        self.traces.iter().filter(|t| t.last().abs() < eps).count()
    }

    /// Streams with some `|D_m| > threshold` for `m ≤ by`.
    pub fn count_exceeding_by(&self, threshold: f64, by: usize) -> usize {
        self.traces
            .iter()
            .filter(|t| t.first_exceeding(threshold).is_some_and(|m| m <= by))
            .count()
    }
}

pub fn derivative_experiment(
    a: &Parameter,
    streams: usize,
    n: usize,
    seed: u64,
) -> Result<TraceExperiment> {
    if streams == 0 {
        return Err(Error::domain("stream count must be at least 1"));
    }
    let traces = (0..streams as u64)
        .into_par_iter()
        .map(|s| derivative_trace(a, &DigitSource::Uniform.expansion(seed, s, n)?, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceExperiment { seed, traces })
}
