//! The shape parameter `a` and the two arithmetic modes it can drive.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Float parameters this close to 1/3 or 1/2 are treated as those values.
pub const SPECIAL_VALUE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Arbitrary-precision rationals.
    Exact,
    /// IEEE double precision.
    #[default]
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// The value `a ∈ (0, 1)` selecting one member of the family.
///
/// Both a float and an exact rational value are kept. A parameter parsed from
/// `"3/5"` or `"0.6"` holds `3/5` exactly; one built from an `f64` holds the
/// float's exact binary value.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    value: f64,
    exact: BigRational,
    mode: Mode,
}

impl Parameter {
    /// A float-mode parameter.
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 || a >= 1.0 {
            return Err(Error::domain(format!("a = {a} must lie strictly inside (0, 1)")));
        }
        let exact = BigRational::from_float(a).expect("finite float");
        Ok(Parameter {
            value: a,
            exact,
            mode: Mode::Float,
        })
    }

    /// An exact-mode parameter `p/q`.
    pub fn ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("zero denominator"));
        }
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// An exact-mode parameter.
    pub fn from_rational(a: BigRational) -> Result<Self> {
        if !a.is_positive() || a >= BigRational::one() {
            return Err(Error::domain(format!("a = {a} must lie strictly inside (0, 1)")));
        }
        let value = a.to_f64().expect("value in (0, 1)");
        Ok(Parameter {
            value,
            exact: a,
            mode: Mode::Exact,
        })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_one_third(&self) -> bool {
        self.is_special(1, 3)
    }

    pub fn is_one_half(&self) -> bool {
        self.is_special(1, 2)
    }

    fn is_special(&self, p: i64, q: i64) -> bool {
        let target = BigRational::new(BigInt::from(p), BigInt::from(q));
        self.exact == target
            || (self.mode == Mode::Float
                && (self.value - p as f64 / q as f64).abs() <= SPECIAL_VALUE_TOLERANCE)
    }

    /// `12a − 3`, the box-count growth factor per level.
    pub fn box_growth(&self) -> f64 {
        12.0 * self.value - 3.0
    }

    /// `log₃(12a − 3)` for `a > 1/2`, and 1 otherwise.
    pub fn reference_dimension(&self) -> f64 {
        if self.value > 0.5 && !self.is_one_half() {
            self.box_growth().ln() / 3f64.ln()
        } else {
            1.0
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Exact => write!(f, "{}", self.exact),
            Mode::Float => write!(f, "{}", self.value),
        }
    }
}

impl FromStr for Parameter {
    type Err = Error;

    /// Accepts `"p/q"` (exact mode) or a decimal such as `"0.6"` (float mode).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            let r = parse_fraction(s)?;
            return Parameter::from_rational(r);
        }
        let value: f64 = s
            .parse()
            .map_err(|_| Error::domain(format!("cannot parse parameter {s:?}")))?;
        let mut p = Parameter::new(value)?;
        if let Some(r) = parse_decimal(s) {
            p.exact = r;
        }
        Ok(p)
    }
}

/// Parses `"p/q"` into a reduced rational.
pub fn parse_fraction(s: &str) -> Result<BigRational> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| Error::domain(format!("{s:?} is not a fraction p/q")))?;
    let parse = |t: &str| {
        BigInt::from_str_radix(t.trim(), 10)
            .map_err(|_| Error::domain(format!("cannot parse integer {t:?} in {s:?}")))
    };
    let (p, q) = (parse(p)?, parse(q)?);
    if q.is_zero() {
        return Err(Error::domain(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(p, q))
}

/// Exact value of a plain decimal literal such as `0.7317`; `None` for other syntax.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if int.is_empty() && frac.is_empty() || !all_digits(int) || !all_digits(frac) {
        return None;
    }
    let numer = BigInt::from_str_radix(&format!("{int}{frac}"), 10).ok()?;
    let denom = num::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(numer, denom))
}

/// Arithmetic the constructions run in: `f64` or [`BigRational`].
pub trait Scalar: Clone + PartialOrd + fmt::Debug + Num + Signed + Send + Sync {
    fn from_parameter(a: &Parameter) -> Self;
    fn from_ratio(numer: u64, denom: u64) -> Self;
    fn as_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_parameter(a: &Parameter) -> Self {
        a.value()
    }

    fn from_ratio(numer: u64, denom: u64) -> Self {
        numer as f64 / denom as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_parameter(a: &Parameter) -> Self {
        a.exact().clone()
    }

    fn from_ratio(numer: u64, denom: u64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_endpoints() {
        for bad in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(Parameter::new(bad).is_err(), "{bad}");
        }
        assert!(Parameter::ratio(0, 1).is_err());
        assert!(Parameter::ratio(1, 1).is_err());
        assert!(Parameter::ratio(1, 0).is_err());
        assert!("1/1".parse::<Parameter>().is_err());
        assert!("0".parse::<Parameter>().is_err());
    }

    #[test]
    fn parses_fraction_exactly() {
        let p: Parameter = "2/3".parse().unwrap();
        assert_eq!(p.mode(), Mode::Exact);
        assert_eq!(p.exact(), &BigRational::new(2.into(), 3.into()));
        assert_eq!(p.to_string(), "2/3");
    }

    #[test]
    fn parses_decimal_with_exact_value() {
        let p: Parameter = "0.6".parse().unwrap();
        assert_eq!(p.mode(), Mode::Float);
        assert_eq!(p.value(), 0.6);
        assert_eq!(p.exact(), &BigRational::new(3.into(), 5.into()));
        let q: Parameter = "6e-1".parse().unwrap();
        assert_eq!(q.value(), 0.6);
    }

    #[test]
    fn special_values() {
        assert!(Parameter::new(1.0 / 3.0).unwrap().is_one_third());
        assert!(Parameter::ratio(1, 3).unwrap().is_one_third());
        assert!(Parameter::ratio(2, 4).unwrap().is_one_half());
        assert!(!Parameter::new(0.34).unwrap().is_one_third());
        // exact mode compares exactly
        let near = Parameter::new(1.0 / 3.0).unwrap().with_mode(Mode::Exact);
        assert!(!near.is_one_third());
    }

    #[test]
    fn reference_dimension() {
        assert_eq!(Parameter::new(0.3).unwrap().reference_dimension(), 1.0);
        let d = Parameter::ratio(2, 3).unwrap().reference_dimension();
        assert!((d - 5f64.ln() / 3f64.ln()).abs() < 1e-15);
    }
}
