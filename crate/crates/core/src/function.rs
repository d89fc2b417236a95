//! Construction and evaluation of `F_a`.
//!
//! `f_0(x) = x`, and `f_{i+1}` refines every affine piece of `f_i`: over a
//! segment with endpoint values `y_L`, `y_R` and rise `Δ = y_R − y_L`, the two
//! new interior vertices are `y_L + aΔ` and `y_L + (1−a)Δ`. Grid values of
//! coarser levels never change, so `F_a = lim f_i` agrees with `f_i` on
//! `k/3^i`.
//!
//! Unrolling the refinement along the ternary address of `x` gives the series
//!
//! ```text
//! F_a(0.ξ₁ξ₂…) = Σₙ o(ξₙ) · Π_{k<n} m(ξₖ)
//! o = (0, a, 1−a),  m = (a, 1−2a, a)
//! ```
//!
//! which [`eval_digit_series`] sums with a certified tail bound.

use crate::error::{Error, Result};
use crate::param::{Parameter, Scalar};
use crate::ternary::{pow3, to_ternary, TernaryExpansion};

/// Default cap on iteration levels: `3^16 + 1` vertices.
pub const DEFAULT_LEVEL_CAP: u32 = 16;

/// Upper limit for [`digits_for_tolerance`].
pub const MAX_SERIES_DIGITS: usize = 100_000;

/// Vertex values of `f_i` on the grid `k/3^i`, `k = 0..=3^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationGraph<T> {
    level: u32,
    vertices: Vec<T>,
}

impl<T: Scalar> IterationGraph<T> {
    /// `f_0(x) = x`.
    pub fn identity() -> Self {
        IterationGraph {
            level: 0,
            vertices: vec![T::zero(), T::one()],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn vertices(&self) -> &[T] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<T> {
        self.vertices
    }

    /// Number of affine pieces, `3^level`.
    pub fn segments(&self) -> usize {
        self.vertices.len() - 1
    }

    /// `f_{i+1}` from `f_i`.
    pub fn refine(&self, a: &T) -> Self {
        let one_minus_a = T::one() - a.clone();
        let mut next = Vec::with_capacity(3 * self.segments() + 1);
        for pair in self.vertices.windows(2) {
            let (left, right) = (&pair[0], &pair[1]);
            let rise = right.clone() - left.clone();
            next.push(left.clone());
            next.push(left.clone() + a.clone() * rise.clone());
            next.push(left.clone() + one_minus_a.clone() * rise);
        }
        next.push(self.vertices[self.vertices.len() - 1].clone());
        IterationGraph {
            level: self.level + 1,
            vertices: next,
        }
    }

    /// `Σ_k |f_i((k+1)/3^i) − f_i(k/3^i)|`.
    pub fn total_variation(&self) -> T {
        self.vertices
            .windows(2)
            .fold(T::zero(), |acc, w| acc + (w[1].clone() - w[0].clone()).abs())
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.vertices.windows(2).all(|w| w[0] <= w[1])
    }

    /// Grid points `(k/3^i, f_i(k/3^i))` in increasing `x`.
    pub fn points(&self) -> Vec<(T, T)> {
        let denom = pow3(self.level);
        self.vertices
            .iter()
            .enumerate()
            .map(|(k, y)| (T::from_ratio(k as u64, denom), y.clone()))
            .collect()
    }
}

/// One refinement step; free-function form of [`IterationGraph::refine`].
pub fn refine<T: Scalar>(g: &IterationGraph<T>, a: &Parameter) -> IterationGraph<T> {
    g.refine(&T::from_parameter(a))
}

/// `f_level`, built by repeated refinement, with the default level cap.
pub fn construct_iteration<T: Scalar>(a: &Parameter, level: u32) -> Result<IterationGraph<T>> {
    construct_iteration_with_cap(a, level, DEFAULT_LEVEL_CAP)
}

pub fn construct_iteration_with_cap<T: Scalar>(
    a: &Parameter,
    level: u32,
    cap: u32,
) -> Result<IterationGraph<T>> {
    if level > cap {
        return Err(Error::Resource(format!(
            "level {level} exceeds the cap {cap} (3^{level}+1 vertices)"
        )));
    }
    let a = T::from_parameter(a);
    let mut g = IterationGraph::identity();
    for _ in 0..level {
        g = g.refine(&a);
    }
    Ok(g)
}

/// Points `(k/3^i, f_i(k/3^i))` of the level-`i` polyline.
pub fn sample_graph<T: Scalar>(a: &Parameter, level: u32) -> Result<Vec<(T, T)>> {
    Ok(construct_iteration::<T>(a, level)?.points())
}

/// A value of `F_a` with a bound on its distance to the true value.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    /// Certified bound on the series remainder (float rounding not included).
    pub error_bound: f64,
    pub digits_used: usize,
}

/// Contraction constants of the digit series for parameter `a`.
#[derive(Debug, Clone, Copy)]
struct SeriesBound {
    /// `max(a, |1−2a|)`, the largest multiplier magnitude.
    rate: f64,
    /// `max(a, 1−a) / (1 − rate)`, bound on the remainder per unit prefix product.
    tail_factor: f64,
}

impl SeriesBound {
    fn new(a: f64) -> Self {
        let rate = a.max((1.0 - 2.0 * a).abs());
        SeriesBound {
            rate,
            tail_factor: a.max(1.0 - a) / (1.0 - rate),
        }
    }
}

/// Evaluates `F_a` at the point addressed by `x` to within `tol`.
///
/// Terminating expansions are summed exactly (in exact mode the value is
/// exactly `F_a(x)`). For truncated expansions summation stops as soon as the
/// remainder bound `Π|m(ξₖ)| · max(a,1−a)/(1 − max(a,|1−2a|))` drops below
/// `tol`; if the digits run out first a [`Error::Precision`] reports the best
/// bound reached. A zero multiplier (`a = 1/2` and a digit 1) ends the series
/// exactly.
pub fn eval_digit_series<T: Scalar>(
    a: &Parameter,
    x: &TernaryExpansion,
    tol: f64,
) -> Result<Evaluation<T>> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    if x.is_one() {
        return Ok(Evaluation {
            value: T::one(),
            error_bound: 0.0,
            digits_used: 0,
        });
    }
    let a_t = T::from_parameter(a);
    let one = T::one();
    let offsets = [T::zero(), a_t.clone(), one.clone() - a_t.clone()];
    let middle = one - a_t.clone() - a_t.clone();
    let multipliers = [a_t.clone(), middle, a_t];
    let af = a.value();
    let abs_multipliers = [af, (1.0 - 2.0 * af).abs(), af];
    let bound = SeriesBound::new(af);

    let mut sum = T::zero();
    let mut product = T::one();
    let mut product_abs = 1.0f64;
    for (idx, &d) in x.digits().iter().enumerate() {
        let d = usize::from(d);
        sum = sum + offsets[d].clone() * product.clone();
        product = product * multipliers[d].clone();
        product_abs *= abs_multipliers[d];
        if product.is_zero() {
            return Ok(Evaluation {
                value: sum,
                error_bound: 0.0,
                digits_used: idx + 1,
            });
        }
        if x.is_truncation() {
            let remainder = product_abs * bound.tail_factor;
            if remainder < tol {
                return Ok(Evaluation {
                    value: sum,
                    error_bound: remainder,
                    digits_used: idx + 1,
                });
            }
        }
    }
    if !x.is_truncation() {
        return Ok(Evaluation {
            value: sum,
            error_bound: 0.0,
            digits_used: x.len(),
        });
    }
    let achievable = product_abs * bound.tail_factor;
    Err(Error::Precision {
        message: format!(
            "{} digits cannot certify tolerance {tol:e} for a = {a}",
            x.len()
        ),
        achievable,
    })
}

/// Digits needed for the worst-case remainder bound to fall below `tol`.
pub fn digits_for_tolerance(a: &Parameter, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    let bound = SeriesBound::new(a.value());
    let mut remainder = bound.tail_factor;
    for n in 1..=MAX_SERIES_DIGITS {
        remainder *= bound.rate;
        if remainder < tol {
            return Ok(n);
        }
    }
    Err(Error::Precision {
        message: format!("tolerance {tol:e} needs more than {MAX_SERIES_DIGITS} digits"),
        achievable: remainder,
    })
}

/// `F_a(x)` for a float `x ∈ [0, 1]`, in float arithmetic.
pub fn evaluate(a: &Parameter, x: f64, tol: f64) -> Result<Evaluation<f64>> {
    let n = digits_for_tolerance(a, tol)?;
    let digits = to_ternary(x, n)?;
    eval_digit_series(a, &digits, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ternary::ternary_rational;
    use num::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn first_refinement() {
        let a = Parameter::ratio(2, 5).unwrap();
        let g = construct_iteration::<BigRational>(&a, 1).unwrap();
        assert_eq!(g.vertices(), &[q(0, 1), q(2, 5), q(3, 5), q(1, 1)]);

        let a = Parameter::ratio(2, 3).unwrap();
        let g = construct_iteration::<BigRational>(&a, 1).unwrap();
        assert_eq!(g.vertices(), &[q(0, 1), q(2, 3), q(1, 3), q(1, 1)]);
    }

    #[test]
    fn level_zero_is_identity() {
        let a = Parameter::new(0.77).unwrap();
        let g = construct_iteration::<f64>(&a, 0).unwrap();
        assert_eq!(g.vertices(), &[0.0, 1.0]);
    }

    #[test]
    fn half_at_level_one() {
        let a = Parameter::ratio(1, 2).unwrap();
        let g = construct_iteration::<BigRational>(&a, 1).unwrap();
        assert_eq!(g.vertices(), &[q(0, 1), q(1, 2), q(1, 2), q(1, 1)]);
    }

    #[test]
    fn two_thirds_level_two() {
        let a = Parameter::ratio(2, 3).unwrap();
        let g = construct_iteration::<BigRational>(&a, 2).unwrap();
        assert_eq!(g.vertices()[1], q(4, 9));
    }

    #[test]
    fn one_third_is_identity_line() {
        let a = Parameter::ratio(1, 3).unwrap();
        for level in 0..6 {
            let g = construct_iteration::<BigRational>(&a, level).unwrap();
            for (k, y) in g.vertices().iter().enumerate() {
                assert_eq!(*y, q(k as i64, pow3(level) as i64));
            }
        }
    }

    #[test]
    fn level_cap_enforced() {
        let a = Parameter::new(0.6).unwrap();
        assert!(matches!(
            construct_iteration::<f64>(&a, DEFAULT_LEVEL_CAP + 1),
            Err(Error::Resource(_))
        ));
        assert!(construct_iteration_with_cap::<f64>(&a, 3, 2).is_err());
    }

    #[test]
    fn sample_graph_pairs_grid() {
        let a = Parameter::ratio(2, 3).unwrap();
        let pts = sample_graph::<BigRational>(&a, 1).unwrap();
        let expected = [
            (q(0, 1), q(0, 1)),
            (q(1, 3), q(2, 3)),
            (q(2, 3), q(1, 3)),
            (q(1, 1), q(1, 1)),
        ];
        assert_eq!(pts, expected);
        let any = Parameter::new(0.123).unwrap();
        assert_eq!(sample_graph::<f64>(&any, 0).unwrap(), [(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn series_at_one_third_gives_a() {
        for a in [Parameter::ratio(1, 4).unwrap(), Parameter::ratio(4, 5).unwrap()] {
            let x = ternary_rational(1, 1).unwrap();
            let v = eval_digit_series::<BigRational>(&a, &x, 1e-12).unwrap();
            assert_eq!(&v.value, a.exact());
            assert_eq!(v.error_bound, 0.0);
        }
    }

    #[test]
    fn series_at_zero_and_one() {
        let a = Parameter::new(0.7).unwrap();
        let zero = TernaryExpansion::from_digits(vec![0; 20], false).unwrap();
        assert_eq!(eval_digit_series::<f64>(&a, &zero, 1e-9).unwrap().value, 0.0);
        let one = to_ternary(1.0, 5).unwrap();
        assert_eq!(eval_digit_series::<f64>(&a, &one, 1e-9).unwrap().value, 1.0);
    }

    #[test]
    fn half_truncates_on_first_one() {
        let a = Parameter::ratio(1, 2).unwrap();
        let x = TernaryExpansion::periodic(&[1], 5).unwrap();
        let v = eval_digit_series::<BigRational>(&a, &x, 1e-12).unwrap();
        assert_eq!(v.value, q(1, 2));
        assert_eq!(v.digits_used, 1);
        assert_eq!(v.error_bound, 0.0);
    }

    #[test]
    fn repeating_form_agrees_with_terminating() {
        // 1/3 = 0.1000… = 0.0222…
        for a in [0.25, 0.6, 0.9] {
            let a = Parameter::new(a).unwrap();
            let n = digits_for_tolerance(&a, 1e-12).unwrap();
            let mut digits = vec![2u8; n];
            digits[0] = 0;
            let repeating = TernaryExpansion::from_digits(digits, true).unwrap();
            let v = eval_digit_series::<f64>(&a, &repeating, 1e-12).unwrap();
            assert!((v.value - a.value()).abs() < 1e-12, "{v:?}");
            assert!(v.error_bound < 1e-12);
        }
    }

    #[test]
    fn insufficient_digits_is_precision_error() {
        let a = Parameter::new(0.9).unwrap();
        let x = TernaryExpansion::periodic(&[0, 2], 10).unwrap();
        match eval_digit_series::<f64>(&a, &x, 1e-12) {
            Err(Error::Precision { achievable, .. }) => {
                // 0.9^10 · 0.9/0.1
                assert!((achievable - 0.9f64.powi(10) * 9.0).abs() < 1e-12);
            }
            other => panic!("expected precision error, got {other:?}"),
        }
        assert!(eval_digit_series::<f64>(&a, &x, 0.0).is_err());
    }

    #[test]
    fn evaluate_float_identity() {
        let a = Parameter::ratio(1, 3).unwrap();
        let v = evaluate(&a, 0.7317, 1e-13).unwrap();
        assert!((v.value - 0.7317).abs() < 1e-12);
    }

    #[test]
    fn digits_for_tolerance_is_minimal() {
        let a = Parameter::new(0.6).unwrap();
        let n = digits_for_tolerance(&a, 1e-10).unwrap();
        let tail = 0.6 / 0.4;
        assert!(0.6f64.powi(n as i32) * tail < 1e-10);
        assert!(0.6f64.powi(n as i32 - 1) * tail >= 1e-10);
    }
}
