//! Length, box counts, dimension and mass of the graph `Γ_a`.
//!
//! Over a column of width `δ = 3^-i` an affine piece of `f_i` needs a
//! rectangle of height `|Δy|`, so the column cover of `f_i` has area
//! `A_i = δ·Σ|Δy| = δ·TV(f_i)` and counts as `N = A_i/δ²` squares. Each
//! refinement multiplies the total variation by `2a + |1−2a|`, which is
//! `4a − 1` for `a > 1/2` and 1 otherwise.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{construct_iteration, eval_digit_series, DEFAULT_LEVEL_CAP};
use crate::ifs::{ifs_maps, AffineMap2D};
use crate::param::Parameter;
use crate::rng;
use crate::ternary::{pow3, to_ternary};

/// Largest grid level accepted by [`mass_bound_check`] (`9^7` cells).
pub const MAX_GRID_LEVEL: u32 = 7;

/// Default slack on the mass bound.
pub const DEFAULT_MASS_SLACK: f64 = 0.2;

/// Default chaos-game burn-in.
pub const DEFAULT_BURN_IN: usize = 30;

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelLength {
    pub level: u32,
    /// Euclidean length of the polyline `f_i`.
    pub euclidean: f64,
    /// `Σ (|Δx| + |Δy|) = 1 + TV`.
    pub manhattan: f64,
    pub total_variation: f64,
}

/// Polyline lengths of `f_0..f_imax`.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthProfile {
    pub a: Parameter,
    pub levels: Vec<LevelLength>,
}

impl LengthProfile {
    pub fn euclidean(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.euclidean).collect()
    }
}

fn level_length(level: u32, vertices: &[f64]) -> LevelLength {
    let dx = 1.0 / pow3(level) as f64;
    let rises = || vertices.windows(2).map(|w| w[1] - w[0]);
    let euclidean = compensated_sum(rises().map(|dy| dx.hypot(dy)));
    let total_variation = compensated_sum(rises().map(f64::abs));
    LevelLength {
        level,
        euclidean,
        manhattan: 1.0 + total_variation,
        total_variation,
    }
}

/// Runs `visit` on `f_0, …, f_imax` in float arithmetic.
fn for_each_level(
    a: &Parameter,
    i_max: u32,
    mut visit: impl FnMut(u32, &[f64]),
) -> Result<()> {
    if i_max > DEFAULT_LEVEL_CAP {
        return Err(Error::Resource(format!(
            "level {i_max} exceeds the cap {DEFAULT_LEVEL_CAP}"
        )));
    }
    let av = a.value();
    let mut g = construct_iteration::<f64>(a, 0)?;
    visit(0, g.vertices());
    for level in 1..=i_max {
        g = g.refine(&av);
        visit(level, g.vertices());
    }
    Ok(())
}

pub fn arc_length_profile(a: &Parameter, i_max: u32) -> Result<LengthProfile> {
    let mut levels = Vec::with_capacity(i_max as usize + 1);
    for_each_level(a, i_max, |level, v| levels.push(level_length(level, v)))?;
    Ok(LengthProfile {
        a: a.clone(),
        levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverLevel {
    pub level: u32,
    /// Column width `3^-i`.
    pub delta: f64,
    /// Column-cover area `A(f_i)`.
    pub area: f64,
    /// `N_δ = A/δ²`.
    pub boxes: f64,
}

impl CoverLevel {
    pub fn log_inv_delta(&self) -> f64 {
        -self.delta.ln()
    }

    pub fn log_boxes(&self) -> f64 {
        self.boxes.ln()
    }
}

/// Column-cover areas and box counts of `f_0..f_imax`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverProfile {
    pub a: Parameter,
    pub levels: Vec<CoverLevel>,
}

/// Area of the column cover at each level: `Σ_k |Δy_k| · 3^-i`.
pub fn cover_profile(a: &Parameter, i_max: u32) -> Result<CoverProfile> {
    let mut levels = Vec::with_capacity(i_max as usize + 1);
    for_each_level(a, i_max, |level, v| {
        let columns = pow3(level) as f64;
        let delta = 1.0 / columns;
        let tv = compensated_sum(v.windows(2).map(|w| (w[1] - w[0]).abs()));
        levels.push(CoverLevel {
            level,
            delta,
            area: tv * delta,
            boxes: tv * columns,
        });
    })?;
    Ok(CoverProfile {
        a: a.clone(),
        levels,
    })
}

/// Box counts on the ordinary `3^-j` square grid, for `j ∈ j_min..=j_max`.
///
/// The graph is approximated by `f_fine`; a column is charged every grid
/// square between the lowest and highest vertex inside it.
pub fn square_box_counts(
    a: &Parameter,
    j_min: u32,
    j_max: u32,
    fine_level: u32,
) -> Result<Vec<CoverLevel>> {
    if j_max > fine_level || j_min > j_max {
        return Err(Error::domain(format!(
            "need j_min ≤ j_max ≤ fine level, got {j_min}, {j_max}, {fine_level}"
        )));
    }
    let g = construct_iteration::<f64>(a, fine_level)?;
    let v = g.vertices();
    Ok((j_min..=j_max)
        .map(|j| {
            let side = pow3(j) as usize;
            let stride = pow3(fine_level - j) as usize;
            let row = |y: f64| ((y * side as f64).floor() as usize).min(side - 1);
            let boxes: usize = (0..side)
                .map(|c| {
                    let column = &v[c * stride..=(c + 1) * stride];
                    let (lo, hi) = column
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
                            (lo.min(y), hi.max(y))
                        });
                    row(hi) - row(lo) + 1
                })
                .sum();
            let delta = 1.0 / side as f64;
            CoverLevel {
                level: j,
                delta,
                area: boxes as f64 * delta * delta,
                boxes: boxes as f64,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    /// Width-δ column rectangles; exact for this family.
    ColumnArea,
    /// Conventional square grid; a cross-check.
    SquareGrid,
}

/// Least-squares fit of `log N` against `log(1/δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionEstimate {
    pub method: CountMethod,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// `log₃(12a − 3)` for `a > 1/2`, otherwise 1.
    pub reference: f64,
}

/// Ordinary least squares of `y` on `x`; `(slope, intercept, max |residual|)`.
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::domain("a fit needs at least two levels"));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("degenerate fit: all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let max_residual = points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).abs())
        .fold(0.0, f64::max);
    Ok((slope, intercept, max_residual))
}

fn fit(method: CountMethod, a: &Parameter, levels: &[CoverLevel]) -> Result<DimensionEstimate> {
    let points: Vec<_> = levels
        .iter()
        .map(|l| (l.log_inv_delta(), l.log_boxes()))
        .collect();
    let (slope, intercept, max_residual) = least_squares(&points)?;
    Ok(DimensionEstimate {
        method,
        slope,
        intercept,
        max_residual,
        reference: a.reference_dimension(),
    })
}

/// Box-counting dimension from the column cover over levels `i_min..=i_max`.
pub fn dimension_estimate(a: &Parameter, i_min: u32, i_max: u32) -> Result<DimensionEstimate> {
    if i_min < 1 || i_max <= i_min {
        return Err(Error::domain(format!(
            "need 1 ≤ i_min < i_max, got {i_min}..{i_max}"
        )));
    }
    let profile = cover_profile(a, i_max)?;
    fit(CountMethod::ColumnArea, a, &profile.levels[i_min as usize..])
}

/// Extra refinement levels behind the square-grid counter.
pub const SQUARE_GRID_OVERSAMPLING: u32 = 3;

/// Box-counting dimension from square-grid counts over `j_min..=j_max`.
pub fn square_dimension_estimate(a: &Parameter, j_min: u32, j_max: u32) -> Result<DimensionEstimate> {
    if j_min < 1 || j_max <= j_min {
        return Err(Error::domain(format!(
            "need 1 ≤ j_min < j_max, got {j_min}..{j_max}"
        )));
    }
    let fine = (j_max + SQUARE_GRID_OVERSAMPLING).min(DEFAULT_LEVEL_CAP);
    let levels = square_box_counts(a, j_min, j_max, fine)?;
    fit(CountMethod::SquareGrid, a, &levels)
}

/// Points from the chaos game with the area-proportional weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MassSample {
    pub a: Parameter,
    pub points: Vec<(f64, f64)>,
    /// Iteration index of each recorded point within its chain.
    pub steps: Vec<u64>,
    /// Probabilities of `w₁, w₂, w₃`: `(a, 2a−1, a)/(4a−1)`.
    pub weights: [f64; 3],
    pub seed: Option<u64>,
    pub burn_in: usize,
}

impl MassSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `|y − F_a(x)|` for every point, evaluating `F_a` from `digits` ternary
    /// digits of `x`.
    pub fn graph_deviations(&self, digits: usize, tol: f64) -> Result<Vec<f64>> {
        self.points
            .par_iter()
            .map(|&(x, y)| {
                let e = to_ternary(x, digits)?;
                let f = eval_digit_series::<f64>(&self.a, &e, tol)?;
                Ok((y - f.value).abs())
            })
            .collect()
    }
}

/// Random iteration of `w₁, w₂, w₃`.
#[derive(Debug, Clone)]
pub struct ChaosGame {
    a: Parameter,
    maps: [AffineMap2D<f64>; 3],
    weights: [f64; 3],
    start: (f64, f64),
    burn_in: usize,
}

impl ChaosGame {
    /// Needs `a > 1/2` so that every map carries positive mass.
    pub fn new(a: &Parameter) -> Result<Self> {
        let av = a.value();
        if av <= 0.5 || a.is_one_half() {
            return Err(Error::UnsupportedRegion(format!(
                "the chaos-game mass needs a > 1/2, got a = {a}"
            )));
        }
        let total = 4.0 * av - 1.0;
        Ok(ChaosGame {
            a: a.clone(),
            maps: ifs_maps(a),
            weights: [av / total, (2.0 * av - 1.0) / total, av / total],
            start: (0.0, 0.0),
            burn_in: DEFAULT_BURN_IN,
        })
    }

    pub fn burn_in(mut self, steps: usize) -> Self {
        self.burn_in = steps;
        self
    }

    pub fn start(mut self, point: (f64, f64)) -> Self {
        self.start = point;
        self
    }

    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }

    fn pick<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        if u < self.weights[0] {
            0
        } else if u < self.weights[0] + self.weights[1] {
            1
        } else {
            2
        }
    }

    fn sample(&self, seed: Option<u64>, points: Vec<(f64, f64)>, steps: Vec<u64>) -> MassSample {
        MassSample {
            a: self.a.clone(),
            points,
            steps,
            weights: self.weights,
            seed,
            burn_in: self.burn_in,
        }
    }

    /// Applies the maps named by `choices` (0-based), recording after burn-in.
    pub fn run_with_choices(&self, n: usize, choices: impl IntoIterator<Item = usize>) -> MassSample {
        let mut p = self.start;
        let mut points = Vec::with_capacity(n);
        let mut steps = Vec::with_capacity(n);
        for (step, choice) in choices.into_iter().take(self.burn_in + n).enumerate() {
            p = self.maps[choice].apply(p);
            if step >= self.burn_in {
                points.push(p);
                steps.push(step as u64);
            }
        }
        self.sample(None, points, steps)
    }

    fn chain(&self, n: usize, seed: u64, index: u64) -> (Vec<(f64, f64)>, Vec<u64>) {
        let mut rng = rng::stream(seed, index);
        let choices = std::iter::from_fn(|| Some(self.pick(&mut rng)));
        let s = self.run_with_choices(n, choices);
        (s.points, s.steps)
    }

    /// One chain of `n` recorded points.
    pub fn run(&self, n: usize, seed: u64) -> MassSample {
        let (points, steps) = self.chain(n, seed, 0);
        self.sample(Some(seed), points, steps)
    }

    /// `chains` independent chains of `n_per_chain` points, concatenated in
    /// chain order. Chain `c` uses stream `(seed, c)`.
    pub fn run_chains(&self, chains: usize, n_per_chain: usize, seed: u64) -> MassSample {
        let parts: Vec<_> = (0..chains as u64)
            .into_par_iter()
            .map(|c| self.chain(n_per_chain, seed, c))
            .collect();
        let mut points = Vec::with_capacity(chains * n_per_chain);
        let mut steps = Vec::with_capacity(chains * n_per_chain);
        for (p, s) in parts {
            points.extend(p);
            steps.extend(s);
        }
        self.sample(Some(seed), points, steps)
    }
}

/// `n` chaos-game points after `burn_in` steps from `(0, 0)`.
pub fn chaos_game(a: &Parameter, n: usize, burn_in: usize, seed: u64) -> Result<MassSample> {
    if n == 0 {
        return Err(Error::domain("point count must be at least 1"));
    }
    Ok(ChaosGame::new(a)?.burn_in(burn_in).run(n, seed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMass {
    pub ix: usize,
    pub iy: usize,
    pub count: u64,
    /// Empirical `μ(cell)`.
    pub mass: f64,
    /// `μ(cell)` over the bound `(12a−3)·|U|^{log₃(12a−3)}`.
    pub ratio: f64,
}

/// Empirical cell masses against `μ(U) ≤ (12a−3)|U|^{log₃(12a−3)}`.
///
/// `|U|` is the cell diameter `√2·3^-i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassBoundReport {
    pub grid_level: u32,
    pub side: f64,
    pub diameter: f64,
    pub exponent: f64,
    pub bound: f64,
    pub slack: f64,
    pub total: u64,
    counts: Vec<u64>,
}

impl MassBoundReport {
    fn cells_per_side(&self) -> usize {
        pow3(self.grid_level) as usize
    }

    /// Every cell, row-major in `(ix, iy)`.
    pub fn cells(&self) -> impl Iterator<Item = CellMass> + '_ {
        let n = self.cells_per_side();
        self.counts.iter().enumerate().map(move |(idx, &count)| {
            let mass = count as f64 / self.total as f64;
            CellMass {
                ix: idx / n,
                iy: idx % n,
                count,
                mass,
                ratio: mass / self.bound,
            }
        })
    }

    /// Cells whose ratio exceeds `1 + slack`.
    pub fn flagged(&self) -> Vec<CellMass> {
        self.cells().filter(|c| c.ratio > 1.0 + self.slack).collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.cells().map(|c| c.ratio).fold(0.0, f64::max)
    }

    /// Mass of the vertical strip `ix`.
    pub fn column_mass(&self, ix: usize) -> f64 {
        let n = self.cells_per_side();
        let count: u64 = self.counts[ix * n..(ix + 1) * n].iter().sum();
        count as f64 / self.total as f64
    }
}

pub fn mass_bound_check(sample: &MassSample, grid_level: u32, slack: f64) -> Result<MassBoundReport> {
    if sample.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    if grid_level == 0 || grid_level > MAX_GRID_LEVEL {
        return Err(Error::domain(format!(
            "grid level must lie in 1..={MAX_GRID_LEVEL}, got {grid_level}"
        )));
    }
    let n = pow3(grid_level) as usize;
    let cell = |t: f64| ((t * n as f64).floor().max(0.0) as usize).min(n - 1);
    let mut counts = vec![0u64; n * n];
    for &(x, y) in &sample.points {
        counts[cell(x) * n + cell(y)] += 1;
    }
    let growth = sample.a.box_growth();
    let exponent = growth.ln() / 3f64.ln();
    let side = 1.0 / n as f64;
    let diameter = std::f64::consts::SQRT_2 * side;
    Ok(MassBoundReport {
        grid_level,
        side,
        diameter,
        exponent,
        bound: growth * diameter.powf(exponent),
        slack,
        total: sample.len() as u64,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(a: f64) -> Parameter {
        Parameter::new(a).unwrap()
    }

    #[test]
    fn level_zero_length() {
        let prof = arc_length_profile(&p(0.8), 0).unwrap();
        assert_eq!(prof.levels[0].euclidean, std::f64::consts::SQRT_2);
    }

    #[test]
    fn identity_keeps_diagonal_length() {
        let prof = arc_length_profile(&Parameter::ratio(1, 3).unwrap(), 6).unwrap();
        for l in &prof.levels {
            assert_relative_eq!(l.euclidean, std::f64::consts::SQRT_2, epsilon = 1e-14);
        }
    }

    #[test]
    fn first_level_length_at_point_six() {
        // polyline through (0,0), (1/3,0.6), (2/3,0.4), (1,1)
        let prof = arc_length_profile(&p(0.6), 1).unwrap();
        let expected = 2.0 * (1.0f64 / 9.0 + 0.36).sqrt() + (1.0f64 / 9.0 + 0.04).sqrt();
        assert_relative_eq!(prof.levels[1].euclidean, expected, epsilon = 1e-14);
        assert_relative_eq!(prof.levels[1].euclidean, 1.761480811787953, epsilon = 1e-12);
    }

    #[test]
    fn cover_examples() {
        let c = cover_profile(&Parameter::ratio(2, 3).unwrap(), 1).unwrap();
        assert_eq!((c.levels[0].area, c.levels[0].boxes), (1.0, 1.0));
        assert_relative_eq!(c.levels[1].area, 5.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(c.levels[1].boxes, 5.0, epsilon = 1e-14);

        let c = cover_profile(&Parameter::ratio(1, 2).unwrap(), 2).unwrap();
        assert_relative_eq!(c.levels[2].area, 1.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(c.levels[2].boxes, 9.0, epsilon = 1e-14);
    }

    #[test]
    fn area_ratio_per_level() {
        for a in [0.2, 0.45, 0.55, 0.75] {
            let c = cover_profile(&p(a), 8).unwrap();
            let expected = if a > 0.5 { (4.0 * a - 1.0) / 3.0 } else { 1.0 / 3.0 };
            for w in c.levels.windows(2) {
                assert_relative_eq!(w[1].area / w[0].area, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn column_dimension_examples() {
        let d = dimension_estimate(&Parameter::ratio(2, 3).unwrap(), 1, 10).unwrap();
        assert_relative_eq!(d.slope, 5f64.ln() / 3f64.ln(), epsilon = 1e-10);
        assert!(d.max_residual < 1e-10);
        let d = dimension_estimate(&p(0.3), 1, 10).unwrap();
        assert_relative_eq!(d.slope, 1.0, epsilon = 1e-10);
        assert_eq!(d.reference, 1.0);
        let d = dimension_estimate(&p(0.9), 1, 10).unwrap();
        assert_relative_eq!(d.slope, 7.8f64.ln() / 3f64.ln(), epsilon = 1e-10);
        assert!((0.0..=2.0).contains(&d.slope));
    }

    #[test]
    fn dimension_errors() {
        assert!(dimension_estimate(&p(0.6), 3, 3).is_err());
        assert!(dimension_estimate(&p(0.6), 0, 3).is_err());
        assert!(least_squares(&[(1.0, 2.0)]).is_err());
        assert!(least_squares(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn dimension_continuous_across_half() {
        let below = dimension_estimate(&p(0.5), 1, 10).unwrap().slope;
        let above = dimension_estimate(&p(0.5 + 1e-9), 1, 10).unwrap().slope;
        assert!((below - above).abs() < 1e-6);
    }

    #[test]
    fn chaos_weights() {
        let g = ChaosGame::new(&Parameter::ratio(2, 3).unwrap()).unwrap();
        let w = g.weights();
        assert_relative_eq!(w[0], 0.4, epsilon = 1e-15);
        assert_relative_eq!(w[1], 0.2, epsilon = 1e-15);
        assert_relative_eq!(w[2], 0.4, epsilon = 1e-15);
        assert!(matches!(ChaosGame::new(&p(0.5)), Err(Error::UnsupportedRegion(_))));
        assert!(matches!(chaos_game(&p(0.3), 10, 0, 1), Err(Error::UnsupportedRegion(_))));
    }

    #[test]
    fn forced_fixed_point() {
        let g = ChaosGame::new(&p(0.7)).unwrap().burn_in(0).start((1.0, 1.0));
        let s = g.run_with_choices(1, [2]);
        assert_eq!(s.points, [(1.0, 1.0)]);
    }

    #[test]
    fn chaos_points_in_unit_square() {
        let s = chaos_game(&p(0.85), 5000, 30, 3).unwrap();
        assert_eq!(s.len(), 5000);
        assert!(s
            .points
            .iter()
            .all(|&(x, y)| (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)));
        assert_eq!(s.steps[0], 30);
    }

    #[test]
    fn chains_independent_of_thread_count() {
        let g = ChaosGame::new(&p(0.7)).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| g.run_chains(6, 500, 9))
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn empty_cells_within_bound() {
        let s = chaos_game(&Parameter::ratio(2, 3).unwrap(), 2000, 30, 5).unwrap();
        let r = mass_bound_check(&s, 2, DEFAULT_MASS_SLACK).unwrap();
        assert!(r.cells().filter(|c| c.count == 0).all(|c| c.ratio == 0.0));
        assert_eq!(r.cells().map(|c| c.count).sum::<u64>(), 2000);
        assert!(mass_bound_check(&s, 0, 0.2).is_err());
    }

    #[test]
    fn left_branch_mass() {
        let s = chaos_game(&Parameter::ratio(2, 3).unwrap(), 100_000, 30, 7).unwrap();
        let r = mass_bound_check(&s, 1, DEFAULT_MASS_SLACK).unwrap();
        assert!((r.column_mass(0) - 0.4).abs() < 0.01, "{}", r.column_mass(0));
    }
}
