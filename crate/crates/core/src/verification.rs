//! Feasibility certification on a grid, bound diagnostics, the four-sample
//! counterexample to the earlier necessary radius, and a Monte Carlo check
//! of the kriging error formula.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_model::{
    compute_r_max, compute_r_min, covariance_unchecked, estimation_error, gram_matrix, FieldParams, Kernel,
    KrigingFactor, PlanningQuery,
};
use crate::geometry::{distance, Environment, Point2, PointIndex};

/// Constant of the per-sample packing bound: `|S| <= 3.05 area / (pi r_min^2)`.
pub const SAMPLE_BOUND_FACTOR: f64 = 3.05;
/// Constant of the tour upper bound: `len <= 15.6 area / (pi r_min)`.
pub const TOUR_BOUND_FACTOR: f64 = 15.6;
/// Constant of the tour lower bound: `len* >= (2/9) area / (pi r_max)`.
pub const TOUR_LOWER_FACTOR: f64 = 2.0 / 9.0;
/// Constant of the tour approximation ratio `70.2 r_max / r_min`.
pub const TOUR_RATIO_FACTOR: f64 = 70.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub feasible: bool,
    pub worst_point: Point2,
    /// Upper bound on the estimation error at `worst_point`.
    pub worst_error: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub grid_step: f64,
    pub points_checked: usize,
}

/// Grid check of `f_x(S) <= delta` over `env` with the exact kernel.
///
/// Each grid point is scored with a subset of `samples`, which can only
/// overestimate the error. A cheap neighbourhood (samples within `2 r_min`
/// plus the nearest one) is tried first; points it cannot certify are
/// rescored with every sample within `r_max`. The reported error is the
/// bound that settled each point, so `feasible` is sound but `worst_error`
/// may exceed the true maximum on infeasible inputs.
pub fn check_feasibility(
    env: &Environment,
    samples: &[Point2],
    params: &FieldParams,
    delta: f64,
    grid_step: f64,
) -> Result<FeasibilityResult> {
    let grid = env.grid_points(grid_step)?;
    let s0 = params.sigma0_sq();
    let tolerance = 1e-9 * s0;
    let limit = delta + tolerance;
    let r_max = compute_r_max(params);
    let screen = compute_r_min(params, delta).map_or(r_max, |r| (2.0 * r).min(r_max));

    let mut result = FeasibilityResult {
        feasible: true,
        worst_point: grid.first().copied().unwrap_or_else(|| env.bbox().center()),
        worst_error: 0.0,
        delta,
        tolerance,
        grid_step,
        points_checked: grid.len(),
    };
    if grid.is_empty() {
        return Ok(result);
    }
    if samples.is_empty() {
        result.worst_error = s0;
        result.feasible = s0 <= limit;
        return Ok(result);
    }

    let index = PointIndex::new(samples, screen.max(grid_step));
    let bb = env.bbox();
    let block = screen.max(grid_step);
    let nx = ((bb.width() / block).floor() as usize) + 1;
    let mut order: Vec<usize> = (0..grid.len()).collect();
    let key = |p: Point2| -> usize {
        let i = (((p.x - bb.min.x) / block).floor().max(0.0) as usize).min(nx - 1);
        let j = ((p.y - bb.min.y) / block).floor().max(0.0) as usize;
        j * nx + i
    };
    order.sort_by_key(|&g| (key(grid[g]), g));
    let mut blocks: Vec<&[usize]> = Vec::new();
    let mut start = 0;
    for end in 1..=order.len() {
        if end == order.len() || key(grid[order[end]]) != key(grid[order[start]]) {
            blocks.push(&order[start..end]);
            start = end;
        }
    }

    let scored: Vec<(f64, usize)> = blocks
        .par_iter()
        .map(|members| score_block(members, &grid, samples, &index, params, screen, r_max, limit))
        .collect::<Result<Vec<_>>>()?;
    let (worst_error, worst_idx) = scored
        .into_iter()
        .fold((f64::NEG_INFINITY, usize::MAX), |best, cur| {
            if cur.0 > best.0 || (cur.0 == best.0 && cur.1 < best.1) {
                cur
            } else {
                best
            }
        });
    result.worst_error = worst_error;
    result.worst_point = grid[worst_idx];
    result.feasible = worst_error <= limit;
    Ok(result)
}

/// Worst error bound over one block and the grid index where it occurs.
#[allow(clippy::too_many_arguments)]
fn score_block(
    members: &[usize],
    grid: &[Point2],
    samples: &[Point2],
    index: &PointIndex,
    params: &FieldParams,
    screen: f64,
    r_max: f64,
    limit: f64,
) -> Result<(f64, usize)> {
    let (mut lo, mut hi) = (grid[members[0]], grid[members[0]]);
    for &g in members {
        let p = grid[g];
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let center = Point2::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
    let half_diag = 0.5 * distance(lo, hi);
    let mut nearest: Vec<usize> = members
        .iter()
        .filter_map(|&g| index.nearest(grid[g]).map(|(i, _)| i))
        .collect();
    nearest.sort_unstable();
    nearest.dedup();

    let subset = |radius: f64| -> Vec<Point2> {
        let mut ids = nearest.clone();
        index.for_each_within(center, radius + half_diag, |i, _| ids.push(i));
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter().map(|i| samples[i]).collect()
    };

    let near = KrigingFactor::new(&subset(screen), params, Kernel::Exact)?;
    let mut wide: Option<KrigingFactor> = None;
    let mut worst = (f64::NEG_INFINITY, usize::MAX);
    for &g in members {
        let x = grid[g];
        let mut e = near.error_at(x);
        if e > limit && screen < r_max {
            if wide.is_none() {
                wide = Some(KrigingFactor::new(&subset(r_max), params, Kernel::Exact)?);
            }
            e = e.min(wide.as_ref().expect("just built").error_at(x));
        }
        if e > worst.0 || (e == worst.0 && g < worst.1) {
            worst = (e, g);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// `area / (pi r_max^2)`: no feasible set is smaller.
    pub sample_lower_bound: f64,
    pub sample_upper_bound: f64,
    /// `(2/9) area / (pi r_max)`: no feasible tour is shorter.
    pub tour_lower_bound: f64,
    pub tour_upper_bound: f64,
    /// `|S| / max(1, ceil(sample_lower_bound))`.
    pub realized_sample_ratio: f64,
    /// Raw tour length over `tour_lower_bound`, when a tour was given.
    pub realized_tour_ratio: Option<f64>,
    pub alpha_samples: f64,
    pub alpha_tour: f64,
}

impl BoundsReport {
    /// The sample lower bound rounded up to a whole, non-zero count.
    pub fn sample_lower_count(&self) -> usize {
        (self.sample_lower_bound.ceil() as usize).max(1)
    }
}

pub fn compute_bounds(
    env: &Environment,
    query: &PlanningQuery,
    n_samples: usize,
    raw_tour_length: Option<f64>,
) -> BoundsReport {
    use std::f64::consts::PI;
    let area = env.area();
    let (r_min, r_max) = (query.r_min, query.r_max);
    let sample_lower_bound = area / (PI * r_max * r_max);
    let tour_lower_bound = TOUR_LOWER_FACTOR * area / (PI * r_max);
    let lower_count = (sample_lower_bound.ceil()).max(1.0);
    BoundsReport {
        sample_lower_bound,
        sample_upper_bound: SAMPLE_BOUND_FACTOR * area / (PI * r_min * r_min),
        tour_lower_bound,
        tour_upper_bound: TOUR_BOUND_FACTOR * area / (PI * r_min),
        realized_sample_ratio: n_samples as f64 / lower_count,
        realized_tour_ratio: raw_tour_length.map(|len| len / tour_lower_bound.max(f64::EPSILON)),
        alpha_samples: 3.0 * r_max * r_max / (r_min * r_min),
        alpha_tour: TOUR_RATIO_FACTOR * r_max / r_min,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    /// `L sqrt(-ln(1 - delta / sigma0^2))`, the earlier claimed radius.
    pub rhs_bound: f64,
    /// Distance of the four samples from the test point.
    pub r_used: f64,
    pub delta: f64,
    pub error_value: f64,
    /// True when the error is below `delta` although every sample lies
    /// beyond the claimed radius.
    pub contradiction: bool,
}

/// Unit field, `delta = 0.5`, four samples on the axes just beyond the
/// radius the earlier analysis claimed was necessary.
pub fn counterexample_check() -> CounterexampleReport {
    let params = FieldParams::new(1.0, 1.0, 1.0).expect("unit parameters");
    let delta = 0.5;
    let rhs_bound = params.length_scale() * (-(1.0 - delta / params.sigma0_sq()).ln()).sqrt();
    let r_used = rhs_bound + 0.1;
    let samples = [
        Point2::new(r_used, 0.0),
        Point2::new(-r_used, 0.0),
        Point2::new(0.0, r_used),
        Point2::new(0.0, -r_used),
    ];
    let error_value = estimation_error(Point2::new(0.0, 0.0), &samples, &params, Kernel::Exact)
        .expect("four distinct noisy samples factor");
    CounterexampleReport {
        rhs_bound,
        r_used,
        delta,
        error_value,
        contradiction: error_value < delta && r_used > rhs_bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub empirical_mse: f64,
    pub standard_error: f64,
    pub trials: usize,
    pub seed: u64,
}

pub const MONTE_CARLO_MIN_TRIALS: usize = 1000;
pub const MONTE_CARLO_MAX_SAMPLES: usize = 200;
const CHUNK: usize = 4096;

/// Simulates the field at `x` and at `samples` (exact kernel), adds
/// observation noise, applies the kriging predictor and returns the mean
/// squared prediction error. Trials run in fixed chunks, each on its own
/// ChaCha stream, so the result depends only on `seed`.
pub fn monte_carlo_mse(
    x: Point2,
    samples: &[Point2],
    params: &FieldParams,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if trials < MONTE_CARLO_MIN_TRIALS {
        return Err(Error::Domain(format!(
            "need at least {MONTE_CARLO_MIN_TRIALS} trials, got {trials}"
        )));
    }
    if samples.len() > MONTE_CARLO_MAX_SAMPLES {
        return Err(Error::Domain(format!(
            "at most {MONTE_CARLO_MAX_SAMPLES} samples supported, got {}",
            samples.len()
        )));
    }
    let n = samples.len();
    let s0 = params.sigma0_sq();
    let noise_sd = params.noise_var().sqrt();

    // joint prior of (Z(x), Z(s_1), ..., Z(s_n)), noise-free
    let mut sites = Vec::with_capacity(n + 1);
    sites.push(x);
    sites.extend_from_slice(samples);
    let mut joint = DMatrix::from_fn(n + 1, n + 1, |i, j| {
        covariance_unchecked(distance(sites[i], sites[j]), params, Kernel::Exact)
    });
    let chol = match joint.clone().cholesky() {
        Some(c) => c,
        None => {
            // coincident sites make the prior singular; a tiny jitter keeps it usable
            for i in 0..=n {
                joint[(i, i)] += 1e-10 * s0;
            }
            joint
                .cholesky()
                .ok_or_else(|| Error::SingularSystem("joint prior covariance is not positive definite".into()))?
        }
    };
    let lower = chol.l();
    let weights: DVector<f64> = if n == 0 {
        DVector::zeros(0)
    } else {
        KrigingFactor::new(samples, params, Kernel::Exact)?.weights(x)
    };

    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<(usize, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(trials - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut z = DVector::<f64>::zeros(n + 1);
            let (mut mean, mut m2) = (0.0, 0.0);
            for t in 0..count {
                for v in z.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                let field = &lower * &z;
                let mut estimate = 0.0;
                for i in 0..n {
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    estimate += weights[i] * (field[i + 1] + noise_sd * eps);
                }
                let sq = (field[0] - estimate).powi(2);
                let delta = sq - mean;
                mean += delta / (t + 1) as f64;
                m2 += delta * (sq - mean);
            }
            (count, mean, m2)
        })
        .collect();

    // pairwise combination in chunk order
    let (mut count, mut mean, mut m2) = (0usize, 0.0f64, 0.0f64);
    for (c, mu, s) in partial {
        let total = count + c;
        let d = mu - mean;
        mean += d * c as f64 / total as f64;
        m2 += s + d * d * (count as f64) * (c as f64) / total as f64;
        count = total;
    }
    let variance = m2 / (count - 1) as f64;
    Ok(MonteCarloEstimate {
        empirical_mse: mean,
        standard_error: (variance / count as f64).sqrt(),
        trials,
        seed,
    })
}

/// Direct `sigma0^2 - b' C^-1 b` through a dense solve; a second route to
/// the error used to cross-check the factored forward solve.
pub fn estimation_error_dense(x: Point2, samples: &[Point2], params: &FieldParams) -> Result<f64> {
    if samples.is_empty() {
        return Ok(params.sigma0_sq());
    }
    let gram = gram_matrix(samples, params, Kernel::Exact);
    let b = DVector::from_iterator(
        samples.len(),
        samples
            .iter()
            .map(|&s| covariance_unchecked(distance(x, s), params, Kernel::Exact)),
    );
    let w = gram
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SingularSystem("dense solve failed".into()))?;
    Ok(params.sigma0_sq() - b.dot(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_model::single_sample_error;
    use crate::geometry::hexagonal_tiling;

    fn survey_query(fraction: f64) -> PlanningQuery {
        PlanningQuery::from_fraction(FieldParams::soil_survey(), fraction).unwrap()
    }

    #[test]
    fn counterexample_constants() {
        let r = counterexample_check();
        assert!((r.rhs_bound - 0.83255461).abs() < 1e-8);
        assert!((r.r_used - 0.93255461).abs() < 1e-8);
        assert!((r.error_value - 0.443771).abs() < 1e-5);
        assert!(r.contradiction);
    }

    #[test]
    fn empty_set_is_infeasible_at_prior_variance() {
        let q = survey_query(0.3);
        let env = Environment::rect(10.0, 10.0).unwrap();
        let res = check_feasibility(&env, &[], &q.params, q.delta, 1.0).unwrap();
        assert!(!res.feasible);
        assert_eq!(res.worst_error, q.params.sigma0_sq());
        assert_eq!(res.points_checked, 121);
    }

    #[test]
    fn hexagonal_cover_is_feasible() {
        let q = survey_query(0.2);
        let env = Environment::rect(40.0, 25.0).unwrap();
        let mut pts = hexagonal_tiling(&env, q.r_min).unwrap();
        for p in pts.iter_mut() {
            *p = env.project_to(*p);
        }
        let res = check_feasibility(&env, &pts, &q.params, q.delta, q.r_min / 20.0).unwrap();
        assert!(res.feasible, "{res:?}");
        assert!(res.worst_error <= q.delta + res.tolerance);
    }

    #[test]
    fn single_sample_fails_far_away() {
        let q = survey_query(0.3);
        let env = Environment::rect(4.0 * q.r_min, 4.0 * q.r_min).unwrap();
        let s = [Point2::new(0.0, 0.0)];
        let res = check_feasibility(&env, &s, &q.params, q.delta, q.r_min / 10.0).unwrap();
        assert!(!res.feasible);
        assert!(distance(res.worst_point, s[0]) > q.r_min);
        // the far corner is the worst place and is scored exactly with one sample
        let corner = Point2::new(4.0 * q.r_min, 4.0 * q.r_min);
        assert_eq!(res.worst_point, corner);
        let want = single_sample_error(distance(corner, s[0]), &q.params);
        assert!((res.worst_error - want).abs() < 1e-9 * q.params.sigma0_sq());
    }

    #[test]
    fn screening_agrees_with_full_evaluation() {
        // on a small instance compare against every sample at every grid point
        let q = survey_query(0.3);
        let env = Environment::rect(30.0, 20.0).unwrap();
        let pts: Vec<Point2> = hexagonal_tiling(&env, 1.3 * q.r_min)
            .unwrap()
            .into_iter()
            .map(|p| env.project_to(p))
            .collect();
        let step = 1.0;
        let res = check_feasibility(&env, &pts, &q.params, q.delta, step).unwrap();
        let full = KrigingFactor::new(&pts, &q.params, Kernel::Exact).unwrap();
        let grid = env.grid_points(step).unwrap();
        let true_worst = grid.iter().map(|&g| full.error_at(g)).fold(0.0, f64::max);
        // subsets never underestimate
        assert!(res.worst_error >= true_worst - 1e-9);
        assert_eq!(res.feasible, true_worst <= q.delta + res.tolerance);
    }

    #[test]
    fn bounds_for_small_square() {
        let q = survey_query(0.3);
        let env = Environment::rect(20.0, 20.0).unwrap();
        let b = compute_bounds(&env, &q, 3, Some(40.0));
        let r_max = 6f64.sqrt() * 8.33;
        assert!((b.sample_lower_bound - 400.0 / (std::f64::consts::PI * r_max * r_max)).abs() < 1e-12);
        assert!((b.sample_lower_bound - 0.306).abs() < 1e-3);
        assert_eq!(b.sample_lower_count(), 1);
        assert_eq!(b.realized_sample_ratio, 3.0);
        assert!((b.tour_upper_bound - 15.6 * 400.0 / (std::f64::consts::PI * q.r_min)).abs() < 1e-9);
        assert!((b.realized_tour_ratio.unwrap() - 40.0 / b.tour_lower_bound).abs() < 1e-12);
        assert!((b.alpha_samples - 3.0 * (r_max / q.r_min).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn dense_and_factored_errors_agree() {
        let p = FieldParams::new(2.0, 1.5, 0.1).unwrap();
        let s = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.5), Point2::new(-0.7, 1.2)];
        let x = Point2::new(0.3, 0.3);
        let a = estimation_error(x, &s, &p, Kernel::Exact).unwrap();
        let b = estimation_error_dense(x, &s, &p).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_prior_and_reproducibility() {
        let p = FieldParams::new(1.0, 1.0, 0.25).unwrap();
        let x = Point2::new(0.0, 0.0);
        let prior = monte_carlo_mse(x, &[], &p, 20_000, 4).unwrap();
        assert!((prior.empirical_mse - 1.0).abs() < 3.0 * prior.standard_error);
        let s = [Point2::new(0.5, 0.0)];
        let a = monte_carlo_mse(x, &s, &p, 10_000, 99).unwrap();
        let b = monte_carlo_mse(x, &s, &p, 10_000, 99).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_mse(x, &s, &p, 10, 1).is_err());
    }
}
