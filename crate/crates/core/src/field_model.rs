//! Squared-exponential covariance, kriging estimation error and the two
//! critical radii derived from them.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Point2};

/// Hyperparameters of a zero-mean stationary field observed with noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    sigma0_sq: f64,
    length_scale: f64,
    noise_var: f64,
}

impl FieldParams {
    pub fn new(sigma0_sq: f64, length_scale: f64, noise_var: f64) -> Result<Self> {
        if !(sigma0_sq > 0.0 && sigma0_sq.is_finite()) {
            return Err(Error::Domain(format!("sigma0^2 must be positive, got {sigma0_sq}")));
        }
        if !(length_scale > 0.0 && length_scale.is_finite()) {
            return Err(Error::Domain(format!("length scale must be positive, got {length_scale}")));
        }
        if !(noise_var >= 0.0 && noise_var.is_finite()) {
            return Err(Error::Domain(format!("noise variance must be non-negative, got {noise_var}")));
        }
        Ok(Self {
            sigma0_sq,
            length_scale,
            noise_var,
        })
    }

    /// Organic-matter field fitted in the soil-sampling study:
    /// `L = 8.33 m`, `sigma0 = 12.87`, `sigma^2 = 0.0361`.
    pub fn soil_survey() -> Self {
        Self::new(12.87 * 12.87, 8.33, 0.0361).expect("valid constants")
    }

    pub fn sigma0_sq(&self) -> f64 {
        self.sigma0_sq
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }
}

/// Which covariance to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Kernel {
    /// `sigma0^2 * exp(-r^2 / (2 L^2))` everywhere.
    #[default]
    Exact,
    /// Same, but zero beyond the effective range `sqrt(6) L`.
    Truncated,
}

/// Error tolerance together with the radii it induces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanningQuery {
    pub params: FieldParams,
    pub delta: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl PlanningQuery {
    pub fn new(params: FieldParams, delta: f64) -> Result<Self> {
        let r_min = compute_r_min(&params, delta)?;
        Ok(Self {
            params,
            delta,
            r_min,
            r_max: compute_r_max(&params),
        })
    }

    /// Tolerance given as a fraction of the prior variance.
    pub fn from_fraction(params: FieldParams, fraction: f64) -> Result<Self> {
        Self::new(params, fraction * params.sigma0_sq())
    }

    pub fn delta_fraction(&self) -> f64 {
        self.delta / self.params.sigma0_sq()
    }
}

pub fn covariance(r: f64, params: &FieldParams, kernel: Kernel) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("distance must be non-negative, got {r}")));
    }
    Ok(covariance_unchecked(r, params, kernel))
}

#[inline]
pub(crate) fn covariance_unchecked(r: f64, params: &FieldParams, kernel: Kernel) -> f64 {
    if kernel == Kernel::Truncated && r > compute_r_max(params) {
        return 0.0;
    }
    let l = params.length_scale;
    params.sigma0_sq * (-(r * r) / (2.0 * l * l)).exp()
}

/// Effective range: the distance at which the covariance drops to 5% of
/// the prior variance.
pub fn compute_r_max(params: &FieldParams) -> f64 {
    6f64.sqrt() * params.length_scale
}

/// Error left by a single noisy sample taken exactly at the test point.
pub fn noise_floor(params: &FieldParams) -> f64 {
    params.sigma0_sq * params.noise_var / (params.sigma0_sq + params.noise_var)
}

/// Radius within which one sample drives the estimation error down to
/// `delta`: `L * sqrt(-ln((s0 - delta)(s0 + s^2) / s0^2))` with `s0 = sigma0^2`.
pub fn compute_r_min(params: &FieldParams, delta: f64) -> Result<f64> {
    let s0 = params.sigma0_sq;
    let infeasible = || Error::InfeasibleTolerance {
        delta,
        noise_floor: noise_floor(params),
        sigma0_sq: s0,
    };
    if !(delta > 0.0 && delta < s0) {
        return Err(infeasible());
    }
    let arg = (s0 - delta) * (s0 + params.noise_var) / (s0 * s0);
    if !(arg < 1.0) {
        return Err(infeasible());
    }
    Ok(params.length_scale * (-arg.ln()).sqrt())
}

/// Cross-covariance vector and noisy Gram matrix for one test point.
#[derive(Debug, Clone)]
pub struct KrigingSystem {
    pub cross_cov: DVector<f64>,
    pub gram: DMatrix<f64>,
}

impl KrigingSystem {
    pub fn build(x: Point2, samples: &[Point2], params: &FieldParams, kernel: Kernel) -> Self {
        Self {
            cross_cov: cross_covariance(x, samples, params, kernel),
            gram: gram_matrix(samples, params, kernel),
        }
    }
}

pub(crate) fn gram_matrix(samples: &[Point2], params: &FieldParams, kernel: Kernel) -> DMatrix<f64> {
    let n = samples.len();
    DMatrix::from_fn(n, n, |i, j| {
        let c = covariance_unchecked(distance(samples[i], samples[j]), params, kernel);
        if i == j {
            c + params.noise_var
        } else {
            c
        }
    })
}

fn cross_covariance(x: Point2, samples: &[Point2], params: &FieldParams, kernel: Kernel) -> DVector<f64> {
    DVector::from_iterator(
        samples.len(),
        samples
            .iter()
            .map(|&s| covariance_unchecked(distance(x, s), params, kernel)),
    )
}

/// Cholesky factor of the Gram matrix of a fixed sample set, reusable
/// across many test points.
#[derive(Debug, Clone)]
pub struct KrigingFactor {
    samples: Vec<Point2>,
    params: FieldParams,
    kernel: Kernel,
    chol: Cholesky<f64, Dyn>,
    // row-major copy of the lower factor for the forward solve
    lower_rows: Vec<f64>,
}

impl KrigingFactor {
    pub fn new(samples: &[Point2], params: &FieldParams, kernel: Kernel) -> Result<Self> {
        let gram = gram_matrix(samples, params, kernel);
        let chol = gram.cholesky().ok_or_else(|| {
            Error::SingularSystem(format!(
                "Gram matrix of {} samples is not positive definite (duplicate points with zero noise?)",
                samples.len()
            ))
        })?;
        let lower = chol.l();
        if lower.diagonal().iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::SingularSystem("degenerate Cholesky pivot".into()));
        }
        let lower_rows = lower.transpose().as_slice().to_vec();
        Ok(Self {
            samples: samples.to_vec(),
            params: *params,
            kernel,
            chol,
            lower_rows,
        })
    }

    pub fn samples(&self) -> &[Point2] {
        &self.samples
    }

    /// `phi(0) - b' C^-1 b`, clamped into `[0, sigma0^2]`.
    pub fn error_at(&self, x: Point2) -> f64 {
        let n = self.samples.len();
        let s0 = self.params.sigma0_sq;
        if n == 0 {
            return s0;
        }
        // forward substitution L y = b; then b' C^-1 b = |y|^2
        let mut y = vec![0.0; n];
        let mut explained = 0.0;
        for i in 0..n {
            let b = covariance_unchecked(distance(x, self.samples[i]), &self.params, self.kernel);
            let row = &self.lower_rows[i * n..i * n + i + 1];
            let acc = b - row[..i].iter().zip(&y[..i]).map(|(l, v)| l * v).sum::<f64>();
            let yi = acc / row[i];
            y[i] = yi;
            explained += yi * yi;
        }
        (s0 - explained).clamp(0.0, s0)
    }

    /// Kriging weights `C^-1 b` for the linear predictor at `x`.
    pub fn weights(&self, x: Point2) -> DVector<f64> {
        let b = cross_covariance(x, &self.samples, &self.params, self.kernel);
        self.chol.solve(&b)
    }
}

/// Estimation error `f_x(S)` at `x`. In truncated mode only samples within
/// the effective range enter the system, which is exact for that kernel.
pub fn estimation_error(x: Point2, samples: &[Point2], params: &FieldParams, kernel: Kernel) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain("test point must be finite".into()));
    }
    match kernel {
        Kernel::Exact => Ok(KrigingFactor::new(samples, params, kernel)?.error_at(x)),
        Kernel::Truncated => {
            let r_max = compute_r_max(params);
            let local: Vec<Point2> = samples
                .iter()
                .copied()
                .filter(|&s| distance(x, s) <= r_max)
                .collect();
            Ok(KrigingFactor::new(&local, params, kernel)?.error_at(x))
        }
    }
}

/// Closed form for a single sample at distance `rho`.
pub fn single_sample_error(rho: f64, params: &FieldParams) -> f64 {
    let s0 = params.sigma0_sq;
    let l = params.length_scale;
    s0 - s0 * s0 * (-(rho * rho) / (l * l)).exp() / (s0 + params.noise_var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> FieldParams {
        FieldParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn params_invariants() {
        assert!(FieldParams::new(0.0, 1.0, 0.0).is_err());
        assert!(FieldParams::new(1.0, 0.0, 0.0).is_err());
        assert!(FieldParams::new(1.0, 1.0, -0.1).is_err());
        assert!(FieldParams::new(1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn covariance_examples() {
        let p = FieldParams::new(2.5, 3.0, 0.1).unwrap();
        assert_eq!(covariance(0.0, &p, Kernel::Exact).unwrap(), 2.5);
        let r_max = compute_r_max(&p);
        // sqrt(6) L gives exp(-3) = 4.98%, the customary rounding of 5%
        let at_range = covariance(r_max, &p, Kernel::Exact).unwrap();
        assert_relative_eq!(at_range, 2.5 * (-3f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(at_range, 0.05 * 2.5, max_relative = 5e-3);
        assert_relative_eq!(
            covariance(1.0, &FieldParams::new(1.0, 1.0, 0.0).unwrap(), Kernel::Exact).unwrap(),
            0.606_530_7,
            epsilon = 1e-7
        );
        assert_eq!(covariance(r_max * 1.0001, &p, Kernel::Truncated).unwrap(), 0.0);
        assert!(covariance(r_max, &p, Kernel::Truncated).unwrap() > 0.0);
        assert!(matches!(covariance(-1.0, &p, Kernel::Exact), Err(Error::Domain(_))));
    }

    #[test]
    fn r_max_examples() {
        assert_relative_eq!(compute_r_max(&unit()), 2.449_489_7, epsilon = 1e-7);
        let soil = FieldParams::soil_survey();
        assert_relative_eq!(compute_r_max(&soil), 20.404, epsilon = 1e-3);
    }

    #[test]
    fn noise_floor_examples() {
        assert_eq!(noise_floor(&FieldParams::new(1.0, 1.0, 0.0).unwrap()), 0.0);
        assert_relative_eq!(noise_floor(&unit()), 0.5);
        assert_relative_eq!(noise_floor(&FieldParams::soil_survey()), 0.036092, epsilon = 1e-6);
    }

    #[test]
    fn r_min_examples() {
        let soil = FieldParams::soil_survey();
        let r = compute_r_min(&soil, 0.3 * soil.sigma0_sq()).unwrap();
        assert_relative_eq!(r, 4.973, epsilon = 1e-3);
        // log argument is exactly one: a collocated sample only just reaches delta
        assert!(matches!(
            compute_r_min(&unit(), 0.5),
            Err(Error::InfeasibleTolerance { .. })
        ));
        assert!(compute_r_min(&unit(), 1.0).is_err());
        assert!(compute_r_min(&unit(), 0.0).is_err());
        // approaching the floor from above drives the radius to zero
        let near = compute_r_min(&unit(), 0.5 + 1e-12).unwrap();
        assert!(near < 1e-5);
    }

    #[test]
    fn empty_set_gives_prior() {
        let p = FieldParams::soil_survey();
        let e = estimation_error(Point2::new(3.0, 4.0), &[], &p, Kernel::Exact).unwrap();
        assert_eq!(e, p.sigma0_sq());
    }

    #[test]
    fn counterexample_value() {
        let r = 0.932_554_61;
        let s = [
            Point2::new(r, 0.0),
            Point2::new(-r, 0.0),
            Point2::new(0.0, r),
            Point2::new(0.0, -r),
        ];
        let e = estimation_error(Point2::new(0.0, 0.0), &s, &unit(), Kernel::Exact).unwrap();
        assert!((e - 0.443_771).abs() < 1e-5, "{e}");
    }

    #[test]
    fn single_sample_at_r_min_hits_delta() {
        let p = FieldParams::new(2.0, 1.7, 0.3).unwrap();
        let delta = 0.9;
        let r = compute_r_min(&p, delta).unwrap();
        let e = estimation_error(Point2::new(0.0, 0.0), &[Point2::new(r, 0.0)], &p, Kernel::Exact).unwrap();
        assert_relative_eq!(e, delta, max_relative = 1e-9);
        assert_relative_eq!(single_sample_error(r, &p), delta, max_relative = 1e-12);
    }

    #[test]
    fn duplicates_without_noise_are_singular() {
        let p = FieldParams::new(1.0, 1.0, 0.0).unwrap();
        let s = [Point2::new(1.0, 0.0), Point2::new(1.0, 0.0)];
        assert!(matches!(
            estimation_error(Point2::new(0.0, 0.0), &s, &p, Kernel::Exact),
            Err(Error::SingularSystem(_))
        ));
        // with noise the same configuration is fine
        assert!(estimation_error(Point2::new(0.0, 0.0), &s, &unit(), Kernel::Exact).is_ok());
    }

    #[test]
    fn truncated_ignores_far_samples() {
        let p = unit();
        let far = [Point2::new(10.0, 0.0)];
        let e = estimation_error(Point2::new(0.0, 0.0), &far, &p, Kernel::Truncated).unwrap();
        assert_eq!(e, 1.0);
        let near = [Point2::new(0.5, 0.0), Point2::new(0.0, 0.7)];
        let a = estimation_error(Point2::new(0.0, 0.0), &near, &p, Kernel::Truncated).unwrap();
        let b = estimation_error(Point2::new(0.0, 0.0), &near, &p, Kernel::Exact).unwrap();
        assert!((a - b).abs() < 0.05);
    }

    #[test]
    fn system_matches_factor() {
        let p = unit();
        let s = [Point2::new(0.3, 0.2), Point2::new(-0.4, 0.9)];
        let x = Point2::new(0.1, 0.1);
        let sys = KrigingSystem::build(x, &s, &p, Kernel::Exact);
        assert_relative_eq!(sys.gram[(0, 0)], 2.0);
        let w = sys.gram.clone().try_inverse().unwrap() * &sys.cross_cov;
        let direct = 1.0 - sys.cross_cov.dot(&w);
        let factor = KrigingFactor::new(&s, &p, Kernel::Exact).unwrap();
        assert_relative_eq!(factor.error_at(x), direct, epsilon = 1e-12);
        let fw = factor.weights(x);
        assert_relative_eq!((fw - w).norm(), 0.0, epsilon = 1e-12);
    }
}
