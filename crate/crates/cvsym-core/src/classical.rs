//! Classical orthogonally invariant sequences: sphere marginals, their
//! total-variation distance to the Gaussian limit, and samplers for
//! rotation-invariant data (scale mixtures of i.i.d. normals).
//!
//! The finite-`n` object is the uniform distribution on the sphere of
//! radius `sqrt(n)` in `R^n` (unit variance per coordinate); the marginal
//! law of its first `k` coordinates has density proportional to
//! `(1 - |u|^2/n)^{(n-k-2)/2}` and converges to the standard normal at
//! rate `O(k/n)` in variation distance.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::stats::{adaptive_simpson, normal_pdf};

/// Marginal of the first `retained` coordinates of the uniform law on the
/// radius-`sqrt(dimension)` sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereMarginal {
    dimension: usize,
    retained: usize,
}

impl SphereMarginal {
    pub fn new(dimension: usize, retained: usize) -> Result<Self> {
        if retained == 0 || retained + 2 > dimension {
            return Err(Error::invalid(format!(
                "need 1 <= retained <= dimension - 2, got retained {retained} of {dimension}"
            )));
        }
        Ok(Self {
            dimension,
            retained,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn retained(&self) -> usize {
        self.retained
    }

    /// Log of the normalization constant,
    /// `Gamma(n/2) / (Gamma((n-k)/2) (n pi)^{k/2})`.
    fn log_norm(&self) -> f64 {
        let n = self.dimension as f64;
        let k = self.retained as f64;
        ln_gamma(n / 2.0) - ln_gamma((n - k) / 2.0)
            - 0.5 * k * (n * std::f64::consts::PI).ln()
    }

    /// Density at a point of `R^retained`; zero outside `|u|^2 <= n`.
    pub fn density(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.retained {
            return Err(Error::dims(format!(
                "expected a point in R^{}, got {} coordinates",
                self.retained,
                point.len()
            )));
        }
        Ok(self.density_at_radius2(point.iter().map(|u| u * u).sum()))
    }

    fn density_at_radius2(&self, radius2: f64) -> f64 {
        let n = self.dimension as f64;
        if radius2 >= n {
            return 0.0;
        }
        let exponent = (n - self.retained as f64 - 2.0) / 2.0;
        (self.log_norm() + exponent * (-radius2 / n).ln_1p()).exp()
    }
}

/// Density of [`SphereMarginal`] as a free function.
pub fn sphere_marginal_density(dimension: usize, retained: usize, point: &[f64]) -> Result<f64> {
    SphereMarginal::new(dimension, retained)?.density(point)
}

/// Locate the sign changes of `f` on `[a, b]` by grid scan plus bisection.
fn sign_changes(f: &impl Fn(f64) -> f64, a: f64, b: f64, grid: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (b - a) / grid as f64;
    let mut x0 = a;
    let mut f0 = f(x0);
    for i in 1..=grid {
        let x1 = a + step * i as f64;
        let f1 = f(x1);
        if f0.signum() != f1.signum() {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == f0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// Upper end of the quadrature window: past this point both the sphere
/// marginal (bounded by its Gaussian envelope `exp(-u^2/4)` for the
/// dimensions accepted here) and the normal carry less than 1e-50 of
/// mass, far below the 1e-8 accuracy target.
fn quadrature_edge(dimension: usize) -> f64 {
    (dimension as f64).sqrt().min(16.0)
}

/// Integrate `|f|` on `[a, b]` given that `f` only changes sign at the
/// listed points: integrate each smooth piece and accumulate magnitudes.
fn integrate_abs(f: &impl Fn(f64) -> f64, a: f64, b: f64, roots: &[f64], tol: f64) -> f64 {
    let mut cuts = vec![a];
    cuts.extend(roots.iter().copied().filter(|r| *r > a && *r < b));
    cuts.push(b);
    let piece_tol = tol / cuts.len() as f64;
    cuts.windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], piece_tol).abs())
        .sum()
}

/// Total variation distance `int |p_sphere - p_gauss|` between the sphere
/// marginal and the standard normal on `R^retained`, for `retained` 1 or 2.
///
/// Computed by deterministic quadrature of the density difference (radial
/// reduction for `retained = 2`), with the region outside the sphere's
/// support added in closed form. Absolute error below 1e-8.
pub fn tv_to_gaussian(dimension: usize, retained: usize) -> Result<f64> {
    if !(retained == 1 || retained == 2) {
        return Err(Error::invalid(
            "variation distance implemented for 1 or 2 retained coordinates",
        ));
    }
    if dimension < retained + 3 {
        return Err(Error::invalid(format!(
            "need dimension >= retained + 3, got {dimension}"
        )));
    }
    let marginal = SphereMarginal::new(dimension, retained)?;
    let edge = quadrature_edge(dimension);
    let tol = 1e-10;

    match retained {
        1 => {
            let diff = move |u: f64| marginal.density_at_radius2(u * u) - normal_pdf(u);
            let roots = sign_changes(&diff, 0.0, edge, 4096);
            let inside = integrate_abs(&diff, 0.0, edge, &roots, tol);
            // Beyond the window only the normal carries appreciable mass
            // (the sphere density is zero past its support and below
            // 1e-50 past u = 16): both tails together are erfc(edge/sqrt 2).
            Ok(2.0 * inside + erfc(edge / std::f64::consts::SQRT_2))
        }
        2 => {
            let tau = 2.0 * std::f64::consts::PI;
            let diff = move |r: f64| {
                tau * r * (marginal.density_at_radius2(r * r) - (-0.5 * r * r).exp() / tau)
            };
            let roots = sign_changes(&diff, 0.0, edge, 4096);
            let inside = integrate_abs(&diff, 0.0, edge, &roots, tol);
            // Radial Gaussian mass beyond the window.
            Ok(inside + (-0.5 * edge * edge).exp())
        }
        _ => unreachable!(),
    }
}

/// One row of the classical convergence sweep.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalSweepRow {
    pub dimension: usize,
    pub retained: usize,
    pub tv: f64,
    /// `tv * n / k`, the normalization under which the distance is bounded.
    pub tv_scaled: f64,
}

/// Sweep the variation distance over dimensions, sorted ascending.
pub fn classical_sweep(dimensions: &[usize], retained: usize) -> Result<Vec<ClassicalSweepRow>> {
    let mut dims = dimensions.to_vec();
    dims.sort_unstable();
    dims.dedup();
    dims.iter()
        .map(|&n| {
            let tv = tv_to_gaussian(n, retained)?;
            Ok(ClassicalSweepRow {
                dimension: n,
                retained,
                tv,
                tv_scaled: tv * n as f64 / retained as f64,
            })
        })
        .collect()
}

/// Law of the radius of an orthogonally invariant sample.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusLaw {
    /// All samples on the sphere of this radius.
    Fixed(f64),
    /// `sigma * chi(dimension)`: rows are i.i.d. `N(0, sigma^2)`.
    ChiScaled(f64),
    /// Mixture of `ChiScaled` components with the given (weight, sigma)
    /// pairs; weights need not be normalized.
    ScaleMixture(Vec<(f64, f64)>),
}

impl RadiusLaw {
    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        match self {
            RadiusLaw::Fixed(r) => {
                if !ok(*r) {
                    return Err(Error::invalid("fixed radius must be non-negative"));
                }
            }
            RadiusLaw::ChiScaled(sigma) => {
                if !ok(*sigma) {
                    return Err(Error::invalid("scale must be non-negative"));
                }
            }
            RadiusLaw::ScaleMixture(parts) => {
                if parts.is_empty() {
                    return Err(Error::invalid("scale mixture must not be empty"));
                }
                let mut total = 0.0;
                for (w, sigma) in parts {
                    if !ok(*w) || !ok(*sigma) {
                        return Err(Error::invalid(
                            "mixture weights and scales must be non-negative",
                        ));
                    }
                    total += w;
                }
                if total <= 0.0 {
                    return Err(Error::invalid("mixture weights must not all vanish"));
                }
            }
        }
        Ok(())
    }

    fn sample_radius<R: Rng + ?Sized>(&self, dimension: usize, rng: &mut R) -> f64 {
        match self {
            RadiusLaw::Fixed(r) => *r,
            RadiusLaw::ChiScaled(sigma) => {
                let chi2 = ChiSquared::new(dimension as f64).expect("positive dof");
                sigma * chi2.sample(rng).sqrt()
            }
            RadiusLaw::ScaleMixture(parts) => {
                let total: f64 = parts.iter().map(|(w, _)| w).sum();
                let mut pick = rng.random::<f64>() * total;
                let mut sigma = parts.last().expect("non-empty").1;
                for (w, s) in parts {
                    if pick < *w {
                        sigma = *s;
                        break;
                    }
                    pick -= w;
                }
                RadiusLaw::ChiScaled(sigma).sample_radius(dimension, rng)
            }
        }
    }
}

/// Draw `count` orthogonally invariant rows in `R^dimension`: a radius
/// sample times a Haar-uniform direction (a normalized Gaussian vector).
pub fn sample_orthogonally_invariant<R: Rng + ?Sized>(
    dimension: usize,
    radius_law: &RadiusLaw,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if dimension == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    radius_law.validate()?;
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let mut direction: Vec<f64> = (0..dimension)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let mut norm: f64 = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        while norm < 1e-300 {
            direction = (0..dimension)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        let radius = radius_law.sample_radius(dimension, rng);
        rows.push(direction.iter().map(|v| v * radius / norm).collect());
    }
    Ok(rows)
}

/// Apply the same orthogonal matrix to both vectors (the joint
/// symmetrization step). The matrix must be orthogonal to 1e-10.
pub fn rotate_joint(
    x: &[f64],
    y: &[f64],
    rotation: &DMatrix<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    if y.len() != n || rotation.nrows() != n || rotation.ncols() != n {
        return Err(Error::dims(format!(
            "joint rotation needs matching sizes, got x: {}, y: {}, R: {}x{}",
            n,
            y.len(),
            rotation.nrows(),
            rotation.ncols()
        )));
    }
    if crate::haar::orthogonality_residual(rotation) > 1e-10 {
        return Err(Error::invalid("rotation matrix is not orthogonal"));
    }
    let xv = nalgebra::DVector::from_column_slice(x);
    let yv = nalgebra::DVector::from_column_slice(y);
    Ok(((rotation * xv).data.into(), (rotation * yv).data.into()))
}
