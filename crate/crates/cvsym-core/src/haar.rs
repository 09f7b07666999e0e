//! Haar-distributed random matrices on the unitary and orthogonal groups.
//!
//! Both samplers orthonormalize a Gaussian (Ginibre) matrix by QR and fix
//! the phases of the triangular factor's diagonal so the result is exactly
//! Haar; plain QR of a Gaussian matrix is not (the diagonal phase
//! convention of the QR routine biases the distribution).

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-random `dim x dim` unitary, returned as (real part, imaginary part).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> (DMatrix<f64>, DMatrix<f64>) {
    assert!(dim >= 1, "dimension must be positive");
    let ginibre = DMatrix::from_fn(dim, dim, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Multiply column j by r_jj / |r_jj| so the triangular factor would
    // have a positive real diagonal.
    for j in 0..dim {
        let d: Complex<f64> = r[(j, j)];
        let norm = d.norm();
        let phase = if norm == 0.0 {
            Complex::new(1.0, 0.0)
        } else {
            d / norm
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    let re = q.map(|z| z.re);
    let im = q.map(|z| z.im);
    (re, im)
}

/// Haar-random `dim x dim` real orthogonal matrix, drawn from the full
/// group O(dim) (both determinant components).
pub fn haar_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    assert!(dim >= 1, "dimension must be positive");
    let ginibre = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Max-norm deviation of `m` from orthogonality, `max |m^T m - I|`.
pub fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let dim = m.nrows();
    let gram = m.transpose() * m;
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}
