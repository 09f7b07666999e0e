//! Covariance matrices and symplectic-orthogonal (passive) transforms.
//!
//! Conventions: shot-noise units (vacuum variance 1) and interleaved
//! quadrature ordering `(x_1, p_1, x_2, p_2, ...)`. Two-party matrices
//! put all of Alice's modes first, then Bob's, with mode `i` of each side
//! forming pair `i`.
//!
//! A passive interferometer on `m` modes is an `m x m` unitary on the mode
//! operators; its phase-space representation is the `2m x 2m` real matrix
//! that is both orthogonal and symplectic. The conjugate transform flips
//! the sign of every `p` row and then every `p` column, which is exactly
//! the representation of the complex-conjugated unitary.

use nalgebra::{DMatrix, Matrix4};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::haar_unitary;

/// Tolerance for the symplectic-orthogonal group membership checks.
pub const GROUP_TOL: f64 = 1e-10;

/// Tolerance for covariance symmetry validation.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// The symplectic form `Omega`, a direct sum of `[[0, 1], [-1, 0]]` blocks.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        omega[(2 * i, 2 * i + 1)] = 1.0;
        omega[(2 * i + 1, 2 * i)] = -1.0;
    }
    omega
}

/// Permutation from interleaved ordering to block ordering
/// (all `x` quadratures, then all `p`): `S_block = P S P^T`.
pub fn block_ordering_permutation(modes: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(2 * modes, 2 * modes);
    for j in 0..modes {
        p[(j, 2 * j)] = 1.0;
        p[(modes + j, 2 * j + 1)] = 1.0;
    }
    p
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Symplectic orthogonal transforms.
// ---------------------------------------------------------------------------

/// A `2m x 2m` real matrix that is orthogonal and symplectic: the
/// phase-space action of a passive interferometer.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOrthogonal {
    modes: usize,
    entries: DMatrix<f64>,
}

impl SymplecticOrthogonal {
    /// Wrap a matrix after checking both group invariants to [`GROUP_TOL`].
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() % 2 != 0 || entries.is_empty() {
            return Err(Error::dims(format!(
                "expected a square even-dimensional matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let modes = entries.nrows() / 2;
        let s = Self { modes, entries };
        if s.orthogonality_residual() > GROUP_TOL {
            return Err(Error::invalid("matrix is not orthogonal"));
        }
        if s.symplectic_residual() > GROUP_TOL {
            return Err(Error::invalid("matrix is not symplectic"));
        }
        Ok(s)
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            modes,
            entries: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `max |S^T S - I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let gram = self.entries.transpose() * &self.entries;
        max_abs_diff(&gram, &DMatrix::identity(2 * self.modes, 2 * self.modes))
    }

    /// `max |S^T Omega S - Omega|`.
    pub fn symplectic_residual(&self) -> f64 {
        let omega = symplectic_form(self.modes);
        let twisted = self.entries.transpose() * &omega * &self.entries;
        max_abs_diff(&twisted, &omega)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from_parts(self.modes, &self.entries))
            .expect("serializable")
    }
}

/// Phase-space representation of a mode unitary `U = re + i im`, acting on
/// interleaved quadratures.
pub fn unitary_to_symplectic(re: &DMatrix<f64>, im: &DMatrix<f64>) -> Result<SymplecticOrthogonal> {
    let m = re.nrows();
    if re.ncols() != m || im.nrows() != m || im.ncols() != m || m == 0 {
        return Err(Error::dims(
            "unitary parts must be square matrices of equal size",
        ));
    }
    // U^dag U = (re^T re + im^T im) + i (re^T im - im^T re) must be I.
    let real = re.transpose() * re + im.transpose() * im;
    let imag = re.transpose() * im - im.transpose() * re;
    let unitary_residual = max_abs_diff(&real, &DMatrix::identity(m, m))
        .max(imag.iter().map(|v| v.abs()).fold(0.0, f64::max));
    if unitary_residual > GROUP_TOL {
        return Err(Error::invalid(format!(
            "input is not unitary (residual {unitary_residual:.3e})"
        )));
    }

    // x'_j + i p'_j = sum_k U_jk (x_k + i p_k): each (j, k) block is
    // [[re, -im], [im, re]].
    let mut s = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        for k in 0..m {
            s[(2 * j, 2 * k)] = re[(j, k)];
            s[(2 * j, 2 * k + 1)] = -im[(j, k)];
            s[(2 * j + 1, 2 * k)] = im[(j, k)];
            s[(2 * j + 1, 2 * k + 1)] = re[(j, k)];
        }
    }
    Ok(SymplecticOrthogonal {
        modes: m,
        entries: s,
    })
}

/// Symplectic image of a Haar-random `modes x modes` unitary.
pub fn haar_symplectic_orthogonal<R: Rng + ?Sized>(
    modes: usize,
    rng: &mut R,
) -> SymplecticOrthogonal {
    let (re, im) = haar_unitary(modes, rng);
    unitary_to_symplectic(&re, &im).expect("Haar sample is unitary")
}

/// Conjugate transform `D S D` with `D = diag(1, -1, 1, -1, ...)`: the
/// phase-space action of the conjugated unitary.
pub fn conjugate_transform(s: &SymplecticOrthogonal) -> SymplecticOrthogonal {
    let dim = 2 * s.modes;
    let mut entries = s.entries.clone();
    for i in 0..dim {
        for j in 0..dim {
            // Sign flips on odd (p) rows and odd (p) columns compose.
            if (i + j) % 2 == 1 {
                entries[(i, j)] = -entries[(i, j)];
            }
        }
    }
    SymplecticOrthogonal {
        modes: s.modes,
        entries,
    }
}

// ---------------------------------------------------------------------------
// Covariance matrices.
// ---------------------------------------------------------------------------

/// A `2m x 2m` real symmetric covariance matrix in shot-noise units,
/// interleaved quadrature ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    modes: usize,
    entries: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    modes: usize,
    ordering: String,
    entries: Vec<f64>,
}

impl MatrixJson {
    fn from_parts(modes: usize, entries: &DMatrix<f64>) -> Self {
        MatrixJson {
            modes,
            ordering: "interleaved".into(),
            entries: entries.transpose().as_slice().to_vec(), // row-major
        }
    }
}

impl CovarianceMatrix {
    /// Wrap a matrix after checking shape and symmetry to [`SYMMETRY_TOL`].
    pub fn new(modes: usize, entries: DMatrix<f64>) -> Result<Self> {
        if modes == 0 || entries.nrows() != 2 * modes || entries.ncols() != 2 * modes {
            return Err(Error::dims(format!(
                "expected a {0}x{0} matrix for {modes} modes, got {1}x{2}",
                2 * modes,
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asym = max_abs_diff(&entries, &entries.transpose());
        if asym > SYMMETRY_TOL {
            return Err(Error::invalid(format!(
                "covariance matrix is not symmetric (residual {asym:.3e})"
            )));
        }
        Ok(Self { modes, entries })
    }

    /// Build from a row-major flat array of `4 m^2` entries.
    pub fn from_rows(modes: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != 4 * modes * modes {
            return Err(Error::dims(format!(
                "expected {} entries for {modes} modes, got {}",
                4 * modes * modes,
                rows.len()
            )));
        }
        let entries = DMatrix::from_row_slice(2 * modes, 2 * modes, rows);
        Self::new(modes, entries)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Minimum eigenvalue of the Hermitian matrix `Gamma + i Omega`,
    /// computed through its real symmetric embedding. Physical states are
    /// those with a non-negative value (up to tolerance).
    pub fn uncertainty_eigenvalue(&self) -> f64 {
        let dim = 2 * self.modes;
        let omega = symplectic_form(self.modes);
        // Hermitian A + iB >= 0 iff the real symmetric [[A, -B], [B, A]] >= 0.
        let mut embed = DMatrix::zeros(2 * dim, 2 * dim);
        embed.view_mut((0, 0), (dim, dim)).copy_from(&self.entries);
        embed.view_mut((dim, dim), (dim, dim)).copy_from(&self.entries);
        embed.view_mut((0, dim), (dim, dim)).copy_from(&(-&omega));
        embed.view_mut((dim, 0), (dim, dim)).copy_from(&omega);
        let eigen = embed.symmetric_eigen();
        eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Advisory physicality check `Gamma + i Omega >= 0` at tolerance `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.uncertainty_eigenvalue() >= -tol
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from_parts(self.modes, &self.entries))
            .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MatrixJson =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        if raw.ordering != "interleaved" {
            return Err(Error::Malformed(format!(
                "unsupported quadrature ordering {:?}",
                raw.ordering
            )));
        }
        Self::from_rows(raw.modes, &raw.entries)
    }
}

/// The three-parameter symmetrized covariance: Alice variance `X`, Bob
/// variance `Y` and correlation `Z`, assembling to
/// `[[X I, Z sigma_z], [Z sigma_z, Y I]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricCovariance {
    pub alice_variance: f64,
    pub bob_variance: f64,
    pub correlation: f64,
}

impl SymmetricCovariance {
    /// Assemble the 4x4 covariance matrix (ordering `x_A, p_A, x_B, p_B`).
    pub fn assemble(&self) -> CovarianceMatrix {
        let (x, y, z) = (self.alice_variance, self.bob_variance, self.correlation);
        let entries = Matrix4::new(
            x, 0.0, z, 0.0, //
            0.0, x, 0.0, -z, //
            z, 0.0, y, 0.0, //
            0.0, -z, 0.0, y,
        );
        CovarianceMatrix::new(2, DMatrix::from_iterator(4, 4, entries.iter().copied()))
            .expect("symmetric by construction")
    }

    /// Symplectic eigenvalues of the assembled two-mode matrix, in closed
    /// form. Physical states have both at least 1.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let (x, y, z) = (self.alice_variance, self.bob_variance, self.correlation);
        let delta = x * x + y * y - 2.0 * z * z;
        let det = (x * y - z * z).powi(2);
        let gap = (delta * delta - 4.0 * det).max(0.0).sqrt();
        let hi = ((delta + gap) / 2.0).max(0.0).sqrt();
        let lo = ((delta - gap) / 2.0).max(0.0).sqrt();
        (lo, hi)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        let (lo, _) = self.symplectic_eigenvalues();
        self.alice_variance >= 1.0 - tol && self.bob_variance >= 1.0 - tol && lo >= 1.0 - tol
    }
}

/// Average a two-party one-mode-per-side covariance to its symmetrized
/// parameters: `X = (X11 + X22)/2`, `Y = (Y11 + Y22)/2`,
/// `Z = (Z11 - Z22)/2`, reading the diagonal of each quadrature block.
pub fn symmetrize_covariance(cov: &CovarianceMatrix) -> Result<SymmetricCovariance> {
    if cov.modes != 2 {
        return Err(Error::dims(format!(
            "symmetrization reads a 4x4 two-party matrix, got {} modes",
            cov.modes
        )));
    }
    let g = &cov.entries;
    Ok(SymmetricCovariance {
        alice_variance: 0.5 * (g[(0, 0)] + g[(1, 1)]),
        bob_variance: 0.5 * (g[(2, 2)] + g[(3, 3)]),
        correlation: 0.5 * (g[(0, 2)] - g[(1, 3)]),
    })
}

/// Two-mode squeezed vacuum covariance: `Y = X`, `Z = sqrt(X^2 - 1)`.
pub fn epr_covariance(alice_variance: f64) -> Result<CovarianceMatrix> {
    if !(alice_variance >= 1.0) {
        return Err(Error::invalid(format!(
            "EPR covariance needs a variance of at least 1, got {alice_variance}"
        )));
    }
    let z = (alice_variance * alice_variance - 1.0).sqrt();
    Ok(SymmetricCovariance {
        alice_variance,
        bob_variance: alice_variance,
        correlation: z,
    }
    .assemble())
}

/// Tile a single-pair (4x4) covariance into `pairs` independent pairs over
/// `2 * pairs` modes (Alice's modes first, then Bob's, pair `i` = mode `i`
/// of each side).
pub fn replicate_pairs(block: &CovarianceMatrix, pairs: usize) -> Result<CovarianceMatrix> {
    if block.modes != 2 {
        return Err(Error::dims(format!(
            "pair replication starts from a 4x4 two-party block, got {} modes",
            block.modes
        )));
    }
    if pairs == 0 {
        return Err(Error::invalid("need at least one pair"));
    }
    let b = &block.entries;
    let dim = 4 * pairs;
    let mut entries = DMatrix::zeros(dim, dim);
    for i in 0..pairs {
        let (a, bo) = (2 * i, 2 * pairs + 2 * i);
        for q in 0..2 {
            for r in 0..2 {
                entries[(a + q, a + r)] = b[(q, r)];
                entries[(a + q, bo + r)] = b[(q, 2 + r)];
                entries[(bo + q, a + r)] = b[(2 + q, r)];
                entries[(bo + q, bo + r)] = b[(2 + q, 2 + r)];
            }
        }
    }
    CovarianceMatrix::new(2 * pairs, entries)
}

/// `pairs` EPR pairs as one two-party covariance over `2 * pairs` modes.
pub fn epr_pairs(alice_variance: f64, pairs: usize) -> Result<CovarianceMatrix> {
    replicate_pairs(&epr_covariance(alice_variance)?, pairs)
}

/// Embed `S` on Alice's modes and its conjugate on Bob's as one block
/// transform on a two-party covariance.
fn conjugate_pair_transform(s: &SymplecticOrthogonal) -> DMatrix<f64> {
    let half = 2 * s.modes;
    let conj = conjugate_transform(s);
    let mut full = DMatrix::zeros(2 * half, 2 * half);
    full.view_mut((0, 0), (half, half)).copy_from(&s.entries);
    full.view_mut((half, half), (half, half))
        .copy_from(&conj.entries);
    full
}

/// Residual of conjugate-rotation invariance:
/// `max |(S (+) S*) Gamma (S (+) S*)^T - Gamma|`.
pub fn check_conjugate_invariance(
    cov: &CovarianceMatrix,
    s: &SymplecticOrthogonal,
) -> Result<f64> {
    if cov.modes != 2 * s.modes {
        return Err(Error::dims(format!(
            "covariance over {} modes cannot take a per-party transform on {} modes",
            cov.modes, s.modes
        )));
    }
    let full = conjugate_pair_transform(s);
    let twisted = &full * &cov.entries * full.transpose();
    Ok(max_abs_diff(&twisted, &cov.entries))
}

/// Empirical mean and standard errors of the Monte-Carlo symmetrized
/// per-pair covariance block.
#[derive(Debug, Clone)]
pub struct McSymmetrized {
    pub mean: Matrix4<f64>,
    pub std_err: Matrix4<f64>,
    pub samples: u64,
}

/// Average the per-pair 4x4 blocks `(x_Ai, p_Ai, x_Bi, p_Bi)` of a
/// two-party covariance.
pub fn mode_averaged_block(cov: &CovarianceMatrix) -> Result<Matrix4<f64>> {
    if cov.modes % 2 != 0 || cov.modes == 0 {
        return Err(Error::dims(format!(
            "two-party covariance needs an even mode count, got {}",
            cov.modes
        )));
    }
    let pairs = cov.modes / 2;
    let g = &cov.entries;
    let mut block = Matrix4::zeros();
    for i in 0..pairs {
        let idx = [2 * i, 2 * i + 1, 2 * pairs + 2 * i, 2 * pairs + 2 * i + 1];
        for q in 0..4 {
            for r in 0..4 {
                block[(q, r)] += g[(idx[q], idx[r])];
            }
        }
    }
    Ok(block / pairs as f64)
}

/// Monte-Carlo symmetrization: draw Haar passives on Alice's modes, apply
/// the conjugate pair `(S (+) S*)` congruence, and average the per-pair
/// blocks over modes and samples.
///
/// The sequential (fixed-order) accumulation makes results reproducible
/// for a given RNG stream.
pub fn mc_symmetrize<R: Rng + ?Sized>(
    cov: &CovarianceMatrix,
    samples: u64,
    rng: &mut R,
) -> Result<McSymmetrized> {
    if cov.modes % 2 != 0 || cov.modes == 0 {
        return Err(Error::dims(format!(
            "two-party covariance needs an even mode count, got {}",
            cov.modes
        )));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let pairs = cov.modes / 2;

    let mut mean = Matrix4::zeros();
    let mut m2 = Matrix4::zeros();
    for count in 1..=samples {
        let s = haar_symplectic_orthogonal(pairs, rng);
        let full = conjugate_pair_transform(&s);
        let twisted = &full * &cov.entries * full.transpose();
        let sample_cov = CovarianceMatrix {
            modes: cov.modes,
            entries: twisted,
        };
        let block = mode_averaged_block(&sample_cov)?;

        // Welford per entry.
        let delta = block - mean;
        mean += delta / count as f64;
        let delta2 = block - mean;
        m2 += delta.component_mul(&delta2);
    }

    let std_err = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).map(f64::sqrt)
    } else {
        Matrix4::from_element(f64::INFINITY)
    };
    Ok(McSymmetrized {
        mean,
        std_err,
        samples,
    })
}
