//! Fixed parameter grids for the property and acceptance suites, so runs
//! are reproducible without per-run configuration.

/// Exact-arithmetic grid: every (kept, total, photons) with
/// `kept <= 8`, `total <= 64`, `photons <= 64` and `kept < total`.
pub fn exact_grid() -> Vec<(u64, u64, u64)> {
    let mut grid = Vec::new();
    for kept in 1..=8u64 {
        for total in (kept + 1)..=64 {
            for photons in 0..=64 {
                grid.push((kept, total, photons));
            }
        }
    }
    grid
}

/// Kept-mode counts for the asymptotic supremum comparison.
pub const SUP_KEPT_MODES: [u64; 3] = [1, 2, 4];

/// Scale factors `total/kept` for the asymptotic supremum comparison,
/// doubling from 256 to 4096.
pub const SUP_SCALES: [u64; 5] = [256, 512, 1024, 2048, 4096];

/// Kept-mode counts for the trace-distance convergence sweep.
pub const CONVERGENCE_KEPT_MODES: [u64; 2] = [1, 2];

/// Scale factors `total/kept` for the convergence sweep, `2^5 ..= 2^12`.
pub const CONVERGENCE_SCALES: [u64; 8] = [32, 64, 128, 256, 512, 1024, 2048, 4096];

/// (photon density, kept fraction) pairs for the Laplace-point checks.
pub const EXPONENT_GRID: [(f64, f64); 9] = [
    (0.5, 0.1),
    (0.5, 0.3),
    (0.5, 0.5),
    (1.0, 0.1),
    (1.0, 0.3),
    (1.0, 0.5),
    (2.0, 0.1),
    (2.0, 0.3),
    (2.0, 0.5),
];

/// Ambient dimensions for the classical variation-distance sweep.
pub const CLASSICAL_DIMENSIONS: [usize; 7] = [50, 100, 200, 400, 800, 1600, 3200];

/// EPR variances for the invariance checks.
pub const EPR_VARIANCES: [f64; 3] = [1.0, 2.0, 5.0];

/// Pair counts for the invariance checks.
pub const EPR_PAIR_COUNTS: [usize; 3] = [1, 2, 4];
