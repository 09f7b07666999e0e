//! Module-level invariant suites on the fixed grids, plus randomized
//! property checks for the algebraic identities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cvsym_core::channel::estimate_channel;
use cvsym_core::classical::rotate_joint;
use cvsym_core::combinatorics::{
    enumerate_occupations, log2_exact, log2_multiplicity, multiplicity,
};
use cvsym_core::definetti::{
    exponent_derivative, likelihood_ratio, max_ratio_f64, reduced_distribution,
    thermal_distribution, trace_distance, DefinettiInstance, ReducedVariables,
};
use cvsym_core::haar::{haar_orthogonal, haar_unitary};
use cvsym_core::phase_space::{
    haar_symplectic_orthogonal, mc_symmetrize, symmetrize_covariance, CovarianceMatrix,
    SymmetricCovariance,
};
use cvsym_core::stats::{ks_two_sample, ks_two_sample_critical};

fn instance(kept: u64, total: u64, photons: u64) -> DefinettiInstance {
    DefinettiInstance::new(kept, total, photons).unwrap()
}

// ---------------------------------------------------------------------------
// Combinatorics.
// ---------------------------------------------------------------------------

#[test]
fn enumeration_count_matches_multiplicity() {
    for modes in 1..=6u64 {
        for photons in 0..=12u64 {
            let tuples = enumerate_occupations(photons, modes).unwrap();
            let expected = multiplicity(photons, modes).unwrap();
            assert_eq!(
                BigInt::from(tuples.len()),
                BigInt::from(expected),
                "count mismatch at ({photons}, {modes})"
            );
        }
    }
}

#[test]
fn log_multiplicity_tracks_exact_values() {
    for modes in 1..=50u64 {
        // Walk the exact value along photons with the ratio recurrence.
        let mut exact = num_bigint::BigUint::one();
        for photons in 0..=500u64 {
            if photons > 0 {
                exact = exact * num_bigint::BigUint::from(modes + photons - 1)
                    / num_bigint::BigUint::from(photons);
            }
            let log = log2_multiplicity(photons, modes).unwrap();
            let reference = log2_exact(&exact);
            assert!(
                (log - reference).abs() <= 1e-9,
                "log2 gap {} at ({photons}, {modes})",
                (log - reference).abs()
            );
        }
    }
}

proptest! {
    // a_k^n = a_{k-1}^n + a_k^{n-1}, with a_k^1 = 1.
    #[test]
    fn pascal_recurrence(photons in 1u64..=60, modes in 2u64..=12) {
        let whole = multiplicity(photons, modes).unwrap();
        let fewer_photons = multiplicity(photons - 1, modes).unwrap();
        let fewer_modes = multiplicity(photons, modes - 1).unwrap();
        prop_assert_eq!(whole, fewer_photons + fewer_modes);
    }
}

// ---------------------------------------------------------------------------
// De Finetti reduction.
// ---------------------------------------------------------------------------

#[test]
fn self_comparison_reduces_to_thermal_weight_at_k() {
    // With nothing traced out the reduced state is the projector itself and
    // the distance to the thermal state is 2 (1 - g(k)).
    for (modes, photons) in [(1u64, 3u64), (2, 5), (4, 8)] {
        let inst = instance(modes, modes, photons);
        let td = trace_distance(&inst);
        let g = thermal_distribution(modes, &inst.mean_photons(), photons).unwrap();
        let expected =
            BigRational::from_integer(BigInt::from(2)) * (BigRational::one() - g.weight(photons));
        assert_eq!(td, expected, "self-comparison at ({modes}, {photons})");
    }
}

#[test]
fn exponent_derivative_changes_sign_once_at_laplace_point() {
    for &(x, y) in &cvsym_core::grids::EXPONENT_GRID {
        let mut crossings = Vec::new();
        let points = 400;
        let mut previous: Option<f64> = None;
        for i in 1..points {
            let z = x * i as f64 / points as f64;
            if z >= x {
                break;
            }
            let d = exponent_derivative(&ReducedVariables::new(x, y, z).unwrap()).unwrap();
            if let Some(p) = previous {
                if p.signum() != d.signum() {
                    crossings.push(z);
                }
            }
            previous = Some(d);
        }
        assert_eq!(
            crossings.len(),
            1,
            "expected one sign change for x={x}, y={y}, got {crossings:?}"
        );
        assert!(
            (crossings[0] - x * y).abs() <= x / points as f64 * 1.5,
            "sign change at {} but extremum at {}",
            crossings[0],
            x * y
        );
    }
}

#[test]
fn discrete_max_excess_approaches_next_integer_constant() {
    // At one photon per mode the discrete maximizer sits one step above the
    // continuum point and 2 (max_h - 1) N / n tends to (n+1)/n.
    for &kept in &cvsym_core::grids::SUP_KEPT_MODES {
        let total = 1024 * kept;
        let (argmax, max_h) = max_ratio_f64(&instance(kept, total, total)).unwrap();
        // h(n+1) and h(n+2) tie exactly; float rounding may land on either.
        assert!(argmax == kept + 1 || argmax == kept + 2, "argmax {argmax}");
        let scaled = 2.0 * (max_h - 1.0) * total as f64 / kept as f64;
        let limit = (kept + 1) as f64 / kept as f64;
        assert!(
            (scaled - limit).abs() / limit <= 0.02,
            "scaled {scaled} vs limit {limit} at n={kept}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // h(l) g(l) = f(l) exactly for every occupation in the support.
    #[test]
    fn ratio_times_thermal_recovers_reduced(
        kept in 1u64..=4,
        extra in 1u64..=8,
        photons in 1u64..=12,
    ) {
        let inst = instance(kept, kept + extra, photons);
        let f = reduced_distribution(&inst);
        let g = thermal_distribution(kept, &inst.mean_photons(), photons).unwrap();
        for l in 0..=photons {
            let h = likelihood_ratio(&inst, l).unwrap();
            prop_assert_eq!(h * g.weight(l), f.weight(l));
        }
    }
}

// ---------------------------------------------------------------------------
// Phase space.
// ---------------------------------------------------------------------------

#[test]
fn haar_distribution_is_left_invariant() {
    // The law of S and of S0 S agree; compare the (0,0) entry by a
    // two-sample KS test at significance 0.01.
    let modes = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    let fixed = haar_symplectic_orthogonal(modes, &mut rng);
    let samples = 10_000;
    let mut plain = Vec::with_capacity(samples);
    let mut shifted = Vec::with_capacity(samples);
    for _ in 0..samples {
        let s = haar_symplectic_orthogonal(modes, &mut rng);
        plain.push(s.entries()[(0, 0)]);
        let t = haar_symplectic_orthogonal(modes, &mut rng);
        shifted.push((fixed.entries() * t.entries())[(0, 0)]);
    }
    let d = ks_two_sample(&mut plain, &mut shifted);
    let critical = ks_two_sample_critical(samples, samples, 0.01);
    assert!(d < critical, "KS statistic {d} >= {critical}");
}

#[test]
fn mc_symmetrize_kills_off_structure_entries() {
    let cov = CovarianceMatrix::from_rows(
        2,
        &[
            1.2, 0.30, 0.5, 0.00, //
            0.30, 0.8, 0.00, -0.3, //
            0.5, 0.00, 1.0, -0.10, //
            0.00, -0.3, -0.10, 1.0,
        ],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(212);
    let mc = mc_symmetrize(&cov, 40_000, &mut rng).unwrap();
    // Everything off the symmetrized pattern averages to zero: the
    // in-block skews (x_A, p_A), (x_B, p_B) and the cross skews
    // (x_A, p_B), (p_A, x_B).
    for (q, r) in [(0usize, 1usize), (2, 3), (0, 3), (1, 2)] {
        let dev = mc.mean[(q, r)].abs();
        let budget = 5.0 * mc.std_err[(q, r)] + 1e-12;
        assert!(dev <= budget, "entry ({q},{r}): {dev} > {budget}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Assembling the three-parameter form and re-averaging is exact.
    #[test]
    fn symmetrize_is_exact_on_assembled_forms(
        alice in 1.0f64..4.0,
        bob in 1.0f64..4.0,
        corr in -2.0f64..2.0,
    ) {
        let sym = SymmetricCovariance {
            alice_variance: alice,
            bob_variance: bob,
            correlation: corr,
        };
        let back = symmetrize_covariance(&sym.assemble()).unwrap();
        prop_assert_eq!(back, sym);
    }

    // Haar samples satisfy the group invariants for arbitrary seeds.
    #[test]
    fn haar_samples_always_in_group(seed in any::<u64>(), modes in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = haar_symplectic_orthogonal(modes, &mut rng);
        prop_assert!(s.orthogonality_residual() <= 1e-10);
        prop_assert!(s.symplectic_residual() <= 1e-10);
    }

    // The unitary from which a Haar sample is built is itself unitary.
    #[test]
    fn haar_unitary_parts_are_unitary(seed in any::<u64>(), dim in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (re, im) = haar_unitary(dim, &mut rng);
        let real = re.transpose() * &re + im.transpose() * &im;
        let imag = re.transpose() * &im - im.transpose() * &re;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((real[(i, j)] - target).abs() < 1e-10);
                prop_assert!(imag[(i, j)].abs() < 1e-10);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Classical joint rotation and the channel estimators.
// ---------------------------------------------------------------------------

#[test]
fn joint_rotation_leaves_regression_estimates_fixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(213);
    let n = 200;
    use rand::Rng as _;
    use rand_distr::StandardNormal;
    for _ in 0..20 {
        let x: Vec<f64> = (0..n).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|xi| 0.6 * xi + 0.4 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let before = estimate_channel(&x, &y).unwrap();
        let rot = haar_orthogonal(n, &mut rng);
        let (rx, ry) = rotate_joint(&x, &y, &rot).unwrap();
        let after = estimate_channel(&rx, &ry).unwrap();
        assert!((before.transmission - after.transmission).abs() <= 1e-10);
        assert!((before.noise_variance - after.noise_variance).abs() <= 1e-10);
        assert!((before.modulation_variance - after.modulation_variance).abs() <= 1e-10);
    }
}

// ---------------------------------------------------------------------------
// Occupation distribution bookkeeping.
// ---------------------------------------------------------------------------

#[test]
fn truncated_thermal_mass_converges_from_below() {
    let x = BigRational::new(BigInt::from(2), BigInt::from(1));
    let mut stored = Vec::new();
    for cutoff in [8u64, 16, 32, 64] {
        let g = thermal_distribution(2, &x, cutoff).unwrap();
        g.validate().unwrap();
        stored.push(g.stored_mass().to_f64().unwrap());
    }
    for w in stored.windows(2) {
        assert!(w[1] > w[0]);
    }
    assert!(stored.last().unwrap() > &0.999);
}
