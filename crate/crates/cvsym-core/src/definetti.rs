//! Reduction of orthogonally invariant bosonic states to thermal mixtures.
//!
//! An `N`-mode orthogonally invariant state is a mixture of the total
//! photon-number projectors; tracing it down to `n` modes leaves the
//! occupation distribution
//!
//! ```text
//! f(l) = a_l^n a_{k-l}^{N-n} / a_k^N
//! ```
//!
//! while the matching product thermal state with the same photons per mode
//! has occupation weights
//!
//! ```text
//! g(l) = a_l^n x^l / (1+x)^{n+l},   x = k/N.
//! ```
//!
//! The trace distance between the reduced and thermal states equals the
//! variation distance between `f` and `g`, and is bounded by
//! `2 (sup_l f(l)/g(l) - 1)`. This module evaluates all of these exactly
//! (big rationals) and in the log domain (for large `N`), together with
//! the Laplace-point analysis of the likelihood ratio: the per-mode
//! exponent, its derivative, and the continuum supremum `1/sqrt(1 - n/N)`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::function::beta::beta_reg;

use crate::combinatorics::{log2_multiplicity, multiplicity, thermal_entropy};
use crate::error::{Error, Result};
use crate::stats::kahan_sum;

/// A reduction instance: keep `kept_modes` of `total_modes` carrying
/// `total_photons` photons in total.
///
/// `total_modes == kept_modes` is the degenerate self-comparison (nothing
/// is traced out and the reduced distribution is a point mass); the
/// theorem regime is `total_modes > kept_modes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DefinettiInstance {
    kept_modes: u64,
    total_modes: u64,
    total_photons: u64,
}

impl DefinettiInstance {
    pub fn new(kept_modes: u64, total_modes: u64, total_photons: u64) -> Result<Self> {
        if kept_modes == 0 {
            return Err(Error::invalid("must keep at least one mode"));
        }
        if total_modes < kept_modes {
            return Err(Error::invalid(format!(
                "total modes {total_modes} smaller than kept modes {kept_modes}"
            )));
        }
        Ok(Self {
            kept_modes,
            total_modes,
            total_photons,
        })
    }

    pub fn kept_modes(&self) -> u64 {
        self.kept_modes
    }

    pub fn total_modes(&self) -> u64 {
        self.total_modes
    }

    pub fn total_photons(&self) -> u64 {
        self.total_photons
    }

    /// Mean photons per mode, `k/N`, as an exact rational.
    pub fn mean_photons(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.total_photons),
            BigInt::from(self.total_modes),
        )
    }

    pub fn mean_photons_f64(&self) -> f64 {
        self.total_photons as f64 / self.total_modes as f64
    }
}

/// Probability mass function over the total photon number of the kept
/// modes, in exact rational arithmetic.
///
/// Either the stored weights carry all the mass (`tail_bound` is `None`)
/// or the support was truncated and `tail_bound` certifies the missing
/// mass: `1 - stored_mass <= tail_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationDistribution {
    weights: Vec<BigRational>,
    tail_bound: Option<BigRational>,
}

impl OccupationDistribution {
    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Weight at occupation `l`; zero beyond the stored support.
    pub fn weight(&self, l: u64) -> BigRational {
        self.weights
            .get(l as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Largest stored occupation index.
    pub fn support_max(&self) -> u64 {
        (self.weights.len() - 1) as u64
    }

    /// Whether the stored weights account for all the mass.
    pub fn is_complete(&self) -> bool {
        self.tail_bound.is_none()
    }

    /// Certified bound on the mass beyond `support_max`, if truncated.
    pub fn tail_bound(&self) -> Option<&BigRational> {
        self.tail_bound.as_ref()
    }

    pub fn stored_mass(&self) -> BigRational {
        self.weights.iter().sum()
    }

    /// Check the distribution invariants.
    pub fn validate(&self) -> Result<()> {
        let one = BigRational::one();
        for (l, w) in self.weights.iter().enumerate() {
            if w.is_negative() || w > &one {
                return Err(Error::Malformed(format!("weight at {l} outside [0, 1]")));
            }
        }
        let stored = self.stored_mass();
        match &self.tail_bound {
            None => {
                if stored != one {
                    return Err(Error::Malformed(
                        "complete distribution does not sum to one".into(),
                    ));
                }
            }
            Some(bound) => {
                if &(one - stored) > bound {
                    return Err(Error::Malformed(
                        "missing mass exceeds the certified tail bound".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// `a_0^modes ..= a_up_to^modes` by the ratio recurrence.
fn multiplicity_sequence(modes: u64, up_to: u64) -> Vec<BigUint> {
    let mut seq = Vec::with_capacity(up_to as usize + 1);
    let mut value = BigUint::one();
    seq.push(value.clone());
    for l in 0..up_to {
        value = value * BigUint::from(modes + l) / BigUint::from(l + 1);
        seq.push(value.clone());
    }
    seq
}

/// Integer-numerator view of `f` and `g` over a pair of fixed denominators.
///
/// `f(l) = num_f[l] / denom_f` and `g(l) = num_g[l] / denom_g` for
/// `l = 0..=k`, with `x = k/N` substituted into the thermal weights.
struct ExactProfile {
    num_f: Vec<BigUint>,
    num_g: Vec<BigUint>,
    denom_f: BigUint,
    denom_g: BigUint,
}

fn exact_profile(inst: &DefinettiInstance) -> ExactProfile {
    let n = inst.kept_modes;
    let total = inst.total_modes;
    let k = inst.total_photons;
    let traced = total - n;

    let kept_mult = multiplicity_sequence(n, k);
    let denom_f = multiplicity(k, total).expect("total_modes >= 1");

    // f numerators: a_l^n * a_{k-l}^{N-n}; for N == n only l == k survives.
    let num_f: Vec<BigUint> = if traced == 0 {
        (0..=k)
            .map(|l| {
                if l == k {
                    denom_f.clone()
                } else {
                    BigUint::zero()
                }
            })
            .collect()
    } else {
        let traced_mult = multiplicity_sequence(traced, k);
        (0..=k)
            .map(|l| &kept_mult[l as usize] * &traced_mult[(k - l) as usize])
            .collect()
    };

    // g numerators over (N+k)^(n+k):
    // g(l) = a_l^n k^l N^n (N+k)^(k-l) / (N+k)^(n+k).
    let base = BigUint::from(total + k);
    let mut base_pows = Vec::with_capacity(k as usize + 1);
    let mut p = BigUint::one();
    base_pows.push(p.clone());
    for _ in 0..k {
        p = &p * &base;
        base_pows.push(p.clone());
    }
    let denom_g = &base_pows[k as usize] * base.pow(n as u32);
    let n_pow = BigUint::from(total).pow(n as u32);
    let mut k_pow = BigUint::one();
    let mut num_g = Vec::with_capacity(k as usize + 1);
    for l in 0..=k {
        num_g.push(&kept_mult[l as usize] * &k_pow * &n_pow * &base_pows[(k - l) as usize]);
        if l < k {
            k_pow *= BigUint::from(k);
        }
    }

    ExactProfile {
        num_f,
        num_g,
        denom_f,
        denom_g,
    }
}

fn ratio_from_big(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Occupation distribution of the reduced projector state, exactly.
///
/// The weights sum to one identically (Vandermonde).
pub fn reduced_distribution(inst: &DefinettiInstance) -> OccupationDistribution {
    let profile = exact_profile(inst);
    let weights = profile
        .num_f
        .into_iter()
        .map(|num| ratio_from_big(num, profile.denom_f.clone()))
        .collect();
    OccupationDistribution {
        weights,
        tail_bound: None,
    }
}

/// Occupation distribution of `modes` thermal modes with `mean_photons`
/// photons each, truncated at `cutoff`.
///
/// The certified tail bound comes from the geometric-decay envelope
/// `g(l+1)/g(l) = x/(1+x) * (l+modes)/(l+1)`, which is decreasing in `l`;
/// once it is below one at the cutoff the remaining mass is bounded by the
/// geometric series. If the cutoff is too small for the envelope to
/// contract, the exact remainder `1 - stored mass` is used instead.
pub fn thermal_distribution(
    modes: u64,
    mean_photons: &BigRational,
    cutoff: u64,
) -> Result<OccupationDistribution> {
    if modes == 0 {
        return Err(Error::invalid("thermal distribution needs at least one mode"));
    }
    if mean_photons.is_negative() {
        return Err(Error::invalid(
            "thermal distribution needs a non-negative mean photon number",
        ));
    }
    if mean_photons.is_zero() {
        return Ok(OccupationDistribution {
            weights: vec![BigRational::one()],
            tail_bound: None,
        });
    }

    let x = mean_photons;
    let one = BigRational::one();
    let decay = x / (x + &one); // x / (1+x)
    // g(0) = 1/(1+x)^n
    let mut w = (&one / (x + &one)).pow(modes as i32);
    let mut weights = Vec::with_capacity(cutoff as usize + 1);
    weights.push(w.clone());
    for l in 0..cutoff {
        w = w * &decay
            * BigRational::new(BigInt::from(modes + l), BigInt::from(l + 1));
        weights.push(w.clone());
    }

    let envelope = &decay
        * BigRational::new(BigInt::from(cutoff + modes), BigInt::from(cutoff + 1));
    let stored: BigRational = weights.iter().sum();
    let tail_bound = if envelope < one {
        // sum_{j>=1} g(cutoff) * envelope^j
        let last = weights.last().expect("non-empty");
        last * &envelope / (&one - &envelope)
    } else {
        &one - &stored
    };

    Ok(OccupationDistribution {
        weights,
        tail_bound: Some(tail_bound),
    })
}

/// Likelihood ratio `h(l) = f(l)/g(l)`, exactly. Zero beyond the support
/// of `f`; rejects the photon-free instance where `g` degenerates.
pub fn likelihood_ratio(inst: &DefinettiInstance, occupation: u64) -> Result<BigRational> {
    if inst.total_photons == 0 {
        return Err(Error::invalid(
            "likelihood ratio undefined for zero photons (vacuum against vacuum)",
        ));
    }
    let k = inst.total_photons;
    if occupation > k {
        return Ok(BigRational::zero());
    }
    let n = inst.kept_modes;
    let total = inst.total_modes;
    let l = occupation;

    // a_l^n cancels between f and g:
    // h(l) = a_{k-l}^{N-n} / a_k^N * (1+x)^{n+l} / x^l with x = k/N.
    if total == n {
        // f is a point mass at k.
        if l < k {
            return Ok(BigRational::zero());
        }
        let x = inst.mean_photons();
        let g_k = ratio_from_big(multiplicity(k, n)?, BigUint::one())
            * x.pow(k as i32)
            / (BigRational::one() + &x).pow((n + k) as i32);
        return Ok(g_k.recip());
    }

    let traced_term = ratio_from_big(multiplicity(k - l, total - n)?, multiplicity(k, total)?);
    // (1+x)^{n+l}/x^l = (N+k)^{n+l} / (N^n k^l (N+k)^l) ... expand rationally:
    let x = inst.mean_photons();
    let thermal_term =
        (BigRational::one() + &x).pow((n + l) as i32) / x.pow(l as i32);
    Ok(traced_term * thermal_term)
}

/// Trace distance between the reduced projector state and the matching
/// thermal state, exactly: `sum_{l<=k} |f - g|` plus the closed-form
/// thermal mass beyond `k` where `f` vanishes.
pub fn trace_distance(inst: &DefinettiInstance) -> BigRational {
    if inst.total_photons == 0 {
        return BigRational::zero();
    }
    let profile = exact_profile(inst);
    let k = inst.total_photons as usize;

    let mut abs_sum = BigInt::zero(); // over denom_f * denom_g
    let mut g_sum = BigUint::zero(); // over denom_g
    for l in 0..=k {
        let lhs = BigInt::from(&profile.num_f[l] * &profile.denom_g);
        let rhs = BigInt::from(&profile.num_g[l] * &profile.denom_f);
        abs_sum += (lhs - rhs).abs();
        g_sum += &profile.num_g[l];
    }
    let tail = BigInt::from((&profile.denom_g - g_sum) * &profile.denom_f);
    BigRational::new(
        abs_sum + tail,
        BigInt::from(&profile.denom_f * &profile.denom_g),
    )
}

/// Exact maximizer and maximum of the likelihood ratio over `0..=k`.
///
/// Ties resolve to the smallest maximizer. The max over the full line
/// equals the max over `0..=k` because `h` vanishes beyond `k` while both
/// distributions are normalized, forcing `sup h >= 1`.
pub fn max_ratio(inst: &DefinettiInstance) -> Result<(u64, BigRational)> {
    if inst.total_photons == 0 {
        return Err(Error::invalid(
            "likelihood ratio undefined for zero photons (vacuum against vacuum)",
        ));
    }
    let profile = exact_profile(inst);
    let k = inst.total_photons as usize;

    // h(l) is proportional to num_f[l]/num_g[l]; compare by cross products.
    let mut best = 0usize;
    for l in 1..=k {
        let lhs = &profile.num_f[l] * &profile.num_g[best];
        let rhs = &profile.num_f[best] * &profile.num_g[l];
        if lhs > rhs {
            best = l;
        }
    }
    let value = ratio_from_big(
        &profile.num_f[best] * &profile.denom_g,
        &profile.num_g[best] * &profile.denom_f,
    );
    Ok((best as u64, value))
}

/// Smallest `l` attaining the maximum of `h`.
pub fn argmax_ratio(inst: &DefinettiInstance) -> Result<u64> {
    max_ratio(inst).map(|(l, _)| l)
}

/// Exact upper bound on the trace distance, `2 (max_l h(l) - 1)`.
pub fn sup_ratio_bound(inst: &DefinettiInstance) -> Result<BigRational> {
    let (_, max) = max_ratio(inst)?;
    let two = BigRational::from_integer(BigInt::from(2));
    Ok(two * (max - BigRational::one()))
}

// ---------------------------------------------------------------------------
// Log-domain path for large instances.
// ---------------------------------------------------------------------------

/// `log2 h(l)` via log-gamma; requires the theorem regime `N > n`.
fn log2_ratio(inst: &DefinettiInstance, l: u64) -> f64 {
    let n = inst.kept_modes;
    let total = inst.total_modes;
    let k = inst.total_photons;
    let x = inst.mean_photons_f64();
    let lg_traced = log2_multiplicity(k - l, total - n).expect("modes positive");
    let lg_total = log2_multiplicity(k, total).expect("modes positive");
    lg_traced - lg_total + (n + l) as f64 * (1.0 + x).log2() - l as f64 * x.log2()
}

/// Thermal mass beyond occupation `k` (negative-binomial survival), in
/// closed form via the regularized incomplete beta function.
fn thermal_tail_f64(modes: u64, mean_photons: f64, beyond: u64) -> f64 {
    if mean_photons == 0.0 {
        return 0.0;
    }
    let q = mean_photons / (1.0 + mean_photons);
    beta_reg((beyond + 1) as f64, modes as f64, q)
}

/// Trace distance in the log-domain floating path.
///
/// Accurate to roughly `k * 1e-15` absolute; intended for instances where
/// exact rationals are wastefully large. Summation order is fixed.
pub fn trace_distance_f64(inst: &DefinettiInstance) -> f64 {
    if inst.total_photons == 0 {
        return 0.0;
    }
    let n = inst.kept_modes;
    let total = inst.total_modes;
    let k = inst.total_photons;
    let x = inst.mean_photons_f64();

    if total == n {
        // f is a point mass at k: the distance is 2 (1 - g(k)).
        let lg_k = log2_multiplicity(k, n).expect("modes positive")
            + k as f64 * x.log2()
            - (n + k) as f64 * (1.0 + x).log2();
        return 2.0 * (1.0 - lg_k.exp2());
    }

    let lg_total = log2_multiplicity(k, total).expect("modes positive");
    let terms = (0..=k).map(|l| {
        let lg_kept = log2_multiplicity(l, n).expect("modes positive");
        let lf = lg_kept + log2_multiplicity(k - l, total - n).expect("modes positive") - lg_total;
        let lg = lg_kept + l as f64 * x.log2() - (n + l) as f64 * (1.0 + x).log2();
        (lf.exp2() - lg.exp2()).abs()
    });
    kahan_sum(terms) + thermal_tail_f64(n, x, k)
}

/// Maximizer and maximum of `h` in the floating path.
pub fn max_ratio_f64(inst: &DefinettiInstance) -> Result<(u64, f64)> {
    if inst.total_photons == 0 {
        return Err(Error::invalid(
            "likelihood ratio undefined for zero photons (vacuum against vacuum)",
        ));
    }
    if inst.total_modes == inst.kept_modes {
        return Err(Error::DegenerateInput(
            "floating ratio scan needs traced-out modes; use the exact path".into(),
        ));
    }
    let mut best_l = 0u64;
    let mut best = f64::NEG_INFINITY;
    for l in 0..=inst.total_photons {
        let v = log2_ratio(inst, l);
        if v > best {
            best = v;
            best_l = l;
        }
    }
    Ok((best_l, best.exp2()))
}

/// `2 (max_l h - 1)` in the floating path.
pub fn sup_ratio_bound_f64(inst: &DefinettiInstance) -> Result<f64> {
    max_ratio_f64(inst).map(|(_, max)| 2.0 * (max - 1.0))
}

// ---------------------------------------------------------------------------
// Laplace-point analysis of the likelihood ratio.
// ---------------------------------------------------------------------------

/// The rescaled coordinates of the ratio analysis: photons per total mode
/// `x = k/N`, kept fraction `y = n/N` and occupation per total mode
/// `z = l/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedVariables {
    photons_per_mode: f64,
    kept_fraction: f64,
    occupation_fraction: f64,
}

impl ReducedVariables {
    pub fn new(
        photons_per_mode: f64,
        kept_fraction: f64,
        occupation_fraction: f64,
    ) -> Result<Self> {
        if !(kept_fraction > 0.0 && kept_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "kept fraction must lie in (0, 1), got {kept_fraction}"
            )));
        }
        if !(occupation_fraction >= 0.0) {
            return Err(Error::invalid(format!(
                "occupation fraction must be non-negative, got {occupation_fraction}"
            )));
        }
        if !(occupation_fraction < photons_per_mode) {
            return Err(Error::invalid(format!(
                "occupation fraction {occupation_fraction} must stay below the photon density \
                 {photons_per_mode}"
            )));
        }
        Ok(Self {
            photons_per_mode,
            kept_fraction,
            occupation_fraction,
        })
    }

    pub fn from_instance(inst: &DefinettiInstance, occupation: u64) -> Result<Self> {
        let total = inst.total_modes as f64;
        Self::new(
            inst.total_photons as f64 / total,
            inst.kept_modes as f64 / total,
            occupation as f64 / total,
        )
    }

    pub fn photons_per_mode(&self) -> f64 {
        self.photons_per_mode
    }

    pub fn kept_fraction(&self) -> f64 {
        self.kept_fraction
    }

    pub fn occupation_fraction(&self) -> f64 {
        self.occupation_fraction
    }

    /// Traced-out modes per traced-out photon,
    /// `(1 - y) / (x - z) = (N - n)/(k - l)`.
    pub fn traced_modes_per_photon(&self) -> f64 {
        (1.0 - self.kept_fraction) / (self.photons_per_mode - self.occupation_fraction)
    }
}

/// The Laplace form `h(zN) ~ A 2^{N B}`: prefactor and exponent per mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticTerms {
    /// Prefactor `A`, positive.
    pub prefactor: f64,
    /// Exponent per mode `B`, in bits; non-positive on the physical domain
    /// and zero exactly at `z = x y`.
    pub exponent_per_mode: f64,
}

/// Evaluate the prefactor and per-mode exponent at the given coordinates.
pub fn exponent_terms(rv: &ReducedVariables) -> Result<AsymptoticTerms> {
    let x = rv.photons_per_mode;
    let y = rv.kept_fraction;
    let z = rv.occupation_fraction;
    let t = rv.traced_modes_per_photon();
    let prefactor = (t * x * (1.0 + t) / ((1.0 - y) * (1.0 + 1.0 / x))).sqrt();
    let exponent = (1.0 - y) * thermal_entropy(1.0 / t)? - thermal_entropy(x)?
        + (y + z) * (1.0 + x).log2()
        - z * x.log2();
    Ok(AsymptoticTerms {
        prefactor,
        exponent_per_mode: exponent,
    })
}

/// Closed-form derivative of the per-mode exponent with respect to the
/// occupation fraction: `-log2(1+t) + log2(1 + 1/x)`. Positive below
/// `z = x y`, zero there, negative above.
pub fn exponent_derivative(rv: &ReducedVariables) -> Result<f64> {
    let t = rv.traced_modes_per_photon();
    Ok(-(1.0 + t).log2() + (1.0 + 1.0 / rv.photons_per_mode).log2())
}

/// The continuum supremum of the likelihood ratio and its first-order
/// expansion for `n << N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupAsymptote {
    /// `1 / sqrt(1 - n/N)`.
    pub value: f64,
    /// `1 + n/(2N)`.
    pub first_order: f64,
}

pub fn asymptotic_sup(kept_modes: u64, total_modes: u64) -> Result<SupAsymptote> {
    if total_modes <= kept_modes {
        return Err(Error::invalid(format!(
            "asymptotic supremum needs total modes {total_modes} > kept modes {kept_modes}"
        )));
    }
    let y = kept_modes as f64 / total_modes as f64;
    Ok(SupAsymptote {
        value: 1.0 / (1.0 - y).sqrt(),
        first_order: 1.0 + 0.5 * y,
    })
}

// ---------------------------------------------------------------------------
// Sweep rows consumed by the CLI.
// ---------------------------------------------------------------------------

/// Which arithmetic a sweep runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float,
}

/// One instance of the convergence sweep.
#[derive(Debug, Clone)]
pub struct DefinettiSweepRow {
    pub kept_modes: u64,
    pub total_modes: u64,
    pub total_photons: u64,
    pub trace_distance: f64,
    pub trace_distance_exact: Option<BigRational>,
    pub sup_bound: Option<f64>,
    pub sup_bound_exact: Option<BigRational>,
    pub argmax: Option<u64>,
    pub asymptote: f64,
    /// `sup_bound * N / n`, the normalization under which the bound has a
    /// finite limit.
    pub bound_scaled: Option<f64>,
}

/// Run the convergence sweep over the cartesian grid, sorted by
/// `(kept, total, photons)`. Combinations with `total <= kept` are skipped.
pub fn definetti_sweep(
    kept: &[u64],
    total: &[u64],
    photons: &[u64],
    arithmetic: Arithmetic,
) -> Result<Vec<DefinettiSweepRow>> {
    let mut kept = kept.to_vec();
    let mut total = total.to_vec();
    let mut photons = photons.to_vec();
    kept.sort_unstable();
    kept.dedup();
    total.sort_unstable();
    total.dedup();
    photons.sort_unstable();
    photons.dedup();

    let mut rows = Vec::new();
    for &n in &kept {
        for &big_n in &total {
            if big_n <= n {
                continue;
            }
            for &k in &photons {
                let inst = DefinettiInstance::new(n, big_n, k)?;
                rows.push(sweep_row(&inst, arithmetic)?);
            }
        }
    }
    Ok(rows)
}

fn sweep_row(inst: &DefinettiInstance, arithmetic: Arithmetic) -> Result<DefinettiSweepRow> {
    let asymptote = asymptotic_sup(inst.kept_modes, inst.total_modes)?.value;
    let (td, td_exact, sup, sup_exact, argmax) = match arithmetic {
        Arithmetic::Exact => {
            let td = trace_distance(inst);
            let td_f = td.to_f64().unwrap_or(f64::NAN);
            if inst.total_photons == 0 {
                (td_f, Some(td), None, None, None)
            } else {
                let (l, max) = max_ratio(inst)?;
                let bound =
                    BigRational::from_integer(BigInt::from(2)) * (max - BigRational::one());
                let bound_f = bound.to_f64().unwrap_or(f64::NAN);
                (td_f, Some(td), Some(bound_f), Some(bound), Some(l))
            }
        }
        Arithmetic::Float => {
            let td = trace_distance_f64(inst);
            if inst.total_photons == 0 {
                (td, None, None, None, None)
            } else {
                let (l, max) = max_ratio_f64(inst)?;
                (td, None, Some(2.0 * (max - 1.0)), None, Some(l))
            }
        }
    };
    let bound_scaled = sup.map(|b| b * inst.total_modes as f64 / inst.kept_modes as f64);
    Ok(DefinettiSweepRow {
        kept_modes: inst.kept_modes,
        total_modes: inst.total_modes,
        total_photons: inst.total_photons,
        trace_distance: td,
        trace_distance_exact: td_exact,
        sup_bound: sup,
        sup_bound_exact: sup_exact,
        argmax,
        asymptote,
        bound_scaled,
    })
}
