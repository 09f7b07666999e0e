//! Gaussian channel simulator for the reconciliation-invariance claim.
//!
//! Bob's data is modelled as `y = t x + z` with i.i.d. Gaussian modulation
//! and noise. The estimators of `(t, sigma^2, V_A)` are functions of the
//! sufficient statistics `<x,x>`, `<x,y>`, `<y,y>` only, so applying the
//! same orthogonal matrix to both strings leaves them exactly invariant;
//! that invariance is what makes the symmetrization step free for
//! reconciliation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::haar::haar_orthogonal;

/// The Gaussian channel `y = t x + z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    transmission: f64,
    noise_variance: f64,
    modulation_variance: f64,
    uses: usize,
}

impl ChannelModel {
    pub fn new(
        transmission: f64,
        noise_variance: f64,
        modulation_variance: f64,
        uses: usize,
    ) -> Result<Self> {
        if !transmission.is_finite() {
            return Err(Error::invalid("transmission factor must be finite"));
        }
        if !(noise_variance >= 0.0) {
            return Err(Error::invalid("noise variance must be non-negative"));
        }
        if !(modulation_variance > 0.0) {
            return Err(Error::invalid("modulation variance must be positive"));
        }
        if uses == 0 {
            return Err(Error::invalid("need at least one channel use"));
        }
        Ok(Self {
            transmission,
            noise_variance,
            modulation_variance,
            uses,
        })
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn modulation_variance(&self) -> f64 {
        self.modulation_variance
    }

    pub fn uses(&self) -> usize {
        self.uses
    }
}

/// Draw one run of the channel: `x` i.i.d. `N(0, V_A)`, `y = t x + z` with
/// `z` i.i.d. `N(0, sigma^2)` independent of `x`.
pub fn simulate_channel<R: Rng + ?Sized>(model: &ChannelModel, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let sx = model.modulation_variance.sqrt();
    let sz = model.noise_variance.sqrt();
    let x: Vec<f64> = (0..model.uses)
        .map(|_| sx * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let y: Vec<f64> = x
        .iter()
        .map(|xi| model.transmission * xi + sz * rng.sample::<f64, _>(StandardNormal))
        .collect();
    (x, y)
}

/// Empirical channel parameters; all three are functions of the joint
/// second moments only, hence exactly rotation invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEstimate {
    /// `<x,y> / <x,x>`.
    pub transmission: f64,
    /// `|y - t_hat x|^2 / n`.
    pub noise_variance: f64,
    /// `|x|^2 / n`.
    pub modulation_variance: f64,
    /// Number of uses the estimate was formed from.
    pub uses: usize,
}

impl ChannelEstimate {
    /// Standard error of the transmission estimate,
    /// `sqrt(sigma^2_hat / |x|^2)`.
    pub fn transmission_std_err(&self) -> f64 {
        (self.noise_variance / (self.uses as f64 * self.modulation_variance)).sqrt()
    }
}

/// Estimate `(t, sigma^2, V_A)` from one run.
pub fn estimate_channel(x: &[f64], y: &[f64]) -> Result<ChannelEstimate> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::dims(format!(
            "need two equal-length non-empty strings, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let xx: f64 = x.iter().map(|v| v * v).sum();
    if xx == 0.0 {
        return Err(Error::DegenerateInput(
            "all-zero modulation string leaves the transmission unidentified".into(),
        ));
    }
    let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let t = xy / xx;
    let n = x.len() as f64;
    let residual: f64 = x.iter().zip(y).map(|(a, b)| (b - t * a).powi(2)).sum();
    Ok(ChannelEstimate {
        transmission: t,
        noise_variance: residual / n,
        modulation_variance: xx / n,
        uses: x.len(),
    })
}

/// Symmetrize one run: apply a fresh Haar-random orthogonal matrix to both
/// strings and return only the rotated data. The rotation itself is
/// deliberately dropped (the "forget which one" part of the contract).
pub fn symmetrize_data<R: Rng + ?Sized>(
    x: &[f64],
    y: &[f64],
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::dims(format!(
            "need two equal-length non-empty strings, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let rotation = haar_orthogonal(x.len(), rng);
    crate::classical::rotate_joint(x, y, &rotation)
}

/// One simulate/estimate/symmetrize/re-estimate cycle.
#[derive(Debug, Clone, Copy)]
pub struct ChannelCheckRun {
    pub estimate: ChannelEstimate,
    /// Largest change of any of the three estimators under symmetrization.
    pub invariance_residual: f64,
}

/// Run the full invariance check once.
pub fn channel_check_run<R: Rng + ?Sized>(model: &ChannelModel, rng: &mut R) -> Result<ChannelCheckRun> {
    let (x, y) = simulate_channel(model, rng);
    let before = estimate_channel(&x, &y)?;
    let (xs, ys) = symmetrize_data(&x, &y, rng)?;
    let after = estimate_channel(&xs, &ys)?;
    let residual = (before.transmission - after.transmission)
        .abs()
        .max((before.noise_variance - after.noise_variance).abs())
        .max((before.modulation_variance - after.modulation_variance).abs());
    Ok(ChannelCheckRun {
        estimate: before,
        invariance_residual: residual,
    })
}
