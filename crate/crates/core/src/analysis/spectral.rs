//! Average spectral efficiency of the adaptive scheme over Rayleigh fading.
//!
//! With block Rayleigh fading the instantaneous SNR is exponential with mean
//! `γ̄`, so region β is occupied with probability
//! `exp(−γ_β/γ̄) − exp(−γ_{β+1}/γ̄)` and the throughput in bits per symbol
//! pair is `Σ β · Pr(region β)`.

use crate::channel::db_to_linear;
use crate::error::Result;
use crate::verdict::Modulation;

use super::regions::{operating_regions, OperatingRegions};

/// Probability of each region `[none, β=1, β=2, β=3, β=4]` at average SNR
/// `avg_snr_db`.
pub fn region_probabilities(regions: &OperatingRegions, avg_snr_db: f64) -> [f64; 5] {
    let mean = db_to_linear(avg_snr_db);
    let tail = |g: f64| (-g / mean).exp();
    let mut p = [0.0; 5];
    p[0] = 1.0 - tail(regions.breakpoints[0]);
    for beta in 1..=4 {
        let (lo, hi) = regions.region(beta);
        p[beta] = tail(lo) - if hi.is_finite() { tail(hi) } else { 0.0 };
    }
    p
}

/// Bits per symbol pair, `Σ β · Pr(region β)`.
pub fn spectral_efficiency(regions: &OperatingRegions, avg_snr_db: f64) -> f64 {
    region_probabilities(regions, avg_snr_db)
        .iter()
        .enumerate()
        .map(|(beta, p)| beta as f64 * p)
        .sum()
}

/// Computes the regions for `target` and evaluates the spectral efficiency
/// at each average SNR.
pub fn spectral_efficiency_curve(
    modulation: Modulation,
    target: f64,
    avg_snr_db: &[f64],
) -> Result<Vec<f64>> {
    let r = operating_regions(modulation, target)?;
    Ok(avg_snr_db.iter().map(|&s| spectral_efficiency(&r, s)).collect())
}
