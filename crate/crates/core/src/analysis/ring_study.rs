//! Bit-error rate of the simplified 16-DAPSK scheme across ring ratios.

use crate::channel::db_to_linear;
use crate::error::Result;

use super::dapsk_ber::dapsk_ber_numeric;

/// One point of a ring-ratio sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingRatioEntry {
    pub ring_ratio: f64,
    pub beta: usize,
    pub snr_db: f64,
    pub ber: f64,
}

/// Numeric BER for every combination of `betas` and `ring_ratios` at
/// `snr_db`.
pub fn ring_ratio_study(betas: &[usize], ring_ratios: &[f64], snr_db: f64) -> Result<Vec<RingRatioEntry>> {
    let gamma = db_to_linear(snr_db);
    let mut out = Vec::with_capacity(betas.len() * ring_ratios.len());
    for &beta in betas {
        for &r in ring_ratios {
            out.push(RingRatioEntry {
                ring_ratio: r,
                beta,
                snr_db,
                ber: dapsk_ber_numeric(beta, gamma, r)?,
            });
        }
    }
    Ok(out)
}
