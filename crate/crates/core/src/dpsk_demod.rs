//! Differential 16-DPSK detection with per-bit erasures.
//!
//! Two detectors are provided. The exact one computes bit log-likelihood
//! ratios from the pair likelihood `p(y_k, y_{k-1} | Δφ)` with an unknown
//! uniform carrier phase. The rule-based one ranks each bit by the angular
//! distance from the observed phase difference to the nearest constellation
//! angle whose label disagrees in that bit.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constellation::{DpskMapping, PhaseRanking};
use crate::error::{Error, Result};
use crate::special::{log_i0, log_sum_exp};
use crate::verdict::{check_beta, BitVerdict, Variant};

/// Two consecutive received samples and the per-component noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpskObservation {
    pub y_prev: Complex64,
    pub y_curr: Complex64,
    pub sigma2: f64,
}

impl DpskObservation {
    pub fn new(y_prev: Complex64, y_curr: Complex64, sigma2: f64) -> Self {
        DpskObservation {
            y_prev,
            y_curr,
            sigma2,
        }
    }

    /// Observed phase difference in (−π, π].
    pub fn phi(&self) -> f64 {
        let a = (self.y_curr * self.y_prev.conj()).arg();
        if a <= -PI {
            PI
        } else {
            a
        }
    }
}

/// `ln p(y_k, y_{k-1} | Δφ)` for unit-energy symbols, averaged over the
/// carrier phase.
pub fn log_pair_likelihood(obs: &DpskObservation, delta_phi: f64) -> f64 {
    let s2 = obs.sigma2;
    let energy = 2.0 + obs.y_prev.norm_sqr() + obs.y_curr.norm_sqr();
    let arg = (obs.y_curr + obs.y_prev * Complex64::from_polar(1.0, delta_phi)).norm() / s2;
    -energy / (2.0 * s2) - 2.0 * (2.0 * PI * s2).ln() + log_i0(arg)
}

/// `p(y_k, y_{k-1} | Δφ)`; see [`log_pair_likelihood`].
pub fn pair_likelihood(obs: &DpskObservation, delta_phi: f64) -> f64 {
    log_pair_likelihood(obs, delta_phi).exp()
}

/// Bit log-likelihood ratios `ln P(b_i = 0 | y) / P(b_i = 1 | y)` assuming
/// equiprobable symbols.
pub fn exact_bit_llrs(obs: &DpskObservation, mapping: &DpskMapping) -> [f64; 4] {
    let mut logs = [0.0; 16];
    for (m, l) in logs.iter_mut().enumerate() {
        // The common prefactor cancels in every ratio.
        let dphi = DpskMapping::angle(m);
        *l = log_i0((obs.y_curr + obs.y_prev * Complex64::from_polar(1.0, dphi)).norm() / obs.sigma2);
    }
    let mut llr = [0.0; 4];
    let mut zeros = Vec::with_capacity(8);
    let mut ones = Vec::with_capacity(8);
    for (i, v) in llr.iter_mut().enumerate() {
        zeros.clear();
        ones.clear();
        for (m, &l) in logs.iter().enumerate() {
            if mapping.label(m)[i] == 0 {
                zeros.push(l);
            } else {
                ones.push(l);
            }
        }
        *v = log_sum_exp(&zeros) - log_sum_exp(&ones);
    }
    llr
}

/// High-SNR ranking of the four bits at phase difference `phi`.
pub fn rank_bits_high_snr(phi: f64, mapping: &DpskMapping) -> PhaseRanking<4> {
    mapping.rank(phi)
}

/// Keeps the `beta` most reliable bits and erases the rest.
///
/// [`Variant::Exact`] orders by `|LLR|` and needs `sigma2 > 0`;
/// [`Variant::Rule`] and [`Variant::Simple`] use the angular ranking. Ties
/// go to the lower bit index.
pub fn demod_beta(
    obs: &DpskObservation,
    beta: usize,
    mapping: &DpskMapping,
    variant: Variant,
) -> Result<BitVerdict> {
    check_beta(beta, 1, 4)?;
    match variant {
        Variant::Exact => {
            if !(obs.sigma2 > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "exact detection needs a positive noise variance, got {}",
                    obs.sigma2
                )));
            }
            let llr = exact_bit_llrs(obs, mapping);
            Ok(keep_by_llr(&llr, beta))
        }
        Variant::Rule | Variant::Simple => {
            let r = mapping.rank(obs.phi());
            Ok(BitVerdict::keep(r.values, &r.order()[..beta]))
        }
    }
}

pub(crate) fn keep_by_llr(llr: &[f64; 4], beta: usize) -> BitVerdict {
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| llr[b].abs().total_cmp(&llr[a].abs()).then(a.cmp(&b)));
    let values = llr.map(|v| u8::from(v < 0.0));
    BitVerdict::keep(values, &order[..beta])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::BitDecision;

    // Direct evaluation of I₀ by its integral, without logarithms.
    fn i0(x: f64) -> f64 {
        let n = 2000;
        let h = PI / n as f64;
        (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * (x * (i as f64 * h).cos()).exp()
            })
            .sum::<f64>()
            * h
            / PI
    }

    #[test]
    fn llr_signs_match_brute_force() {
        let mapping = DpskMapping::canonical();
        let s2 = 0.05;
        for k in 0..200 {
            let phi = -PI + (k as f64 + 0.37) * 2.0 * PI / 200.0;
            let obs = DpskObservation::new(
                Complex64::from_polar(1.1, 0.3),
                Complex64::from_polar(0.8, 0.3 + phi),
                s2,
            );
            let llr = exact_bit_llrs(&obs, &mapping);
            for i in 0..4 {
                let (mut p0, mut p1) = (0.0, 0.0);
                for m in 0..16 {
                    let a = (obs.y_curr + obs.y_prev * Complex64::from_polar(1.0, DpskMapping::angle(m)))
                        .norm()
                        / s2;
                    if mapping.label(m)[i] == 0 {
                        p0 += i0(a);
                    } else {
                        p1 += i0(a);
                    }
                }
                assert_eq!(llr[i] > 0.0, p0 > p1, "phi={phi} bit {i}");
                assert!((llr[i] - (p0 / p1).ln()).abs() < 1e-8 * (1.0 + llr[i].abs()));
            }
        }
    }

    #[test]
    fn likelihood_normalisation_constant() {
        // For Δφ = 0 and y_prev = y_curr = 1 the argument is 2/σ².
        let obs = DpskObservation::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 0.1);
        let expected = (-4.0 / 0.2f64).exp() / (2.0 * PI * 0.1f64).powi(2) * i0(20.0);
        assert!((pair_likelihood(&obs, 0.0) / expected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn beta_four_is_hard_detection() {
        let mapping = DpskMapping::canonical();
        for m in 0..16 {
            let obs = DpskObservation::new(
                Complex64::new(1.0, 0.0),
                Complex64::from_polar(1.0, DpskMapping::angle(m) + 0.01),
                0.01,
            );
            for v in [Variant::Exact, Variant::Rule] {
                let d = demod_beta(&obs, 4, &mapping, v).unwrap();
                assert_eq!(d, BitVerdict::full(mapping.label(m)));
            }
        }
    }

    #[test]
    fn rejects_bad_beta() {
        let obs = DpskObservation::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 0.1);
        let m = DpskMapping::canonical();
        assert!(demod_beta(&obs, 0, &m, Variant::Rule).is_err());
        assert!(demod_beta(&obs, 5, &m, Variant::Rule).is_err());
    }

    #[test]
    fn beta_one_keeps_b1_near_zero() {
        let obs = DpskObservation::new(Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, 0.02), 0.02);
        let d = demod_beta(&obs, 1, &DpskMapping::canonical(), Variant::Rule).unwrap();
        assert_eq!(d.bits[1], BitDecision::Decided(0));
        assert_eq!(d.beta(), 1);
    }
}
