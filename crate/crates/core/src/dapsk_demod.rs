//! Differential 16-DAPSK detection with per-bit erasures.
//!
//! A received pair is reduced to the amplitude ratio `r = |z_k|/|z_{k-1}|`
//! and the phase difference `ψ`. Given the previous ring `d` and the
//! transmitted ratio `α = |α|e^{jθ}`, the pair `(r, ψ)` has the joint density
//!
//! ```text
//! p(r, ψ) = exp(ξ²/B − P) (ξ² + B) r / (σ⁴ π B³)
//! ξ² = (d/σ²)² (1 + |α|²r² + 2|α|r cos(ψ − θ))
//! P  = d²(1 + |α|²)/σ²,   B = (1 + r²)/σ²
//! ```
//!
//! Here `σ²` is the total complex noise variance `N0`; the observation types
//! carry the per-dimension variance `N0/2` and double it before evaluating
//! the density.
//!
//! Three detectors are built on it: exact bit LLRs over the 32 hypotheses,
//! the high-SNR reliability comparisons between `b0` and each phase bit, and
//! the simplified scheme that only compares `r' = min(r, 1/r)` with a
//! per-β threshold table and looks at the angular sector of `ψ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constellation::{Bit, DapskMapping};
use crate::dpsk_demod::keep_by_llr;
use crate::error::{Error, Result};
use crate::special::log_sum_exp;
use crate::verdict::{check_beta, BitVerdict, Variant};

/// Two consecutive received samples and the per-component noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DapskObservation {
    pub z_prev: Complex64,
    pub z_curr: Complex64,
    pub sigma2: f64,
}

impl DapskObservation {
    pub fn new(z_prev: Complex64, z_curr: Complex64, sigma2: f64) -> Self {
        DapskObservation {
            z_prev,
            z_curr,
            sigma2,
        }
    }

    /// Amplitude ratio `|z_k| / |z_{k-1}|`.
    pub fn r(&self) -> f64 {
        self.z_curr.norm() / self.z_prev.norm()
    }

    /// `min(r, 1/r)`.
    pub fn r_prime(&self) -> f64 {
        let r = self.r();
        r.min(1.0 / r)
    }

    /// Phase difference in (−π, π].
    pub fn psi(&self) -> f64 {
        let a = (self.z_curr * self.z_prev.conj()).arg();
        if a <= -PI {
            PI
        } else {
            a
        }
    }
}

/// The four admissible combinations of previous ring and ring transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmplitudeCase {
    /// `(|d|, |α|) = (A1, 1)`
    InnerStay,
    /// `(A2, 1)`
    OuterStay,
    /// `(A1, R)`
    InnerToOuter,
    /// `(A2, 1/R)`
    OuterToInner,
}

impl AmplitudeCase {
    pub const ALL: [AmplitudeCase; 4] = [
        AmplitudeCase::InnerStay,
        AmplitudeCase::OuterStay,
        AmplitudeCase::InnerToOuter,
        AmplitudeCase::OuterToInner,
    ];

    /// Value of `b0` (ring change) for this case.
    pub fn b0(&self) -> Bit {
        match self {
            AmplitudeCase::InnerStay | AmplitudeCase::OuterStay => 0,
            AmplitudeCase::InnerToOuter | AmplitudeCase::OuterToInner => 1,
        }
    }

    /// `(|d|, |α|)` for this case.
    pub fn magnitudes(&self, mapping: &DapskMapping) -> (f64, f64) {
        let (a1, a2, r) = (mapping.inner_radius(), mapping.outer_radius(), mapping.ring_ratio());
        match self {
            AmplitudeCase::InnerStay => (a1, 1.0),
            AmplitudeCase::OuterStay => (a2, 1.0),
            AmplitudeCase::InnerToOuter => (a1, r),
            AmplitudeCase::OuterToInner => (a2, 1.0 / r),
        }
    }
}

/// One of the 32 transmit hypotheses for a symbol pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    d: f64,
    alpha_mag: f64,
    alpha_arg: f64,
}

impl Hypothesis {
    /// Hypothesis for an amplitude case and phase index `m` (angle `mπ/4`).
    pub fn new(case: AmplitudeCase, phase_index: usize, mapping: &DapskMapping) -> Self {
        let (d, alpha_mag) = case.magnitudes(mapping);
        Hypothesis {
            d,
            alpha_mag,
            alpha_arg: DapskMapping::angle(phase_index),
        }
    }

    /// Builds a hypothesis from raw parts, rejecting amplitude pairs that
    /// the constellation cannot produce.
    pub fn from_parts(d: f64, alpha_mag: f64, alpha_arg: f64, mapping: &DapskMapping) -> Result<Self> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
        let ok = AmplitudeCase::ALL.iter().any(|c| {
            let (dd, aa) = c.magnitudes(mapping);
            close(d, dd) && close(alpha_mag, aa)
        });
        if !ok {
            return Err(Error::DisallowedHypothesis { d, alpha: alpha_mag });
        }
        Ok(Hypothesis {
            d,
            alpha_mag,
            alpha_arg,
        })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn alpha_mag(&self) -> f64 {
        self.alpha_mag
    }

    pub fn alpha_arg(&self) -> f64 {
        self.alpha_arg
    }
}

/// `ln p(r, ψ | hypothesis)` with per-dimension noise variance `sigma2`.
pub fn log_joint_density(r: f64, psi: f64, hyp: &Hypothesis, sigma2: f64) -> f64 {
    let n0 = 2.0 * sigma2;
    let a = hyp.alpha_mag;
    let k = hyp.d / n0;
    let xi2 = k * k * (1.0 + a * a * r * r + 2.0 * a * r * (psi - hyp.alpha_arg).cos());
    let p = hyp.d * hyp.d * (1.0 + a * a) / n0;
    let b = (1.0 + r * r) / n0;
    xi2 / b - p + (xi2 + b).ln() + r.ln() - 2.0 * n0.ln() - PI.ln() - 3.0 * b.ln()
}

/// `p(r, ψ | hypothesis)`; see the module documentation.
pub fn joint_density(r: f64, psi: f64, hyp: &Hypothesis, sigma2: f64) -> f64 {
    log_joint_density(r, psi, hyp, sigma2).exp()
}

/// Bit LLRs `ln P(b_i = 0)/P(b_i = 1)` at `(r, ψ)` over the 32 equiprobable
/// hypotheses.
pub fn bit_llrs_at(r: f64, psi: f64, sigma2: f64, mapping: &DapskMapping) -> [f64; 4] {
    let mut zeros = [[0.0; 16]; 4];
    let mut ones = [[0.0; 16]; 4];
    let mut counts = [[0usize; 2]; 4];
    for case in AmplitudeCase::ALL {
        for m in 0..8 {
            let l = log_joint_density(r, psi, &Hypothesis::new(case, m, mapping), sigma2);
            let ph = mapping.phase_label(m);
            let bits = [case.b0(), ph[0], ph[1], ph[2]];
            for i in 0..4 {
                let c = &mut counts[i][bits[i] as usize];
                if bits[i] == 0 {
                    zeros[i][*c] = l;
                } else {
                    ones[i][*c] = l;
                }
                *c += 1;
            }
        }
    }
    let mut llr = [0.0; 4];
    for i in 0..4 {
        llr[i] = log_sum_exp(&zeros[i]) - log_sum_exp(&ones[i]);
    }
    llr
}

/// Bit LLRs for an observed pair; see [`bit_llrs_at`].
pub fn exact_bit_llrs(obs: &DapskObservation, mapping: &DapskMapping) -> [f64; 4] {
    bit_llrs_at(obs.r(), obs.psi(), obs.sigma2, mapping)
}

/// High-SNR amplitude threshold `Δ₀ = 2/(1+R)`.
pub fn delta0_estimate(ring_ratio: f64) -> Result<f64> {
    Ok(DapskMapping::new(ring_ratio)?.delta0_estimate())
}

/// Root in `r ∈ (1/R, 1)` of the exact `b0` LLR at `ψ = 0`.
pub fn numeric_delta0(ring_ratio: f64, sigma2: f64) -> Result<f64> {
    let mapping = DapskMapping::new(ring_ratio)?;
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {sigma2}")));
    }
    let f = |r: f64| bit_llrs_at(r, 0.0, sigma2, &mapping)[0];
    let (mut lo, mut hi) = (1.0 / ring_ratio, 1.0);
    if f(lo) >= 0.0 || f(hi) <= 0.0 {
        return Err(Error::InvalidParameter(
            "b0 LLR does not change sign between 1/R and 1".into(),
        ));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Phase distances at which the two upper (and mirrored lower) thresholds of
/// each β are evaluated, indexed by `β − 1`.
const THRESHOLD_DISTANCES: [(f64, f64); 3] = [
    (5.0 * PI / 8.0, 7.0 * PI / 16.0),
    (11.0 * PI / 32.0, 9.0 * PI / 32.0),
    (7.0 * PI / 32.0, 5.0 * PI / 32.0),
];

/// Inside a transition band `b0` is dropped when the β-th most reliable
/// phase bit is farther than this from its nearest disagreeing angle.
/// Indexed by `β − 1`.
pub const HYBRID_DISTANCE: [f64; 3] = [PI / 2.0, 5.0 * PI / 16.0, 3.0 * PI / 16.0];

/// Which amplitude band `r'` falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    /// `b0` is kept together with the top `β − 1` phase bits.
    B0Reliable,
    /// `b0` is kept or dropped depending on the angular sector of `ψ`.
    Transition,
    /// `b0` is dropped; the top `β` phase bits are kept.
    B0Unreliable,
}

/// Amplitude thresholds of the simplified scheme for one β and ring ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet {
    pub beta: usize,
    pub ring_ratio: f64,
    /// `Δ_{β,1} ≥ Δ_{β,2} ≥ Δ_{β,3} ≥ Δ_{β,4}`.
    pub delta: [f64; 4],
    /// Amplitude decision threshold `2/(1+R)`.
    pub delta0: f64,
}

/// Threshold table entry for `beta ∈ 1..=3`.
///
/// The upper pair solves `r' = 2(R − cos d)/(R² − 1)` and the lower pair
/// `r' = 2(R cos d − 1)/(R² − 1)` at two phase distances `d` per β; upper
/// values are clamped to 1 and lower values to 0.
pub fn threshold_set(beta: usize, ring_ratio: f64) -> Result<ThresholdSet> {
    check_beta(beta, 1, 3)?;
    let mapping = DapskMapping::new(ring_ratio)?;
    let r = ring_ratio;
    let den = r * r - 1.0;
    let (d1, d2) = THRESHOLD_DISTANCES[beta - 1];
    let upper = |d: f64| (2.0 * (r - d.cos()) / den).min(1.0);
    let lower = |d: f64| (2.0 * (r * d.cos() - 1.0) / den).max(0.0);
    Ok(ThresholdSet {
        beta,
        ring_ratio,
        delta: [upper(d1), upper(d2), lower(d2), lower(d1)],
        delta0: mapping.delta0_estimate(),
    })
}

impl ThresholdSet {
    /// Band of `r'`. Intervals are half-open `(a, b]`.
    pub fn band(&self, r_prime: f64) -> Band {
        let [d1, d2, d3, d4] = self.delta;
        if r_prime > d1 || r_prime <= d4 {
            Band::B0Reliable
        } else if r_prime > d2 || r_prime <= d3 {
            Band::Transition
        } else {
            Band::B0Unreliable
        }
    }
}

fn amplitude_bit(r_prime: f64, delta0: f64) -> Bit {
    Bit::from(r_prime < delta0)
}

fn full_values(r_prime: f64, delta0: f64, phase: [Bit; 3]) -> [Bit; 4] {
    [amplitude_bit(r_prime, delta0), phase[0], phase[1], phase[2]]
}

/// Full order of `[b0, b1, b2, b3]` from the phase-bit order and the rank
/// of `b0` among them.
fn order_with_b0(phase_order: [usize; 3], b0_rank: usize) -> [usize; 4] {
    let mut ranked = [0usize; 4];
    let mut k = 0;
    for (j, &p) in phase_order.iter().enumerate() {
        if j == b0_rank {
            ranked[k] = 0;
            k += 1;
        }
        ranked[k] = p + 1;
        k += 1;
    }
    if b0_rank == 3 {
        ranked[3] = 0;
    }
    ranked
}

/// Optimal-rule reliability order of all four bits (most reliable first)
/// and their hard decisions. `b0` is placed among the phase bits by
/// comparing `r'` with the reliability boundary of each phase bit; the
/// comparisons are monotone in the phase distance, so `b0` ranks just above
/// the phase bits it beats.
pub fn rule_ranking(r_prime: f64, psi: f64, mapping: &DapskMapping) -> ([usize; 4], [Bit; 4]) {
    let r = mapping.ring_ratio();
    let den = r * r - 1.0;
    let d0 = mapping.delta0_estimate();
    let rank = mapping.rank_phase(psi);
    let beats = rank
        .distances
        .iter()
        .filter(|d| {
            let c = d.cos();
            if r_prime > d0 {
                r_prime > 2.0 * (r - c) / den
            } else {
                r_prime <= 2.0 * (r * c - 1.0) / den
            }
        })
        .count();
    (
        order_with_b0(rank.order(), 3 - beats),
        full_values(r_prime, d0, rank.values),
    )
}

/// Optimal-rule detection from `(r', ψ)`: the `beta` highest-ranked bits of
/// [`rule_ranking`] are kept.
pub fn rule_verdict(r_prime: f64, psi: f64, beta: usize, mapping: &DapskMapping) -> BitVerdict {
    let (order, values) = rule_ranking(r_prime, psi, mapping);
    BitVerdict::keep(values, &order[..beta])
}

/// Simplified detection from `(r', ψ)` using a threshold table. `beta = 4`
/// is standard detection and ignores `thresholds`.
pub fn simple_verdict(
    r_prime: f64,
    psi: f64,
    beta: usize,
    thresholds: Option<&ThresholdSet>,
    mapping: &DapskMapping,
) -> Result<BitVerdict> {
    let d0 = mapping.delta0_estimate();
    let rank = mapping.rank_phase(psi);
    let values = full_values(r_prime, d0, rank.values);
    if beta == 4 {
        return Ok(BitVerdict::full(values));
    }
    let t = thresholds.ok_or_else(|| Error::InvalidParameter("threshold set required".into()))?;
    if t.beta != beta {
        return Err(Error::InvalidParameter(format!(
            "threshold set is for beta={}, requested beta={beta}",
            t.beta
        )));
    }
    let order = rank.order();
    let keep_b0 = match t.band(r_prime) {
        Band::B0Reliable => true,
        Band::B0Unreliable => false,
        Band::Transition => rank.distances[order[beta - 1]] <= HYBRID_DISTANCE[beta - 1],
    };
    let b0_rank = if keep_b0 { beta - 1 } else { 3 };
    Ok(BitVerdict::keep(values, &order_with_b0(order, b0_rank)[..beta]))
}

/// Optimal-rule detection of an observed pair.
pub fn optimal_rule_demod(obs: &DapskObservation, beta: usize, mapping: &DapskMapping) -> Result<BitVerdict> {
    check_beta(beta, 1, 4)?;
    Ok(rule_verdict(obs.r_prime(), obs.psi(), beta, mapping))
}

/// Simplified detection of an observed pair.
pub fn simple_demod_beta(
    obs: &DapskObservation,
    beta: usize,
    thresholds: &ThresholdSet,
    mapping: &DapskMapping,
) -> Result<BitVerdict> {
    check_beta(beta, 1, 4)?;
    simple_verdict(obs.r_prime(), obs.psi(), beta, Some(thresholds), mapping)
}

/// Keeps the `beta` bits with the largest exact LLR magnitude.
pub fn exact_demod_beta(obs: &DapskObservation, beta: usize, mapping: &DapskMapping) -> Result<BitVerdict> {
    check_beta(beta, 1, 4)?;
    if !(obs.sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exact detection needs a positive noise variance, got {}",
            obs.sigma2
        )));
    }
    Ok(keep_by_llr(&exact_bit_llrs(obs, mapping), beta))
}

/// Dispatches on `variant`.
pub fn demod_beta(
    obs: &DapskObservation,
    beta: usize,
    mapping: &DapskMapping,
    variant: Variant,
) -> Result<BitVerdict> {
    match variant {
        Variant::Exact => exact_demod_beta(obs, beta, mapping),
        Variant::Rule => optimal_rule_demod(obs, beta, mapping),
        Variant::Simple => {
            check_beta(beta, 1, 4)?;
            let t = if beta < 4 {
                Some(threshold_set(beta, mapping.ring_ratio())?)
            } else {
                None
            };
            simple_verdict(obs.r_prime(), obs.psi(), beta, t.as_ref(), mapping)
        }
    }
}
