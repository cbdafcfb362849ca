//! SNR operating regions of the adaptive scheme.
//!
//! For a target bit-error rate each β has a threshold SNR above which its
//! closed-form (16-DPSK) or numeric (16-DAPSK) error rate stays below the
//! target. At a given SNR the adaptive receiver uses the largest β whose
//! threshold is met, which turns the thresholds into breakpoints
//! `γ₁ ≤ γ₂ ≤ γ₃ ≤ γ₄`: β is used on `[γ_β, γ_{β+1})` and nothing below `γ₁`.

use crate::channel::{db_to_linear, linear_to_db};
use crate::error::{Error, Result};
use crate::verdict::Modulation;

use super::dapsk_ber::dapsk_ber_numeric;
use super::dpsk_ber::dpsk_ber;

/// Lowest SNR searched, in dB.
pub const SEARCH_LO_DB: f64 = -10.0;
/// Highest SNR searched, in dB.
pub const SEARCH_HI_DB: f64 = 60.0;
const SCAN_STEP_DB: f64 = 5.0;

/// Analytic kept-bit error rate at linear `Es/N0 = gamma`: closed form for
/// 16-DPSK, numeric integration of the simplified scheme for 16-DAPSK.
pub fn analytic_ber(modulation: Modulation, beta: usize, gamma: f64) -> Result<f64> {
    match modulation {
        Modulation::Dpsk => dpsk_ber(beta, gamma),
        Modulation::Dapsk { ring_ratio } => dapsk_ber_numeric(beta, gamma, ring_ratio),
    }
}

/// Breakpoints of the adaptive scheme for one target error rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingRegions {
    pub modulation: Modulation,
    pub target_ber: f64,
    /// SNR (linear) at which each β alone reaches the target.
    pub thresholds: [f64; 4],
    /// Region lower edges `γ₁..γ₄` (linear), non-decreasing.
    pub breakpoints: [f64; 4],
    /// `|BER_β(threshold_β) − target| / target` for each β.
    pub residuals: [f64; 4],
}

impl OperatingRegions {
    /// β used at linear SNR `gamma`; 0 below `γ₁`.
    pub fn beta_for(&self, gamma: f64) -> usize {
        self.breakpoints.iter().filter(|&&g| gamma >= g).count()
    }

    /// `[lo, hi)` of the region of `beta` (1..=4), linear SNR.
    pub fn region(&self, beta: usize) -> (f64, f64) {
        let lo = self.breakpoints[beta - 1];
        let hi = if beta == 4 { f64::INFINITY } else { self.breakpoints[beta] };
        (lo, hi)
    }

    /// Breakpoints in dB.
    pub fn breakpoints_db(&self) -> [f64; 4] {
        self.breakpoints.map(linear_to_db)
    }
}

/// SNR in dB at which `BER_β` crosses `target`, by a bracketing scan
/// followed by the Illinois variant of regula falsi on `ln BER`.
pub fn target_crossing_db(modulation: Modulation, beta: usize, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::InvalidParameter(format!("target BER must be in (0, 0.5), got {target}")));
    }
    let f = |db: f64| -> Result<f64> { Ok(analytic_ber(modulation, beta, db_to_linear(db))?.ln() - target.ln()) };
    let unattainable = Error::UnattainableTarget {
        target,
        beta,
        lo_db: SEARCH_LO_DB,
        hi_db: SEARCH_HI_DB,
    };
    let mut a = SEARCH_LO_DB;
    let mut fa = f(a)?;
    if fa <= 0.0 {
        return Ok(a);
    }
    let mut b = a;
    let mut fb = fa;
    while fb > 0.0 {
        a = b;
        fa = fb;
        b += SCAN_STEP_DB;
        if b > SEARCH_HI_DB {
            return Err(unattainable);
        }
        fb = f(b)?;
    }
    // Illinois iteration on [a, b] with fa > 0 ≥ fb.
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c)?;
        if fc.abs() < 1e-7 || (b - a).abs() < 1e-9 {
            return Ok(c);
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    Ok(0.5 * (a + b))
}

/// Operating regions for `target` (e.g. `1e-4`).
pub fn operating_regions(modulation: Modulation, target: f64) -> Result<OperatingRegions> {
    let mut thresholds = [0.0; 4];
    let mut residuals = [0.0; 4];
    for beta in 1..=4 {
        let db = target_crossing_db(modulation, beta, target)?;
        let g = db_to_linear(db);
        thresholds[beta - 1] = g;
        residuals[beta - 1] = (analytic_ber(modulation, beta, g)? - target).abs() / target;
    }
    // β is usable wherever some β' ≥ β meets the target.
    let mut breakpoints = thresholds;
    for beta in (0..3).rev() {
        breakpoints[beta] = breakpoints[beta].min(breakpoints[beta + 1]);
    }
    Ok(OperatingRegions {
        modulation,
        target_ber: target,
        thresholds,
        breakpoints,
        residuals,
    })
}
