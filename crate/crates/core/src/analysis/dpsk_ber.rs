//! Closed-form bit-error rate of the rule-based 16-DPSK β-decision scheme.
//!
//! For each transmitted phase difference the set of observed phases that
//! yields only correct kept bits is an arc `(−a, b)` around it. The symbol
//! error is the probability of leaving the arc, `F(a) + F(b)` with `F` the
//! one-sided phase tail, and the bit-error rate is the symbol error divided
//! by β, averaged over the sixteen transmitted angles.

use std::f64::consts::PI;

use crate::constellation::DpskMapping;
use crate::dpsk_demod::{demod_beta, DpskObservation};
use crate::error::Result;
use crate::verdict::{check_beta, Variant};

use super::pawula::phase_tail;

use num_complex::Complex64;

const HALF_STEP: f64 = PI / 16.0;

fn errors_at(mapping: &DpskMapping, beta: usize, m: usize, offset: f64) -> Result<usize> {
    let phi = DpskMapping::angle(m) + offset;
    let obs = DpskObservation::new(Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, phi), 1.0);
    let v = demod_beta(&obs, beta, mapping, Variant::Rule)?;
    Ok(v.errors(&mapping.label(m)))
}

/// Correct-decision arc `(a, b)` for every transmitted index: kept bits are
/// all correct for observed offsets in `(−a, b)`. The decision map is
/// constant between multiples of `π/16`, so the arc ends are multiples of
/// `π/16`.
pub fn dpsk_error_limits(beta: usize, mapping: &DpskMapping) -> Result<Vec<(f64, f64)>> {
    check_beta(beta, 1, 4)?;
    let mut out = Vec::with_capacity(16);
    for m in 0..16 {
        let mut lim = [PI; 2];
        for (s, sign) in [-1.0, 1.0].iter().enumerate() {
            for k in 0..16 {
                let offset = sign * (k as f64 + 0.5) * HALF_STEP;
                if errors_at(mapping, beta, m, offset)? > 0 {
                    lim[s] = k as f64 * HALF_STEP;
                    break;
                }
            }
        }
        out.push((lim[0], lim[1]));
    }
    Ok(out)
}

/// Symbol error probability of the β-decision scheme at `Es/N0 = gamma`,
/// averaged over transmitted angles.
pub fn dpsk_symbol_error(beta: usize, gamma: f64) -> Result<f64> {
    let limits = dpsk_error_limits(beta, &DpskMapping::canonical())?;
    let mut total = 0.0;
    for (a, b) in &limits {
        total += phase_tail(*a, gamma)? + phase_tail(*b, gamma)?;
    }
    Ok(total / limits.len() as f64)
}

/// Bit-error rate among kept bits, `P_S/β`.
pub fn dpsk_ber(beta: usize, gamma: f64) -> Result<f64> {
    Ok(dpsk_symbol_error(beta, gamma)? / beta as f64)
}
