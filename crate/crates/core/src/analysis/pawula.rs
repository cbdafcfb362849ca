//! Tail probabilities of the differential phase under AWGN.
//!
//! With unit-energy symbols at `Es/N0 = γ`, the probability that the
//! detected phase difference exceeds `ψ` on one side of the transmitted one
//! is
//!
//! ```text
//! F(ψ) = sin ψ / (4π) ∫_{−π/2}^{π/2} exp(−γ(1 − cos ψ cos t)) / (1 − cos ψ cos t) dt
//! ```
//!
//! For `ψ < π/2` and large `γ` it is well approximated by
//! `½ √((1 + cos ψ)/(2 cos ψ)) · erfc(√(γ(1 − cos ψ)))`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::special::erfc;

/// Closed-form approximation of the one-sided tail beyond `psi`.
/// Defined for `0 < psi < π/2`.
pub fn phase_tail_approx(psi: f64, gamma: f64) -> Result<f64> {
    if !(psi > 0.0 && psi < FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "approximate phase tail needs 0 < psi < pi/2, got {psi}"
        )));
    }
    let c = psi.cos();
    Ok(0.5 * ((1.0 + c) / (2.0 * c)).sqrt() * erfc((gamma * (1.0 - c)).sqrt()))
}

/// `phase_tail_approx(π/M, γ)`.
pub fn pawula_tail(m: u32, gamma: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::PawulaOrder(m));
    }
    phase_tail_approx(PI / m as f64, gamma)
}

/// Exact one-sided tail `F(ψ)` for `0 < psi ≤ π` by quadrature.
pub fn phase_tail_exact(psi: f64, gamma: f64) -> Result<f64> {
    if !(psi > 0.0 && psi <= PI) {
        return Err(Error::InvalidParameter(format!(
            "phase tail needs 0 < psi <= pi, got {psi}"
        )));
    }
    let c = psi.cos();
    let opts = QuadOptions {
        rel_tol: 1e-9,
        initial_panels: 8,
        max_intervals: 10_000,
        ..Default::default()
    };
    let r = integrate(
        |t| {
            let u = 1.0 - c * t.cos();
            (-gamma * u).exp() / u
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        &opts,
    )?;
    Ok(psi.sin() / (4.0 * PI) * r.value)
}

/// Tail used by the closed-form error rates: the approximation below `π/2`
/// and the exact integral from `π/2` on, where the approximation is not
/// defined.
pub fn phase_tail(psi: f64, gamma: f64) -> Result<f64> {
    if psi >= PI {
        return Ok(0.0);
    }
    if psi < FRAC_PI_2 {
        phase_tail_approx(psi, gamma)
    } else {
        phase_tail_exact(psi, gamma)
    }
}
