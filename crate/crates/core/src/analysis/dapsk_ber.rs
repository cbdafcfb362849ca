//! Numeric bit-error rate of the simplified 16-DAPSK β-decision scheme.
//!
//! The simplified detector only looks at `r' = min(r, 1/r)` and the sector
//! of `ψ`, so its decision is constant on rectangles bounded by the
//! threshold values in `r'` and multiples of `π/32` in `ψ`. The error rate is
//! the sum over rectangles and hypotheses of (kept-bit errors) × (probability
//! mass), with each mass obtained by two-dimensional quadrature of the joint
//! density of `(r, ψ)`.

use std::f64::consts::PI;

use crate::channel::sigma2_from_snr;
use crate::constellation::DapskMapping;
use crate::dapsk_demod::{joint_density, simple_verdict, threshold_set, AmplitudeCase, Hypothesis};
use crate::error::Result;
use crate::quad::{integrate_2d, QuadOptions};
use crate::verdict::check_beta;

/// Number of `ψ` cells over the full circle.
pub const PSI_CELLS: usize = 64;
const CELL: f64 = 2.0 * PI / PSI_CELLS as f64;
const CELLS_PER_PHASE: usize = PSI_CELLS / 8;

/// Relative accuracy requested for every cell integral.
pub const CELL_REL_TOL: f64 = 1e-6;

fn cell_bounds(c: usize) -> (f64, f64) {
    (-PI + c as f64 * CELL, -PI + (c + 1) as f64 * CELL)
}

/// Breakpoints of the piecewise-constant decision in `r'`, from 0 to 1.
pub(crate) fn r_prime_breaks(beta: usize, mapping: &DapskMapping) -> Result<Vec<f64>> {
    let mut v = vec![0.0, 1.0, mapping.delta0_estimate()];
    if beta < 4 {
        v.extend_from_slice(&threshold_set(beta, mapping.ring_ratio())?.delta);
    }
    v.retain(|x| (0.0..=1.0).contains(x));
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    Ok(v)
}

/// Probability that `r'` lies in `(lo, hi]` and `ψ − θ` in cell `rel`,
/// for the amplitude case (the phase is taken as 0).
fn cell_mass(
    case: AmplitudeCase,
    lo: f64,
    hi: f64,
    rel: usize,
    sigma2: f64,
    mapping: &DapskMapping,
) -> Result<f64> {
    let h = Hypothesis::new(case, 0, mapping);
    let (p0, p1) = cell_bounds(rel);
    let outer = QuadOptions {
        rel_tol: CELL_REL_TOL,
        abs_tol: 1e-300,
        initial_panels: 4,
        max_intervals: 4000,
    };
    let inner = QuadOptions {
        rel_tol: CELL_REL_TOL * 0.1,
        abs_tol: 1e-300,
        initial_panels: 2,
        max_intervals: 2000,
    };
    // r' ∈ (lo, hi] covers r ∈ (lo, hi] and r = 1/s with s ∈ (lo, hi].
    let res = integrate_2d(
        |s, psi| joint_density(s, psi, &h, sigma2) + joint_density(1.0 / s, psi, &h, sigma2) / (s * s),
        (lo, hi),
        (p0, p1),
        &outer,
        &inner,
    )?;
    Ok(res.value)
}

/// Bit-error rate among kept bits of the simplified scheme at `Es/N0 =
/// gamma` (linear) for ring ratio `ring_ratio`. `beta = 4` is standard
/// detection with `Δ₀ = 2/(1+R)`.
pub fn dapsk_ber_numeric(beta: usize, gamma: f64, ring_ratio: f64) -> Result<f64> {
    check_beta(beta, 1, 4)?;
    let mapping = DapskMapping::new(ring_ratio)?;
    let thresholds = if beta < 4 {
        Some(threshold_set(beta, ring_ratio)?)
    } else {
        None
    };
    let sigma2 = sigma2_from_snr(gamma);
    let breaks = r_prime_breaks(beta, &mapping)?;

    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let r_mid = 0.5 * (lo + hi);
        // Kept-bit verdicts for every absolute ψ cell.
        let verdicts = (0..PSI_CELLS)
            .map(|c| {
                let (a, b) = cell_bounds(c);
                simple_verdict(r_mid, 0.5 * (a + b), beta, thresholds.as_ref(), &mapping)
            })
            .collect::<Result<Vec<_>>>()?;
        for case in AmplitudeCase::ALL {
            // The density is even in ψ − θ: cell `rel` and `PSI_CELLS-1-rel`
            // carry the same mass.
            let mut masses = vec![None; PSI_CELLS];
            for m in 0..8 {
                let ph = mapping.phase_label(m);
                let truth = [case.b0(), ph[0], ph[1], ph[2]];
                for (c, v) in verdicts.iter().enumerate() {
                    let e = v.errors(&truth);
                    if e == 0 {
                        continue;
                    }
                    // Absolute cell c relative to θ_m = mπ/4, with cell 0
                    // starting at −π.
                    let rel = (c + PSI_CELLS - CELLS_PER_PHASE * m) % PSI_CELLS;
                    let key = rel.min(PSI_CELLS - 1 - rel);
                    let mass = match masses[key] {
                        Some(x) => x,
                        None => {
                            let x = cell_mass(case, lo, hi, key, sigma2, &mapping)?;
                            masses[key] = Some(x);
                            x
                        }
                    };
                    total += e as f64 * mass;
                }
            }
        }
    }
    Ok(total / (32.0 * beta as f64))
}
