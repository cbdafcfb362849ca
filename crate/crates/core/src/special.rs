//! Special functions and small numeric helpers.

use std::f64::consts::PI;

/// Argument above which [`log_i0`] switches to the asymptotic expansion.
pub const BESSEL_CROSSOVER: f64 = 20.0;

/// Natural logarithm of the modified Bessel function I₀(x).
///
/// Below [`BESSEL_CROSSOVER`] the power series is summed directly. Above it
/// the standard asymptotic expansion
/// `x - ½ ln(2πx) + ln(1 + 1/(8x) + 9/(2(8x)²) + …)` is used, which stays
/// finite for arguments where I₀ itself overflows.
pub fn log_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= BESSEL_CROSSOVER {
        log_i0_series(x)
    } else {
        log_i0_asymptotic(x)
    }
}

fn log_i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    sum.ln()
}

fn log_i0_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    x - 0.5 * (2.0 * PI * x).ln() + sum.ln()
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `ln Σ exp(v)` evaluated without overflow. Returns `-inf` for an empty input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}
