//! Gamma-family special functions, evaluated in log space.

use crate::error::{domain, Result};
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Arguments below 10 are shifted upward with the recurrence
/// `Γ(x+1) = xΓ(x)`, then the Stirling series is summed through `x^-15`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("log_gamma", format!("argument must be finite and > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    let mut z = x;
    let mut shift = 1.0;
    let mut log_shift = 0.0;
    while z < 10.0 {
        shift *= z;
        if shift > 1e250 {
            log_shift += shift.ln();
            shift = 1.0;
        }
        z += 1.0;
    }
    log_shift += shift.ln();

    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - log_shift
}

/// `ln B(x, y) = ln Γ(x) + ln Γ(y) − ln Γ(x + y)`.
pub fn log_beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) {
        return Err(domain("log_beta", format!("arguments must be > 0, got ({x}, {y})")));
    }
    Ok(log_gamma(x)? + log_gamma(y)? - log_gamma(x + y)?)
}

/// Logarithm of the surface area of the unit sphere in `d` dimensions,
/// `Ω_d = 2π^{d/2} / Γ(d/2)`.
pub fn log_omega_d(d: f64) -> Result<f64> {
    if !(d >= 1.0) || !d.is_finite() {
        return Err(domain("omega_d", format!("dimension must be >= 1, got {d}")));
    }
    Ok(std::f64::consts::LN_2 + 0.5 * d * PI.ln() - log_gamma(0.5 * d)?)
}

/// Surface area of the unit sphere in `d` dimensions.
pub fn omega_d(d: f64) -> Result<f64> {
    Ok(log_omega_d(d)?.exp())
}
