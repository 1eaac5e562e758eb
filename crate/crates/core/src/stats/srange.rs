//! Distribution of the studentized range.
//!
//! For `k` independent standard normals the range `W` satisfies
//!
//! ```text
//! P(W <= w) = k * ∫ φ(z) [Φ(z) - Φ(z - w)]^(k-1) dz
//! ```
//!
//! and with `df` error degrees of freedom the studentized range `Q = W / s`
//! mixes that over the density of `s = sqrt(χ²_df / df)`:
//!
//! ```text
//! P(Q <= q) = ∫ f_s(s) P(W <= q s) ds
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use serde::Serialize;

use super::quadrature::integrate;
use super::StatsError;

/// Above this many degrees of freedom the infinite-df form is used.
pub const LARGE_DF: u32 = 10_000;

const TOL: f64 = 1e-9;
const Z_SPAN: f64 = 8.5;
const QUANTILE_TOL: f64 = 1e-8;
const NEGLIGIBLE_DENSITY: f64 = 1e-15;

/// Error degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Df {
    Finite(u32),
    Infinite,
}

impl From<usize> for Df {
    fn from(df: usize) -> Self {
        u32::try_from(df).map_or(Df::Infinite, Df::Finite)
    }
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// Φ(z) - Φ(z - w), evaluated on whichever tail keeps precision.
fn normal_interval(z: f64, w: f64) -> f64 {
    if z > 0.0 {
        normal_sf(z - w) - normal_sf(z)
    } else {
        normal_cdf(z) - normal_cdf(z - w)
    }
}

/// CDF of the range of `k` standard normals.
fn range_cdf(w: f64, k: u32) -> Result<f64, StatsError> {
    if w <= 0.0 {
        return Ok(0.0);
    }
    let power = (k - 1) as i32;
    let integral = integrate(
        |z| Ok::<_, StatsError>(normal_pdf(z) * normal_interval(z, w).powi(power)),
        -Z_SPAN,
        Z_SPAN,
        TOL / k as f64,
    )?
    .map_err(|e| StatsError::ConvergenceFailure {
        what: format!("normal range integral (w = {w}, k = {k}), last change {:e}", e.last_change),
    })?;
    Ok((k as f64 * integral).clamp(0.0, 1.0))
}

/// Log density of `s = sqrt(χ²_ν / ν)`.
fn ln_scaled_chi_pdf(s: f64, nu: f64) -> f64 {
    let half = nu / 2.0;
    LN_2 + half * half.ln() - libm::lgamma(half) + (nu - 1.0) * s.ln() - half * s * s
}

fn check_args(k: u32) -> Result<(), StatsError> {
    if k < 2 {
        return Err(StatsError::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// `P(Q <= q)` for the studentized range of `k` means with `df` degrees of
/// freedom.
pub fn srange_cdf(q: f64, k: u32, df: Df) -> Result<f64, StatsError> {
    check_args(k)?;
    if q.is_nan() {
        return Err(StatsError::InvalidArgument("q is NaN".into()));
    }
    if q <= 0.0 {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(1.0);
    }
    let nu = match df {
        Df::Finite(0) => {
            return Err(StatsError::InvalidArgument("df must be positive".into()));
        }
        Df::Finite(nu) if nu <= LARGE_DF => nu as f64,
        _ => return range_cdf(q, k),
    };

    // Chi-square tails beyond ~10 sd carry negligible mass.
    let spread = 10.0 * (2.0 * nu).sqrt();
    let lo = ((nu - spread).max(0.0) / nu).sqrt();
    let hi = ((nu + spread + 50.0) / nu).sqrt();
    let integral = integrate(
        |s| {
            let density = ln_scaled_chi_pdf(s, nu).exp();
            // range_cdf <= 1, so such nodes add less than the tolerance
            if density < NEGLIGIBLE_DENSITY {
                return Ok(0.0);
            }
            Ok(density * range_cdf(q * s, k)?)
        },
        lo,
        hi,
        TOL,
    )?
    .map_err(|e| StatsError::ConvergenceFailure {
        what: format!("studentized range integral (q = {q}, k = {k}, df = {nu}), last change {:e}", e.last_change),
    })?;
    Ok(integral.clamp(0.0, 1.0))
}

/// Inverse of [`srange_cdf`] in `q`, by bisection to 1e-8.
pub fn srange_quantile(p: f64, k: u32, df: Df) -> Result<f64, StatsError> {
    check_args(k)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::InvalidArgument(format!("p must be in (0, 1), got {p}")));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while srange_cdf(hi, k, df)? < p {
        lo = hi;
        hi *= 2.0;
        if hi > 1e4 {
            return Err(StatsError::ConvergenceFailure {
                what: format!("no upper bracket for quantile p = {p}"),
            });
        }
    }
    while hi - lo > QUANTILE_TOL {
        let mid = 0.5 * (lo + hi);
        if srange_cdf(mid, k, df)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
