//! Reference values for the planar Wiener sausage: the Berezhkovskii
//! expected-area integral, its radius derivative and the Le Gall small-radius
//! asymptotics.

mod bessel;
mod quadrature;

pub use bessel::{bessel_j0, bessel_y0};
pub use quadrature::{integrate, Estimate, QuadratureSpec};

use std::f64::consts::{LN_10, LN_2, PI};

use crate::error::{Error, Result};

use bessel::{hankel_modulus, modulus_sq, EULER_GAMMA};

/// Split point between the logarithmic substitution and direct integration.
const Y_LOW: f64 = 0.1;
/// Bessel argument beyond which `J0^2 + Y0^2` is taken from the Hankel expansion.
const Y_HANKEL: f64 = 14.0;

fn check_rt(r: f64, t: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() || !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("need finite r > 0 and T > 0, got r = {r}, T = {t}")));
    }
    Ok(())
}

/// Below this `u` the point `y = exp(-1/u)` is under 1e-100.
const U_TINY: f64 = 1.0 / (100.0 * LN_10);

/// `(1 - exp(-s y^2)) / y^2`.
fn damp(s: f64, y: f64) -> f64 {
    -(-s * y * y).exp_m1() / (y * y)
}

/// `I(s) = int_0^inf (1 - exp(-s y^2)) / (y^3 (J0(y)^2 + Y0(y)^2)) dy`
///
/// split into three positive pieces:
/// * `(0, 0.1)` with `y = exp(-1/u)`, which turns the `1/(y ln^2 y)` blow-up
///   into a bounded integrand tending to `s pi^2 / 4`; near `u = 0` the
///   Bessel functions are replaced by their leading terms, since `y`
///   underflows;
/// * `[0.1, 1]` directly;
/// * `[1, inf)` with `y = 1/v`, where the integrand becomes
///   `(1 - exp(-s/v^2)) v / (J0^2 + Y0^2)(1/v)`, tending to `pi/2` as `v -> 0`.
fn kernel_integral(s: f64, q: &QuadratureSpec) -> Result<Estimate> {
    let u0 = 1.0 / (1.0 / Y_LOW).ln();
    let low = integrate(
        |u: f64| {
            if u < U_TINY {
                // J0(y) = 1 and Y0(y) = (2/pi)(ln(y/2) + gamma) to double precision,
                // with ln y = -1/u
                let c = 2.0 / PI * (1.0 - u * (EULER_GAMMA - LN_2));
                return s / (u * u + c * c);
            }
            let y = (-1.0 / u).exp();
            damp(s, y) / (modulus_sq(y) * u * u)
        },
        0.0,
        u0,
        q,
    )?;
    let mid = integrate(|y: f64| damp(s, y) / (y * modulus_sq(y)), Y_LOW, 1.0, q)?;
    let tail = integrate(
        |v: f64| {
            if v <= 0.0 {
                return 0.5 * PI;
            }
            let x = 1.0 / v;
            let e = -(-s * x * x).exp_m1();
            if x >= Y_HANKEL {
                0.5 * PI * e / hankel_modulus(x)
            } else {
                e * v / modulus_sq(x)
            }
        },
        0.0,
        1.0,
        q,
    )?;
    Ok(Estimate {
        value: low.value + mid.value + tail.value,
        error: low.error + mid.error + tail.error,
    })
}

/// Mean area of the Wiener sausage of radius `r` over `[0, T]`:
/// `pi r^2 + (8 r^2 / pi) I(T / (2 r^2))`.
pub fn expected_area(r: f64, t: f64, q: &QuadratureSpec) -> Result<Estimate> {
    check_rt(r, t)?;
    let i = kernel_integral(t / (2.0 * r * r), q)?;
    let c = 8.0 * r * r / PI;
    Ok(Estimate {
        value: PI * r * r + c * i.value,
        error: c * i.error,
    })
}

/// Mean boundary length, the `r`-derivative of [`expected_area`].
///
/// Central differences with steps `h = 1e-3 r` and `h/2` are combined by
/// Richardson extrapolation; the error covers the extrapolation discrepancy
/// and the propagated quadrature error.
pub fn expected_perimeter(r: f64, t: f64, q: &QuadratureSpec) -> Result<Estimate> {
    check_rt(r, t)?;
    let h = 1e-3 * r;
    let diff = |h: f64| -> Result<(f64, f64)> {
        let hi = expected_area(r + h, t, q)?;
        let lo = expected_area(r - h, t, q)?;
        Ok(((hi.value - lo.value) / (2.0 * h), (hi.error + lo.error) / (2.0 * h)))
    };
    let (d1, e1) = diff(h)?;
    let (d2, e2) = diff(0.5 * h)?;
    let value = (4.0 * d2 - d1) / 3.0;
    Ok(Estimate {
        value,
        error: (d2 - d1).abs() / 3.0 + (4.0 * e2 + e1) / 3.0,
    })
}

fn check_small_r(r: f64, t: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("asymptote needs 0 < r < 1, got {r}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("need T > 0, got {t}")));
    }
    Ok(())
}

/// `pi T / |ln r|`.
pub fn legall_area_asymptote(r: f64, t: f64) -> Result<f64> {
    check_small_r(r, t)?;
    Ok(PI * t / r.ln().abs())
}

/// `pi T / (r ln^2 r)`.
pub fn legall_perimeter_asymptote(r: f64, t: f64) -> Result<f64> {
    check_small_r(r, t)?;
    let l = r.ln();
    Ok(PI * t / (r * l * l))
}
