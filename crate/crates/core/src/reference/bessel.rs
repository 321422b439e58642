//! Bessel functions of the first and second kind, order zero.
//!
//! Power series below `SWITCH`, Hankel asymptotic expansion above it. At the
//! switch the largest series term is about 3e4, so cancellation costs roughly
//! 1e-11, and the smallest asymptotic term is below 1e-12.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

const SWITCH: f64 = 14.0;
pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// `J0(x)` for finite `x >= 0`.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("J0 needs a finite x >= 0, got {x}")));
    }
    Ok(j0(x))
}

/// `Y0(x)` for finite `x > 0`.
pub fn bessel_y0(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("Y0 needs a finite x > 0, got {x}")));
    }
    Ok(y0(x))
}

pub(crate) fn j0(x: f64) -> f64 {
    if x < SWITCH {
        series(x).0
    } else {
        let (p, q) = hankel_pq(x);
        let (s, c) = (x - FRAC_PI_4).sin_cos();
        (2.0 / (PI * x)).sqrt() * (p * c - q * s)
    }
}

pub(crate) fn y0(x: f64) -> f64 {
    if x < SWITCH {
        let (j, h) = series(x);
        2.0 / PI * (((0.5 * x).ln() + EULER_GAMMA) * j + h)
    } else {
        let (p, q) = hankel_pq(x);
        let (s, c) = (x - FRAC_PI_4).sin_cos();
        (2.0 / (PI * x)).sqrt() * (p * s + q * c)
    }
}

/// `J0(x)^2 + Y0(x)^2`, without the cancellation of the oscillating parts
/// for large `x`.
pub(crate) fn modulus_sq(x: f64) -> f64 {
    if x < SWITCH {
        let (j, y) = (j0(x), y0(x));
        j * j + y * y
    } else {
        let (p, q) = hankel_pq(x);
        2.0 / (PI * x) * (p * p + q * q)
    }
}

/// `P^2 + Q^2` of the Hankel expansion; tends to 1 as `x -> inf`.
pub(crate) fn hankel_modulus(x: f64) -> f64 {
    let (p, q) = hankel_pq(x);
    p * p + q * q
}

/// `(J0(x), sum_k (-1)^(k+1) H_k (x^2/4)^k / k!^2)` with `H_k` the harmonic numbers.
fn series(x: f64) -> (f64, f64) {
    let z = 0.25 * x * x;
    let mut term = 1.0;
    let mut j = 1.0;
    let mut h = 0.0;
    let mut harmonic = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -z / (kf * kf);
        harmonic += 1.0 / kf;
        j += term;
        h -= harmonic * term;
        if term.abs() < 1e-17 * j.abs().max(1e-300) && k as f64 > z {
            break;
        }
    }
    (j, h)
}

fn hankel_pq(x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let m = 2.0 * kf - 1.0;
        t *= m * m / (8.0 * kf * x);
        if t >= prev || t < 1e-17 {
            break;
        }
        prev = t;
        let sign = if (k + 1) / 2 % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
    }
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-10);
        assert!((bessel_j0(10.0).unwrap() + 0.2459357644513483).abs() < 1e-12);
        assert!(bessel_y0(0.001).unwrap() < -4.0);
        assert!(bessel_y0(0.8935769662791675).unwrap().abs() < 1e-9);
        for x in [50.0, 100.0] {
            let m = bessel_j0(x).unwrap().powi(2) + bessel_y0(x).unwrap().powi(2);
            assert!((m / (2.0 / (x * PI)) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_j0(-1.0).is_err());
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j0(f64::INFINITY).is_err());
        assert!(bessel_y0(0.0).is_err());
        assert!(bessel_y0(-2.0).is_err());
    }

    #[test]
    fn continuous_at_switch() {
        for f in [j0 as fn(f64) -> f64, y0] {
            let below = f(SWITCH - 1e-12);
            let above = f(SWITCH);
            assert!((below - above).abs() < 1e-10, "{below} {above}");
        }
        let m = modulus_sq(SWITCH - 1e-12) - modulus_sq(SWITCH);
        assert!(m.abs() < 1e-10);
    }

    #[test]
    fn small_argument_logarithm() {
        let x: f64 = 1e-12;
        let want = 2.0 / PI * ((0.5 * x).ln() + EULER_GAMMA);
        assert!((y0(x) - want).abs() < 1e-10);
    }
}
