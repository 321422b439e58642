use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use crate::error::{Error, Result};

/// Complementary error function, to about 1e-16 relative for `x >= 0`.
///
/// Below 2 the positive-term series `erf x = 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (2n+1)!!`
/// is used, above it the Laplace continued fraction.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        let x2 = 2.0 * x * x;
        let (mut term, mut sum) = (x, x);
        let mut n = 0.0;
        while term > 1e-17 * sum {
            n += 1.0;
            term *= x2 / (2.0 * n + 1.0);
            sum += term;
        }
        return 1.0 - 2.0 / PI.sqrt() * (-x * x).exp() * sum;
    }
    // x + (1/2)/(x + 1/(x + (3/2)/(x + ...))), modified Lentz
    let tiny = 1e-300;
    let mut f = x;
    let (mut cc, mut d) = (f, 0.0);
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        d = if d == 0.0 { tiny } else { d };
        cc = x + a / cc;
        cc = if cc == 0.0 { tiny } else { cc };
        d = 1.0 / d;
        let delta = cc * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - normal_cdf(x)`, without cancellation for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Parametric curves in the radius `r`; `ln` is the natural logarithm.
///
/// * `Area`: `c1/(|ln r| + c2) + c3 r^c4 + c5 r^c6 + c7 r^c8`
/// * `Perimeter`: `c1/(r ln^2 r + c2) + c3 r^-c4 + c5 r^-c6 + c7 r^c8`
/// * `Euler`: `1 - c1 (1 - Phi((r - c2)/c3)) / (ln(c4 r^c5 + 1) r^c6)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelForm {
    Area,
    Perimeter,
    Euler,
}

const AREA_LIT: [f64; 8] = [441.83, 265.265, 387768.0, 0.252344, 1064.51, 1.24465, 0.235594, 2.27655];
const PERIMETER_LIT: [f64; 8] = [54943.9, 2.66290, 93484.2, 0.862668, 9038.09, 0.123680, 15.6493, 0.901971];
const EULER_LIT: [f64; 6] = [0.0423017, 224.899, 50.2096, 3.88182e-6, 1.88978, 0.153452];

impl ModelForm {
    pub const ALL: [ModelForm; 3] = [ModelForm::Area, ModelForm::Perimeter, ModelForm::Euler];

    pub fn name(self) -> &'static str {
        match self {
            ModelForm::Area => "area",
            ModelForm::Perimeter => "perimeter",
            ModelForm::Euler => "euler",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            ModelForm::Euler => 6,
            _ => 8,
        }
    }

    pub fn param_names(self) -> Vec<String> {
        (1..=self.param_count()).map(|i| format!("c{i}")).collect()
    }

    /// Coefficients fitted to the full-scale experiment (T = 1e6, radii in
    /// pixels of unit length).
    pub fn literature_params(self) -> Vec<f64> {
        match self {
            ModelForm::Area => AREA_LIT.to_vec(),
            ModelForm::Perimeter => PERIMETER_LIT.to_vec(),
            ModelForm::Euler => EULER_LIT.to_vec(),
        }
    }

    /// Indices of the parameters that enter linearly.
    pub fn linear_params(self) -> &'static [usize] {
        match self {
            ModelForm::Euler => &[0],
            _ => &[0, 2, 4, 6],
        }
    }

    pub fn eval(self, c: &[f64], r: f64) -> Result<f64> {
        self.eval_with_gradient(c, r).map(|(f, _)| f)
    }

    /// Value and analytic partial derivatives with respect to `c`.
    pub fn eval_with_gradient(self, c: &[f64], r: f64) -> Result<(f64, Vec<f64>)> {
        if c.len() != self.param_count() {
            return Err(Error::domain(format!(
                "{} form takes {} parameters, got {}",
                self.name(),
                self.param_count(),
                c.len()
            )));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::domain(format!("radius must be positive and finite, got {r}")));
        }
        let lr = r.ln();
        let (f, g) = match self {
            ModelForm::Area | ModelForm::Perimeter => {
                let (x, sign) = if self == ModelForm::Area {
                    (lr.abs(), -1.0)
                } else {
                    (r * lr * lr, 1.0)
                };
                let den = x + c[1];
                if den == 0.0 {
                    return Err(Error::domain(format!("{} form: pole at r = {r}", self.name())));
                }
                // power terms: the first two have exponent sign `sign`, the last is positive
                let e = [-sign * c[3], -sign * c[5], c[7]];
                let p = [r.powf(e[0]), r.powf(e[1]), r.powf(e[2])];
                let f = c[0] / den + c[2] * p[0] + c[4] * p[1] + c[6] * p[2];
                let g = vec![
                    1.0 / den,
                    -c[0] / (den * den),
                    p[0],
                    -sign * c[2] * p[0] * lr,
                    p[1],
                    -sign * c[4] * p[1] * lr,
                    p[2],
                    c[6] * p[2] * lr,
                ];
                (f, g)
            }
            ModelForm::Euler => {
                if c[2] == 0.0 {
                    return Err(Error::domain("euler form: c3 must be nonzero"));
                }
                let z = (r - c[1]) / c[2];
                let s = normal_sf(z);
                let phi = normal_pdf(z);
                let q = c[3] * r.powf(c[4]);
                if !(q > -1.0) || q == 0.0 {
                    return Err(Error::domain(format!(
                        "euler form: logarithm argument {} at r = {r} must exceed 1",
                        q + 1.0
                    )));
                }
                let gl = q.ln_1p();
                let pw = r.powf(c[5]);
                let d = gl * pw;
                let f = 1.0 - c[0] * s / d;
                let dq = c[0] * s / (d * gl * (q + 1.0));
                let g = vec![
                    -s / d,
                    -c[0] * phi / (c[2] * d),
                    -c[0] * phi * z / (c[2] * d),
                    dq * r.powf(c[4]),
                    dq * q * lr,
                    c[0] * s * lr / d,
                ];
                (f, g)
            }
        };
        if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!("{} form is not finite at r = {r}", self.name())));
        }
        Ok((f, g))
    }

    /// Five-point central-difference gradient with relative step `h`.
    pub fn numeric_gradient(self, c: &[f64], r: f64, h: f64) -> Result<Vec<f64>> {
        let mut x = c.to_vec();
        (0..c.len())
            .map(|j| {
                let step = h * c[j].abs().max(1e-3);
                let mut at = |k: f64| {
                    x[j] = c[j] + k * step;
                    let v = self.eval(&x, r);
                    x[j] = c[j];
                    v
                };
                let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
                Ok((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * step))
            })
            .collect()
    }

    /// Value whose relative error is reported. For the Euler form this is
    /// `2 - v`, which stays away from zero where the mean Euler number crosses it.
    pub fn error_target(self, v: f64) -> f64 {
        match self {
            ModelForm::Euler => 2.0 - v,
            _ => v,
        }
    }
}

impl fmt::Display for ModelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "area" => Ok(ModelForm::Area),
            "perimeter" | "boundary_length" => Ok(ModelForm::Perimeter),
            "euler" => Ok(ModelForm::Euler),
            _ => Err(Error::config("form", format!("unknown model form {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        for (x, want) in [
            (1.96, 0.975002104851779563787),
            (-1.96, 0.0249978951482204362128),
            (0.5, 0.691462461274013103638),
            (-3.0, 0.00134989803163009452665),
            (5.0, 0.999999713348428120806),
        ] {
            assert!((normal_cdf(x) - want).abs() <= 1e-12, "{x}");
        }
        assert!((normal_cdf(-8.0) / 6.220960574271784123516e-16 - 1.0).abs() < 1e-12);
        assert!((normal_sf(20.0) / 2.753624118606233695076e-89 - 1.0).abs() < 1e-12);
        for i in 0..200 {
            let x = -9.0 + 0.0917 * i as f64;
            assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn area_literature_value_at_one() {
        let v = ModelForm::Area.eval(&AREA_LIT, 1.0).unwrap();
        let want = 441.83 / 265.265 + 387768.0 + 1064.51 + 0.235594;
        assert!((v - want).abs() < 1e-9 * want);
        assert!((v - 388834.41).abs() < 0.01, "{v}");
    }

    #[test]
    fn euler_literature_limits() {
        let f = |r| ModelForm::Euler.eval(&EULER_LIT, r).unwrap();
        for r in [561.0, 800.0, 1900.0, 1e5] {
            assert!((f(r) - 1.0).abs() < 0.01, "{r}");
        }
        assert!(f(1e-3) < f(1e-1) && f(1e-6) < -1e3);
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let cases = [
            (ModelForm::Area, vec![2.0, 3.5, 1.5, 0.3, 0.7, 1.2, 0.1, 2.1]),
            (ModelForm::Perimeter, vec![0.5, 2.7, 1.1, 0.9, 2.0, 0.1, 0.6, 0.8]),
            (ModelForm::Euler, vec![0.05, 0.3, 0.12, 0.8, 1.9, 0.15]),
        ];
        for (form, c) in cases {
            for r in [0.01, 0.07, 0.2, 0.45, 1.3, 3.0] {
                let (_, g) = form.eval_with_gradient(&c, r).unwrap();
                let n = form.numeric_gradient(&c, r, 1e-3).unwrap();
                for (j, (a, b)) in g.iter().zip(&n).enumerate() {
                    let scale = a.abs().max(1e-8);
                    assert!((a - b).abs() <= 1e-6 * scale, "{form} c{} r={r}: {a} vs {b}", j + 1);
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(ModelForm::Area.eval(&AREA_LIT, 0.0).is_err());
        assert!(ModelForm::Area.eval(&AREA_LIT[..7], 1.0).is_err());
        let mut c = EULER_LIT;
        c[3] = 0.0;
        assert!(ModelForm::Euler.eval(&c, 1.0).is_err());
        let mut c = AREA_LIT;
        c[1] = 0.0;
        assert!(ModelForm::Area.eval(&c, 1.0).is_err());
    }
}
