//! Least-squares fits of parametric curves to Monte Carlo means.

mod forms;
mod lm;

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use forms::{normal_cdf, normal_sf, ModelForm};
pub use lm::{fit, FitOptions, JacobianMode};

/// One observation `y` at radius `r`, with least-squares weight `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub r: f64,
    pub y: f64,
    pub weight: f64,
}

impl DataPoint {
    pub fn new(r: f64, y: f64) -> Self {
        DataPoint { r, y, weight: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub form: ModelForm,
    pub parameters: Vec<f64>,
    /// Weighted residual sum of squares.
    pub rss: f64,
    /// Per-point relative errors in ascending `r`; `None` for points below the exclusion floor.
    pub relative_errors: Vec<Option<f64>>,
    pub max_relative_error: f64,
    pub mean_relative_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    /// `name,value` lines.
    pub fn parameters_csv(&self) -> String {
        let mut out = String::from("name,value\n");
        for (n, v) in self.form.param_names().iter().zip(&self.parameters) {
            let _ = writeln!(out, "{n},{v:e}");
        }
        out
    }

    /// JSON summary of errors, iterations and convergence.
    pub fn summary_json(&self) -> String {
        let v = serde_json::json!({
            "form": self.form.name(),
            "rss": self.rss,
            "max_relative_error": self.max_relative_error,
            "mean_relative_error": self.mean_relative_error,
            "excluded_points": self.relative_errors.iter().filter(|e| e.is_none()).count(),
            "iterations": self.iterations,
            "converged": self.converged,
        });
        serde_json::to_string_pretty(&v).expect("plain values serialize")
    }
}

/// Relative error statistics of a fitted curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeErrors {
    pub max: f64,
    pub mean: f64,
    /// Per point, in input order; `None` where excluded.
    pub per_point: Vec<Option<f64>>,
}

/// Points with `|target| < EXCLUSION_FLOOR * max |target|` are left out.
pub const EXCLUSION_FLOOR: f64 = 1e-3;

/// `|f(r) - y| / |y|` over the data, on the scale given by
/// [`ModelForm::error_target`].
pub fn relative_errors(form: ModelForm, params: &[f64], data: &[DataPoint]) -> Result<RelativeErrors> {
    let targets: Vec<f64> = data.iter().map(|d| form.error_target(d.y)).collect();
    let top = targets.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let floor = EXCLUSION_FLOOR * top;
    let per_point = data
        .iter()
        .zip(&targets)
        .map(|(d, &t)| {
            if t.abs() < floor || t == 0.0 {
                return Ok(None);
            }
            let f = form.eval(params, d.r)?;
            Ok(Some((form.error_target(f) - t).abs() / t.abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let used: Vec<f64> = per_point.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err(Error::Fit("every point lies below the relative-error floor".into()));
    }
    Ok(RelativeErrors {
        max: used.iter().copied().fold(0.0, f64::max),
        mean: used.iter().sum::<f64>() / used.len() as f64,
        per_point,
    })
}

/// Basis columns for the linear parameters given the nonlinear ones, and the
/// constant offset: `f = offset + sum_k c_lin[k] * basis[k]`.
fn linear_design(form: ModelForm, c: &[f64], r: f64) -> Result<(f64, Vec<f64>)> {
    let (_, g) = form.eval_with_gradient(c, r)?;
    let offset = match form {
        ModelForm::Euler => 1.0,
        _ => 0.0,
    };
    Ok((offset, form.linear_params().iter().map(|&j| g[j]).collect()))
}

fn nonlinear_candidates(form: ModelForm) -> Vec<Vec<f64>> {
    let lit = form.literature_params();
    let mut out = Vec::new();
    match form {
        ModelForm::Area | ModelForm::Perimeter => {
            for m2 in [0.001, 0.01, 0.1, 1.0, 10.0] {
                for shift in [-0.2, 0.0, 0.2] {
                    let mut c = lit.clone();
                    c[1] *= m2;
                    c[3] += shift;
                    c[5] += shift;
                    out.push(c);
                }
            }
        }
        ModelForm::Euler => {
            // radius unit u: the curve of r/u
            for u in [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0] {
                for m3 in [0.5, 1.0, 2.0] {
                    let mut c = lit.clone();
                    c[1] *= u;
                    c[2] *= u * m3;
                    c[3] *= u.powf(-lit[4]);
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Starting point for [`fit`]: nonlinear parameters on a coarse grid around
/// the literature values, linear parameters by least squares for each grid
/// point, keeping the best.
pub fn default_init(form: ModelForm, data: &[DataPoint]) -> Result<Vec<f64>> {
    let lin = form.linear_params();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mut c in nonlinear_candidates(form) {
        let rows: Option<Vec<(f64, Vec<f64>)>> = data.iter().map(|d| linear_design(form, &c, d.r).ok()).collect();
        let Some(rows) = rows else { continue };
        let a = DMatrix::from_fn(data.len(), lin.len(), |i, k| rows[i].1[k] * data[i].weight.sqrt());
        let b = DVector::from_fn(data.len(), |i, _| (data[i].y - rows[i].0) * data[i].weight.sqrt());
        let Ok(x) = a.clone().svd(true, true).solve(&b, 1e-12) else { continue };
        for (k, &j) in lin.iter().enumerate() {
            c[j] = x[k];
        }
        let rss = (&a * &x - &b).norm_squared();
        if rss.is_finite() && best.as_ref().map_or(true, |(r, _)| rss < *r) {
            best = Some((rss, c));
        }
    }
    best.map(|(_, c)| c)
        .ok_or_else(|| Error::Fit(format!("no starting point evaluates on the data for the {form} form")))
}
