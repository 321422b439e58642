use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{relative_errors, DataPoint, FitResult, ModelForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMode {
    Analytic,
    /// Central differences, for cross-checking the analytic partials.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop when every gradient component's cosine with the residual falls below this.
    pub gradient_tol: f64,
    /// Stop when every component of the step is this small relative to its parameter.
    pub step_tol: f64,
    /// Stop when actual and predicted relative reductions of the objective are below this.
    pub objective_tol: f64,
    pub jacobian: JacobianMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            gradient_tol: 1e-12,
            step_tol: 1e-14,
            objective_tol: 1e-15,
            jacobian: JacobianMode::Analytic,
        }
    }
}

struct Problem<'a> {
    form: ModelForm,
    data: &'a [DataPoint],
    mode: JacobianMode,
}

impl Problem<'_> {
    /// Weighted residuals `sqrt(w) (y - f)`.
    fn residuals(&self, c: &[f64]) -> Result<DVector<f64>> {
        let mut v = DVector::zeros(self.data.len());
        for (i, d) in self.data.iter().enumerate() {
            v[i] = d.weight.sqrt() * (d.y - self.form.eval(c, d.r)?);
        }
        Ok(v)
    }

    /// Jacobian of the model values (not of the residuals), weighted.
    fn jacobian(&self, c: &[f64]) -> Result<DMatrix<f64>> {
        let mut j = DMatrix::zeros(self.data.len(), c.len());
        for (i, d) in self.data.iter().enumerate() {
            let g = match self.mode {
                JacobianMode::Analytic => self.form.eval_with_gradient(c, d.r)?.1,
                JacobianMode::FiniteDifference => self.form.numeric_gradient(c, d.r, 1e-3)?,
            };
            let w = d.weight.sqrt();
            for (k, gk) in g.iter().enumerate() {
                j[(i, k)] = w * gk;
            }
        }
        Ok(j)
    }
}

/// Levenberg–Marquardt minimization of `sum w (y - f(r; c))^2` from `init`.
///
/// The data are sorted by `r` first, so the result does not depend on their
/// order. Only steps that lower the objective are accepted. If the iteration
/// budget runs out, the best parameters so far are returned with
/// `converged = false`.
pub fn fit(form: ModelForm, data: &[DataPoint], init: &[f64], opts: &FitOptions) -> Result<FitResult> {
    let n = form.param_count();
    if init.len() != n {
        return Err(Error::Fit(format!("{form} form takes {n} parameters, got {}", init.len())));
    }
    if data.len() < n {
        return Err(Error::Fit(format!("{form} form needs at least {n} points, got {}", data.len())));
    }
    if let Some(d) = data.iter().find(|d| !(d.weight > 0.0) || !d.y.is_finite() || !d.weight.is_finite()) {
        return Err(Error::Fit(format!("invalid data point {d:?}")));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.y.total_cmp(&b.y)).then(a.weight.total_cmp(&b.weight)));
    let p = Problem {
        form,
        data: &sorted,
        mode: opts.jacobian,
    };

    let mut c = DVector::from_column_slice(init);
    let mut res = p.residuals(c.as_slice())?;
    let mut cost = res.norm_squared();
    let mut diag = DVector::<f64>::zeros(n);
    let mut lambda = 1.0;
    let mut nu = 2.0;
    let mut iterations = 0;
    let mut converged = cost == 0.0;

    'outer: while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let j = p.jacobian(c.as_slice())?;
        for k in 0..n {
            diag[k] = diag[k].max(j.column(k).norm());
        }
        let scale = diag.map(|d| if d > 0.0 { d } else { 1.0 });
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &res;
        let rnorm = cost.sqrt();
        let cosine = (0..n)
            .filter(|&k| diag[k] > 0.0)
            .map(|k| g[k].abs() / (diag[k] * rnorm))
            .fold(0.0, f64::max);
        if cosine <= opts.gradient_tol {
            converged = true;
            break;
        }
        let mut lam = lambda;
        loop {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lam * scale[k] * scale[k];
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&g),
                None => {
                    lam = (lam * nu).max(f64::MIN_POSITIVE);
                    nu *= 2.0;
                    if lam > 1e300 {
                        break 'outer;
                    }
                    continue;
                }
            };
            let trial = &c + &step;
            let new_res = p.residuals(trial.as_slice()).ok();
            let new_cost = new_res.as_ref().map_or(f64::INFINITY, |r| r.norm_squared());
            // predicted reduction of the linearized model
            let predicted = step.dot(&(2.0 * &g - &jtj * &step));
            let actual = cost - new_cost;
            let tiny_step = step
                .iter()
                .zip(c.iter())
                .all(|(d, x)| d.abs() <= opts.step_tol * (x.abs() + opts.step_tol));
            if new_cost < cost {
                let rho = if predicted > 0.0 { actual / predicted } else { 1.0 };
                lam *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                nu = 2.0;
                c = trial;
                res = new_res.expect("finite cost has residuals");
                let small_reduction = actual <= opts.objective_tol * cost && predicted <= opts.objective_tol * cost;
                cost = new_cost;
                if cost == 0.0 || small_reduction || tiny_step {
                    converged = true;
                }
                break;
            }
            if tiny_step || (predicted >= 0.0 && predicted <= opts.objective_tol * cost)
            {
                // no decrease is possible at working precision
                converged = true;
                break 'outer;
            }
            lam = (lam * nu).max(f64::MIN_POSITIVE);
            nu *= 2.0;
            if lam > 1e300 {
                break 'outer;
            }
        }
        lambda = lam;
    }

    let errs = relative_errors(form, c.as_slice(), &sorted)?;
    Ok(FitResult {
        form,
        parameters: c.as_slice().to_vec(),
        rss: cost,
        relative_errors: errs.per_point,
        max_relative_error: errs.max,
        mean_relative_error: errs.mean,
        iterations,
        converged,
    })
}
