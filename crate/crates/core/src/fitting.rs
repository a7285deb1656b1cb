//! Fitting the profile families to normalized angle data.
//!
//! The sigmoid is fitted with Levenberg-Marquardt on log-parameters so
//! `a`, `b`, `c` stay positive. The degree-7 polynomial is linear in its
//! coefficients and is solved directly from a QR factorization of the
//! Vandermonde matrix.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::analysis::NormalizedSeries;
use crate::error::{Error, Result};
use crate::profiles::{PolyCoefficients, SigmoidCoefficients};

pub const MIN_SIGMOID_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmSettings {
    pub initial_lambda: f64,
    pub lambda_factor: f64,
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the SSE by less than this fraction.
    pub rel_sse_tol: f64,
    /// Gradient (inf-norm, log-parameter space) required to report convergence.
    pub grad_tol: f64,
    pub max_lambda: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            initial_lambda: 1e-3,
            lambda_factor: 10.0,
            max_iterations: 200,
            rel_sse_tol: 1e-12,
            grad_tol: 1e-8,
            max_lambda: 1e16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedModel {
    Sigmoid(SigmoidCoefficients),
    Poly7(PolyCoefficients),
}

impl FittedModel {
    pub fn name(&self) -> &'static str {
        match self {
            FittedModel::Sigmoid(_) => "sigmoid",
            FittedModel::Poly7(_) => "poly7",
        }
    }

    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            FittedModel::Sigmoid(c) => c.as_array().to_vec(),
            FittedModel::Poly7(c) => c.0.to_vec(),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            FittedModel::Sigmoid(c) => c.value(u),
            FittedModel::Poly7(c) => c.value(u),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: FittedModel,
    pub sse: f64,
    pub r_squared: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Root mean squared residual.
    pub rmse: f64,
    /// SSE after the initial guess and after every accepted step.
    pub trace: Vec<f64>,
}

impl Serialize for FitReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FitReport", 6)?;
        st.serialize_field("model", self.model.name())?;
        st.serialize_field("coefficients", &self.model.coefficients())?;
        st.serialize_field("sse", &self.sse)?;
        st.serialize_field("r2", &self.r_squared)?;
        st.serialize_field("iterations", &self.iterations)?;
        st.serialize_field("converged", &self.converged)?;
        st.end()
    }
}

/// Coefficient of determination `1 - SSE / SStot`.
pub fn r_squared(data: &[f64], model: &[f64]) -> Result<f64> {
    if data.len() != model.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            actual: model.len(),
        });
    }
    if data.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            actual: data.len(),
        });
    }
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let ss_tot: f64 = data.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot <= f64::MIN_POSITIVE {
        return Err(Error::ZeroVariance);
    }
    Ok(1.0 - sse(data, model) / ss_tot)
}

fn sse(data: &[f64], model: &[f64]) -> f64 {
    data.iter().zip(model).map(|(d, m)| (d - m).powi(2)).sum()
}

fn report(
    data: &NormalizedSeries,
    model: FittedModel,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
) -> Result<FitReport> {
    let values: Vec<f64> = data.u.iter().map(|&u| model.eval(u)).collect();
    let sse = sse(&data.v, &values);
    Ok(FitReport {
        model,
        sse,
        r_squared: r_squared(&data.v, &values)?,
        iterations,
        converged,
        rmse: (sse / data.len() as f64).sqrt(),
        trace,
    })
}

/// Residuals `v - f(u)` and the model Jacobian with respect to
/// `(ln a, ln b, ln c)`.
fn sigmoid_system(data: &NormalizedSeries, x: &Vector3<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let (a, b, c) = (x[0].exp(), x[1].exp(), x[2].exp());
    let n = data.len();
    let mut r = DVector::zeros(n);
    let mut jac = DMatrix::zeros(n, 3);
    for (i, (&u, &v)) in data.u.iter().zip(&data.v).enumerate() {
        let e = (-c * u).exp();
        let d = b + e;
        let m = a / d;
        r[i] = v - m;
        jac[(i, 0)] = m;
        jac[(i, 1)] = -m * b / d;
        jac[(i, 2)] = m * c * u * e / d;
    }
    (r, jac)
}

pub fn fit_sigmoid(data: &NormalizedSeries, init: &SigmoidCoefficients) -> Result<FitReport> {
    fit_sigmoid_with(data, init, &LmSettings::default())
}

pub fn fit_sigmoid_with(
    data: &NormalizedSeries,
    init: &SigmoidCoefficients,
    cfg: &LmSettings,
) -> Result<FitReport> {
    if data.len() < MIN_SIGMOID_POINTS {
        return Err(Error::TooFewSamples {
            required: MIN_SIGMOID_POINTS,
            actual: data.len(),
        });
    }
    init.validate()?;

    let mut x = Vector3::new(init.a.ln(), init.b.ln(), init.c.ln());
    let (mut r, mut jac) = sigmoid_system(data, &x);
    let diag = jac
        .column_iter()
        .map(|c| c.norm_squared())
        .collect::<Vec<_>>();
    let top = diag.iter().copied().fold(0.0, f64::max);
    if diag.iter().any(|&d| d <= 1e-14 * top) {
        // a parameter with no influence on the model at the starting point
        return Err(Error::SingularJacobian);
    }
    let mut cost = r.norm_squared();
    let mut trace = vec![cost];
    let mut lambda = cfg.initial_lambda;
    let mut iterations = 0;
    let mut settled = false;

    'outer: while iterations < cfg.max_iterations {
        iterations += 1;
        let jt = jac.transpose();
        let h: Matrix3<f64> = (&jt * &jac).fixed_view::<3, 3>(0, 0).into_owned();
        let g: Vector3<f64> = (&jt * &r).fixed_rows::<3>(0).into_owned();
        if g.amax() <= cfg.grad_tol {
            settled = true;
            break;
        }
        loop {
            // floor keeps a flat direction (e.g. saturated exponent) damped
            let floor = 1e-12 * h.diagonal().amax().max(f64::MIN_POSITIVE);
            let damped = h + Matrix3::from_diagonal(&h.diagonal().map(|d| d.max(floor))) * lambda;
            let Some(chol) = damped.cholesky() else {
                lambda *= cfg.lambda_factor;
                if lambda > cfg.max_lambda {
                    return Err(Error::SingularJacobian);
                }
                continue;
            };
            let trial = x + chol.solve(&g);
            if !trial.iter().all(|v| v.is_finite() && v.abs() < 700.0) {
                lambda *= cfg.lambda_factor;
                if lambda > cfg.max_lambda {
                    settled = true;
                    break 'outer;
                }
                continue;
            }
            let (r_new, jac_new) = sigmoid_system(data, &trial);
            let cost_new = r_new.norm_squared();
            if cost_new.is_finite() && cost_new < cost {
                let rel = (cost - cost_new) / cost;
                x = trial;
                r = r_new;
                jac = jac_new;
                cost = cost_new;
                trace.push(cost);
                lambda = (lambda / cfg.lambda_factor).max(f64::MIN_POSITIVE);
                if rel < cfg.rel_sse_tol {
                    settled = true;
                    break 'outer;
                }
                break;
            }
            lambda *= cfg.lambda_factor;
            if lambda > cfg.max_lambda {
                // No step lowers the SSE any more.
                settled = true;
                break 'outer;
            }
        }
    }

    let g = jac.transpose() * &r;
    // Sub-ulp gradients happen at exact fits; count those as converged too.
    let converged = settled && (g.amax() <= cfg.grad_tol || cost <= 1e-24 * data.len() as f64);
    let coef = SigmoidCoefficients::new(x[0].exp(), x[1].exp(), x[2].exp())?;
    report(
        data,
        FittedModel::Sigmoid(coef),
        iterations,
        converged,
        trace,
    )
}

/// Least-squares degree-7 polynomial. With `fix_intercept` the constant
/// term is pinned and only `c1..=c7` are estimated.
pub fn fit_poly7(data: &NormalizedSeries, fix_intercept: Option<f64>) -> Result<FitReport> {
    let first = usize::from(fix_intercept.is_some());
    let unknowns = 8 - first;
    let required = unknowns + 1;
    if data.len() < required {
        return Err(Error::TooFewSamples {
            required,
            actual: data.len(),
        });
    }
    let mut distinct = data.u.clone();
    distinct.dedup();
    if distinct.len() < unknowns {
        return Err(Error::RankDeficient);
    }

    let c0 = fix_intercept.unwrap_or(0.0);
    let design = DMatrix::from_fn(data.len(), unknowns, |i, k| {
        data.u[i].powi((k + first) as i32)
    });
    let rhs = DVector::from_iterator(data.len(), data.v.iter().map(|v| v - c0));

    let qr = design.qr();
    let r = qr.r();
    let diag_max = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-12 * diag_max) {
        return Err(Error::RankDeficient);
    }
    let qty = qr.q().transpose() * rhs;
    let sol = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;

    let mut coefs = [0.0; 8];
    coefs[0] = c0;
    for (k, v) in sol.iter().enumerate() {
        coefs[k + first] = *v;
    }
    let model = FittedModel::Poly7(PolyCoefficients(coefs));
    let values: Vec<f64> = data.u.iter().map(|&u| model.eval(u)).collect();
    report(data, model, 1, true, vec![sse(&data.v, &values)])
}
