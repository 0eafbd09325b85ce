//! Nonlinear least-squares engine and the concrete model fits: two-mode
//! interference scans, thermal sideband spectra, and the chiral Lorentzian
//! doublet.

pub mod models;
pub mod solver;

use thiserror::Error;

use crate::scalar::Real;

pub use models::{
    fit_lorentzian_doublet, fit_separation, fit_separation_with, fit_sideband_spectrum,
    DoubletFit, SeparationFit, SidebandFit, SidebandFitConfig, SidebandInit,
};
pub use solver::{
    least_squares_solve, multi_start_solve, numerical_jacobian, FitOptions, FitResult, Model,
    Parameter, Stencil,
};

/// Fit failures. Non-convergence inside the solver is reported through
/// `FitResult::converged`; these errors are for problems that cannot be
/// turned into a result at all.
#[derive(Debug, Error)]
pub enum FitError {
    #[error("invalid fit problem: {0}")]
    InvalidProblem(String),

    #[error("ambiguous fit for model `{model}`: distinct minima with rss {rss_best:.6e} and {rss_other:.6e}")]
    Ambiguous {
        model: String,
        rss_best: f64,
        rss_other: f64,
    },

    #[error("every start failed to produce a result")]
    AllStartsFailed,
}

/// A fit problem in one bundle: a residual model plus its parameter vector.
#[derive(Debug)]
pub struct FitProblem<R: Real, M: Model<R>> {
    pub model: M,
    pub params: Vec<Parameter<R>>,
}

impl<R: Real, M: Model<R>> FitProblem<R, M> {
    pub fn new(model: M, params: Vec<Parameter<R>>) -> Self {
        FitProblem { model, params }
    }

    pub fn solve(&self, opts: &FitOptions<R>) -> Result<FitResult<R>, FitError> {
        least_squares_solve(&self.model, &self.params, opts)
    }
}

/// A fitted value with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct ValueWithError<R: Real = f64> {
    pub value: R,
    pub std_err: R,
}

impl<R: Real> ValueWithError<R> {
    pub fn new(value: R, std_err: R) -> Self {
        ValueWithError { value, std_err }
    }

    /// Compact `value(err)` notation: the error is rounded to one
    /// significant digit and quoted in units of the value's last printed
    /// digit, e.g. `783.1(4)`.
    pub fn paren_format(&self) -> String {
        format_value_error(
            self.value.to_f64().unwrap_or(f64::NAN),
            self.std_err.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// `value(err)` formatting with the error rounded to one significant digit.
pub fn format_value_error(value: f64, err: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    if !err.is_finite() {
        return format!("{value} (unbounded)");
    }
    if err <= 0.0 {
        return format!("{value}");
    }
    let mut exp = err.log10().floor() as i32;
    let mut lead = (err / 10f64.powi(exp)).round();
    if lead >= 10.0 {
        lead = 1.0;
        exp += 1;
    }
    if exp < 0 {
        let digits = (-exp) as usize;
        format!("{value:.digits$}({lead:.0})")
    } else {
        let err_int = lead * 10f64.powi(exp);
        format!("{:.0}({:.0})", (value / 10f64.powi(exp)).round() * 10f64.powi(exp), err_int)
    }
}
