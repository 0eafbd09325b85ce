//! Damped Gauss-Newton (Levenberg-Marquardt) least-squares solver with
//! numerically differentiated Jacobians, box bounds, fixed parameters, and
//! deterministic multi-start.

use crate::scalar::Real;

use super::FitError;

/// A residual model: fills `out` with the weighted residuals at `params`.
pub trait Model<R: Real> {
    fn name(&self) -> &str;
    fn residual_count(&self) -> usize;
    fn residuals(&self, params: &[R], out: &mut [R]);
}

/// One fit parameter with box bounds. Bounds default to unbounded; fixed
/// parameters keep their initial value and contribute no Jacobian column.
#[derive(Debug, Clone)]
pub struct Parameter<R: Real = f64> {
    pub name: String,
    pub init: R,
    pub lower: R,
    pub upper: R,
    pub fixed: bool,
}

impl<R: Real> Parameter<R> {
    pub fn free(name: impl Into<String>, init: R) -> Self {
        Parameter {
            name: name.into(),
            init,
            lower: R::neg_infinity(),
            upper: R::infinity(),
            fixed: false,
        }
    }

    pub fn bounded(name: impl Into<String>, init: R, lower: R, upper: R) -> Result<Self, FitError> {
        if !(lower <= init && init <= upper) {
            return Err(FitError::InvalidProblem(format!(
                "initial value {init} outside bounds [{lower}, {upper}]"
            )));
        }
        Ok(Parameter {
            name: name.into(),
            init,
            lower,
            upper,
            fixed: false,
        })
    }

    pub fn fixed(name: impl Into<String>, value: R) -> Self {
        Parameter {
            name: name.into(),
            init: value,
            lower: value,
            upper: value,
            fixed: true,
        }
    }

    fn clamp(&self, value: R) -> R {
        value.max(self.lower).min(self.upper)
    }
}

/// Solver controls. Defaults: 500 iterations, relative residual change and
/// gradient tolerances of 1e-10, central-difference relative step 1e-6.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions<R: Real = f64> {
    pub max_iterations: usize,
    pub residual_tol: R,
    pub gradient_tol: R,
    pub relative_step: R,
    pub lambda_init: R,
    pub lambda_up: R,
    pub lambda_down: R,
    /// Floor applied to the damping diagonal so singular normal equations
    /// still yield a step.
    pub damping_floor: R,
}

impl<R: Real> Default for FitOptions<R> {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            residual_tol: R::of(1e-10),
            gradient_tol: R::of(1e-10),
            relative_step: R::of(1e-6),
            lambda_init: R::of(1e-3),
            lambda_up: R::of(11.0),
            lambda_down: R::of(9.0),
            damping_floor: R::of(1e-12),
        }
    }
}

/// Outcome of a least-squares solve.
#[derive(Debug, Clone)]
pub struct FitResult<R: Real = f64> {
    pub params: Vec<R>,
    /// Per-parameter standard errors from the quadratic approximation at the
    /// optimum; zero for fixed parameters, infinite for undetermined ones.
    pub errors: Vec<R>,
    pub rss: R,
    pub converged: bool,
    pub iterations: usize,
    /// Index of the winning start when driven by [`multi_start_solve`].
    pub start_index: usize,
    /// Residual sum of squares after every accepted step (monotone).
    pub rss_history: Vec<R>,
    /// Free parameters that finished pressed against a box bound; their
    /// reported errors do not describe the constrained direction.
    pub pegged: Vec<bool>,
}

/// Finite-difference stencil for [`numerical_jacobian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Forward,
    Central,
}

/// Numerical Jacobian (row-major, `n_res x n_free`) over the free parameters,
/// step `relative_step * (|p| + relative_step)` per parameter.
pub fn numerical_jacobian<R: Real, M: Model<R> + ?Sized>(
    model: &M,
    params: &[R],
    free: &[usize],
    stencil: Stencil,
    relative_step: R,
) -> Vec<R> {
    let n_res = model.residual_count();
    let mut jac = vec![R::zero(); n_res * free.len()];
    let mut p = params.to_vec();
    let mut hi = vec![R::zero(); n_res];
    let mut lo = vec![R::zero(); n_res];
    if stencil == Stencil::Forward {
        model.residuals(params, &mut lo);
    }
    for (col, &j) in free.iter().enumerate() {
        let step = relative_step * (params[j].abs() + relative_step);
        p[j] = params[j] + step;
        model.residuals(&p, &mut hi);
        let denom = match stencil {
            Stencil::Forward => step,
            Stencil::Central => {
                p[j] = params[j] - step;
                model.residuals(&p, &mut lo);
                R::of(2.0) * step
            }
        };
        p[j] = params[j];
        for i in 0..n_res {
            jac[i * free.len() + col] = (hi[i] - lo[i]) / denom;
        }
    }
    jac
}

/// Solve the symmetric system `a x = b` by Gauss-Jordan elimination with
/// diagonal pivoting. Returns `None` when a pivot collapses entirely.
fn solve_symmetric<R: Real>(mut a: Vec<R>, mut b: Vec<R>, n: usize) -> Option<Vec<R>> {
    for k in 0..n {
        let pivot = a[k * n + k];
        if pivot.abs() <= R::zero() || !pivot.is_finite() {
            return None;
        }
        for j in 0..n {
            a[k * n + j] = a[k * n + j] / pivot;
        }
        b[k] = b[k] / pivot;
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = a[i * n + k];
            if factor == R::zero() {
                continue;
            }
            for j in 0..n {
                a[i * n + j] = a[i * n + j] - factor * a[k * n + j];
            }
            b[i] = b[i] - factor * b[k];
        }
    }
    Some(b)
}

/// Diagonal of the inverse of the SPD matrix `a`, with undetermined
/// directions marked `None`. The matrix is Jacobi-scaled to unit diagonal
/// first, so wildly different parameter units do not masquerade as
/// singularity; genuine rank deficiency still does.
fn invert_spd_diagonal<R: Real>(a: Vec<R>, n: usize) -> Vec<Option<R>> {
    let mut bad = vec![false; n];
    let mut scale = vec![R::one(); n];
    for k in 0..n {
        let d = a[k * n + k];
        if d > R::zero() && d.is_finite() {
            scale[k] = R::one() / d.sqrt();
        } else {
            bad[k] = true;
        }
    }
    let mut m = vec![R::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = if bad[i] || bad[j] {
                if i == j {
                    R::one()
                } else {
                    R::zero()
                }
            } else {
                a[i * n + j] * scale[i] * scale[j]
            };
        }
    }
    let mut inv = vec![R::zero(); n * n];
    for k in 0..n {
        inv[k * n + k] = R::one();
    }
    let tol = R::of(1e-13);
    for k in 0..n {
        let pivot = m[k * n + k];
        if !(pivot.abs() > tol) || !pivot.is_finite() {
            bad[k] = true;
            for j in 0..n {
                m[k * n + j] = R::zero();
                m[j * n + k] = R::zero();
                inv[k * n + j] = R::zero();
            }
            m[k * n + k] = R::one();
            continue;
        }
        for j in 0..n {
            m[k * n + j] = m[k * n + j] / pivot;
            inv[k * n + j] = inv[k * n + j] / pivot;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = m[i * n + k];
            if factor == R::zero() {
                continue;
            }
            for j in 0..n {
                m[i * n + j] = m[i * n + j] - factor * m[k * n + j];
                inv[i * n + j] = inv[i * n + j] - factor * inv[k * n + j];
            }
        }
    }
    (0..n)
        .map(|k| {
            if bad[k] {
                None
            } else {
                Some(inv[k * n + k] * scale[k] * scale[k])
            }
        })
        .collect()
}

fn rss_of<R: Real>(r: &[R]) -> R {
    r.iter().map(|&v| v * v).sum()
}

/// Minimize the model's residual sum of squares from the parameters' initial
/// values. Non-convergence is reported through `FitResult::converged`, never
/// silently; hard input errors (too few residuals, non-finite start) fail.
pub fn least_squares_solve<R: Real, M: Model<R> + ?Sized>(
    model: &M,
    params: &[Parameter<R>],
    opts: &FitOptions<R>,
) -> Result<FitResult<R>, FitError> {
    let free: Vec<usize> = params
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.fixed)
        .map(|(i, _)| i)
        .collect();
    let n_free = free.len();
    let n_res = model.residual_count();
    if n_free == 0 {
        return Err(FitError::InvalidProblem("no free parameters".into()));
    }
    if n_res < n_free {
        return Err(FitError::InvalidProblem(format!(
            "{n_res} residuals cannot determine {n_free} parameters"
        )));
    }

    let mut p: Vec<R> = params.iter().map(|q| q.clamp(q.init)).collect();
    let mut r = vec![R::zero(); n_res];
    model.residuals(&p, &mut r);
    let mut rss = rss_of(&r);
    if !rss.is_finite() {
        return Err(FitError::InvalidProblem(
            "initial residual is not finite".into(),
        ));
    }

    let mut lambda = opts.lambda_init;
    let mut converged = false;
    let mut iterations = 0;
    let mut rss_history = vec![rss];

    while iterations < opts.max_iterations {
        iterations += 1;

        let jac = numerical_jacobian(model, &p, &free, Stencil::Central, opts.relative_step);
        // gradient g = J^T r and normal matrix N = J^T J
        let mut grad = vec![R::zero(); n_free];
        let mut normal = vec![R::zero(); n_free * n_free];
        for i in 0..n_res {
            for a in 0..n_free {
                let ja = jac[i * n_free + a];
                grad[a] = grad[a] + ja * r[i];
                for b in a..n_free {
                    normal[a * n_free + b] = normal[a * n_free + b] + ja * jac[i * n_free + b];
                }
            }
        }
        for a in 0..n_free {
            for b in 0..a {
                normal[a * n_free + b] = normal[b * n_free + a];
            }
        }

        // scale-invariant gradient criterion: the largest cosine between a
        // Jacobian column and the residual vector
        if rss == R::zero() {
            converged = true;
            break;
        }
        let rss_sqrt = rss.sqrt();
        let mut max_cos = R::zero();
        for a in 0..n_free {
            let col_norm = normal[a * n_free + a].sqrt();
            if col_norm > R::zero() {
                max_cos = max_cos.max(grad[a].abs() / (col_norm * rss_sqrt));
            }
        }
        if max_cos < opts.gradient_tol {
            converged = true;
            break;
        }

        // inner damping loop
        let mut accepted = false;
        for _ in 0..60 {
            let mut damped = normal.clone();
            for a in 0..n_free {
                let d = normal[a * n_free + a].max(opts.damping_floor);
                damped[a * n_free + a] = normal[a * n_free + a] + lambda * d;
            }
            let rhs: Vec<R> = grad.iter().map(|&g| -g).collect();
            let step = match solve_symmetric(damped, rhs, n_free) {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => {
                    lambda = lambda * opts.lambda_up;
                    continue;
                }
            };
            let mut candidate = p.clone();
            for (a, &j) in free.iter().enumerate() {
                candidate[j] = params[j].clamp(p[j] + step[a]);
            }
            let mut r_new = vec![R::zero(); n_res];
            model.residuals(&candidate, &mut r_new);
            let rss_new = rss_of(&r_new);
            if rss_new.is_finite() && rss_new < rss {
                let drop = rss - rss_new;
                p = candidate;
                r = r_new;
                rss = rss_new;
                rss_history.push(rss);
                lambda = (lambda / opts.lambda_down).max(R::of(1e-14));
                accepted = true;
                if drop < opts.residual_tol * rss.max(R::of(1e-300)) {
                    converged = true;
                }
                break;
            }
            // deep in the damped regime even the safest step cannot improve
            // the residual by the relative tolerance: that is convergence
            if lambda >= R::of(1e3)
                && rss_new.is_finite()
                && rss_new <= rss * (R::one() + opts.residual_tol)
            {
                converged = true;
                break;
            }
            lambda = lambda * opts.lambda_up;
            if lambda > R::of(1e14) {
                break;
            }
        }
        if converged || !accepted {
            break;
        }
    }

    // parameter errors from the quadratic approximation at the optimum
    let jac = numerical_jacobian(model, &p, &free, Stencil::Central, opts.relative_step);
    let mut normal = vec![R::zero(); n_free * n_free];
    for i in 0..n_res {
        for a in 0..n_free {
            for b in a..n_free {
                normal[a * n_free + b] =
                    normal[a * n_free + b] + jac[i * n_free + a] * jac[i * n_free + b];
            }
        }
    }
    for a in 0..n_free {
        for b in 0..a {
            normal[a * n_free + b] = normal[b * n_free + a];
        }
    }
    let dof = (n_res - n_free).max(1);
    let sigma2 = rss / R::of_usize(dof);
    let diag = invert_spd_diagonal(normal, n_free);
    let mut errors = vec![R::zero(); params.len()];
    for (a, &j) in free.iter().enumerate() {
        errors[j] = match diag[a] {
            Some(c) if c >= R::zero() => (sigma2 * c).sqrt(),
            Some(_) => R::infinity(),
            None => R::infinity(),
        };
    }

    let pegged: Vec<bool> = params
        .iter()
        .zip(&p)
        .map(|(spec, &v)| {
            if spec.fixed {
                return false;
            }
            let margin = R::of(1e-8) * (v.abs() + R::one());
            (spec.lower.is_finite() && v - spec.lower <= margin)
                || (spec.upper.is_finite() && spec.upper - v <= margin)
        })
        .collect();

    Ok(FitResult {
        params: p,
        errors,
        rss,
        converged,
        iterations,
        start_index: 0,
        rss_history,
        pegged,
    })
}

/// Run [`least_squares_solve`] from several starts and keep the lowest
/// residual (ties broken by start index). Errors as ambiguous when two
/// starts converge to distinct minima with residuals within `ambiguity_ratio`
/// of each other; parameter vectors are considered the same minimum when all
/// free parameters agree to `distinct_tol` relative.
pub fn multi_start_solve<R: Real, M: Model<R> + ?Sized>(
    model: &M,
    template: &[Parameter<R>],
    starts: &[Vec<R>],
    opts: &FitOptions<R>,
    distinct_tol: R,
    ambiguity_ratio: R,
) -> Result<FitResult<R>, FitError> {
    if starts.is_empty() {
        return Err(FitError::InvalidProblem("no starts supplied".into()));
    }
    let mut results: Vec<FitResult<R>> = Vec::new();
    for (idx, start) in starts.iter().enumerate() {
        if start.len() != template.len() {
            return Err(FitError::InvalidProblem(format!(
                "start {idx} has {} values for {} parameters",
                start.len(),
                template.len()
            )));
        }
        let mut params = template.to_vec();
        for (p, &v) in params.iter_mut().zip(start) {
            if !p.fixed {
                p.init = v;
            }
        }
        if let Ok(mut res) = least_squares_solve(model, &params, opts) {
            res.start_index = idx;
            if std::env::var("RINGBRAGG_DEBUG_STARTS").is_ok() {
                eprintln!("start {idx}: init {:?} -> rss {:?} conv {} p {:?}", start, res.rss, res.converged, &res.params[..2.min(res.params.len())]);
            }
            results.push(res);
        }
    }
    let mut best: Option<FitResult<R>> = None;
    for res in &results {
        let better = match &best {
            None => true,
            Some(b) => res.rss < b.rss,
        };
        if better {
            best = Some(res.clone());
        }
    }
    let best = best.ok_or(FitError::AllStartsFailed)?;

    let same_minimum = |a: &[R], b: &[R]| -> bool {
        a.iter().zip(b).all(|(&x, &y)| {
            let scale = x.abs() + y.abs() + R::of(1e-30);
            (x - y).abs() / scale <= distinct_tol
        })
    };
    for res in &results {
        if !res.converged || res.start_index == best.start_index {
            continue;
        }
        let close_rss = (res.rss - best.rss).abs() <= ambiguity_ratio * best.rss.max(R::of(1e-300));
        if close_rss && !same_minimum(&res.params, &best.params) {
            return Err(FitError::Ambiguous {
                model: model.name().to_string(),
                rss_best: best.rss.to_f64().unwrap_or(f64::NAN),
                rss_other: res.rss.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct LinearModel {
        x: Vec<f64>,
        y: Vec<f64>,
    }

    impl Model<f64> for LinearModel {
        fn name(&self) -> &str {
            "linear"
        }
        fn residual_count(&self) -> usize {
            self.x.len()
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            for (i, (&x, &y)) in self.x.iter().zip(&self.y).enumerate() {
                out[i] = p[0] * x + p[1] - y;
            }
        }
    }

    struct Rosenbrock;

    impl Model<f64> for Rosenbrock {
        fn name(&self) -> &str {
            "rosenbrock"
        }
        fn residual_count(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            out[0] = 10.0 * (p[1] - p[0] * p[0]);
            out[1] = 1.0 - p[0];
        }
    }

    fn linear_data() -> LinearModel {
        let x: Vec<f64> = (0..40).map(|i| i as f64 / 4.0).collect();
        let y: Vec<f64> = x.iter().map(|&v| 2.5 * v - 1.25).collect();
        LinearModel { x, y }
    }

    #[test]
    fn linear_model_recovered_exactly() {
        let model = linear_data();
        let params = vec![Parameter::free("a", 0.0), Parameter::free("b", 0.0)];
        let fit = least_squares_solve(&model, &params, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.params[0], 2.5, epsilon = 1e-10);
        assert_relative_eq!(fit.params[1], -1.25, epsilon = 1e-10);
        assert!(fit.rss < 1e-18);
    }

    #[test]
    fn rosenbrock_converges_from_standard_start() {
        let params = vec![Parameter::free("x", -1.2), Parameter::free("y", 1.0)];
        let fit = least_squares_solve(&Rosenbrock, &params, &FitOptions::default()).unwrap();
        assert!(fit.converged, "iterations {}", fit.iterations);
        assert!(fit.iterations <= 500);
        assert_relative_eq!(fit.params[0], 1.0, epsilon = 1e-6);
        assert_relative_eq!(fit.params[1], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn accepted_steps_never_increase_residual() {
        let params = vec![Parameter::free("x", -1.2), Parameter::free("y", 1.0)];
        let fit = least_squares_solve(&Rosenbrock, &params, &FitOptions::default()).unwrap();
        for w in fit.rss_history.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn degenerate_model_inflates_errors() {
        // y depends only on p0 + p1, so the difference is undetermined
        struct Degenerate;
        impl Model<f64> for Degenerate {
            fn name(&self) -> &str {
                "degenerate"
            }
            fn residual_count(&self) -> usize {
                8
            }
            fn residuals(&self, p: &[f64], out: &mut [f64]) {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (p[0] + p[1]) - i as f64 * 0.0 - 3.0;
                }
            }
        }
        let params = vec![Parameter::free("a", 1.0), Parameter::free("b", 1.0)];
        let fit = least_squares_solve(&Degenerate, &params, &FitOptions::default()).unwrap();
        assert!(
            fit.errors.iter().any(|e| !e.is_finite()),
            "errors {:?}",
            fit.errors
        );
    }

    #[test]
    fn fixed_parameters_do_not_move() {
        let model = linear_data();
        let params = vec![Parameter::fixed("a", 2.5), Parameter::free("b", 10.0)];
        let fit = least_squares_solve(&model, &params, &FitOptions::default()).unwrap();
        assert_eq!(fit.params[0], 2.5);
        assert_eq!(fit.errors[0], 0.0);
        assert_relative_eq!(fit.params[1], -1.25, epsilon = 1e-9);
    }

    #[test]
    fn bounds_are_respected() {
        let model = linear_data();
        let params = vec![
            Parameter::bounded("a", 1.0, 0.0, 2.0).unwrap(),
            Parameter::free("b", 0.0),
        ];
        let fit = least_squares_solve(&model, &params, &FitOptions::default()).unwrap();
        assert!(fit.params[0] <= 2.0 + 1e-15);
    }

    #[test]
    fn determinism_bitwise() {
        let params = vec![Parameter::free("x", -1.2), Parameter::free("y", 1.0)];
        let a = least_squares_solve(&Rosenbrock, &params, &FitOptions::default()).unwrap();
        let b = least_squares_solve(&Rosenbrock, &params, &FitOptions::default()).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.rss.to_bits(), b.rss.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn multi_start_picks_lowest_residual() {
        let model = linear_data();
        let template = vec![Parameter::free("a", 0.0), Parameter::free("b", 0.0)];
        let starts = vec![vec![100.0, -50.0], vec![2.4, -1.2], vec![0.0, 0.0]];
        let fit = multi_start_solve(&model, &template, &starts, &FitOptions::default(), 1e-3, 0.01)
            .unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.params[0], 2.5, epsilon = 1e-9);
    }

    #[test]
    fn jacobian_stencils_agree() {
        let model = linear_data();
        let free = vec![0, 1];
        let p = vec![1.7, 0.3];
        let jc = numerical_jacobian(&model, &p, &free, Stencil::Central, 1e-6);
        let jf = numerical_jacobian(&model, &p, &free, Stencil::Forward, 1e-6);
        for (c, f) in jc.iter().zip(&jf) {
            assert_relative_eq!(c, f, max_relative = 1e-4, epsilon = 1e-8);
        }
    }

    #[test]
    fn too_few_residuals_rejected() {
        struct Tiny;
        impl Model<f64> for Tiny {
            fn name(&self) -> &str {
                "tiny"
            }
            fn residual_count(&self) -> usize {
                1
            }
            fn residuals(&self, p: &[f64], out: &mut [f64]) {
                out[0] = p[0] + p[1];
            }
        }
        let params = vec![Parameter::free("a", 0.0), Parameter::free("b", 0.0)];
        assert!(least_squares_solve(&Tiny, &params, &FitOptions::default()).is_err());
    }
}
