use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box constraints, one interval per parameter. Infinite ends are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::domain("bound vectors differ in length"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::domain("lower bound exceeds upper bound"));
        }
        Ok(Bounds { lower, upper })
    }

    pub fn unbounded(n: usize) -> Self {
        Bounds {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (l, u))| *l <= *x && *x <= *u)
    }

    fn project(&self, p: &mut DVector<f64>) {
        for (i, x) in p.iter_mut().enumerate() {
            *x = x.clamp(self.lower[i], self.upper[i]);
        }
    }

    fn active(&self, p: &DVector<f64>) -> Vec<usize> {
        (0..p.len())
            .filter(|&i| p[i] <= self.lower[i] || p[i] >= self.upper[i])
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmOptions {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub fd_relative_step: f64,
    pub max_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 100,
            step_tolerance: 1e-8,
            fd_relative_step: 1e-6,
            max_damping: 1e16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    StepTolerance,
    MaxIterations,
    /// No acceptable step was found before the damping limit.
    DampingLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameters: Vec<f64>,
    /// √(Σ r²) at the returned parameters.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// s²·(JᵀJ)⁻¹ with s² = Σr²/(m − n); `None` when JᵀJ is singular or m = n.
    pub covariance: Option<Vec<Vec<f64>>>,
    /// ½Σr² at the start and after every accepted step.
    pub cost_history: Vec<f64>,
    /// Parameters sitting on a bound at exit.
    pub active_bounds: Vec<usize>,
}

impl FitResult {
    pub fn standard_errors(&self) -> Option<Vec<f64>> {
        self.covariance
            .as_ref()
            .map(|c| (0..c.len()).map(|i| c[i][i].max(0.0).sqrt()).collect())
    }

    /// Multiplies parameter `i` by `factors[i]` and rescales the covariance to match.
    pub fn rescaled(mut self, factors: &[f64]) -> Self {
        for (p, f) in self.parameters.iter_mut().zip(factors) {
            *p *= f;
        }
        if let Some(cov) = self.covariance.as_mut() {
            for (i, row) in cov.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v *= factors[i] * factors[j];
                }
            }
        }
        self
    }
}

struct Problem<'a, F> {
    model: &'a F,
    data: DVector<f64>,
    options: LmOptions,
}

impl<F> Problem<'_, F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    fn residuals(&self, p: &DVector<f64>) -> Result<DVector<f64>> {
        let y = (self.model)(p.as_slice())?;
        if y.len() != self.data.len() {
            return Err(Error::domain(format!(
                "model returned {} values for {} data points",
                y.len(),
                self.data.len()
            )));
        }
        let r = DVector::from_iterator(y.len(), self.data.iter().zip(&y).map(|(d, m)| d - m));
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("model produced a non-finite value"));
        }
        Ok(r)
    }

    fn jacobian(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        let jac =
            finite_difference_jacobian(self.model, p.as_slice(), self.options.fd_relative_step)?;
        if jac.nrows() != self.data.len() {
            return Err(Error::domain("model output length changed"));
        }
        Ok(jac)
    }
}

/// ∂model/∂p by central differences with step `relative_step`·|p_k|
/// (or `relative_step` itself where p_k = 0).
pub fn finite_difference_jacobian<F>(
    model: &F,
    p: &[f64],
    relative_step: f64,
) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut columns = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let h = if p[k] == 0.0 {
            relative_step
        } else {
            relative_step * p[k].abs()
        };
        let mut hi = p.to_vec();
        let mut lo = p.to_vec();
        hi[k] += h;
        lo[k] -= h;
        let yh = model(&hi)?;
        let yl = model(&lo)?;
        if yh.len() != yl.len() {
            return Err(Error::domain("model output length changed"));
        }
        let col: Vec<f64> = yh
            .iter()
            .zip(&yl)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("model produced a non-finite value"));
        }
        columns.push(DVector::from_vec(col));
    }
    Ok(DMatrix::from_columns(&columns))
}

fn covariance(jac: &DMatrix<f64>, cost: f64) -> Option<Vec<Vec<f64>>> {
    let (m, n) = jac.shape();
    if m <= n {
        return None;
    }
    let s2 = 2.0 * cost / (m - n) as f64;
    let inv = (jac.transpose() * jac).try_inverse()?;
    if inv.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(
        (0..n)
            .map(|i| (0..n).map(|j| s2 * inv[(i, j)]).collect())
            .collect(),
    )
}

/// Damped Gauss-Newton minimisation of Σ(data − model(p))².
///
/// Each outer iteration solves (JᵀJ + λ·1)δ = Jᵀr, projects p + δ onto the
/// bounds and accepts the step when the cost decreases. λ starts at
/// 10⁻³·max diag(JᵀJ), is divided by 10 on acceptance and multiplied by 10
/// on rejection. The fit has converged when ‖Dδ‖ ≤ tol·(‖Dp‖ + tol) with
/// D = √diag(JᵀJ).
pub fn least_squares<F>(
    model: &F,
    initial: &[f64],
    data: &[f64],
    bounds: Option<&Bounds>,
    options: &LmOptions,
) -> Result<FitResult>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = initial.len();
    if n == 0 {
        return Err(Error::domain("no parameters to fit"));
    }
    if data.len() < n {
        return Err(Error::domain(format!(
            "{} data points cannot determine {n} parameters",
            data.len()
        )));
    }
    let bounds = match bounds {
        Some(b) if b.lower.len() != n => {
            return Err(Error::domain(
                "bounds and initial parameters differ in length",
            ));
        }
        Some(b) => b.clone(),
        None => Bounds::unbounded(n),
    };
    if !bounds.contains(initial) {
        return Err(Error::domain("initial parameters lie outside the bounds"));
    }

    let problem = Problem {
        model,
        data: DVector::from_column_slice(data),
        options: *options,
    };
    let mut p = DVector::from_column_slice(initial);
    let mut r = problem.residuals(&p)?;
    let mut cost = 0.5 * r.norm_squared();
    let mut history = vec![cost];
    let mut jac = problem.jacobian(&p)?;
    let mut lambda: Option<f64> = None;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    'outer: while iterations < options.max_iterations {
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        let diag = jtj.diagonal();
        let scale = diag.map(|d| d.sqrt());
        let lam = lambda.get_or_insert_with(|| {
            let m = diag.max();
            if m > 0.0 {
                1e-3 * m
            } else {
                1e-3
            }
        });

        loop {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += *lam;
            }
            let delta = a
                .clone()
                .cholesky()
                .map(|c| c.solve(&grad))
                .or_else(|| a.lu().solve(&grad));
            let Some(delta) = delta.filter(|d| d.iter().all(|v| v.is_finite())) else {
                *lam *= 10.0;
                if *lam > options.max_damping {
                    termination = Termination::DampingLimit;
                    break 'outer;
                }
                continue;
            };
            let mut trial = &p + &delta;
            bounds.project(&mut trial);
            let step = &trial - &p;
            let step_norm = step.component_mul(&scale).norm();
            let p_norm = p.component_mul(&scale).norm();
            let small = step_norm <= options.step_tolerance * (p_norm + options.step_tolerance);
            let accepted = match problem.residuals(&trial) {
                Ok(rt) => {
                    let ct = 0.5 * rt.norm_squared();
                    if ct < cost {
                        p = trial;
                        r = rt;
                        cost = ct;
                        true
                    } else {
                        false
                    }
                }
                Err(_) => false,
            };
            if accepted {
                history.push(cost);
                *lam /= 10.0;
                jac = problem.jacobian(&p)?;
            }
            if small {
                termination = Termination::StepTolerance;
                break 'outer;
            }
            if accepted {
                break;
            }
            *lam *= 10.0;
            if *lam > options.max_damping {
                termination = Termination::DampingLimit;
                break 'outer;
            }
        }
    }

    Ok(FitResult {
        parameters: p.iter().copied().collect(),
        residual_norm: (2.0 * cost).sqrt(),
        iterations,
        converged: termination == Termination::StepTolerance,
        termination,
        covariance: covariance(&jac, cost),
        cost_history: history,
        active_bounds: bounds.active(&p),
    })
}
