//! Wavelet exponential family `f_theta = exp(sum_{Lambda_{j1}} theta_{jk} psi_{jk})`
//! and its information projection onto prescribed coefficients.
//!
//! The projection solves `<f_theta, psi_{jk}> = beta_{jk}` over `Lambda_{j1}` by
//! minimising the least-squares residual
//! `G(theta) = sum (<f_theta, psi_{jk}> - beta_{jk})^2`
//! with a backtracking adaptive-step descent.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::wavelet::{WaveletBasis, WaveletCoefficients};

/// Log-density magnitude beyond which `exp` is treated as overflow.
const MAX_LOG_DENSITY: f64 = 700.0;

/// Parameter vector `theta` indexed by `Lambda_{j1}` (pyramid order).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpFamilyParams(WaveletCoefficients);

impl ExpFamilyParams {
    pub fn new(theta: WaveletCoefficients) -> Result<Self> {
        if theta.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(crate::error::invalid("exponential family parameters must be finite"));
        }
        Ok(Self(theta))
    }

    pub fn zeros(j0: u32, j1: u32) -> Self {
        Self(WaveletCoefficients::zeros(j0, j1))
    }

    pub fn theta(&self) -> &WaveletCoefficients {
        &self.0
    }

    pub fn into_theta(self) -> WaveletCoefficients {
        self.0
    }

    pub fn j0(&self) -> u32 {
        self.0.j0()
    }

    pub fn j1(&self) -> u32 {
        self.0.j1()
    }
}

/// Grid samples of `f_theta`, strictly positive.
pub fn eval_family(params: &ExpFamilyParams, basis: &WaveletBasis) -> Result<GridFunction> {
    let log_f = basis.synthesize(&params.0)?;
    exp_checked(log_f.into_values()).and_then(GridFunction::new)
}

fn exp_checked(mut log_f: Vec<f64>) -> Result<Vec<f64>> {
    let peak = log_f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(peak <= MAX_LOG_DENSITY) {
        return Err(Error::DivergedParameters(peak));
    }
    log_f.iter_mut().for_each(|v| *v = libm::exp(*v));
    Ok(log_f)
}

/// `<f_theta, psi_{jk}>` for every `(j, k)` in `Lambda_{j1}`.
pub fn coefficient_map(params: &ExpFamilyParams, basis: &WaveletBasis) -> Result<WaveletCoefficients> {
    let f = eval_family(params, basis)?;
    basis.analyze(&f, params.j0(), params.j1())
}

/// `theta_0 = <log max(f, eta), psi_{jk}>` restricted to `Lambda_{j1}`.
pub fn init_theta(unconstrained: &GridFunction, eta: f64, j0: u32, j1: u32, basis: &WaveletBasis) -> Result<ExpFamilyParams> {
    if !(eta > 0.0) {
        return Err(crate::error::invalid("clipping floor eta must be positive"));
    }
    let clipped = unconstrained.map(|v| libm::log(v.max(eta)));
    ExpFamilyParams::new(basis.analyze(&clipped, j0, j1)?)
}

/// Search direction used by [`project`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Descent {
    /// `-grad G`.
    Steepest,
    /// `-(coefficient_map(theta) - targets)`. The Jacobian of the
    /// coefficient map is the Gram matrix of the weight `f_theta`, which is
    /// positive definite, so this is a descent direction for `G` with a
    /// condition number governed by `max f_theta / min f_theta` rather than
    /// its square.
    #[default]
    Preconditioned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Stop when `sqrt(G) <= tol`.
    pub tol: f64,
    pub max_iters: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub grow: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub descent: Descent,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iters: 50_000,
            initial_step: 0.1,
            shrink: 0.5,
            grow: 1.2,
            max_step: 10.0,
            min_step: 1e-16,
            descent: Descent::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub theta_hat: ExpFamilyParams,
    /// `||coefficient_map(theta_hat) - targets||_2`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `G` after every accepted step, starting with the initial value.
    pub objective_trace: Vec<f64>,
}

/// State of one evaluation of the least-squares objective.
struct Evaluation {
    theta: Vec<f64>,
    density: Vec<f64>,
    residual: WaveletCoefficients,
    objective: f64,
}

impl Evaluation {
    fn at(theta: Vec<f64>, targets: &WaveletCoefficients, basis: &WaveletBasis) -> Result<Self> {
        let (j0, j1) = (targets.j0(), targets.j1());
        let coeffs = WaveletCoefficients::new(j0, j1, theta)?;
        let density = exp_checked(basis.synthesize_values(&coeffs))?;
        let mut residual = basis.analyze_values(&density, j0, j1);
        residual
            .as_mut_slice()
            .iter_mut()
            .zip(targets.as_slice())
            .for_each(|(r, t)| *r -= t);
        let objective = residual.as_slice().iter().map(|r| r * r).sum();
        Ok(Self {
            theta: coeffs.into_vec(),
            density,
            residual,
            objective,
        })
    }

    /// `dG/dtheta_mu = 2 <f_theta psi_mu, sum_lambda r_lambda psi_lambda>`.
    fn gradient(&self, basis: &WaveletBasis) -> Vec<f64> {
        let mut weighted = basis.synthesize_values(&self.residual);
        weighted.iter_mut().zip(&self.density).for_each(|(w, f)| *w *= f);
        let mut g = basis
            .analyze_values(&weighted, self.residual.j0(), self.residual.j1())
            .into_vec();
        g.iter_mut().for_each(|v| *v *= 2.0);
        g
    }
}

/// Value and gradient of `G` at `params`.
pub fn objective_and_gradient(
    params: &ExpFamilyParams,
    targets: &WaveletCoefficients,
    basis: &WaveletBasis,
) -> Result<(f64, WaveletCoefficients)> {
    check_layout(params, targets)?;
    let eval = Evaluation::at(params.0.as_slice().to_vec(), targets, basis)?;
    let g = eval.gradient(basis);
    Ok((eval.objective, WaveletCoefficients::new(targets.j0(), targets.j1(), g)?))
}

fn check_layout(params: &ExpFamilyParams, targets: &WaveletCoefficients) -> Result<()> {
    if params.j0() != targets.j0() || params.j1() != targets.j1() {
        return Err(crate::error::invalid("initial parameters and targets index different sets"));
    }
    Ok(())
}

/// Finds `theta_hat` with `coefficient_map(theta_hat) ~= targets`.
///
/// Steps are accepted only when `G` decreases; an accepted step grows the
/// step size by `grow` (capped at `max_step`), a rejected or overflowing one
/// shrinks it by `shrink`. If the step falls below `min_step` the current
/// iterate is returned unconverged.
pub fn project(
    targets: &WaveletCoefficients,
    init: &ExpFamilyParams,
    opts: &SolverOptions,
    basis: &WaveletBasis,
) -> Result<ProjectionReport> {
    check_layout(init, targets)?;
    let mut current = Evaluation::at(init.0.as_slice().to_vec(), targets, basis)?;
    let mut trace = vec![current.objective];
    let mut step = opts.initial_step;
    let mut iterations = 0;
    let mut converged = libm::sqrt(current.objective) <= opts.tol;

    'outer: while !converged && iterations < opts.max_iters {
        iterations += 1;
        let direction: Vec<f64> = match opts.descent {
            Descent::Steepest => current.gradient(basis).into_iter().map(|g| -g).collect(),
            Descent::Preconditioned => current.residual.as_slice().iter().map(|r| -r).collect(),
        };
        loop {
            let trial: Vec<f64> = current
                .theta
                .iter()
                .zip(&direction)
                .map(|(t, d)| t + step * d)
                .collect();
            match Evaluation::at(trial, targets, basis) {
                Ok(next) if next.objective < current.objective => {
                    current = next;
                    trace.push(current.objective);
                    step = (step * opts.grow).min(opts.max_step);
                    break;
                }
                Ok(_) | Err(Error::DivergedParameters(_)) => {
                    step *= opts.shrink;
                    if step < opts.min_step {
                        break 'outer;
                    }
                }
                Err(e) => return Err(e),
            }
        }
        converged = libm::sqrt(current.objective) <= opts.tol;
    }

    let residual_norm = libm::sqrt(current.objective);
    Ok(ProjectionReport {
        theta_hat: ExpFamilyParams(WaveletCoefficients::new(targets.j0(), targets.j1(), current.theta)?),
        residual_norm,
        iterations,
        converged,
        objective_trace: trace,
    })
}
