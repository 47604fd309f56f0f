//! Seeded derivative-free minimisation over the unitary group.
//!
//! A restart starts at `U0` (identity for restart 0, Haar-random otherwise)
//! and runs Nelder–Mead on the `d^2` real coordinates of a Hermitian
//! generator `H`, with `U = U0 exp(iH)`. Every time the simplex collapses
//! the chart is re-centred at the incumbent and the search is run again with
//! a smaller simplex, until a full cycle no longer improves the value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{identity, unitary_exp, CMatrix, C64};
use crate::par;
use crate::rng;
use crate::states::random_unitary;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerOptions {
    pub restarts: usize,
    /// Nelder–Mead iterations allowed per restart, summed over its cycles.
    pub max_iters: usize,
    pub f_tol: f64,
    pub param_tol: f64,
    pub seed: u64,
    /// Run restarts on the rayon pool (ignored without the `parallel` feature).
    pub parallel: bool,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 2000,
            f_tol: 1e-10,
            param_tol: 1e-8,
            seed: 0,
            parallel: true,
        }
    }
}

impl OptimizerOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::ParamOutOfRange(
                "restarts and max_iters must be at least 1".into(),
            ));
        }
        if self.f_tol.is_nan() || self.f_tol <= 0.0 || self.param_tol.is_nan() || self.param_tol <= 0.0 {
            return Err(Error::ParamOutOfRange("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartDiagnostics {
    pub restart: usize,
    pub start_value: f64,
    pub final_value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub cycles: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct UnitaryMinimum {
    pub basis: CMatrix,
    pub value: f64,
    /// Index of the winning restart.
    pub best_restart: usize,
    pub diagnostics: Vec<RestartDiagnostics>,
}

impl UnitaryMinimum {
    pub fn converged(&self) -> bool {
        self.diagnostics[self.best_restart].converged
    }

    pub fn restarts_used(&self) -> usize {
        self.diagnostics.len()
    }
}

/// Hermitian matrix from `d^2` real coordinates: the diagonal, then the real
/// and imaginary parts of each upper-triangular entry.
pub fn hermitian_from_params(d: usize, params: &[f64]) -> CMatrix {
    debug_assert_eq!(params.len(), d * d);
    let mut h = CMatrix::zeros(d, d);
    for k in 0..d {
        h[(k, k)] = C64::new(params[k], 0.0);
    }
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = C64::new(params[idx], params[idx + 1]);
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
            idx += 2;
        }
    }
    h
}

/// Minimise `objective` over `d x d` unitaries.
pub fn minimize_over_unitaries<F>(objective: &F, d: usize, opts: &OptimizerOptions) -> Result<UnitaryMinimum>
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    opts.validate()?;
    if d == 0 {
        return Err(Error::ParamOutOfRange("unitary dimension must be >= 1".into()));
    }
    let runs = par::map_indexed(opts.restarts, opts.parallel, |r| {
        let start = if r == 0 {
            identity(d)
        } else {
            random_unitary(d, rng::derive_seed(opts.seed, r as u64))
        };
        descend(objective, start, r, opts)
    });

    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1.final_value < runs[best].1.final_value {
            best = r;
        }
    }
    let basis = runs[best].0.clone();
    let value = runs[best].1.final_value;
    Ok(UnitaryMinimum {
        basis,
        value,
        best_restart: best,
        diagnostics: runs.into_iter().map(|(_, diag)| diag).collect(),
    })
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

const MAX_CYCLES: usize = 12;
const INITIAL_STEP: f64 = 0.5;

fn descend<F>(objective: &F, start: CMatrix, restart: usize, opts: &OptimizerOptions) -> (CMatrix, RestartDiagnostics)
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    let d = start.nrows();
    let n = d * d;
    let start_value = sanitize(objective(&start));
    let mut center = start;
    let mut value = start_value;
    let mut step = INITIAL_STEP;
    let mut iterations = 0;
    let mut evaluations = 1;
    let mut cycles = 0;
    let mut converged = false;

    while cycles < MAX_CYCLES && iterations < opts.max_iters {
        cycles += 1;
        let chart = |params: &[f64]| -> f64 {
            let u = &center * unitary_exp(&hermitian_from_params(d, params));
            sanitize(objective(&u))
        };
        let nm = nelder_mead(
            &chart,
            &vec![0.0; n],
            step,
            &NelderMeadOptions {
                max_iters: opts.max_iters - iterations,
                f_tol: opts.f_tol,
                x_tol: opts.param_tol,
            },
        );
        iterations += nm.iterations;
        evaluations += nm.evaluations;
        let improvement = value - nm.f;
        if nm.f < value {
            center = &center * unitary_exp(&hermitian_from_params(d, &nm.x));
            value = nm.f;
        }
        if nm.converged && improvement <= opts.f_tol {
            converged = true;
            break;
        }
        let moved = nm.x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        step = (moved.max(10.0 * opts.param_tol)).min(step);
    }

    (
        center,
        RestartDiagnostics {
            restart,
            start_value,
            final_value: value,
            iterations,
            evaluations,
            cycles,
            converged,
        },
    )
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Spread of simplex values at convergence.
    pub f_tol: f64,
    /// Max-norm spread of simplex vertices at convergence.
    pub x_tol: f64,
}

#[derive(Debug, Clone)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with dimension-adaptive coefficients. The initial simplex is
/// `x0` plus `step` along each axis. Converged when both the value spread and
/// the vertex spread fall below their tolerances.
pub fn nelder_mead<F>(f: &F, x0: &[f64], step: f64, opts: &NelderMeadOptions) -> NelderMeadOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n.max(1) as f64;
    let (reflect, expand, contract, shrink) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        sanitize(f(x))
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // Stable sort keeps the earlier vertex first among equal values.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_spread = simplex[n].1 - simplex[0].1;
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let f_ok = f_spread <= opts.f_tol || simplex[0].1 == f64::INFINITY;
        if f_ok && x_spread <= opts.x_tol {
            converged = true;
            break;
        }
        if n == 0 || iterations >= opts.max_iters {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(reflect);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(reflect * expand);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(reflect * contract);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-contract);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + shrink * (v - b))
                .collect();
            let fx = eval(&x);
            *vertex = (x, fx);
        }
    }

    let (x, fx) = simplex.swap_remove(0);
    NelderMeadOutcome {
        x,
        f: fx,
        iterations,
        evaluations,
        converged,
    }
}
