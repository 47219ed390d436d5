//! Gradient-based local minimizers: L-BFGS and nonlinear conjugate gradient.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Lbfgs,
    /// Polak–Ribière with restart whenever the direction is not a descent direction.
    Cg,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lbfgs" | "l_bfgs" => Ok(Method::Lbfgs),
            "cg" => Ok(Method::Cg),
            other => Err(Error::Validation(format!("unknown optimizer {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Lbfgs => "lbfgs",
            Method::Cg => "cg",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub method: Method,
    pub max_evaluations: usize,
    pub grad_tol: f64,
    /// Largest energy change tolerated across the last `window` iterations.
    pub energy_tol: f64,
    pub window: usize,
    pub memory: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            method: Method::Lbfgs,
            max_evaluations: 10_000,
            grad_tol: 1e-6,
            energy_tol: 1e-10,
            window: 3,
            memory: 10,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

impl OptimizerOptions {
    pub fn with_method(method: Method) -> Self {
        let mut o = Self {
            method,
            ..Self::default()
        };
        if method == Method::Cg {
            // CG needs a tighter curvature condition to keep directions conjugate.
            o.c2 = 0.1;
        }
        o
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub evaluations: usize,
    pub energy: f64,
    pub grad_inf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Set when the evaluation budget ran out before convergence.
    pub budget_exhausted: bool,
    pub trace: Vec<TracePoint>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Objective<'a, F> {
    f: &'a mut F,
    evaluations: usize,
    budget: usize,
}

impl<F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>> Objective<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.evaluations += 1;
        let (v, g) = (self.f)(x)?;
        if !v.is_finite() || g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite objective after {} evaluations (value {v})",
                self.evaluations
            )));
        }
        Ok((v, g))
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }
}

struct LinePoint {
    alpha: f64,
    f: f64,
    g: Vec<f64>,
    d: f64,
}

/// Minimizer of the cubic through two points with values and slopes, safeguarded.
fn cubic_min(a: &LinePoint, b: &LinePoint) -> f64 {
    let (lo, hi) = if a.alpha < b.alpha { (a.alpha, b.alpha) } else { (b.alpha, a.alpha) };
    let d1 = a.d + b.d - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.d * b.d;
    let mid = 0.5 * (lo + hi);
    if disc < 0.0 {
        return mid;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let t = b.alpha - (b.alpha - a.alpha) * (b.d + d2 - d1) / (b.d - a.d + 2.0 * d2);
    let margin = 0.1 * (hi - lo);
    if !t.is_finite() || t < lo + margin || t > hi - margin {
        mid
    } else {
        t
    }
}

/// Strong-Wolfe line search along `p`; `None` when no acceptable step was found.
fn line_search<F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>>(
    obj: &mut Objective<'_, F>,
    x: &[f64],
    f0: f64,
    g0: &[f64],
    p: &[f64],
    alpha0: f64,
    opts: &OptimizerOptions,
) -> Result<Option<LinePoint>> {
    let d0 = dot(g0, p);
    let point = |obj: &mut Objective<'_, F>, alpha: f64| -> Result<LinePoint> {
        let xt: Vec<f64> = x.iter().zip(p).map(|(xi, pi)| xi + alpha * pi).collect();
        let (f, g) = obj.eval(&xt)?;
        let d = dot(&g, p);
        Ok(LinePoint { alpha, f, g, d })
    };
    let armijo = |pt: &LinePoint| pt.f <= f0 + opts.c1 * pt.alpha * d0;
    let curvature = |pt: &LinePoint| pt.d.abs() <= opts.c2 * d0.abs();

    let zoom = |obj: &mut Objective<'_, F>, mut lo: LinePoint, mut hi: LinePoint| -> Result<Option<LinePoint>> {
        for _ in 0..30 {
            if obj.exhausted() || (hi.alpha - lo.alpha).abs() < 1e-14 * lo.alpha.abs().max(1.0) {
                break;
            }
            let alpha = cubic_min(&lo, &hi);
            let pt = point(obj, alpha)?;
            if !armijo(&pt) || pt.f >= lo.f {
                hi = pt;
            } else {
                if curvature(&pt) {
                    return Ok(Some(pt));
                }
                if pt.d * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = pt;
            }
        }
        Ok((lo.alpha > 0.0 && lo.f < f0).then_some(lo))
    };

    let mut prev = LinePoint {
        alpha: 0.0,
        f: f0,
        g: g0.to_vec(),
        d: d0,
    };
    let mut alpha = alpha0;
    for i in 0..40 {
        if obj.exhausted() {
            return Ok((prev.alpha > 0.0).then_some(prev));
        }
        let pt = point(obj, alpha)?;
        if !armijo(&pt) || (i > 0 && pt.f >= prev.f) {
            return zoom(obj, prev, pt);
        }
        if curvature(&pt) {
            return Ok(Some(pt));
        }
        if pt.d >= 0.0 {
            return zoom(obj, pt, prev);
        }
        prev = pt;
        alpha *= 2.0;
    }
    Ok(Some(prev))
}

/// Minimizes `f`, which returns the value and gradient at a point.
///
/// Stops when the gradient infinity norm is below `grad_tol` and the value
/// moved by at most `energy_tol` over the last `window` iterations, or when the
/// budget is spent. A start point that is already stationary is accepted as is.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &OptimizerOptions) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut obj = Objective {
        f: &mut f,
        evaluations: 0,
        budget: opts.max_evaluations.max(1),
    };
    let mut x = x0.to_vec();
    let (mut fx, mut g) = obj.eval(&x)?;
    let mut trace = vec![TracePoint {
        iteration: 0,
        evaluations: 1,
        energy: fx,
        grad_inf: inf_norm(&g),
    }];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut p: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut converged = inf_norm(&g) <= opts.grad_tol.min(1e-12) || x.is_empty();
    let mut iteration = 0;
    let mut fresh_restart = true;
    while !converged && !obj.exhausted() {
        let g_inf = inf_norm(&g);
        if dot(&p, &g) >= 0.0 {
            p = g.iter().map(|v| -v).collect();
            history.clear();
            fresh_restart = true;
        }
        let alpha0 = if fresh_restart { (1.0 / g_inf).min(1.0) } else { 1.0 };
        let Some(step) = line_search(&mut obj, &x, fx, &g, &p, alpha0, opts)? else {
            if fresh_restart {
                // Steepest descent cannot improve: numerically stationary.
                converged = g_inf <= opts.grad_tol;
                break;
            }
            p = g.iter().map(|v| -v).collect();
            history.clear();
            fresh_restart = true;
            continue;
        };
        fresh_restart = false;
        let x_new: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + step.alpha * pi).collect();
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = step.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        iteration += 1;
        let g_old = std::mem::replace(&mut g, step.g);
        x = x_new;
        fx = step.f;
        let g_inf = inf_norm(&g);
        trace.push(TracePoint {
            iteration,
            evaluations: obj.evaluations,
            energy: fx,
            grad_inf: g_inf,
        });
        if g_inf <= opts.grad_tol && trace.len() > opts.window {
            let recent = &trace[trace.len() - 1 - opts.window..];
            let lo = recent.iter().map(|t| t.energy).fold(f64::INFINITY, f64::min);
            let hi = recent.iter().map(|t| t.energy).fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= opts.energy_tol {
                converged = true;
                break;
            }
        }
        if g_inf == 0.0 {
            converged = true;
            break;
        }
        p = match opts.method {
            Method::Lbfgs => {
                let sy = dot(&s, &y);
                if sy > 1e-16 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
                    history.push_back((s, y, 1.0 / sy));
                    if history.len() > opts.memory {
                        history.pop_front();
                    }
                }
                lbfgs_direction(&g, &history)
            }
            Method::Cg => {
                let beta = (dot(&g, &y) / dot(&g_old, &g_old)).max(0.0);
                g.iter().zip(&p).map(|(gi, pi)| -gi + beta * pi).collect()
            }
        };
    }
    let grad_inf = inf_norm(&g);
    Ok(OptimizeResult {
        x,
        f: fx,
        grad_inf,
        iterations: iteration,
        evaluations: obj.evaluations,
        budget_exhausted: !converged && obj.exhausted(),
        converged,
        trace,
    })
}

/// Two-loop recursion.
fn lbfgs_direction(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        Ok((f, g))
    }

    #[test]
    fn rosenbrock_both_methods() {
        for m in [Method::Lbfgs, Method::Cg] {
            let r = minimize(rosenbrock, &[-1.2, 1.0], &OptimizerOptions::with_method(m)).unwrap();
            assert!(r.converged, "{m}: {r:?}");
            assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{m}");
            assert!(r.trace.windows(2).all(|w| w[1].energy <= w[0].energy));
        }
    }

    #[test]
    fn cosine_toy_reaches_pi() {
        // <Z> after RY(θ) on |0>
        let f = |x: &[f64]| Ok((x[0].cos(), vec![-x[0].sin()]));
        let r = minimize(f, &[0.1], &OptimizerOptions::default()).unwrap();
        assert!((r.x[0] - std::f64::consts::PI).abs() < 1e-6);
        assert!((r.f + 1.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_start_and_budget() {
        let f = |x: &[f64]| Ok((x[0].cos(), vec![-x[0].sin()]));
        let r = minimize(f, &[0.0], &OptimizerOptions::default()).unwrap();
        assert!(r.converged && r.iterations == 0);
        let opts = OptimizerOptions {
            max_evaluations: 3,
            ..Default::default()
        };
        let r = minimize(rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert!(r.budget_exhausted && !r.converged && r.evaluations <= 4);
    }

    #[test]
    fn non_finite_aborts() {
        let f = |_: &[f64]| Ok((f64::NAN, vec![0.0]));
        assert!(matches!(minimize(f, &[1.0], &OptimizerOptions::default()), Err(Error::Numerical(_))));
    }
}
