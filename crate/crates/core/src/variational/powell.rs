//! Powell's direction-set method with bracketing and Brent line searches.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::OptimizeError;

const GOLDEN: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;
const GROW_LIMIT: f64 = 100.0;
const TINY: f64 = 1e-21;
const BRENT_MAX_ITER: usize = 500;
const BRACKET_MAX_ITER: usize = 200;
// Bracketing gives up beyond this distance along a direction.
const MAX_STEP: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowellOptions {
    /// Relative objective decrease per iteration below which the run stops.
    pub ftol: f64,
    /// Relative abscissa tolerance of each Brent line search.
    pub xtol: f64,
    pub max_iter: usize,
    pub max_evals: usize,
    /// First trial step length along a search direction.
    pub initial_step: f64,
    /// Wall-clock budget; the best point so far is returned when exceeded.
    pub time_budget: Option<Duration>,
}

impl Default for PowellOptions {
    fn default() -> Self {
        Self {
            ftol: 1e-10,
            xtol: 1e-8,
            max_iter: 100,
            max_evals: 200_000,
            initial_step: 0.1,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub n_evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    /// `(iteration, objective)` after each direction-set cycle, starting with
    /// the initial point at iteration 0.
    pub trace: Vec<(usize, f64)>,
}

struct Evaluator<F> {
    f: F,
    evals: usize,
    max_evals: usize,
    deadline: Option<Instant>,
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64, OptimizeError> {
        self.evals += 1;
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(OptimizeError::NonFinite {
                value: v,
                point: x.to_vec(),
            });
        }
        Ok(v)
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.max_evals || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Minimizes `f` from `x0`.
///
/// Every accepted move is a line minimum that is no worse than the current
/// point, so the recorded trace never increases. `converged` is false when
/// an iteration, evaluation, or time cap ended the run.
pub fn powell_minimize<F>(f: F, x0: &[f64], opts: &PowellOptions) -> Result<OptResult, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut ev = Evaluator {
        f,
        evals: 0,
        max_evals: opts.max_evals.max(1),
        deadline: opts.time_budget.map(|b| Instant::now() + b),
    };
    let mut x = x0.to_vec();
    let mut fx = ev.eval(&x)?;
    let mut trace = vec![(0, fx)];
    let mut directions: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            d
        })
        .collect();

    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter && n > 0 {
        if ev.exhausted() {
            break;
        }
        iterations += 1;
        let x_start = x.clone();
        let f_start = fx;
        let mut biggest_drop = 0.0;
        let mut biggest_idx = 0;
        let mut interrupted = false;
        for (i, dir) in directions.iter().enumerate() {
            if ev.exhausted() {
                interrupted = true;
                break;
            }
            let before = fx;
            fx = line_minimize(&mut ev, &mut x, fx, dir, opts)?;
            if before - fx > biggest_drop {
                biggest_drop = before - fx;
                biggest_idx = i;
            }
        }
        if interrupted {
            trace.push((iterations, fx));
            break;
        }

        if 2.0 * (f_start - fx) <= opts.ftol * (f_start.abs() + fx.abs()) + 1e-20 {
            trace.push((iterations, fx));
            converged = true;
            break;
        }
        if ev.exhausted() {
            trace.push((iterations, fx));
            break;
        }

        let new_dir: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
        let extrapolated: Vec<f64> = x.iter().zip(&new_dir).map(|(a, d)| a + d).collect();
        let f_ext = ev.eval(&extrapolated)?;
        if f_ext < f_start {
            let t = 2.0 * (f_start - 2.0 * fx + f_ext) * (f_start - fx - biggest_drop).powi(2)
                - biggest_drop * (f_start - f_ext).powi(2);
            if t < 0.0 {
                fx = line_minimize(&mut ev, &mut x, fx, &new_dir, opts)?;
                let last = n - 1;
                directions[biggest_idx] = directions[last].clone();
                directions[last] = new_dir;
            }
        }
        trace.push((iterations, fx));
    }

    Ok(OptResult {
        best_params: x,
        best_value: fx,
        n_evaluations: ev.evals,
        iterations,
        converged,
        trace,
    })
}

/// Moves `x` to the minimum of `f` along `dir`; returns the new value, which
/// never exceeds `fx`.
fn line_minimize<F: FnMut(&[f64]) -> f64>(
    ev: &mut Evaluator<F>,
    x: &mut [f64],
    fx: f64,
    dir: &[f64],
    opts: &PowellOptions,
) -> Result<f64, OptimizeError> {
    let dnorm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
    if dnorm == 0.0 || !dnorm.is_finite() {
        return Ok(fx);
    }
    let base = x.to_vec();
    let mut point = vec![0.0; x.len()];
    let mut phi = |t: f64, ev: &mut Evaluator<F>| -> Result<f64, OptimizeError> {
        for ((p, b), d) in point.iter_mut().zip(&base).zip(dir) {
            *p = b + t * d;
        }
        ev.eval(&point)
    };

    let step = opts.initial_step / dnorm;
    let bracket = bracket_minimum(0.0, fx, step, ev, &mut phi)?;
    let (t_best, f_best) = match bracket {
        Bracket::Found { a, b, c, fb } => brent(a, b, c, fb, opts.xtol, ev, &mut phi)?,
        Bracket::BestOnly { t, ft } => (t, ft),
    };
    if f_best < fx {
        for ((xi, b), d) in x.iter_mut().zip(&base).zip(dir) {
            *xi = b + t_best * d;
        }
        Ok(f_best)
    } else {
        Ok(fx)
    }
}

enum Bracket {
    /// `a < b < c` (or reversed) with `f(b) <= min(f(a), f(c))`.
    Found { a: f64, b: f64, c: f64, fb: f64 },
    /// Budget or iteration cap hit before a bracket closed.
    BestOnly { t: f64, ft: f64 },
}

type Phi<'a, F> = dyn FnMut(f64, &mut Evaluator<F>) -> Result<f64, OptimizeError> + 'a;

// Golden-ratio expansion with parabolic extrapolation.
fn bracket_minimum<F: FnMut(&[f64]) -> f64>(
    a0: f64,
    fa0: f64,
    step: f64,
    ev: &mut Evaluator<F>,
    phi: &mut Phi<'_, F>,
) -> Result<Bracket, OptimizeError> {
    let (mut a, mut fa) = (a0, fa0);
    let mut b = a0 + step;
    let mut fb = phi(b, ev)?;
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLDEN * (b - a);
    let mut fc = phi(c, ev)?;
    let mut iter = 0;
    while fb > fc {
        iter += 1;
        if iter > BRACKET_MAX_ITER || ev.exhausted() || c.abs() > MAX_STEP {
            return Ok(Bracket::BestOnly { t: c, ft: fc });
        }
        let r = (b - a) * (fb - fc);
        let q = (b - c) * (fb - fa);
        let denom = 2.0 * (q - r).abs().max(TINY).copysign(q - r);
        let mut u = b - ((b - c) * q - (b - a) * r) / denom;
        let ulim = b + GROW_LIMIT * (c - b);
        let mut fu;
        if (b - u) * (u - c) > 0.0 {
            fu = phi(u, ev)?;
            if fu < fc {
                return Ok(Bracket::Found { a: b, b: u, c, fb: fu });
            } else if fu > fb {
                return Ok(Bracket::Found { a, b, c: u, fb });
            }
            u = c + GOLDEN * (c - b);
            fu = phi(u, ev)?;
        } else if (c - u) * (u - ulim) > 0.0 {
            fu = phi(u, ev)?;
            if fu < fc {
                b = c;
                c = u;
                u = c + GOLDEN * (c - b);
                fb = fc;
                fc = fu;
                fu = phi(u, ev)?;
            }
        } else if (u - ulim) * (ulim - c) >= 0.0 {
            u = ulim;
            fu = phi(u, ev)?;
        } else {
            u = c + GOLDEN * (c - b);
            fu = phi(u, ev)?;
        }
        a = b;
        b = c;
        c = u;
        fa = fb;
        fb = fc;
        fc = fu;
    }
    Ok(Bracket::Found { a, b, c, fb })
}

// Brent's parabolic/golden-section minimization within a bracket.
fn brent<F: FnMut(&[f64]) -> f64>(
    ax: f64,
    bx: f64,
    cx: f64,
    fbx: f64,
    tol: f64,
    ev: &mut Evaluator<F>,
    phi: &mut Phi<'_, F>,
) -> Result<(f64, f64), OptimizeError> {
    const ZEPS: f64 = 1e-18;
    let mut a = ax.min(cx);
    let mut b = ax.max(cx);
    let (mut x, mut w, mut v) = (bx, bx, bx);
    let (mut fx, mut fw, mut fv) = (fbx, fbx, fbx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..BRENT_MAX_ITER {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) || ev.exhausted() {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = phi(u, ev)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok((x, fx))
}
