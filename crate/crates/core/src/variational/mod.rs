//! Angle parameterizations, TQA initialization, and the optimization driver.

mod powell;

pub use powell::{powell_minimize, OptResult, PowellOptions};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::OptimizeError;
use crate::evolution::{Circuit, CostKind};
use crate::ising::{Distribution, IsingInstance};

/// Per-layer angles `γ_k`, `β_k` for `k = 1..p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSchedule {
    gamma: Vec<f64>,
    beta: Vec<f64>,
}

impl AngleSchedule {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self, OptimizeError> {
        if gamma.len() != beta.len() {
            return Err(OptimizeError::ParameterLength {
                expected: gamma.len(),
                found: beta.len(),
            });
        }
        if gamma.is_empty() {
            return Err(OptimizeError::ZeroDepth);
        }
        Ok(Self { gamma, beta })
    }

    /// Inverse of [`AngleSchedule::to_params`]: `[γ_1..γ_p, β_1..β_p]`.
    pub fn from_params(params: &[f64]) -> Result<Self, OptimizeError> {
        if params.len() % 2 != 0 {
            return Err(OptimizeError::ParameterLength {
                expected: params.len() + 1,
                found: params.len(),
            });
        }
        let (g, b) = params.split_at(params.len() / 2);
        Self::new(g.to_vec(), b.to_vec())
    }

    pub fn depth(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn to_params(&self) -> Vec<f64> {
        self.gamma.iter().chain(&self.beta).copied().collect()
    }

    /// Layers of `self` followed by layers of `next`.
    pub fn concat(&self, next: &Self) -> Self {
        Self {
            gamma: self.gamma.iter().chain(&next.gamma).copied().collect(),
            beta: self.beta.iter().chain(&next.beta).copied().collect(),
        }
    }
}

/// Coefficients of `γ_k = γ_slope·k/p + γ_intcp`, `β_k = β_slope·k/p + β_intcp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub gamma_slope: f64,
    pub gamma_intcp: f64,
    pub beta_slope: f64,
    pub beta_intcp: f64,
}

impl LinearParams {
    /// The linear coefficients that reproduce [`tqa_schedule`] exactly.
    pub fn tqa(dt: f64) -> Self {
        Self {
            gamma_slope: dt,
            gamma_intcp: 0.0,
            beta_slope: -dt,
            beta_intcp: dt,
        }
    }

    pub fn from_params(params: &[f64]) -> Result<Self, OptimizeError> {
        match *params {
            [gamma_slope, gamma_intcp, beta_slope, beta_intcp] => Ok(Self {
                gamma_slope,
                gamma_intcp,
                beta_slope,
                beta_intcp,
            }),
            _ => Err(OptimizeError::ParameterLength {
                expected: 4,
                found: params.len(),
            }),
        }
    }

    pub fn to_params(&self) -> Vec<f64> {
        vec![
            self.gamma_slope,
            self.gamma_intcp,
            self.beta_slope,
            self.beta_intcp,
        ]
    }

    pub fn to_schedule(&self, p: usize) -> Result<AngleSchedule, OptimizeError> {
        linear_to_schedule(self, p)
    }
}

pub fn linear_to_schedule(lp: &LinearParams, p: usize) -> Result<AngleSchedule, OptimizeError> {
    if p == 0 {
        return Err(OptimizeError::ZeroDepth);
    }
    let ramp = depth_fractions(p);
    Ok(AngleSchedule {
        gamma: ramp.iter().map(|&r| lp.gamma_slope * r + lp.gamma_intcp).collect(),
        beta: ramp.iter().map(|&r| lp.beta_slope * r + lp.beta_intcp).collect(),
    })
}

/// Discretized linear annealing: `γ_k = (k/p)Δt`, `β_k = (1 - k/p)Δt`.
pub fn tqa_schedule(p: usize, dt: f64) -> Result<AngleSchedule, OptimizeError> {
    if p == 0 {
        return Err(OptimizeError::ZeroDepth);
    }
    let ramp = depth_fractions(p);
    // β written as Δt - (k/p)Δt so it matches the linear form bit for bit
    Ok(AngleSchedule {
        gamma: ramp.iter().map(|&r| dt * r).collect(),
        beta: ramp.iter().map(|&r| dt - dt * r).collect(),
    })
}

fn depth_fractions(p: usize) -> Vec<f64> {
    (1..=p).map(|k| k as f64 / p as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `2p` independent angles.
    Full,
    /// Four linear-ramp coefficients.
    Linearized,
}

impl Scheme {
    pub fn n_params(self, p: usize) -> usize {
        match self {
            Scheme::Full => 2 * p,
            Scheme::Linearized => 4,
        }
    }

    pub fn schedule(self, params: &[f64], p: usize) -> Result<AngleSchedule, OptimizeError> {
        if params.len() != self.n_params(p) {
            return Err(OptimizeError::ParameterLength {
                expected: self.n_params(p),
                found: params.len(),
            });
        }
        match self {
            Scheme::Full => AngleSchedule::from_params(params),
            Scheme::Linearized => LinearParams::from_params(params)?.to_schedule(p),
        }
    }

    /// TQA starting point in this scheme's parameter space.
    pub fn initial_params(self, p: usize, dt: f64) -> Result<Vec<f64>, OptimizeError> {
        Ok(match self {
            Scheme::Full => tqa_schedule(p, dt)?.to_params(),
            Scheme::Linearized => LinearParams::tqa(dt).to_params(),
        })
    }

    /// The TQA start with every mixer angle negated. With the mixer
    /// `+Σσ^x`, `|+⟩` is its top eigenstate, so the plain schedule anneals
    /// toward the top of the cost spectrum while this one anneals toward the
    /// bottom.
    pub fn reflected_params(self, p: usize, dt: f64) -> Result<Vec<f64>, OptimizeError> {
        let mut x = self.initial_params(p, dt)?;
        let half = x.len() / 2;
        for v in &mut x[half..] {
            *v = -*v;
        }
        Ok(x)
    }
}

impl Scheme {
    /// Maps an optimum found at depth `from_p` to a starting point at `to_p`.
    ///
    /// Linearized coefficients already describe angles as functions of
    /// `k/p` and carry over unchanged. Full schedules are linearly
    /// interpolated in `k/p`, holding the first value constant below `1/from_p`.
    pub fn resample(self, params: &[f64], from_p: usize, to_p: usize) -> Result<Vec<f64>, OptimizeError> {
        match self {
            Scheme::Linearized => Ok(LinearParams::from_params(params)?.to_params()),
            Scheme::Full => {
                if to_p == 0 {
                    return Err(OptimizeError::ZeroDepth);
                }
                let s = self.schedule(params, from_p)?;
                let gamma = interpolate(s.gamma(), to_p);
                let beta = interpolate(s.beta(), to_p);
                Ok(gamma.into_iter().chain(beta).collect())
            }
        }
    }
}

fn interpolate(values: &[f64], to_p: usize) -> Vec<f64> {
    let from_p = values.len();
    (1..=to_p)
        .map(|k| {
            // position on the source grid, where index j sits at (j + 1) / from_p
            let x = k as f64 / to_p as f64 * from_p as f64 - 1.0;
            if x <= 0.0 {
                values[0]
            } else {
                let j = (x.floor() as usize).min(from_p - 1);
                if j + 1 >= from_p {
                    values[from_p - 1]
                } else {
                    let w = x - j as f64;
                    values[j] * (1.0 - w) + values[j + 1] * w
                }
            }
        })
        .collect()
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Full => "full",
            Scheme::Linearized => "linearized",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Scheme::Full),
            "linearized" | "linear" => Ok(Scheme::Linearized),
            other => Err(format!("unknown scheme `{other}` (expected full|linearized)")),
        }
    }
}

/// `⟨ψ_p|H_C|ψ_p⟩` as a function of the scheme's parameter vector.
#[derive(Debug, Clone)]
pub struct Objective {
    circuit: Circuit,
    scheme: Scheme,
    p: usize,
}

impl Objective {
    pub fn new(
        inst: &IsingInstance,
        kind: CostKind,
        scheme: Scheme,
        p: usize,
    ) -> Result<Self, OptimizeError> {
        if p == 0 {
            return Err(OptimizeError::ZeroDepth);
        }
        Ok(Self {
            circuit: Circuit::new(inst, kind)?,
            scheme,
            p,
        })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn depth(&self) -> usize {
        self.p
    }

    pub fn value(&self, params: &[f64]) -> Result<f64, OptimizeError> {
        let angles = self.scheme.schedule(params, self.p)?;
        let psi = self.circuit.run(&angles);
        Ok(self.circuit.cost_expectation(&psi))
    }

    pub fn distribution(&self, params: &[f64]) -> Result<Distribution, OptimizeError> {
        let angles = self.scheme.schedule(params, self.p)?;
        Ok(self.circuit.run(&angles).probabilities())
    }
}

/// One-shot objective evaluation; rebuilds the cost propagator each call.
pub fn objective(
    inst: &IsingInstance,
    kind: CostKind,
    scheme: Scheme,
    params: &[f64],
    p: usize,
) -> Result<f64, OptimizeError> {
    Objective::new(inst, kind, scheme, p)?.value(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaoaOptions {
    /// TQA time step.
    pub dt: f64,
    pub powell: PowellOptions,
    /// Extra runs from perturbed starting points; the best result is kept.
    pub restarts: usize,
    /// Half-width of the uniform perturbation applied on restarts.
    pub restart_spread: f64,
    pub seed: u64,
}

impl Default for QaoaOptions {
    fn default() -> Self {
        Self {
            dt: 1.0,
            powell: PowellOptions::default(),
            restarts: 0,
            restart_spread: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaOutcome {
    /// Best run; `n_evaluations` counts all runs.
    pub result: OptResult,
    pub schedule: AngleSchedule,
    pub distribution: Distribution,
    /// Best objective of each run, the TQA-initialized run first.
    pub run_values: Vec<f64>,
}

/// TQA-initialized Powell minimization of the QAOA energy.
pub fn optimize_qaoa(
    inst: &IsingInstance,
    kind: CostKind,
    scheme: Scheme,
    p: usize,
    opts: &QaoaOptions,
) -> Result<QaoaOutcome, OptimizeError> {
    let objective = Objective::new(inst, kind, scheme, p)?;
    let x0 = scheme.initial_params(p, opts.dt)?;
    optimize_from(&objective, &x0, opts)
}

/// Like [`optimize_qaoa`] but from an explicit starting point.
pub fn optimize_from(
    objective: &Objective,
    x0: &[f64],
    opts: &QaoaOptions,
) -> Result<QaoaOutcome, OptimizeError> {
    let expected = objective.scheme.n_params(objective.p);
    if x0.len() != expected {
        return Err(OptimizeError::ParameterLength {
            expected,
            found: x0.len(),
        });
    }
    let f = |x: &[f64]| objective.value(x).unwrap_or(f64::NAN);

    let mut best = powell_minimize(f, x0, &opts.powell)?;
    let mut total_evals = best.n_evaluations;
    let mut run_values = vec![best.best_value];
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64 + 1));
        let start: Vec<f64> = x0
            .iter()
            .map(|v| v + rng.gen_range(-opts.restart_spread..=opts.restart_spread))
            .collect();
        let run = powell_minimize(f, &start, &opts.powell)?;
        total_evals += run.n_evaluations;
        run_values.push(run.best_value);
        if run.best_value < best.best_value {
            best = run;
        }
    }
    best.n_evaluations = total_evals;

    let schedule = objective.scheme.schedule(&best.best_params, objective.p)?;
    let distribution = objective.circuit.run(&schedule).probabilities();
    Ok(QaoaOutcome {
        result: best,
        schedule,
        distribution,
        run_values,
    })
}
