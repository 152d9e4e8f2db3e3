use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Method, Start, SweepConfig};
use crate::error::HarnessError;
use crate::ising::{gibbs_distribution, ground_set, Distribution, GibbsDistribution, GroundSet, IsingInstance};
use crate::metrics::{fairness_gap, ground_state_probability, orbit_probabilities, total_variation_distance};
use crate::variational::{optimize_from, Objective, QaoaOutcome, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub method: Method,
    pub scheme: Scheme,
    pub p: usize,
    /// `None` for classical QAOA.
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
}

impl SweepPoint {
    pub fn sort_key(&self, other: &Self) -> Ordering {
        (self.method, self.scheme)
            .cmp(&(other.method, other.scheme))
            .then_with(|| cmp_temperature(self.temperature, other.temperature))
            .then(self.p.cmp(&other.p))
    }
}

fn cmp_temperature(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (a, b) => a.is_some().cmp(&b.is_some()),
    }
}

impl std::fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{} p={}", self.method, self.scheme, self.p)?;
        if let Some(t) = self.temperature {
            write!(f, " T={t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureTvd {
    #[serde(rename = "T")]
    pub temperature: f64,
    pub tvd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub method: Method,
    pub scheme: Scheme,
    pub p: usize,
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    pub objective: f64,
    pub p_gs: f64,
    /// Empty when flip orbits are undefined.
    pub orbit_probs: Vec<f64>,
    pub fairness_gap: f64,
    /// Distance to the Gibbs distribution at the record's own temperature.
    pub tvd: Option<f64>,
    /// Distance to the Gibbs distribution at every configured temperature.
    pub tvd_by_temperature: Vec<TemperatureTvd>,
    pub n_eval: usize,
    pub converged: bool,
    pub wall_time_s: f64,
    /// Start of the winning run.
    pub start: Start,
    /// Optimized parameter vector in the scheme's own coordinates.
    pub params: Vec<f64>,
}

impl SweepRecord {
    pub fn point(&self) -> SweepPoint {
        SweepPoint {
            method: self.method,
            scheme: self.scheme,
            p: self.p,
            temperature: self.temperature,
        }
    }

    pub fn tvd_at(&self, temperature: f64) -> Option<f64> {
        self.tvd_by_temperature
            .iter()
            .find(|t| t.temperature == temperature)
            .map(|t| t.tvd)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub point: SweepPoint,
    pub message: String,
}

/// Sweep output: successful records in canonical order plus any failures.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<PointFailure>,
}

impl SweepTable {
    pub fn find(&self, method: Method, scheme: Scheme, p: usize, temperature: Option<f64>) -> Option<&SweepRecord> {
        self.records.iter().find(|r| {
            r.method == method && r.scheme == scheme && r.p == p && r.temperature == temperature
        })
    }

    /// Records of one (method, scheme, T) series in increasing depth.
    pub fn series(&self, method: Method, scheme: Scheme, temperature: Option<f64>) -> Vec<&SweepRecord> {
        self.records
            .iter()
            .filter(|r| r.method == method && r.scheme == scheme && r.temperature == temperature)
            .collect()
    }

    pub fn into_result(self) -> Result<Vec<SweepRecord>, HarnessError> {
        if self.failures.is_empty() {
            return Ok(self.records);
        }
        Err(partial_failure(&self.failures))
    }
}

pub fn partial_failure(failures: &[PointFailure]) -> HarnessError {
    let summary = failures
        .iter()
        .map(|f| format!("[{}] {}", f.point, f.message))
        .collect::<Vec<_>>()
        .join("; ");
    HarnessError::PartialFailure {
        failed: failures.len(),
        summary,
    }
}

/// Instance data shared read-only by every point.
struct Context {
    inst: IsingInstance,
    ground: GroundSet,
    gibbs: Vec<GibbsDistribution>,
}

impl Context {
    fn new(inst: IsingInstance, temperatures: &[f64]) -> Result<Self, HarnessError> {
        let ground = ground_set(&inst)?;
        let gibbs = temperatures
            .iter()
            .map(|&t| gibbs_distribution(&inst, t))
            .collect::<Result<_, _>>()?;
        Ok(Self { inst, ground, gibbs })
    }

    fn gibbs_at(&self, temperature: f64) -> Result<Distribution, HarnessError> {
        match self.gibbs.iter().find(|g| g.temperature == temperature) {
            Some(g) => Ok(g.distribution.clone()),
            None => Ok(gibbs_distribution(&self.inst, temperature)?.distribution),
        }
    }

    fn record(
        &self,
        point: SweepPoint,
        start: Start,
        outcome: &QaoaOutcome,
        wall: Duration,
        record_timing: bool,
    ) -> Result<SweepRecord, HarnessError> {
        let dist = &outcome.distribution;
        let orbit_probs = orbit_probabilities(dist, &self.ground).unwrap_or_default();
        let tvd = match point.temperature {
            Some(t) if point.method == Method::Sbo => {
                Some(total_variation_distance(dist, &self.gibbs_at(t)?)?)
            }
            _ => None,
        };
        let tvd_by_temperature = self
            .gibbs
            .iter()
            .map(|g| {
                Ok(TemperatureTvd {
                    temperature: g.temperature,
                    tvd: total_variation_distance(dist, &g.distribution)?,
                })
            })
            .collect::<Result<_, HarnessError>>()?;
        Ok(SweepRecord {
            method: point.method,
            scheme: point.scheme,
            p: point.p,
            temperature: point.temperature,
            objective: outcome.result.best_value,
            p_gs: ground_state_probability(dist, &self.ground),
            fairness_gap: fairness_gap(&orbit_probs),
            orbit_probs,
            tvd,
            tvd_by_temperature,
            n_eval: outcome.result.n_evaluations,
            converged: outcome.result.converged,
            wall_time_s: if record_timing { wall.as_secs_f64() } else { 0.0 },
            start,
            params: outcome.result.best_params.clone(),
        })
    }
}

fn check_point(point: &SweepPoint) -> Result<(), HarnessError> {
    if point.p == 0 {
        return Err(HarnessError::Config("depth must be at least 1".into()));
    }
    match (point.method, point.temperature) {
        (Method::Sbo, None) => Err(HarnessError::Config("sbo points need a temperature".into())),
        (Method::Qaoa, Some(_)) => Err(HarnessError::Config(
            "classical qaoa points take no temperature".into(),
        )),
        (_, Some(t)) if !(t > 0.0) || !t.is_finite() => {
            Err(HarnessError::Config(format!("temperature must be positive, got {t}")))
        }
        _ => Ok(()),
    }
}

/// Optimizes one grid point from each configured start except `previous`
/// and evaluates all metrics.
pub fn run_point(cfg: &SweepConfig, point: &SweepPoint) -> Result<SweepRecord, HarnessError> {
    check_point(point)?;
    let ctx = Context::new(cfg.instance.load()?, &cfg.temperatures)?;
    optimize_point(&ctx, cfg, point, None)
}

/// One Powell run per applicable start; the lowest objective wins, with
/// ties going to the earlier start. Evaluations are summed and all runs
/// share the point's time budget.
fn optimize_point(
    ctx: &Context,
    cfg: &SweepConfig,
    point: &SweepPoint,
    previous: Option<(usize, &[f64])>,
) -> Result<SweepRecord, HarnessError> {
    let clock = Instant::now();
    let budget = Duration::from_secs_f64(cfg.budget_s);
    let kind = point.method.cost_kind(point.temperature)?;
    let objective = Objective::new(&ctx.inst, kind, point.scheme, point.p)?;
    let mut opts = cfg.qaoa_options(point.scheme);

    let mut best: Option<(Start, QaoaOutcome)> = None;
    let mut total_evals = 0;
    for &start in &cfg.starts {
        let x0 = match (start, previous) {
            (Start::Tqa, _) => point.scheme.initial_params(point.p, cfg.dt)?,
            (Start::Reflected, _) => point.scheme.reflected_params(point.p, cfg.dt)?,
            (Start::Previous, Some((from_p, params))) => point.scheme.resample(params, from_p, point.p)?,
            (Start::Previous, None) => continue,
        };
        let remaining = budget.saturating_sub(clock.elapsed());
        if best.is_some() && remaining.is_zero() {
            break;
        }
        opts.powell.time_budget = Some(remaining);
        let run = optimize_from(&objective, &x0, &opts)?;
        total_evals += run.result.n_evaluations;
        if best
            .as_ref()
            .map_or(true, |(_, b)| run.result.best_value < b.result.best_value)
        {
            best = Some((start, run));
        }
    }
    let (start, mut outcome) =
        best.ok_or_else(|| HarnessError::Config("no applicable starting point".into()))?;
    outcome.result.n_evaluations = total_evals;
    ctx.record(*point, start, &outcome, clock.elapsed(), cfg.record_timing)
}

#[derive(Debug, Clone, Copy)]
struct Series {
    method: Method,
    scheme: Scheme,
    temperature: Option<f64>,
}

fn series_of(cfg: &SweepConfig) -> Vec<Series> {
    let mut out = Vec::new();
    for &method in &cfg.methods {
        for &scheme in &cfg.schemes {
            match method {
                Method::Qaoa => out.push(Series {
                    method,
                    scheme,
                    temperature: None,
                }),
                Method::Sbo => out.extend(cfg.temperatures.iter().map(|&t| Series {
                    method,
                    scheme,
                    temperature: Some(t),
                })),
            }
        }
    }
    out
}

/// All grid points of `cfg` in canonical order.
pub fn grid_points(cfg: &SweepConfig) -> Vec<SweepPoint> {
    let mut points: Vec<SweepPoint> = series_of(cfg)
        .into_iter()
        .flat_map(|s| {
            cfg.depths.iter().map(move |&p| SweepPoint {
                method: s.method,
                scheme: s.scheme,
                p,
                temperature: s.temperature,
            })
        })
        .collect();
    points.sort_by(SweepPoint::sort_key);
    points.dedup();
    points
}

fn run_series(ctx: &Context, cfg: &SweepConfig, series: Series) -> Vec<Result<SweepRecord, PointFailure>> {
    let mut previous: Option<(usize, Vec<f64>)> = None;
    let mut out = Vec::with_capacity(cfg.depths.len());
    for &p in &cfg.depths {
        let point = SweepPoint {
            method: series.method,
            scheme: series.scheme,
            p,
            temperature: series.temperature,
        };
        let warm = previous.as_ref().map(|(q, x)| (*q, x.as_slice()));
        match optimize_point(ctx, cfg, &point, warm) {
            Ok(rec) => {
                previous = Some((p, rec.params.clone()));
                out.push(Ok(rec));
            }
            Err(e) => out.push(Err(PointFailure {
                point,
                message: e.to_string(),
            })),
        }
    }
    out
}

/// Evaluates every grid point. Each (method, scheme, T) series walks its
/// depths in increasing order; series run concurrently.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable, HarnessError> {
    cfg.validate()?;
    let ctx = Context::new(cfg.instance.load()?, &cfg.temperatures)?;
    let series = series_of(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.effective_threads())
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        series
            .par_iter()
            .flat_map_iter(|&s| run_series(&ctx, cfg, s))
            .collect()
    });

    let mut table = SweepTable::default();
    for r in results {
        match r {
            Ok(rec) => table.records.push(rec),
            Err(f) => table.failures.push(f),
        }
    }
    table.records.sort_by(|a, b| a.point().sort_key(&b.point()));
    table.failures.sort_by(|a, b| a.point.sort_key(&b.point));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(methods: Vec<Method>, schemes: Vec<Scheme>) -> SweepConfig {
        SweepConfig {
            methods,
            schemes,
            depths: vec![1, 2],
            temperatures: vec![1.0],
            threads: Some(1),
            record_timing: false,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn default_grid_size() {
        assert_eq!(grid_points(&SweepConfig::default()).len(), 96);
    }

    #[test]
    fn canonical_order() {
        let pts = grid_points(&SweepConfig::default());
        assert!(pts.windows(2).all(|w| w[0].sort_key(&w[1]) == Ordering::Less));
        assert_eq!(pts[0].method, Method::Qaoa);
        assert_eq!(pts[0].temperature, None);
        assert_eq!(pts.last().unwrap().temperature, Some(2.0));
    }

    #[test]
    fn empty_methods() {
        let cfg = small(vec![], vec![Scheme::Full]);
        assert!(matches!(run_sweep(&cfg), Err(HarnessError::EmptyGrid(_))));
    }

    #[test]
    fn single_point_and_series() {
        let mut cfg = small(vec![Method::Sbo], vec![Scheme::Linearized]);
        cfg.depths = vec![1];
        let table = run_sweep(&cfg).unwrap();
        assert_eq!(table.records.len(), 1);
        assert!(table.failures.is_empty());

        let cfg = small(vec![Method::Qaoa, Method::Sbo], vec![Scheme::Linearized]);
        let recs = run_sweep(&cfg).unwrap().into_result().unwrap();
        assert_eq!(recs.len(), 4);
        for r in &recs {
            let sum: f64 = r.orbit_probs.iter().sum();
            assert!((sum - r.p_gs).abs() <= 1e-12);
            assert_eq!(r.tvd.is_some(), r.method == Method::Sbo);
            assert_eq!(r.tvd_by_temperature.len(), 1);
        }
    }

    #[test]
    fn point_validation() {
        let cfg = SweepConfig::default();
        let bad = SweepPoint {
            method: Method::Sbo,
            scheme: Scheme::Full,
            p: 1,
            temperature: None,
        };
        assert!(run_point(&cfg, &bad).is_err());
        let bad = SweepPoint { p: 0, temperature: Some(1.0), ..bad };
        assert!(run_point(&cfg, &bad).is_err());
    }
}
