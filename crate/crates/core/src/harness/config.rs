use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::evolution::CostKind;
use crate::ising::{parse_instance, toy_instance, IsingInstance};
use crate::variational::{PowellOptions, QaoaOptions, Scheme};

/// Environment variable that overrides the sweep's worker count.
pub const THREADS_ENV: &str = "GIBBS_QAOA_THREADS";

pub const DEFAULT_DEPTHS: [usize; 12] = [1, 2, 3, 5, 7, 10, 15, 22, 32, 46, 68, 100];
pub const DEFAULT_TEMPERATURES: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_STARTS: [Start; 3] = [Start::Tqa, Start::Reflected, Start::Previous];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Classical energy as the cost.
    Qaoa,
    /// Gibbs-encoding Hamiltonian as the cost, one run per temperature.
    Sbo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Qaoa => "qaoa",
            Method::Sbo => "sbo",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qaoa" => Ok(Method::Qaoa),
            "sbo" => Ok(Method::Sbo),
            other => Err(format!("unknown method `{other}` (expected qaoa|sbo)")),
        }
    }
}

impl Method {
    pub fn cost_kind(self, temperature: Option<f64>) -> Result<CostKind, HarnessError> {
        match (self, temperature) {
            (Method::Qaoa, _) => Ok(CostKind::Classical),
            (Method::Sbo, Some(temperature)) => Ok(CostKind::Sbo { temperature }),
            (Method::Sbo, None) => Err(HarnessError::Config("sbo points need a temperature".into())),
        }
    }
}

/// Starting point of one Powell run at a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    /// The TQA schedule.
    Tqa,
    /// The TQA schedule with mixer angles negated.
    Reflected,
    /// The optimum at the previous depth of the same series, resampled.
    Previous,
}

impl fmt::Display for Start {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Start::Tqa => "tqa",
            Start::Reflected => "reflected",
            Start::Previous => "previous",
        })
    }
}

impl FromStr for Start {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tqa" => Ok(Start::Tqa),
            "reflected" => Ok(Start::Reflected),
            "previous" => Ok(Start::Previous),
            other => Err(format!("unknown start `{other}` (expected tqa|reflected|previous)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceSource {
    Toy,
    File(PathBuf),
}

impl InstanceSource {
    pub fn load(&self) -> Result<IsingInstance, HarnessError> {
        match self {
            InstanceSource::Toy => Ok(toy_instance()),
            InstanceSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                Ok(parse_instance(&text)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub instance: InstanceSource,
    pub methods: Vec<Method>,
    pub schemes: Vec<Scheme>,
    pub depths: Vec<usize>,
    pub temperatures: Vec<f64>,
    pub dt: f64,
    pub powell: PowellOptions,
    /// Extra perturbed runs per start for the full scheme.
    pub restarts: usize,
    /// Extra perturbed runs per start for the linearized scheme, whose
    /// four-parameter runs are cheap.
    pub linearized_restarts: usize,
    pub restart_spread: f64,
    pub seed: u64,
    /// Per-point wall-clock budget in seconds.
    pub budget_s: f64,
    /// Starting points tried at every grid point; the lowest objective wins.
    /// `Previous` only applies inside a sweep series past its first depth.
    pub starts: Vec<Start>,
    pub threads: Option<usize>,
    /// Write measured wall times; when false the column is zero, so
    /// identical configs give byte-identical output.
    pub record_timing: bool,
    /// Temperature of the SBO panels in the ground-state figure.
    pub fig2_temperature: f64,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub fig_dir: Option<PathBuf>,
    pub svg: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            instance: InstanceSource::Toy,
            methods: vec![Method::Qaoa, Method::Sbo],
            schemes: vec![Scheme::Full, Scheme::Linearized],
            depths: DEFAULT_DEPTHS.to_vec(),
            temperatures: DEFAULT_TEMPERATURES.to_vec(),
            dt: 1.0,
            powell: PowellOptions::default(),
            restarts: 0,
            linearized_restarts: 6,
            restart_spread: QaoaOptions::default().restart_spread,
            seed: 0,
            budget_s: 300.0,
            starts: DEFAULT_STARTS.to_vec(),
            threads: None,
            record_timing: true,
            fig2_temperature: 1.0,
            csv: None,
            json: None,
            fig_dir: None,
            svg: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.methods.is_empty() {
            return Err(HarnessError::EmptyGrid("no methods selected"));
        }
        if self.schemes.is_empty() {
            return Err(HarnessError::EmptyGrid("no schemes selected"));
        }
        if self.starts.is_empty() {
            return Err(HarnessError::EmptyGrid("no starting points selected"));
        }
        if self.depths.is_empty() {
            return Err(HarnessError::EmptyGrid("no depths selected"));
        }
        if self.depths[0] == 0 {
            return bad("depths must be at least 1".into());
        }
        if self.depths.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("depths must be strictly increasing: {:?}", self.depths));
        }
        if self.temperatures.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return bad(format!("temperatures must be positive: {:?}", self.temperatures));
        }
        if self.methods.contains(&Method::Sbo) && self.temperatures.is_empty() {
            return Err(HarnessError::EmptyGrid("sbo selected without temperatures"));
        }
        if !(self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.budget_s > 0.0) {
            return bad(format!("budget must be positive, got {}", self.budget_s));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn qaoa_options(&self, scheme: Scheme) -> QaoaOptions {
        QaoaOptions {
            dt: self.dt,
            powell: PowellOptions {
                time_budget: Some(Duration::from_secs_f64(self.budget_s)),
                ..self.powell
            },
            restarts: match scheme {
                Scheme::Full => self.restarts,
                Scheme::Linearized => self.linearized_restarts,
            },
            restart_spread: self.restart_spread,
            seed: self.seed,
        }
    }

    /// Worker count: the environment variable, then the config, then all cores.
    pub fn effective_threads(&self) -> usize {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .or(self.threads)
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            })
    }

    /// Applies `key value` lines; `#` comments and blank lines are skipped.
    ///
    /// ```text
    /// instance toy
    /// methods sbo
    /// depths 1,10,100
    /// temperatures 1.0
    /// ```
    pub fn apply_text(&mut self, text: &str) -> Result<(), HarnessError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(char::is_whitespace)
                .map(|(k, v)| (k, v.trim()))
                .unwrap_or((line, ""));
            self.set(key, value)
                .map_err(|msg| HarnessError::Config(format!("line {}: {msg}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn one<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("invalid value `{v}` for `{key}`"))
        }
        fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, String> {
            v.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| one(key, s))
                .collect()
        }
        fn flag(key: &str, v: &str) -> Result<bool, String> {
            match v {
                "true" | "yes" | "1" | "" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(format!("invalid boolean `{v}` for `{key}`")),
            }
        }
        let path = |v: &str| Some(PathBuf::from(v));
        match key {
            "instance" => {
                self.instance = match value {
                    "toy" => InstanceSource::Toy,
                    "" => return Err("`instance` needs a value".into()),
                    p => InstanceSource::File(PathBuf::from(p)),
                }
            }
            "methods" => self.methods = list(key, value)?,
            "schemes" => self.schemes = list(key, value)?,
            "depths" => self.depths = list(key, value)?,
            "temperatures" => self.temperatures = list(key, value)?,
            "dt" => self.dt = one(key, value)?,
            "ftol" => self.powell.ftol = one(key, value)?,
            "xtol" => self.powell.xtol = one(key, value)?,
            "max_iter" => self.powell.max_iter = one(key, value)?,
            "max_evals" => self.powell.max_evals = one(key, value)?,
            "initial_step" => self.powell.initial_step = one(key, value)?,
            "restarts" => self.restarts = one(key, value)?,
            "linearized_restarts" => self.linearized_restarts = one(key, value)?,
            "restart_spread" => self.restart_spread = one(key, value)?,
            "seed" => self.seed = one(key, value)?,
            "budget_s" => self.budget_s = one(key, value)?,
            "starts" => self.starts = list(key, value)?,
            "threads" => self.threads = Some(one(key, value)?),
            "timing" => self.record_timing = flag(key, value)?,
            "fig2_temperature" => self.fig2_temperature = one(key, value)?,
            "csv" => self.csv = path(value),
            "json" => self.json = path(value),
            "fig_dir" => self.fig_dir = path(value),
            "svg" => self.svg = flag(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_text() {
        let cfg = SweepConfig::from_text(
            "# demo\nmethods sbo\nschemes linearized\ndepths 1, 5 ,10\ntemperatures 0.5 2\nstarts tqa previous\nmax_evals 500\n",
        )
        .unwrap();
        assert_eq!(cfg.methods, vec![Method::Sbo]);
        assert_eq!(cfg.schemes, vec![Scheme::Linearized]);
        assert_eq!(cfg.depths, vec![1, 5, 10]);
        assert_eq!(cfg.temperatures, vec![0.5, 2.0]);
        assert_eq!(cfg.starts, vec![Start::Tqa, Start::Previous]);
        assert_eq!(cfg.powell.max_evals, 500);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_config() {
        assert!(SweepConfig::from_text("colour blue").is_err());
        assert!(SweepConfig::from_text("depths 1,x").is_err());
        let mut cfg = SweepConfig::default();
        cfg.depths = vec![3, 2];
        assert!(cfg.validate().is_err());
        cfg.depths = vec![1];
        cfg.methods.clear();
        assert!(matches!(cfg.validate(), Err(HarnessError::EmptyGrid(_))));
        let mut cfg = SweepConfig::default();
        cfg.temperatures = vec![0.0];
        assert!(cfg.validate().is_err());
    }
}
