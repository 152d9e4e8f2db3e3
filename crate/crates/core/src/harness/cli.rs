use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{InstanceSource, Method, Start, SweepConfig};
use super::output::{emit_csv, emit_fig_data, emit_json, fmt_sig, to_csv, Figure};
use super::sweep::{partial_failure, run_point, run_sweep, SweepPoint};
use crate::error::HarnessError;
use crate::ising::{gibbs_distribution, ground_set, toy_instance, toy_state_pairs, IsingInstance};
use crate::metrics::{ground_state_probability, orbit_probabilities};
use crate::operators::{build_sbo, eigh, residual_norm, Hamiltonian};
use crate::variational::Scheme;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

/// Residual and eigenvalue tolerance of the `oracle` subcommand.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "gibbs-qaoa", version, about = "QAOA and Gibbs-targeting SBO-QAOA on small Ising models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize a single grid point and print its record.
    Run(RunArgs),
    /// Sweep a grid of points and write the result tables.
    Sweep(SweepArgs),
    /// Brute-force ground-set report.
    VerifyInstance(InstanceArgs),
    /// Partition function and ground-state weight of the Gibbs distribution.
    Gibbs(TemperatureArgs),
    /// Check that the Gibbs state is the zero-energy ground state of H_S(T).
    Oracle(TemperatureArgs),
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// Use the built-in five-spin instance.
    #[arg(long, conflicts_with = "instance")]
    toy: bool,
    /// Instance file.
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
}

impl InstanceArgs {
    fn source(&self) -> InstanceSource {
        match &self.instance {
            Some(p) => InstanceSource::File(p.clone()),
            None => InstanceSource::Toy,
        }
    }
}

#[derive(Debug, Args)]
struct TemperatureArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Temperatures; defaults to 0.5, 1 and 2.
    #[arg(short = 'T', long = "temperature", value_delimiter = ',', num_args = 1..)]
    temperatures: Vec<f64>,
}

impl TemperatureArgs {
    fn temperatures(&self) -> Vec<f64> {
        if self.temperatures.is_empty() {
            super::config::DEFAULT_TEMPERATURES.to_vec()
        } else {
            self.temperatures.clone()
        }
    }
}

#[derive(Debug, Args)]
struct OptimizerArgs {
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    ftol: Option<f64>,
    #[arg(long)]
    xtol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
    /// Extra perturbed Powell runs per start, full scheme.
    #[arg(long)]
    restarts: Option<usize>,
    /// Extra perturbed Powell runs per start, linearized scheme.
    #[arg(long)]
    linearized_restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Per-point wall-clock budget in seconds.
    #[arg(long, value_name = "SECONDS")]
    budget: Option<f64>,
}

impl OptimizerArgs {
    fn apply(&self, cfg: &mut SweepConfig) {
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.ftol {
            cfg.powell.ftol = v;
        }
        if let Some(v) = self.xtol {
            cfg.powell.xtol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.powell.max_iter = v;
        }
        if let Some(v) = self.max_evals {
            cfg.powell.max_evals = v;
        }
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.linearized_restarts {
            cfg.linearized_restarts = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.budget {
            cfg.budget_s = v;
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value = "sbo")]
    method: Method,
    #[arg(long, default_value = "full")]
    scheme: Scheme,
    #[arg(short = 'p', long = "depth")]
    p: usize,
    /// Required for sbo.
    #[arg(short = 'T', long = "temperature")]
    temperature: Option<f64>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Also write the record as JSON.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Key-value config file; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    toy: bool,
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    #[arg(long, value_delimiter = ',')]
    schemes: Vec<Scheme>,
    #[arg(long, value_delimiter = ',')]
    depths: Vec<usize>,
    #[arg(short = 'T', long = "temperatures", value_delimiter = ',')]
    temperatures: Vec<f64>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Starting points tried at each point, from tqa, reflected, previous.
    #[arg(long, value_delimiter = ',')]
    starts: Vec<Start>,
    #[arg(long)]
    threads: Option<usize>,
    /// Write zero wall times so repeated sweeps are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Directory for figure data files.
    #[arg(long, value_name = "DIR")]
    fig_dir: Option<PathBuf>,
    /// Also draw SVG plots next to the figure data.
    #[arg(long)]
    svg: bool,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig, HarnessError> {
        let mut cfg = SweepConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
            cfg.apply_text(&text)?;
        }
        if self.toy {
            cfg.instance = InstanceSource::Toy;
        }
        if let Some(p) = &self.instance {
            cfg.instance = InstanceSource::File(p.clone());
        }
        if !self.methods.is_empty() {
            cfg.methods = self.methods.clone();
        }
        if !self.schemes.is_empty() {
            cfg.schemes = self.schemes.clone();
        }
        if !self.depths.is_empty() {
            cfg.depths = self.depths.clone();
        }
        if !self.temperatures.is_empty() {
            cfg.temperatures = self.temperatures.clone();
        }
        self.optimizer.apply(&mut cfg);
        if !self.starts.is_empty() {
            cfg.starts = self.starts.clone();
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        if self.no_timing {
            cfg.record_timing = false;
        }
        if self.csv.is_some() {
            cfg.csv = self.csv.clone();
        }
        if self.json.is_some() {
            cfg.json = self.json.clone();
        }
        if self.fig_dir.is_some() {
            cfg.fig_dir = self.fig_dir.clone();
        }
        cfg.svg |= self.svg;
        Ok(cfg)
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::VerifyInstance(a) => cmd_verify(&a, out),
        Command::Gibbs(a) => cmd_gibbs(&a, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                HarnessError::PartialFailure { .. } => EXIT_CHECK_FAILED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn io(e: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: "<output>".into(),
        source: e,
    }
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> Result<i32, HarnessError> {
    let mut cfg = SweepConfig {
        instance: a.instance.source(),
        ..SweepConfig::default()
    };
    a.optimizer.apply(&mut cfg);
    if let Some(t) = a.temperature {
        if !cfg.temperatures.contains(&t) {
            cfg.temperatures.push(t);
        }
    }
    cfg.validate()?;
    let point = SweepPoint {
        method: a.method,
        scheme: a.scheme,
        p: a.p,
        temperature: if a.method == Method::Sbo { a.temperature } else { None },
    };
    let rec = run_point(&cfg, &point)?;
    write!(out, "{}", to_csv(std::slice::from_ref(&rec))).map_err(io)?;
    if let Some(path) = &a.json {
        emit_json(std::slice::from_ref(&rec), path)?;
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32, HarnessError> {
    let cfg = a.config()?;
    let table = run_sweep(&cfg)?;
    let recs = &table.records;
    match &cfg.csv {
        Some(path) => emit_csv(recs, path)?,
        None => write!(out, "{}", to_csv(recs)).map_err(io)?,
    }
    if let Some(path) = &cfg.json {
        emit_json(recs, path)?;
    }
    if let Some(dir) = &cfg.fig_dir {
        for fig in [Figure::GroundState, Figure::Tvd] {
            match emit_fig_data(recs, fig, cfg.fig2_temperature, dir, cfg.svg) {
                Ok(paths) => {
                    for p in paths {
                        writeln!(out, "wrote {}", p.display()).map_err(io)?;
                    }
                }
                // a partial grid simply lacks some panels
                Err(HarnessError::MissingPanel(name)) => {
                    writeln!(out, "skipped figure: no data for {name}").map_err(io)?;
                }
                Err(e) => return Err(e),
            }
        }
    }
    if !table.failures.is_empty() {
        return Err(partial_failure(&table.failures));
    }
    Ok(EXIT_OK)
}

fn load(a: &InstanceArgs) -> Result<IsingInstance, HarnessError> {
    a.source().load()
}

fn cmd_verify(a: &InstanceArgs, out: &mut dyn Write) -> Result<i32, HarnessError> {
    let inst = load(a)?;
    let gs = ground_set(&inst)?;
    let mut w = |s: String| writeln!(out, "{s}").map_err(io);
    w(format!("spins: {}", inst.n()))?;
    w(format!("E0 = {}", fmt_sig(gs.e0)))?;
    w(format!("ground states: {}", gs.degeneracy()))?;
    match &gs.orbits {
        Some(orbits) => {
            for (k, orbit) in orbits.iter().enumerate() {
                let kets: Vec<String> = orbit.iter().map(|s| s.ket(inst.n())).collect();
                w(format!("  orbit {}: {}", k + 1, kets.join(" ")))?;
            }
        }
        None => {
            for s in &gs.states {
                w(format!("  {}", s.ket(inst.n())))?;
            }
        }
    }
    if a.instance.is_some() {
        return Ok(EXIT_OK);
    }
    let mut expected: Vec<_> = toy_state_pairs().iter().flatten().copied().collect();
    expected.sort();
    let ok = inst == toy_instance() && gs.e0 == -4.0 && gs.states == expected;
    w(format!("toy check: {}", if ok { "PASS" } else { "FAIL" }))?;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_gibbs(a: &TemperatureArgs, out: &mut dyn Write) -> Result<i32, HarnessError> {
    let inst = load(&a.instance)?;
    let gs = ground_set(&inst)?;
    for t in a.temperatures() {
        let g = gibbs_distribution(&inst, t)?;
        let d = &g.distribution;
        write!(
            out,
            "T = {}: Z = {}, ln Z = {}, P_GS = {}",
            fmt_sig(t),
            fmt_sig(g.partition_function()),
            fmt_sig(g.log_partition),
            fmt_sig(ground_state_probability(d, &gs))
        )
        .map_err(io)?;
        if let Some(orbits) = orbit_probabilities(d, &gs) {
            let cells: Vec<String> = orbits.iter().map(|&p| fmt_sig(p)).collect();
            write!(out, ", per orbit = [{}]", cells.join(", ")).map_err(io)?;
        }
        let mode = d.probs().iter().copied().fold(0.0, f64::max);
        writeln!(out, ", max P = {}", fmt_sig(mode)).map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_oracle(a: &TemperatureArgs, out: &mut dyn Write) -> Result<i32, HarnessError> {
    let inst = load(&a.instance)?;
    let mut all_ok = true;
    for t in a.temperatures() {
        let op = build_sbo(&inst, t)?;
        let g = gibbs_distribution(&inst, t)?;
        let residual = residual_norm(&op, &g.sqrt_amplitudes());
        let eig = eigh(&op.densify()?)?;
        let l0 = eig.eigenvalues[0];
        let l1 = eig.eigenvalues.get(1).copied().unwrap_or(f64::INFINITY);
        let ok = residual <= ORACLE_TOLERANCE && l0.abs() <= ORACLE_TOLERANCE && l1 > ORACLE_TOLERANCE;
        all_ok &= ok;
        writeln!(
            out,
            "T = {}: residual = {:.3e}, lambda_min = {:.3e}, lambda_2 = {:.6e}, {}",
            fmt_sig(t),
            residual,
            l0,
            l1,
            if ok { "PASS" } else { "FAIL" }
        )
        .map_err(io)?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}
