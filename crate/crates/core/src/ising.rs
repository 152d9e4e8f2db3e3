//! Classical Ising instances and exhaustive spectrum utilities.
//!
//! Spins are indexed from 0 in the API and from 1 in the instance file
//! format. A computational basis index stores spin `i` in bit `i` (spin 0 is
//! the lowest bit); a set bit is spin up (`+1`), a clear bit is spin down.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::IsingError;

/// Largest spin count accepted for exhaustive enumeration and dense matrices.
pub const DEFAULT_MAX_SPINS: usize = 20;

/// Degeneracy tolerance for instances with non-integer couplings or fields.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

/// A classical Ising model `H_0 = -Σ J_ij s_i s_j - Σ h_i s_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingInstance {
    n: usize,
    couplings: BTreeMap<(usize, usize), f64>,
    fields: Vec<f64>,
}

impl IsingInstance {
    /// Creates an instance with `n` spins and no interactions.
    pub fn new(n: usize) -> Result<Self, IsingError> {
        Self::with_max_spins(n, DEFAULT_MAX_SPINS)
    }

    pub fn with_max_spins(n: usize, max_spins: usize) -> Result<Self, IsingError> {
        if n == 0 {
            return Err(IsingError::NoSpins);
        }
        if n > max_spins {
            return Err(IsingError::TooManySpins { n, max: max_spins });
        }
        Ok(Self {
            n,
            couplings: BTreeMap::new(),
            fields: vec![0.0; n],
        })
    }

    /// Sets `J_ij` for the unordered pair `(i, j)`, 0-based.
    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<(), IsingError> {
        let key = self.pair_key(i, j)?;
        if !value.is_finite() {
            return Err(IsingError::NonFinite);
        }
        self.couplings.insert(key, value);
        Ok(())
    }

    pub fn set_field(&mut self, i: usize, value: f64) -> Result<(), IsingError> {
        if i >= self.n {
            return Err(IsingError::SpinOutOfRange { index: i, n: self.n });
        }
        if !value.is_finite() {
            return Err(IsingError::NonFinite);
        }
        self.fields[i] = value;
        Ok(())
    }

    fn pair_key(&self, i: usize, j: usize) -> Result<(usize, usize), IsingError> {
        if i == j {
            return Err(IsingError::SelfCoupling { index: i });
        }
        for index in [i, j] {
            if index >= self.n {
                return Err(IsingError::SpinOutOfRange { index, n: self.n });
            }
        }
        Ok((i.min(j), i.max(j)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert-space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Nonzero and explicitly set couplings keyed by `(i, j)` with `i < j`.
    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn has_zero_fields(&self) -> bool {
        self.fields.iter().all(|&h| h == 0.0)
    }

    /// True when every coupling and field is an integer small enough for
    /// exact `i64` energy arithmetic.
    pub fn is_integral(&self) -> bool {
        let ok = |v: f64| v.fract() == 0.0 && v.abs() < 1e12;
        self.couplings.values().all(|&v| ok(v)) && self.fields.iter().all(|&v| ok(v))
    }

    /// Per-spin neighbor lists `(j, J_ij)`.
    pub fn neighbors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.n];
        for (&(i, j), &v) in &self.couplings {
            out[i].push((j, v));
            out[j].push((i, v));
        }
        out
    }

    /// Parses the line-oriented instance format.
    pub fn parse(text: &str) -> Result<Self, IsingError> {
        parse_instance(text)
    }

    /// Canonical rendering: `n`, sorted `j` lines, then nonzero `h` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.n);
        for (&(i, j), &v) in &self.couplings {
            let _ = writeln!(out, "j {} {} {}", i + 1, j + 1, fmt_real(v));
        }
        for (i, &h) in self.fields.iter().enumerate() {
            if h != 0.0 {
                let _ = writeln!(out, "h {} {}", i + 1, fmt_real(h));
            }
        }
        out
    }

    /// Classical energy of every basis state, in basis order.
    pub fn energy_table(&self) -> Vec<f64> {
        if self.is_integral() {
            let couplings: Vec<(usize, usize, i64)> = self
                .couplings
                .iter()
                .map(|(&(i, j), &v)| (i, j, v as i64))
                .collect();
            let fields: Vec<i64> = self.fields.iter().map(|&h| h as i64).collect();
            (0..self.dim())
                .map(|idx| {
                    let s = |i: usize| if idx >> i & 1 == 1 { 1i64 } else { -1 };
                    let mut e = 0i64;
                    for &(i, j, v) in &couplings {
                        e -= v * s(i) * s(j);
                    }
                    for (i, &h) in fields.iter().enumerate() {
                        e -= h * s(i);
                    }
                    e as f64
                })
                .collect()
        } else {
            (0..self.dim())
                .map(|idx| classical_energy(self, SpinConfig(idx)))
                .collect()
        }
    }
}

// Shortest representation that parses back to the same f64.
fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

/// A computational basis state; bit `i` set means spin `i` is up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinConfig(pub usize);

impl SpinConfig {
    pub fn index(self) -> usize {
        self.0
    }

    /// Spin eigenvalue `+1` or `-1` of spin `i`.
    pub fn spin(self, i: usize) -> f64 {
        if self.0 >> i & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Global spin flip `σ -> -σ` on `n` spins.
    pub fn flipped(self, n: usize) -> Self {
        SpinConfig(!self.0 & ((1usize << n) - 1))
    }

    pub fn all_up(n: usize) -> Self {
        SpinConfig((1usize << n) - 1)
    }

    /// Ket label `σ_1 σ_2 … σ_n` using `u`/`d`, spin 1 first.
    pub fn ket(self, n: usize) -> String {
        (0..n)
            .map(|i| if self.0 >> i & 1 == 1 { 'u' } else { 'd' })
            .collect()
    }

    /// Inverse of [`SpinConfig::ket`]; accepts `u`/`d` or `↑`/`↓`.
    pub fn from_ket(ket: &str) -> Option<Self> {
        let mut idx = 0usize;
        for (i, c) in ket.chars().enumerate() {
            match c {
                'u' | 'U' | '↑' => idx |= 1 << i,
                'd' | 'D' | '↓' => {}
                _ => return None,
            }
        }
        Some(SpinConfig(idx))
    }

    /// Sort key equal to the ket string ordered with `d < u`.
    fn ket_order(self, n: usize) -> usize {
        (0..n).fold(0, |acc, i| (acc << 1) | (self.0 >> i & 1))
    }
}

/// Evaluates `H_0(σ) = ⟨σ|H_0|σ⟩`.
pub fn classical_energy(inst: &IsingInstance, sigma: SpinConfig) -> f64 {
    let mut e = 0.0;
    for (&(i, j), &v) in &inst.couplings {
        e -= v * sigma.spin(i) * sigma.spin(j);
    }
    for (i, &h) in inst.fields.iter().enumerate() {
        e -= h * sigma.spin(i);
    }
    e
}

/// The minimum-energy manifold of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSet {
    pub n: usize,
    pub e0: f64,
    /// Sorted by basis index.
    pub states: Vec<SpinConfig>,
    /// Global-flip orbits, present only when all fields vanish. Each orbit
    /// lists its spin-1-up member first; orbits are ordered by that member's
    /// ket string with `d < u` (for the toy model: all-aligned, `uuudd`,
    /// `uuddd`).
    pub orbits: Option<Vec<Vec<SpinConfig>>>,
}

impl GroundSet {
    pub fn contains(&self, sigma: SpinConfig) -> bool {
        self.states.binary_search(&sigma).is_ok()
    }

    pub fn degeneracy(&self) -> usize {
        self.states.len()
    }
}

/// Exhaustive search of all `2^n` configurations.
pub fn ground_set(inst: &IsingInstance) -> Result<GroundSet, IsingError> {
    if inst.n > DEFAULT_MAX_SPINS {
        return Err(IsingError::TooManySpins {
            n: inst.n,
            max: DEFAULT_MAX_SPINS,
        });
    }
    let energies = inst.energy_table();
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = if inst.is_integral() { 0.0 } else { ENERGY_TOLERANCE };
    let states: Vec<SpinConfig> = energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e - e0 <= tol)
        .map(|(idx, _)| SpinConfig(idx))
        .collect();
    let orbits = inst.has_zero_fields().then(|| flip_orbits(&states, inst.n));
    Ok(GroundSet {
        n: inst.n,
        e0,
        states,
        orbits,
    })
}

fn flip_orbits(states: &[SpinConfig], n: usize) -> Vec<Vec<SpinConfig>> {
    let mut orbits: Vec<Vec<SpinConfig>> = states
        .iter()
        .filter(|s| s.0 & 1 == 1)
        .map(|&s| {
            let f = s.flipped(n);
            if f == s {
                vec![s]
            } else {
                vec![s, f]
            }
        })
        .collect();
    orbits.sort_by_key(|o| o[0].ket_order(n).min(o.last().unwrap().ket_order(n)));
    orbits
}

/// A probability distribution over basis states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    pub fn uniform(dim: usize) -> Self {
        Self::new(vec![1.0 / dim as f64; dim])
    }

    pub fn one_hot(dim: usize, sigma: SpinConfig) -> Self {
        let mut probs = vec![0.0; dim];
        probs[sigma.0] = 1.0;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, sigma: SpinConfig) -> f64 {
        self.probs[sigma.0]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Gibbs distribution together with its partition function.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsDistribution {
    pub temperature: f64,
    pub distribution: Distribution,
    /// `ln Z(T)`; `Z` itself overflows at low temperature.
    pub log_partition: f64,
}

impl GibbsDistribution {
    pub fn partition_function(&self) -> f64 {
        self.log_partition.exp()
    }

    /// Amplitudes `sqrt(P_Gibbs(σ))` of the coherent Gibbs state.
    pub fn sqrt_amplitudes(&self) -> Vec<f64> {
        self.distribution.probs().iter().map(|p| p.sqrt()).collect()
    }
}

/// `P(σ) ∝ exp(-H_0(σ)/T)` with `k_B = 1`, weights shifted by `E_0`.
pub fn gibbs_distribution(
    inst: &IsingInstance,
    temperature: f64,
) -> Result<GibbsDistribution, IsingError> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(IsingError::BadTemperature(temperature));
    }
    let energies = inst.energy_table();
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies
        .iter()
        .map(|&e| (-(e - e0) / temperature).exp())
        .collect();
    let shifted_z: f64 = weights.iter().sum();
    let probs = weights.into_iter().map(|w| w / shifted_z).collect();
    Ok(GibbsDistribution {
        temperature,
        distribution: Distribution::new(probs),
        log_partition: -e0 / temperature + shifted_z.ln(),
    })
}

/// Five-spin frustrated model with a six-fold degenerate ground manifold at
/// `E_0 = -4`. Ferromagnetic bonds (`+1`): 1-2, 1-3, 2-3, 3-4, 3-5, 4-5;
/// antiferromagnetic (`-1`): 1-5, 2-4 (1-based labels). All fields zero.
pub fn toy_instance() -> IsingInstance {
    let mut inst = IsingInstance::new(5).expect("5 spins");
    let bonds: [(usize, usize, f64); 8] = [
        (1, 2, 1.0),
        (1, 3, 1.0),
        (2, 3, 1.0),
        (3, 4, 1.0),
        (3, 5, 1.0),
        (4, 5, 1.0),
        (1, 5, -1.0),
        (2, 4, -1.0),
    ];
    for (i, j, v) in bonds {
        inst.set_coupling(i - 1, j - 1, v).expect("valid bond");
    }
    inst
}

/// The toy model's ground states grouped as in the published pairs:
/// `{uuuuu, ddddd}`, `{uuudd, ddduu}`, `{uuddd, dduuu}`.
pub fn toy_state_pairs() -> [[SpinConfig; 2]; 3] {
    let k = |s: &str| SpinConfig::from_ket(s).expect("ket");
    [
        [k("uuuuu"), k("ddddd")],
        [k("uuudd"), k("ddduu")],
        [k("uuddd"), k("dduuu")],
    ]
}

/// Parses the instance file format.
///
/// ```text
/// # comment
/// n 5
/// j 1 2 1.0
/// h 3 -0.5
/// ```
pub fn parse_instance(text: &str) -> Result<IsingInstance, IsingError> {
    let mut inst: Option<IsingInstance> = None;
    let mut seen_fields: Vec<bool> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| IsingError::Parse { line: line_no, msg };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let int = |tok: &str| {
            tok.parse::<usize>()
                .map_err(|_| err(format!("expected integer, found `{tok}`")))
        };
        let real = |tok: &str| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("expected finite real, found `{tok}`")))
        };
        match (tokens[0], inst.as_mut()) {
            ("n", None) => {
                if tokens.len() != 2 {
                    return Err(err("expected `n <int>`".into()));
                }
                let n = int(tokens[1])?;
                inst = Some(IsingInstance::new(n).map_err(|e| err(e.to_string()))?);
                seen_fields = vec![false; n];
            }
            ("n", Some(_)) => return Err(err("duplicate `n` line".into())),
            (_, None) => return Err(err("first directive must be `n <int>`".into())),
            ("j", Some(inst)) => {
                if tokens.len() != 4 {
                    return Err(err("expected `j <i> <j> <real>`".into()));
                }
                let (i, j, v) = (int(tokens[1])?, int(tokens[2])?, real(tokens[3])?);
                if i == j {
                    return Err(err(format!("self-coupling on spin {i}")));
                }
                if i >= j {
                    return Err(err(format!("pair must satisfy i < j, got ({i}, {j})")));
                }
                if i == 0 || j > inst.n() {
                    return Err(err(format!("pair ({i}, {j}) out of range 1..={}", inst.n())));
                }
                if inst.couplings.contains_key(&(i - 1, j - 1)) {
                    return Err(err(format!("duplicate pair ({i}, {j})")));
                }
                inst.set_coupling(i - 1, j - 1, v)
                    .map_err(|e| err(e.to_string()))?;
            }
            ("h", Some(inst)) => {
                if tokens.len() != 3 {
                    return Err(err("expected `h <i> <real>`".into()));
                }
                let (i, v) = (int(tokens[1])?, real(tokens[2])?);
                if i == 0 || i > inst.n() {
                    return Err(err(format!("spin {i} out of range 1..={}", inst.n())));
                }
                if seen_fields[i - 1] {
                    return Err(err(format!("duplicate field for spin {i}")));
                }
                seen_fields[i - 1] = true;
                inst.set_field(i - 1, v).map_err(|e| err(e.to_string()))?;
            }
            (other, Some(_)) => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    inst.ok_or(IsingError::Parse {
        line: 0,
        msg: "missing `n <int>` line".into(),
    })
}
