//! State vectors and exact application of the alternating QAOA circuit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::OperatorError;
use crate::ising::{Distribution, IsingInstance, SpinConfig};
use crate::operators::{
    build_sbo, eigh, expectation, DiagonalOperator, EigenDecomposition, Hamiltonian, SboOperator,
};
use crate::variational::AngleSchedule;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex amplitudes over the `2^n` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amps(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::from_amps(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Self {
        plus_state(n)
    }

    pub fn basis(dim: usize, sigma: SpinConfig) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[sigma.index()] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Distribution {
        probabilities(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

pub fn plus_state(n: usize) -> StateVector {
    let dim = 1usize << n;
    let a = (dim as f64).sqrt().recip();
    StateVector {
        amps: vec![Complex64::new(a, 0.0); dim],
    }
}

/// `P(σ) = |⟨σ|ψ⟩|²`.
pub fn probabilities(psi: &StateVector) -> Distribution {
    Distribution::new(psi.amps.iter().map(|a| a.norm_sqr()).collect())
}

fn check_dim(expected: usize, found: usize) -> Result<(), OperatorError> {
    if expected != found {
        return Err(OperatorError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `ψ <- exp(-iγ D) ψ` for diagonal `D`.
pub fn apply_diagonal_phase(
    psi: &mut StateVector,
    d: &DiagonalOperator,
    gamma: f64,
) -> Result<(), OperatorError> {
    check_dim(d.dim(), psi.dim())?;
    for (a, &e) in psi.amps.iter_mut().zip(d.diag()) {
        *a *= Complex64::from_polar(1.0, -gamma * e);
    }
    Ok(())
}

/// `ψ <- exp(-iβ Σ σ_i^x) ψ`, one 2x2 rotation per spin.
pub fn apply_mixer(psi: &mut StateVector, beta: f64) {
    let (sin, cos) = beta.sin_cos();
    let isin = Complex64::new(0.0, sin);
    let dim = psi.dim();
    let mut bit = 1;
    while bit < dim {
        for idx in 0..dim {
            if idx & bit == 0 {
                let a = psi.amps[idx];
                let b = psi.amps[idx | bit];
                psi.amps[idx] = a * cos - b * isin;
                psi.amps[idx | bit] = b * cos - a * isin;
            }
        }
        bit <<= 1;
    }
}

/// `ψ <- V exp(-iγΛ) Vᵀ ψ` using a precomputed eigendecomposition.
pub fn apply_sbo_phase(
    psi: &mut StateVector,
    eig: &EigenDecomposition,
    gamma: f64,
) -> Result<(), OperatorError> {
    check_dim(eig.dim(), psi.dim())?;
    let mut scratch = vec![ZERO; eig.dim()];
    spectral_phase(psi, eig, gamma, &mut scratch);
    Ok(())
}

fn spectral_phase(
    psi: &mut StateVector,
    eig: &EigenDecomposition,
    gamma: f64,
    coeffs: &mut [Complex64],
) {
    let v = &eig.eigenvectors;
    coeffs.fill(ZERO);
    for (i, &a) in psi.amps.iter().enumerate() {
        for (c, &vik) in coeffs.iter_mut().zip(v.row(i)) {
            *c += a * vik;
        }
    }
    for (c, &lambda) in coeffs.iter_mut().zip(&eig.eigenvalues) {
        *c *= Complex64::from_polar(1.0, -gamma * lambda);
    }
    for (i, a) in psi.amps.iter_mut().enumerate() {
        *a = v
            .row(i)
            .iter()
            .zip(coeffs.iter())
            .fold(ZERO, |acc, (&vik, &c)| acc + c * vik);
    }
}

/// Which operator the cost phase and the objective use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CostKind {
    /// `H_C = H_0`.
    Classical,
    /// `H_C = H_S(T)`.
    Sbo { temperature: f64 },
}

impl CostKind {
    pub fn temperature(&self) -> Option<f64> {
        match *self {
            CostKind::Classical => None,
            CostKind::Sbo { temperature } => Some(temperature),
        }
    }
}

#[derive(Debug, Clone)]
enum CostPhase {
    Diagonal(DiagonalOperator),
    Spectral {
        op: SboOperator,
        eig: EigenDecomposition,
    },
}

/// A cost operator with its propagator prepared once for repeated circuit runs.
#[derive(Debug, Clone)]
pub struct Circuit {
    n: usize,
    kind: CostKind,
    phase: CostPhase,
}

impl Circuit {
    pub fn new(inst: &IsingInstance, kind: CostKind) -> Result<Self, OperatorError> {
        let phase = match kind {
            CostKind::Classical => CostPhase::Diagonal(DiagonalOperator::classical(inst)),
            CostKind::Sbo { temperature } => {
                let op = build_sbo(inst, temperature)?;
                let eig = eigh(&op.densify()?)?;
                CostPhase::Spectral { op, eig }
            }
        };
        Ok(Self {
            n: inst.n(),
            kind,
            phase,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn cost_operator(&self) -> &dyn Hamiltonian {
        match &self.phase {
            CostPhase::Diagonal(d) => d,
            CostPhase::Spectral { op, .. } => op,
        }
    }

    /// Cached eigendecomposition of `H_S(T)`; `None` for classical cost.
    pub fn spectrum(&self) -> Option<&EigenDecomposition> {
        match &self.phase {
            CostPhase::Diagonal(_) => None,
            CostPhase::Spectral { eig, .. } => Some(eig),
        }
    }

    /// `|ψ_p⟩` starting from `|+⟩^{⊗n}`.
    pub fn run(&self, angles: &AngleSchedule) -> StateVector {
        let mut psi = plus_state(self.n);
        self.run_from(&mut psi, angles);
        psi
    }

    /// Applies layers `k = 1..p`, each the cost phase `γ_k` followed by the
    /// mixer `β_k`.
    pub fn run_from(&self, psi: &mut StateVector, angles: &AngleSchedule) {
        assert_eq!(psi.dim(), 1 << self.n, "state dimension");
        let mut scratch = vec![ZERO; psi.dim()];
        for (&gamma, &beta) in angles.gamma().iter().zip(angles.beta()) {
            match &self.phase {
                CostPhase::Diagonal(d) => {
                    apply_diagonal_phase(psi, d, gamma).expect("dimension checked")
                }
                CostPhase::Spectral { eig, .. } => spectral_phase(psi, eig, gamma, &mut scratch),
            }
            apply_mixer(psi, beta);
        }
    }

    pub fn cost_expectation(&self, psi: &StateVector) -> f64 {
        expectation(self.cost_operator(), psi).expect("dimension checked")
    }
}

/// One-shot convenience wrapper around [`Circuit`].
pub fn run_circuit(
    inst: &IsingInstance,
    kind: CostKind,
    angles: &AngleSchedule,
) -> Result<StateVector, OperatorError> {
    Ok(Circuit::new(inst, kind)?.run(angles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{gibbs_distribution, toy_instance};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn plus_states() {
        let p1 = plus_state(1);
        assert!(p1.amps().iter().all(|a| (a.re - FRAC_1_SQRT_2).abs() < 1e-15 && a.im == 0.0));
        let p5 = plus_state(5);
        assert!(p5
            .probabilities()
            .probs()
            .iter()
            .all(|&p| (p - 1.0 / 32.0).abs() < 1e-16));
    }

    #[test]
    fn diagonal_phase_cases() {
        let h0 = DiagonalOperator::classical(&toy_instance());
        let mut psi = plus_state(5);
        apply_diagonal_phase(&mut psi, &h0, 0.0).unwrap();
        assert_eq!(psi, plus_state(5));

        let mut basis = StateVector::basis(32, SpinConfig(9));
        apply_diagonal_phase(&mut basis, &h0, 0.77).unwrap();
        assert!((basis.probabilities().get(SpinConfig(9)) - 1.0).abs() < 1e-15);

        // toy energies are all even, so e^{-iπE} = +1 everywhere; use an odd shift
        let shifted = DiagonalOperator::new(h0.diag().iter().map(|e| e + 1.0).collect());
        let mut psi = plus_state(5);
        apply_diagonal_phase(&mut psi, &shifted, PI).unwrap();
        for (a, e) in psi.amps().iter().zip(shifted.diag()) {
            let sign = if (*e as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            assert!((a.re - sign / 32f64.sqrt()).abs() < 1e-14 && a.im.abs() < 1e-14);
        }
        assert!(apply_diagonal_phase(&mut plus_state(4), &h0, 1.0).is_err());
    }

    #[test]
    fn mixer_on_plus() {
        let mut psi = plus_state(1);
        apply_mixer(&mut psi, 0.0);
        assert_eq!(psi, plus_state(1));
        let beta = 0.6;
        apply_mixer(&mut psi, beta);
        let phase = Complex64::from_polar(FRAC_1_SQRT_2, -beta);
        assert!(psi.amps().iter().all(|a| (a - phase).norm() < 1e-15));
    }

    #[test]
    fn sbo_phase_cases() {
        let toy = toy_instance();
        let circuit = Circuit::new(&toy, CostKind::Sbo { temperature: 1.0 }).unwrap();
        let eig = circuit.spectrum().unwrap();
        let mut psi = plus_state(5);
        apply_sbo_phase(&mut psi, eig, 0.0).unwrap();
        assert!(psi.max_abs_diff(&plus_state(5)) < 1e-12);

        let g = gibbs_distribution(&toy, 1.0).unwrap();
        let mut psi = StateVector::from_real(&g.sqrt_amplitudes());
        apply_sbo_phase(&mut psi, eig, 3.1).unwrap();
        let p = psi.probabilities();
        for (a, b) in p.probs().iter().zip(g.distribution.probs()) {
            assert!((a - b).abs() < 1e-10);
        }

        // n = 1: H = [[1,-1],[-1,1]], exp(-iγH)|↑⟩ has P(↑) = cos²γ
        let one = IsingInstance::new(1).unwrap();
        let circuit = Circuit::new(&one, CostKind::Sbo { temperature: 1.0 }).unwrap();
        for gamma in [PI / 2.0, 0.3] {
            let mut up = StateVector::basis(2, SpinConfig(1));
            apply_sbo_phase(&mut up, circuit.spectrum().unwrap(), gamma).unwrap();
            let p = up.probabilities();
            assert!((p.get(SpinConfig(1)) - gamma.cos().powi(2)).abs() < 1e-12);
            assert!((p.get(SpinConfig(0)) - gamma.sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_circuit_is_plus() {
        let angles = AngleSchedule::new(vec![0.0], vec![0.0]).unwrap();
        for kind in [CostKind::Classical, CostKind::Sbo { temperature: 1.0 }] {
            let psi = run_circuit(&toy_instance(), kind, &angles).unwrap();
            assert!(psi.max_abs_diff(&plus_state(5)) < 1e-12);
        }
    }

    #[test]
    fn distributions() {
        let d = StateVector::basis(8, SpinConfig(3)).probabilities();
        assert_eq!(d, Distribution::one_hot(8, SpinConfig(3)));
    }
}
