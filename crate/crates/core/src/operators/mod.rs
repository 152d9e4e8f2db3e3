//! Cost, mixer and Gibbs-encoding Hamiltonians in the computational basis.

mod eigen;

pub use eigen::{
    eigh, DenseMatrix, EigenDecomposition, DENSE_LIMIT_DIM, JACOBI_MAX_SWEEPS, JACOBI_TOLERANCE,
};

use num_complex::Complex64;

use crate::error::{IsingError, OperatorError};
use crate::evolution::StateVector;
use crate::ising::IsingInstance;

/// A Hermitian operator with real matrix elements in the computational basis.
pub trait Hamiltonian {
    fn dim(&self) -> usize;

    /// `out = H x`.
    fn apply(&self, x: &[Complex64], out: &mut [Complex64]);

    fn densify(&self) -> Result<DenseMatrix, OperatorError>;
}

fn check_dense(dim: usize) -> Result<(), OperatorError> {
    if dim > DENSE_LIMIT_DIM {
        return Err(OperatorError::TooLarge {
            dim,
            limit: DENSE_LIMIT_DIM,
        });
    }
    Ok(())
}

/// An operator diagonal in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    diag: Vec<f64>,
}

impl DiagonalOperator {
    /// Panics unless `diag.len()` is a power of two.
    pub fn new(diag: Vec<f64>) -> Self {
        assert!(diag.len().is_power_of_two(), "diagonal length must be 2^n");
        Self { diag }
    }

    /// `H_0` of the instance.
    pub fn classical(inst: &IsingInstance) -> Self {
        Self::new(inst.energy_table())
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }
}

impl Hamiltonian for DiagonalOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for ((o, &a), &d) in out.iter_mut().zip(x).zip(&self.diag) {
            *o = a * d;
        }
    }

    fn densify(&self) -> Result<DenseMatrix, OperatorError> {
        check_dense(self.dim())?;
        let mut m = DenseMatrix::zeros(self.dim());
        for (i, &d) in self.diag.iter().enumerate() {
            m.set(i, i, d);
        }
        Ok(m)
    }
}

/// The transverse-field mixer `Σ_i σ_i^x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransverseField {
    pub n: usize,
}

impl Hamiltonian for TransverseField {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (idx, o) in out.iter_mut().enumerate() {
            *o = (0..self.n).map(|i| x[idx ^ (1 << i)]).sum();
        }
    }

    fn densify(&self) -> Result<DenseMatrix, OperatorError> {
        check_dense(self.dim())?;
        let mut m = DenseMatrix::zeros(self.dim());
        for idx in 0..self.dim() {
            for i in 0..self.n {
                m.set(idx, idx ^ (1 << i), 1.0);
            }
        }
        Ok(m)
    }
}

/// Local term `H_i = -s_i (Σ_{j≠i} J_ij s_j + h_i)` of spin `i` (0-based).
pub fn local_diagonal(inst: &IsingInstance, i: usize) -> Result<DiagonalOperator, OperatorError> {
    if i >= inst.n() {
        return Err(OperatorError::SpinOutOfRange {
            index: i,
            n: inst.n(),
        });
    }
    let neighbors = &inst.neighbors()[i];
    let h = inst.fields()[i];
    let diag = (0..inst.dim())
        .map(|idx| {
            let s = |k: usize| if idx >> k & 1 == 1 { 1.0 } else { -1.0 };
            let local_field: f64 = neighbors.iter().map(|&(j, v)| v * s(j)).sum::<f64>() + h;
            -s(i) * local_field
        })
        .collect();
    Ok(DiagonalOperator::new(diag))
}

/// `α = max_i ‖H_i‖`, the largest absolute local energy over all spins and
/// configurations.
pub fn alpha(inst: &IsingInstance) -> f64 {
    (0..inst.n())
        .map(|i| {
            local_diagonal(inst, i)
                .expect("index in range")
                .diag
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .fold(0.0, f64::max)
}

/// `H_S(T) = e^{-α/T} Σ_i (e^{H_i/T} - σ_i^x)` stored as a diagonal plus a
/// constant coupling on every single-flip pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SboOperator {
    pub n: usize,
    pub temperature: f64,
    pub alpha: f64,
    /// `Σ_i exp((H_i(σ) - α)/T)`.
    pub diag: Vec<f64>,
    /// `-exp(-α/T)`.
    pub offdiag: f64,
}

impl SboOperator {
    pub fn new(inst: &IsingInstance, temperature: f64) -> Result<Self, OperatorError> {
        build_sbo(inst, temperature)
    }
}

/// Builds `H_S(T)` with every exponent shifted by `-α` so nothing overflows
/// as `T -> 0`.
pub fn build_sbo(inst: &IsingInstance, temperature: f64) -> Result<SboOperator, OperatorError> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(IsingError::BadTemperature(temperature).into());
    }
    let alpha = alpha(inst);
    let mut diag = vec![0.0; inst.dim()];
    for i in 0..inst.n() {
        let local = local_diagonal(inst, i)?;
        for (d, &e) in diag.iter_mut().zip(local.diag()) {
            *d += ((e - alpha) / temperature).exp();
        }
    }
    Ok(SboOperator {
        n: inst.n(),
        temperature,
        alpha,
        diag,
        offdiag: -(-alpha / temperature).exp(),
    })
}

impl Hamiltonian for SboOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (idx, o) in out.iter_mut().enumerate() {
            let hop: Complex64 = (0..self.n).map(|i| x[idx ^ (1 << i)]).sum();
            *o = x[idx] * self.diag[idx] + hop * self.offdiag;
        }
    }

    fn densify(&self) -> Result<DenseMatrix, OperatorError> {
        check_dense(self.dim())?;
        let mut m = DenseMatrix::zeros(self.dim());
        for (idx, &d) in self.diag.iter().enumerate() {
            m.set(idx, idx, d);
            for i in 0..self.n {
                m.set(idx, idx ^ (1 << i), self.offdiag);
            }
        }
        Ok(m)
    }
}

/// `⟨ψ|H|ψ⟩`.
pub fn expectation<H: Hamiltonian + ?Sized>(op: &H, psi: &StateVector) -> Result<f64, OperatorError> {
    let amps = psi.amps();
    if amps.len() != op.dim() {
        return Err(OperatorError::DimensionMismatch {
            expected: op.dim(),
            found: amps.len(),
        });
    }
    let mut hpsi = vec![Complex64::new(0.0, 0.0); amps.len()];
    op.apply(amps, &mut hpsi);
    let value: Complex64 = amps.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
    debug_assert!(
        value.im.abs() <= 1e-10 * value.re.abs().max(1.0),
        "imaginary residue {} in Hermitian expectation",
        value.im
    );
    Ok(value.re)
}

/// `‖H x‖₂` for a real vector.
pub fn residual_norm<H: Hamiltonian + ?Sized>(op: &H, x: &[f64]) -> f64 {
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); xc.len()];
    op.apply(&xc, &mut out);
    out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
