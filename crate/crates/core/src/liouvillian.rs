//! Hamiltonian, dissipator and vectorized Liouvillian for N driven atoms.
//!
//! In the frame rotating at the drive frequency ω_field = ω − Δ_p,
//!
//! ```text
//! H = Σₙ (Δ_p + δₙ + εₙ) σₙ⁺σₙ⁻ + Σ_{j≠n} Δⱼₙ σⱼ⁺σₙ⁻ + A Σₙ (σₙ⁺ + σₙ⁻)
//! L[ρ] = −i[H, ρ] + ½ Σⱼₙ Γⱼₙ (2σⱼ⁻ρσₙ⁺ − {σⱼ⁺σₙ⁻, ρ})
//! ```
//!
//! where the drive amplitude A is Ω₀/2 or Ω₀ depending on [`DriveConvention`].

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::layout::CouplingSet;
use crate::linalg::{
    self, c, hermiticity_error, hermitian_eigenvalues, hilbert_dim, lowering_operators, trace, CMatrix,
    CVector, I, MAX_ATOMS,
};

const STATE_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;
const PSD_REL_TOL: f64 = 1e-10;
const PSD_ABS_FLOOR: f64 = 1e-14;

/// How the Rabi frequency Ω₀ enters the drive Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveConvention {
    /// H_drive = (Ω₀/2) Σₙ (σₙ⁺ + σₙ⁻), the convention under which the
    /// published steady-state numbers are reproduced.
    #[default]
    Half,
    /// H_drive = Ω₀ Σₙ (σₙ⁺ + σₙ⁻).
    Full,
}

impl DriveConvention {
    pub fn amplitude(self, rabi: f64) -> f64 {
        match self {
            Self::Half => 0.5 * rabi,
            Self::Full => rabi,
        }
    }
}

/// Coherent pump applied identically to every atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    rabi: f64,
    detuning: f64,
    convention: DriveConvention,
}

impl DriveSpec {
    pub fn new(rabi: f64, detuning: f64) -> Result<Self> {
        Self::with_convention(rabi, detuning, DriveConvention::default())
    }

    pub fn with_convention(rabi: f64, detuning: f64, convention: DriveConvention) -> Result<Self> {
        ensure_finite("rabi", rabi)?;
        ensure_finite("detuning", detuning)?;
        if rabi < 0.0 {
            return Err(Error::InvalidInput(format!("rabi frequency must be >= 0, got {rabi}")));
        }
        Ok(Self {
            rabi,
            detuning,
            convention,
        })
    }

    /// Resonant drive (Δ_p = 0). Panics on a negative or non-finite `rabi`;
    /// use [`DriveSpec::new`] for unchecked input.
    pub fn resonant(rabi: f64) -> Self {
        Self::new(rabi, 0.0).expect("invalid rabi frequency")
    }

    pub fn undriven() -> Self {
        Self::resonant(0.0)
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn convention(&self) -> DriveConvention {
        self.convention
    }

    /// Coefficient A multiplying Σ(σ⁺ + σ⁻) in the Hamiltonian.
    pub fn amplitude(&self) -> f64 {
        self.convention.amplitude(self.rabi)
    }
}

impl Default for DriveSpec {
    fn default() -> Self {
        Self::undriven()
    }
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::checked(matrix, STATE_TOL).map_err(|(msg, _)| Error::InvalidState(msg))
    }

    /// Validation with a separate positivity tolerance; on failure returns
    /// the message and the offending minimum eigenvalue (if that was the
    /// problem).
    pub(crate) fn checked(matrix: CMatrix, positivity_tol: f64) -> std::result::Result<Self, (String, Option<f64>)> {
        if !matrix.is_square() {
            return Err((format!("not square: {}x{}", matrix.nrows(), matrix.ncols()), None));
        }
        if !matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(("non-finite entries".into(), None));
        }
        let herm = hermiticity_error(&matrix);
        if herm > STATE_TOL {
            return Err((format!("not Hermitian (deviation {herm:e})"), None));
        }
        let tr = trace(&matrix);
        if (tr - c(1.0)).norm() > STATE_TOL {
            return Err((format!("trace {tr} differs from 1"), None));
        }
        let min_ev = hermitian_eigenvalues(&matrix)[0];
        if min_ev < -positivity_tol {
            return Err((format!("negative eigenvalue {min_ev:e}"), Some(min_ev)));
        }
        Ok(Self(matrix))
    }

    pub fn pure(state: &CVector) -> Result<Self> {
        let norm = state.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let psi = state.unscale(norm);
        Self::new(linalg::projector(&psi))
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        Self::new(linalg::projector(&linalg::basis_vector(dim, index)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    /// ⟨i|ρ|i⟩
    pub fn population(&self, index: usize) -> f64 {
        self.0[(index, index)].re
    }

    /// ⟨ψ|ρ|ψ⟩ for a normalized ψ.
    pub fn overlap(&self, state: &CVector) -> f64 {
        (state.adjoint() * &self.0 * state)[(0, 0)].re
    }

    /// tr(ρ·op)
    pub fn expectation(&self, op: &CMatrix) -> crate::linalg::C64 {
        // tr(AB) = Σᵢⱼ Aᵢⱼ Bⱼᵢ
        self.0.transpose().component_mul(op).sum()
    }
}

/// Hamiltonian plus collective decay matrix over the 2^N product basis.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: CMatrix,
    decay: CMatrix,
    lowering: Vec<CMatrix>,
    // H − (i/2) Σ Γⱼₙ σⱼ⁺σₙ⁻
    effective: CMatrix,
}

impl LindbladModel {
    /// Validates and assembles a model from a Hamiltonian and a Hermitian
    /// decay matrix Γⱼₙ (one row/column per atom).
    pub fn from_parts(hamiltonian: CMatrix, decay: CMatrix) -> Result<Self> {
        let n_atoms = decay.nrows();
        if n_atoms == 0 || !decay.is_square() {
            return Err(Error::InvalidInput("decay matrix must be square and nonempty".into()));
        }
        if n_atoms > MAX_ATOMS {
            return Err(Error::TooManyAtoms {
                atoms: n_atoms,
                max: MAX_ATOMS,
            });
        }
        let dim = hilbert_dim(n_atoms);
        if hamiltonian.nrows() != dim || hamiltonian.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: hamiltonian.nrows(),
            });
        }
        let h_scale = hamiltonian.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if hermiticity_error(&hamiltonian) > HERMITIAN_TOL * h_scale {
            return Err(Error::InvalidInput("Hamiltonian is not Hermitian".into()));
        }
        let g_scale = decay.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if hermiticity_error(&decay) > HERMITIAN_TOL * g_scale {
            return Err(Error::InvalidInput("decay matrix is not Hermitian".into()));
        }
        let max_diag = decay.diagonal().iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        let tolerance = PSD_REL_TOL * max_diag + PSD_ABS_FLOOR;
        let min_ev = hermitian_eigenvalues(&decay)[0];
        if min_ev < -tolerance {
            return Err(Error::NotPositiveSemidefinite {
                eigenvalue: min_ev,
                tolerance,
            });
        }

        let lowering = lowering_operators(n_atoms);
        let mut effective = hamiltonian.clone();
        for j in 0..n_atoms {
            let raise_j = lowering[j].adjoint();
            for n in 0..n_atoms {
                let g = decay[(j, n)];
                if g != c(0.0) {
                    effective -= (&raise_j * &lowering[n]) * (I * 0.5 * g);
                }
            }
        }
        Ok(Self {
            hamiltonian,
            decay,
            lowering,
            effective,
        })
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn decay(&self) -> &CMatrix {
        &self.decay
    }

    pub fn lowering_ops(&self) -> &[CMatrix] {
        &self.lowering
    }

    pub fn n_atoms(&self) -> usize {
        self.lowering.len()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// True when the Hamiltonian couples sectors of different excitation
    /// number, i.e. a coherent pump is present.
    pub fn is_driven(&self) -> bool {
        let scale = self.hamiltonian.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dim = self.dim();
        (0..dim).any(|i| {
            (0..dim).any(|j| {
                linalg::excitation_number(i) != linalg::excitation_number(j)
                    && self.hamiltonian[(i, j)].norm() > 1e-14 * scale
            })
        })
    }

    /// dρ/dt for an arbitrary (not necessarily physical) matrix.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let dim = self.dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho.nrows(),
            });
        }
        let mut out = (&self.effective * rho - rho * self.effective.adjoint()) * (-I);
        let n = self.n_atoms();
        for j in 0..n {
            let left = &self.lowering[j] * rho;
            for k in 0..n {
                let g = self.decay[(j, k)];
                if g != c(0.0) {
                    out += (&left * self.lowering[k].adjoint()) * g;
                }
            }
        }
        Ok(out)
    }

    /// Dense dim² × dim² superoperator in the column-stacking convention.
    pub fn superoperator(&self) -> CMatrix {
        let dim = self.dim();
        let id = CMatrix::identity(dim, dim);
        let mut sup = linalg::kron(&id, &self.effective) * (-I) + linalg::kron(&self.effective.conjugate(), &id) * I;
        let n = self.n_atoms();
        for j in 0..n {
            for k in 0..n {
                let g = self.decay[(j, k)];
                if g != c(0.0) {
                    sup += linalg::kron(&self.lowering[k].conjugate(), &self.lowering[j]) * g;
                }
            }
        }
        sup
    }
}

/// Builds the master equation of a coupling set under a drive.
pub fn build_model(cs: &CouplingSet, drive: &DriveSpec) -> Result<LindbladModel> {
    let n = cs.n_atoms();
    if n > MAX_ATOMS {
        return Err(Error::TooManyAtoms { atoms: n, max: MAX_ATOMS });
    }
    let dim = hilbert_dim(n);
    let lowering = lowering_operators(n);
    let amplitude = drive.amplitude();
    let mut h = CMatrix::zeros(dim, dim);
    for j in 0..n {
        let raise_j = lowering[j].adjoint();
        let freq = drive.detuning() + cs.lamb_shifts[j] + cs.bare_detunings[j];
        h += (&raise_j * &lowering[j]) * c(freq);
        for (k, lower_k) in lowering.iter().enumerate() {
            if k != j && cs.exchange[(j, k)] != 0.0 {
                h += (&raise_j * lower_k) * c(cs.exchange[(j, k)]);
            }
        }
        if amplitude != 0.0 {
            h += (&raise_j + &lowering[j]) * c(amplitude);
        }
    }
    LindbladModel::from_parts(h, linalg::real_to_complex(&cs.decay))
}
