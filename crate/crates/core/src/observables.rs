//! Entanglement and photon statistics of the emitted field.
//!
//! The waveguide field in one direction is Ê = Σₙ f̂ₙ σₙ⁻ with
//! f̂ₙ = (1/Kₙ) Σⱼ √(γⱼ/γ̄ₙ) e^{∓iθⱼ} summed over the Kₙ connection points of
//! atom n. The per-atom normalization only fixes the scale of I and Q;
//! g² is unaffected by it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::Propagator;
use crate::layout::AtomLayout;
use crate::liouvillian::{DensityMatrix, LindbladModel};
use crate::linalg::{c, hilbert_dim, lowering_operators, CMatrix, C64, I};

/// Eigenvalues of ρρ̃ below this are treated as zero before the square root.
const CONCURRENCE_CLIP: f64 = 1e-12;
/// Intensities at or below this fraction of Σ|f̂ₙ|² count as dark.
const DARK_REL_TOL: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Left,
    Right,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Left => -1.0,
            Direction::Right => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldAmplitudes {
    pub coefficients: Vec<C64>,
    pub direction: Direction,
}

impl FieldAmplitudes {
    pub fn new(coefficients: Vec<C64>, direction: Direction) -> Self {
        Self {
            coefficients,
            direction,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.coefficients.len()
    }

    /// Ê = Σₙ f̂ₙ σₙ⁻ on the joint atomic space.
    pub fn field_operator(&self) -> CMatrix {
        let n = self.n_atoms();
        let dim = hilbert_dim(n);
        lowering_operators(n)
            .iter()
            .zip(&self.coefficients)
            .fold(CMatrix::zeros(dim, dim), |acc, (s, &f)| acc + s * f)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::new(self.coefficients.iter().map(|&f| f * factor).collect(), self.direction)
    }

    fn weight(&self) -> f64 {
        self.coefficients.iter().map(|f| f.norm_sqr()).sum()
    }
}

pub fn field_amplitudes(layout: &AtomLayout, direction: Direction) -> FieldAmplitudes {
    let sign = direction.sign();
    let coefficients = layout
        .atoms()
        .iter()
        .map(|atom| {
            let rates = atom.point_rates();
            let k = rates.len() as f64;
            let mean = rates.iter().sum::<f64>() / k;
            let sum: C64 = atom
                .connection_phases()
                .iter()
                .zip(rates)
                .map(|(&theta, &g)| C64::from_polar((g / mean).sqrt(), sign * theta))
                .sum();
            sum / k
        })
        .collect();
    FieldAmplitudes::new(coefficients, direction)
}

fn check_dims(rho: &DensityMatrix, fields: &FieldAmplitudes) -> Result<()> {
    let dim = hilbert_dim(fields.n_atoms());
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    Ok(())
}

/// I = ⟨Ê†Ê⟩, clipped at 0.
pub fn intensity(rho: &DensityMatrix, fields: &FieldAmplitudes) -> Result<f64> {
    check_dims(rho, fields)?;
    let e = fields.field_operator();
    Ok(rho.expectation(&(e.adjoint() * e)).re.max(0.0))
}

fn nonzero_intensity(rho: &DensityMatrix, fields: &FieldAmplitudes) -> Result<f64> {
    let i = intensity(rho, fields)?;
    if i <= DARK_REL_TOL * fields.weight() {
        return Err(Error::DarkState { intensity: i });
    }
    Ok(i)
}

/// g²(0) = ⟨Ê†Ê†ÊÊ⟩/I²
pub fn g2_zero(rho: &DensityMatrix, fields: &FieldAmplitudes) -> Result<f64> {
    let i = nonzero_intensity(rho, fields)?;
    let e = fields.field_operator();
    let ee = &e * &e;
    Ok(rho.expectation(&(ee.adjoint() * ee)).re.max(0.0) / (i * i))
}

/// Q = I·(g²(0) − 1)
pub fn mandel_q(rho: &DensityMatrix, fields: &FieldAmplitudes) -> Result<f64> {
    let i = nonzero_intensity(rho, fields)?;
    Ok(i * (g2_zero(rho, fields)? - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    pub taus: Vec<f64>,
    pub g2: Vec<f64>,
}

/// g²(τ) = tr[Ê†Ê e^{Lτ}(Ê ρ Ê†)]/I² by quantum regression, with ρ the
/// steady state of `model`. `taus` must be nonnegative and increasing.
pub fn g2_tau(model: &LindbladModel, rho_ss: &DensityMatrix, fields: &FieldAmplitudes, taus: &[f64]) -> Result<CorrelationCurve> {
    let mut prop = Propagator::new(model);
    g2_tau_with(&mut prop, rho_ss, fields, taus)
}

pub fn g2_tau_with(
    prop: &mut Propagator,
    rho_ss: &DensityMatrix,
    fields: &FieldAmplitudes,
    taus: &[f64],
) -> Result<CorrelationCurve> {
    if prop.dim() != rho_ss.dim() {
        return Err(Error::DimensionMismatch {
            expected: prop.dim(),
            found: rho_ss.dim(),
        });
    }
    if taus.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || taus.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("delays must be finite, nonnegative and increasing".into()));
    }
    let i = nonzero_intensity(rho_ss, fields)?;
    let e = fields.field_operator();
    let number = e.adjoint() * &e;
    let mut x = &e * rho_ss.matrix() * e.adjoint();
    let mut g2 = Vec::with_capacity(taus.len());
    let mut last = 0.0;
    let uniform = crate::evolve::uniform_spacing(taus);
    for (k, &tau) in taus.iter().enumerate() {
        let dt = match (k, uniform) {
            (0, _) => tau,
            (_, Some(h)) => h,
            _ => tau - last,
        };
        if dt > 0.0 {
            x = prop.evolve(&x, dt);
        }
        last = tau;
        let num = x.transpose().component_mul(&number).sum();
        g2.push(num.re / (i * i));
    }
    Ok(CorrelationCurve {
        taus: taus.to_vec(),
        g2,
    })
}

/// Hill–Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let yy = spin_flip();
    let tilde = &yy * m.conjugate() * &yy;
    let product = m * tilde;
    let ev = product
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::InvalidState("concurrence: eigenvalues of ρρ̃ not available".into()))?;
    let mut lambdas: Vec<f64> = ev
        .iter()
        .map(|z| if z.re > CONCURRENCE_CLIP { z.re.sqrt() } else { 0.0 })
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// σ_y ⊗ σ_y
pub(crate) fn spin_flip() -> CMatrix {
    let y = CMatrix::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)]);
    y.kronecker(&y)
}

/// Density-matrix elements entering the two-atom intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionElements {
    pub rho_ee: f64,
    pub rho_ge: f64,
    pub rho_eg: f64,
    /// Re⟨ge|ρ|eg⟩
    pub rho_od: f64,
}

impl EmissionElements {
    /// ϱ_ge + ϱ_eg + 2ϱ_od
    pub fn single_excitation_sum(&self) -> f64 {
        self.rho_ge + self.rho_eg + 2.0 * self.rho_od
    }
}

pub fn emission_elements(rho: &DensityMatrix) -> Result<EmissionElements> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    Ok(EmissionElements {
        rho_ee: m[(3, 3)].re,
        rho_ge: m[(1, 1)].re,
        rho_eg: m[(2, 2)].re,
        rho_od: m[(1, 2)].re,
    })
}
