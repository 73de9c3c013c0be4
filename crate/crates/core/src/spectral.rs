//! Dressed single-excitation states of two atoms, the four transition rates
//! connecting |ee⟩ → |ψ±⟩ → |gg⟩, the drive couplings Ω±, and rate
//! extraction directly from the Liouvillian.

use crate::error::{Error, Result};
use crate::layout::CouplingSet;
use crate::liouvillian::LindbladModel;
use crate::linalg::{c, projector, CMatrix, CVector, C64};

/// Index of |eg⟩ and |ge⟩ in the two-atom product basis.
const EG: usize = 2;
const GE: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// ψ = a|eg⟩ + b|ge⟩
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleExcitation {
    pub eg: C64,
    pub ge: C64,
}

impl SingleExcitation {
    /// Embeds into the four-dimensional product basis.
    pub fn to_vector(&self) -> CVector {
        let mut v = CVector::zeros(4);
        v[EG] = self.eg;
        v[GE] = self.ge;
        v
    }

    pub fn projector(&self) -> CMatrix {
        projector(&self.to_vector())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressedPair {
    pub psi_plus: SingleExcitation,
    pub psi_minus: SingleExcitation,
    pub energy_ground: f64,
    pub energy_plus: f64,
    pub energy_minus: f64,
    pub energy_excited: f64,
    /// Δ̃ = √(4Δ₁₂² + (ω̃₁ − ω̃₂)²) ≥ 0
    pub delta_tilde: f64,
}

impl DressedPair {
    pub fn state(&self, branch: Branch) -> &SingleExcitation {
        match branch {
            Branch::Plus => &self.psi_plus,
            Branch::Minus => &self.psi_minus,
        }
    }

    /// The basis {|gg⟩, ψ₊, ψ₋, |ee⟩} as column vectors.
    pub fn basis(&self) -> [CVector; 4] {
        [
            crate::linalg::basis_vector(4, 0),
            self.psi_plus.to_vector(),
            self.psi_minus.to_vector(),
            crate::linalg::basis_vector(4, 3),
        ]
    }
}

fn require_two_atoms(cs: &CouplingSet) -> Result<()> {
    if cs.n_atoms() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: cs.n_atoms(),
        });
    }
    Ok(())
}

/// Normalizes r|eg⟩ + 2|ge⟩ without overflowing when |r| is huge.
fn normalized(ratio: f64) -> SingleExcitation {
    if ratio.is_infinite() {
        return SingleExcitation {
            eg: c(ratio.signum()),
            ge: c(0.0),
        };
    }
    let norm = ratio.hypot(2.0);
    SingleExcitation {
        eg: c(ratio / norm),
        ge: c(2.0 / norm),
    }
}

/// Dressed states ψ± ∝ [(ω̃₁ − ω̃₂ ± Δ̃)/Δ₁₂]|eg⟩ + 2|ge⟩ and their energies in
/// the frame where the common atomic frequency is dropped (E_g = 0,
/// E_e = ω̃₁ + ω̃₂).
///
/// The amplitude ratio is evaluated in whichever of the two algebraically
/// equal forms avoids cancellation, (d ± Δ̃)/Δ₁₂ = ±4Δ₁₂/(Δ̃ ∓ d), so the
/// signs are those of the literal expression. When Δ₁₂ = 0 exactly the
/// states reduce to the bare |eg⟩ and |ge⟩.
pub fn dressed_states(cs: &CouplingSet) -> Result<DressedPair> {
    require_two_atoms(cs)?;
    let d = cs.frequency_difference();
    let x = cs.exchange12();
    if x == 0.0 && d == 0.0 {
        return Err(Error::Degenerate(
            "Δ₁₂ = 0 and ω̃₁ = ω̃₂: the single-excitation sector is degenerate".into(),
        ));
    }
    let delta_tilde = (4.0 * x * x + d * d).sqrt();
    let (ratio_plus, ratio_minus) = if x == 0.0 {
        if d > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (0.0, f64::NEG_INFINITY)
        }
    } else if d >= 0.0 {
        ((d + delta_tilde) / x, -4.0 * x / (delta_tilde + d))
    } else {
        (4.0 * x / (delta_tilde - d), (d - delta_tilde) / x)
    };
    let sum = cs.shifted_frequency(0) + cs.shifted_frequency(1);
    Ok(DressedPair {
        psi_plus: normalized(ratio_plus),
        psi_minus: normalized(ratio_minus),
        energy_ground: 0.0,
        energy_plus: 0.5 * (sum + delta_tilde),
        energy_minus: 0.5 * (sum - delta_tilde),
        energy_excited: sum,
        delta_tilde,
    })
}

/// Γ_{e+}, Γ_{e−}, Γ_{+g}, Γ_{−g} together with the auxiliary quantities
/// they are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateQuartet {
    pub gamma_e_plus: f64,
    pub gamma_e_minus: f64,
    pub gamma_plus_g: f64,
    pub gamma_minus_g: f64,
    /// η± = ω̃₁ − ω̃₂ ± Δ̃
    pub eta_plus: f64,
    pub eta_minus: f64,
    /// ξ = 4Δ₁₂Γ₁₂
    pub xi: f64,
    pub delta_tilde: f64,
}

impl RateQuartet {
    pub fn as_array(&self) -> [f64; 4] {
        [self.gamma_e_plus, self.gamma_e_minus, self.gamma_plus_g, self.gamma_minus_g]
    }
}

pub fn transition_rates(cs: &CouplingSet) -> Result<RateQuartet> {
    require_two_atoms(cs)?;
    let d = cs.frequency_difference();
    let x = cs.exchange12();
    if x == 0.0 && d == 0.0 {
        return Err(Error::Degenerate("dressed states undefined (Δ₁₂ = 0, ω̃₁ = ω̃₂)".into()));
    }
    let delta_tilde = (4.0 * x * x + d * d).sqrt();
    let eta_plus = d + delta_tilde;
    let eta_minus = d - delta_tilde;
    let g1 = cs.decay[(0, 0)];
    let g2 = cs.decay[(1, 1)];
    let xi = 4.0 * x * cs.decay[(0, 1)];
    let denom = 2.0 * delta_tilde;
    Ok(RateQuartet {
        gamma_e_plus: (g2 * eta_plus - g1 * eta_minus + xi) / denom,
        gamma_plus_g: (g1 * eta_plus - g2 * eta_minus + xi) / denom,
        gamma_e_minus: (g1 * eta_plus - g2 * eta_minus - xi) / denom,
        gamma_minus_g: (g2 * eta_plus - g1 * eta_minus - xi) / denom,
        eta_plus,
        eta_minus,
        xi,
        delta_tilde,
    })
}

/// tr(L[|from⟩⟨from|]·|to⟩⟨to|): population flow into `to` out of a system
/// prepared in `from`. Only meaningful for pure decay, so driven models are
/// refused.
pub fn extract_rate(model: &LindbladModel, from: &CVector, to: &CVector) -> Result<f64> {
    let dim = model.dim();
    for v in [from, to] {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if (v.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("state not normalized (norm {})", v.norm())));
        }
    }
    if model.is_driven() {
        return Err(Error::DrivenModel);
    }
    let flow = model.apply(&projector(from))?;
    Ok((to.adjoint() * flow * to)[(0, 0)].re)
}

/// The four rates of [`transition_rates`] obtained by [`extract_rate`] in the
/// dressed basis of `cs`; `model` must be built from the same coupling set.
pub fn extracted_rates(model: &LindbladModel, pair: &DressedPair) -> Result<[f64; 4]> {
    let [gg, plus, minus, ee] = pair.basis();
    Ok([
        extract_rate(model, &ee, &plus)?,
        extract_rate(model, &ee, &minus)?,
        extract_rate(model, &plus, &gg)?,
        extract_rate(model, &minus, &gg)?,
    ])
}

/// Effective pump couplings |gg⟩ → ψ± in units where the drive term reads
/// Ω₀ Σₙ σₙ⁺ (so Ω₊ = √2 Ω₀ when δ₁₂ = 0). Under the half-Rabi Hamiltonian
/// the matrix elements are Ω±/2.
///
/// The closed form equals sgn(Δ₁₂)·Ω₀⟨ψ±|Σₙσₙ⁺|gg⟩ for the states of
/// [`dressed_states`]; the overall sign flips where Δ₁₂ < 0.
pub fn drive_couplings(delta12: f64, exchange12: f64, rabi: f64) -> Result<(f64, f64)> {
    if delta12 == 0.0 && exchange12 == 0.0 {
        return Err(Error::Degenerate("δ₁₂ = Δ₁₂ = 0: drive couplings undefined".into()));
    }
    let root = (4.0 * exchange12 * exchange12 + delta12 * delta12).sqrt();
    let branch = |sign: f64| {
        let num = delta12 + 2.0 * exchange12 + sign * root;
        let den = (8.0 * exchange12 * exchange12 + 2.0 * delta12 * (delta12 + sign * root)).sqrt();
        if den == 0.0 {
            // only reached when Δ₁₂ = 0, where the matching numerator also vanishes
            0.0
        } else {
            rabi * num / den
        }
    };
    Ok((branch(1.0), branch(-1.0)))
}

/// Liouvillian eigenvalues sorted by descending real part.
pub fn liouvillian_spectrum(superop: &CMatrix) -> Vec<C64> {
    let mut ev: Vec<C64> = superop
        .clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default();
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Slowest nonzero decay rate |Re λ| of a spectrum, skipping modes with
/// |Re λ| ≤ `zero_tol`.
pub fn slowest_decay(spectrum: &[C64], zero_tol: f64) -> Option<f64> {
    spectrum
        .iter()
        .map(|z| -z.re)
        .filter(|&r| r > zero_tol)
        .min_by(f64::total_cmp)
}

/// Candidate lifetimes of the subradiant branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifetimes {
    /// 1/Γ_{−g}
    pub from_minus_g: f64,
    /// Slowest nonzero mode of the undriven Liouvillian.
    pub undriven_mode: f64,
    /// Slowest nonzero mode of the driven Liouvillian.
    pub driven_mode: f64,
}

pub fn lifetimes(cs: &CouplingSet, drive: &crate::liouvillian::DriveSpec) -> Result<Lifetimes> {
    use crate::liouvillian::{build_model, DriveSpec};
    let rates = transition_rates(cs)?;
    let undriven = build_model(cs, &DriveSpec::new(0.0, drive.detuning())?)?;
    let driven = build_model(cs, drive)?;
    let mode = |m: &LindbladModel| {
        slowest_decay(&liouvillian_spectrum(&m.superoperator()), 1e-10).map_or(f64::INFINITY, |r| 1.0 / r)
    };
    Ok(Lifetimes {
        from_minus_g: 1.0 / rates.gamma_minus_g,
        undriven_mode: mode(&undriven),
        driven_mode: mode(&driven),
    })
}
