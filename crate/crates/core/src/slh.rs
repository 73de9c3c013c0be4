//! SLH network algebra on the joint 2^N atomic space, used to rebuild the
//! master equation from the waveguide cascade and cross-check the closed
//! forms.
//!
//! Each connection point is a one-port element (1, √(γ/2) σₙ⁻, H). The
//! right-moving chain visits the points in increasing position, the
//! left-moving chain in the reverse order, with propagation phases between
//! consecutive points. The two chains are concatenated into a two-port
//! network.

use crate::error::{Error, Result};
use crate::layout::AtomLayout;
use crate::liouvillian::{DriveSpec, LindbladModel};
use crate::linalg::{c, hermiticity_error, hilbert_dim, lowering_operators, CMatrix, C64, I, MAX_ATOMS};

const UNITARY_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const SPAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SlhTriplet {
    s: CMatrix,
    l: Vec<CMatrix>,
    h: CMatrix,
}

impl SlhTriplet {
    pub fn new(s: CMatrix, l: Vec<CMatrix>, h: CMatrix) -> Result<Self> {
        if !s.is_square() || s.nrows() != l.len() {
            return Err(Error::InvalidTriplet(format!(
                "scattering matrix is {}x{} but there are {} coupling operators",
                s.nrows(),
                s.ncols(),
                l.len()
            )));
        }
        let dim = h.nrows();
        if !h.is_square() || l.iter().any(|op| op.nrows() != dim || op.ncols() != dim) {
            return Err(Error::InvalidTriplet("operators must share one square space".into()));
        }
        let ports = s.nrows();
        let defect = crate::linalg::max_abs_diff(&(s.adjoint() * &s), &CMatrix::identity(ports, ports));
        if defect > UNITARY_TOL {
            return Err(Error::InvalidTriplet(format!("S not unitary (deviation {defect:e})")));
        }
        let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if hermiticity_error(&h) > HERMITIAN_TOL * scale {
            return Err(Error::InvalidTriplet("H not Hermitian".into()));
        }
        Ok(Self { s, l, h })
    }

    /// Identity network with `ports` channels on a `dim`-dimensional space.
    pub fn identity(ports: usize, dim: usize) -> Self {
        Self {
            s: CMatrix::identity(ports, ports),
            l: vec![CMatrix::zeros(dim, dim); ports],
            h: CMatrix::zeros(dim, dim),
        }
    }

    pub fn scattering(&self) -> &CMatrix {
        &self.s
    }

    pub fn couplings(&self) -> &[CMatrix] {
        &self.l
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.h
    }

    pub fn ports(&self) -> usize {
        self.l.len()
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }
}

/// (e^{iφ}, 0, 0)
pub fn phase_element(phi: f64, dim: usize) -> SlhTriplet {
    SlhTriplet {
        s: CMatrix::from_element(1, 1, C64::from_polar(1.0, phi)),
        l: vec![CMatrix::zeros(dim, dim)],
        h: CMatrix::zeros(dim, dim),
    }
}

/// Cascade g1 → g2: (S₂S₁, L₂ + S₂L₁, H₁ + H₂ + Im(L₂†S₂L₁)) with
/// Im X = (X − X†)/2i.
pub fn series_product(g2: &SlhTriplet, g1: &SlhTriplet) -> Result<SlhTriplet> {
    if g1.ports() != g2.ports() || g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch {
            expected: g2.ports() * g2.dim(),
            found: g1.ports() * g1.dim(),
        });
    }
    let ports = g1.ports();
    let dim = g1.dim();
    let s2l1: Vec<CMatrix> = (0..ports)
        .map(|i| (0..ports).fold(CMatrix::zeros(dim, dim), |acc, k| acc + &g1.l[k] * g2.s[(i, k)]))
        .collect();
    let x = g2
        .l
        .iter()
        .zip(&s2l1)
        .fold(CMatrix::zeros(dim, dim), |acc, (l2, sl1)| acc + l2.adjoint() * sl1);
    let im = (&x - x.adjoint()) / (c(2.0) * I);
    Ok(SlhTriplet {
        s: &g2.s * &g1.s,
        l: g2.l.iter().zip(&s2l1).map(|(a, b)| a + b).collect(),
        h: &g1.h + &g2.h + im,
    })
}

/// G_a ⊞ G_b: block-diagonal S, stacked L, summed H.
pub fn concatenate(ga: &SlhTriplet, gb: &SlhTriplet) -> Result<SlhTriplet> {
    if ga.dim() != gb.dim() {
        return Err(Error::DimensionMismatch {
            expected: ga.dim(),
            found: gb.dim(),
        });
    }
    let (na, nb) = (ga.ports(), gb.ports());
    let mut s = CMatrix::zeros(na + nb, na + nb);
    s.view_mut((0, 0), (na, na)).copy_from(&ga.s);
    s.view_mut((na, na), (nb, nb)).copy_from(&gb.s);
    Ok(SlhTriplet {
        s,
        l: ga.l.iter().chain(&gb.l).cloned().collect(),
        h: &ga.h + &gb.h,
    })
}

struct Point {
    atom: usize,
    phase: f64,
    rate: f64,
}

fn cascade(points: &[&Point], phase_sign: f64, local_h: &[CMatrix], lowering: &[CMatrix], dim: usize) -> Result<SlhTriplet> {
    let mut net: Option<SlhTriplet> = None;
    let mut attached = vec![local_h.is_empty(); lowering.len()];
    let mut previous_phase = 0.0;
    for p in points {
        let h = if attached[p.atom] {
            CMatrix::zeros(dim, dim)
        } else {
            attached[p.atom] = true;
            local_h[p.atom].clone()
        };
        let element = SlhTriplet {
            s: CMatrix::identity(1, 1),
            l: vec![&lowering[p.atom] * c((p.rate / 2.0).sqrt())],
            h,
        };
        net = Some(match net {
            None => element,
            Some(upstream) => {
                let shifted = series_product(&phase_element(phase_sign * (p.phase - previous_phase), dim), &upstream)?;
                series_product(&element, &shifted)?
            }
        });
        previous_phase = p.phase;
    }
    Ok(net.unwrap_or_else(|| SlhTriplet::identity(1, dim)))
}

/// Two-port network (right-moving ⊞ left-moving) of a layout under a
/// drive. Each atom's bare Hamiltonian (Δ_p + εₙ)σₙ⁺σₙ⁻ + A(σₙ⁺ + σₙ⁻) is
/// attached once, at its first right-moving point; the waveguide-induced
/// shifts and exchange come out of the cascade.
pub fn build_network(layout: &AtomLayout, drive: &DriveSpec) -> Result<SlhTriplet> {
    let n = layout.n_atoms();
    if n > MAX_ATOMS {
        return Err(Error::TooManyAtoms { atoms: n, max: MAX_ATOMS });
    }
    let dim = hilbert_dim(n);
    let lowering = lowering_operators(n);
    let amplitude = drive.amplitude();
    let local_h: Vec<CMatrix> = layout
        .atoms()
        .iter()
        .zip(&lowering)
        .map(|(atom, s)| {
            let up = s.adjoint();
            &up * s * c(drive.detuning() + atom.bare_detuning()) + (&up + s) * c(amplitude)
        })
        .collect();

    let points: Vec<Point> = layout
        .atoms()
        .iter()
        .enumerate()
        .flat_map(|(atom, spec)| {
            spec.connection_phases()
                .iter()
                .zip(spec.point_rates())
                .map(move |(&phase, &rate)| Point { atom, phase, rate })
        })
        .collect();
    let mut right: Vec<&Point> = points.iter().collect();
    right.sort_by(|a, b| a.phase.total_cmp(&b.phase));
    let left: Vec<&Point> = right.iter().rev().copied().collect();

    let g_right = cascade(&right, 1.0, &local_h, &lowering, dim)?;
    let g_left = cascade(&left, -1.0, &[], &lowering, dim)?;
    concatenate(&g_right, &g_left)
}

/// Master equation of a triplet: H as is, and each coupling operator
/// Lc = Σₙ cₙ σₙ⁻ folded into Γⱼₙ = Σc cⱼ c̄ₙ. Scattering phases drop out.
pub fn to_lindblad(g: &SlhTriplet) -> Result<LindbladModel> {
    let dim = g.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::SlhExport(format!("operator space of dimension {dim} is not a qubit register")));
    }
    let n = dim.trailing_zeros() as usize;
    let lowering = lowering_operators(n);
    let norm = (dim / 2) as f64;
    let mut decay = CMatrix::zeros(n, n);
    for (ch, op) in g.l.iter().enumerate() {
        let coeff: Vec<C64> = lowering
            .iter()
            .map(|s| s.adjoint().component_mul(&op.transpose()).sum() / norm)
            .collect();
        let rebuilt = lowering
            .iter()
            .zip(&coeff)
            .fold(CMatrix::zeros(dim, dim), |acc, (s, &k)| acc + s * k);
        let scale = op.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let miss = crate::linalg::max_abs_diff(&rebuilt, op);
        if miss > SPAN_TOL * scale {
            return Err(Error::SlhExport(format!(
                "coupling operator {ch} is not a combination of lowering operators (residual {miss:e})"
            )));
        }
        for j in 0..n {
            for k in 0..n {
                decay[(j, k)] += coeff[j] * coeff[k].conj();
            }
        }
    }
    LindbladModel::from_parts(crate::linalg::hermitian_part(&g.h), crate::linalg::hermitian_part(&decay))
}

/// Master equation of a layout obtained through the SLH cascade.
pub fn network_model(layout: &AtomLayout, drive: &DriveSpec) -> Result<LindbladModel> {
    to_lindblad(&build_network(layout, drive)?)
}
