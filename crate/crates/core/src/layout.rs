//! Atom–waveguide geometries and the master-equation coefficients they induce.
//!
//! Every connection point ℓ of atom j sits at phase coordinate θℓ⁽ʲ⁾ = κxℓ⁽ʲ⁾
//! with point decay rate γℓ⁽ʲ⁾. With φ = |θℓ⁽ʲ⁾ − θₘ⁽ⁿ⁾|,
//!
//! * Lamb shift      δⱼ  = ½ Σℓ Σₘ √(γℓγₘ) sin φ   (both points on atom j)
//! * exchange        Δⱼₙ = ½ Σℓ Σₘ √(γℓγₘ) sin φ   (j ≠ n)
//! * collective decay Γⱼₙ =  Σℓ Σₘ √(γℓγₘ) cos φ
//!
//! Only differences of phase coordinates enter, so no physical length unit is
//! needed anywhere.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::{C64, MAX_ATOMS};

/// One emitter: where it touches the waveguide and how strongly.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpec {
    connection_phases: Vec<f64>,
    point_rates: Vec<f64>,
    bare_detuning: f64,
}

impl AtomSpec {
    pub fn new(connection_phases: Vec<f64>, point_rates: Vec<f64>, bare_detuning: f64) -> Result<Self> {
        if connection_phases.is_empty() {
            return Err(Error::InvalidInput("atom needs at least one connection point".into()));
        }
        if connection_phases.len() != point_rates.len() {
            return Err(Error::InvalidInput(format!(
                "{} connection phases but {} point rates",
                connection_phases.len(),
                point_rates.len()
            )));
        }
        for &theta in &connection_phases {
            ensure_finite("connection phase", theta)?;
        }
        for &rate in &point_rates {
            ensure_finite("point rate", rate)?;
            if rate <= 0.0 {
                return Err(Error::InvalidInput(format!("point rates must be > 0, got {rate}")));
            }
        }
        ensure_finite("bare detuning", bare_detuning)?;
        Ok(Self {
            connection_phases,
            point_rates,
            bare_detuning,
        })
    }

    /// Equal rate `gamma0` at every point, no bare detuning.
    pub fn uniform(connection_phases: Vec<f64>, gamma0: f64) -> Result<Self> {
        let rates = vec![gamma0; connection_phases.len()];
        Self::new(connection_phases, rates, 0.0)
    }

    pub fn connection_phases(&self) -> &[f64] {
        &self.connection_phases
    }

    pub fn point_rates(&self) -> &[f64] {
        &self.point_rates
    }

    pub fn bare_detuning(&self) -> f64 {
        self.bare_detuning
    }

    pub fn connection_count(&self) -> usize {
        self.connection_phases.len()
    }

    pub fn with_bare_detuning(mut self, detuning: f64) -> Result<Self> {
        ensure_finite("bare detuning", detuning)?;
        self.bare_detuning = detuning;
        Ok(self)
    }

    /// Σℓ √γℓ e^{iθℓ}; Γ = Re(w w†) for these amplitudes.
    pub fn amplitude(&self) -> C64 {
        self.connection_phases
            .iter()
            .zip(&self.point_rates)
            .map(|(&theta, &rate)| C64::from_polar(rate.sqrt(), theta))
            .sum()
    }

    fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.connection_phases.iter().copied().zip(self.point_rates.iter().copied())
    }
}

/// The four built-in two-atom topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    /// Atom 2's points fall between atom 1's: {0, 3θ} and {θ, 2θ}.
    Nested,
    /// Interleaved: {0, 2θ} and {θ, 3θ}.
    Braided,
    /// Disjoint: {0, θ} and {2θ, 3θ}.
    Separated,
    /// Point-like emitters at {0} and {θ}.
    Small,
}

impl LayoutKind {
    pub const ALL: [LayoutKind; 4] = [Self::Nested, Self::Braided, Self::Separated, Self::Small];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Nested => "nested",
            Self::Braided => "braided",
            Self::Separated => "separated",
            Self::Small => "small",
        }
    }

    /// Connection points of each atom in units of the gap θ.
    fn pattern(self) -> [&'static [f64]; 2] {
        match self {
            Self::Nested => [&[0.0, 3.0], &[1.0, 2.0]],
            Self::Braided => [&[0.0, 2.0], &[1.0, 3.0]],
            Self::Separated => [&[0.0, 1.0], &[2.0, 3.0]],
            Self::Small => [&[0.0], &[1.0]],
        }
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nested" => Ok(Self::Nested),
            "braided" => Ok(Self::Braided),
            "separated" => Ok(Self::Separated),
            "small" => Ok(Self::Small),
            other => Err(Error::UnknownGeometry(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomLayout {
    atoms: Vec<AtomSpec>,
    name: String,
    // For the named geometries: the gap θ and each point's integer index,
    // so that equal separations give bitwise-equal phase differences.
    lattice: Option<(f64, Vec<Vec<f64>>)>,
}

impl AtomLayout {
    pub fn new(name: impl Into<String>, atoms: Vec<AtomSpec>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("layout needs at least one atom".into()));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::TooManyAtoms {
                atoms: atoms.len(),
                max: MAX_ATOMS,
            });
        }
        Ok(Self {
            atoms,
            name: name.into(),
            lattice: None,
        })
    }

    pub fn atoms(&self) -> &[AtomSpec] {
        &self.atoms
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn couplings(&self) -> CouplingSet {
        coupling_set(self)
    }
}

/// Builds one of the named two-atom geometries with gap `spacing` = κΔx.
pub fn make_layout(kind: LayoutKind, spacing: f64, gamma0: f64) -> Result<AtomLayout> {
    ensure_finite("spacing", spacing)?;
    ensure_finite("gamma0", gamma0)?;
    if spacing < 0.0 {
        return Err(Error::InvalidInput(format!("spacing must be >= 0, got {spacing}")));
    }
    if gamma0 <= 0.0 {
        return Err(Error::InvalidInput(format!("gamma0 must be > 0, got {gamma0}")));
    }
    let pattern = kind.pattern();
    let atoms = pattern
        .iter()
        .map(|units| AtomSpec::uniform(units.iter().map(|u| u * spacing).collect(), gamma0))
        .collect::<Result<Vec<_>>>()?;
    let mut layout = AtomLayout::new(kind.as_str(), atoms)?;
    layout.lattice = Some((spacing, pattern.iter().map(|u| u.to_vec()).collect()));
    Ok(layout)
}

/// Coefficients of the master equation derived from a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    /// δₙ
    pub lamb_shifts: DVector<f64>,
    /// Δⱼₙ, symmetric with zero diagonal.
    pub exchange: DMatrix<f64>,
    /// Γⱼₙ, symmetric positive semidefinite.
    pub decay: DMatrix<f64>,
    /// εₙ = ωₙ − ω_ref.
    pub bare_detunings: DVector<f64>,
}

impl CouplingSet {
    pub fn n_atoms(&self) -> usize {
        self.lamb_shifts.len()
    }

    /// ω̃ₙ in the frame of the common reference frequency: δₙ + εₙ.
    pub fn shifted_frequency(&self, atom: usize) -> f64 {
        self.lamb_shifts[atom] + self.bare_detunings[atom]
    }

    /// ω̃₁ − ω̃₂ (two-atom quantity).
    pub fn frequency_difference(&self) -> f64 {
        self.shifted_frequency(0) - self.shifted_frequency(1)
    }

    /// δ₁ − δ₂.
    pub fn lamb_shift_difference(&self) -> f64 {
        self.lamb_shifts[0] - self.lamb_shifts[1]
    }

    /// Δ₁₂ (two-atom quantity).
    pub fn exchange12(&self) -> f64 {
        self.exchange[(0, 1)]
    }

    pub fn min_decay_eigenvalue(&self) -> f64 {
        self.decay
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Direct double summation over all pairs of connection points.
pub fn coupling_set(layout: &AtomLayout) -> CouplingSet {
    let n = layout.n_atoms();
    let mut sin_sum = DMatrix::<f64>::zeros(n, n);
    let mut decay = DMatrix::<f64>::zeros(n, n);
    let separation = |j: usize, l: usize, k: usize, m: usize| match &layout.lattice {
        Some((gap, units)) => (units[j][l] - units[k][m]).abs() * gap,
        None => (layout.atoms[j].connection_phases[l] - layout.atoms[k].connection_phases[m]).abs(),
    };
    for (j, atom_j) in layout.atoms().iter().enumerate() {
        for (k, atom_k) in layout.atoms().iter().enumerate() {
            for (l, (_, rate_l)) in atom_j.points().enumerate() {
                for (m, (_, rate_m)) in atom_k.points().enumerate() {
                    let phi = separation(j, l, k, m);
                    let weight = (rate_l * rate_m).sqrt();
                    sin_sum[(j, k)] += 0.5 * weight * phi.sin();
                    decay[(j, k)] += weight * phi.cos();
                }
            }
        }
    }
    let lamb_shifts = sin_sum.diagonal();
    let mut exchange = sin_sum;
    exchange.fill_diagonal(0.0);
    // the summation is symmetric term by term; enforce it bitwise
    let exchange = (&exchange + exchange.transpose()) * 0.5;
    let decay = (&decay + decay.transpose()) * 0.5;
    CouplingSet {
        lamb_shifts,
        exchange,
        decay,
        bare_detunings: DVector::from_iterator(n, layout.atoms().iter().map(AtomSpec::bare_detuning)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn nested(theta: f64) -> CouplingSet {
        make_layout(LayoutKind::Nested, theta, 1.0).unwrap().couplings()
    }

    #[test]
    fn named_geometries_place_points_on_the_gap_grid() {
        let t = 0.3;
        let l = make_layout(LayoutKind::Nested, t, 1.0).unwrap();
        assert_eq!(l.atoms()[0].connection_phases(), &[0.0, 3.0 * t]);
        assert_eq!(l.atoms()[1].connection_phases(), &[t, 2.0 * t]);

        let l = make_layout(LayoutKind::Braided, PI / 2.0, 1.0).unwrap();
        assert_eq!(l.atoms()[0].connection_phases(), &[0.0, PI]);
        assert_eq!(l.atoms()[1].connection_phases(), &[PI / 2.0, 1.5 * PI]);

        let l = make_layout(LayoutKind::Small, 0.0, 1.0).unwrap();
        assert_eq!(l.atoms()[0].connection_phases(), &[0.0]);
        assert_eq!(l.atoms()[1].connection_phases(), &[0.0]);
        assert_eq!(l.name(), "small");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(make_layout(LayoutKind::Nested, f64::NAN, 1.0).is_err());
        assert!(make_layout(LayoutKind::Nested, 0.1, 0.0).is_err());
        assert!(make_layout(LayoutKind::Nested, -0.1, 1.0).is_err());
        assert!(matches!("twisted".parse::<LayoutKind>(), Err(Error::UnknownGeometry(_))));
        assert!(AtomSpec::new(vec![0.0], vec![1.0, 1.0], 0.0).is_err());
        assert!(AtomSpec::new(vec![], vec![], 0.0).is_err());
        assert!(AtomSpec::new(vec![0.0], vec![-1.0], 0.0).is_err());
        assert!(AtomLayout::new("none", vec![]).is_err());
    }

    #[test]
    fn nested_quarter_wave_values() {
        let cs = nested(PI / 2.0);
        assert_abs_diff_eq!(cs.lamb_shifts[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cs.lamb_shifts[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cs.exchange12(), 1.0, epsilon = 1e-12);
        let expected = DMatrix::from_row_slice(2, 2, &[2.0, -2.0, -2.0, 2.0]);
        assert_abs_diff_eq!(cs.decay, expected, epsilon = 1e-12);
    }

    #[test]
    fn nested_matches_closed_forms() {
        for i in 0..50 {
            let t = -1.0 + 0.13 * i as f64;
            let cs = nested(t.abs());
            let t = t.abs();
            assert_abs_diff_eq!(cs.decay[(0, 0)], 2.0 * (1.0 + (3.0 * t).cos()), epsilon = 1e-12);
            assert_abs_diff_eq!(cs.decay[(1, 1)], 2.0 * (1.0 + t.cos()), epsilon = 1e-12);
            assert_abs_diff_eq!(cs.decay[(0, 1)], 2.0 * (t.cos() + (2.0 * t).cos()), epsilon = 1e-12);
            assert_abs_diff_eq!(cs.exchange12(), t.sin() + (2.0 * t).sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(cs.lamb_shifts[0], (3.0 * t).sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(cs.lamb_shifts[1], t.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn nested_half_wave_is_fully_dark() {
        let cs = nested(PI);
        assert_abs_diff_eq!(cs.lamb_shifts.norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cs.exchange12(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cs.decay.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn small_atoms() {
        let td = 0.7;
        let cs = make_layout(LayoutKind::Small, td, 1.0).unwrap().couplings();
        assert_abs_diff_eq!(cs.decay[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cs.decay[(1, 1)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cs.decay[(0, 1)], td.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(cs.exchange12(), 0.5 * td.sin(), epsilon = 1e-15);
        assert_eq!(cs.lamb_shifts.norm(), 0.0);
    }

    #[test]
    fn zero_spacing_is_the_dicke_limit() {
        for kind in LayoutKind::ALL {
            let cs = make_layout(kind, 0.0, 1.0).unwrap().couplings();
            let points = if kind == LayoutKind::Small { 1.0 } else { 2.0 };
            for j in 0..2 {
                for n in 0..2 {
                    assert_eq!(cs.decay[(j, n)], points * points);
                }
            }
            assert_eq!(cs.lamb_shifts.norm(), 0.0);
            assert_eq!(cs.exchange.norm(), 0.0);
        }
    }

    #[test]
    fn decay_matrix_is_psd_on_a_fine_grid() {
        for kind in LayoutKind::ALL {
            for i in 0..1000 {
                let t = 2.0 * PI * i as f64 / 1000.0;
                let cs = make_layout(kind, t, 1.0).unwrap().couplings();
                assert!(cs.min_decay_eigenvalue() >= -1e-10, "{kind} θ={t}");
            }
        }
    }

    #[test]
    fn decay_matrix_is_re_of_amplitude_outer_product() {
        let l = make_layout(LayoutKind::Braided, 0.41, 1.3).unwrap();
        let cs = l.couplings();
        let w: Vec<C64> = l.atoms().iter().map(AtomSpec::amplitude).collect();
        for j in 0..2 {
            for n in 0..2 {
                assert_abs_diff_eq!(cs.decay[(j, n)], (w[j] * w[n].conj()).re, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn nested_decay_matrix_is_singular() {
        for i in 0..1000 {
            let t = 2.0 * PI * i as f64 / 1000.0;
            let g = nested(t).decay;
            let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
            assert!(det.abs() < 1e-12, "θ={t} det={det}");
        }
    }

    #[test]
    fn nested_small_gap_asymptotics() {
        let t = 1e-3;
        let cs = nested(t);
        let d12 = cs.lamb_shift_difference();
        let x12 = cs.exchange12();
        assert!((d12 / (2.0 * t) - 1.0).abs() < 1e-3);
        assert!((x12 / (3.0 * t) - 1.0).abs() < 1e-3);
        let split = (4.0 * x12 * x12 + d12 * d12).sqrt();
        assert!((split / (2.0 * 10f64.sqrt() * t) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn braided_and_separated_have_equal_lamb_shifts() {
        for kind in [LayoutKind::Braided, LayoutKind::Separated] {
            for i in 0..200 {
                let t = 0.031 * i as f64;
                let cs = make_layout(kind, t, 1.0).unwrap().couplings();
                assert_eq!(cs.lamb_shifts[0], cs.lamb_shifts[1]);
            }
        }
    }

    #[test]
    fn coefficients_are_two_pi_periodic() {
        for kind in LayoutKind::ALL {
            let a = make_layout(kind, 0.37, 1.0).unwrap().couplings();
            let b = make_layout(kind, 0.37 + 2.0 * PI, 1.0).unwrap().couplings();
            assert_abs_diff_eq!(a.decay, b.decay, epsilon = 1e-12);
            assert_abs_diff_eq!(a.exchange, b.exchange, epsilon = 1e-12);
            assert_abs_diff_eq!(a.lamb_shifts, b.lamb_shifts, epsilon = 1e-12);
        }
    }

    #[test]
    fn custom_layout_carries_detunings_and_rates() {
        let a = AtomSpec::new(vec![0.0, 1.0, 2.5], vec![1.0, 0.5, 2.0], 0.3).unwrap();
        let b = AtomSpec::new(vec![0.4], vec![0.8], -0.1).unwrap();
        let c = AtomSpec::uniform(vec![1.7, 3.1], 1.0).unwrap();
        let cs = AtomLayout::new("custom", vec![a, b, c]).unwrap().couplings();
        assert_eq!(cs.n_atoms(), 3);
        assert_eq!(cs.bare_detunings.as_slice(), &[0.3, -0.1, 0.0]);
        assert_abs_diff_eq!(cs.decay[(1, 1)], 0.8, epsilon = 1e-15);
        assert!(cs.min_decay_eigenvalue() > -1e-10);
        assert_eq!(cs.exchange, cs.exchange.transpose());
        assert_eq!(cs.decay, cs.decay.transpose());
    }
}
