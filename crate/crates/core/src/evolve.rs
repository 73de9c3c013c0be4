//! Time evolution of the master equation and steady-state extraction.
//!
//! The Liouvillian is time independent and at most 4096 × 4096, so the
//! primary integrator is the exact propagator e^{L·dt} (Padé scaling and
//! squaring), computed once per distinct step. An embedded Dormand–Prince
//! integrator is kept as a cross-check and for generators that are not
//! available as a dense matrix.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::liouvillian::{DensityMatrix, LindbladModel};
use crate::linalg::{hermitian_part, trace, unvectorize, vectorize, CMatrix, CVector};
use crate::spectral::DressedPair;

/// Largest tolerated negative eigenvalue of a propagated state.
pub const POSITIVITY_TOL: f64 = 1e-7;
/// Relative singular-value gap below which the null space counts as degenerate.
pub const UNIQUENESS_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

/// Cached exponentials of a fixed generator.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: CMatrix,
    dim: usize,
    cache: HashMap<u64, CMatrix>,
}

impl Propagator {
    pub fn new(model: &LindbladModel) -> Self {
        Self {
            generator: model.superoperator(),
            dim: model.dim(),
            cache: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self) -> &CMatrix {
        &self.generator
    }

    /// e^{L·dt}
    pub fn step(&mut self, dt: f64) -> &CMatrix {
        let generator = &self.generator;
        self.cache
            .entry(dt.to_bits())
            .or_insert_with(|| (generator * crate::linalg::c(dt)).exp())
    }

    /// e^{L·dt} applied to an arbitrary matrix.
    pub fn evolve(&mut self, x: &CMatrix, dt: f64) -> CMatrix {
        let v = vectorize(x);
        let dim = self.dim;
        unvectorize(&(self.step(dt) * v), dim)
    }
}

fn validate_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidInput("time grid is empty".into()));
    }
    if times[0] != 0.0 {
        return Err(Error::InvalidInput(format!("time grid must start at 0, starts at {}", times[0])));
    }
    for w in times.windows(2) {
        if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) || !w[1].is_finite() {
            return Err(Error::InvalidInput("time grid must be finite and strictly increasing".into()));
        }
    }
    Ok(())
}

/// Checks a propagated matrix, mapping failures to an accuracy error at `time`.
fn accept(raw: CMatrix, time: f64) -> Result<DensityMatrix> {
    DensityMatrix::checked(hermitian_part(&raw), POSITIVITY_TOL).map_err(|(msg, min_ev)| match min_ev {
        Some(min_eigenvalue) => Error::IntegratorAccuracy { time, min_eigenvalue },
        None => Error::InvalidState(format!("propagated state at t = {time}: {msg}")),
    })
}

/// Evolves `rho0` over `times` (starting at 0) with exact exponential steps.
/// A uniform grid reuses a single step matrix.
pub fn propagate(model: &LindbladModel, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    let mut prop = Propagator::new(model);
    propagate_with(&mut prop, rho0, times)
}

pub fn propagate_with(prop: &mut Propagator, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    validate_grid(times)?;
    if rho0.dim() != prop.dim() {
        return Err(Error::DimensionMismatch {
            expected: prop.dim(),
            found: rho0.dim(),
        });
    }
    let uniform_dt = uniform_spacing(times);
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    let mut current = vectorize(rho0.matrix());
    for (k, w) in times.windows(2).enumerate() {
        let dt = uniform_dt.unwrap_or(w[1] - w[0]);
        current = prop.step(dt) * current;
        let rho = accept(unvectorize(&current, prop.dim()), times[k + 1])?;
        current = vectorize(rho.matrix());
        states.push(rho);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

/// Common spacing of an evenly spaced grid, tolerant to linspace rounding.
pub(crate) fn uniform_spacing(times: &[f64]) -> Option<f64> {
    if times.len() < 2 {
        return None;
    }
    let (first, last) = (times[0], times[times.len() - 1]);
    let dt = (last - first) / (times.len() - 1) as f64;
    let tol = 1e-12 * last.abs().max(1.0);
    times
        .iter()
        .enumerate()
        .all(|(k, &t)| (t - first - k as f64 * dt).abs() <= tol)
        .then_some(dt)
}

/// Uniform grid of `samples` points on [0, t_max].
pub fn linspace(t_max: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

// Dormand–Prince 5(4) tableau; the generator is autonomous so the nodes are not needed.
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration of dρ/dt = L[ρ] to tolerance `tol`
/// (mixed absolute/relative, per entry).
pub fn propagate_adaptive(model: &LindbladModel, rho0: &DensityMatrix, times: &[f64], tol: f64) -> Result<Trajectory> {
    validate_grid(times)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: rho0.dim(),
        });
    }
    let mut states = vec![rho0.clone()];
    let mut y = rho0.matrix().clone();
    let mut t = 0.0;
    let mut h = 0.01f64;
    for &target in &times[1..] {
        while t < target {
            let clipped = h >= target - t;
            let dt = if clipped { target - t } else { h };
            let mut k: Vec<CMatrix> = Vec::with_capacity(7);
            for row in &DP_A {
                let mut arg = y.clone();
                for (kj, &a) in k.iter().zip(row) {
                    if a != 0.0 {
                        arg += kj * crate::linalg::c(a * dt);
                    }
                }
                k.push(model.apply(&arg)?);
            }
            let mut y5 = y.clone();
            let mut err = CMatrix::zeros(y.nrows(), y.ncols());
            for s in 0..7 {
                y5 += &k[s] * crate::linalg::c(DP_B5[s] * dt);
                err += &k[s] * crate::linalg::c((DP_B5[s] - DP_B4[s]) * dt);
            }
            let scale = |i: usize| tol * (1.0 + y5.as_slice()[i].norm().max(y.as_slice()[i].norm()));
            let ratio = err.iter().enumerate().map(|(i, e)| e.norm() / scale(i)).fold(0.0, f64::max);
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            if ratio <= 1.0 {
                t = if clipped { target } else { t + dt };
                y = y5;
                if !clipped {
                    h = dt * factor;
                }
            } else {
                h = dt * factor;
            }
            if h < 1e-14 * target.max(1.0) {
                return Err(Error::IntegratorAccuracy {
                    time: t,
                    min_eigenvalue: f64::NAN,
                });
            }
        }
        t = target;
        let rho = accept(y.clone(), target)?;
        y = rho.matrix().clone();
        states.push(rho);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// ‖L[ρ]‖ (Frobenius)
    pub residual: f64,
    /// Second-smallest singular value of the superoperator.
    pub uniqueness_margin: f64,
}

/// Null vector of the superoperator, Hermitized and trace-normalized.
pub fn steady_state(model: &LindbladModel) -> Result<SteadyState> {
    steady_state_of(model, &model.superoperator())
}

pub(crate) fn steady_state_of(model: &LindbladModel, superop: &CMatrix) -> Result<SteadyState> {
    let dim = model.dim();
    let svd = superop.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    let (smallest, second) = (order[0], order[1]);
    let norm = sv[order[order.len() - 1]];
    let threshold = UNIQUENESS_REL_TOL * norm;
    let margin = sv[second];
    if margin <= threshold {
        return Err(Error::DegenerateSteadyState { margin, threshold });
    }
    let null: CVector = v_t.row(smallest).adjoint();
    let mut rho = hermitian_part(&unvectorize(&null, dim));
    let tr = trace(&rho);
    if tr.norm() < 1e-300 {
        return Err(Error::DegenerateSteadyState { margin, threshold });
    }
    rho /= tr;
    rho = hermitian_part(&rho);
    let residual = model.apply(&rho)?.norm();
    let rho = DensityMatrix::checked(rho, 1e-9).map_err(|(msg, _)| Error::InvalidState(format!("steady state: {msg}")))?;
    Ok(SteadyState {
        rho,
        residual,
        uniqueness_margin: margin,
    })
}

/// Populations in the dressed basis {|gg⟩, ψ₊, ψ₋, |ee⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedPopulations {
    pub ground: f64,
    pub plus: f64,
    pub minus: f64,
    pub excited: f64,
}

impl DressedPopulations {
    pub fn total(&self) -> f64 {
        self.ground + self.plus + self.minus + self.excited
    }
}

pub fn decompose(rho: &DensityMatrix, pair: &DressedPair) -> Result<DressedPopulations> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let [g, p, m, e] = pair.basis();
    Ok(DressedPopulations {
        ground: rho.overlap(&g),
        plus: rho.overlap(&p),
        minus: rho.overlap(&m),
        excited: rho.overlap(&e),
    })
}
