use rayon::prelude::*;

use super::config::{Observable, ScenarioConfig, SweepAxis};
use super::table::Table;
use crate::error::{Error, Result};
use crate::evolve::{self, linspace, steady_state, Propagator, SteadyState};
use crate::liouvillian::{build_model, DensityMatrix, LindbladModel};
use crate::observables::{self, concurrence, field_amplitudes, Direction};
use crate::spectral::{dressed_states, liouvillian_spectrum, slowest_decay, transition_rates};

/// Bounds on the automatic horizon, in 1/γ₀.
const MIN_HORIZON: f64 = 10.0;
const MAX_HORIZON: f64 = 1e5;
/// Multiple of the slowest decay time used as the automatic horizon.
const HORIZON_DECAY_TIMES: f64 = 5.0;
const GOLDEN_ITERATIONS: usize = 40;

pub const DEFAULT_STEADY_OUTPUTS: [Observable; 7] = [
    Observable::Concurrence,
    Observable::PBeta,
    Observable::PGg,
    Observable::PEe,
    Observable::Intensity,
    Observable::G2Zero,
    Observable::MandelQ,
];

/// Worker threads: `WQED_THREADS` if set to a positive integer, otherwise
/// the available parallelism.
pub fn worker_count() -> usize {
    std::env::var("WQED_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Column name used for a swept config path.
pub fn axis_column(parameter: &str) -> &str {
    match parameter {
        "geometry.spacing_over_pi" => "kdx_over_pi",
        "geometry.gamma0" => "gamma0",
        "drive.rabi" => "omega0",
        "drive.detuning" => "detuning_over_gamma",
        "time.t_max" => "t_max",
        other => other,
    }
}

pub(crate) fn apply_parameter(cfg: &mut ScenarioConfig, parameter: &str, value: f64) -> Result<()> {
    match parameter {
        "geometry.spacing_over_pi" => cfg.geometry.spacing_over_pi = value,
        "geometry.gamma0" => cfg.geometry.gamma0 = value,
        "drive.rabi" => cfg.drive.rabi = value,
        "drive.detuning" => cfg.drive.detuning = value,
        "time.t_max" => cfg.time.t_max = Some(value),
        other => return Err(Error::Config(format!("cannot sweep `{other}`"))),
    }
    Ok(())
}

/// Horizon for transient runs: a few times the slowest nonzero decay time
/// of the model, clamped to a practical range.
pub fn auto_horizon(model: &LindbladModel) -> f64 {
    let spectrum = liouvillian_spectrum(&model.superoperator());
    let scale = spectrum.iter().map(|z| z.norm()).fold(1.0, f64::max);
    match slowest_decay(&spectrum, 1e-10 * scale) {
        Some(rate) => (HORIZON_DECAY_TIMES / rate).clamp(MIN_HORIZON, MAX_HORIZON),
        None => MAX_HORIZON,
    }
}

pub fn time_grid(cfg: &ScenarioConfig, model: &LindbladModel) -> Vec<f64> {
    let t_max = cfg.time.t_max.unwrap_or_else(|| auto_horizon(model));
    linspace(t_max, cfg.time.samples)
}

/// Largest concurrence along a trajectory: maximum over the sampled grid,
/// then golden-section refinement between the neighbours of the best sample.
#[derive(Debug, Clone)]
pub struct TransientPeak {
    pub time: f64,
    pub concurrence: f64,
    pub state: DensityMatrix,
}

pub fn transient_peak(model: &LindbladModel, rho0: &DensityMatrix, times: &[f64]) -> Result<TransientPeak> {
    let mut prop = Propagator::new(model);
    let traj = evolve::propagate_with(&mut prop, rho0, times)?;
    let values: Vec<f64> = traj.states().iter().map(concurrence).collect::<Result<_>>()?;
    let (k, &best) = values
        .iter()
        .enumerate()
        .fold((0, &values[0]), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    let mut peak = TransientPeak {
        time: times[k],
        concurrence: best,
        state: traj.states()[k].clone(),
    };
    if best <= 0.0 || times.len() < 3 {
        return Ok(peak);
    }
    let lo = k.saturating_sub(1);
    let hi = (k + 1).min(times.len() - 1);
    let base = traj.states()[lo].matrix().clone();
    let t0 = times[lo];
    let mut at = |s: f64| -> Result<(f64, DensityMatrix)> {
        let raw = if s == 0.0 { base.clone() } else { prop.evolve(&base, s) };
        let rho = DensityMatrix::new(crate::linalg::hermitian_part(&raw))?;
        Ok((concurrence(&rho)?, rho))
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, times[hi] - t0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = at(x1)?;
    let mut f2 = at(x2)?;
    for _ in 0..GOLDEN_ITERATIONS {
        if f1.0 >= f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = at(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = at(x2)?;
        }
    }
    let (x, f) = if f1.0 >= f2.0 { (x1, f1) } else { (x2, f2) };
    if f.0 > peak.concurrence {
        peak = TransientPeak {
            time: t0 + x,
            concurrence: f.0,
            state: f.1,
        };
    }
    Ok(peak)
}

fn keep<T>(r: Result<T>, first_error: &mut Option<Error>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            first_error.get_or_insert(e);
            None
        }
    }
}

fn is_rate(obs: Observable) -> bool {
    matches!(
        obs,
        Observable::RateEPlus | Observable::RateEMinus | Observable::RatePlusG | Observable::RateMinusG
    )
}

/// Evaluates `observables` for one configuration. Each value is computed
/// independently so one undefined quantity (say g² of a dark state) does
/// not hide the others; the first failure is returned alongside.
pub fn evaluate(cfg: &ScenarioConfig, observables: &[Observable]) -> (Vec<Option<f64>>, Option<Error>) {
    let mut values = vec![None; observables.len()];
    let setup = (|| -> Result<_> {
        cfg.validate()?;
        let layout = cfg.layout()?;
        let cs = layout.couplings();
        let model = build_model(&cs, &cfg.drive_spec()?)?;
        Ok((layout, cs, model))
    })();
    let (layout, cs, model) = match setup {
        Ok(x) => x,
        Err(e) => return (values, Some(e)),
    };
    let fields = field_amplitudes(&layout, Direction::Left);
    let mut first_error: Option<Error> = None;

    let steady: Option<SteadyState> = observables
        .iter()
        .any(|&o| !o.is_transient() && !is_rate(o))
        .then(|| keep(steady_state(&model), &mut first_error))
        .flatten();
    let peak: Option<TransientPeak> = observables
        .iter()
        .any(|o| o.is_transient())
        .then(|| {
            let run = cfg
                .initial_state
                .density_matrix(model.dim())
                .and_then(|rho0| transient_peak(&model, &rho0, &time_grid(cfg, &model)));
            keep(run, &mut first_error)
        })
        .flatten();
    let rates = observables
        .iter()
        .any(|&o| is_rate(o))
        .then(|| keep(transition_rates(&cs), &mut first_error))
        .flatten();

    for (slot, &obs) in values.iter_mut().zip(observables) {
        let value: Option<Result<f64>> = if is_rate(obs) {
            rates.map(|r| {
                Ok(match obs {
                    Observable::RateEPlus => r.gamma_e_plus,
                    Observable::RateEMinus => r.gamma_e_minus,
                    Observable::RatePlusG => r.gamma_plus_g,
                    _ => r.gamma_minus_g,
                })
            })
        } else if obs.is_transient() {
            peak.as_ref().map(|p| Ok(if obs == Observable::ConcurrenceMax { p.concurrence } else { p.time }))
        } else {
            steady.as_ref().map(|ss| {
                let rho = &ss.rho;
                Ok(match obs {
                    Observable::PGg => rho.population(0),
                    Observable::PGe => rho.population(1),
                    Observable::PEg => rho.population(2),
                    Observable::PEe => rho.population(3),
                    Observable::PBeta => rho.overlap(&super::config::beta_state()),
                    Observable::PPsiPlus => rho.overlap(&dressed_states(&cs)?.psi_plus.to_vector()),
                    Observable::PPsiMinus => rho.overlap(&dressed_states(&cs)?.psi_minus.to_vector()),
                    Observable::Concurrence => concurrence(rho)?,
                    Observable::Intensity => observables::intensity(rho, &fields)?,
                    Observable::G2Zero => observables::g2_zero(rho, &fields)?,
                    Observable::MandelQ => observables::mandel_q(rho, &fields)?,
                    Observable::RhoEe => observables::emission_elements(rho)?.rho_ee,
                    Observable::CoherenceSum => observables::emission_elements(rho)?.single_excitation_sum(),
                    _ => unreachable!("rate and transient observables handled above"),
                })
            })
        };
        *slot = value.and_then(|r| keep(r, &mut first_error));
    }
    (values, first_error)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub coords: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub coords: Vec<f64>,
    pub value: f64,
    /// Grid spacing along each axis, i.e. the uncertainty of `coords`.
    pub resolution: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    pub observables: Vec<Observable>,
    /// Row-major over the axes (first axis slowest).
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn observable_index(&self, obs: Observable) -> Option<usize> {
        self.observables.iter().position(|&o| o == obs)
    }

    pub fn values(&self, obs: Observable) -> Option<Vec<Option<f64>>> {
        let k = self.observable_index(obs)?;
        Some(self.points.iter().map(|p| p.values[k]).collect())
    }

    fn extremum(&self, obs: Observable, sign: f64) -> Option<Extremum> {
        let k = self.observable_index(obs)?;
        let (index, value) = self
            .points
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.values[k].filter(|v| v.is_finite()).map(|v| (i, v)))
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, b)) if sign * b >= sign * v => best,
                _ => Some((i, v)),
            })?;
        Some(Extremum {
            index,
            coords: self.points[index].coords.clone(),
            value,
            resolution: self.axes.iter().map(SweepAxis::resolution).collect(),
        })
    }

    pub fn argmax(&self, obs: Observable) -> Option<Extremum> {
        self.extremum(obs, 1.0)
    }

    pub fn argmin(&self, obs: Observable) -> Option<Extremum> {
        self.extremum(obs, -1.0)
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }

    /// Axis columns followed by one column per observable.
    pub fn to_table(&self, name: &str) -> Table {
        let columns: Vec<&str> = self
            .axes
            .iter()
            .map(|a| axis_column(&a.parameter))
            .chain(self.observables.iter().map(|o| o.name()))
            .collect();
        let mut t = Table::new(name, &columns);
        for p in &self.points {
            t.push(p.coords.iter().copied().map(Some).chain(p.values.iter().copied()).collect());
        }
        t
    }
}

fn grid(axes: &[SweepAxis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        let values = axis.values();
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

pub fn sweep(cfg: &ScenarioConfig) -> Result<SweepResult> {
    sweep_with_workers(cfg, worker_count())
}

/// Evaluates the config's sweep grid on `workers` threads. Per-point
/// failures are recorded in the result; only an invalid sweep spec fails.
pub fn sweep_with_workers(cfg: &ScenarioConfig, workers: usize) -> Result<SweepResult> {
    cfg.validate()?;
    let axes = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("config has no sweep section".into()))?
        .axes()
        .to_vec();
    if let Some(a) = axes.iter().find(|a| a.parameter == "delta_rel") {
        return Err(Error::Config(format!("`{}` can only be swept in the fig3a scenario", a.parameter)));
    }
    let observables = if cfg.outputs.is_empty() {
        DEFAULT_STEADY_OUTPUTS.to_vec()
    } else {
        cfg.outputs.clone()
    };
    let coords = grid(&axes);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        coords
            .par_iter()
            .map(|c| {
                let mut point_cfg = cfg.clone();
                point_cfg.sweep = None;
                let applied = axes.iter().zip(c).try_for_each(|(a, &v)| apply_parameter(&mut point_cfg, &a.parameter, v));
                let (values, error) = match applied {
                    Ok(()) => evaluate(&point_cfg, &observables),
                    Err(e) => (vec![None; observables.len()], Some(e)),
                };
                SweepPoint {
                    coords: c.clone(),
                    values,
                    error: error.map(|e| e.to_string()),
                }
            })
            .collect()
    });
    Ok(SweepResult { axes, observables, points })
}
