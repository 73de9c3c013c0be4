//! Figure reproductions. Every scenario starts from a default config that
//! can be overridden key by key; scenarios that contrast giant and small
//! atoms emit one table for the configured geometry and one for small atoms.

use super::config::{InitialState, NamedState, Observable, ScenarioConfig, SweepAxis, SweepConfig};
use super::sweep::{axis_column, sweep_with_workers, time_grid, worker_count, SweepResult};
use super::table::Table;
use crate::error::{Error, Result};
use crate::evolve::{decompose, propagate};
use crate::layout::LayoutKind;
use crate::liouvillian::build_model;
use crate::observables::concurrence;
use crate::spectral::{dressed_states, drive_couplings};

pub const SCENARIOS: [&str; 11] = [
    "fig1c", "fig1d", "fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5", "figS2", "figS3", "custom",
];

/// Small-atom spacing (κΔx/π) with the largest transient concurrence, used
/// for the small-atom curves of the transient scenarios.
pub const SMALL_TRANSIENT_OPTIMUM: f64 = 0.19;

fn axis(parameter: &str, min: f64, max: f64, points: usize) -> Option<SweepConfig> {
    Some(SweepConfig::Single(SweepAxis {
        parameter: parameter.into(),
        min,
        max,
        points,
    }))
}

/// Default configuration of a named scenario.
pub fn scenario_defaults(name: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::new(LayoutKind::Nested, 0.01);
    match name {
        "fig1c" => {
            cfg.drive.rabi = 1.5;
            cfg.time.t_max = Some(20_000.0);
        }
        "fig1d" | "custom" => cfg.drive.rabi = 1.5,
        "fig2" => cfg.sweep = axis("geometry.spacing_over_pi", 0.005, 0.995, 199),
        "fig3a" => {
            cfg.drive.rabi = 1.0;
            cfg.sweep = axis("delta_rel", -10.0, 10.0, 401);
        }
        "fig3b" => {
            cfg.sweep = axis("drive.rabi", 0.1, 4.0, 60);
        }
        "figS2" => {
            cfg.sweep = Some(SweepConfig::Grid(vec![
                SweepAxis {
                    parameter: "drive.rabi".into(),
                    min: 0.1,
                    max: 4.0,
                    points: 40,
                },
                SweepAxis {
                    parameter: "geometry.spacing_over_pi".into(),
                    min: 0.005,
                    max: 0.2,
                    points: 40,
                },
            ]));
        }
        "fig4a" => {
            cfg.initial_state = InitialState::Named(NamedState::Ee);
            cfg.time.samples = 801;
            cfg.sweep = axis("geometry.spacing_over_pi", 0.01, 0.99, 99);
        }
        "fig4b" | "figS3" => {
            cfg.geometry.spacing_over_pi = 0.99;
            cfg.initial_state = InitialState::Named(NamedState::Ee);
            cfg.time.samples = 801;
        }
        "fig5" => cfg.drive.rabi = 1.5,
        other => {
            return Err(Error::Config(format!(
                "unknown scenario `{other}` (available: {})",
                SCENARIOS.join(", ")
            )))
        }
    }
    Ok(cfg)
}

/// Runs a scenario with `key=value` overrides applied to its defaults.
pub fn run_scenario(name: &str, overrides: &[(String, String)]) -> Result<Vec<Table>> {
    let mut cfg = scenario_defaults(name)?;
    for (key, value) in overrides {
        cfg.set(key, value)?;
    }
    run_scenario_config(name, &cfg, worker_count())
}

pub fn run_scenario_config(name: &str, cfg: &ScenarioConfig, workers: usize) -> Result<Vec<Table>> {
    cfg.validate()?;
    let run = match name {
        "fig1c" => fig1c(cfg),
        "fig1d" => fig1d(cfg),
        "fig2" => fig2(cfg, workers),
        "fig3a" => fig3a(cfg),
        "fig3b" => steady_grid(cfg, workers, "fig3b"),
        "figS2" => steady_grid(cfg, workers, "figS2"),
        "fig4a" => fig4a(cfg, workers),
        "fig4b" => fig4b(cfg),
        "fig5" => fig5(cfg, workers),
        "figS3" => figs3(cfg),
        "custom" => custom(cfg, workers),
        other => Err(Error::Config(format!("unknown scenario `{other}`"))),
    };
    run.map_err(|e| match e.kind() {
        crate::error::ErrorKind::Physics => e.context(format!("scenario {name}")),
        _ => e,
    })
}

/// The configured geometry and, unless it already is one, a small-atom copy.
fn variants(cfg: &ScenarioConfig, small_spacing: Option<f64>) -> Vec<ScenarioConfig> {
    let mut out = vec![cfg.clone()];
    if cfg.geometry.kind != LayoutKind::Small {
        let mut small = cfg.clone();
        small.geometry.kind = LayoutKind::Small;
        if let Some(s) = small_spacing {
            small.geometry.spacing_over_pi = s;
        }
        out.push(small);
    }
    out
}

fn table_name(prefix: &str, cfg: &ScenarioConfig) -> String {
    format!("{prefix}_{}", cfg.geometry.kind)
}

fn require_sweep<'a>(cfg: &'a ScenarioConfig, scenario: &str) -> Result<&'a SweepConfig> {
    cfg.sweep
        .as_ref()
        .ok_or_else(|| Error::Config(format!("scenario {scenario} needs a sweep section")))
}

fn fig1c(cfg: &ScenarioConfig) -> Result<Vec<Table>> {
    let beta = super::config::beta_state();
    variants(cfg, None)
        .iter()
        .map(|v| {
            let model = build_model(&v.layout()?.couplings(), &v.drive_spec()?)?;
            let rho0 = v.initial_state.density_matrix(model.dim())?;
            let traj = propagate(&model, &rho0, &time_grid(v, &model))?;
            let mut t = Table::new(
                table_name("fig1c", v),
                &["t", "p_gg", "p_ge", "p_eg", "p_ee", "p_beta", "concurrence"],
            );
            for (time, rho) in traj.iter() {
                t.push_values(&[
                    time,
                    rho.population(0),
                    rho.population(1),
                    rho.population(2),
                    rho.population(3),
                    rho.overlap(&beta),
                    concurrence(rho)?,
                ]);
            }
            Ok(t)
        })
        .collect()
}

/// Steady-state density matrix elements (tomography bars).
fn fig1d(cfg: &ScenarioConfig) -> Result<Vec<Table>> {
    variants(cfg, None)
        .iter()
        .map(|v| {
            let model = build_model(&v.layout()?.couplings(), &v.drive_spec()?)?;
            let ss = crate::evolve::steady_state(&model)?;
            let mut t = Table::new(table_name("fig1d", v), &["row", "col", "re", "im"]);
            let m = ss.rho.matrix();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    t.push_values(&[i as f64, j as f64, m[(i, j)].re, m[(i, j)].im]);
                }
            }
            Ok(t)
        })
        .collect()
}

fn fig2(cfg: &ScenarioConfig, workers: usize) -> Result<Vec<Table>> {
    require_sweep(cfg, "fig2")?;
    variants(cfg, None)
        .iter()
        .map(|v| {
            let mut v = v.clone();
            v.outputs = vec![
                Observable::RateEPlus,
                Observable::RateEMinus,
                Observable::RatePlusG,
                Observable::RateMinusG,
            ];
            Ok(sweep_with_workers(&v, workers)?.to_table(&table_name("fig2", &v)))
        })
        .collect()
}

/// Ω± against δ₁₂/Δ₁₂ at unit Δ₁₂, scaled by √2·Ω₀.
fn fig3a(cfg: &ScenarioConfig) -> Result<Vec<Table>> {
    let sweep = require_sweep(cfg, "fig3a")?;
    let [axis] = sweep.axes() else {
        return Err(Error::Config("fig3a sweeps a single axis (delta_rel)".into()));
    };
    let rabi = cfg.drive.rabi;
    if rabi <= 0.0 {
        return Err(Error::Config("fig3a needs drive.rabi > 0".into()));
    }
    let mut t = Table::new("fig3a", &["delta_rel", "omega_plus_over_sqrt2", "omega_minus_over_sqrt2"]);
    let norm = std::f64::consts::SQRT_2 * rabi;
    for x in axis.values() {
        let (p, m) = drive_couplings(x, 1.0, rabi)?;
        t.push_values(&[x, p / norm, m / norm]);
    }
    Ok(vec![t])
}

/// Steady-state concurrence over Ω₀ (and optionally κΔx).
fn steady_grid(cfg: &ScenarioConfig, workers: usize, prefix: &str) -> Result<Vec<Table>> {
    require_sweep(cfg, prefix)?;
    variants(cfg, None)
        .iter()
        .map(|v| {
            let mut v = v.clone();
            v.outputs = vec![Observable::Concurrence];
            let result = sweep_with_workers(&v, workers)?;
            Ok(grid_table(&table_name(prefix, &v), &v, &result))
        })
        .collect()
}

fn coordinate(cfg: &ScenarioConfig, result: &SweepResult, coords: &[f64], parameter: &str) -> f64 {
    match result.axes.iter().position(|a| a.parameter == parameter) {
        Some(k) => coords[k],
        None => match parameter {
            "drive.rabi" => cfg.drive.rabi,
            _ => cfg.geometry.spacing_over_pi,
        },
    }
}

fn grid_table(name: &str, cfg: &ScenarioConfig, result: &SweepResult) -> Table {
    let mut t = Table::new(name, &["omega0", "kdx_over_pi", "concurrence_ss"]);
    for p in &result.points {
        t.push(vec![
            Some(coordinate(cfg, result, &p.coords, "drive.rabi")),
            Some(coordinate(cfg, result, &p.coords, "geometry.spacing_over_pi")),
            p.values[0],
        ]);
    }
    t
}

/// Largest transient concurrence from the initial state, per spacing.
fn fig4a(cfg: &ScenarioConfig, workers: usize) -> Result<Vec<Table>> {
    let sweep = require_sweep(cfg, "fig4a")?;
    let column = axis_column(&sweep.axes()[0].parameter).to_string();
    variants(cfg, None)
        .iter()
        .map(|v| {
            let mut v = v.clone();
            v.outputs = vec![Observable::ConcurrenceMax];
            let result = sweep_with_workers(&v, workers)?;
            let mut t = Table::new(table_name("fig4a", &v), &[column.as_str(), "concurrence"]);
            for p in &result.points {
                t.push(vec![Some(p.coords[0]), p.values[0]]);
            }
            Ok(t)
        })
        .collect()
}

fn fig4b(cfg: &ScenarioConfig) -> Result<Vec<Table>> {
    variants(cfg, Some(SMALL_TRANSIENT_OPTIMUM))
        .iter()
        .map(|v| {
            let model = build_model(&v.layout()?.couplings(), &v.drive_spec()?)?;
            let rho0 = v.initial_state.density_matrix(model.dim())?;
            let traj = propagate(&model, &rho0, &time_grid(v, &model))?;
            let mut t = Table::new(table_name("fig4b", v), &["t", "concurrence"]);
            for (time, rho) in traj.iter() {
                t.push_values(&[time, concurrence(rho)?]);
            }
            Ok(t)
        })
        .collect()
}

/// Photon statistics against pump detuning over [−2Δ₁₂, 2Δ₁₂], with Δ₁₂
/// taken from the configured geometry and shared by the small-atom table.
fn fig5(cfg: &ScenarioConfig, workers: usize) -> Result<Vec<Table>> {
    let mut base = cfg.clone();
    if base.sweep.is_none() {
        let exchange = cfg.layout()?.couplings().exchange12().abs();
        base.sweep = axis("drive.detuning", -2.0 * exchange, 2.0 * exchange, 81);
    }
    variants(&base, None)
        .iter()
        .map(|v| {
            let mut v = v.clone();
            v.outputs = vec![
                Observable::G2Zero,
                Observable::MandelQ,
                Observable::PBeta,
                Observable::Concurrence,
            ];
            Ok(sweep_with_workers(&v, workers)?.to_table(&table_name("fig5", &v)))
        })
        .collect()
}

fn figs3(cfg: &ScenarioConfig) -> Result<Vec<Table>> {
    variants(cfg, Some(SMALL_TRANSIENT_OPTIMUM))
        .iter()
        .map(|v| {
            let cs = v.layout()?.couplings();
            let pair = dressed_states(&cs)?;
            let model = build_model(&cs, &v.drive_spec()?)?;
            let rho0 = v.initial_state.density_matrix(model.dim())?;
            let traj = propagate(&model, &rho0, &time_grid(v, &model))?;
            let mut t = Table::new(table_name("figS3", v), &["t", "p_psi_plus", "p_psi_minus"]);
            for (time, rho) in traj.iter() {
                let d = decompose(rho, &pair)?;
                t.push_values(&[time, d.plus, d.minus]);
            }
            Ok(t)
        })
        .collect()
}

/// A sweep table when the config has a sweep section, otherwise a time
/// trace of the requested observables.
fn custom(cfg: &ScenarioConfig, workers: usize) -> Result<Vec<Table>> {
    if cfg.sweep.is_some() {
        return Ok(vec![sweep_with_workers(cfg, workers)?.to_table("custom")]);
    }
    let outputs: Vec<Observable> = if cfg.outputs.is_empty() {
        vec![
            Observable::PGg,
            Observable::PGe,
            Observable::PEg,
            Observable::PEe,
            Observable::PBeta,
            Observable::Concurrence,
        ]
    } else {
        cfg.outputs.clone()
    };
    let cs = cfg.layout()?.couplings();
    let model = build_model(&cs, &cfg.drive_spec()?)?;
    let rho0 = cfg.initial_state.density_matrix(model.dim())?;
    let traj = propagate(&model, &rho0, &time_grid(cfg, &model))?;
    let fields = crate::observables::field_amplitudes(&cfg.layout()?, crate::observables::Direction::Left);
    let pair = dressed_states(&cs).ok();
    let beta = super::config::beta_state();
    let columns: Vec<&str> = std::iter::once("t").chain(outputs.iter().map(|o| o.name())).collect();
    let mut t = Table::new("custom", &columns);
    for (time, rho) in traj.iter() {
        let mut row = vec![Some(time)];
        for &o in &outputs {
            let value = match o {
                Observable::PGg => Some(rho.population(0)),
                Observable::PGe => Some(rho.population(1)),
                Observable::PEg => Some(rho.population(2)),
                Observable::PEe => Some(rho.population(3)),
                Observable::PBeta => Some(rho.overlap(&beta)),
                Observable::PPsiPlus => pair.as_ref().map(|p| rho.overlap(&p.psi_plus.to_vector())),
                Observable::PPsiMinus => pair.as_ref().map(|p| rho.overlap(&p.psi_minus.to_vector())),
                Observable::Concurrence => concurrence(rho).ok(),
                Observable::Intensity => crate::observables::intensity(rho, &fields).ok(),
                Observable::G2Zero => crate::observables::g2_zero(rho, &fields).ok(),
                Observable::MandelQ => crate::observables::mandel_q(rho, &fields).ok(),
                Observable::RhoEe => Some(rho.population(3)),
                Observable::CoherenceSum => crate::observables::emission_elements(rho).ok().map(|e| e.single_excitation_sum()),
                other => {
                    return Err(Error::Config(format!(
                        "output `{}` is not available for a time trace",
                        other.name()
                    )))
                }
            };
            row.push(value);
        }
        t.push(row);
    }
    Ok(vec![t])
}
