//! `wqed`: figure scenarios, parameter sweeps and consistency checks for
//! giant atoms in a waveguide.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wqed_core::evolve::steady_state;
use wqed_core::layout::{make_layout, LayoutKind};
use wqed_core::liouvillian::{build_model, DriveSpec};
use wqed_core::runner::{
    evaluate, format_float, load_config, run_scenario, sweep, write_tables, Observable, Table, SCENARIOS,
};
use wqed_core::{slh, spectral, Error, ErrorKind, Result};

const SLH_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "wqed", version, about = "Giant atoms in a waveguide: master equation, entanglement and photon statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure scenario with its built-in defaults.
    Scenario {
        /// fig1c, fig1d, fig2, fig3a, fig3b, fig4a, fig4b, fig5, figS2, figS3 or custom
        name: String,
        /// Override a config entry, e.g. `--set drive.rabi=2`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Write one CSV per table into DIR instead of printing to stdout.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Evaluate the sweep section of a config file and emit one CSV.
    Sweep {
        config: PathBuf,
        /// Write the CSV to FILE instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Coupling constants, dressed energies, transition rates and lifetimes.
    Rates {
        #[arg(long)]
        geometry: String,
        #[arg(long = "spacing-over-pi")]
        spacing_over_pi: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma0: f64,
        /// Rabi frequency used for the driven lifetime.
        #[arg(long, default_value_t = 1.5)]
        rabi: f64,
    },
    /// Compare the SLH-cascade master equation with the closed form.
    SlhCheck {
        /// nested, braided, separated, small or all
        #[arg(long)]
        geometry: String,
        /// Number of spacings in (0, π).
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// Rabi frequency of the driven comparison.
        #[arg(long, default_value_t = 1.5)]
        rabi: f64,
    },
    /// Steady state of a config: scalar observables and the density matrix.
    Steady { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Physics => 3,
                ErrorKind::Io => 4,
            })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Scenario { name, set, out } => scenario(&name, &set, out.as_deref()),
        Command::Sweep { config, out } => {
            let cfg = load_config(&config)?;
            let result = sweep(&cfg)?;
            if result.failures() > 0 {
                eprintln!("warning: {} of {} points failed", result.failures(), result.points.len());
            }
            let csv = result.to_table("sweep").to_csv()?;
            emit(&csv, out.as_deref())
        }
        Command::Rates { geometry, spacing_over_pi, gamma0, rabi } => rates(&geometry, spacing_over_pi, gamma0, rabi),
        Command::SlhCheck { geometry, grid, rabi } => slh_check(&geometry, grid, rabi),
        Command::Steady { config } => steady(&config),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::from(e).context(format!("writing {}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn scenario(name: &str, set: &[String], out: Option<&Path>) -> Result<()> {
    if !SCENARIOS.contains(&name) {
        return Err(Error::Config(format!("unknown scenario `{name}` (expected one of {})", SCENARIOS.join(", "))));
    }
    let overrides = set
        .iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Config(format!("override `{kv}` is not KEY=VALUE")))
        })
        .collect::<Result<Vec<_>>>()?;
    let tables = run_scenario(name, &overrides)?;
    match out {
        Some(dir) => {
            for path in write_tables(&tables, dir)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        None => {
            let mut text = String::new();
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    text.push('\n');
                }
                text.push_str(&format!("# {}\n", t.name));
                text.push_str(&t.to_csv()?);
            }
            emit(&text, None)
        }
    }
}

fn rates(geometry: &str, spacing_over_pi: f64, gamma0: f64, rabi: f64) -> Result<()> {
    let kind: LayoutKind = geometry.parse()?;
    let layout = make_layout(kind, spacing_over_pi * std::f64::consts::PI, gamma0)?;
    let cs = layout.couplings();
    let f = format_float;
    println!("geometry = {kind}");
    println!("kdx_over_pi = {}", f(spacing_over_pi));
    println!("lamb_shift_1 = {}", f(cs.lamb_shifts[0]));
    println!("lamb_shift_2 = {}", f(cs.lamb_shifts[1]));
    println!("delta12 = {}", f(cs.lamb_shift_difference()));
    println!("exchange12 = {}", f(cs.exchange12()));
    println!("gamma_11 = {}", f(cs.decay[(0, 0)]));
    println!("gamma_22 = {}", f(cs.decay[(1, 1)]));
    println!("gamma_12 = {}", f(cs.decay[(0, 1)]));
    let rates = spectral::transition_rates(&cs)?;
    let pair = spectral::dressed_states(&cs)?;
    println!("energy_plus = {}", f(pair.energy_plus));
    println!("energy_minus = {}", f(pair.energy_minus));
    println!("delta_tilde = {}", f(rates.delta_tilde));
    println!("rate_e_plus = {}", f(rates.gamma_e_plus));
    println!("rate_e_minus = {}", f(rates.gamma_e_minus));
    println!("rate_plus_g = {}", f(rates.gamma_plus_g));
    println!("rate_minus_g = {}", f(rates.gamma_minus_g));
    let (omega_plus, omega_minus) = spectral::drive_couplings(cs.lamb_shift_difference(), cs.exchange12(), rabi)?;
    println!("omega_plus = {}", f(omega_plus));
    println!("omega_minus = {}", f(omega_minus));
    let life = spectral::lifetimes(&cs, &DriveSpec::new(rabi, 0.0)?)?;
    println!("lifetime_minus_g = {}", f(life.from_minus_g));
    println!("lifetime_undriven_mode = {}", f(life.undriven_mode));
    println!("lifetime_driven_mode = {}", f(life.driven_mode));
    Ok(())
}

fn slh_check(geometry: &str, grid: usize, rabi: f64) -> Result<()> {
    if grid == 0 {
        return Err(Error::Config("--grid must be at least 1".into()));
    }
    let kinds: Vec<LayoutKind> = if geometry.eq_ignore_ascii_case("all") {
        LayoutKind::ALL.to_vec()
    } else {
        vec![geometry.parse()?]
    };
    let drives = [("undriven", DriveSpec::undriven()), ("driven", DriveSpec::new(rabi, 0.0)?)];
    let mut worst = 0.0f64;
    for kind in kinds {
        for (label, drive) in &drives {
            let mut max = 0.0f64;
            for k in 1..=grid {
                let theta = std::f64::consts::PI * k as f64 / (grid + 1) as f64;
                let layout = make_layout(kind, theta, 1.0)?;
                let closed = build_model(&layout.couplings(), drive)?.superoperator();
                let network = slh::network_model(&layout, drive)?.superoperator();
                max = max.max(wqed_core::linalg::max_abs_diff(&closed, &network));
            }
            println!("{kind} {label}: max |L_slh - L_closed| = {max:e}");
            worst = worst.max(max);
        }
    }
    if worst > SLH_TOL {
        return Err(Error::SlhExport(format!("deviation {worst:e} exceeds {SLH_TOL:e}")));
    }
    Ok(())
}

fn steady(path: &Path) -> Result<()> {
    let cfg = load_config(path)?;
    cfg.validate()?;
    let model = build_model(&cfg.layout()?.couplings(), &cfg.drive_spec()?)?;
    let ss = steady_state(&model)?;
    let observables: Vec<Observable> = Observable::ALL.iter().copied().filter(|o| !o.is_transient()).collect();
    let (values, _) = evaluate(&cfg, &observables);
    println!("residual = {}", format_float(ss.residual));
    println!("uniqueness_margin = {}", format_float(ss.uniqueness_margin));
    for (obs, value) in observables.iter().zip(values) {
        println!("{} = {}", obs.name(), value.map_or_else(|| "undefined".to_string(), format_float));
    }
    let mut rho = Table::new("rho", &["row", "col", "re", "im"]);
    let m = ss.rho.matrix();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            rho.push_values(&[r as f64, c as f64, m[(r, c)].re, m[(r, c)].im]);
        }
    }
    println!();
    emit(&rho.to_csv()?, None)
}
