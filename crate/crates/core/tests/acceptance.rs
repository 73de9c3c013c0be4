//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! (plus informational lines) and exits nonzero if any criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wqed_core::evolve::{decompose, linspace, propagate, steady_state, Propagator};
use wqed_core::layout::{make_layout, LayoutKind};
use wqed_core::linalg::{kron, max_abs_diff, trace, CMatrix, C64};
use wqed_core::liouvillian::{build_model, DensityMatrix, DriveSpec};
use wqed_core::observables::{
    concurrence, emission_elements, field_amplitudes, g2_tau, g2_zero, intensity, mandel_q, Direction,
};
use wqed_core::runner::{sweep_with_workers, time_grid, transient_peak, Observable, ScenarioConfig, SweepAxis, SweepConfig};
use wqed_core::slh::network_model;
use wqed_core::spectral::{self, dressed_states, drive_couplings, extracted_rates, transition_rates};

// criterion 1
const C1_MIN_CONCURRENCE: f64 = 0.95;
const C1_MIN_P_BETA: f64 = 0.95;
const C1_SMALL_ZERO: f64 = 1e-6;
const C1_RUNTIME: Duration = Duration::from_secs(1);
// criterion 2
const C2_MIN_CONCURRENCE: f64 = 0.99;
const C2_ARGMAX: (f64, f64) = (1.5, 2.5);
const C2_SMALL_MAX: f64 = 0.1;
const C2_RUNTIME: Duration = Duration::from_secs(10);
// criterion 3
const C3_TOL: f64 = 1e-10;
const C3_RUNTIME: Duration = Duration::from_secs(5);
// criterion 4
const C4_TOL: f64 = 1e-10;
const C4_RUNTIME: Duration = Duration::from_secs(30);
// criterion 5
const C5_REL_TOL: f64 = 1e-3;
const C5_COUPLING_TOL: f64 = 1e-12;
// criterion 6
const C6_G2_BAND: (f64, f64) = (1.8e2, 3.2e2);
const C6_IDENTITY_TOL: f64 = 1e-10;
const C6_RHO_EE: (f64, f64) = (0.15e-4, 0.5);
const C6_COHERENCE: (f64, f64) = (4.59e-4, 0.25);
const C6_RUNTIME: Duration = Duration::from_secs(10);
// criterion 7
const C7_MIN_RATIO: f64 = 5.0;
const C7_SMALL_ARGMAX: (f64, f64) = (0.19, 0.03);
const C7_RUNTIME: Duration = Duration::from_secs(20);
// criterion 8
const C8_TRACE_DRIFT: f64 = 1e-9;
const C8_SEMIGROUP: f64 = 1e-9;
const C8_RESIDUAL: f64 = 1e-10;
const C8_G2_LONG: f64 = 1e-3;
const C8_LOCAL_UNITARY: f64 = 1e-9;
const C8_GAMMA: f64 = 1e-10;
const C8_MIN_LIFETIME: f64 = 100.0;

const GRID: usize = 100;

fn theta_grid(n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |k| PI * k as f64 / (n + 1) as f64)
}

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn criterion(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id.to_string());
        }
    }

    fn info(&self, detail: String) {
        println!("     info: {detail}");
    }
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

fn rel_within(x: f64, (target, rel): (f64, f64)) -> bool {
    ((x - target) / target).abs() <= rel
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn steady_entanglement(r: &mut Report) {
    let ((c_nested, p_beta, c_small), elapsed) = timed(|| {
        let beta = wqed_core::runner::beta_state();
        let solve = |kind| {
            let layout = make_layout(kind, 0.01 * PI, 1.0).unwrap();
            steady_state(&build_model(&layout.couplings(), &DriveSpec::resonant(1.5)).unwrap()).unwrap().rho
        };
        let nested = solve(LayoutKind::Nested);
        let small = solve(LayoutKind::Small);
        (concurrence(&nested).unwrap(), nested.overlap(&beta), concurrence(&small).unwrap())
    });
    let ok = c_nested >= C1_MIN_CONCURRENCE && p_beta >= C1_MIN_P_BETA && c_small.abs() < C1_SMALL_ZERO && elapsed < C1_RUNTIME;
    r.criterion(
        "1",
        ok,
        format!("nested C = {c_nested:.6}, p_beta = {p_beta:.6}; small C = {c_small:e}; {elapsed:.2?}"),
    );
}

fn drive_optimization(r: &mut Report) {
    let (result, elapsed) = timed(|| {
        let run = |kind| {
            let mut cfg = ScenarioConfig::new(kind, 0.01);
            cfg.outputs = vec![Observable::Concurrence];
            cfg.sweep = Some(SweepConfig::Single(SweepAxis {
                parameter: "drive.rabi".into(),
                min: 0.1,
                max: 4.0,
                points: 60,
            }));
            sweep_with_workers(&cfg, 4).unwrap().argmax(Observable::Concurrence).unwrap()
        };
        (run(LayoutKind::Nested), run(LayoutKind::Small))
    });
    let (nested, small) = result;
    let argmax = nested.coords[0];
    let ok = nested.value >= C2_MIN_CONCURRENCE && within(argmax, C2_ARGMAX) && small.value < C2_SMALL_MAX && elapsed < C2_RUNTIME;
    r.criterion(
        "2",
        ok,
        format!(
            "nested max C = {:.6} at Ω0 = {argmax:.4} (grid step {:.4}); small max C = {:.4}; {elapsed:.2?}",
            nested.value, nested.resolution[0], small.value
        ),
    );
}

fn rate_identities(r: &mut Report) {
    let (result, elapsed) = timed(|| {
        let mut closed_vs_extracted = 0.0f64;
        let mut sum_rules = 0.0f64;
        let mut small_symmetry = 0.0f64;
        let mut skipped = 0;
        for kind in LayoutKind::ALL {
            for theta in theta_grid(GRID) {
                let cs = make_layout(kind, theta, 1.0).unwrap().couplings();
                let (rates, pair) = match (transition_rates(&cs), dressed_states(&cs)) {
                    (Ok(r), Ok(p)) => (r, p),
                    _ => {
                        skipped += 1;
                        continue;
                    }
                };
                let model = build_model(&cs, &DriveSpec::undriven()).unwrap();
                let extracted = extracted_rates(&model, &pair).unwrap();
                for (a, b) in rates.as_array().iter().zip(extracted) {
                    closed_vs_extracted = closed_vs_extracted.max((a - b).abs());
                }
                let total = cs.decay[(0, 0)] + cs.decay[(1, 1)];
                sum_rules = sum_rules
                    .max((rates.gamma_e_plus + rates.gamma_e_minus - total).abs())
                    .max((rates.gamma_plus_g + rates.gamma_minus_g - total).abs());
                if kind == LayoutKind::Small {
                    small_symmetry = small_symmetry
                        .max((rates.gamma_e_plus - rates.gamma_plus_g).abs())
                        .max((rates.gamma_e_minus - rates.gamma_minus_g).abs());
                }
            }
        }
        (closed_vs_extracted, sum_rules, small_symmetry, skipped)
    });
    let (diff, sums, small, skipped) = result;
    let ok = diff < C3_TOL && sums < C3_TOL && small < C3_TOL && skipped == 0 && elapsed < C3_RUNTIME;
    r.criterion(
        "3",
        ok,
        format!(
            "closed vs extracted {diff:e}, sum rules {sums:e}, small Γe±−Γ±g {small:e} over 4×{GRID} spacings \
             ({skipped} degenerate); {elapsed:.2?}"
        ),
    );
}

fn slh_oracle(r: &mut Report) {
    let (worst, elapsed) = timed(|| {
        let mut worst = 0.0f64;
        for kind in [LayoutKind::Nested, LayoutKind::Braided, LayoutKind::Separated] {
            for drive in [DriveSpec::undriven(), DriveSpec::resonant(1.5)] {
                for theta in theta_grid(GRID) {
                    let layout = make_layout(kind, theta, 1.0).unwrap();
                    let closed = build_model(&layout.couplings(), &drive).unwrap().superoperator();
                    let network = network_model(&layout, &drive).unwrap().superoperator();
                    worst = worst.max(max_abs_diff(&closed, &network));
                }
            }
        }
        worst
    });
    r.criterion(
        "4",
        worst < C4_TOL && elapsed < C4_RUNTIME,
        format!("max |L_slh − L_closed| = {worst:e} over 3 geometries × 2 drives × {GRID} spacings; {elapsed:.2?}"),
    );
}

fn asymptotics(r: &mut Report) {
    let theta = 1e-3;
    let cs = make_layout(LayoutKind::Nested, theta, 1.0).unwrap().couplings();
    let ratio = transition_rates(&cs).unwrap().delta_tilde / theta;
    let target = 2.0 * 10f64.sqrt();
    let asymptote_ok = ((ratio - target) / target).abs() < C5_REL_TOL;

    let mut nonzero = 0;
    for kind in [LayoutKind::Braided, LayoutKind::Separated] {
        for theta in theta_grid(GRID) {
            if make_layout(kind, theta, 1.0).unwrap().couplings().lamb_shift_difference() != 0.0 {
                nonzero += 1;
            }
        }
    }

    let mut coupling_dev = 0.0f64;
    for theta in theta_grid(10) {
        let exchange = make_layout(LayoutKind::Braided, theta, 1.0).unwrap().couplings().exchange12();
        for rabi in [0.5, 1.5, 3.0] {
            let (plus, minus) = drive_couplings(0.0, exchange, rabi).unwrap();
            coupling_dev = coupling_dev.max((plus.abs() - SQRT_2 * rabi).abs()).max(minus.abs());
        }
    }
    r.criterion(
        "5",
        asymptote_ok && nonzero == 0 && coupling_dev < C5_COUPLING_TOL,
        format!(
            "Δ̃/(γ0κΔx) = {ratio:.6} vs 2√10 = {target:.6}; δ12 ≠ 0 at {nonzero} braided/separated spacings; \
             |Ω± − (√2Ω0, 0)| ≤ {coupling_dev:e}"
        ),
    );
}

fn photon_statistics(r: &mut Report) {
    let start = Instant::now();
    let theta = 0.01 * PI;
    let nested = make_layout(LayoutKind::Nested, theta, 1.0).unwrap();
    let small = make_layout(LayoutKind::Small, theta, 1.0).unwrap();
    let span = 2.0 * nested.couplings().exchange12().abs();
    let detunings: Vec<f64> = (0..81).map(|k| -span + 2.0 * span * k as f64 / 80.0).collect();
    let fields = field_amplitudes(&nested, Direction::Left);
    let small_fields = field_amplitudes(&small, Direction::Left);
    let f12 = (fields.coefficients[0] * fields.coefficients[1]).norm_sqr();

    let mut identity_dev = 0.0f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
    let mut at_zero = None;
    let mut small_q_max = f64::NEG_INFINITY;
    for &dp in &detunings {
        let drive = DriveSpec::new(1.5, dp).unwrap();
        let rho = steady_state(&build_model(&nested.couplings(), &drive).unwrap()).unwrap().rho;
        let g2 = g2_zero(&rho, &fields).unwrap();
        let i = intensity(&rho, &fields).unwrap();
        let elements = emission_elements(&rho).unwrap();
        let identity = 4.0 * elements.rho_ee * f12 / (i * i);
        identity_dev = identity_dev.max(((g2 - identity) / g2).abs());
        let sample = (g2, dp, elements.rho_ee, elements.single_excitation_sum());
        if g2 > best.0 {
            best = sample;
        }
        if dp.abs() < 1e-12 {
            at_zero = Some(sample);
        }
        let rho_small = steady_state(&build_model(&small.couplings(), &drive).unwrap()).unwrap().rho;
        small_q_max = small_q_max.max(mandel_q(&rho_small, &small_fields).unwrap());
    }
    let elapsed = start.elapsed();
    let (g2_max, dp_max, rho_ee, coherence) = best;
    let ok = within(g2_max, C6_G2_BAND)
        && identity_dev < C6_IDENTITY_TOL
        && rel_within(rho_ee, C6_RHO_EE)
        && rel_within(coherence, C6_COHERENCE)
        && small_q_max < 0.0
        && elapsed < C6_RUNTIME;
    r.criterion(
        "6",
        ok,
        format!(
            "max g2(0) = {g2_max:.4e} at Δp = {dp_max:.5} (band [{:.1e}, {:.1e}]); ϱee there = {rho_ee:.3e}, \
             ϱge+ϱeg+2ϱod = {coherence:.3e}; identity rel dev {identity_dev:e}; small max Q = {small_q_max:.3e}; {elapsed:.2?}",
            C6_G2_BAND.0, C6_G2_BAND.1
        ),
    );
    if let Some((g2, _, rho_ee, coherence)) = at_zero {
        r.info(format!("at Δp = 0: g2(0) = {g2:.4e}, ϱee = {rho_ee:.4e}, ϱge+ϱeg+2ϱod = {coherence:.4e}"));
    }
}

fn sudden_birth(r: &mut Report) {
    let start = Instant::now();
    let mut cfg = ScenarioConfig::new(LayoutKind::Nested, 0.99);
    cfg.set("initial_state", "ee").unwrap();
    cfg.time.samples = 801;
    let layout = cfg.layout().unwrap();
    let cs = layout.couplings();
    let model = build_model(&cs, &DriveSpec::undriven()).unwrap();
    let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
    let peak = transient_peak(&model, &rho0, &time_grid(&cfg, &model)).unwrap();
    let populations = decompose(&peak.state, &dressed_states(&cs).unwrap()).unwrap();

    let mut small_cfg = cfg.clone();
    small_cfg.geometry.kind = LayoutKind::Small;
    small_cfg.outputs = vec![Observable::ConcurrenceMax];
    small_cfg.sweep = Some(SweepConfig::Single(SweepAxis {
        parameter: "geometry.spacing_over_pi".into(),
        min: 0.01,
        max: 0.99,
        points: 99,
    }));
    let result = sweep_with_workers(&small_cfg, 4).unwrap();
    let values: Vec<f64> = result.values(Observable::ConcurrenceMax).unwrap().into_iter().map(|v| v.unwrap()).collect();
    let small_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // C_max is mirror-symmetric in κΔx → π − κΔx; report the lower branch
    let idx = values.iter().position(|&v| v >= small_max * (1.0 - 1e-9)).unwrap();
    let small_argmax = result.points[idx].coords[0];
    let elapsed = start.elapsed();

    let ratio = peak.concurrence / small_max;
    let ok = ratio >= C7_MIN_RATIO
        && (small_argmax - C7_SMALL_ARGMAX.0).abs() <= C7_SMALL_ARGMAX.1
        && populations.minus > populations.plus
        && elapsed < C7_RUNTIME;
    r.criterion(
        "7",
        ok,
        format!(
            "nested C_max = {:.4} at t = {:.1}, small optimum {small_max:.4} at κΔx = {small_argmax:.2}π, ratio {ratio:.2}; \
             p_ψ− = {:.4}, p_ψ+ = {:.2e}; {elapsed:.2?}",
            peak.concurrence, peak.time, populations.minus, populations.plus
        ),
    );
}

fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a = CMatrix::from_fn(4, 4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &a * a.adjoint();
    let tr = trace(&m);
    DensityMatrix::new(m / tr).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(2, 2, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .qr()
        .q()
}

fn hygiene(r: &mut Report) {
    let layout = make_layout(LayoutKind::Nested, 0.01 * PI, 1.0).unwrap();
    let model = build_model(&layout.couplings(), &DriveSpec::resonant(1.5)).unwrap();
    let rho_ee = DensityMatrix::basis_state(4, 3).unwrap();

    let trajectory = propagate(&model, &rho_ee, &linspace(100.0, 1001)).unwrap();
    let drift = trajectory.states().iter().map(|s| (trace(s.matrix()) - C64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);

    let mut prop = Propagator::new(&model);
    let x = rho_ee.matrix().clone();
    let halfway = prop.evolve(&x, 3.7);
    let composed = prop.evolve(&halfway, 5.9);
    let direct = prop.evolve(&x, 9.6);
    let semigroup = max_abs_diff(&composed, &direct);

    let residual = steady_state(&model).unwrap().residual;

    let small = make_layout(LayoutKind::Small, 0.2 * PI, 1.0).unwrap();
    let small_model = build_model(&small.couplings(), &DriveSpec::resonant(1.0)).unwrap();
    let small_ss = steady_state(&small_model).unwrap().rho;
    let curve = g2_tau(&small_model, &small_ss, &field_amplitudes(&small, Direction::Left), &[200.0]).unwrap();
    let g2_long = (curve.g2[0] - 1.0).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lu = 0.0f64;
    for _ in 0..100 {
        let rho = random_density(&mut rng);
        let u = kron(&random_unitary(&mut rng), &random_unitary(&mut rng));
        let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
        lu = lu.max((concurrence(&rho).unwrap() - concurrence(&rotated).unwrap()).abs());
    }

    let mut min_eig = f64::INFINITY;
    let mut nested_det = 0.0f64;
    for kind in LayoutKind::ALL {
        for theta in theta_grid(GRID) {
            let cs = make_layout(kind, theta, 1.0).unwrap().couplings();
            min_eig = min_eig.min(cs.min_decay_eigenvalue());
            if kind == LayoutKind::Nested {
                nested_det = nested_det.max(cs.decay.determinant().abs());
            }
        }
    }

    let ok = drift < C8_TRACE_DRIFT
        && semigroup < C8_SEMIGROUP
        && residual < C8_RESIDUAL
        && g2_long < C8_G2_LONG
        && lu < C8_LOCAL_UNITARY
        && min_eig > -C8_GAMMA
        && nested_det < C8_GAMMA;
    r.criterion(
        "8",
        ok,
        format!(
            "trace drift {drift:e}, semigroup {semigroup:e}, residual {residual:e}, |g2(τ=200) − 1| {g2_long:e}, \
             local-unitary {lu:e}, min eig Γ {min_eig:e}, nested |det Γ| {nested_det:e}"
        ),
    );

    let cs = layout.couplings();
    let life = spectral::lifetimes(&cs, &DriveSpec::resonant(1.5)).unwrap();
    r.criterion(
        "8-lifetime",
        life.undriven_mode > C8_MIN_LIFETIME,
        format!(
            "slowest undriven mode at κΔx = 0.01π lives {:.1}/γ0; driven (Ω0 = 1.5) {:.1}/γ0; 1/Γ−g = {:.3}/γ0",
            life.undriven_mode, life.driven_mode, life.from_minus_g
        ),
    );
}

fn main() {
    // `cargo test -- --list` and friends: nothing to enumerate
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut report = Report { failed: Vec::new() };
    steady_entanglement(&mut report);
    drive_optimization(&mut report);
    rate_identities(&mut report);
    slh_oracle(&mut report);
    asymptotics(&mut report);
    photon_statistics(&mut report);
    sudden_birth(&mut report);
    hygiene(&mut report);
    if report.failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {}", report.failed.join(", "));
        std::process::exit(1);
    }
}
