//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use dqme_cli::config::{parse_config, SweepConfig};
use dqme_core::dqme::{converged_dressed_currents, solve_dressed, Channel};
use dqme_core::floquet::{
    converged_floquet_currents, fme_rates_and_currents, floquet_solve, sideband_table, FloquetControls,
    SidebandSpectrum, PARSEVAL_TOLERANCE, UNITARITY_TOLERANCE,
};
use dqme_core::oracle::{basis_projector, near_resonance_current, nesb_analytic_currents, FullMasterEquation};
use dqme_core::{
    build_rotated, dressed_currents, CurrentReport, DriveSpec, Method, ModelSpec, PopulationVector, RateTable,
    ReservoirLabel, Reservoirs,
};

const NESB: ModelSpec = ModelSpec::Nesb { epsilon: 1.0 };
const SPINS: ModelSpec = ModelSpec::CoupledSpins {
    epsilon_l: 1.0,
    epsilon_r: 1.0,
    hopping: 0.2,
};

fn kerr(chi: f64) -> ModelSpec {
    ModelSpec::Kerr {
        epsilon: 1.0,
        chi,
        n_max: 20,
    }
}

fn fig2() -> Reservoirs {
    Reservoirs::symmetric(1.2, 0.4, 0.001, 10.0).unwrap()
}

fn drive(eta: f64, omega_d: f64) -> DriveSpec {
    DriveSpec::new(eta, omega_d).unwrap()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

type Outcome = Result<String, String>;

struct Gate {
    failed: Vec<usize>,
}

impl Gate {
    fn run(&mut self, id: usize, name: &str, check: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                self.failed.push(id);
                ("FAIL", d)
            }
        };
        println!("{tag} [{id}] {name}: {detail} ({secs:.2} s)");
    }
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn analytic_grid() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &wd in &linspace(0.0, 0.95, 20) {
        for &eta in &linspace(0.0, 0.4, 20) {
            let d = drive(eta, wd);
            let got = dressed_currents(&NESB, &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?;
            let want = nesb_analytic_currents(&NESB, &d, &fig2()).map_err(|e| e.to_string())?;
            worst = worst.max(got.relative_distance(&want));
        }
    }
    let t = start.elapsed();
    verdict(
        worst < 1e-12 && within(t, 5.0),
        format!("max relative error {worst:.2e} (limit 1e-12), {:.2} s (limit 5 s)", t.as_secs_f64()),
    )
}

/// Returns the outcome together with the tolerance used, which criterion 3 reuses.
fn fme_overlap() -> (Outcome, f64) {
    let start = Instant::now();
    let mut pairs = Vec::new();
    for k in 1..=9 {
        let d = drive(0.1, 0.1 * k as f64);
        let driven = dressed_currents(&NESB, &d, &fig2(), Method::Driven);
        let floquet = converged_floquet_currents(&NESB, &d, &fig2(), &FloquetControls::default());
        match (driven, floquet) {
            (Ok(a), Ok(b)) => pairs.push((a.j_right, b.report.j_right)),
            (Err(e), _) | (_, Err(e)) => return (Err(e.to_string()), f64::NAN),
        }
    }
    let t = start.elapsed();
    let scale = pairs.iter().fold(0.0f64, |m, p| m.max(p.0.abs()));
    let tolerance = 1e-2 * scale;
    let worst = pairs.iter().fold(0.0f64, |m, p| m.max((p.0 - p.1).abs()));
    let outcome = verdict(
        worst < tolerance && within(t, 120.0),
        format!(
            "max |dJ_r| {worst:.2e} < {tolerance:.2e} (1e-2 max|J_r|), {:.1} s (limit 120 s)",
            t.as_secs_f64()
        ),
    );
    (outcome, tolerance)
}

fn dme_deviation(tolerance: f64) -> Outcome {
    if !tolerance.is_finite() {
        return Err("criterion 2 produced no tolerance".into());
    }
    let d = drive(0.1, 0.7);
    let a = dressed_currents(&NESB, &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?;
    let b = dressed_currents(&NESB, &d, &fig2(), Method::Traditional).map_err(|e| e.to_string())?;
    let gap = (a.j_right - b.j_right).abs();
    verdict(
        gap > 10.0 * tolerance,
        format!("|J_r(DME) - J_r(dDME)| = {gap:.3e} vs 10x tolerance {:.3e}", 10.0 * tolerance),
    )
}

fn channel_distance(a: &Channel, b: &Channel) -> f64 {
    let same = a.reservoir == b.reservoir && a.target == b.target && a.source == b.source;
    if !same {
        return f64::INFINITY;
    }
    [
        (a.frequency, b.frequency),
        (a.weight, b.weight),
        (a.down, b.down),
        (a.up, b.up),
    ]
    .iter()
    .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-300))
    .fold(0.0, f64::max)
}

fn zero_frequency_limit() -> Outcome {
    let mut worst = 0.0f64;
    for (m, eta) in [(NESB, 0.1), (NESB, 0.3), (SPINS, 0.2), (kerr(0.4), 0.1)] {
        let d = drive(eta, 0.0);
        let sys = build_rotated(&m, &d).map_err(|e| e.to_string())?;
        let a = solve_dressed(&sys, &fig2(), &d, Method::Driven).map_err(|e| e.to_string())?;
        let b = solve_dressed(&sys, &fig2(), &d, Method::Traditional).map_err(|e| e.to_string())?;
        if a.table.channels().len() != b.table.channels().len() {
            return Err(format!("{}: tables differ in size", m.name()));
        }
        for (x, y) in a.table.channels().iter().zip(b.table.channels()) {
            worst = worst.max(channel_distance(x, y));
        }
        worst = worst.max(a.report.relative_distance(&b.report));
    }
    verdict(worst < 1e-15, format!("max relative table/current difference {worst:.2e} (limit 1e-15)"))
}

fn pump_regimes() -> Outcome {
    let slow = dressed_currents(&NESB, &drive(0.1, 0.1), &fig2(), Method::Driven).map_err(|e| e.to_string())?;
    let fast = dressed_currents(&NESB, &drive(0.1, 0.95), &fig2(), Method::Driven).map_err(|e| e.to_string())?;
    let ratio = slow.j_pump.abs() / slow.j_left.abs().max(slow.j_right.abs());
    let feeds = fast.j_left > 0.0 && fast.j_right > 0.0 && fast.j_pump < 0.0;
    verdict(
        ratio < 0.05 && feeds,
        format!(
            "w_d=0.1: |J_p|/max|J| = {ratio:.3e} (< 0.05); w_d=0.95: J = ({:.3e}, {:.3e}, {:.3e})",
            fast.j_left, fast.j_right, fast.j_pump
        ),
    )
}

fn near_resonance() -> Outcome {
    let d = drive(0.02, 0.98);
    let r = dressed_currents(&NESB, &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for mu in ReservoirLabel::ALL {
        let limit = near_resonance_current(&NESB, &d, &fig2(), mu).map_err(|e| e.to_string())?;
        let deviation = (r.get(mu) - limit).abs() / r.get(mu).abs();
        worst = worst.max(deviation);
        parts.push(format!("{mu:?}: J {:.4e} vs {limit:.4e} ({deviation:.3})", r.get(mu)));
    }
    verdict(worst < 0.05, format!("{} (limit 0.05)", parts.join(", ")))
}

fn flow_deviation(a: &CurrentReport, b: &CurrentReport) -> f64 {
    a.flows()
        .iter()
        .zip(b.flows())
        .map(|(x, y)| (x - y).abs() / x.abs())
        .fold(0.0, f64::max)
}

fn coupled_spins() -> Outcome {
    let mut worst = 0.0f64;
    for wd in [0.5, 0.7, 0.9] {
        let d = drive(0.2, wd);
        let a = dressed_currents(&SPINS, &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?;
        let b = converged_floquet_currents(&SPINS, &d, &fig2(), &FloquetControls::default()).map_err(|e| e.to_string())?;
        worst = worst.max(flow_deviation(&a, &b.report));
    }
    let mut series = Vec::new();
    for eta in [0.05, 0.1, 0.2, 0.3] {
        series.push(dressed_currents(&SPINS, &drive(eta, 0.9), &fig2(), Method::Driven).map_err(|e| e.to_string())?);
    }
    let monotone = series
        .windows(2)
        .all(|w| w[1].j_right > w[0].j_right && w[1].j_pump.abs() > w[0].j_pump.abs());
    verdict(
        worst < 1e-2 && monotone,
        format!("max relative flow deviation {worst:.2e} (limit 1e-2); J_r and |J_p| monotone in eta: {monotone}"),
    )
}

fn kerr_overlap() -> Outcome {
    let mut overlap = 0.0f64;
    let mut truncation = 0.0f64;
    for eta in [0.05, 0.1, 0.2] {
        let d = drive(eta, 0.5);
        let (a, model) = converged_dressed_currents(&kerr(0.4), &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?;
        let b = converged_floquet_currents(&model, &d, &fig2(), &FloquetControls::default()).map_err(|e| e.to_string())?;
        overlap = overlap.max(flow_deviation(&a, &b.report));
        let n20 = dressed_currents(&kerr(0.4), &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?;
        let n28 = dressed_currents(&kerr(0.4).with_n_max(28), &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?;
        truncation = truncation.max(n28.relative_distance(&n20));
    }
    let d = drive(0.1, 0.95);
    let weak = converged_dressed_currents(&kerr(0.1), &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?.0;
    let strong = converged_dressed_currents(&kerr(0.8), &d, &fig2(), Method::Driven).map_err(|e| e.to_string())?.0;
    let suppressed = strong.j_right.abs() < weak.j_right.abs();
    verdict(
        overlap < 2e-2 && truncation < 1e-8 && suppressed,
        format!(
            "dDME vs FME {overlap:.2e} (limit 2e-2); n_max 20->28 change {truncation:.2e} (limit 1e-8); \
             |J_r| chi=0.8 {:.3e} < chi=0.1 {:.3e}",
            strong.j_right.abs(),
            weak.j_right.abs()
        ),
    )
}

fn brute_force() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let cases = [
        (NESB, drive(0.1, 0.7)),
        (SPINS, drive(0.2, 0.7)),
        (ModelSpec::Kerr { epsilon: 1.0, chi: 0.4, n_max: 6 }, drive(0.1, 0.5)),
    ];
    for (m, d) in cases {
        let sys = build_rotated(&m, &d).map_err(|e| e.to_string())?;
        let sol = solve_dressed(&sys, &fig2(), &d, Method::Driven).map_err(|e| e.to_string())?;
        let me = FullMasterEquation::new(&sys, &sol.table).map_err(|e| e.to_string())?;
        let dt = (1.0 / me.spectral_radius_bound()).min(0.5);
        let t_final = 25.0 / me.slowest_rate();
        let rho = me
            .evolve_observed(&basis_projector(me.dim(), 0), t_final, dt, |_, _| {})
            .map_err(|e| e.to_string())?;
        let p = me.populations(&rho);
        for (x, y) in p.iter().zip(sol.populations.as_slice()) {
            worst = worst.max((x - y).abs());
        }
    }
    let t = start.elapsed();
    verdict(
        worst < 1e-8 && within(t, 60.0),
        format!("max population error {worst:.2e} (limit 1e-8), {:.1} s (limit 60 s)", t.as_secs_f64()),
    )
}

/// Pump current rebuilt from the net number of drive quanta handed to the
/// baths: each channel's frequency minus the system energy it removes.
fn pump_from_quanta(table: &RateTable, p: &PopulationVector, energies: &[f64]) -> f64 {
    -table
        .channels()
        .iter()
        .map(|c| {
            let quanta = c.frequency - (energies[c.source] - energies[c.target]);
            quanta * (c.down * p.get(c.source) - c.up * p.get(c.target))
        })
        .sum::<f64>()
}

#[derive(Default)]
struct Invariants {
    points: usize,
    conservation: f64,
    detailed_balance: f64,
    unitarity: f64,
    gauge: f64,
    parseval: f64,
}

impl Invariants {
    fn check(&mut self, cfg: &SweepConfig) -> Result<(), String> {
        let points = cfg.points();
        let n = points.len();
        for point in [&points[0], &points[n / 2], &points[n - 1]] {
            let d = point.drive;
            let model = converged_dressed_currents(&point.model, &d, &cfg.reservoirs, Method::Driven)
                .map_err(|e| e.to_string())?
                .1;
            let sys = build_rotated(&model, &d).map_err(|e| e.to_string())?;
            for method in [Method::Driven, Method::Traditional] {
                let sol = solve_dressed(&sys, &cfg.reservoirs, &d, method).map_err(|e| e.to_string())?;
                let pump = pump_from_quanta(&sol.table, &sol.populations, sol.eigen.energies());
                let scale = sol.report.max_abs().max(f64::MIN_POSITIVE);
                self.conservation = self.conservation.max((pump - sol.report.j_pump).abs() / scale);
                self.conservation = self.conservation.max(sol.report.conservation_error() / scale);
                self.detailed_balance = self.detailed_balance.max(sol.table.detailed_balance_error(&cfg.reservoirs));
            }
            self.floquet(&model, &d, cfg)?;
            self.points += 1;
        }
        Ok(())
    }

    fn floquet(&mut self, model: &ModelSpec, d: &DriveSpec, cfg: &SweepConfig) -> Result<(), String> {
        let first = floquet_solve(model, d, &cfg.reservoirs, &cfg.floquet).map_err(|e| e.to_string())?;
        // one spare sideband so a single-zone relabelling stays inside the cutoff
        let controls = first.controls.with_sidebands(first.controls.m_max + 1);
        let sol = floquet_solve(model, d, &cfg.reservoirs, &controls).map_err(|e| e.to_string())?;
        self.unitarity = self.unitarity.max(sol.unitarity_error);

        let scale = sol.report.max_abs().max(f64::MIN_POSITIVE);
        let pump = pump_from_quanta(&sol.table, &sol.populations, &sol.sidebands.quasienergies);
        self.conservation = self.conservation.max((pump - sol.report.j_pump).abs() / scale);
        self.conservation = self.conservation.max(sol.report.conservation_error() / scale);
        self.detailed_balance = self.detailed_balance.max(sol.table.detailed_balance_error(&cfg.reservoirs));

        let (al, ar) = model.couplings().map_err(|e| e.to_string())?;
        for coupling in [al, ar] {
            let spectrum = SidebandSpectrum::new(&sol.system, &coupling).map_err(|e| e.to_string())?;
            let relative = spectrum.tail(sol.controls.m_max) / spectrum.reference_norm();
            self.parseval = self.parseval.max(relative);
        }

        let mut shifted = sol.system.clone();
        shifted.shift_gauge(sol.system.dim() - 1, 1);
        let st = sideband_table(&shifted, model, sol.controls.m_max).map_err(|e| e.to_string())?;
        let moved = fme_rates_and_currents(&st, &cfg.reservoirs).map_err(|e| e.to_string())?;
        self.gauge = self.gauge.max(moved.relative_distance(&sol.report));
        Ok(())
    }
}

fn bundled_configs() -> Vec<(String, SweepConfig)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .expect("configs directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, cfg)
        })
        .collect()
}

fn structural_invariants() -> Outcome {
    let mut inv = Invariants::default();
    let configs = bundled_configs();
    for (name, cfg) in &configs {
        inv.check(cfg).map_err(|e| format!("{name}: {e}"))?;
    }
    let ok = inv.conservation < 1e-12
        && inv.detailed_balance < 1e-12
        && inv.unitarity < UNITARITY_TOLERANCE
        && inv.gauge < 1e-9
        && inv.parseval < PARSEVAL_TOLERANCE;
    verdict(
        ok,
        format!(
            "{} points from {} configs: conservation {:.1e}, detailed balance {:.1e}, unitarity {:.1e}, \
             gauge {:.1e}, Parseval tail {:.1e}",
            inv.points,
            configs.len(),
            inv.conservation,
            inv.detailed_balance,
            inv.unitarity,
            inv.gauge,
            inv.parseval
        ),
    )
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let mut gate = Gate { failed: Vec::new() };
    gate.run(1, "NESB closed-form equivalence", analytic_grid);
    let mut tolerance = f64::NAN;
    gate.run(2, "dDME/FME overlap, NESB", || {
        let (outcome, tol) = fme_overlap();
        tolerance = tol;
        outcome
    });
    gate.run(3, "traditional DME deviation", || dme_deviation(tolerance));
    gate.run(4, "zero drive frequency limit", zero_frequency_limit);
    gate.run(5, "pump regimes", pump_regimes);
    gate.run(6, "near-resonance closed form", near_resonance);
    gate.run(7, "coupled spins overlap and monotonicity", coupled_spins);
    gate.run(8, "Kerr overlap, truncation and suppression", kerr_overlap);
    gate.run(9, "brute-force master equation", brute_force);
    gate.run(10, "structural invariants", structural_invariants);
    if gate.failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {:?}", gate.failed);
        std::process::exit(1);
    }
}
