use std::f64::consts::PI;

use qdiscord::channels::{
    regime_crossings, sample_trajectory, transition_time, DecoherenceParams, RegimeCrossing, Trajectory,
    TrajectoryRow, TransverseParams,
};
use qdiscord::correlations::{
    classical_correlations_oracle, classify_regime, concurrence_bell, discord_bell, mutual_information_general,
    OracleGrid, DEFAULT_BOUNDARY_TOL,
};
use qdiscord::export::{write_contours_csv, write_sweep_csv, write_trajectory_csv};
use qdiscord::numeric::linspace;
use qdiscord::phase_diagram::{contours_nested, izodiscord, separability_roots, sweep, SeparabilityRoots, SweepSpec};
use qdiscord::teleportation::{
    average_fidelity, average_fidelity_monte_carlo, extremal_fidelities, fidelity, fidelity_extrema_oracle,
    simulate_protocol, teleported_state, FidelityClass, DEFAULT_FIDELITY_BOUNDARY_TOL,
};
use qdiscord::verify::{run_suite, SuiteReport};
use qdiscord::{BellDiagonalState, ChiMode, Error, PureQubitState, RegimeLabel};
use serde::Serialize;

use crate::args::{
    Cli, Command, CorrelationsArgs, Format, InputState, IzodiscordArgs, Model, SeparabilityArgs, SweepArgs,
    TeleportArgs, TrajectoryArgs, VerifyArgs,
};
use crate::output::{num, opt, Sink};
use crate::state;
use crate::CliError;

type CliResult = std::result::Result<(), CliError>;

/// Input-grid resolution used by `teleport --extrema --oracle`.
const EXTREMA_ORACLE_GRID: (usize, usize) = (1001, 64);

pub fn run(cli: &Cli) -> CliResult {
    let tol = cli.global.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("--tol must be positive, got {tol}")).into());
    }
    let mut sink = Sink::new(cli);
    let mode: ChiMode = cli.global.chi_mode.into();
    let outcome = match &cli.command {
        Command::Correlations(a) => correlations(&mut sink, a, mode, tol),
        Command::Teleport(a) => teleport(&mut sink, a, tol, cli.global.seed),
        Command::Trajectory(a) => trajectory(&mut sink, a, mode, tol),
        Command::Sweep(a) => sweep_cmd(&mut sink, a, mode),
        Command::Izodiscord(a) => izodiscord_cmd(&mut sink, a, mode, tol),
        Command::Separability(a) => separability(&mut sink, a),
        Command::Verify(a) => verify(&mut sink, a, cli.global.seed),
    };
    // verification failures still produce their report
    match outcome {
        Err(CliError::Failed(msg)) => {
            sink.finish()?;
            Err(CliError::Failed(msg))
        }
        Err(e) => Err(e),
        Ok(()) => Ok(sink.finish()?),
    }
}

#[derive(Serialize)]
struct StateView {
    rho_phi: f64,
    rho_psi: f64,
    sigma_phi: f64,
    sigma_psi: f64,
    delta: f64,
}

impl From<&BellDiagonalState> for StateView {
    fn from(s: &BellDiagonalState) -> Self {
        StateView {
            rho_phi: s.rho_phi(),
            rho_psi: s.rho_psi(),
            sigma_phi: s.sigma_phi(),
            sigma_psi: s.sigma_psi(),
            delta: s.delta(),
        }
    }
}

impl StateView {
    const HEADER: [&'static str; 5] = ["rho_phi", "rho_psi", "sigma_phi", "sigma_psi", "delta"];

    fn cells(&self) -> Vec<String> {
        [self.rho_phi, self.rho_psi, self.sigma_phi, self.sigma_psi, self.delta].map(num).to_vec()
    }
}

#[derive(Serialize)]
struct OracleView {
    classical: f64,
    discord: f64,
    degenerate: bool,
}

#[derive(Serialize)]
struct CorrelationsReport {
    state: StateView,
    mutual_information: f64,
    classical: f64,
    discord: f64,
    regime: RegimeLabel,
    concurrence: f64,
    oracle: Option<OracleView>,
}

fn correlations(sink: &mut Sink, a: &CorrelationsArgs, mode: ChiMode, tol: f64) -> CliResult {
    let s = state::require(&a.state, tol)?;
    let triple = discord_bell(&s, mode)?;
    let oracle = if a.oracle {
        let dense = s.to_dense();
        let r = classical_correlations_oracle(&dense, &OracleGrid::default())?;
        let mi = mutual_information_general(&dense)?;
        Some(OracleView { classical: r.classical, discord: mi - r.classical, degenerate: r.degenerate })
    } else {
        None
    };
    let report = CorrelationsReport {
        state: StateView::from(&s),
        mutual_information: triple.mutual_information,
        classical: triple.classical,
        discord: triple.discord,
        regime: classify_regime(&s, DEFAULT_BOUNDARY_TOL),
        concurrence: concurrence_bell(&s)?,
        oracle,
    };
    match sink.format() {
        Format::Json => sink.json(&report)?,
        Format::Csv => {
            let mut header = StateView::HEADER.to_vec();
            header.extend(["mutual_info", "classical", "discord", "regime", "concurrence"]);
            let mut row = report.state.cells();
            row.extend([
                num(report.mutual_information),
                num(report.classical),
                num(report.discord),
                report.regime.as_str().to_string(),
                num(report.concurrence),
            ]);
            if let Some(o) = &report.oracle {
                header.extend(["oracle_classical", "oracle_discord", "oracle_degenerate"]);
                row.extend([num(o.classical), num(o.discord), o.degenerate.to_string()]);
            }
            sink.csv(&header, &[row])?;
        }
    }
    Ok(())
}

fn named_input(i: InputState) -> PureQubitState {
    match i {
        InputState::Zero => PureQubitState::zero(),
        InputState::One => PureQubitState::one(),
        InputState::Plus => PureQubitState::from_population(0.5, 0.0),
        InputState::Minus => PureQubitState::from_population(0.5, PI),
        InputState::PlusI => PureQubitState::from_population(0.5, 0.5 * PI),
        InputState::MinusI => PureQubitState::from_population(0.5, -0.5 * PI),
    }
}

#[derive(Serialize)]
struct ProtocolCheck {
    fidelity: f64,
    probabilities: [f64; 4],
    max_deviation: f64,
}

#[derive(Serialize)]
struct InputReport {
    state: StateView,
    theta: f64,
    phi: f64,
    fidelity: f64,
    simulation: Option<ProtocolCheck>,
}

#[derive(Serialize)]
struct GridCheck {
    f2_min: f64,
    f2_max: f64,
    max_deviation: f64,
}

#[derive(Serialize)]
struct ExtremaReport {
    state: StateView,
    f2_min: f64,
    argmin_class: FidelityClass,
    f2_max: f64,
    argmax_class: FidelityClass,
    grid: Option<GridCheck>,
}

#[derive(Serialize)]
struct MonteCarloCheck {
    mean: f64,
    std_error: f64,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct AverageReport {
    state: StateView,
    f2_av: f64,
    monte_carlo: Option<MonteCarloCheck>,
}

fn teleport(sink: &mut Sink, a: &TeleportArgs, tol: f64, seed: u64) -> CliResult {
    let s = state::require(&a.state, tol)?;
    let view = || StateView::from(&s);
    if a.extrema {
        let e = extremal_fidelities(&s, DEFAULT_FIDELITY_BOUNDARY_TOL)?;
        let grid = if a.oracle {
            let g = fidelity_extrema_oracle(&s, EXTREMA_ORACLE_GRID.0, EXTREMA_ORACLE_GRID.1)?;
            let dev = (g.f2_min - e.f2_min).abs().max((g.f2_max - e.f2_max).abs());
            Some(GridCheck { f2_min: g.f2_min, f2_max: g.f2_max, max_deviation: dev })
        } else {
            None
        };
        let r = ExtremaReport {
            state: view(),
            f2_min: e.f2_min,
            argmin_class: e.argmin_class,
            f2_max: e.f2_max,
            argmax_class: e.argmax_class,
            grid,
        };
        return match sink.format() {
            Format::Json => Ok(sink.json(&r)?),
            Format::Csv => {
                let mut header = StateView::HEADER.to_vec();
                header.extend(["f2_min", "argmin_class", "f2_max", "argmax_class"]);
                let mut row = r.state.cells();
                row.extend([
                    num(r.f2_min),
                    r.argmin_class.as_str().into(),
                    num(r.f2_max),
                    r.argmax_class.as_str().into(),
                ]);
                if let Some(g) = &r.grid {
                    header.extend(["grid_f2_min", "grid_f2_max", "max_deviation"]);
                    row.extend([num(g.f2_min), num(g.f2_max), num(g.max_deviation)]);
                }
                Ok(sink.csv(&header, &[row])?)
            }
        };
    }
    if a.average {
        let f2_av = average_fidelity(&s)?;
        let monte_carlo = if a.oracle {
            let mc = average_fidelity_monte_carlo(&s, a.samples, seed)?;
            Some(MonteCarloCheck { mean: mc.mean, std_error: mc.std_error, samples: mc.samples, seed })
        } else {
            None
        };
        let r = AverageReport { state: view(), f2_av, monte_carlo };
        return match sink.format() {
            Format::Json => Ok(sink.json(&r)?),
            Format::Csv => {
                let mut header = StateView::HEADER.to_vec();
                header.push("f2_av");
                let mut row = r.state.cells();
                row.push(num(r.f2_av));
                if let Some(m) = &r.monte_carlo {
                    header.extend(["mc_mean", "mc_std_error", "mc_samples"]);
                    row.extend([num(m.mean), num(m.std_error), m.samples.to_string()]);
                }
                Ok(sink.csv(&header, &[row])?)
            }
        };
    }

    let (psi, theta, phi) = match (a.input, a.theta, a.phi) {
        (Some(i), _, _) => {
            let psi = named_input(i);
            let (t, p) = psi.bloch_angles();
            (psi, t, p)
        }
        (None, Some(t), Some(p)) => (PureQubitState::from_bloch(t, p), t, p),
        _ => return Err(Error::InvalidInput("give --input or both --theta and --phi".into()).into()),
    };
    let f = fidelity(&s, &psi)?;
    let simulation = if a.oracle {
        let out = simulate_protocol(&s.to_dense(), &psi)?;
        let closed = teleported_state(&s, &psi)?;
        Some(ProtocolCheck {
            fidelity: out.output.expectation(&psi),
            probabilities: out.probabilities,
            max_deviation: out.output.max_abs_diff(&closed),
        })
    } else {
        None
    };
    let r = InputReport { state: view(), theta, phi, fidelity: f, simulation };
    match sink.format() {
        Format::Json => sink.json(&r)?,
        Format::Csv => {
            let mut header = StateView::HEADER.to_vec();
            header.extend(["theta", "phi", "fidelity"]);
            let mut row = r.state.cells();
            row.extend([num(r.theta), num(r.phi), num(r.fidelity)]);
            if let Some(c) = &r.simulation {
                header.extend(["simulated_fidelity", "max_deviation"]);
                row.extend([num(c.fidelity), num(c.max_deviation)]);
            }
            sink.csv(&header, &[row])?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TrajectoryReport<'a> {
    transition_time: Option<f64>,
    crossings: &'a [RegimeCrossing],
    rows: &'a [TrajectoryRow],
}

fn trajectory(sink: &mut Sink, a: &TrajectoryArgs, mode: ChiMode, tol: f64) -> CliResult {
    let initial = state::resolve(&a.state, tol)?.unwrap_or_else(BellDiagonalState::bell_phi_plus);
    let (traj, transition): (Box<dyn Trajectory>, Option<f64>) = match a.model {
        Model::Gad => {
            let p = DecoherenceParams::new(a.gamma_relax, a.gamma_phase, initial)?;
            (Box::new(p), transition_time(&p).ok())
        }
        Model::Transverse => {
            let gp = a.gamma_prime.ok_or_else(|| {
                Error::InvalidInput("the transverse model needs --gamma-prime".into())
            })?;
            if a.t_max > gp {
                return Err(Error::InvalidInput(format!(
                    "--t-max {} exceeds the short-time window gamma_prime = {gp}",
                    a.t_max
                ))
                .into());
            }
            (Box::new(TransverseParams::new(gp, a.gamma_relax, initial)?), None)
        }
    };
    let rows = sample_trajectory(traj.as_ref(), a.t_max, a.dt, mode)?;
    let crossings = regime_crossings(traj.as_ref(), a.t_max, a.dt)?;

    if let Some(t_c) = transition {
        eprintln!("transition time (closed form): {t_c}");
    }
    if crossings.is_empty() {
        eprintln!("regime crossings: none");
    }
    for c in &crossings {
        eprintln!("regime crossing at t = {:.10} ({})", c.time, c.direction.as_str());
    }

    match sink.format() {
        Format::Json => sink.json(&TrajectoryReport { transition_time: transition, crossings: &crossings, rows: &rows })?,
        Format::Csv => write_trajectory_csv(&rows, sink.writer())?,
    }
    Ok(())
}

fn sweep_cmd(sink: &mut Sink, a: &SweepArgs, mode: ChiMode) -> CliResult {
    let spec = SweepSpec {
        sigma_range: (a.sigma_min, a.sigma_max),
        delta_range: (a.delta_min, a.delta_max),
        n_sigma: a.n_sigma,
        n_delta: a.n_delta,
    };
    let rows = sweep(&spec, mode)?;
    match sink.format() {
        Format::Json => sink.json(&rows)?,
        Format::Csv => write_sweep_csv(&rows, sink.writer())?,
    }
    Ok(())
}

fn izodiscord_cmd(sink: &mut Sink, a: &IzodiscordArgs, mode: ChiMode, tol: f64) -> CliResult {
    let mut levels = a.levels.clone();
    levels.sort_by(f64::total_cmp);
    let contours: Vec<_> = levels
        .iter()
        .map(|&l| izodiscord(l, mode, a.n_delta, tol))
        .collect::<qdiscord::Result<_>>()?;
    for (pair, lv) in contours.windows(2).zip(levels.windows(2)) {
        if !contours_nested(&pair[0], &pair[1]) {
            eprintln!("warning: contours {} and {} are not nested", lv[0], lv[1]);
        }
    }
    let points: Vec<_> = contours.into_iter().flatten().collect();
    match sink.format() {
        Format::Json => sink.json(&points)?,
        Format::Csv => write_contours_csv(&points, sink.writer())?,
    }
    Ok(())
}

fn separability(sink: &mut Sink, a: &SeparabilityArgs) -> CliResult {
    if a.n_delta < 2 || a.delta_min.is_nan() || a.delta_max.is_nan() || a.delta_min >= a.delta_max {
        return Err(Error::InvalidInput("need --n-delta >= 2 and --delta-min < --delta-max".into()).into());
    }
    let rows: Vec<SeparabilityRoots> = linspace(a.delta_min, a.delta_max, a.n_delta)
        .into_iter()
        .map(separability_roots)
        .collect::<qdiscord::Result<_>>()?;
    match sink.format() {
        Format::Json => sink.json(&rows)?,
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![num(r.delta), num(r.closed_form), opt(r.concurrence_root), opt(r.fidelity_root)])
                .collect();
            sink.csv(&["delta", "closed_form", "concurrence_root", "fidelity_root"], &cells)?;
        }
    }
    Ok(())
}

fn verify(sink: &mut Sink, a: &VerifyArgs, seed: u64) -> CliResult {
    let reports: Vec<SuiteReport> =
        a.suite.suites().into_iter().map(|s| run_suite(s, seed)).collect::<qdiscord::Result<_>>()?;
    for r in &reports {
        eprintln!("{r}");
    }
    match sink.format() {
        Format::Json => sink.json(&reports)?,
        Format::Csv => {
            let cells: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![r.name.clone(), r.passed.to_string(), num(r.max_deviation), num(r.tolerance), r.detail.clone()]
                })
                .collect();
            sink.csv(&["suite", "passed", "max_deviation", "tolerance", "detail"], &cells)?;
        }
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("verification failed: {}", failed.join(", "))))
    }
}
