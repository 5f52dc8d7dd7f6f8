//! Oracle-equivalence suites: every closed form checked against an independent
//! numerical route on seeded random samples.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{
    discord_derivative_jump, enhancement_threshold, gad_gaussian_state, transition_time,
    transition_time_bisection, worst_case_fidelity_at_tc, DecoherenceParams,
};
use crate::correlations::{classical_correlations_bell, classical_correlations_oracle, ChiMode, OracleGrid};
use crate::error::{Error, Result};
use crate::phase_diagram::separability_roots;
use crate::states::{BellDiagonalState, PureQubitState};
use crate::teleportation::{
    average_fidelity, average_fidelity_monte_carlo, extremal_fidelities, fidelity_extrema_oracle,
    simulate_protocol, teleported_state, CLASSICAL_FIDELITY_LIMIT, DEFAULT_FIDELITY_BOUNDARY_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ChiCalibration,
    Protocol,
    Extrema,
    TransitionTime,
    WorstCaseFidelity,
    JumpBase,
    AverageFidelity,
    Separability,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::ChiCalibration,
        Suite::Protocol,
        Suite::Extrema,
        Suite::TransitionTime,
        Suite::WorstCaseFidelity,
        Suite::JumpBase,
        Suite::AverageFidelity,
        Suite::Separability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::ChiCalibration => "chi-calibration",
            Suite::Protocol => "protocol",
            Suite::Extrema => "extrema",
            Suite::TransitionTime => "transition-time",
            Suite::WorstCaseFidelity => "worst-case-fidelity",
            Suite::JumpBase => "jump-base",
            Suite::AverageFidelity => "average-fidelity",
            Suite::Separability => "separability",
        }
    }

    fn stream(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: max deviation {:.3e} (tol {:.1e}); {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance,
            self.detail
        )
    }
}

/// Uniform point on the probability simplex of dimension 4.
fn simplex4<R: Rng>(rng: &mut R) -> [f64; 4] {
    let e: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
    let sum: f64 = e.iter().sum();
    e.map(|x| x / sum)
}

/// Random Bell-diagonal state with eigenvalues drawn uniformly from the simplex.
pub fn random_bell_diagonal<R: Rng>(rng: &mut R) -> BellDiagonalState {
    let [a, b, c, d] = simplex4(rng);
    BellDiagonalState::new_unchecked(0.5 * (a + b), 0.5 * (c + d), 0.5 * (a - b), 0.5 * (c - d))
}

/// Random physical state with σ_Ψ = 0 and either sign of Δ and σ_Φ.
pub fn random_sigma_psi_zero<R: Rng>(rng: &mut R) -> BellDiagonalState {
    let rho_phi = 0.5 * rng.random::<f64>();
    let sigma = rho_phi * (2.0 * rng.random::<f64>() - 1.0);
    BellDiagonalState::new_unchecked(rho_phi, 0.5 - rho_phi, sigma, 0.0)
}

/// Random physical state with σ_Ψ = 0, Δ ∈ [0, ½] and σ_Φ ∈ [0, ρ_Φ]: the
/// quadrant reached by decoherence of |Φ⁺⟩.
pub fn random_bell_quadrant<R: Rng>(rng: &mut R) -> BellDiagonalState {
    let delta = 0.5 * rng.random::<f64>();
    let sigma = (0.25 + 0.5 * delta) * rng.random::<f64>();
    BellDiagonalState::from_delta_unchecked(delta, sigma, 0.0)
}

/// Haar-random pure input state.
pub fn random_input<R: Rng>(rng: &mut R) -> PureQubitState {
    let theta = (1.0 - 2.0 * rng.random::<f64>()).clamp(-1.0, 1.0).acos();
    PureQubitState::from_bloch(theta, 2.0 * PI * rng.random::<f64>())
}

fn rng_for(suite: Suite, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream());
    rng
}

fn report(suite: Suite, max_deviation: f64, tolerance: f64, extra_ok: bool, detail: String) -> SuiteReport {
    SuiteReport {
        name: suite.as_str().to_string(),
        passed: extra_ok && max_deviation <= tolerance,
        max_deviation,
        tolerance,
        detail,
    }
}

pub const CHI_CALIBRATION_SAMPLES: usize = 200;
pub const CHI_CALIBRATION_TOL: f64 = 1e-4;
/// AsPrinted must miss the oracle by more than this on |Φ⁺⟩ to count as divergent.
pub const AS_PRINTED_DIVERGENCE: f64 = 0.5;

fn chi_calibration(seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_for(Suite::ChiCalibration, seed);
    let grid = OracleGrid::default();
    let mut states = vec![BellDiagonalState::bell_phi_plus()];
    states.extend((0..CHI_CALIBRATION_SAMPLES).map(|_| random_bell_diagonal(&mut rng)));
    let mut worst_calibrated = 0.0f64;
    let mut worst_printed = 0.0f64;
    let mut bell_printed = 0.0;
    for (i, s) in states.iter().enumerate() {
        let oracle = classical_correlations_oracle(&s.to_dense(), &grid)?.classical;
        let calibrated = classical_correlations_bell(s, ChiMode::OracleCalibrated)?;
        let printed = classical_correlations_bell(s, ChiMode::AsPrinted)?;
        worst_calibrated = worst_calibrated.max((calibrated - oracle).abs());
        worst_printed = worst_printed.max((printed - oracle).abs());
        if i == 0 {
            bell_printed = (printed - oracle).abs();
        }
    }
    let divergent = bell_printed > AS_PRINTED_DIVERGENCE;
    Ok(report(
        Suite::ChiCalibration,
        worst_calibrated,
        CHI_CALIBRATION_TOL,
        divergent,
        format!(
            "oracle-calibrated agrees on {} states; as-printed {} (off by {bell_printed:.6} bits on the Bell state, \
             {worst_printed:.6} worst case)",
            states.len(),
            if divergent { "divergent" } else { "NOT divergent" }
        ),
    ))
}

pub const PROTOCOL_SAMPLES: usize = 100;
pub const PROTOCOL_TOL: f64 = 1e-12;

fn protocol(seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_for(Suite::Protocol, seed);
    let mut worst_state = 0.0f64;
    let mut worst_prob = 0.0f64;
    for _ in 0..PROTOCOL_SAMPLES {
        let s = random_sigma_psi_zero(&mut rng);
        let psi = random_input(&mut rng);
        let sim = simulate_protocol(&s.to_dense(), &psi)?;
        let closed = teleported_state(&s, &psi)?;
        worst_state = worst_state.max(sim.output.max_abs_diff(&closed));
        for p in sim.probabilities {
            worst_prob = worst_prob.max((p - 0.25).abs());
        }
    }
    Ok(report(
        Suite::Protocol,
        worst_state.max(worst_prob),
        PROTOCOL_TOL,
        true,
        format!(
            "{PROTOCOL_SAMPLES} (state, input) pairs; output deviation {worst_state:.3e}, outcome probability \
             deviation {worst_prob:.3e}"
        ),
    ))
}

pub const EXTREMA_SAMPLES: usize = 100;
pub const EXTREMA_GRID: (usize, usize) = (1001, 64);
pub const EXTREMA_TOL: f64 = 1e-6;

fn extrema(seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_for(Suite::Extrema, seed);
    let mut worst = 0.0f64;
    let mut swap_failures = 0usize;
    let mut poles = 0usize;
    for _ in 0..EXTREMA_SAMPLES {
        let s = random_bell_quadrant(&mut rng);
        let grid = fidelity_extrema_oracle(&s, EXTREMA_GRID.0, EXTREMA_GRID.1)?;
        let closed = extremal_fidelities(&s, DEFAULT_FIDELITY_BOUNDARY_TOL)?;
        worst = worst.max((grid.f2_min - closed.f2_min).abs()).max((grid.f2_max - closed.f2_max).abs());
        let margin = s.delta().abs() - s.sigma_phi().abs();
        let x = grid.argmin.population_zero;
        let argmin_at_pole = x == 0.0 || x == 1.0;
        if argmin_at_pole {
            poles += 1;
        }
        if margin != 0.0 && argmin_at_pole != (margin < 0.0) {
            swap_failures += 1;
        }
    }
    Ok(report(
        Suite::Extrema,
        worst,
        EXTREMA_TOL,
        swap_failures == 0,
        format!(
            "{EXTREMA_SAMPLES} states on a {}x{} grid; argmin at poles for {poles}, at the equator for {}; \
             {swap_failures} argmin class mismatches against the sign of |delta| - |sigma_phi|",
            EXTREMA_GRID.0,
            EXTREMA_GRID.1,
            EXTREMA_SAMPLES - poles
        ),
    ))
}

pub const RATE_PAIRS: usize = 20;
pub const TRANSITION_REL_TOL: f64 = 1e-9;
pub const TRANSITION_MARGIN_TOL: f64 = 1e-12;

fn random_rates<R: Rng>(rng: &mut R) -> Result<DecoherenceParams> {
    DecoherenceParams::from_bell(rng.random_range(0.1..3.0), rng.random_range(0.1..3.0))
}

fn transition(seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_for(Suite::TransitionTime, seed);
    let mut params = vec![DecoherenceParams::from_bell(1.0, 1.0)?];
    for _ in 0..RATE_PAIRS {
        params.push(random_rates(&mut rng)?);
    }
    let mut worst_rel = 0.0f64;
    let mut worst_margin = 0.0f64;
    for p in &params {
        let t_c = transition_time(p)?;
        let t_b = transition_time_bisection(p)?;
        worst_rel = worst_rel.max((t_c - t_b).abs() / t_c);
        let s = gad_gaussian_state(p, t_c)?;
        worst_margin = worst_margin.max((s.delta() - s.sigma_phi()).abs());
    }
    let unit = transition_time(&params[0])?;
    Ok(report(
        Suite::TransitionTime,
        worst_rel,
        TRANSITION_REL_TOL,
        unit == 0.5 && worst_margin <= TRANSITION_MARGIN_TOL,
        format!(
            "{} rate pairs; t_c(1, 1) = {unit}; |delta - sigma_phi| at t_c up to {worst_margin:.3e} \
             (tol {TRANSITION_MARGIN_TOL:.0e})",
            params.len()
        ),
    ))
}

pub const WORST_CASE_TOL: f64 = 1e-9;

fn worst_case(seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_for(Suite::WorstCaseFidelity, seed);
    let mut worst = 0.0f64;
    let mut flag_consistent = true;
    for _ in 0..RATE_PAIRS {
        let r = worst_case_fidelity_at_tc(&random_rates(&mut rng)?)?;
        worst = worst.max((r.closed_form - r.from_trajectory).abs());
        flag_consistent &= r.enhanced == (r.closed_form > CLASSICAL_FIDELITY_LIMIT);
    }
    let thr = enhancement_threshold();
    let below = worst_case_fidelity_at_tc(&DecoherenceParams::from_bell(thr - 1e-9, 1.0)?)?.enhanced;
    let above = worst_case_fidelity_at_tc(&DecoherenceParams::from_bell(thr + 1e-9, 1.0)?)?.enhanced;
    let flips = below && !above;
    Ok(report(
        Suite::WorstCaseFidelity,
        worst,
        WORST_CASE_TOL,
        flips && flag_consistent,
        format!(
            "{RATE_PAIRS} rate pairs; enhancement flag {} at ratio {thr:.12}",
            if flips { "flips" } else { "does NOT flip" }
        ),
    ))
}

fn jump_base(_seed: u64) -> Result<SuiteReport> {
    let p = DecoherenceParams::from_bell(1.0, 1.0)?;
    let jump = discord_derivative_jump(&p, ChiMode::OracleCalibrated, None)?;
    let best = jump
        .base_used
        .map(|b| jump.relative_error(b))
        .unwrap_or_else(|| jump.relative_error(crate::channels::LogBase::Log2));
    Ok(report(
        Suite::JumpBase,
        best,
        crate::channels::JUMP_MATCH_TOL,
        jump.base_used.is_some(),
        format!(
            "numeric jump {:.6}; log2 candidate {:.6}, ln candidate {:.6}; matched base: {}",
            jump.numeric,
            jump.analytic_log2,
            jump.analytic_ln,
            jump.base_used.map_or("none", |b| b.as_str())
        ),
    ))
}

pub const MC_STATES: usize = 20;
pub const MC_SAMPLES: usize = 100_000;
pub const MC_SIGMAS: f64 = 3.0;

fn average(seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_for(Suite::AverageFidelity, seed);
    let mut worst_z = 0.0f64;
    for _ in 0..MC_STATES {
        let s = random_sigma_psi_zero(&mut rng);
        let closed = average_fidelity(&s)?;
        let mc = average_fidelity_monte_carlo(&s, MC_SAMPLES, seed)?;
        let dev = (mc.mean - closed).abs();
        if dev > 0.0 {
            worst_z = worst_z.max(dev / mc.std_error);
        }
    }
    let dephased = average_fidelity(&BellDiagonalState::from_delta(0.5, 0.0, 0.0)?)?;
    let exact = dephased == CLASSICAL_FIDELITY_LIMIT;
    Ok(report(
        Suite::AverageFidelity,
        worst_z,
        MC_SIGMAS,
        exact,
        format!(
            "{MC_STATES} states x {MC_SAMPLES} Haar samples, deviation in standard errors; fully dephased Bell \
             state gives {dephased}"
        ),
    ))
}

pub const SEPARABILITY_SAMPLES: usize = 50;
pub const SEPARABILITY_TOL: f64 = 1e-9;

fn separability(_seed: u64) -> Result<SuiteReport> {
    let mut worst_pair = 0.0f64;
    let mut worst_line = 0.0f64;
    for i in 0..SEPARABILITY_SAMPLES {
        let delta = 0.5 * i as f64 / (SEPARABILITY_SAMPLES - 1) as f64;
        let roots = separability_roots(delta)?;
        let (Some(c), Some(f)) = (roots.concurrence_root, roots.fidelity_root) else {
            return Err(Error::Numerical(format!("no separability root at delta = {delta}")));
        };
        worst_pair = worst_pair.max((c - f).abs());
        worst_line = worst_line.max((delta + 2.0 * c - 0.5).abs()).max((delta + 2.0 * f - 0.5).abs());
    }
    Ok(report(
        Suite::Separability,
        worst_pair.max(worst_line),
        SEPARABILITY_TOL,
        true,
        format!(
            "{SEPARABILITY_SAMPLES} delta values; root disagreement {worst_pair:.3e}, \
             |delta + 2 sigma_phi - 1/2| up to {worst_line:.3e}"
        ),
    ))
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    match suite {
        Suite::ChiCalibration => chi_calibration(seed),
        Suite::Protocol => protocol(seed),
        Suite::Extrema => extrema(seed),
        Suite::TransitionTime => transition(seed),
        Suite::WorstCaseFidelity => worst_case(seed),
        Suite::JumpBase => jump_base(seed),
        Suite::AverageFidelity => average(seed),
        Suite::Separability => separability(seed),
    }
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Suite::ALL.into_iter().map(|s| run_suite(s, seed)).collect()
}
