//! Decoherence trajectories and the regime transition they cross.
//!
//! The built-in model combines high-temperature generalized amplitude damping
//! (Δ ∝ e^{−Γt}, σ_Φ ∝ e^{−Γt/2}) with Gaussian dephasing from quasi-static
//! noise (σ_Φ ∝ e^{−(γt)²}). Starting from |Φ+> it leaves the classical regime
//! at t_c = Γ/2γ².

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{
    classify_regime, concurrence_bell, discord_bell, regime_margin, ChiMode, RegimeLabel,
    DEFAULT_BOUNDARY_TOL,
};
use crate::error::{Error, Result};
use crate::numeric::bisect;
use crate::states::{BellDiagonalState, DEFAULT_PHYSICALITY_TOL};
use crate::teleportation::{average_fidelity, extremal_fidelities, DEFAULT_FIDELITY_BOUNDARY_TOL};

/// A time-parameterized family of Bell-diagonal states.
pub trait Trajectory: Sync {
    fn state_at(&self, t: f64) -> Result<BellDiagonalState>;
}

/// Adapts a closure `t -> state` into a [`Trajectory`].
pub struct FnTrajectory<F>(pub F);

impl<F> Trajectory for FnTrajectory<F>
where
    F: Fn(f64) -> Result<BellDiagonalState> + Sync,
{
    fn state_at(&self, t: f64) -> Result<BellDiagonalState> {
        (self.0)(t)
    }
}

fn require_sigma_psi_zero(initial: &BellDiagonalState) -> Result<()> {
    if initial.sigma_psi() != 0.0 {
        return Err(Error::Unsupported("decay models require an initial state with sigma_psi = 0".into()));
    }
    Ok(())
}

fn require_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// Relaxation rate Γ = Γ_A + Γ_B, dephasing rate γ and the initial state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceParams {
    pub gamma_relax: f64,
    pub gamma_phase: f64,
    pub initial: BellDiagonalState,
}

impl DecoherenceParams {
    pub fn new(gamma_relax: f64, gamma_phase: f64, initial: BellDiagonalState) -> Result<Self> {
        if !(gamma_relax >= 0.0 && gamma_relax.is_finite()) || !(gamma_phase >= 0.0 && gamma_phase.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rates must be finite and non-negative (gamma_relax = {gamma_relax}, gamma_phase = {gamma_phase})"
            )));
        }
        initial.check(DEFAULT_PHYSICALITY_TOL)?;
        require_sigma_psi_zero(&initial)?;
        Ok(DecoherenceParams { gamma_relax, gamma_phase, initial })
    }

    /// Starting from |Φ+>.
    pub fn from_bell(gamma_relax: f64, gamma_phase: f64) -> Result<Self> {
        Self::new(gamma_relax, gamma_phase, BellDiagonalState::bell_phi_plus())
    }

    fn starts_from_bell(&self) -> bool {
        let tol = DEFAULT_PHYSICALITY_TOL;
        (self.initial.delta() - 0.5).abs() <= tol && (self.initial.sigma_phi() - 0.5).abs() <= tol
    }
}

impl Trajectory for DecoherenceParams {
    fn state_at(&self, t: f64) -> Result<BellDiagonalState> {
        gad_gaussian_state(self, t)
    }
}

/// State at time `t` under generalized amplitude damping plus Gaussian dephasing.
pub fn gad_gaussian_state(p: &DecoherenceParams, t: f64) -> Result<BellDiagonalState> {
    require_time(t)?;
    require_sigma_psi_zero(&p.initial)?;
    if t == 0.0 {
        return Ok(p.initial);
    }
    let delta = p.initial.delta() * (-p.gamma_relax * t).exp();
    let gt = p.gamma_phase * t;
    let sigma_phi = p.initial.sigma_phi() * (-0.5 * p.gamma_relax * t - gt * gt).exp();
    BellDiagonalState::from_delta(delta, sigma_phi, 0.0)
}

fn require_bell_transition(p: &DecoherenceParams) -> Result<()> {
    if p.gamma_phase == 0.0 {
        return Err(Error::NoTransition(
            "without dephasing sigma_phi decays slower than delta and the state stays classical".into(),
        ));
    }
    if !p.starts_from_bell() {
        return Err(Error::InvalidInput(
            "the closed-form transition time assumes the |Phi+> initial state".into(),
        ));
    }
    Ok(())
}

/// t_c = Γ / 2γ² for the |Φ+> initial state.
pub fn transition_time(p: &DecoherenceParams) -> Result<f64> {
    require_bell_transition(p)?;
    Ok(p.gamma_relax / (2.0 * p.gamma_phase * p.gamma_phase))
}

/// Transition time located by bisection on the regime margin, without the closed form.
pub fn transition_time_bisection(p: &DecoherenceParams) -> Result<f64> {
    if p.gamma_phase == 0.0 {
        return Err(Error::NoTransition("no dephasing".into()));
    }
    let (d0, s0) = (p.initial.delta().abs(), p.initial.sigma_phi().abs());
    if d0 == 0.0 || s0 == 0.0 {
        return Err(Error::NoTransition("initial state has no delta or no coherence".into()));
    }
    // ln|Δ(t)| − ln|σ_Φ(t)|: same sign as the regime margin, but free of underflow at late times
    let g = |t: f64| -> Result<f64> {
        require_time(t)?;
        let gt = p.gamma_phase * t;
        Ok(d0.ln() - p.gamma_relax * t - (s0.ln() - 0.5 * p.gamma_relax * t - gt * gt))
    };
    let mut hi = 1.0 / (p.gamma_relax + p.gamma_phase);
    let mut found = false;
    for _ in 0..200 {
        if g(hi)? > 0.0 {
            found = true;
            break;
        }
        hi *= 2.0;
    }
    if !found {
        return Err(Error::NoTransition("margin never becomes positive".into()));
    }
    let mut lo = hi;
    loop {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            // positive arbitrarily close to t = 0: the state leaves the boundary immediately
            return Ok(0.0);
        }
        if g(lo)? < 0.0 {
            break;
        }
        if g(lo)? > 0.0 {
            hi = lo;
        }
    }
    bisect(|t| g(t).unwrap_or(f64::NAN), lo, hi, 1e-14 * hi)
}

/// √(2 ln 3): below this Γ/γ the worst-case fidelity at t_c beats 2/3.
pub fn enhancement_threshold() -> f64 {
    (2.0 * 3f64.ln()).sqrt()
}

/// Worst-case fidelity at the transition time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionFidelity {
    pub t_c: f64,
    /// ½[1 + exp(−(Γ/γ)²/2)].
    pub closed_form: f64,
    /// Extremal fidelity of the trajectory state at t_c.
    pub from_trajectory: f64,
    /// Γ/γ < √(2 ln 3).
    pub enhanced: bool,
}

pub fn worst_case_fidelity_at_tc(p: &DecoherenceParams) -> Result<TransitionFidelity> {
    let t_c = transition_time(p)?;
    let ratio = p.gamma_relax / p.gamma_phase;
    let closed_form = 0.5 * (1.0 + (-0.5 * ratio * ratio).exp());
    let state = gad_gaussian_state(p, t_c)?;
    let from_trajectory = extremal_fidelities(&state, DEFAULT_FIDELITY_BOUNDARY_TOL)?.f2_min;
    Ok(TransitionFidelity { t_c, closed_form, from_trajectory, enhanced: ratio < enhancement_threshold() })
}

/// Logarithm base of a jump-formula candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Log2,
    Ln,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Log2 => x.log2(),
            LogBase::Ln => x.ln(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Log2 => "log2",
            LogBase::Ln => "ln",
        }
    }
}

/// ½ Γ Δ_c log((1 + 2Δ_c)/(1 − 2Δ_c)).
pub fn jump_formula(gamma_relax: f64, delta_c: f64, base: LogBase) -> f64 {
    0.5 * gamma_relax * delta_c * base.log((1.0 + 2.0 * delta_c) / (1.0 - 2.0 * delta_c))
}

/// Relative agreement required for a jump-formula candidate to count as matched.
pub const JUMP_MATCH_TOL: f64 = 0.01;

/// Derivative discontinuity of D(t) at t_c: numeric estimate and formula candidates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordJump {
    pub t_c: f64,
    /// Δ(t_c) = ½ exp(−Γ²/2γ²) taken from the trajectory.
    pub delta_c: f64,
    /// ½ exp(−Γ/γ), the alternative expression for Δ_c.
    pub delta_c_alt: f64,
    pub left_derivative: f64,
    pub right_derivative: f64,
    /// |D′(t_c⁺) − D′(t_c⁻)|.
    pub numeric: f64,
    pub analytic_log2: f64,
    pub analytic_ln: f64,
    pub analytic_alt_log2: f64,
    pub analytic_alt_ln: f64,
    /// Base whose candidate (with the trajectory Δ_c) matches within [`JUMP_MATCH_TOL`].
    pub base_used: Option<LogBase>,
}

impl DiscordJump {
    pub fn relative_error(&self, base: LogBase) -> f64 {
        let analytic = match base {
            LogBase::Log2 => self.analytic_log2,
            LogBase::Ln => self.analytic_ln,
        };
        (analytic - self.numeric).abs() / self.numeric.abs()
    }
}

fn discord_along(p: &DecoherenceParams, mode: ChiMode, t: f64) -> Result<f64> {
    Ok(discord_bell(&gad_gaussian_state(p, t)?, mode)?.discord)
}

/// One-sided derivative of D at t_c, from central differences evaluated strictly
/// inside one regime (at t_c ∓ 2h and t_c ∓ 4h) and extrapolated linearly to t_c.
fn one_sided_derivative(p: &DecoherenceParams, mode: ChiMode, t_c: f64, h: f64, side: f64) -> Result<f64> {
    let central = |x: f64| -> Result<f64> {
        Ok((discord_along(p, mode, x + h)? - discord_along(p, mode, x - h)?) / (2.0 * h))
    };
    let near = central(t_c + side * 2.0 * h)?;
    let far = central(t_c + side * 4.0 * h)?;
    Ok(2.0 * near - far)
}

/// Measures the jump of dD/dt at t_c by finite differences and compares it with
/// the closed-form candidates in both log bases.
///
/// `fd_step` of `None` uses 1e-5·t_c.
pub fn discord_derivative_jump(
    p: &DecoherenceParams,
    mode: ChiMode,
    fd_step: Option<f64>,
) -> Result<DiscordJump> {
    let t_c = transition_time(p)?;
    if t_c <= 0.0 {
        return Err(Error::NoTransition("transition at t = 0 has no left-hand regime".into()));
    }
    let h = fd_step.unwrap_or(1e-5 * t_c);
    if !(h > 0.0 && 5.0 * h < t_c) {
        return Err(Error::InvalidInput(format!("finite-difference step {h} incompatible with t_c = {t_c}")));
    }
    let left_derivative = one_sided_derivative(p, mode, t_c, h, -1.0)?;
    let right_derivative = one_sided_derivative(p, mode, t_c, h, 1.0)?;
    let numeric = (right_derivative - left_derivative).abs();

    let delta_c = gad_gaussian_state(p, t_c)?.delta();
    let delta_c_alt = 0.5 * (-p.gamma_relax / p.gamma_phase).exp();
    let g = p.gamma_relax;
    let analytic_log2 = jump_formula(g, delta_c, LogBase::Log2);
    let analytic_ln = jump_formula(g, delta_c, LogBase::Ln);
    let mut jump = DiscordJump {
        t_c,
        delta_c,
        delta_c_alt,
        left_derivative,
        right_derivative,
        numeric,
        analytic_log2,
        analytic_ln,
        analytic_alt_log2: jump_formula(g, delta_c_alt, LogBase::Log2),
        analytic_alt_ln: jump_formula(g, delta_c_alt, LogBase::Ln),
        base_used: None,
    };
    jump.base_used = [LogBase::Log2, LogBase::Ln]
        .into_iter()
        .filter(|&b| jump.relative_error(b) <= JUMP_MATCH_TOL)
        .min_by(|&a, &b| jump.relative_error(a).total_cmp(&jump.relative_error(b)));
    Ok(jump)
}

/// Continuity of D(t) across t_c.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordContinuity {
    pub epsilon: f64,
    /// D(t_c + ε) − D(t_c − ε).
    pub raw_difference: f64,
    /// Difference of the left and right limits at t_c, each extrapolated linearly
    /// from samples at distance ε and 2ε on its own side.
    pub gap: f64,
}

pub fn discord_continuity(p: &DecoherenceParams, mode: ChiMode, epsilon: f64) -> Result<DiscordContinuity> {
    let t_c = transition_time(p)?;
    if !(epsilon > 0.0 && 2.0 * epsilon < t_c) {
        return Err(Error::InvalidInput(format!("epsilon {epsilon} incompatible with t_c = {t_c}")));
    }
    let d = |t: f64| discord_along(p, mode, t);
    let (l1, l2) = (d(t_c - epsilon)?, d(t_c - 2.0 * epsilon)?);
    let (r1, r2) = (d(t_c + epsilon)?, d(t_c + 2.0 * epsilon)?);
    let left_limit = 2.0 * l1 - l2;
    let right_limit = 2.0 * r1 - r2;
    Ok(DiscordContinuity { epsilon, raw_difference: r1 - l1, gap: right_limit - left_limit })
}

/// Short-time transverse-coupling model: σ_Φ(t) = σ_Φ(0) e^{−Γt/2} (1 − (t/γ′)²),
/// Δ(t) = Δ(0) e^{−Γt}. Valid for 0 ≤ t ≤ γ′.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransverseParams {
    pub gamma_prime: f64,
    pub gamma_relax: f64,
    pub initial: BellDiagonalState,
}

impl TransverseParams {
    pub fn new(gamma_prime: f64, gamma_relax: f64, initial: BellDiagonalState) -> Result<Self> {
        if !(gamma_prime > 0.0 && gamma_prime.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma_prime must be positive, got {gamma_prime}")));
        }
        if !(gamma_relax >= 0.0 && gamma_relax.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma_relax must be non-negative, got {gamma_relax}")));
        }
        initial.check(DEFAULT_PHYSICALITY_TOL)?;
        require_sigma_psi_zero(&initial)?;
        Ok(TransverseParams { gamma_prime, gamma_relax, initial })
    }
}

impl Trajectory for TransverseParams {
    fn state_at(&self, t: f64) -> Result<BellDiagonalState> {
        transverse_short_time_state(self, t)
    }
}

pub fn transverse_short_time_state(p: &TransverseParams, t: f64) -> Result<BellDiagonalState> {
    require_time(t)?;
    if t > p.gamma_prime {
        return Err(Error::InvalidInput(format!(
            "t = {t} is outside the short-time window [0, {}]",
            p.gamma_prime
        )));
    }
    require_sigma_psi_zero(&p.initial)?;
    if t == 0.0 {
        return Ok(p.initial);
    }
    let x = t / p.gamma_prime;
    let delta = p.initial.delta() * (-p.gamma_relax * t).exp();
    let sigma_phi = p.initial.sigma_phi() * (-0.5 * p.gamma_relax * t).exp() * (1.0 - x * x).max(0.0);
    BellDiagonalState::from_delta(delta, sigma_phi, 0.0)
}

/// Direction of a regime change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingDirection {
    ClassicalToQuantum,
    QuantumToClassical,
}

impl CrossingDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            CrossingDirection::ClassicalToQuantum => "classical-to-quantum",
            CrossingDirection::QuantumToClassical => "quantum-to-classical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeCrossing {
    pub time: f64,
    pub direction: CrossingDirection,
}

/// Margins with magnitude at or below this count as sitting on the boundary.
const MARGIN_ZERO_TOL: f64 = 1e-14;

fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("need t_max > 0 and dt > 0 (got {t_max}, {dt})")));
    }
    let n = (t_max / dt - 1e-9).ceil() as usize;
    Ok((0..=n).map(|i| (i as f64 * dt).min(t_max)).collect())
}

/// Scans g(t) = |Δ| − (|σ_Ψ| + |σ_Φ|) on a grid of step `dt` and refines every
/// sign change by bisection to 1e-10·t_max. Starting on the boundary is not a crossing.
pub fn regime_crossings<T: Trajectory + ?Sized>(traj: &T, t_max: f64, dt: f64) -> Result<Vec<RegimeCrossing>> {
    let times = time_grid(t_max, dt)?;
    let margins: Vec<f64> = times
        .par_iter()
        .map(|&t| traj.state_at(t).map(|s| regime_margin(&s)))
        .collect::<Result<_>>()?;

    let mut brackets = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&t, &g) in times.iter().zip(&margins) {
        if g.abs() <= MARGIN_ZERO_TOL {
            continue;
        }
        if let Some((t_prev, g_prev)) = last {
            if g_prev.signum() != g.signum() {
                let direction = if g > 0.0 {
                    CrossingDirection::ClassicalToQuantum
                } else {
                    CrossingDirection::QuantumToClassical
                };
                brackets.push((t_prev, t, direction));
            }
        }
        last = Some((t, g));
    }

    let tol = 1e-10 * t_max;
    brackets
        .par_iter()
        .map(|&(lo, hi, direction)| {
            let g = |t: f64| traj.state_at(t).map(|s| regime_margin(&s)).unwrap_or(f64::NAN);
            let time = bisect(g, lo, hi, tol)?;
            Ok(RegimeCrossing { time, direction })
        })
        .collect()
}

/// One sampled point of a trajectory with its derived quantities.
///
/// Fidelity columns are `None` when σ_Ψ ≠ 0, where no closed form is used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub delta: f64,
    pub sigma_phi: f64,
    pub sigma_psi: f64,
    pub regime: RegimeLabel,
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    pub f2_av: Option<f64>,
    pub f2_min: Option<f64>,
    pub f2_max: Option<f64>,
    pub concurrence: f64,
}

impl TrajectoryRow {
    pub fn from_state(t: f64, s: &BellDiagonalState, mode: ChiMode) -> Result<Self> {
        let triple = discord_bell(s, mode)?;
        let (f2_av, f2_min, f2_max) = if s.sigma_psi() == 0.0 {
            let e = extremal_fidelities(s, DEFAULT_FIDELITY_BOUNDARY_TOL)?;
            (Some(average_fidelity(s)?), Some(e.f2_min), Some(e.f2_max))
        } else {
            (None, None, None)
        };
        Ok(TrajectoryRow {
            t,
            delta: s.delta(),
            sigma_phi: s.sigma_phi(),
            sigma_psi: s.sigma_psi(),
            regime: classify_regime(s, DEFAULT_BOUNDARY_TOL),
            mutual_info: triple.mutual_information,
            classical: triple.classical,
            discord: triple.discord,
            f2_av,
            f2_min,
            f2_max,
            concurrence: concurrence_bell(s)?,
        })
    }
}

/// Samples `traj` at t = 0, dt, 2dt, …, t_max.
pub fn sample_trajectory<T: Trajectory + ?Sized>(
    traj: &T,
    t_max: f64,
    dt: f64,
    mode: ChiMode,
) -> Result<Vec<TrajectoryRow>> {
    time_grid(t_max, dt)?
        .par_iter()
        .map(|&t| TrajectoryRow::from_state(t, &traj.state_at(t)?, mode))
        .collect()
}
