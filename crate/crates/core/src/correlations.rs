//! Mutual information, classical correlations and quantum discord.
//!
//! Closed forms cover Bell-diagonal states. The measurement oracle maximizes
//! the classical correlations over projective measurements on one qubit and
//! works for any two-qubit density matrix.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::golden_section_max;
use crate::states::{
    von_neumann_entropy_with_tol, BellDiagonalState, SingleQubitDensityMatrix, Subsystem,
    TwoQubitDensityMatrix, DEFAULT_PHYSICALITY_TOL,
};

/// Default tolerance for the |Δ| = |σ_Ψ| + |σ_Φ| boundary.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-12;

/// Oracle objective spread below which the maximizing measurement is reported as non-unique.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Normalization of the χ parameter in the Bell-diagonal classical-correlation formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiMode {
    /// χ = max{|Δ|, |σ_Ψ| + |σ_Φ|}.
    AsPrinted,
    /// χ = 2·max{|Δ|, |σ_Ψ| + |σ_Φ|}, the largest |⟨σ_i ⊗ σ_i⟩|; agrees with the measurement oracle.
    #[default]
    OracleCalibrated,
}

impl ChiMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ChiMode::AsPrinted => "as-printed",
            ChiMode::OracleCalibrated => "oracle-calibrated",
        }
    }
}

impl std::fmt::Display for ChiMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ChiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-printed" => Ok(ChiMode::AsPrinted),
            "oracle-calibrated" => Ok(ChiMode::OracleCalibrated),
            other => Err(Error::InvalidInput(format!("unknown chi mode '{other}'"))),
        }
    }
}

/// Decoherence regime of a Bell-diagonal state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// |Δ| < |σ_Ψ| + |σ_Φ|: classical correlations decay.
    #[serde(rename = "classical")]
    ClassicalDecoherence,
    /// |Δ| > |σ_Ψ| + |σ_Φ|: quantum correlations decay.
    #[serde(rename = "quantum")]
    QuantumDecoherence,
    #[serde(rename = "boundary")]
    Boundary,
}

impl RegimeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeLabel::ClassicalDecoherence => "classical",
            RegimeLabel::QuantumDecoherence => "quantum",
            RegimeLabel::Boundary => "boundary",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Mutual information, classical correlations and discord, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub mutual_information: f64,
    pub classical: f64,
    pub discord: f64,
}

impl CorrelationTriple {
    pub fn new(mutual_information: f64, classical: f64) -> Self {
        CorrelationTriple { mutual_information, classical, discord: mutual_information - classical }
    }

    pub fn zero() -> Self {
        CorrelationTriple::new(0.0, 0.0)
    }
}

/// Binary measurement Π± = (I ± n̂·σ)/2 along the Bloch direction (θ, φ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveMeasurement {
    pub theta: f64,
    pub phi: f64,
}

impl ProjectiveMeasurement {
    /// Wraps arbitrary angles onto θ ∈ [0, π], φ ∈ [0, 2π) for the same axis direction.
    pub fn new(theta: f64, phi: f64) -> Self {
        let [x, y, z] = direction(theta, phi);
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = if x.abs() < 1e-15 && y.abs() < 1e-15 {
            0.0
        } else {
            y.atan2(x).rem_euclid(std::f64::consts::TAU)
        };
        ProjectiveMeasurement { theta, phi }
    }

    pub fn direction(&self) -> [f64; 3] {
        direction(self.theta, self.phi)
    }

    /// The projector for outcome `+1` (`positive = true`) or `−1`.
    pub fn projector(&self, positive: bool) -> Matrix2<Complex64> {
        projector(self.direction(), positive)
    }
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn projector([x, y, z]: [f64; 3], positive: bool) -> Matrix2<Complex64> {
    let s = if positive { 0.5 } else { -0.5 };
    Matrix2::new(
        Complex64::new(0.5 + s * z, 0.0),
        Complex64::new(s * x, -s * y),
        Complex64::new(s * x, s * y),
        Complex64::new(0.5 - s * z, 0.0),
    )
}

fn binary_entropy_terms(chi: f64) -> f64 {
    let plus = 1.0 + chi;
    let minus = 1.0 - chi;
    let term = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    0.5 * (term(plus) + term(minus))
}

/// The χ parameter of the closed-form classical correlations.
pub fn chi(s: &BellDiagonalState, mode: ChiMode) -> f64 {
    let base = s.delta().abs().max(s.sigma_psi().abs() + s.sigma_phi().abs());
    match mode {
        ChiMode::AsPrinted => base,
        ChiMode::OracleCalibrated => 2.0 * base,
    }
}

/// Closed-form mutual information 2 + Σ λ log₂ λ over the Bell-diagonal spectrum.
pub fn mutual_information_bell(s: &BellDiagonalState) -> Result<f64> {
    s.check(DEFAULT_PHYSICALITY_TOL)?;
    let entropy = von_neumann_entropy_with_tol(&s.eigenvalues(), DEFAULT_PHYSICALITY_TOL)?;
    Ok(2.0 - entropy)
}

/// S(ρ_A) + S(ρ_B) − S(ρ_AB) from the dense matrix.
pub fn mutual_information_general(m: &TwoQubitDensityMatrix) -> Result<f64> {
    let tol = DEFAULT_PHYSICALITY_TOL;
    m.require_physical(tol)?;
    let s_a = m.partial_trace(Subsystem::B).entropy(tol)?;
    let s_b = m.partial_trace(Subsystem::A).entropy(tol)?;
    let s_ab = m.entropy(tol)?;
    Ok(s_a + s_b - s_ab)
}

/// Closed-form classical correlations ½[(1+χ)log₂(1+χ) + (1−χ)log₂(1−χ)].
pub fn classical_correlations_bell(s: &BellDiagonalState, mode: ChiMode) -> Result<f64> {
    s.check(DEFAULT_PHYSICALITY_TOL)?;
    let chi = chi(s, mode);
    if chi > 1.0 + DEFAULT_PHYSICALITY_TOL {
        return Err(Error::Numerical(format!("chi = {chi} exceeds 1 for a physical state")));
    }
    Ok(binary_entropy_terms(chi.min(1.0)))
}

/// Closed-form correlation triple, discord = I − C.
pub fn discord_bell(s: &BellDiagonalState, mode: ChiMode) -> Result<CorrelationTriple> {
    let mi = mutual_information_bell(s)?;
    let classical = classical_correlations_bell(s, mode)?;
    Ok(CorrelationTriple::new(mi, classical))
}

/// Resolution and options for the measurement-maximization oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    /// Polar-angle samples over [0, π], endpoints included.
    pub n_theta: usize,
    /// Azimuthal samples over [0, 2π).
    pub n_phi: usize,
    /// Run coordinate-wise golden-section refinement from the best grid cell.
    pub refine: bool,
    pub angular_tol: f64,
    /// The qubit that is measured.
    pub measured: Subsystem,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid { n_theta: 64, n_phi: 128, refine: true, angular_tol: 1e-10, measured: Subsystem::B }
    }
}

impl OracleGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        OracleGrid { n_theta, n_phi, ..Default::default() }
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }

    pub fn measuring(mut self, subsystem: Subsystem) -> Self {
        self.measured = subsystem;
        self
    }
}

/// Result of maximizing the classical correlations over projective measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub classical: f64,
    pub measurement: ProjectiveMeasurement,
    /// True when the objective is flat across the grid, so any measurement is optimal.
    pub degenerate: bool,
    pub grid_max: f64,
    pub grid_min: f64,
}

struct MeasurementObjective<'a> {
    rho: &'a TwoQubitDensityMatrix,
    measured: Subsystem,
    unmeasured_entropy: f64,
}

impl<'a> MeasurementObjective<'a> {
    fn new(rho: &'a TwoQubitDensityMatrix, measured: Subsystem) -> Result<Self> {
        let unmeasured_entropy =
            rho.partial_trace(measured).entropy(DEFAULT_PHYSICALITY_TOL)?;
        Ok(MeasurementObjective { rho, measured, unmeasured_entropy })
    }

    /// Unnormalized conditional state of the unmeasured qubit after outcome `proj`.
    fn conditional(&self, proj: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        let m = self.rho.matrix();
        let mut out = Matrix2::zeros();
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..2 {
                    for l in 0..2 {
                        acc += match self.measured {
                            // Tr_B[(I ⊗ Π) ρ]
                            Subsystem::B => proj[(j, l)] * m[(2 * r + l, 2 * c + j)],
                            // Tr_A[(Π ⊗ I) ρ]
                            Subsystem::A => proj[(j, l)] * m[(2 * l + r, 2 * j + c)],
                        };
                    }
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    fn value(&self, theta: f64, phi: f64) -> f64 {
        let n = direction(theta, phi);
        let mut conditional_entropy = 0.0;
        for positive in [true, false] {
            let cond = self.conditional(&projector(n, positive));
            let p = cond.trace().re;
            if p <= 1e-15 {
                continue;
            }
            let normalized = SingleQubitDensityMatrix::from_matrix(cond.map(|z| z / p));
            let [l0, l1] = normalized.eigenvalues();
            let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
            conditional_entropy += p * (h(l0.clamp(0.0, 1.0)) + h(l1.clamp(0.0, 1.0)));
        }
        self.unmeasured_entropy - conditional_entropy
    }
}

/// Maximizes S(ρ_A) − Σ_k p_k S(ρ_A|k) over projective measurements on the measured qubit.
///
/// Evaluates a uniform (θ, φ) grid in parallel, takes the first maximum in
/// row-major order, then refines it with alternating golden-section searches.
/// The returned value never falls below the grid maximum.
pub fn classical_correlations_oracle(
    m: &TwoQubitDensityMatrix,
    grid: &OracleGrid,
) -> Result<OracleResult> {
    m.require_physical(DEFAULT_PHYSICALITY_TOL)?;
    if grid.n_theta < 2 || grid.n_phi < 1 {
        return Err(Error::InvalidInput(format!(
            "oracle grid {}x{} too small",
            grid.n_theta, grid.n_phi
        )));
    }
    let objective = MeasurementObjective::new(m, grid.measured)?;
    let d_theta = std::f64::consts::PI / (grid.n_theta - 1) as f64;
    let d_phi = std::f64::consts::TAU / grid.n_phi as f64;
    let values: Vec<f64> = (0..grid.n_theta * grid.n_phi)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid.n_phi, idx % grid.n_phi);
            objective.value(i as f64 * d_theta, j as f64 * d_phi)
        })
        .collect();

    let mut best_idx = 0;
    let mut grid_min = f64::INFINITY;
    for (idx, &v) in values.iter().enumerate() {
        if v > values[best_idx] {
            best_idx = idx;
        }
        grid_min = grid_min.min(v);
    }
    let grid_max = values[best_idx];
    let degenerate = grid_max - grid_min < DEGENERACY_TOL;

    let mut theta = (best_idx / grid.n_phi) as f64 * d_theta;
    let mut phi = (best_idx % grid.n_phi) as f64 * d_phi;
    let mut best = grid_max;

    if grid.refine && !degenerate {
        let (mut half_theta, mut half_phi) = (d_theta, d_phi);
        for _ in 0..60 {
            let (t_new, v_t) = golden_section_max(
                |t| objective.value(t, phi),
                theta - half_theta,
                theta + half_theta,
                grid.angular_tol,
            );
            let mut moved_theta = 0.0;
            if v_t > best {
                moved_theta = (t_new - theta).abs();
                best = v_t;
                theta = t_new;
            }
            let (p_new, v_p) = golden_section_max(
                |p| objective.value(theta, p),
                phi - half_phi,
                phi + half_phi,
                grid.angular_tol,
            );
            let mut moved_phi = 0.0;
            if v_p > best {
                best = v_p;
                moved_phi = (p_new - phi).abs();
                phi = p_new;
            }
            half_theta = (0.5 * half_theta).max(4.0 * grid.angular_tol);
            half_phi = (0.5 * half_phi).max(4.0 * grid.angular_tol);
            if moved_theta <= grid.angular_tol && moved_phi <= grid.angular_tol
                && half_theta <= 4.0 * grid.angular_tol
            {
                break;
            }
        }
    }

    Ok(OracleResult {
        classical: best,
        measurement: ProjectiveMeasurement::new(theta, phi),
        degenerate,
        grid_max,
        grid_min,
    })
}

/// Mutual information minus oracle classical correlations for an arbitrary state.
pub fn discord_oracle(m: &TwoQubitDensityMatrix, grid: &OracleGrid) -> Result<CorrelationTriple> {
    let mi = mutual_information_general(m)?;
    let classical = classical_correlations_oracle(m, grid)?.classical;
    Ok(CorrelationTriple::new(mi, classical))
}

/// |Δ| − (|σ_Ψ| + |σ_Φ|): positive in the quantum regime, negative in the classical one.
pub fn regime_margin(s: &BellDiagonalState) -> f64 {
    s.delta().abs() - (s.sigma_psi().abs() + s.sigma_phi().abs())
}

pub fn classify_regime(s: &BellDiagonalState, tol: f64) -> RegimeLabel {
    let margin = regime_margin(s);
    if margin > tol {
        RegimeLabel::QuantumDecoherence
    } else if margin < -tol {
        RegimeLabel::ClassicalDecoherence
    } else {
        RegimeLabel::Boundary
    }
}

/// X-state concurrence 2·max{0, |σ_Φ| − ρ_Ψ, |σ_Ψ| − ρ_Φ}.
pub fn concurrence_bell(s: &BellDiagonalState) -> Result<f64> {
    s.check(DEFAULT_PHYSICALITY_TOL)?;
    let c = 2.0
        * 0f64
            .max(s.sigma_phi().abs() - s.rho_psi())
            .max(s.sigma_psi().abs() - s.rho_phi());
    Ok(c.min(1.0))
}

/// Measurement axis of a classically correlated candidate state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicalAxis {
    X,
    Y,
    Z,
}

/// ρ_a = (1/4 + w/2)(|aa><aa| + |āā><āā|) + (1/4 − w/2)(|aā><aā| + |āa><āa|),
/// i.e. (I + 2w σ_a⊗σ_a)/4.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalStateCandidate {
    pub axis: ClassicalAxis,
    pub weight: f64,
}

impl ClassicalStateCandidate {
    /// Populations of the correlated (aa, āā) and anticorrelated (aā, āa) products.
    pub fn populations(&self) -> (f64, f64) {
        (0.25 + 0.5 * self.weight, 0.25 - 0.5 * self.weight)
    }

    pub fn to_dense(&self) -> TwoQubitDensityMatrix {
        // (I + 2w σ_a⊗σ_a)/4, with σ_a⊗σ_a written in the computational basis.
        let w = self.weight;
        let (c_phi, c_psi) = match self.axis {
            ClassicalAxis::X => (w, w),
            ClassicalAxis::Y => (-w, w),
            ClassicalAxis::Z => (0.0, 0.0),
        };
        let z_shift = if self.axis == ClassicalAxis::Z { w } else { 0.0 };
        BellDiagonalState::new_unchecked(0.25 + 0.5 * z_shift, 0.25 - 0.5 * z_shift, 0.5 * c_phi, 0.5 * c_psi)
            .to_dense()
    }
}

/// The closest zero-discord states for the current regime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosestClassical {
    pub regime: RegimeLabel,
    pub candidates: Vec<ClassicalStateCandidate>,
}

/// Closest classical states of a Bell-diagonal state with σ_Ψ = 0.
///
/// Each candidate keeps the dominant two-point correlation ⟨σ_a⊗σ_a⟩ of the
/// input, with its sign: ⟨XX⟩ = 2σ_Φ, ⟨YY⟩ = −2σ_Φ and ⟨ZZ⟩ = 2Δ.
pub fn closest_classical_state(s: &BellDiagonalState) -> Result<ClosestClassical> {
    s.check(DEFAULT_PHYSICALITY_TOL)?;
    if s.sigma_psi() != 0.0 {
        return Err(Error::Unsupported(
            "closest classical states are only constructed for sigma_psi = 0".into(),
        ));
    }
    let regime = classify_regime(s, DEFAULT_BOUNDARY_TOL);
    let x = ClassicalStateCandidate { axis: ClassicalAxis::X, weight: s.sigma_phi() };
    let y = ClassicalStateCandidate { axis: ClassicalAxis::Y, weight: -s.sigma_phi() };
    let z = ClassicalStateCandidate { axis: ClassicalAxis::Z, weight: s.delta() };
    let candidates = match regime {
        RegimeLabel::ClassicalDecoherence => vec![x, y],
        RegimeLabel::QuantumDecoherence => vec![z],
        RegimeLabel::Boundary => vec![x, y, z],
    };
    Ok(ClosestClassical { regime, candidates })
}
