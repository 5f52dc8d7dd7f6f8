//! State representations and entropy primitives.
//!
//! Dense matrices use the computational basis ordering |00>, |01>, |10>, |11>,
//! with qubit A as the most significant bit. A Bell-diagonal state in this basis
//! is the X-shaped matrix
//!
//! ```text
//! | rho_phi    0         0         sigma_phi |
//! | 0          rho_psi   sigma_psi 0         |
//! | 0          sigma_psi rho_psi   0         |
//! | sigma_phi  0         0         rho_phi   |
//! ```

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for trace, Hermiticity and positivity checks.
pub const DEFAULT_PHYSICALITY_TOL: f64 = 1e-9;

/// Eigenvalues within this distance outside `[0, 1]` are clamped before taking logs.
pub const ENTROPY_CLAMP_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// One of the two qubits of a bipartite state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Subsystem {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Bell-diagonal two-qubit state with real occupations and coherences.
///
/// Δ is stored alongside the occupations so that states built from Δ keep it at
/// full relative precision when it is far below the occupations themselves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "BellDiagonalParams", into = "BellDiagonalParams")]
pub struct BellDiagonalState {
    rho_phi: f64,
    rho_psi: f64,
    sigma_phi: f64,
    sigma_psi: f64,
    delta: f64,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
struct BellDiagonalParams {
    rho_phi: f64,
    rho_psi: f64,
    sigma_phi: f64,
    sigma_psi: f64,
    #[serde(default)]
    delta: Option<f64>,
}

impl From<BellDiagonalParams> for BellDiagonalState {
    fn from(p: BellDiagonalParams) -> Self {
        BellDiagonalState {
            delta: p.delta.unwrap_or(p.rho_phi - p.rho_psi),
            ..BellDiagonalState::new_unchecked(p.rho_phi, p.rho_psi, p.sigma_phi, p.sigma_psi)
        }
    }
}

impl From<BellDiagonalState> for BellDiagonalParams {
    fn from(s: BellDiagonalState) -> Self {
        BellDiagonalParams {
            rho_phi: s.rho_phi,
            rho_psi: s.rho_psi,
            sigma_phi: s.sigma_phi,
            sigma_psi: s.sigma_psi,
            delta: Some(s.delta),
        }
    }
}

impl BellDiagonalState {
    /// Validated constructor using [`DEFAULT_PHYSICALITY_TOL`].
    pub fn new(rho_phi: f64, rho_psi: f64, sigma_phi: f64, sigma_psi: f64) -> Result<Self> {
        Self::with_tolerance(rho_phi, rho_psi, sigma_phi, sigma_psi, DEFAULT_PHYSICALITY_TOL)
    }

    pub fn with_tolerance(
        rho_phi: f64,
        rho_psi: f64,
        sigma_phi: f64,
        sigma_psi: f64,
        tol: f64,
    ) -> Result<Self> {
        let s = Self::new_unchecked(rho_phi, rho_psi, sigma_phi, sigma_psi);
        s.check(tol)?;
        Ok(s)
    }

    /// Builds the parameter set without any physicality check.
    pub fn new_unchecked(rho_phi: f64, rho_psi: f64, sigma_phi: f64, sigma_psi: f64) -> Self {
        BellDiagonalState { rho_phi, rho_psi, sigma_phi, sigma_psi, delta: rho_phi - rho_psi }
    }

    /// State with occupation difference `delta`, trace-normalized occupations.
    pub fn from_delta(delta: f64, sigma_phi: f64, sigma_psi: f64) -> Result<Self> {
        let s = Self::from_delta_unchecked(delta, sigma_phi, sigma_psi);
        s.check(DEFAULT_PHYSICALITY_TOL)?;
        Ok(s)
    }

    pub fn from_delta_unchecked(delta: f64, sigma_phi: f64, sigma_psi: f64) -> Self {
        BellDiagonalState {
            delta,
            ..Self::new_unchecked(0.25 + 0.5 * delta, 0.25 - 0.5 * delta, sigma_phi, sigma_psi)
        }
    }

    /// The Bell state |Φ+> = (|00> + |11>)/√2.
    pub fn bell_phi_plus() -> Self {
        Self::new_unchecked(0.5, 0.0, 0.5, 0.0)
    }

    /// The maximally mixed state I/4.
    pub fn maximally_mixed() -> Self {
        Self::new_unchecked(0.25, 0.25, 0.0, 0.0)
    }

    /// Maps the correlation vector `(c1, c2, c3) = (<XX>, <YY>, <ZZ>)` onto the
    /// Bell-diagonal parameters.
    pub fn from_correlation_vector(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        Self::new(
            (1.0 + c3) / 4.0,
            (1.0 - c3) / 4.0,
            (c1 - c2) / 4.0,
            (c1 + c2) / 4.0,
        )
    }

    /// Inverse of [`from_correlation_vector`](Self::from_correlation_vector).
    pub fn correlation_vector(&self) -> [f64; 3] {
        [
            2.0 * (self.sigma_psi + self.sigma_phi),
            2.0 * (self.sigma_psi - self.sigma_phi),
            2.0 * self.delta,
        ]
    }

    pub fn rho_phi(&self) -> f64 {
        self.rho_phi
    }

    pub fn rho_psi(&self) -> f64 {
        self.rho_psi
    }

    pub fn sigma_phi(&self) -> f64 {
        self.sigma_phi
    }

    pub fn sigma_psi(&self) -> f64 {
        self.sigma_psi
    }

    /// Occupation difference Δ = ρ_Φ − ρ_Ψ.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Checks trace normalization and the four block eigenvalues against `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let params = [self.rho_phi, self.rho_psi, self.sigma_phi, self.sigma_psi];
        if params.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite parameter in {params:?}")));
        }
        let trace = 2.0 * self.rho_phi + 2.0 * self.rho_psi;
        if (trace - 1.0).abs() > tol {
            return Err(Error::Unphysical(format!(
                "trace 2*rho_phi + 2*rho_psi = {trace} differs from 1"
            )));
        }
        for (name, value) in self.named_eigenvalues() {
            if value < -tol {
                return Err(Error::Unphysical(format!("eigenvalue {name} = {value} is negative")));
            }
        }
        Ok(())
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.check(tol).is_ok()
    }

    fn named_eigenvalues(&self) -> [(&'static str, f64); 4] {
        [
            ("rho_phi + sigma_phi", self.rho_phi + self.sigma_phi),
            ("rho_phi - sigma_phi", self.rho_phi - self.sigma_phi),
            ("rho_psi + sigma_psi", self.rho_psi + self.sigma_psi),
            ("rho_psi - sigma_psi", self.rho_psi - self.sigma_psi),
        ]
    }

    /// Spectrum {ρ_Φ ± σ_Φ, ρ_Ψ ± σ_Ψ}, sorted descending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut eig = self.named_eigenvalues().map(|(_, v)| v);
        eig.sort_by(|a, b| b.total_cmp(a));
        eig
    }

    /// Dense 4x4 form in the computational basis.
    pub fn to_dense(&self) -> TwoQubitDensityMatrix {
        let mut m = Matrix4::from_element(ZERO);
        m[(0, 0)] = c(self.rho_phi);
        m[(3, 3)] = c(self.rho_phi);
        m[(0, 3)] = c(self.sigma_phi);
        m[(3, 0)] = c(self.sigma_phi);
        m[(1, 1)] = c(self.rho_psi);
        m[(2, 2)] = c(self.rho_psi);
        m[(1, 2)] = c(self.sigma_psi);
        m[(2, 1)] = c(self.sigma_psi);
        TwoQubitDensityMatrix::from_matrix(m)
    }
}

/// Analytic spectrum of a Bell-diagonal state, sorted descending.
pub fn eigenvalues_bell_diagonal(s: &BellDiagonalState) -> [f64; 4] {
    s.eigenvalues()
}

/// Outcome of a dense physicality check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// |Tr ρ − 1|.
    pub trace_deviation: f64,
    /// max |ρ_ij − conj(ρ_ji)|.
    pub hermiticity_violation: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub physical: bool,
}

impl ValidationReport {
    pub fn into_result(self) -> Result<()> {
        if self.physical {
            return Ok(());
        }
        if self.trace_deviation > self.tol {
            Err(Error::Unphysical(format!("trace deviates from 1 by {}", self.trace_deviation)))
        } else if self.hermiticity_violation > self.tol {
            Err(Error::Unphysical(format!(
                "matrix is not Hermitian (violation {})",
                self.hermiticity_violation
            )))
        } else {
            Err(Error::Unphysical(format!("minimum eigenvalue {} is negative", self.min_eigenvalue)))
        }
    }
}

fn hermitian_part4(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (m + m.adjoint()).map(|z| z * 0.5)
}

fn hermiticity_violation<const N: usize>(
    m: &nalgebra::SMatrix<Complex64, N, N>,
) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Dense two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitDensityMatrix(Matrix4<Complex64>);

impl TwoQubitDensityMatrix {
    /// Wraps a matrix without checking it; use [`validate`](Self::validate).
    pub fn from_matrix(m: Matrix4<Complex64>) -> Self {
        TwoQubitDensityMatrix(m)
    }

    /// Projector onto a normalized two-qubit pure state.
    pub fn from_pure(amplitudes: [Complex64; 4]) -> Self {
        let v = nalgebra::Vector4::from(amplitudes);
        TwoQubitDensityMatrix(v * v.adjoint())
    }

    /// Tensor product ρ_A ⊗ ρ_B.
    pub fn product(a: &SingleQubitDensityMatrix, b: &SingleQubitDensityMatrix) -> Self {
        TwoQubitDensityMatrix(a.0.kronecker(&b.0))
    }

    pub fn maximally_mixed() -> Self {
        TwoQubitDensityMatrix(Matrix4::identity().map(|z: Complex64| z * 0.25))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Eigenvalues of the Hermitian part, sorted descending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = hermitian_part4(&self.0).symmetric_eigenvalues();
        let mut out = [eig[0], eig[1], eig[2], eig[3]];
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let trace_deviation = (self.trace() - c(1.0)).norm();
        let hermiticity_violation = hermiticity_violation(&self.0);
        let min_eigenvalue = self.eigenvalues()[3];
        ValidationReport {
            trace_deviation,
            hermiticity_violation,
            min_eigenvalue,
            tol,
            physical: trace_deviation <= tol
                && hermiticity_violation <= tol
                && min_eigenvalue >= -tol,
        }
    }

    /// Error unless the matrix passes [`validate`](Self::validate) at `tol`.
    pub fn require_physical(&self, tol: f64) -> Result<()> {
        self.validate(tol).into_result()
    }

    /// Reduced state after tracing out `traced_out`.
    pub fn partial_trace(&self, traced_out: Subsystem) -> SingleQubitDensityMatrix {
        let m = &self.0;
        let mut r = Matrix2::from_element(ZERO);
        for i in 0..2 {
            for k in 0..2 {
                r[(i, k)] = match traced_out {
                    // index = 2 * a + b
                    Subsystem::B => (0..2).map(|j| m[(2 * i + j, 2 * k + j)]).sum(),
                    Subsystem::A => (0..2).map(|j| m[(2 * j + i, 2 * j + k)]).sum(),
                };
            }
        }
        SingleQubitDensityMatrix(r)
    }

    /// Partial transpose with respect to `subsystem`.
    pub fn partial_transpose(&self, subsystem: Subsystem) -> Matrix4<Complex64> {
        let m = &self.0;
        let mut out = Matrix4::from_element(ZERO);
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        let (ra, rb, ca, cb) = match subsystem {
                            Subsystem::A => (a2, b, a, b2),
                            Subsystem::B => (a, b2, a2, b),
                        };
                        out[(2 * a + b, 2 * a2 + b2)] = m[(2 * ra + rb, 2 * ca + cb)];
                    }
                }
            }
        }
        out
    }

    /// Smallest eigenvalue of the partial transpose (negative iff NPT).
    pub fn min_partial_transpose_eigenvalue(&self) -> f64 {
        let pt = self.partial_transpose(Subsystem::B);
        let eig = hermitian_part4(&pt).symmetric_eigenvalues();
        eig.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Von Neumann entropy in bits, computed from the dense spectrum.
    pub fn entropy(&self, tol: f64) -> Result<f64> {
        von_neumann_entropy_with_tol(&self.eigenvalues(), tol)
    }
}

impl From<&BellDiagonalState> for TwoQubitDensityMatrix {
    fn from(s: &BellDiagonalState) -> Self {
        s.to_dense()
    }
}

/// Dense single-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitDensityMatrix(pub(crate) Matrix2<Complex64>);

impl SingleQubitDensityMatrix {
    pub fn from_matrix(m: Matrix2<Complex64>) -> Self {
        SingleQubitDensityMatrix(m)
    }

    pub fn from_pure(psi: &PureQubitState) -> Self {
        let v = nalgebra::Vector2::new(psi.alpha(), psi.beta());
        SingleQubitDensityMatrix(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        SingleQubitDensityMatrix(Matrix2::new(c(0.5), ZERO, ZERO, c(0.5)))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Bloch vector (x, y, z) of the Hermitian part, normalized by the trace.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let m = &self.0;
        let tr = m.trace().re;
        let off = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
        [2.0 * off.re / tr, -2.0 * off.im / tr, (m[(0, 0)].re - m[(1, 1)].re) / tr]
    }

    /// Closed-form 2x2 Hermitian spectrum, sorted descending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.0;
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let off = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
        [mean + radius, mean - radius]
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let trace_deviation = (self.trace() - c(1.0)).norm();
        let hermiticity_violation = hermiticity_violation(&self.0);
        let min_eigenvalue = self.eigenvalues()[1];
        ValidationReport {
            trace_deviation,
            hermiticity_violation,
            min_eigenvalue,
            tol,
            physical: trace_deviation <= tol
                && hermiticity_violation <= tol
                && min_eigenvalue >= -tol,
        }
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn expectation(&self, psi: &PureQubitState) -> f64 {
        let v = nalgebra::Vector2::new(psi.alpha(), psi.beta());
        (v.adjoint() * self.0 * v)[(0, 0)].re
    }

    pub fn entropy(&self, tol: f64) -> Result<f64> {
        von_neumann_entropy_with_tol(&self.eigenvalues(), tol)
    }

    /// Largest elementwise distance to `other`.
    pub fn max_abs_diff(&self, other: &SingleQubitDensityMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Normalized pure qubit α|0> + β|1>.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureQubitState {
    alpha: Complex64,
    beta: Complex64,
}

impl PureQubitState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > DEFAULT_PHYSICALITY_TOL {
            return Err(Error::InvalidInput(format!(
                "|alpha|^2 + |beta|^2 = {norm}, expected 1"
            )));
        }
        Ok(PureQubitState { alpha, beta })
    }

    /// cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        PureQubitState {
            alpha: c((0.5 * theta).cos()),
            beta: Complex64::from_polar((0.5 * theta).sin(), phi),
        }
    }

    /// √p|0> + e^{iφ}√(1−p)|1>, with `p` the |0> population.
    pub fn from_population(p_zero: f64, phase: f64) -> Self {
        PureQubitState {
            alpha: c(p_zero.sqrt()),
            beta: Complex64::from_polar((1.0 - p_zero).max(0.0).sqrt(), phase),
        }
    }

    pub fn zero() -> Self {
        PureQubitState { alpha: c(1.0), beta: ZERO }
    }

    pub fn one() -> Self {
        PureQubitState { alpha: ZERO, beta: c(1.0) }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// |α|².
    pub fn population_zero(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// Bloch angles (θ, φ) with θ ∈ [0, π], φ ∈ [0, 2π).
    pub fn bloch_angles(&self) -> (f64, f64) {
        let theta = 2.0 * self.beta.norm().atan2(self.alpha.norm());
        let phi = if self.alpha.norm() < 1e-15 || self.beta.norm() < 1e-15 {
            0.0
        } else {
            (self.beta.arg() - self.alpha.arg()).rem_euclid(std::f64::consts::TAU)
        };
        (theta, phi)
    }
}

/// Von Neumann entropy −Σ λ log₂ λ in bits, with the default clamping window.
pub fn von_neumann_entropy(eigenvalues: &[f64]) -> Result<f64> {
    von_neumann_entropy_with_tol(eigenvalues, ENTROPY_CLAMP_TOL)
}

/// Von Neumann entropy in bits; eigenvalues within `tol` of `[0, 1]` are clamped.
pub fn von_neumann_entropy_with_tol(eigenvalues: &[f64], tol: f64) -> Result<f64> {
    let sum: f64 = eigenvalues.iter().sum();
    let sum_tol = tol.max(DEFAULT_PHYSICALITY_TOL);
    if !sum.is_finite() || (sum - 1.0).abs() > sum_tol {
        return Err(Error::InvalidInput(format!("spectrum sums to {sum}, expected 1")));
    }
    let mut s = 0.0;
    for &lambda in eigenvalues {
        if !(-tol..=1.0 + tol).contains(&lambda) {
            return Err(Error::InvalidInput(format!("eigenvalue {lambda} outside [0, 1]")));
        }
        let lambda = lambda.clamp(0.0, 1.0);
        if lambda > 0.0 {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s.max(0.0))
}
