//! Teleportation of a single qubit through a Bell-diagonal resource.

use nalgebra::{Matrix2, SMatrix, Vector2, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{
    BellDiagonalState, PureQubitState, SingleQubitDensityMatrix, TwoQubitDensityMatrix,
    DEFAULT_PHYSICALITY_TOL,
};

/// Fidelity values that are a classical-channel benchmark for qubit teleportation.
pub const CLASSICAL_FIDELITY_LIMIT: f64 = 2.0 / 3.0;

/// Default |Δ − σ_Φ| below which every input is teleported equally well.
pub const DEFAULT_FIDELITY_BOUNDARY_TOL: f64 = 1e-12;

/// Class of input states attaining an extremal fidelity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityClass {
    /// |0> and |1>.
    Poles,
    /// (|0> + e^{iφ}|1>)/√2.
    Equator,
    AllStates,
}

impl FidelityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FidelityClass::Poles => "poles",
            FidelityClass::Equator => "equator",
            FidelityClass::AllStates => "all-states",
        }
    }
}

impl std::fmt::Display for FidelityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Worst- and best-case fidelity with the input classes attaining them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityExtrema {
    pub f2_min: f64,
    pub f2_max: f64,
    pub argmin_class: FidelityClass,
    pub argmax_class: FidelityClass,
}

fn require_closed_form_domain(s: &BellDiagonalState) -> Result<()> {
    s.check(DEFAULT_PHYSICALITY_TOL)?;
    if s.sigma_psi() != 0.0 {
        return Err(Error::Unsupported(
            "closed-form teleportation requires sigma_psi = 0; use simulate_protocol".into(),
        ));
    }
    Ok(())
}

/// Output of teleporting `psi` through the resource `s` (σ_Ψ = 0).
pub fn teleported_state(s: &BellDiagonalState, psi: &PureQubitState) -> Result<SingleQubitDensityMatrix> {
    require_closed_form_domain(s)?;
    let (a, b) = (psi.alpha(), psi.beta());
    let (pa, pb) = (a.norm_sqr(), b.norm_sqr());
    let (rho_phi, rho_psi) = (s.rho_phi(), s.rho_psi());
    let off = a * b.conj() * (2.0 * s.sigma_phi());
    Ok(SingleQubitDensityMatrix::from_matrix(Matrix2::new(
        Complex64::new(2.0 * rho_phi * pa + 2.0 * rho_psi * pb, 0.0),
        off,
        off.conj(),
        Complex64::new(2.0 * rho_psi * pa + 2.0 * rho_phi * pb, 0.0),
    )))
}

/// F² = 2ρ_Φ − 4(Δ − σ_Φ)|α|²(1 − |α|²).
pub fn fidelity(s: &BellDiagonalState, psi: &PureQubitState) -> Result<f64> {
    require_closed_form_domain(s)?;
    let p = psi.population_zero();
    Ok(2.0 * s.rho_phi() - 4.0 * (s.delta() - s.sigma_phi()) * p * (1.0 - p))
}

/// Fidelity averaged over the Bloch sphere, 2ρ_Φ − (2/3)(Δ − σ_Φ).
pub fn average_fidelity(s: &BellDiagonalState) -> Result<f64> {
    require_closed_form_domain(s)?;
    // single final division keeps rational cases such as 2/3 correctly rounded
    Ok((6.0 * s.rho_phi() - 2.0 * (s.delta() - s.sigma_phi())) / 3.0)
}

/// Monte Carlo estimate of a mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

const MC_CHUNK: usize = 4096;

/// Haar-random input states: cos θ and φ uniform. Chunk `k` draws from ChaCha
/// stream `k` of `seed`, so the result does not depend on thread scheduling.
pub fn haar_samples(seed: u64, n_samples: usize) -> impl ParallelIterator<Item = Vec<PureQubitState>> {
    let n_chunks = n_samples.div_ceil(MC_CHUNK);
    (0..n_chunks).into_par_iter().map(move |chunk| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64);
        let len = MC_CHUNK.min(n_samples - chunk * MC_CHUNK);
        (0..len)
            .map(|_| {
                let cos_theta: f64 = rng.random_range(-1.0..=1.0);
                let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                PureQubitState::from_bloch(cos_theta.acos(), phi)
            })
            .collect()
    })
}

/// Haar average of the fidelity, for checking [`average_fidelity`].
pub fn average_fidelity_monte_carlo(
    s: &BellDiagonalState,
    n_samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    require_closed_form_domain(s)?;
    if n_samples < 2 {
        return Err(Error::InvalidInput("need at least two Monte Carlo samples".into()));
    }
    let partials: Vec<(f64, f64)> = haar_samples(seed, n_samples)
        .map(|chunk| {
            chunk.iter().fold((0.0, 0.0), |(sum, sq), psi| {
                let f = fidelity(s, psi).expect("domain checked above");
                (sum + f, sq + f * f)
            })
        })
        .collect();
    let (sum, sq) = partials.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MonteCarloEstimate { mean, std_error: (variance / n).sqrt(), samples: n_samples })
}

/// Extremal fidelities over all inputs: ½ + min/max(Δ, σ_Φ).
///
/// Poles and equator trade places as Δ − σ_Φ changes sign; within
/// `boundary_tol` of Δ = σ_Φ the fidelity is input independent.
pub fn extremal_fidelities(s: &BellDiagonalState, boundary_tol: f64) -> Result<FidelityExtrema> {
    require_closed_form_domain(s)?;
    let (delta, sigma) = (s.delta(), s.sigma_phi());
    let pole = 0.5 + delta;
    let equator = 0.5 + sigma;
    let extrema = if (delta - sigma).abs() <= boundary_tol {
        let f = 2.0 * s.rho_phi();
        FidelityExtrema {
            f2_min: f,
            f2_max: f,
            argmin_class: FidelityClass::AllStates,
            argmax_class: FidelityClass::AllStates,
        }
    } else if delta > sigma {
        FidelityExtrema {
            f2_min: equator,
            f2_max: pole,
            argmin_class: FidelityClass::Equator,
            argmax_class: FidelityClass::Poles,
        }
    } else {
        FidelityExtrema {
            f2_min: pole,
            f2_max: equator,
            argmin_class: FidelityClass::Poles,
            argmax_class: FidelityClass::Equator,
        }
    };
    Ok(extrema)
}

/// A grid point of the input-state search: |0> population and relative phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputPoint {
    pub population_zero: f64,
    pub phase: f64,
}

impl InputPoint {
    /// Poles for population 0 or 1, Equator for ½, `None` otherwise.
    pub fn class(&self, tol: f64) -> Option<FidelityClass> {
        let p = self.population_zero;
        if p <= tol || p >= 1.0 - tol {
            Some(FidelityClass::Poles)
        } else if (p - 0.5).abs() <= tol {
            Some(FidelityClass::Equator)
        } else {
            None
        }
    }

    pub fn state(&self) -> PureQubitState {
        PureQubitState::from_population(self.population_zero, self.phase)
    }
}

/// Brute-force extremal fidelities over a (population, phase) grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFidelityExtrema {
    pub f2_min: f64,
    pub f2_max: f64,
    pub argmin: InputPoint,
    pub argmax: InputPoint,
    /// Largest spread of the fidelity over phases at a fixed population.
    pub max_phase_spread: f64,
}

/// Evaluates ⟨ψ|ρ_t|ψ⟩ from [`teleported_state`] on an `n_amplitude` × `n_phase`
/// grid over |α|² ∈ [0, 1] and phase ∈ [0, 2π). Ties keep the first grid point.
pub fn fidelity_extrema_oracle(
    s: &BellDiagonalState,
    n_amplitude: usize,
    n_phase: usize,
) -> Result<GridFidelityExtrema> {
    require_closed_form_domain(s)?;
    if n_amplitude < 2 || n_phase < 1 {
        return Err(Error::InvalidInput(format!("grid {n_amplitude}x{n_phase} too small")));
    }
    let populations = crate::numeric::linspace(0.0, 1.0, n_amplitude);
    // (min, argmin, max, argmax, max − min) over phases at one population
    type Row = (f64, InputPoint, f64, InputPoint, f64);
    let rows: Vec<Result<Row>> = populations
        .par_iter()
        .map(|&p| {
            let mut lo = (f64::INFINITY, InputPoint { population_zero: p, phase: 0.0 });
            let mut hi = (f64::NEG_INFINITY, lo.1);
            for j in 0..n_phase {
                let point = InputPoint {
                    population_zero: p,
                    phase: j as f64 * std::f64::consts::TAU / n_phase as f64,
                };
                let psi = point.state();
                let f = teleported_state(s, &psi)?.expectation(&psi);
                if f < lo.0 {
                    lo = (f, point);
                }
                if f > hi.0 {
                    hi = (f, point);
                }
            }
            Ok((lo.0, lo.1, hi.0, hi.1, hi.0 - lo.0))
        })
        .collect();

    let mut out: Option<GridFidelityExtrema> = None;
    for row in rows {
        let (fmin, pmin, fmax, pmax, spread) = row?;
        match out.as_mut() {
            None => {
                out = Some(GridFidelityExtrema {
                    f2_min: fmin,
                    f2_max: fmax,
                    argmin: pmin,
                    argmax: pmax,
                    max_phase_spread: spread,
                })
            }
            Some(acc) => {
                if fmin < acc.f2_min {
                    acc.f2_min = fmin;
                    acc.argmin = pmin;
                }
                if fmax > acc.f2_max {
                    acc.f2_max = fmax;
                    acc.argmax = pmax;
                }
                acc.max_phase_spread = acc.max_phase_spread.max(spread);
            }
        }
    }
    Ok(out.expect("grid has at least two rows"))
}

/// Bell-measurement outcomes on (input, A), in the order used by [`ProtocolOutcome`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] =
        [BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus, BellOutcome::PsiMinus];

    /// Amplitudes over |00>, |01>, |10>, |11>.
    pub fn vector(self) -> Vector4<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b, c, d) = match self {
            BellOutcome::PhiPlus => (h, 0.0, 0.0, h),
            BellOutcome::PhiMinus => (h, 0.0, 0.0, -h),
            BellOutcome::PsiPlus => (0.0, h, h, 0.0),
            BellOutcome::PsiMinus => (0.0, h, -h, 0.0),
        };
        Vector4::new(a, b, c, d).map(|x| Complex64::new(x, 0.0))
    }

    /// Pauli correction applied to qubit B: I, Z, X and ZX.
    pub fn correction(self) -> Matrix2<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let x = Matrix2::new(zero, one, one, zero);
        let z = Matrix2::new(one, zero, zero, -one);
        match self {
            BellOutcome::PhiPlus => Matrix2::identity(),
            BellOutcome::PhiMinus => z,
            BellOutcome::PsiPlus => x,
            BellOutcome::PsiMinus => z * x,
        }
    }
}

/// Result of the full three-qubit protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolOutcome {
    /// Outcome-averaged, corrected state of qubit B.
    pub output: SingleQubitDensityMatrix,
    /// Probabilities in [`BellOutcome::ALL`] order.
    pub probabilities: [f64; 4],
}

/// Runs standard teleportation of `psi` through an arbitrary two-qubit resource.
///
/// Qubit order is (input, A, B). The pair (input, A) is projected onto the Bell
/// basis, B receives the outcome-conditioned Pauli correction, and the corrected
/// branches are summed.
pub fn simulate_protocol(resource: &TwoQubitDensityMatrix, psi: &PureQubitState) -> Result<ProtocolOutcome> {
    resource.require_physical(DEFAULT_PHYSICALITY_TOL)?;
    let input = Vector2::new(psi.alpha(), psi.beta());
    let input_rho: Matrix2<Complex64> = input * input.adjoint();
    let joint: SMatrix<Complex64, 8, 8> = input_rho.kronecker(resource.matrix());

    let mut output = Matrix2::zeros();
    let mut probabilities = [0.0; 4];
    for (k, outcome) in BellOutcome::ALL.into_iter().enumerate() {
        let bell = outcome.vector();
        let mut branch = Matrix2::<Complex64>::zeros();
        for j in 0..2 {
            for l in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..4 {
                    for y in 0..4 {
                        acc += bell[x].conj() * bell[y] * joint[(2 * x + j, 2 * y + l)];
                    }
                }
                branch[(j, l)] = acc;
            }
        }
        probabilities[k] = branch.trace().re;
        let u = outcome.correction();
        output += u * branch * u.adjoint();
    }
    Ok(ProtocolOutcome { output: SingleQubitDensityMatrix::from_matrix(output), probabilities })
}
