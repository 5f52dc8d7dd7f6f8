//! Regime map over (σ_Φ, Δ) at σ_Ψ = 0: physical region, regime labels,
//! separability line and izodiscord contours.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{classify_regime, concurrence_bell, discord_bell, ChiMode, RegimeLabel, DEFAULT_BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::numeric::{bisect_predicate, linspace};
use crate::states::{BellDiagonalState, DEFAULT_PHYSICALITY_TOL};
use crate::teleportation::{average_fidelity, extremal_fidelities, CLASSICAL_FIDELITY_LIMIT, DEFAULT_FIDELITY_BOUNDARY_TOL};

/// Grid over σ_Φ (columns) and Δ (rows).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub sigma_range: (f64, f64),
    pub delta_range: (f64, f64),
    pub n_sigma: usize,
    pub n_delta: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { sigma_range: (0.0, 0.5), delta_range: (-0.5, 0.5), n_sigma: 201, n_delta: 201 }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("sigma", self.sigma_range), ("delta", self.delta_range)] {
            if !(lo.is_finite() && hi.is_finite()) || lo >= hi || lo < -0.5 || hi > 0.5 {
                return Err(Error::InvalidInput(format!(
                    "{name} range [{lo}, {hi}] must be increasing and inside [-0.5, 0.5]"
                )));
            }
        }
        if self.n_sigma < 2 || self.n_delta < 2 {
            return Err(Error::InvalidInput("grid counts must be at least 2".into()));
        }
        Ok(())
    }
}

/// One grid cell. Unphysical cells carry only their coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma_phi: f64,
    pub delta: f64,
    pub physical: bool,
    pub regime: Option<RegimeLabel>,
    pub discord: Option<f64>,
    pub classical: Option<f64>,
    pub concurrence: Option<f64>,
    pub f2_av: Option<f64>,
    pub f2_min: Option<f64>,
    pub f2_max: Option<f64>,
}

fn sweep_cell(sigma_phi: f64, delta: f64, mode: ChiMode) -> Result<SweepRow> {
    let state = BellDiagonalState::from_delta_unchecked(delta, sigma_phi, 0.0);
    if !state.is_physical(DEFAULT_PHYSICALITY_TOL) {
        return Ok(SweepRow {
            sigma_phi,
            delta,
            physical: false,
            regime: None,
            discord: None,
            classical: None,
            concurrence: None,
            f2_av: None,
            f2_min: None,
            f2_max: None,
        });
    }
    let triple = discord_bell(&state, mode)?;
    let extrema = extremal_fidelities(&state, DEFAULT_FIDELITY_BOUNDARY_TOL)?;
    Ok(SweepRow {
        sigma_phi,
        delta,
        physical: true,
        regime: Some(classify_regime(&state, DEFAULT_BOUNDARY_TOL)),
        discord: Some(triple.discord),
        classical: Some(triple.classical),
        concurrence: Some(concurrence_bell(&state)?),
        f2_av: Some(average_fidelity(&state)?),
        f2_min: Some(extrema.f2_min),
        f2_max: Some(extrema.f2_max),
    })
}

/// Evaluates every grid cell, Δ-major (rows of constant Δ), σ_Φ ascending within a row.
pub fn sweep(spec: &SweepSpec, mode: ChiMode) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let sigmas = linspace(spec.sigma_range.0, spec.sigma_range.1, spec.n_sigma);
    let deltas = linspace(spec.delta_range.0, spec.delta_range.1, spec.n_delta);
    let rows: Vec<Vec<SweepRow>> = deltas
        .par_iter()
        .map(|&delta| sigmas.iter().map(|&sigma| sweep_cell(sigma, delta, mode)).collect())
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Largest physical |σ_Φ| at occupation difference Δ, i.e. ρ_Φ = 1/4 + Δ/2.
pub fn max_physical_sigma(delta: f64) -> f64 {
    0.25 + 0.5 * delta
}

fn require_delta(delta: f64) -> Result<()> {
    if !(-0.5..=0.5).contains(&delta) {
        return Err(Error::InvalidInput(format!("delta {delta} outside [-0.5, 0.5]")));
    }
    Ok(())
}

/// σ_Φ* = ρ_Ψ = 1/4 − Δ/2: coherence above which the state is entangled.
///
/// For Δ < 0 the line lies outside the physical region (no entangled states).
pub fn separability_boundary(delta: f64) -> Result<f64> {
    require_delta(delta)?;
    Ok(0.25 - 0.5 * delta)
}

/// The separability line located numerically in two independent ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityRoots {
    pub delta: f64,
    pub closed_form: f64,
    /// Smallest σ_Φ ≥ 0 with positive concurrence.
    pub concurrence_root: Option<f64>,
    /// σ_Φ at which the average fidelity equals 2/3.
    pub fidelity_root: Option<f64>,
}

const ROOT_TOL: f64 = 1e-14;

/// Root-finds the separability line at fixed Δ, searching σ_Φ over the physical range.
/// Roots are `None` for Δ < 0, where the line leaves the physical region.
pub fn separability_roots(delta: f64) -> Result<SeparabilityRoots> {
    let closed_form = separability_boundary(delta)?;
    let hi = max_physical_sigma(delta);
    if delta < 0.0 {
        return Ok(SeparabilityRoots { delta, closed_form, concurrence_root: None, fidelity_root: None });
    }
    let entangled = |sigma: f64| {
        concurrence_bell(&BellDiagonalState::from_delta_unchecked(delta, sigma, 0.0)).is_ok_and(|c| c > 0.0)
    };
    let concurrence_root = bisect_predicate(entangled, 0.0, hi, ROOT_TOL);

    let excess = |sigma: f64| {
        average_fidelity(&BellDiagonalState::from_delta_unchecked(delta, sigma, 0.0))
            .map(|f| f - CLASSICAL_FIDELITY_LIMIT)
            .unwrap_or(f64::NAN)
    };
    // Average fidelity increases with σ_Φ, so the root is the first σ with a non-negative excess.
    let fidelity_root = bisect_predicate(|sigma| excess(sigma) >= -1e-15, 0.0, hi, ROOT_TOL);

    Ok(SeparabilityRoots {
        delta,
        closed_form,
        concurrence_root: Some(concurrence_root),
        fidelity_root: Some(fidelity_root),
    })
}

/// A point on an iso-discord contour.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub level: f64,
    pub delta: f64,
    pub sigma_phi: f64,
}

/// Default tolerance on the discord value for contour points.
pub const IZODISCORD_TOL: f64 = 1e-9;

fn discord_at(delta: f64, sigma: f64, mode: ChiMode) -> Result<f64> {
    Ok(discord_bell(&BellDiagonalState::from_delta_unchecked(delta, sigma, 0.0), mode)?.discord)
}

/// Solves D(σ_Φ; Δ) = `level` for σ_Φ ∈ [0, 1/4 + Δ/2] at `n_delta` values of Δ in
/// [−1/2, 1/2]. Points without a solution are omitted. Each Δ is solved independently.
pub fn izodiscord(level: f64, mode: ChiMode, n_delta: usize, tol: f64) -> Result<Vec<ContourPoint>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("izodiscord level {level} outside (0, 1)")));
    }
    if n_delta < 2 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput("need n_delta >= 2 and tol > 0".into()));
    }
    let deltas = linspace(-0.5, 0.5, n_delta);
    let points: Vec<Option<ContourPoint>> = deltas
        .par_iter()
        .map(|&delta| {
            let hi = max_physical_sigma(delta);
            if hi <= 0.0 || discord_at(delta, hi, mode)? < level {
                return Ok(None);
            }
            let (mut lo, mut hi) = (0.0, hi);
            let mut sigma = 0.5 * (lo + hi);
            for _ in 0..200 {
                sigma = 0.5 * (lo + hi);
                let d = discord_at(delta, sigma, mode)?;
                if (d - level).abs() <= tol && hi - lo <= 1e-12 {
                    break;
                }
                if d < level {
                    lo = sigma;
                } else {
                    hi = sigma;
                }
                if hi - lo <= f64::EPSILON * hi {
                    break;
                }
            }
            Ok(Some(ContourPoint { level, delta, sigma_phi: sigma }))
        })
        .collect::<Result<_>>()?;
    Ok(points.into_iter().flatten().collect())
}

/// True when discord is nondecreasing in σ_Φ over `[0, 1/4 + Δ/2]` at `samples` points.
pub fn discord_monotone_in_sigma(delta: f64, mode: ChiMode, samples: usize) -> Result<bool> {
    require_delta(delta)?;
    let values: Vec<f64> = linspace(0.0, max_physical_sigma(delta), samples)
        .into_iter()
        .map(|s| discord_at(delta, s, mode))
        .collect::<Result<_>>()?;
    Ok(values.windows(2).all(|w| w[1] >= w[0] - 1e-13))
}

/// `upper` lies strictly above `lower` wherever both have a point, and never
/// exists at a Δ where `lower` does not.
pub fn contours_nested(lower: &[ContourPoint], upper: &[ContourPoint]) -> bool {
    upper.iter().all(|u| {
        lower
            .iter()
            .find(|l| l.delta == u.delta)
            .is_some_and(|l| l.sigma_phi < u.sigma_phi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sweep_examples() {
        let spec = SweepSpec { n_sigma: 11, n_delta: 11, ..Default::default() };
        let rows = sweep(&spec, ChiMode::default()).unwrap();
        assert_eq!(rows.len(), 121);
        // row-major in Δ, σ_Φ ascending within each row
        assert_eq!((rows[0].delta, rows[0].sigma_phi), (-0.5, 0.0));
        assert_eq!((rows[1].delta, rows[1].sigma_phi), (-0.5, 0.05));

        let corner = rows.last().unwrap();
        assert_eq!((corner.sigma_phi, corner.delta), (0.5, 0.5));
        assert!(corner.physical);
        assert_eq!(corner.regime, Some(RegimeLabel::Boundary));

        let cell = sweep_cell(0.4, 0.0, ChiMode::default()).unwrap();
        assert!(!cell.physical);
        assert!(cell.discord.is_none() && cell.regime.is_none());

        for r in rows.iter().filter(|r| r.sigma_phi == 0.0 && r.physical) {
            assert!(r.discord.unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        let bad = SweepSpec { sigma_range: (0.0, 0.7), ..Default::default() };
        assert!(sweep(&bad, ChiMode::default()).is_err());
        let bad = SweepSpec { delta_range: (0.2, 0.1), ..Default::default() };
        assert!(sweep(&bad, ChiMode::default()).is_err());
        let bad = SweepSpec { n_sigma: 1, ..Default::default() };
        assert!(sweep(&bad, ChiMode::default()).is_err());
    }

    #[test]
    fn separability_examples() {
        assert_eq!(separability_boundary(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(separability_boundary(0.3).unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(separability_boundary(0.0).unwrap(), 0.25);
        assert!(separability_boundary(0.7).is_err());
        for delta in [0.0, 0.3, 0.5] {
            let r = separability_roots(delta).unwrap();
            assert_abs_diff_eq!(r.concurrence_root.unwrap(), r.closed_form, epsilon = 1e-12);
            assert_abs_diff_eq!(r.fidelity_root.unwrap(), r.closed_form, epsilon = 1e-12);
        }
        assert_eq!(separability_roots(-0.2).unwrap().concurrence_root, None);
    }

    #[test]
    fn izodiscord_fixture_at_zero_delta() {
        // Independent bisection in double precision: σ_Φ = 0.1716115693570173, oracle D = 0.1.
        let points = izodiscord(0.1, ChiMode::OracleCalibrated, 101, IZODISCORD_TOL).unwrap();
        let p = points.iter().find(|p| p.delta.abs() < 1e-12).unwrap();
        assert_abs_diff_eq!(p.sigma_phi, 0.171_611_569_357_017_3, epsilon = 1e-9);
    }

    #[test]
    fn high_level_contour_hugs_bell_corner() {
        let points = izodiscord(0.98, ChiMode::OracleCalibrated, 201, IZODISCORD_TOL).unwrap();
        assert!(!points.is_empty());
        assert!(points.iter().all(|p| p.delta > 0.45 && p.sigma_phi > 0.45), "{points:?}");
    }

    #[test]
    fn izodiscord_levels_are_nested() {
        let levels = [0.1, 0.3, 0.5, 0.7];
        let contours: Vec<_> = levels
            .iter()
            .map(|&l| izodiscord(l, ChiMode::OracleCalibrated, 201, IZODISCORD_TOL).unwrap())
            .collect();
        for pair in contours.windows(2) {
            assert!(contours_nested(&pair[0], &pair[1]));
        }
        assert!(izodiscord(1.0, ChiMode::default(), 11, 1e-9).is_err());
        assert!(izodiscord(0.0, ChiMode::default(), 11, 1e-9).is_err());
    }

    #[test]
    fn discord_is_monotone_in_coherence() {
        for delta in linspace(-0.5, 0.5, 41) {
            assert!(discord_monotone_in_sigma(delta, ChiMode::OracleCalibrated, 400).unwrap(), "delta {delta}");
        }
    }
}
