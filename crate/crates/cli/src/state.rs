use qdiscord::{BellDiagonalState, Error, Result};

use crate::args::StateArgs;

/// Builds the state described by the flags, validated at `tol`.
/// Returns `None` when no state flag was given at all.
pub fn resolve(a: &StateArgs, tol: f64) -> Result<Option<BellDiagonalState>> {
    if a.bell {
        return Ok(Some(BellDiagonalState::bell_phi_plus()));
    }
    if a.maximally_mixed {
        return Ok(Some(BellDiagonalState::maximally_mixed()));
    }
    let sigma_phi = a.sigma_phi.unwrap_or(0.0);
    let sigma_psi = a.sigma_psi.unwrap_or(0.0);
    let (rho_phi, rho_psi) = match (a.delta, a.rho_phi, a.rho_psi) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::InvalidInput("--delta conflicts with --rho-phi/--rho-psi".into()))
        }
        (Some(d), None, None) => (0.25 + 0.5 * d, 0.25 - 0.5 * d),
        (None, Some(p), Some(q)) => (p, q),
        (None, Some(p), None) => (p, 0.5 - p),
        (None, None, Some(q)) => (0.5 - q, q),
        (None, None, None) => {
            if a.sigma_phi.is_some() || a.sigma_psi.is_some() {
                return Err(Error::InvalidInput(
                    "coherences given without occupations; add --rho-phi or --delta".into(),
                ));
            }
            return Ok(None);
        }
    };
    BellDiagonalState::with_tolerance(rho_phi, rho_psi, sigma_phi, sigma_psi, tol).map(Some)
}

pub fn require(a: &StateArgs, tol: f64) -> Result<BellDiagonalState> {
    resolve(a, tol)?.ok_or_else(|| {
        Error::InvalidInput("no state given; use --bell, --maximally-mixed, --rho-phi or --delta".into())
    })
}
