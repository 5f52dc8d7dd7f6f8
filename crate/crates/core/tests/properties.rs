//! Property tests for the library invariants.

use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;
use qdiscord::channels::{
    enhancement_threshold, gad_gaussian_state, transition_time, transverse_short_time_state,
    worst_case_fidelity_at_tc, DecoherenceParams, TransverseParams,
};
use qdiscord::correlations::{
    chi, classical_correlations_bell, classical_correlations_oracle, classify_regime, concurrence_bell,
    discord_bell, discord_oracle, mutual_information_bell, regime_margin, OracleGrid,
};
use qdiscord::phase_diagram::{discord_monotone_in_sigma, max_physical_sigma};
use qdiscord::states::{von_neumann_entropy, Subsystem};
use qdiscord::teleportation::{
    average_fidelity, extremal_fidelities, fidelity, simulate_protocol, FidelityClass, CLASSICAL_FIDELITY_LIMIT,
};
use qdiscord::{BellDiagonalState, ChiMode, PureQubitState, RegimeLabel, TwoQubitDensityMatrix};

/// Bell-diagonal state with eigenvalues uniform on the simplex.
fn bell_diagonal() -> impl Strategy<Value = BellDiagonalState> {
    prop::array::uniform4(1e-6f64..1.0).prop_map(|w| {
        let sum: f64 = w.iter().sum();
        let [a, b, c, d] = w.map(|x| x / sum);
        BellDiagonalState::new_unchecked(0.5 * (a + b), 0.5 * (c + d), 0.5 * (a - b), 0.5 * (c - d))
    })
}

/// Physical state with σ_Ψ = 0, either sign of Δ and σ_Φ.
fn sigma_psi_zero() -> impl Strategy<Value = BellDiagonalState> {
    (-0.5f64..=0.5, -1.0f64..=1.0)
        .prop_map(|(d, u)| BellDiagonalState::from_delta_unchecked(d, u * (0.25 + 0.5 * d), 0.0))
}

/// Physical state with σ_Ψ = 0, Δ ≥ 0, σ_Φ ≥ 0.
fn quadrant() -> impl Strategy<Value = BellDiagonalState> {
    (0.0f64..=0.5, 0.0f64..=1.0)
        .prop_map(|(d, u)| BellDiagonalState::from_delta_unchecked(d, u * (0.25 + 0.5 * d), 0.0))
}

/// Random full-rank two-qubit state G G† / Tr(G G†).
fn general_state() -> impl Strategy<Value = TwoQubitDensityMatrix> {
    prop::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let g = Matrix4::from_fn(|i, j| Complex64::new(v[4 * i + j], v[16 + 4 * i + j]));
        let rho = g * g.adjoint();
        let tr = rho.trace().re;
        TwoQubitDensityMatrix::from_matrix(rho / Complex64::new(tr, 0.0))
    })
}

fn pure_input() -> impl Strategy<Value = PureQubitState> {
    (-1.0f64..=1.0, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(z, phi)| PureQubitState::from_bloch(z.acos(), phi))
}

/// Γ/γ ≤ 10 keeps Δ(t) and σ_Φ(t) representable out to several t_c.
fn rates() -> impl Strategy<Value = DecoherenceParams> {
    (0.05f64..10.0, 0.05f64..3.0).prop_map(|(ratio, gp)| DecoherenceParams::from_bell(ratio * gp, gp).unwrap())
}

const MODES: [ChiMode; 2] = [ChiMode::AsPrinted, ChiMode::OracleCalibrated];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn analytic_spectrum_matches_dense(s in bell_diagonal()) {
        let analytic = s.eigenvalues();
        let dense = s.to_dense().eigenvalues();
        for (a, d) in analytic.iter().zip(dense) {
            prop_assert!((a - d).abs() <= 1e-10, "{analytic:?} vs {dense:?}");
        }
    }

    #[test]
    fn marginals_are_maximally_mixed(s in bell_diagonal()) {
        for sub in [Subsystem::A, Subsystem::B] {
            let m = s.to_dense().partial_trace(sub);
            prop_assert!((m.get(0, 0).re - 0.5).abs() <= 1e-12);
            prop_assert!((m.get(1, 1).re - 0.5).abs() <= 1e-12);
            prop_assert!(m.get(0, 1).norm() <= 1e-12);
        }
    }

    #[test]
    fn correlation_vector_round_trip(s in bell_diagonal()) {
        let [c1, c2, c3] = s.correlation_vector();
        let back = BellDiagonalState::from_correlation_vector(c1, c2, c3).unwrap();
        for (x, y) in [
            (s.rho_phi(), back.rho_phi()),
            (s.rho_psi(), back.rho_psi()),
            (s.sigma_phi(), back.sigma_phi()),
            (s.sigma_psi(), back.sigma_psi()),
        ] {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn entropy_ignores_eigenvalue_order(s in bell_diagonal(), perm in Just([3usize, 0, 2, 1])) {
        let e = s.eigenvalues();
        let shuffled: Vec<f64> = perm.iter().map(|&i| e[i]).collect();
        let a = von_neumann_entropy(&e).unwrap();
        let b = von_neumann_entropy(&shuffled).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn discord_plus_classical_is_mutual_information(s in bell_diagonal()) {
        for mode in MODES {
            let t = discord_bell(&s, mode).unwrap();
            prop_assert_eq!(t.discord + t.classical, t.mutual_information);
            prop_assert_eq!(t.mutual_information, mutual_information_bell(&s).unwrap());
        }
    }

    #[test]
    fn regime_is_independent_of_chi_scaling(s in bell_diagonal(), k in 0.01f64..100.0) {
        let d = s.delta().abs();
        let coh = s.sigma_phi().abs() + s.sigma_psi().abs();
        let scaled = if k * d > k * coh { RegimeLabel::QuantumDecoherence }
            else if k * d < k * coh { RegimeLabel::ClassicalDecoherence }
            else { RegimeLabel::Boundary };
        prop_assert_eq!(classify_regime(&s, 0.0), scaled);
        // both chi normalizations pick the same argument
        prop_assert!((chi(&s, ChiMode::OracleCalibrated) - 2.0 * chi(&s, ChiMode::AsPrinted)).abs() <= 1e-15);
    }

    #[test]
    fn concurrence_vanishes_exactly_for_ppt(s in bell_diagonal()) {
        let c = concurrence_bell(&s).unwrap();
        let min_pt = s.to_dense().min_partial_transpose_eigenvalue();
        if c == 0.0 {
            prop_assert!(min_pt >= -1e-10, "c = 0 but min PT eigenvalue {min_pt}");
        } else if c > 1e-9 {
            prop_assert!(min_pt < -1e-10, "c = {c} but min PT eigenvalue {min_pt}");
        }
    }

    #[test]
    fn fidelity_sandwich(s in sigma_psi_zero()) {
        let e = extremal_fidelities(&s, 1e-12).unwrap();
        let av = average_fidelity(&s).unwrap();
        prop_assert!(e.f2_min <= av + 1e-15 && av <= e.f2_max + 1e-15, "{} {av} {}", e.f2_min, e.f2_max);
    }

    #[test]
    fn protocol_output_is_a_state(s in bell_diagonal(), psi in pure_input()) {
        let out = simulate_protocol(&s.to_dense(), &psi).unwrap();
        let report = out.output.validate(1e-12);
        prop_assert!(report.physical, "{report:?}");
        let total: f64 = out.probabilities.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn argmin_class_tracks_regime(s in quadrant()) {
        let e = extremal_fidelities(&s, 1e-12).unwrap();
        let margin = s.delta().abs() - s.sigma_phi().abs();
        if margin < -1e-12 {
            prop_assert_eq!(e.argmin_class, FidelityClass::Poles);
            prop_assert_eq!(e.argmax_class, FidelityClass::Equator);
        } else if margin > 1e-12 {
            prop_assert_eq!(e.argmin_class, FidelityClass::Equator);
            prop_assert_eq!(e.argmax_class, FidelityClass::Poles);
        } else {
            prop_assert_eq!(e.argmin_class, FidelityClass::AllStates);
        }
    }

    #[test]
    fn argmin_class_follows_signed_comparison(s in sigma_psi_zero()) {
        let e = extremal_fidelities(&s, 1e-12).unwrap();
        let gap = s.delta() - s.sigma_phi();
        if gap < -1e-12 {
            prop_assert_eq!(e.argmin_class, FidelityClass::Poles);
        } else if gap > 1e-12 {
            prop_assert_eq!(e.argmin_class, FidelityClass::Equator);
        }
    }

    #[test]
    fn fidelity_is_state_independent_on_the_transition(d in 0.0f64..=0.5, psi in pure_input(), phi in pure_input()) {
        let s = BellDiagonalState::from_delta(d, d, 0.0).unwrap();
        prop_assert!((fidelity(&s, &psi).unwrap() - fidelity(&s, &phi).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn useful_teleportation_iff_entangled(s in quadrant()) {
        let excess = s.delta() + 2.0 * s.sigma_phi() - 0.5;
        prop_assume!(excess.abs() > 1e-9);
        let beats_classical = average_fidelity(&s).unwrap() > CLASSICAL_FIDELITY_LIMIT;
        let entangled = concurrence_bell(&s).unwrap() > 0.0;
        prop_assert_eq!(beats_classical, entangled);
    }

    #[test]
    fn transition_is_on_the_regime_boundary(p in rates()) {
        let t_c = transition_time(&p).unwrap();
        let s = gad_gaussian_state(&p, t_c).unwrap();
        prop_assert!((s.delta().abs() - s.sigma_phi().abs()).abs() <= 1e-12);
    }

    #[test]
    fn regimes_on_either_side_of_tc(p in rates(), frac in 0.001f64..0.999, later in 1.001f64..5.0) {
        let t_c = transition_time(&p).unwrap();
        let before = gad_gaussian_state(&p, frac * t_c).unwrap();
        let after = gad_gaussian_state(&p, later * t_c).unwrap();
        prop_assert_eq!(classify_regime(&before, 0.0), RegimeLabel::ClassicalDecoherence);
        prop_assert_eq!(classify_regime(&after, 0.0), RegimeLabel::QuantumDecoherence);
    }

    #[test]
    fn trajectory_states_are_physical(p in rates(), t in 0.0f64..20.0, gp in 0.1f64..10.0, x in 0.0f64..=1.0) {
        prop_assert!(gad_gaussian_state(&p, t).unwrap().is_physical(1e-12));
        let tp = TransverseParams::new(gp, p.gamma_relax, p.initial).unwrap();
        prop_assert!(transverse_short_time_state(&tp, x * gp).unwrap().is_physical(1e-12));
    }

    #[test]
    fn enhancement_iff_below_threshold(ratio in 0.05f64..4.0, gp in 0.2f64..3.0) {
        prop_assume!((ratio - enhancement_threshold()).abs() > 1e-6);
        let r = worst_case_fidelity_at_tc(&DecoherenceParams::from_bell(ratio * gp, gp).unwrap()).unwrap();
        let beats = r.closed_form > CLASSICAL_FIDELITY_LIMIT;
        prop_assert_eq!(beats, ratio < enhancement_threshold());
        prop_assert_eq!(r.enhanced, beats);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn calibrated_closed_form_matches_oracle(s in bell_diagonal()) {
        let oracle = classical_correlations_oracle(&s.to_dense(), &OracleGrid::default()).unwrap().classical;
        let closed = classical_correlations_bell(&s, ChiMode::OracleCalibrated).unwrap();
        prop_assert!((oracle - closed).abs() <= 1e-4, "oracle {oracle} vs closed {closed}");
    }

    #[test]
    fn discord_monotone_in_coherence(d in -0.5f64..=0.5) {
        for mode in MODES {
            prop_assert!(discord_monotone_in_sigma(d, mode, 200).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finer_oracle_grids_never_lose(m in general_state()) {
        // nested grids: every coarse point is also a fine point
        let coarse = OracleGrid::new(5, 8).without_refinement();
        let fine = OracleGrid::new(17, 32).without_refinement();
        let c = classical_correlations_oracle(&m, &coarse).unwrap().classical;
        let f = classical_correlations_oracle(&m, &fine).unwrap().classical;
        prop_assert!(f >= c - 1e-9);
        let refined = classical_correlations_oracle(&m, &OracleGrid::default()).unwrap().classical;
        prop_assert!(refined >= f - 1e-9);
    }

    #[test]
    fn oracle_discord_bounded_by_marginal_entropy(m in general_state()) {
        let d = discord_oracle(&m, &OracleGrid::new(32, 64)).unwrap().discord;
        let s_a = m.partial_trace(Subsystem::B).entropy(1e-12).unwrap();
        let s_b = m.partial_trace(Subsystem::A).entropy(1e-12).unwrap();
        prop_assert!(d >= -1e-9, "negative discord {d}");
        prop_assert!(d <= s_a.min(s_b) + 1e-6, "discord {d} above marginal entropies {s_a}, {s_b}");
    }
}

#[test]
fn as_printed_closed_form_diverges_from_oracle() {
    let bell = BellDiagonalState::bell_phi_plus();
    let oracle = classical_correlations_oracle(&bell.to_dense(), &OracleGrid::default()).unwrap().classical;
    let printed = classical_correlations_bell(&bell, ChiMode::AsPrinted).unwrap();
    assert!((oracle - printed).abs() > 0.5);
}

#[test]
fn pure_entropy_is_exactly_zero() {
    assert_eq!(von_neumann_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
    assert_eq!(BellDiagonalState::bell_phi_plus().to_dense().entropy(1e-12).unwrap(), 0.0);
}

#[test]
fn pure_dephasing_stays_quantum() {
    for i in 0..=1000 {
        let sigma = 0.5 * i as f64 / 1000.0;
        let s = BellDiagonalState::from_delta(0.5, sigma, 0.0).unwrap();
        let label = classify_regime(&s, 1e-12);
        if i < 1000 {
            assert_eq!(label, RegimeLabel::QuantumDecoherence, "sigma_phi = {sigma}");
        } else {
            assert_eq!(label, RegimeLabel::Boundary);
        }
    }
}

/// First time the concurrence vanishes along the trajectory.
fn sudden_death_time(p: &DecoherenceParams) -> f64 {
    let entangled = |t: f64| concurrence_bell(&gad_gaussian_state(p, t).unwrap()).unwrap() > 0.0;
    let mut hi = 1.0;
    while entangled(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if entangled(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[test]
fn sudden_death_reachable_from_both_regimes() {
    let mut seen = Vec::new();
    for (g, gp) in [(2.0, 1.0), (0.5, 1.0)] {
        let p = DecoherenceParams::from_bell(g, gp).unwrap();
        let t = sudden_death_time(&p);
        let label = classify_regime(&gad_gaussian_state(&p, t).unwrap(), 1e-12);
        seen.push(label);
    }
    assert_eq!(seen, [RegimeLabel::ClassicalDecoherence, RegimeLabel::QuantumDecoherence]);
}

#[test]
fn sweep_regime_boundary_is_the_diagonal() {
    use qdiscord::phase_diagram::{sweep, SweepSpec};
    let rows = sweep(&SweepSpec::default(), ChiMode::OracleCalibrated).unwrap();
    for r in rows.iter().filter(|r| r.physical) {
        let s = BellDiagonalState::from_delta_unchecked(r.delta, r.sigma_phi, 0.0);
        let expected = classify_regime(&s, qdiscord::correlations::DEFAULT_BOUNDARY_TOL);
        assert_eq!(r.regime, Some(expected));
        if (r.delta.abs() - r.sigma_phi).abs() > 1e-12 {
            assert_eq!(regime_margin(&s) > 0.0, r.delta.abs() > r.sigma_phi);
        }
        assert!(r.sigma_phi <= max_physical_sigma(r.delta) + 1e-15);
    }
}
