import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tmsqueeze.errors import ConfigError, RegimeWarning, UnstableRegime
from tmsqueeze.model import (
    FOUR_TONE,
    TOPOLOGY_CAV,
    TWO_TONE,
    DriveScheme,
    EffectiveModel,
    PhysicalSetup,
    build_collective_adiabatic,
    build_cr_harmonics,
    build_mode_operator,
    build_rwa_quadrature,
    effective_from_four_tone,
    effective_from_setup,
    effective_from_two_tone,
    mode_to_quadrature,
    validate_regime,
)
from tmsqueeze.numerics import solve_lyapunov, stability_report


def two_tone_setup(g_a=80.0, g_b=80.0, E_plus=4e9, E_minus=8e9, nbar=0.0):
    return PhysicalSetup(
        omega_a=1.1e8, omega_b=0.9e8, kappa=1e6, gamma_a=40.0, gamma_b=40.0,
        nbar_a=nbar, nbar_b=nbar, g_a=g_a, g_b=g_b,
        drive=DriveScheme(variant=TWO_TONE, E_plus=E_plus, E_minus=E_minus))


def four_tone_setup(g_a=80.0, g_b=80.0, sideband=(4e9, 8e9, 4e9, 8e9), Omega=1e5):
    E_1plus, E_1minus, E_2plus, E_2minus = sideband
    return PhysicalSetup(
        omega_a=1.1e8, omega_b=0.9e8, kappa=1e6, gamma_a=40.0, gamma_b=40.0,
        nbar_a=0.0, nbar_b=0.0, g_a=g_a, g_b=g_b,
        drive=DriveScheme(variant=FOUR_TONE, E_1plus=E_1plus, E_1minus=E_1minus,
                          E_2plus=E_2plus, E_2minus=E_2minus, Omega=Omega))


class TestEffectiveFromTwoTone:
    def test_equal_couplings_no_imperfection(self):
        m = effective_from_two_tone(two_tone_setup())
        assert m.Gm_plus == 0.0 and m.Gm_minus == 0.0
        assert m.Omega == pytest.approx(10.0)  # (omega_a - omega_b)/2 in kappa units
        assert m.kappa == 1.0

    def test_coupling_ratio_from_g_mismatch(self):
        m = effective_from_two_tone(two_tone_setup(g_a=120.0, g_b=80.0))
        assert m.Gm_plus / m.G_plus == pytest.approx(+0.2, rel=1e-12)
        assert m.Gm_minus / m.G_minus == pytest.approx(-0.2, rel=1e-12)

    def test_single_red_tone(self):
        m = effective_from_two_tone(two_tone_setup(E_plus=0.0))
        assert m.G_plus == 0.0 and m.Gm_plus == 0.0
        assert m.r == 0.0

    def test_unstable_drive_rejected(self):
        with pytest.raises(UnstableRegime):
            effective_from_two_tone(two_tone_setup(E_plus=9e9, E_minus=8e9))

    def test_sideband_warning(self):
        setup = PhysicalSetup(
            omega_a=6e6, omega_b=4e6, kappa=1e6, gamma_a=40.0, gamma_b=40.0,
            nbar_a=0.0, nbar_b=0.0, g_a=80.0, g_b=80.0,
            drive=DriveScheme(variant=TWO_TONE, E_plus=1e8, E_minus=2e8))
        with pytest.warns(RegimeWarning, match="resolved-sideband"):
            effective_from_two_tone(setup)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(10.0, 200.0), st.floats(1e8, 9e9), st.floats(0.1, 0.9))
    def test_equal_couplings_always_cancel(self, g, E_minus, ratio):
        m = effective_from_two_tone(
            two_tone_setup(g_a=g, g_b=g, E_plus=ratio * E_minus, E_minus=E_minus))
        assert m.Gm_plus == 0.0 and m.Gm_minus == 0.0
        assert math.tanh(m.r) * m.G_minus == pytest.approx(m.G_plus, rel=1e-12)
        assert m.script_G ** 2 + m.G_plus ** 2 == pytest.approx(
            m.G_minus ** 2, rel=1e-12)


class TestEffectiveFromFourTone:
    def test_matched_drives_cancel_imperfections(self):
        # matched means cbar_1 / cbar_2 = g_b / g_a; response factors at
        # omega_1 and omega_2 differ slightly, compensate via amplitudes
        g_a, g_b = 80.0, 160.0
        setup0 = four_tone_setup(g_a=g_a, g_b=g_b)
        omega_1 = setup0.omega_a - setup0.drive.Omega
        omega_2 = setup0.omega_b + setup0.drive.Omega
        resp_1 = math.hypot(omega_1, setup0.kappa / 2)
        resp_2 = math.hypot(omega_2, setup0.kappa / 2)
        E2p, E2m = 4e9, 8e9
        want = g_b / g_a  # cbar_1 / cbar_2
        E1p = want * (E2p / resp_2) * resp_1
        E1m = want * (E2m / resp_2) * resp_1
        m = effective_from_four_tone(
            four_tone_setup(g_a=g_a, g_b=g_b, sideband=(E1p, E1m, E2p, E2m)))
        assert m.Gm_plus == pytest.approx(0.0, abs=1e-12 * m.G_plus)
        assert m.Gm_minus == pytest.approx(0.0, abs=1e-12 * m.G_minus)
        assert m.eps_plus == pytest.approx(1.0, rel=1e-12)

        # perturbing the mode-a amplitudes by +10% gives Gm/G = +-1/21
        m2 = effective_from_four_tone(
            four_tone_setup(g_a=g_a, g_b=g_b,
                            sideband=(1.1 * E1p, 1.1 * E1m, E2p, E2m)))
        assert m2.Gm_plus / m2.G_plus == pytest.approx(+1.0 / 21.0, rel=1e-10)
        assert m2.Gm_minus / m2.G_minus == pytest.approx(-1.0 / 21.0, rel=1e-10)

    def test_all_zero_amplitudes(self):
        with pytest.raises(ConfigError):
            # G_minus = 0 is rejected by the effective-model invariants
            effective_from_four_tone(four_tone_setup(sideband=(0, 0, 0, 0)))

    def test_records_cr_frequencies(self):
        m = effective_from_four_tone(four_tone_setup())
        assert m.delta == pytest.approx((1e7 - 1e5) / 1e6)
        assert m.omega_1 == pytest.approx((1.1e8 - 1e5) / 1e6)
        assert m.omega_2 == pytest.approx((0.9e8 + 1e5) / 1e6)
        assert m.omega_m == pytest.approx(100.0)


class TestEffectiveModel:
    def test_derived_quantities(self):
        m = EffectiveModel.from_ratios(0.9, 1200.0)
        assert m.C_minus == pytest.approx(1200.0, rel=1e-12)
        assert m.C_plus == pytest.approx(1200.0 * 0.81, rel=1e-12)
        assert math.tanh(m.r) == pytest.approx(0.9, rel=1e-12)
        assert m.Gamma == pytest.approx(4.0 * m.script_G ** 2, rel=1e-12)

    def test_stability_constraint(self):
        with pytest.raises(UnstableRegime):
            EffectiveModel(G_plus=1.0, G_minus=1.0)
        m = EffectiveModel(G_plus=1.0, G_minus=1.0, gamma_a=0.0, gamma_b=0.0,
                           validate=False)
        assert m.G_plus == m.G_minus  # bypass for boundary studies

    def test_mismatch_parameters_from_ratios(self):
        m = EffectiveModel.from_ratios(0.8, 800.0, gm_plus_ratio=0.1,
                                       gm_minus_ratio=0.1)
        eps_p, eps_m = m.mismatch_parameters()
        assert eps_p == pytest.approx((1 - 0.1) / (1 + 0.1))
        assert eps_m == pytest.approx((1 + 0.1) / (1 - 0.1))


class TestRwaQuadrature:
    def test_decoupled_when_couplings_vanish(self):
        m = EffectiveModel(G_plus=0.0, G_minus=1e-12, Omega=0.3,
                           gamma_a=0.01, gamma_b=0.02)
        A = build_rwa_quadrature(m).A0
        assert np.abs(A[:2, 2:]).max() < 1e-11
        assert np.abs(A[2:4, :2]).max() < 1e-11
        assert A[0, 1] == pytest.approx(0.3)
        assert A[2, 3] == pytest.approx(-0.3)
        assert A[4, 4] == pytest.approx(-0.5)

    def test_red_tone_coupling_blocks(self):
        m = EffectiveModel(G_plus=0.0, G_minus=0.05)
        A = build_rwa_quadrature(m).A0
        C_a = A[:2, 4:]
        C_b = A[2:4, 4:]
        expected = np.array([[0.0, 0.05], [-0.05, 0.0]])
        assert C_a == pytest.approx(expected)
        assert C_b == pytest.approx(expected)
        # the reservoir-mode rows carry the same blocks
        assert A[4:, :2] == pytest.approx(C_a)
        assert A[4:, 2:4] == pytest.approx(C_b)

    def test_stable_across_asymmetry(self):
        for x in np.linspace(0.0, 0.99, 12):
            m = EffectiveModel.from_ratios(x, 1200.0)
            assert stability_report(build_rwa_quadrature(m).A0).is_stable

    def test_marginal_at_equal_couplings_without_damping(self):
        m = EffectiveModel(G_plus=0.05, G_minus=0.05, gamma_a=0.0, gamma_b=0.0,
                           validate=False)
        rep = stability_report(build_rwa_quadrature(m).A0)
        assert not rep.is_stable
        assert rep.spectral_abscissa >= -0.5  # bounded by the kappa/2 pole

    def test_noise_matrix(self):
        m = EffectiveModel(G_plus=0.01, G_minus=0.05, gamma_a=0.002,
                           gamma_b=0.004, nbar_a=1.5, nbar_b=0.5)
        B = build_rwa_quadrature(m).B0
        assert B[0, 0] == pytest.approx(math.sqrt(0.002 * 2.0))
        assert B[2, 2] == pytest.approx(math.sqrt(0.004 * 1.0))
        assert B[4, 4] == pytest.approx(math.sqrt(0.5))


class TestModeOperatorBasis:
    def test_decoupled_diagonal(self):
        m = EffectiveModel(G_plus=0.0, G_minus=1e-12, Omega=0.0,
                           gamma_a=0.01, gamma_b=0.02, validate=False)
        A = build_mode_operator(m).A0
        assert np.abs(A - np.diag([-0.005, -0.005, -0.01, -0.01, -0.5, -0.5])).max() < 1e-11

    def test_identical_coupling_blocks_without_imperfections(self):
        m = EffectiveModel.from_ratios(0.7, 900.0)
        A = build_mode_operator(m).A0
        assert np.abs(A[:2, 4:] - A[2:4, 4:]).max() == 0.0

    @pytest.mark.parametrize("gm", [0.0, 0.3])
    def test_steady_state_matches_quadrature_basis(self, gm):
        m = EffectiveModel.from_ratios(0.9, 1200.0, nbar=2.0,
                                       gm_plus_ratio=gm, gm_minus_ratio=gm)
        dq = build_rwa_quadrature(m)
        dm = build_mode_operator(m)
        Vq = solve_lyapunov(dq.A0, dq.diffusion())
        M = solve_lyapunov(dm.A0, dm.diffusion())
        assert np.abs(mode_to_quadrature(M) - Vq).max() < 1e-10


class TestCollectiveAdiabatic:
    def test_symmetric_damping_pure_rotation(self):
        m = EffectiveModel.from_ratios(0.5, 800.0)
        ds = build_collective_adiabatic(m)
        A_pm = ds.A0[:2, 2:]
        assert A_pm == pytest.approx(np.array([[0.0, m.Omega], [-m.Omega, 0.0]]))

    def test_damping_asymmetry_enters_cross_block(self):
        m = EffectiveModel.from_ratios(0.5, 800.0, gamma_a_over_kappa=6e-5,
                                       gamma_b_over_kappa=2e-5)
        ds = build_collective_adiabatic(m)
        ell = (6e-5 - 2e-5) / (2 * 4e-5)
        assert ds.A0[0, 2] == pytest.approx(-ell * 4e-5 / 2)

    def test_red_tone_vacuum_effective_bath(self):
        m = EffectiveModel.from_ratios(0.0, 1200.0)
        ds = build_collective_adiabatic(m)
        assert ds.effective_bath_occupations == pytest.approx((0.0, 0.0))

    def test_squeezed_bath_occupation(self):
        m = EffectiveModel.from_ratios(0.9, 1200.0)
        n1, n2 = ds = build_collective_adiabatic(m).effective_bath_occupations
        assert n1 == pytest.approx(0.5 / 19.0 - 0.5, rel=1e-12)  # negative
        assert n1 < 0.0 < n2

    def test_warns_outside_adiabatic_regime(self):
        m = EffectiveModel(G_plus=0.1, G_minus=0.5, Omega=2.0)
        with pytest.warns(RegimeWarning, match="adiabatic"):
            build_collective_adiabatic(m)


def _printed_harmonic_blocks(G_p, G_m, eps_p, eps_m, d):
    """Coefficient matrices as printed for the four-tone case (oracle)."""
    Gt_p, Gt_m = G_p * eps_p, G_m * eps_m
    et_p = 2.0 / (1.0 + eps_m)
    et_m = 2.0 / (1.0 + eps_p)
    A_t, B_t = Gt_m * et_p, Gt_p * et_m
    a_u, b_u = G_m * et_p, G_p * et_m

    def Mt(sign, A, B):
        return np.array([[1j * (-sign * A - B), A - B],
                         [-A - B, 1j * (-sign * A + B)]])

    def Nn(sign, a, b):
        return np.array([[1j * (sign * a + b), a - b],
                         [-a - b, 1j * (sign * a - b)]])

    def Qt(sign, A, B):
        return np.array([[1j * (-A - sign * B), -A + B],
                         [-A - B, 1j * (A - sign * B)]])

    Z = np.zeros((2, 2))
    A1 = 0.5 * np.block([[Z, Z, d * Mt(+1, A_t, B_t)],
                         [Z, Z, Nn(+1, a_u, b_u) / d],
                         [d * Mt(-1, A_t, B_t), Nn(-1, a_u, b_u) / d, Z]])
    A2 = 0.5 * np.block([[Z, Z, Z],
                         [Z, Z, Qt(+1, A_t, B_t)],
                         [Z, Qt(-1, A_t, B_t), Z]])
    A3 = 0.5 * np.block([[Z, Z, d * Qt(+1, A_t, B_t)],
                         [Z, Z, Qt(+1, a_u, b_u) / d],
                         [d * Qt(-1, A_t, B_t), Qt(-1, a_u, b_u) / d, Z]])
    A4 = 0.5 * np.block([[Z, Z, Qt(+1, a_u, b_u)],
                         [Z, Z, Z],
                         [Qt(-1, a_u, b_u), Z, Z]])
    return A1, A2, A3, A4


class TestCrHarmonics:
    def test_two_tone_single_harmonic_structure(self):
        m = EffectiveModel.from_ratios(0.0, 1200.0, drive_variant=TWO_TONE,
                                       omega_m_over_kappa=100.0)
        ds = build_cr_harmonics(None, m)
        assert len(ds.harmonics) == 1
        delta, Ap, Am = ds.harmonics[0]
        assert delta == 100.0
        # only red-sideband weights survive at G+ = 0
        gm = m.G_minus
        expected_a = 0.5 * np.array([[-1j * gm, -gm], [-gm, 1j * gm]])
        assert Ap[:2, 4:] == pytest.approx(expected_a)
        assert np.array_equal(Am, Ap.conj())

    def test_two_tone_reduces_to_ideal_form(self):
        m = EffectiveModel.from_ratios(0.6, 900.0, drive_variant=TWO_TONE,
                                       omega_m_over_kappa=50.0)
        ds = build_cr_harmonics(None, m)
        _, Ap, _ = ds.harmonics[0]
        assert np.abs(Ap[:2, 4:] - Ap[2:4, 4:]).max() == 0.0  # equal couplings

    @pytest.mark.parametrize("d, rp, rm", [(1.0, 0.0, 0.0), (1.5, 0.0, 0.0)])
    def test_four_tone_matches_printed_matrices(self, d, rp, rm):
        m = EffectiveModel.from_ratios(0.8, 800.0, gm_plus_ratio=rp,
                                       gm_minus_ratio=rm,
                                       drive_variant=FOUR_TONE,
                                       delta_over_kappa=1.0,
                                       omega_1_over_kappa=100.0, d=d)
        ds = build_cr_harmonics(None, m)
        eps_p, eps_m = m.mismatch_parameters()
        printed = _printed_harmonic_blocks(m.G_plus, m.G_minus, eps_p, eps_m, d)
        for k in range(4):
            assert np.abs(ds.harmonics[k][1] - printed[k]).max() < 1e-15

    def test_four_tone_frequency_set(self):
        m = EffectiveModel.from_ratios(0.8, 800.0, drive_variant=FOUR_TONE,
                                       delta_over_kappa=1.0,
                                       omega_1_over_kappa=100.0)
        ds = build_cr_harmonics(None, m)
        deltas = [h[0] for h in ds.harmonics]
        assert deltas == pytest.approx([1.0, 98.0, 99.0, 100.0])

    @pytest.mark.parametrize("variant, kwargs", [
        (TWO_TONE, dict(omega_m_over_kappa=40.0)),
        (FOUR_TONE, dict(delta_over_kappa=0.5, omega_1_over_kappa=60.0, d=1.4)),
    ])
    def test_conjugate_pairing(self, variant, kwargs):
        m = EffectiveModel.from_ratios(0.7, 600.0, gm_plus_ratio=0.05,
                                       gm_minus_ratio=-0.02,
                                       drive_variant=variant, **kwargs)
        ds = build_cr_harmonics(None, m)
        for _, Ap, Am in ds.harmonics:
            assert np.array_equal(Am, Ap.conj())

    def test_requires_drive_context(self):
        m = EffectiveModel.from_ratios(0.5, 100.0)
        with pytest.raises(ConfigError):
            build_cr_harmonics(None, m)


class TestTopologySubstitution:
    def test_two_cavity_variant_maps_to_same_drift(self):
        # swapped roles: gamma_a/gamma_b are cavity linewidths, kappa is the
        # mechanical damping, omega_c the mechanical resonance
        setup = PhysicalSetup(
            omega_a=8e9, omega_b=5e9, kappa=200.0, gamma_a=1e6, gamma_b=2e6,
            nbar_a=0.0, nbar_b=0.0, g_a=50.0, g_b=100.0, omega_c=1.5e9,
            topology=TOPOLOGY_CAV,
            drive=DriveScheme(variant=FOUR_TONE, E_1plus=2e12, E_1minus=4e12,
                              E_2plus=1e12, E_2minus=2e12, Omega=1e5))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            m_cav = effective_from_setup(setup)
        m_ref = EffectiveModel(
            G_plus=m_cav.G_plus, G_minus=m_cav.G_minus,
            Gm_plus=m_cav.Gm_plus, Gm_minus=m_cav.Gm_minus,
            Omega=m_cav.Omega, kappa=1.0,
            gamma_a=m_cav.gamma_a, gamma_b=m_cav.gamma_b,
            nbar_a=m_cav.nbar_a, nbar_b=m_cav.nbar_b)
        for build in (build_rwa_quadrature, build_mode_operator):
            da, db = build(m_cav), build(m_ref)
            assert np.abs(da.A0 - db.A0).max() == 0.0
            assert np.abs(da.B0 - db.B0).max() == 0.0

    def test_matched_two_cavity_drives_cancel_imperfections(self):
        # matching g_a abar = g_b bbar with equal linewidths
        setup = PhysicalSetup(
            omega_a=8e9, omega_b=5e9, kappa=200.0, gamma_a=1e6, gamma_b=1e6,
            nbar_a=0.0, nbar_b=0.0, g_a=50.0, g_b=100.0, omega_c=1.5e9,
            topology=TOPOLOGY_CAV,
            drive=DriveScheme(variant=FOUR_TONE, E_1plus=2e12, E_1minus=4e12,
                              E_2plus=1e12, E_2minus=2e12, Omega=1e5))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            m = effective_from_setup(setup)
        assert m.Gm_plus == pytest.approx(0.0, abs=1e-12 * m.G_plus)
        assert m.Gm_minus == pytest.approx(0.0, abs=1e-12 * m.G_minus)


class TestValidateRegime:
    def test_clean_regime_has_no_warnings(self):
        m = EffectiveModel.from_ratios(0.9, 1200.0)
        assert validate_regime(None, m) == []

    def test_weak_collective_coupling_flagged(self):
        m = EffectiveModel.from_ratios(0.5, 100.0, Omega_over_kappa=4e-5)
        messages = validate_regime(None, m)
        assert any("coupling condition" in msg for msg in messages)

    def test_low_sideband_resolution_flagged(self):
        m = EffectiveModel.from_ratios(0.5, 100.0, drive_variant=TWO_TONE,
                                       omega_m_over_kappa=5.0)
        messages = validate_regime(None, m)
        assert any("resolved-sideband" in msg for msg in messages)

    def test_non_adiabatic_flagged(self):
        m = EffectiveModel.from_ratios(0.5, 100.0, Omega_over_kappa=2.0)
        messages = validate_regime(None, m)
        assert any("adiabaticity" in msg for msg in messages)


class TestCrHamiltonianOracle:
    """Cross-check the harmonic drift blocks against symplectic mechanics.

    A quadratic Hamiltonian H = x^T G x / 2 generates the drift J G (J the
    symplectic form).  G(t) is assembled here directly from the bilinear
    drive terms using the quadrature identities

        z s c^dag + h.c.        -> Re z (X_s X_c + P_s P_c) + Im z (X_s P_c - P_s X_c)
        z s^dag c^dag + h.c.    -> Re z (X_s X_c - P_s P_c) + Im z (X_s P_c + P_s X_c)

    which is independent of the per-entry block expressions used by the
    builder.
    """

    @staticmethod
    def _coupling_G(weight_beamsplitter, weight_parametric, rows):
        # contributions to the X = (..., X_s, P_s, ..., X_c, P_c) Hamiltonian
        # matrix from  w_b (s c^dag + h.c.) + w_p (s^dag c^dag + h.c.)
        G = np.zeros((6, 6))
        s, c = rows, slice(4, 6)
        wb, wp = weight_beamsplitter, weight_parametric
        block = np.array([[wb.real + wp.real, wb.imag + wp.imag],
                          [-wb.imag + wp.imag, wb.real - wp.real]])
        G[s, c] += block
        G[c, s] += block.T
        return G

    def _drift_from_hamiltonian(self, model, t):
        """Quadrature drift at time t from the two-tone drive catalog."""
        J = np.kron(np.eye(3), np.array([[0.0, 1.0], [-1.0, 0.0]]))
        # static part: Omega (a^dag a - b^dag b) maps onto (X^2 + P^2)/2 terms
        G = np.zeros((6, 6))
        G[0, 0] = G[1, 1] = model.Omega
        G[2, 2] = G[3, 3] = -model.Omega
        phase = np.exp(2j * model.omega_m * t)
        for rows, wm, wp in (
                (slice(0, 2), model.G_minus - model.Gm_minus,
                 model.G_plus + model.Gm_plus),
                (slice(2, 4), model.G_minus + model.Gm_minus,
                 model.G_plus - model.Gm_plus)):
            # static: beam-splitter at the G_- weight, parametric at G_+
            G += self._coupling_G(wm + 0j, wp + 0j, rows)
            # counter-rotating: s^dag(wm c^dag + wp c) e^{+2i w t} + h.c.
            # regroups into beam-splitter weight wp conj(phase) and
            # parametric weight wm phase
            G += self._coupling_G(np.conj(phase) * wp, phase * wm, rows)
        damping = -0.5 * np.diag([model.gamma_a, model.gamma_a,
                                  model.gamma_b, model.gamma_b,
                                  model.kappa, model.kappa])
        return J @ G + damping

    def test_two_tone_drift_matches_symplectic_construction(self):
        m = EffectiveModel.from_ratios(0.7, 600.0, gm_plus_ratio=0.08,
                                       gm_minus_ratio=-0.05,
                                       drive_variant=TWO_TONE,
                                       omega_m_over_kappa=7.0)
        ds = build_cr_harmonics(None, m)
        delta, Ap, Am = ds.harmonics[0]
        for t in (0.0, 0.137, 0.91):
            A_blocks = ds.A0 + (Ap * np.exp(2j * delta * t)
                                + Am * np.exp(-2j * delta * t)).real
            A_oracle = self._drift_from_hamiltonian(m, t)
            assert np.abs(A_blocks - A_oracle).max() < 1e-12
