import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from leggett_garg.constants import CONSTANTS, Constants
from leggett_garg.errors import ParameterError
from leggett_garg.params import (
    KaonParams,
    NeutrinoParams,
    TimeQuad,
    dump_config,
    kamland_params,
    kaon_phase_per_tau_s,
    make_kaon_params,
    neutrino_phase,
    reference_kaon_params,
    params_from_config,
    params_to_config,
)

REFERENCE = (0.8958e-10, 0.5084e-7, 3.843e-12, 2.232e-3, 1.596e-3)


class TestConstants:
    def test_hbar_c_composition_matches_table(self):
        # 197.327 MeV fm is quoted to 6 figures
        assert CONSTANTS.hbar_c_ev_m == pytest.approx(CONSTANTS.hbar_c_ev_m_tabulated, rel=5e-6)

    def test_osc_coefficient_is_1267(self):
        # 1 / (4 hbar c) with hbar c = 197.327e-9 eV m, L in km, E in GeV
        first_principles = 1e3 / (4 * 6.58212e-22 * 1e6 * 2.99792458e8 * 1e9)
        assert CONSTANTS.osc_coefficient() == pytest.approx(first_principles, rel=1e-12)
        assert round(CONSTANTS.osc_coefficient(), 3) == 1.267
        assert float(f"{CONSTANTS.osc_coefficient():.4g}") == float(
            f"{CONSTANTS.osc_coefficient(tabulated=True):.4g}"
        )

    def test_constants_are_frozen(self):
        with pytest.raises(AttributeError):
            CONSTANTS.hbar_mev_s = 1.0
        assert Constants() == CONSTANTS


class TestKaonParams:
    def test_reference_values(self):
        p = make_kaon_params(*REFERENCE, True)
        assert p.eps_abs == 2.232e-3 and p.eps_re == 1.596e-3
        # gamma_S tau_S / hbar = 1 through the MeV path
        assert p.gamma_s * p.tau_s / CONSTANTS.hbar_mev_s == pytest.approx(1.0, rel=1e-12)
        assert p.gamma_l < p.gamma < p.gamma_s

    def test_cp_switch_forces_zero_eps(self):
        p = make_kaon_params(*REFERENCE, False)
        assert p.eps_abs == 0.0 and p.eps_re == 0.0 and p.eps == 0
        assert p.transition_ratio == 1.0

    @pytest.mark.parametrize(
        "args",
        [
            (0.5084e-7, 0.8958e-10, 3.843e-12, 2.232e-3, 1.596e-3),
            (0.0, 0.5084e-7, 3.843e-12, 0.0, 0.0),
            (-1e-10, 0.5084e-7, 3.843e-12, 0.0, 0.0),
            (0.8958e-10, 0.5084e-7, 3.843e-12, 1e-3, 2e-3),
            (0.8958e-10, 0.5084e-7, 3.843e-12, 1.5, 0.0),
            (0.8958e-10, 0.5084e-7, -1.0, 0.0, 0.0),
        ],
    )
    def test_rejects_invalid(self, args):
        with pytest.raises(ParameterError):
            make_kaon_params(*args, True)

    def test_rates_two_paths(self):
        p = reference_kaon_params()
        hbar = CONSTANTS.hbar_mev_s
        assert p.rate_l == pytest.approx(p.gamma_l * p.tau_s / hbar, rel=1e-12)
        assert p.rate_s == pytest.approx(p.gamma_s * p.tau_s / hbar, rel=1e-12)
        assert p.rate == pytest.approx(p.gamma * p.tau_s / hbar, rel=1e-12)
        assert p.omega == pytest.approx((p.delta_m / hbar) * p.tau_s, rel=1e-12)

    def test_eps_im_and_ratio(self):
        p = reference_kaon_params()
        assert abs(p.eps) == pytest.approx(p.eps_abs, rel=1e-14)
        expected = abs(1 - p.eps) ** 2 / abs(1 + p.eps) ** 2
        assert p.transition_ratio == pytest.approx(expected, rel=1e-14)

    def test_with_eps_abs_keeps_ratio(self):
        p = reference_kaon_params().with_eps_abs(2.23e-2)
        assert p.eps_re / p.eps_abs == pytest.approx(1.596e-3 / 2.232e-3, rel=1e-14)


class TestPhases:
    def test_kaon_phase_per_tau_s(self):
        direct = 3.843e-12 * 0.8958e-10 / 6.58212e-22
        assert kaon_phase_per_tau_s(reference_kaon_params()) == pytest.approx(direct, rel=1e-14)
        assert kaon_phase_per_tau_s(reference_kaon_params()) == pytest.approx(0.5230, abs=1e-4)

    def test_kaon_phase_zero_and_linear(self):
        p = reference_kaon_params()
        zero = make_kaon_params(p.tau_s, p.tau_l, 0.0, 0.0, 0.0)
        double = make_kaon_params(p.tau_s, p.tau_l, 2 * p.delta_m, p.eps_abs, p.eps_re)
        assert kaon_phase_per_tau_s(zero) == 0.0
        assert kaon_phase_per_tau_s(double) == pytest.approx(2 * kaon_phase_per_tau_s(p), rel=1e-15)

    def test_neutrino_phase_pi_over_8(self):
        n = kamland_params()
        # invert phase = 1.267 dm2 (L/E)[km/GeV]; /1000 for km/MeV
        loe = (math.pi / 8) / (1.267 * 7.58e-5) / 1000
        assert loe == pytest.approx(4.09, abs=0.01)
        assert neutrino_phase(n, 0.0) == 0.0
        assert neutrino_phase(n, loe) == pytest.approx(math.pi / 8, rel=1e-3)

    def test_neutrino_phase_linear_and_rejects_negative(self):
        n = kamland_params()
        assert neutrino_phase(n, 8.0) == pytest.approx(2 * neutrino_phase(n, 4.0), rel=1e-15)
        with pytest.raises(ParameterError):
            neutrino_phase(n, -1.0)
        np.testing.assert_allclose(neutrino_phase(n, [1.0, 2.0]), [neutrino_phase(n, 1.0), neutrino_phase(n, 2.0)])


class TestNeutrinoParams:
    def test_tan2_roundtrip(self):
        n = NeutrinoParams.from_tan2(7.58e-5, 0.56)
        assert n.tan2_theta == pytest.approx(0.56, rel=4 * np.finfo(float).eps)

    def test_sin2_2theta_kamland(self):
        # sin^2 2theta = 4 t / (1 + t)^2 for t = tan^2 theta
        assert kamland_params().sin2_2theta == pytest.approx(4 * 0.56 / 1.56**2, rel=1e-14)

    @pytest.mark.parametrize("args", [(0.0, 0.5), (7.58e-5, -0.1), (7.58e-5, 2.0), (7.58e-5, 0.5, 0.0)])
    def test_rejects_invalid(self, args):
        with pytest.raises(ParameterError):
            NeutrinoParams(*args)


class TestTimeQuad:
    def test_equal_spacing_gaps_exact(self):
        q = TimeQuad.equal_spacing(5.3, 0.7889)
        assert q.gaps == (0.7889, 0.7889, 0.7889)
        assert q.t1 <= q.t2 <= q.t3 <= q.t4

    @given(st.floats(0, 10), st.floats(1e-6, 10))
    def test_equal_spacing_property(self, t1, dt):
        q = TimeQuad.equal_spacing(t1, dt)
        assert all(g == dt for g in q.gaps)
        assert q.pairs()[3] == (t1, dt + dt + dt)

    @pytest.mark.parametrize("times", [(1, 0, 2, 3), (0, 1, 2, math.inf), (-1, 0, 1, 2)])
    def test_rejects_bad_order(self, times):
        with pytest.raises(ParameterError):
            TimeQuad(*times)


class TestConfig:
    def test_round_trip(self, tmp_path):
        k = reference_kaon_params()
        n = kamland_params()
        path = tmp_path / "c.json"
        dump_config(params_to_config(k, n), path)
        k2, n2 = params_from_config(json.loads(path.read_text()))
        assert k2 == k and n2 == n

    @given(
        st.floats(1e-12, 1e-9),
        st.floats(1.01, 1e4),
        st.floats(0, 1e-10),
        st.floats(0, 0.5),
        st.floats(-1, 1),
        st.booleans(),
    )
    def test_round_trip_property(self, tau_s, ratio, dm, eps_abs, frac, cp):
        k = make_kaon_params(tau_s, tau_s * ratio, dm, eps_abs, eps_abs * frac, cp)
        k2, _ = params_from_config(json.loads(dump_config(params_to_config(kaon=k))))
        assert k2 == k

    def test_unknown_keys_rejected(self):
        with pytest.raises(ParameterError, match="unknown"):
            params_from_config({"kaon": {"tau_q": 1}})
        with pytest.raises(ParameterError, match="unknown"):
            params_from_config({"muon": {}})

    def test_theta_and_tan2_conflict(self):
        with pytest.raises(ParameterError):
            params_from_config({"neutrino": {"theta_rad": 0.5, "tan2_theta": 0.56}})

    def test_kaon_params_is_immutable(self):
        with pytest.raises(AttributeError):
            reference_kaon_params().tau_s = 1.0
        assert isinstance(reference_kaon_params(), KaonParams)
