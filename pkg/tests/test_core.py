import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resfluor import (SecularRegimeWarning, collective_operators,
                      dressed_frame, make_params, scaled_coupling)


class TestMakeParams:
    def test_fig1_parameters_are_secular(self):
        p = make_params(2, 50, 20, 0)
        assert p.dd_coupling / (2 * p.rabi) == pytest.approx(0.2)
        assert p.secular_ok  # 20 >= 10*2*1 and 100 > 20

    def test_single_emitter_has_no_pair_coupling(self):
        p = make_params(1, 10, 0, 0, warn=False)
        assert p.delta_tilde == 0.0

    def test_weak_coupling_flags_regime(self):
        with pytest.warns(SecularRegimeWarning):
            p = make_params(3, 50, 1, 0)
        assert not p.secular_ok

    @pytest.mark.parametrize("kwargs", [
        dict(n_emitters=0, rabi=1, dd_coupling=0),
        dict(n_emitters=-2, rabi=1, dd_coupling=0),
        dict(n_emitters=2, rabi=-1, dd_coupling=0),
        dict(n_emitters=2, rabi=1, dd_coupling=-3),
        dict(n_emitters=2, rabi=float("nan"), dd_coupling=0),
        dict(n_emitters=2, rabi=1, dd_coupling=float("inf")),
        dict(n_emitters=2, rabi=1, dd_coupling=0, detuning=float("nan")),
        dict(n_emitters=2, rabi=1, dd_coupling=0, gamma=0.0),
    ])
    def test_rejects_bad_inputs(self, kwargs):
        with pytest.raises(ValueError):
            make_params(warn=False, **{"detuning": 0.0, **kwargs})

    def test_gamma_defaults_to_unit(self):
        assert make_params(2, 50, 20).gamma == 1.0


class TestDressedFrame:
    def test_resonant_specialization(self):
        fr = dressed_frame(make_params(2, 50, 20, 0))
        assert fr.theta == pytest.approx(math.pi / 4, abs=0)
        assert fr.g_big == pytest.approx(50.0)
        assert fr.g_bar == pytest.approx(45.0)        # rabi - delta_tilde/4
        assert fr.delta_bar == pytest.approx(-10.0)   # -delta_tilde/2

    def test_uncoupled_frame_is_uncorrected(self):
        fr = dressed_frame(make_params(4, 33.0, 0.0, 0.0, warn=False))
        assert fr.g_bar == fr.g_big == pytest.approx(33.0)
        assert fr.delta_bar == 0.0

    def test_detuned_mixing_angle(self):
        # cot(2 theta) = 1 at detuning = 2*rabi
        p = make_params(2, 50, 20, 100.0)
        fr = dressed_frame(p)
        assert fr.theta == pytest.approx(math.pi / 8, rel=1e-13)
        assert fr.g_big == pytest.approx(math.sqrt(50.0 ** 2 + 50.0 ** 2))
        s2, c2 = math.sin(fr.theta) ** 2, math.cos(fr.theta) ** 2
        sin_2t_sq = math.sin(2 * fr.theta) ** 2
        assert fr.g_bar == pytest.approx(fr.g_big + 20.0 * (s2 * s2 - sin_2t_sq / 2))
        assert fr.delta_bar == pytest.approx(20.0 * (c2 * c2 + s2 * s2 - sin_2t_sq))

    @given(det=st.floats(-500, 500), rabi=st.floats(0.1, 500))
    def test_angle_solves_its_defining_relation(self, det, rabi):
        fr = dressed_frame(make_params(2, rabi, 5.0, det, warn=False))
        assert 0 < fr.theta < math.pi / 2
        assert math.cos(2 * fr.theta) * 2 * rabi == pytest.approx(
            math.sin(2 * fr.theta) * det, abs=1e-9 * max(1.0, abs(det)))

    @given(eps=st.floats(1e-12, 1e-6))
    def test_continuous_at_resonance(self, eps):
        base = dressed_frame(make_params(3, 40, 12, 0.0))
        for sign in (1, -1):
            near = dressed_frame(make_params(3, 40, 12, sign * eps))
            assert abs(near.theta - base.theta) < 1e-5
            assert abs(near.g_bar - base.g_bar) < 1e-4


class TestCollectiveOperators:
    def test_single_emitter_matrices(self):
        ops = collective_operators(1)
        np.testing.assert_array_equal(ops.rp, [[0, 0], [1, 0]])
        np.testing.assert_array_equal(ops.rz, np.diag([-1.0, 1.0]))

    def test_pair_ladder_elements(self):
        ops = collective_operators(2)
        expected = np.zeros((3, 3))
        expected[1, 0] = expected[2, 1] = math.sqrt(2.0)
        np.testing.assert_allclose(ops.rp, expected)
        np.testing.assert_array_equal(ops.rz, np.diag([-2.0, 0.0, 2.0]))

    @pytest.mark.parametrize("n", range(1, 21))
    def test_su2_commutators(self, n):
        ops = collective_operators(n)
        assert np.abs(ops.rp @ ops.rm - ops.rm @ ops.rp - ops.rz).max() < 1e-12
        assert np.abs(ops.rz @ ops.rp - ops.rp @ ops.rz - 2 * ops.rp).max() < 1e-12
        assert np.abs(ops.rz @ ops.rm - ops.rm @ ops.rz + 2 * ops.rm).max() < 1e-12

    @pytest.mark.parametrize("n", range(1, 21))
    def test_casimir_is_j_j_plus_one(self, n):
        ops = collective_operators(n)
        j = n / 2.0
        cas = ops.rz @ ops.rz / 4.0 + (ops.rp @ ops.rm + ops.rm @ ops.rp) / 2.0
        assert np.abs(cas - j * (j + 1) * np.eye(n + 1)).max() < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 5, 12])
    def test_ladder_products_are_diagonal(self, n):
        ops = collective_operators(n)
        m = np.arange(n + 1)
        np.testing.assert_allclose(ops.rm @ ops.rp, np.diag((n - m) * (m + 1.0)),
                                   atol=1e-12)
        np.testing.assert_allclose(ops.rp @ ops.rm, np.diag(m * (n - m + 1.0)),
                                   atol=1e-12)

    def test_raising_is_adjoint_of_lowering(self):
        ops = collective_operators(6)
        np.testing.assert_array_equal(ops.rp, ops.rm.conj().T)

    def test_rejects_nonpositive_count(self):
        with pytest.raises(ValueError):
            collective_operators(0)


class TestScaledCoupling:
    @pytest.mark.parametrize("delta,n,expected", [
        (20.0, 2, 20.0),
        (60.0, 5, 15.0),
        (7.0, 1, 0.0),
    ])
    def test_examples(self, delta, n, expected):
        assert scaled_coupling(delta, n) == expected

    @given(delta=st.floats(0, 1e6), n=st.integers(2, 50))
    def test_matches_definition(self, delta, n):
        assert scaled_coupling(delta, n) == delta / (n - 1)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            scaled_coupling(-1.0, 3)
