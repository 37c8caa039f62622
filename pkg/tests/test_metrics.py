import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from relidlms.errors import ContractError
from relidlms.incremental import Trajectory
from relidlms.metrics import (
    average_curves,
    convergence_time,
    msd,
    msd_curve,
    steady_state_msd,
    to_db,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


class TestMsd:
    def test_equal(self):
        w = np.array([0.3, -1.0, 2.0, 0.0])
        assert msd(w, w) == 0.0

    def test_unit_offset(self):
        w = np.array([0.3, -1.0, 2.0, 0.0])
        assert msd(w + np.eye(4)[0], w) == pytest.approx(1.0, rel=1e-15)

    def test_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            a, b = rng.standard_normal(6), rng.standard_normal(6)
            want = sum((x - y) ** 2 for x, y in zip(b, a))
            assert msd(a, b) == pytest.approx(want, rel=1e-14)

    def test_mismatch(self):
        with pytest.raises(ContractError):
            msd(np.zeros(3), np.zeros(4))

    @given(arrays(float, 5, elements=finite), arrays(float, 5, elements=finite), st.permutations(range(5)))
    def test_permutation_invariant(self, a, b, perm):
        perm = list(perm)
        assert msd(a[perm], b[perm]) == pytest.approx(msd(a, b), rel=1e-12, abs=1e-300)

    @given(arrays(float, 4, elements=finite), arrays(float, 4, elements=finite))
    def test_zero_iff_equal(self, a, b):
        # entries are >= 1e-300ish apart or equal; squares of tiny gaps can underflow, so bound them
        if np.array_equal(a, b):
            assert msd(a, b) == 0.0
        elif np.max(np.abs(a - b)) > 1e-150:
            assert msd(a, b) > 0.0


class TestMsdCurve:
    def test_modes(self):
        dev = np.arange(12, dtype=float).reshape(4, 3)
        traj = Trajectory(np.zeros((4, 2)), dev)
        np.testing.assert_array_equal(msd_curve(traj), dev.mean(axis=1))
        np.testing.assert_array_equal(msd_curve(traj, "single-node", 2), dev[:, 2])

    def test_errors(self):
        traj = Trajectory(np.zeros((4, 2)), np.zeros((4, 3)))
        with pytest.raises(ContractError):
            msd_curve(traj, "single-node", 3)
        with pytest.raises(ContractError):
            msd_curve(traj, "median")
        with pytest.raises(ContractError):
            msd_curve(Trajectory(np.zeros((4, 2))))


class TestAverage:
    def test_single(self):
        c = np.array([3.0, 2.0, 1.0])
        assert np.array_equal(average_curves([c]), c)

    def test_two_constants(self):
        assert average_curves([np.full(5, 2.0), np.full(5, 4.0)]).tolist() == [3.0] * 5

    def test_recomputation(self):
        curves = np.random.default_rng(1).exponential(size=(100, 50))
        np.testing.assert_allclose(average_curves(list(curves)), curves.mean(axis=0), rtol=1e-15)

    def test_ragged(self):
        with pytest.raises(ContractError):
            average_curves([np.zeros(3), np.zeros(4)])
        with pytest.raises(ContractError):
            average_curves([])

    @given(st.floats(0.125, 8.0).map(lambda x: 2.0 ** round(np.log2(x))))
    def test_commutes_with_scaling(self, c):
        # power-of-two factors keep this exact
        curves = list(np.random.default_rng(2).exponential(size=(7, 20)))
        assert np.array_equal(average_curves([c * x for x in curves]), c * average_curves(curves))


class TestSteadyState:
    def test_constant(self):
        for f in (0.1, 0.5, 1.0):
            assert steady_state_msd(np.full(20, 0.25), f) == 0.25

    def test_whole_curve(self):
        c = np.array([4.0, 2.0, 3.0, 1.0])
        assert steady_state_msd(c, 1.0) == 2.5

    def test_hand_example(self):
        assert steady_state_msd([4.0, 2.0, 2.0, 2.0], 0.5) == 2.0

    def test_tail_length_no_float_overshoot(self):
        c = np.zeros(2000)
        c[-201] = 1.0
        assert steady_state_msd(c, 0.1) == 0.0

    def test_empty(self):
        with pytest.raises(ContractError):
            steady_state_msd([], 0.1)

    @given(arrays(float, st.integers(1, 50), elements=st.floats(0, 1e6)), st.floats(0.01, 1.0))
    def test_monotone_curve_below_first(self, c, f):
        c = np.sort(c)[::-1]
        assert steady_state_msd(c, f) <= c[0]


class TestConvergenceTime:
    def test_constant(self):
        assert convergence_time(np.full(30, 1.0), 2.0) == 0

    def test_rising(self):
        c = np.arange(1.0, 21.0)
        # tail mean = 19.5, threshold 19.695: only the last entry (20) is above
        assert convergence_time(c, 1.01) is None

    def test_hand_trace(self):
        c = np.array([10.0, 5.0, 2.0, 1.1] + [1.0] * 46)
        assert convergence_time(c, 1.2) == 3

    def test_must_stay_below(self):
        c = np.array([10.0, 1.0, 10.0] + [1.0] * 47)
        assert convergence_time(c, 2.0) == 3

    def test_factor(self):
        with pytest.raises(ContractError):
            convergence_time(np.ones(5), 1.0)


def test_db():
    assert to_db([1.0, 0.1, 0.0]).tolist() == [0.0, -10.0, -np.inf]
