import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallow_ilw.spectral_core import RealGrid
from shallow_ilw.symbols import (DepthParameter, L_delta, L_delta_series, MultiplierTable,
                                 coth_minus_inverse, h_delta, p_tilde, propagator_phase)


def test_kdv_branch_exact():
    xi = np.linspace(-5, 5, 11)
    assert np.all(L_delta(0.0, xi) == xi ** 2)
    assert np.all(p_tilde(0.0, xi) == xi ** 3)
    assert np.all(h_delta(0.0, xi) == 0.0)


def test_depth_validation():
    with pytest.raises(ValueError, match="delta >= 0"):
        DepthParameter(-1.0)
    with pytest.raises(ValueError):
        L_delta(-0.1, 1.0)
    assert DepthParameter(0.0).is_kdv and DepthParameter(0.5).cutoff == 2.0


def test_removable_singularity():
    assert coth_minus_inverse(0.0) == 0.0
    assert coth_minus_inverse(1e-4) == pytest.approx(1e-4 / 3, rel=1e-8)
    # the two branches meet continuously at the switch
    a = coth_minus_inverse(np.nextafter(0.5, 0))
    b = coth_minus_inverse(0.5)
    assert abs(a - b) < 1e-15


def test_small_depth_expansion():
    # h ~ delta^2 xi^2 / 15
    assert h_delta(0.01, 1.0) == pytest.approx(1e-4 / 15, rel=1e-4)


def test_series_matches_closed_form():
    xi = np.logspace(-6, 3, 200)
    for d in (1.0, 0.1, 2.0 ** -10):
        v, bound = L_delta_series(d, xi, tol=1e-12)
        assert np.max(np.abs(v - L_delta(d, xi)) / L_delta(d, xi)) < 1e-10
        assert np.all(bound <= 1e-12 * v * 10)


def test_phase_is_unimodular():
    ph = propagator_phase(0.3, 2.0, np.linspace(-10, 10, 101))
    assert np.allclose(np.abs(ph), 1.0, atol=1e-15)


def test_multiplier_table_read_only():
    t = MultiplierTable(RealGrid(2 * np.pi, 16), DepthParameter(0.5))
    with pytest.raises(ValueError):
        t.values[0] = 1.0
    assert t.phase(0.0).tolist() == [1.0] * 16


@given(st.floats(1e-3, 1.0), st.floats(1e-3, 1e3))
def test_h_in_unit_interval_and_bounded(d, xi):
    h = h_delta(d, xi)
    assert 0.0 <= h <= 1.0
    assert h <= (d * xi) ** 2 * (1 + 1e-12)


@given(st.floats(1e-3, 0.9), st.floats(1e-2, 1e2))
def test_L_decreasing_in_depth(d, xi):
    assert L_delta(d * 1.1, xi) <= L_delta(d, xi) * (1 + 1e-14)
    assert L_delta(d, xi) <= xi ** 2 * (1 + 1e-14)


@given(st.floats(0, 1.0), st.floats(-1e3, 1e3))
def test_p_tilde_odd(d, xi):
    assert p_tilde(d, -xi) == -p_tilde(d, xi)
