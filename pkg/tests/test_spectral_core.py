import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallow_ilw.spectral_core import (InputShapeError, InvalidFieldError, RealGrid, SpectralField,
                                       boundary_mass, forward_transform, inverse_transform, low_mask,
                                       project_high, project_low, sobolev_norm, tail_norm, translate,
                                       translation_modulus)


def gaussian(grid, width=1.0):
    return forward_transform(grid, np.exp(-0.5 * (grid.x / width) ** 2))


def test_grid_frequencies_and_nyquist():
    g = RealGrid(2 * np.pi, 8)
    assert g.dxi == pytest.approx(1.0)
    assert g.frequencies[4] == 4.0  # Nyquist carries the positive sign
    assert list(g.indices[:4]) == [0, 1, 2, 3]
    assert g.x[0] == pytest.approx(-np.pi)


@pytest.mark.parametrize("L, n", [(0.0, 8), (1.0, 7), (1.0, 0)])
def test_grid_rejects_bad_parameters(L, n):
    with pytest.raises(ValueError):
        RealGrid(L, n)


def test_shape_errors(grid):
    with pytest.raises(InputShapeError):
        forward_transform(grid, np.zeros(grid.mode_count + 1))
    with pytest.raises(InputShapeError):
        SpectralField(grid, np.zeros(3))


def test_roundtrip(grid, rng):
    u = rng.standard_normal(grid.mode_count)
    assert np.allclose(inverse_transform(forward_transform(grid, u)), u, atol=1e-13)


def test_broken_symmetry_is_rejected(grid):
    c = np.zeros(grid.mode_count, complex)
    c[1] = 1.0
    with pytest.raises(InvalidFieldError):
        inverse_transform(SpectralField(grid, c))


def test_gaussian_continuum_transform():
    g = RealGrid(60.0, 256)
    f = gaussian(g)
    exact = np.sqrt(2 * np.pi) * np.exp(-0.5 * g.frequencies ** 2)
    assert np.max(np.abs(f.coeffs - exact)) < 1e-12


def test_plancherel_and_sobolev():
    g = RealGrid(60.0, 256)
    f = gaussian(g)
    # ||e^{-x^2/2}||_2^2 = sqrt(pi); H^1 adds ||u'||^2 = sqrt(pi)/2
    assert sobolev_norm(f, 0.0) ** 2 == pytest.approx(np.sqrt(np.pi), rel=1e-12)
    assert sobolev_norm(f, 1.0) ** 2 == pytest.approx(1.5 * np.sqrt(np.pi), rel=1e-12)


def test_projectors_ties_low_and_partition():
    g = RealGrid(2 * np.pi, 16)
    f = SpectralField(g, np.ones(16, complex))
    lo, hi = project_low(f, 3.0), project_high(f, 3.0)
    assert np.all((lo + hi).coeffs == f.coeffs)
    assert low_mask(g, 3.0)[3] and low_mask(g, 3.0)[-3]
    assert hi.coeffs[3] == 0
    with pytest.raises(ValueError):
        project_low(f, 0.0)


def test_tail_norm_matches_projection(grid):
    f = gaussian(grid)
    assert tail_norm(f, 2.0) == pytest.approx(sobolev_norm(project_high(f, 2.0)), rel=1e-14)
    assert tail_norm(f, grid.max_frequency) == 0.0


def test_translate_shifts_profile():
    g = RealGrid(40.0, 256)
    f = gaussian(g)
    moved = inverse_transform(translate(f, 2.0))
    assert np.max(np.abs(moved - np.exp(-0.5 * (g.x + 2.0) ** 2))) < 1e-12


def test_translation_modulus_small_for_small_shift(grid):
    f = gaussian(grid)
    assert translation_modulus(f, 0.0) == 0.0
    assert translation_modulus(f, 1e-3) < translation_modulus(f, 1e-1)


def test_boundary_mass_reports_both():
    g = RealGrid(60.0, 256)
    m = boundary_mass(gaussian(g))
    assert m["physical"] < 1e-20 and m["spectral"] < 1e-20
    assert boundary_mass(SpectralField.zeros(g)) == {"physical": 0.0, "spectral": 0.0}


@given(st.lists(st.floats(-10, 10), min_size=64, max_size=64), st.floats(0, 3))
def test_norm_properties(values, s):
    g = RealGrid(10.0, 64)
    f = forward_transform(g, np.array(values))
    assert sobolev_norm(f, s) >= sobolev_norm(f, 0.0) - 1e-12 * (1 + sobolev_norm(f, 0.0))
    assert f.symmetry_defect() < 1e-12
    assert sobolev_norm(2.0 * f, s) == pytest.approx(2.0 * sobolev_norm(f, s), rel=1e-12, abs=1e-300)
