import numpy as np
import pytest

from shallow_ilw import experiments as X
from shallow_ilw.dynamics import EquationKind, profile
from shallow_ilw.spectral_core import RealGrid, SpectralField, low_mask, sobolev_norm, tail_norm

SMALL = RealGrid(60.0, 256)


def test_convergence_zero_data():
    spec = X.ConvergenceStudySpec(grid=SMALL, phi=SpectralField.zeros(SMALL), dt=1e-2,
                                  delta_grid=(0.25, 0.125))
    rep = X.run_convergence(spec)
    assert [m["E"] for m in rep.measurements] == [0.0, 0.0] and rep.passed


def test_convergence_kdv_branch_is_exact():
    rep = X.run_convergence(X.ConvergenceStudySpec(grid=SMALL, dt=1e-2, delta_grid=(0.0,)))
    assert rep.measurements[0]["E"] == 0.0 and rep.passed


def test_convergence_spec_validation():
    with pytest.raises(ValueError):
        X.ConvergenceStudySpec(delta_grid=(0.1, 0.2))
    with pytest.raises(ValueError):
        X.ConvergenceStudySpec(s=-1.0)


def test_convergence_verdicts_robust_to_grid_refinement():
    coarse = X.run_convergence(X.ConvergenceStudySpec(dt=2e-3))
    fine = X.run_convergence(X.ConvergenceStudySpec(dt=2e-3, delta_grid=tuple(2.0 ** -(k / 2) for k in range(4, 17))))
    assert [v.passed for v in coarse.verdicts] == [v.passed for v in fine.verdicts]


def test_threads_do_not_change_results():
    spec = X.ConvergenceStudySpec(grid=SMALL, dt=1e-2, delta_grid=(0.25, 0.125, 0.0625))
    a = X.run_convergence(spec, threads=1)
    b = X.run_convergence(spec, threads=3)
    assert a.measurements == b.measurements


def test_tail_zero_above_grid():
    spec = X.EquicontinuitySpec(grid=SMALL, dt=1e-2, delta_grid=(0.5, 0.0), N_grid=(SMALL.max_frequency,))
    assert np.all(X.tail_matrix(spec) == 0.0)


def test_linear_tail_equals_data_tail():
    phi = profile(SMALL, "gaussian")
    spec = X.EquicontinuitySpec(grid=SMALL, dt=1e-2, delta_grid=(0.0,), N_grid=(1.0, 2.0), nonlinear=False)
    tau = X.tail_matrix(spec)
    # the solver starts from the 2/3-truncated datum
    keep = np.abs(SMALL.indices) <= (2 / 3) * (SMALL.mode_count // 2)
    trunc = SpectralField(SMALL, np.where(keep, phi.coeffs, 0))
    assert tau[:, 0] == pytest.approx([tail_norm(trunc, 1.0), tail_norm(trunc, 2.0)], rel=1e-12)


def test_witness_vanishes_at_t_zero():
    bp = X.gateaux_second_derivative_quadrature(X.InstabilityWitnessSpec(t=0.0), 1e3)
    assert bp.norm == 0.0 and np.all(bp.values == 0)


def test_witness_surrogate_closed_form():
    spec = X.InstabilityWitnessSpec()
    for N in (1e3, 1e6):
        bp = X.gateaux_second_derivative_quadrature(spec, N)
        assert bp.surrogate_norm == pytest.approx(np.sqrt(8 / 3) * np.sqrt(bp.alpha) * N, rel=1e-6)


def test_witness_surrogate_linear_in_t():
    a = X.gateaux_second_derivative_quadrature(X.InstabilityWitnessSpec(t=1.0), 1e4)
    b = X.gateaux_second_derivative_quadrature(X.InstabilityWitnessSpec(t=2.0), 1e4)
    assert b.surrogate_norm == pytest.approx(2 * a.surrogate_norm, rel=1e-12)


def test_witness_gap_shrinks_with_small_time():
    # with t * Xi << 1 the full integrand approaches the surrogate
    bp = X.gateaux_second_derivative_quadrature(X.InstabilityWitnessSpec(t=1e-4), 1e4)
    assert bp.gap < 1e-3


def test_witness_spec_validation():
    with pytest.raises(ValueError):
        X.InstabilityWitnessSpec(N_grid=(5.0,))
    with pytest.raises(ValueError):
        X.InstabilityWitnessSpec(delta=2.0)


def test_witness_quadrature_refinement_error():
    with pytest.raises(X.QuadratureError):
        X.gateaux_second_derivative_quadrature(X.InstabilityWitnessSpec(t=50.0, quadrature_points=2), 1e3)


def test_data_norm_bounded_and_alpha_independent():
    for s in (0.0, 1.0, 2.5):
        spec = X.InstabilityWitnessSpec(s=s)
        vals = [X.witness_data_norm(spec, N) for N in spec.N_grid]
        assert all(0.5 <= v <= 4 for v in vals)
        assert max(vals) / min(vals) < 1.001


def test_duhamel_zero_data():
    g = RealGrid(2 * np.pi * 8, 256)
    out = X.duhamel_second_derivative(0.5, 1.0, SpectralField.zeros(g), panels=4)
    assert np.all(out.coeffs == 0)


def test_duhamel_low_only_data_forces_high_band_only():
    g = RealGrid(2 * np.pi * 8, 256)
    phi = X.bump_spectrum(g, [(0.25, 1.5, 1.0)])
    out = X.duhamel_second_derivative(0.5, 1.0, phi, panels=8)
    low = low_mask(g, 2.0)
    assert np.all(out.coeffs[low] == 0) and sobolev_norm(out) > 0


def test_fd_crosscheck_zero_data():
    g = RealGrid(2 * np.pi * 8, 256)
    rep = X.gateaux_fd_crosscheck(0.5, 0.2, SpectralField.zeros(g), dt=0.01)
    assert rep.passed and all(m["discrepancy"] == 0 for m in rep.measurements)


def test_loglog_fit_exact():
    x = np.array([1.0, 10.0, 100.0])
    slope, icpt, r = X.loglog_fit(x, 3 * x ** 0.45)
    assert slope == pytest.approx(0.45) and np.max(np.abs(r)) < 1e-12


def test_selftest_passes():
    assert X.selftest().passed
