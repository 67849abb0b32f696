"""Acceptance criteria 1-10, each judged at its stated tolerance.

Every criterion prints one ``[PASS]``/``[FAIL]`` line (collected and echoed
in the pytest terminal summary; also printed when run as a script).
"""

import time

import numpy as np
import pytest

from shallow_ilw import dynamics as D
from shallow_ilw import experiments as X
from shallow_ilw import resonance as R
from shallow_ilw.spectral_core import RealGrid, sobolev_norm

RESULTS: dict = {}
DELTAS = tuple(2.0 ** -k for k in range(0, 11))


def record(n, ok, text):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_criterion_01_resonance_identities():
    t0 = time.perf_counter()
    e_kdv, e_bo = X.identity_errors(X.identity_triples(10 ** 5, seed=1))
    dt = time.perf_counter() - t0
    ok = e_kdv < 1e-12 and e_bo < 1e-12 and dt < 1.0
    record(1, ok, f"KdV rel err {e_kdv:.2e}, BO rel err {e_bo:.2e} (< 1e-12), runtime {dt:.2f}s (< 1 s)")


def test_criterion_02_series_oracle():
    t0 = time.perf_counter()
    worst, flagged, total = 0.0, 0, 0
    per = 10 ** 4 // len(DELTAS) + 1
    for i, d in enumerate(DELTAS):
        tr = R.sample_band_triples(per, 1 / d, seed=20 + i)
        direct = R.xi_tilde_direct(d, tr)
        ok = ~direct.flagged
        s = R.xi_tilde_series(d, tr)
        worst = max(worst, float(np.max(np.abs(s[ok] - direct.value[ok]) / np.abs(s[ok]))))
        flagged += int(np.sum(~ok))
        total += len(tr)
    dt = time.perf_counter() - t0
    ok = worst < 1e-8 and dt < 10 and total >= 10 ** 4
    record(2, ok, f"max rel diff {worst:.2e} (< 1e-8) on {total} triples ({flagged} flagged), runtime {dt:.2f}s (< 10 s)")


def test_criterion_03_b_ratio_constant():
    sup, low = X.b_ratio_sup(10 ** 5, seed=3)
    ok = 5.0 <= sup <= 5.68 and sup < 6
    record(3, ok, f"empirical sup {sup:.15f} in [5, 5.68], < 6 (bound {R.B_RATIO_BOUND:.4f}; min {low:.3f})")


def test_criterion_04_comparability():
    t0 = time.perf_counter()
    lows, highs = [], []
    for i, d in enumerate(DELTAS):
        _, lr = R.comparability_ratio(d, R.sample_band_triples(10 ** 4, 1 / d, seed=40 + i))
        reg, hr = R.comparability_ratio(d, R.sample_high_triples(10 ** 4, 1 / d, seed=60 + i))
        hr = hr[reg == "high-band"]
        lows.append((lr.min(), lr.max()))
        highs.append((hr.min(), hr.max()))
    dt = time.perf_counter() - t0
    lows, highs = np.array(lows), np.array(highs)
    spread_l = np.max(lows[:, 1] / lows[:, 0])
    spread_h = np.max(highs[:, 1] / highs[:, 0])
    stab = lambda a: max(a[:, 0].max() / a[:, 0].min(), a[:, 1].max() / a[:, 1].min()) - 1
    sl, sh = stab(lows), stab(highs)
    ok = spread_l <= 10 and spread_h <= 10 and sl <= 0.2 and sh <= 0.2 and dt < 30
    record(4, ok, f"low C/c {spread_l:.3f}, high C/c {spread_h:.3f} (<= 10); endpoint drift "
                  f"{sl:.2e}/{sh:.2e} (<= 20%); runtime {dt:.1f}s (< 30 s)")


def test_criterion_05_jacobian():
    worst, signs, n = 0.0, True, 0
    for i, d in enumerate(DELTAS):
        tr = R.sample_band_triples(1000, 1 / d, seed=80 + i)
        J = R.jacobian_mu(d, tr.xi, tr.xi1)
        F = R.jacobian_fd(d, tr.xi, tr.xi1)
        worst = max(worst, float(np.max(np.abs(J - F) / np.abs(J))))
        signs &= bool(np.all(np.sign(J) == np.sign(tr.xi * (tr.xi - 2 * tr.xi1))))
        n += len(tr)
    record(5, signs and worst < 1e-6, f"sign agreement on {n} samples: {signs}; series vs FD {worst:.2e} (< 1e-6)")


def test_criterion_06_dynamics_integrity():
    t0 = time.perf_counter()
    g = RealGrid(100.0, 512)
    phi = D.profile(g, "gaussian")
    ends = [D.evolve("KdV", phi, D.SolverConfig(g, 0.0, dt, 1.0, record_every=10 ** 9)).total(-1)
            for dt in (4e-3, 2e-3, 1e-3)]
    order = float(np.log2(sobolev_norm(ends[0] - ends[1]) / sobolev_norm(ends[1] - ends[2])))
    low = D.evolve("LowFrequency", phi, D.SolverConfig(g, 0.25, 2e-3, 5.0, record_every=50))
    drift = D.l2_drift(low)
    mass = D.high_band_mass(low)
    c = D.SolverConfig(g, 0.5, 1e-3, 1.0, record_every=10 ** 9)
    split = sobolev_norm(D.evolve("CoupledLowResidual", phi, c).total(-1) - D.evolve("ScaledILW", phi, c).total(-1))
    dt = time.perf_counter() - t0
    ok = 3.8 <= order <= 4.2 and drift < 1e-8 and mass == 0.0 and split < 1e-6 and dt < 300
    record(6, ok, f"order {order:.3f} in [3.8, 4.2]; L2 drift {drift:.2e} (< 1e-8); high-band mass {mass} (== 0); "
                  f"|v_low+v_res-v| {split:.2e} (< 1e-6); runtime {dt:.1f}s (< 5 min)")


def test_criterion_07_shallow_water_convergence():
    rep = X.run_convergence(X.ConvergenceStudySpec(), reference=X.REFERENCE_CONVERGENCE)
    E = [m["E"] for m in rep.measurements]
    ok = rep.passed and rep.elapsed < 600
    record(7, ok, f"E = {[f'{e:.3e}' for e in E]}; ratio {E[-1] / E[0]:.2e} (< 0.05), monotone (20% slack), "
                  f"reference match; runtime {rep.elapsed:.1f}s (< 10 min)")


def test_criterion_08_equicontinuity():
    rep = X.run_equicontinuity(X.EquicontinuitySpec(), reference=X.REFERENCE_EQUICONTINUITY)
    sup = [m["sup_tau"] for m in rep.measurements]
    record(8, rep.passed, f"sup_delta tau(N) = {[f'{v:.2e}' for v in sup]}; decreasing, ratios <= 0.5, "
                          f"reference match")


def test_criterion_09_c2_failure_witness():
    t0 = time.perf_counter()
    reps = [X.run_instability(X.InstabilityWitnessSpec(s=s)) for s in (0.0, 1.0)]
    dt = time.perf_counter() - t0
    slopes = [r.fits["slope"] for r in reps]
    gaps = [r.fits["gap_slope"] for r in reps]
    phis = [m["phi_norm"] for r in reps for m in r.measurements]
    ok = (all(abs(s - 0.45) <= 0.05 for s in slopes) and all(abs(g + 0.1) <= 0.1 for g in gaps)
          and all(0.5 <= p <= 4 for p in phis) and dt < 60)
    record(9, ok, f"band-norm slopes {slopes[0]:.4f}/{slopes[1]:.4f} (target 0.45 +- 0.05; surrogate "
                  f"{reps[0].fits['surrogate_slope']:.4f}); gap exponents {gaps[0]:.3f}/{gaps[1]:.3f} "
                  f"(-0.1 +- 0.1); ||phi|| in [{min(phis):.3f}, {max(phis):.3f}]; runtime {dt:.2f}s (< 1 min)")


def test_criterion_10_gateaux_crosscheck():
    rep = X.gateaux_fd_crosscheck(0.5, 1.0, X.default_fd_field(0.5))
    slope = rep.fits["discrepancy_slope"]
    ok = 0.8 <= slope <= 1.2 and rep.elapsed < 300
    disc = ["%.2e" % m["discrepancy"] for m in rep.measurements]
    record(10, ok, f"discrepancy slope {slope:.4f} in [0.8, 1.2]; discrepancies {disc}; "
                   f"runtime {rep.elapsed:.1f}s (< 5 min)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
