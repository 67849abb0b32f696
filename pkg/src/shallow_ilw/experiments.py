"""Studies built on the solvers and resonance tools.

* shallow-water convergence of the low-frequency system to KdV,
* uniform decay of high-frequency tails across depths,
* the two-band witness for the failure of a second derivative of the
  residual solution map (mesh-free quadrature), and its PDE cross-check,
* the resonance sweeps (identities, series oracle, comparability, bounds).

Every study returns an :class:`ExperimentReport` whose verdicts carry the
tolerance they were judged against.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import resonance as res
from .dynamics import BlowUpError, EquationKind, SolverConfig, _Spectral, evolve, profile
from .spectral_core import RealGrid, SpectralField, sobolev_norm, sobolev_weight, tail_norm
from .symbols import p_tilde

# Frozen reference runs (Gaussian data, unit amplitude and width, s = 0, T = 1,
# box 100, 512 modes, dt = 1e-3, snapshots every 0.05).  Regression targets only.
REFERENCE_CONVERGENCE = {
    2.0 ** -2: 0.05654435003468481,
    2.0 ** -3: 0.014969109052525376,
    2.0 ** -4: 0.0037759402603661824,
    2.0 ** -5: 0.0009455220580394558,
    2.0 ** -6: 0.0002364659979691688,
    2.0 ** -7: 5.912167245497623e-05,
    2.0 ** -8: 1.4780738757316349e-05,
}
# Same data and grid; delta in {1, 1/2, ..., 1/32, 0}; sup over delta of the tail at N.
REFERENCE_EQUICONTINUITY = {
    1.0: 0.6895179043419454,
    2.0: 0.20915424226551252,
    4.0: 0.002236883505953658,
    8.0: 1.1785878069520749e-07,
}
REFERENCE_RTOL = 0.05


class QuadratureError(RuntimeError):
    pass


class RegimeError(RuntimeError):
    pass


@dataclass
class Verdict:
    name: str
    passed: bool
    measured: object
    tolerance: str

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: measured {self.measured} (tolerance: {self.tolerance})"


@dataclass
class ExperimentReport:
    study: str
    inputs: dict
    measurements: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    status: str = "ok"
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "ok" and all(v.passed for v in self.verdicts)

    def check(self, name, passed, measured, tolerance):
        self.verdicts.append(Verdict(name, bool(passed), _plain(measured), tolerance))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return _plain(d)


def _plain(x):
    """Make numpy scalars and arrays JSON-friendly."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def loglog_fit(x, y):
    """Least-squares slope and intercept of ``log y`` against ``log x``; returns residuals too."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return float(coef[0]), float(coef[1]), resid


# --------------------------------------------------------------------------
# shallow-water convergence and equicontinuity
# --------------------------------------------------------------------------

@dataclass
class ConvergenceStudySpec:
    grid: RealGrid = field(default_factory=lambda: RealGrid(100.0, 512))
    profile: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    phi: SpectralField | None = None
    s: float = 0.0
    horizon: float = 1.0
    dt: float = 1e-3
    record_every: int = 50
    delta_grid: Sequence[float] = tuple(2.0 ** -k for k in range(2, 9))
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("s must satisfy s >= 0")
        g = np.asarray(self.delta_grid, float)
        if g.size == 0 or np.any(g < 0) or np.any(np.diff(g) >= 0):
            raise ValueError("delta_grid must be nonnegative and strictly decreasing")

    def data(self) -> SpectralField:
        if self.phi is not None:
            return self.phi
        return profile(self.grid, self.profile, self.amplitude, self.width)

    def config(self, delta) -> SolverConfig:
        return SolverConfig(self.grid, float(delta), self.dt, self.horizon, self.dealias_fraction,
                            self.record_every, s=self.s)


def _sup_distance(a, b, s):
    return max(sobolev_norm(x - y, s) for x, y in zip(a.snapshots, b.snapshots))


def _fan_out(fn, items, threads: int):
    """Map ``fn`` over independent jobs; results come back in input order."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_convergence(spec: ConvergenceStudySpec, slack: float = 0.2, final_ratio: float = 0.05,
                    reference: dict | None = None, threads: int = 1) -> ExperimentReport:
    """``E(delta) = max_t ||v(t) - v_low(t)||_{H^s}`` over the delta grid."""
    t0 = time.perf_counter()
    rep = ExperimentReport("converge", {k: v for k, v in _spec_echo(spec).items()})
    phi = spec.data()
    try:
        kdv = evolve(EquationKind.KDV, phi, spec.config(0.0))
    except BlowUpError as exc:
        rep.status = f"failed: KdV blow-up at t={exc.time}"
        return rep

    def job(d):
        try:
            low = evolve(EquationKind.LOW_FREQUENCY, phi, spec.config(d))
            return {"delta": float(d), "E": _sup_distance(kdv, low, spec.s), "status": "ok"}
        except BlowUpError as exc:
            return {"delta": float(d), "E": None, "status": f"blow-up at t={exc.time}"}

    rep.measurements = _fan_out(job, spec.delta_grid, threads)
    errors = [np.nan if m["E"] is None else m["E"] for m in rep.measurements]
    E = np.asarray(errors)
    ok = np.isfinite(E)
    rep.check("all runs completed", np.all(ok), int(np.sum(~ok)), "0 failed runs")
    if np.all(E[ok] == 0):
        rep.check("E identically zero", True, 0.0, "E == 0 for zero data or the KdV branch")
    else:
        Ef = E[ok]
        mono = bool(np.all(Ef[1:] <= (1 + slack) * Ef[:-1]))
        rep.check("E decreasing up to slack", mono, Ef.tolist(), f"E[i+1] <= {1 + slack:g} E[i]")
        ratio = Ef[-1] / Ef[0] if Ef[0] > 0 else 0.0
        rep.check("E(delta_min) / E(delta_max)", ratio < final_ratio, ratio, f"< {final_ratio:g}")
        pos = (np.asarray(spec.delta_grid)[ok] > 0) & (Ef > 0)
        if np.sum(pos) >= 2:
            slope, _, r = loglog_fit(np.asarray(spec.delta_grid)[ok][pos], Ef[pos])
            rep.fits["E_vs_delta_slope"] = slope
            rep.fits["E_vs_delta_max_residual"] = float(np.max(np.abs(r)))
    if reference:
        worst = 0.0
        for m in rep.measurements:
            ref = reference.get(m["delta"])
            if ref is not None and m["E"] is not None:
                worst = max(worst, abs(m["E"] - ref) / ref)
        rep.check("agreement with frozen reference", worst <= REFERENCE_RTOL, worst,
                  f"relative <= {REFERENCE_RTOL:g}")
    rep.elapsed = time.perf_counter() - t0
    return rep


@dataclass
class EquicontinuitySpec:
    grid: RealGrid = field(default_factory=lambda: RealGrid(100.0, 512))
    profile: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    phi: SpectralField | None = None
    s: float = 0.0
    horizon: float = 1.0
    dt: float = 1e-3
    record_every: int = 50
    delta_grid: Sequence[float] = (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.0)
    N_grid: Sequence[float] = (1.0, 2.0, 4.0, 8.0)
    threshold: float = 1e-4
    max_ratio: float = 0.5
    nonlinear: bool = True

    def data(self) -> SpectralField:
        if self.phi is not None:
            return self.phi
        return profile(self.grid, self.profile, self.amplitude, self.width)


def tail_matrix(spec: EquicontinuitySpec, threads: int = 1) -> np.ndarray:
    """``tau[i, j] = max_t ||P_{N_i}^perp v_low(t; delta_j)||_{H^s}``."""
    phi = spec.data()

    def column(d):
        cfg = SolverConfig(spec.grid, float(d), spec.dt, spec.horizon, record_every=spec.record_every,
                           nonlinear=spec.nonlinear, s=spec.s)
        rec = evolve(EquationKind.LOW_FREQUENCY, phi, cfg)
        return [max(tail_norm(f, N, spec.s) for f in rec.snapshots) for N in spec.N_grid]

    return np.array(_fan_out(column, spec.delta_grid, threads)).T.reshape(len(spec.N_grid), -1)


def run_equicontinuity(spec: EquicontinuitySpec, reference: dict | None = None,
                       threads: int = 1) -> ExperimentReport:
    t0 = time.perf_counter()
    rep = ExperimentReport("equicont", _spec_echo(spec))
    try:
        tau = tail_matrix(spec, threads)
    except BlowUpError as exc:
        rep.status = f"failed: blow-up at t={exc.time}"
        return rep
    sup = tau.max(axis=1)
    for i, N in enumerate(spec.N_grid):
        rep.measurements.append({"N": float(N), "sup_tau": float(sup[i]),
                                 "tau": {str(d): float(tau[i, j]) for j, d in enumerate(spec.delta_grid)}})
    dec = bool(np.all(np.diff(sup) < 0))
    rep.check("sup_delta tau decreasing in N", dec, sup.tolist(), "strictly decreasing")
    ratios = sup[1:] / sup[:-1]
    rep.check("geometric decay per dyadic step", bool(np.all(ratios <= spec.max_ratio)),
              ratios.tolist(), f"each ratio <= {spec.max_ratio:g}")
    rep.check("tail below threshold at largest N", sup[-1] < spec.threshold, float(sup[-1]),
              f"< {spec.threshold:g}")
    if reference:
        worst = 0.0
        for N, v in zip(spec.N_grid, sup):
            ref = reference.get(float(N))
            if ref is not None:
                worst = max(worst, abs(v - ref) / ref)
        rep.check("agreement with frozen reference", worst <= REFERENCE_RTOL, worst,
                  f"relative <= {REFERENCE_RTOL:g}")
    rep.elapsed = time.perf_counter() - t0
    return rep


def _spec_echo(spec) -> dict:
    out = {}
    for k, v in vars(spec).items():
        if isinstance(v, RealGrid):
            out[k] = {"box_length": v.box_length, "mode_count": v.mode_count}
        elif isinstance(v, SpectralField):
            out[k] = "<field>"
        elif isinstance(v, (tuple, list, np.ndarray)):
            out[k] = [float(a) for a in v]
        else:
            out[k] = _plain(v)
    return out


# --------------------------------------------------------------------------
# two-band witness (mesh-free)
# --------------------------------------------------------------------------

@dataclass
class InstabilityWitnessSpec:
    s: float = 0.0
    delta: float = 0.1
    t: float = 1.0
    theta: float = 0.1
    N_grid: Sequence[float] = (1e3, 1e4, 1e5, 1e6)
    quadrature_points: int = 24
    slope_tol: float = 0.05
    gap_tol: float = 0.1
    fit_residual_tol: float = 0.05

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise ValueError("delta must satisfy 0 < delta <= 1")
        if self.t == 0 and len(self.N_grid) > 1:
            pass  # allowed: everything vanishes
        if not self.theta > 0:
            raise ValueError("theta must be > 0")
        if self.quadrature_points < 2:
            raise ValueError("quadrature_points must be >= 2")
        N = np.asarray(self.N_grid, float)
        if np.any(np.diff(N) <= 0):
            raise ValueError("N_grid must be increasing")
        if np.any(N < 10.0 / self.delta):
            raise ValueError("every N must satisfy N >= 10 / delta")

    def alpha(self, N: float) -> float:
        return self.delta * N ** (-1.0 - self.theta)


@dataclass
class BandProfile:
    N: float
    alpha: float
    eta: np.ndarray          # offsets: xi = N + eta, eta in [alpha, 3 alpha]
    weights: np.ndarray      # quadrature weights in eta
    values: np.ndarray       # profile on the band
    surrogate: np.ndarray    # same with the small-phase replacement
    norm: float
    surrogate_norm: float
    gap: float               # ||profile - surrogate|| / ||surrogate||


def _gauss(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _inner(spec, N, alpha, eta, n):
    """``int (e^{-i t Xi} - 1) / Xi d xi1`` over ``xi1 in [max(a, eta - a), min(2a, eta)]``."""
    lo = np.maximum(alpha, eta - alpha)
    hi = np.minimum(2 * alpha, eta)
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)[:, None]
    xi1 = lo[:, None] + half * (x[None, :] + 1.0)
    ww = half * w[None, :]
    Xi = res.xi_tilde_low_high(spec.delta, xi1, N, eta[:, None] - xi1)
    y = spec.t * Xi
    g = (-2.0 * np.sin(0.5 * y) ** 2 - 1j * np.sin(y)) / Xi
    return np.sum(g * ww, axis=1), (hi - lo)


def _band(spec, N, n_outer, n_inner):
    alpha = spec.alpha(N)
    e1, w1 = _gauss(alpha, 2 * alpha, n_outer)
    e2, w2 = _gauss(2 * alpha, 3 * alpha, n_outer)
    eta, w = np.concatenate([e1, e2]), np.concatenate([w1, w2])
    integral, length = _inner(spec, N, alpha, eta, n_inner)
    xi = N + eta
    # the phase has modulus one and plays no role in the norm; it is evaluated as is
    phase = np.exp(1j * spec.t * np.asarray(p_tilde(spec.delta, xi)))
    pref = -2.0 * xi * phase / (alpha * N ** spec.s)
    values = pref * integral
    surrogate = pref * (-1j * spec.t) * length
    wt = sobolev_weight(xi, spec.s)
    norm = float(np.sqrt(np.sum(w * wt * np.abs(values) ** 2)))
    snorm = float(np.sqrt(np.sum(w * wt * np.abs(surrogate) ** 2)))
    diff = float(np.sqrt(np.sum(w * wt * np.abs(values - surrogate) ** 2)))
    return BandProfile(N, alpha, eta, w, values, surrogate, norm, snorm,
                       diff / snorm if snorm > 0 else 0.0)


def gateaux_second_derivative_quadrature(spec: InstabilityWitnessSpec, N: float,
                                         rtol: float = 1e-6) -> BandProfile:
    """Band profile of the second amplitude derivative of the residual flow on ``I1 + I2``.

    ``xi`` runs over ``[N + a, N + 3a]``, split at the kink ``N + 2a``; inner and
    outer integrals are Gauss-Legendre and are accepted when the rule with
    twice the nodes agrees to ``rtol``.
    """
    n = spec.quadrature_points
    coarse = _band(spec, N, n, n)
    fine = _band(spec, N, 2 * n, 2 * n)
    for a, b in ((coarse.norm, fine.norm), (coarse.surrogate_norm, fine.surrogate_norm)):
        if abs(a - b) > rtol * max(abs(b), np.finfo(float).tiny):
            raise QuadratureError(f"refinement levels disagree: {a!r} vs {b!r}")
    return fine


def witness_data_norm(spec: InstabilityWitnessSpec, N: float, n: int = 32) -> float:
    """``||phi||_{H^s}`` of the two-band datum, integrating the weight exactly on each interval."""
    alpha = spec.alpha(N)
    # offsets keep N + u resolvable when alpha << ulp(N)
    u, w = _gauss(0.0, alpha, n)
    low = np.sum(w * sobolev_weight(alpha + u, spec.s))
    high = np.sum(w * sobolev_weight(N + u, spec.s)) * N ** (-2.0 * spec.s)
    total = 2.0 * (low + high) / alpha
    return float(np.sqrt(total / (2.0 * np.pi)))


def run_instability(spec: InstabilityWitnessSpec) -> ExperimentReport:
    t0 = time.perf_counter()
    rep = ExperimentReport("instability", _spec_echo(spec))
    norms, gaps, phis = [], [], []
    for N in spec.N_grid:
        bp = gateaux_second_derivative_quadrature(spec, N)
        phin = witness_data_norm(spec, N)
        norms.append(bp.norm)
        gaps.append(bp.gap)
        phis.append(phin)
        rep.measurements.append({"N": float(N), "alpha": bp.alpha, "phi_norm": phin,
                                 "band_norm": bp.norm, "surrogate_norm": bp.surrogate_norm,
                                 "relative_gap": bp.gap,
                                 "normalized": bp.norm / (abs(spec.t) * np.sqrt(bp.alpha) * N)
                                 if spec.t else 0.0})
    rep.check("data norm within [1/2, 4]", all(0.5 <= p <= 4 for p in phis), phis, "1/2 <= ||phi|| <= 4")
    target = 0.5 * (1.0 - spec.theta)
    if spec.t == 0:
        rep.check("zero time gives zero profile", all(v == 0 for v in norms), norms, "exactly 0")
        rep.elapsed = time.perf_counter() - t0
        return rep
    slope, icpt, resid = loglog_fit(spec.N_grid, norms)
    sslope, _, _ = loglog_fit(spec.N_grid, [m["surrogate_norm"] for m in rep.measurements])
    rep.fits["surrogate_slope"] = sslope
    # size of t * Xi on the band: the small-phase replacement needs this << 1
    rep.fits["max_phase"] = [float(abs(spec.t) * 12.0 * N ** (-spec.theta)) for N in spec.N_grid]
    rep.fits.update({"slope": slope, "intercept": icpt, "target_slope": target,
                     "max_residual": float(np.max(np.abs(resid)))})
    rep.check("band-norm slope", abs(slope - target) <= spec.slope_tol, slope,
              f"|slope - {target:g}| <= {spec.slope_tol:g}")
    gslope, _, gres = loglog_fit(spec.N_grid, gaps)
    rep.fits.update({"gap_slope": gslope, "gap_max_residual": float(np.max(np.abs(gres)))})
    rep.check("surrogate gap exponent", abs(gslope + spec.theta) <= spec.gap_tol, gslope,
              f"|exponent + {spec.theta:g}| <= {spec.gap_tol:g}")
    if np.max(np.abs(resid)) > spec.fit_residual_tol:
        rep.status = "inconclusive: fit residual above threshold"
    rep.elapsed = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# PDE cross-check of the second derivative
# --------------------------------------------------------------------------

def bump_spectrum(grid: RealGrid, bands: Sequence[tuple[float, float, float]]) -> SpectralField:
    """Real field whose spectrum is a sum of smooth compact bumps ``(lo, hi, height)`` on ``+-[lo, hi]``."""
    xi = np.abs(grid.frequencies)
    c = np.zeros(grid.mode_count, dtype=complex)
    for lo, hi, height in bands:
        u = (xi - lo) / (hi - lo)
        inside = (u > 0) & (u < 1)
        b = np.zeros_like(xi)
        uu = u[inside]
        b[inside] = np.exp(1.0 - 1.0 / (1.0 - (2 * uu - 1) ** 2))
        c += height * b
    c[grid.nyquist_index] = 0.0
    return SpectralField(grid, c)


def duhamel_second_derivative(delta: float, t: float, phi: SpectralField, dealias_fraction: float = 2.0 / 3.0,
                    panels: int = 64, order: int = 16, rtol: float = 1e-10) -> SpectralField:
    """Second amplitude derivative of the residual flow from the three Duhamel terms.

    ``2 [ I((P^perp S phi)^2) + 2 I(P S phi * P^perp S phi) + P^perp I((P S phi)^2) ]``
    where ``I(F)(t) = int_0^t S(t - t') d_x F(t') dt'`` and ``S`` is the linear flow.
    The leading 2 is the second derivative of ``eps^2``.  The time integral is
    composite Gauss-Legendre, checked against a rule with twice the panels.
    """
    grid = phi.grid
    sp = _Spectral(grid, delta, dealias_fraction)
    sym = np.asarray(p_tilde(delta, sp.xi), float)
    a = np.where(sp.dealias, sp.from_field(phi), 0.0)
    low = np.where(sp.low, a, 0.0)
    high = np.where(sp.low, 0.0, a)
    n = grid.mode_count

    def forcing(tp):
        ph = np.exp(1j * tp * sym)
        wl = np.fft.irfft(ph * low, n=n)
        wh = np.fft.irfft(ph * high, n=n)
        f = np.fft.rfft(wh * wh) + 2.0 * np.fft.rfft(wl * wh)
        f = f + np.where(sp.low, 0.0, np.fft.rfft(wl * wl))
        return np.where(sp.dealias, sp.ik * f, 0.0)

    def integrate(m):
        edges = np.linspace(0.0, t, m + 1)
        x, w = np.polynomial.legendre.leggauss(order)
        acc = np.zeros(sp.xi.shape, dtype=complex)
        for a0, b0 in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b0 - a0)
            for xk, wk in zip(x, w):
                tp = a0 + half * (xk + 1.0)
                acc += half * wk * np.exp(1j * (t - tp) * sym) * forcing(tp)
        return 2.0 * acc

    coarse = integrate(panels)
    fine = integrate(2 * panels)
    scale = max(np.max(np.abs(fine)), np.finfo(float).tiny)
    if np.max(np.abs(coarse - fine)) > rtol * scale:
        raise QuadratureError("time quadrature did not converge")
    return sp.to_field(fine)


def residual_solution(delta, t, phi, eps, dt, dealias_fraction=2.0 / 3.0) -> SpectralField:
    """Residual component at time ``t`` of the coupled system with data ``eps * phi``."""
    cfg = SolverConfig(phi.grid, delta, dt, t, dealias_fraction, record_every=10 ** 9)
    rec = evolve(EquationKind.COUPLED, eps * phi, cfg)
    return rec.snapshots[-1][1]


def gateaux_fd_crosscheck(delta: float, t: float, phi: SpectralField,
                          epsilons: Sequence[float] = (1e-2, 5e-3, 2.5e-3), dt: float = 2.5e-4,
                          slope_window: tuple = (0.8, 1.2)) -> ExperimentReport:
    """Compare ``(v_res(2 eps) - 2 v_res(eps)) / eps^2`` with the Duhamel quadrature."""
    t0 = time.perf_counter()
    rep = ExperimentReport("fd-check", {"delta": delta, "t": t, "epsilons": list(epsilons), "dt": dt,
                                        "grid": {"box_length": phi.grid.box_length,
                                                 "mode_count": phi.grid.mode_count}})
    exact = duhamel_second_derivative(delta, t, phi)
    ref = sobolev_norm(exact)
    disc = []
    for eps in epsilons:
        v1 = residual_solution(delta, t, phi, eps, dt)
        v2 = residual_solution(delta, t, phi, 2 * eps, dt)
        fd = (v2 - 2.0 * v1) * (1.0 / eps ** 2)
        d = sobolev_norm(fd - exact)
        disc.append(d)
        rep.measurements.append({"eps": eps, "fd_norm": sobolev_norm(fd), "quadrature_norm": ref,
                                 "discrepancy": d})
    if ref == 0:
        rep.check("both sides vanish", max(disc) == 0.0, max(disc), "exactly 0")
        rep.elapsed = time.perf_counter() - t0
        return rep
    slope, _, _ = loglog_fit(epsilons, disc)
    rep.fits["discrepancy_slope"] = slope
    if slope < 0.5:
        raise RegimeError(f"discrepancy slope {slope:.3f} < 0.5: epsilons outside the quadratic regime")
    lo, hi = slope_window
    rep.check("discrepancy slope in eps", lo <= slope <= hi, slope, f"{lo:g} <= slope <= {hi:g}")
    rep.elapsed = time.perf_counter() - t0
    return rep


def default_fd_field(delta: float = 0.5) -> SpectralField:
    """Grid-feasible two-band datum: bumps on ``+-[a, 2a]`` and ``+-[N, N + a]`` with ``a = 1/4``, ``N = 6``."""
    grid = RealGrid(2 * np.pi * 32, 2048)
    a, N = 0.25, 6.0
    return bump_spectrum(grid, [(a, 2 * a, 1.0), (N, N + a, 1.0)])


# --------------------------------------------------------------------------
# resonance sweeps
# --------------------------------------------------------------------------

def identity_triples(n: int, seed: int) -> res.FrequencyTriple:
    """Seeded triples mixing magnitudes over twelve decades, signs and near-cancelling sums."""
    rng = np.random.default_rng(seed)
    a = rng.choice([-1.0, 1.0], n) * 10.0 ** rng.uniform(-6, 6, n)
    b = rng.choice([-1.0, 1.0], n) * 10.0 ** rng.uniform(-6, 6, n)
    near = rng.random(n) < 0.25
    b = np.where(near, -a * (1.0 + 10.0 ** rng.uniform(-12, -1, n)), b)
    return res.FrequencyTriple(a, b)


def identity_errors(triples: res.FrequencyTriple) -> tuple[float, float]:
    """Max relative error of the KdV and BO resonance identities."""
    kdv = np.asarray(res.xi_kdv(triples))
    prod = np.asarray(res.xi_kdv_product(triples))
    bo = np.abs(np.asarray(res.xi_bo(triples)))
    bom = np.asarray(res.xi_bo_magnitude(triples))
    e1 = np.max(np.abs(kdv - prod) / np.abs(prod))
    e2 = np.max(np.abs(bo - bom) / bom)
    return float(e1), float(e2)


DELTA_SWEEP = tuple(2.0 ** -k for k in range(0, 11))


def b_ratio_samples(n: int, seed: int, delta_grid=DELTA_SWEEP, k_max: int = 8):
    """Sobol samples of ``(delta, k, xi1, xi2)`` in band plus an axis lattice (where the sup sits)."""
    u = res.sobol(n, 4, seed)
    d = np.asarray(delta_grid)[np.minimum((u[:, 0] * len(delta_grid)).astype(int), len(delta_grid) - 1)]
    k = 1 + np.minimum((u[:, 1] * k_max).astype(int), k_max - 1)
    a = 2 * u[:, 2] - 1
    b = 2 * u[:, 3] - 1
    b = np.where(np.abs(a + b) > 1, -b, b)
    # lattice on the axes xi1 = 0, xi2 = 0 and at the origin
    m = max(1, n // 100)
    lat = np.linspace(-1.0, 1.0, m)
    la = np.concatenate([lat, np.zeros(m), [0.0]])
    lb = np.concatenate([np.zeros(m), lat, [0.0]])
    nl = la.size
    d = np.concatenate([d[: n - nl], np.resize(np.asarray(delta_grid), nl)])
    k = np.concatenate([k[: n - nl], np.resize(np.arange(1, 4), nl)])
    a = np.concatenate([a[: n - nl], la])
    b = np.concatenate([b[: n - nl], lb])
    return d, k, a / d, b / d


def b_ratio_sup(n: int = 10 ** 5, seed: int = 0) -> tuple[float, float]:
    d, k, xi1, xi2 = b_ratio_samples(n, seed)
    vals = np.empty(d.size)
    for dv in np.unique(d):
        sel = d == dv
        vals[sel] = res.b_coefficient_ratio(dv, res.FrequencyTriple(xi1[sel], xi2[sel]), k[sel])
    return float(np.max(vals)), float(np.min(vals))


def run_resonance_sweep(samples: int = 10 ** 4, seed: int = 0, delta_grid=DELTA_SWEEP,
                        identity_samples: int = 10 ** 5, b_ratio_samples_n: int = 10 ** 5,
                        jacobian_samples: int = 2000, progress: Callable | None = None) -> ExperimentReport:
    t0 = time.perf_counter()
    rep = ExperimentReport("resonance-sweep", {"samples": samples, "seed": seed,
                                               "delta_grid": list(delta_grid),
                                               "identity_samples": identity_samples,
                                               "b_ratio_samples": b_ratio_samples_n,
                                               "jacobian_samples": jacobian_samples})
    e1, e2 = identity_errors(identity_triples(identity_samples, seed))
    rep.check("KdV identity", e1 < 1e-12, e1, "relative < 1e-12")
    rep.check("BO identity", e2 < 1e-12, e2, "relative < 1e-12")

    per = max(1, samples // len(delta_grid))
    worst = 0.0
    lows, highs = [], []
    jac_err, jac_sign = 0.0, True
    for i, d in enumerate(delta_grid):
        tr = res.sample_band_triples(per, 1.0 / d, seed + i)
        direct = res.xi_tilde_direct(d, tr)
        series = res.xi_tilde_series(d, tr)
        ok = ~direct.flagged
        rel = np.abs(series[ok] - direct.value[ok]) / np.abs(series[ok])
        worst = max(worst, float(np.max(rel)))
        _, lr = res.comparability_ratio(d, tr)
        th = res.sample_high_triples(per, 1.0 / d, seed + 1000 + i)
        reg, hr = res.comparability_ratio(d, th)
        hr = hr[reg == res.Regime.HIGH.value]
        lows.append((float(lr.min()), float(lr.max())))
        highs.append((float(hr.min()), float(hr.max())))
        rep.measurements.append({"delta": d, "series_vs_direct": float(np.max(rel)),
                                 "flagged": int(np.sum(~ok)), "low_band": lows[-1], "high_band": highs[-1]})
        nj = min(jacobian_samples // len(delta_grid) + 1, tr.xi1.size)
        xi, xi1 = tr.xi[:nj], tr.xi1[:nj]
        J = res.jacobian_mu(d, xi, xi1)
        F = res.jacobian_fd(d, xi, xi1)
        jac_err = max(jac_err, float(np.max(np.abs(J - F) / np.abs(J))))
        jac_sign &= bool(np.all(np.sign(J) == np.sign(xi * (xi - 2 * xi1))))
        if progress:
            progress(i)
    rep.check("series vs closed form", worst < 1e-8, worst, "relative < 1e-8")
    for name, band in (("low-band", lows), ("high-band", highs)):
        lo = np.array([b[0] for b in band])
        hi = np.array([b[1] for b in band])
        spread = float(np.max(hi / lo))
        rep.check(f"{name} spread C/c", spread <= 10, spread, "C/c <= 10")
        stab = float(max(np.max(lo) / np.min(lo), np.max(hi) / np.min(hi)) - 1.0)
        rep.check(f"{name} endpoints stable across delta", stab <= 0.2, stab, "endpoint variation <= 20%")
    sup, _ = b_ratio_sup(b_ratio_samples_n, seed)
    rep.check("B ratio supremum", 5.0 <= sup <= 5.68 and sup < 6, sup, "5 <= sup <= 5.68, never 6")
    rep.check("Jacobian sign", jac_sign, jac_sign, "sign(J) = sign(xi (xi - 2 xi1))")
    rep.check("Jacobian series vs finite difference", jac_err < 1e-6, jac_err, "relative < 1e-6")
    rep.elapsed = time.perf_counter() - t0
    return rep


# --------------------------------------------------------------------------
# quick checks used by the CLI selftest
# --------------------------------------------------------------------------

def selftest() -> ExperimentReport:
    rep = ExperimentReport("selftest", {})
    g = RealGrid(2 * np.pi, 16)
    z = SpectralField.zeros(g)
    rep.check("zero field has zero norm", sobolev_norm(z) == 0.0, sobolev_norm(z), "exactly 0")
    rep.check("KdV multiplier at depth 0", p_tilde(0.0, 2.0) == 8.0, p_tilde(0.0, 2.0), "exactly xi^3")
    tr = res.FrequencyTriple(1.0, 2.0)
    rep.check("KdV identity", res.xi_kdv(tr) == 18.0, res.xi_kdv(tr), "exactly 3 xi xi1 xi2")
    cfg = SolverConfig(g, 0.5, 0.1, 0.5, record_every=1)
    rec = evolve(EquationKind.SCALED_ILW, z, cfg)
    rep.check("zero data stays zero", all(np.all(f.coeffs == 0) for f in rec.snapshots), True, "exactly 0")
    spec = InstabilityWitnessSpec(t=0.0, N_grid=(1e3, 1e4))
    bp = gateaux_second_derivative_quadrature(spec, 1e3)
    rep.check("witness vanishes at t = 0", bp.norm == 0.0, bp.norm, "exactly 0")
    cs = ConvergenceStudySpec(grid=RealGrid(40.0, 64), delta_grid=(0.0,), dt=0.05, horizon=0.2,
                              record_every=1)
    cr = run_convergence(cs)
    E = cr.measurements[0]["E"]
    rep.check("KdV-vs-KdV convergence error", E == 0.0, E, "exactly 0")
    return rep
