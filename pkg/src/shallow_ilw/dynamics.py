"""Pseudospectral time stepping for KdV, scaled ILW and its low/residual split.

The dispersive part is applied exactly through ``exp(i t p~(xi))``; the
quadratic nonlinearity is advanced with the Cox-Matthews ETDRK4 scheme, with
the phi-function coefficients evaluated by contour averaging.  Products are
formed on the grid and truncated with the 2/3 rule.

Internally a state is the ``rfft`` of the grid samples (shape ``(n/2+1,)``,
or ``(2, n/2+1)`` for the coupled system); snapshots are handed out as
:class:`~shallow_ilw.spectral_core.SpectralField` objects.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .spectral_core import RealGrid, SpectralField, forward_transform, inverse_transform, sobolev_weight
from .symbols import DepthParameter, p_tilde

BLOWUP_THRESHOLD = 1e12
ALIASING_TOL = 1e-13
_CONTOUR_POINTS = 64


class EquationKind(str, Enum):
    KDV = "KdV"
    SCALED_ILW = "ScaledILW"
    LOW_FREQUENCY = "LowFrequency"
    COUPLED = "CoupledLowResidual"


class AliasingError(ValueError):
    pass


class BlowUpError(RuntimeError):
    def __init__(self, time: float, record: "TrajectoryRecord | None" = None):
        super().__init__(f"solution blew up at t = {time:.6g}")
        self.time = time
        self.record = record


@dataclass(frozen=True)
class SolverConfig:
    grid: RealGrid
    delta: float = 0.0
    dt: float = 1e-3
    horizon: float = 1.0
    dealias_fraction: float = 2.0 / 3.0
    record_every: int = 10
    nonlinear: bool = True
    s: float = 0.0

    def __post_init__(self):
        DepthParameter(self.delta)
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if not 0 < self.dealias_fraction <= 1:
            raise ValueError(f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}")
        if self.record_every < 1:
            raise ValueError("record_every must be a positive integer")

    @property
    def steps(self) -> int:
        return max(1, int(np.ceil(self.horizon / self.dt - 1e-9)))

    @property
    def step_size(self) -> float:
        """Time step actually used: ``horizon / steps``."""
        return self.horizon / self.steps


@dataclass
class TrajectoryRecord:
    kind: EquationKind
    config: SolverConfig
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=lambda: {"l2": [], "hs": [], "band_edge_energy_fraction": []})
    meta: dict = field(default_factory=dict)

    def total(self, i: int) -> SpectralField:
        """Snapshot ``i`` as a single field (``v_low + v_res`` for the coupled system)."""
        snap = self.snapshots[i]
        if isinstance(snap, tuple):
            return snap[0] + snap[1]
        return snap


# --------------------------------------------------------------------------
# half-spectrum plumbing
# --------------------------------------------------------------------------

class _Spectral:
    """Masks and conversions on the rfft half spectrum of one grid."""

    def __init__(self, grid: RealGrid, delta: float, dealias_fraction: float):
        self.grid = grid
        n = grid.mode_count
        self.k = np.arange(n // 2 + 1)
        self.xi = grid.dxi * self.k
        self.ik = 1j * self.xi
        self.dealias = self.k <= dealias_fraction * (n // 2)
        self.delta = delta
        self.low = np.ones_like(self.dealias) if delta == 0 else (self.xi <= 1.0 / delta)
        self.low_dealias = self.low & self.dealias
        # weight for L^2 sums on the half spectrum (interior modes count twice)
        w = np.full(self.k.shape, 2.0)
        w[0] = 1.0
        if n % 2 == 0:
            w[-1] = 1.0
        self.count = w
        self._scale = grid.spacing * np.where(self.k % 2 == 0, 1.0, -1.0)

    def to_field(self, uh: np.ndarray) -> SpectralField:
        n = self.grid.mode_count
        full = np.empty(n, dtype=np.complex128)
        c = uh * self._scale
        full[: n // 2 + 1] = c
        full[n // 2 + 1:] = np.conj(c[1: n // 2][::-1])
        full[n // 2] = full[n // 2].real
        return SpectralField(self.grid, full)

    def from_field(self, f: SpectralField) -> np.ndarray:
        if f.grid != self.grid:
            raise ValueError("field lives on a different grid")
        return f.coeffs[: self.grid.mode_count // 2 + 1] / self._scale

    def energy(self, uh: np.ndarray, s: float = 0.0) -> float:
        """``||u||_{H^s}^2`` in continuum normalization."""
        g = self.grid
        w = self.count * sobolev_weight(self.xi, s)
        return float(np.sum(w * np.abs(uh * self._scale) ** 2) * g.dxi / (2 * np.pi))


class _Nonlinearity:
    def __init__(self, kind: EquationKind, sp: _Spectral):
        self.kind = kind
        self.sp = sp
        n = sp.grid.mode_count
        self.n = n
        # the low projector only acts when delta > 0
        self.project = kind in (EquationKind.LOW_FREQUENCY, EquationKind.COUPLED) and sp.delta > 0

    def _phys(self, uh):
        return np.fft.irfft(uh, n=self.n)

    def __call__(self, uh: np.ndarray) -> np.ndarray:
        sp = self.sp
        if self.kind is EquationKind.COUPLED:
            low, res = uh[0], uh[1]
            if self.project:
                low = np.where(sp.low_dealias, low, 0.0)
            wl = self._phys(low)
            wr = self._phys(res)
            sq_low = np.fft.rfft(wl * wl)
            out = np.empty_like(uh)
            if self.project:
                out[0] = np.where(sp.low_dealias, sp.ik * sq_low, 0.0)
                forcing = np.where(sp.low, 0.0, sq_low)
            else:
                out[0] = np.where(sp.dealias, sp.ik * sq_low, 0.0)
                forcing = 0.0 * sq_low
            rest = np.fft.rfft(wr * wr) + 2.0 * np.fft.rfft(wr * wl) + forcing
            out[1] = np.where(sp.dealias, sp.ik * rest, 0.0)
            return out
        if self.project:
            uh = np.where(sp.low_dealias, uh, 0.0)
            w = self._phys(uh)
            return np.where(sp.low_dealias, sp.ik * np.fft.rfft(w * w), 0.0)
        w = self._phys(uh)
        return np.where(sp.dealias, sp.ik * np.fft.rfft(w * w), 0.0)


def _etd_coefficients(z: np.ndarray, h: float):
    """ETDRK4 weights for ``z = h * (i p~)`` by averaging on unit circles around ``z``."""
    theta = 2j * np.pi * (np.arange(1, _CONTOUR_POINTS + 1) - 0.5) / _CONTOUR_POINTS
    r = z[..., None] + np.exp(theta)
    er = np.exp(r)
    q = h * np.mean((np.exp(r / 2) - 1.0) / r, axis=-1)
    f1 = h * np.mean((-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r ** 3, axis=-1)
    f2 = h * np.mean((2.0 + r + er * (r - 2.0)) / r ** 3, axis=-1)
    f3 = h * np.mean((-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r ** 3, axis=-1)
    return q, f1, f2, f3


class Stepper:
    """One-step map ``u(t) -> u(t + h)`` for a fixed kind, depth and step."""

    def __init__(self, kind: EquationKind, config: SolverConfig, h: float | None = None):
        self.kind = EquationKind(kind)
        self.config = config
        self.h = config.step_size if h is None else h
        delta = config.delta
        if self.kind is EquationKind.KDV:
            delta = 0.0
        self.sp = _Spectral(config.grid, delta, config.dealias_fraction)
        sym = np.asarray(p_tilde(delta, self.sp.xi), dtype=float)
        z = 1j * self.h * sym
        self.E = np.exp(z)
        self.E2 = np.exp(z / 2)
        self.q, self.f1, self.f2, self.f3 = _etd_coefficients(z, self.h)
        self.N = _Nonlinearity(self.kind, self.sp)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        if not self.config.nonlinear:
            return self.E * u
        E, E2, q, N = self.E, self.E2, self.q, self.N
        Nu = N(u)
        a = E2 * u + q * Nu
        Na = N(a)
        b = E2 * u + q * Na
        Nb = N(b)
        c = E2 * a + q * (2.0 * Nb - Nu)
        Nc = N(c)
        return E * u + self.f1 * Nu + 2.0 * self.f2 * (Na + Nb) + self.f3 * Nc


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------

def _check_dealiased(f: SpectralField, fraction: float):
    g = f.grid
    keep = np.abs(g.indices) <= fraction * (g.mode_count // 2)
    a = np.abs(f.coeffs) ** 2
    total = np.sum(a)
    if total > 0 and np.sum(a[~keep]) > ALIASING_TOL * total:
        raise AliasingError(
            f"energy above the retained band is {np.sum(a[~keep]) / total:.3e} of the total")


def nonlinear_rhs(kind, state, delta, dealias_fraction: float = 2.0 / 3.0):
    """Nonlinear forcing of ``kind`` evaluated at ``state``.

    ``state`` is a field, or a ``(low, residual)`` pair for the coupled system.
    """
    kind = EquationKind(kind)
    fields = state if isinstance(state, tuple) else (state,)
    for f in fields:
        _check_dealiased(f, dealias_fraction)
    d = 0.0 if kind is EquationKind.KDV else float(delta)
    sp = _Spectral(fields[0].grid, d, dealias_fraction)
    N = _Nonlinearity(kind, sp)
    if kind is EquationKind.COUPLED:
        out = N(np.stack([sp.from_field(fields[0]), sp.from_field(fields[1])]))
        return sp.to_field(out[0]), sp.to_field(out[1])
    return sp.to_field(N(sp.from_field(fields[0])))


def step(kind, state, config: SolverConfig):
    """Advance ``state`` by one step of size ``config.step_size``."""
    st = Stepper(kind, config)
    sp = st.sp
    if isinstance(state, tuple):
        u = np.stack([sp.from_field(state[0]), sp.from_field(state[1])])
        out = st(u)
        _guard(out, 0.0 + st.h, sp.grid.mode_count)
        return sp.to_field(out[0]), sp.to_field(out[1])
    out = st(sp.from_field(state))
    _guard(out, st.h, sp.grid.mode_count)
    return sp.to_field(out)


def _guard(u: np.ndarray, t: float, n: int, record=None):
    if not np.all(np.isfinite(u)):
        raise BlowUpError(t, record)
    # sup |u(x)| <= (2/n) sum |rfft coefficients|
    if 2.0 / n * np.sum(np.abs(u)) > BLOWUP_THRESHOLD:
        phys = np.fft.irfft(u, n=n, axis=-1)
        if np.max(np.abs(phys)) > BLOWUP_THRESHOLD:
            raise BlowUpError(t, record)


def initial_state(kind, phi, config: SolverConfig) -> tuple[np.ndarray, dict]:
    """Half-spectrum initial state with the kind's support conventions applied."""
    kind = EquationKind(kind)
    d = 0.0 if kind is EquationKind.KDV else config.delta
    sp = _Spectral(config.grid, d, config.dealias_fraction)
    if isinstance(phi, tuple):
        if kind is not EquationKind.COUPLED:
            raise ValueError("a (low, residual) pair is only valid for the coupled system")
        u = np.stack([sp.from_field(phi[0]), sp.from_field(phi[1])])
        full = u[0] + u[1]
    else:
        full = sp.from_field(phi)
        if kind is EquationKind.COUPLED:
            u = np.stack([np.where(sp.low, full, 0.0), np.where(sp.low, 0.0, full)])
        elif kind is EquationKind.LOW_FREQUENCY:
            u = np.where(sp.low, full, 0.0)
        else:
            u = full.copy()
    before = sp.energy(full)
    u = np.where(sp.dealias, u, 0.0)
    after = sp.energy(u.sum(axis=0) if u.ndim == 2 else u)
    return u, {"dealias_truncation_fraction": 0.0 if before == 0 else max(0.0, 1.0 - after / before)}


def evolve(kind, initial, config: SolverConfig) -> TrajectoryRecord:
    """Integrate to ``config.horizon``, recording every ``record_every`` steps and at the end."""
    kind = EquationKind(kind)
    stepper = Stepper(kind, config)
    sp = stepper.sp
    u, meta = initial_state(kind, initial, config)
    rec = TrajectoryRecord(kind, config, meta=dict(meta, dt=stepper.h, steps=config.steps))
    edge = sp.dealias & (sp.k > 0.9 * config.dealias_fraction * (config.grid.mode_count // 2))

    def record(t, u):
        total = u.sum(axis=0) if u.ndim == 2 else u
        rec.times.append(float(t))
        if u.ndim == 2:
            rec.snapshots.append((sp.to_field(u[0]), sp.to_field(u[1])))
        else:
            rec.snapshots.append(sp.to_field(u))
        e0 = sp.energy(total)
        rec.diagnostics["l2"].append(float(np.sqrt(e0)))
        rec.diagnostics["hs"].append(float(np.sqrt(sp.energy(total, config.s))))
        e_edge = float(np.sum(sp.count[edge] * np.abs(total[edge]) ** 2))
        e_all = float(np.sum(sp.count * np.abs(total) ** 2))
        rec.diagnostics["band_edge_energy_fraction"].append(0.0 if e_all == 0 else e_edge / e_all)

    record(0.0, u)
    n = config.grid.mode_count
    for i in range(1, config.steps + 1):
        u = stepper(u)
        t = i * stepper.h
        try:
            _guard(u, t, n)
        except BlowUpError as exc:
            exc.record = rec
            raise
        if i % config.record_every == 0 or i == config.steps:
            record(t, u)
    return rec


def l2_drift(record: TrajectoryRecord) -> float:
    """Largest relative change of the L^2 norm over the recorded snapshots."""
    l2 = np.asarray(record.diagnostics["l2"])
    if l2[0] == 0:
        warnings.warn("zero initial data: returning absolute L^2 drift", stacklevel=2)
        return float(np.max(np.abs(l2 - l2[0])))
    return float(np.max(np.abs(l2 - l2[0])) / l2[0])


def mean_coefficients(record: TrajectoryRecord) -> np.ndarray:
    return np.array([record.total(i).coeffs[0] for i in range(len(record.times))])


def high_band_mass(record: TrajectoryRecord) -> float:
    """Largest coefficient mass above ``1/delta`` over snapshots (exactly 0 for the low system)."""
    d = record.config.delta
    if d == 0:
        return 0.0
    worst = 0.0
    for i in range(len(record.times)):
        f = record.snapshots[i]
        f = f[0] if isinstance(f, tuple) else f
        mask = np.abs(f.grid.frequencies) > 1.0 / d
        worst = max(worst, float(np.sum(np.abs(f.coeffs[mask]) ** 2)))
    return worst


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------

def write_trajectory(record: TrajectoryRecord, out_dir) -> dict:
    """Write ``snapshots.npz`` (columnar), ``diagnostics.csv`` and ``trajectory.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = {"times": np.asarray(record.times)}
    if record.snapshots and isinstance(record.snapshots[0], tuple):
        cols["low_real"] = np.array([s[0].coeffs.real for s in record.snapshots])
        cols["low_imag"] = np.array([s[0].coeffs.imag for s in record.snapshots])
        cols["res_real"] = np.array([s[1].coeffs.real for s in record.snapshots])
        cols["res_imag"] = np.array([s[1].coeffs.imag for s in record.snapshots])
    else:
        cols["coeffs_real"] = np.array([s.coeffs.real for s in record.snapshots])
        cols["coeffs_imag"] = np.array([s.coeffs.imag for s in record.snapshots])
    np.savez(out / "snapshots.npz", **cols)
    with open(out / "diagnostics.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        keys = list(record.diagnostics)
        w.writerow(["t"] + keys)
        for i, t in enumerate(record.times):
            w.writerow([repr(t)] + [repr(float(record.diagnostics[k][i])) for k in keys])
    cfg = record.config
    manifest = {
        "schema": "shallow_ilw.trajectory/1",
        "kind": record.kind.value,
        "grid": {"box_length": cfg.grid.box_length, "mode_count": cfg.grid.mode_count},
        "delta": cfg.delta,
        "dt": record.meta.get("dt", cfg.step_size),
        "horizon": cfg.horizon,
        "dealias_fraction": cfg.dealias_fraction,
        "record_every": cfg.record_every,
        "diagnostics": {k: [float(v) for v in vals] for k, vals in record.diagnostics.items()},
        "meta": record.meta,
    }
    with open(out / "trajectory.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
    return {"snapshots": "snapshots.npz", "diagnostics": "diagnostics.csv", "manifest": "trajectory.json"}


def profile(grid: RealGrid, kind: str = "gaussian", amplitude: float = 1.0, width: float = 1.0,
            center: float = 0.0) -> SpectralField:
    """Named smooth initial profiles sampled on ``grid``."""
    x = grid.x - center
    if kind == "gaussian":
        u = amplitude * np.exp(-0.5 * (x / width) ** 2)
    elif kind == "sech2":
        u = amplitude / np.cosh(x / width) ** 2
    elif kind == "zero":
        u = np.zeros_like(x)
    else:
        raise ValueError(f"unknown profile {kind!r}")
    return forward_transform(grid, u)


def to_samples(f: SpectralField) -> np.ndarray:
    return inverse_transform(f)
