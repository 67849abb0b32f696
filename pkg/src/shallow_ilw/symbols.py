"""Fourier multipliers of the scaled ILW equation and of KdV.

``depth == 0`` is a separate branch that returns the KdV symbols exactly
(``L = xi^2``, ``p = xi^3``); it is never reached through a small-depth
evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import zeta

from .spectral_core import RealGrid

# Laurent coefficients of coth(x) - 1/x = sum_n c_n x^(2n-1),
# c_n = (-1)^(n+1) 2 zeta(2n) / pi^(2n).
_LAURENT_TERMS = 14
_LAURENT = np.array([(-1) ** (n + 1) * 2.0 * zeta(2 * n) / np.pi ** (2 * n)
                     for n in range(1, _LAURENT_TERMS + 1)])
# Radius of convergence is pi; 14 terms at 0.5 leave (0.5/pi)^28 ~ 1e-22.
SERIES_SWITCH = 0.5


@dataclass(frozen=True)
class DepthParameter:
    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.delta) and self.delta >= 0):
            raise ValueError(f"delta must satisfy delta >= 0, got {self.delta}")

    @property
    def is_kdv(self) -> bool:
        return self.delta == 0

    @property
    def cutoff(self) -> float:
        """Low-band cutoff ``1/delta`` (infinite on the KdV branch)."""
        return np.inf if self.delta == 0 else 1.0 / self.delta

    def __float__(self):
        return float(self.delta)


def _as_delta(delta) -> float:
    d = float(delta.delta if isinstance(delta, DepthParameter) else delta)
    if not d >= 0:
        raise ValueError(f"delta must satisfy delta >= 0, got {d}")
    return d


def _horner(coeffs, y):
    acc = np.zeros_like(y) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * y + c
    return acc


def coth_minus_inverse(x):
    """``coth(x) - 1/x`` with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.empty_like(ax)
    small = ax < SERIES_SWITCH
    y = ax[small]
    out[small] = y * _horner(_LAURENT, y * y)
    big = ~small
    out[big] = 1.0 / np.tanh(ax[big]) - 1.0 / ax[big]
    out = np.sign(x) * out
    return out if out.ndim else float(out)


def _h_of(x):
    """``1 - 3 (coth x - 1/x) / x`` as a function of ``x = delta*xi``, no cancellation."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.empty_like(ax)
    small = ax < SERIES_SWITCH
    y2 = ax[small] ** 2
    # 1 - 3 sum c_n y^(2n-2) = -3 sum_{n>=2} c_n y^(2n-2)
    out[small] = -3.0 * y2 * _horner(_LAURENT[1:], y2)
    big = ~small
    out[big] = 1.0 - 3.0 * coth_minus_inverse(ax[big]) / ax[big]
    return out


def L_delta(delta, xi):
    """Multiplier of ``G~_delta d_x``: ``(3/delta)(xi coth(delta xi) - 1/delta)``."""
    d = _as_delta(delta)
    xi = np.asarray(xi, dtype=float)
    if d == 0:
        out = xi * xi
    elif xi.ndim == 0:
        return float(L_delta(d, xi[None])[0])
    else:
        x = d * np.abs(xi)
        small = x < SERIES_SWITCH
        out = np.empty_like(x)
        # near zero: (3/delta)|xi| * x H(x^2) = 3 xi^2 H(x^2), no division by delta
        out[small] = 3.0 * xi[small] ** 2 * _horner(_LAURENT, x[small] ** 2)
        big = ~small
        out[big] = 3.0 * np.abs(xi[big]) / d * coth_minus_inverse(x[big])
    return out if np.ndim(out) else float(out)


def h_delta(delta, xi):
    """Relative defect ``h = 1 - L_delta(xi)/xi^2``, in ``[0, 1]``."""
    d = _as_delta(delta)
    xi = np.asarray(xi, dtype=float)
    if d == 0:
        out = np.zeros_like(xi)
    else:
        out = _h_of(d * xi)
        # rounding can push the value a hair outside [0, 1]
        out = np.where((out < 0) & (out > -1e-12), 0.0, out)
        out = np.where((out > 1) & (out < 1 + 1e-12), 1.0, out)
    return out if np.ndim(out) else float(out)


def p_tilde(delta, xi):
    """Dispersion symbol ``xi * L_delta(xi)``; ``xi^3`` on the KdV branch."""
    d = _as_delta(delta)
    xi = np.asarray(xi, dtype=float)
    out = xi * xi * xi if d == 0 else xi * L_delta(d, xi)
    return out if np.ndim(out) else float(out)


def propagator_phase(delta, t, xi):
    """Symbol ``exp(i t p~(xi))`` of the linear flow ``S_delta(t)``."""
    out = np.exp(1j * t * np.asarray(p_tilde(delta, xi)))
    return out if np.ndim(out) else complex(out)


def L_delta_series(delta, xi, tol: float = 1e-12):
    """Mittag-Leffler evaluation ``6 xi^2 sum_k 1/(k^2 pi^2 + delta^2 xi^2)``.

    Independent of the coth closed form.  The sum is truncated at ``K`` and
    the tail is replaced by the midpoint integral ``int_{K+1/2}^inf``; the
    error of that replacement is bounded by ``10 / (72 pi^2 (K - 1/2)^3)``
    (midpoint rule with ``|f''| <= 10 / (pi^2 k^4)``).

    Returns ``(value, error_bound)``.
    """
    d = _as_delta(delta)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = (d * xi) ** 2
    # S >= f(1) gives a conservative relative target
    s_lower = 1.0 / (np.pi ** 2 + x)
    need = 10.0 / (72.0 * np.pi ** 2 * tol * s_lower)
    K = np.ceil(need ** (1.0 / 3.0) + 1.0).astype(np.int64)
    value = np.empty_like(xi)
    bound = np.empty_like(xi)
    for i in range(xi.size):
        k = np.arange(1, K[i] + 1, dtype=float)
        partial = np.sum(1.0 / (np.pi ** 2 * k[::-1] ** 2 + x[i]))
        a = np.pi * (K[i] + 0.5)
        if x[i] > 0:
            r = np.sqrt(x[i])
            tail = np.arctan(r / a) / (np.pi * r)
        else:
            tail = 1.0 / (np.pi * a)
        s = partial + tail
        value[i] = 6.0 * xi[i] ** 2 * s
        bound[i] = 6.0 * xi[i] ** 2 * 10.0 / (72.0 * np.pi ** 2 * (K[i] - 0.5) ** 3)
    return value, bound


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    """Per-frequency values of ``p~_delta`` on a grid (immutable)."""

    grid: RealGrid
    delta: DepthParameter

    @cached_property
    def values(self) -> np.ndarray:
        v = np.asarray(p_tilde(self.delta, self.grid.frequencies), dtype=float)
        v.setflags(write=False)
        return v

    def phase(self, t: float) -> np.ndarray:
        return np.exp(1j * t * self.values)
