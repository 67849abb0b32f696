"""Resonance functions on the convolution hyperplane ``xi = xi1 + xi2``.

All evaluators are vectorized: a :class:`FrequencyTriple` may hold arrays.

Three routes to the scaled-ILW resonance ``Xi~_delta``:

* :func:`xi_tilde_direct`, the plain difference of dispersion symbols, with a
  cancellation diagnostic;
* :func:`xi_tilde_series`, the Mittag-Leffler series with an explicit tail
  bound (the oracle);
* :func:`xi_tilde`, the production evaluator that picks a cancellation-free
  formula per regime (series in the low band, Benjamin-Ono split above it).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import qmc

from . import _dd
from .symbols import _as_delta, h_delta, p_tilde

CANCELLATION_THRESHOLD = 1e6
HIGH_BAND_FACTOR = 10.0
_PI2 = np.pi ** 2


class DegenerateInputError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class SeriesConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class FrequencyTriple:
    """``(xi, xi1, xi2)`` stored as ``(xi1, xi2)``; ``xi`` is derived."""

    xi1: np.ndarray
    xi2: np.ndarray

    def __post_init__(self):
        a, b = np.broadcast_arrays(np.asarray(self.xi1, dtype=float),
                                   np.asarray(self.xi2, dtype=float))
        object.__setattr__(self, "xi1", a)
        object.__setattr__(self, "xi2", b)

    @classmethod
    def from_xi(cls, xi, xi1) -> "FrequencyTriple":
        return cls(xi1, np.asarray(xi, dtype=float) - np.asarray(xi1, dtype=float))

    @property
    def xi(self) -> np.ndarray:
        return self.xi1 + self.xi2

    def magnitudes(self) -> np.ndarray:
        """``(xi_max, xi_med, xi_min)`` stacked on the first axis."""
        m = np.stack([np.abs(self.xi), np.abs(self.xi1), np.abs(self.xi2)])
        return -np.sort(-m, axis=0)

    @property
    def xi_max(self):
        return self.magnitudes()[0]

    @property
    def xi_med(self):
        return self.magnitudes()[1]

    @property
    def xi_min(self):
        return self.magnitudes()[2]

    def swapped(self) -> "FrequencyTriple":
        return FrequencyTriple(self.xi2, self.xi1)

    def negated(self) -> "FrequencyTriple":
        return FrequencyTriple(-self.xi1, -self.xi2)

    def __len__(self):
        return self.xi1.size


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


# --------------------------------------------------------------------------
# KdV and Benjamin-Ono
# --------------------------------------------------------------------------

def _xi_dd(triple):
    return _dd.two_sum(triple.xi1, triple.xi2)


def xi_kdv(triple: FrequencyTriple):
    """``xi^3 - xi1^3 - xi2^3`` in double-double, rounded once.

    The relative error is about ``1e-32 * xi_max / xi_min``, so it stays far
    below ``1e-12`` while the magnitude ratio is under ``1e18``.
    """
    x = _xi_dd(triple)
    a, b = _dd.dd(triple.xi1), _dd.dd(triple.xi2)
    cube = lambda u: _dd.dd_mul(_dd.dd_mul(u, u), u)
    r = _dd.dd_add(cube(x), _dd.dd_neg(cube(a)))
    r = _dd.dd_add(r, _dd.dd_neg(cube(b)))
    return _scalar(_dd.to_float(r))


def xi_kdv_product(triple: FrequencyTriple):
    """Factored form ``3 xi xi1 xi2``."""
    return _scalar(3.0 * triple.xi * triple.xi1 * triple.xi2)


def xi_bo(triple: FrequencyTriple):
    """``|xi| xi - |xi1| xi1 - |xi2| xi2`` in double-double, rounded once."""
    x = _xi_dd(triple)
    a, b = _dd.dd(triple.xi1), _dd.dd(triple.xi2)

    def signed_square(u):
        sq = _dd.dd_mul(u, u)
        sg = np.sign(u[0])
        return sg * sq[0], sg * sq[1]

    r = _dd.dd_add(signed_square(x), _dd.dd_neg(signed_square(a)))
    r = _dd.dd_add(r, _dd.dd_neg(signed_square(b)))
    return _scalar(_dd.to_float(r))


def xi_bo_magnitude(triple: FrequencyTriple):
    """``2 xi_med xi_min``."""
    m = triple.magnitudes()
    return _scalar(2.0 * m[1] * m[2])


# --------------------------------------------------------------------------
# scaled ILW
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectEvaluation:
    """Value of the symbol difference and the condition number of the subtraction."""

    value: np.ndarray
    condition: np.ndarray

    @property
    def flagged(self):
        return self.condition > CANCELLATION_THRESHOLD

    @property
    def warning(self):
        if np.any(self.flagged):
            return ("catastrophic cancellation (condition > "
                    f"{CANCELLATION_THRESHOLD:g}); use xi_tilde_series or xi_tilde")
        return None


def xi_tilde_direct(delta, triple: FrequencyTriple) -> DirectEvaluation:
    d = _as_delta(delta)
    if d == 0:
        value = np.asarray(xi_kdv(triple))
        terms = np.abs(triple.xi) ** 3 + np.abs(triple.xi1) ** 3 + np.abs(triple.xi2) ** 3
    else:
        p0 = np.asarray(p_tilde(d, triple.xi))
        p1 = np.asarray(p_tilde(d, triple.xi1))
        p2 = np.asarray(p_tilde(d, triple.xi2))
        value = p0 - p1 - p2
        terms = np.abs(p0) + np.abs(p1) + np.abs(p2)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(terms == 0, 1.0, terms / np.abs(value))
    return DirectEvaluation(_scalar(value), _scalar(cond))


def _elementary(d, xi1, xi2):
    xi = xi1 + xi2
    x0, x1, x2 = (d * xi) ** 2, (d * xi1) ** 2, (d * xi2) ** 2
    q = d * d * (xi1 * xi1 + xi1 * xi2 + xi2 * xi2)
    e2 = x0 * x1 + x0 * x2 + x1 * x2
    e3 = x0 * x1 * x2
    return xi, (x0, x1, x2), q, e2, e3


def _grouped_sum(summand, K, *args):
    """Sum ``summand(m, *args_i)`` over ``k = 1..K_i`` per element, grouped by ``K``."""
    out = np.zeros(K.shape)
    for kval in np.unique(K):
        idx = np.nonzero(K == kval)[0]
        k = np.arange(kval, 0, -1, dtype=float)  # small terms first
        m = _PI2 * k * k
        chunk = max(1, int(4_000_000 // kval))
        for start in range(0, idx.size, chunk):
            sel = idx[start:start + chunk]
            sub = [a[sel][:, None] for a in args]
            out[sel] = np.sum(summand(m[None, :], *sub), axis=1)
    return out


def _choose_K(bound, target, k_max):
    """Smallest power of two ``K >= 8`` with ``bound(K) <= target`` per element."""
    K = np.full(target.shape, 8, dtype=np.int64)
    while True:
        bad = bound(K.astype(float)) > target
        if not np.any(bad):
            return K
        if np.any(K[bad] >= k_max):
            raise SeriesConvergenceError(
                f"series needs more than {k_max} terms for the requested tolerance")
        K = np.where(bad, K * 2, K)


def _series_terms_raw(m, q, x0, x1, x2):
    return m * (3.0 * m + q) / ((m + x0) * (m + x1) * (m + x2))


def _series_S(d, xi1, xi2, tol, k_max=1 << 22):
    """``S`` with ``Xi~ = 6 xi xi1 xi2 S``; returns ``(S, tail_bound)``."""
    xi, (x0, x1, x2), q, e2, e3 = _elementary(d, xi1, xi2)
    S = np.empty(xi.shape)
    bound = np.empty(xi.shape)
    s_lower = _series_terms_raw(_PI2, q, x0, x1, x2)  # first (positive) term
    accel = np.maximum(np.maximum(x0, x1), x2) <= 4.0

    # In band: subtract 3/m - 5q/m^2 (sums 1/2 and q/18); remainder is O(m^-3).
    if np.any(accel):
        a = np.nonzero(accel)[0]
        qa, e2a, e3a = q[a], e2[a], e3[a]
        A = np.abs(10 * qa ** 2 - 3 * e2a)
        B = np.abs(5 * qa * e2a - 3 * e3a)
        C = 5 * qa * e3a
        tb = lambda K: (A / (5 * np.pi ** 6 * K ** 5) + B / (7 * np.pi ** 8 * K ** 7)
                        + C / (9 * np.pi ** 10 * K ** 9))
        K = _choose_K(tb, tol * s_lower[a], k_max)

        def rem(m, q_, e2_, e3_, x0_, x1_, x2_):
            P = (m + x0_) * (m + x1_) * (m + x2_)
            return ((10 * q_ ** 2 - 3 * e2_) * m * m + (5 * q_ * e2_ - 3 * e3_) * m
                    + 5 * q_ * e3_) / (m * m * P)

        tail = _grouped_sum(rem, K, qa, e2a, e3a, x0[a], x1[a], x2[a])
        S[a] = 0.5 - qa / 18.0 + tail
        bound[a] = tb(K.astype(float))

    # Out of band: subtract only 3/m; remainder is O(m^-2) and has one sign.
    b = np.nonzero(~accel)[0]
    if b.size:
        qb, e2b, e3b = q[b], e2[b], e3[b]
        tb = lambda K: (5 * qb / (3 * np.pi ** 4 * K ** 3) + 3 * e2b / (5 * np.pi ** 6 * K ** 5)
                        + 3 * e3b / (7 * np.pi ** 8 * K ** 7))
        K = _choose_K(tb, tol * s_lower[b], k_max)

        def rem(m, q_, e2_, e3_, x0_, x1_, x2_):
            P = (m + x0_) * (m + x1_) * (m + x2_)
            return -(5 * q_ * m * m + 3 * e2_ * m + 3 * e3_) / (m * P)

        tail = _grouped_sum(rem, K, qb, e2b, e3b, x0[b], x1[b], x2[b])
        S[b] = 0.5 + tail
        bound[b] = tb(K.astype(float))
    return S, bound


def xi_tilde_series(delta, triple: FrequencyTriple, tol: float = 1e-12):
    """Mittag-Leffler series ``6 xi xi1 xi2 sum_k pi^2 k^2 (3 pi^2 k^2 + delta^2 Q) / prod_j (pi^2 k^2 + delta^2 xi_j^2)``.

    ``Q = xi1^2 + xi1 xi2 + xi2^2``.  Leading asymptotic terms of the summand
    are summed in closed form; the truncation point is chosen so that the
    analytic bound on the dropped remainder is below ``tol`` times a lower
    bound of the full sum.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    d = _as_delta(delta)
    if d == 0:
        raise ValueError("series form needs delta > 0")
    shape = np.broadcast(triple.xi1, triple.xi2).shape
    xi1 = np.atleast_1d(triple.xi1).astype(float).ravel()
    xi2 = np.atleast_1d(triple.xi2).astype(float).ravel()
    S, _ = _series_S(d, xi1, xi2, tol)
    out = 6.0 * (xi1 + xi2) * xi1 * xi2 * S
    return float(out[0]) if shape == () else out.reshape(shape)


def series_partial_sums(delta, triple_scalar: FrequencyTriple, K: int) -> np.ndarray:
    """Raw partial sums of the series (no acceleration) for a single triple."""
    d = _as_delta(delta)
    xi1, xi2 = float(triple_scalar.xi1), float(triple_scalar.xi2)
    xi, (x0, x1, x2), q, _, _ = _elementary(d, np.array(xi1), np.array(xi2))
    k = np.arange(1, K + 1, dtype=float)
    m = _PI2 * k * k
    return 6.0 * xi * xi1 * xi2 * np.cumsum(_series_terms_raw(m, q, x0, x1, x2))


def _bo_correction(d, xi):
    """``xi^2 coth(delta xi) - |xi| xi = sgn(xi) 2 xi^2 / (exp(2 delta |xi|) - 1)``."""
    a = np.abs(xi)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = 2.0 * a * a / np.expm1(2.0 * d * a)
    val = np.where(a == 0, 0.0, val)
    return np.sign(xi) * val


def xi_tilde(delta, triple: FrequencyTriple, tol: float = 1e-14):
    """Best-available ``Xi~_delta``: KdV exactly at depth 0, series in the low band,
    ``(3/delta)(Xi_BO + E(xi) - E(xi1) - E(xi2))`` above it."""
    d = _as_delta(delta)
    if d == 0:
        return xi_kdv(triple)
    xi1 = np.atleast_1d(triple.xi1).astype(float).ravel()
    xi2 = np.atleast_1d(triple.xi2).astype(float).ravel()
    out = np.empty(xi1.shape)
    xmax = d * np.max(np.abs(np.stack([xi1, xi2, xi1 + xi2])), axis=0)
    low = xmax <= 1.0
    if np.any(low):
        S, _ = _series_S(d, xi1[low], xi2[low], tol)
        out[low] = 6.0 * (xi1[low] + xi2[low]) * xi1[low] * xi2[low] * S
    hi = ~low
    if np.any(hi):
        a, b = xi1[hi], xi2[hi]
        bo = np.asarray(xi_bo(FrequencyTriple(a, b)))
        corr = _bo_correction(d, a + b) - _bo_correction(d, a) - _bo_correction(d, b)
        out[hi] = 3.0 / d * (bo + corr)
    if np.ndim(triple.xi1) == 0 and np.ndim(triple.xi2) == 0:
        return float(out[0])
    return out.reshape(np.broadcast(triple.xi1, triple.xi2).shape)


def xi_tilde_low_high(delta, xi1, big, offset):
    """``Xi~`` for ``xi2 = big + offset`` and ``xi = big + offset + xi1``.

    ``big`` is a large frequency (``>> 1/delta``) and ``xi1``, ``offset`` are
    tiny; the sum is never formed, so nothing is lost to rounding.  Requires
    ``xi1 > 0`` and ``big + offset > 0``.
    """
    d = _as_delta(delta)
    xi2 = big + offset
    # same-sign Benjamin-Ono resonance is 2 xi1 xi2 exactly
    bo = 2.0 * xi1 * xi2
    corr = -_bo_correction(d, xi1)
    # E(xi) - E(xi2) at xi2 >> 1/delta is below exp(-2 delta xi2) * xi2^2
    e_big = _bo_correction(d, xi2)
    corr = corr + (_bo_correction(d, xi2 + xi1) - e_big)
    return 3.0 / d * (bo + corr)


# --------------------------------------------------------------------------
# comparability and bounds
# --------------------------------------------------------------------------

class Regime(str, Enum):
    LOW = "low-band"
    HIGH = "high-band"
    MIXED = "mixed"


def classify(delta, triple: FrequencyTriple):
    d = _as_delta(delta)
    xmax = triple.xi_max
    cut = np.inf if d == 0 else 1.0 / d
    return np.where(xmax <= cut, Regime.LOW.value,
                    np.where(xmax >= HIGH_BAND_FACTOR * cut, Regime.HIGH.value, Regime.MIXED.value))


def comparability_ratio(delta, triple: FrequencyTriple):
    """Return ``(regime, ratio)``; arrays when the triple holds arrays.

    Low band (and mixed): ``|Xi~| / |xi xi1 xi2|``.
    High band: ``|Xi~| / (xi_min xi_max / delta)``.
    """
    d = _as_delta(delta)
    if np.any(triple.xi1 == 0) or np.any(triple.xi2 == 0) or np.any(triple.xi == 0):
        raise DegenerateInputError("all of xi, xi1, xi2 must be nonzero")
    regime = classify(d, triple)
    val = np.abs(np.asarray(xi_tilde(d, triple)))
    m = triple.magnitudes()
    low_ratio = val / (m[0] * m[1] * m[2])
    if d == 0:
        ratio = low_ratio
    else:
        ratio = np.where(regime == Regime.HIGH.value, val / (m[2] * m[0] / d), low_ratio)
    if np.ndim(regime) == 0:
        return Regime(str(regime)), float(ratio)
    return regime, ratio


# --------------------------------------------------------------------------
# change-of-variables Jacobian and the bound on B_{delta,k}
# --------------------------------------------------------------------------

def _B(m, d, xi1, xi2):
    return (5.0 * m * m + m * d * d * (xi1 ** 2 - 4 * xi1 * xi2 + xi2 ** 2)
            - d ** 4 * xi1 * xi2 * (2 * xi1 ** 2 + 3 * xi1 * xi2 + 2 * xi2 ** 2))


def jacobian_mu(delta, xi, xi1, tol: float = 1e-13):
    """``d mu / d xi1 = (d_xi1 - d_xi2) Xi~(xi, xi1, xi - xi1)`` by the series

    ``3 xi (xi - 2 xi1) sum_k 2 pi^2 k^2 (3 pi^2 k^2 + delta^2 Q + D_k) / prod_j (pi^2 k^2 + delta^2 xi_j^2)``

    with ``D_k = delta^2 xi1 xi2 B_k / prod_{j=1,2}(pi^2 k^2 + delta^2 xi_j^2)``.
    The summand tends to ``6 / (pi^2 k^2)`` (sum 1); that part is summed in
    closed form and the remainder is truncated under an explicit bound.
    """
    d = _as_delta(delta)
    if d == 0:
        raise ValueError("jacobian_mu needs delta > 0")
    scalar = np.ndim(xi) == 0 and np.ndim(xi1) == 0
    xi_a, xi1_a = np.broadcast_arrays(np.atleast_1d(np.asarray(xi, float)),
                                      np.atleast_1d(np.asarray(xi1, float)))
    xi_a, xi1_a = xi_a.ravel(), xi1_a.ravel()
    xi2_a = xi_a - xi1_a
    x0, x1, x2 = (d * xi_a) ** 2, (d * xi1_a) ** 2, (d * xi2_a) ** 2
    q = d * d * (xi1_a ** 2 + xi1_a * xi2_a + xi2_a ** 2)
    e2 = x0 * x1 + x0 * x2 + x1 * x2
    e3 = x0 * x1 * x2
    c12 = d * d * xi1_a * xi2_a
    d0 = 5.0 * np.abs(c12)
    d1 = np.abs(c12) * np.abs(d * d * (xi1_a ** 2 - 4 * xi1_a * xi2_a + xi2_a ** 2))
    d2 = np.abs(c12) * np.abs(d ** 4 * xi1_a * xi2_a
                              * (2 * xi1_a ** 2 + 3 * xi1_a * xi2_a + 2 * xi2_a ** 2))
    tb = lambda K: ((2 * d0 + 10 * q) / (3 * np.pi ** 4 * K ** 3)
                    + (2 * d1 + 6 * e2) / (5 * np.pi ** 6 * K ** 5)
                    + (2 * d2 + 6 * e3) / (7 * np.pi ** 8 * K ** 7))
    # bracket [1 + sum r_k] is >= 1/2 in band; use 1/2 as the relative floor
    K = _choose_K(tb, np.full(xi_a.shape, 0.5 * tol), 1 << 22)

    def rem(m, q_, e2_, e3_, x0_, x1_, x2_, a_, b_):
        P = (m + x0_) * (m + x1_) * (m + x2_)
        D = d * d * a_ * b_ * _B(m, d, a_, b_) / ((m + x1_) * (m + x2_))
        return (m * m * (2.0 * D - 10.0 * q_) - 6.0 * e2_ * m - 6.0 * e3_) / (m * P)

    tail = _grouped_sum(rem, K, q, e2, e3, x0, x1, x2, xi1_a, xi2_a)
    out = 3.0 * xi_a * (xi_a - 2.0 * xi1_a) * (1.0 + tail)
    return float(out[0]) if scalar else out


def jacobian_fd(delta, xi, xi1, rel_step: float = 1e-3):
    """Fourth-order centered difference of ``xi1 -> Xi~(xi, xi1, xi - xi1)``."""
    d = _as_delta(delta)
    xi = np.asarray(xi, float)
    xi1 = np.asarray(xi1, float)
    scale = np.maximum(np.maximum(np.abs(xi), np.abs(xi1)), np.abs(xi - xi1))
    h = rel_step * np.where(scale == 0, 1.0, scale)
    f = lambda a: np.asarray(xi_tilde_direct(d, FrequencyTriple.from_xi(xi, a)).value)
    return (-f(xi1 + 2 * h) + 8 * f(xi1 + h) - 8 * f(xi1 - h) + f(xi1 - 2 * h)) / (12 * h)


def in_band(delta, triple: FrequencyTriple) -> np.ndarray:
    d = _as_delta(delta)
    return d * triple.xi_max <= 1.0 * (1 + 1e-15)


def b_coefficient_ratio(delta, triple: FrequencyTriple, k):
    """``|B_{delta,k}| / prod_{j=1,2}(pi^2 k^2 + delta^2 xi_j^2)`` on the band ``|xi_j| <= 1/delta``."""
    d = _as_delta(delta)
    if d == 0:
        raise PreconditionError("b_coefficient_ratio needs delta > 0")
    if not np.all(in_band(d, triple)):
        raise PreconditionError("all frequencies must satisfy |xi_j| <= 1/delta")
    k = np.asarray(k)
    if np.any(k < 1):
        raise PreconditionError("k must be a positive integer")
    m = _PI2 * np.asarray(k, float) ** 2
    a, b = triple.xi1, triple.xi2
    val = np.abs(_B(m, d, a, b)) / ((m + (d * a) ** 2) * (m + (d * b) ** 2))
    return _scalar(val)


B_RATIO_BOUND = 5.0 + 6.0 / np.pi ** 2 + 7.0 / np.pi ** 4


def kdv_resonance_gap(delta, triple: FrequencyTriple):
    """``|Xi_KdV - Xi~_delta| = |xi^3 h(xi) - xi1^3 h(xi1) - xi2^3 h(xi2)|``.

    Each term is at most ``delta^2 |xi_j|^5``, so the gap is at most
    ``3 delta^2 xi_max^5``; a violation raises.
    """
    d = _as_delta(delta)
    xi, a, b = triple.xi, triple.xi1, triple.xi2
    gap = np.abs(xi ** 3 * h_delta(d, xi) - a ** 3 * h_delta(d, a) - b ** 3 * h_delta(d, b))
    bound = 3.0 * d * d * triple.xi_max ** 5
    if np.any(gap > bound * (1 + 1e-12) + 1e-300):
        raise AssertionError("resonance gap exceeds 3 delta^2 xi_max^5")
    return _scalar(gap)


# --------------------------------------------------------------------------
# seeded sweeps
# --------------------------------------------------------------------------

def sobol(n: int, dim: int, seed: int) -> np.ndarray:
    """``n`` scrambled Sobol points in ``[0,1)^dim`` (power-of-two draws, truncated)."""
    eng = qmc.Sobol(d=dim, scramble=True, seed=seed)
    m = int(np.ceil(np.log2(max(n, 2))))
    return eng.random_base2(m)[:n]


def sample_band_triples(n: int, cutoff: float, seed: int, log_fraction: float = 0.5) -> FrequencyTriple:
    """Triples with ``|xi|, |xi1|, |xi2| <= cutoff``, none zero.

    A ``log_fraction`` share draws magnitudes log-uniformly over six decades
    below the cutoff; the rest is uniform in the band hexagon.
    """
    u = sobol(2 * n + 64, 4, seed)
    n_log = int(round(log_fraction * n))
    # uniform part: rejection from the square
    a = 2 * u[:, 0] - 1
    b = 2 * u[:, 1] - 1
    keep = (np.abs(a + b) <= 1) & (a != 0) & (b != 0) & (a + b != 0)
    a, b = a[keep][: n - n_log], b[keep][: n - n_log]
    # log part: xi1 tiny-to-large, xi2 sized so the sum stays in band
    mag1 = 10.0 ** (-6 * u[:n_log, 2])
    mag2 = 10.0 ** (-6 * u[:n_log, 3])
    s1 = np.where(u[:n_log, 0] < 0.5, -1.0, 1.0)
    s2 = np.where(u[:n_log, 1] < 0.5, -1.0, 1.0)
    la, lb = s1 * mag1, s2 * mag2
    over = np.abs(la + lb) > 1
    lb = np.where(over, -lb, lb)
    xi1 = np.concatenate([a, la]) * cutoff
    xi2 = np.concatenate([b, lb]) * cutoff
    ok = (xi1 != 0) & (xi2 != 0) & (xi1 + xi2 != 0)
    return FrequencyTriple(xi1[ok], xi2[ok])


def sample_high_triples(n: int, cutoff: float, seed: int, decades: float = 4.0) -> FrequencyTriple:
    """Triples with ``xi_max >= 10 cutoff``; ``xi_min`` spans from far below to above the cutoff."""
    u = sobol(n, 4, seed)
    big = HIGH_BAND_FACTOR * cutoff * 10.0 ** (decades * u[:, 0])
    small = cutoff * 10.0 ** (-6 + 8 * u[:, 1])
    small = np.minimum(small, 0.5 * big)
    s_small = np.where(u[:, 2] < 0.5, -1.0, 1.0)
    s_big = np.where(u[:, 3] < 0.5, -1.0, 1.0)
    # big frequency sits at xi2 or at xi
    xi2 = s_big * big
    xi1 = s_small * small
    return FrequencyTriple(xi1, xi2)


def write_rows_csv(path, rows, header=("regime", "delta", "xi", "xi1", "xi2", "ratio")):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([v if isinstance(v, str) else repr(float(v)) for v in r])
