"""Vectorized double-double arithmetic (error-free transformations).

Used where a cubic or quadratic difference cancels catastrophically in plain
double precision.  Inputs must stay below ~1e300 in magnitude (Veltkamp split).
"""

import numpy as np

_SPLITTER = 134217729.0  # 2^27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _fast_two_sum(a, b):
    s = a + b
    e = b - (s - a)
    return s, e


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def dd_add(a, b):
    s, e = two_sum(a[0], b[0])
    e = e + (a[1] + b[1])
    return _fast_two_sum(s, e)


def dd_neg(a):
    return -a[0], -a[1]


def dd_mul(a, b):
    p, e = two_prod(a[0], b[0])
    e = e + (a[0] * b[1] + a[1] * b[0])
    return _fast_two_sum(p, e)


def dd(a):
    a = np.asarray(a, dtype=float)
    return a, np.zeros_like(a)


def to_float(a):
    return a[0] + a[1]
