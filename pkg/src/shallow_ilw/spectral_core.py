"""Periodic Fourier discretization of the line: grids, transforms, projectors, norms.

Coefficients use the continuum normalization: the coefficient at frequency
``xi_k`` approximates ``int f(x) exp(-i xi_k x) dx`` over the box, so that
``||f||_{L^2}^2 = (1/2pi) sum |f_hat|^2 dxi``.  Arrays are stored in numpy FFT
order; the Nyquist index ``n/2`` is assigned the positive frequency ``+pi n/L``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

SYMMETRY_TOL = 1e-10


class InputShapeError(ValueError):
    pass


class InvalidFieldError(ValueError):
    pass


@dataclass(frozen=True)
class RealGrid:
    """Uniform periodic grid on ``[-L/2, L/2)``."""

    box_length: float
    mode_count: int

    def __post_init__(self):
        if not self.box_length > 0:
            raise ValueError(f"box_length must be > 0, got {self.box_length}")
        if self.mode_count <= 0 or self.mode_count % 2:
            raise ValueError(f"mode_count must be a positive even integer, got {self.mode_count}")

    @property
    def spacing(self) -> float:
        return self.box_length / self.mode_count

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.box_length

    @property
    def origin(self) -> float:
        return -0.5 * self.box_length

    @cached_property
    def x(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.mode_count)

    @cached_property
    def indices(self) -> np.ndarray:
        """Integer wavenumbers in FFT order, Nyquist taken as ``+n/2``."""
        n = self.mode_count
        k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
        k[n // 2] = n // 2
        return k

    @cached_property
    def frequencies(self) -> np.ndarray:
        return self.dxi * self.indices

    @property
    def max_frequency(self) -> float:
        return self.dxi * (self.mode_count // 2)

    @property
    def nyquist_index(self) -> int:
        return self.mode_count // 2

    @cached_property
    def _origin_phase(self) -> np.ndarray:
        # exp(-i xi_k x0) with x0 = -L/2 is (-1)^k exactly
        return np.where(self.indices % 2 == 0, 1.0, -1.0)

    def partner(self) -> np.ndarray:
        """Index of ``-xi`` for every slot (Nyquist and zero map to themselves)."""
        n = self.mode_count
        return (-np.arange(n)) % n


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: RealGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.mode_count,):
            raise InputShapeError(
                f"expected {self.grid.mode_count} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def symmetry_defect(self) -> float:
        """Relative violation of ``c(-xi) = conj(c(xi))`` (Nyquist must be real)."""
        c = self.coeffs
        scale = max(np.max(np.abs(c)), np.finfo(float).tiny)
        defect = np.max(np.abs(c[self.grid.partner()] - np.conj(c)))
        return float(defect / scale)

    @classmethod
    def zeros(cls, grid: RealGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.mode_count, dtype=np.complex128))


def _same_grid(a: SpectralField, b: SpectralField) -> None:
    if a.grid != b.grid:
        raise InputShapeError("fields live on different grids")


def forward_transform(grid: RealGrid, samples) -> SpectralField:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.mode_count,):
        raise InputShapeError(
            f"samples must have length {grid.mode_count}, got shape {samples.shape}")
    coeffs = np.fft.fft(samples) * (grid.spacing * grid._origin_phase)
    return SpectralField(grid, coeffs)


def inverse_transform(field: SpectralField) -> np.ndarray:
    defect = field.symmetry_defect()
    if defect > SYMMETRY_TOL:
        raise InvalidFieldError(f"conjugate symmetry broken (relative defect {defect:.3e})")
    g = field.grid
    return np.fft.ifft(field.coeffs * g._origin_phase).real / g.spacing


def low_mask(grid: RealGrid, cutoff: float) -> np.ndarray:
    """Boolean mask of ``|xi_k| <= cutoff`` (ties go to the low band)."""
    return np.abs(grid.frequencies) <= cutoff


def project_low(field: SpectralField, cutoff: float) -> SpectralField:
    if not cutoff > 0:
        raise ValueError(f"cutoff must be > 0, got {cutoff}")
    mask = low_mask(field.grid, cutoff)
    return SpectralField(field.grid, np.where(mask, field.coeffs, 0.0))


def project_high(field: SpectralField, cutoff: float) -> SpectralField:
    if not cutoff > 0:
        raise ValueError(f"cutoff must be > 0, got {cutoff}")
    mask = low_mask(field.grid, cutoff)
    return SpectralField(field.grid, np.where(mask, 0.0, field.coeffs))


def sobolev_weight(xi, s: float) -> np.ndarray:
    return (1.0 + np.asarray(xi, dtype=float) ** 2) ** s


def sobolev_norm(field: SpectralField, s: float = 0.0) -> float:
    g = field.grid
    w = sobolev_weight(g.frequencies, s)
    total = np.sum(w * np.abs(field.coeffs) ** 2) * g.dxi / (2.0 * np.pi)
    return float(np.sqrt(total))


def apply_multiplier(field: SpectralField, values: np.ndarray) -> SpectralField:
    """Multiply coefficients by ``values(xi_k)`` for a real-type operator.

    On the grid the Nyquist mode only sees the even part of the symbol, so its
    factor is replaced by the real part to keep the field real.
    """
    g = field.grid
    values = np.array(values, dtype=np.complex128)
    values[g.nyquist_index] = values[g.nyquist_index].real
    return SpectralField(g, field.coeffs * values)


def translate(field: SpectralField, y: float) -> SpectralField:
    """Return ``f(. + y)``."""
    return apply_multiplier(field, np.exp(1j * field.grid.frequencies * y))


def tail_norm(field: SpectralField, cutoff: float, s: float = 0.0) -> float:
    """``||P_N^perp f||_{H^s}`` without building the projected field."""
    g = field.grid
    mask = np.abs(g.frequencies) > cutoff
    w = sobolev_weight(g.frequencies[mask], s)
    total = np.sum(w * np.abs(field.coeffs[mask]) ** 2) * g.dxi / (2.0 * np.pi)
    return float(np.sqrt(total))


def translation_modulus(field: SpectralField, eps: float, s: float = 0.0, samples: int = 64) -> float:
    """``sup_{|y|<eps} ||f(.+y) - f||_{H^s}`` sampled on ``samples`` shifts."""
    g = field.grid
    w = sobolev_weight(g.frequencies, s) * np.abs(field.coeffs) ** 2
    best = 0.0
    for y in np.linspace(-eps, eps, samples):
        # |e^{i xi y} - 1|^2 = 4 sin^2(xi y / 2)
        val = np.sum(w * 4.0 * np.sin(0.5 * g.frequencies * y) ** 2) * g.dxi / (2.0 * np.pi)
        best = max(best, val)
    return float(np.sqrt(best))


def boundary_mass(field: SpectralField, fraction: float = 0.05) -> dict:
    """Fractions of L^2 mass near the box edges and near the top of the spectrum.

    Both must be tiny for the periodic box to stand in for the line.
    """
    g = field.grid
    u = inverse_transform(field)
    total_x = np.sum(u ** 2)
    edge = np.abs(g.x) >= 0.5 * g.box_length * (1.0 - 2.0 * fraction)
    a = np.abs(field.coeffs) ** 2
    total_k = np.sum(a)
    top = np.abs(g.frequencies) >= g.max_frequency * (1.0 - fraction)
    if total_x == 0.0:
        return {"physical": 0.0, "spectral": 0.0}
    return {
        "physical": float(np.sum(u[edge] ** 2) / total_x),
        "spectral": float(np.sum(a[top]) / total_k),
    }
