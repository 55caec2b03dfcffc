"""Periodic discretization of R^n and the unitary Fourier transform on it.

The box is ``[-L/2, L/2)^n`` sampled at ``x_m = (L/N) m - L/2`` and the
frequency lattice is ``xi_k = 2 pi k / L`` with ``k in {-N/2, ..., N/2-1}``.
Arrays are stored in numpy FFT order along every axis.

The transform approximates

    f^(xi) = (2 pi)^{-n/2} int e^{-i x xi} f(x) dx

by the Riemann sum over the lattice, and the inverse is the matching Riemann
sum over frequencies with cell volume ``(2 pi / L)^n``, so the pair is an
exact inverse on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "GridSpec",
    "SpatialField",
    "SpectralField",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "lp_norm",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with ``N`` points per axis on a box of side ``L``."""

    n: int
    N: int
    L: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension n must be 1, 2 or 3, got {self.n}")
        if int(self.N) != self.N or self.N % 2 or self.N < 8:
            raise ValueError(f"N must be an even integer >= 8, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"box length L must be positive, got {self.L}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.L

    @property
    def xi_min(self) -> float:
        return 2.0 * np.pi / self.L

    @property
    def xi_max(self) -> float:
        return np.pi * self.N / self.L

    @cached_property
    def x1(self) -> np.ndarray:
        """Sample points along one axis."""
        return self.dx * np.arange(self.N) - self.L / 2

    @cached_property
    def k1(self) -> np.ndarray:
        """Integer wave numbers along one axis, FFT order."""
        return np.fft.fftfreq(self.N, 1.0 / self.N)

    @cached_property
    def xi1(self) -> np.ndarray:
        return self.dxi * self.k1

    def coords(self) -> list[np.ndarray]:
        """Coordinate arrays, one per axis, each of full grid shape."""
        return np.meshgrid(*([self.x1] * self.n), indexing="ij")

    def frequencies(self) -> list[np.ndarray]:
        return np.meshgrid(*([self.xi1] * self.n), indexing="ij")

    @cached_property
    def xi_abs(self) -> np.ndarray:
        """``|xi_k|`` on the full lattice."""
        sq = np.zeros(self.shape)
        for comp in self.frequencies():
            sq += comp * comp
        return np.sqrt(sq)

    @cached_property
    def _phase(self) -> np.ndarray:
        # e^{i (L/2) xi_k} = (-1)^k, and (-1)^k equals (-1)^index in FFT order
        s1 = 1.0 - 2.0 * (np.arange(self.N) % 2)
        out = np.ones(self.shape)
        for axis in range(self.n):
            shp = [1] * self.n
            shp[axis] = self.N
            out = out * s1.reshape(shp)
        return out

    @property
    def forward_scale(self) -> float:
        return (2.0 * np.pi) ** (-self.n / 2) * self.dx**self.n

    @property
    def inverse_scale(self) -> float:
        return (2.0 * np.pi) ** (-self.n / 2) * self.dxi**self.n * self.N**self.n

    def refined(self) -> "GridSpec":
        """Same box, twice the points per axis."""
        return GridSpec(self.n, 2 * self.N, self.L)


def make_grid(n: int, N: int, L: float) -> GridSpec:
    return GridSpec(n, N, L)


@dataclass
class SpatialField:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.spec.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {self.spec.shape}")
        self.values = values

    def is_real(self, rtol: float = 1e-10) -> bool:
        scale = np.max(np.abs(self.values), initial=0.0)
        return bool(np.max(np.abs(self.values.imag), initial=0.0) <= rtol * scale)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def __add__(self, other: "SpatialField") -> "SpatialField":
        return SpatialField(self.spec, self.values + other.values)

    def __sub__(self, other: "SpatialField") -> "SpatialField":
        return SpatialField(self.spec, self.values - other.values)

    def __mul__(self, c) -> "SpatialField":
        return SpatialField(self.spec, self.values * c)

    __rmul__ = __mul__

    def mean(self) -> complex:
        return complex(np.mean(self.values))


@dataclass
class SpectralField:
    spec: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != self.spec.shape:
            raise ValueError(f"coeffs shape {coeffs.shape} does not match grid {self.spec.shape}")
        self.coeffs = coeffs


def forward_transform(f: SpatialField) -> SpectralField:
    spec = f.spec
    coeffs = spec.forward_scale * spec._phase * np.fft.fftn(f.values)
    return SpectralField(spec, coeffs)


def inverse_transform(g: SpectralField) -> SpatialField:
    spec = g.spec
    values = spec.inverse_scale * np.fft.ifftn(spec._phase * g.coeffs)
    return SpatialField(spec, values)


def apply_multiplier(f: SpatialField, multiplier: np.ndarray) -> SpatialField:
    """Return ``(m f^)^vee`` for a multiplier sampled on the lattice."""
    spec = f.spec
    # phase and scale factors cancel between the two transforms
    return SpatialField(spec, np.fft.ifftn(multiplier * np.fft.fftn(f.values)))


def lp_norm(f: SpatialField | np.ndarray, p: float, spec: GridSpec | None = None) -> float:
    """Lattice approximation of the L_p norm; ``p = inf`` gives the max."""
    if isinstance(f, SpatialField):
        spec, values = f.spec, f.values
    else:
        values = f
        if spec is None:
            raise TypeError("spec is required when passing a raw array")
    if not p >= 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    mod = np.abs(values)
    if np.isinf(p):
        return float(np.max(mod))
    cell = spec.dx**spec.n
    if p == 1:
        return float(np.sum(mod) * cell)
    if p == 2:
        return float(np.sqrt(np.sum(mod * mod) * cell))
    return float((np.sum(mod**p) * cell) ** (1.0 / p))
