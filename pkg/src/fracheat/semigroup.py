"""Fourier multipliers built on ``|xi|^{2 alpha}``.

Covers the fractional Laplacian, the fractional Gauss-Weierstrass semigroup
``W_t = (exp(-t |xi|^{2 alpha}) f^)^vee`` and its time derivatives, the
kernels ``K^{alpha,sigma} = (|xi|^sigma exp(-|xi|^{2 alpha}))^vee``, the
Bessel-potential lift and numerical probes of the kernel admissibility
integrals used by the semigroup characterizations of Besov and
Triebel-Lizorkin norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .grid import (
    GridSpec,
    SpatialField,
    SpectralField,
    apply_multiplier,
    inverse_transform,
)

__all__ = [
    "SemigroupParams",
    "Kernel",
    "AdmissibilityProbe",
    "fractional_laplacian",
    "weierstrass",
    "weierstrass_time_derivative",
    "kernel",
    "decay_exponent_fit",
    "lift",
    "admissibility_integrals",
    "symbol_power",
]


@dataclass(frozen=True)
class SemigroupParams:
    alpha: float
    t: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.t >= 0:
            raise ValueError(f"t must be nonnegative, got {self.t}")


@lru_cache(maxsize=64)
def symbol_power(spec: GridSpec, power: float) -> np.ndarray:
    """``|xi|^power`` on the lattice, with the value 0 at the origin for power > 0."""
    out = spec.xi_abs**power
    out.setflags(write=False)
    return out


def _check_alpha(alpha):
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")


def fractional_laplacian(f: SpatialField, alpha: float) -> SpatialField:
    _check_alpha(alpha)
    return apply_multiplier(f, symbol_power(f.spec, 2.0 * alpha))


def semigroup_multiplier(spec: GridSpec, alpha: float, t: float) -> np.ndarray:
    return np.exp(-t * symbol_power(spec, 2.0 * alpha))


def weierstrass(f: SpatialField, alpha: float, t: float) -> SpatialField:
    """Apply ``W^alpha_t``."""
    _check_alpha(alpha)
    if not t >= 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t == 0:
        return SpatialField(f.spec, f.values.copy())
    return apply_multiplier(f, semigroup_multiplier(f.spec, alpha, t))


def weierstrass_time_derivative(f: SpatialField, alpha: float, t: float, k: int) -> SpatialField:
    """``d^k/dt^k W^alpha_t f = (-1)^k (|xi|^{2 k alpha} e^{-t |xi|^{2 alpha}} f^)^vee``."""
    _check_alpha(alpha)
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k}")
    if k == 0:
        return weierstrass(f, alpha, t)
    if not t > 0:
        raise ValueError("time derivatives of order k >= 1 require t > 0")
    mult = (-1.0) ** k * symbol_power(f.spec, 2.0 * alpha * k) * semigroup_multiplier(f.spec, alpha, t)
    return apply_multiplier(f, mult)


def lift(f: SpatialField, sigma: float) -> SpatialField:
    """Bessel-potential lift ``((1 + |xi|^2)^{-sigma/2} f^)^vee``."""
    if sigma == 0:
        return SpatialField(f.spec, f.values.copy())
    mult = (1.0 + f.spec.xi_abs**2) ** (-sigma / 2.0)
    return apply_multiplier(f, mult)


@dataclass
class Kernel:
    alpha: float
    sigma: float
    samples: SpatialField

    @property
    def spec(self) -> GridSpec:
        return self.samples.spec

    def radius(self) -> np.ndarray:
        sq = np.zeros(self.spec.shape)
        for c in self.spec.coords():
            sq += c * c
        return np.sqrt(sq)


def kernel(alpha: float, sigma: float, spec: GridSpec) -> Kernel:
    """Samples of ``(|xi|^sigma exp(-|xi|^{2 alpha}))^vee`` on the periodic grid.

    The periodic grid returns the L-periodization of the kernel on R^n; its
    lattice integral equals ``(2 pi)^{n/2}`` times the symbol at 0.
    """
    _check_alpha(alpha)
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    symbol = np.exp(-symbol_power(spec, 2.0 * alpha))
    if sigma > 0:
        symbol = symbol * symbol_power(spec, float(sigma))
    samples = inverse_transform(SpectralField(spec, symbol))
    # the symbol is radial and real, so the kernel is real and even
    samples = SpatialField(spec, samples.values.real.astype(complex))
    return Kernel(alpha, sigma, samples)


def decay_exponent_fit(
    ker: Kernel,
    window: tuple[float, float],
    bins: int = 40,
    floor: float = 1e-14,
) -> float:
    """Least-squares slope of ``log |K|`` against ``log |x|`` over a radial window.

    Samples are averaged in log-spaced radial bins before fitting. The window
    must stay within ``|x| <= 0.35 L``; beyond that the periodic images of
    the kernel contaminate the tail.
    """
    lo, hi = window
    spec = ker.spec
    if not 0 < lo < hi:
        raise ValueError(f"invalid fit window {window}")
    if hi > 0.35 * spec.L + 1e-12:
        raise ValueError(f"fit window upper edge {hi} exceeds 0.35*L = {0.35 * spec.L}")
    r = ker.radius().ravel()
    mag = np.abs(ker.samples.values).ravel()
    sel = (r >= lo) & (r <= hi)
    if not np.any(sel):
        raise ValueError("fit window contains no lattice points")
    r, mag = r[sel], mag[sel]
    keep = mag > floor
    if not np.any(keep):
        raise ValueError("all samples in the fit window are below the noise floor")
    r, mag = r[keep], mag[keep]
    edges = np.geomspace(r.min(), r.max() * (1 + 1e-12), bins + 1)
    idx = np.digitize(r, edges) - 1
    lr, lm = [], []
    for b in range(bins):
        m = idx == b
        if np.any(m):
            lr.append(np.mean(np.log(r[m])))
            lm.append(np.mean(np.log(mag[m])))
    if len(lr) < 2:
        raise ValueError("fit window too narrow for a slope")
    slope, _ = np.polyfit(lr, lm, 1)
    return float(slope)


def _plateau(r, inner, outer):
    return _kernels.smooth_transition(r, inner, outer)


@dataclass
class AdmissibilityProbe:
    """Cutoff ``h`` (1 on |x|<=1, 0 for |x|>=2) and annulus ``H`` (1 on 1/2..2, 0 outside 1/4..4)."""

    sigma: float
    a: float
    spec: GridSpec = field(default_factory=lambda: GridSpec(1, 2048, 64 * np.pi))

    def __post_init__(self):
        if not self.a > self.spec.n:
            raise ValueError(f"weight exponent a must exceed n = {self.spec.n}, got {self.a}")

    @staticmethod
    def h(r):
        return _plateau(r, 1.0, 2.0)

    @staticmethod
    def H(r):
        r = np.asarray(r, dtype=float)
        return (1.0 - _plateau(r, 0.25, 0.5)) * _plateau(r, 2.0, 4.0)


def _phi(r, sigma_phi, alpha):
    return r**sigma_phi * np.exp(-(r ** (2 * alpha)))


def _l1_of_symbol(spec: GridSpec, symbol: np.ndarray, weight_exp: float | None):
    vals = np.abs(inverse_transform(SpectralField(spec, symbol)).values)
    if weight_exp is not None:
        r = np.sqrt(sum(c * c for c in spec.coords()))
        vals = vals * (1.0 + r) ** weight_exp
    return float(np.sum(vals) * spec.dx**spec.n)


def _probe_values(probe: AdmissibilityProbe, spec: GridSpec, sigma_phi, alpha, m_max):
    r = spec.xi_abs
    with np.errstate(divide="ignore", invalid="ignore"):
        near = _phi(r, sigma_phi, alpha) * probe.h(r) / r**probe.sigma
    # origin sample: the limit when sigma_phi >= sigma, dropped when singular
    origin = tuple([0] * spec.n)
    if sigma_phi > probe.sigma:
        near[origin] = 0.0
    elif sigma_phi == probe.sigma:
        near[origin] = 1.0
    else:
        near[origin] = 0.0
    Hr = probe.H(r)
    i16, i19 = [], []
    for m in range(1, m_max + 1):
        sym = _phi(2.0**m * r, sigma_phi, alpha) * Hr
        i16.append(_l1_of_symbol(spec, sym, None))
        i19.append(_l1_of_symbol(spec, sym, probe.a))
    return {
        "I15": _l1_of_symbol(spec, near, None),
        "I16": i16,
        "I18": _l1_of_symbol(spec, near, probe.a),
        "I19": i19,
    }


def admissibility_integrals(
    probe: AdmissibilityProbe,
    sigma_phi: float,
    alpha: float,
    m_max: int = 8,
    rtol: float = 0.2,
    allow_divergent: bool = False,
) -> dict:
    """Evaluate the four kernel admissibility integrals for ``phi = |xi|^sigma_phi e^{-|xi|^{2 alpha}}``.

    Each integral is computed on ``probe.spec`` and on a grid with twice the
    box length and twice the points (half the frequency spacing, same
    Nyquist). An integral is reported finite when the two values agree
    within ``rtol``; the sup over ``m`` is used for the annulus integrals.
    The near-origin integrals need ``sigma < sigma_phi``; pass
    ``allow_divergent=True`` to evaluate them anyway as a divergence probe.
    """
    _check_alpha(alpha)
    if probe.sigma >= sigma_phi and not allow_divergent:
        raise ValueError(
            f"vanishing order sigma={probe.sigma} must be below sigma_phi={sigma_phi}"
        )
    base = probe.spec
    fine = GridSpec(base.n, 2 * base.N, 2 * base.L)
    v0 = _probe_values(probe, base, sigma_phi, alpha, m_max)
    v1 = _probe_values(probe, fine, sigma_phi, alpha, m_max)
    out = {"values": v0, "refined": v1, "finite": {}}
    for key in ("I15", "I18"):
        a, b = v0[key], v1[key]
        out["finite"][key] = bool(np.isfinite(b) and abs(b - a) <= rtol * abs(a))
    for key in ("I16", "I19"):
        a, b = max(v0[key]), max(v1[key])
        out["finite"][key] = bool(np.isfinite(b) and abs(b - a) <= rtol * abs(a))
    return out
