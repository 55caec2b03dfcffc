"""Slow reference computations used to validate the fast paths.

Nothing here shares code with the transform or multiplier paths: the direct
DFT builds its own exponential matrices, the kernel oracle integrates the
symbol by adaptive quadrature, and the Cole-Hopf solution calls
``numpy.fft`` itself with its own wave numbers.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .grid import GridSpec, SpatialField, SpectralField

__all__ = [
    "dft_direct",
    "kernel_quadrature",
    "kernel_quadrature_periodic",
    "gauss_kernel",
    "poisson_kernel",
    "poisson_kernel_periodic",
    "cole_hopf",
    "DIRECT_DFT_LIMIT",
]

DIRECT_DFT_LIMIT = 2**14
OSCILLATION_BUDGET = 1e7


def dft_direct(f: SpatialField) -> SpectralField:
    """Direct-sum transform ``(2 pi)^{-n/2} (L/N)^n sum_x e^{-i x xi} f(x)``.

    Applied axis by axis with explicit exponential matrices.
    """
    spec = f.spec
    if spec.N**spec.n > DIRECT_DFT_LIMIT:
        raise ValueError(f"direct DFT limited to N^n <= {DIRECT_DFT_LIMIT}, got {spec.N**spec.n}")
    x = spec.L / spec.N * np.arange(spec.N) - spec.L / 2
    k = np.concatenate([np.arange(0, spec.N // 2), np.arange(-spec.N // 2, 0)])
    xi = 2 * np.pi * k / spec.L
    mat = np.exp(-1j * np.outer(xi, x)) * (spec.L / spec.N) / np.sqrt(2 * np.pi)
    out = np.asarray(f.values, dtype=complex)
    for axis in range(spec.n):
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
    return SpectralField(spec, out)


def _symbol_cutoff(alpha, sigma, tol=1e-13):
    """Radius R with ``int_R^inf r^{sigma + n-1} e^{-r^{2 alpha}} dr`` below ``tol`` (n <= 3)."""
    R = 1.0
    while True:
        tail, _ = integrate.quad(lambda r: r ** (sigma + 2) * np.exp(-(r ** (2 * alpha))), R, np.inf)
        if tail < tol:
            return R
        R *= 1.25


def kernel_quadrature(alpha: float, sigma: float, x, n: int = 1) -> np.ndarray:
    """``(2 pi)^{-n/2} int |xi|^sigma e^{-|xi|^{2 alpha}} e^{i x xi} dxi`` by adaptive quadrature.

    For n >= 2 the radial reduction is used with ``|x|`` as the argument.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if n not in (1, 2, 3):
        raise ValueError("n must be 1, 2 or 3")
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    R = _symbol_cutoff(alpha, sigma)
    if np.any(np.abs(pts) * R > OSCILLATION_BUDGET):
        raise ValueError(f"|x| beyond the oscillation budget {OSCILLATION_BUDGET / R:.4g}")

    def g(r):
        return r**sigma * np.exp(-(r ** (2 * alpha)))

    opts = dict(limit=2000, epsabs=1e-14, epsrel=1e-12)
    out = np.empty(pts.shape)
    for i, xv in enumerate(np.abs(pts)):
        if n == 1:
            if xv == 0:
                val, _ = integrate.quad(g, 0, R, **opts)
            else:
                val, _ = integrate.quad(g, 0, R, weight="cos", wvar=xv, **opts)
            out[i] = 2 * val / math.sqrt(2 * math.pi)
        elif n == 2:
            val, _ = integrate.quad(lambda r: r * g(r) * special.j0(xv * r), 0, R, **opts)
            out[i] = val
        else:
            if xv == 0:
                val, _ = integrate.quad(lambda r: r * r * g(r), 0, R, **opts)
                out[i] = 4 * math.pi * val / (2 * math.pi) ** 1.5
            else:
                val, _ = integrate.quad(lambda r: r * g(r), 0, R, weight="sin", wvar=xv, **opts)
                out[i] = 4 * math.pi * val / (xv * (2 * math.pi) ** 1.5)
    return out


def kernel_quadrature_periodic(alpha, sigma, x, L, images: int = 50, tail_decay: float | None = None):
    """L-periodization ``sum_m K(x + m L)`` for n = 1.

    Images with ``|m| <= images`` are summed by quadrature; the remainder
    uses the far-field law ``K(y) ~ A |y|^{-tail_decay}``, with ``A`` fixed by
    one quadrature value beyond the last image, summed with the Hurwitz zeta
    function.
    """
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    total = np.zeros(pts.shape)
    for m in range(-images, images + 1):
        total += kernel_quadrature(alpha, sigma, pts + m * L)
    if tail_decay is not None and tail_decay > 1:
        far = (images + 0.5) * L
        amp = kernel_quadrature(alpha, sigma, [far])[0] * far**tail_decay
        total += 2 * amp * L ** (-tail_decay) * special.zeta(tail_decay, images + 1)
    return total


def gauss_kernel(x, n: int = 1):
    """``(e^{-|xi|^2})^vee = 2^{-n/2} e^{-|x|^2/4}``."""
    x = np.asarray(x, dtype=float)
    return 2.0 ** (-n / 2) * np.exp(-(x**2) / 4)


def poisson_kernel(x):
    """``(e^{-|xi|})^vee = sqrt(2/pi) / (1 + x^2)`` in one dimension."""
    x = np.asarray(x, dtype=float)
    return math.sqrt(2 / math.pi) / (1 + x**2)


def poisson_kernel_periodic(x, L):
    """Closed-form L-periodization of the one-dimensional Poisson kernel (method of images)."""
    x = np.asarray(x, dtype=float)
    w = 2 * math.pi / L
    images = (math.pi / L) * math.sinh(w) / (math.cosh(w) - np.cos(w * x))
    return math.sqrt(2 / math.pi) * images


def _wavenumbers(N, L):
    return 2 * np.pi / L * np.fft.fftfreq(N, 1.0 / N)


def cole_hopf(u0: SpatialField, t: float, band_tol: float = 1e-10) -> SpatialField:
    """Exact solution of ``u_t = u_xx + (u^2)_x`` on the periodic line.

    ``w = -2u`` solves viscous Burgers, so ``u = theta_x / theta`` with
    ``theta`` a heat flow started from ``exp(int u0)``. A nonzero mean ``m``
    is removed by the Galilean change ``u(x,t) = m + v(x + 2 m t, t)``.
    """
    spec = u0.spec
    if spec.n != 1:
        raise ValueError("Cole-Hopf is available for n = 1 only")
    if t < 0:
        raise ValueError("t must be nonnegative")
    vals = np.asarray(u0.values).real
    N, L = spec.N, spec.L
    xi = _wavenumbers(N, L)
    coef = np.fft.fft(vals)
    high = np.abs(xi) > (2.0 / 3.0) * np.pi * N / L
    if np.max(np.abs(coef[high]), initial=0.0) > band_tol * max(np.max(np.abs(coef)), 1e-300):
        raise ValueError("initial datum is not band-limited to the lower two thirds of the spectrum")
    if t == 0:
        return SpatialField(spec, vals.astype(complex))
    mean = coef[0].real / N
    coef0 = coef.copy()
    coef0[0] = 0.0
    anti = np.zeros_like(coef0)
    nz = xi != 0
    anti[nz] = coef0[nz] / (1j * xi[nz])
    potential = np.fft.ifft(anti).real
    theta0 = np.exp(potential - potential.max())
    theta_hat = np.fft.fft(theta0) * np.exp(-t * xi**2)
    theta = np.fft.ifft(theta_hat).real
    theta_x = np.fft.ifft(1j * xi * theta_hat).real
    v = theta_x / theta
    if mean != 0.0:
        v = np.fft.ifft(np.fft.fft(v) * np.exp(1j * xi * 2 * mean * t)).real
    return SpatialField(spec, (mean + v).astype(complex))
