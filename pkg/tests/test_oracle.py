import math

import numpy as np
import pytest

from fracheat.grid import GridSpec, SpatialField
from fracheat.oracle import (
    cole_hopf,
    dft_direct,
    gauss_kernel,
    kernel_quadrature,
    poisson_kernel,
    poisson_kernel_periodic,
)


def test_direct_dft_size_guard():
    spec = GridSpec(2, 256, 1.0)
    with pytest.raises(ValueError):
        dft_direct(SpatialField(spec, np.zeros(spec.shape)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quadrature_reproduces_gaussian(n):
    x = np.array([0.0, 0.5, 1.3, 3.0])
    np.testing.assert_allclose(kernel_quadrature(1.0, 0.0, x, n=n), gauss_kernel(x, n), atol=1e-11)


def test_quadrature_reproduces_poisson():
    x = np.array([0.0, 0.7, 2.0, 10.0])
    np.testing.assert_allclose(kernel_quadrature(0.5, 0.0, x), poisson_kernel(x), atol=1e-10)


def test_quadrature_rejects_bad_input():
    with pytest.raises(ValueError):
        kernel_quadrature(1.0, -1.0, [0.0])
    with pytest.raises(ValueError):
        kernel_quadrature(1.0, 0.0, [0.0], n=4)


def test_periodic_poisson_is_image_sum():
    L = 10.0
    x = np.array([0.0, 1.0, 4.5])
    m = np.arange(-200000, 200001)
    # truncated image sum plus its 1/|y|^2 tail beyond |m| = 200000
    tail = 2 * math.sqrt(2 / math.pi) / (L**2 * 200000.5)
    images = np.array([np.sum(poisson_kernel(xv + m * L)) for xv in x]) + tail
    np.testing.assert_allclose(poisson_kernel_periodic(x, L), images, rtol=1e-9)


def _residual(u0, t, dt=1e-4):
    # u_t - u_xx - (u^2)_x evaluated spectrally at time t
    spec = u0.spec
    xi = 2 * np.pi / spec.L * np.fft.fftfreq(spec.N, 1.0 / spec.N)
    up = cole_hopf(u0, t + dt).values.real
    um = cole_hopf(u0, t - dt).values.real
    u = cole_hopf(u0, t).values.real
    ut = (up - um) / (2 * dt)
    uxx = np.fft.ifft(-(xi**2) * np.fft.fft(u)).real
    flux = np.fft.ifft(1j * xi * np.fft.fft(u * u)).real
    return np.max(np.abs(ut - uxx - flux))


@pytest.mark.parametrize("text_mean", [0.0, 0.3])
def test_cole_hopf_solves_the_equation(text_mean):
    spec = GridSpec(1, 128, 2 * np.pi)
    x = spec.coords()[0]
    u0 = SpatialField(spec, text_mean + 0.5 * np.sin(x) + 0.2 * np.cos(2 * x))
    assert _residual(u0, 0.2) < 1e-6


def test_cole_hopf_initial_value_and_mean():
    spec = GridSpec(1, 64, 2 * np.pi)
    x = spec.coords()[0]
    u0 = SpatialField(spec, 0.2 + 0.3 * np.sin(x))
    np.testing.assert_allclose(cole_hopf(u0, 0.0).values, u0.values)
    assert cole_hopf(u0, 0.4).mean().real == pytest.approx(0.2, abs=1e-12)


def test_cole_hopf_preconditions():
    spec = GridSpec(1, 16, 2 * np.pi)
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        cole_hopf(SpatialField(spec, rng.normal(size=16)), 0.1)
    with pytest.raises(ValueError):
        cole_hopf(SpatialField(GridSpec(2, 16, 1.0), np.zeros((16, 16))), 0.1)
    with pytest.raises(ValueError):
        cole_hopf(SpatialField(spec, np.zeros(16)), -1.0)
