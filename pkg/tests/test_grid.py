import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracheat.grid import (
    GridSpec,
    SpatialField,
    SpectralField,
    apply_multiplier,
    forward_transform,
    inverse_transform,
    lp_norm,
)
from fracheat.oracle import dft_direct


@pytest.mark.parametrize("bad", [dict(n=4, N=16, L=1.0), dict(n=1, N=15, L=1.0), dict(n=1, N=16, L=0.0), dict(n=1, N=4, L=1.0)])
def test_gridspec_rejects_bad_parameters(bad):
    with pytest.raises(ValueError):
        GridSpec(**bad)


def test_grid_geometry():
    spec = GridSpec(1, 8, 4.0)
    assert spec.dx == 0.5
    np.testing.assert_allclose(spec.x1, [-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5])
    assert spec.xi_min == pytest.approx(math.pi / 2)
    assert spec.xi_max == pytest.approx(2 * math.pi)
    assert spec.refined() == GridSpec(1, 16, 4.0)


def test_gridspec_is_hashable_and_frozen():
    spec = GridSpec(2, 16, 1.0)
    assert hash(spec) == hash(GridSpec(2, 16, 1.0))
    with pytest.raises(Exception):
        spec.N = 32


@pytest.mark.parametrize("n,N", [(1, 16), (1, 64), (2, 16), (2, 32)])
def test_fast_transform_matches_direct_sum(n, N, rng):
    spec = GridSpec(n, N, 3.0)
    f = SpatialField(spec, rng.normal(size=spec.shape) + 1j * rng.normal(size=spec.shape))
    fast = forward_transform(f).coeffs
    slow = dft_direct(f).coeffs
    assert np.max(np.abs(fast - slow)) <= 1e-12 * np.max(np.abs(slow))


@given(st.integers(0, 2**31 - 1), st.sampled_from([1, 2]))
def test_transform_roundtrip_and_parseval(seed, n):
    rng = np.random.default_rng(seed)
    spec = GridSpec(n, 16, 5.0)
    f = SpatialField(spec, rng.normal(size=spec.shape) + 1j * rng.normal(size=spec.shape))
    g = forward_transform(f)
    back = inverse_transform(g)
    np.testing.assert_allclose(back.values, f.values, atol=1e-12)
    energy_xi = math.sqrt(np.sum(np.abs(g.coeffs) ** 2) * spec.dxi**n)
    assert energy_xi == pytest.approx(lp_norm(f, 2), rel=1e-12)


def test_gaussian_transform_is_gaussian():
    # unitary convention: exp(-|x|^2/2) is its own transform
    spec = GridSpec(1, 256, 40.0)
    x = spec.coords()[0]
    g = forward_transform(SpatialField(spec, np.exp(-(x**2) / 2)))
    xi = spec.frequencies()[0]
    np.testing.assert_allclose(g.coeffs, np.exp(-(xi**2) / 2), atol=1e-13)


def test_spectral_field_shape_check():
    spec = GridSpec(1, 16, 1.0)
    with pytest.raises(ValueError):
        SpectralField(spec, np.zeros(8))
    with pytest.raises(ValueError):
        SpatialField(spec, np.zeros((16, 16)))


def test_apply_multiplier_identity_and_derivative():
    spec = GridSpec(1, 32, 2 * np.pi)
    x = spec.coords()[0]
    f = SpatialField(spec, np.sin(3 * x))
    np.testing.assert_allclose(apply_multiplier(f, np.ones(spec.shape)).values, f.values, atol=1e-14)
    d = apply_multiplier(f, 1j * spec.frequencies()[0])
    np.testing.assert_allclose(d.values.real, 3 * np.cos(3 * x), atol=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3.5, math.inf])
def test_lp_norm_of_constant(p):
    spec = GridSpec(2, 16, 3.0)
    f = SpatialField(spec, np.full(spec.shape, 2.0))
    expected = 2.0 if math.isinf(p) else 2.0 * 9.0 ** (1 / p)
    assert lp_norm(f, p) == pytest.approx(expected, rel=1e-13)


def test_lp_norm_validation():
    spec = GridSpec(1, 16, 1.0)
    with pytest.raises(ValueError):
        lp_norm(SpatialField(spec, np.ones(16)), 0.5)
    with pytest.raises(TypeError):
        lp_norm(np.ones(16), 2)


def test_field_arithmetic(line):
    a = SpatialField(line, np.ones(line.shape))
    b = SpatialField(line, 2 * np.ones(line.shape))
    assert (a + b).mean() == pytest.approx(3)
    assert (b - a).mean() == pytest.approx(1)
    assert (a * 4).mean() == pytest.approx(4)
    assert a.is_real()
    with pytest.raises(ValueError):
        a + SpatialField(GridSpec(1, 32, 1.0), np.ones(32))
