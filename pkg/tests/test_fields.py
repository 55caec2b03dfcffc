import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracheat.grid import GridSpec
from fracheat.fields import FieldSyntaxError, ensemble, parse_field, random_bandlimited, random_power_law


def test_parse_basic_expressions(line, plane):
    x = line.coords()[0]
    np.testing.assert_allclose(parse_field("0.1*sin(x)", line).values, 0.1 * np.sin(x))
    xs, ys = plane.coords()
    f = parse_field("exp(-(x**2 + y**2)) + 0.2*cos(2*y)", plane)
    np.testing.assert_allclose(f.values, np.exp(-(xs**2 + ys**2)) + 0.2 * np.cos(2 * ys))


def test_parse_gauss_and_random(line):
    x = line.coords()[0]
    np.testing.assert_allclose(parse_field("gauss(0.5)", line).values, np.exp(-(x**2) / 0.5))
    np.testing.assert_allclose(parse_field("gauss(0.5, 3)", line).values, 3 * np.exp(-(x**2) / 0.5))
    r = parse_field("random(7, 6)", line)
    assert np.max(np.abs(r.values)) == pytest.approx(1.0)
    np.testing.assert_array_equal(r.values, parse_field("random(7, 6)", line).values)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_parse_constants(c):
    spec = GridSpec(1, 8, 1.0)
    f = parse_field(repr(c), spec)
    np.testing.assert_array_equal(f.values, np.full(8, c))


@pytest.mark.parametrize(
    "text",
    ["y", "foo(x)", "__import__('os')", "x.real", "[x]", "sin(x", "1/0", "exp(1000)", "random(1.5, 3)", "x if x else 1", "sin(x, y=1)", "True"],
)
def test_parse_rejects(text, line):
    with pytest.raises(FieldSyntaxError):
        parse_field(text, line)


def test_random_bandlimited_is_grid_independent():
    coarse = GridSpec(1, 64, 2 * np.pi)
    fine = coarse.refined()
    a = random_bandlimited(coarse, 3, 10)
    b = random_bandlimited(fine, 3, 10)
    np.testing.assert_allclose(a, b[::2], atol=1e-13)


def test_random_bandlimited_band_and_norm(plane):
    vals = random_bandlimited(plane, 5, 4)
    coef = np.fft.fftn(vals) / plane.N**2
    k = np.abs(np.fft.fftfreq(plane.N, 1.0 / plane.N))
    outside = (k[:, None] > 4) | (k[None, :] > 4)
    assert np.max(np.abs(coef[outside])) < 1e-14
    assert abs(coef[0, 0]) < 1e-15
    with pytest.raises(ValueError):
        random_bandlimited(plane, 5, 11)


def test_random_power_law_spectrum():
    spec = GridSpec(2, 64, 2 * np.pi)
    vals = random_power_law(spec, -2.0, seed=1)
    assert np.max(np.abs(vals)) == pytest.approx(1.0)
    mag = np.abs(np.fft.fftn(vals))
    r = spec.xi_abs
    live = (r > 0) & (r <= (2 / 3) * spec.xi_max)
    assert np.max(mag[~live]) < 1e-10 * np.max(mag)


def test_ensemble_is_reproducible(line):
    a = ensemble(line, size=5)
    b = ensemble(line, size=5)
    assert len(a) == 5
    for f, g in zip(a, b):
        np.testing.assert_array_equal(f.values, g.values)
    assert not np.allclose(a[0].values, a[1].values)
